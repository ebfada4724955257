"""Acceptance suite: nine end-to-end checks with stated tolerances and time budgets.

Each check returns a :class:`CriterionResult`; ``run_all`` runs them in order.
The CLI ``accept`` subcommand and ``tests/test_acceptance.py`` both use this module.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import exact, families, observables, regularized, semiclassical, symplectic
from .observables import angular_momentum, energy
from .symplectic import PhasePoint


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    runtime: float
    budget: float
    checks: dict[str, bool] = field(default_factory=dict)
    detail: dict[str, object] = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.runtime < self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        failed = [k for k, v in self.checks.items() if not v]
        if not self.within_budget:
            failed.append(f"runtime {self.runtime:.1f}s > {self.budget:.0f}s")
        tail = f"  failed: {', '.join(failed)}" if failed else ""
        return f"[{status}] {self.number}. {self.title} ({self.runtime:.2f}s / {self.budget:.0f}s){tail}"


def _timed(number: int, title: str, budget: float):
    def deco(fn):
        def run(seed: int = 0) -> CriterionResult:
            t0 = time.perf_counter()
            checks, detail = fn(seed)
            dt = time.perf_counter() - t0
            return CriterionResult(number, title, all(checks.values()), dt, budget, checks, detail)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return deco


def _random_point(rng, n: int) -> PhasePoint:
    return PhasePoint(n, rng.normal(size=4 * n))


# ---------------------------------------------------------------------------


@_timed(1, "symmetry engine: generators, periodicity, group law, energy", 10.0)
def symmetry_engine(seed: int):
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = {"orthosymplectic": 0.0, "periodicity": 0.0, "group_law": 0.0, "energy": 0.0}
    counts = {}
    for n in (1, 2, 3):
        gens = symplectic.basis_generators(n)
        counts[n] = len(gens)
        for g in gens:
            worst["orthosymplectic"] = max(worst["orthosymplectic"], symplectic.check_orthosymplectic(g).residual)
            w = rng.normal(size=4 * n)
            e0 = 0.5 * float(w @ w)
            worst["periodicity"] = max(
                worst["periodicity"], float(np.max(np.abs(symplectic.group_element(g, 2 * np.pi) @ w - w)))
            )
            s1, s2 = rng.uniform(-np.pi, np.pi, 2)
            lhs = symplectic.group_element(g, s1) @ symplectic.group_element(g, s2)
            rhs = symplectic.group_element(g, s1 + s2)
            worst["group_law"] = max(worst["group_law"], float(np.max(np.abs(lhs - rhs))))
            moved = symplectic.group_element(g, s1) @ w
            worst["energy"] = max(worst["energy"], abs(0.5 * float(moved @ moved) - e0) / e0)
    checks = {k: v < tol for k, v in worst.items()}
    checks["basis size 4N^2"] = counts == {1: 4, 2: 16, 3: 36}
    return checks, {"worst": worst, "counts": counts}


@_timed(2, "angular-momentum flows: closed form vs transport, J_u maximum", 30.0)
def angular_momentum_flows(seed: int):
    rng = np.random.default_rng(seed)
    worst_flow = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        w = _random_point(rng, n)
        labels = list(symplectic.basis_labels(n))
        if n == 1 and rng.random() < 0.25:
            gen = symplectic.mixing_generator(float(rng.uniform(0, 2 * np.pi)))
        else:
            gen = symplectic.build_generator(labels[int(rng.integers(len(labels)))], n)
        sigma = float(rng.uniform(-np.pi, np.pi))
        selectors = list(range(1, n + 1)) + observables.pairs_of(n)
        if gen.label.kind == "mix":
            selectors = [1]
        sel = selectors[int(rng.integers(len(selectors)))]
        a = observables.j_flow_closed_form(w, gen, sigma, sel)
        b = observables.transported_angular_momentum(w, gen, sigma, sel)
        worst_flow = max(worst_flow, abs(a - b))

    worst_max = 0.0
    beta = np.linspace(0, 2 * np.pi, 4001)
    for _ in range(20):
        w = _random_point(rng, 1)
        vals = np.array([observables.j_u(w, b) for b in beta])
        k = int(np.argmax(vals))
        res = minimize_scalar(
            lambda b: -observables.j_u(w, b),
            bracket=(beta[max(k - 1, 0)], beta[k], beta[min(k + 1, len(beta) - 1)]),
            tol=1e-12,
        )
        scanned = -float(res.fun)
        e, j = energy(w), angular_momentum(w, 1)
        worst_max = max(worst_max, abs(scanned - math.sqrt(e * e - j * j)))
    checks = {"flow closed forms": worst_flow < 1e-10, "J_u maximum": worst_max < 1e-6}
    return checks, {"worst_flow": worst_flow, "worst_ju_max": worst_max}


@_timed(3, "family classification, same-sign paths, completeness probe", 60.0)
def family_classification(seed: int):
    rng = np.random.default_rng(seed)
    cats = {n: families.enumerate_orientation_classes(n, seed=seed) for n in (2, 3, 4)}
    checks = {
        "N=2 gives 2": cats[2].count == 2,
        "N=3 gives 8": cats[3].count == 8,
        "N=4 gives 64": cats[4].count == 64,
        "representatives re-verified": all(not families.verify_catalog(c) for c in cats.values()),
    }
    for n in (2, 3, 4):
        checks[f"N={n} all signatures by concentric circles"] = cats[n].concentric_count == cats[n].expected

    all_single = True
    consistent = True
    for _ in range(100):
        w = _random_point(rng, 1)
        e, j0 = energy(w), angular_momentum(w, 1)
        target = math.copysign(float(rng.uniform(0.02, 0.98)) * e, j0)
        path = families.connect_same_sign(w, target)
        all_single &= path.single_signed()
        consistent &= families.connection_consistent_with_transport(path)
    checks["100 same-sign paths keep the sign of J"] = bool(all_single)
    checks["paths agree with group transport"] = bool(consistent)

    blocks = symplectic.build_basis_blocks()
    gens = {k: symplectic.composite(blocks.u(k), 1, f"u{k}") for k in range(1, 5)}
    complete_ok = True
    incomplete_ok = True
    for _ in range(5):
        w = _random_point(rng, 1)
        for k in (1, 2):
            complete_ok &= families.completeness_probe(gens[k], w).complete
        for k in (3, 4):
            shifted, _ = families.delta_reaching_point(gens[k], w)
            incomplete_ok &= not families.completeness_probe(gens[k], shifted).complete
    checks["u1, u2 complete"] = bool(complete_ok)
    checks["u3, u4 reach the coincidence set"] = bool(incomplete_ok)
    detail = {
        "counts": {n: c.count for n, c in cats.items()},
        "concentric_counts": {n: c.concentric_count for n, c in cats.items()},
        "unrealized_by_concentric_N4": len(cats[4].unrealized_by_concentric),
    }
    return checks, detail


@_timed(4, "invariant subgroup of zero-crossing-preserving generators", 30.0)
def invariant_subgroup(seed: int):
    rng = np.random.default_rng(seed)
    checks = {}
    dims = {}
    for n in (2, 3, 4):
        basis = families.invariant_subgroup_basis(n, seed=seed)
        derived = families.derive_invariant_subalgebra(n, seed=seed)
        dims[n] = (basis.dimension, derived.dimension)
        checks[f"N={n} dimension 6"] = basis.dimension == 6 and derived.dimension == 6
        checks[f"N={n} derived span matches"] = families.same_span(basis, derived)
        members_ok = max(families.zero_crossing_violation(g, rng, 50) for g in basis.generators) < 1e-9
        checks[f"N={n} members preserve zero crossings"] = bool(members_ok)
        blocks = symplectic.build_basis_blocks()
        outsider = families.block_diagonal_generator(blocks.u(3), n, "block-diagonal u3")
        checks[f"N={n} non-member fails"] = families.zero_crossing_violation(outsider, rng, 50) > 1e-3
    return checks, {"dimensions": dims}


@_timed(5, "regularized dynamics: vanishing deflection, half period, exterior ellipses", 60.0)
def regularized_dynamics(seed: int):
    eps_seq = [1e-1, 1e-2, 1e-3, 1e-4]
    deflections = [abs(regularized.interior_deflection(1.0, 0.5, e).delta_theta) for e in eps_seq]
    limit = regularized.classify_limit(1.0, 0.5, 0.5, eps_seq)
    ellipse = regularized.integrate_orbit(1.0, 0.9, regularized.FluxProfile(1e-3, 0.5), t_max=2.2 * np.pi)
    full_period = ellipse.classification.period
    crossing = regularized.integrate_orbit(1.0, 0.5 + 0.05, regularized.FluxProfile(0.1, 0.5), t_max=2.2 * np.pi)
    ell_dev = regularized.exterior_ellipse_deviation(crossing)
    checks = {
        "deflection strictly decreasing": all(b < a for a, b in zip(deflections, deflections[1:])),
        "deflection(1e-3) < 0.01": deflections[2] < 0.01,
        "classified reflecting_radial": limit.kind == "reflecting_radial",
        "ellipse classified": ellipse.classification.kind == "exterior_ellipse",
        "period ratio 1/2 to 1e-6": full_period is not None and abs(limit.period - full_period / 2) < 1e-6,
        "crossing orbit enters the disc": crossing.classification.kind == "crossing",
        "exterior segments on the ellipse to 1e-6": ell_dev < 1e-6,
        "exterior ell conserved to 1e-8": float(np.ptp(crossing.exterior_angular_momenta())) < 1e-8,
        "energy conserved to 1e-8": float(np.ptp(crossing.energies())) < 1e-8,
    }
    detail = {
        "deflections": deflections,
        "bounce_periods": limit.bounce_periods,
        "extrapolated_half_period": limit.period,
        "full_period": full_period,
        "ellipse_deviation": ell_dev,
    }
    return checks, detail


@_timed(6, "semiclassical spectrum: slopes, multiplicities, two-particle lines", 5.0)
def semiclassical_spectrum(seed: int):
    checks = {
        "N=2 slopes": semiclassical.slope_set(2) == [-1, 1],
        "N=3 slopes": semiclassical.slope_set(3) == [-3, -1, 1, 3],
        "N=4 slopes": semiclassical.slope_set(4) == list(range(-6, 7, 2)),
    }
    for n in range(2, 7):
        m = semiclassical.n_pairs(n)
        mult = {s: semiclassical.slope_multiplicity(n, s) for s in semiclassical.slope_set(n)}
        checks[f"N={n} multiplicities sum to 2^{m}"] = (
            sum(mult.values()) == 2**m and mult == semiclassical.slope_multiplicities_brute_force(n)
        )
    for a in (0.0, 0.25, 0.5):
        levels = [e for e, _ in exact.enumerate_spectrum(30, a)]
        ok, _ = semiclassical.two_particle_lines_match_exact(a, 25, levels, offset="maslov")
        checks[f"N=2 lines on exact spectrum at alpha={a}"] = ok
    return checks, {"offset": "maslov (N(N-1))"}


@_timed(7, "exact two-anyon identities: partition function and density of states", 60.0)
def exact_identities(seed: int):
    betas = np.linspace(0.5, 5, 10)
    alphas = np.linspace(0.0, 0.95, 20)
    sym = max(
        abs(exact.partition_function(b, a) - exact.partition_function(b, 1 - a)) / exact.partition_function(b, a)
        for b in betas
        for a in alphas
    )
    brute = max(
        abs(exact.partition_function(b, 0.3) - exact.partition_function_brute_force(b, 0.3, 120))
        / exact.partition_function(b, 0.3)
        for b in betas
    )
    cfg = exact.DosSeriesConfig.uniform(1.5, 12.0, 0.001, k_max=2000, broadening=0.01)
    series = exact.dos_series(cfg, 0.3).total
    oracle = exact.broadened_spectrum(cfg.energy_grid, 0.3, 0.01)
    l2 = exact.relative_l2_error(series, oracle)
    checks = {
        "Z symmetric under alpha -> 1 - alpha (1e-12)": sym < 1e-12,
        "Z closed form vs spectral sum (1e-10)": brute < 1e-10,
        "g(E) vs broadened spectrum (2% L2)": l2 < 0.02,
    }
    return checks, {"symmetry": sym, "brute_force": brute, "dos_l2": l2}


def off_pole_samples(rng, n: int, min_distance: float = 1e-3, e_range=(1.0, 20.0)):
    """Random (E, alpha) pairs at least ``min_distance`` from every pole of either form."""
    out = []
    while len(out) < n:
        e = float(rng.uniform(*e_range))
        a = float(rng.uniform(0.01, 0.99))
        d = min(
            abs((e + a) - round(e + a)),
            abs((e - a) - round(e - a)),
        )
        if d >= min_distance:
            out.append((e, a))
    return out


@_timed(8, "propagator resummations: identity, poles, residues", 60.0)
def propagator_identity(seed: int):
    rng = np.random.default_rng(seed)
    worst = max(
        abs(complex(exact.propagator_form_A(e, a).total) - complex(exact.propagator_form_B(e, a).total))
        for e, a in off_pole_samples(rng, 1000)
    )
    checks = {"|A - B| < 1e-12 off poles": worst < 1e-12}
    ratios = {}
    for a in (0.1, 0.25, 0.5, 0.75):
        cmp = exact.compare_pole_sets(a, 20.0)
        checks[f"alpha={a} pole sets A = B"] = cmp.agree and cmp.max_location_diff < 1e-9
        levels = [lv[0] for lv in exact.enumerate_spectrum(20.0, a)]
        miss_poles, miss_levels = exact.match_sets(cmp.poles_a, levels, 1e-9)
        checks[f"alpha={a} poles = spectrum"] = not miss_poles and not miss_levels
        reports = exact.poles_and_residues(a, 20.0)
        r = [p.residue / p.brute_force_degeneracy for p in reports if p.brute_force_degeneracy]
        ratios[a] = (min(r), max(r)) if r else (math.nan, math.nan)
        checks[f"alpha={a} residue/degeneracy constant"] = (
            bool(r) and len(r) == len(reports) and max(r) - min(r) < 1e-6 and all(p.converged for p in reports)
        )
    return checks, {"worst_difference": worst, "residue_over_degeneracy": ratios}


@_timed(9, "half-period signature in the Fourier transform of g(E)", 30.0)
def half_period_signature(seed: int):
    cfg = exact.DosSeriesConfig(exact.fourier_grid(1.0, 32.0, 0.01), k_max=2000, broadening=0.01)
    fr = exact.dos_fourier(0.3, cfg)
    tol = 0.02 * fr.bin_width
    p1 = fr.peak_near(np.pi)
    p2 = fr.peak_near(2 * np.pi)
    fr0 = exact.dos_fourier(0.0, cfg)
    p0 = fr0.peak_near(np.pi)
    amp0 = fr0.amplitude_at(np.pi)
    tracking = {}
    for a in (0.1, 0.2, 0.3, 0.4, 0.5):
        measured = exact.dos_fourier(a, cfg).amplitude_at(np.pi)
        expected = exact.half_period_k1_amplitude(a, cfg.broadening)
        tracking[a] = measured / expected - 1
    checks = {
        "peak at pi": p1 is not None and abs(p1.t - np.pi) <= tol,
        "peak at 2 pi": p2 is not None and abs(p2.t - 2 * np.pi) <= tol,
        "no pi peak at alpha=0": p0 is None and amp0 <= fr0.noise_floor,
        "k=1 amplitude tracks |sin(pi alpha)| within 5%": all(abs(v) < 0.05 for v in tracking.values()),
    }
    detail = {
        "peak_pi": None if p1 is None else p1.t,
        "peak_2pi": None if p2 is None else p2.t,
        "bin_width": fr.bin_width,
        "alpha0_amplitude_at_pi": amp0,
        "noise_floor": fr0.noise_floor,
        "relative_amplitude_error": tracking,
    }
    return checks, detail


CRITERIA = [
    symmetry_engine,
    angular_momentum_flows,
    family_classification,
    invariant_subgroup,
    regularized_dynamics,
    semiclassical_spectrum,
    exact_identities,
    propagator_identity,
    half_period_signature,
]


def run_all(seed: int = 0, only: list[int] | None = None) -> list[CriterionResult]:
    return [c(seed) for k, c in enumerate(CRITERIA, start=1) if only is None or k in only]

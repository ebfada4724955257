"""Orbit families: orientation classes, same-sign connections and symmetry reduction."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, least_squares, minimize

from .config import DEFAULT_TOLERANCES
from .observables import (
    DegeneracyReport,
    OrientationSignature,
    angular_momentum,
    best_mixing_angle,
    delta_J_mn,
    energy,
    j_flow_closed_form,
    mixed_flow_amplitude_phase,
    orientation_signature,
    pairs_of,
)
from .symplectic import (
    GeneratorMatrix,
    PhasePoint,
    basis_generators,
    build_basis_blocks,
    composite,
    group_element,
    mixing_generator,
)

MAX_CATALOG_PARTICLES = 6


# ---------------------------------------------------------------------------
# connecting two trajectories of the relative system


@dataclass(frozen=True)
class ConnectionPath:
    beta_hat: float
    sigma_hat: float
    samples: np.ndarray  # rows of (sigma, J(sigma))
    start: PhasePoint
    end: PhasePoint
    amplitude: float

    @property
    def min_abs_j(self) -> float:
        return float(np.min(np.abs(self.samples[:, 1])))

    def single_signed(self) -> bool:
        signs = np.sign(self.samples[:, 1])
        return bool(np.all(signs == signs[0]) and signs[0] != 0)


def _same_sign_window(theta0: float, positive: bool) -> tuple[float, float]:
    # half-open interval of length pi around theta0 where cos keeps its sign
    centre = 0.0 if positive else np.pi
    k = np.round((theta0 - centre) / (2 * np.pi))
    c = centre + 2 * np.pi * k
    return c - np.pi / 2, c + np.pi / 2


def connect_same_sign(
    omega_start: PhasePoint, j_target: float, n_samples: int = 200
) -> ConnectionPath:
    """One-parameter path from ``omega_start`` to a trajectory with ``J = j_target``.

    The mixing angle is chosen to maximise ``J_u`` so the flow amplitude equals
    the energy; the group parameter is then the nearest solution of
    ``E cos(2 sigma - delta) = j_target`` that stays on the starting sign branch.
    """
    if omega_start.n_particles != 1:
        raise ValueError("connections are built on the single-block relative system")
    j0 = angular_momentum(omega_start, 1)
    e = energy(omega_start)
    if j0 == 0 or j_target == 0 or np.sign(j0) != np.sign(j_target):
        raise ValueError(
            "start and target angular momenta must be non-zero with equal signs; "
            "any path between opposite signs crosses a degenerate trajectory"
        )
    if abs(j_target) > e * (1 + 1e-12):
        raise ValueError(f"|J_target| = {abs(j_target)} exceeds the energy {e}")

    beta = best_mixing_angle(omega_start)
    amp, delta = mixed_flow_amplitude_phase(omega_start, beta)
    theta0 = -delta
    lo, hi = _same_sign_window(theta0, j0 > 0)
    ratio = float(np.clip(j_target / amp, -1.0, 1.0))
    base = np.arccos(ratio)
    candidates = []
    for root in (base, -base):
        shift = np.round(((lo + hi) / 2 - root) / (2 * np.pi))
        th = root + 2 * np.pi * shift
        if lo - 1e-12 <= th <= hi + 1e-12:
            candidates.append(th)
    theta_t = min(candidates, key=lambda th: abs(th - theta0))
    sigma_hat = 0.5 * (theta_t - theta0)

    gen = mixing_generator(beta)
    sig = np.linspace(0.0, sigma_hat, max(n_samples, 2))
    jvals = amp * np.cos(2 * sig - delta)
    # refine around the smallest |J| sample
    k = int(np.argmin(np.abs(jvals)))
    lo_s = sig[max(k - 1, 0)]
    hi_s = sig[min(k + 1, len(sig) - 1)]
    extra = np.linspace(lo_s, hi_s, 51)
    sig = np.unique(np.concatenate([sig, extra]))
    if sigma_hat < 0:
        sig = sig[::-1]
    jvals = amp * np.cos(2 * sig - delta)
    end = PhasePoint(1, group_element(gen, sigma_hat) @ omega_start.coords)
    return ConnectionPath(
        beta_hat=beta,
        sigma_hat=float(sigma_hat),
        samples=np.column_stack([sig, jvals]),
        start=omega_start,
        end=end,
        amplitude=amp,
    )


# ---------------------------------------------------------------------------
# orientation classes


def circular_orbit_point(radii, senses, phases=None) -> PhasePoint:
    """Concentric circular orbits about the origin, one per particle.

    Particle k sits at radius ``radii[k]`` with angle ``phases[k]`` and moves
    counter-clockwise when ``senses[k] = +1``; its momentum is tangential with
    magnitude equal to the radius (unit frequency).
    """
    radii = np.asarray(radii, dtype=float)
    senses = np.asarray(senses, dtype=float)
    n = len(radii)
    if phases is None:
        phases = 0.7 * np.arange(n) + 0.3
    coords = []
    for r, s, ph in zip(radii, senses, phases):
        c, sn = np.cos(ph), np.sin(ph)
        coords.extend([r * c, r * sn, -s * r * sn, s * r * c])
    return PhasePoint(n, np.array(coords))


def elliptic_orbit_point(a, b) -> PhasePoint:
    """Oscillator orbits ``z_k(t) = a_k e^{it} + b_k e^{-it}`` evaluated at t = 0.

    For this parametrisation ``J_ij = |a_i - a_j|^2 - |b_i - b_j|^2``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    z = a + b
    p = 1j * (a - b)
    coords = np.column_stack([z.real, z.imag, p.real, p.imag]).ravel()
    return PhasePoint(len(a), coords)


@dataclass(frozen=True)
class FamilyClass:
    signature: OrientationSignature
    representative: PhasePoint
    construction: str  # "concentric" or "elliptic"


@dataclass
class FamilyCatalog:
    n_particles: int
    classes: list[FamilyClass]
    expected: int
    concentric_count: int
    unrealized: list[tuple[int, ...]] = field(default_factory=list)
    unrealized_by_concentric: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.classes)

    @property
    def count_is_lower_bound(self) -> bool:
        # exactly two families are proven only for the two-anyon system
        return self.n_particles >= 3

    def to_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "count": self.count,
            "expected_count": self.expected,
            "count_is_lower_bound": self.count_is_lower_bound,
            "concentric_count": self.concentric_count,
            "unrealized": [list(s) for s in self.unrealized],
            "unrealized_by_concentric": [list(s) for s in self.unrealized_by_concentric],
            "classes": [
                {
                    "signature": list(c.signature.as_tuple()),
                    "representative": c.representative.coords.tolist(),
                    "construction": c.construction,
                }
                for c in self.classes
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _concentric_classes(n: int) -> dict[tuple[int, ...], PhasePoint]:
    base_radii = 1.0 + 0.5 * np.arange(n)
    found: dict[tuple[int, ...], PhasePoint] = {}
    for order in itertools.permutations(range(n)):
        radii = np.empty(n)
        radii[list(order)] = base_radii
        for senses in itertools.product((1, -1), repeat=n):
            point = circular_orbit_point(radii, senses)
            sig = orientation_signature(point)
            if isinstance(sig, OrientationSignature):
                found.setdefault(sig.as_tuple(), point)
    return found


def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pairs_of(n))}


def _solve_elliptic(pattern: tuple[int, ...], n: int, rng, restarts: int = 30):
    """Search oscillator amplitudes realising ``pattern``; returns (a, b) or None."""
    pairs = pairs_of(n)
    eps = np.array(pattern, dtype=float)
    ii = np.array([p[0] - 1 for p in pairs])
    jj = np.array([p[1] - 1 for p in pairs])

    def unpack(x):
        a = x[0:n] + 1j * x[n : 2 * n]
        b = x[2 * n : 3 * n] + 1j * x[3 * n : 4 * n]
        return a, b

    def margins(x):
        a, b = unpack(x[:-1])
        d = np.abs(a[ii] - a[jj]) ** 2 - np.abs(b[ii] - b[jj]) ** 2
        return eps * d - x[-1]

    cons = [
        {"type": "ineq", "fun": margins},
        {"type": "eq", "fun": lambda x: x[:-1] @ x[:-1] - 1.0},
    ]
    for _ in range(restarts):
        x0 = rng.normal(size=4 * n)
        x0 /= np.linalg.norm(x0)
        x0 = np.append(x0, -1.0)
        res = minimize(
            lambda x: -x[-1],
            x0,
            constraints=cons,
            method="SLSQP",
            options={"maxiter": 500, "ftol": 1e-12},
        )
        if res.x[-1] > 1e-3:
            return unpack(res.x[:-1])
    return None


def _permuted(point: PhasePoint, perm) -> PhasePoint:
    blocks = [point.block(k + 1) for k in perm]
    return PhasePoint(point.n_particles, np.concatenate(blocks))


def _time_reversed(point: PhasePoint) -> PhasePoint:
    c = point.coords.reshape(-1, 4).copy()
    c[:, 2:] *= -1
    return PhasePoint(point.n_particles, c.ravel())


def enumerate_orientation_classes(
    n_particles: int, elliptic_fallback: bool = True, seed: int = 0
) -> FamilyCatalog:
    """Realise every sign pattern of the pairwise angular momenta.

    Concentric circular orbits are tried first over all radius orderings and
    rotation senses. Patterns they cannot reach are listed in
    ``unrealized_by_concentric``; with ``elliptic_fallback`` those are searched
    among general oscillator orbits, and every image of a solution under
    particle relabelling and time reversal is filled in at once.
    """
    n = n_particles
    if not 2 <= n <= MAX_CATALOG_PARTICLES:
        raise ValueError(f"n_particles must lie in 2..{MAX_CATALOG_PARTICLES}")
    all_patterns = list(itertools.product((1, -1), repeat=n * (n - 1) // 2))
    concentric = _concentric_classes(n)
    classes: dict[tuple[int, ...], FamilyClass] = {}
    for pattern, point in concentric.items():
        classes[pattern] = FamilyClass(
            OrientationSignature.from_sequence(n, pattern), point, "concentric"
        )
    missing_concentric = [p for p in all_patterns if p not in concentric]

    if elliptic_fallback:
        rng = np.random.default_rng(seed)
        perms = list(itertools.permutations(range(n)))
        for pattern in missing_concentric:
            if pattern in classes:
                continue
            sol = _solve_elliptic(pattern, n, rng)
            if sol is None:
                continue
            base = elliptic_orbit_point(*sol)
            for perm in perms:
                for flip in (False, True):
                    point = _permuted(base, perm)
                    if flip:
                        point = _time_reversed(point)
                    sig = orientation_signature(point)
                    if not isinstance(sig, OrientationSignature):
                        continue
                    key = sig.as_tuple()
                    if key not in classes:
                        classes[key] = FamilyClass(sig, point, "elliptic")

    ordered = [classes[p] for p in all_patterns if p in classes]
    unrealized = [p for p in all_patterns if p not in classes]
    return FamilyCatalog(
        n_particles=n,
        classes=ordered,
        expected=len(all_patterns),
        concentric_count=len(concentric),
        unrealized=unrealized,
        unrealized_by_concentric=missing_concentric,
    )


def verify_catalog(catalog: FamilyCatalog) -> list[str]:
    """Re-measure every representative; returns a list of mismatch descriptions."""
    problems = []
    for cls in catalog.classes:
        sig = orientation_signature(cls.representative)
        if isinstance(sig, DegeneracyReport):
            problems.append(f"{cls.signature.as_tuple()}: degenerate representative")
        elif sig.as_tuple() != cls.signature.as_tuple():
            problems.append(f"{cls.signature.as_tuple()}: measured {sig.as_tuple()}")
    return problems


# ---------------------------------------------------------------------------
# symmetry reduction


@dataclass(frozen=True)
class InvariantSubgroupBasis:
    n_particles: int
    generators: list[GeneratorMatrix]

    @property
    def dimension(self) -> int:
        flat = np.array([g.matrix.ravel() for g in self.generators])
        return int(np.linalg.matrix_rank(flat))


def all_blocks_generator(u: np.ndarray, n_particles: int, name: str = "") -> GeneratorMatrix:
    """Every 4x4 block equal to ``u``; acts on the centre-of-mass variables only."""
    return composite(np.kron(np.ones((n_particles, n_particles)), u), n_particles, name)


def block_diagonal_generator(u: np.ndarray, n_particles: int, name: str = "") -> GeneratorMatrix:
    return composite(np.kron(np.eye(n_particles), u), n_particles, name)


def zero_j_probe_point(n_particles: int, m: int, n: int, rng) -> PhasePoint:
    """Random phase point with ``J_mn = 0`` exactly (relative momentum parallel to r_mn)."""
    w = rng.normal(size=4 * n_particles)
    r = rng.normal(size=2)
    lam = rng.normal()
    rel = np.array([r[0], r[1], lam * r[0], lam * r[1]])
    w[4 * (m - 1) : 4 * m] = w[4 * (n - 1) : 4 * n] + rel
    return PhasePoint(n_particles, w)


def zero_crossing_violation(
    t: GeneratorMatrix, rng, n_probes: int = 100
) -> float:
    """Largest scaled ``|delta J_mn|`` over random points where ``J_mn = 0``.

    The scale is ``|w|^2 max|T|``, the natural size of a bilinear expression in
    ``w`` and ``T``.
    """
    n = t.n_particles
    pairs = pairs_of(n)
    tmax = max(1.0, float(np.max(np.abs(t.matrix))))
    worst = 0.0
    for k in range(n_probes):
        m, nn = pairs[k % len(pairs)]
        point = zero_j_probe_point(n, m, nn, rng)
        scale = float(point.coords @ point.coords) * tmax
        worst = max(worst, abs(delta_J_mn(point, t, m, nn)) / scale)
    return worst


def invariant_subgroup_basis(
    n_particles: int, seed: int = 0, n_probes: int = 100, tol: float = DEFAULT_TOLERANCES.degeneracy
) -> InvariantSubgroupBasis:
    """Generators that keep every vanishing ``J_mn`` at zero.

    Four have all blocks equal to one ``u_k`` (centre-of-mass OSp(4,R)); two are
    block diagonal with ``u1`` (total angular momentum) or ``u2`` (total
    Hamiltonian). Each is checked at ``n_probes`` random zero-crossing points.
    """
    if n_particles < 2:
        raise ValueError("the reduction needs at least two particles")
    blocks = build_basis_blocks()
    gens = [all_blocks_generator(blocks.u(k), n_particles, f"all-blocks u{k}") for k in range(1, 5)]
    gens.append(block_diagonal_generator(blocks.u(1), n_particles, "block-diagonal u1"))
    gens.append(block_diagonal_generator(blocks.u(2), n_particles, "block-diagonal u2"))
    rng = np.random.default_rng(seed)
    for g in gens:
        v = zero_crossing_violation(g, rng, n_probes)
        if v > tol:
            raise RuntimeError(f"{g.label} changes a vanishing J_mn (violation {v:.3g})")
    return InvariantSubgroupBasis(n_particles, gens)


def derive_invariant_subalgebra(
    n_particles: int, seed: int = 0, probes_per_pair: int = 40, rel_tol: float = 1e-9
) -> InvariantSubgroupBasis:
    """Null space of ``T -> delta J_mn`` over the full algebra at random zero-J_mn points.

    This is an independent numerical route to the surviving symmetry: no form of
    the answer is assumed, only the linear condition at sampled points.
    """
    n = n_particles
    basis = basis_generators(n)
    rng = np.random.default_rng(seed)
    rows = []
    for m, nn in pairs_of(n):
        for _ in range(probes_per_pair):
            point = zero_j_probe_point(n, m, nn, rng)
            rows.append([delta_J_mn(point, g, m, nn) for g in basis])
    a = np.array(rows)
    _, s, vt = np.linalg.svd(a)
    cutoff = rel_tol * s[0]
    rank = int(np.sum(s > cutoff))
    null = vt[rank:]
    gens = [
        composite(sum(c * g.matrix for c, g in zip(vec, basis)), n, f"null vector {k}")
        for k, vec in enumerate(null)
    ]
    return InvariantSubgroupBasis(n, gens)


def same_span(a: InvariantSubgroupBasis, b: InvariantSubgroupBasis) -> bool:
    fa = np.array([g.matrix.ravel() for g in a.generators])
    fb = np.array([g.matrix.ravel() for g in b.generators])
    ra, rb = np.linalg.matrix_rank(fa), np.linalg.matrix_rank(fb)
    return ra == rb == np.linalg.matrix_rank(np.vstack([fa, fb]))


# ---------------------------------------------------------------------------
# completeness of vector fields on the anyon phase space


@dataclass(frozen=True)
class CompletenessResult:
    status: str  # "complete" or "hits_delta"
    sigma_star: float | None = None
    pair: tuple[int, ...] | None = None
    min_distance: float = np.inf
    degenerate_sigma: float | None = None

    @property
    def complete(self) -> bool:
        return self.status == "complete"


def _separations(n: int):
    if n == 1:
        return [((1,), lambda w: w[:2], lambda w: 1.0)]
    out = []
    for i, j in pairs_of(n):
        si, sj = 4 * (i - 1), 4 * (j - 1)
        out.append(
            (
                (i, j),
                lambda w, si=si, sj=sj: w[si : si + 2] - w[sj : sj + 2],
                lambda w, si=si, sj=sj: max(
                    1.0, np.linalg.norm(w[si : si + 2]), np.linalg.norm(w[sj : sj + 2])
                ),
            )
        )
    return out


def _j_selectors(n: int):
    return [1] if n == 1 else pairs_of(n)


def completeness_probe(
    t: GeneratorMatrix,
    omega0: PhasePoint,
    tol: float = DEFAULT_TOLERANCES.degeneracy,
    n_grid: int = 2048,
) -> CompletenessResult:
    """Follow ``exp(sigma T) omega0`` over one period and look for coincidences.

    For the single-block relative system the separation is the distance from
    the origin; otherwise every pair separation is monitored. Minima of the
    squared separation are located from sign changes of its derivative and
    refined with Brent's method. ``degenerate_sigma`` is the first parameter at
    which a monitored angular momentum changes sign, i.e. where the curve
    crosses the set of degenerate trajectories.
    """
    n = omega0.n_particles
    tm = t.matrix
    w0 = omega0.coords
    sig = np.linspace(0.0, 2 * np.pi, n_grid + 1)

    def state(s):
        return group_element(t, s) @ w0

    states = np.array([state(s) for s in sig])
    rates = states @ tm.T

    best: tuple[float, tuple, float] | None = None
    min_dist = np.inf
    for key, sep, scale in _separations(n):
        d = np.array([sep(w) for w in states])
        dd = np.array([sep(v) for v in rates])
        g = np.einsum("ij,ij->i", d, dd)
        dist = np.linalg.norm(d, axis=1)
        cands = []
        for k in range(n_grid):
            if g[k] < 0 <= g[k + 1]:
                def gfun(s, sep=sep):
                    w = state(s)
                    return float(sep(w) @ sep(tm @ w))

                cands.append(brentq(gfun, sig[k], sig[k + 1], xtol=1e-15, rtol=1e-15))
        cands.extend(sig[np.argsort(dist)[:1]])
        for s in cands:
            w = state(s)
            r = float(np.linalg.norm(sep(w)))
            min_dist = min(min_dist, r)
            if r < tol * scale(w) and s < 2 * np.pi and (best is None or s < best[0]):
                best = (float(s), key, r)

    degenerate_sigma = None
    for sel in _j_selectors(n):
        jv = np.array([angular_momentum(PhasePoint(n, w), sel) for w in states])
        idx = np.nonzero(np.sign(jv[:-1]) * np.sign(jv[1:]) <= 0)[0]
        if len(idx):
            s = float(sig[idx[0]])
            if degenerate_sigma is None or s < degenerate_sigma:
                degenerate_sigma = s

    if best is None:
        return CompletenessResult("complete", min_distance=min_dist, degenerate_sigma=degenerate_sigma)
    return CompletenessResult(
        "hits_delta", best[0], best[1], best[2], degenerate_sigma=degenerate_sigma
    )


def delta_reaching_point(t: GeneratorMatrix, omega0: PhasePoint) -> tuple[PhasePoint, float]:
    """A point on the trajectory of ``omega0`` whose T-curve passes through the origin.

    Relative system only. Finds the group parameter where the transported
    angular momentum vanishes, then shifts ``omega0`` in time so that the image
    point sits exactly at r = 0. Returns the shifted point and that parameter.
    Raises ``ValueError`` when J never vanishes along the curve (complete case).
    """
    if omega0.n_particles != 1:
        raise ValueError("delta_reaching_point works on the single-block relative system")

    def jt(s):
        w = group_element(t, s) @ omega0.coords
        return w[0] * w[3] - w[1] * w[2]

    sig = np.linspace(0.0, 2 * np.pi, 1025)
    jv = np.array([jt(s) for s in sig])
    idx = np.nonzero(np.sign(jv[:-1]) * np.sign(jv[1:]) < 0)[0]
    if not len(idx):
        raise ValueError("angular momentum never vanishes along this curve")
    s_c = brentq(jt, sig[idx[0]], sig[idx[0] + 1], xtol=1e-15, rtol=1e-15)
    q = group_element(t, s_c) @ omega0.coords
    x, p = q[:2], q[2:]
    # x(t) = cos t x + sin t p vanishes where x and p are parallel
    if np.linalg.norm(x) == 0:
        shift = 0.0
    else:
        lam = float(p @ x) / float(x @ x)
        shift = float(np.arctan2(-1.0, lam))
    h = build_basis_blocks().u(2)
    shifted = PhasePoint(1, group_element(h, shift) @ omega0.coords)
    return shifted, float(s_c)


def connection_consistent_with_transport(path: ConnectionPath, tol: float = 1e-8) -> bool:
    """Endpoint J from the actual group action equals the sampled closed-form value."""
    j_end = angular_momentum(path.end, 1)
    j_closed = j_flow_closed_form(path.start, mixing_generator(path.beta_hat), path.sigma_hat)
    return abs(j_end - j_closed) <= tol


# ---------------------------------------------------------------------------
# finite evidence for transitivity and class connectivity


@dataclass(frozen=True)
class TransitivityTrial:
    residual: float
    sigmas: np.ndarray


def connect_by_basis_actions(
    omega_a: PhasePoint, omega_b: PhasePoint, rng, restarts: int = 5
) -> TransitivityTrial:
    """Least-squares search for ``prod_k exp(s_k T_k) omega_a = omega_b`` over basis generators.

    Both points must share the energy. Success is a small residual; the search
    is evidence for transitivity on the energy sphere, not a proof.
    """
    if omega_a.n_particles != omega_b.n_particles:
        raise ValueError("points must have the same particle count")
    ea, eb = energy(omega_a), energy(omega_b)
    if abs(ea - eb) > 1e-12 * max(ea, 1.0):
        raise ValueError("points must lie on the same energy sphere")
    gens = basis_generators(omega_a.n_particles)
    a, b = omega_a.coords, omega_b.coords

    def apply(sig):
        w = a
        for g, sk in zip(gens, sig):
            w = group_element(g, sk) @ w
        return w

    best = None
    for _ in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, len(gens))
        res = least_squares(lambda sg: apply(sg) - b, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r = float(np.linalg.norm(apply(res.x) - b))
        if best is None or r < best.residual:
            best = TransitivityTrial(r, res.x)
        if r < 1e-12:
            break
    return best


def transitivity_evidence(n_particles: int, n_pairs: int = 5, seed: int = 0) -> list[float]:
    """Residuals of basis-action connections between random same-energy point pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_pairs):
        a = rng.normal(size=4 * n_particles)
        b = rng.normal(size=4 * n_particles)
        b *= np.linalg.norm(a) / np.linalg.norm(b)
        out.append(connect_by_basis_actions(PhasePoint(n_particles, a), PhasePoint(n_particles, b), rng).residual)
    return out


def _segment_keeps_signs(a: np.ndarray, b: np.ndarray, n: int) -> bool:
    """Whether every pair angular momentum keeps its sign on the segment from a to b.

    Along ``a + s (b - a)`` each ``J_ij`` is a quadratic in ``s``, so checking the
    endpoints and the vertex is exact.
    """
    lmat = build_basis_blocks().v(7)
    d = b - a
    for i, j in pairs_of(n):
        ai = a[4 * (i - 1) : 4 * i] - a[4 * (j - 1) : 4 * j]
        di = d[4 * (i - 1) : 4 * i] - d[4 * (j - 1) : 4 * j]
        c0 = 0.5 * ai @ lmat @ ai
        c1 = ai @ lmat @ di
        c2 = 0.5 * di @ lmat @ di
        vals = [c0, c0 + c1 + c2]
        if c2 != 0:
            s = -c1 / (2 * c2)
            if 0 < s < 1:
                vals.append(c0 + c1 * s + c2 * s * s)
        sgn = np.sign(c0)
        if sgn == 0 or any(np.sign(v) != sgn for v in vals):
            return False
    return True


@dataclass
class ConnectivityEvidence:
    n_particles: int
    pairs_tested: int
    straight: int
    via_one_stop: int
    unresolved: int
    per_class: dict[tuple[int, ...], int]

    def to_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "pairs_tested": self.pairs_tested,
            "straight": self.straight,
            "via_one_stop": self.via_one_stop,
            "unresolved": self.unresolved,
            "per_class": {",".join(map(str, k)): v for k, v in self.per_class.items()},
        }


def class_connectivity_evidence(
    n_particles: int, n_points: int = 400, n_pairs: int = 200, stops: int = 20, seed: int = 0
) -> ConnectivityEvidence:
    """Sample random points, bucket them by signature, and try to join same-class pairs.

    A pair counts as joined when a straight segment, or a two-segment path through
    another sampled member of the class, keeps every pair angular momentum
    non-zero. Unresolved pairs are not evidence of disconnection; no conclusion
    about the family count is drawn.
    """
    rng = np.random.default_rng(seed)
    n = n_particles
    buckets: dict[tuple[int, ...], list[np.ndarray]] = {}
    for _ in range(n_points):
        w = rng.normal(size=4 * n)
        sig = orientation_signature(PhasePoint(n, w))
        if isinstance(sig, OrientationSignature):
            buckets.setdefault(sig.as_tuple(), []).append(w)
    keys = [k for k, v in buckets.items() if len(v) >= 2]
    straight = via = unresolved = 0
    per_class: dict[tuple[int, ...], int] = {k: 0 for k in keys}
    for _ in range(n_pairs if keys else 0):
        k = keys[int(rng.integers(len(keys)))]
        members = buckets[k]
        ia, ib = rng.choice(len(members), 2, replace=False)
        a, b = members[ia], members[ib]
        per_class[k] += 1
        if _segment_keeps_signs(a, b, n):
            straight += 1
            continue
        joined = False
        for ic in rng.permutation(len(members))[:stops]:
            c = members[ic]
            if _segment_keeps_signs(a, c, n) and _segment_keeps_signs(c, b, n):
                joined = True
                break
        if joined:
            via += 1
        else:
            unresolved += 1
    return ConnectivityEvidence(n, straight + via + unresolved, straight, via, unresolved, per_class)

"""Command-line entry point: ``anyon-orbits <subcommand> ...``.

Exit codes: 0 success, 1 usage or invalid input, 2 invariant or acceptance
failure, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import acceptance, exact, families, regularized, semiclassical, symplectic
from .config import RunConfig, load_config
from .io import metadata, resolve_path, write_csv, write_json

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    if step <= 0 or stop <= start:
        raise argparse.ArgumentTypeError("grid needs stop > start and step > 0")
    return start, stop, step


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=str))


# ---------------------------------------------------------------------------
# subcommands


def cmd_generators(args, cfg: RunConfig) -> int:
    n = args.n_particles
    if n < 1:
        raise UsageError("--n-particles must be at least 1")
    tol = cfg.tolerances.orthosymplectic
    rows = []
    failed = 0
    for g in symplectic.basis_generators(n):
        entry = {"label": str(g.label.name)}
        if args.check:
            chk = symplectic.check_orthosymplectic(g, tol=tol)
            elem = symplectic.check_group_element(symplectic.group_element(g, 0.7), tol=tol)
            entry.update(
                antisymmetry_residual=chk.antisymmetry_residual,
                symplectic_residual=chk.symplectic_residual,
                group_element_residual=elem.residual,
                ok=bool(chk) and bool(elem),
            )
            failed += not entry["ok"]
        rows.append(entry)
    payload = {"n_particles": n, "count": len(rows), "all_ok": failed == 0, "generators": rows}
    path = write_json(resolve_path(cfg, args.out or f"generators_N{n}.json"), payload, metadata(cfg, n_particles=n))
    _emit({"count": len(rows), "failures": failed, "written": str(path)})
    return EXIT_INVARIANT if failed else EXIT_OK


def cmd_families(args, cfg: RunConfig) -> int:
    n = args.n_particles
    if not 2 <= n <= families.MAX_CATALOG_PARTICLES:
        raise UsageError(f"--n-particles must lie in 2..{families.MAX_CATALOG_PARTICLES}")
    cat = families.enumerate_orientation_classes(n, elliptic_fallback=not args.concentric_only, seed=cfg.seed)
    problems = families.verify_catalog(cat)
    payload = cat.to_dict()
    payload["verification_problems"] = problems
    path = write_json(
        resolve_path(cfg, args.export or f"families_N{n}.json"),
        payload,
        metadata(cfg, n_particles=n, concentric_only=args.concentric_only),
    )
    _emit(
        {
            "n_particles": n,
            "count": cat.count,
            "expected": cat.expected,
            "concentric_count": cat.concentric_count,
            "unrealized": len(cat.unrealized),
            "written": str(path),
        }
    )
    return EXIT_INVARIANT if cat.unrealized or problems else EXIT_OK


def _describe(kind: str, through_origin: bool) -> str:
    if kind == "reflecting_radial" and through_origin:
        return "degenerate oscillator line through the origin"
    return kind


def cmd_orbit(args, cfg: RunConfig) -> int:
    eps = args.epsilon or [1e-3]
    params = dict(energy=args.energy, ell=args.ell, alpha=args.alpha, epsilon=eps)
    if len(eps) > 1:
        lim = regularized.classify_limit(
            args.energy, args.ell, args.alpha, eps, rtol=cfg.tolerances.integrator_rtol
        )
        payload = {
            "kind": lim.kind,
            "description": _describe(lim.kind, lim.through_origin),
            "period": lim.period,
            "epsilons": lim.epsilons,
            "deflections": lim.deflections,
            "bounce_periods": lim.bounce_periods,
            "monotone": lim.monotone,
            "flagged": lim.flagged,
        }
        path = write_json(resolve_path(cfg, args.out or "orbit_limit.json"), payload, metadata(cfg, **params))
        payload["written"] = str(path)
        _emit(payload)
        return EXIT_INVARIANT if lim.flagged else EXIT_OK

    res = regularized.integrate_orbit(
        args.energy,
        args.ell,
        regularized.FluxProfile(eps[0], args.alpha),
        t_max=args.t_max,
        rtol=cfg.tolerances.integrator_rtol,
    )
    cls = res.classification
    path = write_csv(
        resolve_path(cfg, args.out or "orbit.csv"),
        res.table(),
        metadata(cfg, **params, t_max=args.t_max, classification=cls.kind, period=cls.period),
    )
    drift = float(np.ptp(res.energies())) / args.energy
    _emit(
        {
            "kind": cls.kind,
            "description": _describe(cls.kind, cls.through_origin),
            "period": cls.period,
            "delta_theta_interior": cls.delta_theta_interior,
            "boundary_crossings": len(res.crossings),
            "relative_energy_drift": drift,
            "status": res.status,
            "written": str(path),
        }
    )
    if res.status != "ok":
        print(f"integration failed: {res.message}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_INVARIANT if drift > 1e-8 else EXIT_OK


def cmd_spectrum(args, cfg: RunConfig) -> int:
    n_max = args.n_max if args.n_max is not None else cfg.n_max
    rows = semiclassical.spectrum_table(args.n_particles, args.alpha_grid, n_max, args.offset)
    cols = {
        "n": [r[0] for r in rows],
        "slope": [r[1] for r in rows],
        "multiplicity": [r[2] for r in rows],
        "alpha_q": [r[3] for r in rows],
        "energy": [r[4] for r in rows],
    }
    path = write_csv(
        resolve_path(cfg, args.out or "spectrum.csv"),
        cols,
        metadata(cfg, n_particles=args.n_particles, alpha_grid=args.alpha_grid, n_max=n_max, offset=args.offset),
    )
    slopes = semiclassical.slope_set(args.n_particles)
    _emit(
        {
            "slopes": slopes,
            "multiplicities": {s: semiclassical.slope_multiplicity(args.n_particles, s) for s in slopes},
            "offset": semiclassical.energy_offset(args.n_particles, args.offset),
            "rows": len(rows),
            "written": str(path),
        }
    )
    return EXIT_OK


def cmd_dos(args, cfg: RunConfig) -> int:
    start, stop, step = args.grid
    conf = exact.DosSeriesConfig.uniform(start, stop, step, k_max=cfg.k_max, broadening=cfg.eta)
    comp = exact.dos_series(conf, args.alpha, thomas_fermi=not args.no_thomas_fermi)
    path = write_csv(
        resolve_path(cfg, args.out or "dos.csv"),
        comp.columns(),
        metadata(cfg, alpha_q=args.alpha, grid=[start, stop, step], tail_bound=comp.tail_bound),
    )
    _emit({"points": int(conf.energy_grid.size), "tail_bound": comp.tail_bound, "written": str(path)})
    return EXIT_OK


def cmd_propagator(args, cfg: RunConfig) -> int:
    e_max = args.e_max if args.e_max is not None else cfg.e_max
    forms = ["A", "B"] if args.form == "both" else [args.form]
    tol = cfg.tolerances.pole_location
    payload: dict = {"alpha_q": args.alpha, "e_max": e_max}
    code = EXIT_OK
    for f in forms:
        reports = exact.poles_and_residues(args.alpha, e_max, form=f, tol=tol)
        payload[f"poles_{f}"] = [r.to_dict() for r in reports]
        if not all(r.converged for r in reports):
            code = EXIT_NONCONVERGENCE
        ratios = [r.residue / r.brute_force_degeneracy for r in reports if r.brute_force_degeneracy]
        payload[f"residue_over_degeneracy_{f}"] = [min(ratios), max(ratios)] if ratios else None
    if args.form == "both" and 0.0 < args.alpha < 1.0:
        cmp = exact.compare_pole_sets(args.alpha, e_max, tol)
        payload["agreement"] = {
            "agree": cmp.agree,
            "only_A": cmp.only_a,
            "only_B": cmp.only_b,
            "max_location_diff": cmp.max_location_diff,
        }
        if not cmp.agree or cmp.max_location_diff > tol:
            code = max(code, EXIT_INVARIANT)
    path = write_json(resolve_path(cfg, args.out or "poles.json"), payload, metadata(cfg, alpha_q=args.alpha, form=args.form))
    summary = {k: v for k, v in payload.items() if not k.startswith("poles_")}
    summary["pole_counts"] = {f: len(payload[f"poles_{f}"]) for f in forms}
    summary["written"] = str(path)
    _emit(summary)
    return code


def cmd_fourier(args, cfg: RunConfig) -> int:
    start, stop, step = args.grid
    n = int(round((stop - start) / step))
    conf = exact.DosSeriesConfig(start + step * np.arange(n), k_max=cfg.k_max, broadening=cfg.eta)
    fr = exact.dos_fourier(args.alpha, conf, window=args.window)
    meta = metadata(cfg, alpha_q=args.alpha, grid=[start, stop, step], window=args.window, bin_width=fr.bin_width)
    peaks = [{"t": p.t, "amplitude": p.amplitude, "width": p.width} for p in fr.peaks]
    path = write_json(resolve_path(cfg, args.out or "fourier_peaks.json"), {"peaks": peaks}, meta)
    keep = fr.t <= args.t_max
    csv_path = write_csv(
        resolve_path(cfg, args.spectrum_out or "fourier.csv"),
        {"t": fr.t[keep], "magnitude": fr.magnitude[keep]},
        meta,
    )
    shown = [p for p in peaks if p["t"] <= args.t_max]
    _emit({"peaks": shown, "written": [str(path), str(csv_path)]})
    return EXIT_OK


def cmd_accept(args, cfg: RunConfig) -> int:
    results = acceptance.run_all(seed=cfg.seed, only=args.only)
    for r in results:
        print(r.line())
    report = {
        "results": [
            {
                "number": r.number,
                "title": r.title,
                "passed": r.ok,
                "runtime": r.runtime,
                "budget": r.budget,
                "checks": r.checks,
                "detail": r.detail,
            }
            for r in results
        ]
    }
    path = write_json(resolve_path(cfg, args.out or "acceptance.json"), report, metadata(cfg))
    n_ok = sum(r.ok for r in results)
    print(f"{n_ok}/{len(results)} criteria passed; report written to {path}")
    return EXIT_OK if n_ok == len(results) else EXIT_INVARIANT


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anyon-orbits", description="Periodic-orbit and exact-spectrum tools for anyons in a harmonic trap.")
    p.add_argument("--config", help="INI file with a [run] section")
    p.add_argument("--output-dir", help="directory for written files (overrides the environment variable)")
    p.add_argument("--seed", type=int, help="seed for random probes")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generators", help="list basis generators and check them")
    g.add_argument("--n-particles", type=int, required=True)
    g.add_argument("--check", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generators)

    f = sub.add_parser("families", help="catalogue orientation classes")
    f.add_argument("--n-particles", type=int, required=True)
    f.add_argument("--export", help="JSON output path")
    f.add_argument("--concentric-only", action="store_true", help="skip the elliptic-orbit search")
    f.set_defaults(func=cmd_families)

    o = sub.add_parser("orbit", help="integrate a regularised two-anyon orbit")
    o.add_argument("--energy", type=float, required=True)
    o.add_argument("--ell", type=float, required=True)
    o.add_argument("--alpha", type=float, required=True)
    o.add_argument("--epsilon", type=float, action="append", help="disc radius; repeat for a limit sequence")
    o.add_argument("--t-max", type=float, default=2.5 * np.pi)
    o.add_argument("--out")
    o.set_defaults(func=cmd_orbit)

    s = sub.add_parser("spectrum", help="semiclassical level lines")
    s.add_argument("--n-particles", type=int, required=True)
    s.add_argument("--alpha-grid", type=_float_list, default=[0.0, 0.5, 1.0])
    s.add_argument("--n-max", type=int)
    s.add_argument("--offset", choices=semiclassical.OFFSETS, default="maslov")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    d = sub.add_parser("dos", help="density of states from the traversal sums")
    d.add_argument("--alpha", type=float, required=True)
    d.add_argument("--k-max", type=int)
    d.add_argument("--eta", type=float)
    d.add_argument("--grid", type=_grid, default=(1.0, 20.0, 0.001))
    d.add_argument("--no-thomas-fermi", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dos)

    r = sub.add_parser("propagator", help="poles and residues of the resummed propagator")
    r.add_argument("--alpha", type=float, required=True)
    r.add_argument("--form", choices=["A", "B", "both"], default="both")
    r.add_argument("--e-max", type=float)
    r.add_argument("--out")
    r.set_defaults(func=cmd_propagator)

    t = sub.add_parser("fourier", help="Fourier peaks of the oscillating density of states")
    t.add_argument("--alpha", type=float, required=True)
    t.add_argument("--grid", type=_grid, default=(1.0, 33.0, 0.01))
    t.add_argument("--window", choices=sorted(exact.WINDOWS), default="hann")
    t.add_argument("--k-max", type=int)
    t.add_argument("--eta", type=float)
    t.add_argument("--t-max", type=float, default=4 * np.pi, help="largest t listed")
    t.add_argument("--out", help="peak JSON path")
    t.add_argument("--spectrum-out", help="magnitude CSV path")
    t.set_defaults(func=cmd_fourier)

    a = sub.add_parser("accept", help="run the acceptance suite")
    a.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], help="comma-separated criterion numbers")
    a.add_argument("--out")
    a.set_defaults(func=cmd_accept)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "output_dir": args.output_dir,
        "seed": args.seed,
        "k_max": getattr(args, "k_max", None),
        "eta": getattr(args, "eta", None),
    }
    try:
        cfg = load_config(args.config, **overrides)
        return args.func(args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"anyon-orbits: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"anyon-orbits: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"anyon-orbits: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())

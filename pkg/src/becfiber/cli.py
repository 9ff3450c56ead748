"""Command-line front end.

    becfiber xi --sigma 50 --sigma-z 100
    becfiber xi0 --theta 0.02
    becfiber scan-theta --n 10 --theta-max 0.06 --out scan.csv --plot
    becfiber critical-angle --n 100
    becfiber sweep-n --n 10,100,1000,10000 --out sweep.json --format json --plot
    becfiber optimize-waist --sigma 50 --sigma-z 100
    becfiber epsilon --drive const:1 --readout gauss:1:0.2 --t-max 2 --steps 200
    becfiber selfcheck

Lengths are dimensionless (k_d * length) unless ``--wavelength`` is given,
in which case they are read in the same unit as the wavelength.

Exit status: 0 success, 1 usage error, 2 numerical failure, 3 partial scan.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .geometry_factors import xi, xi0
from .numerics import BracketError, QuadratureError, Tolerances
from .optics import BecCloud, GaussianBeam, ScatterGeometry
from .pulses import epsilon_amplitude, parse_envelope
from .rates import DEFAULT_THETA_MAX, critical_angle, n_sweep, optimal_waist, theta_scan
from .tables import ScanTable, format_number

log = logging.getLogger("becfiber")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PARTIAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- configuration -----------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, n_default: str = "10", geometry: bool = True) -> None:
    if geometry:
        p.add_argument("--sigma", type=float, default=50.0, help="transverse oscillator length (default 50)")
        p.add_argument("--sigma-z", type=float, default=100.0, help="longitudinal oscillator length (default 100)")
        p.add_argument("--waist", type=float, default=None, help="beam waist (default sqrt(2)*sigma)")
        p.add_argument("--wavelength", type=float, default=None,
                       help="drive wavelength; lengths are then read in the same unit")
        p.add_argument("--theta", type=float, default=0.0, help="drive-to-fiber angle")
        p.add_argument("--degrees", action="store_true", help="angles in degrees instead of radians")
    p.add_argument("--n", default=n_default, help=f"atom number (default {n_default})")
    p.add_argument("--tol-abs", type=float, default=Tolerances.abs_tol)
    p.add_argument("--tol-rel", type=float, default=Tolerances.rel_tol)
    p.add_argument("--out", type=Path, default=None, help="write a table to this path")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="table format (default from --out suffix, else csv)")
    p.add_argument("--plot", action="store_true", help="also write an SVG figure")
    p.add_argument("--workers", type=int, default=1, help="threads for scan rows")


def _angle(args, value: float) -> float:
    return math.radians(value) if getattr(args, "degrees", False) else value


def _angle_out(args, value: float) -> float:
    return math.degrees(value) if getattr(args, "degrees", False) else value


def _tolerances(args) -> Tolerances:
    try:
        return Tolerances(args.tol_abs, args.tol_rel)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _atom_count(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"atom number must be an integer, got {text!r}") from None
    if value != int(value) or value < 1:
        raise UsageError(f"atom number must be an integer >= 1, got {text!r}")
    return int(value)


def _geometry(args, *, n_atoms: int = 1) -> tuple[ScatterGeometry, dict]:
    scale = 1.0
    if args.wavelength is not None:
        if not args.wavelength > 0:
            raise UsageError("--wavelength must be positive")
        scale = 2.0 * math.pi / args.wavelength
    sigma = args.sigma * scale
    sigma_z = args.sigma_z * scale
    waist = math.sqrt(2.0) * sigma if args.waist is None else args.waist * scale
    theta = _angle(args, args.theta)
    if not (sigma > 0 and sigma_z > 0 and waist > 0):
        raise UsageError("--sigma, --sigma-z and --waist must be positive")
    if not 0.0 <= theta <= math.pi:
        raise UsageError(f"--theta must lie in [0, pi] rad, got {args.theta}")
    geom = ScatterGeometry(GaussianBeam(waist), BecCloud(sigma, sigma_z), theta, n_atoms)
    config = {
        "sigma_bar": sigma,
        "sigma_z_bar": sigma_z,
        "w0_bar": waist,
        "waist_defaulted": args.waist is None,
        "theta_rad": theta,
        "n_atoms": n_atoms,
        "wavelength": args.wavelength,
        "tol_abs": args.tol_abs,
        "tol_rel": args.tol_rel,
        "angle_unit": "deg" if args.degrees else "rad",
    }
    return geom, config


def _metadata(command: str, config: dict) -> dict:
    return {"tool": f"becfiber {__version__}", "command": command, **config}


def _emit(table: ScanTable, args, default_stem: str, plotter=None) -> None:
    out = args.out
    if out is not None:
        fmt = args.format or ("json" if out.suffix.lower() == ".json" else "csv")
        table.write(out, fmt)
        print(f"wrote {out}")
    if args.plot and plotter is not None:
        svg = out.with_suffix(".svg") if out is not None else Path(f"{default_stem}.svg")
        plotter(table, svg)
        print(f"wrote {svg}")


# -- subcommands ---------------------------------------------------------------


def cmd_xi(args) -> int:
    geom, config = _geometry(args, n_atoms=_atom_count(args.n))
    res = xi(geom, _tolerances(args))
    print(f"xi exact  = {format_number(res.exact)}")
    print(f"xi approx = {format_number(res.approx)}  (sigma_z << z_R limit)")
    print(f"quadrature error estimate = {res.quad_error:.3g}")
    table = ScanTable(["xi_exact", "xi_approx", "quad_error"],
                      metadata=_metadata("xi", config))
    table.add_row(res.exact, res.approx, res.quad_error)
    _emit(table, args, "xi")
    return EXIT_OK


def cmd_xi0(args) -> int:
    geom, config = _geometry(args, n_atoms=_atom_count(args.n))
    res = xi0(geom, _tolerances(args))
    v = res.value
    print(f"xi0       = {format_number(v.real)} {'+' if v.imag >= 0 else '-'} {format_number(abs(v.imag))}i")
    print(f"|xi0|^2   = {format_number(res.magnitude_sq)}")
    if res.closed_form is not None:
        c = res.closed_form
        print(f"closed form = {format_number(c.real)} {'+' if c.imag >= 0 else '-'} {format_number(abs(c.imag))}i")
    if res.approx_magnitude is not None:
        print(f"|xi0| approx = {format_number(res.approx_magnitude)}  (sigma_z << z_R limit)")
    print(f"quadrature error estimate = {res.quad_error:.3g}")
    table = ScanTable(["theta", "xi0_re", "xi0_im", "xi0_sq", "quad_error"],
                      metadata=_metadata("xi0", config))
    table.add_row(_angle_out(args, geom.theta), v.real, v.imag, res.magnitude_sq, res.quad_error)
    _emit(table, args, "xi0")
    return EXIT_OK


def cmd_scan_theta(args) -> int:
    from .plotting import plot_theta_scan

    if args.theta_steps < 2:
        raise UsageError("--theta-steps must be >= 2")
    lo, hi = _angle(args, args.theta_min), _angle(args, args.theta_max)
    if not 0.0 <= lo < hi <= math.pi:
        raise UsageError("need 0 <= theta-min < theta-max <= pi (rad)")
    geom, config = _geometry(args, n_atoms=_atom_count(args.n))
    config.update(theta_min_rad=lo, theta_max_rad=hi, theta_steps=args.theta_steps)
    thetas = np.linspace(lo, hi, args.theta_steps)
    table = theta_scan(geom, thetas, _tolerances(args), workers=args.workers)
    table.metadata = {**_metadata("scan-theta", config), **table.metadata}
    if args.degrees:
        table.rows = [(math.degrees(t), *rest) for t, *rest in table.rows]
    i = int(np.argmax(table.column("xi0_sq"))) if table.rows else 0
    if table.rows:
        print(f"max |xi0|^2 = {format_number(table.rows[i][1])} at theta = {format_number(table.rows[i][0])}")
        print(f"xi/N = {format_number(table.rows[0][2])}")
    _emit(table, args, "scan-theta",
          lambda t, p: plot_theta_scan(t, p, degrees=args.degrees))
    if args.out is None and not args.plot:
        sys.stdout.write(table.to_csv())
    if table.errors:
        log.error("%d of %d rows failed", len(table.errors), args.theta_steps)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_critical_angle(args) -> int:
    n = _atom_count(args.n)
    geom, config = _geometry(args, n_atoms=n)
    theta_max = _angle(args, args.theta_max)
    if not 0.0 < theta_max <= math.pi / 2:
        raise UsageError("--theta-max must lie in (0, pi/2] rad")
    config["theta_max_rad"] = theta_max
    res = critical_angle(geom, theta_max, _tolerances(args))
    if res.dominated_everywhere:
        print(f"N={n}: isotropic channel dominates everywhere (N |xi0(0)|^2 <= xi); no critical angle")
    elif res.theta_star is None:
        print(f"N={n}: forward channel dominates the whole window [0, {format_number(_angle_out(args, theta_max))}]")
    else:
        print(f"theta* = {format_number(_angle_out(args, res.theta_star))} "
              f"({'deg' if args.degrees else 'rad'}) for N={n}")
    table = ScanTable(["n_atoms", "theta_star", "found"], metadata=_metadata("critical-angle", config))
    table.add_row(n, math.nan if res.theta_star is None else _angle_out(args, res.theta_star),
                  int(res.theta_star is not None))
    _emit(table, args, "critical-angle")
    return EXIT_OK


def cmd_sweep_n(args) -> int:
    from .plotting import plot_n_sweep

    n_values = [_atom_count(s) for s in args.n.split(",") if s.strip()]
    if not n_values:
        raise UsageError("--n needs at least one atom number")
    geom, config = _geometry(args)
    theta_max = _angle(args, args.theta_max)
    if not 0.0 < theta_max <= math.pi / 2:
        raise UsageError("--theta-max must lie in (0, pi/2] rad")
    config.update(theta_max_rad=theta_max, n_values=n_values)
    config.pop("n_atoms")
    table = n_sweep(geom, n_values, theta_max, _tolerances(args), workers=args.workers)
    table.metadata = {**_metadata("sweep-n", config), **table.metadata}
    if args.degrees:
        table.rows = [(n, math.degrees(t), f) for n, t, f in table.rows]
    if args.out is None:
        sys.stdout.write(table.to_csv())
    _emit(table, args, "sweep-n", lambda t, p: plot_n_sweep(t, p, degrees=args.degrees))
    if table.errors:
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_optimize_waist(args) -> int:
    n = _atom_count(args.n)
    geom, config = _geometry(args, n_atoms=n)
    lo = args.w_min if args.w_min is not None else 0.1 * geom.cloud.sigma_bar
    hi = args.w_max if args.w_max is not None else 10.0 * geom.cloud.sigma_bar
    if not 0 < lo < hi:
        raise UsageError("need 0 < --w-min < --w-max")
    config.update(w_min=lo, w_max=hi)
    opt = optimal_waist(geom.cloud, n, geom.theta, (lo, hi), _tolerances(args))
    ratio = opt.w0_bar / (math.sqrt(2.0) * geom.cloud.sigma_bar)
    print(f"optimal w0_bar = {format_number(opt.w0_bar)}")
    print(f"w0_bar / (sqrt(2) sigma_bar) = {ratio:.6f}")
    print(f"forward prefactor = {format_number(opt.forward_prefactor)}")
    if opt.at_boundary:
        print("note: optimum lies on the search boundary")
    table = ScanTable(["w0_bar", "ratio_to_sqrt2_sigma", "forward_prefactor", "at_boundary"],
                      metadata=_metadata("optimize-waist", config))
    table.add_row(opt.w0_bar, ratio, opt.forward_prefactor, int(opt.at_boundary))
    _emit(table, args, "optimize-waist")
    return EXIT_OK


def cmd_epsilon(args) -> int:
    from .plotting import plot_epsilon

    if args.steps < 1 or not args.t_max > 0:
        raise UsageError("need --steps >= 1 and --t-max > 0")
    try:
        drive = parse_envelope(args.drive)
        readout = parse_envelope(args.readout)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    n = _atom_count(args.n)
    times = np.linspace(0.0, args.t_max, args.steps + 1)
    trace = epsilon_amplitude(drive, readout, times, n_atoms=n)
    for w in trace.warnings:
        log.warning(w)
    config = {"drive": args.drive, "readout": args.readout, "t_max": args.t_max,
              "steps": args.steps, "n_atoms": n}
    table = ScanTable(["t", "eps_re", "eps_im", "abs2"], metadata=_metadata("epsilon", config))
    pop = trace.population()
    for t, e, p in zip(trace.times, trace.epsilon, pop):
        table.add_row(float(t), float(e.real), float(e.imag), float(p))
    table.notes.extend(trace.warnings)
    print(f"final |eps|^2 = {format_number(pop[-1])} at t = {format_number(times[-1])}")
    _emit(table, args, "epsilon", plot_epsilon)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_all

    results = run_all(_tolerances(args))
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} suites passed")
    return EXIT_OK if passed == len(results) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="becfiber", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("xi", help="side-scattering geometric factor")
    _common(p)
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("xi0", help="forward geometric factor at --theta")
    _common(p)
    p.set_defaults(func=cmd_xi0)

    p = sub.add_parser("scan-theta", help="|xi0(theta)|^2 and xi/N over an angle range")
    _common(p)
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=DEFAULT_THETA_MAX)
    p.add_argument("--theta-steps", type=int, default=200)
    p.set_defaults(func=cmd_scan_theta)

    p = sub.add_parser("critical-angle", help="angle where both channels contribute equally")
    _common(p)
    p.add_argument("--theta-max", type=float, default=DEFAULT_THETA_MAX, help="search window")
    p.set_defaults(func=cmd_critical_angle)

    p = sub.add_parser("sweep-n", help="critical angle for a list of atom numbers")
    _common(p, n_default="10,100,1000,10000")
    p.add_argument("--theta-max", type=float, default=DEFAULT_THETA_MAX, help="search window")
    p.set_defaults(func=cmd_sweep_n)

    p = sub.add_parser("optimize-waist", help="waist maximizing the forward prefactor")
    _common(p, n_default="1")
    p.add_argument("--w-min", type=float, default=None)
    p.add_argument("--w-max", type=float, default=None)
    p.set_defaults(func=cmd_optimize_waist)

    p = sub.add_parser("epsilon", help="perturbative readout amplitude for given envelopes")
    _common(p, n_default="1", geometry=False)
    p.add_argument("--drive", default="const:1", help="const:A | rect:ON:OFF[:A] | gauss:T0:W[:A] | file:PATH[:A]")
    p.add_argument("--readout", default="const:1", help="same syntax as --drive")
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("selfcheck", help="run the built-in verification suites")
    p.add_argument("--tol-abs", type=float, default=Tolerances.abs_tol)
    p.add_argument("--tol-rel", type=float, default=Tolerances.rel_tol)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"becfiber: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, BracketError, ArithmeticError) as exc:
        print(f"becfiber: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())

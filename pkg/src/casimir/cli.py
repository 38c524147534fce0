"""Command-line front end: ``casimir {plates,particles,oscillator,phase-map,selftest}``.

Every run produces a table (CSV or JSON). Floats are written with 17
significant digits and rows follow the sweep order, so identical invocations
give byte-identical output regardless of ``--threads``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
non-convergence (rows are still written, flagged), 3 selftest failure.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import copy
import csv
import io
import itertools
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .exceptions import CasimirError, ConvergenceError, DegenerateCouplingError, DomainError
from .halfplanes import HalfSpacePair, force_per_area
from .materials import ParticleSpec, PlateSpec, parse_model
from .numerics import QuadratureConfig, ThermalState
from .oscillator import OscillatorTriplet, induced_free_energy_and_sign
from .particles import PairGeometry, free_energy, pair_force
from .results import sign_label
from .units import C, HBAR_C

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_SELFTEST = 0, 1, 2, 3

SWEEPABLE = {
    "plates": ("gap", "temp"),
    "particles": ("r", "temp", "alpha1e", "alpha1h", "alpha2e", "alpha2h"),
    "oscillator": ("a1", "a2", "a3", "c", "beta"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for non-convergence here.
    def error(self, message):
        raise UsageError(message)


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _nonnegative(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text!r}")
    return v


def _default_threads():
    raw = os.environ.get("CASIMIR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat JSON file with flag names as keys")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", help="write the table here instead of stdout")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads for sweeps (default: $CASIMIR_THREADS or 1)")
    common.add_argument("--rel-tol", type=_positive, default=QuadratureConfig.rel_tol)
    common.add_argument("--abs-tol", type=_positive, default=QuadratureConfig.abs_tol)
    common.add_argument("--max-subdivisions", type=int,
                        default=QuadratureConfig.max_subdivisions)

    sweep = _Parser(add_help=False)
    sweep.add_argument("--sweep", metavar="VAR", help="numeric parameter to sweep")
    sweep.add_argument("--start", type=float)
    sweep.add_argument("--stop", type=float)
    sweep.add_argument("--count", type=int, default=1)
    sweep.add_argument("--spacing", choices=("linear", "log"), default="linear")

    materials = _Parser(add_help=False)
    for name in ("eps1", "mu1", "eps2", "mu2"):
        materials.add_argument(f"--{name}", default="constant:1",
                               help="constant:X, plasma:wp=, drude:wp=,gamma=, "
                                    "lorentz:w0=,wp=,gamma= (rad/s) or infinite")

    parser = _Parser(prog="casimir", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plates", parents=[common, sweep, materials],
                       help="force per area between two half-spaces (Pa)")
    p.add_argument("--gap", type=_positive, default=1e-6, help="gap in metres")
    p.add_argument("--temp", type=_nonnegative, default=0.0, help="temperature in kelvin")

    p = sub.add_parser("particles", parents=[common, sweep],
                       help="free energy and force between two polarizable particles")
    for name in ("alpha1e", "alpha1h", "alpha2e", "alpha2h"):
        p.add_argument(f"--{name}", type=float, default=0.0,
                       help="static polarizability (m^3, or natural units with --natural)")
    p.add_argument("--r", type=_positive, default=1e-6, help="separation in metres")
    p.add_argument("--temp", type=_nonnegative, default=0.0,
                   help="temperature in kelvin (with --natural: k_B T in hbar c / length)")
    p.add_argument("--natural", action="store_true", help="hbar = c = k_B = 1")
    p.add_argument("--no-force", action="store_true", help="skip the force column")

    p = sub.add_parser("oscillator", parents=[common, sweep],
                       help="induced free energy of the three-oscillator model")
    p.add_argument("--mode", choices=("TM", "TE", "mixed"), default="TM")
    for name in ("a1", "a2", "a3"):
        p.add_argument(f"--{name}", type=_positive, default=1.0)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=math.inf,
                   help="inverse temperature (hbar = 1); inf for zero temperature")

    p = sub.add_parser("phase-map", parents=[common, materials],
                       help="sign of the plate force over a grid of constant eps, mu")
    for name in ("eps1", "mu1", "eps2", "mu2"):
        p.add_argument(f"--{name}-range", nargs=3, metavar=("LO", "HI", "N"),
                       help=f"grid of constant {name} values")
    p.add_argument("--spacing", choices=("linear", "log"), default="log")
    p.add_argument("--equal-media", action="store_true",
                   help="plate 2 copies plate 1 (the eps2/mu2 options are ignored)")
    p.add_argument("--gap", type=_positive, default=1e-6)
    p.add_argument("--temp", type=_nonnegative, default=0.0)

    p = sub.add_parser("selftest", parents=[common], help="run the oracle checks")
    p.add_argument("--quick", action="store_true", help="fast subset")
    p.add_argument("--inject-fault", choices=("i_ee",), help=argparse.SUPPRESS)
    return parser


def parse_args(argv):
    """Parse with precedence: flags > ``--config`` JSON > defaults."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in data.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[dest]
        if action.type is not None and value is not None and not isinstance(value, (list, bool)):
            try:
                value = action.type(str(value))
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad value for config key {key!r}: {exc}") from exc
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _quadrature(args):
    try:
        return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                                max_subdivisions=args.max_subdivisions)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _grid(lo, hi, n, spacing):
    if n < 1:
        raise UsageError("count must be at least 1")
    if spacing == "log":
        if not (lo > 0 and hi > 0):
            raise UsageError("log spacing needs positive bounds")
        return list(np.geomspace(lo, hi, n))
    return list(np.linspace(lo, hi, n))


def _sweep_points(args):
    if not args.sweep:
        return [args]
    if args.sweep not in SWEEPABLE[args.command]:
        raise UsageError(f"cannot sweep {args.sweep!r}; choose from "
                         f"{', '.join(SWEEPABLE[args.command])}")
    if args.start is None or args.stop is None:
        raise UsageError("--sweep needs --start and --stop")
    points = []
    for v in _grid(args.start, args.stop, args.count, args.spacing):
        a = copy.copy(args)
        setattr(a, args.sweep, float(v))
        points.append(a)
    return points


def _plate(args, idx):
    try:
        eps = parse_model(getattr(args, f"eps{idx}"), frequency_scale=1.0 / C)
        mu = parse_model(getattr(args, f"mu{idx}"), frequency_scale=1.0 / C)
        return PlateSpec(eps, mu)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _thermal_si(temp):
    return ThermalState.zero(HBAR_C) if temp == 0 else ThermalState.from_kelvin(temp)


def _plates_row(args, cfg, p1, p2):
    if not args.gap > 0:
        raise UsageError("gap must be positive")
    if not args.temp >= 0:
        raise UsageError("temperature must be non-negative")
    res = force_per_area(HalfSpacePair(p1, p2, args.gap), _thermal_si(args.temp), cfg)
    unit = HBAR_C / args.gap ** 4
    return {
        "gap_m": args.gap,
        "temp_K": args.temp,
        "force_Pa": res.value,
        "reduced": res.reduced,
        "sign": res.sign,
        "tm_Pa": res.diagnostics["tm"] * unit,
        "te_Pa": res.diagnostics["te"] * unit,
        "abs_error_Pa": res.abs_error,
        "matsubara_terms": res.diagnostics["terms"] or 0,
        "converged": res.converged,
    }


def run_plates(args):
    cfg = _quadrature(args)
    p1, p2 = _plate(args, 1), _plate(args, 2)
    return _map(lambda a: _plates_row(a, cfg, p1, p2), _sweep_points(args), args.threads)


def _particles_row(args, cfg):
    if not args.r > 0:
        raise UsageError("separation must be positive")
    p1 = ParticleSpec(args.alpha1e, args.alpha1h)
    p2 = ParticleSpec(args.alpha2e, args.alpha2h)
    if args.natural:
        thermal = ThermalState.zero() if args.temp == 0 else ThermalState.finite(1.0 / args.temp)
    else:
        thermal = _thermal_si(args.temp)
    g = PairGeometry(args.r, thermal)
    energy = free_energy(p1, p2, g, cfg)
    row = {
        "r": args.r,
        "temp": args.temp,
        "energy": energy.total,
        "f_ee": energy.f_ee,
        "f_hh": energy.f_hh,
        "f_eh": energy.f_eh,
        "f_he": energy.f_he,
        "energy_sign": sign_label(energy.total),
    }
    converged = energy.converged
    if not args.no_force:
        try:
            force = pair_force(p1, p2, g, cfg)
            row["force"], row["force_sign"] = force.value, force.sign
        except ConvergenceError:
            row["force"], row["force_sign"] = math.nan, "unknown"
            converged = False
    row["converged"] = converged
    return row


def run_particles(args):
    cfg = _quadrature(args)
    return _map(lambda a: _particles_row(a, cfg), _sweep_points(args), args.threads)


def _oscillator_row(args, cfg):
    try:
        t = OscillatorTriplet(args.a1, args.a2, args.a3, args.c, args.mode)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if not args.beta > 0:
        raise UsageError("beta must be positive (inf for zero temperature)")
    thermal = ThermalState.zero() if math.isinf(args.beta) else ThermalState.finite(args.beta)
    row = {"mode": args.mode, "a1": args.a1, "a2": args.a2, "a3": args.a3,
           "c": args.c, "beta": args.beta}
    try:
        res = induced_free_energy_and_sign(t, thermal, cfg)
        row.update(delta_f=res.delta_f, sign=res.sign, converged=True)
    except DegenerateCouplingError as exc:
        raise UsageError(str(exc)) from exc
    except ConvergenceError as exc:
        row.update(delta_f=exc.diagnostics.get("value", math.nan), sign="unknown",
                   converged=False)
    return row


def run_oscillator(args):
    cfg = _quadrature(args)
    return _map(lambda a: _oscillator_row(a, cfg), _sweep_points(args), args.threads)


def _axis(args, name):
    rng = getattr(args, f"{name.replace('-', '_')}_range")
    if rng is None:
        model = parse_model(getattr(args, name))
        if not model.is_constant:
            raise UsageError(f"phase-map needs constant {name}, got {getattr(args, name)!r}")
        return [model.value]
    try:
        lo, hi, n = float(rng[0]), float(rng[1]), int(rng[2])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad range for {name}: {rng!r}") from exc
    return [float(v) for v in _grid(lo, hi, n, args.spacing)]


def run_phase_map(args):
    cfg = _quadrature(args)
    names = ("eps1", "mu1") if args.equal_media else ("eps1", "mu1", "eps2", "mu2")
    axes = [_axis(args, n) for n in names]
    combos = list(itertools.product(*axes))
    thermal = _thermal_si(args.temp)

    def row(values):
        e1, m1 = values[0], values[1]
        e2, m2 = (e1, m1) if args.equal_media else (values[2], values[3])
        try:
            pair = HalfSpacePair(PlateSpec(e1, m1), PlateSpec(e2, m2), args.gap)
        except (DomainError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        res = force_per_area(pair, thermal, cfg)
        return {"eps1": e1, "mu1": m1, "eps2": e2, "mu2": m2, "gap_m": args.gap,
                "temp_K": args.temp, "force_Pa": res.value, "reduced": res.reduced,
                "sign": res.sign,
                "sign_code": {"attractive": -1, "zero": 0, "repulsive": 1}[res.sign],
                "converged": res.converged}

    return _map(row, combos, args.threads)


def _map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# selftest


def _selftest_checks(quick, fault):
    """Yield ``(name, value, expected, tolerance)``; tolerances are relative."""
    from . import halfplanes, oscillator, particles
    from .materials import ResponseModel
    from .numerics import integrate_semi_infinite

    rng = np.random.default_rng(20240611)
    i_ee = 23.0 / 5.0 if fault == "i_ee" else particles.I_EE
    yield ("L_EE integral",
           integrate_semi_infinite(particles.l_ee, 0.0, vectorized=True).value, i_ee, 1e-9)
    yield ("L_EH integral",
           integrate_semi_infinite(particles.l_eh, 0.0, vectorized=True).value, particles.I_EH,
           1e-9)

    n = 50 if quick else 1000
    worst = 0.0
    for _ in range(n):
        mode = ("TM", "TE", "mixed")[rng.integers(3)]
        a1, a2, a3 = rng.uniform(0.5, 3.0, 3)
        t = oscillator.OscillatorTriplet(a1, a2, a3, rng.uniform(-0.5, 0.5), mode)
        z = rng.uniform(0.0, 5.0)
        for form in ("symmetrized", "coordinate"):
            det = oscillator.q_determinant(t, z, form)
            fac = oscillator.q_factored(t, z).Q
            worst = max(worst, abs(det - fac) / abs(fac))
    yield ("oscillator factorization (max rel. dev.)", worst, 0.0, 1e-12)

    worst = 0.0
    worst_sq = 0.0
    for _ in range(n):
        e1, m1, e2, m2 = rng.uniform(1.0, 10.0, 4)
        q = rng.uniform(0.1, 5.0)
        z = rng.uniform(0.0, q)
        a = rng.uniform(0.05, 2.0)
        for solve, closed in ((halfplanes.boundary_solve_tm, halfplanes.closed_form_d_tm),
                              (halfplanes.boundary_solve_te, halfplanes.closed_form_d_te)):
            d = solve(e1, m1, e2, m2, q, z, a).D
            ref = closed(e1, m1, e2, m2, q, z, a)
            worst = max(worst, abs(d - ref) / abs(ref))
        checks = (halfplanes.sq_identities(e1, m1, e2, m2, q, z)
                  + halfplanes.coefficient_relations(e1, m1, e2, m2, q, z, a))
        worst_sq = max([worst_sq] + [c.rel_error for c in checks])
    yield ("boundary solver vs closed forms (max rel. dev.)", worst, 0.0, 1e-12)
    yield ("algebraic identities (max rel. dev.)", worst_sq, 0.0, 1e-12)

    ideal = ResponseModel.ideal()
    conductor = halfplanes.force_per_area(
        HalfSpacePair(PlateSpec(ideal, 1), PlateSpec(ideal, 1), 1.0)).reduced
    yield ("conductor limit f a^4 / hbar c", conductor, -math.pi ** 2 / 240, 1e-8)
    boyer = halfplanes.force_per_area(
        HalfSpacePair(PlateSpec(ideal, 1), PlateSpec(1, ideal), 1.0)).reduced
    yield ("conducting/permeable limit f a^4 / hbar c", boyer, 7 / 8 * math.pi ** 2 / 240, 1e-8)


def run_selftest(args):
    rows = []
    for name, value, expected, tol in _selftest_checks(args.quick, args.inject_fault):
        dev = abs(value - expected) / abs(expected) if expected else abs(value)
        rows.append({"check": name, "value": value, "expected": expected,
                     "tolerance": tol, "passed": bool(dev <= tol)})
    return rows


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17e" % v
    return str(v)


def render(rows, fmt, meta):
    if fmt == "json":
        def clean(v):
            if isinstance(v, (float, np.floating)):
                v = float(v)
                return v if math.isfinite(v) else str(v)
            return v
        doc = {"metadata": meta, "rows": [{k: clean(v) for k, v in r.items()} for r in rows]}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rows[0].keys())
        for r in rows:
            writer.writerow(_fmt(v) for v in r.values())
    return buf.getvalue()


RUNNERS = {
    "plates": run_plates,
    "particles": run_particles,
    "oscillator": run_oscillator,
    "phase-map": run_phase_map,
    "selftest": run_selftest,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        rows = RUNNERS[args.command](args)
    except UsageError as exc:
        print(f"casimir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        print(f"casimir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CasimirError as exc:
        print(f"casimir: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    config_echo = {k: v for k, v in sorted(vars(args).items())
                   if k not in ("output", "threads")}
    text = render(rows, args.format, {"version": __version__, "config": config_echo})
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "selftest":
        return EXIT_OK if all(r["passed"] for r in rows) else EXIT_SELFTEST
    if not all(r.get("converged", True) for r in rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

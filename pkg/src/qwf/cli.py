"""Command-line front end: ``qwf <subcommand> ...``.

Every command writes plot-ready CSV (or JSON) plus a manifest with the
parameters and a sha256 digest of each file body. CSV bodies depend only on
the inputs, never on timing or thread count.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import distribution as dist
from . import localization as loc
from .asymptotics import airy_front_wavefunction, critical_front_wavefunction
from .errors import QWFError
from .evolution import evolve, evolve_spectral, margin
from .fronts import find_fronts
from .lattice import HoppingConfig, dispersion_eval, group_velocity, parse_config_text
from .output import (Emitter, RunManifest, csv_from_arrays, csv_text, json_text,
                     manifest_path_for)
from .spinchain import complementary_cumulative, domain_wall_from_state

FRONT_NAMES = ("left", "right", "internal-left", "internal-right")
REPRODUCE_TARGETS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "table1", "table2")
MAX_TIME = 1e6


class UsageError(Exception):
    pass


# argument types -----------------------------------------------------------------

def _finite(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return x


def _time(text: str) -> float:
    t = _finite(text)
    if t < 0 or t > MAX_TIME:
        raise argparse.ArgumentTypeError(f"time must be in [0, {MAX_TIME:g}], got {t}")
    return t


def _time_list(text: str) -> list[float]:
    return [_time(part) for part in str(text).split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    return [_finite(part) for part in str(text).split(",") if part.strip()]


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def parse_range(text: str) -> np.ndarray:
    """``lo:hi:step`` (inclusive) or a single value or a comma list."""
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        return loc.g_grid(lo, hi, step)
    return np.array(_float_list(text))


# parser ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, out_help: str, t_default=None) -> None:
    p.add_argument("--config", help="key = value file supplying defaults for any option")
    p.add_argument("--g", type=_finite, default=0.0, help="next-nearest to nearest hopping ratio (default 0)")
    p.add_argument("--couplings", type=_float_list, default=None,
                   help="comma list g_1,g_2,... (g_1 must be 1); overrides --g")
    p.add_argument("--out", default=None, help=out_help)
    if t_default is not None:
        p.add_argument("--t", type=_time, default=t_default, help=f"time in units of 1/g_1 (default {t_default:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fronts", help="extremal fronts as JSON")
    _common(p, "JSON path (default: stdout)")
    p.add_argument("--tol", type=_finite, default=1e-9, help="order classification tolerance (default 1e-9)")

    p = sub.add_parser("evolve", help="amplitudes psi(n, t) as CSV")
    _common(p, "CSV path (default: stdout)", 50.0)
    p.add_argument("--method", choices=("spectral", "bessel", "ode"), default="spectral")

    p = sub.add_parser("cdf", help="cumulative distributions and the global scaling curve")
    _common(p, "output directory (default: cdf_out)")
    p.add_argument("--t", type=_time_list, default=[1000.0, 5000.0, 10000.0],
                   help="comma list of times (default 1000,5000,10000)")

    p = sub.add_parser("staircase", help="step heights, widths and areas near a front")
    _common(p, "CSV path (default: stdout)", 10000.0)
    p.add_argument("--front", choices=FRONT_NAMES, default="right")
    p.add_argument("--steps", type=_positive_int, default=5)

    p = sub.add_parser("localization", help="IPR, entropy and return probability scans")
    _common(p, "CSV path (default: stdout)")
    p.add_argument("--scan", choices=("t", "g"), default="g")
    p.add_argument("--t", default=None, help="time value, or lo:hi:step range for --scan t")
    # --g is redefined as text so a range can be given
    for action in p._actions:
        if action.dest == "g":
            action.type = str
            action.default = None
            action.help = "g value, or lo:hi:step range for --scan g (default 0.15:0.35:0.01)"

    p = sub.add_parser("spinchain", help="domain-wall density versus 1 - Phi(n - 1)")
    _common(p, "CSV path (default: stdout)", 1000.0)

    p = sub.add_parser("asymptotics", help="local front forms against exact |psi|")
    _common(p, "CSV path (default: stdout)", 10000.0)
    p.add_argument("--front", choices=("max", "internal", "origin"), default="max")

    p = sub.add_parser("reproduce", help="data behind a figure or table")
    p.add_argument("target", choices=REPRODUCE_TARGETS)
    p.add_argument("--config", help="key = value file supplying defaults")
    p.add_argument("--t", type=_time_list, default=None, help="override the target's times")
    p.add_argument("--out", default=None, help="output directory (default: reproduce_<target>)")
    return parser


def _config_defaults(argv: list[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    values = parse_config_text(Path(known.config).read_text())
    return {k.replace("-", "_"): v for k, v in values.items()}


def parse_cli(argv=None) -> argparse.Namespace:
    """Validated job description; exits with status 2 on bad usage."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        parser.exit(2, "qwf: error: a subcommand is required\n")
    try:
        defaults = _config_defaults(argv)
    except OSError as exc:
        parser.exit(1, f"qwf: error: cannot read config: {exc}\n")
    except ValueError as exc:
        parser.error(str(exc))
    if defaults:
        sub = parser._subparsers._group_actions[0].choices  # type: ignore[union-attr]
        for name, sp in sub.items():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    args = parser.parse_args(argv)
    try:
        args.hopping = _hopping(args)
    except ValueError as exc:
        parser.error(str(exc))
    return args


def _hopping(args) -> HoppingConfig | None:
    if args.command == "reproduce":
        return None
    couplings = getattr(args, "couplings", None)
    if couplings is not None:
        return HoppingConfig(tuple(float(c) for c in couplings))
    g = args.g
    if args.command == "localization":
        if args.scan == "g":
            return None
        g = 0.0 if g is None else float(g)
    return HoppingConfig.from_g(float(g))


# commands -------------------------------------------------------------------------

def _emit_single(emitter: Emitter, out, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        emitter.write(out, text)


def _cone(config: HoppingConfig, t: float) -> int:
    return math.ceil(find_fronts(config).v_e * t) + margin(t, config)


def cmd_fronts(args, emitter):
    fs = find_fronts(args.hopping, tol=args.tol)
    _emit_single(emitter, args.out, json_text(fs.to_dict()))


def cmd_evolve(args, emitter):
    st = evolve(args.hopping, args.t, args.method)
    emitter.manifest.ring_size = st.ring_size
    half = _cone(args.hopping, args.t)
    st = st.restrict(-half, half)
    text = csv_from_arrays(["n", "re_psi", "im_psi", "p"], st.sites, st.amplitudes.real,
                           st.amplitudes.imag, st.probabilities)
    _emit_single(emitter, args.out, text)


def cdf_files(config: HoppingConfig, times, out: Path, emitter: Emitter, tag: str = "") -> dist.CollapseReport:
    fronts = find_fronts(config)
    states = [evolve_spectral(config, t) for t in times]
    emitter.manifest.ring_size = max(s.ring_size for s in states)
    for t, st in zip(times, states):
        prof = dist.cumulative(st)
        sel = np.abs(prof.sites) <= 1.2 * fronts.v_e * t
        n = prof.sites[sel]
        theory = dist.global_scaling_curve(config, n / t, fronts)
        emitter.write(out / f"cdf{tag}_t{t:g}.csv",
                      csv_from_arrays(["n", "u", "Phi", "Phi_theory"], n, n / t, prof.Phi[sel], theory))
    u = np.linspace(-1.1 * fronts.v_e, 1.1 * fronts.v_e, 1101)
    cols = [u]
    for t, st in zip(times, states):
        prof = dist.cumulative(st)
        cols.append(np.interp(u, prof.sites / t, prof.Phi_mid))
    cols.append(dist.global_scaling_curve(config, u, fronts))
    names = ["u"] + [f"Phi_t{t:g}" for t in times] + ["Phi_theory"]
    emitter.write(out / f"collapse{tag}.csv", csv_from_arrays(names, *cols))
    report = dist.scaling_collapse_test(config, times, states=states)
    emitter.write(out / f"collapse{tag}.json", json_text({
        "times": report.times, "max_pairwise": report.max_pairwise,
        "max_theory": report.max_theory, "per_time": report.per_time}))
    return report


def cmd_cdf(args, emitter):
    out = Path(args.out or "cdf_out")
    cdf_files(args.hopping, args.t, out, emitter)
    return out


STAIR_COLUMNS = ["s", "h_s", "w_s", "area", "h_pred", "w_pred"]


def staircase_rows(report: dist.StaircaseReport):
    return [(s.s, s.h_s, s.w_s, s.area, s.h_pred, s.w_pred) for s in report.steps]


def cmd_staircase(args, emitter):
    config = args.hopping
    fronts = find_fronts(config)
    if args.front.startswith("internal") and fronts.v_i is None:
        raise UsageError(f"no internal fronts for this walk (regime {fronts.regime})")
    st = evolve_spectral(config, args.t)
    emitter.manifest.ring_size = st.ring_size
    report = dist.staircase_extract(st, fronts.front(args.front), args.steps, config)
    if not report.complete:
        print(f"qwf: warning: only {report.count} of {args.steps} steps resolved", file=sys.stderr)
    _emit_single(emitter, args.out, csv_text(STAIR_COLUMNS, staircase_rows(report)))


def _range(text):
    try:
        return parse_range(text)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_localization(args, emitter):
    if args.scan == "g":
        gs = _range(args.g if args.g is not None else "0.15:0.35:0.01")
        t = float(args.t) if args.t is not None else 2000.0
        series = loc.g_scan(gs, t)
    else:
        ts = _range(args.t if args.t is not None else "1:50:1")
        series = loc.time_scan(args.hopping, ts)
    text = csv_from_arrays([series.axis, "ipr", "entropy", "r0", "t_r0"], series.values,
                           series.ipr, series.entropy, series.r0, series.t_r0)
    _emit_single(emitter, args.out, text)


def cmd_spinchain(args, emitter):
    st = evolve_spectral(args.hopping, args.t)
    emitter.manifest.ring_size = st.ring_size
    prof = domain_wall_from_state(st)
    _, ref = complementary_cumulative(st)
    half = _cone(args.hopping, args.t)
    sel = np.abs(prof.sites) <= half
    text = csv_from_arrays(["n", "rho", "m", "one_minus_phi_shifted", "abs_diff"], prof.sites[sel],
                           prof.rho[sel], prof.magnetization[sel], ref[sel], np.abs(prof.rho - ref)[sel])
    _emit_single(emitter, args.out, text)


def asymptotic_table(config: HoppingConfig, t: float, which: str):
    fronts = find_fronts(config)
    st = evolve_spectral(config, t)
    if which == "origin":
        origin = [f for f in fronts.fronts if f.order == 2]
        if not origin:
            raise UsageError("no order-2 front at the origin (needs g = 1/4)")
        beta = origin[0].beta
        half = math.ceil(8.0 * t ** 0.25)
        n = np.arange(-half, half + 1)
        z = n / t ** 0.25
        return z, critical_front_wavefunction(n, t, beta), np.abs(st.psi(n)), st
    if which == "internal":
        if fronts.v_i is None or fronts.regime != "nested_cones":
            raise UsageError(f"no order-1 internal front (regime {fronts.regime})")
        front = fronts.front("internal-right")
    else:
        front = fronts.front("right")
    n_f = front.velocity * t
    scale = n_f ** (1.0 / 3.0)
    n = np.arange(math.ceil(n_f - 10 * scale), math.floor(n_f + 10 * scale) + 1)
    z = (n - n_f) / scale
    pred = np.abs(airy_front_wavefunction(front, n, t, config))
    return z, pred, np.abs(st.psi(n)), st


def cmd_asymptotics(args, emitter):
    z, pred, exact, st = asymptotic_table(args.hopping, args.t, args.front)
    emitter.manifest.ring_size = st.ring_size
    text = csv_from_arrays(["z", "predicted_abs_psi", "exact_abs_psi"], z, pred, exact)
    _emit_single(emitter, args.out, text)


# reproduction recipes ------------------------------------------------------------

FIG_G = (0.0, 0.125, 0.25, 0.5)


def _g_tag(g: float) -> str:
    return f"g{g:g}"


def reproduce(target: str, out: Path, emitter: Emitter, times=None) -> None:
    if target == "fig1":
        t = (times or [50.0])[0]
        for g in FIG_G:
            config = HoppingConfig.from_g(g)
            st = evolve_spectral(config, t)
            half = _cone(config, t)
            st = st.restrict(-half, half)
            emitter.write(out / f"fig1_{_g_tag(g)}_t{t:g}.csv",
                          csv_from_arrays(["n", "p"], st.sites, st.probabilities))
            fs = find_fronts(config)
            emitter.write(out / f"fig1_{_g_tag(g)}_fronts.json", json_text(fs.to_dict()))
    elif target == "fig2":
        q = np.linspace(-math.pi, math.pi, 2001)
        for g in FIG_G:
            config = HoppingConfig.from_g(g)
            fs = find_fronts(config)
            v = group_velocity(config, q)
            emitter.write(out / f"fig2_{_g_tag(g)}.csv",
                          csv_from_arrays(["q", "omega", "v", "v_over_ve"], q, dispersion_eval(config, q),
                                          v, v / fs.v_e))
    elif target == "fig3":
        times = times or [1000.0, 5000.0, 10000.0]
        for g in FIG_G:
            cdf_files(HoppingConfig.from_g(g), times, out, emitter, tag=f"_{_g_tag(g)}")
    elif target == "fig4":
        times = times or [1000.0, 5000.0, 10000.0]
        panels = [(0.0, "right"), (0.125, "right"), (0.25, "right"), (0.5, "right"), (0.5, "internal-right")]
        for g, which in panels:
            config = HoppingConfig.from_g(g)
            front = find_fronts(config).front(which)
            for t in times:
                rep = dist.staircase_extract(evolve_spectral(config, t), front, 5, config)
                emitter.write(out / f"fig4_{_g_tag(g)}_{which}_t{t:g}.csv",
                              csv_from_arrays(["z", "y"], rep.z, rep.y))
        for t in times:
            prof = dist.critical_front_profile(t)
            emitter.write(out / f"fig4_g0.25_origin_t{t:g}.csv",
                          csv_from_arrays(["x", "y"], prof.x, prof.y))
    elif target in ("fig5", "fig6", "fig7"):
        column = {"fig5": "ipr", "fig6": "entropy", "fig7": "t_r0"}[target]
        small_t = np.arange(0.5, 50.01, 0.5)
        for g in FIG_G:
            series = loc.time_scan(HoppingConfig.from_g(g), small_t)
            emitter.write(out / f"{target}a_{_g_tag(g)}.csv",
                          csv_from_arrays(["t", column], series.values, getattr(series, column)))
        for t in times or [2000.0]:
            series = loc.g_scan(loc.g_grid(0.0, 0.5, 0.01), t)
            emitter.write(out / f"{target}b_t{t:g}.csv",
                          csv_from_arrays(["g", column], series.values, getattr(series, column)))
    elif target in ("table1", "table2"):
        times = times or [5000.0, 10000.0]
        if target == "table1":
            jobs = [(g, "right") for g in (0.0, 0.125, 0.25)]
        else:
            jobs = [(0.5, "right"), (0.5, "internal-right")]
        rows = []
        for t in times:
            for g, which in jobs:
                config = HoppingConfig.from_g(g)
                rep = dist.staircase_extract(evolve_spectral(config, t), find_fronts(config).front(which), 5, config)
                for s in rep.steps:
                    rows.append((t, g, which, s.s, s.h_s, s.w_s, s.area, s.h_pred, s.w_pred))
        emitter.write(out / f"{target}.csv",
                      csv_text(["t", "g", "front"] + STAIR_COLUMNS, rows))
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown target {target}")


def cmd_reproduce(args, emitter):
    out = Path(args.out or f"reproduce_{args.target}")
    reproduce(args.target, out, emitter, args.t)
    return out


COMMANDS = {
    "fronts": cmd_fronts,
    "evolve": cmd_evolve,
    "cdf": cmd_cdf,
    "staircase": cmd_staircase,
    "localization": cmd_localization,
    "spinchain": cmd_spinchain,
    "asymptotics": cmd_asymptotics,
    "reproduce": cmd_reproduce,
}


def _parameters(args) -> dict:
    skip = {"hopping", "command"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    if args.hopping is not None:
        params["couplings"] = list(args.hopping.couplings)
    return params


def main(argv=None) -> int:
    args = parse_cli(argv)
    manifest = RunManifest(args.command, _parameters(args))
    emitter = Emitter(manifest)
    start = time.perf_counter()
    try:
        out_dir = COMMANDS[args.command](args, emitter)
        manifest.wall_clock = time.perf_counter() - start
        target = out_dir if out_dir is not None else (Path(args.out) if args.out else None)
        if target is not None:
            emitter.write_manifest(manifest_path_for(Path(target)))
    except UsageError as exc:
        print(f"qwf {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qwf: I/O error: {exc}", file=sys.stderr)
        return 1
    except (QWFError, ValueError) as exc:
        print(f"qwf: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end: ``sqzport <command> [flags]``.

Exit status is 0 on success, 1 for bad arguments and 2 for numerical
failures (cutoff overflow, non-convergence, failed validation).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import darkport, disentangle, fockoracle, gaussian, validation
from .errors import NumericalError
from .states import CoherentParams, SqueezeParams

__all__ = ["main", "build_parser", "UsageError"]

COMMANDS = ("distribution", "moments", "sweep", "disentangle", "validate", "fig1")
DEFAULT_DELTA = 0.1
ORACLE_CUTOFF = 120
# peaks below this fraction of the tallest one are tail ripples, not features
PEAK_HEIGHT = 1e-3
SWEEP_PARAMS = ("alpha-mag", "alpha-phase", "r", "theta", "delta", "gamma", "delta-alpha-sq")
ANGLE_KEYS = ("alpha_phase", "theta", "delta", "gamma")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    """Locale-free 12-significant-digit rendering."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.12g" % float(x)


def _json_value(x):
    if isinstance(x, (int, np.integer, str)) or x is None:
        return x if not isinstance(x, np.integer) else int(x)
    return float(fmt(x))


def _add_common(p: argparse.ArgumentParser):
    g = p.add_argument_group("physical parameters")
    g.add_argument("--alpha-mag", type=float, default=None, help="|alpha| of the laser field")
    g.add_argument("--alpha-phase", type=float, default=0.0, help="phase phi of alpha")
    g.add_argument("--r", type=float, default=0.0, help="squeezing factor")
    g.add_argument("--theta", type=float, default=0.0, help="squeeze phase")
    off = g.add_mutually_exclusive_group()
    off.add_argument("--delta", type=float, default=None, help="dark-port offset pi/2 - gamma")
    off.add_argument("--gamma", type=float, default=None, help="splitter angle")
    g.add_argument(
        "--delta-alpha-sq",
        type=float,
        default=None,
        help="signal |delta alpha|^2; sets |alpha| from delta (default delta 0.1)",
    )
    g.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    n = p.add_argument_group("numerics and output")
    n.add_argument("--cutoff", type=int, default=None, help="photon-number cutoff limit")
    n.add_argument("--target-residual", type=float, default=1e-12, help="allowed normalization residual")
    n.add_argument("--format", choices=("csv", "json"), default="csv")
    n.add_argument("--output", type=Path, default=None, help="output file (default stdout)")
    n.add_argument("--config", type=Path, default=None, help="flat 'key = value' file; flags override it")


def build_parser() -> _Parser:
    parser = _Parser(prog="sqzport", description="Dark-port photon statistics with squeezed light.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    helps = {
        "distribution": "photon-number distribution P_n in the dark port",
        "moments": "mean and variance from the analytic, Gaussian and Fock engines",
        "sweep": "moments while one parameter runs over a range",
        "disentangle": "coefficients of the ordered-product form of the squeeze generator",
        "validate": "cross-module consistency report",
        "fig1": "distributions for |delta alpha|^2 = 500, theta = 2 phi, r = 0 .. 1.5",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        _add_common(p)
        if name == "sweep":
            p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
            p.add_argument("--start", type=float, required=True)
            p.add_argument("--stop", type=float, required=True)
            p.add_argument("--num", type=int, default=11)
    return parser


def _read_config(path: Path) -> dict[str, str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-")] = value
    return out


def _config_argv(values: dict[str, str], sub: argparse.ArgumentParser) -> list[str]:
    known = {s for a in sub._actions for s in a.option_strings}
    argv = []
    for key, value in values.items():
        opt = "--" + key
        if opt not in known or key == "config":
            raise UsageError(f"unknown config key {key!r}")
        if opt == "--degrees":
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(opt)
            continue
        argv += [opt, value]
    return argv


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        cfg = _config_argv(_read_config(args.config), sub)
        from_file = sub.parse_args(cfg)
        given = {a.dest for a in sub._actions if any(s in argv for s in a.option_strings)}
        merged = vars(from_file)
        merged.update({k: v for k, v in vars(args).items() if k in given or k == "command"})
        # one offset flag from the command line replaces either from the file
        if "delta" in given:
            merged["gamma"] = None
        if "gamma" in given:
            merged["delta"] = None
        if merged.get("delta") is not None and merged.get("gamma") is not None:
            raise UsageError("--delta and --gamma are mutually exclusive")
        merged["command"] = args.command
        args = argparse.Namespace(**merged)
    return args


@dataclass
class Physical:
    alpha: CoherentParams
    zeta: SqueezeParams
    delta: float
    gamma: float


def resolve(args: argparse.Namespace, overrides: dict | None = None) -> Physical:
    """Turn flag values into validated parameters (radians internally)."""
    v = {k: getattr(args, k) for k in ("alpha_mag", "alpha_phase", "r", "theta", "delta", "gamma", "delta_alpha_sq")}
    v.update(overrides or {})
    if args.degrees:
        for k in ANGLE_KEYS:
            if v[k] is not None:
                v[k] = math.radians(v[k])
    if v["gamma"] is not None:
        gamma = v["gamma"]
        delta = math.pi / 2 - gamma
    else:
        delta = DEFAULT_DELTA if v["delta"] is None else v["delta"]
        gamma = math.pi / 2 - delta
    if not (0.0 <= gamma <= math.pi / 2):
        raise UsageError(f"splitter angle gamma={gamma:g} rad lies outside [0, pi/2]")
    mag = v["alpha_mag"]
    if v["delta_alpha_sq"] is not None:
        if mag is not None:
            raise UsageError("give either --alpha-mag or --delta-alpha-sq, not both")
        if v["delta_alpha_sq"] < 0:
            raise UsageError("--delta-alpha-sq must be >= 0")
        if delta == 0.0:
            if v["delta_alpha_sq"] != 0:
                raise UsageError("--delta-alpha-sq needs a nonzero offset")
            mag = 0.0
        else:
            mag = math.sqrt(v["delta_alpha_sq"]) / abs(delta)
    try:
        alpha = CoherentParams(0.0 if mag is None else mag, v["alpha_phase"])
        zeta = SqueezeParams(v["r"], v["theta"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return Physical(alpha, zeta, delta, gamma)


def _params_block(ph: Physical) -> dict:
    return {
        "alpha_mag": ph.alpha.magnitude,
        "alpha_phase": ph.alpha.phase,
        "r": ph.zeta.r,
        "theta": ph.zeta.theta,
        "delta": ph.delta,
        "gamma": ph.gamma,
        "delta_alpha_sq": (ph.alpha.magnitude * ph.delta) ** 2,
    }


@dataclass
class Table:
    header: list[str]
    rows: list[list]


@dataclass
class Result:
    params: dict
    series: Table
    summary: Table | None = None


def _check_first_order(delta: float):
    if abs(delta) > 0.5:
        raise UsageError(f"|delta|={abs(delta):g} exceeds 0.5; the dark-port formulas do not apply")


def cmd_distribution(args, ph: Physical) -> Result:
    _check_first_order(ph.delta)
    kw = {"target_residual": args.target_residual}
    if args.cutoff is not None:
        kw["max_cutoff"] = args.cutoff
    dist = darkport.distribution(ph.alpha, ph.zeta, ph.delta, **kw)
    m = dist.moments()
    series = Table(["n", "P_n"], [[int(n), p] for n, p in zip(dist.n, dist.probabilities)])
    summary = Table(
        ["cutoff", "mean", "variance", "residual"],
        [[dist.cutoff, m.mean, m.variance, dist.normalization_residual]],
    )
    return Result(_params_block(ph), series, summary)


def _oracle_limit(args) -> int:
    return ORACLE_CUTOFF if args.cutoff is None else args.cutoff


def cmd_moments(args, ph: Physical) -> Result:
    rows = []
    analytic = None
    if abs(ph.delta) <= 0.5:
        analytic = darkport.analytic_moments(ph.alpha, ph.zeta, ph.delta)
        rows.append(["analytic", analytic.mean, analytic.variance])
    exact = gaussian.exact_dark_port_moments(ph.alpha, ph.zeta, ph.gamma)
    rows.append(["gaussian", exact.mean, exact.variance])
    oracle = None
    needed = fockoracle.recommended_cutoff(ph.alpha, ph.zeta)
    if needed <= _oracle_limit(args):
        oracle = fockoracle.marginal_moments(fockoracle.output_state(ph.alpha, ph.zeta, ph.gamma, cutoffs=needed), 1)
        rows.append(["oracle", oracle.mean, oracle.variance])
    engines = {"analytic": analytic, "gaussian": exact, "oracle": oracle}
    pairs = [("gaussian", "analytic"), ("oracle", "gaussian"), ("oracle", "analytic")]
    for a, b in pairs:
        if engines[a] is not None and engines[b] is not None:
            rows.append(
                [
                    f"absdiff_{a}_{b}",
                    abs(engines[a].mean - engines[b].mean),
                    abs(engines[a].variance - engines[b].variance),
                ]
            )
    params = _params_block(ph)
    params["oracle_cutoff"] = needed if oracle is not None else None
    return Result(params, Table(["engine", "mean", "variance"], rows))


def cmd_sweep(args, ph: Physical) -> Result:
    if args.num < 1:
        raise UsageError("--num must be >= 1")
    key = args.param.replace("-", "_")
    values = np.linspace(args.start, args.stop, args.num)
    rows = []
    for x in values:
        over = {key: float(x)}
        if key == "delta":
            over["gamma"] = None
        elif key == "gamma":
            over["delta"] = None
        if key == "delta_alpha_sq":
            over["alpha_mag"] = None
        p = resolve(args, over)
        exact = gaussian.exact_dark_port_moments(p.alpha, p.zeta, p.gamma)
        if abs(p.delta) <= 0.5:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                a = darkport.analytic_moments(p.alpha, p.zeta, p.delta)
            am, av = a.mean, a.variance
        else:
            am = av = float("nan")
        rows.append([float(x), am, av, exact.mean, exact.variance])
    params = _params_block(ph)
    params.update({"sweep": args.param, "start": args.start, "stop": args.stop, "num": args.num})
    header = [key, "mean_analytic", "variance_analytic", "mean_gaussian", "variance_gaussian"]
    return Result(params, Table(header, rows))


def cmd_disentangle(args, ph: Physical) -> Result:
    c = disentangle.disentangle(ph.zeta, ph.gamma)
    header = ["r", "gamma", "sigma_T", "sigma_S", "sigma_1", "sigma_2", "residual"]
    row = [ph.zeta.r, ph.gamma, c.sigma_T, c.sigma_S, c.sigma_1, c.sigma_2, c.residual]
    return Result(_params_block(ph), Table(header, [row]))


class ValidationFailed(NumericalError):
    pass


def cmd_validate(args, ph: Physical) -> Result:
    results = validation.run_checks()
    rows = [[c.name, c.achieved, c.tolerance, "PASS" if c.passed else "FAIL"] for c in results]
    return Result({}, Table(["check", "achieved", "tolerance", "status"], rows))


def cmd_fig1(args, ph: Physical) -> Result:
    # theta = 2 phi; the signal strength defaults to 500 photons
    signal = 500.0 if args.delta_alpha_sq is None and args.alpha_mag is None else None
    over = {"delta_alpha_sq": signal} if signal is not None else {}
    base = resolve(args, over)
    _check_first_order(base.delta)
    dists, summary = [], []
    lo, hi = math.inf, -math.inf
    for r in validation.FIG1_R_GRID:
        z = SqueezeParams(r, 2.0 * base.alpha.phase)
        kw = {"target_residual": args.target_residual}
        if args.cutoff is not None:
            kw["max_cutoff"] = args.cutoff
        dist = darkport.distribution(base.alpha, z, base.delta, **kw)
        closed = darkport.analytic_moments(base.alpha, z, base.delta)
        summed = dist.moments()
        lo = min(lo, closed.mean - 12 * closed.std)
        hi = max(hi, closed.mean + 12 * closed.std)
        dists.append(dist)
        summary.append(
            [
                r,
                closed.mean,
                closed.variance,
                summed.mean,
                summed.variance,
                dist.normalization_residual,
                len(dist.local_maxima(PEAK_HEIGHT)),
            ]
        )
    n_lo, n_hi = max(0, math.floor(lo)), math.ceil(hi)
    header = ["n"] + [f"P_r{fmt(r)}" for r in validation.FIG1_R_GRID]
    rows = [[n] + [d.padded(n_hi + 1)[n] for d in dists] for n in range(n_lo, n_hi + 1)]
    params = _params_block(base)
    params["theta"] = "2*alpha_phase"
    params["r_grid"] = list(validation.FIG1_R_GRID)
    sum_header = ["r", "mean", "variance", "mean_sum", "variance_sum", "residual", "local_maxima"]
    return Result(params, Table(header, rows), Table(sum_header, summary))


HANDLERS = {
    "distribution": cmd_distribution,
    "moments": cmd_moments,
    "sweep": cmd_sweep,
    "disentangle": cmd_disentangle,
    "validate": cmd_validate,
    "fig1": cmd_fig1,
}


def _csv_text(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _json_text(command: str, res: Result) -> str:
    def rows(t: Table):
        return [{h: _json_value(x) for h, x in zip(t.header, row)} for row in t.rows]

    params = {k: (_json_value(v) if not isinstance(v, list) else [_json_value(x) for x in v]) for k, v in res.params.items()}
    doc = {"command": command, "params": params, "series": rows(res.series)}
    if res.summary is not None:
        doc["summary"] = rows(res.summary)
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _write(path: Path | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def emit(args, res: Result):
    if args.format == "json":
        _write(args.output, _json_text(args.command, res))
        return
    main_text = _csv_text(res.series)
    if res.summary is None:
        _write(args.output, main_text)
    elif args.output is None:
        _write(None, main_text + "\n" + _csv_text(res.summary))
    else:
        _write(args.output, main_text)
        sibling = args.output.with_name(args.output.stem + "_moments" + (args.output.suffix or ".csv"))
        _write(sibling, _csv_text(res.summary))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        if args.target_residual <= 0 or args.target_residual > 1e-3:
            raise UsageError("--target-residual must lie in (0, 1e-3]")
        if args.cutoff is not None and args.cutoff < 1:
            raise UsageError("--cutoff must be >= 1")
        ph = resolve(args)
        res = HANDLERS[args.command](args, ph)
        emit(args, res)
        if args.command == "validate" and any(row[-1] == "FAIL" for row in res.series.rows):
            failed = [row[0] for row in res.series.rows if row[-1] == "FAIL"]
            print(f"sqzport: validation failed: {', '.join(failed)}", file=sys.stderr)
            return 2
    except UsageError as exc:
        print(f"sqzport: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(
            f"sqzport: numerical failure in {exc.module or 'unknown'} (residual {exc.residual}): {exc}",
            file=sys.stderr,
        )
        return 2
    except OSError as exc:
        print(f"sqzport: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

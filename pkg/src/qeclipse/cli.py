"""Command-line entry point: ``qeclipse {margins,phase,widths,bound,distcheck}``.

Every flag can also come from a flat ``key = value`` config file passed with
``--config``; flags given on the command line win.  Exit codes: 0 success,
1 invalid input, 2 solver budget exceeded, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from qeclipse.bounds import BoundConfig, FixedPointError, ball_width_bound, prop1_m, prop2_m
from qeclipse.certificates import SolverBudgetExceeded, outcome, solve_trial
from qeclipse.checks import run_all
from qeclipse.embedding import draw_sensing
from qeclipse.geometry import difference_set, mean_width_estimate
from qeclipse.harness import (
    PROFILES,
    GridSpec,
    extract_phase_curve,
    rows_to_csv,
    run_grid,
    scene_from_sigma,
    write_rows,
)
from qeclipse.heatmap import render_heatmap
from qeclipse.rng import child_seed
from qeclipse.solvers import SolverConfig

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_IO = 3


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _number_list(kind):
    def parse(text):
        try:
            values = [kind(tok) for tok in str(text).replace(",", " ").split()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        if not values:
            raise argparse.ArgumentTypeError("empty list")
        return values

    parse.__name__ = f"{kind.__name__} list"
    return parse


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--eps-abs", type=float, default=1e-6)
    g.add_argument("--eps-rel", type=float, default=1e-4)
    g.add_argument("--max-iter", type=_positive_int, default=100_000)


def _scene_flags(p, n_default=32):
    p.add_argument("--n", type=_positive_int, default=n_default)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--direction-seed", type=int, default=0)


def _common(p):
    p.add_argument("--config", help="flat key = value file; command-line flags override it")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qeclipse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("margins", help="margins and certificates for one sensing draw")
    _common(p)
    _scene_flags(p)
    _solver_flags(p)
    p.add_argument("--m", type=_positive_int, default=8)
    p.add_argument("--sigma", type=float, default=4.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("phase", help="grid run, 0.9-level curves and heat maps")
    _common(p)
    p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--r", type=float)
    p.add_argument("--direction-seed", type=int, default=0)
    p.add_argument("--m-list", type=_number_list(int))
    p.add_argument("--sigma-list", type=_number_list(float))
    p.add_argument("--delta-list", type=_number_list(float))
    p.add_argument("--trials", type=_positive_int)
    p.add_argument("--level", type=float, default=0.9)
    p.add_argument("--out", help="CSV path for the grid rows")
    p.add_argument("--svg", help="SVG path; one file per delta when several are given")
    p.add_argument("--workers", type=_positive_int, default=1)
    _solver_flags(p)

    p = sub.add_parser("widths", help="Monte Carlo mean width against the ball bound")
    _common(p)
    _scene_flags(p)
    p.add_argument("--sigma-list", type=_number_list(float), default=[2.0, 4.0, 8.0, 16.0])
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--out", help="CSV path for the table")

    p = sub.add_parser("bound", help="evaluate the sample-complexity bounds")
    _common(p)
    _scene_flags(p, n_default=64)
    p.add_argument("--sigma", type=float, default=4.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--w", type=float, help="width; defaults to the ball width bound of the scene")
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--max-iter", type=_positive_int, default=100)
    p.add_argument("--log-arg-cap", type=float)

    p = sub.add_parser("distcheck", help="statistical battery for the quantised map")
    _common(p)
    return parser


def read_config(path) -> dict:
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    conf = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    unknown = sorted(set(conf) - set(known) - {"config"})
    if unknown:
        raise InputError(f"unknown config keys for '{args.command}': {', '.join(unknown)}")
    conf.pop("config", None)
    for key, value in conf.items():
        choices = known[key].choices
        if choices is not None and value not in choices:
            raise InputError(f"config key {key}: {value!r} is not one of {sorted(choices)}")
    # argparse converts string defaults with each action's type, so a
    # re-parse with the file values as defaults validates them as well
    sub.set_defaults(**conf)
    return parser.parse_args(argv)


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(args.eps_abs, args.eps_rel, args.max_iter)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def cmd_margins(args):
    d = difference_set(*scene_from_sigma(args.n, args.sigma, args.r, args.direction_seed))
    seed = child_seed(args.seed, 0)
    phi = draw_sensing(args.m, args.n, seed)
    solve = solve_trial(phi, d, _solver_cfg(args), 0, seed)
    out = outcome(solve, args.delta)
    tau_j = ";".join(repr(float(t)) for t in solve.tau_j)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "m", "sigma", "delta", "r", "seed", "tau", "tau_j",
                    "pbar_indicator", "pbarbar_factor", "linear_indicator", "converged"])
        w.writerow([args.n, args.m, repr(args.sigma), repr(args.delta), repr(args.r), args.seed,
                    repr(solve.tau), tau_j, out.pbar_indicator, repr(out.pbarbar_factor),
                    out.linear_indicator, int(solve.converged)])
        text = buf.getvalue()
    else:
        text = (
            f"n = {args.n}  m = {args.m}  sigma = {args.sigma!r}  delta = {args.delta!r}  r = {args.r!r}\n"
            f"tau = {solve.tau!r}\n"
            f"tau_j = [{tau_j.replace(';', ', ')}]\n"
            f"pbar_indicator = {out.pbar_indicator}\n"
            f"pbarbar_factor = {out.pbarbar_factor!r}\n"
            f"linear_indicator = {out.linear_indicator}\n"
            f"converged = {solve.converged}\n"
        )
    _emit(text, args.out)


def _svg_paths(base, deltas):
    base = Path(base)
    if len(deltas) == 1:
        return {deltas[0]: base}
    return {d: base.with_name(f"{base.stem}.delta-{d:g}{base.suffix or '.svg'}") for d in deltas}


def _curve_line(label, curve):
    cells = " ".join(f"{s:g}:{'-' if m is None else m}" for s, m in curve.points)
    return f"{label}  {cells}\n"


def cmd_phase(args):
    profile = dict(PROFILES[args.profile])
    overrides = {
        "n": args.n, "r": args.r, "m_values": args.m_list, "sigma_values": args.sigma_list,
        "delta_values": args.delta_list, "trials": args.trials,
    }
    profile.update({k: tuple(v) if isinstance(v, list) else v for k, v in overrides.items() if v is not None})
    spec = GridSpec(**profile, master_seed=args.seed, level=args.level, direction_seed=args.direction_seed)
    rows = run_grid(spec, _solver_cfg(args), workers=args.workers)
    if args.out:
        write_rows(rows, args.out)
    report = [f"# smallest m with estimate >= {spec.level} per sigma (sigma:m, '-' when none)\n"]
    for delta in spec.delta_values:
        report.append(_curve_line(f"p_bbar delta={delta:g}", extract_phase_curve(rows, delta, spec.level)))
    first = spec.delta_values[0]
    report.append(_curve_line(f"p_bar  delta={first:g}", extract_phase_curve(rows, first, spec.level, "p_bar_hat")))
    report.append(_curve_line("linear", extract_phase_curve(rows, first, spec.level, "p_lin_hat")))
    sys.stdout.write("".join(report))
    if not args.out and not args.svg:
        sys.stdout.write(rows_to_csv(rows))
    if args.svg:
        for delta, path in _svg_paths(args.svg, spec.delta_values).items():
            render_heatmap(rows, delta, extract_phase_curve(rows, delta, spec.level), path)


def cmd_widths(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "sigma", "r", "samples", "estimate", "stderr", "bound", "ratio"])
    for i, sigma in enumerate(args.sigma_list):
        d = difference_set(*scene_from_sigma(args.n, sigma, args.r, args.direction_seed))
        est, se = mean_width_estimate(d, args.samples, child_seed(args.seed, i))
        bound = ball_width_bound(d)
        w.writerow([args.n, repr(sigma), repr(args.r), args.samples, repr(est), repr(se), repr(bound), repr(est / bound)])
    _emit(buf.getvalue(), args.out)


def cmd_bound(args):
    cfg = BoundConfig(args.c1, args.c2, args.max_iter)
    if args.w is None:
        d = difference_set(*scene_from_sigma(args.n, args.sigma, args.r, args.direction_seed))
        w = ball_width_bound(d)
    else:
        w = args.w
    m1 = prop1_m(w, args.eta, cfg)
    m2 = prop2_m(w, args.n, args.delta, args.sigma, args.r, args.eta, cfg, args.log_arg_cap)
    lines = [
        f"constants: C1 = {cfg.c1_const!r}, C2 = {cfg.c2_const!r} (only ratios and trends are meaningful)",
        f"w = {w!r}  eta = {args.eta!r}  n = {args.n}  delta = {args.delta!r}  sigma = {args.sigma!r}  r = {args.r!r}",
        f"prop1_m = {m1}",
        f"prop2_m = {m2}",
    ]
    if w < 0.1:
        lines.append("warning: w < 0.1, the log(1/eta)/w^2 term dominates the quantised bound")
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_distcheck(args):
    results = run_all(args.seed)
    for res in results:
        sys.stdout.write(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INPUT


COMMANDS = {
    "margins": cmd_margins,
    "phase": cmd_phase,
    "widths": cmd_widths,
    "bound": cmd_bound,
    "distcheck": cmd_distcheck,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        code = COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except SolverBudgetExceeded as exc:
        print(f"qeclipse: solver budget exceeded: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FixedPointError as exc:
        print(f"qeclipse: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"qeclipse: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"qeclipse: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())

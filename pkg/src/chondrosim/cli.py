"""Command-line interface.

Machine-readable results go to stdout as ``key=value`` tokens; prose and
errors go to stderr.  Exit codes: 0 success, 1 verification failure,
2 usage or parameter error, 3 numerical divergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .domain import Interval, Rectangle
from .errors import ConfigError, DivergenceError, ParameterError
from .model import ModelParams, reaction_rhs, steady_state
from .output import format_float
from .runner import run_scenario
from .scenarios import builtin_scenario, builtin_scenarios, parse_config
from .stability import SpectrumSpec, hopf_diagnostics
from .verify import run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3

SEED_ENV_VAR = "CHONDRO_SEED"

_PARAM_FLAGS = ("a1", "a2", "b", "alpha", "delta", "beta", "gamma1", "gamma2", "kc1", "kc2")
_REQUIRED_PARAMS = ("alpha", "delta", "beta", "gamma1", "gamma2")
_PARAM_DEFAULTS = {"a1": 1.0, "a2": 1.0, "b": 0.0, "kc1": 1.0, "kc2": 1.0}


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    for name in _PARAM_FLAGS:
        parser.add_argument(f"--{name}", type=float, default=None)


def _params_from_args(args: argparse.Namespace) -> ModelParams:
    """Resolve model parameters from --config and/or inline flags."""
    values: dict[str, float] = {}
    if args.config is not None:
        spec = parse_config(Path(args.config).read_text(encoding="utf-8"))
        values = {name: getattr(spec.params, name) for name in _PARAM_FLAGS}
    for name in _PARAM_FLAGS:
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    missing = [name for name in _REQUIRED_PARAMS if name not in values]
    if missing:
        raise ParameterError(f"missing required parameters: {', '.join(missing)} (flags or --config)")
    for name, default in _PARAM_DEFAULTS.items():
        values.setdefault(name, default)
    return ModelParams(**values)


def _cmd_steady_state(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    ss = steady_state(p)
    residual = max(abs(v) for v in reaction_rhs(p, ss.c1, ss.c2, ss.h))
    print(
        f"c1*={format_float(ss.c1)} c2*={format_float(ss.c2)} "
        f"h*={format_float(ss.h)} residual={residual:.3e}"
    )
    return EXIT_OK


def _geometry_from_args(args: argparse.Namespace):
    if args.geometry == "interval":
        return Interval(args.length)
    if args.lx is None or args.ly is None:
        raise ParameterError("rectangle geometry requires --lx and --ly")
    return Rectangle(args.lx, args.ly)


def _cmd_stability(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    spec = SpectrumSpec(_geometry_from_args(args))
    report = hopf_diagnostics(p, spec)
    tokens = [
        f"b_c={format_float(report.b_crit)}",
        f"j0={report.mode_index}",
        f"k_j0={format_float(report.eigenvalue)}",
    ]
    if report.degenerate:
        tokens.append("degenerate=true")
    else:
        tokens.extend(
            [
                f"omega0={format_float(report.hopf_frequency)}",
                f"slope={format_float(report.transversality_slope)}",
                "degenerate=false",
            ]
        )
    print(" ".join(tokens))
    if args.table:
        for j, k, psi_b in report.table:
            print(f"j={j} k={format_float(k)} b_threshold={format_float(psi_b)}")
    return EXIT_OK


def _resolve_seed(args: argparse.Namespace, spec):
    if args.seed is not None:
        return spec.with_seed(args.seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return spec.with_seed(int(env))
        except ValueError as err:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from err
    return spec


def _cmd_simulate(args: argparse.Namespace) -> int:
    if (args.scenario is None) == (args.config is None):
        raise ParameterError("exactly one of --scenario or --config is required")
    if args.scenario is not None:
        spec = builtin_scenario(args.scenario)
    else:
        spec = parse_config(Path(args.config).read_text(encoding="utf-8"))
    spec = _resolve_seed(args, spec)
    out_dir = args.out if args.out is not None else Path("runs") / spec.name
    try:
        summary = run_scenario(spec, out_dir=out_dir)
    except DivergenceError as err:
        _err(f"simulation diverged: {err}")
        print(f"status=diverged out={out_dir}")
        return EXIT_DIVERGED
    violations = summary.result.violations
    print(
        f"status=completed out={out_dir} steps={summary.result.steps} "
        f"t_end={format_float(summary.result.t)} violations={len(violations)} "
        f"duration_s={summary.duration_seconds:.3f}"
    )
    for v in violations[:10]:
        _err(f"bound violation: {v}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.suite)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"check={r.name} status={'pass' if r.passed else 'fail'} detail=\"{r.detail}\"")
    print(f"summary={'pass' if not failed else 'fail'} total={len(results)} failed={len(failed)}")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def _cmd_scenarios(_: argparse.Namespace) -> int:
    for spec in builtin_scenarios():
        geom = (
            f"interval(L={spec.geometry.length:g})"
            if isinstance(spec.geometry, Interval)
            else f"rectangle({spec.geometry.lx:g}x{spec.geometry.ly:g})"
        )
        print(
            f"scenario={spec.name} geometry={geom} b={spec.params.b:g} "
            f"t_end={spec.t_end:g} description=\"{spec.description}\""
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chondrosim",
        description="Simulate and analyze the two-population taxis-diffusion tissue model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ss = sub.add_parser("steady-state", help="print the homogeneous equilibrium")
    _add_param_flags(p_ss)
    p_ss.set_defaults(func=_cmd_steady_state)

    p_st = sub.add_parser("stability", help="critical taxis sensitivity and Hopf diagnostics")
    _add_param_flags(p_st)
    p_st.add_argument("--geometry", choices=("interval", "rectangle"), default="interval")
    p_st.add_argument("--length", type=float, default=1.0, help="interval length")
    p_st.add_argument("--lx", type=float, default=None)
    p_st.add_argument("--ly", type=float, default=None)
    p_st.add_argument("--table", action="store_true", help="dump the per-mode threshold table")
    p_st.set_defaults(func=_cmd_stability)

    p_sim = sub.add_parser("simulate", help="run a scenario and write its outputs")
    p_sim.add_argument("--scenario", help="built-in scenario name")
    p_sim.add_argument("--config", type=Path, help="JSON run configuration")
    p_sim.add_argument("--out", type=Path, default=None, help="output directory (default runs/<name>)")
    p_sim.add_argument("--seed", type=int, default=None, help=f"overrides config seed and {SEED_ENV_VAR}")
    p_sim.set_defaults(func=_cmd_simulate)

    p_ver = sub.add_parser("verify", help="run invariant verification suites")
    p_ver.add_argument("--suite", choices=("stability", "solver", "bounds", "all"), default="all")
    p_ver.set_defaults(func=_cmd_verify)

    p_ls = sub.add_parser("scenarios", help="list built-in scenarios")
    p_ls.set_defaults(func=_cmd_scenarios)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ParameterError, ConfigError, FileNotFoundError) as err:
        _err(f"error: {err}")
        return EXIT_USAGE
    except DivergenceError as err:
        _err(f"divergence: {err}")
        return EXIT_DIVERGED


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()

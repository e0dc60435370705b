"""Command-line front end.

Subcommands: simulate, itc, optimize-switch, optimize-bias, lie-dim,
identify, reproduce.  Traces go out as CSV, structured results as JSON
with the resolved configuration and seed embedded.  Exit codes: 0 success,
1 validation error, 2 runtime failure (including a failed reproduce).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import control, dynamics, ident, itc, lie, network, scenarios


class CliValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit on usage errors."""

    def error(self, message):
        raise CliValidationError(message)


def _int_pair(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def _float_pair(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def _add_network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topology", choices=["chain", "ring"], required=True)
    p.add_argument("--n", type=int, required=True, help="number of spins")
    p.add_argument("--j", type=float, default=1.0, help="coupling strength")
    p.add_argument("--eps", type=float, default=0.0, help="anisotropy (0=XX, 1=Heisenberg)")


def _add_pair_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--from", dest="from_node", type=int, required=True, help="source node")
    p.add_argument("--to", dest="to_node", type=int, required=True, help="target node")


def build_parser() -> tuple[_Parser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="spinctl", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    sp: dict[str, argparse.ArgumentParser] = {}

    p = sp["simulate"] = subs.add_parser("simulate", help="uncontrolled probability trace")
    _add_network_args(p)
    _add_pair_args(p)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--output", default=None, help="CSV path (default stdout)")
    p.add_argument("--precision", type=int, default=17, help="CSV float digits")
    p.add_argument("--config", default=None, help="JSON file with flag values")

    p = sp["itc"] = subs.add_parser("itc", help="capacity bound and attainability report")
    _add_network_args(p)
    _add_pair_args(p)
    p.add_argument("--horizon", type=float, default=None, help="scan horizon (default 100/J)")
    p.add_argument("--samples", type=int, default=itc.DEFAULT_SCAN_SAMPLES)
    p.add_argument("--zero-tol", type=float, default=itc.DEFAULT_ZERO_TOL)
    p.add_argument("--rational-tol", type=float, default=itc.DEFAULT_RATIONAL_TOL)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)

    p = sp["optimize-switch"] = subs.add_parser("optimize-switch", help="bang-bang schedule search")
    _add_network_args(p)
    _add_pair_args(p)
    p.add_argument("--segments", type=int, default=control.DEFAULT_SEGMENTS)
    p.add_argument("--delta", type=float, default=None, help="detuning strength (default 2J)")
    p.add_argument("--t-total", type=float, default=None, help="fix the total schedule time")
    p.add_argument("--restarts", type=int, default=control.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trace-csv", default=None, help="write the controlled p(t) trace here")
    p.add_argument("--trace-points", type=int, default=2000)
    p.add_argument("--precision", type=int, default=17)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)

    p = sp["optimize-bias"] = subs.add_parser("optimize-bias", help="static bias search")
    _add_network_args(p)
    _add_pair_args(p)
    p.add_argument("--t", type=float, default=None, help="fixed readout time")
    p.add_argument("--t-range", type=_float_pair, default=None, metavar="LO:HI")
    p.add_argument("--t-grid", type=int, default=control.T_GRID_POINTS)
    p.add_argument("--restarts", type=int, default=control.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trace-csv", default=None)
    p.add_argument("--trace-points", type=int, default=2000)
    p.add_argument("--precision", type=int, default=17)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)

    p = sp["lie-dim"] = subs.add_parser("lie-dim", help="dynamical Lie algebra dimension")
    _add_network_args(p)
    p.add_argument("--site", type=int, default=1, help="detuned control site")
    p.add_argument("--rank-tol", type=float, default=lie.DEFAULT_RANK_TOL)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)

    p = sp["identify"] = subs.add_parser("identify", help="ring size and coupling estimation")
    p.add_argument("--n-true", type=int, required=True)
    p.add_argument("--j-true", type=float, required=True)
    p.add_argument("--domain", type=_int_pair, required=True, metavar="NMIN:NMAX")
    p.add_argument("--j-range", type=_float_pair, required=True, metavar="JMIN:JMAX")
    p.add_argument("--k", type=int, default=50, help="coupling samples per ring size")
    p.add_argument("--m", type=int, default=10, help="new measurement times per iteration")
    p.add_argument("--r", type=int, default=10, help="repetitions per time")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--horizon", type=float, default=None,
                   help="measurement horizon (default 4*pi*NMAX/JMIN)")
    p.add_argument("--noiseless", action="store_true", help="round(R*theta) oracle device")
    p.add_argument("--early-stop", type=float, default=None, metavar="NATS",
                   help="stop once max minus median log-likelihood exceeds NATS")
    p.add_argument("--records-csv", default=None, help="write the measurement dataset here")
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)

    p = sp["reproduce"] = subs.add_parser("reproduce", help="run a named verification scenario")
    p.add_argument("claim", choices=sorted(scenarios.SCENARIOS) + ["all"])
    p.add_argument("--output", default=None)

    return parser, sp


def _extract_config_path(argv: Sequence[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _load_config_defaults(sub: argparse.ArgumentParser, path: str) -> None:
    """Install config-file values as subcommand defaults.

    Explicit flags still win; keys present in the file satisfy required
    flags; unknown keys are rejected.
    """
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise CliValidationError(f"config file {path} must hold a JSON object")
    actions = {a.dest: a for a in sub._actions}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise CliValidationError(f"unknown config key {key!r}")
        if dest in ("t_range", "j_range"):
            value = tuple(float(v) for v in value) if isinstance(value, list) else _float_pair(value)
        elif dest == "domain":
            value = tuple(int(v) for v in value) if isinstance(value, list) else _int_pair(value)
        sub.set_defaults(**{dest: value})
        actions[dest].required = False


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(times, probs, path: str | None, precision: int) -> None:
    if path:
        with open(path, "w") as fh:
            dynamics.write_trace_csv(times, probs, fh, precision)
    else:
        dynamics.write_trace_csv(times, probs, sys.stdout, precision)


def _resolved(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("command", "config", "output")}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()}


def _cmd_simulate(args) -> int:
    spec = network.build_network(args.topology, args.n, args.j, args.eps)
    spectrum = dynamics.spectral_decompose(network.effective_hamiltonian(spec))
    times = np.arange(0.0, args.t_max + args.dt / 2, args.dt)
    probs = dynamics.probability_trace(spectrum, args.from_node, args.to_node, times)
    _write_csv(times, probs, args.output, args.precision)
    return 0


def _cmd_itc(args) -> int:
    spec = network.build_network(args.topology, args.n, args.j, args.eps)
    spectrum = dynamics.spectral_decompose(network.effective_hamiltonian(spec))
    horizon = args.horizon if args.horizon is not None else 100.0 / args.j
    report = itc.attainability_report(
        spectrum, args.from_node, args.to_node, horizon,
        rational_tol=args.rational_tol, zero_tol=args.zero_tol, samples=args.samples,
    )
    cfg = _resolved(args)
    cfg["horizon"] = horizon
    _emit({"command": "itc", "config": cfg, "result": report.to_dict()}, args.output)
    return 0


def _cmd_optimize_switch(args) -> int:
    spec = network.build_network(args.topology, args.n, args.j, args.eps)
    h0 = network.effective_hamiltonian(spec)
    result = control.optimize_switching(
        h0, args.from_node, args.to_node, segments=args.segments,
        t_total=args.t_total, restarts=args.restarts, seed=args.seed, delta=args.delta,
    )
    if args.trace_csv:
        schedule = control.SwitchSchedule(
            np.array(result.params["durations"]), result.params["delta"],
            result.params["control_site"], result.params["start_on"],
        )
        times = np.linspace(0.0, max(schedule.total_time, 1e-9), args.trace_points)
        probs = control.switched_trace(h0, schedule, args.from_node, args.to_node, times)
        _write_csv(times, probs, args.trace_csv, args.precision)
    _emit({"command": "optimize-switch", "config": _resolved(args), "result": result.to_dict()},
          args.output)
    return 0


def _cmd_optimize_bias(args) -> int:
    if (args.t is None) == (args.t_range is None):
        raise CliValidationError("give exactly one of --t and --t-range")
    spec = network.build_network(args.topology, args.n, args.j, args.eps)
    h0 = network.effective_hamiltonian(spec)
    result = control.optimize_bias(
        h0, args.from_node, args.to_node, t=args.t, t_range=args.t_range,
        restarts=args.restarts, seed=args.seed, t_grid=args.t_grid,
    )
    if args.trace_csv:
        biased = h0.matrix + np.diag(result.params["biases"])
        spectrum = dynamics.spectral_decompose(biased)
        t_end = result.params["target_time"]
        times = np.linspace(0.0, t_end, args.trace_points)
        probs = dynamics.probability_trace(spectrum, args.from_node, args.to_node, times)
        _write_csv(times, probs, args.trace_csv, args.precision)
    _emit({"command": "optimize-bias", "config": _resolved(args), "result": result.to_dict()},
          args.output)
    return 0


def _cmd_lie_dim(args) -> int:
    spec = network.build_network(args.topology, args.n, args.j, args.eps)
    report = lie.lie_dimension_report(spec, control_site=args.site, rank_tol=args.rank_tol)
    _emit({"command": "lie-dim", "config": _resolved(args), "result": report}, args.output)
    return 0


def _cmd_identify(args) -> int:
    n_min, n_max = args.domain
    j_min, j_max = args.j_range
    horizon = args.horizon if args.horizon is not None else ident.default_horizon(n_max, j_min)
    if args.noiseless:
        experiment = ident.NoiselessRingExperiment(args.n_true, args.j_true, horizon)
    else:
        experiment = ident.simulate_experiment(args.n_true, args.j_true, horizon, args.seed)
    config = ident.IdentifyConfig(
        n_min=n_min, n_max=n_max, j_min=j_min, j_max=j_max,
        k_samples=args.k, times_per_iteration=args.m, repetitions=args.r,
        iterations=args.iterations, seed=args.seed, early_stop_nats=args.early_stop,
    )
    result = ident.identify(experiment, config)
    if args.records_csv:
        with open(args.records_csv, "w") as fh:
            ident.write_records_csv(result.records, fh)
    cfg = _resolved(args)
    cfg["horizon"] = horizon
    _emit({"command": "identify", "config": cfg, "result": result.to_dict()}, args.output)
    return 0


def _cmd_reproduce(args) -> int:
    claims = sorted(scenarios.SCENARIOS) if args.claim == "all" else [args.claim]
    results = [scenarios.run_scenario(c) for c in claims]
    payload = results[0] if len(results) == 1 else {"claims": results}
    _emit(payload, args.output)
    return 0 if all(r["passed"] for r in results) else 2


_HANDLERS = {
    "simulate": _cmd_simulate,
    "itc": _cmd_itc,
    "optimize-switch": _cmd_optimize_switch,
    "optimize-bias": _cmd_optimize_bias,
    "lie-dim": _cmd_lie_dim,
    "identify": _cmd_identify,
    "reproduce": _cmd_reproduce,
}


def run_cli(argv: Sequence[str]) -> int:
    parser, subparsers = build_parser()
    try:
        config_path = _extract_config_path(argv)
        if config_path is not None and argv and argv[0] in subparsers:
            _load_config_defaults(subparsers[argv[0]], config_path)
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except CliValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:  # includes the validation-flavored SpinctlErrors
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures (solver, I/O, overflow)
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()

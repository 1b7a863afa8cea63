"""Command line entry point: ``offloadgame <command> ...``.

Results go to stdout as JSON; failures exit nonzero with a JSON error
object on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, fields, replace
from pathlib import Path

from . import benchmark, game, homogeneous, io, mechanism
from .experiments import (DEFAULT_GRIDS, EXPERIMENTS, GeneratorSpec, experiment_convergence,
                          experiment_scaling, experiment_sweep_B, experiment_sweep_D,
                          generate_scenario)
from .model import system_cost, user_overheads


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        sys.exit(2)


def _add_generator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with generator fields")
    for f in fields(GeneratorSpec):
        if f.name == "seed":
            continue
        flag = "--" + f.name.replace("_", "-")
        if f.name == "local_freq_choices":
            p.add_argument(flag, type=float, nargs="+", default=None)
        else:
            p.add_argument(flag, type=int if f.name == "n_users" else float, default=None)


def _generator_spec(args) -> GeneratorSpec:
    spec = GeneratorSpec.from_json(args.config) if args.config else GeneratorSpec()
    overrides = {f.name: getattr(args, f.name) for f in fields(GeneratorSpec)
                 if f.name != "seed" and getattr(args, f.name, None) is not None}
    return replace(spec, seed=args.seed, **overrides)


def _add_mechanism_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quiet-slots", type=int, default=1)
    p.add_argument("--contention-mode", choices=mechanism.CONTENTION_MODES,
                   default="uniform-backoff")
    p.add_argument("--max-slots", type=int, default=100_000)


def _profile(text: str, n: int) -> tuple[int, ...]:
    if len(text) != n or set(text) - {"0", "1"}:
        raise CliError(f"profile must be a {n}-character 0/1 string, got {text!r}")
    return tuple(int(c) for c in text)


def _bits(p) -> str:
    return "".join(map(str, p))


def cmd_gen(args):
    s = generate_scenario(_generator_spec(args))
    if args.output:
        io.save_scenario(s, args.output)
        return {"written": str(args.output), "n_users": s.n_users}
    return io.scenario_to_dict(s)


def cmd_run(args):
    s = io.load_scenario(args.scenario)
    cfg = mechanism.MechanismConfig(quiet_slots=args.quiet_slots,
                                    contention_mode=args.contention_mode,
                                    seed=args.seed, max_slots=args.max_slots)
    trace = mechanism.run_mechanism(s, cfg)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            mechanism.write_trace(trace, fh)
    return {
        "converged": trace.converged,
        "final_profile": _bits(trace.final_profile),
        "updates": trace.updates,
        "slots": len(trace.slots),
        "system_cost": system_cost(s, trace.final_profile),
        "messages": mechanism.message_ledger(trace),
    }


def cmd_nash_check(args):
    s = io.load_scenario(args.scenario)
    a = _profile(args.profile, s.n_users)
    return {
        "profile": args.profile,
        "is_nash": game.is_nash(s, a),
        "improvers": game.improvers(s, a),
        "overheads": list(user_overheads(s, a)),
        "potential": game.potential(s, a),
    }


def cmd_homogeneous(args):
    s = io.load_scenario(args.scenario)
    v = homogeneous.homogeneous_view(s)
    a = homogeneous.homogeneous_equilibrium(s)
    group = [n for n in range(s.n_users) if a[n]]
    return {"K": v.K, "order": list(v.order), "ratios": list(v.ratios),
            "group": group, "profile": _bits(a)}


def cmd_optimum(args):
    s = io.load_scenario(args.scenario)
    p, cost = benchmark.centralized_optimum(s, cap=args.cap, method=args.method)
    return {"profile": _bits(p), "cost": cost}


def cmd_poa(args):
    s = io.load_scenario(args.scenario)
    r = benchmark.equilibrium_report(s)
    out = asdict(r)
    for k, v in out.items():
        if k.endswith("_profile"):
            out[k] = _bits(v)
    return out


def cmd_experiment(args):
    spec = _generator_spec(args)
    name = args.name
    grid = args.grid or DEFAULT_GRIDS.get(name)
    if name == "convergence":
        r = experiment_convergence(spec, args.seed, args.quiet_slots)
    elif name == "sweep-d":
        r = experiment_sweep_D(spec, grid, args.trials, args.seed, args.quiet_slots)
    elif name == "sweep-b":
        r = experiment_sweep_B(spec, grid, args.trials, args.seed, args.quiet_slots)
    else:
        r = experiment_scaling(spec, [int(n) for n in grid], args.trials, args.seed,
                               args.quiet_slots, with_optimum=not args.no_optimum)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result_path = out / f"{r.experiment}_{r.seed}.json"
    io.save_result(r, result_path)
    paths = io.emit(r, out, args.format)
    return {"result": str(result_path), "files": [str(p) for p in paths]}


def cmd_emit(args):
    r = io.load_result(args.result)
    paths = io.emit(r, args.out, args.format)
    return {"files": [str(p) for p in paths]}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="offloadgame")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random scenario")
    p.add_argument("--seed", type=int, required=True)
    _add_generator_flags(p)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run the decentralized mechanism")
    p.add_argument("scenario", type=Path)
    p.add_argument("--seed", type=int, required=True)
    _add_mechanism_flags(p)
    p.add_argument("--trace", type=Path, help="write per-slot JSON lines here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("nash-check", help="check whether a profile is a Nash equilibrium")
    p.add_argument("scenario", type=Path)
    p.add_argument("--profile", required=True, help="0/1 string, one char per user")
    p.set_defaults(func=cmd_nash_check)

    p = sub.add_parser("homogeneous", help="analytic equilibrium for equal P*H")
    p.add_argument("scenario", type=Path)
    p.set_defaults(func=cmd_homogeneous)

    p = sub.add_parser("optimum", help="centralized minimum system cost")
    p.add_argument("scenario", type=Path)
    p.add_argument("--method", choices=["auto", "exhaustive", "branch-and-bound"],
                   default="auto")
    p.add_argument("--cap", type=int, default=benchmark.EXHAUSTIVE_CAP)
    p.set_defaults(func=cmd_optimum)

    p = sub.add_parser("poa", help="equilibria, optimum, price of anarchy and its bound")
    p.add_argument("scenario", type=Path)
    p.set_defaults(func=cmd_poa)

    p = sub.add_parser("experiment", help="run a figure experiment and write CSV")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--grid", type=float, nargs="+")
    p.add_argument("--quiet-slots", type=int, default=1)
    p.add_argument("--no-optimum", action="store_true",
                   help="scaling: skip the centralized optimum")
    p.add_argument("--out", default="results")
    p.add_argument("--format", nargs="+", choices=["csv", "svg"], default=["csv"])
    _add_generator_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("emit", help="re-export a saved experiment result")
    p.add_argument("result", type=Path)
    p.add_argument("--out", default="results")
    p.add_argument("--format", nargs="+", choices=["csv", "svg"], default=["csv"])
    p.set_defaults(func=cmd_emit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (CliError, ValueError, OSError, KeyError, RuntimeError,
            json.JSONDecodeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 1
    print(json.dumps(result, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())

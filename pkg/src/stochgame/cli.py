"""Command-line front end: ``sg <command> ...``, one JSON report per run."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import generators, io
from .certification import check_bellman_ne, deviation_gap, nonstationary_certify
from .errors import BudgetExceeded, GameError, InvalidCircuit, InvalidGame
from .evaluation import bellman_errors, evaluate
from .game import NonStationaryStrategy, classify_game, validate_game
from .reductions import (
    GadgetParams,
    average_to_discounted,
    discounted_to_absorbing,
    gcircuit_build,
    hamiltonian_game_build,
    separation_delta,
    simsg_to_ossg,
)
from .solvers import (
    backward_induction,
    brouwer_fixed_point_solve,
    brute_force_value_net,
    cycle_ne_graph,
    pure_ne_enumerate,
    strategy_iteration_locreward,
)

METHODS = ("bi", "lp-net", "strategy-iter", "cycle", "brouwer-value", "brouwer-bellman", "enumerate")
GENERATORS = {
    "simsg": generators.random_simsg,
    "tbsg": generators.random_tbsg,
    "ossg": generators.random_ossg,
    "otbsg": generators.random_otbsg,
    "locreward": generators.random_locreward,
    "graph": generators.random_graph_game,
    "unichain": generators.random_unichain,
}


class UsageError(Exception):
    """Bad flags or unreadable input; exit code 2."""


# -- argument parsing ------------------------------------------------------


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a positive finite number: {text!r}")
    return x


def _unit(text: str) -> float:
    x = _positive(text)
    if x > 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1]: {text!r}")
    return x


def _positive_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return k


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sg", description="Stochastic-game equilibria, certificates and reductions.")
    p.add_argument("--out", help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name: str, help: str) -> argparse.ArgumentParser:
        c = sub.add_parser(name, help=help)
        c.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")
        return c

    c = cmd("validate", "check a game file")
    c.add_argument("game")

    c = cmd("classify", "report subclass flags of a game")
    c.add_argument("game")

    c = cmd("eval", "values and Bellman errors of a strategy")
    c.add_argument("game")
    c.add_argument("--strategy", required=True)
    c.add_argument("--q", choices=("uniform", "own"), default="uniform")

    c = cmd("solve", "compute an (approximate) equilibrium")
    c.add_argument("game")
    c.add_argument("--method", choices=METHODS, required=True)
    c.add_argument("--eps", type=_positive, default=0.1)
    c.add_argument("--budget", type=_positive_int, default=None)
    c.add_argument("--eta", type=_unit, default=0.5)
    c.add_argument("--max-iters", type=_positive_int, default=100_000)
    c.add_argument("--sign", choices=("NonNegative", "NonPositive"), default=None)
    c.add_argument("--q", choices=("uniform", "own"), default=None)

    c = cmd("certify", "check a strategy against an NE criterion")
    c.add_argument("game")
    c.add_argument("strategy")
    c.add_argument("--eps", type=_positive, required=True)
    c.add_argument("--mode", choices=("deviation", "exact", "necessary", "sufficient"), default="deviation")
    c.add_argument("--q", choices=("uniform", "own"), default="uniform")

    c = cmd("reduce", "transform a game")
    c.add_argument("game")
    c.add_argument("--to", choices=("ossg", "absorbing", "discounted"), required=True)
    c.add_argument("--gamma-prime", type=_unit, default=1.0)
    c.add_argument("--tmix", type=_positive, default=None)
    c.add_argument("--eps", type=_positive, default=0.1)

    c = cmd("gadget", "compile a generalized circuit into a game")
    c.add_argument("--circuit", required=True)
    c.add_argument("--gamma", type=_positive, required=True)
    c.add_argument("--eps", type=_positive, required=True)

    c = cmd("ham", "build the Hamiltonian-cycle game of a directed graph")
    c.add_argument("--graph", required=True)
    c.add_argument("--gamma", type=_positive, default=0.5)

    c = cmd("generate", "emit a seeded random game")
    c.add_argument("--kind", choices=sorted(GENERATORS), required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--players", type=_positive_int, default=None)
    c.add_argument("--gamma", type=_unit, default=0.5)
    return p


def parse_inputs(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse and validate flags; raises UsageError on any problem."""
    args = build_parser().parse_args(argv)
    if getattr(args, "gamma", None) is not None and args.command in ("gadget", "ham") and args.gamma >= 1:
        raise UsageError("--gamma must lie in (0, 1)")
    if args.command == "gadget" and args.eps >= 1:
        raise UsageError("--eps must lie in (0, 1)")
    return args


# -- helpers ---------------------------------------------------------------


def _read(path: str) -> Any:
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    try:
        return io.load_json(path)
    except ValueError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc


def _game(path: str):
    doc = _read(path)
    if isinstance(doc, dict) and "game" in doc and "players" not in doc:
        doc = doc["game"]
    try:
        return io.game_from_dict(doc)
    except GameError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _strategy(spec, path: str):
    doc = _read(path)
    if isinstance(doc, dict) and "strategy" in doc and "policies" not in doc:
        doc = doc["strategy"]
    try:
        return io.strategy_from_dict(spec, doc)
    except GameError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def _report(**fields) -> dict:
    return _jsonable({"schema_version": io.SCHEMA_VERSION, **fields})


def _strategy_doc(spec, strategy) -> dict | None:
    if strategy is None:
        return None
    if isinstance(strategy, NonStationaryStrategy):
        return {
            "schema_version": io.SCHEMA_VERSION,
            "horizon": strategy.horizon,
            "steps": [io.strategy_to_dict(spec, s)["policies"] for s in strategy.steps],
            "tail": io.strategy_to_dict(spec, strategy.tail)["policies"],
        }
    return io.strategy_to_dict(spec, strategy)


# -- commands --------------------------------------------------------------


def _cmd_validate(args) -> tuple[int, dict]:
    spec = _game(args.game)
    rep = validate_game(spec)
    return (0 if rep.ok else 1), _report(command="validate", ok=rep.ok, violations=list(rep.violations))


def _cmd_classify(args) -> tuple[int, dict]:
    spec = _game(args.game)
    return 0, _report(command="classify", **asdict(classify_game(spec)))


def _cmd_eval(args) -> tuple[int, dict]:
    spec = _game(args.game)
    pi = _strategy(spec, args.strategy)
    prof = evaluate(spec, pi, args.q)
    out = {"command": "eval", "mode": spec.discount.mode, "values": prof.rows(spec), "utilities": {
        spec.player_names[i]: float(u) for i, u in enumerate(prof.u)
    }}
    if spec.discount.mode == "discounted":
        rep = bellman_errors(spec, pi, prof)
        out["bellman"] = rep.rows(spec)
        out["max_upsilon"] = float(rep.max_upsilon)
    return 0, _report(**out)


def _cmd_solve(args) -> tuple[int, dict]:
    spec = _game(args.game)
    m = args.method
    budget = {} if args.budget is None else {"budget": args.budget}
    if m == "bi":
        res = backward_induction(spec, args.eps)
    elif m == "lp-net":
        res = brute_force_value_net(spec, args.eps, **budget)
    elif m == "strategy-iter":
        res = strategy_iteration_locreward(spec, args.eps)
    elif m == "cycle":
        sign = args.sign or classify_game(spec).reward_sign
        if sign not in ("NonNegative", "NonPositive"):
            raise UsageError("cycle method needs fixed-sign rewards (or pass --sign)")
        res = cycle_ne_graph(spec, sign)
    elif m in ("brouwer-value", "brouwer-bellman"):
        res = brouwer_fixed_point_solve(
            spec, m.split("-")[1], eta=args.eta, max_iters=args.max_iters, epsilon=args.eps
        )
    else:
        hits = pure_ne_enumerate(spec, args.eps, q=args.q, **budget)
        status = "ok" if hits else "Infeasible"
        return (0 if hits else 1), _report(
            command="solve",
            method=m,
            status=status,
            count=len(hits),
            equilibria=[{"strategy": io.strategy_to_dict(spec, pi), "certificate": c.to_dict(spec)} for pi, c in hits],
        )
    if res.strategy is None:
        status = "Infeasible"
    elif res.ok:
        status = "ok"
    elif m.startswith("brouwer") and not res.diagnostics.get("converged", True):
        status = "NoConvergence"
    else:
        status = "NotCertified"
    return (0 if status == "ok" else 1), _report(
        command="solve",
        method=res.method,
        status=status,
        iterations=res.iterations,
        strategy=_strategy_doc(spec, res.strategy),
        certificate=None if res.certificate is None else res.certificate.to_dict(spec),
        diagnostics=res.diagnostics,
    )


def _cmd_certify(args) -> tuple[int, dict]:
    spec = _game(args.game)
    doc = _read(args.strategy)
    if isinstance(doc, dict) and "steps" in doc:
        steps = tuple(io.strategy_from_dict(spec, {"policies": s}) for s in doc["steps"])
        ns = NonStationaryStrategy(steps, io.strategy_from_dict(spec, {"policies": doc["tail"]}))
        cert = nonstationary_certify(spec, ns, args.eps)
    else:
        pi = _strategy(spec, args.strategy)
        if args.mode == "deviation":
            cert = deviation_gap(spec, pi, q=args.q, epsilon=args.eps)
        else:
            cert = check_bellman_ne(spec, pi, args.eps, args.mode)
    return (0 if cert.verdict else 1), _report(command="certify", certificate=cert.to_dict(spec))


def _cmd_reduce(args) -> tuple[int, dict]:
    spec = _game(args.game)
    if args.to == "ossg":
        out, cmap = simsg_to_ossg(spec)
        extra = {"copy_players": {str(k + 1): {"player": spec.player_names[i], "state": spec.states[s]}
                                  for k, (i, s) in cmap.from_copy.items()}}
    elif args.to == "absorbing":
        out, smap = discounted_to_absorbing(spec, args.gamma_prime)
        extra = {"sink": smap["sink"]}
    else:
        if args.tmix is None:
            raise UsageError("--to discounted needs --tmix")
        out, advice = average_to_discounted(spec, args.tmix, args.eps)
        extra = {"gamma": advice.gamma, "required_epsilon": advice.required_epsilon, "advice": advice.text()}
    return 0, _report(command="reduce", to=args.to, game=io.game_to_dict(out), **extra)


def _cmd_gadget(args) -> tuple[int, dict]:
    try:
        circuit = io.circuit_from_dict(_read(args.circuit))
        params = GadgetParams(args.gamma, args.eps)
        spec, gmap = gcircuit_build(circuit, params)
    except InvalidCircuit as exc:
        raise UsageError(f"{args.circuit}: {exc}") from exc
    return 0, _report(
        command="gadget",
        L=params.L,
        delta=params.delta,
        delta_gt=params.delta_gt,
        nodes={v: {"state": spec.states[s], "player": spec.player_names[s], "a1": "a1"} for v, s in gmap.node_state.items()},
        game=io.game_to_dict(spec),
    )


def _cmd_ham(args) -> tuple[int, dict]:
    try:
        graph = io.graph_from_dict(_read(args.graph))
        spec, hmap = hamiltonian_game_build(graph, args.gamma)
    except GameError as exc:
        raise UsageError(f"{args.graph}: {exc}") from exc
    L = len(graph.vertices)
    return 0, _report(
        command="ham",
        L=L,
        delta=separation_delta(L, args.gamma),
        long={v: spec.states[s] for v, s in hmap.long.items()},
        short={v: spec.states[s] for v, s in hmap.short.items()},
        game=io.game_to_dict(spec),
    )


def _cmd_generate(args) -> tuple[int, dict]:
    fn = GENERATORS[args.kind]
    kwargs = {} if args.kind == "unichain" else {"gamma": args.gamma}
    if args.players is not None:
        kwargs["n"] = args.players
    spec = fn(args.seed, **kwargs)
    return 0, _report(command="generate", kind=args.kind, seed=args.seed, game=io.game_to_dict(spec))


COMMANDS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "eval": _cmd_eval,
    "solve": _cmd_solve,
    "certify": _cmd_certify,
    "reduce": _cmd_reduce,
    "gadget": _cmd_gadget,
    "ham": _cmd_ham,
    "generate": _cmd_generate,
}


def run_command(args: argparse.Namespace) -> tuple[int, dict]:
    """Execute a parsed command and return (exit code, report)."""
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        return 1, _report(command=args.command, status="BudgetExceeded", required=exc.required, budget=exc.budget)
    except UsageError:
        raise
    except (InvalidGame, InvalidCircuit) as exc:
        raise UsageError(str(exc)) from exc
    except GameError as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}") from exc


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_inputs(argv)
        code, report = run_command(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    text = io.dumps(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

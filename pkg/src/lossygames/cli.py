"""Command-line front end.

Exit codes: 0 = yes/success, 1 = no, 2 = error. Each invocation emits one
machine-readable JSON report on stdout (or --out); DOT side files go to
--dot-dir on request.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import arena as arena_mod
from . import conjunction as conj_mod
from . import core as core_mod
from . import modelio, regset, sim, strategy, zerosum
from .arena import LossModel, coalition_arena
from .conjunction import FragmentError, solve_conjunction
from .modelio import ParseError


def _word(text: str) -> tuple[str, ...]:
    return tuple(text.split())


def _emit(report: dict, out):
    payload = json.dumps(report, indent=2, default=str)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _dot(dot_dir, name, text):
    if dot_dir:
        os.makedirs(dot_dir, exist_ok=True)
        with open(os.path.join(dot_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)


def _region_summary(region) -> dict:
    return {"objective": region.objective,
            "winning_sample": [" ".join(w) for w in region.winning.enumerate(2)[:12]],
            "digest": region.winning.digest()[:16]}


def _branch_summary(rep) -> dict:
    return {"conjuncts": [o.describe() for o in rep.conjuncts],
            "dead": rep.dead_reason,
            "initial_wins": rep.initial_wins}


def _core_report(v: core_mod.CoreVerdict) -> dict:
    return {
        "problem": v.problem,
        "answer": "yes" if v.answer else "no",
        "witness_winners": list(v.witness) if v.witness else None,
        "note": v.note,
        "step2": {"+".join(w) or "(none)":
                  {"passed": r.passed, "seconds": round(r.seconds, 3),
                   "branches": [_branch_summary(b) for b in r.branches]}
                  for w, r in v.step2.items()},
        "step3": {"+".join(w) or "(none)":
                  {"no_deviation": r.no_deviation,
                   "coalitions": [{"coalition": list(c.coalition),
                                   "deviates": c.deviates,
                                   "seconds": round(c.seconds, 3),
                                   "branches": [_branch_summary(b)
                                                for b in c.branches]}
                                  for c in r.coalitions]}
                  for w, r in v.step3.items()},
        "seconds": round(v.seconds, 3),
    }


def _player_board(bundle, player_name):
    if player_name not in bundle.arena.agents:
        raise ParseError(f"unknown player {player_name!r}; "
                         f"agents: {list(bundle.arena.agents)}")
    return coalition_arena(bundle.arena, [player_name])


def cmd_solve(args) -> int:
    bundle = modelio.load_model(args.model)
    board = _player_board(bundle, args.player)
    conj = modelio.parse_conjunction(args.objective, bundle.arena.alphabet)
    t0 = time.monotonic()
    region = solve_conjunction(board, 1, conj)
    verdict = region.winning.contains(board.initial_state())
    report = {"command": "solve", "player": args.player,
              "objective": conj.describe(),
              "answer": "yes" if verdict else "no",
              "region": _region_summary(region),
              "seconds": round(time.monotonic() - t0, 3)}
    _emit(report, args.out)
    _dot(args.dot_dir, "region.dot", regset.to_dot(region.winning, "region"))
    return 0 if verdict else 1


def cmd_synthesize(args) -> int:
    bundle = modelio.load_model(args.model)
    board = _player_board(bundle, args.player)
    conj = modelio.parse_conjunction(args.objective, bundle.arena.alphabet)
    if len(conj.items) != 1:
        raise FragmentError("synthesize takes a single objective")
    (obj,) = conj.items
    if obj.quant == "NZ" and obj.path == "F":
        region = zerosum.nz_reach(board, 1, obj.region)
        strat = strategy.synth_nz_reach(region)
    elif obj.quant == "AS" and obj.path == "F":
        region = zerosum.as_reach(board, 1, obj.region)
        if region.winning.contains(board.initial_state()):
            strat = strategy.synth_as_reach(region)
        else:
            strat = strategy.synth_spoiler(region)
    else:
        raise FragmentError(
            "synthesize supports NZ(eventually) and AS(eventually) objectives")
    verdict = region.winning.contains(board.initial_state())
    report = {"command": "synthesize", "player": args.player,
              "objective": conj.describe(),
              "answer": "yes" if verdict else "no",
              "strategy": strategy.strategy_summary(strat),
              "strategy_for": args.player if verdict else "(opponent spoiler)"}
    _emit(report, args.out)
    _dot(args.dot_dir, "strategy.dot", strategy.strategy_to_dot(strat))
    return 0 if verdict else 1


def _gamma_spec(bundle, text):
    if text in bundle.props:
        return bundle.props[text]
    return modelio.parse_property(text, bundle.arena.alphabet, bundle.spec)


def cmd_e_core(args) -> int:
    bundle = modelio.load_model(args.model)
    v = core_mod.e_core(bundle.spec, _gamma_spec(bundle, args.gamma))
    _emit({"command": "e-core", "gamma": args.gamma, **_core_report(v)}, args.out)
    return 0 if v.answer else 1


def cmd_a_core(args) -> int:
    bundle = modelio.load_model(args.model)
    v = core_mod.a_core(bundle.spec, _gamma_spec(bundle, args.gamma))
    _emit({"command": "a-core", "gamma": args.gamma, **_core_report(v)}, args.out)
    return 0 if v.answer else 1


def cmd_simulate(args) -> int:
    bundle = modelio.load_model(args.model)
    game = coalition_arena(bundle.arena, list(bundle.arena.agents))
    if args.profile != "uniform":
        raise ParseError("only the built-in 'uniform' profile is available "
                         "from the command line; use the API for synthesized "
                         "profiles")
    profile = [strategy.UniformStrategy(game, 1)]
    cfg = sim.SimConfig(LossModel(Fraction(args.loss_rate)), args.horizon,
                        args.episodes, args.seed)
    objectives = {}
    if args.objective:
        conj = modelio.parse_conjunction(args.objective, bundle.arena.alphabet)
        for i, o in enumerate(conj.items):
            mode = {"F": "eventually", "G": "always", "GF": "repeatedly"}[o.path]
            objectives[f"{i}:{o.describe()}"] = (mode, o.region)
    traces, stats = sim.simulate(game, profile, cfg, objectives,
                                 keep_traces=args.episodes <= 5)
    report = {"command": "simulate", "episodes": args.episodes,
              "horizon": args.horizon, "seed": args.seed,
              "loss_rate": args.loss_rate, "frequencies": stats,
              "traces": [[" ".join(s) for s in t.states] for t in traces]}
    _emit(report, args.out)
    return 0


def cmd_oracle(args) -> int:
    bundle = modelio.load_model(args.model)
    if args.kind == "pre":
        board = _player_board(bundle, args.player)
        conj = modelio.parse_conjunction(args.objective, bundle.arena.alphabet)
        target = conj.items[0].region
        state = _word(args.state)
        ans = sim.oracle_pre(board, 1, target, state)
        _emit({"command": "oracle", "kind": "pre", "state": args.state,
               "answer": "yes" if ans else "no"}, args.out)
        return 0 if ans else 1
    game = coalition_arena(bundle.arena, list(bundle.arena.agents))
    conj = modelio.parse_conjunction(args.objective, bundle.arena.alphabet)
    ans = sim.oracle_small_controller(game, conj, args.memory_bound,
                                      args.channel_bound)
    _emit({"command": "oracle", "kind": "small-controller",
           "memory_bound": args.memory_bound,
           "channel_bound": args.channel_bound,
           "answer": "yes" if ans else "no"}, args.out)
    return 0 if ans else 1


def cmd_export_dot(args) -> int:
    bundle = modelio.load_model(args.model)
    text = arena_mod.arena_to_dot(bundle.arena)
    if args.dot_dir:
        _dot(args.dot_dir, "arena.dot", text)
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lossygames",
        description="Symbolic verifier for concurrent stochastic games over "
                    "a lossy FIFO channel")
    p.add_argument("--model", required=True,
                   help="model file path or bundled name (fig2, fig3)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--dot-dir", help="directory for DOT side files")
    p.add_argument("--jobs", type=int, default=1,
                   help="reserved; solver queries run sequentially")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="winning-region membership for a player")
    sp.add_argument("--player", required=True)
    sp.add_argument("--objective", required=True)
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("synthesize", help="synthesize a winner or spoiler")
    sp.add_argument("--player", required=True)
    sp.add_argument("--objective", required=True)
    sp.set_defaults(fn=cmd_synthesize)

    sp = sub.add_parser("e-core", help="does some core profile satisfy gamma")
    sp.add_argument("--gamma", required=True)
    sp.set_defaults(fn=cmd_e_core)

    sp = sub.add_parser("a-core", help="do all core profiles satisfy gamma")
    sp.add_argument("--gamma", required=True)
    sp.set_defaults(fn=cmd_a_core)

    sp = sub.add_parser("simulate", help="Monte Carlo episodes")
    sp.add_argument("--profile", default="uniform")
    sp.add_argument("--lambda", dest="loss_rate", default="1/10",
                    help="loss probability as a rational, e.g. 1/10")
    sp.add_argument("--horizon", type=int, default=100)
    sp.add_argument("--episodes", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--objective", help="conjunction to score frequencies for")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("oracle", help="brute-force cross-checks")
    sp.add_argument("kind", choices=["pre", "small-controller"])
    sp.add_argument("--player")
    sp.add_argument("--objective", required=True)
    sp.add_argument("--state", help="state word, e.g. 'l1 c c'")
    sp.add_argument("--memory-bound", type=int, default=1)
    sp.add_argument("--channel-bound", type=int, default=1)
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("export-dot", help="DOT rendering of the arena")
    sp.set_defaults(fn=cmd_export_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, FragmentError, regset.RegsetError,
            arena_mod.ArenaError, sim.SimulationError,
            FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

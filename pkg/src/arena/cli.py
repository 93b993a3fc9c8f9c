"""Command line: ``arena run``, ``arena sweep-po`` and ``arena replay``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .agents import KINDS, AgentSpec
from .engine import FULL, ConfigError, GameConfig, Mode
from .evo import MutationStyle
from .features import PRESETS
from .harness import (
    TournamentConfig, capture_winning_seed, emit_outputs, run_po_sweep, run_tournament,
    write_po_sweep,
)
from .replay import ReplayError, read_replay, validate_replay

EXIT_OK, EXIT_CONFIG, EXIT_REPLAY = 0, 2, 3


def _seeds(text: str) -> tuple[int, ...]:
    """``10`` means seeds 0..9; ``3,8,21`` (or ``7,``) is an explicit list."""
    try:
        if "," in text:
            return tuple(int(t) for t in text.split(",") if t.strip())
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("seed count must be >= 1")
    return tuple(range(n))


def _vision(text: str):
    if text.lower() == "full":
        return FULL
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("vision must be 'full' or an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError("vision must be >= 0")
    return v


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("ffa", "team"), default="ffa")
    p.add_argument("--agents", default="femcts,mcts,rhea,osla",
                   help="four comma-separated kinds from: " + ", ".join(KINDS))
    p.add_argument("--seeds", type=_seeds, default=tuple(range(10)),
                   help="a count N (seeds 0..N-1) or a comma-separated list")
    p.add_argument("--games-per-seed", type=int, default=5)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--budget-ms", type=float, default=40.0)
    budget.add_argument("--budget-iters", type=int, default=None,
                        help="fixed iteration cap instead of wall clock (deterministic)")
    p.add_argument("--pop-size", type=int, default=10)
    p.add_argument("--elites", type=int, default=4)
    p.add_argument("--rollouts-per-individual", type=int, default=4)
    p.add_argument("--nea", type=int, choices=(2, 3, 6), default=2)
    p.add_argument("--features", choices=sorted(PRESETS), default="all")
    p.add_argument("--mutation-strength", type=float, default=0.001)
    p.add_argument("--mutation-prob", type=float, default=0.2)
    p.add_argument("--mutation-style", choices=[s.value for s in MutationStyle],
                   default=MutationStyle.SHARED.value)
    p.add_argument("--population-seed-in", metavar="FILE")
    p.add_argument("--population-seed-out", metavar="FILE")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--max-ticks", type=int, default=800)
    p.add_argument("--no-rotation", action="store_true", help="keep every agent in its own corner")
    p.add_argument("--no-replays", action="store_true")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arena", description="Pommerman agent tournaments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play a seeded tournament")
    _add_common(run)
    run.add_argument("--vision", type=_vision, default=FULL)

    sweep = sub.add_parser("sweep-po", help="one tournament per vision range")
    _add_common(sweep)
    sweep.add_argument("--visions", default="0,1,2,3,4")

    rep = sub.add_parser("replay", help="re-simulate and validate a replay file")
    rep.add_argument("file")
    return parser


def config_from_args(args, vision=FULL) -> TournamentConfig:
    kinds = [k.strip().lower() for k in args.agents.split(",")]
    if len(kinds) != 4:
        raise ConfigError(f"--agents needs exactly four kinds, got {len(kinds)}")
    specs = []
    for kind in kinds:
        specs.append(AgentSpec(
            kind=kind,
            budget_ms=args.budget_ms,
            budget_iters=args.budget_iters,
            nea=args.nea,
            features=args.features,
            pop_size=args.pop_size,
            elites=args.elites,
            rollouts_per_individual=args.rollouts_per_individual,
            mutation_strength=args.mutation_strength,
            mutation_prob=args.mutation_prob,
            mutation_style=MutationStyle(args.mutation_style),
            seed_path=args.population_seed_in if kind == "femcts" else None,
        ))
        if kind == "femcts":
            specs[-1].evo_config(len(PRESETS[args.features]))  # validate early
    mode = Mode.TEAM if args.mode == "team" else Mode.FFA
    if args.games_per_seed < 1:
        raise ConfigError("--games-per-seed must be >= 1")
    cfg = TournamentConfig(
        agents=tuple(specs), mode=mode, game_seeds=args.seeds,
        games_per_seed=args.games_per_seed, vision=vision, master_seed=args.master_seed,
        out_dir=args.out, position_rotation=not args.no_rotation,
        board=GameConfig(mode=mode, max_ticks=args.max_ticks),
        write_replays=not args.no_replays,
    )
    cfg.validate()
    if args.population_seed_out and "femcts" not in kinds:
        raise ConfigError("--population-seed-out needs a femcts agent")
    return cfg


def _progress(quiet):
    if quiet:
        return None

    def show(rec):
        print(f"game {rec.index:4d} seed {rec.seed:4d} ticks {rec.ticks:4d} {rec.code}",
              file=sys.stderr, flush=True)
    return show


def cmd_run(args) -> int:
    cfg = config_from_args(args, args.vision)
    result = run_tournament(cfg, _progress(args.quiet))
    emit_outputs(result)
    if args.population_seed_out:
        _, game, streak = capture_winning_seed(result.records, args.population_seed_out)
        print(f"population seed from game {game} (streak {streak}) -> {args.population_seed_out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        visions = [_vision(t) for t in args.visions.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg = config_from_args(args)
    results = run_po_sweep(cfg, visions, _progress(args.quiet))
    for v, res in results.items():
        print(f"-- vision {'full' if v is FULL else v}")
        emit_outputs(res)
    if args.out:
        csv_path, svg_path = write_po_sweep({v: r.table for v, r in results.items()}, args.out)
        print(f"wrote {csv_path} and {svg_path}")
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        rep = read_replay(args.file)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReplayError as exc:
        print(f"replay mismatch: {exc}", file=sys.stderr)
        return EXIT_REPLAY
    check = validate_replay(rep)
    if not check.ok:
        print(f"replay mismatch: {check.message}", file=sys.stderr)
        return EXIT_REPLAY
    print(f"ok: {check.ticks} ticks, outcome {check.outcome}")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": cmd_run, "sweep-po": cmd_sweep, "replay": cmd_replay}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

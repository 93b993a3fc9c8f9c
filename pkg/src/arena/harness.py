"""Tournament runner: seeded game batches, aggregation and output files."""

from __future__ import annotations

import csv
import gc
import logging
import os
import time
from dataclasses import dataclass, field, replace
from xml.sax.saxutils import escape

import numpy as np

from .agents import AgentSpec, FEMCTSAgent, make_agent
from .engine import FULL, ConfigError, GameConfig, Mode, generate_board, observe, outcome, step
from .evo import save_seed
from .replay import Replay, write_replay
from .rng import make_rng

log = logging.getLogger(__name__)

_LETTER = {1: "W", 0: "T", -1: "L"}


@dataclass(frozen=True)
class TournamentConfig:
    agents: tuple[AgentSpec, ...]
    mode: Mode = Mode.FFA
    game_seeds: tuple[int, ...] = tuple(range(10))
    games_per_seed: int = 5
    vision: int | None = FULL
    master_seed: int = 0
    out_dir: str | None = None
    position_rotation: bool = True
    board: GameConfig = field(default_factory=GameConfig)
    write_replays: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "game_seeds", tuple(int(s) for s in self.game_seeds))
        if self.board.mode != self.mode:
            object.__setattr__(self, "board", replace(self.board, mode=self.mode))

    def validate(self) -> None:
        if len(self.agents) != 4:
            raise ConfigError(f"need exactly 4 agent specs, got {len(self.agents)}")
        if self.games_per_seed < 1:
            raise ConfigError("games_per_seed must be >= 1")
        if not self.game_seeds:
            raise ConfigError("at least one game seed is required")
        if self.vision is not FULL and not 0 <= self.vision <= self.board.size:
            raise ConfigError(f"vision must be 'full' or 0..{self.board.size}")
        self.board.validate()

    @property
    def n_games(self) -> int:
        return len(self.game_seeds) * self.games_per_seed


def player_names(specs) -> list[str]:
    """Kind names, suffixed with the slot when a kind appears more than once."""
    kinds = [s.kind for s in specs]
    return [k if kinds.count(k) == 1 else f"{k}-{i}" for i, k in enumerate(kinds)]


def team_names(specs) -> list[str]:
    a = "+".join(sorted({specs[0].kind, specs[2].kind}))
    b = "+".join(sorted({specs[1].kind, specs[3].kind}))
    if a == b:
        a, b = a + "-A", b + "-B"
    return [a, b]


@dataclass
class GameRecord:
    index: int
    seed: int
    repeat: int
    seating: tuple[int, ...]  # seating[slot] = index of the spec playing that slot
    results: tuple[int, ...]  # per spec: 1 win, 0 tie, -1 loss
    ticks: int
    decision_ms: list[list[float]]  # per spec
    replay: str | None = None
    femcts_best: dict = field(default_factory=dict)  # spec index -> (weights, fitness)

    @property
    def code(self) -> str:
        return "".join(_LETTER[r] for r in self.results)


def seating_for(repeat: int, rotate: bool) -> tuple[int, ...]:
    """Spec k sits in slot (k + repeat) mod 4; returns spec index per slot."""
    shift = repeat % 4 if rotate else 0
    return tuple((slot - shift) % 4 for slot in range(4))


def build_agents(config: TournamentConfig):
    """One persistent agent per spec; FEMCTS keeps its population across games.
    Each game reseeds every agent's stream (see ``run_game``)."""
    return [make_agent(spec, make_rng(config.master_seed, k), k) for k, spec in enumerate(config.agents)]


def run_game(config: TournamentConfig, game_seed: int, game_index: int, agents=None,
             repeat: int | None = None) -> GameRecord:
    """Play one game.  ``agents`` (indexed by spec) carry state between games;
    when omitted fresh ones are built."""
    config.validate()
    if agents is None:
        agents = build_agents(config)
    if repeat is None:
        repeat = game_index % config.games_per_seed
    seating = seating_for(repeat, config.position_rotation)
    slot_of = {k: s for s, k in enumerate(seating)}
    for k, agent in enumerate(agents):
        agent.rng = make_rng(config.master_seed, game_seed, game_index, k)
        agent.slot = slot_of[k]
        agent.new_game()

    state = generate_board(game_seed, config.board)
    times = [[] for _ in range(4)]
    log_actions = []
    gc_was_on = gc.isenabled()
    gc.disable()  # tree nodes are acyclic; keep collector pauses out of decisions
    try:
        while state.result() is None:
            acts = [-1] * 4
            for slot in range(4):
                if not state.agents[slot][2]:
                    continue
                k = seating[slot]
                obs = observe(state, slot, config.vision)
                t0 = time.perf_counter()
                a = int(agents[k].act(obs))
                times[k].append((time.perf_counter() - t0) * 1000.0)
                acts[slot] = a
            log_actions.append(tuple(acts))
            state = step(state, acts)
            if state.tick % 50 == 0:
                gc.collect(0)
    finally:
        if gc_was_on:
            gc.enable()

    res = state.result()
    results = tuple(res[slot_of[k]] for k in range(4))
    rec = GameRecord(game_index, game_seed, repeat, seating, results, state.tick, times)
    for k, agent in enumerate(agents):
        if isinstance(agent, FEMCTSAgent):
            best = agent.champion or agent.population.best()
            rec.femcts_best[k] = (best.weights.copy(), best.fitness)
    if config.out_dir is not None and config.write_replays:
        rdir = os.path.join(config.out_dir, "replays")
        _ensure_dir(rdir)
        path = os.path.join(rdir, f"game_{game_index:04d}.txt")
        write_replay(Replay(game_seed, config.mode, config.vision, config.board, log_actions,
                            outcome(state).code), path)
        rec.replay = path
    return rec


@dataclass
class ResultsTable:
    names: list[str]
    wins: list[int]
    ties: list[int]
    losses: list[int]
    n: int

    def pct(self, i: int) -> tuple[float, float, float]:
        if self.n == 0:
            return 0.0, 0.0, 0.0
        return (100.0 * self.wins[i] / self.n, 100.0 * self.ties[i] / self.n,
                100.0 * self.losses[i] / self.n)

    def win_pct(self, name: str) -> float:
        return self.pct(self.names.index(name))[0]

    def render(self) -> str:
        w = max(8, max(len(s) for s in self.names))
        out = [f"{'player':<{w}}  {'win%':>6} {'tie%':>6} {'loss%':>6} {'n':>5}"]
        for i, name in enumerate(self.names):
            p = self.pct(i)
            out.append(f"{name:<{w}}  {p[0]:6.1f} {p[1]:6.1f} {p[2]:6.1f} {self.n:>5}")
        return "\n".join(out)


def aggregate(records, specs, mode: Mode) -> ResultsTable:
    """Per-player counts in FFA; per-team counts in Team mode (team 0 = specs
    0 and 2)."""
    n = len(records)
    if Mode(mode) == Mode.TEAM:
        names = team_names(specs)
        groups = [(0, 2), (1, 3)]
    else:
        names = player_names(specs)
        groups = [(k,) for k in range(4)]
    wins, ties, losses = [0] * len(groups), [0] * len(groups), [0] * len(groups)
    for rec in records:
        for g, members in enumerate(groups):
            r = max(rec.results[k] for k in members)
            if r == 1:
                wins[g] += 1
            elif r == 0:
                ties[g] += 1
            else:
                losses[g] += 1
    return ResultsTable(names, wins, ties, losses, n)


@dataclass
class TournamentResult:
    config: TournamentConfig
    table: ResultsTable
    records: list[GameRecord]
    agents: list

    def decision_times(self, kinds=("mcts", "rhea", "femcts")) -> np.ndarray:
        out = []
        for rec in self.records:
            for k, spec in enumerate(self.config.agents):
                if spec.kind in kinds:
                    out.extend(rec.decision_ms[k])
        return np.array(out)


def run_tournament(config: TournamentConfig, progress=None, agents=None) -> TournamentResult:
    """Play every (seed, repeat) game in order.  Games run sequentially so the
    FEMCTS population carries over from one game to the next."""
    config.validate()
    if config.out_dir is not None:
        _ensure_dir(config.out_dir)  # fail before playing, not after
    if agents is None:
        agents = build_agents(config)
    records = []
    index = 0
    for seed in config.game_seeds:
        for rep in range(config.games_per_seed):
            rec = run_game(config, seed, index, agents, rep)
            records.append(rec)
            if progress is not None:
                progress(rec)
            index += 1
    return TournamentResult(config, aggregate(records, config.agents, config.mode), records, agents)


# -- seed capture -------------------------------------------------------------

def _won(rec: GameRecord, k: int) -> bool:
    return rec.results[k] == 1


def capture_winning_seed(records, path, spec_index: int | None = None, specs=None):
    """Write the FEMCTS best individual from the end of its longest win streak.

    A streak needs at least two consecutive wins; the latest game of the first
    longest streak is used.  Without one, the best-fitness individual seen at
    the end of any game is written and a warning is logged.  Returns
    ``(weights, game_index, streak_length)``.
    """
    records = list(records)
    if spec_index is None:
        cands = sorted({k for rec in records for k in rec.femcts_best})
        if not cands:
            raise ConfigError("no FEMCTS agent in this tournament; nothing to capture")
        spec_index = cands[0]
    if not records or spec_index not in records[0].femcts_best:
        raise ConfigError(f"spec {spec_index} is not a FEMCTS agent")
    best_len, best_end, run = 0, -1, 0
    for i, rec in enumerate(records):
        run = run + 1 if _won(rec, spec_index) else 0
        if run > best_len:
            best_len, best_end = run, i
    if best_len >= 2:
        weights = records[best_end].femcts_best[spec_index][0]
        chosen = records[best_end].index
    else:
        log.warning("FEMCTS never won two games in a row; writing its best-fitness individual")
        best_i = max(range(len(records)), key=lambda i: records[i].femcts_best[spec_index][1])
        weights = records[best_i].femcts_best[spec_index][0]
        chosen = records[best_i].index
    save_seed(weights, path)
    return weights, chosen, best_len


# -- outputs ------------------------------------------------------------------

def _ensure_dir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from None
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")


def write_results_csv(table: ResultsTable, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["player", "wins", "ties", "losses", "n"])
        for i, name in enumerate(table.names):
            w.writerow([name, table.wins[i], table.ties[i], table.losses[i], table.n])


def write_games_csv(records, specs, path: str) -> None:
    names = player_names(specs)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["game", "seed", "repeat", "ticks"]
                   + [f"{n}_slot" for n in names] + [f"{n}_result" for n in names])
        for rec in records:
            slot_of = {k: s for s, k in enumerate(rec.seating)}
            w.writerow([rec.index, rec.seed, rec.repeat, rec.ticks]
                       + [slot_of[k] for k in range(4)]
                       + [_LETTER[r] for r in rec.results])


def read_games_csv(path: str):
    """Per-player (wins, ties, losses, n) recomputed from games.csv."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    players = [c[: -len("_result")] for c in rows[0] if c.endswith("_result")] if rows else []
    out = {}
    for p in players:
        col = [r[f"{p}_result"] for r in rows]
        out[p] = (col.count("W"), col.count("T"), col.count("L"), len(col))
    return out


def emit_outputs(result: TournamentResult, out_dir: str | None = None, echo=print) -> None:
    out_dir = out_dir or result.config.out_dir
    if echo is not None:
        echo(result.table.render())
    if out_dir is None:
        return
    _ensure_dir(out_dir)
    write_results_csv(result.table, os.path.join(out_dir, "results.csv"))
    write_games_csv(result.records, result.config.agents, os.path.join(out_dir, "games.csv"))


def write_po_sweep(tables: dict, out_dir: str) -> tuple[str, str]:
    """``tables`` maps vision level (int or None for full) to ResultsTable."""
    _ensure_dir(out_dir)
    csv_path = os.path.join(out_dir, "po_sweep.csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vision", "player", "win_pct", "tie_pct"])
        for vision, table in tables.items():
            for i, name in enumerate(table.names):
                win, tie, _ = table.pct(i)
                w.writerow(["full" if vision is FULL else vision, name, f"{win:.2f}", f"{tie:.2f}"])
    svg_path = os.path.join(out_dir, "po_sweep.svg")
    with open(svg_path, "w") as fh:
        fh.write(po_sweep_svg(tables))
    return csv_path, svg_path


_PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948")


def po_sweep_svg(tables: dict) -> str:
    """Grouped bar chart of win% per vision level, as plain SVG markup."""
    levels = list(tables)
    names = next(iter(tables.values())).names if tables else []
    bar_w, gap, left, top, plot_h = 16, 24, 50, 20, 200
    group_w = bar_w * max(1, len(names)) + gap
    width = left + group_w * len(levels) + 140
    height = top + plot_h + 50
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + group_w * len(levels)}" '
        f'y2="{top + plot_h}" stroke="black"/>',
    ]
    for tick in range(0, 101, 25):
        y = top + plot_h - plot_h * tick / 100
        parts.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{tick}</text>')
    for gi, vision in enumerate(levels):
        table = tables[vision]
        x0 = left + gap / 2 + gi * group_w
        label = "full" if vision is FULL else str(vision)
        parts.append(f'<g class="bar-group" data-vision="{label}">')
        for i, name in enumerate(table.names):
            win = table.pct(i)[0]
            h = plot_h * win / 100
            parts.append(
                f'<rect x="{x0 + i * bar_w:.1f}" y="{top + plot_h - h:.1f}" width="{bar_w - 2}" '
                f'height="{h:.1f}" fill="{_PALETTE[i % len(_PALETTE)]}">'
                f'<title>{escape(name)} {win:.1f}%</title></rect>')
        parts.append(f'<text x="{x0 + bar_w * len(table.names) / 2:.1f}" y="{top + plot_h + 16}" '
                     f'text-anchor="middle">{label}</text>')
        parts.append("</g>")
    parts.append(f'<text x="{left + group_w * len(levels) / 2:.1f}" y="{height - 8}" '
                 f'text-anchor="middle">vision range</text>')
    lx = left + group_w * len(levels) + 20
    for i, name in enumerate(names):
        y = top + 14 * i
        parts.append(f'<rect x="{lx}" y="{y}" width="10" height="10" fill="{_PALETTE[i % len(_PALETTE)]}"/>')
        parts.append(f'<text x="{lx + 14}" y="{y + 9}">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run_po_sweep(config: TournamentConfig, visions=(0, 1, 2, 3, 4), progress=None):
    """One tournament per vision level, fresh agents each time."""
    results = {}
    for v in visions:
        sub_out = None if config.out_dir is None else os.path.join(config.out_dir, f"vision_{v}")
        results[v] = run_tournament(replace(config, vision=v, out_dir=sub_out), progress)
    return results

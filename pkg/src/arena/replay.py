"""Replay logs: write, parse and re-simulate.

Format (one record per line)::

    pommer-replay v1 <gameSeed> <mode> <vision>
    config size=11 max_ticks=800 ...        (optional, only for non-default boards)
    <tick> <a0> <a1> <a2> <a3>              (one per tick, -1 for dead agents)
    outcome <W|T|L>x4
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

from .engine import FULL, GameConfig, Mode, generate_board, outcome, step

MAGIC = ("pommer-replay", "v1")
_CONFIG_KEYS = ("size", "max_ticks", "num_rigid", "num_wood", "powerup_fraction",
                "flame_life", "bomb_life", "start_room", "max_attempts")


class ReplayError(ValueError):
    """Malformed replay file."""


@dataclass
class Replay:
    seed: int
    mode: Mode
    vision: int | None
    config: GameConfig = field(default_factory=GameConfig)
    actions: list[tuple[int, int, int, int]] = field(default_factory=list)
    outcome: str = ""


def _vision_token(vision: int | None) -> str:
    return "full" if vision is FULL else str(int(vision))


def format_replay(rep: Replay) -> str:
    mode = "team" if rep.mode == Mode.TEAM else "ffa"
    lines = [f"{MAGIC[0]} {MAGIC[1]} {rep.seed} {mode} {_vision_token(rep.vision)}"]
    default = GameConfig(mode=rep.mode)
    cfg = rep.config
    diff = [k for k in _CONFIG_KEYS if getattr(cfg, k) != getattr(default, k)]
    if diff:
        lines.append("config " + " ".join(f"{k}={getattr(cfg, k)!r}" for k in _CONFIG_KEYS))
    lines += [f"{t} {a[0]} {a[1]} {a[2]} {a[3]}" for t, a in enumerate(rep.actions)]
    lines.append(f"outcome {rep.outcome}")
    return "\n".join(lines) + "\n"


def write_replay(rep: Replay, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_replay(rep))


def parse_replay(text: str) -> Replay:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ReplayError("empty replay")
    head = lines[0]
    if len(head) != 5 or tuple(head[:2]) != MAGIC:
        raise ReplayError("bad header; expected 'pommer-replay v1 <seed> <mode> <vision>'")
    try:
        seed = int(head[2])
        mode = {"ffa": Mode.FFA, "team": Mode.TEAM}[head[3].lower()]
        vision = FULL if head[4] == "full" else int(head[4])
    except (KeyError, ValueError):
        raise ReplayError(f"bad header fields: {' '.join(head[2:])}") from None
    body = lines[1:]
    cfg_kw = {}
    if body and body[0][0] == "config":
        types = {f.name: f.type for f in fields(GameConfig)}
        for tok in body[0][1:]:
            key, _, val = tok.partition("=")
            if key not in _CONFIG_KEYS:
                raise ReplayError(f"unknown config key {key!r}")
            cfg_kw[key] = float(val) if types[key] in (float, "float") else int(val)
        body = body[1:]
    if not body or body[-1][0] != "outcome" or len(body[-1]) != 2:
        raise ReplayError("missing final 'outcome' line")
    code = body[-1][1]
    if len(code) != 4 or any(ch not in "WTL" for ch in code):
        raise ReplayError(f"bad outcome code {code!r}")
    actions = []
    for i, row in enumerate(body[:-1]):
        if len(row) != 5:
            raise ReplayError(f"tick line {i} has {len(row)} fields, expected 5")
        try:
            t, *acts = (int(v) for v in row)
        except ValueError:
            raise ReplayError(f"non-integer token on tick line {i}") from None
        if t != i:
            raise ReplayError(f"tick line {i} is numbered {t}")
        if any(not -1 <= a <= 5 for a in acts):
            raise ReplayError(f"action out of range on tick {t}")
        actions.append(tuple(acts))
    return Replay(seed, mode, vision, GameConfig(mode=mode, **cfg_kw), actions, code)


def read_replay(path: str | os.PathLike) -> Replay:
    with open(path) as fh:
        return parse_replay(fh.read())


@dataclass(frozen=True)
class ReplayCheck:
    ok: bool
    ticks: int
    outcome: str
    message: str = ""


def validate_replay(rep: Replay) -> ReplayCheck:
    """Re-simulate from the seeded board and compare with the recorded log."""
    state = generate_board(rep.seed, rep.config)
    for t, acts in enumerate(rep.actions):
        if state.result() is not None:
            return ReplayCheck(False, state.tick, outcome(state).code,
                               f"game already over at tick {t} but the log continues")
        alive = [a[2] for a in state.agents]
        for i in range(4):
            if alive[i] and acts[i] < 0:
                return ReplayCheck(False, t, "", f"agent {i} is alive at tick {t} but logged -1")
            if not alive[i] and acts[i] >= 0:
                return ReplayCheck(False, t, "", f"agent {i} is dead at tick {t} but logged {acts[i]}")
        state = step(state, acts)
    code = outcome(state).code
    if state.result() is None:
        return ReplayCheck(False, state.tick, code, f"log ends at tick {state.tick} with the game still running")
    if code != rep.outcome:
        return ReplayCheck(False, state.tick, code, f"re-simulated outcome {code} != recorded {rep.outcome}")
    return ReplayCheck(True, state.tick, code)

"""Pommerman forward model: board generation, stepping, observation, outcome.

The per-tick rules live in the kernel (``arena._core`` or its pure-Python
twin ``arena._pycore``); this module adds the value-style API around it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _pycore as K
from ._backend import State


class Tile(IntEnum):
    PASSAGE = K.PASSAGE
    RIGID = K.RIGID
    WOOD = K.WOOD
    EXTRA_BOMB = K.EXTRA_BOMB
    INCR_RANGE = K.INCR_RANGE
    KICK = K.KICK
    FOG = K.FOG


class Action(IntEnum):
    UP = K.UP
    DOWN = K.DOWN
    LEFT = K.LEFT
    RIGHT = K.RIGHT
    STOP = K.STOP
    BOMB = K.BOMB


class Mode(IntEnum):
    FFA = K.FFA
    TEAM = K.TEAM


POWER_UPS = (Tile.EXTRA_BOMB, Tile.INCR_RANGE, Tile.KICK)
FULL = None  # vision range meaning "no fog"


class ConfigError(ValueError):
    """Invalid game, agent or tournament configuration."""


@dataclass(frozen=True)
class GameConfig:
    size: int = 11
    mode: Mode = Mode.FFA
    max_ticks: int = 800
    num_rigid: int = 36
    num_wood: int = 36
    powerup_fraction: float = 0.5
    flame_life: int = 2
    bomb_life: int = 10
    start_room: int = 0  # min open cells reachable from a corner without bombing
    max_attempts: int = 200

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))

    @classmethod
    def mini(cls, **kw) -> "GameConfig":
        """6x6 board used by the differential tests."""
        base = dict(size=6, num_rigid=4, num_wood=8, powerup_fraction=1.0, max_ticks=60)
        base.update(kw)
        return cls(**base)

    def validate(self) -> None:
        n = self.size
        if not 4 <= n <= 16:
            raise ConfigError(f"board size must be in [4, 16], got {n}")
        if self.start_room < 0:
            raise ConfigError("start_room must be non-negative")
        if self.max_ticks < 1 or self.flame_life < 1 or self.bomb_life < 1:
            raise ConfigError("max_ticks, flame_life and bomb_life must be positive")
        if not 0.0 <= self.powerup_fraction <= 1.0:
            raise ConfigError("powerup_fraction must be in [0, 1]")
        centre = n % 2 == 1
        for name, count in (("num_rigid", self.num_rigid), ("num_wood", self.num_wood)):
            if count < 0:
                raise ConfigError(f"{name} must be non-negative")
            rem = count % 4
            if rem not in (0, 1) or (rem == 1 and not centre):
                raise ConfigError(f"{name}={count} cannot be laid out with 4-fold symmetry")
        if self.num_rigid % 4 == 1 and self.num_wood % 4 == 1:
            raise ConfigError("only one of num_rigid / num_wood may use the centre cell")
        orbits = len(free_orbits(n))
        if self.num_rigid // 4 + self.num_wood // 4 > orbits:
            raise ConfigError(
                f"{self.num_rigid} rigid + {self.num_wood} wood tiles do not fit a "
                f"{n}x{n} symmetric layout ({orbits} free orbits)"
            )


def corners(n: int) -> list[tuple[int, int]]:
    """Start cells; diagonal corners share a team (slots 0,2 and 1,3)."""
    return [(0, 0), (n - 1, 0), (n - 1, n - 1), (0, n - 1)]


def rotate(cell: tuple[int, int], n: int) -> tuple[int, int]:
    r, c = cell
    return c, n - 1 - r


def _orbit(cell, n):
    out = [cell]
    nxt = rotate(cell, n)
    while nxt != cell:
        out.append(nxt)
        nxt = rotate(nxt, n)
    return tuple(sorted(out))


def free_orbits(n: int) -> list[tuple[tuple[int, int], ...]]:
    """Size-4 rotation orbits available for walls (corners and their
    neighbours are reserved)."""
    reserved = set()
    for cell in ((0, 0), (0, 1), (1, 0)):
        reserved.update(_orbit(cell, n))
    seen = set()
    out = []
    for r in range(n):
        for c in range(n):
            if (r, c) in seen or (r, c) in reserved:
                continue
            orb = _orbit((r, c), n)
            seen.update(orb)
            if len(orb) == 4:
                out.append(orb)
    return out


def _reach(board, n, blocked):
    start = (0, 0)
    seen = {start}
    todo = deque([start])
    while todo:
        r, c = todo.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < n and 0 <= nc < n and (nr, nc) not in seen and board[nr * n + nc] not in blocked:
                seen.add((nr, nc))
                todo.append((nr, nc))
    return seen


def _connected(board, n):
    seen = _reach(board, n, (Tile.RIGID,))
    return all(cell in seen for cell in corners(n))


def start_room(board, n) -> int:
    """Cells reachable from corner (0,0) without crossing Rigid or Wood."""
    return len(_reach(board, n, (Tile.RIGID, Tile.WOOD)))


def generate_board(game_seed: int, config: GameConfig = GameConfig()) -> State:
    """Symmetric random layout with the four agents in the corners."""
    config.validate()
    n = config.size
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(game_seed), 0x9E3779B9])))
    orbits = free_orbits(n)
    k_rigid, k_wood = config.num_rigid // 4, config.num_wood // 4
    centre = (n // 2) * n + n // 2
    for _ in range(config.max_attempts):
        board = [int(Tile.PASSAGE)] * (n * n)
        order = rng.permutation(len(orbits))
        rigid = [orbits[i] for i in order[:k_rigid]]
        wood = [orbits[i] for i in order[k_rigid:k_rigid + k_wood]]
        for orb in rigid:
            for r, c in orb:
                board[r * n + c] = int(Tile.RIGID)
        for orb in wood:
            for r, c in orb:
                board[r * n + c] = int(Tile.WOOD)
        wood_groups = [list(orb) for orb in wood]
        if config.num_rigid % 4 == 1:
            board[centre] = int(Tile.RIGID)
        elif config.num_wood % 4 == 1:
            board[centre] = int(Tile.WOOD)
            wood_groups.append([(n // 2, n // 2)])
        if _connected(board, n) and (config.start_room == 0 or start_room(board, n) >= config.start_room):
            break
    else:
        raise ConfigError(f"no connected layout found in {config.max_attempts} attempts")

    hidden = [0] * (n * n)
    n_pu = int(round(config.powerup_fraction * len(wood_groups)))
    chosen = rng.permutation(len(wood_groups))[:n_pu]
    for gi in sorted(int(i) for i in chosen):
        kind = int(POWER_UPS[int(rng.integers(3))])
        for r, c in wood_groups[gi]:
            hidden[r * n + c] = kind

    agents = [(r, c, True, 1, 2, False) for r, c in corners(n)]
    return State(n, board, hidden, [0] * (n * n), [], agents, 0, config.max_ticks,
                 int(config.mode), config.flame_life, config.bomb_life)


def step(state: State, actions) -> State:
    """Successor of ``state`` under the four simultaneous actions."""
    if len(actions) != 4:
        raise ValueError("step needs exactly four actions")
    acts = [int(a) for a in actions]
    for a in acts:
        if not -1 <= a <= 5:
            raise ValueError(f"invalid action index {a}")
    nxt = state.copy()
    nxt.step([K.STOP if a < 0 else a for a in acts])
    return nxt


def legal_placements(state: State, agent_id: int) -> set[Action]:
    mask = state.legal_mask(agent_id)
    return {Action(i) for i in range(6) if mask >> i & 1}


def snapshot(state: State) -> tuple:
    """Hashable tuple of every rule-relevant field, for equality checks."""
    return (
        state.n, state.tick, state.max_ticks, state.mode, state.flame_life,
        state.bomb_life, tuple(state.board), tuple(state.hidden),
        tuple(state.flames), tuple(state.bombs), tuple(state.agents),
    )


def visible_snapshot(state: State) -> tuple:
    """Like ``snapshot`` without the hidden power-up layer and wood baseline."""
    return (
        state.n, state.tick, state.max_ticks, state.mode, tuple(state.board),
        tuple(state.flames), tuple(state.bombs), tuple(state.agents),
    )


# -- observation ------------------------------------------------------------

@dataclass(frozen=True)
class AgentView:
    id: int
    row: int
    col: int
    alive: bool
    ammo: int
    blast_strength: int
    can_kick: bool


@dataclass(frozen=True)
class Observation:
    viewer: int
    size: int
    board: tuple[int, ...]
    bombs: tuple[tuple[int, int, int, int, int, int], ...]
    flames: tuple[tuple[int, int, int], ...]
    agents: tuple[AgentView, ...]
    alive: tuple[bool, bool, bool, bool]
    me: AgentView
    tick: int
    max_ticks: int
    mode: Mode
    vision: int | None
    flame_life: int = 2
    bomb_life: int = 10

    def visible(self, r: int, c: int) -> bool:
        if self.vision is None:
            return True
        return max(abs(r - self.me.row), abs(c - self.me.col)) <= self.vision

    def tile(self, r: int, c: int) -> int:
        return self.board[r * self.size + c]


def observe(state: State, agent_id: int, vision: int | None = FULL) -> Observation:
    """The viewer's fogged view: cells outside a Chebyshev window are Fog."""
    if not 0 <= agent_id < 4:
        raise ValueError(f"invalid agent id {agent_id}")
    if vision is not None and vision < 0:
        raise ValueError("vision range must be >= 0 or None for full")
    n = state.n
    ags = state.agents
    r0, c0 = ags[agent_id][0], ags[agent_id][1]

    def vis(r, c):
        return vision is None or max(abs(r - r0), abs(c - c0)) <= vision

    board = state.board
    if vision is not None:
        board = [board[q] if vis(q // n, q % n) else int(Tile.FOG) for q in range(n * n)]
    flames = state.flames
    views = []
    for i, (r, c, al, am, bl, k) in enumerate(ags):
        if vis(r, c):
            views.append(AgentView(i, r, c, al, am, bl, k))
    r, c, al, am, bl, k = ags[agent_id]
    me = AgentView(agent_id, r, c, al, am, bl, k)
    return Observation(
        viewer=agent_id,
        size=n,
        board=tuple(board),
        bombs=tuple(b for b in state.bombs if vis(b[0], b[1])),
        flames=tuple((q // n, q % n, f) for q, f in enumerate(flames) if f and vis(q // n, q % n)),
        agents=tuple(views),
        alive=tuple(a[2] for a in ags),
        me=me,
        tick=state.tick,
        max_ticks=state.max_ticks,
        mode=Mode(state.mode),
        vision=vision,
        flame_life=state.flame_life,
        bomb_life=state.bomb_life,
    )


# -- outcome ----------------------------------------------------------------

@dataclass(frozen=True)
class GameOutcome:
    status: str  # "ongoing", "win" or "tie"
    winners: tuple[int, ...]
    per_agent: tuple[str, ...]  # "W" / "T" / "L" per agent, empty while ongoing

    @property
    def code(self) -> str:
        return "".join(self.per_agent)


_LETTER = {1: "W", 0: "T", -1: "L"}


def outcome(state: State) -> GameOutcome:
    res = state.result()
    if res is None:
        return GameOutcome("ongoing", (), ())
    winners = tuple(i for i in range(4) if res[i] == 1)
    return GameOutcome("win" if winners else "tie", winners, tuple(_LETTER[x] for x in res))

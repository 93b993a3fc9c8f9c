"""Pieces shared by every search agent: budgets, determinization, the reward."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .. import _pycore as K
from .._backend import State
from ..engine import Observation, Tile, corners

# weights of: enemies eliminated, power-ups held, distance from bombs,
# wood destroyed, self alive
HEURISTIC_WEIGHTS = (0.5, 0.15, 0.15, 0.1, 0.1)


class Budget:
    """Wall-clock or iteration-count stopping rule for one decision.

    At least one iteration is always granted so every agent returns a
    searched action.
    """

    def __init__(self, budget_ms: float = 40.0, iters: int | None = None):
        self.iters_cap = iters
        self.limit = budget_ms / 1000.0
        self.start = time.perf_counter()
        self.used = 0

    def spent(self) -> bool:
        if self.used == 0:
            return False
        if self.iters_cap is not None:
            return self.used >= self.iters_cap
        return time.perf_counter() - self.start >= self.limit

    def tick(self) -> None:
        self.used += 1


@dataclass
class Memory:
    """Last cell each agent was seen on (for placing unseen agents)."""

    last_seen: dict

    @classmethod
    def empty(cls) -> "Memory":
        return cls({})

    def update(self, obs: Observation) -> None:
        for a in obs.agents:
            self.last_seen[a.id] = (a.row, a.col)


def determinize(obs: Observation, memory: Memory | None = None) -> State:
    """A complete state consistent with ``obs``.

    Fog becomes Passage, hidden power-ups are unknown (none), unseen bombs and
    flames are dropped, and unseen live agents go to their last seen cell or
    start corner with default stats.  With full vision this reproduces the
    visible content of the true state.
    """
    n = obs.size
    board = [int(Tile.PASSAGE) if t == Tile.FOG else int(t) for t in obs.board]
    flames = [0] * (n * n)
    for r, c, f in obs.flames:
        flames[r * n + c] = f
    seen = {a.id: a for a in obs.agents}
    seen[obs.me.id] = obs.me
    starts = corners(n)
    taken = {(a.row, a.col) for a in seen.values() if a.alive}
    agents = [None] * 4
    for i in range(4):
        if i in seen:
            a = seen[i]
            agents[i] = (a.row, a.col, a.alive, a.ammo, a.blast_strength, a.can_kick)
            continue
        if not obs.alive[i]:
            r, c = (memory.last_seen.get(i) if memory else None) or starts[i]
            agents[i] = (r, c, False, 0, 2, False)
            continue
        cands = []
        if memory is not None and i in memory.last_seen:
            cands.append(memory.last_seen[i])
        cands.append(starts[i])
        cell = None
        for r, c in cands:
            if not obs.visible(r, c) and (r, c) not in taken and board[r * n + c] not in (Tile.RIGID, Tile.WOOD):
                cell = (r, c)
                break
        if cell is None:
            cell = _far_fog_cell(obs, board, taken)
        taken.add(cell)
        agents[i] = (cell[0], cell[1], True, 1, 2, False)
    return State(n, board, [0] * (n * n), flames, list(obs.bombs), agents, obs.tick,
                 obs.max_ticks, int(obs.mode), obs.flame_life, obs.bomb_life)


def _far_fog_cell(obs, board, taken):
    n = obs.size
    best, best_d = None, -1
    for r in range(n):
        for c in range(n):
            if obs.visible(r, c) or (r, c) in taken or board[r * n + c] in (Tile.RIGID, Tile.WOOD):
                continue
            d = max(abs(r - obs.me.row), abs(c - obs.me.col))
            if d > best_d:
                best, best_d = (r, c), d
    if best is None:  # whole board visible and crowded; stack on own corner
        best = corners(n)[obs.me.id]
    return best


def heuristic_evaluate(state: State, agent_id: int, weights=HEURISTIC_WEIGHTS,
                       max_strength: float = 10.0) -> float:
    """Reward in [-1, 1]: +1/0/-1 once the agent's result is settled, otherwise
    a weighted [0, 1] score mapped linearly onto [-0.9, 0.9]."""
    return state.evaluate(agent_id, tuple(weights), max_strength)


def legal_actions(state: State, agent_id: int) -> tuple[int, ...]:
    mask = state.legal_mask(agent_id)
    return tuple(i for i in range(6) if mask >> i & 1)


STOP = K.STOP

"""State features, effective action spaces and the softmax rollout policy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import _pycore as K
from .engine import Action, Observation, Tile
from .rng import below, uniform

FEATURE_NAMES = (
    "bomb_strength", "can_kick", "inv_dist_bomb", "inv_dist_powerup",
    "inv_dist_enemy", "inv_dist_rigid", "inv_dist_flame", "inv_dist_wood",
)
CONSTANT = K.CONST_FEATURE

# feature-column presets (indices into the 8-feature vector)
ALL_FEATURES = tuple(range(8))
# bomb, enemy, power-up and rigid distances plus can-kick
NEA2_SHORT = (2, 4, 3, 5, 1)
UNFEATURED = (CONSTANT,)

PRESETS = {"all": ALL_FEATURES, "nea2-short": NEA2_SHORT, "none": UNFEATURED}

MAX_BOMB_STRENGTH = 10.0


class ActionSpace(Enum):
    """Effective action grouping: (number of effective actions, move factor)."""

    ALL6 = (6, 1.0)
    MOVE_STOP_BOMB = (3, 4.0)
    MOVEMENT_BOMB = (2, 5.0)

    @property
    def nea(self) -> int:
        return self.value[0]

    @property
    def move_factor(self) -> float:
        return self.value[1]

    @classmethod
    def from_nea(cls, nea: int) -> "ActionSpace":
        for space in cls:
            if space.nea == nea:
                return space
        raise ValueError(f"nEA must be 2, 3 or 6, got {nea}")


@dataclass(frozen=True)
class RolloutPolicy:
    """What the kernels need to run a feature-weighted softmax rollout."""

    nea: int
    feature_idx: tuple[int, ...]
    weights: tuple[float, ...]  # row-major nea x len(feature_idx)
    max_strength: float = MAX_BOMB_STRENGTH

    @classmethod
    def from_matrix(cls, weights, feature_idx, max_strength=MAX_BOMB_STRENGTH):
        rows = [list(map(float, row)) for row in weights]
        nea = len(rows)
        if any(len(row) != len(feature_idx) for row in rows):
            raise ValueError("weight matrix columns must match the feature subset")
        ActionSpace.from_nea(nea)
        return cls(nea, tuple(feature_idx), tuple(v for row in rows for v in row), max_strength)


def _inv(d2: int | None) -> float:
    return 0.0 if d2 is None else 1.0 / (math.sqrt(d2) + 1.0)


def extract_features(obs: Observation, max_bomb_strength: float = MAX_BOMB_STRENGTH) -> tuple[float, ...]:
    """Eight features in [0, 1] from the viewer's observation.

    Distances are straight-line from the viewer's cell; only objects that are
    not under fog count, and a class with no visible member scores 0.
    """
    me = obs.me
    r0, c0 = me.row, me.col
    bs = min(1.0, max(0.0, me.blast_strength * me.ammo / (2.0 * max_bomb_strength)))

    def closer(best, r, c):
        d2 = (r - r0) ** 2 + (c - c0) ** 2
        return d2 if best is None or d2 < best else best

    d_bomb = d_pu = d_en = d_rig = d_fl = d_wood = None
    for b in obs.bombs:
        d_bomb = closer(d_bomb, b[0], b[1])
    for a in obs.agents:
        if a.id == me.id or not a.alive:
            continue
        if obs.mode == K.TEAM and (a.id & 1) == (me.id & 1):
            continue
        d_en = closer(d_en, a.row, a.col)
    for r, c, _ in obs.flames:
        d_fl = closer(d_fl, r, c)
    n = obs.size
    for q, t in enumerate(obs.board):
        if t == Tile.RIGID:
            d_rig = closer(d_rig, q // n, q % n)
        elif t == Tile.WOOD:
            d_wood = closer(d_wood, q // n, q % n)
        elif t in (Tile.EXTRA_BOMB, Tile.INCR_RANGE, Tile.KICK):
            d_pu = closer(d_pu, q // n, q % n)
    return (bs, 1.0 if me.can_kick else 0.0, _inv(d_bomb), _inv(d_pu), _inv(d_en),
            _inv(d_rig), _inv(d_fl), _inv(d_wood))


def action_weights(weights, features) -> list[float]:
    """Row-wise dot products W @ f."""
    out = []
    for row in weights:
        if len(row) != len(features):
            raise ValueError(f"weight row has {len(row)} entries, feature vector {len(features)}")
        s = 0.0
        for w, f in zip(row, features):
            s += w * f
        out.append(s)
    return out


def select_features(feats, feature_idx) -> list[float]:
    return [1.0 if k == CONSTANT else feats[k] for k in feature_idx]


def softmax(xs) -> list[float]:
    m = max(xs)
    es = [math.exp(x - m) for x in xs]
    tot = sum(es)
    return [e / tot for e in es]


def default_policy_distribution(weights, space: ActionSpace) -> list[float]:
    """Probabilities over the six concrete actions (Action order)."""
    if len(weights) != space.nea:
        raise ValueError(f"expected {space.nea} effective-action weights, got {len(weights)}")
    logits = list(map(float, weights))
    logits[0] *= space.move_factor
    q = softmax(logits)
    if space is ActionSpace.ALL6:
        return q
    if space is ActionSpace.MOVE_STOP_BOMB:
        return [q[0] / 4.0] * 4 + [q[1], q[2]]
    return [q[0] / 5.0] * 5 + [q[1]]


def safe_directions(obs: Observation) -> list[int]:
    """Moves whose target is on the board, walkable, bomb-free and not aflame."""
    n = obs.size
    r0, c0 = obs.me.row, obs.me.col
    bombs = {(b[0], b[1]) for b in obs.bombs}
    fire = {(r, c) for r, c, _ in obs.flames}
    out = []
    for d in range(4):
        r, c = r0 + K.DR[d], c0 + K.DC[d]
        if not (0 <= r < n and 0 <= c < n):
            continue
        t = obs.board[r * n + c]
        if t in (Tile.RIGID, Tile.WOOD) or (r, c) in bombs or (r, c) in fire:
            continue
        out.append(d)
    return out


def sample_rollout_action(dist, obs: Observation, rng, space: ActionSpace = ActionSpace.ALL6) -> Action:
    """Draw from ``dist``; grouped move actions re-pick a random safe direction."""
    u = uniform(rng)
    acc = 0.0
    pick = last = 0
    for i, p in enumerate(dist):
        if p > 0.0:
            last = i
        acc += p
        if u < acc:
            pick = i
            break
    else:
        pick = last
    if pick < 4 and space is not ActionSpace.ALL6:
        safe = safe_directions(obs)
        if safe:
            pick = safe[below(rng, len(safe))]
    return Action(pick)

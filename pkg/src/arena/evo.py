"""Population of weight matrices and the genetic operators that evolve it."""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

import numpy as np


class MutationStyle(Enum):
    PER_ACTION = "per-action"  # each row draws its own feature subset
    SHARED = "shared"  # one subset drawn once, applied to every row


@dataclass(frozen=True)
class EvoConfig:
    pop_size: int = 10
    elites: int = 4
    tournament: int = 2
    mutation_prob: float = 0.2
    mutation_strength: float = 0.001
    style: MutationStyle = MutationStyle.SHARED
    positive_bias: float = 0.5
    rollouts_per_individual: int = 4
    nea: int = 6
    nf: int = 8
    mutate_elites: bool = False

    def __post_init__(self):
        if self.pop_size < 1 or not 0 <= self.elites <= self.pop_size:
            raise ValueError("need 0 <= elites <= pop_size")
        if not 1 <= self.tournament <= self.pop_size:
            raise ValueError("tournament size must be in [1, pop_size]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation probability must be in [0, 1]")
        if self.mutation_strength <= 0.0:
            raise ValueError("mutation strength must be positive")
        if self.rollouts_per_individual < 1:
            raise ValueError("need at least one rollout per individual")

    @property
    def nonnegative(self) -> bool:
        return self.nea in (2, 3)

    @classmethod
    def for_space(cls, nea: int, nf: int, **kw) -> "EvoConfig":
        """Defaults per action space: grouped spaces bias mutation upwards."""
        kw.setdefault("positive_bias", 0.6 if nea in (2, 3) else 0.5)
        return cls(nea=nea, nf=nf, **kw)


@dataclass
class Individual:
    weights: np.ndarray
    sum_reward: float = 0.0
    evaluations: int = 0

    @property
    def fitness(self) -> float:
        if self.evaluations == 0:
            return float("-inf")
        return self.sum_reward / self.evaluations

    def reset_stats(self) -> None:
        self.sum_reward = 0.0
        self.evaluations = 0

    def clone(self) -> "Individual":
        return Individual(self.weights.copy(), self.sum_reward, self.evaluations)


@dataclass
class Population:
    members: list[Individual]
    generation: int = 0

    def __len__(self) -> int:
        return len(self.members)

    def best(self) -> Individual:
        best = self.members[0]
        for ind in self.members[1:]:
            if ind.fitness > best.fitness:
                best = ind
        return best


def init_population(config: EvoConfig, seed_matrix=None) -> Population:
    shape = (config.nea, config.nf)
    if seed_matrix is None:
        base = np.zeros(shape)
    else:
        base = np.array(seed_matrix, dtype=float)
        if base.shape != shape:
            raise ValueError(f"seed matrix shape {base.shape} does not match {shape}")
    return Population([Individual(base.copy()) for _ in range(config.pop_size)])


def record_reward(ind: Individual, delta: float) -> Individual:
    ind.sum_reward += delta
    ind.evaluations += 1
    return ind


def tournament_select(pop: Population, m: int, rng: np.random.Generator) -> Individual:
    """Best of ``m`` distinct uniformly drawn members; ties go to the lower index."""
    idx = sorted(int(i) for i in rng.choice(len(pop.members), size=m, replace=False))
    best = idx[0]
    for i in idx[1:]:
        if pop.members[i].fitness > pop.members[best].fitness:
            best = i
    return pop.members[best]


def uniform_crossover(a: Individual, b: Individual, rng: np.random.Generator) -> Individual:
    if a.weights.shape != b.weights.shape:
        raise ValueError("parents must have the same shape")
    take_a = rng.random(a.weights.shape) < 0.5
    return Individual(np.where(take_a, a.weights, b.weights))


def mutate(ind: Individual, config: EvoConfig, rng: np.random.Generator) -> Individual:
    w = ind.weights.copy()
    nea, nf = w.shape
    if config.style is MutationStyle.SHARED:
        cols = rng.random(nf) < config.mutation_prob
        mask = np.broadcast_to(cols, (nea, nf))
    else:
        mask = rng.random((nea, nf)) < config.mutation_prob
    k = int(mask.sum())
    if k:
        mag = config.mutation_strength * (1.0 - rng.random(k))  # (0, mS]
        sign = np.where(rng.random(k) < config.positive_bias, 1.0, -1.0)
        w[mask] += sign * mag
    if config.nonnegative:
        np.maximum(w, 0.0, out=w)
    return Individual(w)


def evolve(pop: Population, config: EvoConfig, rng: np.random.Generator) -> Population:
    """Keep the top ``elites`` and breed the rest; all fitness stats reset."""
    if any(ind.evaluations == 0 for ind in pop.members):
        raise ValueError("every individual must be evaluated before evolving")
    order = sorted(range(len(pop.members)), key=lambda i: -pop.members[i].fitness)
    nxt = []
    for i in order[:config.elites]:
        elite = Individual(pop.members[i].weights.copy())
        if config.mutate_elites:
            elite = mutate(elite, config, rng)
        nxt.append(elite)
    while len(nxt) < config.pop_size:
        a = tournament_select(pop, config.tournament, rng)
        b = tournament_select(pop, config.tournament, rng)
        nxt.append(mutate(uniform_crossover(a, b, rng), config, rng))
    return Population(nxt, pop.generation + 1)


# -- seed files ---------------------------------------------------------------

def save_seed(weights, path: str | os.PathLike) -> None:
    """Write ``nEA nF`` then one row per line; repr() keeps doubles exact."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("seed matrix must be 2-D")
    lines = [f"{w.shape[0]} {w.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in w]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_seed(path: str | os.PathLike, shape: tuple[int, int] | None = None) -> np.ndarray:
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError(f"{path}: first line must be 'nEA nF'")
    try:
        nea, nf = int(rows[0][0]), int(rows[0][1])
        body = [[float(v) for v in row] for row in rows[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: malformed seed file ({exc})") from None
    if len(body) != nea or any(len(row) != nf for row in body):
        raise ValueError(f"{path}: header says {nea}x{nf} but body does not match")
    w = np.array(body, dtype=float).reshape(nea, nf)
    if shape is not None and w.shape != tuple(shape):
        raise ValueError(f"{path}: seed shape {w.shape} does not match expected {tuple(shape)}")
    return w

"""Decision makers: OSLA, MCTS, RHEA and FEMCTS."""

from __future__ import annotations

from dataclasses import dataclass

from ..engine import ConfigError
from ..evo import EvoConfig, MutationStyle
from .common import HEURISTIC_WEIGHTS, Budget, Memory, determinize, heuristic_evaluate
from .femcts import FEMCTSAgent
from .mcts import MCTSAgent, TreeNode, iterate, recommend, uct_select
from .osla import OSLAAgent
from .rhea import RHEAAgent

KINDS = ("osla", "mcts", "rhea", "femcts")


@dataclass(frozen=True)
class AgentSpec:
    kind: str
    budget_ms: float = 40.0
    budget_iters: int | None = None
    heuristic: tuple = HEURISTIC_WEIGHTS
    max_strength: float = 10.0
    # MCTS / FEMCTS tree
    c: float = 1.41
    rollout_depth: int = 12
    # RHEA
    horizon: int = 10
    rhea_pop: int = 10
    # FEMCTS
    nea: int = 2
    features: str | tuple = "all"
    pop_size: int = 10
    elites: int = 4
    rollouts_per_individual: int = 4
    mutation_strength: float = 0.001
    mutation_prob: float = 0.2
    mutation_style: MutationStyle = MutationStyle.SHARED
    positive_bias: float | None = None
    seed_path: str | None = None
    evolve: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown agent kind {self.kind!r}; expected one of {KINDS}")
        if self.budget_ms <= 0:
            raise ConfigError("budget_ms must be positive")
        if self.budget_iters is not None and self.budget_iters < 1:
            raise ConfigError("budget_iters must be >= 1")
        if self.nea not in (2, 3, 6):
            raise ConfigError("nea must be 2, 3 or 6")
        if self.horizon < 1 or self.rhea_pop < 2:
            raise ConfigError("RHEA needs horizon >= 1 and population >= 2")

    def evo_config(self, nf: int) -> EvoConfig:
        kw = dict(
            pop_size=self.pop_size, elites=self.elites, mutation_prob=self.mutation_prob,
            mutation_strength=self.mutation_strength, style=self.mutation_style,
            rollouts_per_individual=self.rollouts_per_individual,
        )
        if self.positive_bias is not None:
            kw["positive_bias"] = self.positive_bias
        try:
            return EvoConfig.for_space(self.nea, nf, **kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


_CLASSES = {"osla": OSLAAgent, "mcts": MCTSAgent, "rhea": RHEAAgent, "femcts": FEMCTSAgent}


def make_agent(spec: AgentSpec, rng, slot: int = 0):
    try:
        return _CLASSES[spec.kind](spec, rng, slot)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot build {spec.kind} agent: {exc}") from exc


__all__ = [
    "AgentSpec", "Budget", "FEMCTSAgent", "HEURISTIC_WEIGHTS", "KINDS", "MCTSAgent", "Memory",
    "OSLAAgent", "RHEAAgent", "TreeNode", "determinize", "heuristic_evaluate", "iterate",
    "make_agent", "recommend", "uct_select",
]

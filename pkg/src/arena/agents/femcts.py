"""Fast evolutionary MCTS: UCT whose rollout policy is a softmax over
feature-weighted action scores, with the weight matrices evolved online."""

from __future__ import annotations

from ..evo import EvoConfig, Population, evolve, init_population, load_seed, record_reward
from ..features import PRESETS, RolloutPolicy
from .common import Budget, Memory, determinize
from .mcts import iterate, new_root, recommend


class FEMCTSAgent:
    """Holds its population across decisions and across games."""

    def __init__(self, spec, rng, slot: int = 0):
        self.spec = spec
        self.rng = rng
        self.slot = slot
        self.memory = Memory.empty()
        self.feature_idx = PRESETS[spec.features] if isinstance(spec.features, str) else tuple(spec.features)
        self.config: EvoConfig = spec.evo_config(len(self.feature_idx))
        seed = None
        if spec.seed_path is not None:
            seed = load_seed(spec.seed_path, (self.config.nea, self.config.nf))
        self.population: Population = init_population(self.config, seed)
        self.champion = None  # best of the last fully evaluated generation
        self.last_root = None
        self.iterations = 0
        self.evolutions = 0

    def new_game(self) -> None:
        self.memory = Memory.empty()

    def policy_for(self, ind) -> RolloutPolicy:
        return RolloutPolicy(self.config.nea, self.feature_idx,
                             tuple(float(v) for v in ind.weights.ravel()), self.spec.max_strength)

    def act(self, obs) -> int:
        spec, cfg = self.spec, self.config
        budget = Budget(spec.budget_ms, spec.budget_iters)
        self.memory.update(obs)
        me = obs.viewer
        state = determinize(obs, self.memory)
        root = new_root(state, me)
        rng = self.rng
        while not budget.spent():
            swept = True
            for ind in self.population.members:
                ind.reset_stats()
                policy = self.policy_for(ind)
                for _ in range(cfg.rollouts_per_individual):
                    if budget.spent():
                        swept = False
                        break
                    delta = iterate(root, state, me, rng, spec.c, spec.rollout_depth, policy,
                                    spec.heuristic, spec.max_strength)
                    record_reward(ind, delta)
                    budget.tick()
                if not swept:
                    break
            if swept:
                self.champion = self.population.best().clone()
            if swept and spec.evolve:
                self.population = evolve(self.population, cfg, rng)
                self.evolutions += 1
        self.last_root = root
        self.iterations = budget.used
        return recommend(root)

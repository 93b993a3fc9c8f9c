"""Rolling horizon evolution over fixed-length action sequences."""

from __future__ import annotations

from ..rng import below
from .common import Budget, Memory, determinize


class RHEAAgent:
    def __init__(self, spec, rng, slot: int = 0):
        self.spec = spec
        self.rng = rng
        self.slot = slot
        self.memory = Memory.empty()
        self.buffer = None
        self.evaluations = 0

    def new_game(self) -> None:
        self.memory = Memory.empty()
        self.buffer = None

    def _random_seq(self, h):
        return [below(self.rng, 6) for _ in range(h)]

    def _evaluate(self, state, me, seq):
        s = state.copy()
        s.play(me, seq, self.rng)
        return s.evaluate(me, self.spec.heuristic, self.spec.max_strength)

    def _tournament(self, pop, fit):
        i, j = below(self.rng, len(pop)), below(self.rng, len(pop))
        return pop[i] if fit[i] >= fit[j] else pop[j]

    def act(self, obs) -> int:
        spec = self.spec
        budget = Budget(spec.budget_ms, spec.budget_iters)
        self.memory.update(obs)
        me = obs.viewer
        state = determinize(obs, self.memory)
        h, p = spec.horizon, spec.rhea_pop
        pop = [self._random_seq(h) for _ in range(p)]
        if self.buffer is not None and h > 1:
            pop[0] = self.buffer[1:] + [below(self.rng, 6)]
        fit = [float("-inf")] * p
        for i in range(p):
            if budget.spent():
                break
            fit[i] = self._evaluate(state, me, pop[i])
            budget.tick()
        best = max(range(p), key=lambda i: fit[i])
        best_seq = pop[best]
        while not budget.spent():
            nxt = [best_seq[:]]
            while len(nxt) < p:
                a, b = self._tournament(pop, fit), self._tournament(pop, fit)
                child = [a[k] if below(self.rng, 2) else b[k] for k in range(h)]
                child[below(self.rng, h)] = below(self.rng, 6)
                nxt.append(child)
            nfit = [float("-inf")] * p
            for i in range(p):
                if budget.spent():
                    break
                nfit[i] = self._evaluate(state, me, nxt[i])
                budget.tick()
            if nfit[0] == float("-inf"):
                break
            pop, fit = nxt, nfit
            i = max(range(p), key=lambda k: fit[k])
            best_seq = pop[i]
        self.evaluations = budget.used
        self.buffer = best_seq[:]
        return best_seq[0]

"""One-step look-ahead: try each legal action for a single tick with the
opponents standing still and keep the best heuristic value."""

from ..rng import below
from .common import Memory, determinize, legal_actions

STOP = 4


class OSLAAgent:
    def __init__(self, spec, rng, slot: int = 0):
        self.spec = spec
        self.rng = rng
        self.slot = slot
        self.memory = Memory.empty()

    def new_game(self) -> None:
        self.memory = Memory.empty()

    def act(self, obs) -> int:
        me = obs.viewer
        self.memory.update(obs)
        state = determinize(obs, self.memory)
        if state.done_for(me):
            return STOP
        best, best_v = [], float("-inf")
        for a in legal_actions(state, me):
            nxt = state.copy()
            acts = [STOP] * 4
            acts[me] = a
            nxt.step(acts)
            v = nxt.evaluate(me, self.spec.heuristic, self.spec.max_strength)
            if v > best_v:
                best, best_v = [a], v
            elif v == best_v:
                best.append(a)
        return best[below(self.rng, len(best))] if len(best) > 1 else best[0]

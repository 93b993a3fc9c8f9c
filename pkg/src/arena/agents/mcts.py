"""Open-loop UCT.  Nodes are keyed by the searching agent's own actions; the
three opponents play uniformly random legal actions on every descent."""

from __future__ import annotations

from math import log, sqrt

from ..rng import below
from .common import HEURISTIC_WEIGHTS, Budget, Memory, determinize, legal_actions


class TreeNode:
    __slots__ = ("visits", "child_visits", "child_value", "children", "actions", "depth")

    def __init__(self, actions, depth=0):
        self.visits = 1  # the expansion visit
        self.child_visits = [0] * 6
        self.child_value = [0.0] * 6
        self.children = [None] * 6
        self.actions = tuple(actions)
        self.depth = depth

    def ucb(self, a: int, c: float) -> float:
        n_a = self.child_visits[a]
        if n_a == 0:
            return float("inf")
        return self.child_value[a] + c * sqrt(log(self.visits) / n_a)

    def iter_nodes(self):
        todo = [self]
        while todo:
            node = todo.pop()
            yield node
            todo.extend(ch for ch in node.children if ch is not None)


def uct_select(node: TreeNode, c: float, rng) -> int:
    """Random unvisited action if any, else argmax UCB (lowest index on ties)."""
    unvisited = [a for a in node.actions if node.child_visits[a] == 0]
    if unvisited:
        return unvisited[below(rng, len(unvisited))] if len(unvisited) > 1 else unvisited[0]
    logn = log(node.visits)
    best_a, best_v = -1, float("-inf")
    for a in node.actions:
        v = node.child_value[a] + c * sqrt(logn / node.child_visits[a])
        if v > best_v:
            best_a, best_v = a, v
    return best_a


def recommend(node: TreeNode) -> int:
    """Most visited root action; lowest index wins ties."""
    best_a, best_n = 4, -1
    for a in node.actions:
        if node.child_visits[a] > best_n:
            best_a, best_n = a, node.child_visits[a]
    return best_a


def new_root(state, me: int) -> TreeNode:
    return TreeNode(legal_actions(state, me))


def iterate(root: TreeNode, root_state, me: int, rng, c: float = 1.41, depth: int = 12,
            policy=None, hw=HEURISTIC_WEIGHTS, max_strength: float = 10.0, counts=None) -> float:
    """One selection / expansion / rollout / backup pass.  Returns the reward."""
    state = root_state.copy()
    node = root
    path = []
    while not state.done_for(me):
        a = uct_select(node, c, rng)
        state.play(me, (a,), rng)
        path.append((node, a))
        child = node.children[a]
        if child is None:
            node.children[a] = TreeNode(legal_actions(state, me), node.depth + 1)
            break
        node = child
    if not state.done_for(me):
        state.rollout(me, depth, rng, policy, counts)
    delta = state.evaluate(me, hw, max_strength)
    for nd, a in path:
        nd.visits += 1
        k = nd.child_visits[a] + 1
        nd.child_visits[a] = k
        nd.child_value[a] += (delta - nd.child_value[a]) / k
    return delta


class MCTSAgent:
    """UCT with uniformly random rollouts."""

    def __init__(self, spec, rng, slot: int = 0):
        self.spec = spec
        self.rng = rng
        self.slot = slot
        self.memory = Memory.empty()
        self.last_root = None
        self.iterations = 0

    def new_game(self) -> None:
        self.memory = Memory.empty()

    def act(self, obs) -> int:
        spec = self.spec
        budget = Budget(spec.budget_ms, spec.budget_iters)
        self.memory.update(obs)
        me = obs.viewer
        state = determinize(obs, self.memory)
        root = new_root(state, me)
        while not budget.spent():
            iterate(root, state, me, self.rng, spec.c, spec.rollout_depth, None,
                    spec.heuristic, spec.max_strength)
            budget.tick()
        self.last_root = root
        self.iterations = budget.used
        return recommend(root)

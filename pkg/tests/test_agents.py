import math
import time

import numpy as np
import pytest

from arena.agents import (
    AgentSpec, Budget, FEMCTSAgent, MCTSAgent, OSLAAgent, RHEAAgent, TreeNode, determinize,
    heuristic_evaluate, iterate, make_agent, recommend, uct_select,
)
from arena.agents.mcts import new_root
from arena.engine import FULL, ConfigError, Mode, Tile, corners, generate_board, observe, step, visible_snapshot
from arena.features import RolloutPolicy
from arena.rng import make_rng
from conftest import BACKENDS, rebuild

U, D, L, R, S, B = range(6)


def _state(cls, agents=None, bombs=(), board=None, n=7, mode=Mode.FFA):
    if agents is None:
        agents = [(r, c, True, 1, 2, False) for r, c in corners(n)]
    return cls(n, board or [0] * n * n, [0] * n * n, [0] * n * n, list(bombs), agents, 0, 800,
               int(mode), 2, 10)


# -- heuristic ---------------------------------------------------------------

def _heuristic_oracle(enemy_dead, enemies, ammo, blast, kick, inv_bomb, wood_frac, alive,
                      w=(0.5, 0.15, 0.15, 0.1, 0.1)):
    cells = {
        "enemies": enemy_dead / enemies,
        "power": (min(ammo, 3) / 3 + min(max(blast - 2, 0), 3) / 3 + kick) / 3,
        "safety": 1 - inv_bomb,
        "wood": wood_frac,
        "alive": alive,
    }
    raw = sum(wi * v for wi, v in zip(w, cells.values())) / sum(w)
    return -0.9 + 1.8 * raw


def test_heuristic_initial_board(state_cls):
    s = rebuild(state_cls, generate_board(0))
    want = _heuristic_oracle(0, 3, 1, 2, 0, 0.0, 0.0, 1)
    assert heuristic_evaluate(s, 0) == pytest.approx(want, abs=1e-12)
    assert -1 < want < 1


def test_heuristic_mid_game(state_cls):
    n = 7
    board = [0] * 49
    board[10] = board[20] = Tile.WOOD
    agents = [(3, 3, True, 2, 4, True), (6, 0, False, 1, 2, False),
              (6, 6, True, 1, 2, False), (0, 6, True, 1, 2, False)]
    s = state_cls(n, board, [0] * 49, [0] * 49, [(3, 5, 2, 4, 2, -1)], agents, 5, 800, 0, 2, 10, 4)
    want = _heuristic_oracle(1, 3, 2, 4, 1, 1 / 3, 0.5, 1)
    assert heuristic_evaluate(s, 0) == pytest.approx(want, abs=1e-12)
    # team view: agent 0's enemies are 1 and 3
    s = state_cls(n, board, [0] * 49, [0] * 49, [(3, 5, 2, 4, 2, -1)], agents, 5, 800, 1, 2, 10, 4)
    assert heuristic_evaluate(s, 0) == pytest.approx(_heuristic_oracle(1, 2, 2, 4, 1, 1 / 3, 0.5, 1), abs=1e-12)


def test_heuristic_terminal_values(state_cls):
    flags = [(1, 0, 0, 0), (0, 1, 0, 0)]
    for f, want in zip(flags, (1.0, -1.0)):
        agents = [(r, c, bool(x), 1, 2, False) for (r, c), x in zip(corners(7), f)]
        assert heuristic_evaluate(_state(state_cls, agents), 0) == want
    agents = [(r, c, bool(x), 1, 2, False) for (r, c), x in zip(corners(7), (0, 1, 1, 0))]
    assert heuristic_evaluate(_state(state_cls, agents), 0) == -1.0   # dead, game on


# -- tree policy ---------------------------------------------------------------

def test_ucb_oracle():
    node = TreeNode((0, 1))
    node.visits = 13
    node.child_visits[0], node.child_visits[1] = 10, 2
    node.child_value[0], node.child_value[1] = 0.4, 0.1
    scores = [q + 1.41 * math.sqrt(math.log(13) / n) for q, n in ((0.4, 10), (0.1, 2))]
    assert uct_select(node, 1.41, make_rng(0)) == int(np.argmax(scores)) == 1
    assert node.ucb(1, 1.41) == pytest.approx(scores[1])


def test_unvisited_first_and_recommendation():
    node = TreeNode((0, 3, 4))
    node.child_visits[0] = node.child_visits[4] = 5
    node.visits = 11
    assert uct_select(node, 1.41, make_rng(0)) == 3
    node.child_visits[3] = 100
    assert recommend(node) == 3
    assert recommend(TreeNode((1, 2))) == 1


@pytest.mark.parametrize("nea", [None, 2, 3, 6])
def test_tree_invariants(state_cls, nea):
    s = rebuild(state_cls, generate_board(4))
    root = new_root(s, 0)
    rng = make_rng(1)
    policy = None
    if nea:
        policy = RolloutPolicy.from_matrix(np.full((nea, 8), 0.2), tuple(range(8)))
    for _ in range(300):
        d = iterate(root, s, 0, rng, depth=8, policy=policy)
        assert -1.0 <= d <= 1.0
    assert sum(root.child_visits) == 300
    for node in root.iter_nodes():
        assert node.visits == sum(node.child_visits) + 1
        for a in range(6):
            if node.child_visits[a] == 0:
                assert node.children[a] is None or node.children[a].visits == 1
            assert -1.0 <= node.child_value[a] <= 1.0
        assert set(a for a in range(6) if node.child_visits[a]) <= set(node.actions)


def test_q_is_running_mean(state_cls):
    s = rebuild(state_cls, generate_board(4))
    root = new_root(s, 0)
    rng = make_rng(2)
    rewards = {a: [] for a in range(6)}
    for _ in range(60):
        before = list(root.child_visits)
        d = iterate(root, s, 0, rng, depth=4)
        a = [i for i in range(6) if root.child_visits[i] != before[i]][0]
        rewards[a].append(d)
    for a, rs in rewards.items():
        if rs:
            assert root.child_value[a] == pytest.approx(sum(rs) / len(rs), abs=1e-12)


# -- agents --------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["osla", "mcts", "rhea", "femcts"])
def test_agents_are_deterministic_under_iteration_caps(kind):
    spec = AgentSpec(kind, budget_iters=60)
    runs = []
    for _ in range(2):
        agent = make_agent(spec, make_rng(7))
        s = generate_board(2)
        acts = []
        for _ in range(15):
            acts.append(agent.act(observe(s, 0)))
            s = step(s, [acts[-1], S, S, S])
        runs.append(acts)
    assert runs[0] == runs[1]
    assert all(0 <= a < 6 for a in runs[0])


@pytest.mark.parametrize("kind", ["mcts", "rhea", "femcts"])
def test_wall_clock_budget_is_respected(kind):
    agent = make_agent(AgentSpec(kind, budget_ms=20), make_rng(0))
    obs = observe(generate_board(1), 0)
    agent.act(obs)  # warm up
    t0 = time.perf_counter()
    agent.act(obs)
    assert (time.perf_counter() - t0) * 1000 < 20 * 3


def test_budget_grants_one_iteration():
    b = Budget(1e-9)
    assert not b.spent()
    b.tick()
    assert b.spent()
    b = Budget(iters=3)
    for _ in range(3):
        assert not b.spent()
        b.tick()
    assert b.spent()


def _osla_escape_state(cls):
    n = 7
    board = [0] * 49
    board[2 * n + 3] = board[4 * n + 3] = Tile.RIGID
    agents = [(3, 3, True, 1, 2, False), (6, 0, True, 1, 2, False),
              (6, 6, True, 1, 2, False), (0, 6, True, 1, 2, False)]
    return _state(cls, agents, bombs=[(3, 2, 1, 1, 2, -1)], board=board)


def test_osla_takes_the_only_escape(state_cls):
    s = _osla_escape_state(state_cls)
    agent = OSLAAgent(AgentSpec("osla"), make_rng(0))
    for seed in range(50):
        agent.rng = make_rng(seed)
        assert agent.act(observe(s, 0)) == R


def test_osla_explores_equivalent_actions(state_cls):
    agents = [(3, 3, True, 0, 2, False), (6, 0, True, 1, 2, False),
              (6, 6, True, 1, 2, False), (0, 6, True, 1, 2, False)]
    s = _state(state_cls, agents)
    agent = OSLAAgent(AgentSpec("osla"), make_rng(1))
    seen = {agent.act(observe(s, 0)) for _ in range(1000)}
    assert seen == {U, D, L, R, S}


def test_femcts_evolves_once_per_sweep():
    spec = AgentSpec("femcts", budget_iters=40, pop_size=10, rollouts_per_individual=4)
    agent = FEMCTSAgent(spec, make_rng(3))
    obs = observe(generate_board(3), 0)
    agent.act(obs)
    assert agent.evolutions == 1 and agent.iterations == 40
    agent2 = FEMCTSAgent(AgentSpec("femcts", budget_iters=39), make_rng(3))
    agent2.act(obs)
    assert agent2.evolutions == 0
    assert [ind.evaluations for ind in agent2.population.members] == [4] * 9 + [3]


def test_every_individual_has_l_evaluations_when_evolving(monkeypatch):
    import arena.agents.femcts as fm
    seen = []
    real = fm.evolve

    def spy(pop, cfg, rng):
        seen.append([ind.evaluations for ind in pop.members])
        return real(pop, cfg, rng)

    monkeypatch.setattr(fm, "evolve", spy)
    agent = FEMCTSAgent(AgentSpec("femcts", budget_iters=130, rollouts_per_individual=4), make_rng(5))
    agent.act(observe(generate_board(3), 0))
    assert seen == [[4] * 10] * 3


def test_femcts_population_carries_over():
    spec = AgentSpec("femcts", budget_iters=80)
    agent = FEMCTSAgent(spec, make_rng(4))
    agent.act(observe(generate_board(3), 0))
    before = [ind.weights.copy() for ind in agent.population.members]
    agent.new_game()
    assert all(np.array_equal(a, b.weights) for a, b in zip(before, agent.population.members))
    assert agent.population.generation == 2


def test_femcts_seed_file(tmp_path):
    from arena.evo import save_seed
    w = np.full((2, 8), 0.25)
    p = tmp_path / "seed.txt"
    save_seed(w, p)
    agent = FEMCTSAgent(AgentSpec("femcts", seed_path=str(p)), make_rng(0))
    assert all(np.array_equal(ind.weights, w) for ind in agent.population.members)
    save_seed(np.zeros((3, 8)), p)
    with pytest.raises(ConfigError):
        make_agent(AgentSpec("femcts", seed_path=str(p)), make_rng(0))
    with pytest.raises(ConfigError):
        make_agent(AgentSpec("femcts", seed_path=str(tmp_path / "missing.txt")), make_rng(0))


def test_bomb_biased_policy_bombs_more(state_cls):
    s = rebuild(state_cls, generate_board(5))
    biased = RolloutPolicy.from_matrix([[0.0] * 8, [2.0] * 8], tuple(range(8)))
    zero = RolloutPolicy.from_matrix([[0.0] * 8, [0.0] * 8], tuple(range(8)))
    tallies = []
    for pol in (zero, biased):
        counts = [0] * 6
        rng = make_rng(6)
        for _ in range(300):
            s.copy().rollout(0, 12, rng, pol, counts)
        tallies.append(counts[B] / sum(counts))
    assert tallies[0] == pytest.approx(0.5, abs=0.05)
    assert tallies[1] > 0.8


def test_zero_weight_femcts_equals_mcts_rollouts():
    s = generate_board(6)
    pol = RolloutPolicy.from_matrix(np.zeros((6, 8)), tuple(range(8)))
    for _, cls in BACKENDS:
        k = rebuild(cls, s)
        a, b = k.copy(), k.copy()
        a.rollout(0, 30, make_rng(8), None)
        b.rollout(0, 30, make_rng(8), pol)
        assert visible_snapshot(a) == visible_snapshot(b)


@pytest.mark.parametrize("seed", range(5))
def test_determinize_reproduces_full_view(seed):
    rng = np.random.default_rng(seed)
    s = generate_board(seed)
    for _ in range(25):
        if s.result() is not None:
            break
        s = step(s, [int(rng.integers(6)) for _ in range(4)])
    for i in range(4):
        d = determinize(observe(s, i, FULL))
        assert visible_snapshot(d) == visible_snapshot(s)


def test_determinize_under_fog_places_hidden_agents():
    s = generate_board(0)
    d = determinize(observe(s, 0, 2))
    cells = [a[:2] for a in d.agents]
    assert cells == corners(11) and all(a[2] for a in d.agents)
    assert Tile.FOG not in d.board


def test_rhea_horizon_one_is_lookahead(state_cls):
    s = _osla_escape_state(state_cls)
    agent = RHEAAgent(AgentSpec("rhea", horizon=1, budget_iters=60), make_rng(0))
    assert agent.act(observe(s, 0)) == R


def test_mcts_avoids_obvious_death(state_cls):
    s = _osla_escape_state(state_cls)
    agent = MCTSAgent(AgentSpec("mcts", budget_iters=200), make_rng(0))
    assert agent.act(observe(s, 0)) == R


@pytest.mark.parametrize("kw", [
    dict(kind="bogus"), dict(kind="mcts", budget_ms=0), dict(kind="mcts", budget_iters=0),
    dict(kind="femcts", nea=4), dict(kind="rhea", horizon=0),
])
def test_bad_specs(kw):
    with pytest.raises(ConfigError):
        AgentSpec(**kw)


def test_enemy_keyed_bomb_weight_raises_bomb_rate_near_enemies(state_cls):
    agents = [(3, 3, True, 1, 2, False), (3, 4, True, 1, 2, False),
              (6, 6, True, 1, 2, False), (0, 6, True, 1, 2, False)]
    s = _state(state_cls, agents)
    w = np.zeros((2, 8))
    w[1, 4] = 6.0  # bomb row, inverse distance to the nearest enemy
    seeded = RolloutPolicy.from_matrix(w, tuple(range(8)))
    rng = make_rng(11)
    n = 10_000
    bombs = sum(s.sample_policy_action(0, rng, seeded) == B for _ in range(n))
    baseline = sum(s.sample_policy_action(0, rng, None) == B for _ in range(n))
    assert bombs / n > 0.8 > 0.25 > baseline / n

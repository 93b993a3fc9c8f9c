"""Property-based checks over arbitrary inputs."""

import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from arena.engine import GameConfig, Mode, generate_board, outcome, snapshot, step
from arena.evo import EvoConfig, Individual, MutationStyle, Population, evolve, load_seed, mutate, save_seed
from arena.features import ActionSpace, default_policy_distribution, softmax
from arena.replay import Replay, format_replay, parse_replay
from conftest import BACKENDS, rebuild

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
spaces = st.sampled_from(list(ActionSpace))


@st.composite
def space_and_weights(draw):
    space = draw(spaces)
    return space, draw(st.lists(finite, min_size=space.nea, max_size=space.nea))


@given(space_and_weights())
def test_distribution_is_a_distribution(sw):
    space, w = sw
    p = default_policy_distribution(w, space)
    assert len(p) == 6 and min(p) >= 0.0
    assert abs(sum(p) - 1.0) <= 1e-9


@given(space_and_weights(), st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_shift_invariance(sw, shift):
    space, w = sw
    # the move factor scales the move logit, so shift the post-factor logits
    logits = list(w)
    logits[0] *= space.move_factor
    shifted = [x + shift for x in logits]
    a, b = softmax(logits), softmax(shifted)
    assert all(abs(x - y) <= 1e-9 for x, y in zip(a, b))


@given(st.sampled_from([2, 3, 6]), st.integers(0, 5),
       st.lists(st.floats(-20, 20, allow_nan=False), min_size=6, max_size=6),
       st.floats(0.01, 5.0))
def test_monotone_in_own_weight(nea, i, w, bump):
    space = ActionSpace.from_nea(nea)
    w = w[:nea]
    i %= nea
    before = softmax([x * (space.move_factor if k == 0 else 1) for k, x in enumerate(w)])
    w2 = list(w)
    w2[i] += bump
    after = softmax([x * (space.move_factor if k == 0 else 1) for k, x in enumerate(w2)])
    assume(0 < before[i] < 1 and before[i] < 1 - 1e-12)
    assert after[i] > before[i]


@given(st.floats(-50, 50, allow_nan=False))
def test_equal_movement_mass_in_two_action_space(w):
    p = default_policy_distribution([w, 5 * w], ActionSpace.MOVEMENT_BOMB)
    assert math.isclose(p[0], p[5] / 5, rel_tol=1e-9)
    assert len({round(x, 15) for x in p[:5]}) == 1


@st.composite
def evo_cases(draw):
    nea = draw(st.sampled_from([2, 3, 6]))
    nf = draw(st.integers(1, 8))
    P = draw(st.integers(1, 10))
    cfg = EvoConfig.for_space(
        nea, nf, pop_size=P, elites=draw(st.integers(0, P)), tournament=draw(st.integers(1, P)),
        mutation_prob=draw(st.floats(0, 1)), mutation_strength=draw(st.floats(1e-5, 1.0)),
        style=draw(st.sampled_from(list(MutationStyle))))
    return cfg, draw(st.integers(0, 2**32 - 1))


@given(evo_cases())
@settings(max_examples=200)
def test_evolve_invariants(case):
    cfg, seed = case
    rng = np.random.default_rng(seed)
    base = rng.random((cfg.pop_size, cfg.nea, cfg.nf))
    fit = rng.normal(size=cfg.pop_size)
    pop = Population([Individual(base[i].copy(), float(fit[i]), 1) for i in range(cfg.pop_size)])
    nxt = evolve(pop, cfg, rng)
    assert len(nxt) == cfg.pop_size and nxt.generation == 1
    for i in np.argsort(-fit, kind="stable")[:cfg.elites]:
        assert any(np.array_equal(base[i], m.weights) for m in nxt.members)
    if cfg.nonnegative:
        assert all((m.weights >= 0).all() for m in nxt.members)


@given(evo_cases())
def test_zero_probability_evolve_is_idempotent_on_identical_members(case):
    cfg, seed = case
    cfg = EvoConfig(**{**cfg.__dict__, "mutation_prob": 0.0})
    w = np.abs(np.random.default_rng(seed).normal(size=(cfg.nea, cfg.nf)))
    pop = Population([Individual(w.copy(), float(i), 1) for i in range(cfg.pop_size)])
    nxt = evolve(pop, cfg, np.random.default_rng(seed))
    assert all(np.array_equal(m.weights, w) for m in nxt.members)


@given(st.integers(1, 6), st.integers(1, 10), st.data())
@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_seed_file_round_trip(tmp_path_factory, rows, cols, data):
    vals = data.draw(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                              min_size=rows * cols, max_size=rows * cols))
    w = np.array(vals).reshape(rows, cols)
    path = tmp_path_factory.mktemp("seed") / "w.txt"
    save_seed(w, path)
    assert np.array_equal(load_seed(path, (rows, cols)), w)


@given(st.integers(0, 10**6), st.sampled_from(["ffa", "team"]), st.sampled_from([None, 0, 2, 4]),
       st.lists(st.tuples(*[st.integers(-1, 5)] * 4), max_size=40),
       st.text(alphabet="WTL", min_size=4, max_size=4), st.integers(1, 900))
def test_replay_text_round_trip(seed, mode, vision, actions, code, max_ticks):
    m = Mode.TEAM if mode == "team" else Mode.FFA
    rep = Replay(seed, m, vision, GameConfig(mode=m, max_ticks=max_ticks), actions, code)
    text = format_replay(rep)
    assert parse_replay(text) == rep
    assert format_replay(parse_replay(text)) == text


@given(st.integers(0, 10**6), st.lists(st.tuples(*[st.integers(0, 5)] * 4), min_size=1, max_size=60))
@settings(max_examples=60, deadline=None)
def test_backends_agree_on_arbitrary_play(seed, actions):
    base = generate_board(seed, GameConfig.mini(max_ticks=200))
    states = [rebuild(cls, base) for _, cls in BACKENDS]
    for acts in actions:
        if states[0].result() is not None:
            break
        states = [step(s, acts) for s in states]
        snaps = {snapshot(s) for s in states}
        assert len(snaps) == 1
        assert len({s.evaluate(0) for s in states}) == 1
    assert len({outcome(s).code for s in states}) == 1


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_mutation_keeps_shape_and_bounds(seed):
    cfg = EvoConfig(nea=6, nf=3, mutation_prob=1.0, mutation_strength=0.5)
    w = np.zeros((6, 3))
    out = mutate(Individual(w), cfg, np.random.default_rng(seed)).weights
    assert out.shape == (6, 3) and np.all(np.abs(out) <= 0.5) and np.all(out != 0)


@given(st.integers(0, 10**6), st.lists(st.tuples(*[st.integers(0, 5)] * 4), min_size=1, max_size=80))
@settings(max_examples=80, deadline=None)
def test_rule_invariants_under_random_play(seed, actions):
    s = generate_board(seed, GameConfig(max_ticks=100))
    rigid = s.board.count(1)
    for acts in actions:
        if s.result() is not None:
            break
        before = s
        s = step(s, acts)
        assert s.board.count(1) == rigid
        assert s.board.count(2) <= before.board.count(2)
        assert 6 not in s.board  # fog never appears in ground truth
        cells = [b[:2] for b in s.bombs]
        assert len(cells) == len(set(cells))
        live = [a[:2] for a in s.agents if a[2]]
        assert len(live) == len(set(live))
        for r, c in live:
            assert s.board[r * s.n + c] not in (1, 2)
        old_fuse = {(b[0], b[1], b[2]): b[3] for b in before.bombs}
        for b in s.bombs:
            assert 0 < b[3] <= s.bomb_life and b[4] >= 2
            if b[5] == -1 and (b[0], b[1], b[2]) in old_fuse:
                assert b[3] == old_fuse[(b[0], b[1], b[2])] - 1
        for i in range(4):
            gained = s.agents[i][3] + sum(b[2] == i for b in s.bombs) - (
                before.agents[i][3] + sum(b[2] == i for b in before.bombs))
            # only an extra-bomb pickup changes an agent's bomb budget, by exactly one
            assert gained in (0, 1)
            if gained:
                r, c = s.agents[i][:2]
                assert before.board[r * s.n + c] == 3

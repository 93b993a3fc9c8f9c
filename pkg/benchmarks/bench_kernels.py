"""Compiled kernel vs pure-Python fallback on the hot paths.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both kernels are fed the same mid-game states and RNG seeds, so the work done
is identical (they are bit-for-bit equivalent); only the speed differs.
"""

import argparse
import timeit

import numpy as np

from arena import _backend
from arena.engine import generate_board, step
from arena.features import RolloutPolicy
from arena.rng import make_rng


def midgame_states(k=8, ticks=25):
    """Ongoing games after ``ticks`` random moves, with agent 0 still alive."""
    out = []
    seed = 0
    while len(out) < k:
        rng = np.random.default_rng(seed)
        s = generate_board(seed)
        for _ in range(ticks):
            if s.result() is not None:
                break
            s = step(s, [int(rng.integers(6)) for _ in range(4)])
        if s.result() is None and s.agents[0][2]:
            out.append(s)
        seed += 1
    return out


def convert(cls, s):
    return cls(s.n, s.board, s.hidden, s.flames, s.bombs, s.agents, s.tick, s.max_ticks,
               s.mode, s.flame_life, s.bomb_life, s.initial_wood)


def workloads(states):
    pol = RolloutPolicy.from_matrix(np.full((2, 8), 0.1), tuple(range(8)))
    rng = make_rng(0)

    def copy_step():
        for s in states:
            s.copy().step([4, 4, 4, 4])

    def rollout():
        for s in states:
            s.copy().rollout(0, 12, rng)

    def policy_rollout():
        for s in states:
            s.copy().rollout(0, 12, rng, pol)

    def features():
        for s in states:
            s.features(0)

    def evaluate():
        for s in states:
            s.evaluate(0)

    return {"copy+step": copy_step, "rollout(12)": rollout, "policy rollout(12)": policy_rollout,
            "features": features, "evaluate": evaluate}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args()
    base = midgame_states()
    kinds = [("python", _backend.PyState)]
    if _backend.CState is not None:
        kinds.append(("compiled", _backend.CState))
    else:
        print("compiled kernel not available; timing the fallback only")
    per_call = {}
    for name, cls in kinds:
        for label, fn in workloads([convert(cls, s) for s in base]).items():
            best = min(timeit.repeat(fn, number=args.number, repeat=args.repeat))
            per_call[(name, label)] = best / (args.number * len(base)) * 1e6
    labels = list(workloads(base))
    print(f"{'operation':<20} {'python us':>10} {'compiled us':>12} {'speedup':>8}")
    for label in labels:
        py = per_call[("python", label)]
        if ("compiled", label) in per_call:
            c = per_call[("compiled", label)]
            print(f"{label:<20} {py:10.2f} {c:12.2f} {py / c:7.1f}x")
        else:
            print(f"{label:<20} {py:10.2f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()

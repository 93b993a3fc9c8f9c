"""Pure-Python forward-model kernel.

This is the fallback used when the compiled ``arena._core`` extension is not
available.  Both kernels expose the same ``State`` API and consume random
numbers from the same numpy ``PCG64`` stream in the same order, so a game
played with either backend is bit-identical.
"""

from math import exp, sqrt

PASSAGE, RIGID, WOOD, EXTRA_BOMB, INCR_RANGE, KICK, FOG = range(7)
UP, DOWN, LEFT, RIGHT, STOP, BOMB = range(6)
FFA, TEAM = 0, 1

DR = (-1, 1, 0, 0)
DC = (0, 0, -1, 1)
MAX_CELLS = 256
MAX_BOMBS = 64
N_FEATURES = 8
CONST_FEATURE = 8  # feature index meaning "constant 1"

_INV53 = 1.0 / 9007199254740992.0
_UNIFORM6 = (1.0 / 6.0,) * 6


def _u01(raw):
    return (raw() >> 11) * _INV53


def _below(raw, n):
    return ((raw() >> 11) * n) >> 53


def _sample(probs, u):
    acc = 0.0
    last = 0
    for i in range(6):
        p = probs[i]
        if p > 0.0:
            last = i
        acc += p
        if u < acc:
            return i
    return last


def policy_probs(nea, feat_idx, weights, feats):
    """Concrete 6-action distribution for an effective-action softmax policy."""
    nf = len(feat_idx)
    logits = []
    for i in range(nea):
        s = 0.0
        base = i * nf
        for j in range(nf):
            k = feat_idx[j]
            fv = 1.0 if k == CONST_FEATURE else feats[k]
            s += weights[base + j] * fv
        logits.append(s)
    if nea == 3:
        logits[0] = 4.0 * logits[0]
    elif nea == 2:
        logits[0] = 5.0 * logits[0]
    m = logits[0]
    for v in logits:
        if v > m:
            m = v
    es = [exp(v - m) for v in logits]
    tot = 0.0
    for e in es:
        tot += e
    q = [e / tot for e in es]
    if nea == 6:
        return q
    if nea == 3:
        mv = q[0] / 4.0
        return [mv, mv, mv, mv, q[1], q[2]]
    mv = q[0] / 5.0
    return [mv, mv, mv, mv, mv, q[1]]


class State:
    """Mutable game state.  ``step`` advances it in place."""

    __slots__ = (
        "n", "tick", "max_ticks", "mode", "flame_life", "bomb_life",
        "initial_wood", "_board", "_hidden", "_flames", "_bombs", "_agents",
    )

    def __init__(self, n, board, hidden, flames, bombs, agents, tick=0,
                 max_ticks=800, mode=FFA, flame_life=2, bomb_life=10,
                 initial_wood=-1):
        nn = n * n
        if n < 2 or nn > MAX_CELLS:
            raise ValueError(f"unsupported board size {n}")
        if len(board) != nn or len(hidden) != nn or len(flames) != nn:
            raise ValueError("grid arrays must have n*n entries")
        if len(agents) != 4:
            raise ValueError("exactly four agents are required")
        if len(bombs) > MAX_BOMBS:
            raise ValueError("too many bombs")
        self.n = n
        self.tick = int(tick)
        self.max_ticks = int(max_ticks)
        self.mode = int(mode)
        self.flame_life = int(flame_life)
        self.bomb_life = int(bomb_life)
        self._board = [int(x) for x in board]
        self._hidden = [int(x) for x in hidden]
        self._flames = [int(x) for x in flames]
        self._bombs = [[int(r) * n + int(c), int(o), int(f), int(s), int(d)]
                       for r, c, o, f, s, d in bombs]
        self._agents = [[int(r) * n + int(c), int(bool(al)), int(am), int(bl), int(bool(k))]
                        for r, c, al, am, bl, k in agents]
        if initial_wood < 0:
            initial_wood = self._board.count(WOOD)
        self.initial_wood = int(initial_wood)

    # -- export -----------------------------------------------------------
    @property
    def board(self):
        return list(self._board)

    @property
    def hidden(self):
        return list(self._hidden)

    @property
    def flames(self):
        return list(self._flames)

    @property
    def bombs(self):
        n = self.n
        return [(p // n, p % n, o, f, s, d) for p, o, f, s, d in self._bombs]

    @property
    def agents(self):
        n = self.n
        return [(p // n, p % n, bool(al), am, bl, bool(k)) for p, al, am, bl, k in self._agents]

    def copy(self):
        s = State.__new__(State)
        s.n = self.n
        s.tick = self.tick
        s.max_ticks = self.max_ticks
        s.mode = self.mode
        s.flame_life = self.flame_life
        s.bomb_life = self.bomb_life
        s.initial_wood = self.initial_wood
        s._board = self._board[:]
        s._hidden = self._hidden[:]
        s._flames = self._flames[:]
        s._bombs = [b[:] for b in self._bombs]
        s._agents = [a[:] for a in self._agents]
        return s

    # -- rules ------------------------------------------------------------
    def result(self):
        """None while ongoing, else per-agent outcome (1 win, 0 tie, -1 loss)."""
        al = [a[1] for a in self._agents]
        if self.mode == FFA:
            cnt = al[0] + al[1] + al[2] + al[3]
            if cnt == 1:
                return tuple(1 if x else -1 for x in al)
            if cnt == 0:
                return (-1, -1, -1, -1)
            if self.tick >= self.max_ticks:
                return tuple(0 if x else -1 for x in al)
            return None
        t0 = al[0] or al[2]
        t1 = al[1] or al[3]
        if not t0 and not t1:
            return (0, 0, 0, 0)
        if not t0:
            return (-1, 1, -1, 1)
        if not t1:
            return (1, -1, 1, -1)
        if self.tick >= self.max_ticks:
            return (0, 0, 0, 0)
        return None

    def done_for(self, agent):
        """True once the agent's own outcome can no longer change."""
        ags = self._agents
        if self.mode == FFA:
            if not ags[agent][1]:
                return True
        elif not (ags[agent][1] or ags[agent ^ 2][1]):
            return True
        return self.result() is not None

    def _bomb_index(self, cell):
        for i, b in enumerate(self._bombs):
            if b[0] == cell:
                return i
        return -1

    def legal_mask(self, agent):
        a = self._agents[agent]
        if not a[1]:
            return 1 << STOP
        n = self.n
        board = self._board
        p = a[0]
        r, c = divmod(p, n)
        mask = 1 << STOP
        for d in range(4):
            nr = r + DR[d]
            nc = c + DC[d]
            if 0 <= nr < n and 0 <= nc < n:
                t = board[nr * n + nc]
                if t != RIGID and t != WOOD:
                    mask |= 1 << d
        if a[2] > 0 and self._bomb_index(p) < 0:
            mask |= 1 << BOMB
        return mask

    def step(self, actions):
        if self.result() is not None:
            raise ValueError("cannot step a finished game")
        n = self.n
        nn = n * n
        board = self._board
        hidden = self._hidden
        flames = self._flames
        bombs = self._bombs
        agents = self._agents

        # flames burn down; destroyed wood reveals its power-up once clear
        for c in range(nn):
            f = flames[c]
            if f:
                f -= 1
                flames[c] = f
                if f == 0 and hidden[c]:
                    board[c] = hidden[c]
                    hidden[c] = 0

        # fuses and (chained) explosions against the pre-blast board
        for b in bombs:
            b[2] -= 1
        nb = len(bombs)
        queue = [i for i in range(nb) if bombs[i][2] <= 0]
        if queue:
            exploding = [False] * nb
            for i in queue:
                exploding[i] = True
            at = {b[0]: i for i, b in enumerate(bombs)}
            blast = [False] * nn
            while queue:
                i = queue.pop()
                p, _, _, s, _ = bombs[i]
                blast[p] = True
                r, c = divmod(p, n)
                for d in range(4):
                    nr, nc = r, c
                    for _k in range(1, s):
                        nr += DR[d]
                        nc += DC[d]
                        if nr < 0 or nr >= n or nc < 0 or nc >= n:
                            break
                        q = nr * n + nc
                        t = board[q]
                        if t == RIGID:
                            break
                        blast[q] = True
                        if t == WOOD:
                            break
                        j = at.get(q, -1)
                        if j >= 0 and not exploding[j]:
                            exploding[j] = True
                            queue.append(j)
            fl = self.flame_life
            for q in range(nn):
                if blast[q]:
                    t = board[q]
                    if t != PASSAGE:
                        board[q] = PASSAGE
                    flames[q] = fl
            keep = []
            for i in range(nb):
                if exploding[i]:
                    agents[bombs[i][1]][2] += 1
                else:
                    keep.append(bombs[i])
            bombs[:] = keep

        alive = [a[1] for a in agents]
        pos = [a[0] for a in agents]

        # bomb placement; the placer stays put this tick
        for i in range(4):
            if alive[i] and actions[i] == BOMB:
                a = agents[i]
                if a[2] > 0 and len(bombs) < MAX_BOMBS and self._bomb_index(a[0]) < 0:
                    bombs.append([a[0], i, self.bomb_life, a[3], -1])
                    a[2] -= 1

        # desired moves
        want = pos[:]
        mdir = [-1, -1, -1, -1]
        for i in range(4):
            act = actions[i]
            if alive[i] and 0 <= act < 4:
                r, c = divmod(pos[i], n)
                nr = r + DR[act]
                nc = c + DC[act]
                if 0 <= nr < n and 0 <= nc < n:
                    q = nr * n + nc
                    t = board[q]
                    if t != RIGID and t != WOOD:
                        if self._bomb_index(q) >= 0 and not agents[i][4]:
                            continue
                        want[i] = q
                        mdir[i] = act
        _resolve(pos, want, alive)

        # kicks
        kicked = None
        for i in range(4):
            if not alive[i] or want[i] == pos[i]:
                continue
            j = self._bomb_index(want[i])
            if j < 0:
                continue
            d = mdir[i]
            r, c = divmod(want[i], n)
            nr = r + DR[d]
            nc = c + DC[d]
            ok = 0 <= nr < n and 0 <= nc < n
            if ok:
                q = nr * n + nc
                ok = (board[q] == PASSAGE and flames[q] == 0 and self._bomb_index(q) < 0)
                if ok:
                    for k in range(4):
                        if alive[k] and (pos[k] == q or want[k] == q):
                            ok = False
                            break
            if ok:
                bombs[j][0] = q
                bombs[j][4] = d
                if kicked is None:
                    kicked = set()
                kicked.add(id(bombs[j]))
            else:
                want[i] = pos[i]
        _resolve(pos, want, alive)

        for i in range(4):
            if alive[i]:
                a = agents[i]
                q = want[i]
                a[0] = q
                t = board[q]
                if t == EXTRA_BOMB:
                    a[2] += 1
                    board[q] = PASSAGE
                elif t == INCR_RANGE:
                    a[3] += 1
                    board[q] = PASSAGE
                elif t == KICK:
                    a[4] = 1
                    board[q] = PASSAGE

        # bombs in flight slide one cell
        for b in bombs:
            d = b[4]
            if d < 0 or (kicked is not None and id(b) in kicked):
                continue
            r, c = divmod(b[0], n)
            nr = r + DR[d]
            nc = c + DC[d]
            ok = 0 <= nr < n and 0 <= nc < n
            if ok:
                q = nr * n + nc
                ok = board[q] == PASSAGE and flames[q] == 0 and self._bomb_index(q) < 0
                if ok:
                    for k in range(4):
                        if alive[k] and want[k] == q:
                            ok = False
                            break
            if ok:
                b[0] = q
            else:
                b[4] = -1

        for i in range(4):
            if alive[i] and flames[agents[i][0]]:
                agents[i][1] = 0

        self.tick += 1

    # -- search helpers ---------------------------------------------------
    def features(self, agent, max_strength=10.0):
        """[bombStrength, canKick, and inverse distances to bomb, power-up,
        enemy, rigid, flame, wood]."""
        n = self.n
        a = self._agents[agent]
        r0, c0 = divmod(a[0], n)
        bs = a[3] * a[2] / (2.0 * max_strength)
        if bs > 1.0:
            bs = 1.0
        elif bs < 0.0:
            bs = 0.0
        big = 1 << 30
        d_bomb = d_pu = d_en = d_rig = d_fl = d_wood = big
        for b in self._bombs:
            r, c = divmod(b[0], n)
            d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0)
            if d2 < d_bomb:
                d_bomb = d2
        ags = self._agents
        team = self.mode == TEAM
        for j in range(4):
            if j == agent or not ags[j][1] or (team and (j & 1) == (agent & 1)):
                continue
            r, c = divmod(ags[j][0], n)
            d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0)
            if d2 < d_en:
                d_en = d2
        board = self._board
        flames = self._flames
        q = 0
        for r in range(n):
            dr2 = (r - r0) * (r - r0)
            for c in range(n):
                t = board[q]
                if t or flames[q]:
                    d2 = dr2 + (c - c0) * (c - c0)
                    if t == RIGID:
                        if d2 < d_rig:
                            d_rig = d2
                    elif t == WOOD:
                        if d2 < d_wood:
                            d_wood = d2
                    elif EXTRA_BOMB <= t <= KICK:
                        if d2 < d_pu:
                            d_pu = d2
                    if flames[q] and d2 < d_fl:
                        d_fl = d2
                q += 1
        return (
            bs,
            1.0 if a[4] else 0.0,
            0.0 if d_bomb == big else 1.0 / (sqrt(d_bomb) + 1.0),
            0.0 if d_pu == big else 1.0 / (sqrt(d_pu) + 1.0),
            0.0 if d_en == big else 1.0 / (sqrt(d_en) + 1.0),
            0.0 if d_rig == big else 1.0 / (sqrt(d_rig) + 1.0),
            0.0 if d_fl == big else 1.0 / (sqrt(d_fl) + 1.0),
            0.0 if d_wood == big else 1.0 / (sqrt(d_wood) + 1.0),
        )

    def evaluate(self, agent, hw=(0.5, 0.15, 0.15, 0.1, 0.1), max_strength=10.0):
        """Heuristic reward in [-1, 1] from ``agent``'s point of view."""
        res = self.result()
        if res is not None:
            return float(res[agent])
        ags = self._agents
        me = ags[agent]
        if self.mode == FFA:
            if not me[1]:
                return -1.0
            enemies = [j for j in range(4) if j != agent]
        else:
            if not (me[1] or ags[agent ^ 2][1]):
                return -1.0
            enemies = [j for j in range(4) if (j & 1) != (agent & 1)]
        dead = 0
        for j in enemies:
            if not ags[j][1]:
                dead += 1
        enemy_score = dead / len(enemies)
        am = me[2] if me[2] < 3 else 3
        bl = me[3] - 2
        if bl > 3:
            bl = 3
        elif bl < 0:
            bl = 0
        power = (am / 3.0 + bl / 3.0 + (1.0 if me[4] else 0.0)) / 3.0
        if me[1]:
            safety = 1.0 - self.features(agent, max_strength)[2]
        else:
            safety = 0.0
        iw = self.initial_wood
        if iw > 0:
            wood = (iw - self._board.count(WOOD)) / iw
            if wood < 0.0:
                wood = 0.0
        else:
            wood = 0.0
        self_alive = 1.0 if me[1] else 0.0
        tot = hw[0] + hw[1] + hw[2] + hw[3] + hw[4]
        raw = (hw[0] * enemy_score + hw[1] * power + hw[2] * safety
               + hw[3] * wood + hw[4] * self_alive) / tot
        return -0.9 + 1.8 * raw

    def random_legal(self, agent, rng):
        return _pick_bit(self.legal_mask(agent), rng.bit_generator.random_raw)

    def play(self, agent, seq, rng):
        """Apply ``agent``'s action sequence against uniformly random legal
        opponents, stopping early once the agent's outcome is settled."""
        raw = rng.bit_generator.random_raw
        ags = self._agents
        played = 0
        for act in seq:
            if self.done_for(agent):
                break
            acts = [STOP, STOP, STOP, STOP]
            acts[agent] = act
            for j in range(4):
                if j != agent and ags[j][1]:
                    acts[j] = _pick_bit(self.legal_mask(j), raw)
            self.step(acts)
            played += 1
        return played

    def rollout(self, agent, depth, rng, policy=None, counts=None):
        """Default-policy playout of at most ``depth`` ticks.

        ``policy`` is None for uniform play, else an object with ``nea``,
        ``feature_idx``, ``weights`` (row-major) and ``max_strength``.
        ``counts`` (length-6 list) tallies the agent's sampled actions.
        """
        raw = rng.bit_generator.random_raw
        ags = self._agents
        n = self.n
        if policy is not None:
            nea = policy.nea
            fidx = tuple(policy.feature_idx)
            wts = tuple(policy.weights)
            ms = policy.max_strength
        played = 0
        for _ in range(depth):
            if self.done_for(agent):
                break
            acts = [STOP, STOP, STOP, STOP]
            if ags[agent][1]:
                if policy is None:
                    a = _sample(_UNIFORM6, _u01(raw))
                else:
                    probs = policy_probs(nea, fidx, wts, self.features(agent, ms))
                    a = _sample(probs, _u01(raw))
                    if a < 4 and nea != 6:
                        safe = self._safe_dirs(agent)
                        if safe:
                            a = safe[_below(raw, len(safe))]
                acts[agent] = a
                if counts is not None:
                    counts[a] += 1
            for j in range(4):
                if j != agent and ags[j][1]:
                    acts[j] = _pick_bit(self.legal_mask(j), raw)
            self.step(acts)
            played += 1
        return played

    def sample_policy_action(self, agent, rng, policy=None):
        """One draw of the rollout action rule, without stepping."""
        raw = rng.bit_generator.random_raw
        if policy is None:
            return _sample(_UNIFORM6, _u01(raw))
        probs = policy_probs(policy.nea, tuple(policy.feature_idx), tuple(policy.weights),
                             self.features(agent, policy.max_strength))
        a = _sample(probs, _u01(raw))
        if a < 4 and policy.nea != 6:
            safe = self._safe_dirs(agent)
            if safe:
                a = safe[_below(raw, len(safe))]
        return a

    def _safe_dirs(self, agent):
        n = self.n
        p = self._agents[agent][0]
        r, c = divmod(p, n)
        board = self._board
        flames = self._flames
        out = []
        for d in range(4):
            nr = r + DR[d]
            nc = c + DC[d]
            if 0 <= nr < n and 0 <= nc < n:
                q = nr * n + nc
                t = board[q]
                if t != RIGID and t != WOOD and flames[q] == 0 and self._bomb_index(q) < 0:
                    out.append(d)
        return out

    def safe_dirs(self, agent):
        return self._safe_dirs(agent)


def _pick_bit(mask, raw):
    cnt = 0
    m = mask
    while m:
        m &= m - 1
        cnt += 1
    k = _below(raw, cnt)
    for i in range(6):
        if mask >> i & 1:
            if k == 0:
                return i
            k -= 1
    return STOP


def _resolve(pos, want, alive):
    while True:
        bad = []
        for i in range(4):
            if not alive[i] or want[i] == pos[i]:
                continue
            for j in range(4):
                if j == i or not alive[j]:
                    continue
                if want[j] == want[i] or (want[i] == pos[j] and want[j] == pos[i]):
                    bad.append(i)
                    break
        if not bad:
            return
        for i in bad:
            want[i] = pos[i]

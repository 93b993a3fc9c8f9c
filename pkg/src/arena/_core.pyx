# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled forward-model kernel.

Same public surface and same random-number consumption as
``arena._pycore``; see that module for the rule commentary.
"""

from libc.math cimport exp, sqrt
from libc.stdint cimport uint64_t
from libc.string cimport memcpy
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

cdef enum:
    PASSAGE = 0
    RIGID = 1
    WOOD = 2
    EXTRA_BOMB = 3
    INCR_RANGE = 4
    KICK = 5
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    STOP = 4
    BOMB = 5
    FFA = 0
    TEAM = 1
    MAXC = 256
    MAXB = 64
    CONSTF = 8
    MAXW = 64

cdef int DR[4]
cdef int DC[4]
DR[:] = [-1, 1, 0, 0]
DC[:] = [0, 0, -1, 1]

cdef double INV53 = 1.0 / 9007199254740992.0


cdef struct Bomb:
    int pos
    int owner
    int fuse
    int strength
    int dir
    int kicked


cdef struct Agent:
    int pos
    int alive
    int ammo
    int blast
    int kick


cdef struct S:
    int n
    int nn
    int tick
    int max_ticks
    int mode
    int flame_life
    int bomb_life
    int initial_wood
    int nbombs
    unsigned char board[MAXC]
    unsigned char hidden[MAXC]
    unsigned char flames[MAXC]
    Agent agents[4]
    Bomb bombs[MAXB]


cdef struct Pol:
    int nea
    int nf
    int fidx[16]
    double w[MAXW]
    double ms


cdef inline bitgen_t* _bitgen(object rng) except NULL:
    return <bitgen_t*> PyCapsule_GetPointer(rng.bit_generator.capsule, "BitGenerator")


cdef inline double _u01(bitgen_t* g) noexcept nogil:
    return (g.next_uint64(g.state) >> 11) * INV53


cdef inline int _below(bitgen_t* g, int n) noexcept nogil:
    return <int> (((g.next_uint64(g.state) >> 11) * <uint64_t> n) >> 53)


cdef inline int _sample(double* probs, double u) noexcept nogil:
    cdef double acc = 0.0
    cdef int last = 0
    cdef int i
    for i in range(6):
        if probs[i] > 0.0:
            last = i
        acc += probs[i]
        if u < acc:
            return i
    return last


cdef int _bomb_index(S* s, int cell) noexcept nogil:
    cdef int i
    for i in range(s.nbombs):
        if s.bombs[i].pos == cell:
            return i
    return -1


cdef int _result(S* s, int* out) noexcept nogil:
    """Fill ``out`` and return 1 when the game is over, else return 0."""
    cdef int a0 = s.agents[0].alive, a1 = s.agents[1].alive
    cdef int a2 = s.agents[2].alive, a3 = s.agents[3].alive
    cdef int cnt, i, t0, t1
    cdef int al[4]
    al[0] = a0
    al[1] = a1
    al[2] = a2
    al[3] = a3
    if s.mode == FFA:
        cnt = a0 + a1 + a2 + a3
        if cnt == 1:
            for i in range(4):
                out[i] = 1 if al[i] else -1
            return 1
        if cnt == 0:
            for i in range(4):
                out[i] = -1
            return 1
        if s.tick >= s.max_ticks:
            for i in range(4):
                out[i] = 0 if al[i] else -1
            return 1
        return 0
    t0 = a0 or a2
    t1 = a1 or a3
    if not t0 and not t1:
        for i in range(4):
            out[i] = 0
        return 1
    if not t0:
        out[0] = -1; out[1] = 1; out[2] = -1; out[3] = 1
        return 1
    if not t1:
        out[0] = 1; out[1] = -1; out[2] = 1; out[3] = -1
        return 1
    if s.tick >= s.max_ticks:
        for i in range(4):
            out[i] = 0
        return 1
    return 0


cdef int _done_for(S* s, int agent) noexcept nogil:
    cdef int out[4]
    if s.mode == FFA:
        if not s.agents[agent].alive:
            return 1
    elif not (s.agents[agent].alive or s.agents[agent ^ 2].alive):
        return 1
    return _result(s, out)


cdef int _legal_mask(S* s, int agent) noexcept nogil:
    cdef Agent* a = &s.agents[agent]
    if not a.alive:
        return 1 << STOP
    cdef int n = s.n
    cdef int r = a.pos // n, c = a.pos % n
    cdef int mask = 1 << STOP
    cdef int d, nr, nc, t
    for d in range(4):
        nr = r + DR[d]
        nc = c + DC[d]
        if 0 <= nr < n and 0 <= nc < n:
            t = s.board[nr * n + nc]
            if t != RIGID and t != WOOD:
                mask |= 1 << d
    if a.ammo > 0 and _bomb_index(s, a.pos) < 0:
        mask |= 1 << BOMB
    return mask


cdef inline int _pick_bit(int mask, bitgen_t* g) noexcept nogil:
    cdef int cnt = 0, m = mask, k, i
    while m:
        m &= m - 1
        cnt += 1
    k = _below(g, cnt)
    for i in range(6):
        if (mask >> i) & 1:
            if k == 0:
                return i
            k -= 1
    return STOP


cdef void _resolve(int* pos, int* want, int* alive) noexcept nogil:
    cdef int bad[4]
    cdef int nbad, i, j
    while True:
        nbad = 0
        for i in range(4):
            if not alive[i] or want[i] == pos[i]:
                continue
            for j in range(4):
                if j == i or not alive[j]:
                    continue
                if want[j] == want[i] or (want[i] == pos[j] and want[j] == pos[i]):
                    bad[nbad] = i
                    nbad += 1
                    break
        if nbad == 0:
            return
        for i in range(nbad):
            want[bad[i]] = pos[bad[i]]


cdef void _step(S* s, int* actions) noexcept nogil:
    cdef int n = s.n, nn = s.nn
    cdef int c, f, i, j, k, d, p, r, nr, nc, q, t, st, head, tail, nb, ok
    cdef int queue[MAXB]
    cdef int exploding[MAXB]
    cdef unsigned char blast[MAXC]
    cdef int alive[4]
    cdef int pos[4]
    cdef int want[4]
    cdef int mdir[4]
    cdef Agent* a

    for c in range(nn):
        f = s.flames[c]
        if f:
            f -= 1
            s.flames[c] = f
            if f == 0 and s.hidden[c]:
                s.board[c] = s.hidden[c]
                s.hidden[c] = 0

    nb = s.nbombs
    tail = 0
    for i in range(nb):
        s.bombs[i].fuse -= 1
        exploding[i] = 0
        s.bombs[i].kicked = 0
        if s.bombs[i].fuse <= 0:
            exploding[i] = 1
            queue[tail] = i
            tail += 1
    if tail > 0:
        for c in range(nn):
            blast[c] = 0
        while tail > 0:
            tail -= 1
            i = queue[tail]
            p = s.bombs[i].pos
            st = s.bombs[i].strength
            blast[p] = 1
            r = p // n
            c = p % n
            for d in range(4):
                nr = r
                nc = c
                for k in range(1, st):
                    nr += DR[d]
                    nc += DC[d]
                    if nr < 0 or nr >= n or nc < 0 or nc >= n:
                        break
                    q = nr * n + nc
                    t = s.board[q]
                    if t == RIGID:
                        break
                    blast[q] = 1
                    if t == WOOD:
                        break
                    j = _bomb_index(s, q)
                    if j >= 0 and not exploding[j]:
                        exploding[j] = 1
                        queue[tail] = j
                        tail += 1
        for q in range(nn):
            if blast[q]:
                if s.board[q] != PASSAGE:
                    s.board[q] = PASSAGE
                s.flames[q] = s.flame_life
        k = 0
        for i in range(nb):
            if exploding[i]:
                s.agents[s.bombs[i].owner].ammo += 1
            else:
                if k != i:
                    s.bombs[k] = s.bombs[i]
                k += 1
        s.nbombs = k

    for i in range(4):
        alive[i] = s.agents[i].alive
        pos[i] = s.agents[i].pos

    for i in range(4):
        if alive[i] and actions[i] == BOMB:
            a = &s.agents[i]
            if a.ammo > 0 and s.nbombs < MAXB and _bomb_index(s, a.pos) < 0:
                s.bombs[s.nbombs].pos = a.pos
                s.bombs[s.nbombs].owner = i
                s.bombs[s.nbombs].fuse = s.bomb_life
                s.bombs[s.nbombs].strength = a.blast
                s.bombs[s.nbombs].dir = -1
                s.bombs[s.nbombs].kicked = 0
                s.nbombs += 1
                a.ammo -= 1

    for i in range(4):
        want[i] = pos[i]
        mdir[i] = -1
        d = actions[i]
        if alive[i] and 0 <= d < 4:
            r = pos[i] // n
            c = pos[i] % n
            nr = r + DR[d]
            nc = c + DC[d]
            if 0 <= nr < n and 0 <= nc < n:
                q = nr * n + nc
                t = s.board[q]
                if t != RIGID and t != WOOD:
                    if _bomb_index(s, q) >= 0 and not s.agents[i].kick:
                        continue
                    want[i] = q
                    mdir[i] = d
    _resolve(pos, want, alive)

    for i in range(4):
        if not alive[i] or want[i] == pos[i]:
            continue
        j = _bomb_index(s, want[i])
        if j < 0:
            continue
        d = mdir[i]
        r = want[i] // n
        c = want[i] % n
        nr = r + DR[d]
        nc = c + DC[d]
        ok = 0 <= nr < n and 0 <= nc < n
        q = -1
        if ok:
            q = nr * n + nc
            ok = s.board[q] == PASSAGE and s.flames[q] == 0 and _bomb_index(s, q) < 0
            if ok:
                for k in range(4):
                    if alive[k] and (pos[k] == q or want[k] == q):
                        ok = 0
                        break
        if ok:
            s.bombs[j].pos = q
            s.bombs[j].dir = d
            s.bombs[j].kicked = 1
        else:
            want[i] = pos[i]
    _resolve(pos, want, alive)

    for i in range(4):
        if alive[i]:
            a = &s.agents[i]
            q = want[i]
            a.pos = q
            t = s.board[q]
            if t == EXTRA_BOMB:
                a.ammo += 1
                s.board[q] = PASSAGE
            elif t == INCR_RANGE:
                a.blast += 1
                s.board[q] = PASSAGE
            elif t == KICK:
                a.kick = 1
                s.board[q] = PASSAGE

    for i in range(s.nbombs):
        d = s.bombs[i].dir
        if d < 0 or s.bombs[i].kicked:
            continue
        r = s.bombs[i].pos // n
        c = s.bombs[i].pos % n
        nr = r + DR[d]
        nc = c + DC[d]
        ok = 0 <= nr < n and 0 <= nc < n
        if ok:
            q = nr * n + nc
            ok = s.board[q] == PASSAGE and s.flames[q] == 0 and _bomb_index(s, q) < 0
            if ok:
                for k in range(4):
                    if alive[k] and want[k] == q:
                        ok = 0
                        break
        if ok:
            s.bombs[i].pos = q
        else:
            s.bombs[i].dir = -1
    for i in range(s.nbombs):
        s.bombs[i].kicked = 0

    for i in range(4):
        if alive[i] and s.flames[s.agents[i].pos]:
            s.agents[i].alive = 0

    s.tick += 1


cdef void _features(S* s, int agent, double ms, double* out) noexcept nogil:
    cdef int n = s.n
    cdef Agent* a = &s.agents[agent]
    cdef int r0 = a.pos // n, c0 = a.pos % n
    cdef double bs = a.blast * a.ammo / (2.0 * ms)
    cdef int big = 1 << 30
    cdef int d_bomb = big, d_pu = big, d_en = big, d_rig = big, d_fl = big, d_wood = big
    cdef int i, j, r, c, d2, dr2, q, t, team
    if bs > 1.0:
        bs = 1.0
    elif bs < 0.0:
        bs = 0.0
    for i in range(s.nbombs):
        r = s.bombs[i].pos // n
        c = s.bombs[i].pos % n
        d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0)
        if d2 < d_bomb:
            d_bomb = d2
    team = s.mode == TEAM
    for j in range(4):
        if j == agent or not s.agents[j].alive or (team and (j & 1) == (agent & 1)):
            continue
        r = s.agents[j].pos // n
        c = s.agents[j].pos % n
        d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0)
        if d2 < d_en:
            d_en = d2
    q = 0
    for r in range(n):
        dr2 = (r - r0) * (r - r0)
        for c in range(n):
            t = s.board[q]
            if t or s.flames[q]:
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
                if s.flames[q] and d2 < d_fl:
                    d_fl = d2
            q += 1
    out[0] = bs
    out[1] = 1.0 if a.kick else 0.0
    out[2] = 0.0 if d_bomb == big else 1.0 / (sqrt(<double> d_bomb) + 1.0)
    out[3] = 0.0 if d_pu == big else 1.0 / (sqrt(<double> d_pu) + 1.0)
    out[4] = 0.0 if d_en == big else 1.0 / (sqrt(<double> d_en) + 1.0)
    out[5] = 0.0 if d_rig == big else 1.0 / (sqrt(<double> d_rig) + 1.0)
    out[6] = 0.0 if d_fl == big else 1.0 / (sqrt(<double> d_fl) + 1.0)
    out[7] = 0.0 if d_wood == big else 1.0 / (sqrt(<double> d_wood) + 1.0)


cdef double _evaluate(S* s, int agent, double* hw, double ms) noexcept nogil:
    cdef int res[4]
    cdef int j, dead = 0, nen = 0, am, bl, wood_now, q
    cdef double enemy_score, power, safety, wood, self_alive, tot, raw
    cdef double feats[8]
    cdef Agent* me = &s.agents[agent]
    if _result(s, res):
        return <double> res[agent]
    if s.mode == FFA:
        if not me.alive:
            return -1.0
        for j in range(4):
            if j != agent:
                nen += 1
                if not s.agents[j].alive:
                    dead += 1
    else:
        if not (me.alive or s.agents[agent ^ 2].alive):
            return -1.0
        for j in range(4):
            if (j & 1) != (agent & 1):
                nen += 1
                if not s.agents[j].alive:
                    dead += 1
    enemy_score = (<double> dead) / nen
    am = me.ammo if me.ammo < 3 else 3
    bl = me.blast - 2
    if bl > 3:
        bl = 3
    elif bl < 0:
        bl = 0
    power = (am / 3.0 + bl / 3.0 + (1.0 if me.kick else 0.0)) / 3.0
    if me.alive:
        _features(s, agent, ms, feats)
        safety = 1.0 - feats[2]
    else:
        safety = 0.0
    if s.initial_wood > 0:
        wood_now = 0
        for q in range(s.nn):
            if s.board[q] == WOOD:
                wood_now += 1
        wood = (<double> (s.initial_wood - wood_now)) / s.initial_wood
        if wood < 0.0:
            wood = 0.0
    else:
        wood = 0.0
    self_alive = 1.0 if me.alive else 0.0
    tot = hw[0] + hw[1] + hw[2] + hw[3] + hw[4]
    raw = (hw[0] * enemy_score + hw[1] * power + hw[2] * safety
           + hw[3] * wood + hw[4] * self_alive) / tot
    return -0.9 + 1.8 * raw


cdef void _policy_probs(Pol* pol, double* feats, double* probs) noexcept nogil:
    cdef double logits[6]
    cdef double es[6]
    cdef double sacc, fv, m, tot, mv
    cdef int i, j, k, base
    for i in range(pol.nea):
        sacc = 0.0
        base = i * pol.nf
        for j in range(pol.nf):
            k = pol.fidx[j]
            fv = 1.0 if k == CONSTF else feats[k]
            sacc += pol.w[base + j] * fv
        logits[i] = sacc
    if pol.nea == 3:
        logits[0] = 4.0 * logits[0]
    elif pol.nea == 2:
        logits[0] = 5.0 * logits[0]
    m = logits[0]
    for i in range(pol.nea):
        if logits[i] > m:
            m = logits[i]
    for i in range(pol.nea):
        es[i] = exp(logits[i] - m)
    tot = 0.0
    for i in range(pol.nea):
        tot += es[i]
    for i in range(pol.nea):
        es[i] = es[i] / tot
    if pol.nea == 6:
        for i in range(6):
            probs[i] = es[i]
    elif pol.nea == 3:
        mv = es[0] / 4.0
        probs[0] = mv; probs[1] = mv; probs[2] = mv; probs[3] = mv
        probs[4] = es[1]
        probs[5] = es[2]
    else:
        mv = es[0] / 5.0
        probs[0] = mv; probs[1] = mv; probs[2] = mv; probs[3] = mv; probs[4] = mv
        probs[5] = es[1]


cdef int _safe_dirs(S* s, int agent, int* out) noexcept nogil:
    cdef int n = s.n
    cdef int p = s.agents[agent].pos
    cdef int r = p // n, c = p % n
    cdef int cnt = 0, d, nr, nc, q, t
    for d in range(4):
        nr = r + DR[d]
        nc = c + DC[d]
        if 0 <= nr < n and 0 <= nc < n:
            q = nr * n + nc
            t = s.board[q]
            if t != RIGID and t != WOOD and s.flames[q] == 0 and _bomb_index(s, q) < 0:
                out[cnt] = d
                cnt += 1
    return cnt


cdef int _policy_action(S* s, int agent, Pol* pol, bitgen_t* g) noexcept nogil:
    cdef double probs[6]
    cdef double feats[8]
    cdef int safe[4]
    cdef int a, ns, i
    if pol == NULL:
        for i in range(6):
            probs[i] = 1.0 / 6.0
        return _sample(probs, _u01(g))
    _features(s, agent, pol.ms, feats)
    _policy_probs(pol, feats, probs)
    a = _sample(probs, _u01(g))
    if a < 4 and pol.nea != 6:
        ns = _safe_dirs(s, agent, safe)
        if ns > 0:
            a = safe[_below(g, ns)]
    return a


cdef int _load_policy(object policy, Pol* pol) except -1:
    fidx = tuple(policy.feature_idx)
    wts = tuple(policy.weights)
    cdef int nea = policy.nea, nf = len(fidx), i
    if nea not in (2, 3, 6) or nf > 16 or nea * nf > MAXW or len(wts) != nea * nf:
        raise ValueError("policy shape not supported by the compiled kernel")
    pol.nea = nea
    pol.nf = nf
    for i in range(nf):
        pol.fidx[i] = fidx[i]
    for i in range(nea * nf):
        pol.w[i] = wts[i]
    pol.ms = policy.max_strength
    return 0


cdef class State:
    """Mutable game state.  ``step`` advances it in place."""

    cdef S s

    def __init__(self, int n, board, hidden, flames, bombs, agents, int tick=0,
                 int max_ticks=800, int mode=FFA, int flame_life=2, int bomb_life=10,
                 int initial_wood=-1):
        cdef int nn = n * n, i, w = 0
        if n < 2 or nn > MAXC:
            raise ValueError(f"unsupported board size {n}")
        if len(board) != nn or len(hidden) != nn or len(flames) != nn:
            raise ValueError("grid arrays must have n*n entries")
        if len(agents) != 4:
            raise ValueError("exactly four agents are required")
        if len(bombs) > MAXB:
            raise ValueError("too many bombs")
        self.s.n = n
        self.s.nn = nn
        self.s.tick = tick
        self.s.max_ticks = max_ticks
        self.s.mode = mode
        self.s.flame_life = flame_life
        self.s.bomb_life = bomb_life
        for i in range(nn):
            self.s.board[i] = board[i]
            self.s.hidden[i] = hidden[i]
            self.s.flames[i] = flames[i]
            if board[i] == WOOD:
                w += 1
        self.s.nbombs = len(bombs)
        for i, (r, c, o, f, st, d) in enumerate(bombs):
            self.s.bombs[i].pos = r * n + c
            self.s.bombs[i].owner = o
            self.s.bombs[i].fuse = f
            self.s.bombs[i].strength = st
            self.s.bombs[i].dir = d
            self.s.bombs[i].kicked = 0
        for i, (r, c, al, am, bl, k) in enumerate(agents):
            self.s.agents[i].pos = r * n + c
            self.s.agents[i].alive = 1 if al else 0
            self.s.agents[i].ammo = am
            self.s.agents[i].blast = bl
            self.s.agents[i].kick = 1 if k else 0
        self.s.initial_wood = w if initial_wood < 0 else initial_wood

    @property
    def n(self):
        return self.s.n

    @property
    def tick(self):
        return self.s.tick

    @property
    def max_ticks(self):
        return self.s.max_ticks

    @property
    def mode(self):
        return self.s.mode

    @property
    def flame_life(self):
        return self.s.flame_life

    @property
    def bomb_life(self):
        return self.s.bomb_life

    @property
    def initial_wood(self):
        return self.s.initial_wood

    @property
    def board(self):
        return [self.s.board[i] for i in range(self.s.nn)]

    @property
    def hidden(self):
        return [self.s.hidden[i] for i in range(self.s.nn)]

    @property
    def flames(self):
        return [self.s.flames[i] for i in range(self.s.nn)]

    @property
    def bombs(self):
        cdef int n = self.s.n, i
        return [(self.s.bombs[i].pos // n, self.s.bombs[i].pos % n, self.s.bombs[i].owner,
                 self.s.bombs[i].fuse, self.s.bombs[i].strength, self.s.bombs[i].dir)
                for i in range(self.s.nbombs)]

    @property
    def agents(self):
        cdef int n = self.s.n, i
        return [(self.s.agents[i].pos // n, self.s.agents[i].pos % n,
                 bool(self.s.agents[i].alive), self.s.agents[i].ammo,
                 self.s.agents[i].blast, bool(self.s.agents[i].kick))
                for i in range(4)]

    def copy(self):
        cdef State out = State.__new__(State)
        memcpy(&out.s, &self.s, sizeof(S))
        return out

    def result(self):
        cdef int out[4]
        if _result(&self.s, out):
            return (out[0], out[1], out[2], out[3])
        return None

    def done_for(self, int agent):
        return bool(_done_for(&self.s, agent))

    def legal_mask(self, int agent):
        return _legal_mask(&self.s, agent)

    def step(self, actions):
        cdef int acts[4]
        cdef int out[4]
        if _result(&self.s, out):
            raise ValueError("cannot step a finished game")
        acts[0] = actions[0]
        acts[1] = actions[1]
        acts[2] = actions[2]
        acts[3] = actions[3]
        _step(&self.s, acts)

    def features(self, int agent, double max_strength=10.0):
        cdef double f[8]
        _features(&self.s, agent, max_strength, f)
        return (f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7])

    def evaluate(self, int agent, hw=(0.5, 0.15, 0.15, 0.1, 0.1), double max_strength=10.0):
        cdef double w[5]
        cdef int i
        for i in range(5):
            w[i] = hw[i]
        return _evaluate(&self.s, agent, w, max_strength)

    def random_legal(self, int agent, rng):
        cdef bitgen_t* g = _bitgen(rng)
        return _pick_bit(_legal_mask(&self.s, agent), g)

    def play(self, int agent, seq, rng):
        cdef bitgen_t* g = _bitgen(rng)
        cdef int acts[4]
        cdef int j, played = 0
        for act in seq:
            if _done_for(&self.s, agent):
                break
            for j in range(4):
                acts[j] = STOP
            acts[agent] = act
            for j in range(4):
                if j != agent and self.s.agents[j].alive:
                    acts[j] = _pick_bit(_legal_mask(&self.s, j), g)
            _step(&self.s, acts)
            played += 1
        return played

    def rollout(self, int agent, int depth, rng, policy=None, counts=None):
        cdef bitgen_t* g = _bitgen(rng)
        cdef Pol pol
        cdef Pol* pp = NULL
        cdef int acts[4]
        cdef long tally[6]
        cdef int j, a, k, played = 0
        if policy is not None:
            _load_policy(policy, &pol)
            pp = &pol
        for j in range(6):
            tally[j] = 0
        with nogil:
            for k in range(depth):
                if _done_for(&self.s, agent):
                    break
                for j in range(4):
                    acts[j] = STOP
                if self.s.agents[agent].alive:
                    a = _policy_action(&self.s, agent, pp, g)
                    acts[agent] = a
                    tally[a] += 1
                for j in range(4):
                    if j != agent and self.s.agents[j].alive:
                        acts[j] = _pick_bit(_legal_mask(&self.s, j), g)
                _step(&self.s, acts)
                played += 1
        if counts is not None:
            for j in range(6):
                counts[j] += tally[j]
        return played

    def sample_policy_action(self, int agent, rng, policy=None):
        cdef bitgen_t* g = _bitgen(rng)
        cdef Pol pol
        if policy is None:
            return _policy_action(&self.s, agent, NULL, g)
        _load_policy(policy, &pol)
        return _policy_action(&self.s, agent, &pol, g)

    def safe_dirs(self, int agent):
        cdef int out[4]
        cdef int k = _safe_dirs(&self.s, agent, out), i
        return [out[i] for i in range(k)]


def policy_probs(int nea, feat_idx, weights, feats):
    """Concrete 6-action distribution for an effective-action softmax policy."""
    cdef Pol pol
    cdef double f[8]
    cdef double probs[6]
    cdef int i
    fidx = tuple(feat_idx)
    wts = tuple(weights)
    if nea not in (2, 3, 6) or len(fidx) > 16 or len(wts) != nea * len(fidx) or len(wts) > MAXW:
        raise ValueError("policy shape not supported by the compiled kernel")
    pol.nea = nea
    pol.nf = len(fidx)
    for i in range(pol.nf):
        pol.fidx[i] = fidx[i]
    for i in range(len(wts)):
        pol.w[i] = wts[i]
    for i in range(8):
        f[i] = feats[i]
    _policy_probs(&pol, f, probs)
    return [probs[i] for i in range(6)]

"""A compact CDCL solver compiled with numba.

Literals are internal codes ``2*(v-1) + neg``.  Clauses live in one flat
array; the first two literals of a clause are its watches.  Each literal owns
a contiguous watch row of (clause id, blocker literal) pairs inside one
arena; a full row is moved to the end of the arena with twice the room.
"""

import numpy as np
from numba import njit

UNSAT = 0
SAT = 1
UNKNOWN = 2


@njit(cache=True)
def _luby(i):
    k = 1
    while (1 << k) - 1 < i + 1:
        k += 1
    while True:
        if i + 1 == (1 << k) - 1:
            return 1 << (k - 1)
        if i + 1 >= (1 << (k - 1)):
            i -= (1 << (k - 1)) - 1
            k = 1
            while (1 << k) - 1 < i + 1:
                k += 1
        else:
            k -= 1


@njit(cache=True)
def _grow(a, need):
    if need <= a.shape[0]:
        return a
    cap = max(need, 2 * a.shape[0])
    b = np.empty(cap, a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _compact_arena(arena, wstart, wcap, wsz, nlits, slack):
    """Repack all watch rows; returns the new arena and its fill."""
    total = 0
    for l in range(nlits):
        total += 2 * (wsz[l] + slack)
    out = np.empty(max(2 * total, 1024), np.int64)
    pos = 0
    for l in range(nlits):
        s = wstart[l]
        k = 2 * wsz[l]
        out[pos:pos + k] = arena[s:s + k]
        wstart[l] = pos
        wcap[l] = wsz[l] + slack
        pos += 2 * wcap[l]
    return out, pos


@njit(cache=True)
def _push_watch(arena, fill, wstart, wcap, wsz, l, c, blk):
    """Append (c, blk) to row l; may return a reallocated arena."""
    if wsz[l] == wcap[l]:
        ncap = 2 * wcap[l] + 4
        need = fill + 2 * ncap
        if need > arena.shape[0]:
            arena = _grow(arena, need)
        s = wstart[l]
        arena[fill:fill + 2 * wsz[l]] = arena[s:s + 2 * wsz[l]]
        wstart[l] = fill
        wcap[l] = ncap
        fill += 2 * ncap
    p = wstart[l] + 2 * wsz[l]
    arena[p] = c
    arena[p + 1] = blk
    wsz[l] += 1
    return arena, fill


@njit(cache=True)
def solve_cdcl(nvars, in_lits, in_starts, block_kind, max_models, max_conflicts, models):
    """Decide (and optionally enumerate models of) a CNF.

    ``in_lits``/``in_starts`` hold DIMACS literals clause by clause.
    ``block_kind[v]`` controls the blocking clause added after each model:
    0 ignores v, 1 blocks its value, 2 blocks it only when true.  Models are
    written into the rows of ``models`` (values 0/1) while space lasts.

    Returns (status, number of models found).  With ``max_models`` == 1 this is a
    plain satisfiability call.  ``max_conflicts`` > 0 bounds the work and
    yields UNKNOWN when exhausted.
    """
    nlits = 2 * nvars
    ncl_in = in_starts.shape[0] - 1
    lits = np.empty(in_lits.shape[0] + 1024, np.int64)
    ccap = ncl_in + 1024
    cstart = np.empty(ccap, np.int64)
    clen = np.empty(ccap, np.int64)
    learnt = np.zeros(ccap, np.bool_)
    deleted = np.zeros(ccap, np.bool_)
    cact = np.zeros(ccap, np.float64)
    lbd = np.zeros(ccap, np.int64)

    # watch rows: count first so the initial arena is packed
    wsz = np.zeros(nlits, np.int64)
    wcap = np.zeros(nlits, np.int64)
    wstart = np.zeros(nlits, np.int64)
    for c in range(ncl_in):
        s = in_starts[c]
        if in_starts[c + 1] - s >= 2:
            for k in range(2):
                x = in_lits[s + k]
                wcap[2 * (abs(x) - 1) + (1 if x < 0 else 0)] += 1
    fill = 0
    for l in range(nlits):
        wcap[l] += 4
        wstart[l] = fill
        fill += 2 * wcap[l]
    arena = np.empty(fill + 1024, np.int64)

    val = np.full(nvars, -1, np.int8)  # -1 unassigned, 0 false, 1 true
    level = np.zeros(nvars, np.int64)
    reason = np.full(nvars, -1, np.int64)
    trail = np.empty(nvars, np.int64)
    act = np.zeros(nvars, np.float64)
    phase = np.zeros(nvars, np.int8)
    seen = np.zeros(nvars, np.bool_)
    tmp = np.empty(nvars + 1, np.int64)
    kept = np.empty(nvars + 1, np.int64)
    lvl_mark = np.zeros(nvars + 1, np.int64)
    lvl_stamp = 0
    units = np.empty(0, np.int64)
    nunits = 0

    ntrail = 0
    qhead = 0
    nlev = 0
    var_inc = 1.0
    cla_inc = 1.0
    ncl = 0
    nlits_used = 0
    nlearnt = 0
    max_learnt = 4000
    found = 0
    conflicts = 0
    restart_idx = 0
    restart_budget = 100 * _luby(0)

    # ---- load clauses; unit clauses are queued for level 0
    for c in range(ncl_in):
        s = in_starts[c]
        e = in_starts[c + 1]
        if e - s == 0:
            return UNSAT, 0
        if e - s == 1:
            x = in_lits[s]
            units = _grow(units, nunits + 1)
            units[nunits] = 2 * (abs(x) - 1) + (1 if x < 0 else 0)
            nunits += 1
            continue
        cstart[ncl] = nlits_used
        clen[ncl] = e - s
        for i in range(s, e):
            x = in_lits[i]
            lits[nlits_used] = 2 * (abs(x) - 1) + (1 if x < 0 else 0)
            nlits_used += 1
        a0 = lits[cstart[ncl]]
        a1 = lits[cstart[ncl] + 1]
        arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, a0, ncl, a1)
        arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, a1, ncl, a0)
        ncl += 1

    for i in range(nunits):
        l = units[i]
        v = l >> 1
        want = 1 - (l & 1)
        if val[v] == -1:
            val[v] = want
            level[v] = 0
            reason[v] = -1
            trail[ntrail] = l
            ntrail += 1
        elif val[v] != want:
            return UNSAT, 0

    while True:
        # ---------------- propagate
        confl = -1
        while qhead < ntrail and confl < 0:
            p = trail[qhead]
            qhead += 1
            fl = p ^ 1  # literal that just became false
            base = wstart[fl]
            sz = wsz[fl]
            i = 0
            j = 0
            while i < sz:
                c = arena[base + 2 * i]
                b = arena[base + 2 * i + 1]
                i += 1
                if deleted[c]:
                    continue
                bv = val[b >> 1]
                if bv >= 0 and bv == 1 - (b & 1):
                    arena[base + 2 * j] = c
                    arena[base + 2 * j + 1] = b
                    j += 1
                    continue
                s = cstart[c]
                if lits[s] == fl:
                    lits[s] = lits[s + 1]
                    lits[s + 1] = fl
                first = lits[s]
                fv = val[first >> 1]
                if fv >= 0 and fv == 1 - (first & 1):
                    arena[base + 2 * j] = c
                    arena[base + 2 * j + 1] = first
                    j += 1
                    continue
                moved = False
                for q in range(s + 2, s + clen[c]):
                    li = lits[q]
                    vv = val[li >> 1]
                    if vv < 0 or vv == 1 - (li & 1):
                        lits[s + 1] = li
                        lits[q] = fl
                        # li != fl, so this never relocates the row being scanned
                        arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, li, c, first)
                        moved = True
                        break
                if moved:
                    continue
                arena[base + 2 * j] = c
                arena[base + 2 * j + 1] = first
                j += 1
                if fv < 0:
                    v = first >> 1
                    val[v] = 1 - (first & 1)
                    level[v] = nlev
                    reason[v] = c
                    trail[ntrail] = first
                    ntrail += 1
                else:
                    confl = c
                    qhead = ntrail
                    while i < sz:
                        arena[base + 2 * j] = arena[base + 2 * i]
                        arena[base + 2 * j + 1] = arena[base + 2 * i + 1]
                        i += 1
                        j += 1
            wsz[fl] = j

        if confl >= 0:
            conflicts += 1
            if nlev == 0:
                return (SAT if found > 0 else UNSAT), found
            if max_conflicts > 0 and conflicts > max_conflicts:
                return UNKNOWN, found
            # ---------------- 1UIP analysis
            ntmp = 1
            pathc = 0
            pl = -1
            idx = ntrail - 1
            c = confl
            while True:
                if learnt[c]:
                    cact[c] += cla_inc
                s = cstart[c]
                for q in range(s, s + clen[c]):
                    lq = lits[q]
                    v = lq >> 1
                    if pl >= 0 and v == (pl >> 1):
                        continue
                    if not seen[v] and level[v] > 0:
                        seen[v] = True
                        act[v] += var_inc
                        if act[v] > 1e100:
                            for u in range(nvars):
                                act[u] *= 1e-100
                            var_inc *= 1e-100
                        if level[v] >= nlev:
                            pathc += 1
                        else:
                            tmp[ntmp] = lq
                            ntmp += 1
                while not seen[trail[idx] >> 1]:
                    idx -= 1
                pl = trail[idx]
                idx -= 1
                v = pl >> 1
                c = reason[v]
                seen[v] = False
                pathc -= 1
                if pathc <= 0:
                    break
            tmp[0] = pl ^ 1
            # local minimisation: drop literals implied by the rest of the clause
            kept[0] = tmp[0]
            m = 1
            for q in range(1, ntmp):
                v = tmp[q] >> 1
                r = reason[v]
                keep = True
                if r >= 0:
                    keep = False
                    s = cstart[r]
                    for u in range(s, s + clen[r]):
                        w = lits[u] >> 1
                        if w != v and not seen[w] and level[w] > 0:
                            keep = True
                            break
                if keep:
                    kept[m] = tmp[q]
                    m += 1
            for q in range(1, ntmp):
                seen[tmp[q] >> 1] = False
            for q in range(m):
                tmp[q] = kept[q]
            ntmp = m
            # backjump level = highest level among the rest; move it to slot 1
            bt = 0
            if ntmp > 1:
                mi = 1
                for q in range(2, ntmp):
                    if level[tmp[q] >> 1] > level[tmp[mi] >> 1]:
                        mi = q
                t = tmp[1]
                tmp[1] = tmp[mi]
                tmp[mi] = t
                bt = level[tmp[1] >> 1]
            # literal block distance
            lvl_stamp += 1
            glue = 0
            for q in range(ntmp):
                lv = level[tmp[q] >> 1]
                if lvl_mark[lv] != lvl_stamp:
                    lvl_mark[lv] = lvl_stamp
                    glue += 1
            # undo to bt
            while ntrail > 0 and level[trail[ntrail - 1] >> 1] > bt:
                ntrail -= 1
                v = trail[ntrail] >> 1
                phase[v] = val[v]
                val[v] = -1
                reason[v] = -1
            nlev = bt
            qhead = ntrail
            if ntmp == 1:
                v = tmp[0] >> 1
                val[v] = 1 - (tmp[0] & 1)
                level[v] = 0
                reason[v] = -1
                trail[ntrail] = tmp[0]
                ntrail += 1
            else:
                lits = _grow(lits, nlits_used + ntmp)
                if ncl + 1 > cstart.shape[0]:
                    cstart = _grow(cstart, ncl + 1)
                    clen = _grow(clen, ncl + 1)
                    learnt = _grow(learnt, ncl + 1)
                    deleted = _grow(deleted, ncl + 1)
                    cact = _grow(cact, ncl + 1)
                    lbd = _grow(lbd, ncl + 1)
                cstart[ncl] = nlits_used
                clen[ncl] = ntmp
                learnt[ncl] = True
                deleted[ncl] = False
                cact[ncl] = cla_inc
                lbd[ncl] = glue
                for q in range(ntmp):
                    lits[nlits_used + q] = tmp[q]
                nlits_used += ntmp
                arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, tmp[0], ncl, tmp[1])
                arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, tmp[1], ncl, tmp[0])
                v = tmp[0] >> 1
                val[v] = 1 - (tmp[0] & 1)
                level[v] = nlev
                reason[v] = ncl
                trail[ntrail] = tmp[0]
                ntrail += 1
                ncl += 1
                nlearnt += 1
            var_inc *= 1.0 / 0.95
            cla_inc *= 1.0 / 0.999
            if cla_inc > 1e20:
                for q in range(ncl):
                    cact[q] *= 1e-20
                cla_inc *= 1e-20
            continue

        # ---------------- restart / reduce
        if conflicts >= restart_budget:
            restart_idx += 1
            restart_budget = conflicts + 100 * _luby(restart_idx)
            while ntrail > 0 and level[trail[ntrail - 1] >> 1] > 0:
                ntrail -= 1
                v = trail[ntrail] >> 1
                phase[v] = val[v]
                val[v] = -1
                reason[v] = -1
            nlev = 0
            qhead = ntrail
            if nlearnt > max_learnt:
                # keep glue clauses; drop the less active half of the rest
                acts = np.empty(nlearnt, np.float64)
                q = 0
                for c in range(ncl):
                    if learnt[c] and not deleted[c] and lbd[c] > 2:
                        acts[q] = cact[c]
                        q += 1
                if q > 0:
                    thr = np.median(acts[:q])
                    for c in range(ncl):
                        if learnt[c] and not deleted[c] and lbd[c] > 2 and cact[c] <= thr:
                            deleted[c] = True
                            nlearnt -= 1
                max_learnt = int(max_learnt * 1.1)
            live = 0
            for l in range(nlits):
                live += 2 * wcap[l]
            if fill > 2 * live + 4096:
                arena, fill = _compact_arena(arena, wstart, wcap, wsz, nlits, 4)
            continue

        # ---------------- decide
        best = -1
        besta = -1.0
        for v in range(nvars):
            if val[v] < 0 and act[v] > besta:
                besta = act[v]
                best = v
        if best < 0:
            # model
            if found < models.shape[0]:
                for v in range(nvars):
                    models[found, v] = val[v]
            found += 1
            if found >= max_models:
                return SAT, found
            # blocking clause; then restart from level 0
            nb = 0
            for v in range(nvars):
                if block_kind[v] == 1 or (block_kind[v] == 2 and val[v] == 1):
                    tmp[nb] = 2 * v + (1 if val[v] == 1 else 0)
                    nb += 1
            while ntrail > 0 and level[trail[ntrail - 1] >> 1] > 0:
                ntrail -= 1
                v = trail[ntrail] >> 1
                phase[v] = val[v]
                val[v] = -1
                reason[v] = -1
            nlev = 0
            qhead = ntrail
            # keep only literals not already false at level 0
            m = 0
            sat_root = False
            for q in range(nb):
                l = tmp[q]
                vv = val[l >> 1]
                if vv < 0:
                    tmp[m] = l
                    m += 1
                elif vv == 1 - (l & 1):
                    sat_root = True
            if sat_root:
                continue
            if m == 0:
                return SAT, found
            if m == 1:
                v = tmp[0] >> 1
                val[v] = 1 - (tmp[0] & 1)
                level[v] = 0
                reason[v] = -1
                trail[ntrail] = tmp[0]
                ntrail += 1
                continue
            lits = _grow(lits, nlits_used + m)
            if ncl + 1 > cstart.shape[0]:
                cstart = _grow(cstart, ncl + 1)
                clen = _grow(clen, ncl + 1)
                learnt = _grow(learnt, ncl + 1)
                deleted = _grow(deleted, ncl + 1)
                cact = _grow(cact, ncl + 1)
                lbd = _grow(lbd, ncl + 1)
            cstart[ncl] = nlits_used
            clen[ncl] = m
            learnt[ncl] = False
            deleted[ncl] = False
            for q in range(m):
                lits[nlits_used + q] = tmp[q]
            nlits_used += m
            arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, tmp[0], ncl, tmp[1])
            arena, fill = _push_watch(arena, fill, wstart, wcap, wsz, tmp[1], ncl, tmp[0])
            ncl += 1
            continue
        nlev += 1
        l = 2 * best + (0 if phase[best] == 1 else 1)
        val[best] = 1 - (l & 1)
        level[best] = nlev
        reason[best] = -1
        trail[ntrail] = l
        ntrail += 1

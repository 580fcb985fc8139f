"""Compiled backtracking search for L-shaped embeddings.

Everything here works on flat integer arrays so it can run under numba.  The
Python-facing wrappers live in :mod:`lshape.embedder`.

Directions are numbered counterclockwise: 0=E, 1=N, 2=W, 3=S.

Rotation modes: 0 ignores rotations, 1 demands the prescribed rotation,
2 demands its reflection, 3 demands both (only possible when every rotation
is its own reverse, i.e. degree <= 2 everywhere).
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _depart(xa, ya, xb, yb, horizontal):
    if horizontal:
        return 0 if xb > xa else 2
    return 1 if yb > ya else 3


@njit(cache=True, inline="always")
def _seg_ok(ax0, ay0, ax1, ay1, bx0, by0, bx1, by1, shared, sx, sy):
    """True iff two axis-aligned closed segments meet at most in the shared vertex point."""
    a_h = ay0 == ay1
    b_h = by0 == by1
    alo_x = min(ax0, ax1)
    ahi_x = max(ax0, ax1)
    alo_y = min(ay0, ay1)
    ahi_y = max(ay0, ay1)
    blo_x = min(bx0, bx1)
    bhi_x = max(bx0, bx1)
    blo_y = min(by0, by1)
    bhi_y = max(by0, by1)
    if a_h and b_h:
        if ay0 != by0:
            return True
        lo = max(alo_x, blo_x)
        hi = min(ahi_x, bhi_x)
        if lo > hi:
            return True
        if lo < hi:
            return False
        return shared and lo == sx and ay0 == sy
    if (not a_h) and (not b_h):
        if ax0 != bx0:
            return True
        lo = max(alo_y, blo_y)
        hi = min(ahi_y, bhi_y)
        if lo > hi:
            return True
        if lo < hi:
            return False
        return shared and lo == sy and ax0 == sx
    if a_h:
        hx0, hx1, hy = alo_x, ahi_x, ay0
        vx, vy0, vy1 = bx0, blo_y, bhi_y
    else:
        hx0, hx1, hy = blo_x, bhi_x, by0
        vx, vy0, vy1 = ax0, alo_y, ahi_y
    if hx0 <= vx <= hx1 and vy0 <= hy <= vy1:
        return shared and vx == sx and hy == sy
    return True


@njit(cache=True)
def l_edges_compatible(xa, ya, xb, yb, ha, xc, yc, xd, yd, hc, shared, sx, sy):
    """True iff L-edge a-b (horizontal at a iff ha) and c-d meet only at the shared point."""
    # each L lies in the bounding box of its endpoints
    if (max(xa, xb) < min(xc, xd) or max(xc, xd) < min(xa, xb)
            or max(ya, yb) < min(yc, yd) or max(yc, yd) < min(ya, yb)):
        return True
    if ha:
        kx, ky = xb, ya
    else:
        kx, ky = xa, yb
    if hc:
        mx, my = xd, yc
    else:
        mx, my = xc, yd
    if not _seg_ok(xa, ya, kx, ky, xc, yc, mx, my, shared, sx, sy):
        return False
    if not _seg_ok(xa, ya, kx, ky, mx, my, xd, yd, shared, sx, sy):
        return False
    if not _seg_ok(kx, ky, xb, yb, xc, yc, mx, my, shared, sx, sy):
        return False
    if not _seg_ok(kx, ky, xb, yb, mx, my, xd, yd, shared, sx, sy):
        return False
    return True


@njit(cache=True, inline="always")
def _rotation_ok(v, owner, rotpos, deg, mode):
    """Placed neighbours of v, read counterclockwise, form a cyclic subsequence of the rotation."""
    if mode == 0 or deg[v] <= 2:
        return True
    d = deg[v]
    for m in (1, 2):
        if mode != m and mode != 3:
            continue
        first = -1
        prev = -1
        wraps = 0
        cnt = 0
        for dr in range(4):
            w = owner[v, dr]
            if w < 0:
                continue
            pos = rotpos[v, w]
            if m == 2:
                pos = d - 1 - pos
            if first < 0:
                first = pos
            elif pos < prev:
                wraps += 1
            prev = pos
            cnt += 1
        # closing pair (last, first) also counts; a cyclic subsequence descends exactly once
        if prev > first:
            wraps += 1
        if cnt >= 2 and wraps > 1:
            return False
    return True


@njit(cache=True, inline="always")
def _half_plane_free(dr, x, y, px, py, used, n):
    for q in range(n):
        if used[q]:
            continue
        if dr == 0 and px[q] > x:
            return True
        if dr == 1 and py[q] > y:
            return True
        if dr == 2 and px[q] < x:
            return True
        if dr == 3 and py[q] < y:
            return True
    return False


@njit(cache=True, inline="always")
def _enough_directions(w, pt, dirs, deg, nplaced_nb, px, py, used, n):
    need = deg[w] - nplaced_nb[w]
    if need <= 0:
        return True
    x = px[pt[w]]
    y = py[pt[w]]
    avail = 0
    for dr in range(4):
        if dirs[w] & (1 << dr):
            continue
        if _half_plane_free(dr, x, y, px, py, used, n):
            avail += 1
    return avail >= need


@njit(cache=True)
def _reachable_directions(w, k, order, par, pt, bit, dirs, px, py, used, n):
    """Unused directions at w that admit a crossing-free L-edge to some free point."""
    x = px[pt[w]]
    y = py[pt[w]]
    avail = 0
    for dr in range(4):
        if dirs[w] & (1 << dr):
            continue
        hz = dr == 0 or dr == 2
        for q in range(n):
            if used[q]:
                continue
            if dr == 0 and px[q] <= x:
                continue
            if dr == 1 and py[q] <= y:
                continue
            if dr == 2 and px[q] >= x:
                continue
            if dr == 3 and py[q] >= y:
                continue
            ok = True
            for j in range(1, k + 1):
                c = order[j]
                a = par[c]
                shared = a == w or c == w
                if not l_edges_compatible(x, y, px[q], py[q], hz,
                                          px[pt[a]], py[pt[a]], px[pt[c]], py[pt[c]], bit[c] == 1,
                                          shared, x, y):
                    ok = False
                    break
            if ok:
                avail += 1
                break
    return avail


@njit(cache=True)
def value_order(n, px, py):
    """Point orders tried during search.

    The root tries central points first; every other vertex tries points by
    L1 distance from its parent's point (``near[parent_point]``).
    """
    near = np.zeros((n, n), np.int64)
    key = np.zeros(n, np.int64)
    for a in range(n):
        for q in range(n):
            key[q] = (abs(px[q] - px[a]) + abs(py[q] - py[a])) * n + q
        near[a] = np.argsort(key)
    for q in range(n):
        key[q] = -min(min(px[q], n - 1 - px[q]), min(py[q], n - 1 - py[q])) * n + q
    central = np.argsort(key)
    return near, central


@njit(cache=True)
def workspace(n):
    return np.zeros((10, n), np.int64), np.zeros((n, 4), np.int64)


@njit(cache=True)
def search(n, px, py, order, par, deg, rotpos, mode, partner, prune, twin, count_all, out_pt, out_bit, limit, max_nodes,
           lookahead):
    """Backtracking over (point, bend) choices along ``order``.

    ``par[order[0]]`` is ignored.  ``out_bit[v]`` is 1 iff the edge from
    ``par[v]`` to ``v`` is horizontal at ``par[v]``.  ``partner[p]`` is the
    other point of p's size-2 staircase box, or -1; it is only consulted when
    ``prune`` is set.  ``twin[v]`` is an interchangeable vertex placed before
    v (a sibling leaf) or -1; v must then take a larger point index, so each
    orbit of leaf permutations is visited once.  Returns 1/0 (or the number of embeddings when
    ``count_all``; counting stops once ``limit`` > 0 is reached).  Returns -1
    when more than ``max_nodes`` > 0 placements were tried.  ``lookahead``
    re-checks after every placement that each unfinished vertex can still
    reach enough free points; it pays off on hard instances only.
    """
    near, central = value_order(n, px, py)
    ws, owner = workspace(n)
    return _search(n, px, py, near, central, ws, owner, order, par, deg, rotpos, mode, partner, prune, twin,
                   count_all, out_pt, out_bit, limit, max_nodes, lookahead)


@njit(cache=True)
def _search(n, px, py, near, central, ws, owner, order, par, deg, rotpos, mode, partner, prune, twin,
            count_all, out_pt, out_bit, limit, max_nodes, lookahead):
    if n == 1:
        out_pt[order[0]] = 0
        return 1
    pt = ws[0]
    at = ws[1]
    used = ws[2]
    dirs = ws[3]
    nplaced_nb = ws[4]
    bit = ws[5]
    du_of = ws[6]
    dv_of = ws[7]
    cand = ws[8]
    placed = ws[9]
    pt[:] = -1
    at[:] = -1
    ws[2:] = 0
    owner[:, :] = -1
    total = 0
    nodes = 0
    k = 0
    cand[0] = 0
    while k >= 0:
        v = order[k]
        if placed[k]:
            # undo v
            p = pt[v]
            used[p] = False
            at[p] = -1
            pt[v] = -1
            if k > 0:
                u = par[v]
                dirs[u] &= ~(1 << du_of[v])
                owner[u, du_of[v]] = -1
                nplaced_nb[u] -= 1
                dirs[v] = 0
                owner[v, dv_of[v]] = -1
                nplaced_nb[v] = 0
            placed[k] = False
        found = False
        while cand[k] < 2 * n:
            c = cand[k]
            cand[k] += 1
            h = c & 1
            if k == 0:
                p = central[c >> 1]
            else:
                p = near[pt[par[v]], c >> 1]
            if used[p]:
                continue
            if twin[v] >= 0 and p < pt[twin[v]]:
                continue
            if k == 0:
                if h == 1:
                    continue
                pt[v] = p
                at[p] = v
                used[p] = True
                if _enough_directions(v, pt, dirs, deg, nplaced_nb, px, py, used, n):
                    found = True
                    break
                pt[v] = -1
                at[p] = -1
                used[p] = False
                continue
            if prune and deg[v] == 4 and partner[p] >= 0:
                q = partner[p]
                if at[q] >= 0 and deg[at[q]] == 4:
                    continue
            u = par[v]
            pu = pt[u]
            xu = px[pu]
            yu = py[pu]
            xv = px[p]
            yv = py[p]
            du = _depart(xu, yu, xv, yv, h == 1)
            if dirs[u] & (1 << du):
                continue
            dv = _depart(xv, yv, xu, yu, h == 0)
            if mode != 0 and deg[u] > 2:
                # cheap rotation test before the crossing checks
                owner[u, du] = v
                good = _rotation_ok(u, owner, rotpos, deg, mode)
                owner[u, du] = -1
                if not good:
                    continue
            ok = True
            for j in range(1, k):
                w = order[j]
                a = par[w]
                shared = a == u or w == u
                pa = pt[a]
                pw = pt[w]
                if not l_edges_compatible(xu, yu, xv, yv, h == 1,
                                          px[pa], py[pa], px[pw], py[pw], bit[w] == 1,
                                          shared, xu, yu):
                    ok = False
                    break
            if not ok:
                continue
            # tentatively commit
            pt[v] = p
            at[p] = v
            used[p] = True
            bit[v] = h
            du_of[v] = du
            dv_of[v] = dv
            dirs[u] |= 1 << du
            owner[u, du] = v
            nplaced_nb[u] += 1
            dirs[v] = 1 << dv
            owner[v, dv] = u
            nplaced_nb[v] = 1
            good = _enough_directions(v, pt, dirs, deg, nplaced_nb, px, py, used, n)
            if good and lookahead:
                for j in range(k + 1):
                    w = order[j]
                    need = deg[w] - nplaced_nb[w]
                    if need > 0 and _reachable_directions(w, k, order, par, pt, bit, dirs, px, py, used, n) < need:
                        good = False
                        break
            if good:
                found = True
                break
            used[p] = False
            at[p] = -1
            pt[v] = -1
            dirs[u] &= ~(1 << du)
            owner[u, du] = -1
            nplaced_nb[u] -= 1
            dirs[v] = 0
            owner[v, dv] = -1
            nplaced_nb[v] = 0
        if not found:
            k -= 1
            continue
        placed[k] = True
        nodes += 1
        if max_nodes > 0 and nodes > max_nodes:
            return -1
        if k == n - 1:
            total += 1
            if not count_all or total == 1:
                for w in range(n):
                    out_pt[w] = pt[w]
                    out_bit[w] = bit[w]
            if not count_all:
                return 1
            if limit > 0 and total >= limit:
                return total
            continue
        k += 1
        cand[k] = 0
        placed[k] = False
    return total


@njit(cache=True)
def embedding_ok(n, px, py, order, par, deg, rotpos, mode, pt, bit, owner, dirs):
    """Re-check a complete placement (``pt``, ``bit``) against the same rules as ``_search``."""
    owner[:, :] = -1
    dirs[:] = 0
    for k in range(1, n):
        v = order[k]
        u = par[v]
        du = _depart(px[pt[u]], py[pt[u]], px[pt[v]], py[pt[v]], bit[v] == 1)
        dv = _depart(px[pt[v]], py[pt[v]], px[pt[u]], py[pt[u]], bit[v] == 0)
        if dirs[u] & (1 << du) or dirs[v] & (1 << dv):
            return False
        dirs[u] |= 1 << du
        dirs[v] |= 1 << dv
        owner[u, du] = v
        owner[v, dv] = u
    if mode != 0:
        for v in range(n):
            if not _rotation_ok(v, owner, rotpos, deg, mode):
                return False
    for k in range(1, n):
        c = order[k]
        a = par[c]
        for j in range(1, k):
            w = order[j]
            b = par[w]
            if a == b or a == w:
                sv = a
            elif c == b:
                sv = c
            else:
                sv = -1
            sx = px[pt[sv]] if sv >= 0 else 0
            sy = py[pt[sv]] if sv >= 0 else 0
            if not l_edges_compatible(px[pt[a]], py[pt[a]], px[pt[c]], py[pt[c]], bit[c] == 1,
                                      px[pt[b]], py[pt[b]], px[pt[w]], py[pt[w]], bit[w] == 1,
                                      sv >= 0, sx, sy):
                return False
    return True


@njit(cache=True)
def _to_front(cpt, cbit, k, tmp_pt, tmp_bit):
    tmp_pt[:] = cpt[k]
    tmp_bit[:] = cbit[k]
    for j in range(k, 0, -1):
        cpt[j] = cpt[j - 1]
        cbit[j] = cbit[j - 1]
    cpt[0] = tmp_pt
    cbit[0] = tmp_bit


@njit(cache=True)
def sweep(n, ys_all, orders, pars, degs, rotposs, twins, mode, lookahead, slots, max_fail, fail_ps, fail_ts):
    """Run ``search`` for every (point set, tree) pair; record failing index pairs.

    Returns the number of failures (only the first ``max_fail`` are stored).
    """
    m = ys_all.shape[0]
    T = orders.shape[0]
    px = np.arange(n).astype(np.int64)
    py = np.zeros(n, np.int64)
    partner = np.full(n, -1, np.int64)
    out_pt = np.zeros(n, np.int64)
    out_bit = np.zeros(n, np.int64)
    ws, owner = workspace(n)
    dirs = np.zeros(n, np.int64)
    # recent embeddings per tree, most recently useful first; consecutive
    # point sets share long prefixes, so one of them is often still valid
    cache_pt = np.zeros((T, slots, n), np.int64)
    cache_bit = np.zeros((T, slots, n), np.int64)
    ncached = np.zeros(T, np.int64)
    nf = 0
    for i in range(m):
        for j in range(n):
            py[j] = ys_all[i, j]
        near, central = value_order(n, px, py)
        for t in range(T):
            hit = -1
            for sl in range(ncached[t]):
                if embedding_ok(n, px, py, orders[t], pars[t], degs[t], rotposs[t], mode,
                                cache_pt[t, sl], cache_bit[t, sl], owner, dirs):
                    hit = sl
                    break
            if hit >= 0:
                if hit > 0:
                    _to_front(cache_pt[t], cache_bit[t], hit, out_pt, out_bit)
                continue
            r = _search(n, px, py, near, central, ws, owner, orders[t], pars[t], degs[t], rotposs[t], mode,
                        partner, False, twins[t], False, out_pt, out_bit, 0, 0, lookahead)
            if r == 1 and slots > 0:
                if ncached[t] < slots:
                    ncached[t] += 1
                cache_pt[t, ncached[t] - 1] = out_pt
                cache_bit[t, ncached[t] - 1] = out_bit
                _to_front(cache_pt[t], cache_bit[t], ncached[t] - 1, out_pt, out_bit)
            if r == 0:
                if nf < max_fail:
                    fail_ps[nf] = i
                    fail_ts[nf] = t
                nf += 1
    return nf

"""Brute-force reference for L-shaped embeddings, independent of the search code.

Axis-aligned segments with integer end points meet only in lattice points, so
an edge is represented by the set of lattice points on its two legs.
"""

from itertools import permutations, product

E, N, W, S = range(4)


def lattice_path(pa, pb, h):
    bend = (pb[0], pa[1]) if h else (pa[0], pb[1])
    pts = set()
    for (x0, y0), (x1, y1) in ((pa, bend), (bend, pb)):
        for x in range(min(x0, x1), max(x0, x1) + 1):
            for y in range(min(y0, y1), max(y0, y1) + 1):
                pts.add((x, y))
    return pts


def leaves_towards(pa, pb, h):
    if h:
        return E if pb[0] > pa[0] else W
    return N if pb[1] > pa[1] else S


def drawing_ok(edges, pos, hs):
    """``hs[k]`` is True when edge k = (a, b) leaves a horizontally."""
    paths = [lattice_path(pos[a], pos[b], h) for (a, b), h in zip(edges, hs)]
    where = {q: v for v, q in enumerate(pos)}
    for (a, b), path in zip(edges, paths):
        for q in path:
            if q in where and where[q] not in (a, b):
                return False
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            common = set(edges[i]) & set(edges[j])
            allowed = {pos[w] for w in common}
            if paths[i] & paths[j] != allowed:
                return False
    return True


def rotation_ok(adj_rot, edges, pos, hs, mirror):
    """Counterclockwise order of departures matches the rotation (or its mirror)."""
    out = {}
    for (a, b), h in zip(edges, hs):
        out[(a, b)] = leaves_towards(pos[a], pos[b], h)
        out[(b, a)] = leaves_towards(pos[b], pos[a], not h)
    for v, rot in enumerate(adj_rot):
        if len(rot) < 3:
            continue
        seen = sorted(rot, key=lambda w: out[(v, w)])
        want = tuple(reversed(rot)) if mirror else tuple(rot)
        k = seen.index(want[0])
        if tuple(seen[k:] + seen[:k]) != want:
            return False
    return True


def count_drawings(n, edges, perm, rotation=None, strict=False):
    pts = [(j + 1, y) for j, y in enumerate(perm)]
    total = 0
    for place in permutations(range(n)):
        pos = [pts[place[v]] for v in range(n)]
        for hs in product((False, True), repeat=len(edges)):
            if not drawing_ok(edges, pos, hs):
                continue
            if rotation is None:
                total += 1
            elif rotation_ok(rotation, edges, pos, hs, False) or (
                    not strict and rotation_ok(rotation, edges, pos, hs, True)):
                total += 1
    return total

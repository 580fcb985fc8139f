"""L-shaped edges, embedding validity and exact search.

An embedding maps every tree vertex to a distinct point and draws each edge
``{a, b}`` (``a < b``) as two axis-aligned segments with a single bend.  The
bit ``orient[(a, b)]`` says whether the edge leaves ``a`` horizontally.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernel
from .geometry import PointSet, staircase_boxes
from .trees import OrderedTree, Tree


class Direction(enum.IntEnum):
    """Departure directions, numbered counterclockwise."""

    E = 0
    N = 1
    W = 2
    S = 3

    def ccw(self) -> "Direction":
        return Direction((self + 1) % 4)


@dataclass(frozen=True)
class Segment:
    axis: str  # "H" or "V"
    fixed: int  # y for horizontal, x for vertical
    lo: int
    hi: int

    @classmethod
    def between(cls, p: tuple[int, int], q: tuple[int, int]) -> "Segment":
        if p[1] == q[1]:
            return cls("H", p[1], min(p[0], q[0]), max(p[0], q[0]))
        if p[0] == q[0]:
            return cls("V", p[0], min(p[1], q[1]), max(p[1], q[1]))
        raise ValueError(f"{p} and {q} are not axis-aligned")

    def contains(self, pt: tuple[int, int]) -> bool:
        x, y = pt
        if self.axis == "H":
            return y == self.fixed and self.lo <= x <= self.hi
        return x == self.fixed and self.lo <= y <= self.hi


def edge_segments(pa: tuple[int, int], pb: tuple[int, int], horizontal_at_a: bool) -> tuple[Segment, Segment]:
    """The two segments of the L-edge from ``pa`` to ``pb``, starting at ``pa``."""
    if pa[0] == pb[0] or pa[1] == pb[1]:
        raise ValueError(f"points {pa} and {pb} share a coordinate")
    bend = (pb[0], pa[1]) if horizontal_at_a else (pa[0], pb[1])
    return Segment.between(pa, bend), Segment.between(bend, pb)


def departure(pa: tuple[int, int], pb: tuple[int, int], horizontal_at_a: bool) -> Direction:
    if horizontal_at_a:
        return Direction.E if pb[0] > pa[0] else Direction.W
    return Direction.N if pb[1] > pa[1] else Direction.S


def segment_intersection(s: Segment, t: Segment):
    """Intersection of two closed segments as ``None`` or a pair of end points."""
    if s.axis == t.axis:
        if s.fixed != t.fixed:
            return None
        lo, hi = max(s.lo, t.lo), min(s.hi, t.hi)
        if lo > hi:
            return None
        if s.axis == "H":
            return (lo, s.fixed), (hi, s.fixed)
        return (s.fixed, lo), (s.fixed, hi)
    h, v = (s, t) if s.axis == "H" else (t, s)
    if h.lo <= v.fixed <= h.hi and v.lo <= h.fixed <= v.hi:
        pt = (v.fixed, h.fixed)
        return pt, pt
    return None


@dataclass(frozen=True)
class Embedding:
    placement: tuple[int, ...]  # vertex -> 0-based point index
    orient: dict = field(hash=False)  # (a, b) with a < b -> horizontal at a

    def horizontal_at(self, u: int, v: int) -> bool:
        a, b = (u, v) if u < v else (v, u)
        h = self.orient[(a, b)]
        return h if u == a else not h

    def to_text(self) -> str:
        lines = [f"{v} -> {p + 1}" for v, p in enumerate(self.placement)]
        lines += [f"edge {a} {b} : {'H' if h else 'V'}" for (a, b), h in sorted(self.orient.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Embedding":
        place: dict[int, int] = {}
        orient = {}
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln:
                continue
            if ln.startswith("edge"):
                head, hv = ln.split(":")
                _, a, b = head.split()
                a, b = sorted((int(a), int(b)))
                orient[(a, b)] = hv.strip() == "H"
            else:
                v, p = ln.split("->")
                place[int(v)] = int(p) - 1
        return cls(tuple(place[v] for v in range(len(place))), orient)


@dataclass
class Verdict:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _base(t: Tree | OrderedTree) -> Tree:
    return t.base if isinstance(t, OrderedTree) else t


def validate(t: Tree | OrderedTree, p: PointSet, e: Embedding, strict: bool = False) -> Verdict:
    """Check every validity condition of an L-shaped (order-preserving) embedding.

    For ordered trees the drawing may realise either the rotation system or its
    global mirror image unless ``strict`` is set.
    """
    tree = _base(t)
    n = tree.n
    if p.n != n:
        raise ValueError(f"tree has {n} vertices but point set has {p.n} points")
    bad: list[str] = []
    if len(e.placement) != n or sorted(e.placement) != list(range(n)):
        bad.append(f"placement {e.placement} is not a bijection onto the points")
        return Verdict(False, bad)
    if set(e.orient) != set(tree.edges):
        bad.append("orientation bits do not match the edge set")
        return Verdict(False, bad)

    pos = [p.point(j) for j in e.placement]
    dirs: dict[int, dict[Direction, int]] = {v: {} for v in range(n)}
    segs = {}
    for a, b in tree.edges:
        h = e.orient[(a, b)]
        segs[(a, b)] = edge_segments(pos[a], pos[b], h)
        for u, w, hu in ((a, b, h), (b, a, not h)):
            d = departure(pos[u], pos[w], hu)
            if d in dirs[u]:
                bad.append(f"edges {u}-{dirs[u][d]} and {u}-{w} both leave {u} towards {d.name}")
            dirs[u][d] = w

    for (a, b), sab in segs.items():
        for v in range(n):
            if v not in (a, b) and any(s.contains(pos[v]) for s in sab):
                bad.append(f"edge {a}-{b} passes through vertex {v}")

    edges = tree.edges
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            e1, e2 = edges[i], edges[j]
            common = set(e1) & set(e2)
            shared = pos[common.pop()] if common else None
            for s in segs[e1]:
                for t2 in segs[e2]:
                    hit = segment_intersection(s, t2)
                    if hit is None:
                        continue
                    if shared is not None and hit == (shared, shared):
                        continue
                    bad.append(f"edges {e1} and {e2} intersect at {hit[0]}..{hit[1]}")

    if isinstance(t, OrderedTree):
        def realised(rotation) -> bool:
            for v in range(n):
                if len(rotation[v]) <= 2:
                    continue
                seq = [dirs[v][d] for d in Direction if d in dirs[v]]
                rot = list(rotation[v])
                k = rot.index(seq[0])
                if rot[k:] + rot[:k] != seq:
                    return False
            return True

        if not realised(t.rotation) and (strict or not realised(t.reflected().rotation)):
            bad.append("cyclic neighbour orders do not match the rotation system")
    return Verdict(not bad, bad)


# ---------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchConfig:
    """Options for :func:`embed`.

    ``box_pruning`` refuses to put two degree-4 vertices into one size-2 box;
    it needs staircase metadata, taken from ``boxes`` or detected from the
    point set.  ``strict`` disables reflection acceptance for ordered trees.
    ``max_nodes`` (0 = unlimited) bounds the number of placements tried.
    ``lookahead`` checks after each placement that every unfinished vertex can
    still reach enough free points; it prunes hard instances hard but costs
    more than it saves on easy ones.
    """

    box_pruning: bool = False
    boxes: Optional[tuple[int, ...]] = None
    strict: bool = False
    leaves_last: bool = True
    lookahead: bool = True
    max_nodes: int = 0


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass
class _Prepared:
    n: int
    order: np.ndarray
    par: np.ndarray
    deg: np.ndarray
    rotpos: np.ndarray
    twin: np.ndarray
    multiplicity: int  # embeddings represented by each symmetry-reduced one


def dfs_order(tree: Tree, leaves_last: bool = False) -> tuple[list[int], list[int]]:
    """Placement order: DFS preorder from the smallest-labelled maximum-degree vertex.

    Children are visited by label.  With ``leaves_last`` the inner vertices
    are placed first and the leaves follow, grouped by their neighbour.
    """
    n = tree.n
    root = max(range(n), key=lambda v: (tree.degree(v), -v))
    par = [-1] * n
    order = []
    leaves = []
    stack = [root]
    seen = {root}
    while stack:
        v = stack.pop()
        if leaves_last and tree.degree(v) == 1 and v != root:
            leaves.append(v)
        else:
            order.append(v)
        for w in reversed(tree.adj[v]):
            if w not in seen:
                seen.add(w)
                par[w] = v
                stack.append(w)
    pos = {v: i for i, v in enumerate(order)}
    leaves.sort(key=lambda v: (pos[par[v]], v))
    return order + leaves, par


def prepare(t: Tree | OrderedTree, leaves_last: bool = False) -> _Prepared:
    tree = _base(t)
    n = tree.n
    order, par = dfs_order(tree, leaves_last)
    rotpos = np.zeros((n, n), dtype=np.int64)
    twin = np.full(n, -1, dtype=np.int64)
    multiplicity = 1
    if isinstance(t, OrderedTree):
        for v, r in enumerate(t.rotation):
            for i, w in enumerate(r):
                rotpos[v, w] = i
    else:
        # sibling leaves are interchangeable: visit their placements in increasing point order
        last_leaf: dict[int, int] = {}
        for v in order[1:]:
            if tree.degree(v) != 1:
                continue
            u = par[v]
            if u in last_leaf:
                twin[v] = last_leaf[u]
            last_leaf[u] = v
        for u in range(n):
            k = sum(1 for w in tree.adj[u] if tree.degree(w) == 1 and par[w] == u)
            multiplicity *= math.factorial(k)
    return _Prepared(
        n,
        np.array(order, dtype=np.int64),
        np.array([max(q, 0) for q in par], dtype=np.int64),
        np.array([tree.degree(v) for v in range(n)], dtype=np.int64),
        rotpos,
        twin,
        multiplicity,
    )


def _partner(p: PointSet, cfg: SearchConfig) -> np.ndarray:
    partner = np.full(p.n, -1, dtype=np.int64)
    if not cfg.box_pruning:
        return partner
    boxes = cfg.boxes or staircase_boxes(p)
    if boxes is None or sum(boxes) != p.n:
        raise ValueError("box pruning needs a staircase point set")
    start = 0
    for a in boxes:
        if a == 2:
            partner[start], partner[start + 1] = start + 1, start
        start += a
    return partner


def _check_sizes(t, p):
    if _base(t).n != p.n:
        raise ValueError(f"tree has {_base(t).n} vertices but point set has {p.n} points")


def _run(t, p, cfg: SearchConfig, mode: int, count_all: bool, limit: int = 0):
    prep = prepare(t, cfg.leaves_last)
    n = prep.n
    px = np.arange(n, dtype=np.int64)
    py = np.array(p.perm, dtype=np.int64) - 1
    out_pt = np.zeros(n, dtype=np.int64)
    out_bit = np.zeros(n, dtype=np.int64)
    r = _kernel.search(n, px, py, prep.order, prep.par, prep.deg, prep.rotpos, mode,
                       _partner(p, cfg), cfg.box_pruning, prep.twin, count_all, out_pt, out_bit, limit,
                       cfg.max_nodes, cfg.lookahead)
    if r < 0:
        raise SearchBudgetExceeded(f"search exceeded {cfg.max_nodes} nodes")
    if count_all:
        r *= prep.multiplicity
    return int(r), prep, out_pt, out_bit


def _decode(tree: Tree, prep: _Prepared, out_pt, out_bit) -> Embedding:
    orient = {}
    root = int(prep.order[0])
    for v in range(tree.n):
        if v == root:
            continue
        u = int(prep.par[v])
        h = bool(out_bit[v])  # horizontal at the parent u
        a, b = (u, v) if u < v else (v, u)
        orient[(a, b)] = h if a == u else not h
    return Embedding(tuple(int(q) for q in out_pt), orient)


def embed(t: Tree, p: PointSet, cfg: SearchConfig = SearchConfig()) -> Optional[Embedding]:
    """Find an L-shaped embedding of the unordered tree ``t``, or None."""
    _check_sizes(t, p)
    tree = _base(t)
    r, prep, out_pt, out_bit = _run(tree, p, cfg, 0, False)
    return _decode(tree, prep, out_pt, out_bit) if r else None


def embed_ordered(t: OrderedTree, p: PointSet, cfg: SearchConfig = SearchConfig()) -> Optional[Embedding]:
    """Find an order-preserving embedding (rotation system or, unless strict, its mirror)."""
    _check_sizes(t, p)
    modes = (1,) if cfg.strict else (1, 2)
    for mode in modes:
        r, prep, out_pt, out_bit = _run(t, p, cfg, mode, False)
        if r:
            return _decode(t.base, prep, out_pt, out_bit)
    return None


def count_embeddings(t: Tree | OrderedTree, p: PointSet, cfg: SearchConfig = SearchConfig()) -> int:
    """Exact number of valid (placement, orientation) pairs."""
    _check_sizes(t, p)
    if not isinstance(t, OrderedTree):
        return _run(t, p, cfg, 0, True)[0]
    plain = _run(t, p, cfg, 1, True)[0]
    if cfg.strict:
        return plain
    return plain + _run(t, p, cfg, 2, True)[0] - _run(t, p, cfg, 3, True)[0]


def is_embeddable(t: Tree | OrderedTree, p: PointSet, cfg: SearchConfig = SearchConfig()) -> bool:
    if isinstance(t, OrderedTree):
        return embed_ordered(t, p, cfg) is not None
    return embed(t, p, cfg) is not None


def box_lemma_holds(t: Tree | OrderedTree, boxes: Sequence[int], e: Embedding) -> bool:
    """No size-2 box of the staircase holds two degree-4 vertices."""
    tree = _base(t)
    box_of = []
    for i, a in enumerate(boxes):
        box_of += [i] * a
    heavy: dict[int, int] = {}
    for v, q in enumerate(e.placement):
        if tree.degree(v) == 4 and boxes[box_of[q]] == 2:
            heavy[box_of[q]] = heavy.get(box_of[q], 0) + 1
    return all(c < 2 for c in heavy.values())

"""Trees and ordered trees of maximum degree 4.

Vertices are labelled ``0..n-1``.  An ordered tree carries, for each vertex,
the counterclockwise cyclic order of its neighbours (a rotation system).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

MAXDEG = 4


@dataclass(frozen=True)
class Tree:
    n: int
    edges: tuple[tuple[int, int], ...]
    adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = tuple(tuple(sorted((int(u), int(v)))) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.n
        if n < 1:
            raise ValueError("tree must have at least one vertex")
        if len(edges) != n - 1:
            raise ValueError(f"a tree on {n} vertices has {n - 1} edges, got {len(edges)}")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"bad edge {(u, v)}")
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adj", tuple(tuple(sorted(a)) for a in adj))
        if len(set(edges)) != len(edges):
            raise ValueError("repeated edge")
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise ValueError("edges do not form a connected tree")

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def degree_counts(self) -> dict[int, int]:
        return dict(Counter(len(a) for a in self.adj))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class OrderedTree:
    base: Tree
    rotation: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rot = tuple(tuple(int(w) for w in r) for r in self.rotation)
        object.__setattr__(self, "rotation", rot)
        if len(rot) != self.base.n:
            raise ValueError("rotation must list every vertex")
        for v, r in enumerate(rot):
            if sorted(r) != list(self.base.adj[v]):
                raise ValueError(f"rotation at {v} is not a cyclic order of its neighbours")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def edges(self):
        return self.base.edges

    @property
    def adj(self):
        return self.base.adj

    def reflected(self) -> "OrderedTree":
        return OrderedTree(self.base, tuple(tuple(reversed(r)) for r in self.rotation))


# ---------------------------------------------------------------- canonical codes


def _centers(adj: Sequence[Sequence[int]]) -> list[int]:
    n = len(adj)
    if n <= 2:
        return list(range(n))
    deg = [len(a) for a in adj]
    layer = [v for v in range(n) if deg[v] == 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def _rooted_code(adj, v: int, parent: int) -> str:
    return "(" + "".join(sorted(_rooted_code(adj, w, v) for w in adj[v] if w != parent)) + ")"


def canonical_tree_code(t: Tree | OrderedTree) -> str:
    """Isomorphism-invariant string for the underlying free tree (centre-rooted AHU)."""
    base = t.base if isinstance(t, OrderedTree) else t
    return min(_rooted_code(base.adj, c, -1) for c in _centers(base.adj))


def _plane_code(rotation, v: int, start: int, parent: int) -> str:
    rot = rotation[v]
    k = rot.index(start)
    order = rot[k:] + rot[:k]
    return "(" + "".join(_plane_code(rotation, w, _after(rotation[w], v), v) for w in order if w != parent) + ")"


def _after(rot: tuple[int, ...], v: int) -> int:
    """Neighbour following ``v`` counterclockwise (``v`` itself for a leaf)."""
    return rot[(rot.index(v) + 1) % len(rot)]


def _oriented_code(rotation) -> str:
    n = len(rotation)
    if n == 1:
        return "()"
    return min(_plane_code(rotation, v, w, -1) for v in range(n) for w in rotation[v])


def canonical_ordered_code(t: OrderedTree, reflection: bool = True) -> str:
    """Invariant of ordered trees up to relabelling (and, by default, global reflection)."""
    code = _oriented_code(t.rotation)
    if reflection:
        code = min(code, _oriented_code(tuple(tuple(reversed(r)) for r in t.rotation)))
    return code


# ---------------------------------------------------------------- enumeration


def _relabel_bfs(g: nx.Graph) -> Tree:
    root = max(sorted(g.nodes), key=lambda v: g.degree(v))
    order = list(nx.bfs_tree(g, root))
    label = {v: i for i, v in enumerate(order)}
    return Tree(len(order), tuple(sorted(tuple(sorted((label[u], label[v]))) for u, v in g.edges)))


def enumerate_trees(n: int, maxdeg: int = MAXDEG) -> Iterator[Tree]:
    """One tree per isomorphism class of free trees on n vertices with degree <= maxdeg.

    Ordered by canonical code.  Vertices are labelled in BFS order from a
    maximum-degree vertex.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        yield Tree(1, ())
        return
    trees = []
    for g in nx.nonisomorphic_trees(n):
        if max(d for _, d in g.degree) <= maxdeg:
            t = _relabel_bfs(g)
            trees.append((canonical_tree_code(t), t))
    trees.sort()
    yield from (t for _, t in trees)


def rotation_systems(t: Tree) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Every rotation system of ``t`` (first neighbour fixed per vertex)."""
    per_vertex = []
    for a in t.adj:
        if len(a) <= 2:
            per_vertex.append([tuple(a)])
        else:
            per_vertex.append([(a[0],) + p for p in permutations(a[1:])])
    yield from product(*per_vertex)


def ordered_classes(t: Tree) -> list[OrderedTree]:
    """Representatives of all ordered versions of ``t`` up to isomorphism and reflection."""
    found: dict[str, tuple] = {}
    for rot in rotation_systems(t):
        plain = _oriented_code(rot)
        mirrored = _oriented_code(tuple(tuple(reversed(r)) for r in rot))
        code = min(plain, mirrored)
        # keep the orientation whose plain code is the canonical one
        if code not in found and plain == code:
            found[code] = rot
        elif code not in found:
            found[code] = None
    out = []
    for code, rot in sorted(found.items()):
        if rot is None:
            rot = next(r for r in rotation_systems(t) if _oriented_code(r) == code)
        out.append(OrderedTree(t, rot))
    return out


def enumerate_ordered_trees(n: int, maxdeg: int = MAXDEG, nontrivial_only: bool = False) -> Iterator[OrderedTree]:
    """One ordered tree per class, identifying each with its global reflection.

    With ``nontrivial_only`` the free trees that have a single class are skipped.
    """
    for t in enumerate_trees(n, maxdeg):
        classes = ordered_classes(t)
        if nontrivial_only and len(classes) == 1:
            continue
        yield from classes


# ---------------------------------------------------------------- named trees


def path_tree(n: int) -> Tree:
    return Tree(n, tuple((i, i + 1) for i in range(n - 1)))


def star_tree(leaves: int) -> Tree:
    return Tree(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def make_T13() -> Tree:
    """Y = 0 joined to X1, X2, X3 = 1, 2, 3; each Xi carries three leaves."""
    edges = [(0, 1), (0, 2), (0, 3)]
    leaf = 4
    for x in (1, 2, 3):
        for _ in range(3):
            edges.append((x, leaf))
            leaf += 1
    return Tree(13, tuple(edges))


def make_Tr(r: int, allow_small: bool = False) -> OrderedTree:
    """The ordered tree on 9r+8 vertices with spine X0..X_{r+1}.

    Labels: X_i = i for 0 <= i <= r+1; X_i' = r+1+2i-1, X_i'' = r+1+2i for
    1 <= i <= r; leaves follow.  At each inner spine vertex the counterclockwise
    order is (X_{i+1}, X_{i-1}, X_i', X_i''): both spine neighbours are
    consecutive and every side branch hangs on the same side of the spine.
    The theorem only covers even r >= 10; smaller even r needs ``allow_small``.
    """
    if r % 2 or r < 0:
        raise ValueError(f"r must be a non-negative even integer, got {r}")
    if r < 10 and not allow_small:
        raise ValueError("r < 10 is outside the theorem's range; pass allow_small=True")
    spine = list(range(r + 2))
    prime = {i: r + 1 + 2 * i - 1 for i in range(1, r + 1)}
    dprime = {i: r + 1 + 2 * i for i in range(1, r + 1)}
    nxt = 3 * r + 2
    edges: list[tuple[int, int]] = []
    rot: dict[int, tuple[int, ...]] = {}

    def leaves(v: int, k: int = 3) -> list[int]:
        nonlocal nxt
        out = list(range(nxt, nxt + k))
        nxt += k
        for w in out:
            edges.append((v, w))
            rot[w] = (v,)
        return out

    for i in range(r + 1):
        edges.append((i, i + 1))
    for i in range(1, r + 1):
        rot[i] = (i + 1, i - 1, prime[i], dprime[i])
        for side in (prime[i], dprime[i]):
            edges.append((i, side))
            rot[side] = (i, *leaves(side))
    rot[0] = (1, *leaves(0))
    rot[r + 1] = (r, *leaves(r + 1))
    n = 9 * r + 8
    assert nxt == n and len(spine) == r + 2
    return OrderedTree(Tree(n, tuple(edges)), tuple(rot[v] for v in range(n)))


def induced_subtree(t: Tree, keep: Iterable[int]) -> tuple[Tree, dict[int, int]]:
    """Subtree induced by ``keep`` relabelled to 0..k-1, plus the old->new label map."""
    keep = sorted(set(keep))
    label = {v: i for i, v in enumerate(keep)}
    edges = tuple((label[u], label[v]) for u, v in t.edges if u in label and v in label)
    return Tree(len(keep), edges), label


def is_isomorphic(a: Tree, b: Tree) -> bool:
    return a.n == b.n and canonical_tree_code(a) == canonical_tree_code(b)


# ---------------------------------------------------------------- text format


def format_tree(t: Tree | OrderedTree) -> str:
    lines = [str(t.n)] + [f"{u} {v}" for u, v in t.edges]
    if isinstance(t, OrderedTree):
        lines += [f"{v}: " + " ".join(map(str, r)) for v, r in enumerate(t.rotation)]
    return "\n".join(lines) + "\n"


def parse_tree(text: str) -> Tree | OrderedTree:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty tree file")
    n = int(lines[0])
    edges = []
    rotation: dict[int, tuple[int, ...]] = {}
    for ln in lines[1:]:
        if ":" in ln:
            v, rest = ln.split(":", 1)
            rotation[int(v)] = tuple(int(w) for w in rest.split())
        else:
            u, v = ln.split()
            edges.append((int(u), int(v)))
    tree = Tree(n, tuple(edges))
    if not rotation:
        return tree
    if set(rotation) != set(range(n)):
        raise ValueError("ordered tree file must give a rotation line for every vertex")
    return OrderedTree(tree, tuple(rotation[v] for v in range(n)))


def as_ordered(t: Tree, rotation: Mapping[int, Sequence[int]] | None = None) -> OrderedTree:
    """Attach a rotation system; defaults to the sorted neighbour order."""
    rot = tuple(tuple(rotation[v]) if rotation else tuple(t.adj[v]) for v in range(t.n))
    return OrderedTree(t, rot)

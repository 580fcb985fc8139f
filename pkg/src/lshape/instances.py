"""Registry of the known non-embeddable instances.

``T_n`` for n in {13, 14, 16, ..., 20} is the subtree of the shipped 20-vertex
tree induced by its vertices 0..n-1; each is paired with the staircases listed
for its size.  ``T10/S10`` is the unique ordered failure at n = 10 and
``Tr/r=10`` is the ordered family member on 98 vertices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from .geometry import PointSet, parse_perm, staircase_points
from .trees import OrderedTree, Tree, induced_subtree, make_Tr, parse_tree

STAIRCASES: dict[int, tuple[tuple[int, ...], ...]] = {
    13: ((1, 1, 2, 2, 1, 2, 2, 1, 1), (1, 1, 3, 1, 1, 1, 3, 1, 1), (2, 2, 2, 1, 2, 2, 2), (2, 3, 1, 1, 1, 3, 2)),
    14: ((1, 1, 2, 1, 2, 2, 1, 2, 1, 1), (2, 2, 1, 2, 2, 1, 2, 2)),
    16: ((1, 3, 1, 1, 1, 2, 1, 1, 1, 3, 1), (1, 3, 2, 1, 2, 1, 2, 3, 1)),
    17: ((1, 1, 3, 1, 1, 3, 1, 1, 3, 1, 1),),
    18: ((1, 1, 2, 1, 1, 1, 2, 2, 1, 1, 1, 2, 1, 1),),
    19: (
        (1, 1, 3, 1, 1, 1, 3, 1, 1, 1, 3, 1, 1),
        (1, 1, 3, 1, 2, 3, 2, 1, 3, 1, 1),
        (1, 1, 3, 2, 1, 3, 1, 2, 3, 1, 1),
        (2, 3, 1, 1, 1, 3, 1, 1, 1, 3, 2),
        (2, 3, 1, 2, 3, 2, 1, 3, 2),
        (2, 3, 2, 1, 3, 1, 2, 3, 2),
    ),
    20: (
        (1, 1, 2, 1, 1, 1, 2, 2, 2, 1, 1, 1, 2, 1, 1),
        (1, 1, 2, 1, 2, 2, 2, 2, 2, 1, 2, 1, 1),
        (1, 1, 2, 2, 1, 2, 2, 2, 1, 2, 2, 1, 1),
        (2, 2, 1, 1, 1, 2, 2, 2, 1, 1, 1, 2, 2),
        (2, 2, 1, 2, 2, 2, 2, 2, 1, 2, 2),
        (2, 2, 2, 1, 2, 2, 2, 1, 2, 2, 2),
    ),
}
S13 = (2, 2, 2, 1, 2, 2, 2)
LONG_RUNNING_FROM = 17


@dataclass(frozen=True)
class Instance:
    name: str
    tree: Tree | OrderedTree
    points: PointSet
    staircase: Optional[tuple[int, ...]]
    long_running: bool
    expected: str = "non-embeddable"  # every registry entry is a known negative

    def __post_init__(self):
        if self.tree.n != self.points.n:
            raise ValueError(f"{self.name}: tree has {self.tree.n} vertices, point set {self.points.n} points")

    @property
    def ordered(self) -> bool:
        return isinstance(self.tree, OrderedTree)

    @property
    def n(self) -> int:
        return self.points.n


def _asset(name: str) -> str:
    return resources.files(__package__).joinpath("data").joinpath(name).read_text()


@lru_cache(maxsize=None)
def tree_T20() -> Tree:
    t = parse_tree(_asset("T20.txt"))
    assert isinstance(t, Tree)
    return t


@lru_cache(maxsize=None)
def tree_T(n: int) -> Tree:
    """The listed ``n``-vertex tree: vertices 0..n-1 of the 20-vertex tree."""
    if n not in STAIRCASES:
        raise KeyError(f"no listed tree on {n} vertices")
    sub, _ = induced_subtree(tree_T20(), range(n))
    return sub


@lru_cache(maxsize=None)
def tree_T10() -> OrderedTree:
    t = parse_tree(_asset("T10.txt"))
    assert isinstance(t, OrderedTree)
    return t


@lru_cache(maxsize=None)
def points_S10() -> PointSet:
    return parse_perm(_asset("S10.txt").strip())


def _fmt(s: tuple[int, ...]) -> str:
    return "(" + ",".join(map(str, s)) + ")"


def names(include_long: bool = True) -> list[str]:
    out = ["T13/S13", "T10/S10"]
    for n, lst in STAIRCASES.items():
        if include_long or n < LONG_RUNNING_FROM:
            out += [f"T{n}/{_fmt(s)}" for s in lst]
    if include_long:
        out.append("Tr/r=10")
    return out


_TR = re.compile(r"^Tr\s*[/:]\s*r\s*=\s*(\d+)$")
_TN = re.compile(r"^[Tn](\d+)\s*/\s*\(?([\d,\s]+)\)?$")


def load_instance(name: str) -> Instance:
    """Resolve a registry name such as ``T13/S13``, ``T17/(1,1,3,...)`` or ``Tr/r=10``."""
    key = name.strip()
    if key == "T13/S13":
        return Instance(key, tree_T(13), staircase_points(S13), S13, False)
    if key == "T10/S10":
        return Instance(key, tree_T10(), points_S10(), None, False)
    m = _TR.match(key)
    if m:
        r = int(m.group(1))
        t = make_Tr(r)
        s = (2,) * (t.n // 2)
        return Instance(f"Tr/r={r}", t, staircase_points(s), s, True)
    m = _TN.match(key)
    if m:
        n = int(m.group(1))
        s = tuple(int(x) for x in m.group(2).replace(" ", "").split(",") if x)
        if n not in STAIRCASES or s not in STAIRCASES[n]:
            raise KeyError(f"unknown instance {name!r}")
        return Instance(f"T{n}/{_fmt(s)}", tree_T(n), staircase_points(s), s, n >= LONG_RUNNING_FROM)
    raise KeyError(f"unknown instance {name!r}")


def all_instances(include_long: bool = True) -> list[Instance]:
    return [load_instance(k) for k in names(include_long)]


def named_tree(name: str) -> Tree | OrderedTree:
    """Tree shorthands: ``T13``, ``T10``, ``T20``, ``T<n>`` for listed n, ``Tr:r=10``."""
    key = name.strip()
    m = _TR.match(key)
    if m:
        return make_Tr(int(m.group(1)))
    if key == "T10":
        return tree_T10()
    m = re.match(r"^T(\d+)$", key)
    if m and int(m.group(1)) in STAIRCASES:
        return tree_T(int(m.group(1)))
    raise KeyError(f"unknown tree {name!r}")

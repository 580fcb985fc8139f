"""Point sets on the unit grid, staircases and the square symmetry group.

A point set of size n is stored as a permutation ``perm`` of 1..n: the j-th
point from the left sits at ``(j, perm[j-1])``.  This representation can never
place two points on a common row or column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "PointSet",
    "StaircaseSpec",
    "SYMMETRIES",
    "ROTATIONS",
    "GROUPS",
    "staircase_points",
    "apply_symmetry",
    "compose",
    "inverse",
    "canonical_form",
    "is_canonical",
    "enumerate_canonical_pointsets",
    "canonical_pointset_array",
    "staircase_boxes",
    "parse_perm",
    "parse_staircase",
    "format_perm",
    "format_staircase",
]


@dataclass(frozen=True)
class PointSet:
    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(v) for v in self.perm)
        object.__setattr__(self, "perm", perm)
        n = len(perm)
        if n == 0:
            raise ValueError("point set must contain at least one point")
        if sorted(perm) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {perm}")

    @property
    def n(self) -> int:
        return len(self.perm)

    def __len__(self) -> int:
        return len(self.perm)

    def points(self) -> list[tuple[int, int]]:
        return [(j + 1, y) for j, y in enumerate(self.perm)]

    def point(self, j: int) -> tuple[int, int]:
        """Coordinates of the point with 0-based index ``j``."""
        return (j + 1, self.perm[j])

    def __str__(self) -> str:
        return format_perm(self.perm)


@dataclass(frozen=True)
class StaircaseSpec:
    box_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(a) for a in self.box_sizes)
        object.__setattr__(self, "box_sizes", sizes)
        if not sizes:
            raise ValueError("staircase needs at least one box")
        if any(a < 1 for a in sizes):
            raise ValueError(f"box sizes must be positive: {sizes}")

    @property
    def n(self) -> int:
        return sum(self.box_sizes)

    def __str__(self) -> str:
        return format_staircase(self.box_sizes)


def staircase_points(spec: StaircaseSpec | Sequence[int]) -> PointSet:
    if not isinstance(spec, StaircaseSpec):
        spec = StaircaseSpec(tuple(spec))
    top = spec.n
    perm: list[int] = []
    for a in spec.box_sizes:
        # box occupies rows top-a+1 .. top, ascending left to right
        perm.extend(range(top - a + 1, top + 1))
        top -= a
    return PointSet(tuple(perm))


def staircase_boxes(p: PointSet | Sequence[int]) -> tuple[int, ...] | None:
    """Box sizes if ``p`` is a staircase, else None.

    A staircase is a skew sum of ascending runs: every box is a run of
    consecutive values increasing by one, and each box lies entirely below
    the previous one.
    """
    perm = p.perm if isinstance(p, PointSet) else tuple(p)
    sizes = []
    start = 0
    n = len(perm)
    for j in range(1, n + 1):
        if j == n or perm[j] != perm[j - 1] + 1:
            sizes.append(j - start)
            start = j
    if staircase_points(sizes).perm != tuple(perm):
        return None
    return tuple(sizes)


# Each symmetry is a signed 2x2 matrix acting on centred coordinates.
_MATRICES = {
    "id": ((1, 0), (0, 1)),
    "rot90": ((0, -1), (1, 0)),
    "rot180": ((-1, 0), (0, -1)),
    "rot270": ((0, 1), (-1, 0)),
    "mirrorH": ((-1, 0), (0, 1)),
    "mirrorV": ((1, 0), (0, -1)),
    "diagMain": ((0, 1), (1, 0)),
    "diagAnti": ((0, -1), (-1, 0)),
}
SYMMETRIES: tuple[str, ...] = tuple(_MATRICES)
ROTATIONS: tuple[str, ...] = ("id", "rot90", "rot180", "rot270")
GROUPS = {"full8": SYMMETRIES, "rotations4": ROTATIONS, "rot4": ROTATIONS}
_BY_MATRIX = {m: name for name, m in _MATRICES.items()}


def _matmul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


def compose(g: str, h: str) -> str:
    """The symmetry ``g∘h`` (apply h first, then g)."""
    return _BY_MATRIX[_matmul(_MATRICES[g], _MATRICES[h])]


def inverse(g: str) -> str:
    for h in SYMMETRIES:
        if compose(g, h) == "id":
            return h
    raise AssertionError(g)


def _transform(g: str, perm: Sequence[int]) -> tuple[int, ...]:
    n = len(perm)
    (a, b), (c, d) = _MATRICES[g]
    out = [0] * n
    s = n + 1
    for j, y in enumerate(perm, start=1):
        # centred coordinates scaled by 2 keep everything integral
        u, v = 2 * j - s, 2 * y - s
        nu, nv = a * u + b * v, c * u + d * v
        out[(nu + s) // 2 - 1] = (nv + s) // 2
    return tuple(out)


def apply_symmetry(op: str, p: PointSet) -> PointSet:
    if op not in _MATRICES:
        raise ValueError(f"unknown symmetry {op!r}")
    return PointSet(_transform(op, p.perm))


def _group(group: str) -> tuple[str, ...]:
    try:
        return GROUPS[group]
    except KeyError:
        raise ValueError(f"unknown group {group!r}; use full8 or rotations4") from None


def canonical_form(p: PointSet, group: str = "full8") -> PointSet:
    return PointSet(min(_transform(g, p.perm) for g in _group(group)))


def is_canonical(p: PointSet, group: str = "full8") -> bool:
    return all(p.perm <= _transform(g, p.perm) for g in _group(group))


def _transform_array(g: str, perms: np.ndarray) -> np.ndarray:
    """Vectorised ``_transform`` over the rows of a (m, n) array of 1-based perms."""
    m, n = perms.shape
    (a, b), (c, d) = _MATRICES[g]
    s = n + 1
    u = np.broadcast_to(2 * np.arange(1, n + 1) - s, perms.shape)
    v = 2 * perms.astype(np.int64) - s
    cols = (a * u + b * v + s) // 2 - 1
    vals = (c * u + d * v + s) // 2
    out = np.empty_like(perms)
    rows = np.repeat(np.arange(m), n).reshape(m, n)
    out[rows, cols] = vals
    return out


def _lex_keys(perms: np.ndarray) -> np.ndarray:
    n = perms.shape[1]
    key = np.zeros(perms.shape[0], dtype=np.int64)
    for j in range(n):
        key = key * (n + 1) + perms[:, j]
    return key


def _canonical_mask(perms: np.ndarray, group: str) -> np.ndarray:
    key = _lex_keys(perms)
    mask = np.ones(len(perms), dtype=bool)
    for g in _group(group):
        if g != "id":
            mask &= key <= _lex_keys(_transform_array(g, perms))
    return mask


def _perms_with_prefix(n: int, prefix: tuple[int, ...]) -> np.ndarray:
    rest = [v for v in range(1, n + 1) if v not in prefix]
    tail = np.array(list(permutations(rest)), dtype=np.int16).reshape(-1, len(rest))
    head = np.broadcast_to(np.array(prefix, dtype=np.int16), (len(tail), len(prefix)))
    return np.hstack([head, tail])


def enumerate_canonical_pointsets(n: int, group: str = "full8") -> Iterator[PointSet]:
    """Yield one representative (the lex-smallest) per symmetry orbit, in lex order.

    Permutations are generated in lexicographic order in blocks sharing a
    short prefix, and each block is filtered with a vectorised canonicity test.
    """
    if n < 1:
        raise ValueError("n must be positive")
    _group(group)
    depth = max(0, min(2, n - 7))
    prefixes = permutations(range(1, n + 1), depth) if depth else [()]
    for prefix in prefixes:
        block = _perms_with_prefix(n, tuple(prefix))
        for row in block[_canonical_mask(block, group)]:
            yield PointSet(tuple(int(v) for v in row))


def canonical_pointset_array(n: int, group: str = "full8") -> np.ndarray:
    """All canonical representatives as an (m, n) int8 array of 0-based y-values."""
    _group(group)
    depth = max(0, min(2, n - 7))
    prefixes = permutations(range(1, n + 1), depth) if depth else [()]
    chunks = []
    for prefix in prefixes:
        block = _perms_with_prefix(n, tuple(prefix))
        chunks.append(block[_canonical_mask(block, group)])
    return (np.vstack(chunks) - 1).astype(np.int8)


_INT_LIST = re.compile(r"^\s*\(?\s*(\d+(?:\s*,\s*\d+)*)\s*\)?\s*$")


def parse_perm(text: str) -> PointSet:
    m = _INT_LIST.match(text)
    if not m:
        raise ValueError(f"bad permutation string {text!r}")
    return PointSet(tuple(int(t) for t in m.group(1).split(",")))


def parse_staircase(text: str) -> StaircaseSpec:
    m = _INT_LIST.match(text)
    if not m:
        raise ValueError(f"bad staircase string {text!r}")
    return StaircaseSpec(tuple(int(t) for t in m.group(1).split(",")))


def format_perm(perm: Sequence[int]) -> str:
    return ",".join(str(v) for v in perm)


def format_staircase(sizes: Sequence[int]) -> str:
    return "(" + ",".join(str(a) for a in sizes) + ")"

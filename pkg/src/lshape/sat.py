"""SAT encoding of L-shaped embeddability, DIMACS I/O and a built-in solver.

Variables: ``x(i, j)`` is true iff vertex i sits on point j; ``y(a, b)`` is
true iff the edge {a, b} (a < b) leaves a horizontally.  The crossing
clauses come from the same geometric predicate the backtracker uses.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Optional, TextIO

import numpy as np
from numba import njit

from . import _cdcl
from ._kernel import l_edges_compatible
from .embedder import Embedding
from .geometry import PointSet
from .trees import OrderedTree, Tree


class EncodingError(RuntimeError):
    """An assignment that cannot come from a correct encoding."""


@dataclass(frozen=True)
class VarMap:
    n: int
    edges: tuple[tuple[int, int], ...]

    def x(self, i: int, j: int) -> int:
        return i * self.n + j + 1

    def y(self, a: int, b: int) -> int:
        a, b = min(a, b), max(a, b)
        return self.n * self.n + self.edges.index((a, b)) + 1

    @property
    def var_count(self) -> int:
        return self.n * self.n + len(self.edges)

    def to_text(self) -> str:
        out = io.StringIO()
        for i in range(self.n):
            for j in range(self.n):
                out.write(f"x {i} {j} -> {self.x(i, j)}\n")
        for k, (a, b) in enumerate(self.edges):
            out.write(f"y {a} {b} -> {self.n * self.n + k + 1}\n")
        return out.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "VarMap":
        xs, edges = 0, []
        for ln in text.splitlines():
            if ln.startswith("x "):
                xs += 1
            elif ln.startswith("y "):
                _, a, b, _, _ = ln.split()
                edges.append((int(a), int(b)))
        n = int(round(xs ** 0.5))
        return cls(n, tuple(edges))


class CnfFormula:
    """Clauses stored flat: literals of clause c are ``lits[starts[c]:starts[c+1]]``."""

    def __init__(self, var_count: int, lits, starts):
        self.var_count = int(var_count)
        self.lits = np.asarray(lits, dtype=np.int32)
        self.starts = np.asarray(starts, dtype=np.int64)
        if len(self.lits) and np.abs(self.lits).max() > self.var_count:
            raise ValueError("literal refers to a variable beyond var_count")
        if np.any(np.diff(self.starts) <= 0):
            raise ValueError("empty clause")

    @classmethod
    def from_clauses(cls, var_count: int, clauses) -> "CnfFormula":
        clauses = [list(c) for c in clauses]
        lits = [l for c in clauses for l in c]
        starts = np.concatenate([[0], np.cumsum([len(c) for c in clauses])]) if clauses else [0]
        return cls(var_count, lits, starts)

    @property
    def num_clauses(self) -> int:
        return len(self.starts) - 1

    def clause(self, c: int) -> list[int]:
        return self.lits[self.starts[c]:self.starts[c + 1]].tolist()

    @property
    def clauses(self) -> list[list[int]]:
        return [self.clause(c) for c in range(self.num_clauses)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CnfFormula)
            and self.var_count == other.var_count
            and np.array_equal(self.lits, other.lits)
            and np.array_equal(self.starts, other.starts)
        )

    def satisfied_by(self, assignment: np.ndarray) -> bool:
        """``assignment[v-1]`` is the value of variable v."""
        a = np.asarray(assignment, dtype=bool)
        if not len(self.lits):
            return True
        true_lit = a[np.abs(self.lits) - 1] == (self.lits > 0)
        per_clause = np.add.reduceat(true_lit.astype(np.int64), self.starts[:-1])
        return bool(np.all(per_clause > 0))


# ---------------------------------------------------------------- geometric tables


@njit(cache=True)
def _crossing_tables(n, px, py):
    """Forbidden orientation combinations for every placement of two edges.

    ``disjoint[p,q,r,s,h1,h2]``: edge p-q (horizontal at p iff h1) meets edge
    r-s (horizontal at r iff h2).  ``shared[p,q,s,h1,h2]``: edges p-q and p-s
    leave p in different directions and still meet away from p.
    """
    disjoint = np.zeros((n, n, n, n, 2, 2), np.bool_)
    shared = np.zeros((n, n, n, 2, 2), np.bool_)
    for p in range(n):
        for q in range(n):
            if q == p:
                continue
            for r in range(n):
                if r == p or r == q:
                    continue
                for h1 in range(2):
                    for h2 in range(2):
                        d1 = (0 if px[q] > px[p] else 2) if h1 else (1 if py[q] > py[p] else 3)
                        d2 = (0 if px[r] > px[p] else 2) if h2 else (1 if py[r] > py[p] else 3)
                        if d1 != d2 and not l_edges_compatible(
                                px[p], py[p], px[q], py[q], h1 == 1,
                                px[p], py[p], px[r], py[r], h2 == 1, True, px[p], py[p]):
                            shared[p, q, r, h1, h2] = True
                for s in range(n):
                    if s == p or s == q or s == r:
                        continue
                    for h1 in range(2):
                        for h2 in range(2):
                            if not l_edges_compatible(
                                    px[p], py[p], px[q], py[q], h1 == 1,
                                    px[r], py[r], px[s], py[s], h2 == 1, False, 0, 0):
                                disjoint[p, q, r, s, h1, h2] = True
    return disjoint, shared


@njit(cache=True)
def _emit_forbidden(forb, xl, ye, yf, ve, vf, out, m):
    """Append clauses forbidding the orientation combos marked in ``forb`` (2x2).

    ``xl`` are the negated placement literals.  Combination (h1, h2) means
    ``ye == ve[h1]`` and ``yf == vf[h2]``, where ve/vf map the local bit to the
    value of the y variable.  Rows or columns that are forbidden entirely
    collapse into one clause.
    """
    done = np.zeros((2, 2), np.bool_)
    cnt = 0
    for h1 in range(2):
        for h2 in range(2):
            if forb[h1, h2]:
                cnt += 1
    if cnt == 0:
        return m
    if cnt == 4:
        for i in range(xl.shape[0]):
            out[m, i] = xl[i]
        return m + 1
    for h1 in range(2):
        if forb[h1, 0] and forb[h1, 1]:
            for i in range(xl.shape[0]):
                out[m, i] = xl[i]
            out[m, xl.shape[0]] = -ye if ve[h1] == 1 else ye
            m += 1
            done[h1, 0] = True
            done[h1, 1] = True
    for h2 in range(2):
        if forb[0, h2] and forb[1, h2] and not (done[0, h2] and done[1, h2]):
            for i in range(xl.shape[0]):
                out[m, i] = xl[i]
            out[m, xl.shape[0]] = -yf if vf[h2] == 1 else yf
            m += 1
            done[0, h2] = True
            done[1, h2] = True
    for h1 in range(2):
        for h2 in range(2):
            if forb[h1, h2] and not done[h1, h2]:
                for i in range(xl.shape[0]):
                    out[m, i] = xl[i]
                out[m, xl.shape[0]] = -ye if ve[h1] == 1 else ye
                out[m, xl.shape[0] + 1] = -yf if vf[h2] == 1 else yf
                m += 1
    return m


@njit(cache=True)
def _pair_clauses_disjoint(n, disjoint, a, b, c, d, ye, yf):
    out = np.zeros((n * n * n * n * 2 + 8, 6), np.int32)
    xl = np.zeros(4, np.int32)
    ident = np.array([0, 1])
    m = 0
    for p in range(n):
        for q in range(n):
            if q == p:
                continue
            for r in range(n):
                if r == p or r == q:
                    continue
                for s in range(n):
                    if s == p or s == q or s == r:
                        continue
                    xl[0] = -(a * n + p + 1)
                    xl[1] = -(b * n + q + 1)
                    xl[2] = -(c * n + r + 1)
                    xl[3] = -(d * n + s + 1)
                    m = _emit_forbidden(disjoint[p, q, r, s], xl, ye, yf, ident, ident, out, m)
    return out[:m]


@njit(cache=True)
def _pair_clauses_shared(n, shared, w, u, v, ye, yf, ve, vf):
    out = np.zeros((n * n * n * 2 + 8, 5), np.int32)
    xl = np.zeros(3, np.int32)
    m = 0
    for p in range(n):
        for q in range(n):
            if q == p:
                continue
            for s in range(n):
                if s == p or s == q:
                    continue
                xl[0] = -(w * n + p + 1)
                xl[1] = -(u * n + q + 1)
                xl[2] = -(v * n + s + 1)
                m = _emit_forbidden(shared[p, q, s], xl, ye, yf, ve, vf, out, m)
    return out[:m]


@njit(cache=True)
def _overlap_clauses(n, px, py, w, u, v, ye, yf, ve, vf):
    """Incident edges w-u and w-v must not leave w on the same side."""
    out = np.zeros((n * n * n * 2 + 8, 5), np.int32)
    xl = np.zeros(3, np.int32)
    forb = np.zeros((2, 2), np.bool_)
    m = 0
    for p in range(n):
        for q in range(n):
            if q == p:
                continue
            for s in range(n):
                if s == p or s == q:
                    continue
                xl[0] = -(w * n + p + 1)
                xl[1] = -(u * n + q + 1)
                xl[2] = -(v * n + s + 1)
                same_x = (px[q] > px[p]) == (px[s] > px[p])
                same_y = (py[q] > py[p]) == (py[s] > py[p])
                # both horizontal at w on the same side, or both vertical on the same side
                if same_x:
                    forb[:, :] = False
                    forb[1, 1] = True
                    m = _emit_forbidden(forb, xl, ye, yf, ve, vf, out, m)
                if same_y:
                    forb[:, :] = False
                    forb[0, 0] = True
                    m = _emit_forbidden(forb, xl, ye, yf, ve, vf, out, m)
    return out[:m]


def _rows_to_flat(blocks: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    lits, lens = [], []
    for blk in blocks:
        if not len(blk):
            continue
        nz = blk != 0
        lens.append(nz.sum(axis=1))
        lits.append(blk[nz])
    if not lits:
        return np.zeros(0, np.int32), np.zeros(1, np.int64)
    lens = np.concatenate(lens)
    return np.concatenate(lits).astype(np.int32), np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)


def sibling_leaves(t: Tree) -> list[list[int]]:
    """Groups (size >= 2) of leaves hanging off the same vertex; members are interchangeable."""
    groups = []
    for u in range(t.n):
        g = sorted(w for w in t.adj[u] if t.degree(w) == 1 and not (t.degree(u) == 1 and u < w))
        if len(g) >= 2:
            groups.append(g)
    return groups


def _iter_blocks(t: Tree, p: PointSet, vm: VarMap, symmetry_breaking: bool = False) -> Iterator[np.ndarray]:
    n = t.n
    px = np.arange(n, dtype=np.int64)
    py = np.array(p.perm, dtype=np.int64) - 1

    # bijective mapping: every vertex on at least one and at most one point,
    # no point used twice (pairwise at-most-one).  The per-point at-least-one
    # rows are implied by the others but help propagation a lot.
    alo = np.array([[vm.x(i, j) for j in range(n)] for i in range(n)], dtype=np.int32)
    yield alo
    yield np.array([[vm.x(i, j) for i in range(n)] for j in range(n)], dtype=np.int32)
    amo = []
    for i in range(n):
        for j1, j2 in combinations(range(n), 2):
            amo.append((-vm.x(i, j1), -vm.x(i, j2)))
    for j in range(n):
        for i1, i2 in combinations(range(n), 2):
            amo.append((-vm.x(i1, j), -vm.x(i2, j)))
    if amo:
        yield np.array(amo, dtype=np.int32)

    if symmetry_breaking:
        rows = [
            (-vm.x(v, j), -vm.x(u, j2))
            for group in sibling_leaves(t)
            for u, v in zip(group, group[1:])
            for j in range(n)
            for j2 in range(j, n)
        ]
        if rows:
            yield np.array(rows, dtype=np.int32)

    disjoint, shared = _crossing_tables(n, px, py)
    edges = t.edges
    for e_idx, f_idx in combinations(range(len(edges)), 2):
        (a, b), (c, d) = edges[e_idx], edges[f_idx]
        ye, yf = vm.y(a, b), vm.y(c, d)
        common = {a, b} & {c, d}
        if not common:
            continue
        w = common.pop()
        u = b if w == a else a
        v = d if w == c else c
        # local bit h = "horizontal at w"; y value is h when w is the smaller endpoint
        ve = np.array([0, 1] if w == a else [1, 0])
        vf = np.array([0, 1] if w == c else [1, 0])
        yield _overlap_clauses(n, px, py, w, u, v, ye, yf, ve, vf)
    for e_idx, f_idx in combinations(range(len(edges)), 2):
        (a, b), (c, d) = edges[e_idx], edges[f_idx]
        ye, yf = vm.y(a, b), vm.y(c, d)
        common = {a, b} & {c, d}
        if common:
            w = common.pop()
            u = b if w == a else a
            v = d if w == c else c
            ve = np.array([0, 1] if w == a else [1, 0])
            vf = np.array([0, 1] if w == c else [1, 0])
            yield _pair_clauses_shared(n, shared, w, u, v, ye, yf, ve, vf)
        else:
            yield _pair_clauses_disjoint(n, disjoint, a, b, c, d, ye, yf)


def build_cnf(t: Tree, p: PointSet, symmetry_breaking: bool = False) -> tuple[CnfFormula, VarMap]:
    """CNF that is satisfiable iff the unordered tree ``t`` embeds in ``p``.

    Clause order: at-least-one per vertex and per point, pairwise
    at-most-one per vertex and per point, same-side exclusions for incident
    edges, then crossing exclusions edge pair by edge pair.

    With ``symmetry_breaking`` sibling leaves must occupy increasing points.
    Satisfiability is unchanged but models are counted up to leaf swaps.
    """
    if isinstance(t, OrderedTree):
        raise NotImplementedError("the SAT model covers unordered trees only")
    if t.n != p.n:
        raise ValueError(f"tree has {t.n} vertices but point set has {p.n} points")
    vm = VarMap(t.n, t.edges)
    lits, starts = _rows_to_flat(list(_iter_blocks(t, p, vm, symmetry_breaking)))
    return CnfFormula(vm.var_count, lits, starts), vm


@njit(cache=True)
def _pattern_hist(n, px, py):
    """Histograms of the 2x2 forbidden-orientation patterns (as 4-bit codes).

    Returns (disjoint, shared, overlap): pattern counts over ordered point
    4-tuples and 3-tuples, and the number of same-side clauses for one pair
    of incident edges.
    """
    hd = np.zeros(16, np.int64)
    hs = np.zeros(16, np.int64)
    overlap = 0
    for p in range(n):
        for q in range(n):
            if q == p:
                continue
            for r in range(n):
                if r == p or r == q:
                    continue
                if (px[q] > px[p]) == (px[r] > px[p]):
                    overlap += 1
                if (py[q] > py[p]) == (py[r] > py[p]):
                    overlap += 1
                code = 0
                for h1 in range(2):
                    for h2 in range(2):
                        d1 = (0 if px[q] > px[p] else 2) if h1 else (1 if py[q] > py[p] else 3)
                        d2 = (0 if px[r] > px[p] else 2) if h2 else (1 if py[r] > py[p] else 3)
                        if d1 != d2 and not l_edges_compatible(
                                px[p], py[p], px[q], py[q], h1 == 1,
                                px[p], py[p], px[r], py[r], h2 == 1, True, px[p], py[p]):
                            code |= 1 << (2 * h1 + h2)
                hs[code] += 1
                for s in range(n):
                    if s == p or s == q or s == r:
                        continue
                    code = 0
                    for h1 in range(2):
                        for h2 in range(2):
                            if not l_edges_compatible(
                                    px[p], py[p], px[q], py[q], h1 == 1,
                                    px[r], py[r], px[s], py[s], h2 == 1, False, 0, 0):
                                code |= 1 << (2 * h1 + h2)
                    hd[code] += 1
    return hd, hs, overlap


def _clauses_per_pattern() -> np.ndarray:
    """How many clauses ``_emit_forbidden`` writes for each 4-bit pattern."""
    out = np.zeros(16, np.int64)
    for code in range(16):
        forb = np.array([[code >> (2 * h1 + h2) & 1 for h2 in range(2)] for h1 in range(2)], dtype=np.bool_)
        buf = np.zeros((8, 6), np.int32)
        out[code] = _emit_forbidden(forb, np.array([-1], np.int32), 2, 3, np.array([0, 1]), np.array([0, 1]), buf, 0)
    return out


def count_clauses(t: Tree, p: PointSet, symmetry_breaking: bool = False) -> int:
    """Clause count of ``build_cnf(t, p)`` without building the formula.

    Per edge pair the count only depends on whether the edges share a
    vertex, so the geometric patterns are tallied once and multiplied.
    """
    n = t.n
    px = np.arange(n, dtype=np.int64)
    py = np.array(p.perm, dtype=np.int64) - 1
    hd, hs, overlap = _pattern_hist(n, px, py)
    per = _clauses_per_pattern()
    m = len(t.edges)
    incident = sum(d * (d - 1) // 2 for d in (t.degree(v) for v in range(n)))
    disjoint = m * (m - 1) // 2 - incident
    total = 2 * n + 2 * n * (n * (n - 1) // 2)
    if symmetry_breaking:
        total += sum((len(g) - 1) * n * (n + 1) // 2 for g in sibling_leaves(t))
    total += incident * (overlap + int(per @ hs)) + disjoint * int(per @ hd)
    return total


# ---------------------------------------------------------------- DIMACS


@njit(cache=True)
def _ascii_rows(lits, starts, c0, c1):
    """DIMACS lines for clauses c0..c1-1 as ASCII bytes."""
    out = np.empty((starts[c1] - starts[c0]) * 12 + (c1 - c0) * 2, np.uint8)
    digits = np.empty(12, np.uint8)
    m = 0
    for c in range(c0, c1):
        for i in range(starts[c], starts[c + 1]):
            x = lits[i]
            if x < 0:
                out[m] = 45  # '-'
                m += 1
                x = -x
            k = 0
            while True:
                digits[k] = 48 + x % 10
                k += 1
                x //= 10
                if x == 0:
                    break
            for j in range(k - 1, -1, -1):
                out[m] = digits[j]
                m += 1
            out[m] = 32
            m += 1
        out[m] = 48  # '0'
        out[m + 1] = 10
        m += 2
    return out[:m]


def _write_rows(out: TextIO, lits: np.ndarray, starts: np.ndarray) -> None:
    chunk = 200_000
    ncl = len(starts) - 1
    for c0 in range(0, ncl, chunk):
        c1 = min(c0 + chunk, ncl)
        out.write(_ascii_rows(lits, starts, c0, c1).tobytes().decode("ascii"))


def write_dimacs(f: CnfFormula, out: Optional[TextIO] = None) -> str | None:
    """DIMACS text of ``f``; written to ``out`` if given, else returned."""
    buf = out if out is not None else io.StringIO()
    buf.write(f"p cnf {f.var_count} {f.num_clauses}\n")
    _write_rows(buf, f.lits, f.starts)
    return None if out is not None else buf.getvalue()


def stream_dimacs(t: Tree, p: PointSet, out: TextIO, symmetry_breaking: bool = False) -> tuple[int, int]:
    """Write the DIMACS of ``build_cnf(t, p)`` block by block; returns (vars, clauses).

    The header needs the clause count, so blocks are counted in a first pass.
    """
    vm = VarMap(t.n, t.edges)
    total = count_clauses(t, p, symmetry_breaking)
    out.write(f"p cnf {vm.var_count} {total}\n")
    for blk in _iter_blocks(t, p, vm, symmetry_breaking):
        lits, starts = _rows_to_flat([blk])
        _write_rows(out, lits, starts)
    return vm.var_count, total


def parse_dimacs(text: str) -> CnfFormula:
    nvars = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("c"):
            continue
        if ln.startswith("p"):
            _, fmt, v, _ = ln.split()
            if fmt != "cnf":
                raise ValueError("not a CNF file")
            nvars = int(v)
            continue
        for tok in ln.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if nvars is None:
        raise ValueError("missing DIMACS header")
    return CnfFormula.from_clauses(nvars, clauses)


# ---------------------------------------------------------------- solving


@dataclass
class SolveResult:
    sat: Optional[bool]  # None when a conflict budget ran out
    assignment: Optional[np.ndarray] = None  # bool per variable, index v-1

    def __bool__(self) -> bool:
        return bool(self.sat)


def solve(f: CnfFormula, max_conflicts: int = 0) -> SolveResult:
    """Decide ``f`` with the built-in CDCL solver; SAT answers are re-verified."""
    if f.num_clauses == 0:
        return SolveResult(True, np.zeros(f.var_count, dtype=bool))
    models = np.zeros((1, max(f.var_count, 1)), dtype=np.int8)
    status, found = _cdcl.solve_cdcl(
        f.var_count, f.lits.astype(np.int64), f.starts, np.zeros(f.var_count, np.int8),
        1, max_conflicts, models)
    if status == _cdcl.UNKNOWN:
        return SolveResult(None)
    if status == _cdcl.UNSAT:
        return SolveResult(False)
    a = models[0, : f.var_count] == 1
    if not f.satisfied_by(a):
        raise EncodingError("solver returned an assignment that violates a clause")
    return SolveResult(True, a)


def _block_kinds(vm: VarMap) -> np.ndarray:
    kinds = np.zeros(vm.var_count, np.int8)
    kinds[: vm.n * vm.n] = 2  # placement variables: block the true ones
    kinds[vm.n * vm.n:] = 1  # orientation variables: block both values
    return kinds


def enumerate_models(f: CnfFormula, vm: VarMap, limit: int = 1_000_000) -> list[np.ndarray]:
    """All models up to ``limit``, projected via blocking clauses on x (true) and y."""
    models = np.zeros((limit, max(f.var_count, 1)), dtype=np.int8)
    status, found = _cdcl.solve_cdcl(
        f.var_count, f.lits.astype(np.int64), f.starts, _block_kinds(vm), limit, 0, models)
    out = []
    for k in range(min(found, limit)):
        a = models[k, : f.var_count] == 1
        if not f.satisfied_by(a):
            raise EncodingError("enumerated model violates a clause")
        out.append(a)
    return out


def decode(a: np.ndarray, vm: VarMap) -> Embedding:
    n = vm.n
    x = np.asarray(a[: n * n], dtype=bool).reshape(n, n)
    if not (np.all(x.sum(axis=1) == 1) and np.all(x.sum(axis=0) == 1)):
        raise EncodingError("placement variables do not describe a bijection")
    placement = tuple(int(j) for j in x.argmax(axis=1))
    orient = {e: bool(a[n * n + k]) for k, e in enumerate(vm.edges)}
    return Embedding(placement, orient)


def enumerate_solutions(f: CnfFormula, vm: VarMap, limit: int = 1_000_000) -> Iterator[Embedding]:
    for a in enumerate_models(f, vm, limit):
        yield decode(a, vm)


def sat_embed(t: Tree, p: PointSet, max_conflicts: int = 0) -> Optional[Embedding]:
    """Embedding via the SAT route, or None when unsatisfiable."""
    f, vm = build_cnf(t, p, symmetry_breaking=True)
    r = solve(f, max_conflicts)
    if r.sat is None:
        raise TimeoutError("conflict budget exhausted")
    return decode(r.assignment, vm) if r.sat else None

"""Exhaustive sweeps, counterexample verification and engine cross-checks."""

from __future__ import annotations

import json
import multiprocessing as mp
import platform
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernel
from .embedder import (SearchConfig, box_lemma_holds, embed, embed_ordered, is_embeddable, prepare,
                       validate)
from .geometry import PointSet, canonical_form, canonical_pointset_array, format_perm, staircase_boxes
from .instances import Instance, all_instances, load_instance
from .sat import build_cnf, count_clauses, decode, solve, stream_dimacs
from .trees import OrderedTree, Tree, canonical_ordered_code, canonical_tree_code, enumerate_ordered_trees, enumerate_trees

SCHEMA_VERSION = 1
CACHE_SLOTS = 256


class EngineDisagreement(AssertionError):
    """Backtracker and SAT solver disagree: one of them is wrong."""


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepReport:
    n: int
    mode: str
    pointsets_tested: int
    trees_tested: int
    failures: list[tuple[str, str]]  # (tree code, point set), sorted
    wall_time: float = 0.0
    failure_classes: list[tuple[str, str]] = field(default_factory=list)
    box_checked: int = 0
    box_violations: list[tuple[str, str]] = field(default_factory=list)
    jobs: int = 1

    def result_dict(self) -> dict:
        """Everything that must not depend on timing, host or worker count."""
        return {
            "n": self.n,
            "mode": self.mode,
            "pointsets": self.pointsets_tested,
            "trees": self.trees_tested,
            "failures": [{"tree": t, "pointset": p} for t, p in self.failures],
            "failure_classes": [{"tree": t, "pointset": p} for t, p in self.failure_classes],
            "box_checked": self.box_checked,
            "box_violations": [{"tree": t, "pointset": p} for t, p in self.box_violations],
        }

    def to_json(self) -> str:
        d = {"schema_version": SCHEMA_VERSION, **self.result_dict(), "seconds": round(self.wall_time, 3),
             "jobs": self.jobs, "build": git_describe(), "host": host_info()}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=10)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def host_info() -> dict:
    return {"machine": platform.machine(), "python": platform.python_version(), "cpus": mp.cpu_count(),
            "system": platform.system()}


def sweep_trees(n: int, mode: str) -> list[Tree | OrderedTree]:
    if mode == "unordered":
        return list(enumerate_trees(n))
    if mode == "ordered":
        # trees with a single rotation class behave like unordered ones
        return list(enumerate_ordered_trees(n, nontrivial_only=True))
    raise ValueError(f"mode must be 'unordered' or 'ordered', got {mode!r}")


def sweep_group(mode: str) -> str:
    return "full8" if mode == "unordered" else "rot4"


def tree_code(t: Tree | OrderedTree) -> str:
    return canonical_ordered_code(t) if isinstance(t, OrderedTree) else canonical_tree_code(t)


def _stack(trees):
    preps = [prepare(t, leaves_last=True) for t in trees]
    return (np.stack([p.order for p in preps]), np.stack([p.par for p in preps]),
            np.stack([p.deg for p in preps]), np.stack([p.rotpos for p in preps]),
            np.stack([p.twin for p in preps]))


_W: dict = {}


def _init_worker(n, mode, arrays):
    _W.update(n=n, kmode=1 if mode == "ordered" else 0, arrays=arrays)


def _sweep_chunk(job):
    start, ys = job
    n, kmode, (orders, pars, degs, rots, twins) = _W["n"], _W["kmode"], _W["arrays"]
    cap = len(ys) * orders.shape[0]
    fp = np.zeros(min(cap, 4096), np.int64)
    ft = np.zeros(min(cap, 4096), np.int64)
    nf = _kernel.sweep(n, ys, orders, pars, degs, rots, twins, kmode, False, CACHE_SLOTS, len(fp), fp, ft)
    if nf > len(fp):
        # pathological chunk: record everything by rerunning point set by point set
        out = []
        for i in range(len(ys)):
            out += _sweep_chunk((start + i, ys[i:i + 1]))
        return out
    return [(int(ft[k]), start + int(fp[k])) for k in range(nf)]


def _chunks(ys: np.ndarray, size: int):
    for s in range(0, len(ys), size):
        yield s, ys[s:s + size]


def exhaustive_verify(n: int, mode: str = "unordered", jobs: int = 1, chunk: int = 4096,
                      box_check: bool = False) -> SweepReport:
    """Test every canonical tree against every canonical point set.

    Work is split into contiguous blocks of point sets; the failure list is
    sorted, so the report does not depend on ``jobs`` or ``chunk``.  With
    ``box_check`` every staircase-shaped point set is re-run through
    :func:`embed` and each embedding found is checked against the box lemma
    (unordered mode only).
    """
    if n < 1:
        raise ValueError("n must be positive")
    t0 = time.perf_counter()
    trees = sweep_trees(n, mode)
    ys = canonical_pointset_array(n, sweep_group(mode)).astype(np.int64)
    raw: list[tuple[int, int]] = []
    if trees:
        arrays = _stack(trees)
        if jobs <= 1:
            _init_worker(n, mode, arrays)
            for job in _chunks(ys, chunk):
                raw += _sweep_chunk(job)
        else:
            ctx = mp.get_context("fork")
            with ctx.Pool(jobs, initializer=_init_worker, initargs=(n, mode, arrays)) as pool:
                for part in pool.imap_unordered(_sweep_chunk, _chunks(ys, chunk)):
                    raw += part
    codes = [tree_code(t) for t in trees]
    failures = sorted({(codes[t], format_perm(ys[i] + 1)) for t, i in raw})
    classes = sorted({(c, format_perm(canonical_form(_perm(p), "full8").perm)) for c, p in failures})
    rep = SweepReport(n, mode, len(ys), len(trees), failures, failure_classes=classes, jobs=jobs)
    if box_check and mode == "unordered":
        rep.box_checked, rep.box_violations = _box_check(trees, codes, ys)
    rep.wall_time = time.perf_counter() - t0
    return rep


def _perm(s: str) -> PointSet:
    return PointSet(tuple(int(x) for x in s.split(",")))


def _box_check(trees, codes, ys) -> tuple[int, list[tuple[str, str]]]:
    checked, bad = 0, []
    for y in ys:
        p = PointSet(tuple(int(v) + 1 for v in y))
        boxes = staircase_boxes(p)
        if boxes is None:
            continue
        for t, code in zip(trees, codes):
            e = embed(t, p)
            if e is None:
                continue
            checked += 1
            if not box_lemma_holds(t, boxes, e):
                bad.append((code, format_perm(p.perm)))
    return checked, sorted(bad)


# ---------------------------------------------------------------- counterexamples


@dataclass
class InstanceVerdict:
    name: str
    n: int
    ordered: bool
    backtracker: str  # "none", "embeds" or "skipped"
    sat: str  # "unsat", "sat", "unknown", "skipped" or "n/a"
    clauses: Optional[int] = None
    seconds: float = 0.0
    long_running: bool = False

    @property
    def non_embeddable(self) -> bool:
        return self.backtracker == "none" and self.sat in ("unsat", "n/a", "skipped")


def verify_instance(inst: Instance, force_long: bool = False, use_sat: bool = True,
                    dimacs_path: Optional[str | Path] = None, max_conflicts: int = 0) -> InstanceVerdict:
    t0 = time.perf_counter()
    v = InstanceVerdict(inst.name, inst.n, inst.ordered, "skipped", "n/a" if inst.ordered else "skipped",
                        long_running=inst.long_running)
    base = inst.tree.base if inst.ordered else inst.tree
    if dimacs_path is not None:
        with open(dimacs_path, "w") as fh:
            _, v.clauses = stream_dimacs(base, inst.points, fh)
    if inst.long_running and not force_long:
        if v.clauses is None and inst.n <= 40:
            v.clauses = count_clauses(base, inst.points)
        v.seconds = time.perf_counter() - t0
        return v
    cfg = SearchConfig(box_pruning=inst.staircase is not None, boxes=inst.staircase, strict=False)
    if inst.ordered:
        e = embed_ordered(inst.tree, inst.points, cfg)
    else:
        e = embed(inst.tree, inst.points, cfg)
    if e is not None and not validate(inst.tree, inst.points, e):
        raise EngineDisagreement(f"{inst.name}: backtracker returned an invalid embedding")
    v.backtracker = "embeds" if e is not None else "none"
    if use_sat and not inst.ordered:
        f, vm = build_cnf(base, inst.points, symmetry_breaking=True)
        v.clauses = v.clauses or f.num_clauses
        r = solve(f, max_conflicts)
        if r.sat is None:
            v.sat = "unknown"
        elif r.sat:
            if not validate(base, inst.points, decode(r.assignment, vm)):
                raise EngineDisagreement(f"{inst.name}: SAT model does not decode to a valid embedding")
            v.sat = "sat"
        else:
            v.sat = "unsat"
        if v.sat != "unknown" and (v.sat == "sat") != (v.backtracker == "embeds"):
            raise EngineDisagreement(f"{inst.name}: backtracker {v.backtracker}, SAT {v.sat}")
    v.seconds = time.perf_counter() - t0
    return v


def verify_counterexamples(names: Optional[Iterable[str]] = None, force_long: bool = False,
                           use_sat: bool = True, dimacs_dir: Optional[str | Path] = None) -> list[InstanceVerdict]:
    """Verdicts for registry instances (all of them by default).

    Long-running instances are skipped unless ``force_long``; with
    ``dimacs_dir`` every unordered formula is also written there.
    """
    insts = all_instances() if names is None else [load_instance(k) for k in names]
    out = []
    for inst in insts:
        path = None
        if dimacs_dir is not None:
            path = Path(dimacs_dir) / (inst.name.replace("/", "_").replace("(", "").replace(")", "")
                                       .replace(",", "-").replace("=", "") + ".cnf")
        out.append(verify_instance(inst, force_long, use_sat, path))
    return out


# ---------------------------------------------------------------- cross-check


@dataclass
class CrosscheckResult:
    n: int
    checked: int
    models_checked: int
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def sample_pairs(n: int, samples: int, seed: int) -> list[tuple[Tree, PointSet]]:
    """Deterministic random (tree, point set) pairs: uniform tree class, uniform permutation."""
    rng = np.random.default_rng(seed)
    trees = list(enumerate_trees(n))
    out = []
    for _ in range(samples):
        t = trees[int(rng.integers(len(trees)))]
        out.append((t, PointSet(tuple(int(x) + 1 for x in rng.permutation(n)))))
    return out


def _check_pair(t: Tree, p: PointSet, res: CrosscheckResult) -> None:
    bt = is_embeddable(t, p)
    f, vm = build_cnf(t, p)
    r = solve(f)
    res.checked += 1
    if r.sat:
        res.models_checked += 1
        e = decode(r.assignment, vm)
        verdict = validate(t, p, e)
        if not verdict:
            res.mismatches.append(f"model fails validation: tree={t.edges} perm={p.perm} {verdict.violations}")
    if bool(r.sat) != bt:
        res.mismatches.append(f"verdicts differ: tree={t.edges} perm={p.perm} backtracker={bt} sat={r.sat}")


def oracle_crosscheck(n: int, samples: int = 1000, seed: int = 0, exhaustive: bool = False) -> CrosscheckResult:
    """Backtracker verdict must equal SAT verdict, and every SAT model must validate."""
    res = CrosscheckResult(n, 0, 0, [])
    if exhaustive:
        from .geometry import enumerate_canonical_pointsets
        trees = list(enumerate_trees(n))
        for p in enumerate_canonical_pointsets(n, "full8"):
            for t in trees:
                _check_pair(t, p, res)
    else:
        for t, p in sample_pairs(n, samples, seed):
            _check_pair(t, p, res)
    return res

"""Acceptance criteria 1-8.

Each test prints one ``CRITERION k: PASS|FAIL ...`` line (collected again in
the terminal summary).  Timings use process CPU time: the suite is meant to be
read on a desktop, and CPU time does not depend on other load on the machine.

The n = 10 unordered sweep is opt-in: set ``LSHAPE_EXTENDED=1``.
"""

import hashlib
import io
import os
import time

import numpy as np
import pytest

from lshape.embedder import SearchConfig, count_embeddings, embed, embed_ordered, is_embeddable, validate
from lshape.geometry import (ROTATIONS, SYMMETRIES, PointSet, apply_symmetry, canonical_form,
                             canonical_pointset_array)
from lshape.harness import exhaustive_verify, oracle_crosscheck, verify_instance
from lshape.instances import STAIRCASES, load_instance, names, points_S10, tree_T10
from lshape.render import RenderSpec, render_svg
from lshape.sat import build_cnf, count_clauses, enumerate_models, solve, stream_dimacs
from lshape.trees import canonical_ordered_code, enumerate_ordered_trees, enumerate_trees, path_tree

EXTENDED = os.environ.get("LSHAPE_EXTENDED") == "1"


def _fmt(s):
    return "(" + ",".join(map(str, s)) + ")"


class Clock:
    def __enter__(self):
        self.t0 = time.process_time()
        return self

    def __exit__(self, *exc):
        self.seconds = time.process_time() - self.t0


def _verdict(report_line, k, ok, detail):
    report_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


# ---------------------------------------------------------------- 1


def test_criterion_1_enumeration_counts(report_line):
    want_full = [7, 23, 115, 694, 5282, 46066]
    want_rot = [9, 33, 192, 1272, 10182, 90822]
    want_trees = [2, 3, 5, 9, 18, 35, 75, 159, 355]
    want_ordered = [2, 3, 5, 10, 21, 48, 120]
    got, secs = {}, {}
    with Clock() as c:
        got["full8"] = [len(canonical_pointset_array(n, "full8")) for n in range(4, 10)]
    secs["full8"] = c.seconds
    with Clock() as c:
        got["rot4"] = [len(canonical_pointset_array(n, "rot4")) for n in range(4, 10)]
    secs["rot4"] = c.seconds
    with Clock() as c:
        got["trees"] = [sum(1 for _ in enumerate_trees(n)) for n in range(4, 13)]
    secs["trees"] = c.seconds
    with Clock() as c:
        got["ordered"] = [sum(1 for _ in enumerate_ordered_trees(n)) for n in range(4, 11)]
    secs["ordered"] = c.seconds
    ok = (got["full8"] == want_full and got["rot4"] == want_rot and got["trees"] == want_trees
          and got["ordered"] == want_ordered and max(secs.values()) < 300)
    detail = " ".join(f"{k}={got[k]}({secs[k]:.1f}s)" for k in got)
    _verdict(report_line, 1, ok, detail)


# ---------------------------------------------------------------- 2 and the box invariant of 7


@pytest.fixture(scope="module")
def unordered_sweeps():
    reps, secs = {}, {}
    for n in range(1, 10):
        with Clock() as c:
            reps[n] = exhaustive_verify(n, "unordered", box_check=True)
        secs[n] = c.seconds
    return reps, secs


def test_criterion_2_unordered_sweeps(report_line, unordered_sweeps):
    reps, secs = unordered_sweeps
    fails = {n: len(r.failures) for n, r in reps.items() if r.failures}
    tested = reps[9].pointsets_tested, reps[9].trees_tested
    # box checking is part of criterion 7; the sweep itself is timed without it
    with Clock() as c:
        plain9 = exhaustive_verify(9, "unordered")
    ok = not fails and not plain9.failures and tested == (46066, 35) and c.seconds <= 300
    detail = f"n<=9 failures={fails or 0} n=9 pairs={tested[0]}x{tested[1]} n=9 sweep={c.seconds:.1f}s"
    if EXTENDED:
        with Clock() as c10:
            r10 = exhaustive_verify(10, "unordered")
        ok = ok and not r10.failures and r10.pointsets_tested == 456454
        detail += f"; n=10 failures={len(r10.failures)} ({c10.seconds:.0f}s)"
    else:
        detail += "; n=10 extended run not requested"
    _verdict(report_line, 2, ok, detail)


# ---------------------------------------------------------------- 3


def test_criterion_3_ordered_sweeps(report_line):
    fails, secs = {}, {}
    for n in range(1, 10):
        with Clock() as c:
            r = exhaustive_verify(n, "ordered")
        secs[n] = c.seconds
        if r.failures:
            fails[n] = len(r.failures)
    with Clock() as c10:
        r10 = exhaustive_verify(10, "ordered")
    t10, s10 = tree_T10(), points_S10()
    classes = r10.failure_classes
    ok_unique = len(classes) == 1
    ok_tree = ok_unique and classes[0][0] == canonical_ordered_code(t10)
    ok_points = ok_unique and classes[0][1] == ",".join(map(str, canonical_form(s10, "full8").perm))
    ok = not fails and ok_unique and ok_tree and ok_points and r10.pointsets_tested == 908160
    detail = (f"n<=9 failures={fails or 0} (n=9 {secs[9]:.1f}s); n=10 failure classes={len(classes)} "
              f"tree matches T10={ok_tree} point set matches S10={ok_points} ({c10.seconds:.0f}s)")
    _verdict(report_line, 3, ok, detail)


# ---------------------------------------------------------------- 4


def test_criterion_4_t13(report_line):
    inst = load_instance("T13/S13")
    cfg = SearchConfig(box_pruning=True, boxes=inst.staircase)
    with Clock() as cb:
        e = embed(inst.tree, inst.points, cfg)
    f, _ = build_cnf(inst.tree, inst.points, symmetry_breaking=True)
    with Clock() as cs:
        r = solve(f)
    others = {}
    for s in STAIRCASES[13]:
        v = verify_instance(load_instance(f"T13/{_fmt(s)}"), use_sat=False)
        others[_fmt(s)] = v.non_embeddable
    ok = e is None and r.sat is False and cb.seconds < 60 and cs.seconds < 60 and all(others.values())
    detail = (f"backtracker={'none' if e is None else 'embeds'} ({cb.seconds:.1f}s) "
              f"sat={'unsat' if r.sat is False else r.sat} ({cs.seconds:.1f}s); "
              f"n=13 staircases non-embeddable: {sum(others.values())}/{len(others)}")
    _verdict(report_line, 4, ok, detail)


# ---------------------------------------------------------------- 5


def test_criterion_5_registry(report_line, tmp_path):
    verdicts, secs = {}, {}
    for n in (14, 16):
        for s in STAIRCASES[n]:
            name = f"T{n}/{_fmt(s)}"
            with Clock() as c:
                v = verify_instance(load_instance(name))
            verdicts[name], secs[name] = v.non_embeddable, c.seconds
    exported = {}
    for n in (17, 18, 19, 20):
        for s in STAIRCASES[n]:
            inst = load_instance(f"T{n}/{_fmt(s)}")
            path = tmp_path / "f.cnf"
            with open(path, "w") as fh:
                nv, nc = stream_dimacs(inst.tree, inst.points, fh)
            with open(path) as fh:
                header = fh.readline().split()
                lines = sum(1 for _ in fh)
            path.unlink()
            exported[inst.name] = inst.long_running and header == ["p", "cnf", str(nv), str(nc)] and lines == nc
    ok = all(verdicts.values()) and max(secs.values()) < 1800 and all(exported.values())
    detail = (f"n=14/16 non-embeddable {sum(verdicts.values())}/{len(verdicts)} "
              f"(slowest {max(secs.values()):.0f}s); n=17..20 exported and tagged "
              f"{sum(exported.values())}/{len(exported)}")
    _verdict(report_line, 5, ok, detail)


# Writing the 98-vertex formula is measured, not attempted: it does not fit on a desktop.
DIMACS_BUDGET_BYTES = 50 * 10 ** 9


@pytest.mark.xfail(strict=True, reason="the 98-vertex formula has ~2.5e11 clauses (terabytes of DIMACS)")
def test_criterion_5_tr_export(report_line):
    inst = load_instance("Tr/r=10")
    base = inst.tree.base
    nc = count_clauses(base, inst.points)
    # a clause line holds 2 to 6 literals of up to 4 digits; 20 bytes is a low estimate
    est = 20 * nc
    ok = inst.long_running and est <= DIMACS_BUDGET_BYTES
    report_line(f"CRITERION 5 (Tr/r=10 export): {'PASS' if ok else 'FAIL'} variables={98 * 98 + 97} "
                f"clauses={nc} estimated DIMACS size >= {est / 1e12:.1f} TB, over the {DIMACS_BUDGET_BYTES / 1e9:.0f} GB budget")
    assert ok


# ---------------------------------------------------------------- 6


def test_criterion_6_oracle_equivalence(report_line):
    mismatches, checked = [], 0
    for n in range(1, 8):
        res = oracle_crosscheck(n, exhaustive=True)
        mismatches += res.mismatches
        checked += res.checked
    count_bad = []
    counted = 0
    for n in range(1, 7):
        for t in enumerate_trees(n):
            for row in canonical_pointset_array(n, "full8"):
                p = PointSet(tuple(int(v) + 1 for v in row))
                f, vm = build_cnf(t, p)
                counted += 1
                if len(enumerate_models(f, vm)) != count_embeddings(t, p):
                    count_bad.append((t.edges, p.perm))
    sampled, models = 0, 0
    for n in (8, 9, 10):
        res = oracle_crosscheck(n, samples=1000, seed=n)
        mismatches += res.mismatches
        sampled += res.checked
        models += res.models_checked
    ok = not mismatches and not count_bad
    detail = (f"exhaustive n<=7 pairs={checked}, model counts n<=6 pairs={counted} (bad {len(count_bad)}), "
              f"random n=8,9,10 pairs={sampled} models validated={models}, mismatches={len(mismatches)}")
    _verdict(report_line, 6, ok, detail)


# ---------------------------------------------------------------- 7


def test_criterion_7_properties(report_line, unordered_sweeps):
    rng = np.random.default_rng(7)
    trees = {n: list(enumerate_trees(n)) for n in range(2, 10)}
    otrees = {n: list(enumerate_ordered_trees(n)) for n in range(2, 10)}
    sym_bad = []
    for k in range(500):
        n = int(rng.integers(2, 10))
        p = PointSet(tuple(int(v) + 1 for v in rng.permutation(n)))
        if k % 2 == 0:
            t = trees[n][int(rng.integers(len(trees[n])))]
            verdicts = {is_embeddable(t, apply_symmetry(g, p)) for g in SYMMETRIES}
        else:
            t = otrees[n][int(rng.integers(len(otrees[n])))]
            cfg = SearchConfig(strict=True)
            verdicts = {is_embeddable(t, apply_symmetry(g, p), cfg) for g in ROTATIONS}
        if len(verdicts) != 1:
            sym_bad.append((n, t, p.perm))
    reps, _ = unordered_sweeps
    box_checked = sum(r.box_checked for r in reps.values())
    box_bad = [v for r in reps.values() for v in r.box_violations]
    prune_bad, prune_n = [], 0
    for n in (13, 14):
        for s in STAIRCASES[n]:
            inst = load_instance(f"T{n}/{_fmt(s)}")
            on = embed(inst.tree, inst.points, SearchConfig(box_pruning=True, boxes=s)) is not None
            off = embed(inst.tree, inst.points, SearchConfig(box_pruning=False)) is not None
            prune_n += 1
            if on != off:
                prune_bad.append(inst.name)
    ok = not sym_bad and box_checked > 0 and not box_bad and not prune_bad
    detail = (f"symmetry invariance 500 instances (bad {len(sym_bad)}); box lemma over {box_checked} "
              f"staircase embeddings (violations {len(box_bad)}); pruning on/off agree on {prune_n - len(prune_bad)}/{prune_n}")
    _verdict(report_line, 7, ok, detail)


# ---------------------------------------------------------------- 8


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def test_criterion_8_determinism(report_line):
    same_sweeps = True
    for mode in ("unordered", "ordered"):
        ref = exhaustive_verify(8, mode, jobs=1).result_dict()
        for jobs in (4, 16):
            same_sweeps &= exhaustive_verify(8, mode, jobs=jobs, chunk=257).result_dict() == ref
    inst = load_instance("T13/S13")
    dig = set()
    for _ in range(2):
        buf = io.StringIO()
        stream_dimacs(inst.tree, inst.points, buf)
        dig.add(_digest(buf.getvalue()))
    svgs = {_digest(render_svg(inst.points, None, RenderSpec(), inst.staircase)) for _ in range(2)}
    p = PointSet((3, 1, 4, 2, 5))
    e = embed(path_tree(5), p)
    svgs_e = {_digest(render_svg(p, e, RenderSpec(labels=True))) for _ in range(2)}
    ok = same_sweeps and len(dig) == 1 and len(svgs) == 1 and len(svgs_e) == 1
    detail = (f"sweeps identical across 1/4/16 workers={same_sweeps}; DIMACS byte-identical={len(dig) == 1}; "
              f"SVG byte-identical={len(svgs) == 1 and len(svgs_e) == 1}")
    _verdict(report_line, 8, ok, detail)

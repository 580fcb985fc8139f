import json

import pytest

from lshape.embedder import is_embeddable
from lshape.geometry import PointSet, apply_symmetry, canonical_form, staircase_points
from lshape.harness import (SweepReport, exhaustive_verify, oracle_crosscheck, sample_pairs, sweep_trees,
                            tree_code, verify_instance)
from lshape.instances import Instance
from lshape.trees import as_ordered, enumerate_trees, make_T13, path_tree


@pytest.mark.parametrize("n", range(1, 8))
def test_small_unordered_sweeps_are_clean(n):
    rep = exhaustive_verify(n)
    assert rep.failures == [] and rep.trees_tested == len(list(enumerate_trees(n)))


@pytest.mark.parametrize("n", range(4, 9))
def test_small_ordered_sweeps_are_clean(n):
    rep = exhaustive_verify(n, "ordered")
    assert rep.failures == []


def test_report_independent_of_jobs_and_chunks():
    a = exhaustive_verify(7, "ordered", jobs=1, chunk=4096)
    b = exhaustive_verify(7, "ordered", jobs=3, chunk=17)
    assert a.result_dict() == b.result_dict()
    d = json.loads(a.to_json())
    assert d["schema_version"] == 1 and d["pointsets"] == 1272 and "build" in d and "host" in d


def test_box_check_runs_on_staircases():
    rep = exhaustive_verify(6, box_check=True)
    assert rep.box_checked > 0 and rep.box_violations == []


def test_bad_mode():
    with pytest.raises(ValueError):
        sweep_trees(5, "weird")
    with pytest.raises(ValueError):
        exhaustive_verify(0)


def test_sample_pairs_are_seeded():
    assert sample_pairs(8, 20, 3) == sample_pairs(8, 20, 3)
    assert sample_pairs(8, 20, 3) != sample_pairs(8, 20, 4)


def test_crosscheck_small():
    res = oracle_crosscheck(5, exhaustive=True)
    assert res.ok and res.checked == 3 * 23
    res = oracle_crosscheck(8, samples=30, seed=1)
    assert res.ok and res.checked == 30 and res.models_checked > 0


def test_verify_instance_on_embeddable_pair():
    p = PointSet((3, 1, 4, 2, 5))
    v = verify_instance(Instance("path", path_tree(5), p, None, False, "embeddable"))
    assert (v.backtracker, v.sat, v.non_embeddable) == ("embeds", "sat", False)
    o = Instance("opath", as_ordered(path_tree(5)), p, None, False, "embeddable")
    assert verify_instance(o).backtracker == "embeds"


def test_long_running_instances_are_skipped(tmp_path):
    s = (2, 2, 2, 1, 2, 2, 2)
    inst = Instance("slow", make_T13(), staircase_points(s), s, True)
    v = verify_instance(inst, dimacs_path=tmp_path / "f.cnf")
    assert v.backtracker == "skipped" and v.clauses == 501434
    assert (tmp_path / "f.cnf").read_text().startswith("p cnf 181 501434\n")


def test_tree_code_distinguishes_ordered():
    t = path_tree(4)
    assert tree_code(t) != tree_code(as_ordered(t))

from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lshape.geometry import (GROUPS, ROTATIONS, SYMMETRIES, PointSet, StaircaseSpec, apply_symmetry,
                             canonical_form, canonical_pointset_array, compose, enumerate_canonical_pointsets,
                             format_perm, format_staircase, inverse, is_canonical, parse_perm, parse_staircase,
                             staircase_boxes, staircase_points)

perms = st.integers(1, 9).flatmap(lambda n: st.permutations(range(1, n + 1))).map(PointSet)
box_lists = st.lists(st.integers(1, 4), min_size=1, max_size=6)


def _dihedral(perm):
    """All 8 images of a permutation, computed from point coordinates."""
    n = len(perm)
    pts = [(j + 1, y) for j, y in enumerate(perm)]
    maps = [
        lambda x, y: (x, y), lambda x, y: (n + 1 - y, x), lambda x, y: (n + 1 - x, n + 1 - y),
        lambda x, y: (y, n + 1 - x), lambda x, y: (n + 1 - x, y), lambda x, y: (x, n + 1 - y),
        lambda x, y: (y, x), lambda x, y: (n + 1 - y, n + 1 - x),
    ]
    out = []
    for f in maps:
        img = sorted(f(x, y) for x, y in pts)
        out.append(tuple(y for _, y in img))
    return out


def test_pointset_rejects_non_permutations():
    with pytest.raises(ValueError):
        PointSet((1, 1, 2))
    with pytest.raises(ValueError):
        PointSet(())
    assert PointSet((2, 1)).points() == [(1, 2), (2, 1)]


def test_staircase_layout():
    # boxes go top-left to bottom-right, ascending inside
    assert staircase_points((2, 1, 2)).perm == (4, 5, 3, 1, 2)
    assert staircase_points(StaircaseSpec((3,))).perm == (1, 2, 3)
    assert staircase_points((1, 1, 1)).perm == (3, 2, 1)
    with pytest.raises(ValueError):
        StaircaseSpec((2, 0))


@given(box_lists)
def test_staircase_boxes_roundtrip(sizes):
    p = staircase_points(sizes)
    assert p.n == sum(sizes)
    assert staircase_boxes(p) == tuple(sizes)


def test_staircase_boxes_rejects_other_sets():
    assert staircase_boxes(PointSet((2, 1, 3))) is None
    assert staircase_boxes(PointSet((2, 3, 1))) == (2, 1)
    assert staircase_boxes(PointSet((1, 3, 2))) is None


def test_group_closure_and_inverses():
    for g in SYMMETRIES:
        assert compose(g, inverse(g)) == "id"
        for h in SYMMETRIES:
            assert compose(g, h) in SYMMETRIES
    for g in ROTATIONS:
        for h in ROTATIONS:
            assert compose(g, h) in ROTATIONS


@given(perms, st.sampled_from(SYMMETRIES), st.sampled_from(SYMMETRIES))
def test_symmetry_action_is_a_group_action(p, g, h):
    assert apply_symmetry(inverse(g), apply_symmetry(g, p)) == p
    lhs = apply_symmetry(compose(g, h), p)
    rhs_a = apply_symmetry(g, apply_symmetry(h, p))
    rhs_b = apply_symmetry(h, apply_symmetry(g, p))
    assert lhs in (rhs_a, rhs_b)


@given(perms)
def test_symmetry_images_match_coordinate_maps(p):
    assert sorted(apply_symmetry(g, p).perm for g in SYMMETRIES) == sorted(_dihedral(p.perm))


@given(perms, st.sampled_from(SYMMETRIES))
def test_canonical_form_is_orbit_invariant(p, g):
    q = apply_symmetry(g, p)
    assert canonical_form(q, "full8") == canonical_form(p, "full8")
    assert is_canonical(canonical_form(p, "full8"), "full8")
    assert canonical_form(p).perm == min(_dihedral(p.perm))
    if g in ROTATIONS:
        assert canonical_form(q, "rot4") == canonical_form(p, "rot4")


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_matches_brute_force(n):
    full = sorted({min(_dihedral(q)) for q in permutations(range(1, n + 1))})
    rot = sorted({min(_dihedral(q)[:4]) for q in permutations(range(1, n + 1))})
    assert [p.perm for p in enumerate_canonical_pointsets(n, "full8")] == full
    assert [p.perm for p in enumerate_canonical_pointsets(n, "rotations4")] == rot
    arr = canonical_pointset_array(n, "rot4")
    assert [tuple(int(v) + 1 for v in row) for row in arr] == rot


def test_enumeration_counts():
    assert [len(canonical_pointset_array(n, "full8")) for n in range(4, 10)] == [7, 23, 115, 694, 5282, 46066]
    assert [len(canonical_pointset_array(n, "rot4")) for n in range(4, 9)] == [9, 33, 192, 1272, 10182]


def test_array_is_sorted_and_canonical():
    arr = canonical_pointset_array(7, "full8")
    keys = [tuple(r) for r in arr.tolist()]
    assert keys == sorted(keys)
    assert all(is_canonical(PointSet(tuple(int(v) + 1 for v in r))) for r in arr[::37])


def test_unknown_group():
    with pytest.raises(ValueError):
        canonical_form(PointSet((1, 2)), "rot3")
    assert set(GROUPS) >= {"full8", "rotations4"}


@given(perms, box_lists)
def test_text_roundtrip(p, sizes):
    assert parse_perm(format_perm(p.perm)) == p
    assert parse_staircase(format_staircase(sizes)).box_sizes == tuple(sizes)


def test_listed_examples():
    assert staircase_points((1,)).perm == (1,)
    assert staircase_points((2, 2)).perm == (3, 4, 1, 2)
    assert staircase_points((2, 2, 2, 1, 2, 2, 2)).perm == (12, 13, 10, 11, 8, 9, 7, 5, 6, 3, 4, 1, 2)
    assert apply_symmetry("rot180", PointSet((3, 4, 1, 2))).perm == (3, 4, 1, 2)
    assert apply_symmetry("mirrorH", PointSet((1, 2, 3))).perm == (3, 2, 1)
    assert apply_symmetry("rot90", PointSet((2, 1))).perm == (1, 2)
    assert canonical_form(PointSet((1, 2, 3))).perm == (1, 2, 3)
    assert [p.perm for p in enumerate_canonical_pointsets(1)] == [(1,)]
    assert str(staircase_points((2, 2))) == "3,4,1,2"

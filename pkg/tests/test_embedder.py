import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lshape.embedder import (Direction, Embedding, SearchBudgetExceeded, SearchConfig, Segment, box_lemma_holds,
                             count_embeddings, departure, edge_segments, embed, embed_ordered, is_embeddable,
                             segment_intersection, validate)
from lshape.geometry import PointSet, apply_symmetry, canonical_pointset_array, staircase_points
from lshape.trees import (OrderedTree, Tree, as_ordered, enumerate_ordered_trees, enumerate_trees, make_T13,
                          path_tree, star_tree)

from .oracle import count_drawings

TREES = {n: list(enumerate_trees(n)) for n in range(1, 10)}
pairs = st.integers(2, 8).flatmap(lambda n: st.tuples(st.sampled_from(TREES[n]),
                                                      st.permutations(range(1, n + 1)).map(PointSet)))


def test_segments_and_departure():
    a, b = edge_segments((1, 1), (3, 4), True)
    assert a == Segment("H", 1, 1, 3) and b == Segment("V", 3, 1, 4)
    assert departure((1, 1), (3, 4), True) is Direction.E
    assert departure((3, 4), (1, 1), False) is Direction.S
    assert Direction.S.ccw() is Direction.E
    assert segment_intersection(Segment("H", 2, 0, 5), Segment("V", 3, 0, 2)) == ((3, 2), (3, 2))
    assert segment_intersection(Segment("H", 2, 0, 5), Segment("H", 2, 5, 7)) == ((5, 2), (5, 2))
    assert segment_intersection(Segment("H", 2, 0, 5), Segment("V", 6, 0, 9)) is None
    with pytest.raises(ValueError):
        edge_segments((1, 1), (1, 4), True)


def test_validate_catches_each_defect():
    p = PointSet((1, 3, 2))
    t = path_tree(3)
    good = Embedding((0, 2, 1), {(0, 1): True, (1, 2): True})
    assert validate(t, p, good)
    # both edges reach the middle vertex from the west: they overlap
    bad = Embedding((0, 2, 1), {(0, 1): False, (1, 2): True})
    v = validate(t, p, bad)
    assert not v and v.violations
    assert not validate(t, p, Embedding((0, 0, 1), {(0, 1): True, (1, 2): True}))
    assert not validate(t, p, Embedding((0, 2, 1), {(0, 1): True}))


def test_embedding_text_roundtrip():
    e = Embedding((2, 0, 1), {(0, 1): True, (1, 2): False})
    assert Embedding.from_text(e.to_text()) == e


def test_tiny_cases():
    assert count_embeddings(path_tree(2), PointSet((1, 2))) == 4
    assert count_embeddings(path_tree(2), PointSet((2, 1))) == 4
    assert embed(Tree(1, ()), PointSet((1,))) is not None
    with pytest.raises(ValueError):
        embed(path_tree(3), PointSet((1, 2)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_counts_match_brute_force(n):
    for t in TREES[n]:
        for row in canonical_pointset_array(n, "full8"):
            p = PointSet(tuple(int(v) + 1 for v in row))
            assert count_embeddings(t, p) == count_drawings(n, list(t.edges), p.perm), (t.edges, p.perm)


def test_counts_match_brute_force_n6_sample():
    rng = np.random.default_rng(6)
    for t in TREES[6]:
        p = PointSet(tuple(int(v) + 1 for v in rng.permutation(6)))
        assert count_embeddings(t, p) == count_drawings(6, list(t.edges), p.perm)


@pytest.mark.parametrize("n", [4, 5])
def test_ordered_counts_match_brute_force(n):
    rng = np.random.default_rng(n)
    trees = [o for t in TREES[n] for o in (as_ordered(t),)] + list(enumerate_ordered_trees(n))
    for o in trees:
        for _ in range(4):
            p = PointSet(tuple(int(v) + 1 for v in rng.permutation(n)))
            for strict in (False, True):
                want = count_drawings(n, list(o.edges), p.perm, o.rotation, strict)
                assert count_embeddings(o, p, SearchConfig(strict=strict)) == want


def test_ordered_reflection_rule():
    # a 3-star with rotation (1, 2, 3) around the centre
    o = as_ordered(star_tree(3))
    p = PointSet((2, 4, 1, 3))
    plain = count_embeddings(o, p, SearchConfig(strict=True))
    mirrored = count_embeddings(o.reflected(), p, SearchConfig(strict=True))
    assert count_embeddings(o, p) == count_drawings(4, list(o.edges), p.perm, o.rotation)
    assert count_embeddings(o, p) <= plain + mirrored


@settings(max_examples=60, deadline=None)
@given(pairs)
def test_found_embeddings_validate(pair):
    t, p = pair
    e = embed(t, p)
    if e is not None:
        assert validate(t, p, e)
    assert (e is not None) == (count_embeddings(t, p) > 0)


@settings(max_examples=40, deadline=None)
@given(pairs)
def test_pruning_options_do_not_change_verdicts(pair):
    t, p = pair
    want = is_embeddable(t, p)
    assert is_embeddable(t, p, SearchConfig(lookahead=False)) == want
    assert is_embeddable(t, p, SearchConfig(leaves_last=False)) == want


def test_budget():
    p = staircase_points((2, 2, 2, 1, 2, 2, 2))
    with pytest.raises(SearchBudgetExceeded):
        embed(make_T13(), p, SearchConfig(max_nodes=1000))


def test_box_lemma_check():
    t = Tree(6, ((0, 1), (0, 2), (0, 3), (0, 4), (1, 5)))
    boxes = (2, 2, 2)
    e = Embedding((0, 1, 2, 3, 4, 5), {})
    assert box_lemma_holds(t, boxes, e)
    t2 = Tree(10, ((0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7), (2, 8), (3, 9)))
    e2 = Embedding((0, 1, 2, 3, 4, 5, 6, 7, 8, 9), {})
    assert not box_lemma_holds(t2, (2,) * 5, e2)
    assert box_lemma_holds(t2, (1, 1) + (2,) * 4, e2)


def test_box_pruning_is_sound_on_small_staircases():
    for sizes in [(2, 2, 2), (2, 1, 2, 2), (2, 2, 1, 2, 1), (1, 2, 2, 2, 1)]:
        p = staircase_points(sizes)
        for t in TREES[p.n]:
            a = is_embeddable(t, p)
            b = is_embeddable(t, p, SearchConfig(box_pruning=True, boxes=sizes))
            assert a == b


def test_listed_examples():
    a, b = edge_segments((1, 1), (2, 2), True)
    assert (a, b) == (Segment("H", 1, 1, 2), Segment("V", 2, 1, 2))
    a, b = edge_segments((1, 1), (2, 2), False)
    assert (a, b) == (Segment("V", 1, 1, 2), Segment("H", 2, 1, 2))
    assert [Direction(d).ccw() for d in range(4)] == [Direction.N, Direction.W, Direction.S, Direction.E]
    # brute force over 3! placements and 4 orientation pairs
    assert count_embeddings(path_tree(3), PointSet((1, 2, 3))) == 16
    # frozen regression value: T13 fits the staircase with the size-1 box moved to the end
    assert embed(make_T13(), staircase_points((2, 2, 2, 2, 2, 2, 1))) is not None
    for n in range(2, 10):
        rng = np.random.default_rng(n)
        for _ in range(5):
            p = PointSet(tuple(int(v) + 1 for v in rng.permutation(n)))
            assert embed(path_tree(n), p) is not None
            assert embed_ordered(as_ordered(path_tree(n)), p) is not None


def test_two_edges_leaving_east_overlap():
    t = path_tree(3)
    p = PointSet((2, 1, 3))
    # centre on the left point, both neighbours to its right, both edges leave horizontally
    e = Embedding((1, 0, 2), {(0, 1): False, (1, 2): True})
    v = validate(t, p, e)
    assert not v

"""L-shaped point-set embeddings of trees of maximum degree 4.

Exact backtracking search, a CNF encoding with a built-in CDCL solver,
exhaustive sweeps over all small trees and point sets, and a registry of the
known non-embeddable instances.
"""

from .embedder import Embedding, SearchConfig, count_embeddings, embed, embed_ordered, is_embeddable, validate
from .geometry import PointSet, StaircaseSpec, canonical_form, staircase_points
from .trees import OrderedTree, Tree, enumerate_ordered_trees, enumerate_trees

__version__ = "0.1.0"

__all__ = [
    "Embedding", "SearchConfig", "count_embeddings", "embed", "embed_ordered", "is_embeddable", "validate",
    "PointSet", "StaircaseSpec", "canonical_form", "staircase_points",
    "OrderedTree", "Tree", "enumerate_ordered_trees", "enumerate_trees",
]

"""Command line interface.

Exit codes: 0 success (embeddable / verified), 1 negative outcome (no
embedding, unexpected sweep failures, unverified instance), 2 usage or input
errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import harness, instances
from .embedder import Embedding, SearchConfig, count_embeddings, embed, embed_ordered
from .geometry import PointSet, canonical_pointset_array, format_perm, parse_perm, parse_staircase, staircase_points
from .render import RenderSpec, render_svg
from .sat import VarMap, build_cnf, count_clauses, stream_dimacs, write_dimacs
from .trees import (OrderedTree, Tree, as_ordered, enumerate_ordered_trees, enumerate_trees, format_tree,
                    parse_tree, path_tree, star_tree)

REPORT_DIR_ENV = "LSHAPE_REPORT_DIR"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers


def _add_tree_args(ap: argparse.ArgumentParser, required: bool = True) -> None:
    g = ap.add_mutually_exclusive_group(required=required)
    g.add_argument("--named", help="named tree: T13, T10, T14..T20, Tr:r=10")
    g.add_argument("--tree", type=Path, help="tree file (n, then 'u v' lines, optional 'v: ...' rotations)")
    g.add_argument("--path", type=int, metavar="N", help="path on N vertices")
    g.add_argument("--star", type=int, metavar="K", help="star with K leaves")
    g.add_argument("--edge", action="store_true", help="a single edge")
    g.add_argument("--instance", help="registry instance, e.g. T13/S13 (sets the point set too)")


def _add_point_args(ap: argparse.ArgumentParser) -> None:
    g = ap.add_mutually_exclusive_group()
    g.add_argument("--staircase", help='staircase box sizes, e.g. "(2,2,2,1,2,2,2)"')
    g.add_argument("--perm", help="permutation of 1..n, e.g. 3,1,4,2,5")


def _tree(args) -> Tree | OrderedTree:
    if args.instance:
        return instances.load_instance(args.instance).tree
    if args.named:
        return instances.named_tree(args.named)
    if args.tree:
        return parse_tree(args.tree.read_text())
    if args.path:
        return path_tree(args.path)
    if args.star:
        return star_tree(args.star)
    if args.edge:
        return path_tree(2)
    raise UsageError("no tree given")


def _points(args, n: Optional[int] = None) -> PointSet:
    if getattr(args, "instance", None) and not (args.staircase or args.perm):
        return instances.load_instance(args.instance).points
    if args.staircase:
        return staircase_points(parse_staircase(args.staircase))
    if args.perm:
        return parse_perm(args.perm)
    if n is not None and n <= 2:
        # tiny instances default to the increasing point set
        return PointSet(tuple(range(1, n + 1)))
    raise UsageError("no point set given (use --staircase or --perm)")


def _boxes(args, p: PointSet):
    if getattr(args, "instance", None):
        return instances.load_instance(args.instance).staircase
    return parse_staircase(args.staircase).box_sizes if args.staircase else None


# ---------------------------------------------------------------- commands


def cmd_embed(args) -> int:
    t = _tree(args)
    if args.ordered and not isinstance(t, OrderedTree):
        t = as_ordered(t)
    if not args.ordered and isinstance(t, OrderedTree) and not args.instance:
        t = t.base
    p = _points(args, t.n)
    if t.n != p.n:
        raise UsageError(f"tree has {t.n} vertices but point set has {p.n} points")
    boxes = _boxes(args, p)
    cfg = SearchConfig(box_pruning=args.box_pruning and boxes is not None, boxes=boxes, strict=args.strict)
    if args.count:
        c = count_embeddings(t, p, cfg)
        print(c)
        return 0 if c else 1
    e = embed_ordered(t, p, cfg) if isinstance(t, OrderedTree) else embed(t, p, cfg)
    if e is None:
        print("NONE")
    else:
        sys.stdout.write(e.to_text())
    if args.render:
        Path(args.render).write_text(render_svg(p, e, RenderSpec(labels=args.labels), boxes))
    return 0 if e is not None else 1


def _expected_failures(n: int, mode: str) -> set[tuple[str, str]]:
    from .geometry import canonical_form
    out = set()
    for name in instances.names(include_long=False):
        inst = instances.load_instance(name)
        if inst.n != n or inst.ordered != (mode == "ordered"):
            continue
        out.add((harness.tree_code(inst.tree), format_perm(canonical_form(inst.points, "full8").perm)))
    return out


def cmd_verify(args) -> int:
    mode = "ordered" if args.ordered else "unordered"
    rep = harness.exhaustive_verify(args.n, mode, jobs=args.jobs, chunk=args.chunk, box_check=args.box_check)
    report = args.report
    if report is None and os.environ.get(REPORT_DIR_ENV):
        report = Path(os.environ[REPORT_DIR_ENV]) / f"verify-n{args.n}-{mode}.json"
    if report:
        rep.write(report)
    print(f"n={rep.n} mode={mode} pointsets={rep.pointsets_tested} trees={rep.trees_tested} "
          f"failures={len(rep.failures)} classes={len(rep.failure_classes)} seconds={rep.wall_time:.1f}")
    for code, perm in rep.failure_classes:
        print(f"FAIL tree={code} pointset={perm}")
    if args.box_check:
        print(f"box lemma: {rep.box_checked} embeddings checked, {len(rep.box_violations)} violations")
    unexpected = set(rep.failure_classes) - _expected_failures(args.n, mode)
    return 1 if unexpected or rep.box_violations else 0


def cmd_counterexamples(args) -> int:
    names = None if args.all or not args.names else args.names
    if names is None and not args.all:
        raise UsageError("name instances or pass --all")
    if args.dimacs_dir:
        Path(args.dimacs_dir).mkdir(parents=True, exist_ok=True)
    ok = True
    for v in harness.verify_counterexamples(names, force_long=args.force_long, use_sat=not args.no_sat,
                                            dimacs_dir=args.dimacs_dir):
        tag = " [long-running]" if v.long_running else ""
        clauses = f" clauses={v.clauses}" if v.clauses is not None else ""
        print(f"{v.name}: backtracker={v.backtracker} sat={v.sat}{clauses} seconds={v.seconds:.1f}{tag}")
        if v.backtracker != "skipped" and not v.non_embeddable:
            ok = False
    return 0 if ok else 1


def cmd_cnf(args) -> int:
    t = _tree(args)
    if isinstance(t, OrderedTree):
        t = t.base
    p = _points(args, t.n)
    if t.n != p.n:
        raise UsageError(f"tree has {t.n} vertices but point set has {p.n} points")
    vm = VarMap(t.n, t.edges)
    if args.count_only:
        print(f"variables={vm.var_count} clauses={count_clauses(t, p, args.symmetry_breaking)}")
    elif args.dimacs and args.dimacs != "-":
        with open(args.dimacs, "w") as fh:
            nv, nc = stream_dimacs(t, p, fh, args.symmetry_breaking)
        print(f"variables={nv} clauses={nc}", file=sys.stderr)
    else:
        f, _ = build_cnf(t, p, args.symmetry_breaking)
        write_dimacs(f, sys.stdout)
    if args.varmap:
        Path(args.varmap).write_text(vm.to_text())
    return 0


def cmd_enumerate(args) -> int:
    if args.trees is not None:
        items = list(enumerate_trees(args.trees))
        fmt = format_tree
    elif args.ordered_trees is not None:
        items = list(enumerate_ordered_trees(args.ordered_trees))
        fmt = format_tree
    elif args.pointsets is not None:
        arr = canonical_pointset_array(args.pointsets, args.group)
        print(len(arr))
        if args.list:
            for row in arr:
                print(format_perm(row + 1))
        return 0
    else:
        raise UsageError("choose --trees, --ordered-trees or --pointsets")
    print(len(items))
    if args.list:
        for t in items:
            sys.stdout.write(fmt(t) + "\n")
    return 0


def cmd_render(args) -> int:
    p = _points(args)
    e = Embedding.from_text(Path(args.embedding).read_text()) if args.embedding else None
    boxes = _boxes(args, p)
    spec = RenderSpec(cell=args.cell, box_frames=not args.no_boxes, labels=args.labels)
    svg = render_svg(p, e, spec, boxes)
    if args.out == "-":
        sys.stdout.write(svg)
    else:
        Path(args.out).write_text(svg)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lshape", description="L-shaped point-set embeddings of trees")
    sub = ap.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("embed", help="search for an embedding")
    _add_tree_args(e)
    _add_point_args(e)
    e.add_argument("--ordered", action="store_true", help="respect the rotation system")
    e.add_argument("--strict", action="store_true", help="do not accept the mirrored rotation")
    e.add_argument("--count", action="store_true", help="print the exact number of embeddings")
    e.add_argument("--box-pruning", action="store_true", help="staircase box rule (staircases only)")
    e.add_argument("--render", metavar="SVG", help="also draw the result")
    e.add_argument("--labels", action="store_true", help="label vertices in the drawing")
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("verify", help="exhaustive sweep over all trees and point sets of one size")
    v.add_argument("n", type=int)
    v.add_argument("--ordered", action="store_true")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--chunk", type=int, default=4096, help="point sets per work unit")
    v.add_argument("--box-check", action="store_true", help="check the box lemma on staircase point sets")
    v.add_argument("--report", type=Path, help=f"JSON report path (default: ${REPORT_DIR_ENV}/...)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counterexamples", help="verify registry instances")
    c.add_argument("names", nargs="*")
    c.add_argument("--all", action="store_true")
    c.add_argument("--force-long", action="store_true", help="also solve long-running instances")
    c.add_argument("--no-sat", action="store_true", help="backtracker only")
    c.add_argument("--dimacs-dir", help="write each formula there")
    c.set_defaults(func=cmd_counterexamples)

    f = sub.add_parser("cnf", help="SAT encoding in DIMACS format")
    _add_tree_args(f)
    _add_point_args(f)
    f.add_argument("--dimacs", help="output file (default stdout)")
    f.add_argument("--varmap", help="write the variable map here")
    f.add_argument("--symmetry-breaking", action="store_true", help="order sibling leaves")
    f.add_argument("--count-only", action="store_true", help="print sizes without writing clauses")
    f.set_defaults(func=cmd_cnf)

    n = sub.add_parser("enumerate", help="count (and list) canonical objects")
    g = n.add_mutually_exclusive_group(required=True)
    g.add_argument("--trees", type=int, metavar="N")
    g.add_argument("--ordered-trees", type=int, metavar="N")
    g.add_argument("--pointsets", type=int, metavar="N")
    n.add_argument("--group", default="full8", choices=["full8", "rotations4", "rot4"])
    n.add_argument("--list", action="store_true", help="stream the objects after the count")
    n.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("render", help="draw a point set and optionally an embedding as SVG")
    _add_point_args(r)
    r.add_argument("--instance", help="registry instance whose point set to draw")
    r.add_argument("--embedding", help="embedding file in the text format")
    r.add_argument("--cell", type=int, default=40)
    r.add_argument("--no-boxes", action="store_true")
    r.add_argument("--labels", action="store_true")
    r.add_argument("-o", "--out", default="-")
    r.set_defaults(func=cmd_render)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

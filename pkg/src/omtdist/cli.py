"""Command-line interface.

Exit codes: 0 on success, 1 when a validation or verification fails, 2 for
usage errors.  Machine-readable output goes to stdout, diagnostics to stderr;
identical inputs produce byte-identical stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import treeio
from .curves import induced_curve
from .interleaving import check_good_map, check_interleaving, check_monotone, monotone_interleaving_distance
from .labelling import check_monotone_labelling, good_to_labelling, label_distance
from .oracle import PartitionInstance, build_partition_reduction
from .ordering import OrderedMergeTree


def _load_tree(path: str) -> OrderedMergeTree:
    return treeio.parse_tree(Path(path).read_text())


def _cmd_validate(args) -> int:
    try:
        omt = _load_tree(args.tree)
    except (treeio.ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"ok: {len(omt.tree.vertices)} vertices, {len(omt.tree.leaves)} leaves")
    return 0


def _distance_one(path_a: str, path_b: str, emit: str | None) -> int:
    a = _load_tree(path_a)
    b = _load_tree(path_b)
    delta, (alpha, beta) = monotone_interleaving_distance(a, b)
    print(f"{delta:.9f}")
    if emit:
        labelling = good_to_labelling(alpha)
        Path(emit).write_text(treeio.serialise_certificate(alpha, beta, labelling))
    return 0


def _cmd_distance(args) -> int:
    try:
        if args.all_pairs:
            paths = sorted(Path(args.all_pairs).glob("*.tree"))
            for i, pa in enumerate(paths):
                for pb in paths[i + 1 :]:
                    a = _load_tree(str(pa))
                    b = _load_tree(str(pb))
                    delta, _ = monotone_interleaving_distance(a, b)
                    print(f"{pa.name}\t{pb.name}\t{delta:.9f}")
            return 0
        if not (args.tree_a and args.tree_b):
            print("error: distance needs two trees or --all-pairs", file=sys.stderr)
            return 2
        return _distance_one(args.tree_a, args.tree_b, args.emit_certificate)
    except (treeio.ParseError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _cmd_curve(args) -> int:
    try:
        omt = _load_tree(args.tree)
    except (treeio.ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    heights = list(induced_curve(omt).heights)
    sys.stdout.write(treeio.curve_to_csv(heights))
    if args.svg:
        Path(args.svg).write_text(treeio.curve_to_svg(heights))
    return 0


def _cmd_verify(args) -> int:
    try:
        a = _load_tree(args.tree_a)
        b = _load_tree(args.tree_b)
        alpha, beta, labelling = treeio.parse_certificate(
            Path(args.certificate).read_text(), a, b
        )
    except (treeio.ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.delta is not None:
        alpha.delta = args.delta
        beta.delta = args.delta

    if args.kind == "interleaving":
        bad = check_interleaving(alpha, beta) or check_monotone(alpha) or check_monotone(beta)
    elif args.kind == "goodmap":
        bad = check_good_map(alpha, variant="TW") or check_good_map(alpha, variant="G") or check_monotone(alpha)
    else:  # labelling
        if labelling is None:
            print("error: certificate carries no labelling", file=sys.stderr)
            return 1
        bad = check_monotone_labelling(labelling)
        if bad is None:
            m, mp = labelling.matrices()
            d = label_distance(m, mp)
            if d > alpha.delta + 1e-9:
                bad = f"label distance {d} exceeds delta {alpha.delta}"
    if bad is not None:
        print(f"verification failed: {bad}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_convert(args) -> int:
    try:
        omt = _load_tree(args.tree)
    except (treeio.ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print("leaf-order\t" + "\t".join(str(u) for u in omt.leaf_order))
    for h in args.heights or []:
        pts = omt.level_set(h)
        rendered = "\t".join(
            str(x.anchor) if x.height == omt.tree.height(x.anchor) else f"{x.anchor}@{x.height!r}"
            for x in pts
        )
        print(f"level {h!r}\t{rendered}")
    return 0


def _cmd_reduce(args) -> int:
    try:
        values = tuple(int(s) for s in args.set.split(","))
        inst = PartitionInstance(values, args.m, args.lam)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    t, t_prime = build_partition_reduction(inst)
    doc_a = treeio.serialise_tree(OrderedMergeTree(t, t.leaves))
    doc_b = treeio.serialise_tree(OrderedMergeTree(t_prime, t_prime.leaves))
    if args.out_a and args.out_b:
        Path(args.out_a).write_text(doc_a)
        Path(args.out_b).write_text(doc_b)
    else:
        sys.stdout.write(doc_a)
        sys.stdout.write(doc_b)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omtdist",
        description="Monotone interleaving distance for ordered merge trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a tree document")
    p.add_argument("tree")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("distance", help="distance between two trees")
    p.add_argument("tree_a", nargs="?")
    p.add_argument("tree_b", nargs="?")
    p.add_argument("--emit-certificate", metavar="PATH")
    p.add_argument("--all-pairs", metavar="DIR", help="all pairs of *.tree files in a directory")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("curve", help="induced 1D curve as CSV")
    p.add_argument("tree")
    p.add_argument("--svg", metavar="PATH", help="also write a polyline rendering")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("verify", help="verify a certificate")
    p.add_argument("kind", choices=["interleaving", "goodmap", "labelling"])
    p.add_argument("tree_a")
    p.add_argument("tree_b")
    p.add_argument("certificate")
    p.add_argument("--delta", type=float, default=None, help="override the certificate delta")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("convert", help="print the leaf order and level sets")
    p.add_argument("tree")
    p.add_argument(
        "--heights",
        type=lambda s: [float(x) for x in s.split(",")],
        default=None,
        help="comma-separated heights for layer-order listings",
    )
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("reduce", help="emit the balanced-partition reduction trees")
    p.add_argument("--set", required=True, help="comma-separated positive integers")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=9.0)
    p.add_argument("--out-a", metavar="PATH")
    p.add_argument("--out-b", metavar="PATH")
    p.set_defaults(func=_cmd_reduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

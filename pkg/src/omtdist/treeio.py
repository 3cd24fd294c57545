"""Tree and certificate documents.

Trees travel as JSON objects: a format marker, vertex records (id, parent id
or null for the root, height as a number or the literal string "inf"), and a
children-order table that fixes the leaf order.  Serialisation is canonical:
vertices in depth-first pre-order, keys sorted, shortest round-trip decimals.
Certificates mirror the shift-map leaf-image tables and the labelling maps.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .interleaving import ShiftMap
from .labelling import Labelling
from .ordering import OrderedMergeTree, check_leaf_order
from .trees import INF, MergeTree, TreePoint, validate_tree

TREE_FORMAT = "omt-tree-1"
CERT_FORMAT = "omt-certificate-1"


class ParseError(ValueError):
    """Input text is not a valid document; carries a position or a vertex."""


def _height_out(h: float) -> Any:
    return "inf" if h == INF else h


def _height_in(raw: Any, where: str) -> float:
    if raw == "inf":
        return INF
    if isinstance(raw, (int, float)) and math.isfinite(raw):
        return float(raw)
    raise ParseError(f"invalid height {raw!r} {where}")


def tree_to_document(omt: OrderedMergeTree, metadata: dict | None = None) -> dict:
    tree = omt.tree
    doc = {
        "format": TREE_FORMAT,
        "vertices": [
            {
                "id": str(v),
                "parent": None if tree.parent(v) is None else str(tree.parent(v)),
                "height": _height_out(tree.height(v)),
            }
            for v in tree.vertices
        ],
        "children": {
            str(v): [str(c) for c in tree.children(v)]
            for v in tree.vertices
            if tree.children(v)
        },
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def serialise_tree(omt: OrderedMergeTree, metadata: dict | None = None) -> str:
    return json.dumps(tree_to_document(omt, metadata), sort_keys=True, indent=2) + "\n"


def document_to_tree(doc: dict) -> OrderedMergeTree:
    if not isinstance(doc, dict) or doc.get("format") != TREE_FORMAT:
        raise ParseError(f"expected a {TREE_FORMAT} document")
    vertices = doc.get("vertices")
    if not isinstance(vertices, list) or not vertices:
        raise ParseError("document has no vertex records")
    parent: dict[str, str | None] = {}
    height: dict[str, float] = {}
    for rec in vertices:
        if not isinstance(rec, dict) or "id" not in rec:
            raise ParseError(f"malformed vertex record {rec!r}")
        vid = str(rec["id"])
        if vid in parent:
            raise ParseError(f"duplicate vertex id {vid!r}")
        parent[vid] = None if rec.get("parent") is None else str(rec["parent"])
        height[vid] = _height_in(rec.get("height"), f"at vertex {vid!r}")
    children = doc.get("children", {})
    order = {str(v): [str(c) for c in cs] for v, cs in children.items()}
    tree = MergeTree(parent, height, order)
    bad = validate_tree(tree)
    if bad is not None:
        raise ParseError(f"invalid merge tree: {bad}")
    violation = check_leaf_order(tree, tree.leaves)
    if violation is not None:
        raise ParseError(f"children order does not induce a leaf order: {violation}")
    return OrderedMergeTree(tree, tree.leaves)


def parse_tree(text: str) -> OrderedMergeTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    return document_to_tree(doc)


# -- certificates ------------------------------------------------------------


def _point_out(x: TreePoint) -> dict:
    return {"anchor": str(x.anchor), "height": _height_out(x.height)}


def _point_in(raw: Any, where: str) -> TreePoint:
    if not isinstance(raw, dict) or "anchor" not in raw:
        raise ParseError(f"malformed point {raw!r} {where}")
    return TreePoint(str(raw["anchor"]), _height_in(raw.get("height"), where))


def certificate_to_document(
    alpha: ShiftMap, beta: ShiftMap, labelling: Labelling | None = None
) -> dict:
    doc = {
        "format": CERT_FORMAT,
        "delta": alpha.delta,
        "alpha": {str(u): _point_out(x) for u, x in alpha.leaf_images.items()},
        "beta": {str(u): _point_out(x) for u, x in beta.leaf_images.items()},
    }
    if labelling is not None:
        m, m_prime = labelling.matrices()
        doc["labelling"] = {
            "pi": [_point_out(x) for x in labelling.pi],
            "pi_prime": [_point_out(x) for x in labelling.pi_prime],
            # Induced matrices are derived data, carried for inspection and
            # ignored on parse.
            "matrix": m.tolist(),
            "matrix_prime": m_prime.tolist(),
        }
    return doc


def serialise_certificate(alpha: ShiftMap, beta: ShiftMap, labelling: Labelling | None = None) -> str:
    return json.dumps(certificate_to_document(alpha, beta, labelling), sort_keys=True, indent=2) + "\n"


def parse_certificate(
    text: str, source: OrderedMergeTree, target: OrderedMergeTree
) -> tuple[ShiftMap, ShiftMap, Labelling | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict) or doc.get("format") != CERT_FORMAT:
        raise ParseError(f"expected a {CERT_FORMAT} document")
    delta = doc.get("delta")
    if not isinstance(delta, (int, float)) or delta < 0:
        raise ParseError("certificate carries no usable delta")
    alpha = ShiftMap(
        source,
        target,
        float(delta),
        {u: _point_in(raw, f"in alpha[{u!r}]") for u, raw in doc.get("alpha", {}).items()},
    )
    beta = ShiftMap(
        target,
        source,
        float(delta),
        {u: _point_in(raw, f"in beta[{u!r}]") for u, raw in doc.get("beta", {}).items()},
    )
    labelling = None
    if "labelling" in doc:
        raw = doc["labelling"]
        labelling = Labelling(
            source,
            target,
            tuple(_point_in(x, "in pi") for x in raw.get("pi", [])),
            tuple(_point_in(x, "in pi_prime") for x in raw.get("pi_prime", [])),
        )
    return alpha, beta, labelling


# -- curve exports -----------------------------------------------------------


def curve_to_csv(heights: list[float]) -> str:
    n = len(heights)
    lines = ["param,height"]
    for k, h in enumerate(heights):
        p = k / (n - 1)
        lines.append(f"{p!r},{'inf' if h == INF else repr(h)}")
    return "\n".join(lines) + "\n"


def curve_to_svg(heights: list[float], width: float = 640.0, height_px: float = 360.0) -> str:
    """A single polyline over a fixed viewBox derived from the height range."""
    finite = [h for h in heights if math.isfinite(h)]
    top = max(finite) + (max(finite) - min(finite)) + 1.0
    lo = min(finite)
    span = top - lo or 1.0
    n = len(heights)
    pts = []
    for k, h in enumerate(heights):
        hh = top if h == INF else h
        x = width * k / (n - 1)
        y = height_px * (1.0 - (hh - lo) / span)
        pts.append(f"{x:.3f},{y:.3f}")
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:.0f} {height_px:.0f}">'
        f'<polyline fill="none" stroke="black" stroke-width="1.5" points="{" ".join(pts)}"/>'
        "</svg>\n"
    )

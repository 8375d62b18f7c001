"""DOT and SVG emitters for quantum structures and partition models.

Output is byte-for-byte deterministic: element order follows branch and
party order, and all coordinates are printed with fixed precision.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from ..errors import ArgumentError
from ..states import ROLES, PartitionModel
from ..structure import QuantumStructure

UNIT = 200.0  # pixels per unit branch length
ROW = 220.0
MARGIN = 40.0
COLOR = "#1f4e9c"
SVG_ELEMENTS = {"line", "circle", "text"}


@dataclass(frozen=True)
class DiagramDoc:
    format: str
    body: str
    provenance: dict = field(default_factory=dict)


def _num(x: float, digits: int = 4) -> str:
    s = f"{x:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _coord(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def _angle_label(deg: float) -> str:
    s = _num(deg)
    return "0" if s == "360" else s


def branch_label(length: float, orientation: float) -> str:
    return f"len={length:.4f}, ang={_angle_label(orientation)}°"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _check_format(fmt: str) -> str:
    if fmt not in ("dot", "svg"):
        raise ArgumentError(f"unknown diagram format {fmt!r}; use dot or svg")
    return fmt


# ---------------------------------------------------------------- structures

def emit_structure_diagram(qs: QuantumStructure, fmt: str = "dot") -> DiagramDoc:
    """One glyph per occupied node, one edge (chain for >2 parties) per branch.

    Party glyphs alternate between filled dots and open circles by party
    order. Edges carry ``len=..., ang=...`` labels.
    """
    qs.validate()
    if _check_format(fmt) == "dot":
        return _structure_dot(qs)
    return _structure_svg(qs)


def _node_id(label: str, i: int) -> str:
    return f"{label}_{i}"


def _structure_dot(qs: QuantumStructure) -> DiagramDoc:
    out = ["graph structure {", "  layout=neato;", "  overlap=false;", '  node [fontsize=10, label=""];']
    nodes = qs.nodes()
    for k, label in enumerate(qs.labels):
        shape = "shape=point, width=0.15" if k % 2 == 0 else "shape=circle, width=0.15, fixedsize=true"
        out.append(f"  subgraph cluster_{k} {{")
        out.append(f"    label={_q(label)};")
        out.append("    style=dashed;")
        for i in nodes[label]:
            out.append(f"    {_q(_node_id(label, i))} [{shape}, xlabel={_q(f'|{i}>')}];")
        out.append("  }")
    provenance = {}
    for b_idx, b in enumerate(qs.branches):
        text = branch_label(b.length, b.orientation)
        ids = []
        if len(qs.labels) == 1:
            provenance[b_idx] = [_node_id(qs.labels[0], b.nodes[0])]
            continue
        for j in range(len(qs.labels) - 1):
            eid = f"b{b_idx}" if len(qs.labels) == 2 else f"b{b_idx}.{j}"
            u = _node_id(qs.labels[j], b.nodes[j])
            v = _node_id(qs.labels[j + 1], b.nodes[j + 1])
            seg_len = 2 * b.length / (len(qs.labels) - 1)
            out.append(f"  {_q(u)} -- {_q(v)} [id={_q(eid)}, label={_q(text)}, len={_num(seg_len)}];")
            ids.append(eid)
        provenance[b_idx] = ids
    out.append("}")
    return DiagramDoc("dot", "\n".join(out) + "\n", provenance)


def _svg_document(width: float, height: float, elements: list[str]) -> str:
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_coord(width)}" '
            f'height="{_coord(height)}" viewBox="0 0 {_coord(width)} {_coord(height)}">\n')
    return head + "".join(f"  {e}\n" for e in elements) + "</svg>\n"


def _line(x1, y1, x2, y2, extra="") -> tuple:
    return ("line", (x1, y1, x2, y2), extra)


def _structure_svg(qs: QuantumStructure) -> DiagramDoc:
    labels = qs.labels
    n = len(labels)
    pos: dict[tuple[int, int], tuple[float, float]] = {}
    nodes0 = qs.nodes()[labels[0]]
    for slot, i in enumerate(nodes0):
        pos[(0, i)] = (0.0, slot * ROW)
    shapes = []  # (kind, geometry, attrs) in drawing order, translated later
    provenance = {}
    for b_idx, b in enumerate(qs.branches):
        theta = math.radians(b.orientation)
        seg = UNIT * b.length / max(1, n - 1)
        ids = []
        for j in range(n - 1):
            x0, y0 = pos[(j, b.nodes[j])]
            # SVG y grows downward, so an anticlockwise angle subtracts from y
            tip = (x0 + seg * math.cos(theta), y0 - seg * math.sin(theta))
            eid = f"b{b_idx}" if n == 2 else f"b{b_idx}.{j}"
            shapes.append(("line", (x0, y0) + tip, f'id="{eid}" stroke="{COLOR}" stroke-width="2"'))
            ids.append(eid)
            key = (j + 1, b.nodes[j + 1])
            if key not in pos:
                pos[key] = tip
            elif math.dist(pos[key], tip) > 1e-9:
                shapes.append(("line", tip + pos[key],
                               f'id="{eid}c" stroke="{COLOR}" stroke-width="1" stroke-dasharray="4 3"'))
            if j == 0:
                mid = ((x0 + tip[0]) / 2 + 6, (y0 + tip[1]) / 2 - 6)
                shapes.append(("text", mid, branch_label(b.length, b.orientation)))
        provenance[b_idx] = ids if n > 1 else [f"{labels[0]}_{b.nodes[0]}"]
    for (k, i), (x, y) in sorted(pos.items()):
        if k % 2 == 0:
            style = f'fill="{COLOR}"'
        else:
            style = f'fill="white" stroke="{COLOR}" stroke-width="2"'
        shapes.append(("circle", (x, y), f'id="{labels[k]}_{i}" r="6" {style}'))
        shapes.append(("text", (x + 8, y + 16), f"{labels[k]}|{i}>"))

    xs = [p for s in shapes for p in (s[1][0::2] if s[0] == "line" else s[1][:1])]
    ys = [p for s in shapes for p in (s[1][1::2] if s[0] == "line" else s[1][1:2])]
    dx, dy = MARGIN - min(xs), MARGIN - min(ys)
    width = max(xs) - min(xs) + 2 * MARGIN + 120
    height = max(ys) - min(ys) + 2 * MARGIN
    elements = []
    for kind, g, attrs in shapes:
        if kind == "line":
            x1, y1, x2, y2 = g
            elements.append(f'<line x1="{_coord(x1 + dx)}" y1="{_coord(y1 + dy)}" '
                            f'x2="{_coord(x2 + dx)}" y2="{_coord(y2 + dy)}" {attrs}/>')
        elif kind == "circle":
            elements.append(f'<circle cx="{_coord(g[0] + dx)}" cy="{_coord(g[1] + dy)}" {attrs}/>')
        else:
            elements.append(f'<text x="{_coord(g[0] + dx)}" y="{_coord(g[1] + dy)}" '
                            f'font-family="sans-serif" font-size="12">{escape(attrs)}</text>')
    return DiagramDoc("svg", _svg_document(width, height, elements), provenance)


# ---------------------------------------------------------------- partitions

@dataclass
class _Box:
    name: str
    label: str
    parties: list[str] = field(default_factory=list)
    children: list["_Box"] = field(default_factory=list)


def _partition_tree(model: PartitionModel) -> _Box:
    by_role = {r: model.parties_with([r]) for r in ROLES}
    present = model.present_roles()

    def box(role):
        return _Box(role, role, by_role[role])

    universe = _Box("U", f"U ({model.kind})")
    if model.kind == "model-a":
        universe.children = [box("S"), box("E0")]
    elif model.kind == "model-b":
        e0, e1 = box("E0"), box("E1")
        e1.children = [box("S")]
        e0.children = [e1]
        universe.children = [e0]
    elif model.kind == "model-c":
        worlds = []
        for k in ("1", "2"):
            w = _Box(f"W{k}", f"S{k}+E{k}")
            w.children = [box(f"S{k}"), box(f"E{k}")]
            worlds.append(w)
        if "E0" in present:
            e0 = box("E0")
            e0.children = worlds
            universe.children = [e0]
        else:
            universe.children = worlds
    else:
        universe.children = [box(r) for r in ROLES if r in present]
    return universe


def _partition_dot(root: _Box) -> DiagramDoc:
    out = ["graph partition {", "  compound=true;", "  node [shape=circle, fontsize=10];"]
    provenance = {}

    def walk(b: _Box, depth: int):
        pad = "  " * depth
        out.append(f"{pad}subgraph cluster_{b.name} {{")
        out.append(f"{pad}  label={_q(b.label)};")
        for p in b.parties:
            out.append(f"{pad}  {_q(p)};")
            provenance[p] = f"cluster_{b.name}"
        for c in b.children:
            walk(c, depth + 1)
        out.append(f"{pad}}}")

    walk(root, 1)
    out.append("}")
    return DiagramDoc("dot", "\n".join(out) + "\n", provenance)


_PAD, _TITLE, _NODE_W, _NODE_H, _GAP = 12.0, 18.0, 44.0, 36.0, 12.0


def _measure(b: _Box) -> tuple[float, float]:
    row_w = len(b.parties) * _NODE_W
    kids = [_measure(c) for c in b.children]
    kids_w = sum(w for w, _ in kids) + _GAP * max(0, len(kids) - 1)
    kids_h = max((h for _, h in kids), default=0.0)
    width = 2 * _PAD + max(row_w, kids_w, 8.0 * len(b.label) + 4)
    height = 2 * _PAD + _TITLE + (_NODE_H if b.parties else 0.0) + kids_h
    return width, height


def _partition_svg(root: _Box) -> DiagramDoc:
    elements: list[str] = []
    provenance = {}

    def draw(b: _Box, x: float, y: float):
        w, h = _measure(b)
        for x1, y1, x2, y2 in ((x, y, x + w, y), (x + w, y, x + w, y + h),
                               (x + w, y + h, x, y + h), (x, y + h, x, y)):
            elements.append(f'<line x1="{_coord(x1)}" y1="{_coord(y1)}" x2="{_coord(x2)}" '
                            f'y2="{_coord(y2)}" stroke="black" stroke-width="1"/>')
        elements.append(f'<text x="{_coord(x + _PAD)}" y="{_coord(y + _PAD + 10)}" '
                        f'font-family="sans-serif" font-size="12">{escape(b.label)}</text>')
        cy = y + _PAD + _TITLE
        for k, p in enumerate(b.parties):
            cx = x + _PAD + k * _NODE_W + _NODE_W / 2
            elements.append(f'<circle id={quoteattr("party_" + p)} cx="{_coord(cx)}" '
                            f'cy="{_coord(cy + 10)}" r="8" fill="white" stroke="{COLOR}" stroke-width="2"/>')
            elements.append(f'<text x="{_coord(cx - 6)}" y="{_coord(cy + 32)}" '
                            f'font-family="sans-serif" font-size="10">{escape(p)}</text>')
            provenance[p] = b.name
        if b.parties:
            cy += _NODE_H
        cx = x + _PAD
        for c in b.children:
            draw(c, cx, cy)
            cx += _measure(c)[0] + _GAP

    w, h = _measure(root)
    draw(root, MARGIN, MARGIN)
    return DiagramDoc("svg", _svg_document(w + 2 * MARGIN, h + 2 * MARGIN, elements), provenance)


def emit_partition_diagram(model: PartitionModel, fmt: str = "dot") -> DiagramDoc:
    """Nested boxes: S in E1 in E0 for model-b, two S_i+E_i clusters (inside E0) for model-c."""
    root = _partition_tree(model)
    return _partition_dot(root) if _check_format(fmt) == "dot" else _partition_svg(root)


# ---------------------------------------------------------------- validation

_DOT_NODE = re.compile(r'^\s*("(?:[^"\\]|\\.)*")\s*(\[.*\])?;$')
_DOT_EDGE = re.compile(r'^\s*("(?:[^"\\]|\\.)*")\s*--\s*("(?:[^"\\]|\\.)*")\s*(\[.*\])?;$')


def validate_dot(text: str) -> list[str]:
    """Smoke check: balanced braces outside strings and nodes declared before edges use them."""
    problems = []
    depth, in_str, esc = 0, False, False
    for ch in text:
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                problems.append("unbalanced '}'")
                depth = 0
    if depth or in_str:
        problems.append("unbalanced braces or unterminated string")
    declared = set()
    for line in text.splitlines():
        m = _DOT_EDGE.match(line)
        if m:
            for node in m.group(1, 2):
                if node not in declared:
                    problems.append(f"edge uses undeclared node {node}")
            continue
        m = _DOT_NODE.match(line)
        if m:
            declared.add(m.group(1))
    if not re.match(r"^(strict\s+)?(di)?graph\b", text.lstrip()):
        problems.append("missing graph header")
    return problems


def validate_svg(text: str) -> list[str]:
    """Smoke check: well-formed XML with only line, circle and text under the root."""
    try:
        root = ET.fromstring(text.encode("utf-8"))
    except ET.ParseError as exc:
        return [f"malformed XML: {exc}"]
    problems = []
    ns = "{http://www.w3.org/2000/svg}"
    if root.tag != ns + "svg":
        problems.append(f"root element is {root.tag}")
    for el in root.iter():
        if el is root:
            continue
        tag = el.tag.removeprefix(ns)
        if tag not in SVG_ELEMENTS:
            problems.append(f"disallowed element {tag}")
        for attr in ("x", "y", "x1", "y1", "x2", "y2", "cx", "cy", "r"):
            if attr in el.attrib and not math.isfinite(float(el.attrib[attr])):
                problems.append(f"non-finite {attr} on {tag}")
    return problems


def validate(doc: DiagramDoc) -> list[str]:
    return validate_dot(doc.body) if doc.format == "dot" else validate_svg(doc.body)

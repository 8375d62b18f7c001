import math
import re

import pytest

import goldens
from tangnet import linalg
from tangnet.errors import ArgumentError
from tangnet.notation import emit_partition_diagram, emit_structure_diagram, parse
from tangnet.notation.diagrams import branch_label, validate, validate_dot, validate_svg
from tangnet.states import MultipartiteSpace, PartitionModel, PureState
from tangnet.structure import structure_from_state

AB = MultipartiteSpace((("A", 2), ("B", 2)))
S2 = 1 / math.sqrt(2)


def minus_i():
    return structure_from_state(PureState.from_terms(AB, {(0, 1): S2, (1, 0): -1j * S2}))


EDGE = re.compile(r'^\s*"[^"]+" -- "[^"]+" \[.*label="([^"]+)"', re.M)
NODE = re.compile(r'^\s*"[^"]+" \[shape=', re.M)


class TestStructureDot:
    def test_minus_i(self):
        body = emit_structure_diagram(minus_i(), "dot").body
        assert len(NODE.findall(body)) == 4
        assert EDGE.findall(body) == ["len=0.7071, ang=0°", "len=0.7071, ang=90°"]

    def test_single_branch(self):
        qs = structure_from_state(PureState.basis(AB, (0, 0)))
        body = emit_structure_diagram(qs, "dot").body
        assert len(NODE.findall(body)) == 2
        assert EDGE.findall(body) == ["len=1.0000, ang=0°"]

    def test_phi_minus(self):
        qs = structure_from_state(PureState.from_terms(AB, {(0, 0): S2, (1, 1): -S2}))
        labels = EDGE.findall(emit_structure_diagram(qs, "dot").body)
        assert [l.split("ang=")[1] for l in labels] == ["0°", "180°"]

    def test_provenance(self):
        doc = emit_structure_diagram(minus_i(), "dot")
        assert doc.provenance == {0: ["b0"], 1: ["b1"]}

    def test_three_parties_chain(self):
        qs = structure_from_state(linalg.haar_random_state([2, 2, 2], 1))
        doc = emit_structure_diagram(qs, "dot")
        assert all(len(v) == 2 for v in doc.provenance.values())
        assert validate(doc) == []


class TestStructureSvg:
    def test_minus_i_geometry(self):
        body = emit_structure_diagram(minus_i(), "svg").body
        lines = re.findall(r'<line x1="([\d.]+)" y1="([\d.]+)" x2="([\d.]+)" y2="([\d.]+)" id="(b\d)"', body)
        (x1, y1, x2, y2, _), (u1, v1, u2, v2, _) = [tuple(map(float, l[:4])) + (l[4],) for l in lines]
        # reference branch runs to the right; the second is turned a quarter anticlockwise (up on screen)
        assert y1 == y2 and x2 > x1
        assert u1 == u2 and v2 < v1
        assert math.hypot(x2 - x1, y2 - y1) == pytest.approx(math.hypot(u2 - u1, v2 - v1), abs=1e-3)

    def test_only_allowed_elements(self):
        body = emit_structure_diagram(minus_i(), "svg").body
        assert set(re.findall(r"<(\w+)", body)) - {"xml", "svg"} <= {"line", "circle", "text"}


@pytest.mark.parametrize("kind, roles, boxes", [
    ("model-a", {"s": "S", "e": "E0"}, {"S", "E0"}),
    ("model-b", {"s": "S", "e1": "E1", "e0": "E0"}, {"S", "E1", "E0"}),
    ("model-c", {"a": "S1", "b": "E1", "c": "S2", "d": "E2", "e": "E0"}, {"S1", "E1", "S2", "E2", "E0", "S1+E1", "S2+E2"}),
])
def test_partition_boxes(kind, roles, boxes):
    model = PartitionModel(kind, roles)
    dot = emit_partition_diagram(model, "dot")
    labels = set(re.findall(r'label="([^"]+)"', dot.body))
    assert boxes | {f"U ({kind})"} == labels
    svg = emit_partition_diagram(model, "svg")
    assert validate(dot) == [] and validate(svg) == []
    # every box is four lines
    assert svg.body.count("<line") == 4 * (len(boxes) + 1)


def test_unknown_format():
    with pytest.raises(ArgumentError):
        emit_structure_diagram(minus_i(), "png")


def test_branch_label_rounding():
    assert branch_label(S2, 359.99999) == "len=0.7071, ang=0°"
    assert branch_label(0.5, 45.25) == "len=0.5000, ang=45.25°"


def test_deterministic():
    qs = structure_from_state(linalg.haar_random_state([3, 3], 2))
    for fmt in ("dot", "svg"):
        assert emit_structure_diagram(qs, fmt).body == emit_structure_diagram(qs, fmt).body


class TestValidators:
    def test_bad_dot(self):
        assert validate_dot('graph g {\n  "a" -- "b";\n}') != []
        assert validate_dot('graph g {\n  "a";\n') != []
        assert validate_dot('graph g {\n  "a";\n  "b";\n  "a" -- "b";\n}') == []

    def test_bad_svg(self):
        assert validate_svg("<svg") != []
        assert validate_svg('<svg xmlns="http://www.w3.org/2000/svg"><rect/></svg>') != []
        assert validate_svg('<svg xmlns="http://www.w3.org/2000/svg"><line x1="0"/></svg>') == []


@pytest.mark.parametrize("stem", goldens.fixture_names())
def test_golden(stem):
    for name, text in goldens.rendered(stem).items():
        assert goldens.compare(name, text), f"{name} differs from golden (UPDATE_GOLDEN=1 to refresh)"
        if name.endswith((".dot", ".svg")):
            fmt = name.rsplit(".", 1)[1]
            problems = validate_dot(text) if fmt == "dot" else validate_svg(text)
            assert problems == [], name


def test_goldens_have_no_orphans():
    expected = set(goldens.all_rendered())
    assert {p.name for p in goldens.GOLDEN.iterdir()} == expected


def test_fixture_parse_matches_minus_i_diagram():
    doc = parse(goldens.FIXTURES.joinpath("minus_i.tgn").read_text())
    body = emit_structure_diagram(structure_from_state(doc.state()), "dot").body
    assert EDGE.findall(body) == ["len=0.7071, ang=0°", "len=0.7071, ang=90°"]

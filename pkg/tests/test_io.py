from fractions import Fraction

import pytest

from cslinks.diagram_io import (parse_class_vector, parse_diagram,
                                serialize_class_vector, serialize_diagram)
from cslinks.diagrams import canonical_oriented, std_oriented, tripod
from cslinks.errors import DiagramError

THETA_TEXT = """
# the single-chord diagram
component 0: a b
trivalent:
edges: a-b
"""

W3_TEXT = """
component 0: u0 u1 u2
trivalent: t0 t1 t2
edges: u0-t0 u1-t1 u2-t2 t0-t1 t1-t2 t0-t2
orient t0: u0 t1 t2
"""


def test_parse_theta():
    od = parse_diagram(THETA_TEXT)
    assert len(od.diagram.univalent) == 2
    assert not od.diagram.trivalent


def test_parse_orientation_line():
    od = parse_diagram(W3_TEXT)
    t0 = min(od.diagram.trivalent)
    cyc = od.triv_cyclic(t0)
    assert cyc[0] == 0  # u0 listed first in the orient line


def test_roundtrip():
    od = std_oriented(tripod())
    text = serialize_diagram(od)
    back = parse_diagram(text)
    assert canonical_oriented(back) == canonical_oriented(od)


def test_line_component_marker():
    text = "component 0 line: a b\ntrivalent:\nedges: a-b\n"
    od = parse_diagram(text)
    assert od.diagram.support.kind(0) == "line"
    assert "line" in serialize_diagram(od)


def test_bad_edge_token():
    with pytest.raises(DiagramError):
        parse_diagram("component 0: a b\nedges: ab\n")


def test_duplicate_vertex():
    with pytest.raises(DiagramError):
        parse_diagram("component 0: a a\nedges: a-a\n")


def test_class_vector_roundtrip():
    od = std_oriented(tripod())
    text = serialize_class_vector([(Fraction(-3, 7), od)])
    terms = parse_class_vector(text)
    assert len(terms) == 1
    coeff, back = terms[0]
    assert coeff == Fraction(-3, 7)
    assert canonical_oriented(back) == canonical_oriented(od)

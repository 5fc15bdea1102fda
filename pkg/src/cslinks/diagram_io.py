"""Plain-text diagram format.

One diagram per file or stream record::

    # lines starting with '#' are comments
    component 0: a b c      # cyclic order of univalent vertex names
    component 1 line: d e   # 'line' marks an interval/line component
    trivalent: t u
    edges: a-t b-t c-u d-u e-u t-u
    orient t: a b u         # cyclic order of edges at t, by far endpoint

Univalent orientations default to the component orientation.  Vertex names
are arbitrary whitespace-free tokens without '-'.
"""

from fractions import Fraction

from .diagrams import Diagram, OrientedDiagram, std_oriented
from .errors import DiagramError
from .support import CIRCLE, LINE, Support


def parse_diagram(text: str) -> OrientedDiagram:
    comps = []          # (ident, kind, name list)
    trivalent_names = []
    edge_pairs = []
    orient_lines = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        head = head.split()
        rest = rest.split()
        if head[0] == "component":
            if len(head) == 2:
                comps.append((head[1], CIRCLE, rest))
            elif len(head) == 3 and head[2] == "line":
                comps.append((head[1], LINE, rest))
            else:
                raise DiagramError(f"bad component line: {raw!r}")
        elif head[0] == "trivalent" and len(head) == 1:
            trivalent_names.extend(rest)
        elif head[0] == "edges" and len(head) == 1:
            for tok in rest:
                a, _, b = tok.partition("-")
                if not a or not b:
                    raise DiagramError(f"bad edge token {tok!r}")
                edge_pairs.append((a, b))
        elif head[0] == "orient" and len(head) == 2:
            orient_lines[head[1]] = rest
        else:
            raise DiagramError(f"unrecognised line: {raw!r}")
    if not comps:
        raise DiagramError("no components given")

    ids = {}
    for _, _, names in comps:
        for name in names:
            if name in ids:
                raise DiagramError(f"vertex {name!r} placed twice")
            ids[name] = len(ids)
    for name in trivalent_names:
        if name in ids:
            raise DiagramError(f"vertex {name!r} both univalent and trivalent")
        ids[name] = len(ids)

    support = Support(tuple((ident, kind) for ident, kind, _ in comps))
    placements = tuple(tuple(ids[n] for n in names) for _, _, names in comps)
    trivalent = frozenset(ids[n] for n in trivalent_names)
    edges = frozenset(frozenset((ids[a], ids[b])) for a, b in edge_pairs)
    d = Diagram(support, placements, trivalent, edges)

    od = std_oriented(d)
    if orient_lines:
        to = dict(od.triv_orient)
        for name, neigh in orient_lines.items():
            if name not in ids or ids[name] not in trivalent:
                raise DiagramError(f"orient line for non-trivalent vertex {name!r}")
            cyc = tuple(ids[n] for n in neigh)
            to[ids[name]] = cyc
        od = OrientedDiagram(d, tuple(sorted(to.items())), od.univ_orient)
    return od


def serialize_diagram(od: OrientedDiagram) -> str:
    d = od.diagram
    names = {}
    for comp in d.placements:
        for v in comp:
            names[v] = f"u{v}"
    for v in sorted(d.trivalent):
        names[v] = f"t{v}"
    out = []
    for i, comp in enumerate(d.placements):
        ident, kind = d.support.components[i]
        mark = " line" if kind == LINE else ""
        out.append(f"component {ident}{mark}: " + " ".join(names[v] for v in comp))
    out.append("trivalent: " + " ".join(names[v] for v in sorted(d.trivalent)))
    out.append("edges: " + " ".join(
        "-".join(names[v] for v in sorted(e)) for e in
        sorted(d.edges, key=lambda e: tuple(sorted(e)))))
    for t, cyc in od.triv_orient:
        out.append(f"orient {names[t]}: " + " ".join(names[v] for v in cyc))
    return "\n".join(out) + "\n"


def parse_class_vector(text: str):
    """Parse 'coeff p/q' + diagram-block records separated by blank lines.

    Returns a list of (Fraction, OrientedDiagram).
    """
    records = []
    block = []
    for raw in text.splitlines() + [""]:
        if raw.strip() == "":
            if block:
                records.append("\n".join(block))
                block = []
        else:
            block.append(raw)
    terms = []
    for rec in records:
        lines = rec.splitlines()
        head = lines[0].split()
        if len(head) != 2 or head[0] != "coeff":
            raise DiagramError("each record must start with 'coeff p/q'")
        coeff = Fraction(head[1])
        od = parse_diagram("\n".join(lines[1:]))
        terms.append((coeff, od))
    return terms


def serialize_class_vector(terms) -> str:
    parts = []
    for coeff, od in terms:
        parts.append(f"coeff {coeff}\n" + serialize_diagram(od))
    return "\n".join(parts)

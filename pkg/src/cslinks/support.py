"""Supports for diagrams: disjoint unions of oriented circles and lines.

A link's univalent vertices live on a union of circles.  Lines carry the
anomaly diagrams and the interval algebra; univalent vertices on a line
are totally ordered instead of cyclically ordered.
"""

from dataclasses import dataclass

CIRCLE = "circle"
LINE = "line"


@dataclass(frozen=True)
class Support:
    """An ordered list of named components, each a circle or a line.

    Components are distinguishable (a link has named components), so
    isomorphisms of diagrams never permute them.
    """

    components: tuple  # tuple of (identifier, kind)

    def __post_init__(self):
        if not self.components:
            raise ValueError("support needs at least one component")
        ids = [c[0] for c in self.components]
        if len(set(ids)) != len(ids):
            raise ValueError("component identifiers must be distinct")
        for _, kind in self.components:
            if kind not in (CIRCLE, LINE):
                raise ValueError(f"unknown component kind {kind!r}")

    @property
    def n_components(self):
        return len(self.components)

    def kind(self, index):
        return self.components[index][1]

    def ident(self, index):
        return self.components[index][0]

    def index_of(self, ident):
        for i, (name, _) in enumerate(self.components):
            if name == ident:
                return i
        raise KeyError(f"no component {ident!r}")

    def is_circle(self, index):
        return self.kind(index) == CIRCLE


S1 = Support((("0", CIRCLE),))
R1 = Support((("0", LINE),))


def circles(n):
    """Support made of n distinguishable circles (an n-component link)."""
    return Support(tuple((str(i), CIRCLE) for i in range(n)))

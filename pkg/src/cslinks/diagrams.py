"""Diagrams with support on a union of circles/lines: the combinatorial core.

A diagram is a graph with univalent vertices placed on the support (up to
isotopy, i.e. only the cyclic order per circle / total order per line
matters) and trivalent vertices free in space.  Loops and double edges are
excluded, and every connected component of the graph must reach the support.

Vertices are small integers.  A diagram is in *normal form* when the
univalent vertices are numbered 0..u-1 consecutively along the components
(in component order) and the trivalent vertices are u..u+t-1.  Enumeration
and canonicalisation always produce normal forms.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import CapabilityError, DiagramError
from .support import S1, Support

MAX_DEGREE = 4


@dataclass(frozen=True)
class Diagram:
    support: Support
    placements: tuple      # per component: tuple of univalent vertex ids in order
    trivalent: frozenset
    edges: frozenset       # frozensets {a, b}

    def __post_init__(self):
        if len(self.placements) != self.support.n_components:
            raise DiagramError("one placement tuple per support component required")
        univ = [v for comp in self.placements for v in comp]
        if len(set(univ)) != len(univ):
            raise DiagramError("univalent vertices must be distinct")
        uset = frozenset(univ)
        if uset & self.trivalent:
            raise DiagramError("univalent and trivalent vertex sets must be disjoint")
        deg = {v: 0 for v in uset | self.trivalent}
        for e in self.edges:
            if len(e) != 2:
                raise DiagramError(f"loop or malformed edge {set(e)}")
            for v in e:
                if v not in deg:
                    raise DiagramError(f"edge endpoint {v} is not a vertex")
                deg[v] += 1
        if len(self.edges) != sum(deg.values()) // 2:
            raise DiagramError("double edges are excluded")
        for v in uset:
            if deg[v] != 1:
                raise DiagramError(f"univalent vertex {v} lies in {deg[v]} edges")
        for v in self.trivalent:
            if deg[v] != 3:
                raise DiagramError(f"trivalent vertex {v} lies in {deg[v]} edges")
        for comp in graph_components(frozenset(deg), self.edges):
            if not comp & uset:
                raise DiagramError("a connected component misses the support")

    @property
    def univalent(self):
        return frozenset(v for comp in self.placements for v in comp)

    @property
    def vertices(self):
        return self.univalent | self.trivalent

    def component_of(self, v):
        for i, comp in enumerate(self.placements):
            if v in comp:
                return i
        raise KeyError(v)

    def neighbors(self, v):
        return sorted(next(iter(e - {v})) for e in self.edges if v in e)

    def internal_edges(self):
        """Edges with both endpoints trivalent."""
        return [e for e in self.edges if e <= self.trivalent]


def degree(d: Diagram) -> int:
    """Half the vertex count; the two other paper formulas must agree."""
    n2 = len(d.vertices)
    by_vertices, by_edges = n2 // 2, len(d.edges) - len(d.trivalent)
    by_count = (len(d.edges) + len(d.univalent)) // 3
    if n2 % 2 or by_vertices != by_edges or by_vertices != by_count:
        raise DiagramError("degree formulas disagree; malformed diagram")
    return by_vertices


def edge_counts(d: Diagram, A) -> tuple:
    """(#E_A, #E'_A): edges inside A and edges with exactly one end in A."""
    A = frozenset(A)
    if not A:
        raise DiagramError("A must be nonempty")
    e_in = sum(1 for e in d.edges if e <= A)
    e_half = sum(1 for e in d.edges if len(e & A) == 1)
    return e_in, e_half


def half_edge_count_check(d: Diagram, A) -> tuple:
    """Return (#E_A, #E'_A), asserting 2#E_A + #E'_A = 3#(A∩T) + #(A∩U)."""
    A = frozenset(A)
    e_in, e_half = edge_counts(d, A)
    lhs = 2 * e_in + e_half
    rhs = 3 * len(A & d.trivalent) + len(A & d.univalent)
    if lhs != rhs:
        raise DiagramError(f"half-edge count {lhs} != {rhs} for A={sorted(A)}")
    return e_in, e_half


def graph_components(vertices, edges):
    """Connected components of a plain graph, as a list of frozensets."""
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        a, b = tuple(e)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for v in vertices:
        groups.setdefault(find(v), set()).add(v)
    return [frozenset(g) for g in groups.values()]


def is_connected(vertices, edges):
    vertices = frozenset(vertices)
    if not vertices:
        return False
    return len(graph_components(vertices, edges)) == 1


def connected_subsets(vertices, edges, min_size=1):
    """All subsets of `vertices` that are connected in the induced subgraph."""
    vertices = sorted(vertices)
    adj = {v: set() for v in vertices}
    vset = set(vertices)
    for e in edges:
        a, b = tuple(e)
        if a in vset and b in vset:
            adj[a].add(b)
            adj[b].add(a)
    found = set()
    # grow from each seed, only ever adding vertices > seed to avoid duplicates
    for seed in vertices:
        frontier = [frozenset([seed])]
        seen = {frozenset([seed])}
        while frontier:
            cur = frontier.pop()
            if len(cur) >= min_size:
                found.add(cur)
            ext = set()
            for v in cur:
                ext |= {w for w in adj[v] if w > seed and w not in cur}
            for w in ext:
                nxt = cur | {w}
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def is_principal(d: Diagram, connected_only=True) -> bool:
    """Every A ⊆ T with #A > 1 has #E'_A >= 4 (connected A suffice)."""
    for A in _trivalent_subsets(d, connected_only):
        if edge_counts(d, A)[1] < 4:
            return False
    return True


def is_subprincipal(d: Diagram, connected_only=True) -> bool:
    """#E'_A >= 3 for all A ⊆ T, #A > 1; minimal (=3) subsets pairwise meet."""
    minimal = []
    for A in _trivalent_subsets(d, connected_only):
        e_half = edge_counts(d, A)[1]
        if e_half < 3:
            return False
        if e_half == 3:
            minimal.append(A)
    for A, B in itertools.combinations(minimal, 2):
        if not A & B:
            return False
    return True


def _trivalent_subsets(d, connected_only):
    t_edges = [e for e in d.edges if e <= d.trivalent]
    if connected_only:
        return [A for A in connected_subsets(d.trivalent, t_edges, min_size=2)]
    return [frozenset(c) for r in range(2, len(d.trivalent) + 1)
            for c in itertools.combinations(sorted(d.trivalent), r)]


def augmented_edges(d: Diagram):
    """Edges of the compactification graph G: diagram edges plus all
    pairs of univalent vertices (keeps U connected across components)."""
    extra = {frozenset(p) for p in itertools.combinations(sorted(d.univalent), 2)}
    return frozenset(d.edges) | extra


# ---------------------------------------------------------------------------
# Orientations

@dataclass(frozen=True)
class OrientedDiagram:
    """A diagram with vertex orientations.

    The orientation of a trivalent vertex is a cyclic order of its three
    incident edges, stored as a tuple of the three neighbour vertex ids (no
    double edges, so neighbours identify edges).  The orientation of a
    univalent vertex is a local orientation of the support, +1 meaning the
    component's own orientation.
    """

    diagram: Diagram
    triv_orient: tuple   # sorted tuple of (t, (a, b, c)) cyclic neighbour order
    univ_orient: tuple   # sorted tuple of (u, ±1)

    def __post_init__(self):
        d = self.diagram
        to = dict(self.triv_orient)
        uo = dict(self.univ_orient)
        if set(to) != set(d.trivalent) or set(uo) != set(d.univalent):
            raise DiagramError("orientation data must cover exactly the vertex set")
        for t, cyc in to.items():
            if sorted(cyc) != d.neighbors(t):
                raise DiagramError(f"cyclic order at {t} does not list its neighbours")
        if any(s not in (1, -1) for s in uo.values()):
            raise DiagramError("univalent orientations are ±1")

    def triv_cyclic(self, t):
        return dict(self.triv_orient)[t]

    def univ_sign(self, u):
        return dict(self.univ_orient)[u]

    def flip_vertex(self, v):
        """AS flip: reverse the orientation of one vertex."""
        if v in self.diagram.trivalent:
            to = [(t, (c[0], c[2], c[1]) if t == v else c) for t, c in self.triv_orient]
            return OrientedDiagram(self.diagram, tuple(to), self.univ_orient)
        uo = [(u, -s if u == v else s) for u, s in self.univ_orient]
        return OrientedDiagram(self.diagram, self.triv_orient, tuple(uo))


def std_oriented(d: Diagram) -> OrientedDiagram:
    """The standard orientation: all univalent +1, cyclic orders sorted."""
    to = tuple(sorted((t, tuple(d.neighbors(t))) for t in d.trivalent))
    uo = tuple(sorted((u, 1) for u in d.univalent))
    return OrientedDiagram(d, to, uo)


def _cyclic_sign(cyc):
    """Normalise a 3-cycle of distinct ints to sorted order; sign of the move."""
    a, b, c = cyc
    m = min(cyc)
    while cyc[0] != m:
        cyc = (cyc[1], cyc[2], cyc[0])
    return (1, tuple(sorted((a, b, c)))) if cyc[1] < cyc[2] else (-1, tuple(sorted((a, b, c))))


# ---------------------------------------------------------------------------
# Canonical form, isomorphism, automorphisms

def _raw_key(d: Diagram):
    return (d.support, d.placements, tuple(sorted(d.trivalent)),
            tuple(sorted(tuple(sorted(e)) for e in d.edges)))


def _rotated_umaps(d: Diagram):
    """Univalent relabelings onto normal-form names: every rotation per circle
    component (total orders on lines are kept).  Components never permute."""
    bases = []
    acc = 0
    for comp in d.placements:
        bases.append(acc)
        acc += len(comp)
    rot_choices = []
    for i, comp in enumerate(d.placements):
        k = len(comp)
        if k and d.support.is_circle(i):
            rot_choices.append(range(k))
        else:
            rot_choices.append(range(1))
    for rots in itertools.product(*rot_choices):
        umap = {}
        for i, comp in enumerate(d.placements):
            k = len(comp)
            for j in range(k):
                umap[comp[(j + rots[i]) % k]] = bases[i] + j
        yield umap


def _encode(d: Diagram, vmap):
    edges = tuple(sorted(tuple(sorted((vmap[a], vmap[b]))) for a, b in map(tuple, d.edges)))
    sizes = tuple(len(c) for c in d.placements)
    return (sizes, len(d.trivalent), edges)


@lru_cache(maxsize=None)
def _canonical_cached(support, placements, trivalent, edges):
    """Minimal labeling by branch-and-bound on incremental adjacency vectors.

    For a fixed univalent rotation, trivalent slots are filled one at a time;
    a slot's adjacency bit-vector against the already-labeled vertices is
    compared against the best known prefix, pruning dominated branches.
    Returns the minimal encoding and every vertex map achieving it (needed
    for automorphisms and orientation-sign transport).
    """
    d = Diagram(support, placements, frozenset(trivalent),
                frozenset(frozenset(e) for e in edges))
    adj = {v: set() for v in d.vertices}
    for a, b in map(tuple, d.edges):
        adj[a].add(b)
        adj[b].add(a)
    trivs = sorted(d.trivalent)
    u_total = len(d.univalent)
    best = {"segs": None, "maps": []}

    def univ_segments(umap):
        inv = sorted(umap, key=umap.get)
        segs = []
        for k, v in enumerate(inv):
            segs.append(tuple(1 if inv[j] in adj[v] else 0 for j in range(k)))
        return segs, inv

    def dfs(order, remaining, prefix, tight):
        # tight: prefix equals the best prefix so far; only then can a larger
        # segment be pruned and only then can completing tie with best
        level = len(prefix)
        if not remaining:
            # full comparison: best may have moved since tight was computed
            if best["segs"] is None or prefix < best["segs"]:
                best["segs"] = list(prefix)
                best["maps"] = [list(order)]
            elif prefix == best["segs"]:
                best["maps"].append(list(order))
            return
        for v in sorted(remaining):
            seg = tuple(1 if order[j] in adj[v] else 0 for j in range(len(order)))
            sub_tight = tight
            if tight and best["segs"] is not None:
                ref = best["segs"][level]
                if seg > ref:
                    continue
                if seg < ref:
                    sub_tight = False
            dfs(order + [v], remaining - {v}, prefix + [seg], sub_tight)

    for umap in _rotated_umaps(d):
        segs, inv = univ_segments(umap)
        tight = True
        if best["segs"] is not None:
            head = best["segs"][:u_total]
            if segs > head:
                continue
            tight = segs == head
        dfs(inv, set(trivs), list(segs), tight)

    maps = []
    for order in best["maps"]:
        maps.append({v: k for k, v in enumerate(order)})
    enc = _encode(d, maps[0]) if maps else ((), 0, ())
    if not d.vertices:
        return ((tuple(len(c) for c in d.placements), 0, ()),
                (tuple(),))
    return enc, tuple(tuple(sorted(m.items())) for m in maps)


def canonical_form(d: Diagram):
    """Canonical encoding; equal iff diagrams are isomorphic."""
    enc, _ = _canonical_cached(*_raw_key(d))
    return (d.support,) + enc


def canonical_maps(d: Diagram):
    enc, maps = _canonical_cached(*_raw_key(d))
    return (d.support,) + enc, [dict(m) for m in maps]


def canonical_diagram(d: Diagram) -> Diagram:
    """A normal-form representative of the isomorphism class of d."""
    key, _ = canonical_maps(d)
    sizes = key[1]
    bases = [sum(sizes[:i]) for i in range(len(sizes))]
    placements = []
    for i, k in enumerate(sizes):
        placements.append(tuple(range(bases[i], bases[i] + k)))
    u_total = sum(sizes)
    triv = frozenset(range(u_total, u_total + key[2]))
    edges = frozenset(frozenset(e) for e in key[3])
    return Diagram(d.support, tuple(placements), triv, edges)


def _orientation_sign(od: OrientedDiagram, vmap):
    """Sign relating the transported orientation to the standard one."""
    sign = 1
    for u, s in od.univ_orient:
        if s < 0:
            sign = -sign
    for t, cyc in od.triv_orient:
        mapped = tuple(vmap[x] for x in cyc)
        s, _ = _cyclic_sign(mapped)
        sign *= s
    return sign


def canonical_oriented(od: OrientedDiagram):
    """(key, sign): the class of [od] is sign times the standard class of key.

    sign = 0 when the class dies: some automorphism reverses the orientation
    (the AS relation then forces the class to vanish).
    """
    key, maps = canonical_maps(od.diagram)
    signs = {_orientation_sign(od, m) for m in maps}
    if len(signs) == 2:
        return key, 0
    return key, signs.pop()


def automorphism_count(d: Diagram) -> int:
    """Number of vertex bijections preserving edges, U/T and the placement
    class.  Component permutations are never allowed."""
    _, maps = canonical_maps(d)
    return len(maps)


# ---------------------------------------------------------------------------
# Enumeration

def _graphs_with_valences(u, t):
    """All loop-free, double-edge-free graphs on univalent vertices 0..u-1
    (degree 1) and trivalent vertices u..u+t-1 (degree 3)."""
    verts = list(range(u + t))
    target = {v: (1 if v < u else 3) for v in verts}
    results = []

    def rec(edges, remaining):
        active = [v for v in verts if remaining[v] > 0]
        if not active:
            results.append(frozenset(edges))
            return
        v = active[0]
        need = remaining[v]
        partners = [w for w in active[1:] if frozenset((v, w)) not in edges]
        if len(partners) < need:
            return
        for combo in itertools.combinations(partners, need):
            new_edges = edges | {frozenset((v, w)) for w in combo}
            new_rem = dict(remaining)
            new_rem[v] = 0
            ok = True
            for w in combo:
                new_rem[w] -= 1
                if new_rem[w] < 0:
                    ok = False
            if ok:
                rec(new_edges, new_rem)

    rec(frozenset(), target)
    return results


def _compositions(total, parts):
    """All ways to write total as an ordered sum of `parts` nonnegatives."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_diagrams(support: Support, n: int, connected_only=False):
    """One normal-form representative per isomorphism class of degree n.

    Deterministic order (sorted by canonical encoding).  Degrees above
    MAX_DEGREE are refused: the brute-force generator is exponential.
    """
    if n > MAX_DEGREE:
        raise CapabilityError(f"diagram enumeration supports degree <= {MAX_DEGREE}")
    if n < 0:
        raise CapabilityError("degree must be nonnegative")
    if n == 0:
        empty = Diagram(support, tuple(() for _ in support.components),
                        frozenset(), frozenset())
        return [empty]
    out = {}
    for t in range(0, 2 * n):
        u = 2 * n - t
        if u < 1:
            continue
        for sizes in _compositions(u, support.n_components):
            bases = [sum(sizes[:i]) for i in range(len(sizes))]
            placements = tuple(tuple(range(bases[i], bases[i] + k))
                               for i, k in enumerate(sizes))
            for g in _graphs_with_valences(u, t):
                try:
                    d = Diagram(support, placements,
                                frozenset(range(u, u + t)), g)
                except DiagramError:
                    continue
                if connected_only and not is_connected(d.vertices, d.edges):
                    continue
                key = canonical_form(d)
                if key not in out:
                    out[key] = canonical_diagram(d)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# Quotients (Notation: identify A to one vertex, delete E_A)

@dataclass(frozen=True)
class QuotientGraph:
    vertices: frozenset
    edges: tuple            # sorted tuple of sorted pairs; multi-edges kept
    collapsed: int          # id of the vertex replacing A
    collapsed_set: frozenset
    touches_support: bool   # whether A contained a univalent vertex


def quotient_diagram(d: Diagram, A) -> QuotientGraph:
    A = frozenset(A)
    if not A or not A <= d.vertices:
        raise DiagramError("A must be a nonempty vertex subset")
    cid = max(d.vertices) + 1
    vmap = {v: (cid if v in A else v) for v in d.vertices}
    edges = []
    for e in d.edges:
        if e <= A:
            continue
        a, b = tuple(e)
        edges.append(tuple(sorted((vmap[a], vmap[b]))))
    verts = frozenset(vmap.values())
    return QuotientGraph(verts, tuple(sorted(edges)), cid, A,
                         bool(A & d.univalent))


THETA = canonical_diagram(Diagram(S1, ((0, 1),), frozenset(),
                                  frozenset({frozenset((0, 1))})))


def tripod(support=S1) -> Diagram:
    """One trivalent vertex with three legs on the first component."""
    placements = tuple(((0, 1, 2) if i == 0 else ())
                       for i in range(support.n_components))
    edges = frozenset(frozenset((i, 3)) for i in range(3))
    return canonical_diagram(Diagram(support, placements, frozenset({3}), edges))


def tripod_positive(support=S1) -> OrientedDiagram:
    """The tripod oriented so its round-circle integral is +1/8: the cyclic
    edge order at the trivalent vertex is the reverse of the circle order
    of the legs (with the frame conventions of the integrator)."""
    od = std_oriented(tripod(support))
    t = next(iter(od.diagram.trivalent))
    return od.flip_vertex(t)

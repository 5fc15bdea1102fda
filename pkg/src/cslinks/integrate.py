"""Monte Carlo evaluation of the configuration space integrals I_L(Γ).

The integrand is the density of the pulled-back product of unit-area sphere
forms against the coordinate volume of the configuration space: a square
Jacobian determinant whose rows are the two frame components of each edge
direction differential and whose columns are the half-edge-ordered
coordinates (one circle parameter per univalent vertex, three space
coordinates per trivalent vertex, ordered by the vertex orientations).

Sign conventions are pinned empirically (Hopf linking +1, round-unknot
tripod +1/8): frames satisfy f1 x f2 = direction (outward) and the whole
determinant carries a factor (-1)^{#edges}, which makes the single-chord
density equal the classical Gauss linking integrand exactly.
"""

from fractions import Fraction
from math import factorial

import numpy as np

from .algebra import ClassVector, class_term, reduction
from .curves import LinkCurve
from .diagrams import OrientedDiagram, automorphism_count, \
    enumerate_diagrams, is_subprincipal, std_oriented
from .errors import DiagramError, SamplingError
from .mc import MCEstimate, run_sharded
from .support import circles

COLLISION_TOL = 1e-6     # edges shorter than this times the curve diameter
                         # are rejected (collision singularity ball)


def gauss_kernel(curve: LinkCurve, a, b):
    """The Gauss linking density for one chord, in mass-1 normalisation:
    (1/4pi) (L'(s) x L'(t)) . (L(t) - L(s)) / |L(t) - L(s)|^3.

    a = (component, parameter), b likewise; parameters may be arrays.
    """
    m1, s = a
    m2, t = b
    x = curve.eval(m1, s)
    y = curve.eval(m2, t)
    dx = curve.deriv(m1, s)
    dy = curve.deriv(m2, t)
    diff = y - x
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r < 1e-12):
        raise SamplingError("coincident curve points in gauss_kernel")
    num = np.sum(np.cross(dx, dy) * diff, axis=-1)
    return num / (4 * np.pi * r ** 3)


def sphere_frames(directions):
    """Deterministic oriented frames: f1 x f2 = direction (outward).

    Gram-Schmidt against the global z-axis, falling back to the x-axis near
    the poles; vectorized over the leading axes.
    """
    d = np.asarray(directions, dtype=float)
    z = np.zeros_like(d)
    z[..., 2] = 1.0
    x = np.zeros_like(d)
    x[..., 0] = 1.0
    near_pole = np.abs(d[..., 2]) > 0.99
    a = np.where(near_pole[..., None], x, z)
    f1 = np.cross(a, d)
    n = np.linalg.norm(f1, axis=-1, keepdims=True)
    f1 = f1 / n
    f2 = np.cross(d, f1)
    return f1, f2


class DiagramGeometry:
    """Precomputed structure shared by the integrand and the sampler.

    edge_order permutes the edge labels and flip_edges reverses chosen
    half-edge pairs; the integrand is invariant under both (each flips the
    coordinate orientation together with the frame of the edge direction),
    which the tests assert pointwise.
    """

    def __init__(self, od: OrientedDiagram, curve: LinkCurve,
                 edge_order=None, flip_edges=frozenset()):
        d = od.diagram
        if curve.n_components != d.support.n_components:
            raise DiagramError("curve and diagram support size differ")
        if not all(d.support.is_circle(i) for i in range(d.support.n_components)):
            raise DiagramError("closed-link integrals need circle components")
        self.od = od
        self.d = d
        self.curve = curve
        self.univ = [v for comp in d.placements for v in comp]
        self.univ_index = {v: i for i, v in enumerate(self.univ)}
        self.triv = sorted(d.trivalent)
        self.triv_index = {v: i for i, v in enumerate(self.triv)}
        self.univ_sign = {u: od.univ_sign(u) for u in self.univ}
        # default edge labelling: sorted edge list; direction low -> high id
        self.edges = sorted((tuple(sorted(e)) for e in d.edges))
        if edge_order is not None:
            self.edges = [self.edges[i] for i in edge_order]
        self.edges = [tuple(reversed(e)) if frozenset(e) in flip_edges else e
                      for e in self.edges]
        self.edge_index = {frozenset(e): i for i, e in enumerate(self.edges)}
        # columns in half-edge order; each is ('u', vertex) or ('t', vertex, axis)
        self.columns = self._column_order()
        self.n_univ = len(self.univ)
        self.n_triv = len(self.triv)
        self.dim = 2 * len(self.edges)
        if self.dim != self.n_univ + 3 * self.n_triv:
            raise DiagramError("column count mismatch (diagram not closed?)")
        self.sign = (-1) ** len(self.edges)
        self.diameter = curve.diameter()
        self._placement_order = self._bfs_order()

    def _column_order(self):
        cols = {}
        for ei, (p, q) in enumerate(self.edges):
            for half, v in ((2 * ei, p), (2 * ei + 1, q)):
                if v in self.univ_index:
                    cols[half] = ("u", v)
                else:
                    # axis of this half-edge at v: position of the far
                    # neighbour in the cyclic order rotated to start at the
                    # lowest-index incident edge
                    far = q if v == p else p
                    cyc = self._rotated_cyclic(v)
                    cols[half] = ("t", v, cyc.index(far))
        return [cols[h] for h in range(2 * len(self.edges))]

    def _rotated_cyclic(self, t):
        cyc = self.od.triv_cyclic(t)
        keyed = [self.edge_index[frozenset((t, n))] for n in cyc]
        start = keyed.index(min(keyed))
        return tuple(cyc[(start + i) % 3] for i in range(3))

    def _bfs_order(self):
        """Trivalent vertices ordered so each has a placed neighbour."""
        placed = set(self.univ)
        order = []
        pending = set(self.triv)
        while pending:
            progress = False
            for v in sorted(pending):
                nbs = [w for w in self.d.neighbors(v) if w in placed]
                if nbs:
                    order.append((v, tuple(nbs)))
                    placed.add(v)
                    pending.discard(v)
                    progress = True
                    break
            if not progress:
                raise DiagramError("component without univalent anchor")
        return order


class ConfigurationSampler:
    """Importance sampler for configurations of a diagram on a curve.

    Univalent parameters: uniform per component, sorted and rotated into the
    placement's cyclic class (exact constant density with the multiplicity
    factor (k-1)!/(2pi)^k).  Trivalent points: radial half-Cauchy proposals
    centered at a uniformly chosen already-placed graph neighbour; the 1/r^2
    density core matches the collision singularity of the integrand, the
    r^-4 tail covers escapes to infinity.
    """

    def __init__(self, geo: DiagramGeometry):
        self.geo = geo
        self.scale = max(geo.diameter, 1e-6)
        k_total = 1.0
        for comp in geo.d.placements:
            k = len(comp)
            if k:
                k_total *= float(factorial(k - 1)) / (2 * np.pi) ** k
        self.univ_density = k_total

    def sample(self, rng, count):
        geo = self.geo
        t_univ = np.empty((count, geo.n_univ))
        for ci, comp in enumerate(geo.d.placements):
            k = len(comp)
            if not k:
                continue
            u = np.sort(rng.uniform(0.0, 2 * np.pi, size=(count, k)), axis=1)
            rot = rng.integers(0, k, size=count)
            for j, v in enumerate(comp):
                idx = (rot + j) % k
                t_univ[:, geo.univ_index[v]] = np.take_along_axis(
                    u, idx[:, None], axis=1)[:, 0]
        density = np.full(count, self.univ_density)

        pos = {v: geo.curve.eval(geo.d.component_of(v),
                                 t_univ[:, geo.univ_index[v]])
               for v in geo.univ}
        x_triv = np.empty((count, geo.n_triv, 3))
        for v, anchors in geo._placement_order:
            anchor_pos = np.stack([pos[a] for a in anchors], axis=1)
            choice = rng.integers(0, len(anchors), size=count)
            centers = np.take_along_axis(
                anchor_pos, choice[:, None, None], axis=1)[:, 0, :]
            u = rng.uniform(0.0, 1.0, size=count)
            r = self.scale * np.tan(0.5 * np.pi * u)
            direc = rng.normal(size=(count, 3))
            direc /= np.linalg.norm(direc, axis=1, keepdims=True)
            x = centers + r[:, None] * direc
            q = np.zeros(count)
            for a in anchors:
                ra = np.linalg.norm(x - pos[a], axis=1)
                ra = np.maximum(ra, 1e-300)
                q += self.scale / (2 * np.pi ** 2 * ra ** 2
                                   * (self.scale ** 2 + ra ** 2))
            q /= len(anchors)
            density *= q
            x_triv[:, geo.triv_index[v], :] = x
            pos[v] = x
        return t_univ, x_triv, density


def integrand_batch(geo: DiagramGeometry, t_univ, x_triv):
    """Signed density values for a batch of configurations.

    Returns (values, rejected_mask); configurations with an edge shorter
    than the collision tolerance are flagged and valued 0.
    """
    count = t_univ.shape[0]
    pos = {}
    vel = {}
    for v in geo.univ:
        m = geo.d.component_of(v)
        tv = t_univ[:, geo.univ_index[v]]
        pos[v] = geo.curve.eval(m, tv)
        vel[v] = geo.curve.deriv(m, tv) * geo.univ_sign[v]
    for v in geo.triv:
        pos[v] = x_triv[:, geo.triv_index[v], :]

    E = len(geo.edges)
    directions = np.empty((count, E, 3))
    lengths = np.empty((count, E))
    for ei, (p, q) in enumerate(geo.edges):
        diff = pos[q] - pos[p]
        r = np.linalg.norm(diff, axis=1)
        lengths[:, ei] = r
        directions[:, ei, :] = diff / np.maximum(r, 1e-300)[:, None]
    rejected = np.any(lengths < COLLISION_TOL * geo.diameter, axis=1)

    f1, f2 = sphere_frames(directions)
    M = np.zeros((count, geo.dim, geo.dim))
    for ci, col in enumerate(geo.columns):
        if col[0] == "u":
            v = col[1]
            tangent = vel[v]
        else:
            v = col[1]
            tangent = np.zeros((count, 3))
            tangent[:, col[2]] = 1.0
        for p, q in geo.edges:
            if v not in (p, q):
                continue
            ei = geo.edge_index[frozenset((p, q))]
            dvec = directions[:, ei, :]
            proj = tangent - dvec * np.sum(dvec * tangent, axis=1)[:, None]
            entry = proj / np.maximum(lengths[:, ei], 1e-300)[:, None]
            if v == p:
                entry = -entry
            M[:, 2 * ei, ci] += np.sum(f1[:, ei, :] * entry, axis=1)
            M[:, 2 * ei + 1, ci] += np.sum(f2[:, ei, :] * entry, axis=1)
    det = np.linalg.det(M)
    values = geo.sign * det / (4 * np.pi) ** E
    values = np.where(rejected, 0.0, values)
    return values, rejected


def sample_configuration(od: OrientedDiagram, curve: LinkCurve, rng):
    """One configuration and its proposal density.

    Returns ({vertex: parameter}, {vertex: point}, density)."""
    geo = DiagramGeometry(od, curve)
    sampler = ConfigurationSampler(geo)
    t_univ, x_triv, density = sampler.sample(rng, 1)
    univ = {v: float(t_univ[0, geo.univ_index[v]]) for v in geo.univ}
    triv = {v: tuple(x_triv[0, geo.triv_index[v]]) for v in geo.triv}
    return univ, triv, float(density[0])


def integrand_at(od: OrientedDiagram, curve: LinkCurve, univ_params,
                 triv_points):
    """Pointwise integrand for a single configuration.

    univ_params: {vertex: parameter}; triv_points: {vertex: (x, y, z)}.
    """
    geo = DiagramGeometry(od, curve)
    t = np.array([[univ_params[v] for v in geo.univ]], dtype=float)
    if geo.triv:
        x = np.array([[triv_points[v] for v in geo.triv]], dtype=float)
    else:
        x = np.zeros((1, 0, 3))
    values, rejected = integrand_batch(geo, t, x)
    if rejected[0]:
        raise SamplingError("configuration within the collision tolerance")
    return float(values[0])


def integrate_diagram(od: OrientedDiagram, curve: LinkCurve, samples=10 ** 6,
                      seed=0, shards=None, workers=None) -> MCEstimate:
    """Importance-sampled estimate of the configuration space integral."""
    d = od.diagram
    if not d.vertices:
        raise DiagramError("the empty diagram has the empty integral (1)")
    geo = DiagramGeometry(od, curve)
    sampler = ConfigurationSampler(geo)

    def batch(rng, count):
        t_univ, x_triv, density = sampler.sample(rng, count)
        values, rejected = integrand_batch(geo, t_univ, x_triv)
        return values / density, int(np.sum(rejected))

    return run_sharded(batch, samples, seed, shards, workers)


def z_n(curve: LinkCurve, n: int, k=None, samples=10 ** 6, seed=0,
        shards=None, workers=None, subprincipal_only=True):
    """The degree-n part of the configuration space integral series.

    Returns (vector, errors, estimates): the reduced class vector with
    float coefficients, a dict basis-key -> standard error propagated
    through the reduction, and the per-diagram-class estimates.
    """
    support = circles(curve.n_components)
    if n == 0:
        empty = enumerate_diagrams(support, 0)[0]
        vec = ClassVector.of(std_oriented(empty), 1.0)
        return vec, {}, {}
    red = reduction(support, n, k)
    estimates = {}
    vec_terms = {}
    for idx, d in enumerate(enumerate_diagrams(support, n)):
        if subprincipal_only and not is_subprincipal(d):
            continue
        od = std_oriented(d)
        key, sign = class_term(od)
        if sign == 0:
            continue
        est = integrate_diagram(od, curve, samples=samples,
                                seed=seed + 7919 * idx,
                                shards=shards, workers=workers)
        estimates[key] = est
        aut = automorphism_count(d)
        vec_terms[key] = vec_terms.get(key, 0.0) + sign * est.value / aut
    raw = ClassVector(support, n, vec_terms)
    reduced = red.reduce(raw)
    # propagate errors through the linear reduction
    coords_err = {bk: 0.0 for bk in red.basis}
    for key, est in estimates.items():
        unit = ClassVector(support, n, {key: Fraction(1)})
        coeffs = red.reduce(unit)
        aut = automorphism_count(_diagram_of_key(key))
        for bk, c in coeffs.terms.items():
            coords_err[bk] += (float(c) * est.stderr / aut) ** 2
    errors = {bk: float(np.sqrt(v)) for bk, v in coords_err.items() if v}
    return reduced, errors, estimates


def _diagram_of_key(key):
    from .algebra import representative
    return representative(key).diagram

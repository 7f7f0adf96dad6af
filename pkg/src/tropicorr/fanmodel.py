"""Fans attached to a parameterized curve.

The curve's vertices and edges span cones in N_R + R: a finite vertex v
gives the ray through (h(v), 1), an infinite vertex with nonzero direction
gives the ray through (h(v), 0), and every edge with nonzero slope gives the
two-dimensional cone over its image segment or ray.  This cone collection
K_Gamma need not be a fan; its common refinement is, and the curve
subdivided at the interior crossing rays realizes the refinement as its own
cone collection.

All cones here have dimension at most two, so every intersection reduces to
2x2 rational solves; no general polyhedral machinery is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import paramcurve as pc
from .errors import RayNotInFan
from .exactla import integral_length, kernel_basis, primitive_vector
from .paramcurve import ParamTropicalCurve

Ray = tuple[int, ...]


@dataclass(frozen=True)
class Cone:
    """A sharp rational cone of dimension <= 2, stored by its primitive
    generators in a canonical (sorted) order."""

    generators: tuple[Ray, ...]

    @property
    def dim(self) -> int:
        return len(self.generators)

    def __str__(self):
        return "cone" + str(self.generators)


ZERO_CONE = Cone(())


def cone(*gens) -> Cone:
    prims = []
    for g in gens:
        p = primitive_vector(g)
        if p is None:
            raise ValueError("zero generator")
        prims.append(p)
    uniq = sorted(set(prims))
    if len(uniq) == 2 and _parallel(uniq[0], uniq[1]):
        raise ValueError("generators are parallel")
    return Cone(tuple(uniq))


def _parallel(u, v) -> bool:
    return all(u[i] * v[j] == u[j] * v[i] for i in range(len(u)) for j in range(len(u)))


def _coords_in(conee: Cone, w) -> tuple[Fraction, Fraction] | None:
    """Coefficients (a, b) with w = a g1 + b g2 over Q, or None when w is
    outside the span.  For rays b is reported as 0."""
    if conee.dim == 0:
        return (Fraction(0), Fraction(0)) if all(x == 0 for x in w) else None
    if conee.dim == 1:
        (g,) = conee.generators
        k = next(i for i, x in enumerate(g) if x)
        a = Fraction(w[k], g[k])
        if tuple(a * x for x in g) == tuple(Fraction(x) for x in w):
            return (a, Fraction(0))
        return None
    g1, g2 = conee.generators
    m = len(g1)
    for i in range(m):
        for j in range(i + 1, m):
            d = g1[i] * g2[j] - g1[j] * g2[i]
            if d:
                a = Fraction(w[i] * g2[j] - w[j] * g2[i], d)
                b = Fraction(g1[i] * w[j] - g1[j] * w[i], d)
                if all(a * x + b * y == w[k]
                       for k, (x, y) in enumerate(zip(g1, g2))):
                    return (a, b)
                return None
    raise AssertionError("degenerate 2-cone")


def cone_contains(conee: Cone, w) -> bool:
    coords = _coords_in(conee, w)
    return coords is not None and coords[0] >= 0 and coords[1] >= 0


def _sector_intersection(c1: Cone, c2: Cone) -> Cone:
    """Intersection of two 2-cones with a common span."""
    cands = [g for g in c1.generators if cone_contains(c2, g)]
    cands += [g for g in c2.generators if cone_contains(c1, g)]
    cands = sorted(set(cands))
    if not cands:
        return ZERO_CONE
    if len(cands) == 1 or all(_parallel(cands[0], g) for g in cands[1:]):
        return Cone((cands[0],))
    key = []
    for g in cands:
        a, b = _coords_in(c1, g)
        key.append((b / (a + b), g))
    key.sort()
    lo, hi = key[0][1], key[-1][1]
    if _parallel(lo, hi):
        return Cone((min(lo, hi),))
    return cone(lo, hi)


def intersect_cones(c1: Cone, c2: Cone) -> Cone:
    if c1.dim > c2.dim:
        c1, c2 = c2, c1
    if c1.dim == 0:
        return ZERO_CONE
    if c1.dim == 1:
        g = c1.generators[0]
        if c2.dim == 1:
            return c1 if c1 == c2 else ZERO_CONE
        return c1 if cone_contains(c2, g) else ZERO_CONE
    # two 2-cones: compare spans via the kernel of [g1 g2 -h1 -h2]
    g1, g2 = c1.generators
    h1, h2 = c2.generators
    cols = tuple(zip(g1, g2, tuple(-x for x in h1), tuple(-x for x in h2)))
    ker = kernel_basis(cols)
    if len(ker) == 0:
        return ZERO_CONE
    if len(ker) >= 2:
        return _sector_intersection(c1, c2)
    a1, a2, _, _ = ker[0]
    w = tuple(a1 * x + a2 * y for x, y in zip(g1, g2))
    if all(x == 0 for x in w):
        return ZERO_CONE
    w = primitive_vector(w)
    for cand in (w, tuple(-x for x in w)):
        if cone_contains(c1, cand) and cone_contains(c2, cand):
            return Cone((cand,))
    return ZERO_CONE


def is_face(f: Cone, c: Cone) -> bool:
    if f.dim == 0 or f == c:
        return True
    if c.dim == 2 and f.dim == 1:
        return f.generators[0] in c.generators
    return False


def check_fan(cones) -> list[str]:
    """Violations of the fan axiom: the faces of every cone belong to the
    collection, and every pairwise intersection is a common face."""
    out = []
    cones = list(dict.fromkeys(cones))
    present = set(cones)
    for c in cones:
        if c.dim == 2:
            for g in c.generators:
                if Cone((g,)) not in present:
                    out.append(f"facet ray of {c} missing from the fan")
    for i, c1 in enumerate(cones):
        for c2 in cones[i + 1:]:
            inter = intersect_cones(c1, c2)
            if not (is_face(inter, c1) and is_face(inter, c2)):
                out.append(f"{c1} and {c2} meet in {inter}, not a common face")
    return out


# ---------------------------------------------------------------------------
# the cone collection of a curve


def _ray_of_point(h) -> Ray:
    den = 1
    for x in h:
        den = lcm(den, Fraction(x).denominator)
    vec = tuple(int(x * den) for x in h) + (den,)
    return primitive_vector(vec)


def _ray_of_direction(d) -> Ray | None:
    vec = tuple(int(x) for x in d) + (0,)
    return primitive_vector(vec)


def fan_eta(p: ParamTropicalCurve) -> tuple[Ray, ...]:
    """Deduplicated primitive rays through the unbounded directions."""
    pc.require_balanced(p)
    rays = set()
    for v in p.curve.infinite_vertices:
        prim = primitive_vector(tuple(int(x) for x in p.hv(v)))
        if prim is not None:
            rays.add(prim)
    return tuple(sorted(rays))


def vertex_ray(p: ParamTropicalCurve, v: str) -> Ray:
    if v in p.curve.infinite_vertices:
        return _ray_of_direction(p.hv(v))
    return _ray_of_point(p.hv(v))


def edge_cone(p: ParamTropicalCurve, eid: str) -> Cone | None:
    """The 2-cone of an edge, or None when the slope is trivial."""
    e = p.curve.edge(eid)
    if pc.edge_geometry(p, eid).slope is None:
        return None
    r1 = vertex_ray(p, e.ends[0])
    r2 = vertex_ray(p, e.ends[1])
    return cone(r1, r2)


def build_K(p: ParamTropicalCurve) -> tuple[Cone, ...]:
    """The cone collection K: the zero cone, a ray per finite vertex, a ray
    per non-contracted infinite vertex, and a 2-cone per nonzero-slope edge."""
    pc.require_balanced(p)
    cones = {ZERO_CONE}
    for v in p.curve.finite_vertices:
        cones.add(Cone((_ray_of_point(p.hv(v)),)))
    for v in p.curve.infinite_vertices:
        r = _ray_of_direction(p.hv(v))
        if r is not None:
            cones.add(Cone((r,)))
    for e in p.curve.edges:
        c = edge_cone(p, e.id)
        if c is not None:
            cones.add(c)
    return tuple(sorted(cones, key=lambda c: (c.dim, c.generators)))


def refine_to_fan(cones) -> tuple[Cone, ...]:
    """The unique fan whose rays are the pairwise 1-dimensional
    intersections and whose support is the union of the input cones."""
    cones = list(dict.fromkeys(cones))
    rays = {c.generators[0] for c in cones if c.dim == 1}
    two = [c for c in cones if c.dim == 2]
    for c in two:
        rays.update(c.generators)
    for i, c1 in enumerate(two):
        for c2 in two[i + 1:]:
            inter = intersect_cones(c1, c2)
            if inter.dim == 1:
                rays.add(inter.generators[0])
            elif inter.dim == 2:
                rays.update(inter.generators)
    out = {ZERO_CONE}
    out.update(Cone((r,)) for r in rays)
    for c in two:
        interior = []
        for r in rays:
            coords = _coords_in(c, r)
            if coords is not None and coords[0] > 0 and coords[1] > 0:
                interior.append((coords[1] / (coords[0] + coords[1]), r))
        interior.sort()
        chain = [c.generators[0]] + [r for _, r in interior] + [c.generators[1]]
        for a, b in zip(chain, chain[1:]):
            out.add(cone(a, b))
    return tuple(sorted(out, key=lambda c: (c.dim, c.generators)))


def gamma_tr(p: ParamTropicalCurve) -> ParamTropicalCurve:
    """Subdivide every nonzero-slope edge at the interior crossing rays of
    the refined fan, so that the curve's own cone collection becomes that
    fan.  Idempotent."""
    fan = refine_to_fan(build_K(p))
    fan_set = set(fan)
    rays = [c.generators[0] for c in fan if c.dim == 1]
    n = p.lattice_rank
    positions = {}
    for e in p.curve.edges:
        c = edge_cone(p, e.id)
        if c is None or c in fan_set:
            continue
        pts = []
        for r in rays:
            coords = _coords_in(c, r)
            if coords is not None and coords[0] > 0 and coords[1] > 0:
                assert r[n] > 0, "interior ray of an edge cone has height 0"
                pts.append(tuple(Fraction(x, r[n]) for x in r[:n]))
        if pts:
            positions[e.id] = pts
    if not positions:
        return p
    return pc.subdivide_at_positions(p, positions)


# ---------------------------------------------------------------------------
# the fan model with curve indexing


@dataclass
class FanModel:
    ambient_rank: int                       # n + 1
    cones: tuple[Cone, ...]
    eta_rays: tuple[Ray, ...]               # rays with last coordinate 0
    ray_vertices: dict[Ray, tuple[str, ...]]
    cone_edges: dict[Cone, tuple[str, ...]]

    def rays(self) -> tuple[Ray, ...]:
        return tuple(c.generators[0] for c in self.cones if c.dim == 1)

    def non_eta_rays(self) -> tuple[Ray, ...]:
        eta = set(self.eta_rays)
        return tuple(r for r in self.rays() if r not in eta)

    def two_cones(self) -> tuple[Cone, ...]:
        return tuple(c for c in self.cones if c.dim == 2)


def fan_model(p_tr: ParamTropicalCurve) -> FanModel:
    """Index the fan of a refined curve (a gamma_tr output) by its vertices
    and edges."""
    cones = build_K(p_tr)
    bad = check_fan(cones)
    assert not bad, "curve cones do not form a fan; apply gamma_tr first"
    ray_vertices: dict[Ray, list] = {}
    for v in p_tr.curve.finite_vertices:
        ray_vertices.setdefault(vertex_ray(p_tr, v), []).append(v)
    eta = set()
    for v in p_tr.curve.infinite_vertices:
        r = _ray_of_direction(p_tr.hv(v))
        if r is not None:
            eta.add(r)
            ray_vertices.setdefault(r, []).append(v)
    cone_edges: dict[Cone, list] = {}
    for e in p_tr.curve.edges:
        c = edge_cone(p_tr, e.id)
        if c is not None:
            cone_edges.setdefault(c, []).append(e.id)
    return FanModel(
        p_tr.lattice_rank + 1, cones, tuple(sorted(eta)),
        {r: tuple(vs) for r, vs in ray_vertices.items()},
        {c: tuple(es) for c, es in cone_edges.items()},
    )


def cone_multiplicities(fm: FanModel, p_tr: ParamTropicalCurve):
    """l(sigma) = lcm of the edge multiplicities over a 2-cone, and
    l(rho) = lcm of the vertex multiplicities over an eta-ray."""
    l_sigma = {}
    for c, eids in fm.cone_edges.items():
        l_sigma[c] = lcm(*(pc.edge_geometry(p_tr, eid).multiplicity
                           for eid in eids))
    l_rho = {}
    for r in fm.eta_rays:
        mults = []
        for v in fm.ray_vertices.get(r, ()):
            if v in p_tr.curve.infinite_vertices:
                mults.append(integral_length(pc.as_int_vec(p_tr.hv(v))))
        l_rho[r] = lcm(*mults) if mults else 1
    return l_sigma, l_rho


def ramification(p_tr: ParamTropicalCurve, a: int):
    """Is the degenerate fiber reduced at ramification a, and the least a
    that works: a h(v) integral for the finite vertices and a |e| integral
    for the bounded edges."""
    if a < 1:
        raise ValueError("ramification index must be positive")
    dens = [1]
    for v in p_tr.curve.finite_vertices:
        dens.extend(x.denominator for x in p_tr.hv(v))
    for e in p_tr.curve.bounded_edges():
        dens.append(e.length.denominator)
    minimal = lcm(*dens)
    return {"reduced": a % minimal == 0, "minimal_a": minimal}


def component_adjacency(fm: FanModel):
    """Nodes are the non-eta rays (components of the degenerate fiber); one
    edge per 2-cone whose two facets are both non-eta."""
    eta = set(fm.eta_rays)
    nodes = fm.non_eta_rays()
    edges = []
    for c in fm.two_cones():
        r1, r2 = c.generators
        if r1 not in eta and r2 not in eta:
            edges.append((r1, r2, c))
    return nodes, tuple(edges)


def _height_one_point(r: Ray):
    n = len(r) - 1
    if r[n] <= 0:
        raise ValueError("not a positive-height ray")
    return tuple(Fraction(x, r[n]) for x in r[:n])


def star_fan(fm: FanModel, ray: Ray) -> tuple[Ray, ...]:
    """Rays of the star of a non-eta ray: the directions of the adjacent
    eta rays, and n_rho' - n_rho for adjacent non-eta rays."""
    eta = set(fm.eta_rays)
    if ray in eta or ray not in fm.rays():
        raise RayNotInFan(str(ray))
    base = _height_one_point(ray)
    out = set()
    for c in fm.two_cones():
        if ray not in c.generators:
            continue
        other = c.generators[0] if c.generators[1] == ray else c.generators[1]
        if other in eta:
            out.add(other[:-1])
        else:
            diff = pc.vsub(_height_one_point(other), base)
            den = 1
            for x in diff:
                den = lcm(den, x.denominator)
            out.add(primitive_vector(tuple(int(x * den) for x in diff)))
    return tuple(sorted(out))


def star_vertex(p_tr: ParamTropicalCurve, v: str) -> tuple[Ray, ...]:
    """The per-vertex subfan: primitive directions toward the neighbours
    (contracted ends dropped)."""
    out = set()
    inf_set = set(p_tr.curve.infinite_vertices)
    for e in p_tr.curve.edges:
        for a, b in (e.ends, e.ends[::-1]):
            if a != v:
                continue
            if b in inf_set:
                d = primitive_vector(tuple(int(x) for x in p_tr.hv(b)))
            else:
                diff = pc.vsub(p_tr.hv(b), p_tr.hv(a))
                den = 1
                for x in diff:
                    den = lcm(den, x.denominator)
                d = primitive_vector(tuple(int(x * den) for x in diff))
            if d is not None:
                out.add(d)
    return tuple(sorted(out))


def reduction_exponents(p_tr: ParamTropicalCurve, v: str):
    """Exponent data of the component map at a finite vertex: one integer
    vector per incident edge end (the character exponents of the restriction
    to the component).  The entries sum to zero by balancing."""
    pc.require_balanced(p_tr)
    inf_set = set(p_tr.curve.infinite_vertices)
    out = []
    for e in sorted(p_tr.curve.edges, key=lambda e: e.id):
        for a, b in (e.ends, e.ends[::-1]):
            if a != v:
                continue
            if e.is_bounded:
                vec = pc.vscale(Fraction(1) / e.length, pc.vsub(p_tr.hv(b), p_tr.hv(a)))
            elif b in inf_set:
                vec = p_tr.hv(b)
            else:
                continue
            ivec = pc.as_int_vec(vec)
            assert ivec is not None
            out.append((e.id, ivec))
    return out


def fan_to_json(fm: FanModel, mults=None) -> dict:
    rays = list(fm.rays())
    ray_index = {r: i for i, r in enumerate(rays)}
    eta = set(fm.eta_rays)

    def ckey(c):
        i, j = sorted((ray_index[c.generators[0]], ray_index[c.generators[1]]))
        return f"{i}-{j}"

    data = {
        "rays": [list(r) for r in rays],
        "eta": [r in eta for r in rays],
        "cones": sorted(sorted((ray_index[c.generators[0]],
                                ray_index[c.generators[1]]))
                        for c in fm.two_cones()),
        "ray_vertices": {str(ray_index[r]): sorted(vs)
                         for r, vs in sorted(fm.ray_vertices.items())},
        "cone_edges": {ckey(c): sorted(es)
                       for c, es in sorted(fm.cone_edges.items(),
                                           key=lambda kv: kv[0].generators)},
    }
    if mults is not None:
        l_sigma, l_rho = mults
        data["cone_multiplicities"] = {
            ckey(c): m
            for c, m in sorted(l_sigma.items(), key=lambda kv: kv[0].generators)}
        data["ray_multiplicities"] = {
            str(ray_index[r]): m for r, m in sorted(l_rho.items())}
    return data

"""Toric stacky data on the fan of a refined curve.

Per cone of the fan a full-rank sublattice of the cone's lattice is chosen:
trivial on component rays, index l(rho) on the eta rays, and on 2-cones
either the sum of the facet lattices or, between two component rays, the
lattice spanned by (a n_rho1, a) and (l(sigma) n, 0).  The ambient lattice
is N + aZ; internally the last coordinate counts multiples of a, so all
vectors stay integral once the configuration is reduced.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fanmodel as fan
from . import paramcurve as pc
from .errors import NotReduced
from .exactla import (
    Sublattice,
    integral_length,
    lattice_index,
    lattice_intersect_span,
    lattice_sum,
    primitive_vector,
    saturation,
)
from .fanmodel import Cone, FanModel
from .paramcurve import ParamTropicalCurve


def _scaled_gen(g, a: int):
    """Primitive generator of the same real ray in the basis of N + aZ
    where the last coordinate counts multiples of a."""
    return primitive_vector(tuple(a * x for x in g[:-1]) + (g[-1],))


def _scaled_cone(c: Cone, a: int) -> Cone:
    if c.dim == 0:
        return c
    return Cone(tuple(sorted(_scaled_gen(g, a) for g in c.generators)))


@dataclass
class StackySigma:
    fan: FanModel
    a: int
    assignment: dict[Cone, Sublattice]       # cones in scaled coordinates
    stabilizer_order: dict[Cone, int]
    scaled_of: dict[Cone, Cone]              # original fan cone -> scaled cone

    def orders(self):
        return sorted(self.stabilizer_order.values())


def _cone_lattice(c: Cone, rank: int) -> Sublattice:
    """N_sigma: all lattice points of the cone's span."""
    if c.dim == 0:
        return Sublattice(rank, ())
    return saturation(Sublattice(rank, c.generators))


def stacky_data(p_tr: ParamTropicalCurve, a: int) -> StackySigma:
    """Assign the stacky sublattices on the fan of a reduced configuration
    and compute the stabilizer orders as lattice indices.

    Raises NotReduced when a h(v) or a |e| fails to be integral, or when the
    defensive divisibility check l(sigma) | len(a(n2 - n1)) fails.
    """
    ram = fan.ramification(p_tr, a)
    if not ram["reduced"]:
        raise NotReduced(f"minimal ramification is {ram['minimal_a']}")
    fm = fan.fan_model(p_tr)
    l_sigma, l_rho = fan.cone_multiplicities(fm, p_tr)
    n1 = fm.ambient_rank  # n + 1
    eta = set(fm.eta_rays)

    assignment: dict[Cone, Sublattice] = {}
    orders: dict[Cone, int] = {}
    scaled_of: dict[Cone, Cone] = {}

    ray_primes: dict[tuple, Sublattice] = {}
    for c in fm.cones:
        sc = _scaled_cone(c, a)
        scaled_of[c] = sc
        if c.dim == 0:
            assignment[c] = Sublattice(n1, ())
            orders[c] = 1
            continue
        if c.dim == 1:
            g = c.generators[0]
            sg = sc.generators[0]
            if g in eta:
                lat = Sublattice(n1, (tuple(l_rho[g] * x for x in sg),))
            else:
                lat = Sublattice(n1, (sg,))
            ray_primes[g] = lat
            assignment[c] = lat
            orders[c] = lattice_index(_cone_lattice(sc, n1), lat)
            continue
        g1, g2 = c.generators
        if g1 in eta or g2 in eta:
            lat = lattice_sum(ray_primes[g1], ray_primes[g2])
        else:
            m = l_sigma[c]
            p1 = fan._height_one_point(g1)
            p2 = fan._height_one_point(g2)
            an1 = tuple(a * x for x in p1)
            diff = tuple(a * (y - x) for x, y in zip(p1, p2))
            if any(x.denominator != 1 for x in an1 + diff):
                raise NotReduced("non-integral vertex at this ramification")
            diff = tuple(int(x) for x in diff)
            if integral_length(diff) % m:
                raise NotReduced(
                    f"integral length {integral_length(diff)} of the cone "
                    f"displacement is not divisible by l(sigma) = {m}")
            gen1 = tuple(int(x) for x in an1) + (1,)
            gen2 = tuple(m * x for x in primitive_vector(diff)) + (0,)
            lat = Sublattice(n1, (gen1, gen2))
        assignment[c] = lat
        orders[c] = lattice_index(_cone_lattice(sc, n1), lat)

    st = StackySigma(fm, a, assignment, orders, scaled_of)
    _verify_compatibility(st)
    return st


def _verify_compatibility(st: StackySigma):
    """The defining compatibility: restricted to the span of any pairwise
    intersection, the sublattices of the two cones agree; in particular the
    restriction to a facet ray recovers that ray's sublattice."""
    cones = list(st.fan.cones)
    for i, c1 in enumerate(cones):
        for c2 in cones[i:]:
            inter = fan.intersect_cones(st.scaled_of[c1], st.scaled_of[c2])
            span = Sublattice(st.fan.ambient_rank, inter.generators)
            left = lattice_intersect_span(st.assignment[c1], span)
            right = lattice_intersect_span(st.assignment[c2], span)
            if left != right:
                raise AssertionError(
                    f"stacky data incompatible on {c1} vs {c2}")


def is_dm(p: ParamTropicalCurve, char_p: int) -> bool:
    """Deligne-Mumford criterion: the residue characteristic divides no
    multiplicity l(e) over the stabilization's nonzero-slope edges."""
    if char_p == 0:
        return True
    p_st = pc.stabilize_param(p)
    for e in p_st.curve.edges:
        mult = pc.edge_geometry(p_st, e.id).multiplicity
        if mult and mult % char_p == 0:
            return False
    return True


@dataclass
class NodeStackData:
    node_orders: dict[str, int]     # bounded edge -> l(sigma_e) / l(e)
    marked_orders: dict[str, int]   # infinite vertex -> l(rho) / l(v)


def node_stack(p_tr: ParamTropicalCurve) -> NodeStackData:
    """Orders of the stabilizers at the nodes and marked points of the
    reduction; ratio 1 means the stacky structure there is trivial."""
    fm = fan.fan_model(p_tr)
    l_sigma, l_rho = fan.cone_multiplicities(fm, p_tr)
    node_orders = {}
    for c, eids in fm.cone_edges.items():
        for eid in eids:
            e = p_tr.curve.edge(eid)
            if e.is_bounded:
                mult = pc.edge_geometry(p_tr, eid).multiplicity
                assert l_sigma[c] % mult == 0
                node_orders[eid] = l_sigma[c] // mult
    marked_orders = {}
    for v in p_tr.curve.infinite_vertices:
        direction = pc.as_int_vec(p_tr.hv(v))
        mult = integral_length(direction)
        if mult == 0:
            continue
        r = primitive_vector(direction) + (0,)
        assert l_rho[r] % mult == 0
        marked_orders[v] = l_rho[r] // mult
    return NodeStackData(node_orders, marked_orders)


def stacky_to_json(st: StackySigma) -> dict:
    rays = list(st.fan.rays())
    ray_index = {r: i for i, r in enumerate(rays)}

    def ckey(c: Cone) -> str:
        if c.dim == 0:
            return "0"
        idx = sorted(ray_index[g] for g in c.generators)
        return "-".join(str(i) for i in idx) if c.dim == 2 else f"r{idx[0]}"

    return {
        "a": st.a,
        "rays": [list(r) for r in rays],
        "assignment": {ckey(c): [list(row) for row in lat.basis]
                       for c, lat in sorted(st.assignment.items(),
                                            key=lambda kv: (kv[0].dim, kv[0].generators))},
        "stabilizer_orders": {ckey(c): o
                              for c, o in sorted(st.stabilizer_order.items(),
                                                 key=lambda kv: (kv[0].dim, kv[0].generators))},
    }

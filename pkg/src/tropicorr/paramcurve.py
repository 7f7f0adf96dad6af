"""Parameterized tropical curves: a vertex map h into N_Q with integral
slopes and the balancing condition.

h is stored at vertices only; on edges the map is the implicit straight
interpolation.  For a finite vertex h(v) is a point of N_Q, for an infinite
vertex it is the outgoing direction vector of its unbounded edge (the zero
vector marks a contracted end, i.e. a marked point).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import tropgraph
from .errors import (
    ConstraintCountMismatch,
    GenusNotOne,
    NonCollinear,
    NotASubdivision,
    NotBalanced,
)
from .exactla import (
    Sublattice,
    integral_length,
    is_saturated,
    lattice_intersect,
    primitive_vector,
)
from .tropgraph import (
    AttachTree,
    SubdivideBounded,
    SubdivideUnbounded,
    TropicalCurve,
)

QVec = tuple[Fraction, ...]


def qvec(xs) -> QVec:
    return tuple(Fraction(x) for x in xs)


def vadd(a, b) -> QVec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b) -> QVec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a) -> QVec:
    c = Fraction(c)
    return tuple(c * x for x in a)


def is_zero(a) -> bool:
    return all(x == 0 for x in a)


def as_int_vec(a):
    """The vector as a tuple of ints, or None if some entry is not integral."""
    if any(x.denominator != 1 for x in a):
        return None
    return tuple(int(x) for x in a)


@dataclass(frozen=True)
class ParamTropicalCurve:
    curve: TropicalCurve
    lattice_rank: int
    h: dict[str, QVec]

    def hv(self, v: str) -> QVec:
        return self.h[v]

    def zero(self) -> QVec:
        return (Fraction(0),) * self.lattice_rank


def param_curve(c: TropicalCurve, lattice_rank: int, h) -> ParamTropicalCurve:
    hh = {str(v): qvec(vec) for v, vec in h.items()}
    return ParamTropicalCurve(c, lattice_rank, hh)


def _orient(e: tropgraph.Edge) -> tuple[str, str]:
    """Default orientation of a bounded edge: from the lexicographically
    smaller vertex id to the larger one."""
    u, w = e.ends
    return (u, w) if u <= w else (w, u)


def edge_direction(p: ParamTropicalCurve, e: tropgraph.Edge) -> QVec:
    """Integral direction vector of an edge: (h(target)-h(init))/|e| along
    the default orientation for bounded e, and h(v_infinity) for unbounded."""
    if e.is_bounded:
        u, w = _orient(e)
        return vscale(Fraction(1, 1) / e.length, vsub(p.hv(w), p.hv(u)))
    inf_set = set(p.curve.infinite_vertices)
    far = e.ends[0] if e.ends[0] in inf_set else e.ends[1]
    return p.hv(far)


def param_violations(p: ParamTropicalCurve) -> list[str]:
    """Structural violations plus integrality and balancing defects."""
    out = list(tropgraph.validate(p.curve))
    n = p.lattice_rank
    for v in p.curve.vertex_ids():
        if v not in p.h:
            out.append(f"missing h({v})")
        elif len(p.h[v]) != n:
            out.append(f"h({v}) has wrong length")
    if out:
        return out
    for v in p.curve.infinite_vertices:
        if as_int_vec(p.hv(v)) is None:
            out.append(f"h({v}) must be integral for an infinite vertex")
    for e in p.curve.bounded_edges():
        if as_int_vec(edge_direction(p, e)) is None:
            out.append(f"edge {e.id}: (h(v)-h(v'))/|e| is not integral")
    for v, defect in balancing_defects(p).items():
        out.append(f"balancing fails at {v}: defect {tuple(map(str, defect))}")
    return out


def balancing_defects(p: ParamTropicalCurve) -> dict[str, QVec]:
    """Nonzero balancing sums per finite vertex."""
    inf_set = set(p.curve.infinite_vertices)
    out = {}
    for v in p.curve.finite_vertices:
        total = p.zero()
        for e in p.curve.edges:
            for a, b in (e.ends, e.ends[::-1]):
                if a != v:
                    continue
                if e.is_bounded:
                    total = vadd(total, vscale(Fraction(1) / e.length,
                                               vsub(p.hv(b), p.hv(a))))
                elif b in inf_set:
                    total = vadd(total, p.hv(b))
        if not is_zero(total):
            out[v] = total
    return out


def is_balanced(p: ParamTropicalCurve) -> bool:
    return not param_violations(p)


def require_balanced(p: ParamTropicalCurve):
    bad = param_violations(p)
    if bad:
        raise NotBalanced("; ".join(bad))


@dataclass(frozen=True)
class EdgeGeometry:
    slope: tuple[int, ...] | None  # primitive direction, None for zero slope
    multiplicity: int              # l(e); 0 exactly when the slope is zero
    oriented: bool                 # True when the generator is distinguished


def edge_geometry(p: ParamTropicalCurve, eid: str) -> EdgeGeometry:
    e = p.curve.edge(eid)
    d = as_int_vec(edge_direction(p, e))
    if d is None:
        raise NotBalanced(f"edge {eid} has non-integral direction")
    prim = primitive_vector(d)
    return EdgeGeometry(prim, integral_length(d), oriented=not e.is_bounded)


def slope_lattice(p: ParamTropicalCurve, eid: str) -> Sublattice:
    geo = edge_geometry(p, eid)
    basis = () if geo.slope is None else (geo.slope,)
    return Sublattice(p.lattice_rank, basis)


def zero_slope_bounded_count(p: ParamTropicalCurve) -> int:
    """c(Gamma): bounded edges contracted by h."""
    return sum(1 for e in p.curve.bounded_edges()
               if edge_geometry(p, e.id).slope is None)


def degree(p: ParamTropicalCurve) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Distinct primitive unbounded directions with summed multiplicities;
    contracted ends are excluded.  The pairs sum to zero by balancing."""
    acc: dict[tuple[int, ...], int] = {}
    for e in p.curve.unbounded_edges():
        geo = edge_geometry(p, e.id)
        if geo.slope is None:
            continue
        acc[geo.slope] = acc.get(geo.slope, 0) + geo.multiplicity
    return tuple(sorted(acc.items()))


# ---------------------------------------------------------------------------
# transport of the parameterization along modifications


def extend_parameterization(p: ParamTropicalCurve, steps) -> ParamTropicalCurve:
    """Apply modification steps, interpolating h on subdivision vertices,
    copying h(root) onto attached tree vertices, and setting h = 0 on new
    infinite leaves.  The output is balanced whenever the input is."""
    cur = p.curve
    h = dict(p.h)
    inf_set = set(cur.infinite_vertices)
    for step in steps:
        if isinstance(step, SubdivideBounded):
            e = cur.edge(step.edge)
            ids = tropgraph._subdivision_ids(step, len(step.distances))
            u, w = e.ends
            for vid, dist in zip(ids, step.distances):
                lam = Fraction(dist) / e.length
                h[vid] = vadd(h[u], vscale(lam, vsub(h[w], h[u])))
        elif isinstance(step, SubdivideUnbounded):
            e = cur.edge(step.edge)
            ids = tropgraph._subdivision_ids(step, len(step.distances))
            start = e.ends[0] if e.ends[1] in inf_set else e.ends[1]
            far = e.ends[0] if e.ends[0] in inf_set else e.ends[1]
            for vid, dist in zip(ids, step.distances):
                h[vid] = vadd(h[start], vscale(dist, h[far]))
        elif isinstance(step, AttachTree):
            for v in step.tree.finite_vertices:
                if v != step.tree_root:
                    h[v] = h[step.root]
            for v in step.tree.infinite_vertices:
                h[v] = (Fraction(0),) * p.lattice_rank
        cur = tropgraph.modify(cur, [step])
        inf_set = set(cur.infinite_vertices)
    return ParamTropicalCurve(cur, p.lattice_rank, {v: h[v] for v in cur.vertex_ids()})


def subdivide_at_positions(p: ParamTropicalCurve, positions) -> ParamTropicalCurve:
    """Subdivide edges at prescribed points of N_Q.

    positions maps an edge id to points that must lie on the open segment
    (bounded) or open ray (unbounded) carved out by h; the unique compatible
    edge lengths are reconstructed from the fractions along the edge.
    """
    steps = []
    for eid in sorted(positions):
        e = p.curve.edge(eid)
        pts = [qvec(pt) for pt in positions[eid]]
        if not pts:
            continue
        if e.is_bounded:
            u, w = e.ends
            base, span = p.hv(u), vsub(p.hv(w), p.hv(u))
        else:
            inf_set = set(p.curve.infinite_vertices)
            start = e.ends[0] if e.ends[1] in inf_set else e.ends[1]
            base, span = p.hv(start), p.hv(e.ends[0] if e.ends[0] in inf_set else e.ends[1])
        if is_zero(span):
            raise NonCollinear(f"edge {eid} has trivial slope")
        lams = []
        for pt in pts:
            diff = vsub(pt, base)
            k = next(i for i, x in enumerate(span) if x != 0)
            lam = diff[k] / span[k]
            if vscale(lam, span) != diff:
                raise NonCollinear(f"point {tuple(map(str, pt))} is off edge {eid}")
            lams.append(lam)
        lams = sorted(set(lams))
        if e.is_bounded:
            if lams[0] <= 0 or lams[-1] >= 1:
                raise NonCollinear(f"point outside the open segment of {eid}")
            steps.append(SubdivideBounded(eid, tuple(l * e.length for l in lams)))
        else:
            if lams[0] <= 0:
                raise NonCollinear(f"point outside the open ray of {eid}")
            steps.append(SubdivideUnbounded(eid, tuple(lams)))
    return extend_parameterization(p, steps)


def contract_zero_slope(p: ParamTropicalCurve):
    """Contract the maximal subgraph of bounded zero-slope edges.

    Returns (contracted curve, vertex surjection).  Vertices joined by
    zero-slope edges share their h value, so h descends.
    """
    parent = {v: v for v in p.curve.finite_vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    contracted = set()
    for e in p.curve.bounded_edges():
        if edge_geometry(p, e.id).slope is None:
            contracted.add(e.id)
            a, b = find(e.ends[0]), find(e.ends[1])
            if a != b:
                parent[max(a, b)] = min(a, b)
    vmap = {v: find(v) for v in p.curve.finite_vertices}
    vmap.update({v: v for v in p.curve.infinite_vertices})
    finite = tuple(sorted(set(vmap[v] for v in p.curve.finite_vertices),
                          key=p.curve.finite_vertices.index))
    edges = tuple(
        tropgraph.Edge(e.id, (vmap[e.ends[0]], vmap[e.ends[1]]), e.length)
        for e in p.curve.edges if e.id not in contracted
    )
    cbar = TropicalCurve(finite, p.curve.infinite_vertices, edges)
    h = {v: p.hv(v) for v in cbar.vertex_ids()}
    return ParamTropicalCurve(cbar, p.lattice_rank, h), vmap


def stabilize_param(p: ParamTropicalCurve) -> ParamTropicalCurve:
    """Stabilization with the parameterization restricted to the surviving
    vertices (pruned trees are contracted by h, smoothing respects slopes)."""
    st = tropgraph.stabilize(p.curve)
    return ParamTropicalCurve(st, p.lattice_rank,
                              {v: p.hv(v) for v in st.vertex_ids()})


def reorder_infinite(p: ParamTropicalCurve, order) -> ParamTropicalCurve:
    order = tuple(order)
    if sorted(order) != sorted(p.curve.infinite_vertices):
        raise ValueError("order must permute the infinite vertices")
    c = TropicalCurve(p.curve.finite_vertices, order, p.curve.edges)
    return ParamTropicalCurve(c, p.lattice_rank, dict(p.h))


# ---------------------------------------------------------------------------
# the deformation rank


def overvalency(c: TropicalCurve) -> int:
    return sum(tropgraph.valency(c, v) - 3 for v in c.finite_vertices)


def rank(p: ParamTropicalCurve) -> int:
    """Dimension of the universal deformation: c(Gamma) + rank E^1(Gamma).

    The closed formula (rank N - 3) chi + |E_inf| - ov + rank E^2 is asserted
    as a cross-check, never used as the definition.
    """
    from . import complexes

    require_balanced(p)
    rep = complexes.compute(p, complexes.ComplexSpec(variant="b"))
    r = zero_slope_bounded_count(p) + rep.E1_rank
    chi = 1 - tropgraph.genus(p.curve)
    formula = ((p.lattice_rank - 3) * chi + len(p.curve.unbounded_edges())
               - overvalency(p.curve) + rep.E2.rank)
    assert r == formula, (r, formula)
    return r


# ---------------------------------------------------------------------------
# affine constraints


@dataclass(frozen=True)
class AffineConstraint:
    space: Sublattice      # saturated, corank >= 2
    point: QVec            # a_i in N_Q; the constraint is point + space_Q

    def __post_init__(self):
        object.__setattr__(self, "point", qvec(self.point))
        if self.space.corank < 2:
            raise ValueError("constraint sublattice must have corank >= 2")
        if not is_saturated(self.space):
            raise ValueError("constraint sublattice must be saturated")


@dataclass(frozen=True)
class AffineConstraintSet:
    items: tuple[AffineConstraint, ...]

    def __len__(self):
        return len(self.items)

    @property
    def codim(self) -> int:
        return sum(c.space.corank for c in self.items)


def constraint_set(items, ambient_rank: int) -> AffineConstraintSet:
    """items: iterable of (basis rows, point)."""
    return AffineConstraintSet(tuple(
        AffineConstraint(Sublattice(ambient_rank, tuple(map(tuple, basis))), qvec(pt))
        for basis, pt in items
    ))


@dataclass(frozen=True)
class ConstraintReport:
    satisfies: bool
    simple: bool
    codim: int
    problems: tuple[str, ...]


def marked_pairs(p: ParamTropicalCurve, k: int):
    """(infinite vertex, its finite neighbour) for the first k infinite
    vertices, which is where constraints bind."""
    if k > len(p.curve.infinite_vertices):
        raise ConstraintCountMismatch(
            f"{k} constraints but only {len(p.curve.infinite_vertices)} infinite vertices")
    out = []
    for v in p.curve.infinite_vertices[:k]:
        e = next(e for e in p.curve.edges if v in e.ends)
        out.append((v, e.ends[0] if e.ends[1] == v else e.ends[1]))
    return out


def check_constraint(p: ParamTropicalCurve, a: AffineConstraintSet) -> ConstraintReport:
    """Does the curve satisfy / simply satisfy the constraint?

    Satisfaction: the i-th infinite vertex is contracted (h = 0) and its
    finite neighbour lies on the affine translate.  Simplicity additionally
    needs the neighbour trivalent with every bounded edge there of nonzero
    slope meeting the constraint space trivially.
    """
    require_balanced(p)
    problems = []
    simple = True
    for i, ((vinf, vfin), con) in enumerate(zip(marked_pairs(p, len(a)), a.items)):
        if con.space.ambient_rank != p.lattice_rank:
            raise ValueError("constraint ambient rank mismatch")
        if not is_zero(p.hv(vinf)):
            problems.append(f"constraint {i}: h({vinf}) != 0")
        if not con.space.spans(vsub(p.hv(vfin), con.point)):
            problems.append(f"constraint {i}: h({vfin}) not on the translate")
        if tropgraph.valency(p.curve, vfin) != 3:
            simple = False
        for e in p.curve.bounded_edges():
            if vfin not in e.ends:
                continue
            lat = slope_lattice(p, e.id)
            if lat.rank == 0 or lattice_intersect(lat, con.space).rank != 0:
                simple = False
    satisfied = not problems
    return ConstraintReport(satisfied, satisfied and simple, a.codim, tuple(problems))


# ---------------------------------------------------------------------------
# genus one: the cycle and the tropical j-invariant


def find_cycle(p: ParamTropicalCurve):
    """The unique cycle of a genus-one curve as an ordered list of
    (edge, +1/-1): +1 when the cycle traverses the edge along its default
    orientation."""
    c = p.curve
    if tropgraph.genus(c) != 1:
        raise GenusNotOne(f"genus is {tropgraph.genus(c)}")
    parent = {v: v for v in c.vertex_ids()}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = []
    closer = None
    for e in c.edges:
        a, b = find(e.ends[0]), find(e.ends[1])
        if a == b:
            closer = e
        else:
            parent[a] = b
            tree.append(e)
    assert closer is not None
    if closer.ends[0] == closer.ends[1]:
        return [(closer, 1)]
    # path from closer.ends[1] back to closer.ends[0] through the forest
    adj: dict[str, list] = {}
    for e in tree:
        adj.setdefault(e.ends[0], []).append((e, e.ends[1]))
        adj.setdefault(e.ends[1], []).append((e, e.ends[0]))
    start, goal = closer.ends[1], closer.ends[0]
    prev = {start: None}
    stack = [start]
    while stack:
        v = stack.pop()
        if v == goal:
            break
        for e, w in adj.get(v, ()):
            if w not in prev:
                prev[w] = (e, v)
                stack.append(w)
    path = []
    v = goal
    while prev[v] is not None:
        e, u = prev[v]
        path.append((e, 1 if _orient(e) == (u, v) else -1))
        v = u
    path.reverse()
    cycle = [(closer, 1 if _orient(closer) == closer.ends else -1)]
    cycle.extend(path)
    return cycle


def tropical_j(p: ParamTropicalCurve) -> Fraction:
    """Total length of the unique cycle of a genus-one curve."""
    cycle = find_cycle(p)
    total = Fraction(0)
    for e, _ in cycle:
        if not e.is_bounded:
            raise GenusNotOne("cycle through an unbounded edge")
        total += e.length
    return total


# ---------------------------------------------------------------------------
# recognizing subdivisions (used by the transport checks)


def subdivision_new_vertices(p_sub: ParamTropicalCurve, p: ParamTropicalCurve):
    """Verify p_sub is a subdivision of p (matching vertex ids and h) and
    return the new 2-valent vertices with the subdivided edge of p each one
    lies on.  Raises NotASubdivision otherwise."""
    old_vs = set(p.curve.vertex_ids())
    if not old_vs <= set(p_sub.curve.vertex_ids()):
        raise NotASubdivision("original vertices missing")
    if p_sub.curve.infinite_vertices != p.curve.infinite_vertices:
        raise NotASubdivision("infinite vertices must be preserved with order")
    for v in old_vs:
        if p.hv(v) != p_sub.hv(v):
            raise NotASubdivision(f"h({v}) changed")
    new_vs = [v for v in p_sub.curve.finite_vertices if v not in old_vs]
    for v in new_vs:
        if tropgraph.valency(p_sub.curve, v) != 2:
            raise NotASubdivision(f"new vertex {v} is not 2-valent")
    # walk chains between old vertices
    incident: dict[str, list] = {}
    for e in p_sub.curve.edges:
        incident.setdefault(e.ends[0], []).append(e)
        incident.setdefault(e.ends[1], []).append(e)
    assignment: dict[str, str] = {}
    chains = []
    seen_edges = set()
    for start in sorted(old_vs):
        for e0 in incident.get(start, ()):
            if e0.id in seen_edges:
                continue
            chain = [e0]
            v = e0.ends[1] if e0.ends[0] == start else e0.ends[0]
            while v not in old_vs:
                nxt = next(e for e in incident[v] if e.id != chain[-1].id)
                chain.append(nxt)
                v = nxt.ends[1] if nxt.ends[0] == v else nxt.ends[0]
            seen_edges.update(e.id for e in chain)
            chains.append((start, v, chain))
    unmatched = {e.id: e for e in p.curve.edges}
    for start, end, chain in chains:
        total = None
        if all(e.is_bounded for e in chain):
            total = sum(e.length for e in chain)
        cand = None
        for eid, e in unmatched.items():
            if {start, end} != set(e.ends) and not (start == end and e.ends == (start, start)):
                continue
            if (e.length is None) != (total is None):
                continue
            if total is not None and e.length != total:
                continue
            cand = eid
            break
        if cand is None:
            raise NotASubdivision(f"chain {start}..{end} matches no original edge")
        for e in chain:
            for w in e.ends:
                if w not in old_vs:
                    assignment[w] = cand
        del unmatched[cand]
    if unmatched:
        raise NotASubdivision(f"original edges unaccounted for: {sorted(unmatched)}")
    return [(v, assignment[v]) for v in new_vs]

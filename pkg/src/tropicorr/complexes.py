"""The obstruction complexes of a parameterized tropical curve.

Both complexes share the domain (sum over finite vertices of N) + (sum over
bounded edges with nonzero slope of the rank-one slope lattice) and map to
(sum over bounded edges of N):

  * plain variant: a vertex coordinate x_v goes to eps(e, v) x_v on the rows
    of each bounded edge e, an edge coordinate x_e goes to n_e;
  * stacky variant: the edge coordinate goes to l(e) n_e instead.

E^1/E^2 (resp. CE^1/CE^2) are the kernel and cokernel.  Constraints append
one block of rows per constraint, projecting the constrained vertex to the
free quotient N/L_i; the elliptic augmentation appends a single row summing
the cycle-edge coordinates with signs along an oriented cycle.

Over Z we keep the full two-term complex; the quotient form (vertices only)
is valid only when every l(e) acts invertibly on the coefficients, and the
tests use it as an independent cross-check over fields.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import paramcurve as pc
from .errors import (
    ConstraintUnsatisfied,
    GenusNotOne,
    NotASubdivision,
    ZeroSlopeCycleEdge,
)
from .exactla import (
    CoeffGroup,
    FGAbelianGroup,
    GroupSize,
    Mat,
    Sublattice,
    base_change,
    cokernel_group,
    combine_sizes,
    freeze,
    kernel_basis,
    quotient_presentation,
)
from .paramcurve import AffineConstraintSet, ParamTropicalCurve


@dataclass(frozen=True)
class ComplexSpec:
    variant: str = "beta"                      # "b" -> E, "beta" -> CE
    constraints: AffineConstraintSet | None = None
    elliptic: bool = False

    def __post_init__(self):
        if self.variant not in ("b", "beta"):
            raise ValueError("variant must be 'b' or 'beta'")


@dataclass(frozen=True)
class ComplexLayout:
    """Index bookkeeping for the assembled matrix."""

    vertices: tuple[str, ...]       # finite vertices, column blocks of width n
    slope_edges: tuple[str, ...]    # bounded edges with nonzero slope, one column each
    row_edges: tuple[str, ...]      # all bounded edges, row blocks of width n
    n: int
    constraint_rows: tuple[tuple[str, Mat], ...]  # (constrained vertex, projection)
    elliptic: bool

    @property
    def domain_dim(self) -> int:
        return self.n * len(self.vertices) + len(self.slope_edges)

    def vertex_cols(self, v: str) -> range:
        i = self.vertices.index(v)
        return range(self.n * i, self.n * (i + 1))

    def edge_col(self, eid: str) -> int:
        return self.n * len(self.vertices) + self.slope_edges.index(eid)


def _assemble(p: ParamTropicalCurve, spec: ComplexSpec):
    pc.require_balanced(p)
    n = p.lattice_rank
    curve = p.curve
    vertices = tuple(curve.finite_vertices)
    bounded = curve.bounded_edges()
    geo = {e.id: pc.edge_geometry(p, e.id) for e in bounded}
    slope_edges = tuple(e.id for e in bounded if geo[e.id].slope is not None)

    constraint_rows = []
    if spec.constraints is not None:
        rep = pc.check_constraint(p, spec.constraints)
        if not rep.satisfies:
            raise ConstraintUnsatisfied("; ".join(rep.problems))
        for (vinf, vfin), con in zip(pc.marked_pairs(p, len(spec.constraints)),
                                     spec.constraints.items):
            constraint_rows.append((vfin, quotient_presentation(con.space)))

    # orientation: lexicographic by default; when the elliptic row is
    # present, cycle edges are re-oriented along the cycle so that the slope
    # trivialization feeding the edge columns and the one feeding the cycle
    # row agree (the complex is wrong otherwise)
    orientation = {e.id: pc._orient(e) for e in bounded}
    if spec.elliptic:
        if spec.variant == "b" and any(geo[eid].multiplicity > 1 for eid in geo):
            raise ValueError("elliptic plain variant needs unit multiplicities")
        cycle = pc.find_cycle(p)
        for e, sign in cycle:
            if geo[e.id].slope is None:
                raise ZeroSlopeCycleEdge(f"cycle edge {e.id} has zero slope")
            init, target = orientation[e.id]
            orientation[e.id] = (init, target) if sign == 1 else (target, init)
        cycle_ids = {e.id for e, _ in cycle}

    layout = ComplexLayout(vertices, slope_edges, tuple(e.id for e in bounded),
                           n, tuple(constraint_rows), spec.elliptic)

    ncols = layout.domain_dim
    rows = []
    vindex = {v: i for i, v in enumerate(vertices)}
    for e in bounded:
        init, target = orientation[e.id]
        block = [[0] * ncols for _ in range(n)]
        if init != target:  # loops contribute no vertex coefficients
            for k in range(n):
                block[k][n * vindex[init] + k] -= 1
                block[k][n * vindex[target] + k] += 1
        g = geo[e.id]
        if g.slope is not None:
            gen = g.slope if (init, target) == pc._orient(e) else tuple(
                -x for x in g.slope)
            coef = g.multiplicity if spec.variant == "beta" else 1
            col = layout.edge_col(e.id)
            for k in range(n):
                block[k][col] = coef * gen[k]
        rows.extend(block)
    for vfin, proj in constraint_rows:
        for prow in proj:
            row = [0] * ncols
            for k in range(n):
                row[n * vindex[vfin] + k] = prow[k]
            rows.append(row)
    if spec.elliptic:
        row = [0] * ncols
        for eid in sorted(cycle_ids):
            row[layout.edge_col(eid)] = 1
        rows.append(row)
    return freeze(rows), layout


def build_matrix(p: ParamTropicalCurve, spec: ComplexSpec) -> Mat:
    """The integer matrix of the chosen complex (see the module docstring
    for the row/column layout)."""
    return _assemble(p, spec)[0]


@dataclass(frozen=True)
class ComplexReport:
    matrix: Mat
    layout: ComplexLayout
    E1_rank: int
    E1_lattice: Sublattice        # kernel inside the domain Z^domain_dim
    E2: FGAbelianGroup
    c_gamma: int                  # number of zero-slope bounded edges
    group: CoeffGroup
    E1_size: GroupSize
    E2_size: GroupSize


def sizes_over(e1_rank: int, e2: FGAbelianGroup, g: CoeffGroup):
    """(E^1_G, E^2_G) sizes via the universal-coefficient sequence
    0 -> E^1 (x) G -> E^1_G -> Tor(E^2, G) -> 0 and E^2_G = E^2 (x) G."""
    e1_free = base_change(FGAbelianGroup(e1_rank), g, "tensor")
    e1_tor = base_change(e2, g, "tor")
    return combine_sizes(e1_free, e1_tor), base_change(e2, g, "tensor")


def compute(p: ParamTropicalCurve, spec: ComplexSpec,
            group: CoeffGroup = CoeffGroup.integers()) -> ComplexReport:
    mat, layout = _assemble(p, spec)
    if mat:
        ker = kernel_basis(mat)
        e2 = cokernel_group(mat)
    else:  # no rows: the kernel is the whole domain, the cokernel vanishes
        from .exactla import identity

        ker = identity(layout.domain_dim)
        e2 = FGAbelianGroup(0)
    e1s, e2s = sizes_over(len(ker), e2, group)
    return ComplexReport(
        matrix=mat, layout=layout, E1_rank=len(ker),
        E1_lattice=Sublattice(layout.domain_dim, ker), E2=e2,
        c_gamma=pc.zero_slope_bounded_count(p),
        group=group, E1_size=e1s, E2_size=e2s,
    )


@dataclass(frozen=True)
class RegularityVerdict:
    g_regular: bool
    elliptically_regular: bool | None
    obstruction: GroupSize


def regularity(p: ParamTropicalCurve, constraints: AffineConstraintSet | None,
               group: CoeffGroup, elliptic: bool = False) -> RegularityVerdict:
    """G-regularity is the vanishing of the stacky obstruction CE^2_G; the
    elliptic variant asks the same of the j-augmented complex."""
    plain = compute(p, ComplexSpec("beta", constraints), group)
    if not elliptic:
        return RegularityVerdict(plain.E2_size.is_trivial, None, plain.E2_size)
    ell = compute(p, ComplexSpec("beta", constraints, elliptic=True), group)
    return RegularityVerdict(plain.E2_size.is_trivial,
                             ell.E2_size.is_trivial, ell.E2_size)


def _field_dim(size: GroupSize) -> int:
    if size.free_rank:
        raise ValueError("not a vector space")
    return size.kdim


def six_term_check(p: ParamTropicalCurve,
                   constraints: AffineConstraintSet | None,
                   group: CoeffGroup) -> dict:
    """Dimension ledger of the comparison sequence

    0 -> sum mu_l(e)(G) -> CE^1_G -> E^1_G -> sum G/l(e)G -> CE^2_G -> E^2_G -> 0

    over a field G; returns the six dimensions and asserts the alternating
    sum vanishes.
    """
    if group.kind not in ("Q", "field"):
        raise ValueError("six-term ledger needs a field of coefficients")
    p_char = 0 if group.kind == "Q" else group.p
    mults = [pc.edge_geometry(p, e.id).multiplicity
             for e in p.curve.bounded_edges()]
    mults = [m for m in mults if m > 0]
    mu = sum(1 for m in mults if p_char and m % p_char == 0)
    quot = mu  # dim ker(l: G -> G) = dim G/lG for a field
    ce = compute(p, ComplexSpec("beta", constraints), group)
    ee = compute(p, ComplexSpec("b", constraints), group)
    ledger = {
        "mu": mu,
        "CE1": _field_dim(ce.E1_size),
        "E1": _field_dim(ee.E1_size),
        "quot": quot,
        "CE2": _field_dim(ce.E2_size),
        "E2": _field_dim(ee.E2_size),
    }
    alternating = (ledger["mu"] - ledger["CE1"] + ledger["E1"]
                   - ledger["quot"] + ledger["CE2"] - ledger["E2"])
    assert alternating == 0, ledger
    ledger["alternating_sum"] = alternating
    return ledger


# ---------------------------------------------------------------------------
# transport under subdivision and contraction


def subdivision_transport(p: ParamTropicalCurve, p_sub: ParamTropicalCurve,
                          constraints: AffineConstraintSet | None = None) -> dict:
    """Compare the complexes of a curve and one of its subdivisions.

    The cokernels agree and the kernel rank grows by one per new vertex on a
    nonzero-slope edge, in the plain, stacky, constrained, and (genus one)
    elliptic variants alike.
    """
    new = pc.subdivision_new_vertices(p_sub, p)
    for v, eid in new:
        if pc.edge_geometry(p, eid).slope is None:
            raise NotASubdivision(
                f"new vertex {v} subdivides zero-slope edge {eid}")
    out = {"new_vertices": len(new), "ok": True, "checks": {}}
    specs = {"E": ComplexSpec("b", constraints), "CE": ComplexSpec("beta", constraints)}
    if pc.tropgraph.genus(p.curve) == 1 and _cycle_has_slopes(p) and _cycle_has_slopes(p_sub):
        specs["CEj"] = ComplexSpec("beta", constraints, elliptic=True)
    for name, spec in specs.items():
        small = compute(p, spec)
        big = compute(p_sub, spec)
        same_e2 = small.E2 == big.E2
        offset_ok = big.E1_rank == small.E1_rank + len(new)
        out["checks"][name] = {"E2_equal": same_e2, "E1_offset_ok": offset_ok}
        out["ok"] = out["ok"] and same_e2 and offset_ok
    return out


def _cycle_has_slopes(p):
    try:
        cycle = pc.find_cycle(p)
    except GenusNotOne:
        return False
    return all(pc.edge_geometry(p, e.id).slope is not None for e, _ in cycle)


def contraction_transport(p: ParamTropicalCurve,
                          constraints: AffineConstraintSet | None = None) -> dict:
    """Compare a curve with its zero-slope contraction: E^1/CE^1 keep their
    canonical form, and the obstruction rank grows by n per contracted
    independent cycle.  For genus one preserved by the contraction the
    j-augmented complexes agree entirely."""
    pbar, _ = pc.contract_zero_slope(p)
    g = pc.tropgraph.genus(p.curve)
    gbar = pc.tropgraph.genus(pbar.curve)
    n = p.lattice_rank
    out = {"genus_drop": g - gbar, "ok": True, "checks": {}}
    for name, spec in (("E", ComplexSpec("b", constraints)),
                       ("CE", ComplexSpec("beta", constraints))):
        full = compute(p, spec)
        small = compute(pbar, spec)
        e1_iso = full.E1_rank == small.E1_rank
        rank_ok = full.E2.rank == small.E2.rank + n * (g - gbar)
        torsion_ok = full.E2.torsion == small.E2.torsion
        out["checks"][name] = {"E1_iso": e1_iso, "E2_rank_ok": rank_ok,
                               "E2_torsion_equal": torsion_ok}
        out["ok"] = out["ok"] and e1_iso and rank_ok and torsion_ok
    if g == 1 and gbar == 1 and _cycle_has_slopes(p) and _cycle_has_slopes(pbar):
        spec = ComplexSpec("beta", constraints, elliptic=True)
        full = compute(p, spec)
        small = compute(pbar, spec)
        same = (full.E1_rank == small.E1_rank and full.E2 == small.E2)
        out["checks"]["CEj"] = {"canonical_forms_equal": same}
        out["ok"] = out["ok"] and same
    return out


# ---------------------------------------------------------------------------
# independent cross-check: the quotient-form complex over a field


def quotient_form_dims(p: ParamTropicalCurve,
                       constraints: AffineConstraintSet | None,
                       group: CoeffGroup) -> tuple[int, int]:
    """Kernel/cokernel dimensions of the one-term quotient complex

        sum_v N_G -> sum_{E^b} (N/N_e)_G  (+ constraint blocks)

    quasi-isomorphic to the plain two-term complex over any coefficients,
    and to the stacky one as well when every l(e) is invertible.  The tests
    use it as an independent route to the same dimensions."""
    if group.kind not in ("Q", "field"):
        raise ValueError("quotient form needs a field")
    p_char = 0 if group.kind == "Q" else group.p
    n = p.lattice_rank
    vertices = tuple(p.curve.finite_vertices)
    vindex = {v: i for i, v in enumerate(vertices)}
    rows = []
    for e in p.curve.bounded_edges():
        geo = pc.edge_geometry(p, e.id)
        sub = Sublattice(n, (geo.slope,) if geo.slope is not None else ())
        proj = quotient_presentation(sub)
        init, target = pc._orient(e)
        for prow in proj:
            row = [0] * (n * len(vertices))
            if init != target:
                for k in range(n):
                    row[n * vindex[init] + k] -= prow[k]
                    row[n * vindex[target] + k] += prow[k]
            rows.append(row)
    if constraints is not None:
        for (vinf, vfin), con in zip(pc.marked_pairs(p, len(constraints)),
                                     constraints.items):
            for prow in quotient_presentation(con.space):
                row = [0] * (n * len(vertices))
                for k in range(n):
                    row[n * vindex[vfin] + k] = prow[k]
                rows.append(row)
    mat = freeze(rows) if rows else ()
    if not mat:
        return n * len(vertices), 0
    if p_char == 0:
        from .exactla import rank as zrank

        r = zrank(mat)
        return n * len(vertices) - r, len(mat) - r
    r = _rank_mod_p(mat, p_char)
    return n * len(vertices) - r, len(mat) - r


def _rank_mod_p(mat, p_char: int) -> int:
    m = [[x % p_char for x in row] for row in mat]
    rank_ = 0
    ncols = len(m[0]) if m else 0
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, len(m)) if m[i][col] % p_char), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = pow(m[row][col], -1, p_char)
        m[row] = [(x * inv) % p_char for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col]:
                f = m[i][col]
                m[i] = [(x - f * y) % p_char for x, y in zip(m[i], m[row])]
        row += 1
        rank_ += 1
    return rank_

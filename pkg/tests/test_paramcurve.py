from fractions import Fraction

import pytest

from fixture_curves import (
    doubled_line,
    line_through_two_points,
    triangle_elliptic,
    tropical_line,
    two_vertex_curve,
)
from tropicorr.errors import GenusNotOne, NonCollinear
from tropicorr.paramcurve import (
    balancing_defects,
    check_constraint,
    constraint_set,
    contract_zero_slope,
    degree,
    edge_geometry,
    extend_parameterization,
    find_cycle,
    is_balanced,
    param_curve,
    rank,
    stabilize_param,
    subdivide_at_positions,
    tropical_j,
    zero_slope_bounded_count,
)
from tropicorr.tropgraph import (
    AttachTree,
    SubdivideBounded,
    SubdivideUnbounded,
    curve,
    genus,
)

F = Fraction


def test_balancing_examples():
    assert is_balanced(tropical_line())
    skew = tropical_line()
    skew.h["u3"] = (F(1), F(2))
    assert balancing_defects(skew) == {"v0": (F(0), F(1))}
    assert is_balanced(two_vertex_curve())


def test_edge_geometry_examples():
    p = param_curve(
        curve(["v", "w"], ["a", "b", "c", "d"],
              [("e", ("v", "w"), 1),
               ("r1", ("v", "a"), None), ("r2", ("v", "b"), None),
               ("r3", ("w", "c"), None), ("r4", ("w", "d"), None)]),
        2,
        {"v": (0, 0), "w": (2, 2), "a": (-2, 0), "b": (0, -2),
         "c": (2, 0), "d": (0, 2)},
    )
    geo = edge_geometry(p, "e")
    assert geo.slope == (1, 1) and geo.multiplicity == 2
    # marked point: zero-direction unbounded edge
    line, _ = line_through_two_points()
    geo = edge_geometry(line, "g1")
    assert geo.slope is None and geo.multiplicity == 0
    loop = param_curve(
        curve(["v"], ["a"], [("l", ("v", "v"), 1), ("r", ("v", "a"), None)]),
        2, {"v": (0, 0), "a": (0, 0)})
    assert edge_geometry(loop, "l").slope is None


def test_degree_examples():
    assert degree(tropical_line()) == (((-1, 0), 1), ((0, -1), 1), ((1, 1), 1))
    dbl, _ = doubled_line()
    assert degree(dbl) == (((-1, 0), 2), ((0, -1), 2), ((1, 1), 2))
    two_same = param_curve(
        curve(["v"], ["a", "b", "c"],
              [("r1", ("v", "a"), None), ("r2", ("v", "b"), None),
               ("r3", ("v", "c"), None)]),
        2, {"v": (0, 0), "a": (1, 0), "b": (1, 0), "c": (-2, 0)})
    assert degree(two_same) == (((-1, 0), 2), ((1, 0), 2))


def test_degree_sums_to_zero():
    for p in (tropical_line(), two_vertex_curve(), doubled_line()[0]):
        deg = degree(p)
        n = p.lattice_rank
        total = [0] * n
        for direction, d in deg:
            total = [t + d * x for t, x in zip(total, direction)]
        assert all(t == 0 for t in total)


def test_extend_parameterization_bounded():
    p = two_vertex_curve()
    p2 = extend_parameterization(p, [SubdivideBounded("m", (F(1, 2),))])
    assert p2.hv("m.v1") == (F(1, 2), F(1, 2))
    assert is_balanced(p2)
    # restriction back to the original vertices is the input
    for v in p.curve.vertex_ids():
        assert p2.hv(v) == p.hv(v)


def test_extend_parameterization_unbounded_and_tree():
    p = tropical_line()
    p2 = extend_parameterization(p, [SubdivideUnbounded("f3", (2,))])
    assert p2.hv("f3.v1") == (F(2), F(2))
    assert is_balanced(p2)
    tree = curve(["r", "s"], [], [("te", ("r", "s"), 1)])
    p3 = extend_parameterization(p2, [AttachTree("v0", tree, "r")])
    assert p3.hv("s") == p3.hv("v0")
    assert is_balanced(p3)
    assert genus(p3.curve) == 0


def test_subdivide_at_positions():
    p = two_vertex_curve()
    p2 = subdivide_at_positions(p, {"m": [(F(1, 3), F(1, 3))]})
    lens = sorted(e.length for e in p2.curve.bounded_edges())
    assert lens == [F(1, 3), F(2, 3)]
    with pytest.raises(NonCollinear):
        subdivide_at_positions(p, {"m": [(F(1, 3), F(2, 3))]})
    p3 = subdivide_at_positions(p, {"e1": [(-2, 0)]})
    assert p3.hv("e1.v1") == (F(-2), F(0))


def test_contract_zero_slope():
    p = tropical_line()
    q, vmap = contract_zero_slope(p)
    assert q.curve == p.curve
    flat = param_curve(
        curve(["v", "w"], ["a", "b", "c"],
              [("z", ("v", "w"), 1),
               ("r1", ("v", "a"), None), ("r2", ("v", "b"), None),
               ("r3", ("w", "c"), None)]),
        2,
        {"v": (1, 1), "w": (1, 1), "a": (1, 0), "b": (-1, 0),
         "c": (0, 0)})
    assert is_balanced(flat)
    q, vmap = contract_zero_slope(flat)
    assert len(q.curve.finite_vertices) == 1
    assert vmap["w"] == vmap["v"]
    assert is_balanced(q)
    # zero-slope loop drops the genus
    loopy = param_curve(
        curve(["v"], ["a", "b"],
              [("l", ("v", "v"), 3), ("r1", ("v", "a"), None),
               ("r2", ("v", "b"), None)]),
        2, {"v": (0, 0), "a": (1, 2), "b": (-1, -2)})
    q, _ = contract_zero_slope(loopy)
    assert genus(q.curve) == genus(loopy.curve) - 1


def test_rank_examples():
    assert rank(tropical_line()) == 2
    line2, _ = line_through_two_points()
    assert rank(line2) == 4
    assert rank(two_vertex_curve()) == 3


def test_check_constraint_examples():
    p, a = line_through_two_points()
    rep = check_constraint(p, a)
    assert rep.satisfies and rep.simple and rep.codim == 4
    bad = constraint_set([((), (-1, 1)), ((), (1, 1))], 2)
    rep = check_constraint(p, bad)
    assert not rep.satisfies
    # corank-1 constraint spaces are rejected at construction
    with pytest.raises(ValueError):
        constraint_set([([(0, 1)], (-1, -5))], 2)


def test_check_constraint_simple_flags():
    p, a = triangle_elliptic()
    rep = check_constraint(p, a)
    assert rep.satisfies and rep.simple and rep.codim == 4


def test_tropical_j():
    tri = param_curve(
        curve(["a", "b", "c"], ["z"],
              [("e", ("a", "b"), 1), ("f", ("b", "c"), 1), ("g", ("c", "a"), 1),
               ("r", ("a", "z"), None)]),
        2,
        {"a": (0, 0), "b": (1, 0), "c": (0, 1), "z": (0, 0)})
    assert tropical_j(tri) == 3
    loop = param_curve(
        curve(["v"], ["z"], [("l", ("v", "v"), F(5, 2)), ("r", ("v", "z"), None)]),
        2, {"v": (0, 0), "z": (0, 0)})
    assert tropical_j(loop) == F(5, 2)
    with pytest.raises(GenusNotOne):
        tropical_j(tropical_line())


def test_tropical_j_subdivision_invariant():
    p, _ = triangle_elliptic()
    j = tropical_j(p)
    p2 = extend_parameterization(p, [SubdivideBounded("c12", (F(1, 4), F(1, 2)))])
    assert tropical_j(p2) == j


def test_find_cycle_orientation_consistent():
    p, _ = triangle_elliptic()
    cycle = find_cycle(p)
    assert sorted(e.id for e, _ in cycle) == ["c12", "c23", "c31"]
    # signed directions add up to zero around the cycle
    total = (F(0), F(0))
    for e, sign in cycle:
        u, w = sorted(e.ends)
        d = tuple((p.hv(w)[i] - p.hv(u)[i]) / e.length for i in range(2))
        total = tuple(t + sign * x for t, x in zip(total, d))
    assert total == (0, 0)


def test_stabilize_param():
    p = extend_parameterization(
        tropical_line(), [SubdivideUnbounded("f1", (1, 2))])
    st = stabilize_param(p)
    assert is_balanced(st)
    assert len(st.curve.finite_vertices) == 1
    assert st.curve.infinite_vertices == p.curve.infinite_vertices


def test_reorder_infinite():
    from tropicorr.paramcurve import reorder_infinite

    p, _ = line_through_two_points()
    order = ("u1", "u2", "m1", "m2", "u3")
    q = reorder_infinite(p, order)
    assert q.curve.infinite_vertices == order
    assert is_balanced(q)
    with pytest.raises(ValueError):
        reorder_infinite(p, ("u1", "u2"))


def test_zero_slope_count():
    line, _ = line_through_two_points()
    assert zero_slope_bounded_count(line) == 0
    flat = param_curve(
        curve(["v", "w"], ["a", "b", "c"],
              [("z", ("v", "w"), 1),
               ("r1", ("v", "a"), None), ("r2", ("v", "b"), None),
               ("r3", ("w", "c"), None)]),
        2, {"v": (1, 1), "w": (1, 1), "a": (1, 0), "b": (-1, 0), "c": (0, 0)})
    assert zero_slope_bounded_count(flat) == 1

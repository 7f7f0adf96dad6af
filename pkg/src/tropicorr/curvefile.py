"""The tropicorr/1 curve-file format.

One parameterized curve per JSON file.  Rationals travel as strings ("3",
"-1/2") so nothing ever goes through floating point; h vectors of infinite
vertices are plain integer arrays.  The infinite-vertex array order is
load-bearing: constraints bind to the first k infinite vertices.  Unknown
fields are rejected.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .paramcurve import AffineConstraintSet, ParamTropicalCurve, constraint_set
from .tropgraph import Edge, TropicalCurve

SCHEMA = "tropicorr/1"

_TOP_FIELDS = {"schema", "lattice_rank", "char", "finite_vertices",
               "infinite_vertices", "edges", "constraints"}


def _rat(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"{where}: expected a rational string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: bad rational {value!r}") from exc


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _check_fields(obj: dict, allowed, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ParseError(f"{where}: unknown fields {sorted(unknown)}")


def parse_curve(data: dict):
    """data -> (ParamTropicalCurve, AffineConstraintSet | None, char)."""
    _check_fields(data, _TOP_FIELDS, "curve file")
    if data.get("schema") != SCHEMA:
        raise ParseError(f"schema must be {SCHEMA!r}")
    n = _int(data.get("lattice_rank"), "lattice_rank")
    if n < 1:
        raise ParseError("lattice_rank must be positive")
    char = _int(data.get("char", 0), "char")
    if char < 0:
        raise ParseError("char must be a natural number")

    h = {}
    finite = []
    for item in data.get("finite_vertices", ()):
        _check_fields(item, {"id", "h"}, "finite vertex")
        vid = str(item["id"])
        vec = item.get("h", ())
        if len(vec) != n:
            raise ParseError(f"vertex {vid}: h must have {n} entries")
        finite.append(vid)
        h[vid] = tuple(_rat(x, f"h({vid})") for x in vec)
    infinite = []
    for item in data.get("infinite_vertices", ()):
        _check_fields(item, {"id", "h"}, "infinite vertex")
        vid = str(item["id"])
        vec = item.get("h", ())
        if len(vec) != n:
            raise ParseError(f"vertex {vid}: h must have {n} entries")
        infinite.append(vid)
        h[vid] = tuple(Fraction(_int(x, f"h({vid})")) for x in vec)

    edges = []
    for item in data.get("edges", ()):
        _check_fields(item, {"id", "ends", "length"}, "edge")
        eid = str(item["id"])
        ends = item.get("ends", ())
        if len(ends) != 2:
            raise ParseError(f"edge {eid}: ends must list two vertices")
        ln = item.get("length")
        if ln == "inf":
            length = None
        else:
            length = _rat(ln, f"length({eid})")
        edges.append(Edge(eid, (str(ends[0]), str(ends[1])), length))

    curve = TropicalCurve(tuple(finite), tuple(infinite), tuple(edges))
    p = ParamTropicalCurve(curve, n, h)

    constraints = None
    if "constraints" in data:
        items = []
        for i, item in enumerate(data["constraints"]):
            _check_fields(item, {"L_basis", "point"}, f"constraint {i}")
            basis = [[_int(x, f"constraint {i} basis") for x in row]
                     for row in item.get("L_basis", ())]
            point = tuple(_rat(x, f"constraint {i} point")
                          for x in item.get("point", ()))
            if len(point) != n:
                raise ParseError(f"constraint {i}: point must have {n} entries")
            items.append((basis, point))
        try:
            constraints = constraint_set(items, n)
        except ValueError as exc:
            raise ParseError(f"bad constraint: {exc}") from exc
    return p, constraints, char


def load(path: str):
    import json

    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        data = json.loads(raw)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    p, constraints, char = parse_curve(data)
    return p, constraints, char, raw


def _rat_str(x: Fraction) -> str:
    return str(x)


def curve_to_json(p: ParamTropicalCurve,
                  constraints: AffineConstraintSet | None = None,
                  char: int = 0) -> dict:
    data = {
        "schema": SCHEMA,
        "lattice_rank": p.lattice_rank,
        "char": char,
        "finite_vertices": [
            {"id": v, "h": [_rat_str(x) for x in p.hv(v)]}
            for v in p.curve.finite_vertices
        ],
        "infinite_vertices": [
            {"id": v, "h": [int(x) for x in p.hv(v)]}
            for v in p.curve.infinite_vertices
        ],
        "edges": [
            {"id": e.id, "ends": list(e.ends),
             "length": "inf" if e.length is None else _rat_str(e.length)}
            for e in p.curve.edges
        ],
    }
    if constraints is not None:
        data["constraints"] = [
            {"L_basis": [list(row) for row in con.space.basis],
             "point": [_rat_str(x) for x in con.point]}
            for con in constraints.items
        ]
    return data

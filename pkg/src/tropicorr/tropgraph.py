"""Abstract tropical curves as metric graphs.

A curve is a finite connected graph with two vertex classes: finite vertices,
and an ordered list of infinite vertices, each of valency one at the far end
of an unbounded (infinite-length) edge.  Bounded edges carry positive
rational lengths.  Loops and multi-edges are allowed; a loop counts once in
|E| and twice in the valency of its vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadSubdivision, NotStabilizable

INF = None  # length of an unbounded edge


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]
    length: Fraction | None  # None encodes infinite length

    @property
    def is_bounded(self) -> bool:
        return self.length is not None


@dataclass(frozen=True)
class TropicalCurve:
    finite_vertices: tuple[str, ...]
    infinite_vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def vertex_ids(self):
        return self.finite_vertices + self.infinite_vertices

    def is_finite(self, v: str) -> bool:
        return v in set(self.finite_vertices)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def bounded_edges(self):
        return tuple(e for e in self.edges if e.is_bounded)

    def unbounded_edges(self):
        return tuple(e for e in self.edges if not e.is_bounded)


def curve(finite, infinite=(), edges=()) -> TropicalCurve:
    """Convenience constructor; edges given as (id, (u, v), length) with
    length a Fraction/int/str or None for unbounded."""
    es = []
    for eid, ends, ln in edges:
        es.append(Edge(str(eid), (str(ends[0]), str(ends[1])),
                       None if ln is None else Fraction(ln)))
    return TropicalCurve(tuple(str(v) for v in finite),
                         tuple(str(v) for v in infinite), tuple(es))


def incident_edges(c: TropicalCurve, v: str):
    return [e for e in c.edges if v in e.ends]


def valency(c: TropicalCurve, v: str) -> int:
    n = 0
    for e in c.edges:
        n += (e.ends[0] == v) + (e.ends[1] == v)
    return n


def is_connected(c: TropicalCurve) -> bool:
    verts = set(c.vertex_ids())
    if not verts:
        return False
    adj: dict[str, list[str]] = {v: [] for v in verts}
    for e in c.edges:
        u, w = e.ends
        adj[u].append(w)
        adj[w].append(u)
    seen = set()
    stack = [next(iter(verts))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj[v])
    return seen == verts


def validate(c: TropicalCurve) -> list[str]:
    """All violated invariants; empty list iff the curve is valid."""
    out = []
    ids = list(c.finite_vertices) + list(c.infinite_vertices)
    if len(set(ids)) != len(ids):
        out.append("duplicate vertex ids")
    if len({e.id for e in c.edges}) != len(c.edges):
        out.append("duplicate edge ids")
    known = set(ids)
    infinite = set(c.infinite_vertices)
    for e in c.edges:
        u, w = e.ends
        if u not in known or w not in known:
            out.append(f"edge {e.id} has unknown endpoint")
            continue
        n_inf = (u in infinite) + (w in infinite)
        if e.is_bounded:
            if n_inf:
                out.append(f"(p3): bounded edge {e.id} touches an infinite vertex")
            if e.length <= 0:
                out.append(f"(p3): bounded edge {e.id} has non-positive length")
        else:
            if n_inf != 1:
                out.append(f"(p2): unbounded edge {e.id} must join a finite and "
                           "an infinite vertex")
    for v in c.infinite_vertices:
        if valency(c, v) != 1:
            out.append(f"(p2): infinite vertex {v} has valency {valency(c, v)}")
    if not is_connected(c):
        out.append("disconnected")
    return out


def genus(c: TropicalCurve) -> int:
    """1 - |V| + |E|; the first Betti number for connected curves."""
    return 1 - len(c.vertex_ids()) + len(c.edges)


def bounded_length(c: TropicalCurve) -> Fraction:
    return sum((e.length for e in c.bounded_edges()), Fraction(0))


# ---------------------------------------------------------------------------
# the three-step modification algorithm


@dataclass(frozen=True)
class SubdivideBounded:
    edge: str
    distances: tuple[Fraction, ...]  # strictly increasing, measured from ends[0]
    vertex_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class SubdivideUnbounded:
    edge: str
    distances: tuple[Fraction, ...]  # strictly increasing from the finite end
    vertex_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class AttachTree:
    root: str               # finite vertex of the target curve
    tree: TropicalCurve     # metric tree; its root is identified with `root`
    tree_root: str


def _subdivision_ids(step, r):
    if step.vertex_ids:
        if len(step.vertex_ids) != r:
            raise BadSubdivision("vertex id count does not match distances")
        return list(step.vertex_ids)
    return [f"{step.edge}.v{k + 1}" for k in range(r)]


def modify(c: TropicalCurve, steps) -> TropicalCurve:
    """Apply subdivision and tree-attachment steps.  Subdivision preserves
    the metric; new infinite leaves are appended after the existing infinite
    vertices in input order."""
    finite = list(c.finite_vertices)
    infinite = list(c.infinite_vertices)
    edges = {e.id: e for e in c.edges}
    for step in steps:
        if isinstance(step, (SubdivideBounded, SubdivideUnbounded)):
            e = edges.get(step.edge)
            if e is None:
                raise BadSubdivision(f"no edge {step.edge}")
            ds = [Fraction(d) for d in step.distances]
            if any(y <= x for x, y in zip(ds, ds[1:])):
                raise BadSubdivision("distances must be strictly increasing")
            if not ds:
                continue
            if isinstance(step, SubdivideBounded):
                if not e.is_bounded:
                    raise BadSubdivision(f"{e.id} is not bounded")
                if ds[0] <= 0 or ds[-1] >= e.length:
                    raise BadSubdivision("distances must lie inside the edge")
                chain = [e.ends[0]]
            else:
                if e.is_bounded:
                    raise BadSubdivision(f"{e.id} is not unbounded")
                if ds[0] <= 0:
                    raise BadSubdivision("distances must be positive")
                inf_set = set(infinite)
                start = e.ends[0] if e.ends[1] in inf_set else e.ends[1]
                chain = [start]
            new_vs = _subdivision_ids(step, len(ds))
            finite.extend(new_vs)
            chain.extend(new_vs)
            if isinstance(step, SubdivideBounded):
                chain.append(e.ends[1])
                bounds = [Fraction(0)] + ds + [e.length]
                lengths = [b - a for a, b in zip(bounds, bounds[1:])]
            else:
                far = e.ends[1] if e.ends[1] in set(infinite) else e.ends[0]
                chain.append(far)
                bounds = [Fraction(0)] + ds
                lengths = [b - a for a, b in zip(bounds, bounds[1:])] + [None]
            del edges[e.id]
            for k, (u, w) in enumerate(zip(chain, chain[1:])):
                edges[f"{e.id}.p{k}"] = Edge(f"{e.id}.p{k}", (u, w), lengths[k])
        elif isinstance(step, AttachTree):
            if step.root not in finite:
                raise BadSubdivision(f"attachment root {step.root} not a finite vertex")
            t = step.tree
            if genus(t) != 0:
                raise BadSubdivision("attachment must be a tree")
            if validate(t):
                raise BadSubdivision("attachment tree is not a valid curve")
            rename = {step.tree_root: step.root}
            clash = (set(t.vertex_ids()) - {step.tree_root}) & set(finite + infinite)
            clash |= {e.id for e in t.edges} & set(edges)
            if clash:
                raise BadSubdivision(f"id clash with attached tree: {sorted(clash)}")
            for v in t.finite_vertices:
                if v != step.tree_root:
                    finite.append(v)
            for v in t.infinite_vertices:
                infinite.append(v)
            for e in t.edges:
                u, w = (rename.get(x, x) for x in e.ends)
                edges[e.id] = Edge(e.id, (u, w), e.length)
        else:
            raise TypeError(f"unknown modification step {step!r}")
    return TropicalCurve(tuple(finite), tuple(infinite), tuple(edges.values()))


# ---------------------------------------------------------------------------
# stabilization


def satisfies_stability_bound(c: TropicalCurve) -> bool:
    """g + (|V^inf| + 1)/2 >= 2, the tropical analogue of the three-special-
    points condition."""
    return 2 * genus(c) + len(c.infinite_vertices) + 1 >= 4


def is_stable(c: TropicalCurve) -> bool:
    return all(valency(c, v) >= 3 for v in c.finite_vertices)


def stabilize(c: TropicalCurve) -> TropicalCurve:
    """The unique stable curve from which c arises by subdivision and tree
    attachment: prune the maximal forest with finite leaves, then smooth
    2-valent vertices, adding lengths."""
    if validate(c):
        raise NotStabilizable("input curve is invalid")
    if not satisfies_stability_bound(c):
        raise NotStabilizable(
            "genus and infinite-vertex count violate the stability bound")
    finite = list(c.finite_vertices)
    infinite = list(c.infinite_vertices)
    edges = {e.id: e for e in c.edges}

    def val(v):
        n = 0
        for e in edges.values():
            n += (e.ends[0] == v) + (e.ends[1] == v)
        return n

    # prune finite leaves
    changed = True
    while changed:
        changed = False
        for v in sorted(finite):
            if val(v) == 1:
                eid = next(i for i, e in edges.items() if v in e.ends)
                del edges[eid]
                finite.remove(v)
                changed = True
    # smooth 2-valent finite vertices
    changed = True
    while changed:
        changed = False
        for v in sorted(finite):
            inc = [e for e in edges.values() if v in e.ends]
            if sum((e.ends[0] == v) + (e.ends[1] == v) for e in inc) != 2:
                continue
            if len(inc) == 1:
                # lone loop vertex; excluded by the stability bound
                raise NotStabilizable("degenerate loop survives smoothing")
            e1, e2 = inc
            u = e1.ends[0] if e1.ends[1] == v else e1.ends[1]
            w = e2.ends[0] if e2.ends[1] == v else e2.ends[1]
            if e1.is_bounded and e2.is_bounded:
                ln = e1.length + e2.length
            elif e1.is_bounded != e2.is_bounded:
                ln = None
            else:
                raise NotStabilizable("2-valent vertex joins two unbounded edges")
            # keep the infinite endpoint second for unbounded merges
            if ln is None and u in set(infinite):
                u, w = w, u
            nid = f"{e1.id}+{e2.id}"
            del edges[e1.id]
            del edges[e2.id]
            while nid in edges:
                nid += "'"
            edges[nid] = Edge(nid, (u, w), ln)
            finite.remove(v)
            changed = True
    out = TropicalCurve(tuple(finite), tuple(infinite), tuple(edges.values()))
    if not is_stable(out):
        raise NotStabilizable("no stable curve under this input")
    return out


# ---------------------------------------------------------------------------
# isomorphism of metric graphs (infinite vertices matched in order)


def _lenkey(ln):
    return (1, Fraction(0)) if ln is None else (0, ln)


def _refine_colors(c: TropicalCurve, colors):
    infinite = {v: i for i, v in enumerate(c.infinite_vertices)}
    while True:
        sig = {}
        for v in c.vertex_ids():
            around = []
            for e in c.edges:
                for a, b in (e.ends, e.ends[::-1]):
                    if a == v:
                        around.append((_lenkey(e.length), colors[b]))
            sig[v] = (colors[v], infinite.get(v, -1), tuple(sorted(around)))
        palette = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: palette[sig[v]] for v in sig}
        if new == colors:
            return colors
        colors = new


def tropical_isomorphic(c1: TropicalCurve, c2: TropicalCurve) -> bool:
    """Isomorphism of metric graphs matching edge lengths and the order of
    the infinite vertices."""
    if (len(c1.finite_vertices) != len(c2.finite_vertices)
            or len(c1.infinite_vertices) != len(c2.infinite_vertices)
            or len(c1.edges) != len(c2.edges)):
        return False
    col1 = _refine_colors(c1, {v: 0 for v in c1.vertex_ids()})
    col2 = _refine_colors(c2, {v: 0 for v in c2.vertex_ids()})
    if sorted(col1.values()) != sorted(col2.values()):
        return False

    def edge_multiset(c, u, v):
        return sorted((e.length for e in c.edges
                       if set(e.ends) == {u, v} or (u == v and e.ends == (u, u))),
                      key=_lenkey)

    mapping = dict(zip(c1.infinite_vertices, c2.infinite_vertices))
    for a, b in mapping.items():
        if col1[a] != col2[b]:
            return False
    free1 = [v for v in sorted(c1.finite_vertices)]
    used = set(mapping.values())

    def consistent(a, b):
        for x, y in mapping.items():
            if edge_multiset(c1, a, x) != edge_multiset(c2, b, y):
                return False
        return edge_multiset(c1, a, a) == edge_multiset(c2, b, b)

    def backtrack(k):
        if k == len(free1):
            return True
        a = free1[k]
        for b in sorted(c2.finite_vertices):
            if b in used or col1[a] != col2[b] or not consistent(a, b):
                continue
            mapping[a] = b
            used.add(b)
            if backtrack(k + 1):
                return True
            del mapping[a]
            used.discard(b)
        return False

    return backtrack(0)

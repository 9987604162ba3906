"""Metric trees: a finite core of weighted edges plus declared ends.

Each end is an infinite half-line glued to the core at its anchor vertex, and
the boundary at infinity is exactly the set of declared ends.  Core leaves
without an end are allowed; segments pointing into them cannot be extended,
which is how a non-geodesically-complete space shows up.

Raw points are tuples in canonical form::

    ("v", vertex)            a core vertex
    ("e", k, s)              interior of edge k, offset 0 < s < length from edges[k][0]
    ("x", end, s)            on an end, at distance s > 0 from its anchor
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import DegenerateSegment, InvalidPoint, InvalidSpace, POINT_TOL, UnknownEnd
from .base import ModelSpace


@dataclass(frozen=True)
class TreeDescription:
    vertices: tuple
    edges: tuple  # (u, v, length)
    ends: tuple = field(default=())  # (end id, anchor vertex)


class MetricTree(ModelSpace):
    kind = "tree"

    def __init__(self, vertices, edges, ends=(), basepoint=None):
        self.description = TreeDescription(
            tuple(str(v) for v in vertices),
            tuple((str(u), str(v), float(L)) for u, v, L in edges),
            tuple((str(e), str(a)) for e, a in ends))
        self._build()
        self.base = basepoint if basepoint is not None else ("v", self.vertices[0])
        if not self.contains(self.base):
            raise InvalidSpace(f"bad basepoint {basepoint!r}")

    def _build(self):
        desc = self.description
        if not desc.vertices:
            raise InvalidSpace("a tree needs at least one vertex")
        if len(set(desc.vertices)) != len(desc.vertices):
            raise InvalidSpace("duplicate vertex identifiers")
        self.vertices = tuple(sorted(desc.vertices))
        self.adj = {v: [] for v in self.vertices}
        self.edges = desc.edges
        self.edge_between = {}
        for k, (u, v, L) in enumerate(self.edges):
            if u not in self.adj or v not in self.adj:
                raise InvalidSpace(f"edge {u}-{v} uses an undeclared vertex")
            if u == v or not L > 0:
                raise InvalidSpace(f"edge {u}-{v} must join distinct vertices with positive length")
            if (u, v) in self.edge_between:
                raise InvalidSpace(f"duplicate edge {u}-{v}")
            self.adj[u].append((v, k, L))
            self.adj[v].append((u, k, L))
            self.edge_between[(u, v)] = k
            self.edge_between[(v, u)] = k
        if len(self.edges) != len(self.vertices) - 1:
            raise InvalidSpace("edge graph is not a tree (wrong edge count)")
        # all-pairs distances and next hops by DFS from every vertex
        self.D, self.nxt = {}, {}
        for src in self.vertices:
            dist, hop = {src: 0.0}, {src: src}
            stack = [src]
            while stack:
                u = stack.pop()
                for w, _, L in self.adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + L
                        hop[w] = w if u == src else hop[u]
                        stack.append(w)
            if len(dist) != len(self.vertices):
                raise InvalidSpace("edge graph is not connected")
            self.D[src], self.nxt[src] = dist, hop
        self.anchor = {}
        for e, a in desc.ends:
            if e in self.anchor:
                raise InvalidSpace(f"duplicate end identifier {e!r}")
            if a not in self.adj:
                raise InvalidSpace(f"end {e!r} anchored at undeclared vertex {a!r}")
            self.anchor[e] = a
        self.end_ids = tuple(sorted(self.anchor))

    def __repr__(self):
        return f"MetricTree({len(self.vertices)} vertices, ends={list(self.end_ids)})"

    # --- point constructors ------------------------------------------
    def vertex(self, v):
        if v not in self.adj:
            raise InvalidPoint(f"unknown vertex {v!r}")
        return ("v", v)

    def on_edge(self, u, v, s):
        """Point at distance ``s`` from ``u`` along the edge ``u``-``v``."""
        k = self.edge_between.get((u, v))
        if k is None:
            raise InvalidPoint(f"no edge {u}-{v}")
        L = self.edges[k][2]
        if not -POINT_TOL <= s <= L + POINT_TOL:
            raise InvalidPoint(f"offset {s} outside [0, {L}]")
        return self._make(("e", k), s if self.edges[k][0] == u else L - s)

    def on_end(self, e, s):
        if e not in self.anchor:
            raise UnknownEnd(f"undeclared end {e!r}")
        if s < -POINT_TOL:
            raise InvalidPoint("distance along an end must be nonnegative")
        return self._make(("x", e), s)

    def _make(self, seg, o):
        kind, ref = seg
        if kind == "e":
            u, v, L = self.edges[ref]
            if o <= POINT_TOL:
                return ("v", u)
            if o >= L - POINT_TOL:
                return ("v", v)
            return ("e", ref, o)
        if o <= POINT_TOL:
            return ("v", self.anchor[ref])
        return ("x", ref, o)

    def contains(self, p):
        if not isinstance(p, tuple) or not p:
            return False
        if p[0] == "v":
            return len(p) == 2 and p[1] in self.adj
        if p[0] == "e":
            return (len(p) == 3 and isinstance(p[1], int) and 0 <= p[1] < len(self.edges)
                    and 0.0 < p[2] < self.edges[p[1]][2])
        if p[0] == "x":
            return len(p) == 3 and p[1] in self.anchor and p[2] > 0.0 and p[2] < float("inf")
        return False

    # --- metric ---------------------------------------------------------
    def _anchors(self, p):
        kind = p[0]
        if kind == "v":
            return ((p[1], 0.0),)
        if kind == "e":
            u, v, L = self.edges[p[1]]
            return ((u, p[2]), (v, L - p[2]))
        return ((self.anchor[p[1]], p[2]),)

    def _vdist(self, v, q):
        Dv = self.D[v]
        return min(Dv[w] + dq for w, dq in self._anchors(q))

    def _same_segment(self, p, q):
        return p[0] == q[0] and p[0] != "v" and p[1] == q[1]

    def dist(self, p, q):
        if self._same_segment(p, q):
            return abs(p[2] - q[2])
        return min(dp + self._vdist(v, q) for v, dp in self._anchors(p))

    def _path(self, p, q):
        """Waypoints from p to q; consecutive waypoints share a closed segment."""
        if self._same_segment(p, q) or p == q:
            return [p, q]
        best = None
        for a, da in self._anchors(p):
            for b, db in self._anchors(q):
                c = da + self.D[a][b] + db
                if best is None or c < best[0]:
                    best = (c, a, b)
        _, a, b = best
        pts = [p, ("v", a)]
        while a != b:
            a = self.nxt[a][b]
            pts.append(("v", a))
        pts.append(q)
        out = [pts[0]]
        for w in pts[1:]:
            if w != out[-1]:
                out.append(w)
        return out

    def _offsets(self, p):
        """(segment, offset) pairs of the closed segments containing p."""
        kind = p[0]
        if kind == "e":
            return [(("e", p[1]), p[2])]
        if kind == "x":
            return [(("x", p[1]), p[2])]
        v = p[1]
        out = [(("e", k), 0.0 if self.edges[k][0] == v else L) for _, k, L in self.adj[v]]
        out.extend((("x", e), 0.0) for e in self.end_ids if self.anchor[e] == v)
        return out

    def _common(self, P, Q):
        op = dict(self._offsets(P))
        for seg, oq in self._offsets(Q):
            if seg in op:
                return seg, op[seg], oq
        raise AssertionError(f"{P} and {Q} share no segment")

    def _walk(self, p, q, t):
        pts = self._path(p, q)
        for P, Q in zip(pts, pts[1:]):
            seg, oP, oQ = self._common(P, Q)
            L = abs(oQ - oP)
            if t <= L:
                return self._make(seg, oP + (t if oQ > oP else -t))
            t -= L
        return q

    def geodesic(self, a, b, t, d=None):
        if t <= 0.0:
            return a
        return self._walk(a, b, t)

    # --- boundary -------------------------------------------------------
    def check_ideal(self, xi):
        if xi not in self.anchor:
            raise UnknownEnd(f"undeclared end {xi!r}")

    def ray(self, p, e, t):
        if p[0] == "x" and p[1] == e:
            return ("x", e, p[2] + t)
        target = ("v", self.anchor[e])
        d0 = self.dist(p, target)
        if t >= d0:
            return self._make(("x", e), t - d0)
        return self._walk(p, target, t)

    def tits(self, xi, eta):
        return 0.0 if xi == eta else 3.141592653589793

    def same_ideal(self, xi, eta):
        return xi == eta

    def horo(self, e, p):
        if p[0] == "x" and p[1] == e:
            return -p[2]
        return self._vdist(self.anchor[e], p)

    def _component(self, start, banned_edge):
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w, k, _ in self.adj[u]:
                if k != banned_edge and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def extensions(self, x, y):
        """Ends whose ray from x passes through y, sorted lexicographically."""
        if self.dist(x, y) <= POINT_TOL:
            raise DegenerateSegment("segment endpoints coincide")
        pts = self._path(x, y)
        seg, o_prev, o_y = self._common(pts[-2], y)
        kind, ref = seg
        if kind == "x":
            if o_y > o_prev:
                return [ref]
            return [e for e in self.end_ids if e != ref]
        u, v, _ = self.edges[ref]
        region = self._component(v if o_y > o_prev else u, ref)
        return [e for e in self.end_ids if self.anchor[e] in region]

    def off_support(self, atoms):
        rest = [e for e in self.end_ids if e not in set(atoms)]
        return rest[0] if rest else None

    # --- sampling -------------------------------------------------------
    def random_point(self, rng, scale=3.0):
        n_seg = len(self.edges) + len(self.end_ids)
        if n_seg == 0 or rng.uniform() < 0.1:
            return ("v", self.vertices[int(rng.integers(len(self.vertices)))])
        j = int(rng.integers(n_seg))
        if j < len(self.edges):
            return self._make(("e", j), float(rng.uniform(0.0, self.edges[j][2])))
        return self._make(("x", self.end_ids[j - len(self.edges)]), float(rng.uniform(0.0, scale)))

    def random_ideal(self, rng):
        return self.end_ids[int(rng.integers(len(self.end_ids)))]

"""SVG 1.1 drawings of polygons and their configurations.

Euclidean planes are drawn in native coordinates, the hyperbolic plane on the
Poincare disk with geodesic edges as circular arcs, and trees with a
deterministic radial layout.
"""

from __future__ import annotations

import math

from .core import UnsupportedSpace
from .spaces import Euclidean, Hyperbolic2, MetricTree

SIZE = 480
PAD = 24
EDGE = "#1f5fa8"
IDEAL = "#c0392b"
SKELETON = "#999999"


def _f(x):
    return f"{x:.6f}"


class _Canvas:
    def __init__(self, title):
        self.parts = []
        self.title = title

    def add(self, s):
        self.parts.append(s)

    def line(self, a, b, color, width=1.5):
        self.add(f'<line x1="{_f(a[0])}" y1="{_f(a[1])}" x2="{_f(b[0])}" y2="{_f(b[1])}" '
                 f'stroke="{color}" stroke-width="{width}"/>')

    def dot(self, a, color, r=3.0):
        self.add(f'<circle cx="{_f(a[0])}" cy="{_f(a[1])}" r="{r}" fill="{color}"/>')

    def text(self, a, s, size=11):
        self.add(f'<text x="{_f(a[0] + 4)}" y="{_f(a[1] - 4)}" font-size="{size}" '
                 f'font-family="sans-serif">{s}</text>')

    def svg(self):
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">\n'
                f'<title>{self.title}</title>\n'
                f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>\n')
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _fit(points):
    """Affine map from world coordinates onto the canvas, y pointing up."""
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    w = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    s = (SIZE - 2 * PAD) / w
    cx, cy = 0.5 * (max(xs) + min(xs)), 0.5 * (max(ys) + min(ys))
    return lambda p: (SIZE / 2 + s * (p[0] - cx), SIZE / 2 - s * (p[1] - cy))


def _euclidean(space, verts, ideals, title):
    if space.dimension != 2:
        raise UnsupportedSpace("only the Euclidean plane can be drawn")
    cv = _Canvas(title)
    to = _fit(verts + [(0.0, 0.0)])
    n = len(verts)
    for i in range(n):
        cv.line(to(verts[i]), to(verts[(i + 1) % n]), EDGE)
    for i, v in enumerate(verts):
        cv.dot(to(v), EDGE)
        cv.text(to(v), f"x{i + 1}")
    # configuration directions as a compass in the corner
    c = (PAD + 30, SIZE - PAD - 30)
    for u in ideals:
        cv.line(c, (c[0] + 26 * u[0], c[1] - 26 * u[1]), IDEAL, 1.0)
    return cv.svg()


def _h2_arc(p, q):
    """SVG path data for the geodesic from p to q in the unit disk (screen y already flipped)."""
    cross = p[0] * q[1] - p[1] * q[0]
    if abs(cross) < 1e-12:
        return f"M {_f(p[0])} {_f(p[1])} L {_f(q[0])} {_f(q[1])}"
    # circle through p, q and the inversion of p
    n2 = p[0] ** 2 + p[1] ** 2
    ip = (p[0] / n2, p[1] / n2) if n2 > 1e-24 else None
    if ip is None:
        return f"M {_f(p[0])} {_f(p[1])} L {_f(q[0])} {_f(q[1])}"
    ax, ay = p
    bx, by = q
    cx_, cy_ = ip
    d = 2 * (ax * (by - cy_) + bx * (cy_ - ay) + cx_ * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy_) + (bx**2 + by**2) * (cy_ - ay) + (cx_**2 + cy_**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx_ - bx) + (bx**2 + by**2) * (ax - cx_) + (cx_**2 + cy_**2) * (bx - ax)) / d
    rad = math.hypot(ax - ux, ay - uy)
    sweep = 1 if (ax - ux) * (by - uy) - (ay - uy) * (bx - ux) > 0 else 0
    return f"M {_f(ax)} {_f(ay)} A {_f(rad)} {_f(rad)} 0 0 {sweep} {_f(bx)} {_f(by)}"


def _hyperbolic(space, verts, ideals, title):
    cv = _Canvas(title)
    R = SIZE / 2 - PAD
    c = SIZE / 2
    cv.add(f'<circle cx="{c}" cy="{c}" r="{_f(R)}" fill="none" stroke="{SKELETON}"/>')
    # work in unit-disk coordinates with y flipped, then scale via a transform
    disk = [Hyperbolic2.disk(v) for v in verts]
    disk = [(x, -y) for x, y in disk]
    n = len(disk)
    paths = [_h2_arc(disk[i], disk[(i + 1) % n]) for i in range(n)]
    cv.add(f'<g transform="translate({c} {c}) scale({_f(R)})" fill="none" stroke="{EDGE}" '
           f'stroke-width="{_f(1.5 / R)}">')
    for d in paths:
        cv.add(f'<path d="{d}"/>')
    cv.add("</g>")
    for i, (x, y) in enumerate(disk):
        cv.dot((c + R * x, c + R * y), EDGE)
        cv.text((c + R * x, c + R * y), f"x{i + 1}")
    for b in ideals:
        cv.dot((c + R * math.cos(b), c - R * math.sin(b)), IDEAL, 4.0)
    return cv.svg()


def tree_layout(space: MetricTree):
    """Deterministic radial embedding: vertex -> (x, y); ends get unit directions."""
    root = space.base[1] if space.base[0] == "v" else space.vertices[0]
    children, order, parent = {}, [root], {root: None}
    for u in order:
        kids = sorted(w for w, _, _ in space.adj[u] if w != parent[u])
        children[u] = kids
        for w in kids:
            parent[w] = u
            order.append(w)
    ends_at = {}
    for e in space.end_ids:
        ends_at.setdefault(space.anchor[e], []).append(e)
    leaves = {}
    for u in reversed(order):
        leaves[u] = max(1, sum(leaves[w] for w in children[u]) + len(ends_at.get(u, ())))
    pos, end_dir = {root: (0.0, 0.0)}, {}
    lengths = {}
    for a, b, L in space.edges:
        lengths[(a, b)] = lengths[(b, a)] = L

    def place(u, lo, hi):
        span = hi - lo
        slots = [(w, leaves[w]) for w in children[u]] + [(e, 1) for e in ends_at.get(u, ())]
        total = sum(k for _, k in slots) or 1
        a = lo
        for ref, k in slots:
            mid = a + 0.5 * span * k / total
            if ref in children[u]:
                L = lengths[(u, ref)]
                pos[ref] = (pos[u][0] + L * math.cos(mid), pos[u][1] + L * math.sin(mid))
                place(ref, a, a + span * k / total)
            else:
                end_dir[ref] = (math.cos(mid), math.sin(mid))
            a += span * k / total

    place(root, 0.0, 2.0 * math.pi)
    return pos, end_dir


def _tree_xy(space, pos, end_dir, p, reach):
    kind = p[0]
    if kind == "v":
        return pos[p[1]]
    if kind == "e":
        u, v, L = space.edges[p[1]]
        s = p[2] / L
        return (pos[u][0] + s * (pos[v][0] - pos[u][0]), pos[u][1] + s * (pos[v][1] - pos[u][1]))
    a = pos[space.anchor[p[1]]]
    d = end_dir[p[1]]
    # ends are drawn with a compressed scale so far points stay on the canvas
    s = reach * math.tanh(p[2] / reach)
    return (a[0] + s * d[0], a[1] + s * d[1])


def _tree(space, verts, ideals, title):
    pos, end_dir = tree_layout(space)
    span = max([math.hypot(*xy) for xy in pos.values()] + [1.0])
    reach = 0.6 * span
    world = list(pos.values()) + [(pos[space.anchor[e]][0] + reach * d[0],
                                   pos[space.anchor[e]][1] + reach * d[1]) for e, d in end_dir.items()]
    to = _fit(world)
    cv = _Canvas(title)
    for u, v, _ in space.edges:
        cv.line(to(pos[u]), to(pos[v]), SKELETON, 1.0)
    for e, d in sorted(end_dir.items()):
        a = pos[space.anchor[e]]
        tip = (a[0] + reach * d[0], a[1] + reach * d[1])
        cv.line(to(a), to(tip), SKELETON, 1.0)
        cv.dot(to(tip), IDEAL if e in ideals else SKELETON, 4.0)
        cv.text(to(tip), e)
    for v in space.vertices:
        cv.dot(to(pos[v]), SKELETON, 2.0)
    n = len(verts)
    for i in range(n):
        way = space._path(verts[i], verts[(i + 1) % n])
        pts = [to(_tree_xy(space, pos, end_dir, w, reach)) for w in way]
        cv.add(f'<polyline points="{" ".join(_f(x) + "," + _f(y) for x, y in pts)}" '
               f'fill="none" stroke="{EDGE}" stroke-width="2" stroke-opacity="0.7"/>')
    for i, v in enumerate(verts):
        xy = to(_tree_xy(space, pos, end_dir, v, reach))
        cv.dot(xy, EDGE)
        cv.text(xy, f"x{i + 1}")
    return cv.svg()


def can_render(space) -> bool:
    return (isinstance(space, Euclidean) and space.dimension == 2) or isinstance(space, (Hyperbolic2, MetricTree))


def render_svg(space, vertices, ideals, title="gaussmap") -> str:
    """SVG text for a polygon (raw vertex coordinates) and its configuration's ideal data."""
    if isinstance(space, Euclidean):
        return _euclidean(space, list(vertices), list(ideals), title)
    if isinstance(space, Hyperbolic2):
        return _hyperbolic(space, list(vertices), list(ideals), title)
    if isinstance(space, MetricTree):
        return _tree(space, list(vertices), list(ideals), title)
    raise UnsupportedSpace(f"no SVG rendering for {space!r}")

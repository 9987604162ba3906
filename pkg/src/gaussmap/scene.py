"""Reader for the line-oriented ``gaussmap-scene v1`` text format.

A scene is a header line followed by ``[section]`` blocks of ``key = value``
entries; keys may repeat.  ``#`` starts a comment.  See ``scenes/README.md``
for the grammar and per-space token syntax.  The same token syntax is used to
print points and ideal points in reports and CSV files, so everything printed
can be read back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .core import GaussMapError, IdealPoint, Point, WeightedConfiguration
from .projection import FactorSlice, GeodesicLine, GeodesicSegment, Subtree
from .spaces import Euclidean, Hyperbolic2, MetricTree, Product

HEADER = "gaussmap-scene v1"
SECTIONS = ("space", "config", "options", "subset", "projection")


class SceneError(GaussMapError):
    exit_code = 64

    def __init__(self, message, line=None, field=None, source=None):
        self.message, self.line, self.field, self.source = message, line, field, source
        super().__init__(str(self))

    def __str__(self):
        loc = []
        if self.source:
            loc.append(str(self.source))
        if self.line is not None:
            loc.append(f"line {self.line}")
        if self.field:
            loc.append(f"field '{self.field}'")
        return (": ".join([", ".join(loc), self.message]) if loc else self.message)


class SceneSyntaxError(SceneError):
    exit_code = 64


class SceneValidationError(SceneError):
    exit_code = 65


@dataclass
class Entry:
    line: int
    key: str
    value: str


@dataclass
class Section:
    name: str
    arg: str | None
    line: int
    entries: list = field(default_factory=list)

    def get(self, key):
        return [e for e in self.entries if e.key == key]

    def one(self, key, required=True):
        es = self.get(key)
        if len(es) > 1:
            raise SceneSyntaxError("key given more than once", es[1].line, key)
        if not es:
            if required:
                raise SceneSyntaxError(f"[{self.name}] needs '{key}'", self.line, key)
            return None
        return es[0]


@dataclass(frozen=True)
class SceneOptions:
    eps_fix: float | None = None
    eps_cls: float | None = None
    max_iter: int | None = None
    r_max: float | None = None
    seed: int | None = None
    x0: Point | None = None


@dataclass(frozen=True)
class ProjectionTask:
    subset: object
    eta: IdealPoint
    o: Point | None = None
    grid: tuple | None = None


@dataclass(frozen=True)
class Scene:
    space: object
    configuration: WeightedConfiguration | None
    options: SceneOptions
    projection: ProjectionTask | None = None
    name: str = ""


# --- lexing -----------------------------------------------------------------

def split_sections(text: str, source=None):
    lines = text.splitlines()
    n = 0
    for n, raw in enumerate(lines, 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            if s != HEADER:
                raise SceneSyntaxError(f"expected header '{HEADER}'", n, None, source)
            break
    else:
        raise SceneSyntaxError(f"empty scene, expected header '{HEADER}'", None, None, source)
    sections, cur = [], None
    for k in range(n + 1, len(lines) + 1):
        s = lines[k - 1].split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise SceneSyntaxError("unterminated section header", k, None, source)
            parts = s[1:-1].split()
            if not parts or parts[0] not in SECTIONS or len(parts) > 2:
                raise SceneSyntaxError(f"unknown section {s}", k, None, source)
            cur = Section(parts[0], parts[1] if len(parts) == 2 else None, k)
            sections.append(cur)
            continue
        if "=" not in s:
            raise SceneSyntaxError("expected 'key = value'", k, None, source)
        if cur is None:
            raise SceneSyntaxError("entry outside any section", k, None, source)
        key, value = (t.strip() for t in s.split("=", 1))
        if not key:
            raise SceneSyntaxError("missing key", k, None, source)
        cur.entries.append(Entry(k, key, value))
    return sections


def _num(tok, e: Entry, what="number"):
    try:
        x = float(tok)
    except ValueError:
        raise SceneSyntaxError(f"{tok!r} is not a {what}", e.line, e.key) from None
    if not math.isfinite(x):
        raise SceneValidationError(f"{what} must be finite", e.line, e.key)
    return x


def _int(tok, e: Entry):
    try:
        return int(tok)
    except ValueError:
        raise SceneSyntaxError(f"{tok!r} is not an integer", e.line, e.key) from None


# --- token syntax for points and ideal points ------------------------------

def parse_point(space, text: str, e: Entry):
    toks = text.split()
    if isinstance(space, Product):
        if text.count(";") != 1:
            raise SceneSyntaxError("product point is 'A-point ; B-point'", e.line, e.key)
        a, b = text.split(";")
        return (parse_point(space.a, a, e), parse_point(space.b, b, e))
    if isinstance(space, Euclidean):
        if toks and toks[0] == "at":
            toks = toks[1:]
        if len(toks) != space.dimension:
            raise SceneSyntaxError(f"expected {space.dimension} coordinates", e.line, e.key)
        return tuple(_num(t, e) for t in toks)
    if isinstance(space, Hyperbolic2):
        if len(toks) == 3 and toks[0] == "polar":
            r, phi = _num(toks[1], e), _num(toks[2], e)
            if r < 0:
                raise SceneValidationError("polar radius must be nonnegative", e.line, e.key)
            return space.polar(r, phi)
        if len(toks) == 4 and toks[0] == "hyperboloid":
            try:
                return space.from_hyperboloid(*(_num(t, e) for t in toks[1:]))
            except SceneError:
                raise
            except GaussMapError as err:
                raise SceneValidationError(str(err), e.line, e.key) from None
        raise SceneSyntaxError("H2 point is 'polar r phi' or 'hyperboloid x0 x1 x2'", e.line, e.key)
    if isinstance(space, MetricTree):
        try:
            if len(toks) == 2 and toks[0] == "vertex":
                return space.vertex(toks[1])
            if len(toks) == 4 and toks[0] == "edge":
                return space.on_edge(toks[1], toks[2], _num(toks[3], e))
            if len(toks) == 3 and toks[0] == "end":
                return space.on_end(toks[1], _num(toks[2], e))
        except SceneError:
            raise
        except GaussMapError as err:
            raise SceneValidationError(str(err), e.line, e.key) from None
        raise SceneSyntaxError("tree point is 'vertex v', 'edge u v s' or 'end e s'", e.line, e.key)
    raise SceneSyntaxError(f"no point syntax for {space!r}", e.line, e.key)


def parse_ideal(space, text: str, e: Entry):
    toks = text.split()
    if isinstance(space, Product):
        parts = [p.strip() for p in text.split(";")]
        head = parts[0].split()
        if len(parts) != 3 or len(head) != 2 or head[0] != "theta":
            raise SceneSyntaxError("product ideal is 'theta t ; A-ideal|- ; B-ideal|-'", e.line, e.key)
        theta = _num(head[1], e)
        xa = None if parts[1] == "-" else parse_ideal(space.a, parts[1], e)
        xb = None if parts[2] == "-" else parse_ideal(space.b, parts[2], e)
        if not 0.0 <= theta <= 0.5 * math.pi:
            raise SceneValidationError("theta must lie in [0, pi/2]", e.line, e.key)
        if 0.0 < theta < 0.5 * math.pi and (xa is None or xb is None):
            raise SceneValidationError("interior theta needs both factor ideals", e.line, e.key)
        if theta == 0.0 and xa is None or theta == 0.5 * math.pi and xb is None:
            raise SceneValidationError("missing factor ideal at a pole", e.line, e.key)
        return space.join(theta, xa, xb)
    if isinstance(space, Euclidean):
        if len(toks) == 2 and toks[0] == "angle" and space.dimension == 2:
            return space.direction(_num(toks[1], e))
        if toks and toks[0] == "dir" and len(toks) == space.dimension + 1:
            try:
                return space.direction(*(_num(t, e) for t in toks[1:]))
            except SceneError:
                raise
            except GaussMapError as err:
                raise SceneValidationError(str(err), e.line, e.key) from None
        raise SceneSyntaxError("Euclidean ideal is 'dir v1 .. vn' or 'angle a' in E^2", e.line, e.key)
    if isinstance(space, Hyperbolic2):
        if len(toks) == 2 and toks[0] == "angle":
            return space.boundary(_num(toks[1], e))
        raise SceneSyntaxError("H2 ideal is 'angle beta'", e.line, e.key)
    if isinstance(space, MetricTree):
        if len(toks) == 2 and toks[0] == "end":
            if toks[1] not in space.anchor:
                raise SceneValidationError(f"undeclared end {toks[1]!r}", e.line, e.key)
            return toks[1]
        raise SceneSyntaxError("tree ideal is 'end e'", e.line, e.key)
    raise SceneSyntaxError(f"no ideal syntax for {space!r}", e.line, e.key)


def g17(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def format_point(space, p) -> str:
    if isinstance(space, Product):
        return f"{format_point(space.a, p[0])} ; {format_point(space.b, p[1])}"
    if isinstance(space, Euclidean):
        return " ".join(g17(x) for x in p)
    if isinstance(space, Hyperbolic2):
        return f"polar {g17(p[0])} {g17(p[1])}"
    if p[0] == "v":
        return f"vertex {p[1]}"
    if p[0] == "e":
        u, v, _ = space.edges[p[1]]
        return f"edge {u} {v} {g17(p[2])}"
    return f"end {p[1]} {g17(p[2])}"


def format_ideal(space, xi) -> str:
    if isinstance(space, Product):
        a = "-" if xi[1] is None else format_ideal(space.a, xi[1])
        b = "-" if xi[2] is None else format_ideal(space.b, xi[2])
        return f"theta {g17(xi[0])} ; {a} ; {b}"
    if isinstance(space, Euclidean):
        return "dir " + " ".join(g17(x) for x in xi)
    if isinstance(space, Hyperbolic2):
        return f"angle {g17(xi)}"
    return f"end {xi}"


# --- building ---------------------------------------------------------------

def _build_space(sec: Section, named: dict, depth=0):
    kind = sec.one("kind").value
    try:
        if kind == "euclidean":
            e = sec.one("dimension")
            n = _int(e.value, e)
            if n < 1:
                raise SceneValidationError("dimension must be positive", e.line, e.key)
            space = Euclidean(n)
        elif kind == "hyperbolic":
            space = Hyperbolic2()
        elif kind == "tree":
            verts = [v for e in sec.get("vertex") for v in e.value.split()]
            edges = []
            for e in sec.get("edge"):
                t = e.value.split()
                if len(t) != 3:
                    raise SceneSyntaxError("edge is 'u v length'", e.line, e.key)
                edges.append((t[0], t[1], _num(t[2], e)))
            ends = []
            for e in sec.get("end"):
                t = e.value.split()
                if len(t) != 2:
                    raise SceneSyntaxError("end is 'id anchor-vertex'", e.line, e.key)
                ends.append((t[0], t[1]))
            space = MetricTree(verts, edges, ends)
        elif kind == "product":
            if depth:
                raise SceneValidationError("products of products are not supported", sec.line, "kind")
            e = sec.one("factors")
            names = e.value.split()
            if len(names) != 2:
                raise SceneSyntaxError("factors lists two [space NAME] sections", e.line, e.key)
            facs = []
            for nm in names:
                if nm not in named:
                    raise SceneSyntaxError(f"no section [space {nm}]", e.line, e.key)
                facs.append(_build_space(named[nm], named, depth + 1))
            space = Product(*facs)
        else:
            raise SceneSyntaxError(f"unknown space kind {kind!r}", sec.one("kind").line, "kind")
    except SceneError:
        raise
    except GaussMapError as err:
        raise SceneValidationError(str(err), sec.line, "space") from None
    bp = sec.one("basepoint", required=False)
    if bp is not None:
        raw = parse_point(space, bp.value, bp)
        try:
            Point(space, raw)
        except GaussMapError as err:
            raise SceneValidationError(str(err), bp.line, bp.key) from None
        space.base = raw
    return space


def _build_config(sec: Section, space):
    pts, ws = [], []
    for e in sec.entries:
        if e.key != "ideal":
            raise SceneSyntaxError("unknown key in [config]", e.line, e.key)
        if "@" not in e.value:
            raise SceneSyntaxError("ideal is 'weight @ tokens'", e.line, e.key)
        w, tok = e.value.split("@", 1)
        w = _num(w.strip(), e, "weight")
        if not w > 0.0:
            raise SceneValidationError(f"weight {w!r} must be positive", e.line, "weight")
        pts.append(IdealPoint(space, parse_ideal(space, tok, e)))
        ws.append(w)
    if not pts:
        raise SceneValidationError("configuration has no ideal points", sec.line, "ideal")
    return WeightedConfiguration(tuple(pts), tuple(ws))


def _build_options(sec: Section | None, space):
    if sec is None:
        return SceneOptions()
    kw = {}
    for e in sec.entries:
        if e.key in ("eps_fix", "eps_cls", "r_max"):
            x = _num(e.value, e)
            if x <= 0:
                raise SceneValidationError("must be positive", e.line, e.key)
            kw[e.key] = x
        elif e.key in ("max_iter", "seed"):
            x = _int(e.value, e)
            if x < 0:
                raise SceneValidationError("must be nonnegative", e.line, e.key)
            kw[e.key] = x
        elif e.key == "x0":
            kw["x0"] = Point(space, parse_point(space, e.value, e))
        else:
            raise SceneSyntaxError("unknown option", e.line, e.key)
    return SceneOptions(**kw)


def _build_subset(sec: Section, space):
    e = sec.one("kind")
    kind = e.value
    try:
        if kind == "line":
            if isinstance(space, Hyperbolic2):
                ends = sec.get("end")
                if len(ends) != 2:
                    raise SceneSyntaxError("an H2 line needs two 'end' entries", sec.line, "end")
                return GeodesicLine(space, ends=tuple(parse_ideal(space, x.value, x) for x in ends))
            p, d = sec.one("point"), sec.one("direction")
            return GeodesicLine(space, point=parse_point(space, p.value, p),
                                direction=parse_ideal(space, d.value, d))
        if kind == "segment":
            p, q = sec.one("p"), sec.one("q")
            return GeodesicSegment(space, parse_point(space, p.value, p), parse_point(space, q.value, q))
        if kind == "subtree":
            verts = [v for x in sec.get("vertex") for v in x.value.split()]
            ends = [v for x in sec.get("end") for v in x.value.split()]
            return Subtree(space, frozenset(verts), frozenset(ends))
        if kind == "slice":
            y = sec.one("y0")
            if not isinstance(space, Product):
                raise SceneValidationError("slices need a product space", y.line, y.key)
            return FactorSlice(space, parse_point(space.b, y.value, y))
    except SceneError:
        raise
    except GaussMapError as err:
        raise SceneValidationError(str(err), sec.line, "subset") from None
    raise SceneSyntaxError(f"unknown subset kind {kind!r}", e.line, e.key)


def _build_projection(sec: Section, subset, space):
    e = sec.one("eta")
    eta = IdealPoint(space, parse_ideal(space, e.value, e))
    o = sec.one("o", required=False)
    o = Point(space, parse_point(space, o.value, o)) if o is not None else None
    g = sec.one("grid", required=False)
    grid = tuple(_num(t, g) for t in g.value.split()) if g is not None else None
    if grid is not None and (len(grid) < 2 or min(grid) <= 0):
        raise SceneValidationError("grid needs at least two positive times", g.line, g.key)
    return ProjectionTask(subset, eta, o, grid)


def parse_scene(text: str, source=None) -> Scene:
    try:
        secs = split_sections(text, source)
        tops = [s for s in secs if s.name == "space" and s.arg is None]
        named = {s.arg: s for s in secs if s.name == "space" and s.arg is not None}
        if len(tops) != 1:
            raise SceneSyntaxError("exactly one unnamed [space] section is required",
                                   tops[1].line if len(tops) > 1 else None)

        def single(name):
            found = [s for s in secs if s.name == name]
            if len(found) > 1:
                raise SceneSyntaxError(f"duplicate [{name}] section", found[1].line)
            return found[0] if found else None

        space = _build_space(tops[0], named)
        cfg = single("config")
        config = _build_config(cfg, space) if cfg is not None else None
        options = _build_options(single("options"), space)
        proj = single("projection")
        sub = single("subset")
        task = None
        if proj is not None:
            if sub is None:
                raise SceneSyntaxError("[projection] needs a [subset] section", proj.line)
            task = _build_projection(proj, _build_subset(sub, space), space)
        elif sub is not None:
            raise SceneSyntaxError("[subset] without a [projection] section", sub.line)
    except SceneError as err:
        err.source = err.source or source
        raise
    name = Path(source).stem if source else ""
    return Scene(space, config, options, task, name)


def load_scene(path) -> Scene:
    path = Path(path)
    return parse_scene(path.read_text(), str(path))

"""Cycles in incidence graphs and replayable null-homotopy certificates.

A cycle is a closed walk in the incidence graph, stored as the list of its
elements with the base at both ends. Incidence is reflexive, so repeating an
element is a legal step. A certificate is a list of elementary moves, each an
insertion or deletion of a repetition, a return or a triangle, which turns
its initial cycle into its final cycle. Moves never touch position 0, so a
certificate for a sub-cycle can be replayed at an offset inside a longer one.

Move semantics at position ``pos`` with x = c[pos]:

* repetition insert: x -> x, x        delete: needs c[pos+1] == x
* return insert y:   x -> x, y, x     delete: needs c[pos+2] == x
* triangle insert:   x -> x, y, z, x  delete: needs c[pos+3] == x

The second half of the module turns the decomposition arguments for the
orthogonal geometries into certificate builders, and adds the homological
and covering-space checks used at toy scale.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field

from . import gf
from .cosetgeo import HypothesisFailed
from .orthospace import (MINUS, PLUS, OrthGeometry, Subspace, apply_matrix, classify_type,
                         image, intersect, is_isometry, is_nondegenerate, perp, radical)
from .pregeo import Pregeometry, basic_diagram, is_linear_diagram


class HomotopyError(ValueError):
    pass


class NotGeometric(HomotopyError):
    pass


class SearchExhausted(HomotopyError):
    pass


class TransporterNotFound(HomotopyError):
    pass


class CaseIIEncountered(HomotopyError):
    pass


class TooLarge(HomotopyError):
    pass


class CapExceeded(HomotopyError):
    pass


class InvalidCycle(HomotopyError):
    pass


class MoveError(HomotopyError):
    pass


REPETITION, RETURN, TRIANGLE = "repetition", "return", "triangle"
INSERT, DELETE = "insert", "delete"


# ---------------------------------------------------------------------------
# geometry access

class _Api:
    """Membership, type and incidence for ids of a Pregeometry or for the
    labels of a lazy geometry."""

    def __init__(self, geo):
        self.geo = geo
        if isinstance(geo, Pregeometry):
            n = len(geo)
            self.contains = lambda x: isinstance(x, int) and 0 <= x < n
            self.typ = lambda x: geo.typ[x]
            self.incident = geo.incident
        else:
            self.contains = geo.contains
            self.typ = geo.typ
            self.incident = geo.incident


def _api(geo):
    return geo if isinstance(geo, _Api) else _Api(geo)


# ---------------------------------------------------------------------------
# cycles and moves

@dataclass(frozen=True)
class Cycle:
    vertices: tuple

    def __init__(self, vertices):
        vs = tuple(vertices)
        if not vs:
            raise InvalidCycle("empty cycle")
        if vs[0] != vs[-1]:
            raise InvalidCycle("cycle is not closed")
        object.__setattr__(self, "vertices", vs)

    @property
    def base(self):
        return self.vertices[0]

    def __len__(self):
        return len(self.vertices) - 1

    def check(self, geo):
        check_cycle(self.vertices, geo)
        return True


def check_cycle(vertices, geo):
    api = _api(geo)
    vs = list(vertices)
    if not vs or vs[0] != vs[-1]:
        raise InvalidCycle("cycle is not closed")
    for i, v in enumerate(vs):
        if not api.contains(v):
            raise InvalidCycle(f"vertex {i} is not an element of the geometry")
    for i, (u, v) in enumerate(zip(vs, vs[1:])):
        if not api.incident(u, v):
            raise InvalidCycle(f"vertices {i} and {i + 1} are not incident")


@dataclass(frozen=True)
class ElementaryMove:
    kind: str
    dir: str
    pos: int
    verts: tuple

    def shifted(self, off):
        return ElementaryMove(self.kind, self.dir, self.pos + off, self.verts)

    def mapped(self, fn):
        return ElementaryMove(self.kind, self.dir, self.pos, tuple(fn(v) for v in self.verts))


def apply_move(c, mv, api=None):
    """The cycle after ``mv``; MoveError if the move is illegal.

    Without ``api`` only the positional side is checked (equal endpoints,
    recorded vertices); with it, insertions are checked for membership and
    incidence and deleted triangles for being genuine 3-cycles.
    """
    n = len(c)
    p = mv.pos
    if not 0 <= p < n:
        raise MoveError(f"position {p} outside a cycle of length {n}")
    x = c[p]
    vs = tuple(mv.verts)
    if mv.dir == INSERT:
        if api is not None:
            for v in vs:
                if not api.contains(v):
                    raise MoveError("inserted vertex is not an element")
        if mv.kind == REPETITION:
            if vs != (x,):
                raise MoveError("repetition must repeat the vertex at pos")
            return c[:p + 1] + [x] + c[p + 1:]
        if mv.kind == RETURN:
            if len(vs) != 1:
                raise MoveError("a return inserts one vertex")
            y = vs[0]
            if api is not None and not api.incident(x, y):
                raise MoveError("return vertex not incident")
            return c[:p + 1] + [y, x] + c[p + 1:]
        if mv.kind == TRIANGLE:
            if len(vs) != 2:
                raise MoveError("a triangle inserts two vertices")
            y, z = vs
            if api is not None and not (api.incident(x, y) and api.incident(y, z)
                                        and api.incident(z, x)):
                raise MoveError("inserted triangle is not a 3-cycle of the incidence graph")
            return c[:p + 1] + [y, z, x] + c[p + 1:]
        raise MoveError(f"unknown move kind {mv.kind!r}")
    if mv.dir != DELETE:
        raise MoveError(f"unknown direction {mv.dir!r}")
    if mv.kind == REPETITION:
        if p + 1 >= n or c[p + 1] != x or vs != (x,):
            raise MoveError("no repetition at pos")
        return c[:p + 1] + c[p + 2:]
    if mv.kind == RETURN:
        if p + 2 >= n or c[p + 2] != x or vs != (c[p + 1],):
            raise MoveError("no return at pos")
        return c[:p + 1] + c[p + 3:]
    if mv.kind == TRIANGLE:
        if p + 3 >= n or c[p + 3] != x or vs != (c[p + 1], c[p + 2]):
            raise MoveError("no triangle at pos")
        if api is not None and not (api.incident(x, vs[0]) and api.incident(vs[0], vs[1])
                                    and api.incident(vs[1], x)):
            raise MoveError("deleted triangle is not a 3-cycle of the incidence graph")
        return c[:p + 1] + c[p + 4:]
    raise MoveError(f"unknown move kind {mv.kind!r}")


# ---------------------------------------------------------------------------
# certificates

def encode_element(x):
    if isinstance(x, Subspace):
        return x.key()
    if isinstance(x, (frozenset, set)):
        return sorted((encode_element(y) for y in x), key=repr)
    if isinstance(x, tuple):
        return [encode_element(y) for y in x]
    return x


def element_decoder(geo):
    """Inverse of :func:`encode_element` for elements of ``geo``."""
    if isinstance(geo, Pregeometry):
        return int
    if isinstance(geo, OrthGeometry):
        q, N = geo.q, geo.f.dim
        return lambda rows: Subspace.span([tuple(r) for r in rows], q, N)
    return lambda x: x


@dataclass
class HomotopyCertificate:
    cycle: tuple
    moves: tuple
    final: tuple
    meta: dict = field(default_factory=dict)

    @property
    def base(self):
        return self.cycle[0]

    @property
    def is_null(self):
        return len(self.final) == 1 and self.final[0] == self.cycle[0]

    def __len__(self):
        return len(self.moves)

    def mapped(self, fn):
        """Every vertex replaced by fn(vertex), e.g. an automorphism."""
        return HomotopyCertificate(tuple(fn(v) for v in self.cycle),
                                   tuple(m.mapped(fn) for m in self.moves),
                                   tuple(fn(v) for v in self.final), dict(self.meta))

    def to_json(self, encode=encode_element):
        return {
            "base": encode(self.base),
            "cycle": [encode(v) for v in self.cycle],
            "moves": [{"kind": m.kind, "dir": m.dir, "pos": m.pos,
                       "verts": [encode(v) for v in m.verts]} for m in self.moves],
            "final": [encode(v) for v in self.final],
            "meta": self.meta,
        }

    def dumps(self, encode=encode_element):
        return json.dumps(self.to_json(encode), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data, decode=lambda x: x):
        if isinstance(data, str):
            data = json.loads(data)
        cyc = tuple(decode(v) for v in data["cycle"])
        moves = tuple(ElementaryMove(m["kind"], m["dir"], int(m["pos"]),
                                     tuple(decode(v) for v in m["verts"]))
                      for m in data["moves"])
        final = tuple(decode(v) for v in data["final"]) if "final" in data else (cyc[0],)
        if "base" in data and decode(data["base"]) != cyc[0]:
            raise InvalidCycle("base differs from the first cycle vertex")
        return cls(cyc, moves, final, dict(data.get("meta", {})))


@dataclass
class Verdict:
    ok: bool
    failed_at: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify_certificate(cert, geo, require_null=True):
    """Replay ``cert`` in ``geo`` checking every move.

    Returns a truthy/falsy :class:`Verdict`; the index of the first illegal
    move (or -1 for a bad initial cycle) is in ``failed_at``.
    """
    api = _api(geo)
    c = list(cert.cycle)
    try:
        check_cycle(c, api)
    except InvalidCycle as e:
        return Verdict(False, -1, f"initial cycle: {e}")
    for i, mv in enumerate(cert.moves):
        try:
            c = apply_move(c, mv, api)
        except MoveError as e:
            return Verdict(False, i, str(e))
    if tuple(c) != tuple(cert.final):
        return Verdict(False, len(cert.moves), "replay does not reach the recorded final cycle")
    if require_null and not cert.is_null:
        return Verdict(False, len(cert.moves), "final cycle is not the trivial cycle at the base")
    return Verdict(True)


class CertBuilder:
    """Accumulates moves while tracking the current cycle."""

    def __init__(self, geo, cycle, check=False):
        self.api = _api(geo)
        self.start = tuple(cycle)
        self.cur = list(cycle)
        self.moves = []
        self.check = check

    def _do(self, kind, d, pos, verts):
        mv = ElementaryMove(kind, d, pos, tuple(verts))
        self.cur = apply_move(self.cur, mv, self.api if self.check else None)
        self.moves.append(mv)

    def ins_rep(self, p):
        self._do(REPETITION, INSERT, p, (self.cur[p],))

    def del_rep(self, p):
        self._do(REPETITION, DELETE, p, (self.cur[p],))

    def ins_ret(self, p, y):
        self._do(RETURN, INSERT, p, (y,))

    def del_ret(self, p):
        self._do(RETURN, DELETE, p, (self.cur[p + 1],))

    def ins_tri(self, p, y, z):
        self._do(TRIANGLE, INSERT, p, (y, z))

    def del_tri(self, p):
        self._do(TRIANGLE, DELETE, p, (self.cur[p + 1], self.cur[p + 2]))

    def embed(self, cert, off):
        """Replay ``cert`` on the window starting at ``off``."""
        n = len(cert.cycle)
        if tuple(self.cur[off:off + n]) != tuple(cert.cycle):
            raise MoveError("sub-certificate does not match the cycle at its offset")
        self.moves.extend(m.shifted(off) for m in cert.moves)
        self.cur[off:off + n] = list(cert.final)

    def backtrack(self, p, path):
        """Insert path[1:] and back again after position p (path[0] == cur[p])."""
        if self.cur[p] != path[0]:
            raise MoveError("backtrack path does not start at pos")
        for t in range(1, len(path)):
            self.ins_ret(p + t - 1, path[t])

    def replace_path(self, i, j, new_path, sub):
        """Swap cur[i..j] for ``new_path`` (same endpoints).

        ``sub`` certifies the closed walk cur[i..j] + reversed(new_path)[1:]
        and is either a certificate or a callable producing one from it.
        """
        if self.cur[i] != new_path[0] or self.cur[j] != new_path[-1]:
            raise MoveError("replacement path has the wrong endpoints")
        self.backtrack(j, list(reversed(new_path)))
        D = self.cur[i:j + len(new_path)]
        cert = sub(D) if callable(sub) else sub
        self.embed(cert, i)

    def simplify(self):
        """Greedily delete repetitions and returns."""
        c = self.cur
        i = 0
        while i < len(c) - 1:
            if c[i + 1] == c[i]:
                self.del_rep(i)
                c = self.cur
                i = max(i - 2, 0)
            elif i + 2 < len(c) and c[i + 2] == c[i]:
                self.del_ret(i)
                c = self.cur
                i = max(i - 2, 0)
            else:
                i += 1

    def cert(self, **meta):
        return HomotopyCertificate(self.start, tuple(self.moves), tuple(self.cur), meta)


def _fan_moves(B, x):
    n = len(B.cur)
    if n == 1:
        return
    if n == 2:
        B.del_rep(0)
    elif n == 3:
        B.del_ret(0)
    elif n == 4:
        B.del_tri(0)
    else:
        B.ins_ret(0, x)
        while len(B.cur) > 3:
            B.ins_ret(3, x)
            B.del_tri(1)
        B.del_ret(0)


def fan_certificate(cycle, x, geo, verify=True):
    """Contract a cycle in the residue of x through the triangles (v_i, v_{i+1}, x).

    Uses at most 2k + 2 moves for a cycle with k edges.
    """
    api = _api(geo)
    cycle = list(cycle)
    if not api.contains(x):
        raise NotGeometric("witness is not an element")
    for v in cycle:
        if not api.incident(v, x):
            raise NotGeometric(f"{v!r} is not incident with the witness")
    B = CertBuilder(api, cycle)
    _fan_moves(B, x)
    cert = B.cert(method="fan")
    if verify:
        _self_check(cert, api)
    return cert


def _self_check(cert, geo):
    v = verify_certificate(cert, geo)
    if not v:
        raise HomotopyError(f"internal: certificate failed replay at move {v.failed_at}: {v.reason}")
    return cert


def concatenate(first, second):
    """Certificate for first.cycle -> second.final, second starting where first ends."""
    if tuple(first.final) != tuple(second.cycle):
        raise MoveError("certificates do not chain")
    return HomotopyCertificate(first.cycle, first.moves + second.moves, second.final,
                               {**first.meta, **second.meta})


# ---------------------------------------------------------------------------
# point-line cycles in the orthogonal geometries

def _dedup(pts):
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[-1] == out[0]:
        out.pop()
    return out


class CertContext:
    """Search context for certificates in an orthogonal geometry.

    Every existential step of the decomposition arguments is a scan over
    candidates in a fixed order (canonical point order, or the points of a
    distinguished subspace first), so identical inputs give identical
    certificates. ``stats`` counts which branches were taken.
    """

    def __init__(self, geo, max_depth=8, hub_limit=5000):
        if not isinstance(geo, OrthGeometry):
            raise TypeError("certificate search needs an OrthGeometry")
        self.geo = geo
        self.f = geo.f
        self.q = geo.q
        self.N = geo.f.dim
        self.api = _Api(geo)
        self.max_depth = max_depth
        self.hub_limit = hub_limit
        self.stats = Counter()
        self._lines = {}
        self._all_points = None

    # basic objects
    def point(self, v):
        return Subspace.span([v], self.q, self.N)

    def line(self, a, b):
        key = (a, b) if a <= b else (b, a)
        L = self._lines.get(key)
        if L is None:
            L = a + b
            if len(self._lines) > 200000:
                self._lines.clear()
            self._lines[key] = L
        return L

    def collinear(self, a, b):
        return a != b and self.geo.contains(self.line(a, b))

    def join(self, pts):
        return self.geo.join(*pts)

    def all_points(self):
        if self._all_points is None:
            geo = self.geo
            self._all_points = [P for P in (self.point(v) for v in self.f.whole().points())
                                if geo.contains(P)]
        return self._all_points

    def points_of(self, S):
        geo = self.geo
        for v in S.points():
            P = self.point(v)
            if geo.contains(P):
                yield P

    def polygon_cycle(self, pts):
        pts = list(pts)
        if len(pts) == 1:
            return [pts[0]]
        out = []
        for a, b in zip(pts, pts[1:] + pts[:1]):
            out += [a, self.line(a, b)]
        return out + [pts[0]]

    def container(self, pts):
        """The smallest element containing every point of ``pts``, or None."""
        geo = self.geo
        S = self.join(pts)
        if S.dim == 1:
            return S if geo.contains(S) else None
        for d in geo.types:
            if d < S.dim:
                continue
            if d == S.dim:
                if geo.contains(S):
                    return S
                continue
            for X in geo.between(S, None, d):
                return X
        return None

    # generic machinery
    def certify_polygon(self, pts, depth=0):
        """Certificate contracting the closed polygon through ``pts``."""
        B = CertBuilder(self.api, self.polygon_cycle(pts))
        self._reduce(B, depth)
        return B.cert()

    def _reduce(self, B, depth):
        B.simplify()
        cur = B.cur
        if len(cur) == 1:
            return
        if cur[1] == cur[-2]:
            self._rebase(B, depth)
            return
        P = cur[0::2][:-1]
        B.embed(self._dispatch(P, depth), 0)

    def _rebase(self, B, depth):
        # base vertex is straight: [a, L, b, ..., y, L, a]
        cur = B.cur
        b, y = cur[2], cur[-3]
        if b != y:
            B.ins_ret(1, y)
        cur = B.cur
        sub = cur[2:len(cur) - 2]
        B.embed(self.certify_polygon(sub[0::2][:-1], depth), 2)
        B.simplify()
        if len(B.cur) != 1:
            raise HomotopyError("internal: rebase left a nontrivial cycle")

    def _morph(self, B, old, new, depth):
        """Rewrite the polygon ``old`` (current cycle of B) into ``new``."""
        if old == new:
            return
        Oc = list(old) + [old[0]]
        Nc = list(new) + [new[0]] if len(new) > 1 else [new[0]]
        a = 0
        while a < min(len(Oc), len(Nc)) and Oc[a] == Nc[a]:
            a += 1
        s = 0
        limit = min(len(Oc), len(Nc)) - a + 1
        while s < limit and Oc[-1 - s] == Nc[-1 - s]:
            s += 1
        i, jo, jn = a - 1, len(Oc) - s, len(Nc) - s
        if jn == i:
            D = Oc[i:jo]
        else:
            D = Oc[i:jo + 1] + Nc[i + 1:jn][::-1]
        new_path = []
        for t in range(i, jn + 1):
            if t > i:
                new_path.append(self.line(Nc[t - 1], Nc[t]))
            new_path.append(Nc[t])
        B.replace_path(2 * i, 2 * jo, new_path, self.certify_polygon(D, depth + 1))

    def _chain(self, polys, depth):
        """Certificate for polys[0] morphed through the list down to [base]."""
        B = CertBuilder(self.api, self.polygon_cycle(polys[0]))
        for old, new in zip(polys, polys[1:]):
            self._morph(B, old, new, depth)
        if len(B.cur) != 1:
            self._reduce(B, depth)
        return B.cert()

    def _dispatch(self, P, depth):
        X = self.container(P)
        if X is not None:
            self.stats["fan"] += 1
            B = CertBuilder(self.api, self.polygon_cycle(P))
            _fan_moves(B, X)
            return B.cert()
        if depth > self.max_depth:
            raise SearchExhausted(f"recursion depth exceeded on a {len(P)}-gon")
        k = len(P)
        if k == 3:
            return self._triangle(P, depth)
        if k == 4:
            return self._quadrangle(P, depth)
        if k == 5:
            return self._pentagon(P, depth)
        return self._long(P, depth)

    # triangles
    def _triangle(self, P, depth):
        S = self.join(P)
        if self.N == 4 and not is_nondegenerate(S, self.f):
            return self._triangle_dim4(P, depth)
        hub = self._find_hub(P, S)
        if hub is not None:
            self.stats["triangle_hub"] += 1
            return self._hub_cert(P, hub, depth)
        return self._side_split(P, depth)

    def _hub_ok(self, P, p):
        a, b, c = P
        if p in (a, b, c):
            return False
        if not all(self.collinear(x, p) for x in P):
            return False
        return all(self.container([x, y, p]) is not None for x, y in ((a, b), (b, c), (a, c)))

    def _find_hub(self, P, S):
        """A point collinear with a, b, c whose three sub-triangles are geometric.

        Points of the polar of the span come first, then all points.
        """
        tried = 0
        seen = set()
        for cands in (self.points_of(perp(S, self.f)), iter(self.all_points())):
            for p in cands:
                if p in seen or S.contains(p):
                    continue
                seen.add(p)
                tried += 1
                if self._hub_ok(P, p):
                    return p
                if tried >= self.hub_limit:
                    return None
        return None

    def _hub_cert(self, P, p, depth):
        a, b, c = P
        return self._chain([[a, b, c], [a, p, b, c], [a, p, c], [a]], depth)

    def _side_split(self, P, depth, tries=8):
        """Subdivide bc at a point d collinear with a and recurse on both halves."""
        a, b, c = P
        bc = self.line(b, c)
        attempts = 0
        for d in self.points_of(bc):
            if d in (b, c) or not self.collinear(a, d):
                continue
            attempts += 1
            try:
                cert = self._chain([[a, b, c], [a, b, d, c], [a, d, c], [a]], depth + 1)
                self.stats["triangle_side_split"] += 1
                return cert
            except SearchExhausted:
                if attempts >= tries:
                    break
        raise SearchExhausted("no hub and no side split for a triangle")

    def _other_isotropic(self, line, p):
        Pp = perp(line, self.f)
        for v in Pp.points():
            if self.f.Q(v) == 0:
                P = self.point(v)
                if P != p:
                    return P
        raise SearchExhausted("polar of a line without a second isotropic point")

    def _triangle_dim4(self, P, depth):
        a, b, c = P
        f = self.f
        S = self.join(P)
        p = radical(S, f)
        if p.dim != 1:
            raise SearchExhausted("degenerate plane with radical of dimension != 1")
        pi_bc = self.line(b, c) + self._other_isotropic(self.line(b, c), p)
        pi_ac = self.line(a, c) + self._other_isotropic(self.line(a, c), p)
        L = intersect(pi_ac, pi_bc)
        cp = c + p
        hubs = [d for d in self.points_of(L) if d != c] if L.dim == 2 else []
        for d in hubs:
            if not (self.collinear(a, d) and self.collinear(b, d)):
                continue
            if not is_nondegenerate(self.join([a, b, d]), f):
                continue
            for c2 in self.points_of(cp):
                if c2 == c:
                    continue
                if not (self.collinear(d, c2) and self.collinear(a, c2) and self.collinear(b, c2)):
                    continue
                if not (is_nondegenerate(self.join([a, d, c2]), f)
                        and is_nondegenerate(self.join([b, d, c2]), f)):
                    continue
                g = self.transporter(a, b, c, c2, p)
                if g is None:
                    continue
                try:
                    sub = self._hub_cert([a, b, c2], d, depth + 1)
                except SearchExhausted:
                    continue
                self.stats["triangle_dim4"] += 1
                return sub.mapped(lambda X: image(g, X) if X.dim else X)
        raise TransporterNotFound("no auxiliary point d and transported triangle found")

    def transporter(self, a, b, c, c2, p):
        """g in SO(V) fixing a and b vectorwise and mapping the point c2 to c.

        g is the identity on ab and diag(t, 1/t) on a hyperbolic pair (p, p2)
        spanning the polar of ab. None if the construction fails.
        """
        f, q = self.f, self.q
        ab = self.line(a, b)
        W = perp(ab, f)
        pv = p.basis[0]
        p2 = None
        for v in W.points():
            if f.Q(v) == 0 and self.point(v) != p:
                p2 = v
                break
        if p2 is None:
            return None
        s = f.b(pv, p2)
        if s == 0:
            return None
        inv = pow(s, q - 2, q)
        p2 = tuple(x * inv % q for x in p2)
        av, bv = a.basis[0], b.basis[0]
        cols = [av, bv, pv, p2]
        M = [[col[i] for col in cols] for i in range(self.N)]
        try:
            Minv = gf.mat_inverse(M, q)
        except ZeroDivisionError:
            return None
        y = apply_matrix(Minv, c.basis[0], q)
        x = apply_matrix(Minv, c2.basis[0], q)
        if y[3] or x[3] or not x[2] or not y[2]:
            return None
        # (x0, x1) = lam (y0, y1)
        k = 0 if y[0] else 1
        if not y[k]:
            return None
        lam = x[k] * pow(y[k], q - 2, q) % q
        if (x[0] - lam * y[0]) % q or (x[1] - lam * y[1]) % q or not lam:
            return None
        t = lam * y[2] * pow(x[2], q - 2, q) % q
        if not t:
            return None
        D = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, t, 0), (0, 0, 0, pow(t, q - 2, q)))
        g = gf.matmul(gf.matmul(M, D, q), Minv, q)
        if not is_isometry(g, f) or gf.det(g, q) != 1:
            return None
        if image(g, c2) != c or image(g, a) != a or image(g, b) != b:
            return None
        return g

    # quadrangles
    def quadrangle_case(self, l, m):
        """Structure of <l, m> for skew lines: 'i'..'v' (see certify_quadrangle)."""
        T = l + m
        R = radical(T, self.f)
        if R.dim == 2:
            if classify_type(l, self.f) is PLUS:
                raise CaseIIEncountered("complement of a 2-dimensional radical is hyperbolic")
            return "i"
        if R.dim == 1:
            return "iii"
        if R.dim == 0:
            return "iv" if classify_type(T, self.f) is MINUS else "v"
        raise CaseIIEncountered(f"radical of dimension {R.dim}")

    def _quadrangle(self, P, depth):
        a, b, c, d = P
        l, m = self.line(a, b), self.line(c, d)
        e = intersect(l, m)
        if e.dim == 1:
            self.stats["quadrangle_meet"] += 1
            return self._chain([[a, b, c, d], [a, e, b, c, d], [a, e, d], [a]], depth)
        case = self.quadrangle_case(l, m)
        self.stats[f"quadrangle_case_{case}"] += 1
        path = self._transversal_path(l, m, (b, c), (a, d))
        polys = [_dedup([a, x, y, d]) for x, y in path] + [[a]]
        return self._chain([[a, b, c, d]] + polys[1:], depth)

    def _transversal_path(self, l, m, start, goal):
        """BFS over pairs (x on l, y on m) with xy a line of the geometry."""
        L = list(self.points_of(l))
        M = list(self.points_of(m))
        ok = {}

        def good(x, y):
            k = (x, y)
            if k not in ok:
                ok[k] = self.collinear(x, y)
            return ok[k]

        prev = {start: None}
        todo = deque([start])
        while todo:
            s = todo.popleft()
            if s == goal:
                break
            x, y = s
            for x2 in L:
                t = (x2, y)
                if x2 != x and t not in prev and good(x2, y):
                    prev[t] = s
                    todo.append(t)
            for y2 in M:
                t = (x, y2)
                if y2 != y and t not in prev and good(x, y2):
                    prev[t] = s
                    todo.append(t)
        if goal not in prev:
            raise SearchExhausted("no transversal path between the two sides")
        out = [goal]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return out[::-1]

    # pentagons and longer
    def _pentagon(self, P, depth):
        a, b, c, d, e = P
        l = self.line(c, d)
        for z in self.points_of(l):
            if z == a or not self.collinear(a, z):
                continue
            self.stats["pentagon"] += 1
            polys = [[a, b, c, d, e], _dedup([a, b, c, z, d, e]), _dedup([a, z, d, e]), [a]]
            return self._chain(_dedup_polys(polys), depth)
        raise SearchExhausted("no line through a meeting cd")

    def common_neighbour(self, x, y):
        for w in self.all_points():
            if w != x and w != y and self.collinear(x, w) and self.collinear(w, y):
                return w
        return None

    def _long(self, P, depth):
        k = len(P)
        h = k // 2
        a0, ah = P[0], P[h]
        if self.collinear(a0, ah):
            chord = []
        else:
            w = self.common_neighbour(a0, ah)
            if w is None:
                raise SearchExhausted("no common neighbour for a chord")
            chord = [w]
        self.stats["long_split"] += 1
        rest = [a0] + chord + P[h:]
        return self._chain([P, _dedup(rest), [a0]], depth)

    # public entry points
    def certify_points(self, pts, verify=True):
        cert = self.certify_polygon(list(pts))
        if verify:
            _self_check(cert, self.api)
        return cert


def _dedup_polys(polys):
    out = []
    for p in polys:
        if not out or out[-1] != p:
            out.append(p)
    return out


def _ctx(ctx_or_geo):
    return ctx_or_geo if isinstance(ctx_or_geo, CertContext) else CertContext(ctx_or_geo)


def _require_collinear(ctx, pts):
    for x, y in zip(pts, pts[1:] + pts[:1]):
        if not ctx.collinear(x, y):
            raise InvalidCycle("consecutive points are not collinear")


def certify_triangle(a, b, c, ctx, verify=True):
    ctx = _ctx(ctx)
    _require_collinear(ctx, [a, b, c])
    return ctx.certify_points([a, b, c], verify)


def certify_triangle_dim4(a, b, c, ctx, verify=True):
    ctx = _ctx(ctx)
    if ctx.N != 4:
        raise HypothesisFailed("dimension", "the dimension-four triangle search needs a 4-dimensional space")
    _require_collinear(ctx, [a, b, c])
    S = ctx.join([a, b, c])
    if is_nondegenerate(S, ctx.f):
        B = CertBuilder(ctx.api, ctx.polygon_cycle([a, b, c]))
        _fan_moves(B, S)
        cert = B.cert()
    else:
        cert = ctx._triangle_dim4([a, b, c], 0)
    if verify:
        _self_check(cert, ctx.api)
    return cert


def certify_quadrangle(a, b, c, d, ctx, verify=True):
    ctx = _ctx(ctx)
    _require_collinear(ctx, [a, b, c, d])
    return ctx.certify_points([a, b, c, d], verify)


def certify_pentagon(a, b, c, d, e, ctx, verify=True):
    ctx = _ctx(ctx)
    _require_collinear(ctx, [a, b, c, d, e])
    return ctx.certify_points([a, b, c, d, e], verify)


def certify_cycle(cycle, ctx, verify=True):
    """Null-homotopy certificate for any based cycle of the geometry.

    The cycle is first rewritten through points and lines only, then
    contracted polygon by polygon.
    """
    ctx = _ctx(ctx)
    cycle = list(cycle.vertices if isinstance(cycle, Cycle) else cycle)
    check_cycle(cycle, ctx.api)
    if ctx.api.typ(cycle[0]) > 2:
        raise HypothesisFailed("base", "cycles must be based at a point or a line")
    pl, frag = reduce_to_point_line(cycle, ctx.geo, check_hypotheses=False)
    B = CertBuilder(ctx.api, cycle)
    B.embed(frag, 0)
    B.simplify()
    cur = B.cur
    if len(cur) > 1:
        if cur[0].dim == 2:
            # based at a line: close the point walk through the base line
            B.ins_ret(len(cur) - 1, cur[1])
            sub = B.cur[1:len(B.cur) - 1]
            sb = CertBuilder(ctx.api, sub)
            ctx._reduce(sb, 0)
            B.embed(sb.cert(), 1)
            B.simplify()
        else:
            ctx._reduce(B, 0)
    cert = B.cert(method="certify_cycle")
    if verify:
        _self_check(cert, ctx.api)
    return cert


# ---------------------------------------------------------------------------
# reduction to points and lines

class _Residues:
    """Points and point-line paths inside residues, for either geometry kind."""

    def __init__(self, geo):
        self.geo = geo
        self.api = _api(geo)
        self.orth = isinstance(geo, OrthGeometry)
        types = sorted(geo.types)
        self.t1, self.t2 = types[0], types[1]

    def shared_point(self, x, y):
        """A type-1 element incident with both x and y."""
        api = self.api
        if api.typ(x) == self.t1:
            return x
        if api.typ(y) == self.t1:
            return y
        if self.orth:
            small = x if x.dim <= y.dim else y
            for P in self.geo.between(None, small, self.t1):
                return P
            return None
        g = self.geo
        for p in sorted(g.adj[x] & g.adj[y]):
            if g.typ[p] == self.t1:
                return p
        return None

    def path(self, s, t, z):
        """Alternating point-line path from s to t, every element incident with z."""
        if s == t:
            return [s]
        if self.orth:
            return self._orth_path(s, t, z)
        g = self.geo
        allowed = {y for y in g.adj[z] if g.typ[y] in (self.t1, self.t2)}
        if g.typ[z] in (self.t1, self.t2):
            allowed.add(z)
        prev = {s: None}
        todo = deque([s])
        while todo:
            u = todo.popleft()
            if u == t:
                break
            for v in sorted(g.adj[u]):
                if v in allowed and v not in prev:
                    prev[v] = u
                    todo.append(v)
        if t not in prev:
            return None
        out = [t]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return out[::-1]

    def _orth_path(self, s, t, z):
        geo = self.geo
        L = s + t
        if geo.contains(L) and z.contains(L):
            return [s, L, t]
        pts = list(geo.between(None, z, 1))
        for w in pts:
            if w in (s, t):
                continue
            L1, L2 = s + w, w + t
            if geo.contains(L1) and geo.contains(L2):
                return [s, L1, w, L2, t]
        # BFS in the collinearity graph of the residue
        prev = {s: None}
        todo = deque([s])
        while todo:
            u = todo.popleft()
            if u == t:
                break
            for w in pts:
                if w not in prev and geo.contains(u + w):
                    prev[w] = u
                    todo.append(w)
        if t not in prev:
            return None
        seq = [t]
        while prev[seq[-1]] is not None:
            seq.append(prev[seq[-1]])
        seq = seq[::-1]
        out = [seq[0]]
        for u, w in zip(seq, seq[1:]):
            out += [u + w, w]
        return out


def reduction_hypotheses(geo):
    """Check that a materialized geometry has a linear basic diagram."""
    if isinstance(geo, OrthGeometry):
        types = list(geo.types)
        ok = types == list(range(1, len(types) + 1)) and len(types) >= 2
        return {"linear_diagram": ok, "method": "type chain of dimensions"}
    D, rep = basic_diagram(geo)
    return {"linear_diagram": is_linear_diagram(D), "sampled": rep["sampled"],
            "diagram_edges": sorted(tuple(sorted(e)) for e in D.edges)}


def reduce_to_point_line(cycle, geo, check_hypotheses=True):
    """Rewrite a cycle through elements of the two smallest types only.

    Each edge x_i x_{i+1} gets a point s_i incident with both (a triangle),
    then each vertex x_j is bypassed by a point-line path from s_{j-1} to
    s_j inside its residue (a geometric cycle, contracted by a fan).
    Returns (point-line cycle, certificate from the input to it).
    """
    api = _api(geo)
    cycle = list(cycle.vertices if isinstance(cycle, Cycle) else cycle)
    check_cycle(cycle, api)
    if check_hypotheses:
        rep = reduction_hypotheses(geo)
        if not rep["linear_diagram"]:
            raise HypothesisFailed("linear diagram", f"basic diagram is not linear: {rep}")
    R = _Residues(geo)
    if api.typ(cycle[0]) not in (R.t1, R.t2):
        raise HypothesisFailed("base", "cycle must be based at an element of type 1 or 2")
    B = CertBuilder(api, cycle)
    low = (R.t1, R.t2)
    if all(api.typ(v) in low for v in cycle):
        return list(cycle), B.cert(method="reduce")
    # spokes: x_i, x_{i+1}  ->  x_i, s_i, x_{i+1}
    pos = 0
    while pos < len(B.cur) - 1:
        x, y = B.cur[pos], B.cur[pos + 1]
        if x == y:
            B.del_rep(pos)
            continue
        if api.typ(x) in low and api.typ(y) in low:
            pos += 1
            continue
        s = R.shared_point(x, y)
        if s is None:
            raise HypothesisFailed("geometry", f"no point incident with both {x!r} and {y!r}")
        if s in (x, y):
            pos += 1
            continue
        B.replace_path(pos, pos + 1, [x, s, y], lambda D: _triangle_cert(api, D))
        pos += 2
    # bypass high-type inner vertices; the base (type 1 or 2) stays
    pos = 1
    while pos < len(B.cur) - 1:
        z = B.cur[pos]
        if api.typ(z) in low:
            pos += 1
            continue
        s, t = B.cur[pos - 1], B.cur[pos + 1]
        P = R.path(s, t, z)
        if P is None:
            raise HypothesisFailed("residue connectivity",
                                   f"no point-line path inside the residue of {z!r}")
        B.replace_path(pos - 1, pos + 1, P, lambda D, z=z: _fan_cert(api, D, z))
        pos += len(P) - 1
    B.simplify()
    return list(B.cur), B.cert(method="reduce")


def _triangle_cert(api, D):
    B = CertBuilder(api, D)
    _fan_moves(B, D[1])
    return B.cert()


def _fan_cert(api, D, z):
    B = CertBuilder(api, D)
    _fan_moves(B, z)
    return B.cert()


# ---------------------------------------------------------------------------
# random cycles for the certificate suites

class CycleSampler:
    """Random point-line polygons in an orthogonal geometry.

    Triangles are drawn half the time inside a degenerate plane (when one
    exists through the first side), so that both branches of the triangle
    argument are exercised.
    """

    def __init__(self, ctx, seed=0):
        self.ctx = ctx
        self.rng = random.Random(seed)
        self.pts = ctx.all_points()

    def point(self):
        return self.rng.choice(self.pts)

    def neighbour(self, a, avoid=(), tries=10000):
        for _ in range(tries):
            b = self.point()
            if b not in avoid and self.ctx.collinear(a, b):
                return b
        raise SearchExhausted("no random neighbour found")

    def _nonstraight(self, P):
        ctx = self.ctx
        k = len(P)
        if len(set(P)) != k:
            return False
        for i in range(k):
            a, b, c = P[i - 1], P[i], P[(i + 1) % k]
            if ctx.line(a, b) == ctx.line(b, c):
                return False
        return True

    def triangle(self, degenerate=None, tries=10000):
        ctx = self.ctx
        if degenerate is None:
            degenerate = self.rng.random() < 0.5
        for _ in range(tries):
            a = self.point()
            b = self.neighbour(a, (a,))
            if degenerate:
                c = self._degenerate_third(a, b)
                if c is None:
                    degenerate = False
                    continue
            else:
                c = self.neighbour(a, (a, b))
                if not ctx.collinear(b, c):
                    continue
            P = [a, b, c]
            if self._nonstraight(P):
                return P
        raise SearchExhausted("no random triangle found")

    def _degenerate_third(self, a, b):
        ctx, f = self.ctx, self.ctx.f
        ab = ctx.line(a, b)
        W = perp(ab, f)
        iso = [v for v in W.points() if f.Q(v) == 0]
        if not iso:
            return None
        v = self.rng.choice(iso)
        S = ab + ctx.point(v)
        cands = [c for c in ctx.points_of(S)
                 if not ab.contains(c) and ctx.collinear(a, c) and ctx.collinear(b, c)]
        return self.rng.choice(cands) if cands else None

    def polygon(self, k, tries=20000):
        ctx = self.ctx
        for _ in range(tries):
            P = [self.point()]
            for _ in range(k - 2):
                P.append(self.neighbour(P[-1], P))
            # close with a point collinear with both ends
            for _ in range(200):
                z = self.point()
                if z not in P and ctx.collinear(P[-1], z) and ctx.collinear(z, P[0]):
                    break
            else:
                continue
            P.append(z)
            if self._nonstraight(P):
                return P
        raise SearchExhausted(f"no random {k}-gon found")

    def cycle(self, k):
        """Closed point-line walk with k points."""
        P = self.polygon(k)
        return self.ctx.polygon_cycle(P)


# ---------------------------------------------------------------------------
# H1 by Smith normal form

def _dense_invariants(M):
    """Nonzero invariant factors of a small dense integer matrix."""
    M = [row[:] for row in M if any(row)]
    if not M:
        return []
    out = []
    rows, cols = len(M), len(M[0])
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the remaining block
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if M[i][j] and (piv is None or abs(M[i][j]) < abs(M[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        while True:
            p = M[t][t]
            done = True
            for i in range(t + 1, rows):
                if M[i][t]:
                    f = M[i][t] // p
                    M[i] = [a - f * b for a, b in zip(M[i], M[t])]
                    if M[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if M[t][j]:
                    f = M[t][j] // p
                    for row in M:
                        row[j] -= f * row[t]
                    if M[t][j]:
                        done = False
            if done:
                # divisibility of the rest by p
                bad = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if M[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                M[t] = [a + b for a, b in zip(M[t], M[bad])]
                continue
            # move the smallest entry of row/col t to the pivot
            best = (abs(M[t][t]), t, t)
            for i in range(t + 1, rows):
                if M[i][t] and abs(M[i][t]) < best[0]:
                    best = (abs(M[i][t]), i, t)
            for j in range(t + 1, cols):
                if M[t][j] and abs(M[t][j]) < best[0]:
                    best = (abs(M[t][j]), t, j)
            _, i, j = best
            M[t], M[i] = M[i], M[t]
            for row in M:
                row[t], row[j] = row[j], row[t]
        out.append(abs(M[t][t]))
        t += 1
    return out


def smith_invariants(entries, nrows, ncols):
    """Nonzero invariant factors of a sparse integer matrix.

    ``entries`` maps (row, col) -> int. Unit pivots are eliminated sparsely
    first, the remainder goes through a dense Smith normal form.
    """
    rows = {}
    for (r, c), v in entries.items():
        if v:
            rows.setdefault(r, {})[c] = v
    cols = {}
    for r, rd in rows.items():
        for c in rd:
            cols.setdefault(c, set()).add(r)
    ones = 0
    while True:
        piv = None
        best = None
        for r in sorted(rows):
            rd = rows[r]
            for c in sorted(rd):
                if abs(rd[c]) == 1:
                    cost = (len(rd) - 1) * (len(cols[c]) - 1)
                    if best is None or cost < best:
                        best, piv = cost, (r, c)
                        if cost == 0:
                            break
            if best == 0:
                break
        if piv is None:
            break
        r, c = piv
        prow = rows.pop(r)
        u = prow[c]
        for c2 in prow:
            cols[c2].discard(r)
        for r2 in list(cols[c]):
            rd = rows[r2]
            factor = rd[c] * u   # u = +-1, so rd[c]/u = rd[c]*u
            for c2, v in prow.items():
                nv = rd.get(c2, 0) - factor * v
                if nv:
                    if c2 not in rd:
                        cols[c2].add(r2)
                    rd[c2] = nv
                elif c2 in rd:
                    del rd[c2]
                    cols[c2].discard(r2)
            if not rd:
                del rows[r2]
        del cols[c]
        ones += 1
    rest_rows = sorted(rows)
    rest_cols = sorted({c for rd in rows.values() for c in rd})
    ci = {c: j for j, c in enumerate(rest_cols)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for i, r in enumerate(rest_rows):
        for c, v in rows[r].items():
            dense[i][ci[c]] = v
    return [1] * ones + sorted(_dense_invariants(dense))


@dataclass(frozen=True)
class H1:
    rank: int
    torsion: tuple

    @property
    def trivial(self):
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = ([f"Z^{self.rank}"] if self.rank > 1 else ["Z"] if self.rank == 1 else [])
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def boundary_2(g):
    """Edges, triangles and the sparse boundary map from triangles to edges."""
    edges = sorted(g.edges())
    eidx = {e: i for i, e in enumerate(edges)}
    tris = []
    for a, b in edges:
        for c in g.adj[a] & g.adj[b]:
            if c > b:
                tris.append((a, b, c))
    entries = {}
    for t, (a, b, c) in enumerate(tris):
        # d(abc) = bc - ac + ab with a < b < c
        entries[(eidx[(b, c)], t)] = 1
        entries[(eidx[(a, c)], t)] = -1
        entries[(eidx[(a, b)], t)] = 1
    return edges, tris, entries


def homology_h1(g, cap=200000):
    """H1 of the flag complex truncated at dimension 2."""
    if isinstance(g, OrthGeometry):
        g = g.materialize()
    V = len(g)
    edges, tris, entries = boundary_2(g)
    if len(edges) + len(tris) > cap:
        raise TooLarge(f"{len(edges)} edges and {len(tris)} triangles exceed the cap {cap}")
    comps = _components(g)
    cycles_rank = len(edges) - (V - comps)
    inv = smith_invariants(entries, len(edges), len(tris))
    return H1(cycles_rank - len(inv), tuple(sorted(d for d in inv if d > 1)))


def _components(g):
    seen = set()
    comps = 0
    for s in range(len(g)):
        if s in seen:
            continue
        comps += 1
        seen.add(s)
        todo = [s]
        while todo:
            x = todo.pop()
            for y in g.adj[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return comps


# ---------------------------------------------------------------------------
# coverings

@dataclass
class CoveringMap:
    source: Pregeometry
    target: Pregeometry
    emap: list

    def __call__(self, x):
        return self.emap[x]


def covering_check(phi):
    """(ok, witness): type-preserving, surjective, and a residue isomorphism
    at every element of the source."""
    S, T, m = phi.source, phi.target, phi.emap
    if len(m) != len(S):
        return False, {"reason": "map is not defined on every element"}
    for x in range(len(S)):
        if S.typ[x] != T.typ[m[x]]:
            return False, {"reason": "type not preserved", "element": x}
    if set(m) != set(range(len(T))):
        return False, {"reason": "not surjective"}
    for x in range(len(S)):
        res = S.adj[x]
        img = [m[y] for y in res]
        if len(set(img)) != len(img) or set(img) != set(T.adj[m[x]]):
            return False, {"reason": "residue not mapped bijectively", "element": x}
        for y, z in itertools.combinations(sorted(res), 2):
            if S.incident(y, z) != T.incident(m[y], m[z]):
                return False, {"reason": "residue incidence not preserved", "element": x,
                               "pair": (y, z)}
    return True, None


def edge_path_presentation(g, base=0):
    """Generators and relators of the edge-path group of the flag complex.

    A BFS spanning tree from ``base`` is contracted; every other edge (u<v)
    is a generator, every triangle a relator. Returns (edge label map,
    number of generators, relators as letter lists with 2k / 2k+1 for
    generator k and its inverse).
    """
    parent = {base: None}
    todo = deque([base])
    tree = set()
    while todo:
        x = todo.popleft()
        for y in sorted(g.adj[x]):
            if y not in parent:
                parent[y] = x
                tree.add((min(x, y), max(x, y)))
                todo.append(y)
    if len(parent) != len(g):
        raise HypothesisFailed("connectivity", "geometry is not connected")
    gens = {}
    for e in sorted(g.edges()):
        if e not in tree:
            gens[e] = len(gens)

    def letter(u, v):
        e = (min(u, v), max(u, v))
        if e not in gens:
            return []
        k = gens[e]
        return [2 * k] if u < v else [2 * k + 1]

    rels = []
    _, tris, _ = boundary_2(g)
    for a, b, c in tris:
        w = letter(a, b) + letter(b, c) + letter(c, a)
        if w:
            rels.append(w)
    return gens, len(gens), rels, parent


def fundamental_group_order(g, base=0, cap=100000):
    from .amalgam import todd_coxeter
    _, ngens, rels, _ = edge_path_presentation(g, base)
    if ngens == 0:
        return 1
    return todd_coxeter(ngens, rels, [], cap=cap).index


def fundamental_cover(g, base=0, cap=100000):
    """Universal cover built from the edge-path group, when it is finite.

    Elements are pairs (x, h) with h in pi_1; (u, h) and (v, h * e(u, v))
    are incident for every incident pair u, v, where e(u, v) is the
    generator of the edge (trivial on tree edges). Returns (cover, map).
    """
    from .amalgam import CapExceeded as TCCap, todd_coxeter
    gens, ngens, rels, _ = edge_path_presentation(g, base)
    if ngens:
        try:
            table = todd_coxeter(ngens, rels, [], cap=cap)
        except TCCap as e:
            raise CapExceeded(str(e)) from e
        n = table.index
    else:
        table, n = None, 1

    def act(h, u, v):
        e = (min(u, v), max(u, v))
        if e not in gens:
            return h
        k = gens[e]
        return table.table[h][2 * k if u < v else 2 * k + 1]

    ids = {}
    typ, labels = [], []
    for x in range(len(g)):
        for h in range(n):
            ids[(x, h)] = len(typ)
            typ.append(g.typ[x])
            labels.append((g.labels[x], h))
    inc = []
    for u, v in g.edges():
        for h in range(n):
            inc.append((ids[(u, h)], ids[(v, act(h, u, v))]))
    cover = Pregeometry(typ, inc, labels=labels, types=g.types)
    emap = [x for x in range(len(g)) for _ in range(n)]
    return cover, CoveringMap(cover, g, emap)

"""Orthogonal spaces over F_q and their geometries of nondegenerate subspaces.

Vectors are tuples of ints, subspaces are :class:`Subspace` values holding a
canonical RREF basis. The two isometry classes of nondegenerate spaces are
called Plus (hyperbolic, positive) and Minus (elliptic, negative).
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from functools import cached_property

from . import gf


class OrthError(ValueError):
    pass


class DimensionMismatch(OrthError):
    pass


class DegenerateSubspace(OrthError):
    pass


class DegenerateForm(OrthError):
    pass


class AmbientTooSmall(OrthError):
    pass


class UnrealizableHall(OrthError):
    pass


class ConfigViolatesPrecondition(OrthError):
    pass


class DisconnectedGraph(OrthError):
    pass


class TypeSign(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    def __mul__(self, other):
        return TypeSign.PLUS if self is other else TypeSign.MINUS

    def __neg__(self):
        return TypeSign.MINUS if self is TypeSign.PLUS else TypeSign.PLUS

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, s):
        if isinstance(s, cls):
            return s
        if s in ("+", "plus", "Plus", 1):
            return cls.PLUS
        if s in ("-", "minus", "Minus", -1):
            return cls.MINUS
        raise ValueError(f"not a sign: {s!r}")


PLUS, MINUS = TypeSign.PLUS, TypeSign.MINUS


class LineClass(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"


# ---------------------------------------------------------------------------
# subspaces

@dataclass(frozen=True, order=True)
class Subspace:
    """A subspace of F_q^n in canonical reduced row echelon form."""

    basis: tuple
    ambient_dim: int
    q: int

    @classmethod
    def span(cls, vectors, q, ambient_dim=None):
        vectors = [tuple(int(x) % q for x in v) for v in vectors]
        if ambient_dim is None:
            if not vectors:
                raise DimensionMismatch("ambient dimension of an empty span is unknown")
            ambient_dim = len(vectors[0])
        if any(len(v) != ambient_dim for v in vectors):
            raise DimensionMismatch("vectors of different lengths")
        red, _ = gf.rref(vectors, q) if vectors else ((), ())
        return cls(red, ambient_dim, q)

    @classmethod
    def zero(cls, ambient_dim, q):
        return cls((), ambient_dim, q)

    @classmethod
    def whole(cls, ambient_dim, q):
        return cls(tuple(tuple(int(i == j) for j in range(ambient_dim))
                         for i in range(ambient_dim)), ambient_dim, q)

    @property
    def dim(self):
        return len(self.basis)

    @cached_property
    def pivots(self):
        return tuple(next(i for i, x in enumerate(row) if x) for row in self.basis)

    def coords(self, v):
        """Coordinates of v in the canonical basis, or None if v is not in here."""
        v = [x % self.q for x in v]
        c = []
        for row, p in zip(self.basis, self.pivots):
            a = v[p]
            c.append(a)
            if a:
                v = [(x - a * y) % self.q for x, y in zip(v, row)]
        return tuple(c) if not any(v) else None

    def __contains__(self, v):
        return self.coords(v) is not None

    def contains(self, other):
        self._check(other)
        return all(self.coords(r) is not None for r in other.basis)

    def _check(self, other):
        if other.ambient_dim != self.ambient_dim or other.q != self.q:
            raise DimensionMismatch("subspaces of different ambient spaces")

    def __add__(self, other):
        self._check(other)
        return Subspace.span(self.basis + other.basis, self.q, self.ambient_dim)

    def vectors(self):
        """All vectors, including zero."""
        q = self.q
        for coeffs in itertools.product(range(q), repeat=self.dim):
            yield tuple(sum(c * r[i] for c, r in zip(coeffs, self.basis)) % q
                        for i in range(self.ambient_dim))

    def points(self):
        """Normalized representatives of the 1-spaces (first nonzero entry 1)."""
        q, d = self.q, self.dim
        for lead in range(d):
            for tail in itertools.product(range(q), repeat=d - lead - 1):
                coeffs = (0,) * lead + (1,) + tail
                yield tuple(sum(c * r[i] for c, r in zip(coeffs, self.basis)) % q
                            for i in range(self.ambient_dim))

    def subspaces(self, k):
        """All k-dimensional subspaces of this one."""
        if k == 0:
            yield Subspace.zero(self.ambient_dim, self.q)
            return
        for coords in iter_rref(self.dim, k, self.q):
            rows = [tuple(sum(c * r[i] for c, r in zip(crow, self.basis)) % self.q
                          for i in range(self.ambient_dim)) for crow in coords]
            yield Subspace.span(rows, self.q, self.ambient_dim)

    def key(self):
        return [list(r) for r in self.basis]

    def __repr__(self):
        return f"Subspace({[list(r) for r in self.basis]}, q={self.q})"


def iter_rref(n, k, q):
    """All k x n matrices over F_q in reduced row echelon form of rank k."""
    for piv in itertools.combinations(range(n), k):
        slots = [(r, c) for r in range(k) for c in range(piv[r] + 1, n) if c not in piv]
        for vals in itertools.product(range(q), repeat=len(slots)):
            m = [[0] * n for _ in range(k)]
            for r, c in enumerate(piv):
                m[r][c] = 1
            for (r, c), v in zip(slots, vals):
                m[r][c] = v
            yield tuple(tuple(row) for row in m)


def gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def normalize(v, q):
    for x in v:
        if x % q:
            inv = pow(x, q - 2, q)
            return tuple(y * inv % q for y in v)
    raise ValueError("zero vector")


def span(vectors, q=None, ambient_dim=None):
    vectors = list(vectors)
    if q is None:
        raise TypeError("span needs q")
    return Subspace.span(vectors, q, ambient_dim)


def intersect(A, B):
    A._check(B)
    q, n = A.q, A.ambient_dim
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(n, q)
    # x = sum a_i A_i = sum b_j B_j  <=>  [A; -B]^T (a, b) = 0
    rows = [list(r) for r in A.basis] + [[-x % q for x in r] for r in B.basis]
    cols = [[rows[i][c] for i in range(len(rows))] for c in range(n)]
    ker = gf.kernel(cols, len(rows), q)
    vecs = [tuple(sum(k[i] * A.basis[i][c] for i in range(A.dim)) % q for c in range(n))
            for k in ker]
    return Subspace.span(vecs, q, n)


# ---------------------------------------------------------------------------
# forms

class BilinearForm:
    """A nondegenerate symmetric bilinear form given by its Gram matrix."""

    def __init__(self, gram, q):
        if isinstance(q, gf.FieldSpec):
            q = q.q
        gf.FieldSpec(q)
        g = tuple(tuple(int(x) % q for x in row) for row in gram)
        n = len(g)
        if n < 2:
            raise AmbientTooSmall("a form needs dimension at least 2")
        if any(len(row) != n for row in g):
            raise DimensionMismatch("Gram matrix is not square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise OrthError("Gram matrix is not symmetric")
        if gf.det(g, q) == 0:
            raise DegenerateForm("Gram matrix is singular")
        self.gram = g
        self.q = q
        self.dim = n

    @classmethod
    def standard(cls, dim, q, sign):
        """Fixed representative of each class: diag(1, ..., 1, c).

        c = 1 if that already has the requested sign, otherwise c is the
        least non-square of F_q.
        """
        sign = TypeSign.parse(sign)
        diag = [1] * dim
        f = cls(_diag(diag), q)
        if f.sign() is not sign:
            diag[-1] = gf._least_nonsquare(q)
            f = cls(_diag(diag), q)
        return f

    def __eq__(self, other):
        return isinstance(other, BilinearForm) and (self.gram, self.q) == (other.gram, other.q)

    def __hash__(self):
        return hash((self.gram, self.q))

    def __repr__(self):
        return f"BilinearForm({[list(r) for r in self.gram]}, q={self.q})"

    @cached_property
    def field(self):
        return gf.FieldSpec(self.q)

    def apply(self, v):
        """The covector G v, so that b(u, v) = u . (G v)."""
        q = self.q
        return tuple(sum(a * b for a, b in zip(row, v)) % q for row in self.gram)

    def b(self, u, v):
        return sum(x * y for x, y in zip(u, self.apply(v))) % self.q

    def Q(self, v):
        return self.b(v, v)

    def gram_of(self, rows):
        gv = [self.apply(r) for r in rows]
        q = self.q
        return tuple(tuple(sum(x * y for x, y in zip(u, w)) % q for w in gv) for u in rows)

    def discriminant(self, A=None):
        rows = self.whole().basis if A is None else A.basis
        return gf.det(self.gram_of(rows), self.q) if rows else 1

    def whole(self):
        return Subspace.whole(self.dim, self.q)

    def sign(self):
        return classify_type(self.whole(), self)


def _diag(entries):
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n))


def _check_ambient(A, f):
    if A.ambient_dim != f.dim or A.q != f.q:
        raise DimensionMismatch("subspace and form live on different spaces")


def perp(A, f):
    _check_ambient(A, f)
    if A.dim == 0:
        return f.whole()
    rows = [f.apply(r) for r in A.basis]
    return Subspace(gf.kernel(rows, f.dim, f.q), f.dim, f.q)


def radical(A, f):
    return intersect(A, perp(A, f))


def is_nondegenerate(A, f):
    return A.dim == 0 or gf.det(f.gram_of(A.basis), f.q) != 0


def orthogonal_basis(A, f):
    """An orthogonal basis of a nondegenerate subspace (Gram-Schmidt)."""
    q = f.q
    todo = [list(r) for r in A.basis]
    out = []
    while todo:
        # find an anisotropic vector among basis vectors or pairwise sums
        v = None
        for r in todo:
            if f.Q(r):
                v = r
                break
        if v is None:
            found = False
            for i, j in itertools.combinations(range(len(todo)), 2):
                for c in range(1, q):
                    w = [(x + c * y) % q for x, y in zip(todo[i], todo[j])]
                    if f.Q(w):
                        todo[i] = w
                        v = w
                        found = True
                        break
                if found:
                    break
            if v is None:
                raise DegenerateSubspace("subspace is degenerate")
        qv = f.Q(v)
        inv = pow(qv, q - 2, q)
        out.append(tuple(v))
        rest = []
        for r in todo:
            if r is v:
                continue
            c = f.b(r, v) * inv % q
            rest.append([(x - c * y) % q for x, y in zip(r, v)])
        todo = [r for r in rest if any(r)]
    return out


def point_sign(value, q):
    """Sign of a 1-space on which the form takes the nonzero value ``value``.

    q = 1 mod 4: square values are Plus. q = 3 mod 4: the discriminant rule
    with d = 1, e = 0 makes non-square values Plus.
    """
    sq = gf._least_nonsquare(q) and pow(value % q, (q - 1) // 2, q) == 1
    if q % 4 == 1:
        return PLUS if sq else MINUS
    return MINUS if sq else PLUS


def compose_types(s1, d1, s2, d2, q):
    """Sign of the orthogonal sum of spaces of signs s1, s2 and dimensions d1, d2."""
    s1, s2 = TypeSign.parse(s1), TypeSign.parse(s2)
    if isinstance(q, gf.FieldSpec):
        q = q.q
    if q % 4 == 3 and d1 % 2 == 1 and d2 % 2 == 1:
        return -(s1 * s2)
    return s1 * s2


def discriminant_sign(A, f):
    """Sign by discriminant: Plus iff Delta = (-1)^e eps, eps a square for
    even d and a non-square for odd d, e = floor(d/2).

    This is the defining rule for q = 3 mod 4. For q = 1 mod 4 the rule that
    follows from the 1-space assignment and the sum table is: Plus iff Delta
    is a square.
    """
    q = f.q
    disc = f.discriminant(A)
    if disc == 0:
        raise DegenerateSubspace("subspace is degenerate")
    d = A.dim
    sq = pow(disc, (q - 1) // 2, q) == 1
    if q % 4 == 1:
        return PLUS if sq else MINUS
    e = d // 2
    eps = disc * pow(-1 % q, e, q) % q   # Delta = (-1)^e eps
    eps_sq = pow(eps, (q - 1) // 2, q) == 1
    want_sq = d % 2 == 0
    return PLUS if eps_sq == want_sq else MINUS


def classify_type(A, f):
    """Plus or Minus for a nondegenerate subspace.

    Diagonalizes A and folds the sum table over the 1-space signs, so the
    result follows the 1-space assignment plus the sum rules.
    """
    _check_ambient(A, f)
    if not is_nondegenerate(A, f):
        raise DegenerateSubspace("classification needs a nondegenerate subspace")
    if f.q % 4 == 3:
        return discriminant_sign(A, f)
    sign, dim = PLUS, 0
    for v in orthogonal_basis(A, f):
        sign = compose_types(sign, dim, point_sign(f.Q(v), f.q), 1, f.q)
        dim += 1
    return sign


def classify_by_diagonal(A, f):
    """Fold the sum table over an orthogonal basis (valid for every q)."""
    if not is_nondegenerate(A, f):
        raise DegenerateSubspace("classification needs a nondegenerate subspace")
    sign, dim = PLUS, 0
    for v in orthogonal_basis(A, f):
        sign = compose_types(sign, dim, point_sign(f.Q(v), f.q), 1, f.q)
        dim += 1
    return sign


def witt_index(A, f):
    """Witt index by isotropic-vector search and hyperbolic splitting."""
    q = f.q
    S = A
    index = 0
    while S.dim >= 2:
        iso = None
        for v in S.points():
            if f.Q(v) == 0:
                iso = v
                break
        if iso is None:
            break
        partner = None
        for w in S.points():
            if f.b(iso, w):
                partner = w
                break
        if partner is None:
            raise DegenerateSubspace("isotropic vector in the radical")
        H = Subspace.span([iso, partner], q, f.dim)
        S = intersect(S, perp(H, f))
        index += 1
    return index


def line_class(l, f):
    if l.dim != 2:
        raise DimensionMismatch("a line is 2-dimensional")
    if not is_nondegenerate(l, f):
        raise DegenerateSubspace("degenerate line")
    for v in l.points():
        if f.Q(v) == 0:
            return LineClass.HYPERBOLIC
    return LineClass.ELLIPTIC


def label(A, f):
    """(dim, sign) of a nondegenerate subspace, or None if degenerate."""
    if not is_nondegenerate(A, f):
        return None
    return (A.dim, classify_type(A, f))


# ---------------------------------------------------------------------------
# isometries

def reflection(v, f):
    """Matrix (acting on column vectors) of the reflection in v."""
    q = f.q
    qv = f.Q(v)
    if qv == 0:
        raise DegenerateSubspace("cannot reflect in a singular vector")
    c = 2 * pow(qv, q - 2, q) % q
    gv = f.apply(v)
    n = f.dim
    return tuple(tuple((int(i == j) - c * v[i] * gv[j]) % q for j in range(n)) for i in range(n))


def bireflection(v, w, f):
    return gf.matmul(reflection(v, f), reflection(w, f), f.q)


def apply_matrix(M, v, q):
    return tuple(sum(a * b for a, b in zip(row, v)) % q for row in M)


def image(M, A):
    return Subspace.span([apply_matrix(M, r, A.q) for r in A.basis], A.q, A.ambient_dim) \
        if A.dim else A


def is_isometry(M, f):
    q = f.q
    Mt = tuple(zip(*M))
    return gf.matmul(gf.matmul(Mt, f.gram, q), M, q) == f.gram


def so_order(f):
    """|SO(V, f)| from the standard order formulas."""
    q, d = f.q, f.dim
    m = d // 2
    if d % 2:
        order = q ** (m * m)
        for i in range(1, m + 1):
            order *= q ** (2 * i) - 1
        return order
    eps = 1 if witt_index(f.whole(), f) == m else -1
    order = 2 * q ** (m * (m - 1)) * (q ** m - eps)
    for i in range(1, m):
        order *= q ** (2 * i) - 1
    return order // 2


def bireflection_candidates(f):
    """Anisotropic vectors in a fixed order: standard basis first, then
    normalized vectors in lexicographic order."""
    q, n = f.q, f.dim
    seen = set()
    out = []
    std = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    for v in itertools.chain(std, Subspace.whole(n, q).points()):
        v = normalize(v, q)
        if v in seen or f.Q(v) == 0:
            continue
        seen.add(v)
        out.append(v)
    return out


def random_bireflection(f, rng):
    q, n = f.q, f.dim
    def anisotropic():
        while True:
            v = tuple(rng.randrange(q) for _ in range(n))
            if any(v) and f.Q(v):
                return v
    return bireflection(anisotropic(), anisotropic(), f)


def so_generators(f, verify=True, max_degree=20000):
    """Bireflections r_{v0} r_w generating SO(V, f).

    Candidates w are taken in a fixed order and kept when they enlarge the
    generated group, until its order equals |SO|. With ``verify`` False or
    when the vector action is too large to run Schreier-Sims on, a fixed
    prefix of candidates is returned unverified.
    """
    from .cosetgeo import GroupSpec
    cands = bireflection_candidates(f)
    v0 = cands[0]
    target = so_order(f)
    degree = f.q ** f.dim - 1
    if not verify or degree > max_degree:
        return [bireflection(v0, w, f) for w in cands[1:2 * f.dim + 1]]
    gens = []
    order = 1
    for w in cands[1:]:
        M = bireflection(v0, w, f)
        trial = GroupSpec.matrix(gens + [M], f.q, f.dim)
        o = trial.order()
        if o > order:
            gens.append(M)
            order = o
        if order == target:
            return gens
    raise OrthError(f"bireflections only generate a group of order {order} != {target}")


# ---------------------------------------------------------------------------
# hall specs and geometries

@dataclass(frozen=True)
class HallSpec:
    entries: tuple

    def __init__(self, entries):
        ents = []
        for e in entries:
            if isinstance(e, dict):
                d, s = int(e["dim"]), TypeSign.parse(e["sign"])
            else:
                d, s = int(e[0]), TypeSign.parse(e[1])
            ents.append((d, s))
        if len(set(ents)) != len(ents):
            raise UnrealizableHall("repeated (dim, sign) entry")
        if any(d < 1 for d, _ in ents):
            raise UnrealizableHall("dimensions start at 1")
        object.__setattr__(self, "entries", tuple(sorted(ents, key=lambda e: (e[0], e[1].value))))

    @property
    def dims(self):
        return sorted({d for d, _ in self.entries})

    def labels(self):
        out = {}
        for d, s in self.entries:
            out.setdefault(d, set()).add(s)
        return {d: frozenset(s) for d, s in out.items()}

    def to_json(self):
        return [{"dim": d, "sign": s.value} for d, s in self.entries]

    @classmethod
    def recipe(cls, n, plane_sign="+", extra=()):
        """p+, p'-, l-, a plane, and a positive 4-space when it is proper.

        ``n`` is the rank, so the ambient space has dimension n + 1.
        """
        ents = [(1, "+"), (1, "-"), (2, "-"), (3, plane_sign)]
        if n >= 4:
            ents.append((4, "+"))
        ents.extend(extra)
        return cls(ents)

    @classmethod
    def dim_four(cls):
        """p+, p'-, l-, pi+, pi'- for a 4-dimensional ambient space."""
        return cls([(1, "+"), (1, "-"), (2, "-"), (3, "+"), (3, "-")])


class OrthGeometry:
    """Pregeometry of nondegenerate proper subspaces with allowed (dim, sign).

    Elements are :class:`Subspace` values; the type is the dimension and
    incidence is symmetrized containment. Nothing is enumerated up front;
    :meth:`materialize` builds an explicit :class:`~intransitive.pregeo.Pregeometry`.
    """

    def __init__(self, f, labels, hall=None):
        self.f = f
        self.q = f.q
        self.n = f.dim - 1
        self.labels = {d: frozenset(s) for d, s in labels.items()}
        self.hall = hall
        self.types = tuple(sorted(self.labels))
        self._sign_cache = {}

    def __repr__(self):
        lab = {d: "".join(sorted(s.value for s in ss)) for d, ss in self.labels.items()}
        return f"OrthGeometry(q={self.q}, dim={self.f.dim}, labels={lab})"

    # pregeometry interface
    def typ(self, x):
        return x.dim

    def incident(self, x, y):
        if x.dim <= y.dim:
            return y.contains(x)
        return x.contains(y)

    def sign_of(self, S):
        s = self._sign_cache.get(S)
        if s is None:
            if not is_nondegenerate(S, self.f):
                s = False
            else:
                s = classify_type(S, self.f)
            if len(self._sign_cache) > 500000:
                self._sign_cache.clear()
            self._sign_cache[S] = s
        return s or None

    def contains(self, x):
        if not isinstance(x, Subspace) or x.ambient_dim != self.f.dim:
            return False
        allowed = self.labels.get(x.dim)
        if not allowed:
            return False
        s = self.sign_of(x)
        return s is not None and s in allowed

    __contains__ = contains

    def point(self, v):
        return Subspace.span([v], self.q, self.f.dim)

    def join(self, *xs):
        rows = []
        for x in xs:
            rows.extend(x.basis if isinstance(x, Subspace) else [x])
        return Subspace.span(rows, self.q, self.f.dim)

    def collinear(self, a, b):
        return a != b and self.contains(a + b)

    def elements(self, dim=None):
        dims = [dim] if dim is not None else self.types
        V = self.f.whole()
        for d in dims:
            if d not in self.labels:
                continue
            for S in V.subspaces(d):
                if self.contains(S):
                    yield S

    def points(self):
        return self.elements(1)

    def between(self, lower, upper, d):
        """Elements of dimension d containing ``lower`` and inside ``upper``."""
        if d not in self.labels:
            return
        lower = lower if lower is not None else Subspace.zero(self.f.dim, self.q)
        upper = upper if upper is not None else self.f.whole()
        if d < lower.dim or d > upper.dim:
            return
        # complement of lower inside upper
        comp = []
        cur = lower
        for r in upper.basis:
            nxt = cur + Subspace.span([r], self.q, self.f.dim)
            if nxt.dim > cur.dim:
                comp.append(r)
                cur = nxt
        k = d - lower.dim
        if k == 0:
            if self.contains(lower):
                yield lower
            return
        seen = set()
        # k-subspaces of upper/lower, lifted through the complement coordinates
        for coords in iter_rref(len(comp), k, self.q):
            rows = [tuple(sum(c * r[i] for c, r in zip(crow, comp)) % self.q
                          for i in range(self.f.dim)) for crow in coords]
            S = Subspace.span(list(lower.basis) + rows, self.q, self.f.dim)
            if S not in seen and self.contains(S):
                seen.add(S)
                yield S

    def residue_elements(self, flag, d):
        members = sorted(flag, key=lambda x: x.dim)
        lower = None
        upper = None
        for x in members:
            if x.dim < d:
                lower = x if lower is None or x.dim > lower.dim else lower
            elif x.dim > d and upper is None:
                upper = x
            elif x.dim == d:
                return
        yield from self.between(lower, upper, d)

    def count_by_label(self):
        out = {}
        for S in self.elements():
            key = (S.dim, self.sign_of(S).value)
            out[key] = out.get(key, 0) + 1
        return out

    def materialize(self, cap=200000):
        from .pregeo import Pregeometry
        elems = []
        for S in self.elements():
            elems.append(S)
            if len(elems) > cap:
                raise OrthError(f"more than {cap} elements; not materialized")
        typ = [S.dim for S in elems]
        index = {S: i for i, S in enumerate(elems)}
        inc = []
        by_dim = {}
        for i, S in enumerate(elems):
            by_dim.setdefault(S.dim, []).append(i)
        dims = sorted(by_dim)
        for a, da in enumerate(dims):
            for db in dims[a + 1:]:
                for j in by_dim[db]:
                    U = elems[j]
                    # enumerate the small subspaces inside U directly
                    for S in U.subspaces(da):
                        i = index.get(S)
                        if i is not None:
                            inc.append((i, j))
        return Pregeometry(typ, inc, labels=elems)

    def collinearity_graph(self):
        """Adjacency on points: joined by a line of the geometry."""
        import networkx as nx
        pts = list(self.points())
        G = nx.Graph()
        G.add_nodes_from(pts)
        f, q = self.f, self.q
        lines_ok = self.labels.get(2, frozenset())
        info = [(p, p.basis[0], f.Q(p.basis[0]), f.apply(p.basis[0])) for p in pts]
        for i, (p, u, qu, gu) in enumerate(info):
            for p2, v, qv, _ in info[i + 1:]:
                buv = sum(x * y for x, y in zip(v, gu)) % q
                dsc = (qu * qv - buv * buv) % q
                if dsc == 0:
                    continue
                if line_sign_from_disc(dsc, q) in lines_ok:
                    G.add_edge(p, p2)
        return G

    def realize_hall(self):
        if self.hall is None:
            raise UnrealizableHall("geometry was built without a hall")
        return realize_hall(self.f, self.hall)


def line_sign_from_disc(disc, q):
    """Sign of a nondegenerate 2-space with Gram determinant ``disc``."""
    return PLUS if pow(-disc % q, (q - 1) // 2, q) == 1 else MINUS


def build_orth_geometry(n, f):
    if n < 1:
        raise AmbientTooSmall("rank must be at least 1")
    if f.dim != n + 1:
        raise DimensionMismatch(f"form has dimension {f.dim}, expected {n + 1}")
    return OrthGeometry(f, {d: {PLUS, MINUS} for d in range(1, n + 1)})


def build_W_geometry(n, f, hall):
    if n < 1:
        raise AmbientTooSmall("rank must be at least 1")
    if f.dim != n + 1:
        raise DimensionMismatch(f"form has dimension {f.dim}, expected {n + 1}")
    if not isinstance(hall, HallSpec):
        hall = HallSpec(hall)
    if any(d > n for d in hall.dims):
        raise UnrealizableHall("hall entry of dimension at least the ambient dimension")
    realize_hall(f, hall)
    return OrthGeometry(f, hall.labels(), hall=hall)


def realize_hall(f, hall, candidate_limit=4000):
    """Concrete subspaces forming a hall with the requested labels.

    Every entry must contain all entries of smaller dimension, so the search
    runs through dimensions in increasing order, each time over subspaces
    containing the sum of what has been chosen so far.
    """
    q, N = f.q, f.dim
    by_dim = {}
    for d, s in hall.entries:
        by_dim.setdefault(d, []).append(s)
    dims = sorted(by_dim)
    zero = Subspace.zero(N, q)
    geo = OrthGeometry(f, {d: {PLUS, MINUS} for d in range(1, N)})

    def extend(level, chosen, S):
        if level == len(dims):
            return chosen
        d = dims[level]
        if d < S.dim or d >= N:
            return None
        return place(level, d, list(by_dim[d]), chosen, S, S)

    def place(level, d, signs, chosen, S_below, S_acc):
        if not signs:
            return extend(level + 1, chosen, S_acc)
        s = signs[0]
        tried = 0
        for X in geo.between(S_below, None, d):
            if geo.sign_of(X) is not s:
                continue
            tried += 1
            res = place(level, d, signs[1:], chosen + [X], S_below, S_acc + X)
            if res is not None:
                return res
            if tried > candidate_limit:
                break
        return None

    out = extend(0, [], zero)
    if out is None:
        raise UnrealizableHall(f"no hall with labels {[(d, str(s)) for d, s in hall.entries]}")
    return out


# ---------------------------------------------------------------------------
# configs

def form_from_config(cfg):
    q = int(cfg["q"])
    dim = int(cfg["dim"])
    gram = cfg.get("gram", "plus")
    if isinstance(gram, str):
        return BilinearForm.standard(dim, q, gram)
    f = BilinearForm(gram, q)
    if f.dim != dim:
        raise DimensionMismatch(f"gram has size {f.dim}, config says dim {dim}")
    return f


def geometry_from_config(cfg):
    f = form_from_config(cfg)
    n = f.dim - 1
    if cfg.get("hall"):
        return build_W_geometry(n, f, HallSpec(cfg["hall"]))
    return build_orth_geometry(n, f)


# ---------------------------------------------------------------------------
# verifiers

def _points_with_data(f):
    pts = []
    for v in Subspace.whole(f.dim, f.q).points():
        qv = f.Q(v)
        if qv:
            pts.append((v, qv, f.apply(v)))
    return pts


def verify_pointline(n, f, exhaustive=True, samples=1000, seed=0):
    """Points of a line l not collinear with a point a off l: at most two.

    Works in the full geometry of nondegenerate subspaces; collinear means
    spanning a nondegenerate line.
    """
    if f.dim != n + 1:
        raise DimensionMismatch("form dimension does not match n")
    q = f.q
    pts = _points_with_data(f)
    geo = build_orth_geometry(n, f)
    lines = list(geo.elements(2))
    pairs = ((a, l) for a in range(len(pts)) for l in range(len(lines)))
    if not exhaustive:
        rng = random.Random(seed)
        pairs = ((rng.randrange(len(pts)), rng.randrange(len(lines))) for _ in range(samples))
    line_pts = {}
    worst = 0
    min_collinear = None
    instances = skipped = 0
    for ai, li in pairs:
        a, qa, ga = pts[ai]
        l = lines[li]
        if a in l:
            skipped += 1
            continue
        lp = line_pts.get(li)
        if lp is None:
            lp = [(v, f.Q(v)) for v in l.points()]
            lp = [(v, qv) for v, qv in lp if qv]
            line_pts[li] = lp
        good = 0
        for v, qv in lp:
            bav = sum(x * y for x, y in zip(v, ga)) % q
            if (qa * qv - bav * bav) % q:
                good += 1
        bad = len(lp) - good
        worst = max(worst, bad)
        min_collinear = good if min_collinear is None else min(min_collinear, good)
        instances += 1
    return {
        "lemma": "pointline",
        "q": q, "n": n,
        "mode": "exhaustive" if exhaustive else f"sampled({samples})",
        "instances": instances,
        "skipped_point_on_line": skipped,
        "max_noncollinear": worst,
        "min_collinear": min_collinear,
        "bound_noncollinear": 2,
        "bound_collinear": q - 3,
        "passed": worst <= 2 and (min_collinear is None or min_collinear >= q - 3),
    }


def elliptic_line_counts(p, l, m, f):
    """Exact counts for one configuration (p, l, m).

    Returns (#elliptic lines through p meeting l in a point,
             #hyperbolic lines through p meeting m in a nondegenerate point).
    """
    q = f.q
    if p.dim != 1 or l.dim != 2 or m.dim != 2:
        raise ConfigViolatesPrecondition("need a point and two lines")
    for name, cond in (("p is a point", is_nondegenerate(p, f)),
                       ("l is elliptic", is_nondegenerate(l, f) and classify_type(l, f) is MINUS),
                       ("m is hyperbolic", is_nondegenerate(m, f) and classify_type(m, f) is PLUS),
                       ("<p,l> is a nondegenerate plane", (p + l).dim == 3 and is_nondegenerate(p + l, f)),
                       ("<p,m> is a nondegenerate plane", (p + m).dim == 3 and is_nondegenerate(p + m, f))):
        if not cond:
            raise ConfigViolatesPrecondition(name)
    u = p.basis[0]
    qu, gu = f.Q(u), f.apply(u)

    def count(line, want):
        c = 0
        for v in line.points():
            qv = f.Q(v)
            if not qv:
                continue
            buv = sum(x * y for x, y in zip(v, gu)) % q
            dsc = (qu * qv - buv * buv) % q
            if dsc and line_sign_from_disc(dsc, q) is want:
                c += 1
        return c

    return count(l, MINUS), count(m, PLUS)


def random_line_config(f, rng, tries=10000):
    q, N = f.q, f.dim

    def rvec():
        while True:
            v = tuple(rng.randrange(q) for _ in range(N))
            if any(v):
                return v

    def rline(sign, p):
        for _ in range(tries):
            L = Subspace.span([rvec(), rvec()], q, N)
            if L.dim != 2 or not is_nondegenerate(L, f) or classify_type(L, f) is not sign:
                continue
            P = p + L
            if P.dim == 3 and is_nondegenerate(P, f):
                return L
        raise ConfigViolatesPrecondition("no line found")

    for _ in range(tries):
        p = Subspace.span([rvec()], q, N)
        if is_nondegenerate(p, f):
            break
    return p, rline(MINUS, p), rline(PLUS, p)


def verify_elliptic_line_counts(n, f, config=None, samples=500, seed=0):
    """Elliptic and hyperbolic line counts against (q-1)/2 and (q-5)/2.

    ``config`` is a single (p, l, m); without it ``samples`` random valid
    configurations are drawn.
    """
    if n < 2 or f.dim != n + 1:
        raise ConfigViolatesPrecondition("need n >= 2 and a matching form")
    q = f.q
    rng = random.Random(seed)
    configs = [config] if config is not None else (random_line_config(f, rng) for _ in range(samples))
    ell_bound, hyp_bound = (q - 1) // 2, (q - 5) // 2
    ell, hyp = [], []
    for p, l, m in configs:
        e, h = elliptic_line_counts(p, l, m, f)
        ell.append(e)
        hyp.append(h)
    return {
        "lemma": "linecounts",
        "q": q, "n": n,
        "instances": len(ell),
        "elliptic_min": min(ell), "elliptic_max": max(ell),
        "hyperbolic_min": min(hyp), "hyperbolic_max": max(hyp),
        "elliptic_bound": ell_bound, "hyperbolic_bound": hyp_bound,
        "elliptic_counts": sorted(set(ell)), "hyperbolic_counts": sorted(set(hyp)),
        "passed": min(ell) >= ell_bound and min(hyp) >= hyp_bound,
    }


def verify_diameter(geometry):
    """BFS diameter of the collinearity graph; DisconnectedGraph if infinite."""
    import networkx as nx
    if isinstance(geometry, OrthGeometry):
        G = geometry.collinearity_graph()
    else:
        from .pregeo import collinearity_graph
        G = collinearity_graph(geometry)
    if G.number_of_nodes() == 0:
        raise DisconnectedGraph("no points")
    if not nx.is_connected(G):
        raise DisconnectedGraph("collinearity graph is disconnected (diameter infinite)")
    return nx.diameter(G)


def verify_geometry_axioms(geometry, cap=200000):
    """(Pre), (Geo) and connectivity on the materialized geometry."""
    from .pregeo import PregeoError, is_connected, is_geometry
    try:
        g = geometry.materialize(cap) if isinstance(geometry, OrthGeometry) else geometry
        pre_ok = True
    except PregeoError as e:
        return {"lemma": "geometryaxioms", "pre": False, "detail": str(e), "passed": False}
    ok, witness = is_geometry(g)
    conn = is_connected(g)
    return {
        "lemma": "geometryaxioms",
        "elements": len(g), "rank": g.rank,
        "counts": {str(t): len(g.elements(t)) for t in g.types},
        "pre": pre_ok, "geo": ok, "connected": conn,
        "nonmaximal_flag": None if witness is None else [str(g.labels[x]) for x in witness],
        "passed": pre_ok and ok and conn,
    }


def random_nondegenerate(f, d, rng, within=None, tries=10000):
    q, N = f.q, f.dim
    base = within if within is not None else f.whole()
    for _ in range(tries):
        rows = []
        for _ in range(d):
            coeffs = [rng.randrange(q) for _ in range(base.dim)]
            rows.append(tuple(sum(c * r[i] for c, r in zip(coeffs, base.basis)) % q
                              for i in range(N)))
        S = Subspace.span(rows, q, N)
        if S.dim == d and is_nondegenerate(S, f):
            return S
    raise ConfigViolatesPrecondition(f"no nondegenerate {d}-space found")


def random_orthogonal_pair(f, rng):
    """Nondegenerate A and B inside A^perp, both nonzero."""
    N = f.dim
    da = rng.randrange(1, N)
    A = random_nondegenerate(f, da, rng)
    P = perp(A, f)
    db = rng.randrange(1, P.dim + 1)
    B = random_nondegenerate(f, db, rng, within=P)
    return A, B


def verify_type_rules(q, pairs=1000, seed=0, dims=(3, 4, 5, 6)):
    """Sum table against direct classification on random orthogonal pairs,
    plus the Witt-index characterization on every even-dimensional space."""
    rng = random.Random(seed)
    mismatches = []
    witt_checked = witt_bad = 0
    for i in range(pairs):
        N = dims[i % len(dims)]
        f = BilinearForm.standard(N, q, rng.choice("+-"))
        A, B = random_orthogonal_pair(f, rng)
        sa, sb = classify_type(A, f), classify_type(B, f)
        S = A + B
        predicted = compose_types(sa, A.dim, sb, B.dim, q)
        actual = classify_type(S, f)
        if predicted is not actual:
            mismatches.append({"A": A.key(), "B": B.key(), "predicted": str(predicted),
                               "actual": str(actual)})
        for X in (A, B, S):
            if X.dim % 2 == 0:
                witt_checked += 1
                hyper = witt_index(X, f) == X.dim // 2
                if hyper != (classify_type(X, f) is PLUS):
                    witt_bad += 1
    return {
        "lemma": "typerules", "q": q, "pairs": pairs,
        "mismatches": len(mismatches), "examples": mismatches[:5],
        "witt_checked": witt_checked, "witt_mismatches": witt_bad,
        "passed": not mismatches and witt_bad == 0,
    }

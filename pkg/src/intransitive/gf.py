"""Prime fields of odd order.

Elements are least nonnegative residues. Most of the package works on bare
ints for speed and only uses :class:`FieldElement` at the API boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class FieldError(ValueError):
    pass


class NonPrime(FieldError):
    pass


class EvenCharacteristic(FieldError):
    pass


class ZeroInput(FieldError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q for an odd prime q."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise NonPrime(f"{self.q!r} is not a prime")
        if self.q % 2 == 0:
            raise EvenCharacteristic(f"characteristic {self.q} is even")
        if not _is_prime(self.q):
            raise NonPrime(f"{self.q} is not a prime")

    def __call__(self, value):
        return FieldElement(value % self.q, self)

    def elements(self):
        return [FieldElement(v, self) for v in range(self.q)]

    def inv(self, a):
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.q - 2, self.q)

    def legendre(self, a):
        """1 for nonzero squares, -1 for non-squares, 0 for zero."""
        a %= self.q
        if a == 0:
            return 0
        return 1 if pow(a, (self.q - 1) // 2, self.q) == 1 else -1

    def is_square(self, a):
        a %= self.q
        if a == 0:
            raise ZeroInput("square class of 0 is undefined")
        return pow(a, (self.q - 1) // 2, self.q) == 1

    @property
    def nonsquare(self):
        return _least_nonsquare(self.q)

    def sqrt(self, a):
        """Some square root of a, or None if a is not a square."""
        a %= self.q
        if a == 0:
            return 0
        for x in range(1, (self.q + 1) // 2):
            if x * x % self.q == a:
                return x
        return None


@lru_cache(maxsize=None)
def _least_nonsquare(q):
    for a in range(2, q):
        if pow(a, (q - 1) // 2, q) != 1:
            return a
    raise FieldError(f"no non-square in F_{q}")


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldSpec

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other.value
        return other % self.field.q

    def __add__(self, other):
        return FieldElement((self.value + self._coerce(other)) % self.field.q, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement((self.value - self._coerce(other)) % self.field.q, self.field)

    def __rsub__(self, other):
        return FieldElement((self._coerce(other) - self.value) % self.field.q, self.field)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other) % self.field.q, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.field.q, self.field)

    def inverse(self):
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.field).inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(pow(self.value, e, self.field.q), self.field)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.q})"


def make_field(q):
    return FieldSpec(q)


def is_square(a, field=None):
    """True iff the nonzero element a is a square.

    ``a`` is a FieldElement, or an int together with ``field``.
    """
    if isinstance(a, FieldElement):
        return a.field.is_square(a.value)
    if field is None:
        raise TypeError("an int needs an explicit field")
    if isinstance(field, int):
        field = FieldSpec(field)
    return field.is_square(a)


# ---------------------------------------------------------------------------
# matrices as tuples of tuples of ints

def rref(rows, q):
    """Reduced row echelon form over F_q.

    Returns (nonzero rows as a tuple of tuples, pivot columns).
    """
    m = [list(r) for r in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] % q:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], q - 2, q)
        m[r] = [x * inv % q for x in m[r]]
        row = m[r]
        for i in range(len(m)):
            if i != r:
                f = m[i][c] % q
                if f:
                    mi = m[i]
                    m[i] = [(a - f * b) % q for a, b in zip(mi, row)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(x % q for x in row) for row in m[:r]), tuple(pivots)


def rank(rows, q):
    return len(rref(rows, q)[0])


def det(mat, q):
    m = [list(r) for r in mat]
    n = len(m)
    d = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if m[i][c] % q:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d = d * m[c][c] % q
        inv = pow(m[c][c], q - 2, q)
        for i in range(c + 1, n):
            f = m[i][c] * inv % q
            if f:
                m[i] = [(a - f * b) % q for a, b in zip(m[i], m[c])]
    return d % q


def matmul(a, b, q):
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) % q for col in bt) for row in a)


def mat_inverse(a, q):
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug, q)
    if piv[:n] != tuple(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in red)


def kernel(rows, ncols, q):
    """RREF basis of {x : M x = 0}."""
    red, piv = rref(rows, q) if rows else ((), ())
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(red, piv):
            v[pc] = -row[fc] % q
        basis.append(v)
    return rref(basis, q)[0] if basis else ()


@dataclass(frozen=True)
class SolutionSet:
    """Affine solution space of M x = b; ``particular`` is None when empty."""

    particular: tuple | None
    kernel: tuple

    @property
    def consistent(self):
        return self.particular is not None

    @property
    def dimension(self):
        return len(self.kernel) if self.consistent else -1


def solve_linear(M, b, q):
    """Solve M x = b over F_q.

    An inconsistent system is reported through ``SolutionSet.consistent``,
    not by raising.
    """
    if isinstance(q, FieldSpec):
        q = q.q
    M = [[int(x) % q for x in row] for row in M]
    b = [int(x) % q for x in b]
    if len(M) != len(b):
        raise FieldError("row count of M and length of b differ")
    ncols = len(M[0]) if M else 0
    aug = [row + [bi] for row, bi in zip(M, b)]
    red, piv = rref(aug, q) if aug else ((), ())
    ker = kernel(M, ncols, q) if M else tuple(
        tuple(int(i == j) for j in range(ncols)) for i in range(ncols))
    if ncols in piv:
        return SolutionSet(None, ker)
    x = [0] * ncols
    for row, pc in zip(red, piv):
        x[pc] = row[ncols]
    return SolutionSet(tuple(x), ker)

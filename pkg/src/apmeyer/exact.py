"""Exact scalars and exact integer/rational linear algebra.

Rationals are ``fractions.Fraction``.  Real quadratic irrationals a + b*sqrt(D)
(D a fixed square-free positive integer) are ``QuadScalar``; all sign queries,
comparisons and floors are decided exactly through integer arithmetic, never
through floating point.  On top of the scalars this module provides the exact
linear algebra the rest of the library reduces to: rank over Q by
fraction-free elimination, greedy maximal independent subsets, Smith normal
form with transform tracking, and the submodule multiplier (the least n with
n*M inside a finite-index submodule, read off the largest elementary divisor).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, isqrt

from .errors import ParseError, RankDeficient

_SQUAREFREE_CHECKED: set[int] = set()


def _require_squarefree(d: int) -> None:
    if d in _SQUAREFREE_CHECKED:
        return
    if d <= 0:
        raise ValueError(f"quadratic radicand must be positive, got {d}")
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            raise ValueError(f"quadratic radicand must be square-free, got {d}")
        k += 1
    _SQUAREFREE_CHECKED.add(d)


def sqrt_bounds(d: int, bits: int = 32) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(d) <= hi with hi - lo <= 2**-bits."""
    _require_squarefree(d)
    s = isqrt(d << (2 * bits))
    scale = 1 << bits
    lo = Fraction(s, scale)
    hi = Fraction(s + 1, scale)
    return lo, hi


def sqrt_lower(q: Fraction, bits: int = 32) -> Fraction:
    """Rational u <= sqrt(q); exact when q is a perfect rational square."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    n = q.numerator * q.denominator
    s = isqrt(n << (2 * bits))
    return Fraction(s, q.denominator << bits)


def sqrt_upper(q: Fraction, bits: int = 32) -> Fraction:
    """Rational u >= sqrt(q); exact when q is a perfect rational square."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    n = q.numerator * q.denominator
    s = isqrt(n << (2 * bits))
    if s * s == n << (2 * bits):
        return Fraction(s, q.denominator << bits)
    return Fraction(s + 1, q.denominator << bits)


class QuadScalar:
    """Exact real a + b*sqrt(D) with rational a, b.

    Purely rational values carry D = 0 and interoperate with any radicand;
    two genuinely irrational values combine only when their D agree.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a=0, b=0, D=0):
        a = Fraction(a)
        b = Fraction(b)
        if b == 0:
            D = 0
        else:
            D = int(D)
            _require_squarefree(D)
        self.a = a
        self.b = b
        self.D = D

    # -- coercion ---------------------------------------------------------

    @classmethod
    def _coerce(cls, x) -> "QuadScalar":
        if isinstance(x, QuadScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        return NotImplemented

    def _join(self, other: "QuadScalar") -> int:
        if self.D == 0:
            return other.D
        if other.D == 0 or other.D == self.D:
            return self.D
        raise ValueError(f"mixed radicands sqrt({self.D}) and sqrt({other.D})")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadScalar(self.a + other.a, self.b + other.b, self._join(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.D)

    def __sub__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        D = self._join(other)
        return QuadScalar(
            self.a * other.a + self.b * other.b * D,
            self.a * other.b + self.b * other.a,
            D,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def __truediv__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by zero QuadScalar")
        D = self._join(other)
        n = other.norm()
        conj = other.conjugate()
        num = self * conj
        return QuadScalar(num.a / n, num.b / n, D)

    def __rtruediv__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    # -- exact order ------------------------------------------------------

    def sign(self) -> int:
        """Sign of the real number, via integer comparison of a^2 and b^2 D."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # opposite signs: |a| vs |b| sqrt(D) decided on squares
        t = self.a * self.a - self.b * self.b * self.D
        return sa * ((t > 0) - (t < 0))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.b != 0 and other.b != 0 and self.D != other.D:
            return False
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __lt__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __le__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() <= 0

    def __gt__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() > 0

    def __ge__(self, other):
        other = QuadScalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- brackets and formatting ------------------------------------------

    def bounds(self, bits: int = 32) -> tuple[Fraction, Fraction]:
        """Outward rational brackets lo <= value <= hi."""
        if self.b == 0:
            return self.a, self.a
        lo, hi = sqrt_bounds(self.D, bits)
        if self.b > 0:
            return self.a + self.b * lo, self.a + self.b * hi
        return self.a + self.b * hi, self.a + self.b * lo

    def __float__(self):
        return float(self.a) + float(self.b) * (self.D ** 0.5)

    def __floor__(self):
        if self.b == 0:
            return self.a.numerator // self.a.denominator
        bits = 32
        while True:
            lo, hi = self.bounds(bits)
            flo = lo.numerator // lo.denominator
            fhi = hi.numerator // hi.denominator
            if flo == fhi:
                return flo
            bits *= 2

    def __ceil__(self):
        return -((-self).__floor__())

    def as_literal(self) -> str:
        if self.b == 0:
            return format_rational(self.a)
        sep = "+" if self.b >= 0 else "-"
        return f"{format_rational(self.a)}{sep}{format_rational(abs(self.b))}*sqrt({self.D})"

    def __repr__(self):
        return f"QuadScalar({self.a!r}, {self.b!r}, {self.D})"

    def __str__(self):
        return self.as_literal()


def as_quad(x) -> QuadScalar:
    q = QuadScalar._coerce(x)
    if q is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an exact scalar")
    return q


def quad_sign(x) -> int:
    """Exact sign in {-1, 0, +1} of a rational or quadratic scalar."""
    return as_quad(x).sign()


def floor_quad(x) -> int:
    return as_quad(x).__floor__()


def ceil_quad(x) -> int:
    return as_quad(x).__ceil__()


def quad_bounds(x, bits: int = 32) -> tuple[Fraction, Fraction]:
    return as_quad(x).bounds(bits)


def decimal_str(x, digits: int = 20) -> str:
    """Truncated decimal expansion with `digits` significant digits.

    Informative output only; truncation is toward zero and deterministic.
    """
    x = as_quad(x)
    if not x:
        return "0"
    neg = x.sign() < 0
    y = abs(x)
    # find exponent e with 10^e <= y < 10^(e+1)
    e = 0
    while y >= Fraction(10) ** (e + 1):
        e += 1
    while y < Fraction(10) ** e:
        e -= 1
    scaled = y * Fraction(10) ** (digits - 1 - e)
    n = scaled.__floor__() if isinstance(scaled, QuadScalar) else scaled.numerator // scaled.denominator
    s = str(n)
    point = e + 1
    if point <= 0:
        body = "0." + "0" * (-point) + s
    elif point >= len(s):
        body = s + "0" * (point - len(s))
    else:
        body = s[:point] + "." + s[point:]
    return ("-" if neg else "") + body


# -- literal grammar -------------------------------------------------------

_RAT_RE = re.compile(r"[+-]?\d+(?:/\d+)?")
_QUAD_TAIL_RE = re.compile(r"([+-])(\d+(?:/\d+)?)\*sqrt\((\d+)\)")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    t = text.strip()
    m = _RAT_RE.fullmatch(t)
    if not m:
        raise ParseError(f"not a rational literal: {text!r}", position=0)
    return Fraction(t)


def parse_quad(text: str) -> QuadScalar:
    """Parse `<rat>` or `<rat>+<rat>*sqrt(<D>)` / `<rat>-<rat>*sqrt(<D>)`."""
    t = text.strip()
    m = _RAT_RE.match(t)
    if not m:
        raise ParseError(f"expected a rational at the start of {text!r}", position=0)
    a = Fraction(m.group(0))
    rest = t[m.end():]
    if not rest:
        return QuadScalar(a)
    tail = _QUAD_TAIL_RE.fullmatch(rest)
    if not tail:
        raise ParseError(f"malformed quadratic literal {text!r}", position=m.end())
    sign, babs, d = tail.groups()
    b = Fraction(babs)
    if sign == "-":
        b = -b
    return QuadScalar(a, b, int(d))


# -- flattening to rational vectors ----------------------------------------

def flatten_scalar(x) -> tuple[Fraction, Fraction]:
    """Coefficients of (1, sqrt(D)); rationals flatten to (x, 0)."""
    q = as_quad(x)
    return (q.a, q.b)


def flatten_vector(v) -> tuple[Fraction, ...]:
    out: list[Fraction] = []
    for x in v:
        out.extend(flatten_scalar(x))
    return tuple(out)


# -- rank over Q by fraction-free elimination -------------------------------

def _integerize(vec) -> tuple[int, ...]:
    fracs = [Fraction(x) for x in vec]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


class IntEchelon:
    """Incremental fraction-free row echelon over Z.

    insert() returns True when the vector enlarges the span.  Rows are kept
    primitive (gcd 1) so entries stay small.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, tuple[int, ...]]] = []  # (pivot column, row)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, vec) -> bool:
        v = list(_integerize(vec))
        if len(v) != self.dim:
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {len(v)}")
        for piv, row in self.rows:
            if v[piv]:
                c = v[piv]
                p = row[piv]
                v = [p * x - c * y for x, y in zip(v, row)]
                g = 0
                for x in v:
                    g = gcd(g, x)
                if g > 1:
                    v = [x // g for x in v]
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            return False
        if v[piv] < 0:
            v = [-x for x in v]
        self.rows.append((piv, tuple(v)))
        self.rows.sort(key=lambda pr: pr[0])
        return True


def _as_fraction_rows(vectors) -> list[tuple[Fraction, ...]]:
    rows = [tuple(Fraction(x) for x in v) for v in vectors]
    if rows:
        dim = len(rows[0])
        for r in rows:
            if len(r) != dim:
                raise ValueError("dimension mismatch among input vectors")
    return rows


def rank_over_Q(vectors) -> int:
    """Dimension of the Q-span of the given rational vectors."""
    rows = _as_fraction_rows(vectors)
    if not rows:
        return 0
    ech = IntEchelon(len(rows[0]))
    for r in rows:
        ech.insert(r)
    return ech.rank


def max_li_subset(vectors) -> list[int]:
    """Indices of the first maximal linearly independent subset in scan order."""
    rows = _as_fraction_rows(vectors)
    if not rows:
        return []
    ech = IntEchelon(len(rows[0]))
    return [i for i, r in enumerate(rows) if ech.insert(r)]


# -- Smith normal form ------------------------------------------------------

def _check_int_matrix(mat) -> list[list[int]]:
    rows = [list(map(int, r)) for r in mat]
    if not rows or not rows[0]:
        raise ValueError("matrix must have positive dimensions")
    width = len(rows[0])
    for r in rows:
        if len(r) != width:
            raise ValueError("ragged matrix")
    return rows


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(mat) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (S, U, V) with S = U * mat * V diagonal, d_1 | d_2 | ... | d_r > 0."""
    S = _check_int_matrix(mat)
    nr, nc = len(S), len(S[0])
    U = _identity(nr)
    V = _identity(nc)

    def row_gcd_transform(t, i):
        # unimodular on rows t, i: makes S[t][t] = gcd, S[i][t] = 0
        a, b = S[t][t], S[i][t]
        g, x, y = _ext_gcd(a, b)
        p, q = a // g, b // g
        for M in (S, U):
            rt, ri = M[t], M[i]
            for j in range(len(rt)):
                rt[j], ri[j] = x * rt[j] + y * ri[j], -q * rt[j] + p * ri[j]

    def col_gcd_transform(t, j):
        a, b = S[t][t], S[t][j]
        g, x, y = _ext_gcd(a, b)
        p, q = a // g, b // g
        for M, h in ((S, nr), (V, nc)):
            for i in range(h):
                M[i][t], M[i][j] = x * M[i][t] + y * M[i][j], -q * M[i][t] + p * M[i][j]

    t = 0
    while t < min(nr, nc):
        # pivot: smallest nonzero magnitude in the trailing block
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if S[i][j] and (piv is None or abs(S[i][j]) < abs(S[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        if piv[0] != t:
            S[t], S[piv[0]] = S[piv[0]], S[t]
            U[t], U[piv[0]] = U[piv[0]], U[t]
        if piv[1] != t:
            for i in range(nr):
                S[i][t], S[i][piv[1]] = S[i][piv[1]], S[i][t]
            for i in range(nc):
                V[i][t], V[i][piv[1]] = V[i][piv[1]], V[i][t]
        while True:
            for i in range(t + 1, nr):
                if S[i][t]:
                    if S[i][t] % S[t][t] == 0:
                        q = S[i][t] // S[t][t]
                        S[i] = [x - q * y for x, y in zip(S[i], S[t])]
                        U[i] = [x - q * y for x, y in zip(U[i], U[t])]
                    else:
                        # strictly shrinks |pivot|, so this branch fires finitely often
                        row_gcd_transform(t, i)
            for j in range(t + 1, nc):
                if S[t][j]:
                    if S[t][j] % S[t][t] == 0:
                        q = S[t][j] // S[t][t]
                        for i in range(nr):
                            S[i][j] -= q * S[i][t]
                        for i in range(nc):
                            V[i][j] -= q * V[i][t]
                    else:
                        col_gcd_transform(t, j)
            if all(S[i][t] == 0 for i in range(t + 1, nr)) and all(
                S[t][j] == 0 for j in range(t + 1, nc)
            ):
                break
        # divisor chain fixup: pivot must divide the trailing block
        offender = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if S[i][j] % S[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for j in range(nc):
                S[t][j] += S[offender][j]
            for j in range(nr):
                U[t][j] += U[offender][j]
            continue
        if S[t][t] < 0:
            for j in range(nc):
                S[t][j] = -S[t][j]
            for j in range(nr):
                U[t][j] = -U[t][j]
        t += 1
    return S, U, V


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def smith_divisors(mat) -> list[int]:
    """Elementary divisors d_1 | d_2 | ... | d_r, each positive."""
    S, _, _ = smith_normal_form(mat)
    return [S[i][i] for i in range(min(len(S), len(S[0]))) if S[i][i]]


def submodule_multiplier(mat) -> int:
    """Least elementary-divisor multiplier n with n * Z^k inside the row module.

    Rows of `mat` are generators of a submodule N of M = Z^k in the basis of M;
    requires full column rank (rank(N) = rank(M)).
    """
    divisors = smith_divisors(mat)
    cols = len(_check_int_matrix(mat)[0])
    if len(divisors) < cols:
        raise RankDeficient(
            f"row rank {len(divisors)} is smaller than column count {cols}"
        )
    return divisors[-1]


def module_contains(mat, target) -> bool:
    """Exact membership of an integer vector in the Z-row-module of `mat`."""
    rows = _check_int_matrix(mat)
    v = list(map(int, target))
    if len(v) != len(rows[0]):
        raise ValueError("dimension mismatch")
    S, _, V = smith_normal_form(rows)
    w = [sum(v[i] * V[i][j] for i in range(len(v))) for j in range(len(v))]
    r = len(smith_divisors(rows))
    for j in range(len(v)):
        d = S[j][j] if j < min(len(S), len(S[0])) else 0
        if j < r:
            if w[j] % d:
                return False
        elif w[j]:
            return False
    return True


# -- exact rational linear solve --------------------------------------------

def solve_columns(columns, target):
    """Solve sum_j x_j * columns[j] = target over Q.

    Returns a list of Fractions (free variables pinned to 0) or None when the
    system is inconsistent.
    """
    cols = [list(map(Fraction, c)) for c in columns]
    b = list(map(Fraction, target))
    n = len(cols)
    m = len(b)
    for c in cols:
        if len(c) != m:
            raise ValueError("dimension mismatch")
    # augmented row-major matrix
    A = [[cols[j][i] for j in range(n)] + [b[i]] for i in range(m)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(n):
        sel = next((i for i in range(row, m) if A[i][col] != 0), None)
        if sel is None:
            continue
        A[row], A[sel] = A[sel], A[row]
        pv = A[row][col]
        A[row] = [x / pv for x in A[row]]
        for i in range(m):
            if i != row and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
        pivots.append((row, col))
        row += 1
        if row == m:
            break
    for i in range(row, m):
        if A[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, c in pivots:
        x[c] = A[r][n]
    return x

"""Exact arithmetic in K = Q[pi]/(pi^m - p) with exact p-adic valuation.

Elements are tuples of m arbitrary-precision rationals (c_0, ..., c_{m-1})
standing for sum_j c_j pi^j.  The valuation is

    v(sum_j c_j pi^j) = min_j (v_p(c_j) + j/m),

exact because the candidate values have distinct residues mod Z, so the
minimum is attained at a unique j.  The normalization is |p| = p^{-1},
i.e. valuations are reported additively with v(p) = 1.
"""

from fractions import Fraction
import math

from .errors import DivisionByZero, FieldMismatch, IllegalExponent

INF = float("inf")  # valuation of zero


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldConfig:
    """Parameters of the coefficient field: prime p, ramification m, q = p^a."""

    __slots__ = ("p", "m", "q", "a")

    def __init__(self, p, m=1, q=None):
        if not is_prime(p):
            raise ValueError("p must be prime, got %r" % (p,))
        if m < 1:
            raise ValueError("m must be >= 1")
        if q is None:
            q = p
        a = 0
        qq = q
        while qq > 1 and qq % p == 0:
            qq //= p
            a += 1
        if qq != 1 or a < 1:
            raise ValueError("q must be a positive power of p")
        self.p = p
        self.m = m
        self.q = q
        self.a = a

    def __eq__(self, other):
        return (isinstance(other, FieldConfig)
                and (self.p, self.m, self.q) == (other.p, other.m, other.q))

    def __hash__(self):
        return hash((self.p, self.m, self.q))

    def __repr__(self):
        return "FieldConfig(p=%d, m=%d, q=%d)" % (self.p, self.m, self.q)

    def check_same(self, other):
        if self != other:
            raise FieldMismatch("incompatible field configs: %r vs %r" % (self, other))

    # --- constructors -------------------------------------------------

    def zero(self):
        return Scalar(self, (Fraction(0),) * self.m)

    def one(self):
        return self.rational(1)

    def rational(self, c):
        coeffs = [Fraction(0)] * self.m
        coeffs[0] = Fraction(c)
        return Scalar(self, tuple(coeffs))

    def pi_power(self, k):
        """pi^k for any integer k (negative allowed)."""
        j = k % self.m
        e = (k - j) // self.m
        coeffs = [Fraction(0)] * self.m
        coeffs[j] = Fraction(self.p) ** e
        return Scalar(self, tuple(coeffs))

    def q_power(self, exponent):
        """q^e for rational e, when representable as a power of pi.

        q = p^a, so q^e = pi^(m*a*e); legal iff m*a*e is an integer.
        """
        e = Fraction(exponent)
        k = e * self.m * self.a
        if k.denominator != 1:
            raise IllegalExponent(
                "q^(%s) is not representable with m=%d, q=p^%d"
                % (e, self.m, self.a))
        return self.pi_power(int(k))


def _val_p(c, p):
    """v_p of a Fraction, as an exact integer (INF for 0)."""
    if c == 0:
        return INF
    num, den = c.numerator, c.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class Scalar:
    """An element of K = Q[pi]/(pi^m - p)."""

    __slots__ = ("config", "coeffs")

    def __init__(self, config, coeffs):
        assert len(coeffs) == config.m
        self.config = config
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    # --- predicates ---------------------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.config == other.config and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == self.config.rational(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.config, self.coeffs))

    # --- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Scalar):
            self.config.check_same(other.config)
            return other
        if isinstance(other, (int, Fraction)):
            return self.config.rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.config,
                      tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.config, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.config,
                      tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m, p = self.config.m, self.config.p
        out = [Fraction(0)] * m
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                if b == 0:
                    continue
                k = i + j
                if k >= m:
                    out[k - m] += a * b * p
                else:
                    out[k] += a * b
        return Scalar(self.config, tuple(out))

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse via Gaussian elimination on the
        multiplication-by-self matrix over Q."""
        if self.is_zero():
            raise DivisionByZero("inverse of zero in K")
        m, p = self.config.m, self.config.p
        # column j of M is self * pi^j expressed in the pi-basis
        M = [[Fraction(0)] * m for _ in range(m)]
        for j in range(m):
            for i, a in enumerate(self.coeffs):
                k = i + j
                if k >= m:
                    M[k - m][j] += a * p
                else:
                    M[k][j] += a
        # solve M x = e0
        rhs = [Fraction(1 if i == 0 else 0) for i in range(m)]
        # forward elimination with partial (first nonzero) pivoting
        rows = list(range(m))
        for col in range(m):
            piv = next((r for r in range(col, m) if M[rows[r]][col] != 0), None)
            if piv is None:
                raise DivisionByZero("non-invertible element (unexpected)")
            rows[col], rows[piv] = rows[piv], rows[col]
            pr = rows[col]
            inv = 1 / M[pr][col]
            for r in range(col + 1, m):
                rr = rows[r]
                f = M[rr][col] * inv
                if f == 0:
                    continue
                for c in range(col, m):
                    M[rr][c] -= f * M[pr][c]
                rhs[rr] -= f * rhs[pr]
        x = [Fraction(0)] * m
        for col in range(m - 1, -1, -1):
            pr = rows[col]
            s = rhs[pr] - sum(M[pr][c] * x[c] for c in range(col + 1, m))
            x[col] = s / M[pr][col]
        return Scalar(self.config, tuple(x))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.config.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # --- valuation ----------------------------------------------------

    def valuation(self):
        """Exact v_p in (1/m)Z, or +inf for zero."""
        m, p = self.config.m, self.config.p
        best = INF
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            v = Fraction(_val_p(c, p)) + Fraction(j, m)
            if v < best:
                best = v
        return best

    # --- serialization ------------------------------------------------

    def canonical(self):
        """Canonical form "c0/d0 + (c1/d1) pi + (c2/d2) pi^2 + ..." with
        all m terms present; round-trip parseable."""
        parts = []
        for j, c in enumerate(self.coeffs):
            body = "%d/%d" % (c.numerator, c.denominator)
            if j == 0:
                parts.append(body)
            elif j == 1:
                parts.append("(%s) pi" % body)
            else:
                parts.append("(%s) pi^%d" % (body, j))
        return " + ".join(parts)

    @staticmethod
    def parse_canonical(config, text):
        terms = [t.strip() for t in text.split("+")]
        coeffs = [Fraction(0)] * config.m
        for j, term in enumerate(terms):
            body = term
            if body.startswith("("):
                body = body[1:body.index(")")]
            else:
                body = body.split()[0]
            coeffs[j] = Fraction(body)
        return Scalar(config, tuple(coeffs))

    def __repr__(self):
        return "Scalar(%s)" % self.canonical()


def factorial_valuation(i, p):
    """v_p(i!) by the Legendre formula."""
    if i < 0:
        raise ValueError("i must be >= 0")
    v = 0
    pk = p
    while pk <= i:
        v += i // pk
        pk *= p
    return v


def log_p_floor_frac(i, p, denominator=4096):
    """Largest multiple of 1/denominator that is <= log_p(i), computed by
    exact integer comparison (p^k <= i^denominator).  Exact when i is a
    power of p."""
    if i < 1:
        raise ValueError("i must be >= 1")
    # exact case
    k, pk = 0, 1
    while pk < i:
        pk *= p
        k += 1
    if pk == i:
        return Fraction(k)
    # binary search for floor(denominator * log_p(i))
    lo, hi = 0, k * denominator  # log_p(i) < k here
    target = i ** denominator
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if p ** mid <= target:
            lo = mid
        else:
            hi = mid - 1
    return Fraction(lo, denominator)

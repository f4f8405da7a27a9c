"""Truncated Laurent series over K, the log extension (polynomials in
L = log t), and the rational-function coefficient field used at the
generic point.

A TruncatedSeries holds coefficients a_i for i_low <= i <= trunc; terms
beyond trunc are unknown, not zero.  trunc = None means the series is an
exact (Laurent) polynomial.  All arithmetic tracks the tightest valid
truncation: a product of windows (N1, low l1) and (N2, low l2) is valid
through min(N1 + l2, N2 + l1).
"""

from fractions import Fraction

from .errors import (DivisionByZero, EmptySeries, FieldMismatch,
                     NotAFrobeniusLift, ResidueObstruction)
from .scalars import INF, Scalar


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncatedSeries:
    """Laurent series sum a_i t^i over K, known through degree trunc."""

    __slots__ = ("config", "coeffs", "trunc")

    def __init__(self, config, coeffs, trunc=None):
        self.config = config
        if trunc is not None:
            trunc = int(trunc)
        self.trunc = trunc
        clean = {}
        for i, c in coeffs.items():
            if trunc is not None and i > trunc:
                continue
            if isinstance(c, (int, Fraction)):
                c = config.rational(c)
            if not c.is_zero():
                clean[i] = c
        self.coeffs = clean

    # --- constructors -------------------------------------------------

    @staticmethod
    def zero(config, trunc=None):
        return TruncatedSeries(config, {}, trunc)

    @staticmethod
    def monomial(config, exp, coeff=1, trunc=None):
        return TruncatedSeries(config, {exp: coeff}, trunc)

    @staticmethod
    def from_scalar(config, c, trunc=None):
        return TruncatedSeries(config, {0: c}, trunc)

    # --- basic queries ------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def coeff(self, i):
        c = self.coeffs.get(i)
        return c if c is not None else self.config.zero()

    def low_order(self):
        return min(self.coeffs) if self.coeffs else 0

    def degree(self):
        return max(self.coeffs) if self.coeffs else 0

    def constant_term(self):
        return self.coeff(0)

    def is_polynomial(self):
        return self.trunc is None

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.config == other.config and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, Scalar)):
            return self == TruncatedSeries.from_scalar(
                self.config, self.config.rational(other)
                if isinstance(other, (int, Fraction)) else other)
        return NotImplemented

    def __hash__(self):
        return hash((self.config, frozenset(self.coeffs.items())))

    def __repr__(self):
        items = sorted(self.coeffs)[:6]
        body = " + ".join("(%s) t^%d" % (self.coeffs[i].canonical(), i)
                          for i in items)
        more = "..." if len(self.coeffs) > 6 else ""
        return "TruncatedSeries(%s%s; trunc=%r)" % (body, more, self.trunc)

    # --- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if self.config != other.config:
                raise FieldMismatch("series over different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.from_scalar(self.config,
                                               self.config.rational(other))
        if isinstance(other, Scalar):
            return TruncatedSeries.from_scalar(self.config, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for i, c in o.coeffs.items():
            out[i] = out.get(i, self.config.zero()) + c
        return TruncatedSeries(self.config, out,
                               _min_trunc(self.trunc, o.trunc))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.config,
                               {i: -c for i, c in self.coeffs.items()},
                               self.trunc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            # zero content; keep a sensible window
            return TruncatedSeries.zero(self.config,
                                        _min_trunc(self.trunc, o.trunc))
        trunc = None
        if self.trunc is not None or o.trunc is not None:
            n1 = self.trunc if self.trunc is not None else None
            n2 = o.trunc if o.trunc is not None else None
            c1 = (n1 + o.low_order()) if n1 is not None else None
            c2 = (n2 + self.low_order()) if n2 is not None else None
            trunc = _min_trunc(c1, c2)
        out = {}
        zero = self.config.zero()
        for i, a in self.coeffs.items():
            for j, b in o.coeffs.items():
                k = i + j
                if trunc is not None and k > trunc:
                    continue
                out[k] = out.get(k, zero) + a * b
        return TruncatedSeries(self.config, out, trunc)

    __rmul__ = __mul__

    def scalar_mul(self, c):
        if isinstance(c, (int, Fraction)):
            c = self.config.rational(c)
        return TruncatedSeries(self.config,
                               {i: a * c for i, a in self.coeffs.items()},
                               self.trunc)

    def shift(self, k):
        """Multiply by t^k."""
        t = self.trunc if self.trunc is None else self.trunc + k
        return TruncatedSeries(self.config,
                               {i + k: c for i, c in self.coeffs.items()}, t)

    def truncate(self, n):
        return TruncatedSeries(self.config, self.coeffs,
                               _min_trunc(self.trunc, n))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("use invert() for negative powers")
        result = TruncatedSeries.from_scalar(self.config, self.config.one(),
                                             None)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def invert(self, target_trunc=None):
        """Multiplicative inverse as a Laurent series, computed through
        degree target_trunc (relative to the inverse's own low order).

        Requires the lowest-order coefficient to be nonzero (automatic)
        and, via Newton iteration on the unit part, yields f*inv = 1
        through the tracked window.
        """
        if self.is_zero():
            raise DivisionByZero("inverse of zero series")
        l = self.low_order()
        c = self.coeffs[l]
        # unit part u = f / (c t^l), u = 1 + higher
        u = TruncatedSeries(self.config,
                            {i - l: a / c for i, a in self.coeffs.items()},
                            None if self.trunc is None else self.trunc - l)
        if target_trunc is None:
            if u.trunc is not None:
                target = u.trunc
            else:
                target = max(2 * u.degree(), 16)
        else:
            target = target_trunc + l  # inverse low order is -l
        if u.degree() == 0:
            inv_u = TruncatedSeries.from_scalar(self.config, self.config.one(),
                                                u.trunc)
        else:
            # Newton: x <- x(2 - u x), doubling precision each step.  The
            # iterates are kept untagged (the window rule would pin the
            # precision at the first step) and capped by hand; each step
            # doubles the count of correct digits, so the result is valid
            # through min(target, window of u)
            x = TruncatedSeries.from_scalar(self.config, self.config.one())
            prec = 1
            while prec < target + 1:
                prec = min(2 * prec, target + 1)
                u_p = TruncatedSeries(self.config,
                                      {i: c for i, c in u.coeffs.items()
                                       if i <= prec}, None)
                nxt = x * (2 - u_p * x)
                x = TruncatedSeries(self.config,
                                    {i: c for i, c in nxt.coeffs.items()
                                     if i <= prec}, None)
            inv_u = TruncatedSeries(self.config, x.coeffs,
                                    _min_trunc(target, u.trunc))
        cinv = c.inverse()
        return TruncatedSeries(self.config,
                               {i - l: a * cinv
                                for i, a in inv_u.coeffs.items()},
                               None if inv_u.trunc is None
                               else inv_u.trunc - l)

    def divide(self, other, target_trunc=None):
        o = self._coerce(other)
        return self * o.invert(target_trunc)

    # --- calculus -----------------------------------------------------

    def derivative(self):
        """d/dt."""
        out = {i - 1: c * i for i, c in self.coeffs.items() if i != 0}
        t = self.trunc if self.trunc is None else self.trunc - 1
        return TruncatedSeries(self.config, out, t)

    def t_derivative(self):
        """t d/dt."""
        out = {i: c * i for i, c in self.coeffs.items() if i != 0}
        return TruncatedSeries(self.config, out, self.trunc)

    def integrate(self):
        """Term-wise antiderivative with zero constant term."""
        if -1 in self.coeffs:
            raise ResidueObstruction("series has a t^-1 term")
        out = {i + 1: c / (i + 1) for i, c in self.coeffs.items()}
        t = self.trunc if self.trunc is None else self.trunc + 1
        return TruncatedSeries(self.config, out, t)

    # --- substitution -------------------------------------------------

    def substitute_monomial(self, qexp):
        """t <- t^qexp (qexp >= 1)."""
        t = self.trunc
        if t is not None:
            t = qexp * (t + 1) - 1
        return TruncatedSeries(self.config,
                               {qexp * i: c for i, c in self.coeffs.items()},
                               t)

    def substitute(self, phi):
        """t <- phi(t) for a general series phi with positive low order."""
        if phi.is_zero() or phi.low_order() < 1:
            raise NotAFrobeniusLift("substitution target must vanish at 0")
        if set(phi.coeffs) == {phi.low_order()}:
            c = phi.coeffs[phi.low_order()]
            if c == self.config.one():
                return self.substitute_monomial(phi.low_order())
        lows = sorted(self.coeffs)
        if not lows:
            return TruncatedSeries.zero(self.config, self.trunc)
        out = TruncatedSeries.zero(self.config, None)
        neg = [i for i in lows if i < 0]
        pos = [i for i in lows if i >= 0]
        if pos:
            cur = TruncatedSeries.from_scalar(self.config, self.config.one())
            k = 0
            for i in pos:
                while k < i:
                    cur = cur * phi
                    k += 1
                out = out + cur.scalar_mul(self.coeffs[i])
        if neg:
            phinv = phi.invert()
            cur = TruncatedSeries.from_scalar(self.config, self.config.one())
            k = 0
            for i in sorted(neg, reverse=True):
                while k > i:
                    cur = cur * phinv
                    k -= 1
                out = out + cur.scalar_mul(self.coeffs[i])
        return out

    # --- norms --------------------------------------------------------

    def gauss_valuation(self, rho=0):
        """min_i (v(a_i) + rho*i) over the computed window, as an exact
        rational (the -log_p of the sup norm on |t| = p^-rho)."""
        if self.is_zero():
            raise EmptySeries("Gauss norm of the zero series")
        rho = Fraction(rho)
        return min(c.valuation() + rho * i for i, c in self.coeffs.items())

    def min_valuation(self):
        return self.gauss_valuation(0)


def log1p(z, trunc):
    """log(1 + z) = sum (-1)^(n-1) z^n / n for |z|_0 < 1, through trunc."""
    if z.is_zero():
        return TruncatedSeries.zero(z.config, trunc)
    if z.low_order() < 1 and z.gauss_valuation(0) <= 0:
        raise NotAFrobeniusLift("log(1+z) requires |z| < 1")
    acc = TruncatedSeries.zero(z.config, trunc)
    zt = z.truncate(trunc)
    term = zt
    n = 1
    low = max(z.low_order(), 1)
    while n * low <= trunc and not term.is_zero():
        acc = acc + term.scalar_mul(Fraction((-1) ** (n - 1), n))
        term = (term * zt).truncate(trunc)
        n += 1
    return acc


class TruncatedLogSeries:
    """Polynomial in L = log t with TruncatedSeries coefficients."""

    __slots__ = ("config", "parts")

    def __init__(self, config, parts):
        self.config = config
        self.parts = {n: s for n, s in parts.items() if not s.is_zero()}

    @staticmethod
    def from_series(s):
        return TruncatedLogSeries(s.config, {0: s})

    @staticmethod
    def zero(config, trunc=None):
        return TruncatedLogSeries(config, {})

    def is_zero(self):
        return not self.parts

    def part(self, n):
        s = self.parts.get(n)
        return s if s is not None else TruncatedSeries.zero(self.config)

    def log_degree(self):
        return max(self.parts) if self.parts else 0

    def coeff(self, i, n=0):
        return self.part(n).coeff(i)

    def __eq__(self, other):
        if isinstance(other, TruncatedLogSeries):
            return (self.config == other.config
                    and set(self.parts) == set(other.parts)
                    and all(self.parts[n] == other.parts[n]
                            for n in self.parts))
        if isinstance(other, (TruncatedSeries, int, Fraction, Scalar)):
            return self == TruncatedLogSeries.from_series(
                TruncatedSeries.zero(self.config) + other)
        return NotImplemented

    def __repr__(self):
        return "TruncatedLogSeries(%r)" % (self.parts,)

    def _coerce(self, other):
        if isinstance(other, TruncatedLogSeries):
            return other
        if isinstance(other, TruncatedSeries):
            return TruncatedLogSeries.from_series(other)
        if isinstance(other, (int, Fraction, Scalar)):
            return TruncatedLogSeries.from_series(
                TruncatedSeries.zero(self.config) + other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.parts)
        for n, s in o.parts.items():
            out[n] = out[n] + s if n in out else s
        return TruncatedLogSeries(self.config, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedLogSeries(self.config,
                                  {n: -s for n, s in self.parts.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for n1, s1 in self.parts.items():
            for n2, s2 in o.parts.items():
                n = n1 + n2
                prod = s1 * s2
                out[n] = out[n] + prod if n in out else prod
        return TruncatedLogSeries(self.config, out)

    __rmul__ = __mul__

    def scalar_mul(self, c):
        return TruncatedLogSeries(self.config,
                                  {n: s.scalar_mul(c)
                                   for n, s in self.parts.items()})

    def truncate(self, N):
        return TruncatedLogSeries(self.config,
                                  {n: s.truncate(N)
                                   for n, s in self.parts.items()})

    def derivative(self):
        """d/dt, with d/dt(g L^n) = g' L^n + n (g/t) L^(n-1)."""
        out = {}
        for n, g in self.parts.items():
            d = g.derivative()
            if not d.is_zero():
                out[n] = out[n] + d if n in out else d
            if n >= 1:
                lo = g.shift(-1).scalar_mul(n)
                out[n - 1] = out[n - 1] + lo if n - 1 in out else lo
        return TruncatedLogSeries(self.config, out)

    def t_derivative(self):
        """t d/dt, with t d/dt(g L^n) = (t g') L^n + n g L^(n-1)."""
        out = {}
        for n, g in self.parts.items():
            d = g.t_derivative()
            if not d.is_zero():
                out[n] = out[n] + d if n in out else d
            if n >= 1:
                lo = g.scalar_mul(n)
                out[n - 1] = out[n - 1] + lo if n - 1 in out else lo
        return TruncatedLogSeries(self.config, out)

    def frobenius_substitute(self, phi_t):
        """t <- phi(t), L <- log(phi(t)/t^q) + q L."""
        q = self.config.q
        check_frobenius_lift(phi_t, q)
        # w = log(phi/t^q); zero for the standard lift
        corr = phi_t.shift(-q) - 1
        simple = corr.is_zero()
        if not simple:
            trunc = corr.trunc if corr.trunc is not None \
                else max(16, 4 * corr.degree())
            w = log1p(corr, trunc)
        out = TruncatedLogSeries(self.config, {})
        qs = self.config.rational(q)
        for n, g in self.parts.items():
            gs = TruncatedLogSeries.from_series(g.substitute(phi_t))
            if simple:
                term = TruncatedLogSeries(
                    self.config, {n: gs.parts.get(
                        0, TruncatedSeries.zero(self.config)
                    ).scalar_mul(qs ** n)})
            else:
                lsub = TruncatedLogSeries(self.config,
                                          {0: w,
                                           1: TruncatedSeries.from_scalar(
                                               self.config, qs)})
                pw = TruncatedLogSeries.from_series(
                    TruncatedSeries.from_scalar(self.config,
                                                self.config.one()))
                for _ in range(n):
                    pw = pw * lsub
                term = gs * pw
            out = out + term
        return out

    def gauss_valuation(self, rho=0):
        if self.is_zero():
            raise EmptySeries("Gauss norm of the zero series")
        return min(s.gauss_valuation(rho) for s in self.parts.values())


def check_frobenius_lift(phi_t, q):
    """phi(t) must satisfy |phi(t) - t^q|_0 < 1."""
    diff = phi_t - TruncatedSeries.monomial(phi_t.config, q)
    if not diff.is_zero() and diff.gauss_valuation(0) <= 0:
        raise NotAFrobeniusLift("|phi(t) - t^q| must be < 1")


class GenericCoefficient:
    """Element of the rational-function model of the boundary coefficient
    field: num/den with Laurent-polynomial num, den over K.

    The boundary Gauss valuation v0 = v0(num) - v0(den) is exact and
    representation-independent by multiplicativity.
    """

    __slots__ = ("config", "num", "den")

    def __init__(self, config, num, den=None):
        self.config = config
        if isinstance(num, (int, Fraction, Scalar)):
            num = TruncatedSeries.zero(config) + num
        if den is None:
            den = TruncatedSeries.from_scalar(config, config.one())
        elif isinstance(den, (int, Fraction, Scalar)):
            den = TruncatedSeries.zero(config) + den
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        assert num.trunc is None and den.trunc is None
        # cheap normalization: clear common t-powers, make den monic at
        # its low end when it is a monomial
        if len(den.coeffs) == 1:
            (l, c), = den.coeffs.items()
            num = TruncatedSeries(config,
                                  {i - l: a / c
                                   for i, a in num.coeffs.items()}, None)
            den = TruncatedSeries.from_scalar(config, config.one())
        else:
            shift = min(num.low_order() if not num.is_zero() else 0,
                        den.low_order())
            if shift != 0:
                num = num.shift(-shift)
                den = den.shift(-shift)
            dl = den.low_order()
            if dl != 0:
                num = num.shift(-dl)
                den = den.shift(-dl)
        self.num = num
        self.den = den

    @staticmethod
    def zero(config):
        return GenericCoefficient(config, TruncatedSeries.zero(config))

    @staticmethod
    def one(config):
        return GenericCoefficient(config, 1)

    def is_zero(self):
        return self.num.is_zero()

    def degree_size(self):
        n = self.num
        d = self.den
        return max(abs(n.low_order()), abs(n.degree()),
                   abs(d.low_order()), abs(d.degree()))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den) == (o.num * self.den)

    def __repr__(self):
        return "GenericCoefficient(%r / %r)" % (self.num, self.den)

    def _coerce(self, other):
        if isinstance(other, GenericCoefficient):
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return GenericCoefficient(self.config, other)
        if isinstance(other, TruncatedSeries) and other.trunc is None:
            return GenericCoefficient(self.config, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return GenericCoefficient(self.config, self.num + o.num, self.den)
        return GenericCoefficient(self.config,
                                  self.num * o.den + o.num * self.den,
                                  self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return GenericCoefficient(self.config, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GenericCoefficient(self.config, self.num * o.num,
                                  self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("division by zero rational function")
        return GenericCoefficient(self.config, self.num * o.den,
                                  self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def derivative(self):
        """d/dt by the quotient rule."""
        return GenericCoefficient(
            self.config,
            self.num.derivative() * self.den
            - self.num * self.den.derivative(),
            self.den * self.den)

    def frobenius(self, qexp):
        """t <- t^qexp (exact on rational functions)."""
        return GenericCoefficient(self.config,
                                  self.num.substitute_monomial(qexp),
                                  self.den.substitute_monomial(qexp))

    def gauss_valuation(self):
        """Boundary valuation v0(num) - v0(den)."""
        if self.is_zero():
            raise EmptySeries("Gauss norm of zero")
        return self.num.min_valuation() - self.den.min_valuation()

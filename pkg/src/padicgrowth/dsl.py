"""Expression language for matrix entries and scalar literals.

Grammar (recursive descent):

    expr     := ('-')? term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := base ('^' exponent)?
    base     := rational | 'p' | 'pi' | 'q' | 't' | 'L'
              | ident '(' args ')' | ident | '(' expr ')'
    exponent := integer | '(' signed rational or parameter ')'

A bare ident resolves through the parameter table to a rational.
Fractional exponents are accepted only on the symbols q, p and pi, and
only when the result is representable as an integer power of pi.

Values are Fractions, field scalars, truncated series, or log series,
promoted as needed; format_value renders any value back to canonical
grammar-conformant text.
"""

import json
from fractions import Fraction

from .errors import IllegalExponent, ParseError, ValidationFailed
from .scalars import FieldConfig, Scalar
from .series import TruncatedLogSeries, TruncatedSeries

_SYMBOLS = ("p", "pi", "q", "t", "L")
_PUNCT = "+-*/^(),"


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind          # "int" | "ident" | punctuation | "end"
        self.text = text
        self.line = line
        self.column = column


def tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, line, col))
            col += 1
            i += 1
            continue
        raise ParseError("unexpected character %r" % ch, line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


# --- value promotion --------------------------------------------------


def _level(v):
    if isinstance(v, Fraction):
        return 0
    if isinstance(v, Scalar):
        return 1
    if isinstance(v, TruncatedSeries):
        return 2
    return 3


def _promote(config, v, level):
    cur = _level(v)
    if cur >= level:
        return v
    if cur == 0:
        v = config.rational(v)
        cur = 1
    if cur == 1 and level >= 2:
        v = TruncatedSeries.from_scalar(config, v)
        cur = 2
    if cur == 2 and level >= 3:
        v = TruncatedLogSeries.from_series(v)
    return v


def _is_zero(v):
    if isinstance(v, Fraction):
        return v == 0
    return v.is_zero()


class Evaluator:
    """Parses and evaluates one expression against a field config, a
    parameter table, and a generator expansion depth."""

    def __init__(self, config, params=None, depth=256):
        self.config = config
        self.params = dict(params or {})
        self.depth = depth
        self.tokens = []
        self.pos = 0

    # --- token plumbing ----------------------------------------------

    def _peek(self):
        return self.tokens[self.pos]

    def _next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect(self, kind):
        tok = self._next()
        if tok.kind != kind:
            raise ParseError("expected %r, found %r" % (kind, tok.text),
                             tok.line, tok.column)
        return tok

    def _error(self, message, tok):
        raise ParseError(message, tok.line, tok.column)

    # --- entry points ------------------------------------------------

    def parse(self, text):
        self.tokens = tokenize(text)
        self.pos = 0
        value = self._expr()
        tok = self._peek()
        if tok.kind != "end":
            self._error("trailing input %r" % tok.text, tok)
        return value

    # --- grammar -----------------------------------------------------

    def _expr(self):
        negate = False
        if self._peek().kind == "-":
            self._next()
            negate = True
        value = self._term()
        if negate:
            value = -value
        while self._peek().kind in ("+", "-"):
            op = self._next()
            rhs = self._term()
            lvl = max(_level(value), _level(rhs))
            value = _promote(self.config, value, lvl)
            rhs = _promote(self.config, rhs, lvl)
            value = value + rhs if op.kind == "+" else value - rhs
        return value

    def _term(self):
        value = self._factor()
        while self._peek().kind in ("*", "/"):
            op = self._next()
            rhs = self._factor()
            if op.kind == "*":
                lvl = max(_level(value), _level(rhs))
                value = _promote(self.config, value, lvl)
                rhs = _promote(self.config, rhs, lvl)
                value = value * rhs
            else:
                value = self._divide(value, rhs, op)
        return value

    def _divide(self, a, b, op):
        if _is_zero(b):
            self._error("division by zero", op)
        lvl = max(_level(a), _level(b))
        if lvl == 3:
            self._error("cannot divide by a log-series value", op)
        if lvl == 0:
            return a / b
        if lvl == 1:
            a = _promote(self.config, a, 1)
            b = _promote(self.config, b, 1)
            return a * b.inverse()
        a = _promote(self.config, a, 2)
        b = _promote(self.config, b, 2)
        if len(b.coeffs) == 1:
            # monomial denominator: exact Laurent shift
            (e, c), = b.coeffs.items()
            return a.shift(-e).scalar_mul(c.inverse())
        target = None
        if a.trunc is None and b.trunc is None:
            target = self.depth
        return a.divide(b, target_trunc=target)

    def _factor(self):
        value, symbol = self._base()
        if self._peek().kind != "^":
            return value
        self._next()
        exp = self._exponent()
        return self._power(value, symbol, exp)

    def _exponent(self):
        tok = self._peek()
        if tok.kind == "int":
            self._next()
            return Fraction(int(tok.text))
        if tok.kind == "(":
            self._next()
            sign = 1
            if self._peek().kind == "-":
                self._next()
                sign = -1
            num = self._rational_atom()
            if self._peek().kind == "/":
                self._next()
                den = self._rational_atom()
                num = num / den
            self._expect(")")
            return sign * num
        self._error("expected an exponent", tok)

    def _rational_atom(self):
        tok = self._next()
        if tok.kind == "int":
            return Fraction(int(tok.text))
        if tok.kind == "ident" and tok.text in self.params:
            return Fraction(self.params[tok.text])
        self._error("expected an integer or parameter", tok)

    def _power(self, value, symbol, exp):
        if exp.denominator == 1:
            n = int(exp)
            if isinstance(value, Fraction):
                return value ** n
            if isinstance(value, Scalar):
                return value ** n
            if isinstance(value, TruncatedSeries):
                if n >= 0:
                    return value ** n
                return value.invert() ** (-n)
            if n < 0:
                raise IllegalExponent(
                    "cannot invert a log-series value")
            out = TruncatedLogSeries.from_series(
                TruncatedSeries.from_scalar(self.config, self.config.one()))
            for _ in range(n):
                out = out * value
            return out
        # fractional exponent: only pure pi-power bases
        cfg = self.config
        if symbol == "q":
            return cfg.q_power(exp)
        if symbol == "p":
            k = exp * cfg.m
            if k.denominator != 1:
                raise IllegalExponent(
                    "p^(%s) is not representable with m=%d" % (exp, cfg.m))
            return cfg.pi_power(int(k))
        if symbol == "pi":
            raise IllegalExponent("pi^(%s) is not an integer power" % exp)
        raise IllegalExponent(
            "fractional exponents require base q, p or pi")

    def _base(self):
        tok = self._next()
        if tok.kind == "int":
            return Fraction(int(tok.text)), None
        if tok.kind == "(":
            value = self._expr()
            self._expect(")")
            return value, None
        if tok.kind == "ident":
            name = tok.text
            if self._peek().kind == "(":
                return self._call(name, tok), None
            if name == "p":
                return Fraction(self.config.p), "p"
            if name == "pi":
                return self.config.pi_power(1), "pi"
            if name == "q":
                return Fraction(self.config.q), "q"
            if name == "t":
                return TruncatedSeries.monomial(self.config, 1), "t"
            if name == "L":
                return TruncatedLogSeries(
                    self.config,
                    {1: TruncatedSeries.from_scalar(self.config,
                                                    self.config.one())}), "L"
            if name in self.params:
                return Fraction(self.params[name]), None
            self._error("unknown name %r" % name, tok)
        self._error("unexpected token %r" % tok.text, tok)

    def _call(self, name, tok):
        self._expect("(")
        args = []
        if self._peek().kind != ")":
            while True:
                args.append(self._expr())
                if self._peek().kind == ",":
                    self._next()
                    continue
                break
        self._expect(")")
        for a in args:
            if not isinstance(a, Fraction):
                self._error("generator arguments must be rational", tok)
        if name == "xmu":
            if len(args) != 1:
                self._error("xmu takes one argument", tok)
            return generator_xmu(self.config, args[0], self.depth)
        if name == "gmu":
            if len(args) != 1:
                self._error("gmu takes one argument", tok)
            return generator_gmu(self.config, args[0], self.depth)
        if name == "bessel_b":
            if args:
                self._error("bessel_b takes no arguments", tok)
            return generator_bessel_b(self.config, self.depth)
        if name == "bessel_c":
            if args:
                self._error("bessel_c takes no arguments", tok)
            return generator_bessel_c(self.config, self.depth)
        self._error("unknown generator %r" % name, tok)


# --- built-in generators ----------------------------------------------


def generator_xmu(config, mu, depth):
    """sum_i q^(-mu i) t^(q^i) through t-degree depth."""
    coeffs = {}
    i = 0
    while config.q ** i <= depth:
        coeffs[config.q ** i] = config.q_power(-Fraction(mu) * i)
        i += 1
    return TruncatedSeries(config, coeffs, depth)


def generator_gmu(config, mu, depth):
    """sum_i q^((1-mu) i) t^(q^i - 1) through t-degree depth."""
    coeffs = {}
    i = 0
    while config.q ** i - 1 <= depth:
        coeffs[config.q ** i - 1] = config.q_power((1 - Fraction(mu)) * i)
        i += 1
    return TruncatedSeries(config, coeffs, depth)


def generator_bessel_b(config, depth):
    """sum_i (pi^2 t)^i / (i!)^2 through t-degree depth."""
    coeffs = {}
    fact = 1
    for i in range(depth + 1):
        coeffs[i] = config.pi_power(2 * i) * Fraction(1, fact * fact)
        fact *= i + 1
    return TruncatedSeries(config, coeffs, depth)


def generator_bessel_c(config, depth):
    """-2 sum_{i>=1} H_i (pi^2 t)^i / (i!)^2, H_i the harmonic number."""
    coeffs = {}
    fact = 1
    H = Fraction(0)
    for i in range(1, depth + 1):
        fact *= i
        H += Fraction(1, i)
        coeffs[i] = config.pi_power(2 * i) * (-2 * H / (fact * fact))
    return TruncatedSeries(config, coeffs, depth)


# --- formatting -------------------------------------------------------


def _format_fraction(c):
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def _format_scalar(s):
    parts = []
    for j, c in enumerate(s.coeffs):
        if c == 0:
            continue
        body = _format_fraction(abs(c))
        if j == 1:
            body = "%s*pi" % body
        elif j > 1:
            body = "%s*pi^%d" % (body, j)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += " %s %s" % (sign, body)
    return out


def _needs_parens(text):
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0:
            return True
        elif ch in "*/" and depth == 0:
            return True
    return False


def _format_series(s, suffix=""):
    terms = []
    for e in sorted(s.coeffs):
        c = s.coeffs[e]
        body = _format_scalar(c)
        if _needs_parens(body):
            body = "(%s)" % body
        if e == 1:
            body += "*t"
        elif e > 1:
            body += "*t^%d" % e
        elif e == -1:
            body += "/t"
        elif e < 0:
            body += "/t^%d" % (-e)
        terms.append(body + suffix)
    if not terms:
        return "0"
    return " + ".join(terms)


def format_value(v):
    """Canonical, reparseable text for a DSL value."""
    if isinstance(v, Fraction):
        return _format_fraction(v)
    if isinstance(v, Scalar):
        return _format_scalar(v)
    if isinstance(v, TruncatedSeries):
        return _format_series(v)
    terms = []
    for n in sorted(v.parts):
        s = v.parts[n]
        if s.is_zero():
            continue
        if n == 0:
            terms.append(_format_series(s))
        else:
            suffix = "*L" if n == 1 else "*L^%d" % n
            body = _format_series(s)
            if _needs_parens(body):
                body = "(%s)" % body
            terms.append(body + suffix)
    if not terms:
        return "0"
    return " + ".join(terms)


def parse_expression(text, config, params=None, depth=256):
    return Evaluator(config, params, depth).parse(text)


def parse_scalar(text, config, params=None):
    value = parse_expression(text, config, params)
    if isinstance(value, Fraction):
        return config.rational(value)
    if isinstance(value, Scalar):
        return value
    raise ParseError("expected a scalar, got a series value")


# --- module documents -------------------------------------------------

_DOCUMENT_FIELDS = {"field", "phi_t", "omega", "rank", "A", "G", "params",
                    "label", "schema", "golden", "provenance", "checks"}


def parse_module_document(text, depth=None):
    """Build a ModulePresentation from a UTF-8 JSON document."""
    from .modules import ModulePresentation

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno)
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    unknown = set(doc) - _DOCUMENT_FIELDS
    if unknown:
        raise ParseError("unknown document fields: %s"
                         % ", ".join(sorted(unknown)))
    for key in ("field", "omega", "rank", "A", "G"):
        if key not in doc:
            raise ParseError("missing document field %r" % key)
    field = doc["field"]
    config = FieldConfig(field["p"], field.get("m", 1),
                         field.get("q", field["p"]))
    if depth is None:
        depth = 2 * config.p ** 4
    params = {k: Fraction(v) for k, v in doc.get("params", {}).items()}
    ev = Evaluator(config, params, depth)

    def entry(text_e):
        v = ev.parse(text_e)
        if isinstance(v, TruncatedLogSeries):
            raise ParseError("matrix entries cannot contain L")
        return _promote(config, v, 2)

    rank = doc["rank"]
    A = [[entry(e) for e in row] for row in doc["A"]]
    G = [[entry(e) for e in row] for row in doc["G"]]
    if len(A) != rank or len(G) != rank:
        raise ParseError("matrix shape does not match rank %d" % rank)
    phi_t = None
    if "phi_t" in doc:
        v = ev.parse(doc["phi_t"])
        phi_t = _promote(config, v, 2)
    M = ModulePresentation(config, A, G, doc["omega"], phi_t,
                           label=doc.get("label", ""))
    report = M.validate()
    if not report.ok:
        raise ValidationFailed("document %r failed validation: %r"
                               % (M.label, report.failures))
    return M

"""Exact arithmetic in cyclotomic fields Q(zeta_n).

An element is stored as a fixed-length vector of :class:`fractions.Fraction`
coefficients with respect to the power basis 1, a, ..., a^(phi(n)-1), where
``a`` is a primitive n-th root of unity.  Products are reduced modulo the
n-th cyclotomic polynomial.

Elements are written and read with a small expression grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | <implicit>) unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INT)?
    atom   := INT | 'a' | '(' expr ')'

so that ``"x + (-1/15*a + 1/15)"``-style coefficients from hand-written
files round-trip exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

Rational = Fraction

MAX_EXPONENT = 4096


class FieldMismatchError(ValueError):
    """Operands live in different cyclotomic fields."""


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


# --- dense univariate helpers over Q (lists, constant term first) -----------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, u in enumerate(p):
        if u:
            for j, v in enumerate(q):
                out[i + j] += u * v
    return _trim(out)


def _poly_sub(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0)
                  for i in range(n)])


def _poly_divmod(p, q):
    """Long division; q must be nonzero."""
    p = _trim(p)
    q = _trim(q)
    if len(p) < len(q):
        return [], p
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * (len(p) - len(q) + 1)
    rem = [Fraction(c) for c in p]
    for shift in range(len(p) - len(q), -1, -1):
        c = rem[shift + len(q) - 1] / lead
        quot[shift] = c
        if c:
            for i, v in enumerate(q):
                rem[shift + i] -= c * v
    return _trim(quot), _trim(rem[:len(q) - 1])


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(n: int) -> tuple:
    # Phi_n = (t^n - 1) / prod_{d | n, d < n} Phi_d
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod(num, list(_cyclotomic_coeffs(d)))
            assert not rem, "cyclotomic division must be exact"
    return tuple(int(c) for c in num)


@dataclass(frozen=True)
class FieldSpec:
    """The field Q(zeta_n); ``modulus`` lists the coefficients of Phi_n, constant term first."""

    conductor: int
    modulus: tuple

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def zero(self) -> "FieldElement":
        return FieldElement(self, (Fraction(0),) * self.degree)

    def one(self) -> "FieldElement":
        return self(1)

    def gen(self) -> "FieldElement":
        return power_of_generator(self, 1)

    def __call__(self, value) -> "FieldElement":
        """Coerce an int, Fraction, string or FieldElement into this field."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldMismatchError(f"element of Q(zeta_{value.spec.conductor}) "
                                         f"used in Q(zeta_{self.conductor})")
            return value
        if isinstance(value, str):
            return parse_element(value, self)
        q = Fraction(value)
        return FieldElement(self, (q,) + (Fraction(0),) * (self.degree - 1))

    def to_json(self) -> dict:
        return {"conductor": self.conductor}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cyclotomic_spec(int(data["conductor"]))

    def __repr__(self):
        return f"FieldSpec(conductor={self.conductor})"


@lru_cache(maxsize=None)
def cyclotomic_spec(n: int) -> FieldSpec:
    if n < 1:
        raise ValueError(f"conductor must be positive, got {n}")
    return FieldSpec(n, _cyclotomic_coeffs(n))


@lru_cache(maxsize=None)
def _reduction_table(spec: FieldSpec) -> tuple:
    """Vectors of a^k reduced mod Phi_n for k < 2*deg - 1."""
    deg = spec.degree
    table = []
    for k in range(max(2 * deg - 1, 1)):
        if k < deg:
            vec = [0] * deg
            vec[k] = 1
        else:
            _, rem = _poly_divmod([0] * k + [1], list(spec.modulus))
            vec = [int(c) for c in rem] + [0] * (deg - len(rem))
        table.append(tuple(vec))
    return tuple(table)


def mul_integral(spec: FieldSpec, u: tuple, v: tuple) -> tuple:
    """Product of two power-basis coefficient tuples over Z (or Q), reduced mod Phi_n."""
    deg = spec.degree
    acc = [0] * (2 * deg - 1)
    for i, x in enumerate(u):
        if x:
            for j, y in enumerate(v):
                if y:
                    acc[i + j] += x * y
    out = acc[:deg]
    table = _reduction_table(spec)
    for k in range(deg, 2 * deg - 1):
        if acc[k]:
            for t, r in enumerate(table[k]):
                if r:
                    out[t] += r * acc[k]
    return tuple(out)


class FieldElement:
    """An element of Q(zeta_n); immutable and hashable."""

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: FieldSpec, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != spec.degree:
            raise ValueError(f"expected {spec.degree} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @classmethod
    def _raw(cls, spec, coeffs):
        obj = object.__new__(cls)
        object.__setattr__(obj, "spec", spec)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.spec is not self.spec and other.spec != self.spec:
                raise FieldMismatchError(
                    f"cannot combine Q(zeta_{self.spec.conductor}) and "
                    f"Q(zeta_{other.spec.conductor})")
            return other
        if isinstance(other, (int, Fraction)):
            return self.spec(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.spec.conductor, self.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement._raw(self.spec, tuple(u + v for u, v in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._raw(self.spec, tuple(-u for u in self.coeffs))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement._raw(self.spec, tuple(u - v for u, v in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement._raw(self.spec, tuple(u * other for u in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        deg = self.spec.degree
        if deg == 1:
            return FieldElement._raw(self.spec, (self.coeffs[0] * other.coeffs[0],))
        table = _reduction_table(self.spec)
        acc = [0] * deg
        for i, u in enumerate(self.coeffs):
            if not u:
                continue
            for j, v in enumerate(other.coeffs):
                if not v:
                    continue
                uv = u * v
                k = i + j
                if k < deg:
                    acc[k] += uv
                else:
                    for t, r in enumerate(table[k]):
                        if r:
                            acc[t] += r * uv
        return FieldElement._raw(self.spec, tuple(Fraction(c) for c in acc))

    __rmul__ = __mul__

    def times_gen(self) -> "FieldElement":
        """Product with the generator ``a`` (a shift plus one reduction step)."""
        c = self.coeffs
        top = c[-1]
        mod = self.spec.modulus
        shifted = (Fraction(0),) + c[:-1]
        if not top:
            return FieldElement._raw(self.spec, shifted)
        return FieldElement._raw(self.spec, tuple(u - top * m for u, m in zip(shifted, mod)))

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse via the extended Euclidean algorithm against Phi_n."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.is_rational():
            return self.spec(1 / self.coeffs[0])
        # invariant: r_i = s_i * u  (mod Phi_n)
        r0, s0 = [Fraction(c) for c in self.spec.modulus], []
        r1, s1 = _trim(self.coeffs), [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r1 is now a nonzero constant (Phi_n is irreducible)
        c = r1[0]
        s = [v / c for v in s1]
        _, s = _poly_divmod(s, list(self.spec.modulus))
        return FieldElement(self.spec, s + [0] * (self.spec.degree - len(s)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.spec(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.spec.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugates_product(self) -> Fraction:
        """Field norm down to Q, as the product over all Galois conjugates."""
        n = self.spec.conductor
        prod = self.spec.one()
        for k in range(2, n):
            if gcd(k, n) == 1:
                prod = prod * self.galois(k)
        return (self * prod).coeffs[0]

    def galois(self, k: int) -> "FieldElement":
        """Image under the automorphism a -> a^k."""
        out = self.spec.zero()
        for i, u in enumerate(self.coeffs):
            if u:
                out = out + power_of_generator(self.spec, i * k) * u
        return out

    def __repr__(self):
        return f"FieldElement({format_element(self)!r}, n={self.spec.conductor})"

    def __str__(self):
        return format_element(self)


def power_of_generator(spec: FieldSpec, k: int) -> FieldElement:
    k %= spec.conductor
    table = _reduction_table(spec)
    if k < len(table):
        return FieldElement(spec, table[k])
    _, rem = _poly_divmod([0] * k + [1], list(spec.modulus))
    return FieldElement(spec, rem + [0] * (spec.degree - len(rem)))


# --- text format -------------------------------------------------------------

def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_element(u: FieldElement) -> str:
    """Canonical text, highest power of ``a`` first, e.g. ``"-a + 1"``."""
    pieces = []
    for k in range(len(u.coeffs) - 1, -1, -1):
        c = u.coeffs[k]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if k == 0:
            body = _format_rational(mag)
        else:
            sym = "a" if k == 1 else f"a^{k}"
            body = sym if mag == 1 else f"{_format_rational(mag)}*{sym}"
        pieces.append((sign, body))
    if not pieces:
        return "0"
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(a)|(\*\*|[-+*/^()])|(−))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", text, start)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2):
            tokens.append(("gen", None, start))
        elif m.group(4):
            tokens.append(("op", "-", start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, spec: FieldSpec):
        self.text = text
        self.spec = spec
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def parse(self) -> FieldElement:
        if self.peek()[0] == "end":
            self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _starts_factor(self, tok):
        return tok[0] in ("int", "gen") or tok[:2] == ("op", "(")

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            if tok[:2] == ("op", "*"):
                self.take()
                value = value * self.unary()
            elif tok[:2] == ("op", "/"):
                self.take()
                rhs = self.unary()
                if rhs.is_zero():
                    self.error("division by zero", tok)
                value = value / rhs
            elif self._starts_factor(tok):
                value = value * self.power()
            else:
                return value

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self.error("exponent must be a nonnegative integer", tok)
            if tok[1] > MAX_EXPONENT:
                self.error(f"exponent {tok[1]} exceeds limit {MAX_EXPONENT}", tok)
            if base.is_zero() and tok[1] == 0:
                return self.spec.one()
            return base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "int":
            return self.spec(val)
        if kind == "gen":
            return power_of_generator(self.spec, 1)
        if tok[:2] == ("op", "("):
            value = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return value
        self.error("expected a number, 'a' or '('", tok)


def parse_element(text: str, spec: FieldSpec) -> FieldElement:
    """Parse a field-element expression in the generator ``a`` of ``spec``.

    Raises :class:`ParseError` carrying the offending character position.
    """
    return _Parser(text, spec).parse()

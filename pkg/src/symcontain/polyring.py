"""Homogeneous forms in x, y, z over a cyclotomic field.

Forms are sparse: a mapping from exponent triples ``(i, j, k)`` to nonzero
field elements.  Dense coefficient vectors appear only at the linear
algebra boundary, indexed by :func:`monomial_basis`.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .numberfield import FieldElement, FieldMismatchError, FieldSpec

Monomial = tuple  # (i, j, k)

VARIABLES = ("x", "y", "z")


def _var_index(var) -> int:
    if isinstance(var, int):
        if var not in (0, 1, 2):
            raise ValueError(f"variable index out of range: {var}")
        return var
    try:
        return VARIABLES.index(var)
    except ValueError:
        raise ValueError(f"unknown variable {var!r}; expected one of x, y, z") from None


@lru_cache(maxsize=None)
def monomial_basis(d: int) -> tuple:
    """All degree-``d`` monomials, graded lex with x > y > z."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    return tuple((i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1))


@lru_cache(maxsize=None)
def monomial_index(d: int) -> dict:
    return {m: n for n, m in enumerate(monomial_basis(d))}


def basis_size(d: int) -> int:
    return comb(d + 2, 2)


class HomogeneousForm:
    """A homogeneous polynomial of fixed degree.  Immutable."""

    __slots__ = ("spec", "degree", "_terms")

    def __init__(self, spec: FieldSpec, degree: int, terms: Mapping | None = None):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != 3 or min(mono) < 0:
                raise ValueError(f"bad monomial {mono}")
            if sum(mono) != degree:
                raise ValueError(f"monomial {mono} is not of degree {degree}; "
                                 "only homogeneous forms are supported")
            c = spec(c)
            if c:
                clean[mono] = clean[mono] + c if mono in clean else c
                if not clean[mono]:
                    del clean[mono]
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "_terms", clean)

    @classmethod
    def _raw(cls, spec, degree, terms):
        obj = object.__new__(cls)
        object.__setattr__(obj, "spec", spec)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "_terms", terms)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("HomogeneousForm is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, spec: FieldSpec, degree: int) -> "HomogeneousForm":
        return cls._raw(spec, degree, {})

    @classmethod
    def constant(cls, spec: FieldSpec, value=1) -> "HomogeneousForm":
        return cls(spec, 0, {(0, 0, 0): value})

    @classmethod
    def variable(cls, spec: FieldSpec, var) -> "HomogeneousForm":
        mono = [0, 0, 0]
        mono[_var_index(var)] = 1
        return cls._raw(spec, 1, {tuple(mono): spec.one()})

    @classmethod
    def linear(cls, spec: FieldSpec, coeffs: Sequence) -> "HomogeneousForm":
        """The linear form u*x + v*y + w*z."""
        u, v, w = coeffs
        return cls(spec, 1, {(1, 0, 0): u, (0, 1, 0): v, (0, 0, 1): w})

    @classmethod
    def from_vector(cls, spec: FieldSpec, degree: int, vector: Sequence) -> "HomogeneousForm":
        basis = monomial_basis(degree)
        if len(vector) != len(basis):
            raise ValueError(f"vector of length {len(vector)} does not match degree {degree}")
        return cls._raw(spec, degree, {m: spec(c) for m, c in zip(basis, vector) if c})

    # -- accessors -----------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono) -> FieldElement:
        return self._terms.get(tuple(mono), self.spec.zero())

    def coefficient_vector(self) -> list:
        zero = self.spec.zero()
        return [self._terms.get(m, zero) for m in monomial_basis(self.degree)]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        if self.spec != other.spec:
            return False
        if not self._terms and not other._terms:
            return self.degree == other.degree
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other):
        if other.spec != self.spec:
            raise FieldMismatchError("forms over different fields")

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        self._check(other)
        if self.degree != other.degree and self._terms and other._terms:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        degree = self.degree if self._terms else other.degree
        out = dict(self._terms)
        for m, c in other._terms.items():
            if m in out:
                s = out[m] + c
                if s:
                    out[m] = s
                else:
                    del out[m]
            else:
                out[m] = c
        return HomogeneousForm._raw(self.spec, degree, out)

    def __neg__(self):
        return HomogeneousForm._raw(self.spec, self.degree, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "HomogeneousForm":
        c = self.spec(c)
        if not c:
            return HomogeneousForm.zero(self.spec, self.degree)
        return HomogeneousForm._raw(self.spec, self.degree,
                                    {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomogeneousForm):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        return expand_product([self] * k) if k else HomogeneousForm.constant(self.spec)

    # -- calculus and evaluation -------------------------------------------------

    def derivative(self, var) -> "HomogeneousForm":
        return partial_derivative(self, var)

    def __call__(self, point) -> FieldElement:
        return evaluate(self, point)

    def substitute_permutation(self, perm: Sequence[int]) -> "HomogeneousForm":
        """Replace variable ``v`` by variable ``perm[v]``."""
        out = {}
        for (i, j, k), c in self._terms.items():
            e = [0, 0, 0]
            e[perm[0]] += i
            e[perm[1]] += j
            e[perm[2]] += k
            out[tuple(e)] = c
        return HomogeneousForm._raw(self.spec, self.degree, out)

    def to_json(self) -> list:
        from .numberfield import format_element

        return [{"monomial": list(m), "coeff": format_element(self._terms[m])}
                for m in monomial_basis(self.degree) if m in self._terms]

    @classmethod
    def from_json(cls, spec: FieldSpec, data: list, degree: int | None = None) -> "HomogeneousForm":
        terms = {tuple(t["monomial"]): spec(t["coeff"]) for t in data}
        if degree is None:
            if not terms:
                raise ValueError("degree is required for the zero form")
            degree = sum(next(iter(terms)))
        return cls(spec, degree, terms)

    def __repr__(self):
        return f"HomogeneousForm({self}, degree={self.degree})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in monomial_basis(self.degree):
            if m not in self._terms:
                continue
            c = str(self._terms[m])
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(VARIABLES, m) if e)
            if not mono:
                parts.append(f"({c})")
            elif c == "1":
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def variables(spec: FieldSpec):
    """Return the forms x, y, z."""
    return tuple(HomogeneousForm.variable(spec, v) for v in range(3))


def add(f: HomogeneousForm, g: HomogeneousForm) -> HomogeneousForm:
    return f + g


def scalar_mul(c, f: HomogeneousForm) -> HomogeneousForm:
    return f.scale(c)


def multiply(f: HomogeneousForm, g: HomogeneousForm) -> HomogeneousForm:
    f._check(g)
    out = {}
    get = out.get
    for (i1, j1, k1), u in f._terms.items():
        for (i2, j2, k2), v in g._terms.items():
            m = (i1 + i2, j1 + j2, k1 + k2)
            prev = get(m)
            out[m] = u * v if prev is None else prev + u * v
    out = {m: c for m, c in out.items() if c}
    return HomogeneousForm._raw(f.spec, f.degree + g.degree, out)


def expand_product(factors: Iterable[HomogeneousForm], spec: FieldSpec | None = None) -> HomogeneousForm:
    """Product of all factors; the empty product is the constant 1.

    ``spec`` is only needed when ``factors`` may be empty.
    """
    factors = list(factors)
    if not factors:
        if spec is None:
            raise ValueError("field spec required for the empty product")
        return HomogeneousForm.constant(spec)
    result = factors[0]
    for f in factors[1:]:
        result = multiply(result, f)
    return result


def partial_derivative(f: HomogeneousForm, var) -> HomogeneousForm:
    v = _var_index(var)
    if f.degree == 0:
        return HomogeneousForm.zero(f.spec, 0)
    out = {}
    for m, c in f._terms.items():
        e = m[v]
        if e:
            dm = list(m)
            dm[v] -= 1
            out[tuple(dm)] = c * e
    return HomogeneousForm._raw(f.spec, f.degree - 1, out)


def _coords(spec: FieldSpec, point) -> tuple:
    coords = getattr(point, "coords", point)
    if len(coords) != 3:
        raise ValueError("a point needs three coordinates")
    return tuple(spec(c) for c in coords)


def _powers(c: FieldElement, top: int) -> list:
    pw = [c.spec.one()]
    for _ in range(top):
        pw.append(pw[-1] * c)
    return pw


def evaluate(f: HomogeneousForm, point) -> FieldElement:
    """Value of ``f`` at the given coordinate triple (not projectively invariant)."""
    x, y, z = _coords(f.spec, point)
    d = f.degree
    px, py, pz = _powers(x, d), _powers(y, d), _powers(z, d)
    total = f.spec.zero()
    for (i, j, k), c in f._terms.items():
        total = total + c * px[i] * py[j] * pz[k]
    return total


def derivative_orders(order: int):
    """Multi-indices (a, b, c) with a + b + c = order, in graded lex order."""
    return monomial_basis(order)


def _falling(e: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= e - t
    return out


def _derivative_at(f: HomogeneousForm, powers, alpha: Monomial) -> FieldElement:
    px, py, pz = powers
    a, b, c = alpha
    total = f.spec.zero()
    for (i, j, k), coef in f._terms.items():
        if i < a or j < b or k < c:
            continue
        w = _falling(i, a) * _falling(j, b) * _falling(k, c)
        total = total + coef * (px[i - a] * py[j - b]) * pz[k - c] * w
    return total


def derivative_value(f: HomogeneousForm, point, alpha: Monomial) -> FieldElement:
    """Value of d^alpha f at ``point`` without building the derivative form."""
    x, y, z = _coords(f.spec, point)
    d = f.degree
    return _derivative_at(f, (_powers(x, d), _powers(y, d), _powers(z, d)), alpha)


def chart_orders(point, order: int, full: bool = False) -> list:
    """Multi-indices of the given order needed at ``point``.

    With a coordinate p_k != 0, Euler's identity expresses every derivative
    involving d/dx_k at p through lower ones, so only multi-indices with
    alpha_k = 0 (the affine chart) are independent conditions.
    """
    alphas = derivative_orders(order)
    if full:
        return alphas
    coords = getattr(point, "coords", point)
    k = next(i for i, c in enumerate(coords) if c != 0)
    return [al for al in alphas if al[k] == 0]


def scan_derivatives(f: HomogeneousForm, point, m: int, full: bool = False):
    """``(number of derivatives checked, first nonvanishing multi-index or None)`` over orders < m.

    By default only the m(m+1)/2 chart derivatives are scanned; ``full`` scans
    all C(m+2, 3) homogeneous ones (same answer, more work).
    """
    x, y, z = _coords(f.spec, point)
    if x == 0 and y == 0 and z == 0:
        raise ValueError("the zero vector is not a projective point")
    d = f.degree
    powers = (_powers(x, d), _powers(y, d), _powers(z, d))
    checked = 0
    for order in range(m):
        for alpha in chart_orders((x, y, z), order, full):
            checked += 1
            if order <= d and _derivative_at(f, powers, alpha):
                return checked, alpha
    return checked, None


def first_nonvanishing_derivative(f: HomogeneousForm, point, m: int, full: bool = False):
    """First multi-index of order < m whose derivative is nonzero at point, else None."""
    return scan_derivatives(f, point, m, full)[1]


def vanishes_to_order(f: HomogeneousForm, point, m: int, full: bool = False) -> bool:
    """True iff every partial derivative of order 0..m-1 vanishes at ``point``."""
    if m < 1:
        raise ValueError("multiplicity must be at least 1")
    return first_nonvanishing_derivative(f, point, m, full) is None

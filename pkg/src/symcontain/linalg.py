"""Exact dense linear algebra over Q(zeta_n).

Two elimination kernels compute the same canonical reduced row echelon form:

``python``
    Gauss-Jordan directly on field elements.  Pivot row is the first row
    (in input order) with a nonzero entry in the leftmost unfinished column.
``flint``
    The matrix is realified over Q: every row ``v`` contributes the rows
    ``v, a*v, ..., a^(phi-1)*v`` written in the power basis, so the Q-row
    space is the K-row space viewed as a Q-vector space.  Its rational RREF
    (computed by FLINT) has pivots in blocks ``phi*j .. phi*j+phi-1`` for each
    K-pivot ``j``, and the row with pivot ``phi*j`` *is* the K-RREF row.

RREF is unique, so both kernels return identical subspaces; the test-suite
checks this on random input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .numberfield import FieldElement, FieldSpec

log = logging.getLogger(__name__)

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None

_config = {"backend": "flint" if flint is not None else "python", "pivot_heuristic": False}


def set_backend(name: str) -> None:
    if name not in ("python", "flint"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "flint" and flint is None:
        raise RuntimeError("python-flint is not installed")
    _config["backend"] = name


def get_backend() -> str:
    return _config["backend"]


def set_pivot_heuristic(enabled: bool) -> None:
    """Prefer the candidate pivot with the smallest coefficient height (python kernel only)."""
    _config["pivot_heuristic"] = bool(enabled)


def set_threads(n: int) -> None:
    if flint is not None and n >= 1:
        flint.ctx.threads = n


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DenseMatrix:
    spec: FieldSpec
    rows: tuple
    ncols: int

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence], ncols: int | None = None):
        rows = tuple(tuple(spec(c) for c in r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionError("column count needed for an empty matrix")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionError("matrix rows must have equal length")
        return cls(spec, rows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def transpose(self) -> "DenseMatrix":
        cols = tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))
        return DenseMatrix(self.spec, cols, len(self.rows))

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise DimensionError("vector length does not match column count")
        zero = self.spec.zero()
        out = []
        for r in self.rows:
            acc = zero
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def to_json(self) -> list:
        return [[str(c) for c in r] for r in self.rows]


@dataclass(frozen=True)
class IntegralMatrix:
    """Matrix over Z[a]: every entry is a tuple of phi integers in the power basis.

    Row scaling does not change row spaces or kernels, so callers that can
    produce integral rows directly skip all rational arithmetic.
    """

    spec: FieldSpec
    rows: tuple
    ncols: int

    def to_dense(self) -> DenseMatrix:
        return DenseMatrix(self.spec, tuple(_to_field_rows(self.spec, self.rows)), self.ncols)


@dataclass(frozen=True)
class Subspace:
    """Row space in reduced row echelon form."""

    spec: FieldSpec
    ambient_dim: int
    basis: tuple  # tuple of rows (tuples of FieldElement)
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    @classmethod
    def zero(cls, spec: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls(spec, ambient_dim, (), ())

    def check(self) -> None:
        """Assert the RREF invariants."""
        prev = -1
        for row, p in zip(self.basis, self.pivots):
            assert len(row) == self.ambient_dim
            assert p > prev and row[p] == 1
            assert not any(row[:p])
            prev = p
        for i, p in enumerate(self.pivots):
            for k, other in enumerate(self.basis):
                if k != i:
                    assert not other[p]


# --- kernels -------------------------------------------------------------------

def _height(c: FieldElement) -> int:
    return sum(q.numerator.bit_length() + q.denominator.bit_length() for q in c.coeffs)


def _rref_python(spec, rows, ncols):
    m = [list(r) for r in rows if any(r)]
    pivots = []
    prow = 0
    for col in range(ncols):
        if prow >= len(m):
            break
        cands = [i for i in range(prow, len(m)) if m[i][col]]
        if not cands:
            continue
        if _config["pivot_heuristic"]:
            sel = min(cands, key=lambda i: _height(m[i][col]))
        else:
            sel = cands[0]
        m[prow], m[sel] = m[sel], m[prow]
        row = m[prow]
        inv = row[col].inverse()
        row[col:] = [c * inv if c else c for c in row[col:]]
        for i in range(len(m)):
            if i != prow:
                f = m[i][col]
                if f:
                    other = m[i]
                    for j in range(col, ncols):
                        if row[j]:
                            other[j] = other[j] - f * row[j]
        pivots.append(col)
        prow += 1
    return tuple(tuple(r) for r in m[:prow]), tuple(pivots)


def _lcm_den(row) -> int:
    den = 1
    for c in row:
        for q in c.coeffs:
            d = q.denominator
            if d != 1:
                den = den * d // gcd(den, d)
    return den


def _integralize(rows) -> list:
    """Scale each row of field elements to coefficient tuples over Z."""
    out = []
    for r in rows:
        den = _lcm_den(r)
        if den == 1:
            out.append([tuple(q.numerator for q in c.coeffs) for c in r])
        else:
            out.append([tuple(q.numerator * (den // q.denominator) for q in c.coeffs) for c in r])
    return out


def _times_gen_int(u: tuple, modulus: tuple) -> tuple:
    top = u[-1]
    shifted = (0,) + u[:-1]
    if not top:
        return shifted
    return tuple(a - top * m for a, m in zip(shifted, modulus))


def _realify(spec, introws):
    """Flat integer entries of the Q-matrix whose row space realifies the K-row space.

    Every K-row ``v`` contributes ``v, a*v, ..., a^(phi-1)*v`` in the power basis.
    """
    phi = spec.degree
    mod = spec.modulus
    flat = []
    for r in introws:
        shifted = r
        for t in range(phi):
            if t:
                shifted = [_times_gen_int(u, mod) for u in shifted]
            for u in shifted:
                flat.extend(u)
    return flat


def _flint_rref_int(spec, introws, ncols):
    """Realified RREF as ``(entries, den, K-pivots)``; K-row i is entries row phi*i over den."""
    phi = spec.degree
    flat = _realify(spec, introws)
    mat = flint.fmpz_mat(phi * len(introws), phi * ncols, flat)
    red, den, rank = mat.rref()
    assert rank % phi == 0, "realified rank must be a multiple of the field degree"
    width = phi * ncols
    ent = red.entries()
    rows, pivots = [], []
    for i in range(0, rank, phi):
        line = ent[i * width:(i + 1) * width]
        p = next(j for j, c in enumerate(line) if c != 0)
        assert p % phi == 0, "realified pivots must come in aligned blocks"
        rows.append(line)
        pivots.append(p // phi)
    return rows, int(den), pivots


def _rref_flint(spec, rows, ncols, integral=False):
    phi = spec.degree
    introws = [r for r in (rows if integral else _integralize(rows)) if any(any(u) for u in r)]
    if not introws:
        return (), ()
    lines, den, pivots = _flint_rref_int(spec, introws, ncols)
    basis = []
    for line in lines:
        vals = [int(c) for c in line]
        basis.append(tuple(
            FieldElement._raw(spec, tuple(Fraction(v, den) for v in vals[phi * j:phi * j + phi]))
            for j in range(ncols)))
    return tuple(basis), tuple(pivots)


def _mult_blocks(spec, introws, ncols):
    """Flat integer Q-matrix of v -> M v: entry m becomes the phi x phi block of multiplication by m."""
    phi = spec.degree
    mod = spec.modulus
    width = phi * ncols
    flat = [0] * (phi * len(introws) * width)
    for i, r in enumerate(introws):
        for j, u in enumerate(r):
            if not any(u):
                continue
            col = u
            for s in range(phi):
                if s:
                    col = _times_gen_int(col, mod)
                for t, q in enumerate(col):
                    if q:
                        flat[(phi * i + t) * width + phi * j + s] = q
    return flat


def annihilates(m, vectors, spec: FieldSpec | None = None, ncols: int | None = None) -> bool:
    """True iff ``M v = 0`` exactly for every vector ``v``."""
    spec, rows, ncols, integral = _as_rows(spec, m, ncols)
    vectors = [v for v in vectors if any(v)]
    if not vectors or not rows:
        return True
    if any(len(v) != ncols for v in vectors):
        raise DimensionError("vector length does not match column count")
    if flint is None or _config["backend"] == "python":
        field_rows = _to_field_rows(spec, rows) if integral else rows
        mat = DenseMatrix(spec, tuple(tuple(r) for r in field_rows), ncols)
        return all(not any(mat.apply(v)) for v in vectors)
    phi = spec.degree
    introws = rows if integral else _integralize(rows)
    a = flint.fmpz_mat(phi * len(introws), phi * ncols, _mult_blocks(spec, introws, ncols))
    cols = _integralize(vectors)
    b = flint.fmpz_mat(phi * ncols, len(cols),
                       [cols[k][j][s] for j in range(ncols) for s in range(phi) for k in range(len(cols))])
    return not any((a * b).entries())


def _to_field_rows(spec, introws):
    return [tuple(FieldElement._raw(spec, tuple(Fraction(t) for t in u)) for u in r) for r in introws]


def _kernel(backend):
    backend = backend or _config["backend"]
    if backend == "flint":
        if flint is None:
            raise RuntimeError("python-flint is not installed")
        return "flint"
    return "python"


# --- public operations -------------------------------------------------------------

def _as_rows(spec, m, ncols):
    """Normalize matrix input to ``(spec, rows, ncols, integral)``."""
    if isinstance(m, IntegralMatrix):
        return m.spec, m.rows, m.ncols, True
    if isinstance(m, DenseMatrix):
        return m.spec, m.rows, m.ncols, False
    if isinstance(m, Subspace):
        return m.spec, m.basis, m.ambient_dim, False
    rows = [tuple(r) for r in m]
    if spec is None:
        raise ValueError("field spec required for plain row lists")
    if ncols is None:
        if not rows:
            raise DimensionError("column count needed for an empty row list")
        ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise DimensionError("matrix rows must have equal length")
    return spec, rows, ncols, False


def rref(m, spec: FieldSpec | None = None, ncols: int | None = None, backend: str | None = None):
    """Return ``(Subspace of the row space, rank)``.

    ``m`` may be a :class:`DenseMatrix`, :class:`IntegralMatrix`,
    :class:`Subspace` or a sequence of rows of field elements (then ``spec``
    is required).
    """
    spec, rows, ncols, integral = _as_rows(spec, m, ncols)
    if _kernel(backend) == "flint":
        basis, pivots = _rref_flint(spec, rows, ncols, integral)
    else:
        basis, pivots = _rref_python(spec, _to_field_rows(spec, rows) if integral else rows, ncols)
    return Subspace(spec, ncols, basis, pivots), len(pivots)


def rank(m, spec: FieldSpec | None = None, ncols: int | None = None, backend: str | None = None) -> int:
    return rref(m, spec, ncols, backend)[1]


def span(spec: FieldSpec, vectors, ambient_dim: int, backend: str | None = None) -> Subspace:
    return rref(list(vectors), spec, ambient_dim, backend)[0]


def nullspace(m, spec: FieldSpec | None = None, ncols: int | None = None,
              backend: str | None = None) -> Subspace:
    """Basis (in RREF) of ``{v : m v = 0}``."""
    spec, rows, ncols, integral = _as_rows(spec, m, ncols)
    if _kernel(backend) == "flint":
        return _nullspace_flint(spec, rows, ncols, integral)
    red, r = rref(rows if not integral else IntegralMatrix(spec, tuple(rows), ncols), spec, ncols, backend)
    pivset = set(red.pivots)
    free = [j for j in range(ncols) if j not in pivset]
    zero, one = spec.zero(), spec.one()
    vectors = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red.basis, red.pivots):
            if row[f]:
                v[p] = -row[f]
        vectors.append(v)
    # leading entries sit in pivot columns, so re-reduce to the canonical form
    null, k = rref(vectors, spec, ncols, backend) if vectors else (Subspace.zero(spec, ncols), 0)
    assert r + k == ncols, "rank-nullity violated"
    return null


def _nullspace_flint(spec, rows, ncols, integral):
    phi = spec.degree
    introws = [r for r in (rows if integral else _integralize(rows)) if any(any(u) for u in r)]
    if introws:
        lines, den, pivots = _flint_rref_int(spec, introws, ncols)
    else:
        lines, den, pivots = [], 1, []
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    zero = (0,) * phi
    vectors = []
    for f in free:
        v = [zero] * ncols
        v[f] = (den,) + (0,) * (phi - 1)
        for line, p in zip(lines, pivots):
            u = tuple(-int(c) for c in line[phi * f:phi * f + phi])
            if any(u):
                v[p] = u
        vectors.append(v)
    if not vectors:
        return Subspace.zero(spec, ncols)
    null, k = rref(IntegralMatrix(spec, tuple(vectors), ncols), backend="flint")
    assert len(pivots) + k == ncols, "rank-nullity violated"
    return null


def reduce_vector(s: Subspace, v: Sequence):
    """Return ``(remainder, coordinates)`` of ``v`` reduced against the RREF basis."""
    if len(v) != s.ambient_dim:
        raise DimensionError(f"vector of length {len(v)} in ambient dimension {s.ambient_dim}")
    spec = s.spec
    rem = [spec(c) for c in v]
    coords = []
    for row, p in zip(s.basis, s.pivots):
        c = rem[p]
        coords.append(c)
        if c:
            for j in range(p, s.ambient_dim):
                if row[j]:
                    rem[j] = rem[j] - c * row[j]
    return rem, coords


def in_span(s: Subspace, v: Sequence):
    """Coordinates of ``v`` in the basis of ``s``, or ``None`` when ``v`` is outside."""
    rem, coords = reduce_vector(s, v)
    return None if any(rem) else coords


def subspace_sum(spaces: Sequence[Subspace], backend: str | None = None) -> Subspace:
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one subspace")
    dim = spaces[0].ambient_dim
    if any(s.ambient_dim != dim for s in spaces):
        raise DimensionError("subspaces live in different ambient spaces")
    rows = [r for s in spaces for r in s.basis]
    if not rows:
        return Subspace.zero(spaces[0].spec, dim)
    return rref(rows, spaces[0].spec, dim, backend)[0]


def contains(s: Subspace, t: Subspace, backend: str | None = None) -> bool:
    """True iff every basis row of ``t`` lies in ``s``.

    Decided as ``dim(s + t) == dim(s)``, equivalent to row-by-row
    membership and cheaper when ``t`` is large.
    """
    if s.ambient_dim != t.ambient_dim:
        raise DimensionError("subspaces live in different ambient spaces")
    if not t.basis:
        return True
    if len(t.basis) <= 2:
        return all(in_span(s, row) is not None for row in t.basis)
    return subspace_sum([s, t], backend).dim == s.dim


def intersection(s: Subspace, t: Subspace, backend: str | None = None) -> Subspace:
    """Intersection via the kernel of ``[S; -T]^T``."""
    if s.ambient_dim != t.ambient_dim:
        raise DimensionError("subspaces live in different ambient spaces")
    spec = s.spec
    if not s.basis or not t.basis:
        return Subspace.zero(spec, s.ambient_dim)
    gens = list(s.basis) + [tuple(-c for c in r) for r in t.basis]
    # columns of the system are the generators
    system = DenseMatrix(spec, tuple(gens), s.ambient_dim).transpose()
    ker = nullspace(system, backend=backend)
    vectors = []
    zero = spec.zero()
    for coeffs in ker.basis:
        v = [zero] * s.ambient_dim
        for c, row in zip(coeffs[:len(s.basis)], s.basis):
            if c:
                v = [a + c * b if b else a for a, b in zip(v, row)]
        vectors.append(v)
    return span(spec, vectors, s.ambient_dim, backend)

"""Arrangement constructors and arrangement files.

* :func:`yoshinaga` - the 18-line deformation of the 6th Fermat arrangement,
  built from the factored sextic and its cyclic images.
* :func:`fermat` - the 3n lines of (x^n - y^n)(y^n - z^n)(z^n - x^n).
* :func:`hesse_cubic` - the member x^3 + y^3 + z^3 - (3379/225) xyz of the
  Hesse pencil through the nine double points of Yoshinaga's arrangement.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .geometry import ProjLine, check_distinct, singular_locus
from .numberfield import FieldMismatchError, FieldSpec, ParseError, cyclotomic_spec, power_of_generator
from .polyring import HomogeneousForm, expand_product, variables

YOSHINAGA_PROFILE = {2: 9, 3: 48}
DEFAULT_C = Fraction(15)
HESSE_XYZ = Fraction(-3379, 225)


class ArrangementFileError(ValueError):
    pass


class DegenerateParameterWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DeformationParams:
    c: Fraction = DEFAULT_C

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c == 0:
            raise ValueError("deformation parameter c must be nonzero")


@dataclass(frozen=True)
class Arrangement:
    spec: FieldSpec
    lines: tuple
    labels: tuple
    provenance: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        if len(self.lines) != len(self.labels):
            raise ValueError("one label per line is required")
        for l in self.lines:
            if l.spec != self.spec:
                raise FieldMismatchError("line coefficients outside the arrangement field")
        check_distinct(self.lines)

    def __len__(self):
        return len(self.lines)

    def forms(self) -> list:
        return [l.form() for l in self.lines]

    def defining_form(self) -> HomogeneousForm:
        """Product of all line equations."""
        return expand_product(self.forms(), self.spec)

    def locus(self):
        return singular_locus(self.lines)

    def label_map(self, other: "Arrangement") -> dict | None:
        """Index map self -> other matching equal lines, or None if the line sets differ."""
        where = {l.normalized().coeffs: k for k, l in enumerate(other.lines)}
        out = {}
        for i, l in enumerate(self.lines):
            k = where.get(l.normalized().coeffs)
            if k is None:
                return None
            out[i] = k
        return out if len(out) == len(other.lines) else None

    def to_json(self) -> dict:
        return {
            "field": self.spec.to_json(),
            "lines": [{"label": lab, "coeffs": l.to_json()} for lab, l in zip(self.labels, self.lines)],
            "provenance": self.provenance,
        }


def tau(f: HomogeneousForm, power: int = 1) -> HomogeneousForm:
    """Cyclic substitution f(x, y, z) -> f(y, z, x), applied ``power`` times."""
    for _ in range(power % 3):
        f = f.substitute_permutation((1, 2, 0))
    return f


def tau_line(l: ProjLine, power: int = 1) -> ProjLine:
    u = l.coeffs
    for _ in range(power % 3):
        # u*y + v*z + w*x
        u = (u[2], u[0], u[1])
    return ProjLine.of(l.spec, u)


def deformation_sextic(c, spec: FieldSpec | None = None) -> HomogeneousForm:
    """The expanded deformed sextic x^6 - y^6 + 3c x^4yz - 3c xy^4z - c^3 x^3z^3 + c^3 y^3z^3."""
    spec = spec or cyclotomic_spec(6)
    c = Fraction(c)
    return HomogeneousForm(spec, 6, {
        (6, 0, 0): 1, (0, 6, 0): -1,
        (4, 1, 1): 3 * c, (1, 4, 1): -3 * c,
        (3, 0, 3): -c ** 3, (0, 3, 3): c ** 3,
    })


def deformation_factors(c, spec: FieldSpec | None = None) -> list:
    """The six lines of the deformed sextic: three cube-root factors of x^3 - y^3, three affine ones."""
    spec = spec or cyclotomic_spec(6)
    c = spec(Fraction(c))
    a = power_of_generator(spec, 1)
    a5 = power_of_generator(spec, 5)
    one, zero = spec.one(), spec.zero()
    raw = [
        (one, -one, zero),
        (one, a, zero),
        (one, one - a, zero),
        (one, one, -c),
        (a, a5, c),
        (a5, a, c),
    ]
    return [ProjLine.of(spec, u) for u in raw]


def yoshinaga(params: DeformationParams | Fraction | int | str = DEFAULT_C, verify: bool = True) -> Arrangement:
    """Yoshinaga's 18 lines over Q(zeta_6) for deformation parameter c.

    With ``verify`` the product of the lines is checked against the product of
    the three expanded sextics, and a :class:`DegenerateParameterWarning` is
    issued when the singular profile differs from {3: 48, 2: 9}.
    """
    if not isinstance(params, DeformationParams):
        params = DeformationParams(Fraction(params))
    spec = cyclotomic_spec(6)
    base = deformation_factors(params.c, spec)
    lines = [tau_line(l, k) for k in range(3) for l in base]
    labels = [f"P{k + 1}'.{i + 1}" for k in range(3) for i in range(6)]
    arr = Arrangement(spec, tuple(lines), tuple(labels),
                      {"name": "yoshinaga", "params": {"c": str(params.c)}})
    if verify:
        if not construction_identity_holds(arr, params.c):
            raise RuntimeError("line product does not match the deformed sextics")
        profile = arr.locus().profile()
        if profile != YOSHINAGA_PROFILE:
            warnings.warn(f"c = {params.c} gives singular profile {profile}, "
                          f"expected {YOSHINAGA_PROFILE}", DegenerateParameterWarning, stacklevel=2)
    return arr


def proportional(f: HomogeneousForm, g: HomogeneousForm) -> bool:
    """True iff f = lambda * g for some nonzero field constant lambda."""
    if f.degree != g.degree or f.spec != g.spec:
        return False
    if f.is_zero() or g.is_zero():
        return f.is_zero() and g.is_zero()
    if set(m for m, _ in f.items()) != set(m for m, _ in g.items()):
        return False
    m0, c0 = next(iter(f.items()))
    lam = c0 / g.coefficient(m0)
    return f == g.scale(lam)


def construction_identity_holds(arr: Arrangement, c) -> bool:
    sextic = deformation_sextic(c, arr.spec)
    target = expand_product([tau(sextic, k) for k in range(3)])
    return proportional(arr.defining_form(), target)


def fermat(n: int) -> Arrangement:
    """The 3n lines x - z^k y, y - z^k z, z - z^k x (z a primitive n-th root) over Q(zeta_n)."""
    if n < 3:
        raise ValueError(f"Fermat arrangement needs n >= 3, got {n}")
    spec = cyclotomic_spec(n)
    one, zero = spec.one(), spec.zero()
    lines, labels = [], []
    for name, (i, j) in (("x-y", (0, 1)), ("y-z", (1, 2)), ("z-x", (2, 0))):
        for k in range(n):
            u = [zero, zero, zero]
            u[i] = one
            u[j] = -power_of_generator(spec, k)
            lines.append(ProjLine.of(spec, u))
            labels.append(f"{name}.{k}")
    return Arrangement(spec, tuple(lines), tuple(labels), {"name": "fermat", "params": {"n": n}})


def fermat_form(n: int) -> HomogeneousForm:
    """(x^n - y^n)(y^n - z^n)(z^n - x^n) expanded directly."""
    spec = cyclotomic_spec(n)
    x, y, z = variables(spec)
    return expand_product([x ** n - y ** n, y ** n - z ** n, z ** n - x ** n])


def hesse_cubic(spec: FieldSpec | None = None, xyz_coeff=HESSE_XYZ) -> HomogeneousForm:
    spec = spec or cyclotomic_spec(6)
    return HomogeneousForm(spec, 3, {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1, (1, 1, 1): xyz_coeff})


# --- files ---------------------------------------------------------------------

def arrangement_from_json(data: dict, expected_spec: FieldSpec | None = None, source: str = "<data>") -> Arrangement:
    try:
        spec = FieldSpec.from_json(data["field"])
        entries = data["lines"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ArrangementFileError(f"{source}: malformed arrangement header ({exc})") from exc
    if expected_spec is not None and spec != expected_spec:
        raise FieldMismatchError(f"{source}: file declares Q(zeta_{spec.conductor}), "
                                 f"expected Q(zeta_{expected_spec.conductor})")
    lines, labels = [], []
    for i, entry in enumerate(entries):
        coeffs = entry.get("coeffs") if isinstance(entry, dict) else None
        if not isinstance(coeffs, list) or len(coeffs) != 3:
            raise ArrangementFileError(f"{source}: lines[{i}] needs three coefficients")
        parsed = []
        for k, text in enumerate(coeffs):
            try:
                parsed.append(spec(str(text)))
            except ParseError as exc:
                raise ArrangementFileError(f"{source}: lines[{i}].coeffs[{k}]: {exc}") from exc
        if not any(parsed):
            raise ArrangementFileError(f"{source}: lines[{i}] has all-zero coefficients")
        lines.append(ProjLine.of(spec, parsed))
        labels.append(str(entry.get("label", f"l{i + 1}")))
    return Arrangement(spec, tuple(lines), tuple(labels), dict(data.get("provenance", {})))


def save_arrangement(arr: Arrangement, path) -> None:
    Path(path).write_text(json.dumps(arr.to_json(), indent=2) + "\n")


def load_arrangement(path, expected_spec: FieldSpec | None = None) -> Arrangement:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArrangementFileError(f"{path}: {exc}") from exc
    return arrangement_from_json(data, expected_spec, str(path))


def _data_text(name: str) -> str:
    return resources.files("symcontain").joinpath("data", name).read_text()


def reference_lines() -> Arrangement:
    """Bundled transcription of the reference line list (c = 15)."""
    return arrangement_from_json(json.loads(_data_text("yoshinaga_c15_lines.json")),
                                 source="yoshinaga_c15_lines.json")


def reference_triples() -> list:
    """Bundled transcription of the 48 reference triple-point incidences (1-based labels)."""
    return [tuple(t) for t in json.loads(_data_text("yoshinaga_c15_triples.json"))["triples"]]

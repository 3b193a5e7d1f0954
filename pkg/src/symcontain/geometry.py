"""Points, lines and singular loci of line arrangements in P^2."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

from .numberfield import FieldElement, FieldSpec, format_element


class DuplicateLineError(ValueError):
    pass


class DegenerateInputError(ValueError):
    pass


def _normalize(spec: FieldSpec, coords) -> tuple:
    coords = tuple(spec(c) for c in coords)
    if len(coords) != 3:
        raise ValueError("projective coordinates must be a triple")
    for c in coords:
        if c:
            inv = c.inverse()
            return tuple(v * inv if v else v for v in coords)
    raise DegenerateInputError("all coordinates are zero")


def cross(u: Sequence[FieldElement], v: Sequence[FieldElement]) -> tuple:
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def dot(u, v) -> FieldElement:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _sort_key(coords) -> tuple:
    return tuple(q for c in coords for q in c.coeffs)


@dataclass(frozen=True)
class ProjPoint:
    spec: FieldSpec
    coords: tuple

    @classmethod
    def of(cls, spec: FieldSpec, coords) -> "ProjPoint":
        return cls(spec, _normalize(spec, coords))

    def normalized(self) -> "ProjPoint":
        return ProjPoint.of(self.spec, self.coords)

    def sort_key(self):
        return _sort_key(self.coords)

    def to_json(self) -> list:
        return [format_element(c) for c in self.coords]

    def __str__(self):
        return "(" + " : ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class ProjLine:
    """The line u*x + v*y + w*z = 0."""

    spec: FieldSpec
    coeffs: tuple

    @classmethod
    def of(cls, spec: FieldSpec, coeffs) -> "ProjLine":
        return cls(spec, _normalize(spec, coeffs))

    def normalized(self) -> "ProjLine":
        return ProjLine.of(self.spec, self.coeffs)

    def form(self):
        from .polyring import HomogeneousForm

        return HomogeneousForm.linear(self.spec, self.coeffs)

    def sort_key(self):
        return _sort_key(self.coeffs)

    def to_json(self) -> list:
        return [format_element(c) for c in self.coeffs]

    def __str__(self):
        parts = []
        for c, v in zip(self.coeffs, "xyz"):
            if c:
                parts.append(v if c == 1 else f"({c})*{v}")
        return " + ".join(parts)


def meet(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    """Intersection point of two distinct lines."""
    p = cross(l1.coeffs, l2.coeffs)
    if not any(p):
        raise DegenerateInputError("lines coincide")
    return ProjPoint.of(l1.spec, p)


def line_through(p: ProjPoint, q: ProjPoint) -> ProjLine:
    l = cross(p.coords, q.coords)
    if not any(l):
        raise DegenerateInputError("points coincide")
    return ProjLine.of(p.spec, l)


def incident(p: ProjPoint, l: ProjLine) -> bool:
    return not dot(p.coords, l.coeffs)


@dataclass(frozen=True)
class LocusPoint:
    point: ProjPoint
    lines: frozenset

    @property
    def mult(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class SingularLocus:
    points: tuple  # LocusPoint, sorted by canonical coordinates
    n_lines: int = field(default=0)

    def profile(self) -> dict:
        """Multiplicity profile {m: t_m}, sorted by m."""
        return dict(sorted(Counter(p.mult for p in self.points).items()))

    def of_multiplicity(self, m: int) -> list:
        return [p for p in self.points if p.mult == m]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def pair_count_holds(self) -> bool:
        return sum(comb(p.mult, 2) for p in self.points) == comb(self.n_lines, 2)

    def to_json(self) -> list:
        return [{"point": p.point.to_json(), "mult": p.mult, "lines": sorted(p.lines)}
                for p in self.points]


def check_distinct(lines: Sequence[ProjLine]) -> None:
    seen = {}
    for i, l in enumerate(lines):
        key = l.normalized().coeffs
        if key in seen:
            raise DuplicateLineError(f"lines {seen[key]} and {i} are proportional")
        seen[key] = i


def singular_locus(lines: Sequence[ProjLine]) -> SingularLocus:
    """All intersection points of at least two lines, with their incident line indices."""
    lines = [l.normalized() for l in lines]
    check_distinct(lines)
    found = {}
    for i, j in combinations(range(len(lines)), 2):
        p = meet(lines[i], lines[j])
        if p not in found:
            found[p] = None
    # incidence recomputed against every line, not inferred from pairs
    pts = []
    for p in found:
        through = frozenset(k for k, l in enumerate(lines) if incident(p, l))
        assert len(through) >= 2
        pts.append(LocusPoint(p, through))
    pts.sort(key=lambda lp: lp.point.sort_key())
    locus = SingularLocus(tuple(pts), len(lines))
    assert locus.pair_count_holds()
    return locus


def incidence_table(locus: SingularLocus, mult: int | None = None) -> list:
    """Rows of 0/1 incidence flags, one per point of the given multiplicity."""
    return [[1 if k in lp.lines else 0 for k in range(locus.n_lines)]
            for lp in locus.points if mult is None or lp.mult == mult]


def incidence_csv(locus: SingularLocus, mult: int | None = None, labels: Sequence[str] | None = None) -> str:
    labels = list(labels) if labels else [f"l{k + 1}" for k in range(locus.n_lines)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["point", *labels])
    rows = [lp for lp in locus.points if mult is None or lp.mult == mult]
    for n, lp in enumerate(rows, 1):
        w.writerow([f"P{n}", *("+" if k in lp.lines else "" for k in range(locus.n_lines))])
    return buf.getvalue()


@dataclass(frozen=True)
class IncidenceMatch:
    total: int
    direct: int  # sets equal under the identity labelling
    matched: int  # sets matched under ``relabelling`` (0 if none exists)
    relabelling: dict | None  # computed line index -> reference line index

    @property
    def ok(self) -> bool:
        return self.relabelling is not None and self.matched == self.total


def _propagate(sigma: dict, used: set, comp, ref_through) -> bool:
    """Force images of lines sharing a set with two mapped lines; False on a contradiction."""
    changed = True
    while changed:
        changed = False
        for s in comp:
            done = [k for k in s if k in sigma]
            if len(done) < 2:
                continue
            target = ref_through.get(frozenset((sigma[done[0]], sigma[done[1]])))
            if target is None or len(target) != len(s):
                return False
            images = {sigma[k] for k in done}
            if not images <= target:
                return False
            todo = [k for k in s if k not in sigma]
            free = target - images
            if len(todo) == 1:
                (v,) = free
                if v in used:
                    return False
                sigma[todo[0]] = v
                used.add(v)
                changed = True
    return True


def _search(sigma, used, comp, ref_through, deg_c, deg_r, n):
    if not _propagate(sigma, used, comp, ref_through):
        return None
    if len(sigma) == n:
        return sigma
    # branch on the unmapped line sharing most sets with mapped lines
    def touching(k):
        return sum(1 for s in comp if k in s and any(j in sigma for j in s))
    k = max((k for k in range(n) if k not in sigma), key=lambda k: (touching(k), -k))
    for v in range(n):
        if v in used or deg_r[v] != deg_c[k]:
            continue
        found = _search({**sigma, k: v}, used | {v},
                        comp, ref_through, deg_c, deg_r, n)
        if found is not None:
            return found
    return None


def match_incidences(computed, reference, n_lines: int) -> IncidenceMatch:
    """Compare two families of line-index sets as unordered configurations.

    Both families use 0-based line indices. Two lines meet in one point, so
    a reference family in which two lines share two sets never matches. A relabelling is a bijection of
    lines carrying every computed set onto a reference set. Once two lines
    of a set are mapped the rest of the set is forced, so a short
    branch-and-propagate search decides existence.
    """
    comp = [frozenset(s) for s in computed]
    ref = [frozenset(s) for s in reference]
    refset = set(ref)
    direct = sum(s in refset for s in comp)
    none = IncidenceMatch(len(ref), direct, 0, None)
    ref_through = {}
    for s in ref:
        for pair in combinations(sorted(s), 2):
            if frozenset(pair) in ref_through:
                return none  # two lines cannot meet twice: not a point/line configuration
            ref_through[frozenset(pair)] = s
    if len(comp) != len(ref) or len(set(comp)) != len(comp) or len(refset) != len(ref):
        return none
    deg_c = Counter(k for s in comp for k in s)
    deg_r = Counter(k for s in ref for k in s)
    if sorted(deg_c.values()) != sorted(deg_r.values()):
        return none
    sigma = _search({}, set(), comp, ref_through, deg_c, deg_r, n_lines)
    if sigma is None:
        return none
    matched = sum(frozenset(sigma[k] for k in s) in refset for s in comp)
    return IncidenceMatch(len(ref), direct, matched, dict(sorted(sigma.items())))

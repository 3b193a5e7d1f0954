"""Command-line front end.

Commands: build, singular, check, witness-search, verify-paper.

Exit codes: 0 when every expected result is confirmed, 2 when a mathematical
check disagrees with its expected value, 1 on operational errors (bad
arguments, unreadable files, malformed data).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from . import __version__, linalg
from .catalog import (YOSHINAGA_PROFILE, Arrangement, ArrangementFileError, DegenerateParameterWarning,
                      fermat, hesse_cubic, load_arrangement, reference_lines, reference_triples,
                      construction_identity_holds, proportional, yoshinaga)
from .engine import (VERDICT_NONCONTAINMENT, FatPointScheme, check_noncontainment, fat_graded_piece,
                     graded_containment, scheme_from_locus, witness_search)
from .geometry import DuplicateLineError, incidence_csv, match_incidences
from .numberfield import FieldMismatchError, ParseError, cyclotomic_spec
from .polyring import HomogeneousForm, evaluate, vanishes_to_order

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for mathematical mismatches
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    source: str = "yoshinaga"  # yoshinaga | fermat | file:<path>
    c: Fraction = Fraction(15)
    n: int = 3
    conductor: int | None = None
    m: int = 3
    r: int = 2
    degree: int | None = None
    output: str | None = None
    exhaustive_subsets: bool = False
    pivot_heuristic: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.m < 1 or self.r < 1:
            raise UsageError("m and r must be at least 1")


@dataclass
class Report:
    arrangement: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    facts: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)

    def check(self, name: str, expected, actual, asserted: bool = True, **detail) -> bool:
        ok = expected == actual
        entry = {"name": name, "expected": expected, "actual": actual, "pass": ok}
        if not asserted:
            entry["asserted"] = False
        if detail:
            entry["detail"] = detail
        self.checks.append(entry)
        return ok

    @property
    def failures(self) -> list:
        return [c["name"] for c in self.checks if not c["pass"] and c.get("asserted", True)]

    def to_json(self) -> dict:
        return {
            "version": __version__,
            "arrangement": self.arrangement,
            "checks": self.checks,
            "witnesses": self.witnesses,
            "facts": self.facts,
            "status": "fail" if self.failures else "pass",
            "timings_ms": self.timings_ms,
        }


class _Timer:
    def __init__(self, report: Report, key: str):
        self.report, self.key = report, key

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.report.timings_ms[self.key] = round((time.perf_counter() - self.t0) * 1000, 1)


# --- arrangement and witness selection -------------------------------------------

def _expected_spec(cfg: RunConfig, default: int | None):
    conductor = cfg.conductor if cfg.conductor is not None else default
    return cyclotomic_spec(conductor) if conductor is not None else None


def load_source(cfg: RunConfig) -> Arrangement:
    src = cfg.source
    if src == "yoshinaga":
        if cfg.conductor not in (None, 6):
            raise UsageError("yoshinaga is defined over Q(zeta_6); drop --field-conductor or use 6")
        with warnings.catch_warnings():
            warnings.simplefilter("always", DegenerateParameterWarning)
            return yoshinaga(cfg.c)
    if src == "fermat":
        if cfg.conductor not in (None, cfg.n):
            raise UsageError(f"fermat {cfg.n} is defined over Q(zeta_{cfg.n})")
        return fermat(cfg.n)
    if src.startswith("file:"):
        return load_arrangement(src[5:], _expected_spec(cfg, 6))
    raise UsageError(f"unknown arrangement {src!r} (yoshinaga | fermat | file:<path>)")


def double_point_cubic(arr: Arrangement) -> HomogeneousForm:
    """The unique cubic through the double points of the arrangement."""
    pts = tuple(lp.point for lp in arr.locus().of_multiplicity(2))
    doubles = FatPointScheme(arr.spec, pts, (1,) * len(pts), "doubles")
    piece = fat_graded_piece(doubles, 3)
    if piece.dim != 1:
        raise UsageError(f"the double points lie on a {piece.dim}-dimensional space of cubics, not a unique cubic")
    return piece.forms()[0]


def load_witness(selector: str, arr: Arrangement) -> HomogeneousForm:
    if selector == "lines":
        return arr.defining_form()
    if selector == "lines-times-cubic":
        return arr.defining_form() * double_point_cubic(arr)
    if selector.startswith("file:"):
        path = selector[5:]
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: {exc}") from exc
        terms = data["terms"] if isinstance(data, dict) else data
        degree = data.get("degree") if isinstance(data, dict) else None
        try:
            return HomogeneousForm.from_json(arr.spec, terms, degree)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"{path}: malformed form ({exc})") from exc
    raise UsageError(f"unknown witness {selector!r} (lines | lines-times-cubic | file:<path>)")


def _scheme(arr: Arrangement, selector: str) -> FatPointScheme:
    try:
        return scheme_from_locus(arr.locus(), selector)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad scheme selector {selector!r}: {exc}") from exc


def _profile_str(profile: dict) -> str:
    # most frequent multiplicity first
    order = sorted(profile.items(), key=lambda kv: (-kv[1], kv[0]))
    return " ".join(f"t{m}={t}" for m, t in order)


def _emit(cfg: RunConfig, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_triples(path: str | None) -> list:
    if path is None:
        return reference_triples()
    try:
        return [tuple(t) for t in json.loads(Path(path).read_text())["triples"]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ArrangementFileError(f"{path}: malformed incidence data ({exc})") from exc


def appendix_match(arr: Arrangement, triples_path: str | None = None):
    """Match the computed triple points of the bundled line list against the incidence table.

    Line indices refer to the bundled line list; the constructed lines are
    mapped onto it first.
    """
    ref_arr = reference_lines()
    where = arr.label_map(ref_arr)
    if where is None:
        raise ValueError("arrangement lines differ from the bundled line list")
    computed = [{where[k] for k in lp.lines} for lp in arr.locus().of_multiplicity(3)]
    table = [{k - 1 for k in t} for t in _load_triples(triples_path)]
    return match_incidences(computed, table, len(ref_arr))


# --- commands -----------------------------------------------------------------------

def cmd_build(cfg: RunConfig, args) -> int:
    arr = load_source(cfg)
    payload = arr.to_json()
    summary = f"{len(arr)} lines over Q(zeta_{arr.spec.conductor})"
    if cfg.output:
        _emit(cfg, payload)
        print(summary)
    else:
        _emit(cfg, payload)
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_singular(cfg: RunConfig, args) -> int:
    arr = load_source(cfg)
    locus = arr.locus()
    print(_profile_str(locus.profile()))
    status = EXIT_OK
    payload = {"version": __version__, "arrangement": arr.provenance,
               "profile": {str(k): v for k, v in locus.profile().items()}, "points": locus.to_json()}
    if args.incidence:
        csv_text = incidence_csv(locus, 3, list(arr.labels))
        if args.csv:
            Path(args.csv).write_text(csv_text)
        elif not cfg.output:
            sys.stdout.write(csv_text)
        if arr.label_map(reference_lines()) is not None:
            match = appendix_match(arr, args.appendix_data)
            print(f"{match.matched}/{match.total} triples match appendix "
                  f"(up to line relabelling; {match.direct}/{match.total} under transcribed labels)")
            payload["appendix"] = {"matched": match.matched, "direct": match.direct, "total": match.total,
                                   "relabelling": match.relabelling}
            if not match.ok:
                status = EXIT_MISMATCH
        else:
            print("no bundled incidence table for this arrangement")
    if cfg.output:
        _emit(cfg, payload)
    return status


def cmd_check(cfg: RunConfig, args) -> int:
    arr = load_source(cfg)
    report = Report(arrangement=arr.provenance)
    scheme = _scheme(arr, args.scheme)
    witness = load_witness(args.witness, arr)
    with _Timer(report, "check"):
        wr = check_noncontainment(scheme, cfg.m, cfg.r, witness, name=f"{args.scheme}/{args.witness}")
    report.witnesses.append(wr.to_json(include_witness=args.include_witness))
    report.check("verdict", args.expect, wr.verdict)
    _emit(cfg, report.to_json())
    print(f"verdict: {wr.verdict} ({wr.conditions_checked} derivative conditions, "
          f"dim I^({cfg.m})_{wr.degree} = {wr.dim_symbolic}, dim (I^{cfg.r})_{wr.degree} = {wr.dim_ordinary})",
          file=sys.stderr)
    return EXIT_OK if not report.failures else EXIT_MISMATCH


def cmd_witness_search(cfg: RunConfig, args) -> int:
    arr = load_source(cfg)
    scheme = _scheme(arr, args.scheme)
    if cfg.degree is None:
        raise UsageError("witness-search needs --degree")
    forms = witness_search(scheme, cfg.m, cfg.r, cfg.degree)
    _emit(cfg, {"version": __version__, "arrangement": arr.provenance, "scheme": scheme.describe(),
                "m": cfg.m, "r": cfg.r, "degree": cfg.degree, "count": len(forms),
                "witnesses": [f.to_json() for f in forms]})
    print(f"{len(forms)} form(s) in I^({cfg.m})_{cfg.degree} outside (I^{cfg.r})_{cfg.degree}", file=sys.stderr)
    return EXIT_OK


def _double_subsets(n: int, exhaustive: bool):
    if exhaustive:
        for k in range(1, n + 1):
            yield from combinations(range(n), k)
    else:
        yield from ((i,) for i in range(n))


def verify_paper(cfg: RunConfig, appendix_data: str | None = None, intermediate: bool = False) -> Report:
    report = Report()
    c = cfg.c
    reference = c == 15
    with _Timer(report, "build"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateParameterWarning)
            arr = yoshinaga(c, verify=False)
        locus = arr.locus()
    report.arrangement = dict(arr.provenance, lines=len(arr), conductor=arr.spec.conductor)
    profile = locus.profile()
    with _Timer(report, "combinatorics"):
        report.check("singular-profile", {str(k): v for k, v in sorted(YOSHINAGA_PROFILE.items())},
                     {str(k): v for k, v in profile.items()})
        report.check("singular-points", 57, len(locus))
        report.check("pair-count", True, locus.pair_count_holds())
        report.check("construction-identity", True, construction_identity_holds(arr, c))
    if reference:
        with _Timer(report, "transcription"):
            report.check("lines-match-transcription", True, arr.label_map(reference_lines()) is not None)
            if arr.label_map(reference_lines()) is not None:
                match = appendix_match(arr, appendix_data)
                report.check("appendix-incidence", f"{match.total}/{match.total}", f"{match.matched}/{match.total}",
                             direct=f"{match.direct}/{match.total}",
                             relabelling={str(k + 1): v + 1 for k, v in (match.relabelling or {}).items()})
    doubles = [lp.point for lp in locus.of_multiplicity(2)]
    triples = [lp.point for lp in locus.of_multiplicity(3)]
    with _Timer(report, "cubic"):
        try:
            cubic = hesse_cubic(arr.spec) if reference else double_point_cubic(arr)
        except UsageError as exc:
            cubic = None
            report.check("double-point-cubic", "unique", str(exc))
        if cubic is not None:
            report.check("cubic-vanishes-at-doubles", True, all(not evaluate(cubic, p.coords) for p in doubles),
                         cubic=str(cubic))
            if reference:
                report.check("cubic-is-unique-through-doubles", True, proportional(cubic, double_point_cubic(arr)))
            on = sum(1 for p in triples if not evaluate(cubic, p.coords))
            report.facts["cubic-triple-points-on-curve"] = on
            report.facts["cubic-avoids-triple-points"] = on == 0
            report.facts["cubic-smooth-at-doubles"] = all(not vanishes_to_order(cubic, p.coords, 2) for p in doubles)
    lines_form = arr.defining_form()
    runs = []
    if cubic is not None:
        runs.append(("noncontainment-full", scheme_from_locus(locus, "all-singular"), lines_form * cubic))
    runs.append(("noncontainment-triples", scheme_from_locus(locus, "triple-only"), lines_form))
    hesse = fermat(3)
    runs.append(("noncontainment-dual-hesse", scheme_from_locus(hesse.locus(), "triple-only"), hesse.defining_form()))
    if intermediate and cubic is not None:
        for subset in _double_subsets(len(doubles), cfg.exhaustive_subsets):
            sel = "triple-plus-doubles:" + ",".join(map(str, subset))
            runs.append((f"noncontainment-{sel}", scheme_from_locus(locus, sel), lines_form * cubic))
    for name, scheme, w in runs:
        with _Timer(report, name):
            wr = check_noncontainment(scheme, 3, 2, w, name=name)
        report.witnesses.append(wr.to_json(include_witness=False))
        # only the reference value c = 15 carries claims; other values are informative
        report.check(name, VERDICT_NONCONTAINMENT, wr.verdict, asserted=reference or name.endswith("dual-hesse"),
                     conditions_checked=wr.conditions_checked, dim_symbolic=wr.dim_symbolic,
                     dim_ordinary=wr.dim_ordinary)
    with _Timer(report, "els-m4-r2-d21"):
        report.check("els-m4-r2-d21", True, graded_containment(scheme_from_locus(locus, "all-singular"), 4, 2, 21))
    return report


def cmd_verify_paper(cfg: RunConfig, args) -> int:
    if cfg.source != "yoshinaga":
        raise UsageError("verify-paper always builds the yoshinaga arrangement")
    report = verify_paper(cfg, args.appendix_data, args.intermediate)
    _emit(cfg, report.to_json())
    for chk in report.checks:
        mark = "ok" if chk["pass"] else ("FAIL" if chk.get("asserted", True) else "info")
        print(f"[{mark}] {chk['name']}: {chk['actual']}", file=sys.stderr)
    if report.failures:
        print("failed: " + ", ".join(report.failures), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--field-conductor", type=int, default=None,
                        help="expected cyclotomic conductor (default 6 for yoshinaga and files)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--output", "-o", default=None, help="write the JSON result here instead of stdout")
    common.add_argument("--backend", choices=("flint", "python"), default=None)
    common.add_argument("--pivot-heuristic", action="store_true",
                        help="smallest-height pivots in the pure-python kernel")
    common.add_argument("--exhaustive-subsets", action="store_true",
                        help="intermediate schemes: all nonempty subsets of double points")
    common.add_argument("--verbose", "-v", action="store_true")

    source = _Parser(add_help=False)
    source.add_argument("--arrangement", "-a", default="yoshinaga", help="yoshinaga | fermat | file:<path>")
    source.add_argument("--c", type=Fraction, default=Fraction(15), help="deformation parameter (yoshinaga)")
    source.add_argument("--n", type=int, default=3, help="Fermat exponent")

    powers = _Parser(add_help=False)
    powers.add_argument("--m", type=int, default=3, help="symbolic power")
    powers.add_argument("--r", type=int, default=2, help="ordinary power")

    p = _Parser(prog="symcontain", description="Exact containment checks for line arrangements.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="write an arrangement file")
    b.add_argument("name", help="yoshinaga | fermat")
    b.add_argument("--c", type=Fraction, default=Fraction(15))
    b.add_argument("--n", type=int, default=3)

    s = sub.add_parser("singular", parents=[common, source], help="singular locus and incidence table")
    s.add_argument("--incidence", action="store_true")
    s.add_argument("--csv", default=None, help="write the triple-point incidence table here")
    s.add_argument("--appendix-data", default=None, help="alternative incidence-table JSON")

    c = sub.add_parser("check", parents=[common, source, powers], help="certify a non-containment witness")
    c.add_argument("--scheme", default="all-singular")
    c.add_argument("--witness", default="lines-times-cubic")
    c.add_argument("--expect", default=VERDICT_NONCONTAINMENT)
    c.add_argument("--include-witness", action="store_true")

    w = sub.add_parser("witness-search", parents=[common, source, powers], help="search a graded piece for witnesses")
    w.add_argument("--scheme", default="all-singular")
    w.add_argument("--degree", type=int, default=None)

    v = sub.add_parser("verify-paper", parents=[common], help="run the full reproduction pipeline")
    v.add_argument("--c", type=Fraction, default=Fraction(15))
    v.add_argument("--appendix-data", default=None, help="alternative incidence-table JSON")
    v.add_argument("--intermediate", action="store_true",
                   help="also check 48 triples plus subsets of the double points")
    return p


COMMANDS = {
    "build": cmd_build,
    "singular": cmd_singular,
    "check": cmd_check,
    "witness-search": cmd_witness_search,
    "verify-paper": cmd_verify_paper,
}


def _config(args) -> RunConfig:
    source = getattr(args, "arrangement", "yoshinaga")
    if args.command == "build":
        source = args.name
    return RunConfig(command=args.command, source=source, c=getattr(args, "c", Fraction(15)),
                     n=getattr(args, "n", 3), conductor=args.field_conductor,
                     m=getattr(args, "m", 3), r=getattr(args, "r", 2), degree=getattr(args, "degree", None),
                     output=args.output, exhaustive_subsets=args.exhaustive_subsets,
                     pivot_heuristic=args.pivot_heuristic, threads=args.threads)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        cfg = _config(args)
        if cfg.source not in ("yoshinaga", "fermat") and not cfg.source.startswith("file:"):
            raise UsageError(f"unknown arrangement {cfg.source!r}")
        if args.backend:
            linalg.set_backend(args.backend)
        linalg.set_pivot_heuristic(cfg.pivot_heuristic)
        linalg.set_threads(cfg.threads)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, ArrangementFileError, ParseError, FieldMismatchError, DuplicateLineError,
            FileNotFoundError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""JSON schemas shared by the CLI: rationals, sets, filters, problem files.

Rationals travel as strings "p/q" (bare "p" when the denominator is 1).
Interval sets are lists of ["lo", "hi"] pairs; a display convention flag
chooses between the internal [0, 1) coordinates and the centered
[-1/2, 1/2) presentation.  Floats are printed with 17 significant digits
and key order is fixed, so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .errors import ProblemFileError
from .filters import FilterMatrix, GridFilterMatrix
from .multiplicity import MultiplicityFunction
from .torus import TorusEndomorphism, TorusSet
from .trigpoly import TrigPoly

UNIT = "unit"
CENTERED = "centered"


def rat_str(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(text, path="value") -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ProblemFileError(path, f"not a rational: {text!r} ({exc})") from None


def _centered_intervals(ts: TorusSet):
    half = Fraction(1, 2)
    shifted = []
    for lo, hi in ts.intervals:
        if hi <= half:
            shifted.append((lo, hi))
        elif lo >= half:
            shifted.append((lo - 1, hi - 1))
        else:
            shifted.append((lo, half))
            shifted.append((-half, hi - 1))
    shifted.sort()
    merged = []
    for lo, hi in shifted:
        if merged and merged[-1][1] == lo:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def torus_set_to_json(ts: TorusSet, convention: str = UNIT) -> list:
    pairs = ts.intervals if convention == UNIT else _centered_intervals(ts)
    return [[rat_str(lo), rat_str(hi)] for lo, hi in pairs]


def parse_torus_set(data, path="set") -> TorusSet:
    if not isinstance(data, list):
        raise ProblemFileError(path, "expected a list of [lo, hi] pairs")
    pairs = []
    for idx, pair in enumerate(data):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ProblemFileError(f"{path}[{idx}]", "expected [lo, hi]")
        pairs.append(
            (
                parse_rat(pair[0], f"{path}[{idx}][0]"),
                parse_rat(pair[1], f"{path}[{idx}][1]"),
            )
        )
    return TorusSet.from_intervals(pairs)


def multiplicity_to_json(m: MultiplicityFunction, convention: str = UNIT) -> list:
    out = []
    for lo, hi, value in m.pieces:
        piece_set = TorusSet(((lo, hi),))
        for a, b in (
            piece_set.intervals if convention == UNIT else _centered_intervals(piece_set)
        ):
            out.append({"interval": [rat_str(a), rat_str(b)], "value": value})
    return out


def parse_multiplicity(data, path="multiplicity") -> MultiplicityFunction:
    if not isinstance(data, list):
        raise ProblemFileError(path, "expected a list of pieces")
    pieces = []
    for idx, item in enumerate(data):
        here = f"{path}[{idx}]"
        if not isinstance(item, dict) or "interval" not in item or "value" not in item:
            raise ProblemFileError(here, "expected {interval: [lo, hi], value: int}")
        interval = item["interval"]
        if not isinstance(interval, list) or len(interval) != 2:
            raise ProblemFileError(f"{here}.interval", "expected [lo, hi]")
        value = item["value"]
        if not isinstance(value, int) or value < 0:
            raise ProblemFileError(f"{here}.value", "expected a nonnegative integer")
        pieces.append(
            (
                parse_rat(interval[0], f"{here}.interval[0]"),
                parse_rat(interval[1], f"{here}.interval[1]"),
                value,
            )
        )
    try:
        return MultiplicityFunction.from_pieces(pieces)
    except ValueError as exc:
        raise ProblemFileError(path, str(exc)) from None


def trigpoly_to_json(f: TrigPoly, convention: str = UNIT) -> dict:
    pieces = []
    for lo, hi, terms in f.pieces:
        piece_set = TorusSet(((lo, hi),))
        spans = (
            piece_set.intervals if convention == UNIT else _centered_intervals(piece_set)
        )
        for a, b in spans:
            pieces.append(
                {
                    "interval": [rat_str(a), rat_str(b)],
                    "terms": [
                        {"freq": rat_str(nu), "re": c.real, "im": c.imag}
                        for nu, c in terms
                    ],
                }
            )
    return {"pieces": pieces}


def parse_trigpoly(data, path="entry") -> TrigPoly:
    if not isinstance(data, dict) or "pieces" not in data:
        raise ProblemFileError(path, "expected {pieces: [...]}")
    raw = []
    for idx, piece in enumerate(data["pieces"]):
        here = f"{path}.pieces[{idx}]"
        if not isinstance(piece, dict) or "interval" not in piece:
            raise ProblemFileError(here, "expected {interval, terms}")
        interval = piece["interval"]
        if not isinstance(interval, list) or len(interval) != 2:
            raise ProblemFileError(f"{here}.interval", "expected [lo, hi]")
        lo = parse_rat(interval[0], f"{here}.interval[0]")
        hi = parse_rat(interval[1], f"{here}.interval[1]")
        terms = []
        for tdx, term in enumerate(piece.get("terms", [])):
            there = f"{here}.terms[{tdx}]"
            if not isinstance(term, dict) or "freq" not in term:
                raise ProblemFileError(there, "expected {freq, re, im}")
            freq = parse_rat(term["freq"], f"{there}.freq")
            try:
                coef = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
            except (TypeError, ValueError):
                raise ProblemFileError(there, "re/im must be numbers") from None
            terms.append((freq, coef))
        # wrap the declared interval into [0, 1) pieces, same terms on each
        for a, b in TorusSet.interval(lo, hi).intervals:
            raw.append((a, b, list(terms)))
    try:
        return TrigPoly.from_pieces(raw)
    except ValueError as exc:
        raise ProblemFileError(path, str(exc)) from None


def filter_to_json(F: FilterMatrix, convention: str = UNIT) -> list:
    return [
        [trigpoly_to_json(entry, convention) for entry in row] for row in F.entries
    ]


def parse_filter(data, m, e, rows_follow, path="filter") -> FilterMatrix:
    if not isinstance(data, list) or not data:
        raise ProblemFileError(path, "expected a non-empty nested list of entries")
    rows = []
    width = None
    for i, row in enumerate(data):
        if not isinstance(row, list):
            raise ProblemFileError(f"{path}[{i}]", "expected a list of entries")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ProblemFileError(f"{path}[{i}]", "ragged matrix")
        rows.append(
            tuple(
                parse_trigpoly(cell, f"{path}[{i}][{j}]") for j, cell in enumerate(row)
            )
        )
    return FilterMatrix(tuple(rows), m, e, rows_follow)


def section_to_json(v, convention: str = UNIT) -> dict:
    """Section vector as component trig polys plus their carrier sets."""
    return {
        "components": [trigpoly_to_json(c, convention) for c in v.components],
        "sets": [torus_set_to_json(s, convention) for s in v.sets],
    }


def parse_section(data, path="section"):
    from .ruelle import SectionVector

    if not isinstance(data, dict) or "components" not in data or "sets" not in data:
        raise ProblemFileError(path, "expected {components: [...], sets: [...]}")
    comps = [
        parse_trigpoly(c, f"{path}.components[{i}]")
        for i, c in enumerate(data["components"])
    ]
    sets = [
        parse_torus_set(s, f"{path}.sets[{i}]") for i, s in enumerate(data["sets"])
    ]
    if len(comps) != len(sets):
        raise ProblemFileError(path, "components and sets must have equal length")
    return SectionVector.from_components(comps, sets)


def grid_filter_to_json(G: GridFilterMatrix) -> dict:
    return {
        "grid": G.grid,
        "samples": [
            [
                [[float(v.real), float(v.imag)] for v in G.samples[i, j]]
                for j in range(G.cols)
            ]
            for i in range(G.rows)
        ],
    }


# ---- problem files -----------------------------------------------------------


class ProblemInput:
    """Parsed problem file: dilation, multiplicity, optional filters, options."""

    def __init__(self, e, m, H, G, options):
        self.e = e
        self.m = m
        self.H = H
        self.G = G
        self.options = options


_DEFAULT_OPTIONS = {
    "tolerance": 1e-9,
    "grid": 256,
    "degree": 16,
    "depth": 3,
    "seed": 0,
}


def parse_problem(data, path="problem") -> ProblemInput:
    if not isinstance(data, dict):
        raise ProblemFileError(path, "expected a JSON object")
    endo = data.get("endomorphism")
    if not isinstance(endo, dict) or "N" not in endo:
        raise ProblemFileError(f"{path}.endomorphism", "expected {N: int >= 2}")
    N = endo["N"]
    if not isinstance(N, int) or N < 2:
        raise ProblemFileError(f"{path}.endomorphism.N", "expected an integer >= 2")
    e = TorusEndomorphism(N)
    if "multiplicity" not in data:
        raise ProblemFileError(f"{path}.multiplicity", "missing")
    m = parse_multiplicity(data["multiplicity"], f"{path}.multiplicity")
    H = G = None
    filters = data.get("filters") or {}
    if filters:
        if not isinstance(filters, dict):
            raise ProblemFileError(f"{path}.filters", "expected an object")
        if filters.get("H") is not None:
            H = parse_filter(filters["H"], m, e, "m", f"{path}.filters.H")
        if filters.get("G") is not None:
            G = parse_filter(filters["G"], m, e, "mtilde", f"{path}.filters.G")
    options = dict(_DEFAULT_OPTIONS)
    raw_options = data.get("options") or {}
    if not isinstance(raw_options, dict):
        raise ProblemFileError(f"{path}.options", "expected an object")
    for key, value in raw_options.items():
        if key not in options:
            raise ProblemFileError(f"{path}.options.{key}", "unknown option")
        options[key] = value
    return ProblemInput(e, m, H, G, options)


def problem_to_json(entry, convention: str = UNIT) -> dict:
    """Problem-file form of a catalog entry (round-trips through parse_problem)."""
    out = {
        "version": 1,
        "name": entry.name,
        "summary": entry.summary,
        "endomorphism": {"N": entry.e.N},
        "multiplicity": multiplicity_to_json(entry.m, convention=UNIT),
        "filters": {"H": filter_to_json(entry.H)},
    }
    if entry.G is not None:
        out["filters"]["G"] = filter_to_json(entry.G)
    return out


# ---- deterministic dumping -----------------------------------------------------


def _prepare(obj):
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, TorusSet):
        return torus_set_to_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return _FloatLiteral(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": _FloatLiteral(obj.real), "im": _FloatLiteral(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_prepare(v) for v in obj.tolist()]
    return obj


class _FloatLiteral:
    def __init__(self, value: float):
        self.value = value


def _render(obj, indent: int, out: list):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(f'{pad}  {json.dumps(str(key))}: ')
            _render(value, indent + 1, out)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad + "  ")
            _render(value, indent + 1, out)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, _FloatLiteral):
        text = format(obj.value, ".17g")
        if text in ("inf", "-inf", "nan"):
            text = json.dumps(text)
        out.append(text)
    elif isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        out.append(json.dumps(obj))
    else:
        out.append(json.dumps(str(obj)))


def dump_json(obj) -> str:
    """Deterministic JSON: fixed key order, floats at 17 significant digits."""
    out: list[str] = []
    _render(_prepare(obj), 0, out)
    return "".join(out)

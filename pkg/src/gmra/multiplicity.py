"""Multiplicity functions on the circle and the consistency machinery.

A multiplicity function is a piecewise-constant map into the nonnegative
integers with rational breakpoints.  The central identity is the fold over
dilation preimages: consistency demands

    m(w) <= sum over the N preimages z of w of m(z),

and the complementary multiplicity is the (nonnegative) difference.
All computations refine partitions exactly; nothing is sampled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyViolated
from .torus import ONE, ZERO, TorusEndomorphism, TorusSet, mod1


def _normalize_pieces(raw):
    flat: list[tuple[Fraction, Fraction, int]] = []
    for lo, hi, value in raw:
        value = int(value)
        if value < 0:
            raise ValueError("multiplicity values must be nonnegative")
        if value == 0:
            continue
        for a, b in TorusSet.interval(lo, hi).intervals:
            flat.append((a, b, value))
    flat.sort()
    for prev, cur in zip(flat, flat[1:]):
        if cur[0] < prev[1]:
            raise ValueError("multiplicity pieces overlap")
    merged: list[list] = []
    for lo, hi, value in flat:
        if merged and merged[-1][1] == lo and merged[-1][2] == value:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi, value])
    return tuple((lo, hi, v) for lo, hi, v in merged)


@dataclass(frozen=True)
class MultiplicityFunction:
    """Piecewise-constant nonnegative-integer function, 0 off its pieces."""

    pieces: tuple[tuple[Fraction, Fraction, int], ...] = ()

    @staticmethod
    def from_pieces(raw) -> "MultiplicityFunction":
        """Build from (lo, hi, value) triples; intervals may wrap."""
        return MultiplicityFunction(_normalize_pieces(raw))

    @staticmethod
    def constant(value: int) -> "MultiplicityFunction":
        if value == 0:
            return MultiplicityFunction()
        return MultiplicityFunction(((ZERO, ONE, int(value)),))

    def value_at(self, x) -> int:
        x = mod1(x)
        for lo, hi, value in self.pieces:
            if lo <= x < hi:
                return value
        return 0

    def max_value(self) -> int:
        return max((v for _, _, v in self.pieces), default=0)

    def support(self) -> TorusSet:
        return TorusSet.from_intervals((lo, hi) for lo, hi, _ in self.pieces)

    def integral(self) -> Fraction:
        return sum(((hi - lo) * v for lo, hi, v in self.pieces), Fraction(0))

    def breakpoints(self) -> list[Fraction]:
        points = {ZERO}
        for lo, hi, _ in self.pieces:
            points.add(lo)
            if hi < 1:
                points.add(hi)
        return sorted(points)

    def __str__(self) -> str:
        if not self.pieces:
            return "0"
        return ", ".join(f"{v} on [{lo},{hi})" for lo, hi, v in self.pieces)


def _refined_cells(breakpoints: list[Fraction]):
    pts = sorted(set(breakpoints) | {ZERO})
    for a, b in zip(pts, pts[1:] + [ONE]):
        if a < b:
            yield a, b


def folded_sum(m: MultiplicityFunction, e: TorusEndomorphism) -> MultiplicityFunction:
    """w -> sum of m over the N preimages of w, exactly.

    Breakpoints of the fold are the images N*b (mod 1) of breakpoints of m;
    on each refined cell every branch is constant, so a midpoint evaluation
    is exact.
    """
    points = {mod1(b * e.N) for b in m.breakpoints()}
    out = []
    for a, b in _refined_cells(sorted(points)):
        mid = (a + b) / 2
        total = sum(m.value_at(z) for z in e.preimages(mid))
        out.append((a, b, total))
    return MultiplicityFunction.from_pieces(out)


@dataclass(frozen=True)
class ConsistencyReport:
    holds: bool
    violation: TorusSet


def check_consistency(m: MultiplicityFunction, e: TorusEndomorphism) -> ConsistencyReport:
    """Exact set where the preimage sum falls below m (empty iff consistent)."""
    fold = folded_sum(m, e)
    points = set(m.breakpoints()) | set(fold.breakpoints())
    bad = []
    for a, b in _refined_cells(sorted(points)):
        mid = (a + b) / 2
        if fold.value_at(mid) < m.value_at(mid):
            bad.append((a, b))
    violation = TorusSet.from_intervals(bad)
    return ConsistencyReport(holds=not violation, violation=violation)


def compute_mtilde(m: MultiplicityFunction, e: TorusEndomorphism) -> MultiplicityFunction:
    """Complementary multiplicity: fold(m) - m, defined when consistency holds."""
    report = check_consistency(m, e)
    if not report.holds:
        raise ConsistencyViolated(
            f"consistency inequality fails on {report.violation}", report.violation
        )
    fold = folded_sum(m, e)
    points = set(m.breakpoints()) | set(fold.breakpoints())
    out = []
    for a, b in _refined_cells(sorted(points)):
        mid = (a + b) / 2
        out.append((a, b, fold.value_at(mid) - m.value_at(mid)))
    return MultiplicityFunction.from_pieces(out)


def sigma_sets(m: MultiplicityFunction) -> list[TorusSet]:
    """Nested superlevel sets {m >= i} for i = 1 .. max(m)."""
    return [
        TorusSet.from_intervals((lo, hi) for lo, hi, v in m.pieces if v >= i)
        for i in range(1, m.max_value() + 1)
    ]


def sigma_tilde_sets(m: MultiplicityFunction, e: TorusEndomorphism) -> list[TorusSet]:
    """Superlevel sets of the complementary multiplicity."""
    return sigma_sets(compute_mtilde(m, e))


def strict_set(m: MultiplicityFunction, e: TorusEndomorphism) -> TorusSet:
    """Where the consistency inequality is strict; positive measure if m != 0."""
    return compute_mtilde(m, e).support()

"""Exact arithmetic on the circle [0, 1).

Points are rationals reduced mod 1, sets are finite unions of half-open
intervals with rational endpoints, and the dilation w -> N*w (mod 1) comes
with its kernel, cross-section and branch partition.  Everything here is
exact -- no floats -- so set identities can be asserted with ``==``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

ZERO = Fraction(0)
ONE = Fraction(1)


def mod1(x) -> Fraction:
    """Reduce a rational to the fundamental domain [0, 1)."""
    return Fraction(x) % 1


def _normalize_segments(raw) -> tuple[tuple[Fraction, Fraction], ...]:
    # Wrap every (lo, hi) pair into [0, 1] segments, then sweep-merge.
    # Pairs are read as [lo, hi) mod 1: hi <= lo wraps around (so
    # (3/4, 1/4) means [3/4,1) u [0,1/4)) and hi = lo is empty.
    segments: list[list[Fraction]] = []
    for lo, hi in raw:
        lo, hi = Fraction(lo), Fraction(hi)
        length = hi - lo
        if length <= 0:
            length = length % 1
            if length == 0:
                continue
        if length >= 1:
            return ((ZERO, ONE),)
        start = mod1(lo)
        end = start + length
        if end <= 1:
            segments.append([start, end])
        else:
            segments.append([start, ONE])
            segments.append([ZERO, end - 1])
    segments.sort()
    merged: list[list[Fraction]] = []
    for seg in segments:
        if merged and seg[0] <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], seg[1])
        else:
            merged.append(seg)
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class TorusSet:
    """Finite union of half-open intervals [lo, hi) on the circle.

    Canonical form: intervals sorted, pairwise disjoint, adjacent pieces
    merged, endpoints in [0, 1].  Two sets are equal (as a.e. classes of
    interval unions) iff their canonical forms compare equal.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @staticmethod
    def from_intervals(pairs: Iterable) -> "TorusSet":
        """Build from (lo, hi) pairs; endpoints may be any rationals."""
        return TorusSet(_normalize_segments(pairs))

    @staticmethod
    def interval(lo, hi) -> "TorusSet":
        return TorusSet.from_intervals([(lo, hi)])

    @staticmethod
    def full() -> "TorusSet":
        return TorusSet(((ZERO, ONE),))

    @staticmethod
    def empty() -> "TorusSet":
        return TorusSet(())

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    def contains(self, x) -> bool:
        x = mod1(x)
        return any(lo <= x < hi for lo, hi in self.intervals)

    def union(self, other: "TorusSet") -> "TorusSet":
        return TorusSet(_normalize_segments(self.intervals + other.intervals))

    def complement(self) -> "TorusSet":
        gaps = []
        cursor = ZERO
        for lo, hi in self.intervals:
            if cursor < lo:
                gaps.append((cursor, lo))
            cursor = hi
        if cursor < ONE:
            gaps.append((cursor, ONE))
        return TorusSet(tuple(gaps))

    def intersect(self, other: "TorusSet") -> "TorusSet":
        return self.complement().union(other.complement()).complement()

    def difference(self, other: "TorusSet") -> "TorusSet":
        return self.intersect(other.complement())

    def is_subset(self, other: "TorusSet") -> bool:
        return self.intersect(other) == self

    def breakpoints(self) -> list[Fraction]:
        points = {ZERO}
        for lo, hi in self.intervals:
            points.add(lo)
            if hi < 1:
                points.add(hi)
        return sorted(points)

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " u ".join(f"[{lo},{hi})" for lo, hi in self.intervals)


@dataclass(frozen=True)
class TorusEndomorphism:
    """The map w -> N*w (mod 1) for an integer N >= 2.

    N is the index of the sublattice downstairs, equivalently the size of
    the kernel {k/N}.
    """

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("dilation factor must be an integer >= 2")

    def kernel(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(k, self.N) for k in range(self.N))

    def image(self, x) -> Fraction:
        return mod1(Fraction(x) * self.N)

    def preimages(self, x) -> list[Fraction]:
        """The N points mapping to x, ascending: (x + k)/N for 0 <= k < N."""
        x = mod1(x)
        return [(x + k) / self.N for k in range(self.N)]

    def preimage_set(self, s: TorusSet) -> TorusSet:
        branches = []
        for lo, hi in s.intervals:
            for k in range(self.N):
                branches.append(((lo + k) / self.N, (hi + k) / self.N))
        return TorusSet.from_intervals(branches)

    def image_set(self, s: TorusSet) -> TorusSet:
        # Split at multiples of 1/N so each piece maps without wrapping.
        out = []
        cuts = [Fraction(k, self.N) for k in range(self.N + 1)]
        for lo, hi in s.intervals:
            for k in range(self.N):
                a, b = max(lo, cuts[k]), min(hi, cuts[k + 1])
                if a < b:
                    out.append((a * self.N - k, b * self.N - k))
        return TorusSet.from_intervals(out)

    def cross_section(self, x) -> Fraction:
        """The distinguished preimage in [0, 1/N)."""
        return mod1(x) / self.N

    def tau(self, x) -> Fraction:
        """Kernel element carrying x onto the cross-section sheet.

        tau(x) = c(N*x) - x (mod 1); constant k -> (N-k)/N mod 1 on each
        branch interval [k/N, (k+1)/N).
        """
        return mod1(self.cross_section(self.image(x)) - mod1(x))

    def tau_partition(self, s: TorusSet) -> list[tuple[Fraction, TorusSet]]:
        """Split s into the branch pieces on which the map is injective.

        Returns (zeta, piece) pairs with piece = {x in s : tau(x) = zeta},
        empty pieces dropped.  The pieces are disjoint and union back to s.
        """
        out = []
        for k in range(self.N):
            sheet = TorusSet.interval(Fraction(k, self.N), Fraction(k + 1, self.N))
            piece = s.intersect(sheet)
            if piece:
                zeta = Fraction((self.N - k) % self.N, self.N)
                out.append((zeta, piece))
        return out

    def cycles(self, q_max: int) -> list[tuple[Fraction, ...]]:
        """All periodic orbits among rationals p/q with q <= q_max, gcd(q, N)=1.

        Each orbit is listed once, rotated to start at its smallest point;
        orbits are sorted by that starting point.
        """
        if q_max < 1:
            raise ValueError("q_max must be >= 1")
        seen: set[Fraction] = set()
        orbits = []
        for q in range(1, q_max + 1):
            if math.gcd(q, self.N) != 1:
                continue
            for p in range(q):
                if q > 1 and math.gcd(p, q) != 1:
                    continue
                x = Fraction(p, q)
                if x in seen:
                    continue
                orbit = [x]
                y = self.image(x)
                while y != x:
                    orbit.append(y)
                    y = self.image(y)
                seen.update(orbit)
                i = orbit.index(min(orbit))
                orbits.append(tuple(orbit[i:] + orbit[:i]))
        orbits.sort(key=lambda orb: orb[0])
        return orbits

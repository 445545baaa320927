"""Piecewise trigonometric polynomials on the circle.

Values are finite sums  sum_j c_j * e^(2*pi*i*nu_j*w)  on each piece of a
rational-breakpoint partition.  Frequencies are rationals (not just
integers): substituting a dilation branch z = (w + k)/N divides every
frequency by N, so rational frequencies make the class closed under the
preimage fold that drives all filter identities.  Breakpoints stay exact;
coefficients are complex floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .torus import ONE, ZERO, TorusEndomorphism, TorusSet, mod1

_QUARTER = Fraction(1, 4)


def unit_phase(q) -> complex:
    """e^(2*pi*i*q) for rational q, exact at quarter turns."""
    q = mod1(Fraction(q))
    if q.denominator == 1:
        return complex(1.0)
    if q.denominator == 2:
        return complex(-1.0)
    if q.denominator == 4:
        return 1j if q == _QUARTER else -1j
    t = math.tau * float(q)
    return complex(math.cos(t), math.sin(t))


Terms = tuple[tuple[Fraction, complex], ...]


def _merge_terms(pairs) -> Terms:
    # keyed by (num, den) -- int-tuple hashing is much cheaper than Fraction
    acc: dict[tuple[int, int], list] = {}
    for nu, c in pairs:
        if type(nu) is not Fraction:
            nu = Fraction(nu)
        if type(c) is not complex:
            c = complex(c)
        key = (nu.numerator, nu.denominator)
        slot = acc.get(key)
        if slot is None:
            acc[key] = [nu, c]
        else:
            slot[1] += c
    out = [(nu, c) for nu, c in acc.values() if c != 0]
    out.sort(key=lambda term: term[0])
    return tuple(out)


def _coalesce(pieces):
    pieces = sorted(pieces)
    if not pieces:
        raise ValueError("a trig poly needs at least one piece")
    if pieces[0][0] != ZERO or pieces[-1][1] != ONE:
        raise ValueError("pieces must cover [0, 1)")
    merged = [list(pieces[0])]
    for lo, hi, terms in pieces[1:]:
        if lo != merged[-1][1]:
            raise ValueError("pieces must tile [0, 1) with no gaps or overlaps")
        if terms == merged[-1][2]:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi, terms])
    return tuple((lo, hi, terms) for lo, hi, terms in merged)


@dataclass(frozen=True)
class TrigPoly:
    """A piecewise trig polynomial in canonical form.

    Pieces tile [0, 1); per piece, terms are sorted by frequency with exact
    zeros dropped, and adjacent pieces with identical terms are merged.
    """

    pieces: tuple[tuple[Fraction, Fraction, Terms], ...]

    @staticmethod
    def from_pieces(raw) -> "TrigPoly":
        """Build from (lo, hi, terms) with lo/hi in [0, 1]; gaps filled with 0."""
        cleaned = []
        for lo, hi, terms in raw:
            lo, hi = Fraction(lo), Fraction(hi)
            if lo < hi:
                cleaned.append((lo, hi, _merge_terms(terms)))
        cleaned.sort()
        filled = []
        cursor = ZERO
        for lo, hi, terms in cleaned:
            if lo > cursor:
                filled.append((cursor, lo, ()))
            elif lo < cursor:
                raise ValueError("pieces overlap")
            filled.append((lo, hi, terms))
            cursor = hi
        if cursor < ONE:
            filled.append((cursor, ONE, ()))
        return TrigPoly(_coalesce(filled))

    @staticmethod
    def zero() -> "TrigPoly":
        return TrigPoly(((ZERO, ONE, ()),))

    @staticmethod
    def constant(c) -> "TrigPoly":
        return TrigPoly(((ZERO, ONE, _merge_terms([(ZERO, c)])),))

    @staticmethod
    def exponential(freq, coef=1.0) -> "TrigPoly":
        """coef * e^(2*pi*i*freq*w) on the whole circle."""
        return TrigPoly(((ZERO, ONE, _merge_terms([(Fraction(freq), coef)])),))

    @staticmethod
    def indicator(ts: TorusSet, coef=1.0) -> "TrigPoly":
        return TrigPoly.from_pieces(
            (lo, hi, [(ZERO, coef)]) for lo, hi in ts.intervals
        )

    # ---- algebra ---------------------------------------------------------

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = [
            (lo, hi, _merge_terms(ta + tb))
            for lo, hi, ta, tb in _refine(self, other)
        ]
        return TrigPoly(_coalesce(out))

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (other * -1)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            out = []
            for lo, hi, ta, tb in _refine(self, other):
                prod = [(na + nb, ca * cb) for na, ca in ta for nb, cb in tb]
                out.append((lo, hi, _merge_terms(prod)))
            return TrigPoly(_coalesce(out))
        c = complex(other)
        return TrigPoly(
            _coalesce(
                (lo, hi, _merge_terms((nu, co * c) for nu, co in terms))
                for lo, hi, terms in self.pieces
            )
        )

    __rmul__ = __mul__

    def conj(self) -> "TrigPoly":
        return TrigPoly(
            _coalesce(
                (lo, hi, _merge_terms((-nu, c.conjugate()) for nu, c in terms))
                for lo, hi, terms in self.pieces
            )
        )

    def restrict(self, ts: TorusSet) -> "TrigPoly":
        """Zero the function outside ts (exact piece surgery)."""
        mask = TrigPoly.indicator(ts)
        out = [
            (lo, hi, ta if tb else ())
            for lo, hi, ta, tb in _refine(self, mask)
        ]
        return TrigPoly(_coalesce(out))

    # ---- evaluation ------------------------------------------------------

    def evaluate(self, x) -> complex:
        """Exact-point evaluation (half-open rule at breakpoints)."""
        x = mod1(Fraction(x))
        for lo, hi, terms in self.pieces:
            if lo <= x < hi:
                return sum((c * unit_phase(nu * x) for nu, c in terms), 0j)
        raise AssertionError("canonical pieces cover [0,1)")

    def sample(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation at real points (reduced mod 1)."""
        xs = np.asarray(xs, dtype=float) % 1.0
        out = np.zeros(xs.shape, dtype=complex)
        for lo, hi, terms in self.pieces:
            mask = (xs >= float(lo)) & (xs < float(hi))
            if not mask.any():
                continue
            acc = np.zeros(mask.sum(), dtype=complex)
            for nu, c in terms:
                acc += c * np.exp(2j * math.pi * float(nu) * xs[mask])
            out[mask] = acc
        return out

    # ---- structure -------------------------------------------------------

    def support(self) -> TorusSet:
        """Union of pieces carrying a nonzero polynomial.

        A nonzero trig polynomial vanishes only on a null set, so this is
        the a.e. support.
        """
        return TorusSet.from_intervals(
            (lo, hi) for lo, hi, terms in self.pieces if terms
        )

    def is_zero(self) -> bool:
        return all(not terms for _, _, terms in self.pieces)

    def sup_bound(self) -> float:
        """Upper bound for the sup norm: max over pieces of sum |coef|."""
        return max(
            (sum(abs(c) for _, c in terms) for _, _, terms in self.pieces),
            default=0.0,
        )

    def deviation_from(self, other: "TrigPoly") -> float:
        return (self - other).sup_bound()

    def equal_within(self, other: "TrigPoly", tol: float) -> bool:
        return self.deviation_from(other) <= tol

    def piece_lipschitz(self, terms: Terms) -> float:
        return sum(abs(c) * math.tau * abs(float(nu)) for nu, c in terms)

    def constant_value(self, tol: float):
        """The constant this function equals everywhere, or None."""
        dev = 0.0
        value = None
        for _, _, terms in self.pieces:
            c0 = 0j
            for nu, c in terms:
                if nu == 0:
                    c0 = c
                else:
                    dev += abs(c)
            if value is None:
                value = c0
            else:
                dev += abs(c0 - value)
        if value is not None and dev <= tol:
            return value
        return None

    def frequencies(self) -> set[Fraction]:
        out: set[Fraction] = set()
        for _, _, terms in self.pieces:
            out.update(nu for nu, _ in terms)
        return out

    def shift_frequencies(self, gamma) -> "TrigPoly":
        """Multiply by e^(2*pi*i*gamma*w): shift every frequency by gamma."""
        gamma = Fraction(gamma)
        return TrigPoly(
            _coalesce(
                (lo, hi, _merge_terms((nu + gamma, c) for nu, c in terms))
                for lo, hi, terms in self.pieces
            )
        )

    def __str__(self) -> str:
        def fmt_terms(terms):
            if not terms:
                return "0"
            return " + ".join(f"({c:.4g})e[{nu}]" for nu, c in terms)

        return "; ".join(
            f"[{lo},{hi}): {fmt_terms(terms)}" for lo, hi, terms in self.pieces
        )


def _refine(f: TrigPoly, g: TrigPoly):
    """Walk both partitions, yielding (lo, hi, f_terms, g_terms) cells."""
    points = sorted(
        {p for lo, hi, _ in f.pieces for p in (lo, hi)}
        | {p for lo, hi, _ in g.pieces for p in (lo, hi)}
    )
    fi = gi = 0
    for a, b in zip(points, points[1:]):
        while f.pieces[fi][1] <= a:
            fi += 1
        while g.pieces[gi][1] <= a:
            gi += 1
        yield a, b, f.pieces[fi][2], g.pieces[gi][2]


# ---- dilation branch maps ------------------------------------------------


def dilate_branch(p: TrigPoly, e: TorusEndomorphism, k: int) -> TrigPoly:
    """Substitute z = (w + k)/N: branch k of p stretched across the circle.

    A term c*e^(2*pi*i*nu*z) becomes frequency nu/N with the rational phase
    e^(2*pi*i*nu*k/N) folded into the coefficient.
    """
    lo_b, hi_b = Fraction(k, e.N), Fraction(k + 1, e.N)
    out = []
    for lo, hi, terms in p.pieces:
        a, b = max(lo, lo_b), min(hi, hi_b)
        if a >= b:
            continue
        new_terms = [
            (nu / e.N, c * unit_phase(nu * Fraction(k, e.N))) for nu, c in terms
        ]
        out.append((a * e.N - k, b * e.N - k, new_terms))
    return TrigPoly.from_pieces(out)


def compress_branch(g: TrigPoly, e: TorusEndomorphism, k: int) -> TrigPoly:
    """Inverse of dilate_branch: g(N*w - k) on branch [k/N, (k+1)/N), 0 elsewhere."""
    out = []
    for lo, hi, terms in g.pieces:
        new_terms = [(nu * e.N, c * unit_phase(-nu * k)) for nu, c in terms]
        out.append(((lo + k) / e.N, (hi + k) / e.N, new_terms))
    return TrigPoly.from_pieces(out)


def compose_endomorphism(f: TrigPoly, e: TorusEndomorphism) -> TrigPoly:
    """f(N*w mod 1) as a trig poly (all N branches of compress_branch)."""
    out = []
    for k in range(e.N):
        for lo, hi, terms in f.pieces:
            new_terms = [(nu * e.N, c * unit_phase(-nu * k)) for nu, c in terms]
            out.append(((lo + k) / e.N, (hi + k) / e.N, new_terms))
    return TrigPoly.from_pieces(out)


def fold(e: TorusEndomorphism, f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """Preimage transfer sum  w -> sum_{N*z = w (mod 1)} f(z) * conj(g(z)).

    This is the left side of every filter identity.  The result is exact in
    the class: each branch contributes frequencies nu/N and pieces rescaled
    by N.
    """
    p = f * g.conj()
    total = TrigPoly.zero()
    for k in range(e.N):
        total = total + dilate_branch(p, e, k)
    return total


# ---- integration ---------------------------------------------------------


def integrate(f: TrigPoly) -> complex:
    """Closed-form integral over the circle.

    Per piece, int_a^b e^(2*pi*i*nu*w) dw = (e^(2*pi*i*nu*b) - e^(2*pi*i*nu*a))
    / (2*pi*i*nu), and the length b - a for nu = 0.
    """
    total = 0j
    for lo, hi, terms in f.pieces:
        for nu, c in terms:
            if nu == 0:
                total += c * (float(hi) - float(lo))
            else:
                total += (
                    c
                    * (unit_phase(nu * hi) - unit_phase(nu * lo))
                    / (2j * math.pi * float(nu))
                )
    return total


def inner(f: TrigPoly, g: TrigPoly) -> complex:
    return integrate(f * g.conj())


def norm(f: TrigPoly) -> float:
    return math.sqrt(max(inner(f, f).real, 0.0))

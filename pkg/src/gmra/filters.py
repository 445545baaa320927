"""Matrix filters and their verification.

A filter is a matrix of piecewise trig polynomials tied to a multiplicity
function m and dilation factor N.  Column j must be supported in sigma_j,
row i must vanish outside the preimage of the i-th row-multiplicity level
set, and the preimage fold of row pairs must reproduce N * delta * chi.
Support and block constraints are checked exactly as set inclusions; the
analytic identities are checked to a residual tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import CompletionFailed, ContextMismatch, NotUnitary
from .multiplicity import MultiplicityFunction, compute_mtilde, sigma_sets
from .torus import TorusEndomorphism, TorusSet
from .trigpoly import TrigPoly, compose_endomorphism, fold

DEFAULT_TOL = 1e-9


@dataclass
class VerificationReport:
    """Outcome of an identity suite: residuals plus exact-check violations."""

    passed: bool
    max_residual: float
    tolerance: float
    identities: dict[str, float] = field(default_factory=dict)
    violations: tuple[str, ...] = ()

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(
            passed=self.passed and other.passed,
            max_residual=max(self.max_residual, other.max_residual),
            tolerance=self.tolerance,
            identities={**self.identities, **other.identities},
            violations=self.violations + other.violations,
        )


@dataclass(frozen=True)
class FilterMatrix:
    """Matrix of trig-poly entries with its (m, N) context.

    ``rows_follow`` says which multiplicity indexes the rows: "m" for a
    low-pass filter, "mtilde" for a complementary one.  Columns always
    follow m.
    """

    entries: tuple[tuple[TrigPoly, ...], ...]
    m: MultiplicityFunction
    e: TorusEndomorphism
    rows_follow: str = "m"

    def __post_init__(self):
        if self.rows_follow not in ("m", "mtilde"):
            raise ValueError("rows_follow must be 'm' or 'mtilde'")
        widths = {len(row) for row in self.entries}
        if len(widths) > 1:
            raise ValueError("ragged filter matrix")

    @staticmethod
    def from_rows(rows, m, e, rows_follow="m") -> "FilterMatrix":
        return FilterMatrix(
            tuple(tuple(row) for row in rows), m, e, rows_follow
        )

    @staticmethod
    def scalar(h: TrigPoly, m, e, rows_follow="m") -> "FilterMatrix":
        return FilterMatrix(((h,),), m, e, rows_follow)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @cached_property
    def row_multiplicity(self) -> MultiplicityFunction:
        if self.rows_follow == "m":
            return self.m
        return compute_mtilde(self.m, self.e)

    @cached_property
    def column_sets(self) -> list[TorusSet]:
        return sigma_sets(self.m)

    @cached_property
    def row_sets(self) -> list[TorusSet]:
        return sigma_sets(self.row_multiplicity)

    def entry(self, i: int, j: int) -> TrigPoly:
        return self.entries[i][j]

    def value_at(self, x) -> np.ndarray:
        """Dense complex matrix of entry values at a rational point."""
        return np.array(
            [[h.evaluate(x) for h in row] for row in self.entries],
            dtype=complex,
        )

    def is_scalar(self) -> bool:
        return self.rows == 1 and self.cols == 1

    def conj_transpose_value_at(self, x) -> np.ndarray:
        return self.value_at(x).conj().T


def same_context(a: FilterMatrix, b: FilterMatrix) -> bool:
    return a.m == b.m and a.e == b.e


def _check_dims(F: FilterMatrix):
    need_cols = len(F.column_sets)
    need_rows = len(F.row_sets)
    if F.cols < need_cols or F.rows < need_rows:
        raise ContextMismatch(
            f"matrix is {F.rows}x{F.cols} but multiplicities require at least "
            f"{need_rows}x{need_cols}"
        )


def _structure_violations(F: FilterMatrix) -> tuple[str, ...]:
    """Exact support and block constraints, as canonical set inclusions."""
    out = []
    col_sets = F.column_sets
    row_sets = F.row_sets
    for i, row in enumerate(F.entries):
        row_ok = (
            F.e.preimage_set(row_sets[i]) if i < len(row_sets) else TorusSet.empty()
        )
        for j, h in enumerate(row):
            supp = h.support()
            if not supp:
                continue
            col_ok = col_sets[j] if j < len(col_sets) else TorusSet.empty()
            if not supp.is_subset(col_ok):
                out.append(
                    f"entry ({i + 1},{j + 1}) leaks outside column support "
                    f"{col_ok}: support {supp}"
                )
            if not supp.is_subset(row_ok):
                out.append(
                    f"entry ({i + 1},{j + 1}) leaks outside row block "
                    f"{row_ok}: support {supp}"
                )
    return tuple(out)


def _pair_residual(F: FilterMatrix, G: FilterMatrix, i: int, k: int, target: TrigPoly) -> float:
    total = TrigPoly.zero()
    for j in range(max(F.cols, G.cols)):
        fj = F.entry(i, j) if j < F.cols else TrigPoly.zero()
        gj = G.entry(k, j) if j < G.cols else TrigPoly.zero()
        if fj.is_zero() or gj.is_zero():
            continue
        total = total + fold(F.e, fj, gj)
    return total.deviation_from(target)


def verify_filter(H: FilterMatrix, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check the orthogonality identities and support structure of H.

    Row pairs (i, i') must fold to N * delta_{i,i'} * chi on the i-th row
    level set.  Residuals are sup-norm bounds over the refined partition.
    """
    _check_dims(H)
    violations = _structure_violations(H)
    identities = {}
    N = H.e.N
    row_sets = H.row_sets
    for i in range(H.rows):
        for k in range(i, H.rows):
            if i == k and i < len(row_sets):
                target = TrigPoly.indicator(row_sets[i], float(N))
            else:
                target = TrigPoly.zero()
            identities[f"rows({i + 1},{k + 1})"] = _pair_residual(H, H, i, k, target)
    max_residual = max(identities.values(), default=0.0)
    return VerificationReport(
        passed=not violations and max_residual <= tol,
        max_residual=max_residual,
        tolerance=tol,
        identities=identities,
        violations=violations,
    )


def verify_complementary(
    G: FilterMatrix, H: FilterMatrix, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """Check that G completes H: G-G orthogonality plus vanishing G-H cross folds."""
    if not same_context(G, H):
        raise ContextMismatch("G and H must share the same multiplicity and dilation")
    if G.rows_follow != "mtilde" or H.rows_follow != "m":
        raise ContextMismatch("expected H rows indexed by m and G rows by mtilde")
    _check_dims(G)
    violations = _structure_violations(G)
    identities = {}
    N = G.e.N
    row_sets = G.row_sets
    for k in range(G.rows):
        for l in range(k, G.rows):
            if k == l and k < len(row_sets):
                target = TrigPoly.indicator(row_sets[k], float(N))
            else:
                target = TrigPoly.zero()
            identities[f"gg({k + 1},{l + 1})"] = _pair_residual(G, G, k, l, target)
    zero = TrigPoly.zero()
    for k in range(G.rows):
        for i in range(H.rows):
            identities[f"gh({k + 1},{i + 1})"] = _pair_residual(G, H, k, i, zero)
    max_residual = max(identities.values(), default=0.0)
    return VerificationReport(
        passed=not violations and max_residual <= tol,
        max_residual=max_residual,
        tolerance=tol,
        identities=identities,
        violations=violations,
    )


# ---- conjugation by a unitary multiplier -----------------------------------


def check_block_unitary(A: FilterMatrix, grid: int = 128) -> float:
    """Max pointwise deviation of A from block-unitary form on a grid.

    At each grid point the upper-left m(w) x m(w) block must be unitary and
    everything outside it zero.
    """
    worst = 0.0
    size = max(A.rows, A.cols)
    for t in range(grid):
        x = Fraction(t, grid)
        r = A.m.value_at(x)
        val = np.zeros((size, size), dtype=complex)
        val[: A.rows, : A.cols] = A.value_at(x)
        block = val[:r, :r]
        if r:
            worst = max(
                worst,
                float(np.abs(block @ block.conj().T - np.eye(r)).max()),
            )
        outside = val.copy()
        outside[:r, :r] = 0
        if outside.size:
            worst = max(worst, float(np.abs(outside).max()))
    return worst


def conjugate_filter(
    H: FilterMatrix, A: FilterMatrix, tol: float = DEFAULT_TOL, grid: int = 128
) -> FilterMatrix:
    """The conjugated filter  w -> A(N*w) H(w) A*(w), exact in the class.

    A must be a block-unitary multiplier for the same m; filterhood is
    preserved, which verify_filter on the result confirms.
    """
    if not same_context(A, H):
        raise ContextMismatch("multiplier and filter contexts differ")
    dev = check_block_unitary(A, grid=grid)
    if dev > max(tol, 1e-7):
        raise NotUnitary(f"multiplier fails block unitarity by {dev:.3g}")
    size = max(A.rows, A.cols, H.rows, H.cols)

    def pad(F):
        z = TrigPoly.zero()
        return [
            [F.entry(i, j) if i < F.rows and j < F.cols else z for j in range(size)]
            for i in range(size)
        ]

    a = pad(A)
    h = pad(H)
    a_up = [[compose_endomorphism(entry, H.e) for entry in row] for row in a]
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = TrigPoly.zero()
            for p in range(size):
                if a_up[i][p].is_zero():
                    continue
                for q in range(size):
                    if h[p][q].is_zero() or a[j][q].is_zero():
                        continue
                    acc = acc + a_up[i][p] * h[p][q] * a[j][q].conj()
            row.append(acc)
        out.append(tuple(row))
    return FilterMatrix(tuple(out), H.m, H.e, H.rows_follow)


def identity_multiplier(m: MultiplicityFunction, e: TorusEndomorphism) -> FilterMatrix:
    """The multiplier that is the identity on every m(w)-block."""
    sets = sigma_sets(m)
    size = max(len(sets), 1)
    z = TrigPoly.zero()
    rows = []
    for i in range(size):
        rows.append(
            tuple(
                TrigPoly.indicator(sets[i]) if i == j and i < len(sets) else z
                for j in range(size)
            )
        )
    return FilterMatrix(tuple(rows), m, e, "m")


# ---- numeric complement -----------------------------------------------------


@dataclass(frozen=True)
class GridFilterMatrix:
    """Filter sampled on the uniform grid s/(grid); no exact support queries.

    Row r, column j of ``samples`` holds the value at every grid point.
    Produced by ``complement_numeric``; supports grid verification and
    grid-sampled Ruelle application.
    """

    grid: int
    samples: np.ndarray  # shape (rows, cols, grid)
    m: MultiplicityFunction
    e: TorusEndomorphism
    rows_follow: str = "mtilde"

    @property
    def rows(self) -> int:
        return self.samples.shape[0]

    @property
    def cols(self) -> int:
        return self.samples.shape[1]


def complement_numeric(
    H: FilterMatrix,
    grid: int = 256,
    tol: float = DEFAULT_TOL,
    pivot_tol: float = 1e-8,
) -> tuple[GridFilterMatrix, VerificationReport]:
    """Complete H to a complementary filter, pointwise on a quotient grid.

    At each of the ``grid`` quotient points w the rows of H, read across the
    N preimages and scaled by 1/sqrt(N), form an orthonormal family of size
    m(w) inside the coordinates (j, k) allowed by the column supports.  The
    canonical basis is Gram-Schmidt-ed against that family (pivot = lowest
    index whose residual norm exceeds pivot_tol) until mtilde(w) extra rows
    are found; the complementary samples are the completions scaled back by
    sqrt(N).
    """
    _check_dims(H)
    N = H.e.N
    m = H.m
    mtilde = compute_mtilde(m, H.e)
    cols = H.cols
    g_rows = max(mtilde.max_value(), 1)
    fine = N * grid
    samples = np.zeros((g_rows, cols, fine), dtype=complex)
    sqrt_n = math.sqrt(N)
    max_gg = 0.0
    max_gh = 0.0
    for t in range(grid):
        w = Fraction(t, grid)
        zs = H.e.preimages(w)
        mt = mtilde.value_at(w)
        mw = m.value_at(w)
        coords = [
            (j, k)
            for j in range(cols)
            for k in range(N)
            if m.value_at(zs[k]) >= j + 1
        ]
        dim = len(coords)
        if dim != mw + mt:
            raise CompletionFailed(
                f"coordinate count {dim} at w={w} disagrees with m + mtilde = {mw + mt}"
            )
        h_rows = np.array(
            [
                [H.entry(i, j).evaluate(zs[k]) / sqrt_n for (j, k) in coords]
                for i in range(mw)
            ],
            dtype=complex,
        ).reshape(mw, dim)
        chosen: list[np.ndarray] = []
        for d in range(dim):
            if len(chosen) == mt:
                break
            u = np.zeros(dim, dtype=complex)
            u[d] = 1.0
            for _ in range(2):  # twice for numerical stability
                for v in list(h_rows) + chosen:
                    u = u - (v.conj() @ u) * v
            nu = float(np.linalg.norm(u))
            if nu > pivot_tol:
                chosen.append(u / nu)
        if len(chosen) < mt:
            raise CompletionFailed(
                f"completion degenerated at w={w}: found {len(chosen)} of {mt} rows"
            )
        for r, u in enumerate(chosen):
            for (j, k), value in zip(coords, u):
                samples[r, j, t + k * grid] = value * sqrt_n
        # residuals of the defining identities at this quotient point
        for r in range(mt):
            for r2 in range(r, mt):
                acc = sum(
                    samples[r, j, t + k * grid]
                    * np.conj(samples[r2, j, t + k * grid])
                    for j in range(cols)
                    for k in range(N)
                )
                want = N if r == r2 else 0.0
                max_gg = max(max_gg, abs(acc - want))
            for i in range(mw):
                acc = sum(
                    samples[r, j, t + k * grid]
                    * np.conj(H.entry(i, j).evaluate(zs[k]))
                    for j in range(cols)
                    for k in range(N)
                )
                max_gh = max(max_gh, abs(acc))
    residual = float(max(max_gg, max_gh))
    report = VerificationReport(
        passed=bool(residual <= tol),
        max_residual=residual,
        tolerance=tol,
        identities={"gg_grid": float(max_gg), "gh_grid": float(max_gh)},
    )
    G = GridFilterMatrix(fine, samples, m, H.e, "mtilde")
    return G, report


def verify_complementary_grid(
    G: GridFilterMatrix, H: FilterMatrix, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """Re-check the complementary identities of a grid-sampled G against H."""
    if G.m != H.m or G.e != H.e:
        raise ContextMismatch("grid filter context differs from H")
    N = H.e.N
    grid = G.grid // N
    mtilde = compute_mtilde(H.m, H.e)
    max_gg = 0.0
    max_gh = 0.0
    for t in range(grid):
        w = Fraction(t, grid)
        zs = H.e.preimages(w)
        mt = mtilde.value_at(w)
        for r in range(G.rows):
            for r2 in range(r, G.rows):
                acc = sum(
                    G.samples[r, j, t + k * grid]
                    * np.conj(G.samples[r2, j, t + k * grid])
                    for j in range(G.cols)
                    for k in range(N)
                )
                want = N if (r == r2 and r < mt) else 0.0
                max_gg = max(max_gg, abs(acc - want))
            for i in range(H.rows):
                acc = sum(
                    G.samples[r, j, t + k * grid]
                    * np.conj(H.entry(i, j).evaluate(zs[k]))
                    for j in range(G.cols)
                    for k in range(N)
                )
                max_gh = max(max_gh, abs(acc))
    residual = float(max(max_gg, max_gh))
    return VerificationReport(
        passed=bool(residual <= tol),
        max_residual=residual,
        tolerance=tol,
        identities={"gg_grid": float(max_gg), "gh_grid": float(max_gh)},
    )

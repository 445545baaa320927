"""Construction of the canonical GMRA as a symbolic space ledger.

The core space is the direct sum of L2 over the multiplicity level sets;
the zero-th detail space sits over the complementary level sets, and each
higher detail space is the dilation of the previous one, realized by
splitting every base set into its injective dilation branches.  The whole
structure is a finite-depth ledger of slots; the unitary that shifts the
ledger one step is assembled from the two transfer isometries plus exact
branch maps.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    ContextMismatch,
    DepthExceeded,
    FilterInvalid,
    NotPureIsometry,
    UnsupportedRepresentation,
)
from .equivalence import PURE, PurityVerdict, purity_test
from .filters import (
    FilterMatrix,
    GridFilterMatrix,
    VerificationReport,
    verify_complementary,
    verify_filter,
)
from .multiplicity import (
    MultiplicityFunction,
    check_consistency,
    compute_mtilde,
    sigma_sets,
)
from .ruelle import SectionVector, apply_S, apply_S_adjoint, random_section
from .torus import TorusEndomorphism, TorusSet
from .trigpoly import TrigPoly, compress_branch, dilate_branch, inner


@dataclass(frozen=True)
class SpaceSlot:
    """One component space of the ledger.

    Core slots ("V0", index i) carry the i-th level set at level 0.  Detail
    slots ("W", index k) at level n carry the n-fold dilation of the k-th
    complementary level set along one branch path; ``branch`` records the
    kernel elements chosen at each dilation step and ``weight`` the
    cumulative measure scaling N^level of the scaled presentation.
    """

    kind: str  # "V0" or "W"
    index: int
    level: int
    branch: tuple[Fraction, ...]
    base: TorusSet
    weight: int

    @property
    def label(self) -> str:
        if self.kind == "V0":
            return f"V0[{self.index + 1}]"
        path = ",".join(str(z) for z in self.branch)
        return f"W{self.level}[{self.index + 1}]({path})"


def dilate_slots(slots, e: TorusEndomorphism) -> list[SpaceSlot]:
    """One dilation step: split each base into branches, push each forward.

    Per branch the map is injective, the image has N times the branch
    measure, and the total weighted dimension is preserved.
    """
    out = []
    for slot in slots:
        for zeta, piece in e.tau_partition(slot.base):
            out.append(
                SpaceSlot(
                    kind=slot.kind,
                    index=slot.index,
                    level=slot.level + 1,
                    branch=slot.branch + (zeta,),
                    base=e.image_set(piece),
                    weight=slot.weight * e.N,
                )
            )
    return out


@dataclass(frozen=True)
class CanonicalGMRA:
    """Finite-depth ledger V0 (+) W0 (+) ... (+) W_depth with its filters."""

    m: MultiplicityFunction
    mtilde: MultiplicityFunction
    H: FilterMatrix
    G: FilterMatrix
    e: TorusEndomorphism
    depth: int
    v0_slots: tuple[SpaceSlot, ...]
    w_levels: tuple[tuple[SpaceSlot, ...], ...]
    purity: PurityVerdict = field(compare=False)

    @property
    def slots(self) -> tuple[SpaceSlot, ...]:
        flat = list(self.v0_slots)
        for level in self.w_levels:
            flat.extend(level)
        return tuple(flat)

    def scaled_ledger(self) -> list[dict]:
        """Grouped view: V0 plus one group per detail level.

        For integer translations each level-n group presents as L2 of the
        n-times-dilated circle: weight N^n with total scaled measure equal
        to the sum of branch base measures.
        """
        groups = [
            {
                "space": "V0",
                "weight": 1,
                "components": [slot.base for slot in self.v0_slots],
                "slot_count": len(self.v0_slots),
            }
        ]
        for n, level in enumerate(self.w_levels):
            by_index: dict[int, list[SpaceSlot]] = {}
            for slot in level:
                by_index.setdefault(slot.index, []).append(slot)
            groups.append(
                {
                    "space": f"W{n}",
                    "weight": self.e.N**n,
                    "components": [
                        sum((s.base.measure() for s in by_index[k]), Fraction(0))
                        for k in sorted(by_index)
                    ],
                    "bases": [
                        [s.base for s in by_index[k]] for k in sorted(by_index)
                    ],
                    "slot_count": len(level),
                }
            )
        return groups


def build(
    m: MultiplicityFunction,
    H: FilterMatrix,
    G: FilterMatrix,
    e: TorusEndomorphism,
    depth: int = 3,
    tol: float = 1e-9,
) -> CanonicalGMRA:
    """Validate the parameters and lay out the ledger to the given depth."""
    report = check_consistency(m, e)
    if not report.holds:
        raise FilterInvalid(
            f"multiplicity fails consistency on {report.violation}"
        )
    hrep = verify_filter(H, tol)
    if not hrep.passed:
        raise FilterInvalid("H fails the filter conditions", hrep)
    grep = verify_complementary(G, H, tol)
    if not grep.passed:
        raise FilterInvalid("G is not complementary to H", grep)
    verdict = purity_test(H, tol=tol)
    if verdict.kind != PURE:
        raise NotPureIsometry(
            f"cannot build: purity verdict is {verdict.kind}", verdict
        )
    mtilde = compute_mtilde(m, e)
    v0 = tuple(
        SpaceSlot("V0", i, 0, (), base, 1)
        for i, base in enumerate(sigma_sets(m))
    )
    w0 = [
        SpaceSlot("W", k, 0, (), base, 1)
        for k, base in enumerate(sigma_sets(mtilde))
    ]
    levels = [tuple(w0)]
    for _ in range(depth):
        levels.append(tuple(dilate_slots(levels[-1], e)))
    return CanonicalGMRA(
        m=m,
        mtilde=mtilde,
        H=H,
        G=G,
        e=e,
        depth=depth,
        v0_slots=v0,
        w_levels=tuple(levels),
        purity=verdict,
    )


# ---- ledger vectors ---------------------------------------------------------


@dataclass(frozen=True)
class LedgerVector:
    """Components aligned with the slot list of a CanonicalGMRA."""

    v0: tuple[TrigPoly, ...]
    w: tuple[tuple[TrigPoly, ...], ...]  # one tuple per level, per slot

    @staticmethod
    def zero(g: CanonicalGMRA) -> "LedgerVector":
        return LedgerVector(
            tuple(TrigPoly.zero() for _ in g.v0_slots),
            tuple(tuple(TrigPoly.zero() for _ in level) for level in g.w_levels),
        )

    def replace_v0(self, comps) -> "LedgerVector":
        return LedgerVector(tuple(comps), self.w)

    def replace_level(self, n: int, comps) -> "LedgerVector":
        levels = list(self.w)
        levels[n] = tuple(comps)
        return LedgerVector(self.v0, tuple(levels))


def conform(g: CanonicalGMRA, v: LedgerVector):
    if len(v.v0) != len(g.v0_slots) or len(v.w) != len(g.w_levels):
        raise ContextMismatch("vector does not conform to the ledger")
    for level, slots in zip(v.w, g.w_levels):
        if len(level) != len(slots):
            raise ContextMismatch("vector does not conform to the ledger")


def ledger_norm(g: CanonicalGMRA, v: LedgerVector) -> float:
    conform(g, v)
    total = 0.0
    for comp in list(v.v0) + [c for level in v.w for c in level]:
        total += max(inner(comp, comp).real, 0.0)
    return math.sqrt(total)


def _v0_section(g: CanonicalGMRA, v: LedgerVector) -> SectionVector:
    return SectionVector.from_components(v.v0, tuple(s.base for s in g.v0_slots))


def _w0_section(g: CanonicalGMRA, v: LedgerVector) -> SectionVector:
    return SectionVector.from_components(
        v.w[0], tuple(s.base for s in g.w_levels[0])
    )


def _branch_k(zeta: Fraction, e: TorusEndomorphism) -> int:
    return (e.N - int(zeta * e.N)) % e.N


def _dilate_components(
    g: CanonicalGMRA, n: int, comps
) -> list[TrigPoly]:
    """Push level-n components one level up (the isometry D, exact)."""
    parents = g.w_levels[n]
    children = g.w_levels[n + 1]
    scale = 1.0 / math.sqrt(g.e.N)
    parent_of = {
        (slot.index, slot.branch): f for slot, f in zip(parents, comps)
    }
    out = []
    for child in children:
        f = parent_of[(child.index, child.branch[:-1])]
        k = _branch_k(child.branch[-1], g.e)
        out.append((dilate_branch(f, g.e, k) * scale).restrict(child.base))
    return out


def _compress_components(
    g: CanonicalGMRA, n: int, comps
) -> list[TrigPoly]:
    """Pull level-(n+1) components down one level (the inverse of D)."""
    parents = g.w_levels[n]
    children = g.w_levels[n + 1]
    scale = math.sqrt(g.e.N)
    acc = {(slot.index, slot.branch): TrigPoly.zero() for slot in parents}
    for child, f in zip(children, comps):
        key = (child.index, child.branch[:-1])
        k = _branch_k(child.branch[-1], g.e)
        acc[key] = acc[key] + compress_branch(f, g.e, k) * scale
    return [acc[(slot.index, slot.branch)].restrict(slot.base) for slot in parents]


def apply_T(g: CanonicalGMRA, v: LedgerVector) -> LedgerVector:
    """The ledger shift: V0 <- S_H(V0) + S_G(W0), W_n <- D^{-1}(W_{n+1})."""
    conform(g, v)
    new_v0 = apply_S(g.H, _v0_section(g, v)) + apply_S(g.G, _w0_section(g, v))
    new_w = []
    for n in range(len(g.w_levels)):
        if n + 1 < len(g.w_levels):
            new_w.append(tuple(_compress_components(g, n, v.w[n + 1])))
        else:
            new_w.append(tuple(TrigPoly.zero() for _ in g.w_levels[n]))
    return LedgerVector(tuple(new_v0.components), tuple(new_w))


def apply_T_inverse(g: CanonicalGMRA, v: LedgerVector) -> LedgerVector:
    """Inverse shift; raises DepthExceeded if the top level is occupied."""
    conform(g, v)
    if any(not c.is_zero() for c in v.w[-1]):
        raise DepthExceeded(
            "top detail level is occupied; rebuild with a larger depth"
        )
    v0_sec = _v0_section(g, v)
    new_v0 = apply_S_adjoint(g.H, v0_sec)
    new_w0 = apply_S_adjoint(g.G, v0_sec)
    new_w = [tuple(new_w0.components)]
    for n in range(len(g.w_levels) - 1):
        new_w.append(tuple(_dilate_components(g, n, v.w[n])))
    return LedgerVector(tuple(new_v0.components), tuple(new_w))


def apply_translation(g: CanonicalGMRA, gamma: int, v: LedgerVector) -> LedgerVector:
    """Multiply every slot component by e^(2*pi*i*gamma*w) in its coordinate."""
    conform(g, v)
    return LedgerVector(
        tuple(c.shift_frequencies(gamma) for c in v.v0),
        tuple(
            tuple(c.shift_frequencies(gamma) for c in level) for level in v.w
        ),
    )


def random_ledger_vector(
    g: CanonicalGMRA,
    rng: random.Random,
    degree: int = 5,
    top_level: int | None = None,
) -> LedgerVector:
    """Seeded vector with trig-poly components up to ``top_level`` details."""
    if top_level is None:
        top_level = len(g.w_levels) - 2
    v0 = random_section(tuple(s.base for s in g.v0_slots), rng, degree)
    levels = []
    for n, slots in enumerate(g.w_levels):
        if n <= top_level:
            sec = random_section(tuple(s.base for s in slots), rng, degree)
            levels.append(tuple(sec.components))
        else:
            levels.append(tuple(TrigPoly.zero() for _ in slots))
    return LedgerVector(tuple(v0.components), tuple(levels))


# ---- negative dilates -------------------------------------------------------


def _require_exact(F) -> FilterMatrix:
    if isinstance(F, GridFilterMatrix):
        raise UnsupportedRepresentation(
            "support propagation needs exact piecewise entries"
        )
    return F


def _propagate_supports(F: FilterMatrix, sets: list[TorusSet]) -> list[TorusSet]:
    """Component supports of S_F applied to sections over ``sets``.

    Component j collects the supports of F_ij intersected with the preimage
    of the i-th input support.  Entries are treated as nonvanishing on
    their supports (zeros of a nonzero trig poly are null).
    """
    cols = len(F.column_sets)
    out = []
    for j in range(cols):
        acc = TorusSet.empty()
        for i in range(min(F.rows, len(sets))):
            piece = F.entry(i, j).support().intersect(F.e.preimage_set(sets[i]))
            acc = acc.union(piece)
        out.append(acc)
    return out


@dataclass(frozen=True)
class NegativeLevel:
    j: int
    v_supports: tuple[TorusSet, ...]
    w_supports: tuple[TorusSet, ...]


def negative_supports(g: CanonicalGMRA, levels: int) -> list[NegativeLevel]:
    """Exact component supports of the negative dilates, per level.

    V_{-j} iterates the H propagation from the core supports; W_{-j} routes
    the complementary supports through G once and then through H.
    """
    H = _require_exact(g.H)
    G = _require_exact(g.G)
    v_cur = sigma_sets(g.m)
    w_cur = _propagate_supports(G, sigma_sets(g.mtilde))
    out = []
    for j in range(1, levels + 1):
        v_cur = _propagate_supports(H, v_cur)
        if j > 1:
            w_cur = _propagate_supports(H, w_cur)
        out.append(NegativeLevel(j, tuple(v_cur), tuple(w_cur)))
    return out


# ---- cascade diagnostic ------------------------------------------------------

CONVERGENT_NONZERO = "convergent_nonzero"
DEGENERATES_TO_ZERO = "degenerates_to_zero"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CascadeResult:
    omegas: np.ndarray
    values: np.ndarray
    verdict: str
    diagnostics: dict


def cascade_diagnostic(
    h,
    e: TorusEndomorphism,
    iters: int = 30,
    samples: int = 1024,
    tol: float = 1e-9,
) -> CascadeResult:
    """Partial products of the refinement symbol on [-1/2, 1/2].

    P_J(w) = prod_{j=1..J} h(w / N^j) / sqrt(N), sampled at ``samples``
    uniform points.  Degenerates when the products die; converges when the
    last five increments stay below 1e-8 in sup norm.
    """
    if isinstance(h, FilterMatrix):
        if not h.is_scalar():
            raise ContextMismatch("cascade diagnostic expects a scalar filter")
        h = h.entry(0, 0)
    xs = np.linspace(-0.5, 0.5, samples)
    scale = 1.0 / math.sqrt(e.N)
    prod = np.ones(samples, dtype=complex)
    diffs = []
    peaks = []
    for j in range(1, iters + 1):
        prev = prod.copy()
        prod = prod * h.sample(xs / float(e.N**j)) * scale
        diffs.append(float(np.abs(prod - prev).max()))
        peaks.append(float(np.abs(prod).max()))
    peak = peaks[-1]
    h0 = h.evaluate(Fraction(0))
    stabilized = len(diffs) >= 5 and max(diffs[-5:]) < 1e-8
    low_pass_gap = abs(abs(h0) - math.sqrt(e.N))
    decaying = len(peaks) >= 2 and peak < 0.5 * peaks[len(peaks) // 2]
    if peak < 1e-6 or (low_pass_gap > tol and decaying):
        verdict = DEGENERATES_TO_ZERO
    elif stabilized and peak >= 1e-6:
        verdict = CONVERGENT_NONZERO
    else:
        verdict = INCONCLUSIVE
    return CascadeResult(
        omegas=xs,
        values=prod,
        verdict=verdict,
        diagnostics={
            "max_modulus": peak,
            "h_at_zero": h0,
            "low_pass_gap": low_pass_gap,
            "last_increments": diffs[-5:],
        },
    )


# ---- tensor combinator -------------------------------------------------------


@dataclass(frozen=True)
class FilterSystem:
    """Raw parameter bundle (m, H, G, N) accepted by build and tensor."""

    m: MultiplicityFunction
    H: FilterMatrix
    G: FilterMatrix
    e: TorusEndomorphism


def _as_system(g) -> FilterSystem:
    if isinstance(g, CanonicalGMRA):
        return FilterSystem(g.m, g.H, g.G, g.e)
    if isinstance(g, FilterSystem):
        return g
    m, H, G, e = g
    return FilterSystem(m, H, G, e)


@dataclass(frozen=True)
class TensorGMRA:
    """Product of circle systems, kept in pair form.

    The dilation factor multiplies, multiplicities multiply pointwise on
    the product, and the filter is the Kronecker product of the factors;
    the filter identities are re-checked on a product grid.
    """

    factors: tuple[FilterSystem, ...]

    @property
    def N(self) -> int:
        return math.prod(f.e.N for f in self.factors)

    def m_value(self, point) -> int:
        return math.prod(
            f.m.value_at(x) for f, x in zip(self.factors, point)
        )

    def mtilde_value(self, point) -> int:
        folded = math.prod(
            sum(f.m.value_at(z) for z in f.e.preimages(x))
            for f, x in zip(self.factors, point)
        )
        return folded - self.m_value(point)

    def m_constant(self) -> int | None:
        vals = []
        for f in self.factors:
            c = f.m.max_value()
            if f.m != MultiplicityFunction.constant(c):
                return None
            vals.append(c)
        return math.prod(vals)

    def filter_value(self, point) -> np.ndarray:
        mats = [f.H.value_at(x) for f, x in zip(self.factors, point)]
        out = mats[0]
        for mat in mats[1:]:
            out = np.kron(out, mat)
        return out

    def verify(self, grid: int = 16, tol: float = 1e-9) -> VerificationReport:
        """Re-check the product filter identity on a grid of pair points."""
        if len(self.factors) != 2:
            raise ContextMismatch("grid verification implemented for two factors")
        c = self.m_constant()
        if c is None:
            raise ContextMismatch(
                "tensor verification needs constant factor multiplicities"
            )
        f1, f2 = self.factors
        worst = 0.0
        for s in range(grid):
            for t in range(grid):
                x, y = Fraction(s, grid), Fraction(t, grid)
                acc = np.zeros((c, c), dtype=complex)
                for z1 in f1.e.preimages(x):
                    for z2 in f2.e.preimages(y):
                        val = np.kron(
                            f1.H.value_at(z1)[: f1.m.max_value(), : f1.m.max_value()],
                            f2.H.value_at(z2)[: f2.m.max_value(), : f2.m.max_value()],
                        )
                        acc += val @ val.conj().T
                worst = max(
                    worst, float(np.abs(acc - self.N * np.eye(c)).max())
                )
        return VerificationReport(
            passed=worst <= tol,
            max_residual=worst,
            tolerance=tol,
            identities={"kronecker_fold": worst},
        )


def tensor(a, b, tol: float = 1e-9) -> TensorGMRA:
    """Tensor two systems; every factor must verify and be provably pure."""
    systems = []
    for g in (a, b):
        sys_ = _as_system(g)
        rep = verify_filter(sys_.H, tol)
        if not rep.passed:
            raise FilterInvalid("tensor factor fails the filter conditions", rep)
        verdict = purity_test(sys_.H, tol=tol)
        if verdict.kind != PURE:
            raise NotPureIsometry(
                f"tensor factor is not a pure isometry ({verdict.kind})", verdict
            )
        systems.append(sys_)
    return TensorGMRA(tuple(systems))

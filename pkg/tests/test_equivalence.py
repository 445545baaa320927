import math
from fractions import Fraction

import pytest

from gmra import catalog, equivalence
from gmra.equivalence import (
    EQUIVALENT,
    INEQUIVALENT,
    NOT_PURE,
    PURE,
    UNKNOWN,
    certified_deviation_set,
    coboundary_solve,
    constant_ratio_obstruction,
    decide,
    invariant_check,
    is_eigenfilter,
    purity_test,
)
from gmra.errors import NotApplicable
from gmra.filters import FilterMatrix, conjugate_filter, verify_filter
from gmra.multiplicity import MultiplicityFunction
from gmra.torus import TorusEndomorphism
from gmra.trigpoly import TrigPoly, compose_endomorphism

F = Fraction
SQRT2 = math.sqrt(2.0)
N2 = TorusEndomorphism(2)
M1 = MultiplicityFunction.constant(1)


def poly(*terms):
    return TrigPoly.from_pieces([(0, 1, [(F(n), c) for n, c in terms])])


def scalar(p):
    return FilterMatrix.scalar(p, M1, N2)


def haar_poly():
    return poly((0, 1 / SQRT2), (-1, 1 / SQRT2))


class TestEigenfilter:
    def test_constant_one(self):
        found, lam = is_eigenfilter(scalar(poly((0, 1.0))), 1e-9)
        assert found and abs(lam - 1.0) < 1e-12

    def test_haar_is_not(self):
        found, _ = is_eigenfilter(catalog.get("haar").H, 1e-9)
        assert not found

    def test_unimodular_nonconstant_is_not(self):
        found, _ = is_eigenfilter(scalar(poly((1, 1.0))), 1e-9)
        assert not found


class TestPurity:
    def test_shannon_pure(self):
        v = purity_test(catalog.get("shannon").H)
        assert v.kind == PURE
        assert v.certificate.measure() > 0

    def test_reversed_shannon_pure(self):
        assert purity_test(catalog.get("shannon_reversed").H).kind == PURE

    def test_constant_eigenfilter_not_pure(self):
        v = purity_test(scalar(poly((0, 1.0))))
        assert v.kind == NOT_PURE
        assert abs(v.eigenvalue - 1.0) < 1e-12
        assert v.eigenvector is not None
        assert v.eigenvector.components[0].deviation_from(
            TrigPoly.constant(1.0)
        ) < 1e-12

    def test_journe_rank2_pure(self):
        v = purity_test(catalog.get("journe_rank2").H)
        assert v.kind == PURE
        assert v.certificate.measure() > 0

    def test_matrix_certificate_soundness(self):
        import numpy as np

        entry = catalog.get("journe_rank2")
        v = purity_test(entry.H)
        assert v.kind == PURE
        for lo, hi in v.certificate.intervals:
            x = (lo + hi) / 2
            row_dim = entry.m.value_at(entry.e.image(x))
            col_dim = entry.m.value_at(x)
            if row_dim == 0 or col_dim == 0:
                continue
            block = np.array(
                [
                    [entry.H.entry(i, j).evaluate(x) for j in range(col_dim)]
                    for i in range(row_dim)
                ]
            )
            top = np.linalg.svd(block, compute_uv=False).max()
            assert top < 1.0 - 1e-9

    def test_gray_zone_unimodular_is_unknown(self):
        # |h| = 1 identically but h is not constant: no certificate exists
        assert purity_test(scalar(poly((1, 1.0)))).kind == UNKNOWN

    def test_eigenfilter_always_not_pure(self):
        for lam in (1.0, -1.0, 1j):
            v = purity_test(scalar(poly((0, lam))))
            assert v.kind == NOT_PURE

    def test_certificate_soundness(self):
        # the claimed pointwise bound holds at rational samples of the set
        for name in ("haar", "cohen", "cantor3"):
            H = catalog.get(name).H
            v = purity_test(H)
            assert v.kind == PURE
            h = H.entry(0, 0)
            for lo, hi, in_set in _sample_windows(v.certificate):
                val = abs(h.evaluate((lo + hi) / 2)) ** 2
                assert abs(val - 1.0) > 1e-9


def _sample_windows(ts):
    return [(lo, hi, True) for lo, hi in ts.intervals]


class TestInvariants:
    def test_haar_vs_cohen_moduli(self):
        obs = invariant_check(catalog.get("haar").H, catalog.get("cohen").H)
        assert obs is not None and obs.kind == equivalence.MODULI_MISMATCH
        assert obs.detail["set"].measure() > 0

    def test_haar_vs_negated_none(self):
        obs = invariant_check(
            catalog.get("haar").H, catalog.get("haar_negated").H
        )
        assert obs is None

    def test_journe_self_none(self):
        H = catalog.get("journe").H
        assert invariant_check(H, H) is None

    def test_journe_vs_rank2_singular_values(self):
        obs = invariant_check(
            catalog.get("journe").H, catalog.get("journe_rank2").H
        )
        assert obs is not None and obs.kind == equivalence.SINGULAR_VALUE_MISMATCH


class TestConstantRatio:
    def test_negated(self):
        obs = constant_ratio_obstruction(haar_poly(), haar_poly() * -1.0)
        assert obs is not None and abs(obs.detail["ratio"] + 1.0) < 1e-12

    def test_same_filter_none(self):
        assert constant_ratio_obstruction(haar_poly(), haar_poly()) is None

    def test_rotated_by_i(self):
        obs = constant_ratio_obstruction(haar_poly(), haar_poly() * 1j)
        assert obs is not None and abs(obs.detail["ratio"] - 1j) < 1e-12

    def test_nonconstant_ratio_not_applicable(self):
        with pytest.raises(NotApplicable):
            constant_ratio_obstruction(haar_poly(), poly((0, 1 / SQRT2), (1, 1 / SQRT2)))

    def test_vanishing_filter_not_applicable(self):
        s = catalog.get("shannon").H.entry(0, 0)
        with pytest.raises(NotApplicable):
            constant_ratio_obstruction(s, s * -1.0)


class TestCoboundary:
    def test_exponential_witness(self):
        hp = poly((0, 1 / SQRT2), (1, 1 / SQRT2))
        a = coboundary_solve(haar_poly(), hp, 2, N2)
        assert a is not None
        # witness satisfies the defining identity exactly in the class
        lhs = compose_endomorphism(a, N2) * haar_poly() * a.conj()
        assert lhs.deviation_from(hp) < 1e-9

    def test_trivial_witness(self):
        a = coboundary_solve(haar_poly(), haar_poly(), 0, N2)
        assert a is not None
        assert a.deviation_from(TrigPoly.constant(a.evaluate(0))) < 1e-9

    def test_negated_has_no_witness(self):
        assert coboundary_solve(haar_poly(), haar_poly() * -1.0, 16, N2) is None


class TestDecide:
    def test_reflexive_equivalent(self):
        for name in ("haar", "journe", "cantor3"):
            H = catalog.get(name).H
            v = decide(H, H)
            assert v.kind == EQUIVALENT

    def test_haar_vs_negated(self):
        v = decide(catalog.get("haar").H, catalog.get("haar_negated").H)
        assert v.kind == INEQUIVALENT
        assert v.obstruction.kind == equivalence.CONSTANT_RATIO
        assert abs(v.obstruction.detail["ratio"] + 1.0) < 1e-9

    def test_haar_vs_conjugated(self):
        hp = scalar(poly((0, 1 / SQRT2), (1, 1 / SQRT2)))
        H = catalog.get("haar").H
        v = decide(H, hp)
        assert v.kind == EQUIVALENT
        # soundness: conjugating H by the witness reproduces hp and stays a filter
        lifted = conjugate_filter(H, v.witness)
        assert lifted.entry(0, 0).deviation_from(hp.entry(0, 0)) < 1e-9
        assert verify_filter(lifted).passed

    def test_witness_inverts_with_direction(self):
        hp = scalar(poly((0, 1 / SQRT2), (1, 1 / SQRT2)))
        H = catalog.get("haar").H
        forward = decide(H, hp).witness.entry(0, 0)
        backward = decide(hp, H).witness.entry(0, 0)
        assert (forward * backward).deviation_from(TrigPoly.constant(1.0)) < 1e-9

    def test_haar_vs_cohen(self):
        v = decide(catalog.get("haar").H, catalog.get("cohen").H)
        assert v.kind == INEQUIVALENT
        assert v.obstruction.kind == equivalence.MODULI_MISMATCH

    def test_journe_vs_haar_multiplicity(self):
        v = decide(catalog.get("journe").H, catalog.get("haar").H)
        assert v.kind == INEQUIVALENT
        assert v.obstruction.kind == equivalence.MULTIPLICITY_MISMATCH

    def test_unknown_carries_degree(self):
        # equal moduli, not a constant ratio, no trig witness: e_1 vs e_{-1}
        v = decide(scalar(poly((1, 1.0))), scalar(poly((-1, 1.0))), degree=6)
        assert v.kind in (UNKNOWN, EQUIVALENT)
        if v.kind == UNKNOWN:
            assert v.searched_degree == 6


class TestMatrixPairs:
    @staticmethod
    def _diag(first, second):
        m2 = MultiplicityFunction.constant(2)
        z = TrigPoly.zero()
        return FilterMatrix.from_rows([[first, z], [z, second]], m2, N2)

    def test_swapped_diagonal_pair_is_equivalent(self):
        h = catalog.get("haar").H.entry(0, 0)
        s = catalog.get("shannon").H.entry(0, 0)
        H, Hp = self._diag(h, s), self._diag(s, h)
        assert verify_filter(H).passed and verify_filter(Hp).passed
        v = decide(H, Hp)
        assert v.kind == EQUIVALENT
        lifted = conjugate_filter(H, v.witness)
        for i in range(2):
            for j in range(2):
                assert lifted.entry(i, j).deviation_from(Hp.entry(i, j)) < 1e-8
        assert verify_filter(lifted).passed

    def test_different_singular_values_certified(self):
        h = catalog.get("haar").H.entry(0, 0)
        s = catalog.get("shannon").H.entry(0, 0)
        c = catalog.get("cohen").H.entry(0, 0)
        v = decide(self._diag(h, s), self._diag(h, c))
        assert v.kind == INEQUIVALENT
        assert v.obstruction.kind == equivalence.SINGULAR_VALUE_MISMATCH
        assert v.obstruction.detail["set"].measure() > 0

    def test_honest_unknown_for_unresolved_matrix_pair(self):
        # same singular values everywhere, no constant multiplier: the
        # exponential twist needs a non-constant witness
        h = catalog.get("haar").H.entry(0, 0)
        s = catalog.get("shannon").H.entry(0, 0)
        twisted = self._diag(h.shift_frequencies(1) * complex(0, 1), s)
        base = self._diag(h, s)
        v = decide(base, twisted)
        assert v.kind in (UNKNOWN, EQUIVALENT)


class TestCatalogSweep:
    N2_ENTRIES = [
        "shannon", "haar", "haar_negated", "cohen",
        "shannon_reversed", "haar_reversed",
        "journe", "journe_rank2", "eigenfilter_constant",
    ]

    def test_decide_symmetric_on_catalog_pairs(self):
        # decided verdicts must agree under swapping the arguments
        for i, a in enumerate(self.N2_ENTRIES):
            for b in self.N2_ENTRIES[i:]:
                Ha, Hb = catalog.get(a).H, catalog.get(b).H
                fwd = decide(Ha, Hb)
                bwd = decide(Hb, Ha)
                if EQUIVALENT in (fwd.kind, bwd.kind):
                    assert fwd.kind == bwd.kind == EQUIVALENT, (a, b)
                if INEQUIVALENT in (fwd.kind, bwd.kind):
                    assert fwd.kind == bwd.kind == INEQUIVALENT, (a, b)

    def test_distinct_entries_never_equivalent_to_each_other(self):
        # every distinct catalog pair is either certified inequivalent or
        # an honest unknown; none should produce an (exactly verified)
        # witness, since all represent different classes
        for i, a in enumerate(self.N2_ENTRIES):
            for b in self.N2_ENTRIES[i + 1:]:
                v = decide(catalog.get(a).H, catalog.get(b).H)
                assert v.kind in (INEQUIVALENT, UNKNOWN), (a, b, v.kind)


class TestCertifiedWindows:
    def test_window_bound_holds(self):
        p = haar_poly() * haar_poly().conj()
        cert = certified_deviation_set(p, 1.0, 1e-9)
        assert cert.measure() > 0
        for lo, hi in cert.intervals:
            for t in range(5):
                x = lo + (hi - lo) * F(2 * t + 1, 10)
                assert abs(p.evaluate(x) - 1.0) > 1e-9

"""Decision procedures: classification, Mabuchi tests, certificates, search."""

from fractions import Fraction as F

import pytest

from kstab import criteria
from kstab.criteria import KEStatus, MabuchiStatus, classify_offset
from kstab.errors import (
    ContractError,
    InvalidParameterError,
    NoBracketError,
    NotAmpleError,
    NotAnticanonicalError,
)
from kstab.families import FamilyTag, blpp_resolve, resolve_anticanonical


class TestClassifyOffset:
    def test_equality_criterion(self):
        assert classify_offset((F(0),), ()) is KEStatus.KAHLER_EINSTEIN
        assert classify_offset((F(1, 7),), ()) is KEStatus.NOT_K_SEMISTABLE
        assert classify_offset((F(-1, 7),), ()) is KEStatus.NOT_K_SEMISTABLE

    def test_full_cone(self):
        assert classify_offset((F(1), F(2)), (0, 1)) is KEStatus.KAHLER_EINSTEIN
        assert classify_offset((F(-1), F(2)), (0, 1)) is KEStatus.NOT_K_SEMISTABLE
        assert classify_offset((F(0), F(2)), (0, 1)) is KEStatus.BOUNDARY

    def test_half_strict_half_zero(self):
        assert classify_offset((F(1), F(0)), (0,)) is KEStatus.KAHLER_EINSTEIN
        assert classify_offset((F(1), F(1, 9)), (0,)) is KEStatus.NOT_K_SEMISTABLE
        assert classify_offset((F(-1), F(0)), (0,)) is KEStatus.NOT_K_SEMISTABLE
        assert classify_offset((F(0), F(0)), (0,)) is KEStatus.BOUNDARY


class TestKeClassify:
    def test_balanced_blpp(self):
        verdict = criteria.ke_classify(resolve_anticanonical(FamilyTag.BLPP, 10, 5))
        assert verdict.status is KEStatus.KAHLER_EINSTEIN
        assert verdict.xi == (F(0),)

    def test_blqq_unstable_witness(self):
        verdict = criteria.ke_classify(resolve_anticanonical(FamilyTag.BLQQ, 7, 4))
        assert verdict.status is KEStatus.NOT_K_SEMISTABLE
        # x-offset is the x-test integral -9/40 divided by the mass 711/20
        assert verdict.xi[0] == F(-9, 40) / F(711, 20) == F(-1, 158)

    def test_quade_small_dimension(self):
        verdict = criteria.ke_classify(resolve_anticanonical(FamilyTag.QUAD_E, 5))
        assert verdict.status is KEStatus.KAHLER_EINSTEIN
        assert verdict.xi == (F(1, 5), F(0))

    def test_quadpt_futaki_obstruction(self):
        verdict = criteria.ke_classify(resolve_anticanonical(FamilyTag.QUAD_PT, 6))
        assert verdict.status is KEStatus.NOT_K_SEMISTABLE
        assert verdict.xi[1] != 0

    def test_requires_ample(self):
        with pytest.raises(NotAmpleError):
            criteria.ke_classify(blpp_resolve(6, 2, (1, 2, 2)))

    def test_requires_anticanonical(self):
        with pytest.raises(NotAnticanonicalError):
            criteria.ke_classify(blpp_resolve(4, 2, (3, 1, 1)))


class TestMomentClosedForms:
    def test_blpp_examples(self):
        assert criteria.blpp_moment_closed(5, 2) == F(8, 5)
        assert criteria.blpp_moment_closed(10, 5) == 0
        assert criteria.blpp_moment_closed(6, 2) == F(52, 3)

    def test_blpp_signs(self):
        assert criteria.blpp_moment_sign(10, 5) == 0
        assert criteria.blpp_moment_sign(5, 2) == 1
        assert criteria.blpp_moment(5, 2) == F(8, 5)
        assert criteria.blpp_moment_sign(5, 3) == -1
        assert criteria.blpp_moment(5, 3) == F(-8, 5)

    def test_blqq_beta_expansion(self):
        assert criteria.blqq_x_moment_closed(3, 2) == F(-9, 40)
        assert criteria.blqq_x_moment(3, 2) == F(-9, 40)

    def test_blqq_sign_structure(self):
        for l in range(2, 13):
            assert criteria.blqq_x_moment_closed(2, l) > 0
        for k in range(3, 9):
            for l in range(2, 9):
                assert criteria.blqq_x_moment_closed(k, l) < 0

    def test_k2_antiderivative_forms(self):
        assert criteria.blqq_x_moment_closed_k2(2) == F(6, 5)
        assert criteria.blqq_y_moment_closed_k2(2) == F(98, 15)
        for l in range(2, 13):
            assert criteria.blqq_x_moment(2, l) == criteria.blqq_x_moment_closed_k2(l)
            assert criteria.blqq_y_moment(2, l) == criteria.blqq_y_moment_closed_k2(l)

    def test_quade_ratio(self):
        assert criteria.quad_e_x_barycenter_closed(5) == F(6, 5)
        for n in range(5, 13):
            assert criteria.quad_e_x_barycenter(n) == criteria.quad_e_x_barycenter_closed(n)

    def test_domain_validation(self):
        with pytest.raises(InvalidParameterError):
            criteria.blpp_moment_closed(4, 1)
        with pytest.raises(InvalidParameterError):
            criteria.blqq_x_moment_closed(1, 5)


class TestMabuchiBlpp:
    def test_balanced_is_trivially_exists(self):
        verdict = criteria.mabuchi_blpp(10, 5)
        assert verdict.status is MabuchiStatus.EXISTS
        assert verdict.ratio is None

    def test_small_balanced(self):
        assert criteria.mabuchi_blpp(4, 2).status is MabuchiStatus.EXISTS

    def test_unbalanced_example(self):
        verdict = criteria.mabuchi_blpp(5, 2)
        detail = dict(verdict.detail)
        assert detail["first_moment"] == F(8, 5)
        assert detail["second_moment"] == F(52, 5)
        assert verdict.ratio == F(13, 2)
        assert verdict.status is MabuchiStatus.EXISTS

    def test_second_moment_always_positive(self):
        for n in range(4, 13):
            for p in range(2, n - 1):
                detail = dict(criteria.mabuchi_blpp(n, p).detail)
                assert detail["second_moment"] > 0

    def test_mirror_ratio_negates(self):
        a = criteria.mabuchi_blpp(7, 2)
        b = criteria.mabuchi_blpp(7, 5)
        assert a.ratio == -b.ratio


class TestMabuchiQuadPt:
    def test_dimension_five(self):
        verdict = criteria.mabuchi_quadpt(5)
        assert verdict.status is MabuchiStatus.NOT_EXISTS
        assert verdict.ratio == F(49, 20)

    def test_margin_closed_form(self):
        assert criteria.quad_pt_margin_closed(5) == -44
        for n in range(5, 13):
            margin = criteria.quad_pt_margin(n)
            closed = criteria.quad_pt_margin_closed(n)
            assert (n - 3) * (n - 1) * n * margin == closed
            assert closed <= 0

    def test_ratio_stays_in_window(self):
        for n in range(5, 13):
            verdict = criteria.mabuchi_quadpt(n)
            assert verdict.status is MabuchiStatus.NOT_EXISTS
            assert -1 <= verdict.ratio <= n - 2

    def test_small_dimension_rejected(self):
        with pytest.raises(InvalidParameterError):
            criteria.mabuchi_quadpt(4)


class TestMultiplierCertificate:
    def test_balanced_case(self):
        cert = criteria.mh_certificate(4, 2)
        assert cert.moment_integral == 0

    def test_odd_case_minima(self):
        cert = criteria.mh_certificate(5, 2)
        assert cert.moment_integral == 0
        assert cert.concavity_witness == (F(1), F(2))
        assert all(m > 0 for m in cert.concavity_witness)

    def test_produced_for_taller_family(self):
        cert = criteria.mh_certificate(7, 3)
        assert cert.moment_integral == 0
        assert min(cert.concavity_witness) > 0

    def test_reflection_weight_shape(self):
        cert = criteria.mh_certificate(6, 2)
        # factors (2 + t)^1 and (4 - t)^3
        (f0, m0), (f1, m1) = cert.weight_of_h.factors
        assert (f0.constant, f0.linear, m0) == (F(2), (F(1),), 1)
        assert (f1.constant, f1.linear, m1) == (F(4), (F(-1),), 3)


class TestCoupledResidual:
    def test_self_complementary_half_positive(self):
        # C at the half divisor equals the stability moment over the mass
        assert criteria.coupled_residual(2, (F(5, 4), F(1, 4), F(3, 4))) == F(8, 5) / F(100, 3)
        for k in range(2, 9):
            start, _ = criteria.coupled_default_endpoints(k)
            assert criteria.coupled_residual(k, start) > 0

    def test_complement_swap_invariance(self):
        divisor = (F(3), F(1, 3), F(1, 5))
        for k in (4, 6):
            comp = criteria.coupled_complement(k, divisor)
            assert criteria.coupled_residual(k, divisor) == criteria.coupled_residual(k, comp)

    def test_half_divisor_is_self_complementary(self):
        from kstab.quadrature import barycenter1

        for k in (2, 5, 9):
            start, _ = criteria.coupled_default_endpoints(k)
            assert criteria.coupled_complement(k, start) == start
            inst = blpp_resolve(2 * k + 1, k, start)
            bary = barycenter1(inst.weight.expand(), inst.domain)
            assert criteria.coupled_residual(k, start) == 2 * bary - F(1, 2)

    def test_threshold_is_four(self):
        assert criteria.coupled_negative_threshold(12) == 4
        _, end3 = criteria.coupled_default_endpoints(3)
        _, end4 = criteria.coupled_default_endpoints(4)
        assert criteria.coupled_residual(3, end3) > 0
        assert criteria.coupled_residual(4, end4) < 0

    def test_small_k_rejected(self):
        with pytest.raises(InvalidParameterError):
            criteria.coupled_residual(1, (F(1), F(1, 4), F(3, 4)))


class TestCoupledSearch:
    def test_bracket_at_threshold(self):
        start, end = criteria.coupled_default_endpoints(4)
        cert = criteria.coupled_search(4, start, end, max_bisections=16)
        assert cert.width == F(1, 2 ** 16)
        assert (cert.residual_lo > 0) and (cert.residual_hi < 0)
        assert criteria.coupled_residual(4, cert.params_lo) == cert.residual_lo
        assert criteria.coupled_residual(4, cert.params_hi) == cert.residual_hi
        assert criteria.coupled_pair_ample(4, cert.params_lo)
        assert criteria.coupled_pair_ample(4, cert.params_hi)

    def test_midpoint_between_bracket(self):
        start, end = criteria.coupled_default_endpoints(5)
        cert = criteria.coupled_search(5, start, end, max_bisections=8)
        for i in range(3):
            lo, hi = sorted((cert.params_lo[i], cert.params_hi[i]))
            assert lo <= cert.midpoint[i] <= hi

    def test_same_sign_endpoints(self):
        start, _ = criteria.coupled_default_endpoints(6)
        nearby = (start[0] + F(1, 8), start[1], start[2])
        with pytest.raises(NoBracketError):
            criteria.coupled_search(6, start, nearby, max_bisections=8)

    def test_ampleness_contract(self):
        start, _ = criteria.coupled_default_endpoints(6)
        outside = (F(20), F(1, 2), F(0))  # complement coefficient is negative
        with pytest.raises(ContractError):
            criteria.coupled_search(6, start, outside, max_bisections=8)

import cmath
import math
import random

import pytest

from specsing import (DegenerateParameterError, GainReport, InvalidParameterError,
                      InvalidRegimeError, QuadratureError, ShiftConstraint,
                      ShootingConfig, SingularParameterError, emitted_intensity,
                      face_term_derivatives, face_term_derivatives_weak_absorption,
                      find_linear_singularity, first_order_face_term,
                      first_order_face_term_kerr,
                      first_order_face_term_kerr_weak_absorption,
                      first_order_field, green_kernel, kerr_law, kerr_threshold,
                      left_emission_check, linear_face_terms, modified_gain,
                      solve_shift, threshold_gain_weak_absorption)
from specsing.perturbation import adaptive_quad


@pytest.fixture(scope="module")
def root():
    return find_linear_singularity(3.0, 1, tol=1e-14)


class TestGreenKernel:
    def test_zero_at_origin(self):
        assert green_kernel(0.0, 2.0 - 0.1j, 3.0) == 0.0

    def test_initial_slope_and_ode(self):
        n, K, h = 1.3 - 0.02j, 1.5, 1e-4
        # G'(0) = 1
        slope = (green_kernel(h, n, K) - green_kernel(-h, n, K)) / (2 * h)
        assert abs(slope - 1.0) <= 1e-7
        # G'' + (nK)^2 G = 0 away from the origin
        for u in (0.2, 0.5, 0.9):
            second = (green_kernel(u + h, n, K) - 2 * green_kernel(u, n, K)
                      + green_kernel(u - h, n, K)) / h ** 2
            residual = abs(second + (n * K) ** 2 * green_kernel(u, n, K))
            assert residual <= 1e-6 * abs(n * K) ** 2

    def test_singular_parameter(self):
        with pytest.raises(SingularParameterError):
            green_kernel(0.5, 0.0, 1.0)


class TestFirstOrderField:
    def test_empty_range(self):
        state = first_order_field(1.0, 2.0 - 0.1j, 3.0, 1.0, kerr_law)
        assert state.psi == 0.0 and state.dpsi == 0.0

    def test_zero_amplitude(self):
        state = first_order_field(0.3, 2.0 - 0.1j, 3.0, 0.0, kerr_law)
        assert state.psi == 0.0 and state.dpsi == 0.0

    def test_face_term_from_field_matches_closed_form(self, root):
        state = first_order_field(0.0, root.n0, root.K0, 1.0, kerr_law)
        via_field = state.dpsi + 1j * root.K0 * state.psi
        closed = first_order_face_term_kerr(root.n0, root.K0, 1.0)
        assert abs(via_field - closed) <= 1e-8 * abs(closed)


class TestFirstOrderFaceTerm:
    def test_zero_law(self, root):
        assert first_order_face_term(root.n0, root.K0, 1.0, None) == 0.0

    def test_constant_law_elementary_integral(self, root):
        # for f == 1 the integral has the antiderivative
        # (1 - e^{-2inK})/(inK) + 2 e^{-inK}
        n0, K0 = root.n0, root.K0
        got = first_order_face_term(n0, K0, 1.0, lambda t: 1.0)
        nK = n0 * K0
        integral = (1.0 - cmath.exp(-2j * nK)) / (1j * nK) + 2.0 * cmath.exp(-1j * nK)
        c = (n0 + 1.0) / (2.0 * n0)
        want = -cmath.exp(1j * K0) * c * c * integral
        assert abs(got - want) <= 1e-10 * abs(want)

    def test_oracle_triangle(self, root):
        # quadrature, Kerr closed form, and the field-correction route agree
        quad = first_order_face_term(root.n0, root.K0, 1.0, kerr_law)
        closed = first_order_face_term_kerr(root.n0, root.K0, 1.0)
        state = first_order_field(0.0, root.n0, root.K0, 1.0, kerr_law)
        field = state.dpsi + 1j * root.K0 * state.psi
        assert abs(quad - closed) <= 1e-8 * abs(closed)
        assert abs(field - closed) <= 1e-8 * abs(closed)
        assert abs(field - quad) <= 1e-8 * abs(quad)

    def test_amplitude_scaling_is_cubic(self, root):
        one = first_order_face_term_kerr(root.n0, root.K0, 1.0)
        two = first_order_face_term_kerr(root.n0, root.K0, 2.0)
        assert abs(two - 8.0 * one) <= 1e-12 * abs(two)

    def test_regime_check(self):
        with pytest.raises(InvalidRegimeError) as info:
            first_order_face_term_kerr(3.0 - 0.01j, 10.0, 1.0)
        assert info.value.residual > 1e-10
        # explicit opt-out evaluates the formula anyway
        val = first_order_face_term_kerr(3.0 - 0.01j, 10.0, 1.0, check=False)
        assert val != 0.0

    def test_weak_absorption_form_linear_approach(self, root):
        # artificial kappa scaling: the exact closed form approaches the
        # weak-absorption one linearly as kappa -> 0
        eta0, K0 = root.eta0, root.K0
        gaps = []
        for s in (1.0, 0.5, 0.25):
            kappa = root.kappa0 * s
            n = complex(eta0, kappa)
            exact = first_order_face_term_kerr(n, K0, 1.0, check=False)
            weak = first_order_face_term_kerr_weak_absorption(eta0, kappa, K0, 1.0)
            gaps.append(abs(exact - weak) / abs(exact))
        assert 1.5 <= gaps[0] / gaps[1] <= 2.5
        assert 1.5 <= gaps[1] / gaps[2] <= 2.5


class TestFaceTermDerivatives:
    def test_against_central_differences(self, root):
        d = 1e-6
        dn_f, dK_f = face_term_derivatives(root.n0, root.K0, 1.0)

        def g_plus(n, K):
            return linear_face_terms(n, K, 1.0)[1]

        dn_fd = (g_plus(root.n0 + d, root.K0) - g_plus(root.n0 - d, root.K0)) / (2 * d)
        dK_fd = (g_plus(root.n0, root.K0 + d) - g_plus(root.n0, root.K0 - d)) / (2 * d)
        assert abs(dn_f - dn_fd) <= 1e-6 * abs(dn_fd)
        assert abs(dK_f - dK_fd) <= 1e-6 * abs(dK_fd)

    def test_weak_absorption_linear_approach(self, root):
        eta0, K0 = root.eta0, root.K0
        weak = face_term_derivatives_weak_absorption(eta0, K0, 1.0)
        gaps = []
        for s in (1.0, 0.5, 0.25):
            n = complex(eta0, root.kappa0 * s)
            exact = face_term_derivatives(n, K0, 1.0, check=False)
            gaps.append(abs(exact[0] - weak[0]) / abs(exact[0]))
        assert 1.5 <= gaps[0] / gaps[1] <= 2.5

    def test_regime_check(self):
        with pytest.raises(InvalidRegimeError):
            face_term_derivatives(2.0 - 0.01j, 5.0, 1.0)


class TestSolveShift:
    def test_zero_law_gives_zero_shift(self, root):
        shift = solve_shift(root.n0, root.K0, 1.0, None)
        assert shift.n1 == 0.0 and shift.K1 == 0.0

    def test_fix_wavenumber_solution(self, root):
        shift = solve_shift(root.n0, root.K0, 1.0, kerr_law)
        assert shift.K1 == 0.0
        g1 = first_order_face_term_kerr(root.n0, root.K0, 1.0)
        dn, _ = face_term_derivatives(root.n0, root.K0, 1.0)
        assert abs(shift.n1 + g1 / dn) <= 1e-14 * abs(shift.n1)
        assert shift.residual <= 1e-12 * abs(g1)

    def test_fix_real_index_solution(self, root):
        shift = solve_shift(root.n0, root.K0, 1.0, kerr_law,
                            ShiftConstraint.FIX_REAL_INDEX)
        assert shift.n1.real == 0.0
        g1 = first_order_face_term_kerr(root.n0, root.K0, 1.0)
        dn, dK = face_term_derivatives(root.n0, root.K0, 1.0)
        assert abs(dn * shift.n1 + dK * shift.K1 + g1) <= 1e-12 * abs(g1)

    def test_custom_ratio_reduces_to_fix_wavenumber_at_zero(self, root):
        fixed = solve_shift(root.n0, root.K0, 1.0, kerr_law)
        custom = solve_shift(root.n0, root.K0, 1.0, kerr_law,
                             ShiftConstraint.CUSTOM_RATIO, ratio=0.0)
        assert abs(custom.n1 - fixed.n1) <= 1e-12 * abs(fixed.n1)
        assert custom.K1 == 0.0

    def test_custom_ratio_requires_ratio(self, root):
        with pytest.raises(InvalidParameterError):
            solve_shift(root.n0, root.K0, 1.0, kerr_law, ShiftConstraint.CUSTOM_RATIO)

    def test_degenerate_ratio_detected(self, root):
        # choose the ratio that makes the two unknown directions parallel
        dn, dK = face_term_derivatives(root.n0, root.K0, 1.0)
        q = dn / dK
        lam = q.real / q.imag
        bad_ratio = (lam - 1j) * q
        assert abs(bad_ratio.imag) < 1e-9 * abs(bad_ratio)
        with pytest.raises(DegenerateParameterError):
            solve_shift(root.n0, root.K0, 1.0, kerr_law,
                        ShiftConstraint.CUSTOM_RATIO, ratio=bad_ratio.real)

    def test_kerr_shift_reproduces_threshold_bracket(self, root):
        # assemble the gain from the exact first-order pipeline and compare
        # with the weak-absorption threshold law
        sigma, n_plus = 1e-4, 1.0
        gamma = -root.K0 ** 2 * sigma
        shift = solve_shift(root.n0, root.K0, n_plus, kerr_law)
        report = modified_gain(shift, root.n0, root.K0, 1.0, gamma)
        bracket_pipeline = report.g / report.g0 - 1.0
        g_closed = kerr_threshold(root.eta0, root.K0, sigma, abs(n_plus),
                                  simplified=False)
        bracket_closed = g_closed / threshold_gain_weak_absorption(root.eta0) - 1.0
        assert bracket_pipeline == pytest.approx(bracket_closed, rel=2e-2)
        assert bracket_pipeline > 0.0


class TestModifiedGain:
    def test_zero_gamma(self, root):
        shift = solve_shift(root.n0, root.K0, 1.0, kerr_law)
        report = modified_gain(shift, root.n0, root.K0, 1.0, 0.0)
        assert report.g == report.g0
        assert report.excess == 0.0
        assert report.warning is None

    def test_kerr_increases_gain(self, root):
        sigma = 1e-4
        gamma = -root.K0 ** 2 * sigma
        shift = solve_shift(root.n0, root.K0, 1.0, kerr_law)
        report = modified_gain(shift, root.n0, root.K0, 1.0, gamma)
        assert report.g > report.g0

    def test_out_of_regime_warning(self, root):
        shift = solve_shift(root.n0, root.K0, 1.0, kerr_law)
        big_gamma = 0.2 * abs(root.kappa0 / shift.kappa1)
        report = modified_gain(shift, root.n0, root.K0, 1.0, big_gamma)
        assert report.warning is not None


class TestThresholdAndIntensity:
    def test_zero_amplitude_keeps_threshold(self):
        g = kerr_threshold(3.0, 10.0, 1e-13, 0.0)
        assert g == threshold_gain_weak_absorption(3.0)

    def test_positive_correction(self):
        g = kerr_threshold(3.0, 10.0, 1e-13, 3e4)
        assert g > threshold_gain_weak_absorption(3.0)

    def test_inverse_pair_identity(self):
        random.seed(3)
        for _ in range(20):
            eta0 = random.uniform(1.5, 4.0)
            sigma = 10 ** random.uniform(-14, -12)
            n2 = 10 ** random.uniform(6, 9)
            g0 = threshold_gain_weak_absorption(eta0)
            g = kerr_threshold(eta0, 1.0, sigma, math.sqrt(n2))
            res = emitted_intensity(eta0, g, g0, sigma)
            assert 2.0 * res.intensity == pytest.approx(n2, rel=1e-10)

    def test_onset_gives_zero(self):
        g0 = threshold_gain_weak_absorption(3.0)
        res = emitted_intensity(3.0, g0, g0, 1e-13)
        assert res.intensity == 0.0
        assert res.below_threshold

    def test_linearity_in_excess(self):
        g0 = 1.0
        one = emitted_intensity(3.0, g0 * (1 + 1e-3), g0, 1e-13).intensity
        two = emitted_intensity(3.0, g0 * (1 + 2e-3), g0, 1e-13).intensity
        assert two == pytest.approx(2.0 * one, rel=1e-12)

    def test_validity_gauge_magnitude(self):
        # sigma = 1e-13 cm^2/W at |n_plus|^2 = 1e9 W/cm^2 gives gauge 1e-4
        g0 = threshold_gain_weak_absorption(3.0)
        g = kerr_threshold(3.0, 1.0, 1e-13, math.sqrt(1e9))
        res = emitted_intensity(3.0, g, g0, 1e-13)
        assert res.validity_gauge == pytest.approx(1e-4, rel=1e-9)
        assert res.warning is None

    def test_gauge_warning_above_flag(self):
        g0 = threshold_gain_weak_absorption(3.0)
        res = emitted_intensity(3.0, g0 * 1.1, g0, 1e-10)
        assert res.validity_gauge > 1e-3
        assert res.warning is not None

    def test_unsupported_sigma(self):
        with pytest.raises(InvalidRegimeError):
            emitted_intensity(3.0, 2.0, 1.0, 0.0)


class TestLeftEmission:
    def test_linear_root_is_symmetric(self, root):
        dev = left_emission_check(root.n0, root.K0, 0.0, None, 1.0,
                                  ShootingConfig(steps=4096))
        assert dev <= 1e-8

    def test_untuned_deviation_is_first_order(self, root):
        devs = []
        for sigma in (1e-4, 5e-5):
            gamma = -root.K0 ** 2 * sigma
            devs.append(left_emission_check(root.n0, root.K0, gamma, kerr_law,
                                            1.0, ShootingConfig(steps=4096)))
        assert 1.8 <= devs[0] / devs[1] <= 2.2


class TestAdaptiveQuad:
    def test_entire_integrand(self):
        val = adaptive_quad(lambda x: cmath.exp(2j * x), 0.0, 1.0)
        want = (cmath.exp(2j) - 1.0) / 2j
        assert abs(val - want) <= 1e-12

    def test_reversed_orientation(self):
        val = adaptive_quad(lambda x: x * x, 1.0, 0.0)
        assert val == pytest.approx(-1.0 / 3.0, rel=1e-12)

    def test_nonconvergence_reports_estimate(self):
        with pytest.raises(QuadratureError) as info:
            adaptive_quad(lambda x: math.sin(5e4 * x), 0.0, 1.0,
                          initial_panels=1, max_refinements=1)
        assert info.value.estimate is not None

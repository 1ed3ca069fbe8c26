"""Singularity constants, closed strip forms, wedge expansion.

Independent oracles:
  - the expansion coefficients A_k come from sympy's Taylor division of
    1/(cosh t - 1), frozen against the rational recursion for k <= 20;
  - the weight integral has the closed form Gamma(a+1) zeta(a) / 2^a
    (expand 1/(2 sinh^2 t) as 2 sum n e^{-2nt} and integrate term by
    term; continue in a), evaluated through scipy's zeta plus the
    functional equation, and compared against the quadrature route on
    both the direct and the regularized branches;
  - frozen rational anchors: A_1 = -1/12, A_2 = 1/240, c_0 = -1/2,
    c_2 = pi^2/12, C_0 = 1/(4 sqrt(pi)), C_{-1} = 1/12, C_{-3} = 1/30.
"""

import math
from fractions import Fraction

import pytest
import sympy as sp
from scipy.special import zeta as _scipy_zeta

from arborlab.analytic import (
    WEDGE_K,
    WEDGE_L,
    alpha_branch,
    c_alpha,
    critical_point,
    eval_Dm,
    eval_Ln,
    eval_Xm,
    laurent_coeffs,
    leading_constant,
    log_amplitude,
    pole_residue,
    truncated_Wn,
    wedge_coefficients,
)
from arborlab.errors import (
    AtBranchPointError,
    AtPoleError,
    DivergentError,
    LogCaseError,
    UnsupportedError,
)


def zeta_ext(s: float) -> float:
    """Riemann zeta on the real line via reflection below s = 1."""
    if s > 1:
        return float(_scipy_zeta(s))
    if s == 0:
        return -0.5
    return (2 ** s * math.pi ** (s - 1) * math.sin(math.pi * s / 2)
            * math.gamma(1 - s) * float(_scipy_zeta(1 - s)))


def weight_integral_closed_form(a: float) -> float:
    return math.gamma(a + 1) * zeta_ext(a) / 2 ** a


# --- expansion coefficients ----------------------------------------------


class TestLaurentCoefficients:
    def test_frozen_anchors(self):
        a = laurent_coeffs(3)
        assert a[0] == 1
        assert a[1] == Fraction(-1, 12)
        assert a[2] == Fraction(1, 240)
        assert a[3] == Fraction(-1, 6048)

    def test_against_taylor_division(self):
        t = sp.symbols("t")
        ser = sp.series(1 / (sp.cosh(t) - 1), t, 0, 44).removeO()
        poly = sp.expand(ser * t ** 2 / 2)
        ours = laurent_coeffs(20)
        for k in range(21):
            ref = sp.nsimplify(poly.coeff(t, 2 * k))
            assert Fraction(str(ref)) == ours[k], f"k={k}"

    def test_truncation_evaluates(self):
        assert eval_Ln(1, 2.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
        # deep truncations converge to the generating function itself
        exact = 1.0 / (math.cosh(1.0) - 1.0)
        assert eval_Ln(8, 1.0) == pytest.approx(exact, rel=1e-12)

    def test_log_amplitude_values(self):
        # -2^(2n-1) A_n: the coefficient in front of the log singularity
        assert log_amplitude(0) == Fraction(-1, 2)
        assert log_amplitude(1) == Fraction(1, 6)
        assert log_amplitude(2) == Fraction(-1, 30)


# --- the weight integral -------------------------------------------------


class TestWeightIntegral:
    @pytest.mark.parametrize("a", [1.5, 2.0, 3.0, 3.7, 5.0])
    def test_direct_branch_matches_zeta_form(self, a):
        got = c_alpha(a)
        assert got.value == pytest.approx(weight_integral_closed_form(a),
                                          rel=1e-12)
        assert got.error_estimate < 1e-10

    @pytest.mark.parametrize("a", [0.0, 0.5, -0.5, -2.5, -4.5])
    def test_regularized_branch_matches_zeta_form(self, a):
        got = c_alpha(a)
        assert got.value == pytest.approx(weight_integral_closed_form(a),
                                          rel=1e-11)

    def test_frozen_values(self):
        assert c_alpha(0.0).value == pytest.approx(-0.5, abs=1e-9)
        assert c_alpha(2.0).value == pytest.approx(math.pi ** 2 / 12,
                                                   abs=1e-9)

    @pytest.mark.parametrize("a", [1.0, -1.0, -3.0, -5.0])
    def test_boundary_exponents_raise(self, a):
        with pytest.raises(LogCaseError):
            c_alpha(a)

    def test_branch_classification(self):
        assert alpha_branch(2.0)[0] == "direct"
        assert alpha_branch(0.5) == ("regularized", 0)
        assert alpha_branch(-2.5) == ("regularized", 1)
        assert alpha_branch(-1.0)[0] == "log"
        assert alpha_branch(1.0)[0] == "log"

    def test_error_estimate_is_honest(self):
        for a in (2.0, -0.5, -2.5):
            got = c_alpha(a)
            assert abs(got.value - weight_integral_closed_form(a)) <= max(
                got.error_estimate, 1e-12)


class TestLeadingConstant:
    def test_frozen_values(self):
        assert leading_constant(0.0).value == pytest.approx(
            1.0 / (4 * math.sqrt(math.pi)), abs=1e-10)
        assert leading_constant(2.0).value == pytest.approx(
            math.pi ** 1.5 / 12, abs=1e-9)
        assert leading_constant(-1.0).value == pytest.approx(1.0 / 12,
                                                             abs=1e-12)
        assert leading_constant(-3.0).value == pytest.approx(1.0 / 30,
                                                             abs=1e-12)

    def test_algebraic_cross_check(self):
        # generic branch is c_alpha over Gamma((alpha-1)/2); at alpha=0
        # both factors are known in closed form
        c0 = c_alpha(0.0).value
        assert leading_constant(0.0).value == pytest.approx(
            c0 / math.gamma(-0.5), rel=1e-12)

    def test_formula_branch_meets_generic_limit(self):
        # approaching the boundary from either side lands on the closed
        # form within the O(eps) drift of the continued integrand
        want = leading_constant(-1.0).value
        for eps in (1e-4, 1e-5):
            for side in (+eps, -eps):
                near = leading_constant(-1.0 + side).value
                assert near == pytest.approx(want, rel=5e-3)

    def test_alpha_one_unsupported(self):
        with pytest.raises(UnsupportedError):
            leading_constant(1.0)

    def test_provenance_tags(self):
        assert leading_constant(2.0).provenance == "quadrature"
        assert leading_constant(-1.0).provenance == "formula"


# --- closed strip forms --------------------------------------------------


class TestStripForms:
    def test_first_strip_is_identity(self):
        for g in (0.1, 0.2 + 0.1j, -0.3):
            assert eval_Xm(1, g) == pytest.approx(g, abs=1e-15)

    def test_recursion_step(self):
        # X_{m+1} = g / (1 - X_m), away from poles
        for m in (1, 2, 7, 19):
            for g in (0.11, 0.2 - 0.07j, 0.03 + 0.21j):
                lhs = eval_Xm(m + 1, g)
                rhs = g / (1 - eval_Xm(m, g))
                assert lhs == pytest.approx(rhs, rel=1e-11)

    def test_fixed_point_at_small_g(self):
        # deep strips converge to the smaller root of x(1-x) = g
        g = 0.2
        want = (1 - math.sqrt(1 - 4 * g)) / 2
        assert eval_Xm(50, g).real == pytest.approx(want, rel=1e-14)
        assert abs(eval_Xm(50, g).imag) < 1e-15

    def test_zero_argument(self):
        assert eval_Xm(12, 0.0) == 0

    def test_even_in_z(self):
        for m in (3, 8):
            a = eval_Xm(m, 0.4 + 0.2j, variable="z")
            b = eval_Xm(m, -0.4 - 0.2j, variable="z")
            assert a == pytest.approx(b, rel=1e-13)

    def test_pole_raises(self):
        with pytest.raises(AtPoleError):
            eval_Xm(3, critical_point(3))

    def test_denominator_anchor(self):
        assert eval_Dm(1, 0.5) == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_difference_identity(self):
        # X_m - X_{m-1} = z^2 / D_m; scale-aware because both sides
        # nearly cancel against the X magnitudes near the real axis
        for m in (2, 5, 12, 24):
            for z in (0.3, 0.3 + 0.2j, -0.55 + 0.1j, 0.05j):
                g = (1 - z * z) / 4
                lhs = eval_Xm(m, g) - eval_Xm(m - 1, g)
                rhs = z * z / eval_Dm(m, z)
                scale = (abs(eval_Xm(m, g)) + abs(eval_Xm(m - 1, g))
                         + abs(rhs))
                assert abs(lhs - rhs) <= 1e-11 * scale

    def test_small_z_quadratic_behavior(self):
        for m in (2, 6):
            z = 1e-5
            assert eval_Dm(m, z) == pytest.approx(
                2 * m * (m + 1) * z * z, rel=1e-3)

    def test_branch_point_raises(self):
        with pytest.raises(AtBranchPointError):
            eval_Dm(4, 1.0)


class TestCriticalPoints:
    def test_frozen_values(self):
        assert critical_point(2) == pytest.approx(1.0, abs=1e-15)
        assert critical_point(3) == pytest.approx(0.5, abs=1e-15)

    def test_monotone_to_quarter(self):
        vals = [critical_point(m) for m in range(2, 40)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 0.25
        assert critical_point(200) == pytest.approx(0.25, abs=1e-3)

    def test_pole_location_in_denominator(self):
        for m in range(2, 10):
            g = critical_point(m)
            z = complex(0.0, math.sqrt(4 * g - 1))
            scale = abs(eval_Dm(m, 0.9 * z))
            assert abs(eval_Dm(m, z)) <= 1e-10 * scale

    def test_width_one_unsupported(self):
        with pytest.raises(UnsupportedError):
            critical_point(1)


# --- wedge expansion and residues ----------------------------------------


class TestWedge:
    def test_exposed_bound_constants(self):
        assert WEDGE_K == pytest.approx(2 * math.e ** 2, rel=1e-15)
        assert WEDGE_L == pytest.approx(2 * (math.e ** 3 + 1), rel=1e-15)

    def test_a_anchors(self):
        for m in (1, 3, 17):
            wc = wedge_coefficients(m, 4)
            assert wc.a[1] == 1
            assert wc.a[2] == Fraction(1, 2)

    def test_a_bounds(self):
        # 0 < a_k^m < e^2 and |a_k^m - 1/k!| <= e^(k+1)/m for k <= m
        for m in (5, 12, 40):
            wc = wedge_coefficients(m, min(m, 19))
            for k, ak in enumerate(wc.a):
                if k == 0:
                    continue
                assert 0 < float(ak) < math.e ** 2
                if k <= m:
                    drift = abs(float(ak - Fraction(1, math.factorial(k))))
                    assert drift <= math.e ** (k + 1) / m

    def test_first_correction_frozen(self):
        assert wedge_coefficients(1, 1).c[1] == Fraction(-1, 4)

    def test_corrections_converge_to_laurent(self):
        targets = laurent_coeffs(2)
        drift_prev = None
        for m in (10, 20, 40, 80):
            wc = wedge_coefficients(m, 2)
            for k in (1, 2):
                drift = abs(float(wc.c[k] - targets[k]))
                assert drift <= WEDGE_L / m
            drift1 = abs(float(wc.c[1] - targets[1]))
            if drift_prev is not None:
                assert drift1 < drift_prev
            drift_prev = drift1


class TestTruncatedSums:
    def test_divergent_combinations_raise(self):
        with pytest.raises(DivergentError):
            truncated_Wn(1.0, 0, 0.0, 100)
        with pytest.raises(DivergentError):
            truncated_Wn(-1.0, 1, 0.0, 100)

    def test_telescoping_half(self):
        prev_bound = None
        for m_trunc in (50, 200, 800):
            val, bound = truncated_Wn(0.0, 0, 0.0, m_trunc)
            assert bound > 0
            assert abs(val.real - 0.5) <= bound + 1e-12
            if prev_bound is not None:
                assert bound < prev_bound
            prev_bound = bound

    def test_value_is_finite_off_axis(self):
        val, bound = truncated_Wn(-2.0, 1, 0.02 + 0.01j, 300)
        assert math.isfinite(val.real) and math.isfinite(val.imag)
        assert math.isfinite(bound)


class TestPoleResidue:
    @pytest.mark.parametrize("a,want", [
        (0.0, 1.0),
        (-1.0, 0.5),
        (2.0, 4.0),
    ])
    def test_width_two_residues(self, a, want):
        got = pole_residue(2, a)
        assert got.value == pytest.approx(want, rel=1e-8)
        assert got.provenance == "residue"

    def test_width_three_residue(self):
        assert pole_residue(3, 0.0).value == pytest.approx(0.125, rel=1e-6)

    def test_error_estimate_reported(self):
        got = pole_residue(2, 0.0)
        assert 0 <= got.error_estimate < 1e-6

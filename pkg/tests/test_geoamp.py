"""Tests for the closed-form geometric scattering coefficients and assembly.

The frozen complex literals below were produced by an independent 40-digit
semi-analytic reduction of the defining integrals (mpmath, one analytic
Gaussian integration followed by adaptive 1D quadrature), not by the package
itself.  They pin every family and every piecewise branch of the four-index
coefficient.  Structural identities (forward collapse, eta scaling, weak
coupling limits) then tie the full assembly to those pinned values.
"""

import cmath
import math

import numpy as np
import pytest

from bumpscatter.defects import DefectSet, Kinematics, SingularMatrixError
from bumpscatter.geoamp import (
    GeoCoefficientInputs,
    I0_closed,
    Immnn_closed,
    Imn_closed,
    Jmn_closed,
    SingularAngleError,
    cross_section,
    f1_geometric,
)

RTOL = 1e-12


def _g(s, bigK, alphas, eta=0.1, lambda1=0.5, lambda2=-0.5, variant="kappa2"):
    return GeoCoefficientInputs(
        s=s, bigK=bigK, alphas=tuple(alphas), eta=eta,
        lambda1=lambda1, lambda2=lambda2, kmmnn_variant=variant,
    )


# ---------------------------------------------------------------------------
# Frozen values from the independent high-precision reduction


def test_no_defect_coefficient_frozen():
    gA = _g(0.5, 1.3, ())
    np.testing.assert_allclose(
        I0_closed(gA), -0.19913324257297171 + 0j, rtol=RTOL
    )
    gB = _g(1.0, 0.8, (), eta=0.05, lambda1=0.0, lambda2=-0.5)
    np.testing.assert_allclose(
        I0_closed(gB), -0.076399532821371047 + 0j, rtol=RTOL
    )


def test_two_index_coefficients_frozen():
    gA = _g(0.5, 1.3, (-1.1, 2.3))
    np.testing.assert_allclose(
        Imn_closed(gA, 0, 1),
        0.11789777508713939 + 0.15984319862128379j, rtol=RTOL,
    )
    np.testing.assert_allclose(
        Imn_closed(gA, 1, 0),
        -0.30026255275470098 - 0.26206901713963909j, rtol=RTOL,
    )
    np.testing.assert_allclose(
        Jmn_closed(gA, 0, 1),
        -0.30186119067103878 - 0.29480034340769246j, rtol=RTOL,
    )
    gB = _g(1.0, 0.8, (0.0, 3.0), eta=0.05, lambda1=0.0, lambda2=-0.5)
    np.testing.assert_allclose(
        Imn_closed(gB, 0, 1),
        0.056340089987212648 + 0.051589656711318474j, rtol=RTOL,
    )
    np.testing.assert_allclose(
        Jmn_closed(gB, 1, 0),
        0.074270228334897465 - 0.070819576196999051j, rtol=RTOL,
    )


def test_four_index_coefficient_frozen_all_branches():
    # Bra kink below ket kink.
    g1 = _g(0.5, 1.3, (-1.1, -0.4, 1.7, 2.3))
    np.testing.assert_allclose(
        Immnn_closed(g1, 0, 1, 3, 2),
        0.035852601215118227 - 0.22458866569958005j, rtol=RTOL,
    )
    # Coincident bra and ket kinks (the branch with the delta-line term).
    g2 = _g(0.5, 1.3, (-2.0, -1.1, 0.6))
    np.testing.assert_allclose(
        Immnn_closed(g2, 1, 2, 1, 0),
        -0.21295348294919494 + 0.36965615517354294j, rtol=RTOL,
    )
    # Bra kink above ket kink.
    g3 = _g(0.5, 1.3, (-2.0, -1.1, 0.6, 2.3))
    np.testing.assert_allclose(
        Immnn_closed(g3, 3, 2, 1, 0),
        0.048392675433779099 + 0.16395162712811578j, rtol=RTOL,
    )
    g4 = _g(1.0, 0.8, (0.0, 3.0), eta=0.05, lambda1=0.0, lambda2=-0.5)
    np.testing.assert_allclose(
        Immnn_closed(g4, 1, 1, 1, 1),
        -0.011187530996687386 + 0.12831855305234879j, rtol=RTOL,
    )


# ---------------------------------------------------------------------------
# Structural identities


def test_zero_momentum_transfer_collapses_all_families():
    # At s = 0 the kink phases disappear and every coefficient reduces to
    # the same Gaussian moment, i.e. the no-defect value.
    g = _g(0.0, 2.0, (-2.0, -0.5), lambda1=0.5, lambda2=0.5)
    ref = I0_closed(g)
    np.testing.assert_allclose(ref, -0.47123889803846902 + 0j, rtol=RTOL)
    for m in (0, 1):
        for n in (0, 1):
            np.testing.assert_allclose(Imn_closed(g, m, n), ref, rtol=1e-13)
            np.testing.assert_allclose(Jmn_closed(g, m, n), ref, rtol=1e-13)
    np.testing.assert_allclose(Immnn_closed(g, 0, 1, 1, 0), ref, rtol=1e-13)
    np.testing.assert_allclose(Immnn_closed(g, 1, 1, 1, 1), ref, rtol=1e-13)


def test_no_defect_coefficient_substitutions():
    # s = 0 with both curvature weights off: -pi eta K^2 / 2.
    for bigK in (0.5, 1.0, 3.0):
        g = _g(0.0, bigK, (), eta=0.07, lambda1=0.0, lambda2=0.0)
        np.testing.assert_allclose(
            I0_closed(g), -math.pi * 0.07 * bigK**2 / 2.0, rtol=1e-12
        )
    # Backscattering at K = 1 with the physical weights: -pi eta e^{-1} / 4.
    g = _g(1.0, 1.0, (), eta=0.07, lambda1=0.5, lambda2=-0.5)
    np.testing.assert_allclose(
        I0_closed(g), -math.pi * 0.07 * math.exp(-1.0) / 4.0, rtol=1e-12
    )


def test_no_defect_coefficient_is_real():
    for s in (0.0, 0.3, 0.8, 1.0):
        val = I0_closed(_g(s, 1.7, ()))
        assert val.imag == 0.0


# ---------------------------------------------------------------------------
# Full assembly


def test_flat_plane_backscattering_example():
    kin = Kinematics(bigK=1.0, theta0=0.0, theta=math.pi)
    f1 = f1_geometric(kin, DefectSet(), 0.1, 0.5, -0.5)
    np.testing.assert_allclose(
        f1, 0.004075308326083077 + 0.004075308326083076j, rtol=1e-13
    )
    np.testing.assert_allclose(abs(f1), 0.0057633563055986825, rtol=1e-13)


def test_assembly_regression_pins():
    # Pinned outputs of the validated implementation (guards transcription).
    kin = Kinematics(bigK=1.0, theta0=0.0, theta=math.radians(50.0))
    ds = DefectSet([-3.0, 3.0], [1.0, 1.0])
    np.testing.assert_allclose(
        f1_geometric(kin, ds, 0.1, 0.5, -0.5),
        0.03493488979951764 + 0.029627013363504668j, rtol=1e-12,
    )
    np.testing.assert_allclose(
        cross_section(kin, ds, 0.1, 0.5, -0.5),
        0.002098206446145726, rtol=1e-12,
    )
    kin3 = Kinematics(bigK=1.7, theta0=0.3, theta=2.0)
    np.testing.assert_allclose(
        f1_geometric(kin3, DefectSet([1.5], [2.0]), 0.1, 0.5, -0.5),
        -0.02298193494757228 - 0.0009570921204641713j, rtol=1e-12,
    )


def test_amplitude_is_linear_in_eta():
    kin = Kinematics(bigK=1.2, theta0=0.1, theta=2.2)
    ds = DefectSet([-1.0, 2.0], [1.5, 0.7])
    f_eta = f1_geometric(kin, ds, 0.1, 0.5, -0.5)
    f_2eta = f1_geometric(kin, ds, 0.2, 0.5, -0.5)
    # eta multiplies every term linearly and scaling by 2 is exact in
    # floating point, so this holds to the last bit.
    assert f_2eta == 2.0 * f_eta
    assert f1_geometric(kin, ds, 0.0, 0.5, -0.5) == 0.0


def test_weak_coupling_limit_matches_flat_plane():
    kin = Kinematics(bigK=1.0, theta0=0.0, theta=2.5)
    free = f1_geometric(kin, DefectSet(), 0.1, 0.5, -0.5)
    weak = f1_geometric(kin, DefectSet([0.7], [1e-8]), 0.1, 0.5, -0.5)
    np.testing.assert_allclose(weak, free, rtol=1e-6)


def test_negligible_second_defect_matches_single():
    kin = Kinematics(bigK=1.3, theta0=0.0, theta=1.9)
    one = f1_geometric(kin, DefectSet([0.0], [1.0]), 0.1, 0.5, -0.5)
    two = f1_geometric(kin, DefectSet([0.0, 5.0], [1.0, 1e-12]), 0.1, 0.5, -0.5)
    np.testing.assert_allclose(two, one, rtol=1e-8)


def test_right_angle_is_averaged_for_degenerate_outgoing_matrix():
    kin = Kinematics(bigK=1.0, theta0=0.0, theta=math.pi / 2)
    ds = DefectSet([-3.0, 3.0], [1.0, 1.0])
    # Without regularization the outgoing defect matrix is singular.
    with pytest.raises(SingularMatrixError):
        f1_geometric(kin, ds, 0.1, 0.5, -0.5, regularize=False)
    f_reg = f1_geometric(kin, ds, 0.1, 0.5, -0.5)
    assert cmath.isfinite(f_reg)
    # The averaged value sits between the two flanking angles.
    eps = 2e-6
    f_lo = f1_geometric(
        Kinematics(1.0, 0.0, math.pi / 2 - eps), ds, 0.1, 0.5, -0.5
    )
    f_hi = f1_geometric(
        Kinematics(1.0, 0.0, math.pi / 2 + eps), ds, 0.1, 0.5, -0.5
    )
    mid = 0.5 * (f_lo + f_hi)
    np.testing.assert_allclose(f_reg, mid, rtol=1e-3)


def test_right_angle_single_defect_needs_no_averaging():
    # N = 1 keeps the outgoing matrix well conditioned at 90 degrees.
    kin = Kinematics(bigK=1.0, theta0=0.0, theta=math.pi / 2)
    ds = DefectSet([0.5], [1.0])
    f_direct = f1_geometric(kin, ds, 0.1, 0.5, -0.5, regularize=False)
    f_reg = f1_geometric(kin, ds, 0.1, 0.5, -0.5)
    np.testing.assert_allclose(f_reg, f_direct, rtol=1e-12)


def test_step_term_variants_differ():
    # The two transcription variants of the four-index step term must not
    # agree once the bra kink sits strictly below the ket kink.
    g_k = _g(0.6, 1.1, (-1.5, 0.0, 2.0), variant="kappa2")
    g_x = _g(0.6, 1.1, (-1.5, 0.0, 2.0), variant="x2")
    a = Immnn_closed(g_k, 0, 1, 2, 1)
    b = Immnn_closed(g_x, 0, 1, 2, 1)
    assert abs(a - b) > 1e-6 * max(abs(a), abs(b))
    # The full amplitude inherits the difference.
    kin = Kinematics(bigK=1.1, theta0=0.0, theta=1.2)
    ds = DefectSet([-1.5, 2.0], [1.0, 1.0])
    fa = f1_geometric(kin, ds, 0.1, 0.5, -0.5, kmmnn_variant="kappa2")
    fb = f1_geometric(kin, ds, 0.1, 0.5, -0.5, kmmnn_variant="x2")
    assert abs(fa - fb) > 1e-8


# ---------------------------------------------------------------------------
# Guard rails


def test_defect_offset_window_is_enforced():
    with pytest.raises(OverflowError):
        _g(0.5, 1.0, (27.0,))
    kin = Kinematics(bigK=1.0, theta0=0.0, theta=2.0)
    with pytest.raises(OverflowError):
        f1_geometric(kin, DefectSet([-30.0], [1.0]), 0.1, 0.5, -0.5)
    # The documented window itself is usable.
    f = f1_geometric(kin, DefectSet([25.0], [1.0]), 0.1, 0.5, -0.5)
    assert cmath.isfinite(f)


def test_cross_section_refuses_delta_supported_rays():
    ds = DefectSet([0.0], [1.0])
    with pytest.raises(SingularAngleError):
        cross_section(Kinematics(1.0, 0.2, 0.2), ds, 0.1, 0.5, -0.5)
    with pytest.raises(SingularAngleError):
        cross_section(
            Kinematics(1.0, 0.2, math.pi - 0.2), ds, 0.1, 0.5, -0.5
        )
    # Just off the rays it is an ordinary number.
    val = cross_section(Kinematics(1.0, 0.2, 0.21), ds, 0.1, 0.5, -0.5)
    assert val >= 0.0


def test_cross_section_is_squared_amplitude():
    kin = Kinematics(bigK=1.4, theta0=0.1, theta=2.0)
    ds = DefectSet([-0.5, 1.0], [1.0, 2.0])
    f1 = f1_geometric(kin, ds, 0.1, 0.5, -0.5)
    np.testing.assert_allclose(
        cross_section(kin, ds, 0.1, 0.5, -0.5), abs(f1) ** 2, rtol=1e-14
    )


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        _g(0.5, 1.0, (0.0,), variant="bogus")
    with pytest.raises(ValueError):
        _g(0.5, 1.0, (0.0,), eta=-0.1)
    with pytest.raises(ValueError):
        _g(0.5, -1.0, (0.0,))
    with pytest.raises(ValueError):
        _g(float("nan"), 1.0, (0.0,))

"""Phase curves: closed form, pipeline, jumps, singularities, critique observables."""

from __future__ import annotations

import math

import numpy as np
import pytest

import spinphase as sp

PI = math.pi
TWO_PI = 2.0 * math.pi
DEG = math.radians


def test_closed_form_pole_is_exactly_linear():
    # the pole picks up half the precession angle, no wiggle at all
    for phi in np.linspace(-4 * PI, 4 * PI, 41):
        assert sp.closed_form_phase(0.0, float(phi)) == pytest.approx(0.5 * phi, abs=1e-12)
    assert sp.closed_form_phase(0.0, PI / 2) == pytest.approx(PI / 4)


def test_closed_form_full_turn_gives_hemisphere_signed_pi():
    assert sp.closed_form_phase(DEG(70.5), TWO_PI) == pytest.approx(PI, abs=1e-12)
    assert sp.closed_form_phase(DEG(109.5), TWO_PI) == pytest.approx(-PI, abs=1e-12)


def test_closed_form_third_polar_angle_half_turn():
    # overlap there is 0.5i (direct arithmetic), so the continued phase is +pi/2
    assert sp.closed_form_phase(PI / 3, PI) == pytest.approx(PI / 2, abs=1e-12)


def test_closed_form_equator_alternates_and_goes_undefined():
    assert sp.closed_form_phase(PI / 2, PI) is None
    assert sp.closed_form_phase(PI / 2, 3 * PI) is None
    assert sp.closed_form_phase(PI / 2, 0.5) == pytest.approx(0.0)
    assert sp.closed_form_phase(PI / 2, PI + 0.5) == pytest.approx(PI)
    assert sp.closed_form_phase(PI / 2, 3 * PI + 0.5) == pytest.approx(0.0)


def test_closed_form_hemisphere_antisymmetry_grid():
    for theta_deg in range(10, 90, 10):
        for phi in np.linspace(0.0, 4 * PI, 161):
            upper = sp.closed_form_phase(DEG(theta_deg), float(phi))
            lower = sp.closed_form_phase(DEG(180 - theta_deg), float(phi))
            assert abs(upper + lower) < 1e-9


def test_closed_form_periodic_increment():
    for theta_deg in (10, 40, 80, 100, 140, 170):
        sign = 1.0 if theta_deg < 90 else -1.0
        for phi in np.linspace(0.0, 4 * PI, 37):
            a = sp.closed_form_phase(DEG(theta_deg), float(phi))
            b = sp.closed_form_phase(DEG(theta_deg), float(phi) + TWO_PI)
            assert abs(b - a - sign * PI) < 1e-9


def test_build_curve_matches_closed_form():
    curve = sp.build_curve(DEG(70.5), 0.0, 4 * PI, 2000)
    assert all(s.phase is not None for s in curve.samples)
    worst = max(
        abs(s.phase - sp.closed_form_phase(DEG(70.5), s.phi)) for s in curve.samples
    )
    assert worst < 1e-9
    assert curve.jumps == ()


def test_build_curve_equatorial_undefined_neighborhood_and_jump():
    curve = sp.build_curve(PI / 2, 0.0, TWO_PI, 2000)
    undefined = [s for s in curve.samples if s.phase is None]
    assert len(undefined) >= 1
    assert all(abs(s.phi - PI) < 1e-6 for s in undefined)
    assert len(curve.jumps) == 1
    jump = curve.jumps[0]
    assert abs(jump.magnitude - PI) < 1e-3
    assert jump.resolvable is False and jump.sign is None
    # defined values sit on the principal 0/pi alternation
    for s in curve.samples:
        if s.phase is None:
            continue
        target = 0.0 if s.phi < PI else PI
        assert abs(s.phase - target) < 1e-9


def test_build_curve_equatorial_straddling_grid_still_reports_unresolved_jump():
    # 1999 intervals never sample phi = pi itself; the jump shows up between
    # two defined neighbors whose overlap chord passes through zero
    curve = sp.build_curve(PI / 2, 0.0, TWO_PI, 1999)
    assert all(s.phase is not None for s in curve.samples)
    assert len(curve.jumps) == 1
    jump = curve.jumps[0]
    assert abs(jump.phi_location - PI) < 2e-3
    assert abs(jump.magnitude - PI) < 1e-6
    assert jump.sign is None and jump.resolvable is False


def test_build_curve_equatorial_two_turns_alternation():
    curve = sp.build_curve(PI / 2, 0.0, 2 * TWO_PI, 4000)
    assert len(curve.jumps) == 2
    for s in curve.samples:
        if s.phase is None:
            continue
        target = PI if PI < s.phi < 3 * PI else 0.0
        assert abs(s.phase - target) < 1e-9


def test_build_curve_near_equator_is_steep_but_continuous():
    # 90 deg - 1 deg: defined everywhere, rises by ~pi around phi = pi
    up = sp.build_curve(DEG(89.0), 0.0, TWO_PI, 4000)
    assert all(s.phase is not None for s in up.samples)
    assert up.jumps == ()
    rise = up.samples[-1].phase - up.samples[0].phase
    assert rise == pytest.approx(PI, abs=1e-9)
    # 90 deg + 1 deg mirrors it downward (lower hemisphere falls by pi)
    down = sp.build_curve(DEG(91.0), 0.0, TWO_PI, 4000)
    fall = down.samples[-1].phase - down.samples[0].phase
    assert fall == pytest.approx(-PI, abs=1e-9)


def test_build_curve_step_size_violation_raises():
    with pytest.raises(sp.StepSizeError):
        sp.build_curve(DEG(89.99), 0.0, TWO_PI, 101)


def test_build_curve_rejects_bad_grid():
    with pytest.raises(ValueError):
        sp.build_curve(1.0, 0.0, 1.0, 0)
    with pytest.raises(ValueError):
        sp.build_curve(1.0, 2.0, 1.0, 10)
    with pytest.raises(ValueError):
        sp.build_curve(1.0, 0.0, 1.0, 10, tol_orth=0.0)


def test_limit_consistency_toward_the_equator():
    # curves at 90 -+ eps converge to the equatorial alternation away from
    # phi = pi, while the steep +-pi step flips sign across the equator
    mask_halfwidth = 0.35
    prev_dev = math.inf
    for eps_deg in (1.0, 0.1, 0.01):
        upper = sp.build_curve(DEG(90.0 - eps_deg), 0.0, TWO_PI, 40000)
        lower = sp.build_curve(DEG(90.0 + eps_deg), 0.0, TWO_PI, 40000)
        dev = 0.0
        for s_up, s_lo in zip(upper.samples, lower.samples):
            if abs(s_up.phi - PI) <= mask_halfwidth:
                continue
            target = 0.0 if s_up.phi < PI else PI
            dev = max(dev, abs(s_up.phase - target))
            lower_target = 0.0 if s_lo.phi < PI else -PI
            dev = max(dev, abs(s_lo.phase - lower_target))
        assert dev < prev_dev
        assert dev < 12.0 * DEG(eps_deg)
        prev_dev = dev

        def step_across(curve):
            left = max(s.phase for s in curve.samples if s.phi < PI - mask_halfwidth)
            right = [s.phase for s in curve.samples if s.phi > PI + mask_halfwidth][0]
            return right - left

        assert step_across(upper) > 0.9 * PI
        assert step_across(lower) < -0.9 * PI


def test_detect_jumps_smooth_curve_has_none():
    curve = sp.build_curve(DEG(60.0), 0.0, TWO_PI, 2000)
    assert sp.detect_jumps(curve) == []
    # minimum visibility on that curve is cos(60 deg) = 0.5
    assert min(s.visibility for s in curve.samples) == pytest.approx(0.5, abs=1e-9)


def test_detect_jumps_equatorial_periodicity():
    curve = sp.build_curve(PI / 2, 0.0, 2 * TWO_PI, 4000)
    events = sp.detect_jumps(curve)
    assert len(events) == 2
    assert abs(events[0].phi_location - PI) < 1e-2
    assert abs(events[1].phi_location - 3 * PI) < 1e-2
    assert all(e.sign is None and not e.resolvable for e in events)


def test_near_singular_gap_on_coarse_grid_stays_unresolved():
    # within 1e-10 of the equator the visibility dips below the default
    # tolerance; on a grid whose flanks lean from pi by far less than the
    # pi tolerance, the sign is not data-determined and must stay unresolved
    theta = PI / 2 - 1e-10
    curve = sp.build_curve(theta, 0.0, TWO_PI, 20000)
    assert any(s.phase is None for s in curve.samples)
    assert len(curve.jumps) == 1
    assert curve.jumps[0].resolvable is False and curve.jumps[0].sign is None


def test_near_singular_gap_on_fine_grid_resolves_sign():
    # zooming into the dip until the flanking phases lean measurably away
    # from a pi difference makes the sign data-determined: + above the dip
    # for the upper hemisphere, - for the mirror state
    for theta, expected_sign in ((PI / 2 - 1e-10, 1), (PI / 2 + 1e-10, -1)):
        curve = sp.build_curve(theta, PI - 1e-6, PI + 1e-6, 2000)
        assert any(s.phase is None for s in curve.samples)
        assert len(curve.jumps) == 1
        jump = curve.jumps[0]
        assert jump.resolvable is True and jump.sign == expected_sign
        assert jump.magnitude < PI - 1e-3
        # the carried branch agrees with the continuation on both sides
        for s in curve.samples:
            if s.phase is None:
                continue
            assert abs(s.phase - sp.closed_form_phase(theta, s.phi)) < 1e-6


def test_singularity_locus_values():
    assert sp.singularity_locus(PI / 2, 0.0, 4 * PI) == [PI, 3 * PI]
    assert sp.singularity_locus(DEG(90.0), 0.0, 4 * PI) == [PI, 3 * PI]
    assert sp.singularity_locus(DEG(89.0), 0.0, 4 * PI) == []
    assert sp.singularity_locus(0.0, 0.0, 100.0) == []
    assert sp.singularity_locus(PI / 2, -PI, PI) == [-PI, PI]
    assert sp.singularity_locus(DEG(89.99), 0.0, 4 * PI) == []
    assert sp.singularity_locus(DEG(90.01), 0.0, 4 * PI) == []


def test_visibility_zero_only_on_equatorial_singular_points():
    # grid scan: off the equator the visibility stays strictly positive
    for theta_deg in range(0, 181, 5):
        theta = DEG(theta_deg)
        ref = sp.spinor_from_bloch(sp.BlochDirection(theta))
        min_vis = min(
            sp.pancharatnam_overlap(ref, sp.apply(sp.z_precession(float(phi)), ref)).visibility
            for phi in np.linspace(0.0, 4 * PI, 1601)
        )
        if theta_deg == 90:
            assert min_vis < 1e-12
        else:
            assert min_vis > 0.9 * abs(math.cos(theta))


def test_secular_wiggle_pole_has_no_wiggle():
    curve = sp.build_curve(0.0, 0.0, 2 * TWO_PI, 2000)
    slope, wiggle = sp.secular_wiggle_decomposition(curve)
    assert slope == 0.5
    assert max(abs(w) for _, w in wiggle) < 1e-12


def test_secular_wiggle_at_70p5():
    curve = sp.build_curve(DEG(70.5), 0.0, 2 * TWO_PI, 4000)
    slope, wiggle = sp.secular_wiggle_decomposition(curve)
    assert slope == 0.5
    # dense-grid maximization oracle over a quarter period of x = phi/2
    c = math.cos(DEG(70.5))
    xs = np.linspace(0.0, PI / 2, 2_000_001)
    oracle_max = float(np.max(np.abs(np.arctan(c * np.tan(xs[:-1])) - xs[:-1])))
    curve_max = max(abs(w) for _, w in wiggle)
    assert curve_max == pytest.approx(oracle_max, abs=1e-5)
    # wiggle is 2*pi periodic
    half = len(wiggle) // 2
    for (phi_a, w_a), (_, w_b) in zip(wiggle[:half], wiggle[half:]):
        assert abs(w_a - w_b) < 1e-9


def test_secular_wiggle_mirror_antisymmetry():
    upper = sp.build_curve(DEG(70.5), 0.0, TWO_PI, 2000)
    lower = sp.build_curve(DEG(109.5), 0.0, TWO_PI, 2000)
    slope_u, wig_u = sp.secular_wiggle_decomposition(upper)
    slope_l, wig_l = sp.secular_wiggle_decomposition(lower)
    assert slope_u == 0.5 and slope_l == -0.5
    for (_, wu), (_, wl) in zip(wig_u, wig_l):
        assert abs(wu + wl) < 1e-9


def test_secular_wiggle_rejects_equator_and_partial_periods():
    eq = sp.build_curve(PI / 2, 0.0, TWO_PI, 2000)
    with pytest.raises(ValueError):
        sp.secular_wiggle_decomposition(eq)
    partial = sp.build_curve(DEG(30.0), 0.0, PI, 500)
    with pytest.raises(ValueError):
        sp.secular_wiggle_decomposition(partial)


def test_measured_difference_full_turn_and_degeneracy():
    upper = sp.measured_difference_curve(DEG(70.5), 0.0, 4 * PI, 2000)
    lower = sp.measured_difference_curve(DEG(109.5), 0.0, 4 * PI, 2000)
    # 2*pi sits exactly on the grid (sample 1000 of 2000 over [0, 4*pi])
    at_turn_u = upper.samples[1000]
    at_turn_l = lower.samples[1000]
    assert at_turn_u.phi == pytest.approx(TWO_PI)
    assert at_turn_u.phase == pytest.approx(TWO_PI, abs=1e-9)
    assert at_turn_l.phase == pytest.approx(-TWO_PI, abs=1e-9)
    # while the true noncyclic phases at one turn are +-pi
    assert sp.closed_form_phase(DEG(70.5), TWO_PI) == pytest.approx(PI, abs=1e-9)
    assert sp.closed_form_phase(DEG(109.5), TWO_PI) == pytest.approx(-PI, abs=1e-9)
    # the two difference curves are not independent: they cancel pointwise
    for a, b in zip(upper.samples, lower.samples):
        assert abs(a.phase + b.phase) < 1e-9


def test_measured_difference_is_rotation_angle_plus_wiggle():
    theta = DEG(70.5)
    curve = sp.measured_difference_curve(theta, 0.0, 4 * PI, 2000)
    # sample 250 sits at phi = pi/2; wiggle oracle by direct evaluation
    s = curve.samples[250]
    assert s.phi == pytest.approx(PI / 2)
    wiggle = math.atan(math.cos(theta) * math.tan(PI / 4)) - PI / 4
    assert s.phase == pytest.approx(PI / 2 + wiggle, abs=1e-12)
    for s in curve.samples:
        rotation = sp.rotation_angle_on_sphere(theta, s.phi)
        assert abs(s.phase - rotation) <= abs(wiggle_bound(theta)) + 1e-12


def wiggle_bound(theta: float) -> float:
    c = abs(math.cos(theta))
    x = math.asin(math.sqrt(1.0 / (1.0 + c)))
    return abs(math.atan(c * math.tan(x)) - x)


def test_measured_difference_rejects_equator():
    with pytest.raises(ValueError):
        sp.measured_difference_curve(PI / 2, 0.0, TWO_PI, 100)


def test_rotation_angle_trivials():
    assert sp.rotation_angle_on_sphere(DEG(70.5), TWO_PI) == TWO_PI
    assert sp.rotation_angle_on_sphere(1.234, 0.0) == 0.0
    assert sp.rotation_angle_on_sphere(DEG(30.0), 1.0) == 1.0


def test_pipeline_matches_closed_form_across_hemispheres():
    for theta_deg in (5, 20, 40, 60, 80, 100, 120, 140, 160, 175):
        curve = sp.build_curve(DEG(theta_deg), 0.0, 4 * PI, 2000)
        worst = max(
            abs(s.phase - sp.closed_form_phase(DEG(theta_deg), s.phi))
            for s in curve.samples
        )
        assert worst < 1e-9, f"theta={theta_deg} deg deviates by {worst}"

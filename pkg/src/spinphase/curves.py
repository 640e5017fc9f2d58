"""Noncyclic phase curves versus precession angle.

Builds continuously monitored phase curves two ways, a closed form with exact
branch continuation and a numerical pipeline (evolve the spinor, take the
overlap phase, unwrap), and keeps the two honest against each other. Away
from the equator the curve is smooth with secular slope sgn(cos theta)/2 per
unit precession angle. On the equator the overlap vanishes at odd multiples
of pi: the phase is undefined there and the pi jump across the zero carries
no data-determined sign. Curves therefore transport undefined samples and
unresolved jumps as first-class values; nothing ever interpolates or guesses
a branch across them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .spinor import (
    ORTH_TOL_DEFAULT,
    TWO_PI,
    BlochDirection,
    apply,
    pancharatnam_overlap,
    spinor_from_bloch,
    z_precession,
)

# theta is treated as exactly equatorial inside this window; the physics is
# discontinuous there, so no gradual crossover is attempted.
EQUATOR_TOL = 1e-12

# A flanking phase difference counts as "a pi jump" within this tolerance
# when deciding whether its sign is resolvable from the data.
JUMP_PI_TOL = 1e-3


class StepSizeError(ValueError):
    """The phi grid is too coarse to track the branch between samples."""


@dataclass(frozen=True)
class PhasePoint:
    """One curve sample: precession angle, branch-continued phase, visibility.

    ``phase`` is ``None`` exactly when the visibility is below the curve's
    orthogonality tolerance.
    """

    phi: float
    phase: float | None
    visibility: float


@dataclass(frozen=True)
class JumpEvent:
    """A detected phase jump.

    ``sign`` is +1 or -1 when the data determines the direction and ``None``
    (unresolved) when it does not; ``resolvable`` is False exactly in the
    unresolved case.
    """

    phi_location: float
    magnitude: float
    sign: int | None
    resolvable: bool


@dataclass(frozen=True)
class PhaseCurve:
    """Uniformly sampled, branch-continued phase curve for one theta."""

    theta: float
    samples: tuple[PhasePoint, ...]
    jumps: tuple[JumpEvent, ...]
    tol_orth: float

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(phi, phase, visibility) arrays; undefined phases become NaN."""
        phi = np.array([s.phi for s in self.samples])
        phase = np.array(
            [s.phase if s.phase is not None else math.nan for s in self.samples]
        )
        vis = np.array([s.visibility for s in self.samples])
        return phi, phase, vis


def is_equatorial(theta: float) -> bool:
    """True when ``theta`` lies within EQUATOR_TOL of pi/2."""
    return abs(theta - 0.5 * math.pi) < EQUATOR_TOL


def _hemisphere_sign(theta: float) -> float:
    return 1.0 if math.cos(theta) > 0.0 else -1.0


def _axial_continued_phase(c: float, phi: float) -> float:
    """Continuous continuation of arg[cos(phi/2) + i c sin(phi/2)], zero at phi=0.

    Requires ``c != 0``. Each 2*pi of precession adds pi*sgn(c); within a
    period the value is arctan(c tan(phi/2)) evaluated on the branch that
    keeps the curve continuous.
    """
    k = math.floor((phi + math.pi) / TWO_PI)
    half = 0.5 * (phi - TWO_PI * k)
    return math.atan2(c * math.sin(half), math.cos(half)) + k * math.pi * math.copysign(1.0, c)


def closed_form_phase(
    theta: float, phi: float, tol_orth: float = ORTH_TOL_DEFAULT
) -> float | None:
    """Branch-continued noncyclic phase of the theta state after precession phi.

    Anchored at phase(0) = 0. For non-equatorial theta the continuation is
    defined for every phi and gains pi*sgn(cos theta) per full turn. For
    equatorial theta the overlap is real: the value alternates between the
    principal values 0 and pi, and is ``None`` (undefined) where the overlap
    magnitude |cos(phi/2)| falls below ``tol_orth``, i.e. at odd multiples
    of pi, the phase singularities.
    """
    BlochDirection(theta)  # range validation
    if is_equatorial(theta):
        c2 = math.cos(0.5 * phi)
        if abs(c2) < tol_orth:
            return None
        return 0.0 if c2 > 0.0 else math.pi
    return _axial_continued_phase(math.cos(theta), phi)


def _unwrap_phases(
    principal: list[float | None],
    equatorial: bool,
    phis: np.ndarray,
    context: str,
) -> list[float | None]:
    """Sequential nearest-branch continuation of principal phases.

    Between consecutive defined samples the branch is chosen to minimize the
    phase step; a step of pi/2 or more means either a too-coarse grid (raise,
    never guess) or, at the equator, the genuine pi jump (flagged downstream,
    value resumes on the principal branch). Across undefined gaps the
    accumulated branch offset carries over unchanged off the equator: the
    data before the gap still fixes the hemisphere's branch. On the equator
    each defined segment stays on its principal 0/pi alternation.
    """
    out: list[float | None] = [None] * len(principal)
    offset = 0.0
    prev: int | None = None
    for i, p in enumerate(principal):
        if p is None:
            continue
        if prev is None:
            out[i] = p  # anchor: the principal value of the first defined sample
            prev = i
            continue
        delta = p - principal[prev]
        m = round(delta / TWO_PI)  # banker's tie keeps the principal branch at +-pi
        adjusted = delta - TWO_PI * m
        gapped = (i - prev) > 1
        if gapped or abs(adjusted) >= 0.5 * math.pi:
            if not gapped and not equatorial:
                raise StepSizeError(
                    f"{context}: phase step {adjusted:.3f} rad between phi="
                    f"{phis[prev]:.6f} and phi={phis[i]:.6f} reaches pi/2; "
                    "refine the grid (more steps) instead of guessing the branch"
                )
            if equatorial:
                offset = 0.0
            out[i] = p + offset
        else:
            offset -= TWO_PI * m
            out[i] = p + offset
        prev = i
    return out


def _segment_min_abs(z0: complex, z1: complex) -> float:
    """Minimum modulus along the chord from z0 to z1 in the complex plane."""
    dz = z1 - z0
    denom = abs(dz) ** 2
    if denom == 0.0:
        return abs(z0)
    t = -((z0.real * dz.real) + (z0.imag * dz.imag)) / denom
    t = min(1.0, max(0.0, t))
    return abs(z0 + t * dz)


def build_curve(
    theta: float,
    phi_min: float,
    phi_max: float,
    steps: int,
    tol_orth: float = ORTH_TOL_DEFAULT,
) -> PhaseCurve:
    """Phase curve from the evolution pipeline on a uniform phi grid.

    ``steps`` counts uniform intervals, so the curve has ``steps + 1`` samples
    covering [phi_min, phi_max] inclusive. Samples with visibility below
    ``tol_orth`` are undefined; jumps are detected and annotated. Off the
    equator the result agrees with :func:`closed_form_phase` at every defined
    sample (for ranges starting at phi_min = 0, where both share the
    phase(0) = 0 anchor; other ranges anchor on the principal branch of the
    first defined sample).

    Raises :class:`StepSizeError` when the grid cannot separate branch
    tracking from a suspected jump.
    """
    if not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if not (math.isfinite(phi_min) and math.isfinite(phi_max)) or phi_max <= phi_min:
        raise ValueError(f"need finite phi_min < phi_max, got [{phi_min!r}, {phi_max!r}]")
    if not 0.0 < tol_orth < 1.0:
        raise ValueError(f"tol_orth must lie in (0, 1), got {tol_orth!r}")
    direction = BlochDirection(theta)
    reference = spinor_from_bloch(direction)

    phis = np.linspace(phi_min, phi_max, steps + 1)
    principal: list[float | None] = []
    visibility: list[float] = []
    for phi in phis:
        overlap = pancharatnam_overlap(
            reference, apply(z_precession(float(phi)), reference), tol_orth
        )
        principal.append(overlap.phase)
        visibility.append(overlap.visibility)

    unwrapped = _unwrap_phases(
        principal, is_equatorial(direction.theta), phis, f"build_curve(theta={theta})"
    )
    samples = tuple(
        PhasePoint(float(phi), phase, vis)
        for phi, phase, vis in zip(phis, unwrapped, visibility)
    )
    curve = PhaseCurve(direction.theta, samples, (), tol_orth)
    return replace(curve, jumps=tuple(detect_jumps(curve)))


def detect_jumps(
    curve: PhaseCurve, window: float | None = None, pi_tol: float = JUMP_PI_TOL
) -> list[JumpEvent]:
    """Phase jumps of a built curve.

    An event is any change exceeding pi/2 between consecutive defined samples,
    either across an undefined gap or within ``window`` (default: 1.5 grid
    spacings). The sign is unresolved exactly when the gap reaches below the
    curve's orthogonality tolerance, estimated from interior samples or from
    the chord of the flanking overlap values, and the flanking phases differ
    by pi within ``pi_tol``: a pi jump across a zero of visibility has no
    data-determined direction.
    """
    samples = curve.samples
    defined = [i for i, s in enumerate(samples) if s.phase is not None]
    if len(defined) < 2:
        return []
    if window is None:
        gaps = np.diff([s.phi for s in samples])
        window = 1.5 * float(np.median(gaps)) if len(gaps) else 0.0

    events: list[JumpEvent] = []
    for prev, cur in zip(defined, defined[1:]):
        left, right = samples[prev], samples[cur]
        delta = right.phase - left.phase
        gapped = (cur - prev) > 1
        if abs(delta) <= 0.5 * math.pi:
            continue
        if not gapped and (right.phi - left.phi) > window:
            continue
        if gapped:
            min_vis = min(s.visibility for s in samples[prev + 1 : cur])
        else:
            z_left = left.visibility * complex(math.cos(left.phase), math.sin(left.phase))
            z_right = right.visibility * complex(math.cos(right.phase), math.sin(right.phase))
            min_vis = _segment_min_abs(z_left, z_right)
        near_orthogonal = min_vis < curve.tol_orth
        pi_like = abs(abs(delta) - math.pi) < pi_tol
        location = 0.5 * (left.phi + right.phi)
        if near_orthogonal and pi_like:
            events.append(JumpEvent(location, abs(delta), None, False))
        else:
            events.append(JumpEvent(location, abs(delta), 1 if delta > 0 else -1, True))
    return events


def singularity_locus(theta: float, phi_min: float, phi_max: float) -> list[float]:
    """All phi in [phi_min, phi_max] where the overlap visibility vanishes.

    Empty unless theta is equatorial (within EQUATOR_TOL), in which case the
    locus is the odd multiples of pi in range.
    """
    BlochDirection(theta)
    if not (math.isfinite(phi_min) and math.isfinite(phi_max)) or phi_max < phi_min:
        raise ValueError(f"need finite phi_min <= phi_max, got [{phi_min!r}, {phi_max!r}]")
    if not is_equatorial(theta):
        return []
    eps = 1e-9
    n = math.ceil((phi_min - eps) / math.pi)
    if n % 2 == 0:
        n += 1
    locus = []
    while n * math.pi <= phi_max + eps:
        locus.append(n * math.pi)
        n += 2
    return locus


def _interval_mean(phi: np.ndarray, values: np.ndarray, a: float, b: float) -> float:
    """Trapezoidal mean of sampled values over [a, b] (endpoints interpolated)."""
    inside = (phi > a) & (phi < b)
    xs = np.concatenate(([a], phi[inside], [b]))
    ys = np.concatenate(
        ([np.interp(a, phi, values)], values[inside], [np.interp(b, phi, values)])
    )
    return float(np.trapezoid(ys, xs) / (b - a))


def secular_wiggle_decomposition(
    curve: PhaseCurve,
) -> tuple[float, list[tuple[float, float]]]:
    """Split a curve into its straight-line trend and the periodic remainder.

    The secular slope is sgn(cos theta)/2 exactly (the per-turn increment is
    pi per 2*pi of precession). The wiggle, phase minus slope*phi, is 2*pi
    periodic with zero mean over each period; the mean is checked by
    trapezoidal quadrature to 1e-6 so a mis-anchored curve fails loudly.

    Equatorial curves are rejected: no secular line passes through the
    singular points. The curve must span an integer number of 2*pi periods
    and be defined everywhere.
    """
    if is_equatorial(curve.theta):
        raise ValueError("equatorial curve has no secular slope through its singular points")
    if any(s.phase is None for s in curve.samples):
        raise ValueError("curve has undefined samples; cannot decompose")
    if len(curve.samples) < 2:
        raise ValueError("curve too short to decompose")
    phi0 = curve.samples[0].phi
    span = curve.samples[-1].phi - phi0
    periods = span / TWO_PI
    n_periods = round(periods)
    if n_periods < 1 or abs(periods - n_periods) > 1e-9:
        raise ValueError(f"curve must span an integer number of 2*pi periods, spans {periods!r}")

    slope = 0.5 * _hemisphere_sign(curve.theta)
    phi = np.array([s.phi for s in curve.samples])
    wiggle_vals = np.array([s.phase - slope * s.phi for s in curve.samples])
    for j in range(n_periods):
        mean = _interval_mean(phi, wiggle_vals, phi0 + j * TWO_PI, phi0 + (j + 1) * TWO_PI)
        if abs(mean) > 1e-6:
            raise ValueError(
                f"wiggle mean {mean!r} over period {j} exceeds 1e-6; "
                "curve is not anchored on its secular line"
            )
    return slope, [(float(p), float(w)) for p, w in zip(phi, wiggle_vals)]


def measured_difference_curve(
    theta: float,
    phi_min: float,
    phi_max: float,
    steps: int,
    tol_orth: float = ORTH_TOL_DEFAULT,
) -> PhaseCurve:
    """The difference observable: phase of the theta state minus the linear
    phase of the pole in the other hemisphere.

    The reference pole is theta = pi (phase -phi/2) for upper-hemisphere
    states and theta = 0 (phase +phi/2) for lower-hemisphere ones, so the
    difference equals phi*sgn(cos theta) plus the zero-mean wiggle and reaches
    +-2*pi after one full turn. Note what is lost: the two mirror curves sum
    to zero pointwise, so the difference no longer measures the hemisphere
    sign of the noncyclic phase itself.

    Sample visibility is the theta state's own overlap visibility (the pole
    reference has visibility 1 throughout).
    """
    if not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if not (math.isfinite(phi_min) and math.isfinite(phi_max)) or phi_max <= phi_min:
        raise ValueError(f"need finite phi_min < phi_max, got [{phi_min!r}, {phi_max!r}]")
    direction = BlochDirection(theta)
    if is_equatorial(direction.theta):
        raise ValueError("equatorial state has no opposite-hemisphere reference pole")
    theta_ref = math.pi if direction.theta < 0.5 * math.pi else 0.0
    c = math.cos(direction.theta)
    c_ref = math.cos(theta_ref)

    phis = np.linspace(phi_min, phi_max, steps + 1)
    samples = []
    for phi in phis:
        phi = float(phi)
        diff = _axial_continued_phase(c, phi) - _axial_continued_phase(c_ref, phi)
        half = 0.5 * phi
        vis = math.hypot(math.cos(half), c * math.sin(half))
        samples.append(PhasePoint(phi, diff, vis))
    return PhaseCurve(direction.theta, tuple(samples), (), tol_orth)


def rotation_angle_on_sphere(theta: float, phi: float) -> float:
    """Rotation angle swept by the state along its parallel of the sphere.

    For precession about the polar axis every parallel turns by the precession
    angle itself, independent of theta. Exposed so the difference observable
    can be compared with plain rotation geometry: the difference equals this
    angle times sgn(cos theta), up to the wiggle, which is exactly what a
    polarimetric (non-interferometric) measurement would already give.
    """
    BlochDirection(theta)
    if not math.isfinite(phi):
        raise ValueError(f"phi must be finite, got {phi!r}")
    return float(phi)

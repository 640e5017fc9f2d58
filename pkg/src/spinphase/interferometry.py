"""Simulated two-path interferometry for spinor phases.

A fringe is recorded by stepping an auxiliary phase shifter chi through a
uniform grid on [0, 2*pi) and counting at each setting; the expected rate is
mean_count * (1 + V cos(chi - Phi)) / 2 with (V, Phi) the visibility and
phase of the (possibly mixed) overlap between the beam and its evolved self.
Counting noise is Poisson per setting, reproducible from an integer seed.

Fitting uses the discrete fundamental-frequency quadrature sums, which equal
least squares on a uniform grid, with uncertainties from Poisson error
propagation. A fit whose visibility is statistically indistinguishable from
zero is flagged singular: real data never gives exactly zero contrast, so
"the phase is undefined here" becomes a significance statement, and curves
assembled from fits refuse to assign a sign to any pi jump the data cannot
resolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    JUMP_PI_TOL,
    JumpEvent,
    _segment_min_abs,
    _unwrap_phases,
    is_equatorial,
)
from .mixed import DensityMatrix, MixedState, density_from_mixed, mixed_overlap
from .spinor import (
    ORTH_TOL_DEFAULT,
    TWO_PI,
    BlochDirection,
    OverlapResult,
    Spinor,
    SU2Element,
    apply,
    pancharatnam_overlap,
    spinor_from_bloch,
    z_precession,
)

# Default number of phase-shifter settings per interferogram.
CHI_COUNT_DEFAULT = 16

# A fitted point joins branch continuation only when its visibility clears
# this many standard errors; stricter than the singular flag so that noise
# fluctuations can neither fabricate a jump sign nor fake a branch step.
K_TRACK_DEFAULT = 5.0


@dataclass(frozen=True)
class Interferogram:
    """Counts (or noiseless expected rates) over the phase-shifter grid.

    ``expected_rates`` always satisfies the fringe law of the generating
    overlap; ``counts`` is None for noiseless synthesis and otherwise one
    Poisson draw per setting, deterministic for a fixed seed.
    """

    chi_values: np.ndarray
    expected_rates: np.ndarray
    counts: np.ndarray | None
    mean_count: float
    seed: int | None

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean_count) or self.mean_count <= 0.0:
            raise ValueError(f"mean_count must be positive, got {self.mean_count!r}")
        chi = np.array(self.chi_values, dtype=float)
        rates = np.array(self.expected_rates, dtype=float)
        if chi.shape != rates.shape:
            raise ValueError("chi_values and expected_rates must have equal length")
        counts = self.counts
        if counts is not None:
            counts = np.array(counts)
            if counts.shape != chi.shape:
                raise ValueError("counts must match chi_values in length")
            if np.any(counts < 0):
                raise ValueError("counts must be nonnegative")
            counts.setflags(write=False)
        chi.setflags(write=False)
        rates.setflags(write=False)
        object.__setattr__(self, "chi_values", chi)
        object.__setattr__(self, "expected_rates", rates)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class FringeFit:
    """Extracted fringe parameters with Poisson-propagated uncertainties.

    ``singular`` is True exactly when the fitted visibility is below
    ``k_sigma`` standard errors: the data cannot distinguish the point from a
    phase singularity and ``phase_hat`` carries no physical phase claim.
    """

    phase_hat: float
    visibility_hat: float
    phase_stderr: float
    visibility_stderr: float
    singular: bool


@dataclass(frozen=True)
class FitPoint:
    """One fitted curve sample; ``phase`` is the branch-continued fitted phase
    or None when the fit cannot support branch tracking."""

    phi: float
    phase: float | None
    fit: FringeFit


@dataclass(frozen=True)
class ExperimentCurve:
    """Phase curve reconstructed from simulated fringe fits."""

    theta: float
    mode: str
    points: tuple[FitPoint, ...]
    jumps: tuple[JumpEvent, ...]
    mean_count: float
    chi_count: int
    seed: int | None


def _overlap_of(state: Spinor | DensityMatrix | MixedState, U: SU2Element, tol_orth: float) -> OverlapResult:
    if isinstance(state, Spinor):
        return pancharatnam_overlap(state, apply(U, state), tol_orth)
    if isinstance(state, MixedState):
        return mixed_overlap(density_from_mixed(state), U, tol_orth)
    if isinstance(state, DensityMatrix):
        return mixed_overlap(state, U, tol_orth)
    raise TypeError(f"state must be Spinor, DensityMatrix or MixedState, got {type(state).__name__}")


def synthesize(
    state: Spinor | DensityMatrix | MixedState,
    U: SU2Element,
    *,
    chi_count: int = CHI_COUNT_DEFAULT,
    mean_count: float,
    seed: int | None = None,
    tol_orth: float = ORTH_TOL_DEFAULT,
) -> Interferogram:
    """Simulate one fringe scan of ``state`` interfering with its evolved self.

    Uses ``chi_count`` (>= 8) uniformly spaced shifter settings on [0, 2*pi).
    With ``seed`` given, counts are drawn per setting from a Poisson law with
    the expected rate, using numpy's seeded PCG64 generator, so identical
    inputs give bit-identical counts; with ``seed=None`` the interferogram is
    noiseless (counts absent).
    """
    if not isinstance(chi_count, int) or chi_count < 8:
        raise ValueError(f"chi_count must be an integer >= 8, got {chi_count!r}")
    if not math.isfinite(mean_count) or mean_count <= 0.0:
        raise ValueError(f"mean_count must be positive, got {mean_count!r}")
    overlap = _overlap_of(state, U, tol_orth)
    visibility = overlap.visibility
    phase = overlap.phase if overlap.phase is not None else 0.0

    chi = TWO_PI * np.arange(chi_count) / chi_count
    rates = 0.5 * mean_count * (1.0 + visibility * np.cos(chi - phase))
    counts = None
    if seed is not None:
        counts = np.random.default_rng(seed).poisson(rates)
    return Interferogram(chi, rates, counts, float(mean_count), seed)


def fit_fringe(data: Interferogram, k_sigma: float = 3.0) -> FringeFit:
    """Extract (phase, visibility) and their standard errors from a fringe.

    Quadrature estimators on the uniform grid: with y the counts (or the
    noiseless rates), A = mean(y) estimates mean_count/2 and
    C + iS = 2 mean(y e^{i chi}) estimates A V e^{i Phi}, so the noiseless
    round trip is exact. Standard errors propagate Var(y_j) = rate_j through
    the estimators using the fitted rates.
    """
    if len(data.chi_values) < 8:
        raise ValueError("need at least 8 phase-shifter settings to fit")
    y = data.counts if data.counts is not None else data.expected_rates
    y = np.asarray(y, dtype=float)
    chi = data.chi_values
    n = len(chi)
    cosx = np.cos(chi)
    sinx = np.sin(chi)

    amp = float(np.mean(y))
    c = 2.0 * float(np.mean(y * cosx))
    s = 2.0 * float(np.mean(y * sinx))
    r = math.hypot(c, s)
    if amp <= 0.0:
        # all-zero record: no fringe information at all
        return FringeFit(0.0, 0.0, math.inf, math.inf, True)
    vis = r / amp
    phase = math.atan2(s, c)
    if phase == -math.pi:
        phase = math.pi

    rates = np.clip(amp * (1.0 + vis * np.cos(chi - phase)), 0.0, None)
    var_amp = float(np.sum(rates)) / n**2
    var_c = 4.0 * float(np.sum(rates * cosx * cosx)) / n**2
    var_s = 4.0 * float(np.sum(rates * sinx * sinx)) / n**2
    cov_cs = 4.0 * float(np.sum(rates * cosx * sinx)) / n**2
    cov_ac = 2.0 * float(np.sum(rates * cosx)) / n**2
    cov_as = 2.0 * float(np.sum(rates * sinx)) / n**2

    if r > 0.0:
        var_phase = max((s * s * var_c - 2.0 * c * s * cov_cs + c * c * var_s) / r**4, 0.0)
        gc = c / (r * amp)
        gs = s / (r * amp)
        ga = -r / (amp * amp)
        var_vis = max(
            gc * gc * var_c
            + gs * gs * var_s
            + ga * ga * var_amp
            + 2.0 * (gc * gs * cov_cs + gc * ga * cov_ac + gs * ga * cov_as),
            0.0,
        )
        phase_stderr = math.sqrt(var_phase) if var_phase > 0.0 else 0.0
    else:
        # exactly flat record: the phase estimator has no preferred direction
        phase_stderr = math.inf
        var_vis = 0.5 * (var_c + var_s) / amp**2
    visibility_stderr = math.sqrt(var_vis)
    singular = vis < k_sigma * visibility_stderr
    return FringeFit(phase, vis, phase_stderr, visibility_stderr, singular)


def _task_seed(seed: int | None, index: int, stream: int) -> int | None:
    """Independent per-task integer seed; serial and parallel runs agree."""
    if seed is None:
        return None
    return int(np.random.SeedSequence([seed, index, stream]).generate_state(1)[0])


def _wrap_principal(x: float) -> float:
    k = math.floor((x + math.pi) / TWO_PI)
    wrapped = x - TWO_PI * k
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


def _tracked(fit: FringeFit, k_track: float) -> bool:
    return fit.visibility_hat >= k_track * fit.visibility_stderr


def _fitted_jumps(
    points: list[FitPoint], k_sigma: float
) -> list[JumpEvent]:
    """Jump classification for fitted curves.

    Same contract as the analytic detector, with statistics in place of the
    orthogonality tolerance: a gap is sign-ambiguous when the crossing is
    statistically consistent with zero visibility and the flanking phases
    differ by pi within the phase noise. Tightening the counts tightens the
    tolerance, so a genuinely off-equator jump becomes resolvable with data.
    """
    defined = [i for i, pt in enumerate(points) if pt.phase is not None]
    events: list[JumpEvent] = []
    for prev, cur in zip(defined, defined[1:]):
        left, right = points[prev], points[cur]
        delta = right.phase - left.phase
        if abs(delta) <= 0.5 * math.pi:
            continue
        if (cur - prev) > 1:
            crossing_zero = True  # interior points failed the tracking test
        else:
            z_left = left.fit.visibility_hat * complex(math.cos(left.phase), math.sin(left.phase))
            z_right = right.fit.visibility_hat * complex(math.cos(right.phase), math.sin(right.phase))
            floor = k_sigma * max(left.fit.visibility_stderr, right.fit.visibility_stderr)
            crossing_zero = _segment_min_abs(z_left, z_right) < floor
        sigma = math.hypot(left.fit.phase_stderr, right.fit.phase_stderr)
        pi_tol = max(JUMP_PI_TOL, 5.0 * sigma)
        location = 0.5 * (left.phi + right.phi)
        if crossing_zero and abs(abs(delta) - math.pi) < pi_tol:
            events.append(JumpEvent(location, abs(delta), None, False))
        else:
            events.append(JumpEvent(location, abs(delta), 1 if delta > 0 else -1, True))
    return events


def experiment_curve(
    theta: float,
    phi_min: float,
    phi_max: float,
    steps: int,
    *,
    mean_count: float,
    chi_count: int = CHI_COUNT_DEFAULT,
    seed: int | None = None,
    mode: str = "direct",
    tol_orth: float = ORTH_TOL_DEFAULT,
    k_sigma: float = 3.0,
    k_track: float = K_TRACK_DEFAULT,
) -> ExperimentCurve:
    """Reconstruct a phase curve from simulated fringe fits on a phi grid.

    ``mode="direct"`` tracks the state's own fitted phase; ``"difference"``
    subtracts a simultaneously simulated opposite-hemisphere pole reference
    per point. Each grid point (and the reference) draws from its own
    generator seeded by (seed, point index, stream), so results are
    bit-reproducible and independent of evaluation order. Fitted phases are
    branch-continued with the same nearest-branch rule as analytic curves;
    points whose visibility does not clear ``k_track`` standard errors are
    excluded from continuation and reported with ``phase=None``.

    Raises :class:`StepSizeError` when tracked neighbors disagree by pi/2 or
    more away from the equator; use a finer grid or more counts.
    """
    if not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if not (math.isfinite(phi_min) and math.isfinite(phi_max)) or phi_max <= phi_min:
        raise ValueError(f"need finite phi_min < phi_max, got [{phi_min!r}, {phi_max!r}]")
    if mode not in ("direct", "difference"):
        raise ValueError(f"mode must be 'direct' or 'difference', got {mode!r}")
    direction = BlochDirection(theta)
    equatorial = is_equatorial(direction.theta)
    if mode == "difference" and equatorial:
        raise ValueError("equatorial state has no opposite-hemisphere reference pole")

    state = spinor_from_bloch(direction)
    reference = None
    if mode == "difference":
        theta_ref = math.pi if direction.theta < 0.5 * math.pi else 0.0
        reference = spinor_from_bloch(BlochDirection(theta_ref))

    phis = np.linspace(phi_min, phi_max, steps + 1)
    fits: list[FringeFit] = []
    principal: list[float | None] = []
    for idx, phi in enumerate(phis):
        U = z_precession(float(phi))
        fit = fit_fringe(
            synthesize(
                state,
                U,
                chi_count=chi_count,
                mean_count=mean_count,
                seed=_task_seed(seed, idx, 0),
                tol_orth=tol_orth,
            ),
            k_sigma,
        )
        tracked = _tracked(fit, k_track)
        value = fit.phase_hat
        if reference is not None:
            fit_ref = fit_fringe(
                synthesize(
                    reference,
                    U,
                    chi_count=chi_count,
                    mean_count=mean_count,
                    seed=_task_seed(seed, idx, 1),
                    tol_orth=tol_orth,
                ),
                k_sigma,
            )
            tracked = tracked and _tracked(fit_ref, k_track)
            value = _wrap_principal(fit.phase_hat - fit_ref.phase_hat)
        fits.append(fit)
        principal.append(value if tracked else None)

    unwrapped = _unwrap_phases(
        principal,
        equatorial and mode == "direct",
        phis,
        f"experiment_curve(theta={theta}, mode={mode})",
    )
    points = [
        FitPoint(float(phi), phase, fit)
        for phi, phase, fit in zip(phis, unwrapped, fits)
    ]
    jumps = tuple(_fitted_jumps(points, k_sigma))
    return ExperimentCurve(
        direction.theta, mode, tuple(points), jumps, float(mean_count), chi_count, seed
    )

"""Partially polarized beams and candidate phase-conversion laws.

A beam of polarization degree p along a Bloch direction carries the density
matrix rho = (I + p n.sigma)/2. Its interference against the unevolved beam
generalizes the pure-state overlap to Tr(rho U); for precession about +z the
trace is cos(phi/2) + i p cos(theta) sin(phi/2), so partial polarization
simply rescales the axial component and an unpolarized beam (p = 0) shows the
4*pi-periodic sign-change fringe with no phase information at all.

Converting a partially polarized phase shift to the fully polarized one is
not a single obvious recipe away from the poles. Two candidate laws are
implemented as testable hypotheses, a plain 1/p rescaling (LINEAR) and a
tangent rescaling tan(Phi_pure) = tan(Phi_mixed)/p (TANGENT), and their
residuals against the exact pure phase are reported rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import _axial_continued_phase, is_equatorial
from .spinor import ORTH_TOL_DEFAULT, BlochDirection, OverlapResult, SU2Element, principal_angle

_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class MixedState:
    """Partially polarized beam: Bloch direction plus polarization degree p."""

    direction: BlochDirection
    p: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if not math.isfinite(p) or not 0.0 <= p <= 1.0:
            raise ValueError(f"polarization degree must lie in [0, 1], got {p!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("density matrix entries must be finite")
        if np.max(np.abs(m - m.conj().T)) > _HERMITIAN_TOL:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m) - 1.0) > _HERMITIAN_TOL:
            raise ValueError(f"density matrix must have unit trace, got {np.trace(m)!r}")
        if np.min(np.linalg.eigvalsh(m)) < -_HERMITIAN_TOL:
            raise ValueError("density matrix must be positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def density_from_mixed(m: MixedState) -> DensityMatrix:
    """rho = (I + p n.sigma)/2: pure at p=1, maximally mixed at p=0."""
    nx, ny, nz = m.direction.unit_vector()
    p = m.p
    rho = 0.5 * np.array(
        [
            [1.0 + p * nz, p * (nx - 1j * ny)],
            [p * (nx + 1j * ny), 1.0 - p * nz],
        ],
        dtype=complex,
    )
    return DensityMatrix(rho)


def mixed_overlap(
    rho: DensityMatrix, U: SU2Element, tol_orth: float = ORTH_TOL_DEFAULT
) -> OverlapResult:
    """Interference of a beam against its evolved self: value = Tr(rho U).

    Reduces to the pure-state overlap at p=1. Phase is the principal argument,
    or None below ``tol_orth`` as in the pure case.
    """
    value = complex(np.trace(rho.matrix @ U.matrix()))
    visibility = abs(value)
    phase = principal_angle(value) if visibility >= tol_orth else None
    return OverlapResult(value, visibility, phase)


def mixed_continued_phase(theta: float, p: float, phi: float) -> float:
    """Branch-continued interference phase of a partially polarized beam under
    z precession, anchored at phi = 0.

    The trace is cos(phi/2) + i (p cos theta) sin(phi/2), the pure-state form
    with axial component rescaled by p, so the same continuation applies with
    secular slope sgn(cos theta)/2 for any p > 0. Undefined (raises) at the
    equator or at p = 0, where the trace is real and passes through zero.
    """
    BlochDirection(theta)
    if not math.isfinite(phi):
        raise ValueError(f"phi must be finite, got {phi!r}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"need polarization degree in (0, 1], got {p!r}")
    if is_equatorial(theta):
        raise ValueError("equatorial beam: mixed phase is undefined across the singular points")
    return _axial_continued_phase(p * math.cos(theta), phi)


def _tangent_continued(phase_mixed: float, p: float) -> float:
    """Branch-continued arctan(tan(phase_mixed)/p).

    The tangent law maps each branch cell (k pi - pi/2, k pi + pi/2) onto
    itself, so the continued value sits on the same cell as its input.
    """
    g = math.atan(math.tan(phase_mixed) / p)
    k = round((phase_mixed - g) / math.pi)
    return g + k * math.pi


@dataclass(frozen=True)
class ConversionReport:
    """One conversion-law evaluation: the phases involved and the error."""

    mixed_phase: float
    pure_phase: float
    predicted_pure: float
    residual: float


def scaling_law_report(
    theta: float,
    p: float,
    phi: float,
    law: str,
    observable: str = "direct",
) -> ConversionReport:
    """Evaluate a candidate partial-to-full polarization conversion law.

    Computes the branch-continued mixed phase and the exact pure phase, applies
    the law to the mixed one, and reports all three together with the absolute
    error in radians. ``law`` is "linear" (Phi_pure = Phi_mixed / p) or
    "tangent" (tan(Phi_pure) = tan(Phi_mixed) / p, branch continued).
    ``observable`` selects the direct noncyclic phase or the pole-referenced
    "difference" quantity, since a conversion law can behave differently on
    the two.

    Inputs whose phase is undefined (equatorial theta, p = 0) are rejected.
    """
    law = law.lower()
    if law not in ("linear", "tangent"):
        raise ValueError(f"law must be 'linear' or 'tangent', got {law!r}")
    if observable not in ("direct", "difference"):
        raise ValueError(f"observable must be 'direct' or 'difference', got {observable!r}")
    direction = BlochDirection(theta)
    if is_equatorial(direction.theta):
        raise ValueError("equatorial theta: phases are undefined at the singular points")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"need polarization degree in (0, 1], got {p!r}")
    if not math.isfinite(phi):
        raise ValueError(f"phi must be finite, got {phi!r}")

    c = math.cos(direction.theta)
    phase_mixed = _axial_continued_phase(p * c, phi)
    phase_pure = _axial_continued_phase(c, phi)
    if observable == "difference":
        theta_ref = math.pi if direction.theta < 0.5 * math.pi else 0.0
        c_ref = math.cos(theta_ref)
        phase_mixed -= _axial_continued_phase(p * c_ref, phi)
        phase_pure -= _axial_continued_phase(c_ref, phi)

    if law == "linear":
        predicted = phase_mixed / p
    else:
        predicted = _tangent_continued(phase_mixed, p)
    return ConversionReport(phase_mixed, phase_pure, predicted, abs(predicted - phase_pure))


def scaling_law_residual(
    theta: float,
    p: float,
    phi: float,
    law: str,
    observable: str = "direct",
) -> float:
    """Absolute error |predicted - exact| of a conversion law, in radians.

    See :func:`scaling_law_report` for the laws and the rejected inputs.
    """
    return scaling_law_report(theta, p, phi, law, observable).residual

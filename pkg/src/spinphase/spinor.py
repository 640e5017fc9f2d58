"""Two-level-system arithmetic: Bloch directions, spinors, SU(2) elements, overlaps.

Conventions, fixed package-wide:

* The Bloch polar angle ``theta`` is measured from the +z precession axis;
  ``theta < pi/2`` is the upper hemisphere, ``theta = pi/2`` the equator.
* A precession by ``phi`` about +z is ``U = diag(e^{+i phi/2}, e^{-i phi/2})``,
  so the upper pole state (1, 0) acquires the phase +phi/2 and upper-hemisphere
  states carry secular slope +1/2. Every other sign in the package follows
  from this choice.
* Interference phases are principal values in (-pi, pi]. Branch continuation
  is the curve layer's job, not this module's.

All values here are immutable and all operations are pure functions, so they
are safe to share across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Normalization slack for states and SU(2) elements.
NORM_TOL = 1e-12

# Default visibility below which an interference phase is reported undefined.
# Analytic pipelines keep this tight; fitted data needs a statistical criterion
# instead (see the interferometry module).
ORTH_TOL_DEFAULT = 1e-9


def principal_angle(z: complex) -> float:
    """Argument of ``z`` in the principal range (-pi, pi]."""
    p = math.atan2(z.imag, z.real)
    if p == -math.pi:
        # atan2 maps a negative real with -0.0 imaginary part to -pi
        return math.pi
    return p


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class BlochDirection:
    """Direction on the Bloch sphere.

    ``theta`` is the polar angle from +z in [0, pi]; ``azimuth`` is reduced
    into [0, 2*pi) at construction.
    """

    theta: float
    azimuth: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("BlochDirection angles", self.theta, self.azimuth)
        theta = float(self.theta)
        # forgive sub-tolerance float excursions, reject anything larger
        if -NORM_TOL <= theta < 0.0:
            theta = 0.0
        elif math.pi < theta <= math.pi + NORM_TOL:
            theta = math.pi
        if not 0.0 <= theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
        azimuth = math.fmod(float(self.azimuth), TWO_PI)
        if azimuth < 0.0:
            azimuth += TWO_PI
        if azimuth >= TWO_PI:
            azimuth = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "azimuth", azimuth)

    def unit_vector(self) -> tuple[float, float, float]:
        """Cartesian components (x, y, z) of the direction."""
        s = math.sin(self.theta)
        return (s * math.cos(self.azimuth), s * math.sin(self.azimuth), math.cos(self.theta))


@dataclass(frozen=True)
class Spinor:
    """Normalized two-component state on the +z/-z basis."""

    up: complex
    down: complex

    def __post_init__(self) -> None:
        up = complex(self.up)
        down = complex(self.down)
        _require_finite("Spinor amplitudes", up.real, up.imag, down.real, down.imag)
        norm_sq = abs(up) ** 2 + abs(down) ** 2
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"Spinor must be normalized, got |up|^2 + |down|^2 = {norm_sq!r}")
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)

    def __neg__(self) -> "Spinor":
        return Spinor(-self.up, -self.down)


@dataclass(frozen=True)
class SU2Element:
    """Special unitary ``U = [[a, -conj(b)], [b, conj(a)]]`` (Cayley-Klein form)."""

    a: complex
    b: complex

    def __post_init__(self) -> None:
        a = complex(self.a)
        b = complex(self.b)
        _require_finite("SU2Element entries", a.real, a.imag, b.real, b.imag)
        norm_sq = abs(a) ** 2 + abs(b) ** 2
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"SU2Element needs |a|^2 + |b|^2 = 1, got {norm_sq!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def matrix(self) -> np.ndarray:
        """The 2x2 complex matrix of the element."""
        return np.array(
            [[self.a, -self.b.conjugate()], [self.b, self.a.conjugate()]],
            dtype=complex,
        )


@dataclass(frozen=True)
class OverlapResult:
    """Inner product of a reference with a state, plus its polar split.

    ``visibility`` is the modulus of ``value`` (the fringe contrast of the
    corresponding interference experiment). ``phase`` is the principal
    argument in (-pi, pi], or ``None`` when the visibility falls below the
    orthogonality tolerance: at such points the interference phase does not
    exist, which is physics rather than an error.
    """

    value: complex
    visibility: float
    phase: float | None


def spinor_from_bloch(d: BlochDirection) -> Spinor:
    """State pointing along ``d``: up = cos(theta/2), down = e^{i az} sin(theta/2)."""
    half = 0.5 * d.theta
    return Spinor(complex(math.cos(half)), cmath.exp(1j * d.azimuth) * math.sin(half))


def bloch_from_spinor(s: Spinor) -> BlochDirection:
    """Bloch direction of a state, global phase discarded.

    The canonical representative has a real nonnegative up component; when
    ``|up| < 1e-14`` the down component is taken real positive instead, so
    round trips are deterministic.
    """
    mag_up = abs(s.up)
    if mag_up < 1e-14:
        return BlochDirection(math.pi, 0.0)
    if abs(s.down) < 1e-14:
        return BlochDirection(0.0, 0.0)
    theta = 2.0 * math.atan2(abs(s.down), mag_up)
    azimuth = principal_angle(s.down * s.up.conjugate())
    return BlochDirection(theta, azimuth)


def z_precession(phi: float) -> SU2Element:
    """Precession by ``phi`` about +z: ``diag(e^{+i phi/2}, e^{-i phi/2})``.

    ``phi`` may exceed 2*pi; multi-turn evolutions are meaningful (a 2*pi turn
    is -identity, the spinor sign change).
    """
    _require_finite("precession angle", phi)
    return SU2Element(cmath.exp(0.5j * phi), 0.0)


def axis_rotation(axis: BlochDirection, angle: float) -> SU2Element:
    """Rotation by ``angle`` about ``axis``: cos(angle/2) I + i sin(angle/2) n.sigma.

    Reduces to :func:`z_precession` when ``axis`` is +z.
    """
    _require_finite("rotation angle", angle)
    half = 0.5 * angle
    c = math.cos(half)
    s = math.sin(half)
    nx, ny, nz = axis.unit_vector()
    return SU2Element(complex(c, s * nz), complex(-s * ny, s * nx))


def compose(second: SU2Element, first: SU2Element) -> SU2Element:
    """Group product acting as ``first`` then ``second``, kept in Cayley-Klein form."""
    a = second.a * first.a - second.b.conjugate() * first.b
    b = second.b * first.a + second.a.conjugate() * first.b
    return SU2Element(a, b)


def apply(U: SU2Element, s: Spinor) -> Spinor:
    """Evolve a state: matrix action of ``U`` on ``s`` (norm preserving)."""
    return Spinor(
        U.a * s.up - U.b.conjugate() * s.down,
        U.b * s.up + U.a.conjugate() * s.down,
    )


def pancharatnam_overlap(
    reference: Spinor, state: Spinor, tol_orth: float = ORTH_TOL_DEFAULT
) -> OverlapResult:
    """Overlap <reference|state> with its interference phase and visibility.

    With the initial state as the reference this is the noncyclic phase
    criterion: the phase is the principal argument of the overlap when the
    visibility is at least ``tol_orth`` and undefined (``None``) below it.
    """
    value = (
        reference.up.conjugate() * state.up
        + reference.down.conjugate() * state.down
    )
    visibility = abs(value)
    phase = principal_angle(value) if visibility >= tol_orth else None
    return OverlapResult(value, visibility, phase)

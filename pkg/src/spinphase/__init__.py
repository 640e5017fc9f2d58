"""Noncyclic (Pancharatnam) phase of precessing spin-1/2 states.

Exact two-level arithmetic, branch-continued phase curves with honest
singularity bookkeeping, partially polarized beams with candidate
phase-conversion laws, and simulated fringe measurements that demonstrate
which of these claims survive counting noise.
"""

from .curves import (
    EQUATOR_TOL,
    JumpEvent,
    PhaseCurve,
    PhasePoint,
    StepSizeError,
    build_curve,
    closed_form_phase,
    detect_jumps,
    is_equatorial,
    measured_difference_curve,
    rotation_angle_on_sphere,
    secular_wiggle_decomposition,
    singularity_locus,
)
from .interferometry import (
    ExperimentCurve,
    FitPoint,
    FringeFit,
    Interferogram,
    experiment_curve,
    fit_fringe,
    synthesize,
)
from .mixed import (
    ConversionReport,
    DensityMatrix,
    MixedState,
    density_from_mixed,
    mixed_continued_phase,
    mixed_overlap,
    scaling_law_report,
    scaling_law_residual,
)
from .spinor import (
    NORM_TOL,
    ORTH_TOL_DEFAULT,
    BlochDirection,
    OverlapResult,
    Spinor,
    SU2Element,
    apply,
    axis_rotation,
    bloch_from_spinor,
    compose,
    pancharatnam_overlap,
    principal_angle,
    spinor_from_bloch,
    z_precession,
)

__version__ = "0.1.0"

__all__ = [
    "BlochDirection",
    "ConversionReport",
    "DensityMatrix",
    "EQUATOR_TOL",
    "ExperimentCurve",
    "FitPoint",
    "FringeFit",
    "Interferogram",
    "JumpEvent",
    "MixedState",
    "NORM_TOL",
    "ORTH_TOL_DEFAULT",
    "OverlapResult",
    "PhaseCurve",
    "PhasePoint",
    "Spinor",
    "StepSizeError",
    "SU2Element",
    "apply",
    "axis_rotation",
    "bloch_from_spinor",
    "build_curve",
    "closed_form_phase",
    "compose",
    "density_from_mixed",
    "detect_jumps",
    "experiment_curve",
    "fit_fringe",
    "is_equatorial",
    "measured_difference_curve",
    "mixed_continued_phase",
    "mixed_overlap",
    "pancharatnam_overlap",
    "principal_angle",
    "rotation_angle_on_sphere",
    "scaling_law_report",
    "scaling_law_residual",
    "secular_wiggle_decomposition",
    "singularity_locus",
    "spinor_from_bloch",
    "synthesize",
    "z_precession",
    "__version__",
]

"""Coherence quantum speed limits for open qubit dynamics."""

from .coherence import (
    CoherenceValue,
    IncoherentState,
    closest_incoherent,
    coherence_bruteforce,
    coherence_skew,
    delta_c,
)
from .densmat import (
    DensityMatrix,
    StateSqrt,
    affinity,
    angle,
    bloch_vector,
    equal_population_transform,
    qubit_from_theta,
    sqrt_psd,
    validate_density,
)
from .dynamics import (
    AmplitudeDamping,
    ConstantRate,
    Dephasing,
    OhmicZeroT,
    ShiftedRate,
    Trajectory,
    Unitary,
    damping_state,
    dephasing_state,
    gamma_at,
    gamma_integral,
    integrate_master,
    trajectory_from_analytic,
)
from .metric import (
    SpeedSample,
    decompose_profile,
    decompose_speed,
    fisher_dephasing,
    skew_dephasing,
    speed_profile,
    sqrt_derivative,
    wy_speed,
)
from .qsl import (
    GeodesicPath,
    QslReport,
    dephasing_arc_length,
    geodesic_point,
    geodesic_trace_profile,
    geodesic_triangle_check,
    saturation_check,
    tau_csl,
)

__version__ = "0.1.0"

__all__ = [
    "CoherenceValue",
    "IncoherentState",
    "closest_incoherent",
    "coherence_bruteforce",
    "coherence_skew",
    "delta_c",
    "DensityMatrix",
    "StateSqrt",
    "affinity",
    "angle",
    "bloch_vector",
    "equal_population_transform",
    "qubit_from_theta",
    "sqrt_psd",
    "validate_density",
    "AmplitudeDamping",
    "ConstantRate",
    "Dephasing",
    "OhmicZeroT",
    "ShiftedRate",
    "Trajectory",
    "Unitary",
    "damping_state",
    "dephasing_state",
    "gamma_at",
    "gamma_integral",
    "integrate_master",
    "trajectory_from_analytic",
    "SpeedSample",
    "decompose_profile",
    "decompose_speed",
    "fisher_dephasing",
    "skew_dephasing",
    "speed_profile",
    "sqrt_derivative",
    "wy_speed",
    "GeodesicPath",
    "QslReport",
    "dephasing_arc_length",
    "geodesic_point",
    "geodesic_trace_profile",
    "geodesic_triangle_check",
    "saturation_check",
    "tau_csl",
]

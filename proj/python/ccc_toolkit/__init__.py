"""Connected cruise control toolkit: chain simulation, string stability and safe-gain charts."""

from ._core import (
    CavParams,
    CbfParams,
    Chain,
    ConfigError,
    DomainError,
    HvParams,
    IntegrationFault,
    IoError,
    ParseError,
    PoleError,
    SafeBounds,
    SafetyEnvelope,
    StabilityFlags,
    P_criterion,
    classify_chart,
    critical_lag,
    curvature_L_h,
    head_to_tail_G,
    plant_stable,
    reference_chain,
    simulate,
    string_boundary_wK,
    string_stable,
    theorem3_bounds,
    theorem4_bounds,
    vbar_infinity_region,
)

__all__ = [name for name in dir() if not name.startswith("_")]

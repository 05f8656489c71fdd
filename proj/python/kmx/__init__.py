"""Near-equilibrium Boltzmann toolkit bindings."""

from ._kmx import (
    INF,
    CollisionParams,
    SphereQuadrature,
    VelocityGrid,
    apply_K,
    collision_frequency,
    conjugate_exponent,
    gamma_gain,
    gamma_loss,
    integrate_v,
    interpolate,
    kinetic_kernel,
    maxwellian,
    mixed_norm,
    post_collision,
    q_full,
    sqrt_maxwellian,
    validate_parameters,
)

__all__ = [
    "INF",
    "CollisionParams",
    "SphereQuadrature",
    "VelocityGrid",
    "apply_K",
    "collision_frequency",
    "conjugate_exponent",
    "gamma_gain",
    "gamma_loss",
    "integrate_v",
    "interpolate",
    "kinetic_kernel",
    "maxwellian",
    "mixed_norm",
    "post_collision",
    "q_full",
    "sqrt_maxwellian",
    "validate_parameters",
]

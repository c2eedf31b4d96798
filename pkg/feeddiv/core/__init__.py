# Network model: instances, type matrices, limiting states
from feeddiv.core.instance import (
    InjectionPolicy,
    Instance,
    PolicyReport,
    PolicyViolation,
    TypeMatrices,
    build_type_matrices,
    spectral_radius,
    validate_policy,
)
from feeddiv.core.state import State, diversity, engagement, limiting_state

__all__ = [
    "InjectionPolicy",
    "Instance",
    "PolicyReport",
    "PolicyViolation",
    "State",
    "TypeMatrices",
    "build_type_matrices",
    "diversity",
    "engagement",
    "limiting_state",
    "spectral_radius",
    "validate_policy",
]

"""Work extraction from Gaussian states as an entanglement witness.

The package is organised in layers: ``symplectic`` (covariance-matrix algebra),
``states`` (families, physicality and PPT classification), ``measurements``
(Gaussian measurements and conditioning), ``work`` (closed forms, numerical
pipeline and thresholds), ``sampling`` and ``experiments`` (figure datasets)
and ``cli``.
"""

from .errors import (
    GaussWorkError,
    InvalidParams,
    InvalidTriple,
    QuadratureFailure,
    Unphysical,
)
from .measurements import GaussianMeasurement, heterodyne, homodyne
from .states import (
    GeneralTripartiteParams,
    PureTripartiteParams,
    SqueezedThermalParams,
    SymmetricTripartiteParams,
    TwoModeStandardForm,
    build_state,
    classify,
)
from .symplectic import is_physical, partial_transpose, symplectic_eigenvalues
from .work import (
    WorkResult,
    separable_bound_general,
    thresholds,
    witness,
    work_avg_angle,
    work_one_measurement,
    work_tripartite,
    work_tripartite_avg,
    work_two_measurements,
)

__version__ = "0.1.0"

__all__ = [
    "GaussWorkError", "InvalidParams", "InvalidTriple", "QuadratureFailure", "Unphysical",
    "GaussianMeasurement", "heterodyne", "homodyne",
    "GeneralTripartiteParams", "PureTripartiteParams", "SqueezedThermalParams",
    "SymmetricTripartiteParams", "TwoModeStandardForm", "build_state", "classify",
    "is_physical", "partial_transpose", "symplectic_eigenvalues",
    "WorkResult", "separable_bound_general", "thresholds", "witness", "work_avg_angle",
    "work_one_measurement", "work_tripartite", "work_tripartite_avg", "work_two_measurements",
]  # fmt: skip

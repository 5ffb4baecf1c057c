"""Series expansions for ground states of weakly interacting spin models.

The package computes ground-state energy series coefficients and
two-site correlators for models of qubits on a bounded-degree graph,
where each vertex carries a positive excitation energy and each edge an
arbitrary two-qubit perturbation.  Results inside the certified
strength regime come with rigorous truncation bounds; a dense
exact-diagonalization oracle is included for cross-checking.
"""

from .energy import (
    EnergySeries,
    choose_order,
    energy_coefficient,
    energy_estimate,
    energy_series,
    norm_bound,
    radius_estimate,
    truncation_bound,
)
from .errors import (
    DanglingVertexId,
    Disconnected,
    EmptySet,
    InvalidObservable,
    InvalidSubset,
    KtspinError,
    NonPositiveGap,
    NonPositivePrecision,
    OrthogonalToVacuum,
    ParseError,
    SelfLoop,
    TooManyQubits,
)
from .model import (
    EdgeTerm,
    SpinModel,
    TwoQubitOperator,
    Vertex,
    load_model,
    model_from_dict,
    model_to_dict,
    parse_pauli_expression,
    save_model,
)
from .response import (
    CorrelatorQuery,
    CorrelatorResult,
    choose_correlator_order,
    correlator,
    restrict_neighborhood,
)
from .scalars import DualScalar, derivative_part, scalar_abs, value_part
from .solver import SolverState, advance_order, first_order, solve

__version__ = "0.1.0"

__all__ = [
    "CorrelatorQuery",
    "CorrelatorResult",
    "DanglingVertexId",
    "Disconnected",
    "DualScalar",
    "EdgeTerm",
    "EmptySet",
    "EnergySeries",
    "InvalidObservable",
    "InvalidSubset",
    "KtspinError",
    "NonPositiveGap",
    "NonPositivePrecision",
    "OrthogonalToVacuum",
    "ParseError",
    "SelfLoop",
    "SolverState",
    "SpinModel",
    "TooManyQubits",
    "TwoQubitOperator",
    "Vertex",
    "advance_order",
    "choose_correlator_order",
    "choose_order",
    "correlator",
    "derivative_part",
    "energy_coefficient",
    "energy_estimate",
    "energy_series",
    "first_order",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "norm_bound",
    "parse_pauli_expression",
    "radius_estimate",
    "restrict_neighborhood",
    "save_model",
    "scalar_abs",
    "solve",
    "truncation_bound",
    "value_part",
]

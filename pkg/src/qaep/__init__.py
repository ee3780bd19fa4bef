"""Numerical laboratory for the quantum asymptotic equipartition property.

Block states of translation-invariant spin-chain sources, minimal typical
dimensions, typical projectors, sublattice-ergodic decompositions of
periodic Markov sources and a typical-subspace codec.
"""

from .aep import (
    BetaResult,
    EmpiricalDistribution,
    Spectrum,
    TypicalProjector,
    aep_convergence_report,
    alpha,
    beta,
    block_spectrum,
    iid_type_spectrum,
    mass_threshold_n,
    partition_levels,
    spectrum_distribution,
    typical_projector,
    von_neumann_entropy,
)
from .codec import build_codec, decode, encode, ensemble_fidelity
from .ergodic import (
    atypical_density,
    chain_period,
    component_entropy_check,
    ergodic_decompose,
    maximal_abelian_restriction,
)
from .errors import (
    CapacityError,
    ContractError,
    ModelError,
    NumericalError,
    ParameterError,
    QaepError,
    StructuralError,
    UnsupportedModelError,
)
from .linalg import DensityOperator, EigenDecomposition, hermitian_eig, kron, partial_trace
from .modelio import load_model, model_hash, parse_model
from .states import (
    BlockState,
    BoxShape,
    ClassicalMarkov,
    DressedMarkov,
    IIDProduct,
    block_density,
    block_entropy,
    mean_entropy,
)

__version__ = "0.1.0"

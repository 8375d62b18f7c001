"""Entropy decompositions and quantum-structure diagrams for partitioned pure universes."""

from .errors import (
    ArgumentError,
    ContractViolation,
    InvalidDensityError,
    InvariantViolation,
    ParseError,
    ShapeError,
    SizeLimitError,
    SpaceError,
    StructureError,
    TangnetError,
)
from .infometrics import (
    MutualInfoReport,
    conditional_mutual_info,
    entropy,
    multiworld_mi,
    mutual_info,
    mutual_info_pure_bipartite,
    rabi_entanglement,
    slit_visibility,
)
from .linalg import eig_hermitian, haar_random_state, haar_random_unitary, kron, partial_trace
from .states import (
    DensityOperator,
    Ensemble,
    MultipartiteSpace,
    PartitionModel,
    PureState,
    SchmidtDecomposition,
    is_approx_pure,
    mix,
    purify,
    purity,
    reduce,
    schmidt,
    views_equivalent,
)
from .structure import (
    QuantumStructure,
    StructureClass,
    TwoQubitFamily,
    classify,
    enumerate_qubit_classes,
    family_state,
    state_from_structure,
    structure_from_state,
)
from .symmetry import (
    LocalUnitaryPair,
    SymmetryVerdict,
    apply_local_rotation,
    apply_permutation,
    envariance_counterpart,
    out_in_suite,
)

__version__ = "0.1.0"

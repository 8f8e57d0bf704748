"""Separability of N-particle fermionic pure states under arbitrary partitions."""

from .antisym import (
    AntisymmetrizerAction,
    DegenerateAntisymmetrizationWarning,
    OrthogonalStructure,
    SeparableState,
    SubspaceBasis,
    antisymmetrize,
    antisymmetrize_product,
    antisymmetrizer,
    asym_membership,
    rescaled_antisymmetrizer,
    separable_state,
    subspace_w,
    total_asym_basis,
)
from .errors import (
    CapacityError,
    ClosureError,
    ContractError,
    DomainError,
    EmptySpaceError,
    FermisepError,
    SingularOverlapError,
    SupportError,
)
from .observables import (
    AssembledObservable,
    SubsystemObservable,
    assemble_o,
    assemble_o_tilde,
    block_identity,
    build_subsystem_observable,
    compose,
    marginal_observable,
    observable_from_matrix,
    permuted_assembly_equal,
)
from .separability import (
    SeparabilityReport,
    Verdict,
    WeakValueResult,
    chsh_value,
    expectation,
    full_separability_e,
    inner_product_factors,
    matrix_element,
    projector_criterion,
    separability_test,
    weak_value,
)
from .symmetric import (
    Partition,
    Permutation,
    act_on_partition,
    coset_representatives,
    enumerate_sn,
    permutation_operator,
    stabilizer,
)
from .tensor import Operator, StateVector, apply, inner, tensor_product

__version__ = "0.1.0"

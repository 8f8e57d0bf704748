"""Separability decisions, witnesses and factorization identities.

The decision procedure works in two stages.  The product basis of the block
spaces W(Gamma_k, V_k), pushed through A(Gamma), is orthonormal; projecting
a state onto its span gives a coefficient tensor with one axis per block.
The state is separable exactly when that tensor is a single product, which is
checked by peeling off the leading singular pair block by block.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .antisym import (
    OrthogonalStructure,
    SeparableState,
    antisymmetrize_array,
    asym_membership,
    place_blocks,
    subspace_w,
    total_asym_basis,
)
from .builders import pauli, tag_structure, tagged_operator, unit_axis
from .errors import ContractError, DomainError, SingularOverlapError, SupportError
from .observables import (
    A_SANDWICH,
    AssembledObservable,
    SubsystemObservable,
    apply_blocks,
    assemble_o,
    build_subsystem_observable,
    identity_blocks,
    marginal_observable,
    observable_from_matrix,
)
from .symmetric import Partition
from .tensor import Operator, StateVector, apply, inner

VERDICT_TOL = 1e-10
IDENTITY_TOL = 1e-12
NORMALIZED_TOL = 1e-10


class Verdict(str, enum.Enum):
    SEPARABLE = "separable"
    NOT_IN_SPAN = "not-in-span"
    SPAN_BUT_ENTANGLED = "span-but-entangled"


def _require_normalized(psi: StateVector, tol: float = NORMALIZED_TOL):
    if abs(psi.norm() - 1.0) >= tol:
        raise DomainError(f"state must be normalized (norm {psi.norm():.15g})")


def matrix_element(phi: StateVector, op, psi: StateVector) -> complex:
    """<phi|O|psi> for a dense Operator or any matrix-free action."""
    return inner(phi, apply(op, psi))


def expectation(psi: StateVector, op) -> complex:
    """<psi|O|psi> for a normalized state."""
    _require_normalized(psi)
    return matrix_element(psi, op, psi)


@dataclass(frozen=True)
class FactoredInner:
    total: complex
    per_block: tuple[complex, ...]

    @property
    def product(self) -> complex:
        return complex(np.prod(self.per_block))


def _same_setting(a: SeparableState, b: SeparableState):
    if a.partition != b.partition:
        raise DomainError("states are separable with respect to different partitions")
    fa, fb = a.structure.frames, b.structure.frames
    if len(fa) != len(fb) or not all(
        x.shape == y.shape and np.allclose(x, y, atol=1e-12) for x, y in zip(fa, fb)
    ):
        raise DomainError("states are separable with respect to different structures")


def _certified(*states):
    for s in states:
        if not isinstance(s, SeparableState):
            raise ContractError(
                "a certified SeparableState is required; use tensor.inner for plain vectors"
            )


def inner_product_factors(phi: SeparableState, psi: SeparableState) -> FactoredInner:
    """<Phi|Psi> computed on the full space, alongside the block overlaps."""
    _certified(phi, psi)
    _same_setting(phi, psi)
    total = inner(phi.vector, psi.vector)
    blocks = tuple(inner(f, p) for f, p in zip(phi.factors, psi.factors))
    return FactoredInner(total, blocks)


@dataclass(frozen=True)
class WeakValueResult:
    total: complex
    per_block: tuple[complex, ...]
    denominators: tuple[complex, ...]

    @property
    def product(self) -> complex:
        return complex(np.prod(self.per_block))


def weak_value(
    phi: SeparableState, psi: SeparableState, op: AssembledObservable, tol: float = VERDICT_TOL
) -> WeakValueResult:
    """<Phi|O|Psi> / <Phi|Psi> together with the blockwise ratios."""
    _certified(phi, psi)
    _same_setting(phi, psi)
    if not isinstance(op, AssembledObservable) or op.form != A_SANDWICH:
        raise DomainError("weak_value needs an assembled A-sandwich observable")
    if op.partition != psi.partition:
        raise DomainError("observable and states use different partitions")
    denom = inner(phi.vector, psi.vector)
    block_denoms = tuple(inner(f, p) for f, p in zip(phi.factors, psi.factors))
    if abs(denom) < tol or min(abs(x) for x in block_denoms) < tol:
        raise SingularOverlapError(f"overlap <Phi|Psi> = {denom:.3e} is too small")
    total = matrix_element(phi.vector, op, psi.vector) / denom
    per_block = tuple(
        o.matrix_element(f, p) / dn
        for o, f, p, dn in zip(op.blocks, phi.factors, psi.factors, block_denoms)
    )
    return WeakValueResult(total, per_block, block_denoms)


@dataclass(frozen=True)
class SeparabilityReport:
    verdict: Verdict
    witnesses: tuple[StateVector, ...] | None
    residual_span: float
    residual_rank1: float
    tolerance: float
    global_phase: complex
    fidelity: float = float("nan")
    residual_witness: float = float("nan")
    singular_values: tuple[tuple[float, ...], ...] = field(default=())
    degenerate: bool = False
    # best rank-1 block factors, returned whatever the verdict
    candidates: tuple[StateVector, ...] = field(default=())

    @property
    def is_separable(self) -> bool:
        return self.verdict is Verdict.SEPARABLE


def span_isometry(gamma: Partition, structure: OrthogonalStructure) -> tuple[np.ndarray, list]:
    """Columns A(Gamma) (x)_k |mu_k> over the product of block Slater bases.

    Column order is row-major in (mu_1, ..., mu_s).  The columns are
    orthonormal, which the caller may verify.
    """
    structure.check_partition(gamma)
    d = structure.local_dim
    bases = [subspace_w(b, f, d) for b, f in zip(gamma.blocks, structure.frames)]
    prods = reduce(np.kron, [b.matrix for b in bases])
    placed = place_blocks(gamma, prods, d)
    cols = math.sqrt(gamma.multinomial) * antisymmetrize_array(placed, gamma.n, d)
    return cols, bases


def _phase_fix(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    if mags.max() == 0:
        return v
    j = int(np.argmax(mags > 1e-8 * mags.max()))
    return v * np.exp(-1j * np.angle(v[j]))


def separability_test(
    psi: StateVector,
    gamma: Partition,
    structure: OrthogonalStructure,
    tol: float = VERDICT_TOL,
) -> SeparabilityReport:
    """Decide whether ``psi`` lies in S(Gamma, V) and return a witness if so.

    Witness factors are normalized with their first significant coordinate
    real and positive; ``global_phase`` relates the witness state to ``psi``.
    """
    _require_normalized(psi, max(tol, NORMALIZED_TOL))
    ok, res = asym_membership(psi, tol)
    if not ok:
        raise DomainError(f"state is not antisymmetric (residual {res:.3e})")
    if structure.local_dim != psi.dim_local or gamma.n != psi.num_sites:
        raise DomainError("state, partition and structure disagree on dimensions")
    cols, bases = span_isometry(gamma, structure)
    coeffs = cols.conj().T @ psi.amplitudes
    residual_span = float(np.linalg.norm(psi.amplitudes - cols @ coeffs))

    shape = [b.dim for b in bases]
    factors = []
    tails = []
    svals = []
    degenerate = False
    cur = coeffs
    for k in range(gamma.s - 1):
        mat = cur.reshape(shape[k], -1)
        u, sv, vh = np.linalg.svd(mat, full_matrices=False)
        svals.append(tuple(float(x) for x in sv))
        tails.append(float(np.sqrt(np.sum(sv[1:] ** 2))))
        if len(sv) > 1 and sv[0] - sv[1] < tol and sv[1] >= tol:
            degenerate = True
        factors.append(u[:, 0])
        cur = sv[0] * vh[0]
    last = np.linalg.norm(cur)
    factors.append(cur / last if last > 0 else cur)
    residual_rank1 = float(np.sqrt(np.sum(np.square(tails))))

    witnesses = []
    for basis, c in zip(bases, factors):
        vec = _phase_fix(basis.matrix @ c)
        witnesses.append(StateVector(psi.dim_local, basis.num_sites, vec))
    xi_coeffs = reduce(np.kron, [b.matrix.conj().T @ w.amplitudes for b, w in zip(bases, witnesses)])
    xi = cols @ xi_coeffs
    overlap = complex(np.vdot(xi, psi.amplitudes))
    fidelity = abs(overlap)
    phase = overlap / fidelity if fidelity > 0 else 1.0 + 0j
    residual_witness = float(np.linalg.norm(psi.amplitudes - phase * xi))

    if residual_span >= tol:
        verdict = Verdict.NOT_IN_SPAN
    elif degenerate or residual_rank1 >= tol or residual_witness >= tol:
        verdict = Verdict.SPAN_BUT_ENTANGLED
    else:
        verdict = Verdict.SEPARABLE
    return SeparabilityReport(
        verdict=verdict,
        witnesses=tuple(witnesses) if verdict is Verdict.SEPARABLE else None,
        residual_span=residual_span,
        residual_rank1=residual_rank1,
        tolerance=tol,
        global_phase=complex(phase),
        fidelity=float(fidelity),
        residual_witness=residual_witness,
        singular_values=tuple(svals),
        degenerate=degenerate,
        candidates=tuple(witnesses),
    )


def check_candidates(psi: StateVector, gamma: Partition, candidates: Sequence[OrthogonalStructure], tol: float = VERDICT_TOL):
    """Test a list of user-supplied structures; no search over structures is attempted."""
    return [separability_test(psi, gamma, v, tol) for v in candidates]


def _rank_one_observable(block, frame, item, d, tol) -> SubsystemObservable:
    if isinstance(item, SubsystemObservable):
        lams = np.asarray(item.eigenvalues)
        nonzero = lams[np.abs(lams) > tol]
        if len(nonzero) != 1 or abs(nonzero[0] - 1.0) >= tol:
            raise DomainError("block projector must have a single unit eigenvalue")
        return build_subsystem_observable(
            block, frame, [(1.0, mu) for lam, mu in item.spectral_pairs if abs(lam) > tol], d
        )
    if isinstance(item, StateVector):
        nrm = item.norm()
        if nrm == 0:
            raise DomainError("zero vector cannot define a projector")
        try:
            return build_subsystem_observable(block, frame, [(1.0, item.normalize())], d, tol=1e-10)
        except SupportError:
            raise
    mat = np.asarray(item, dtype=complex)
    if (
        np.max(np.abs(mat @ mat - mat)) >= tol
        or abs(np.trace(mat) - 1.0) >= tol
        or np.max(np.abs(mat - mat.conj().T)) >= tol
    ):
        raise DomainError("block projector is not a rank-1 orthogonal projector")
    return observable_from_matrix(block, frame, mat, d, tol=1e-10)


@dataclass(frozen=True)
class ProjectorCriterionResult:
    values: dict
    verdict: bool
    mode: str
    omitted: int | None = None


def projector_criterion(
    psi: StateVector,
    gamma: Partition,
    structure: OrthogonalStructure,
    projectors: Sequence,
    mode: str = "all",
    tol: float = VERDICT_TOL,
) -> ProjectorCriterionResult:
    """Evaluate <Psi|P^(k)|Psi> for one rank-1 projector per block.

    ``projectors[k]`` may be a normalized block vector, a block matrix or a
    rank-1 SubsystemObservable.  In ``"economical"`` mode exactly one entry is
    ``None``; that block keeps its W-projector and contributes no condition.
    """
    _require_normalized(psi)
    if mode not in ("all", "economical"):
        raise DomainError(f"unknown mode {mode!r}")
    structure.check_partition(gamma)
    if len(projectors) != gamma.s:
        raise DomainError(f"{len(projectors)} projector slots for {gamma.s} blocks")
    missing = [k for k, p in enumerate(projectors) if p is None]
    if mode == "all" and missing:
        raise DomainError("all-blocks mode needs a projector for every block")
    if mode == "economical" and len(missing) != 1:
        raise DomainError("economical mode omits exactly one block")
    d = structure.local_dim
    values = {}
    for k, (block, frame, item) in enumerate(zip(gamma.blocks, structure.frames, projectors)):
        if item is None:
            continue
        p_k = _rank_one_observable(block, frame, item, d, 1e-10)
        values[k] = float(expectation(psi, marginal_observable(k, gamma, structure, p_k)).real)
    verdict = all(abs(v - 1.0) < tol for v in values.values())
    return ProjectorCriterionResult(values, verdict, mode, missing[0] if missing else None)


def _as_single_projector(p, d: int, tol: float) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if p.ndim == 1:
        nrm = np.linalg.norm(p)
        if nrm == 0:
            raise DomainError("zero vector cannot define a projector")
        p = np.outer(p / nrm, (p / nrm).conj())
    if p.shape != (d, d):
        raise DomainError(f"single-particle projector must be {d}x{d}")
    if (
        np.max(np.abs(p @ p - p)) >= tol
        or abs(np.trace(p) - 1.0) >= tol
        or np.max(np.abs(p - p.conj().T)) >= tol
    ):
        raise DomainError("single-particle projector is not rank-1")
    return p


@dataclass(frozen=True)
class FullSeparabilityResult:
    values: tuple[float, ...]
    verdict: bool


def _single_projectors(projectors, d: int, n: int):
    if len(projectors) != n:
        raise DomainError(f"{len(projectors)} projectors supplied for N={n}")
    mats = [_as_single_projector(p, d, 1e-10) for p in projectors]
    for i, j in itertools.combinations(range(n), 2):
        if np.max(np.abs(mats[i] @ mats[j])) >= IDENTITY_TOL:
            raise DomainError(f"projectors {i} and {j} are not orthogonal")
    return mats


def full_separability_e(psi: StateVector, projectors, tol: float = VERDICT_TOL) -> FullSeparabilityResult:
    """<Psi|E^(i)|Psi> with E^(i) = 1 - (1 - P_i)^{(x)N} for orthogonal rank-1 P_i."""
    _require_normalized(psi)
    d, n = psi.dim_local, psi.num_sites
    mats = _single_projectors(projectors, d, n)
    singles = Partition(tuple((i,) for i in range(1, n + 1)))
    values = []
    for p in mats:
        q = np.eye(d) - p
        miss = apply_blocks(singles, [q] * n, psi.amplitudes, d)
        values.append(float(1.0 - np.vdot(psi.amplitudes, miss).real))
    return FullSeparabilityResult(tuple(values), all(abs(v - 1.0) < tol for v in values))


def e_operators(projectors, d: int, n: int) -> list[Operator]:
    """Dense E^(i) for each single-particle projector."""
    mats = _single_projectors(projectors, d, n)
    eye = np.eye(d**n)
    return [
        Operator(d, n, eye - reduce(np.kron, [np.eye(d) - p] * n), hermitian=True) for p in mats
    ]


def e_identity_residual(projectors, d: int, n: int) -> float:
    """max |A E A - N! A ((x)_i P_i) A| with E the product of the E^(i)."""
    mats = _single_projectors(projectors, d, n)
    e_total = reduce(np.matmul, [e.entries for e in e_operators(mats, d, n)])
    b = total_asym_basis(n, d).matrix
    proj = b @ b.conj().T
    lhs = proj @ e_total @ proj
    rhs = math.factorial(n) * proj @ reduce(np.kron, mats) @ proj
    return float(np.max(np.abs(lhs - rhs)))


LR_TAGS = ("L", "R")


def spin_family(a, b) -> Operator:
    """Anti-symmetrized sigma(a) (x) sigma(b) on two spin-1/2 particles."""
    b_asym = total_asym_basis(2, 2).matrix
    proj = b_asym @ b_asym.conj().T
    return Operator(2, 2, proj @ np.kron(pauli(a), pauli(b)) @ proj, hermitian=True)


def spatial_family(a, b) -> AssembledObservable:
    """A(sigma(a)|L><L| (x) sigma(b)|R><R|)A on C^2 (x) {L, R} per particle."""
    v = tag_structure(LR_TAGS, LR_TAGS)
    gamma = Partition(((1,), (2,)))
    o1 = observable_from_matrix((1,), v.frames[0], tagged_operator(pauli(a), "L", LR_TAGS))
    o2 = observable_from_matrix((2,), v.frames[1], tagged_operator(pauli(b), "R", LR_TAGS))
    return assemble_o(gamma, v, [o1, o2])


FAMILIES: dict[str, Callable] = {"spin": spin_family, "spatial": spatial_family}


def chsh_correlators(psi: StateVector, a, a2, b, b2, family="spin") -> tuple[float, float, float, float]:
    """C(a,b), C(a,b'), C(a',b), C(a',b')."""
    axes = [unit_axis(x) for x in (a, a2, b, b2)]
    build = FAMILIES[family] if isinstance(family, str) else family
    a, a2, b, b2 = axes
    return tuple(
        float(expectation(psi, build(x, y)).real) for x, y in ((a, b), (a, b2), (a2, b), (a2, b2))
    )


def chsh_value(psi: StateVector, a, a2, b, b2, family="spin") -> float:
    """|C(a,b) + C(a,b') + C(a',b) - C(a',b')|."""
    if isinstance(family, str) and family not in FAMILIES:
        raise DomainError(f"unknown observable family {family!r}")
    c_ab, c_ab2, c_a2b, c_a2b2 = chsh_correlators(psi, a, a2, b, b2, family)
    return abs(c_ab + c_ab2 + c_a2b - c_a2b2)


def factorization_table(state: SeparableState, op: AssembledObservable) -> dict:
    """Expectation of O three ways: directly, via marginals, and via block factors."""
    psi = state.vector
    direct = expectation(psi, op)
    marginals = [
        expectation(psi, marginal_observable(k, op.partition, op.structure, o))
        for k, o in enumerate(op.blocks)
    ]
    blocks = [o.expectation(f) for o, f in zip(op.blocks, state.factors)]
    return {
        "direct": direct,
        "marginals": marginals,
        "marginal_product": complex(np.prod(marginals)),
        "blocks": blocks,
        "block_product": complex(np.prod(blocks)),
    }


__all__ = [
    "Verdict",
    "SeparabilityReport",
    "WeakValueResult",
    "FactoredInner",
    "ProjectorCriterionResult",
    "FullSeparabilityResult",
    "expectation",
    "matrix_element",
    "inner_product_factors",
    "weak_value",
    "separability_test",
    "check_candidates",
    "span_isometry",
    "projector_criterion",
    "full_separability_e",
    "e_operators",
    "e_identity_residual",
    "chsh_value",
    "chsh_correlators",
    "spin_family",
    "spatial_family",
    "factorization_table",
    "identity_blocks",
]

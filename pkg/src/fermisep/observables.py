"""Subsystem observables and their assembly into N-particle observables.

Block indices are 0-based positions in ``Partition.blocks``; particle labels
stay 1-based.  A subsystem observable is always stored spectrally, with its
eigenvectors checked to lie in the antisymmetric block space W(Gamma_k, V_k)
(or in the full antisymmetric block space when no frame is given).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .antisym import (
    AntisymmetrizerAction,
    OrthogonalStructure,
    SubspaceBasis,
    antisymmetrize_array,
    place_blocks,
    subspace_w,
    total_asym_basis,
)
from .errors import CapacityError, ClosureError, DomainError, SupportError
from .symmetric import (
    Partition,
    Permutation,
    act_on_partition,
    coset_representatives,
    permute_sites,
)
from .tensor import DENSE_CAP, HERMITIAN_TOL, Operator, StateVector

SUPPORT_TOL = 1e-12

A_SANDWICH = "A-sandwich"
COSET_SUM = "coset-sum"


def _block_basis(block, frame, d) -> SubspaceBasis:
    if frame is None:
        frame = np.eye(d)
    return subspace_w(tuple(block), frame, d)


@dataclass(frozen=True, eq=False)
class SubsystemObservable:
    """O_k = sum_mu lambda_mu |mu><mu| on the sites of one block."""

    block: tuple[int, ...]
    dim_local: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns |mu>
    frame: np.ndarray | None = None

    @property
    def num_sites(self) -> int:
        return len(self.block)

    @property
    def spectral_pairs(self) -> list[tuple[float, StateVector]]:
        return [
            (float(lam), StateVector(self.dim_local, self.num_sites, self.eigenvectors[:, j]))
            for j, lam in enumerate(self.eigenvalues)
        ]

    @cached_property
    def matrix(self) -> np.ndarray:
        vecs = self.eigenvectors
        out = (vecs * self.eigenvalues) @ vecs.conj().T
        out.setflags(write=False)
        return out

    def expectation(self, psi: StateVector) -> complex:
        return complex(np.vdot(psi.amplitudes, self.matrix @ psi.amplitudes))

    def matrix_element(self, phi: StateVector, psi: StateVector) -> complex:
        return complex(np.vdot(phi.amplitudes, self.matrix @ psi.amplitudes))


def build_subsystem_observable(
    block: Sequence[int],
    frame,
    spectral_pairs,
    dim_local: int | None = None,
    tol: float = SUPPORT_TOL,
) -> SubsystemObservable:
    """Validate spectral data against W(block, frame).

    ``frame`` may be ``None`` to mean the whole single-particle space.
    """
    block = tuple(sorted(block))
    pairs = list(spectral_pairs)
    if dim_local is None:
        if frame is not None:
            dim_local = np.asarray(frame).shape[0]
        elif pairs:
            dim_local = pairs[0][1].dim_local
        else:
            raise DomainError("cannot infer the local dimension")
    lams = []
    for lam, _ in pairs:
        lam = complex(lam)
        if abs(lam.imag) > tol:
            raise DomainError(f"eigenvalue {lam} is not real")
        lams.append(lam.real)
    n = len(block)
    vecs = np.zeros((dim_local**n, len(pairs)), dtype=complex)
    for j, (_, mu) in enumerate(pairs):
        if (mu.dim_local, mu.num_sites) != (dim_local, n):
            raise DomainError(f"eigenvector {j} does not live on the block space")
        vecs[:, j] = mu.amplitudes
    if pairs:
        gram = vecs.conj().T @ vecs
        dev = np.max(np.abs(gram - np.eye(len(pairs))))
        if dev >= max(tol, 1e-12):
            raise DomainError(f"eigenvectors are not orthonormal (deviation {dev:.3e})")
        basis = _block_basis(block, frame, dim_local)
        resid = np.linalg.norm(vecs - basis.matrix @ (basis.matrix.conj().T @ vecs), axis=0)
        if np.max(resid) >= tol:
            raise SupportError(
                f"eigenvector {int(np.argmax(resid))} leaves W by {np.max(resid):.3e}"
            )
    vecs.setflags(write=False)
    lam_arr = np.array(lams, dtype=float)
    lam_arr.setflags(write=False)
    fr = None if frame is None else np.asarray(frame, dtype=complex)
    return SubsystemObservable(block, dim_local, lam_arr, vecs, fr)


def observable_from_matrix(
    block: Sequence[int], frame, matrix, dim_local: int | None = None, tol: float = SUPPORT_TOL
) -> SubsystemObservable:
    """Spectral form of a Hermitian block matrix that is supported in W."""
    matrix = np.asarray(matrix, dtype=complex)
    if dim_local is None:
        dim_local = np.asarray(frame).shape[0] if frame is not None else round(
            matrix.shape[0] ** (1 / len(block))
        )
    if np.max(np.abs(matrix - matrix.conj().T)) >= HERMITIAN_TOL:
        raise DomainError("block matrix is not Hermitian")
    basis = _block_basis(tuple(sorted(block)), frame, dim_local)
    b = basis.matrix
    compressed = b.conj().T @ matrix @ b
    leak = np.max(np.abs(matrix - b @ compressed @ b.conj().T)) if matrix.size else 0.0
    if leak >= tol * max(1.0, np.max(np.abs(matrix))):
        raise SupportError(f"block matrix is not supported in W (leak {leak:.3e})")
    lams, u = np.linalg.eigh((compressed + compressed.conj().T) / 2)
    vecs = b @ u
    pairs = [(lams[j], StateVector(dim_local, len(block), vecs[:, j])) for j in range(len(lams))]
    return build_subsystem_observable(block, frame, pairs, dim_local, tol=max(tol, 1e-11))


def block_identity(block: Sequence[int], frame, dim_local: int | None = None) -> SubsystemObservable:
    """The projector onto W(block, frame): every eigenvalue equal to one."""
    d = dim_local if dim_local is not None else np.asarray(frame).shape[0]
    basis = _block_basis(tuple(sorted(block)), frame, d)
    return build_subsystem_observable(block, frame, [(1.0, v) for v in basis.vectors], d)


def rank_one_projector(block: Sequence[int], frame, vector: StateVector) -> SubsystemObservable:
    return build_subsystem_observable(block, frame, [(1.0, vector.normalize())], vector.dim_local)


def apply_blocks(gamma: Partition, mats: Sequence[np.ndarray], arr: np.ndarray, d: int) -> np.ndarray:
    """Apply (x)_k O_k, with O_k on the sites of block k, to a stack of vectors."""
    n = gamma.n
    batch = arr.shape[1:]
    tensor = np.asarray(arr, dtype=complex).reshape((d,) * n + batch)
    for block, mat in zip(gamma.blocks, mats):
        axes = [i - 1 for i in block]
        front = np.moveaxis(tensor, axes, list(range(len(axes))))
        shape = front.shape
        front = (mat @ front.reshape(d ** len(axes), -1)).reshape(shape)
        tensor = np.moveaxis(front, list(range(len(axes))), axes)
    return tensor.reshape((d**n,) + batch)


def block_product_matrix(gamma: Partition, mats: Sequence[np.ndarray], d: int) -> np.ndarray:
    """Dense (x)_k O_k with block k placed on its own sites."""
    if d**gamma.n > DENSE_CAP:
        raise CapacityError(f"dense operator of side {d**gamma.n} exceeds cap {DENSE_CAP}")
    x = reduce(np.kron, mats)
    rows = place_blocks(gamma, x, d)
    return place_blocks(gamma, rows.conj().T, d).conj().T


def conjugate_by(mat: np.ndarray, perm: Permutation, d: int) -> np.ndarray:
    """pi_sigma X pi_sigma^dagger for a dense matrix X."""
    n = perm.n
    dim = d**n
    left = permute_sites(mat.reshape((d,) * n + (dim,)), perm).reshape(dim, dim)
    right = permute_sites(left.conj().T.reshape((d,) * n + (dim,)), perm).reshape(dim, dim)
    return right.conj().T


@dataclass(frozen=True, eq=False)
class AssembledObservable:
    """An N-particle observable built from one subsystem observable per block.

    ``form`` is ``"A-sandwich"`` for A(Gamma) ((x)_k O_k) A(Gamma) and
    ``"coset-sum"`` for the permutation-symmetrized sum over S_N / I(Gamma).
    """

    partition: Partition
    structure: OrthogonalStructure | None
    blocks: tuple[SubsystemObservable, ...]
    form: str = A_SANDWICH

    @property
    def dim_local(self) -> int:
        return self.blocks[0].dim_local

    @property
    def num_sites(self) -> int:
        return self.partition.n

    def _mats(self):
        return [b.matrix for b in self.blocks]

    def act(self, v: StateVector) -> StateVector:
        """Matrix-free application."""
        d, gamma = self.dim_local, self.partition
        if (v.dim_local, v.num_sites) != (d, gamma.n):
            raise DomainError("observable and vector live on different spaces")
        if self.form == A_SANDWICH:
            w = antisymmetrize_array(v.amplitudes, gamma.n, d)
            w = apply_blocks(gamma, self._mats(), w, d)
            w = gamma.multinomial * antisymmetrize_array(w, gamma.n, d)
            return v.like(w)
        out = np.zeros(v.dim, dtype=complex)
        tensor_shape = (d,) * gamma.n
        for rep in coset_representatives(gamma):
            w = permute_sites(v.as_tensor(), rep.inverse()).reshape(-1)
            w = apply_blocks(gamma, self._mats(), w, d)
            out += permute_sites(w.reshape(tensor_shape), rep).reshape(-1)
        return v.like(out)

    @cached_property
    def operator(self) -> Operator:
        d, gamma = self.dim_local, self.partition
        x = block_product_matrix(gamma, self._mats(), d)
        if self.form == A_SANDWICH:
            b = total_asym_basis(gamma.n, d).matrix
            mat = gamma.multinomial * (b @ (b.conj().T @ x @ b) @ b.conj().T)
        else:
            mat = sum(conjugate_by(x, rep, d) for rep in coset_representatives(gamma))
        return Operator(d, gamma.n, mat, hermitian=True)

    @property
    def entries(self) -> np.ndarray:
        return self.operator.entries

    def __add__(self, other) -> Operator:
        # the class is not closed under addition: the sum is a bare operator
        other_op = other.operator if isinstance(other, AssembledObservable) else other
        return Operator(self.dim_local, self.num_sites, self.entries + other_op.entries)


def _check_blocks(gamma: Partition, structure, obs):
    if len(obs) != gamma.s:
        raise DomainError(f"{len(obs)} subsystem observables supplied for {gamma.s} blocks")
    d = obs[0].dim_local
    for k, (block, o) in enumerate(zip(gamma.blocks, obs)):
        if tuple(o.block) != tuple(block):
            raise DomainError(f"observable {k} acts on {o.block}, block {k} is {block}")
        if o.dim_local != d:
            raise DomainError("subsystem observables disagree on the local dimension")
    if structure is not None:
        structure.check_partition(gamma)
        if structure.local_dim != d:
            raise DomainError("structure and observables disagree on the local dimension")
        for k, (block, frame, o) in enumerate(zip(gamma.blocks, structure.frames, obs)):
            if o.eigenvectors.shape[1] == 0:
                continue
            basis = subspace_w(block, frame, d)
            vecs = o.eigenvectors
            resid = np.linalg.norm(vecs - basis.matrix @ (basis.matrix.conj().T @ vecs), axis=0)
            if np.max(resid) >= SUPPORT_TOL * 10:
                raise SupportError(f"observable {k} is not supported in W(Gamma_{k}, V_{k})")


def assemble_o(
    gamma: Partition, structure: OrthogonalStructure | None, obs: Sequence[SubsystemObservable]
) -> AssembledObservable:
    """O = A(Gamma) ((x)_k O_k) A(Gamma)."""
    obs = tuple(obs)
    _check_blocks(gamma, structure, obs)
    return AssembledObservable(gamma, structure, obs, A_SANDWICH)


def assemble_o_tilde(gamma: Partition, obs: Sequence[SubsystemObservable]) -> AssembledObservable:
    """Sum over coset representatives of pi ((x)_k O_k) pi^dagger."""
    obs = tuple(obs)
    _check_blocks(gamma, None, obs)
    return AssembledObservable(gamma, None, obs, COSET_SUM)


def identity_blocks(gamma: Partition, structure: OrthogonalStructure) -> list[SubsystemObservable]:
    d = structure.local_dim
    return [block_identity(b, f, d) for b, f in zip(gamma.blocks, structure.frames)]


def marginal_observable(
    k: int, gamma: Partition, structure: OrthogonalStructure, obs_k: SubsystemObservable
) -> AssembledObservable:
    """O^(k): O_k on block k (0-based) and the W-projectors on every other block."""
    if not 0 <= k < gamma.s:
        raise DomainError(f"block index {k} outside [0, {gamma.s})")
    blocks = identity_blocks(gamma, structure)
    blocks[k] = obs_k
    return assemble_o(gamma, structure, blocks)


def compose(a: AssembledObservable, b: AssembledObservable, tol: float = HERMITIAN_TOL) -> AssembledObservable:
    """Product of two members of C(Gamma, V), returned in assembled form."""
    if a.form != A_SANDWICH or b.form != A_SANDWICH:
        raise DomainError("compose is defined for A-sandwich observables")
    if a.partition != b.partition:
        raise DomainError("observables belong to different partitions")
    if (a.structure is None) != (b.structure is None) or (
        a.structure is not None
        and not all(
            fa.shape == fb.shape and np.allclose(fa, fb, atol=1e-12)
            for fa, fb in zip(a.structure.frames, b.structure.frames)
        )
    ):
        raise DomainError("observables belong to different orthogonal structures")
    frames = a.structure.frames if a.structure is not None else [None] * a.partition.s
    prods = []
    for k, (oa, ob, frame) in enumerate(zip(a.blocks, b.blocks, frames)):
        m = oa.matrix @ ob.matrix
        dev = np.max(np.abs(m - m.conj().T))
        if dev >= tol:
            raise ClosureError(f"block {k} product is not self-adjoint (deviation {dev:.3e})")
        prods.append(observable_from_matrix(oa.block, frame, (m + m.conj().T) / 2, oa.dim_local))
    return assemble_o(a.partition, a.structure, prods)


def transport_block_vector(vec: StateVector, block: Sequence[int], perm: Permutation) -> StateVector:
    """Carry a block state from sites ``block`` to sites ``perm(block)``.

    Both block spaces index their sites in increasing label order, so the
    relative order of the sites may change.
    """
    block = tuple(sorted(block))
    images = [perm(i) for i in block]
    target = sorted(images)
    local = Permutation(tuple(target.index(j) + 1 for j in images))
    out = permute_sites(vec.as_tensor(), local).reshape(-1)
    return vec.like(np.ascontiguousarray(out))


def transport_observables(
    perm: Permutation, gamma: Partition, obs: Sequence[SubsystemObservable]
) -> tuple[Partition, list[SubsystemObservable]]:
    """Move every spectral vector with pi_sigma; returns Gamma^sigma and the new O_k."""
    new_gamma = act_on_partition(perm, gamma)
    moved = []
    for block, new_block, o in zip(gamma.blocks, new_gamma.blocks, obs):
        pairs = [(lam, transport_block_vector(mu, block, perm)) for lam, mu in o.spectral_pairs]
        moved.append(build_subsystem_observable(new_block, o.frame, pairs, o.dim_local, tol=1e-11))
    return new_gamma, moved


def permuted_assembly_equal(
    gamma: Partition,
    perm: Permutation,
    obs: Sequence[SubsystemObservable],
    structure: OrthogonalStructure | None = None,
    tol: float = 1e-12,
) -> bool:
    """Whether O(Gamma^sigma), built from transported spectral data, equals O(Gamma)."""
    base = assemble_o(gamma, structure, obs)
    new_gamma, moved = transport_observables(perm, gamma, obs)
    other = assemble_o(new_gamma, structure, moved)
    return bool(np.max(np.abs(base.entries - other.entries)) < tol)


def rescaled_action(gamma: Partition, d: int) -> AntisymmetrizerAction:
    return AntisymmetrizerAction(gamma.n, d, math.sqrt(gamma.multinomial))

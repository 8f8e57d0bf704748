"""Anti-symmetrizers, Slater bases and antisymmetrized product states.

The anti-symmetrizer is applied matrix-free as a signed sum of axis
transpositions.  Dense matrices are produced only when asked for and only
below :data:`fermisep.tensor.DENSE_CAP`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError, EmptySpaceError, SupportError
from .symmetric import Partition, Permutation, enumerate_sn, permute_sites
from .tensor import DENSE_CAP, Operator, StateVector, tensor_product

FRAME_TOL = 1e-12


class DegenerateAntisymmetrizationWarning(UserWarning):
    """Raised as a warning when d < N forces an antisymmetrized state to vanish."""


def antisymmetrize_array(arr: np.ndarray, n: int, d: int) -> np.ndarray:
    """Apply (1/n!) sum_sigma sgn(sigma) pi_sigma to the leading n site axes.

    ``arr`` has shape ``(d**n, ...)``; trailing axes are batch axes.  The sum
    runs in lexicographic order so the result is reproducible bit for bit.
    """
    arr = np.asarray(arr, dtype=complex)
    batch = arr.shape[1:]
    tensor = arr.reshape((d,) * n + batch)
    out = np.zeros_like(tensor)
    for perm in enumerate_sn(n):
        if perm.sign > 0:
            out += permute_sites(tensor, perm)
        else:
            out -= permute_sites(tensor, perm)
    out /= math.factorial(n)
    return out.reshape((d**n,) + batch)


@dataclass(frozen=True)
class AntisymmetrizerAction:
    """Matrix-free anti-symmetrizer on (C^d)^{(x)N}, optionally rescaled."""

    num_sites: int
    dim_local: int
    scale: float = 1.0

    def act(self, v: StateVector) -> StateVector:
        if (v.dim_local, v.num_sites) != (self.dim_local, self.num_sites):
            raise DomainError("anti-symmetrizer and vector live on different spaces")
        out = antisymmetrize_array(v.amplitudes, self.num_sites, self.dim_local)
        return v.like(self.scale * out)


def antisymmetrize(v: StateVector) -> StateVector:
    return AntisymmetrizerAction(v.num_sites, v.dim_local).act(v)


def _check_cap(n: int, d: int):
    if d**n > DENSE_CAP:
        raise CapacityError(
            f"dense anti-symmetrizer of side {d**n} exceeds cap {DENSE_CAP}; "
            "use AntisymmetrizerAction instead"
        )


def antisymmetrizer(n: int, d: int) -> Operator:
    """Dense (1/N!) sum_sigma sgn(sigma) pi_sigma."""
    _check_cap(n, d)
    mat = antisymmetrize_array(np.eye(d**n, dtype=complex), n, d)
    return Operator(d, n, mat)


def rescaled_antisymmetrizer(gamma: Partition, d: int) -> Operator:
    """Dense A(Gamma) = sqrt(M(Gamma)) times the anti-symmetrizer."""
    base = antisymmetrizer(gamma.n, d)
    return Operator(d, gamma.n, math.sqrt(gamma.multinomial) * base.entries)


def asym_membership(v: StateVector, tol: float = 1e-12) -> tuple[bool, float]:
    """Whether ``v`` is totally antisymmetric, with residual ||Av - v||."""
    residual = (antisymmetrize(v) - v).norm()
    return residual < tol, residual


def _colex_subsets(m: int, n: int) -> list[tuple[int, ...]]:
    return sorted(itertools.combinations(range(m), n), key=lambda c: c[::-1])


@dataclass(frozen=True, eq=False)
class OrthogonalStructure:
    """Mutually orthogonal subspaces V_1..V_m of C^d, one orthonormal frame each.

    ``frames[k]`` is a ``d x dim V_k`` matrix whose columns span V_k.
    """

    local_dim: int
    frames: tuple
    tol: float = FRAME_TOL

    def __post_init__(self):
        d = int(self.local_dim)
        frames = []
        for k, f in enumerate(self.frames):
            f = np.array(f, dtype=complex, copy=True)
            if f.ndim == 1:
                f = f[:, None]
            if f.shape[0] != d:
                raise DomainError(f"frame {k} has {f.shape[0]} rows, expected d={d}")
            gram = f.conj().T @ f
            if f.shape[1] and np.max(np.abs(gram - np.eye(f.shape[1]))) >= self.tol:
                raise DomainError(f"columns of frame {k} are not orthonormal")
            f.setflags(write=False)
            frames.append(f)
        for j, k in itertools.combinations(range(len(frames)), 2):
            if frames[j].size and frames[k].size:
                cross = np.max(np.abs(frames[j].conj().T @ frames[k]))
                if cross >= self.tol:
                    raise DomainError(f"frames {j} and {k} are not orthogonal ({cross:.3e})")
        object.__setattr__(self, "local_dim", d)
        object.__setattr__(self, "frames", tuple(frames))

    @classmethod
    def from_vectors(cls, local_dim: int, spans: Sequence[Sequence], tol: float = FRAME_TOL):
        """Build from lists of orthonormal spanning vectors."""
        return cls(local_dim, tuple(np.array(vs, dtype=complex).T for vs in spans), tol)

    @classmethod
    def from_basis_sets(cls, local_dim: int, index_sets: Sequence[Sequence[int]]):
        """Subspaces spanned by computational basis kets, e.g. [[0, 1], [2, 3]]."""
        eye = np.eye(local_dim)
        return cls(local_dim, tuple(eye[:, list(ix)] for ix in index_sets))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.shape[1] for f in self.frames)

    def __len__(self):
        return len(self.frames)

    def check_partition(self, gamma: Partition):
        if len(self.frames) != gamma.s:
            raise DomainError(f"{len(self.frames)} subspaces supplied for {gamma.s} blocks")
        for k, (m, n) in enumerate(zip(self.dims, gamma.sizes)):
            if m < n:
                raise EmptySpaceError(
                    f"block {k + 1} has {n} particles but dim V_{k + 1} = {m}"
                )


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal Slater basis of an antisymmetric block space.

    ``matrix`` has one basis vector per column, ordered colexicographically
    by the frame columns they occupy.
    """

    dim_local: int
    num_sites: int
    matrix: np.ndarray
    occupations: tuple[tuple[int, ...], ...]

    @property
    def ambient_dim(self) -> int:
        return self.dim_local**self.num_sites

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def vectors(self) -> list[StateVector]:
        return [
            StateVector(self.dim_local, self.num_sites, self.matrix[:, j])
            for j in range(self.dim)
        ]

    def projector(self) -> np.ndarray:
        return self.matrix @ self.matrix.conj().T

    def coordinates(self, v: StateVector) -> np.ndarray:
        return self.matrix.conj().T @ v.amplitudes

    def residual(self, v: StateVector) -> float:
        """Distance from ``v`` to the span."""
        return float(np.linalg.norm(v.amplitudes - self.matrix @ self.coordinates(v)))

    def combine(self, coords) -> StateVector:
        return StateVector(self.dim_local, self.num_sites, self.matrix @ np.asarray(coords))


def slater_matrix(frame: np.ndarray, n: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Columns sqrt(n!) A(f_c1 x ... x f_cn) over colex subsets c of frame columns."""
    frame = np.asarray(frame, dtype=complex)
    d, m = frame.shape
    subsets = _colex_subsets(m, n)
    if not subsets:
        return np.zeros((d**n, 0), dtype=complex), []
    prods = np.stack(
        [
            tensor_product([StateVector(d, 1, frame[:, c]) for c in subset]).amplitudes
            for subset in subsets
        ],
        axis=1,
    )
    mat = math.sqrt(math.factorial(n)) * antisymmetrize_array(prods, n, d)
    return mat, subsets


def subspace_w(block: Sequence[int], frame, dim_local: int | None = None) -> SubspaceBasis:
    """Slater basis of Asym(V_k^{(x)|block|}), dimension binomial(dim V_k, |block|)."""
    frame = np.asarray(frame, dtype=complex)
    if frame.ndim == 1:
        frame = frame[:, None]
    d = frame.shape[0] if dim_local is None else dim_local
    n = len(block)
    if frame.shape[1] < n:
        raise EmptySpaceError(
            f"no antisymmetric states of {n} particles fit in a {frame.shape[1]}-dim subspace"
        )
    mat, subsets = _cached_slater(frame.tobytes(), frame.shape, n)
    return SubspaceBasis(d, n, mat, tuple(subsets))


@lru_cache(maxsize=256)
def _cached_slater(raw: bytes, shape: tuple[int, int], n: int):
    frame = np.frombuffer(raw, dtype=complex).reshape(shape)
    mat, subsets = slater_matrix(frame, n)
    mat.setflags(write=False)
    return mat, subsets


def total_asym_basis(n: int, d: int) -> SubspaceBasis:
    """Slater basis of the whole antisymmetric space of N particles in C^d."""
    if d < n:
        return SubspaceBasis(d, n, np.zeros((d**n, 0), dtype=complex), ())
    return subspace_w(tuple(range(1, n + 1)), np.eye(d))


def block_sites_permutation(gamma: Partition) -> Permutation:
    """pi of this permutation moves a block-ordered layout to natural site order."""
    return Permutation(gamma.site_order())


def place_blocks(gamma: Partition, arr: np.ndarray, d: int) -> np.ndarray:
    """Re-index an array laid out block by block so that sites are in natural order.

    ``arr`` has shape ``(d**N, ...)`` where the leading index runs over the
    Kronecker product of the blocks in partition order.
    """
    n = gamma.n
    batch = arr.shape[1:]
    tensor = np.asarray(arr).reshape((d,) * n + batch)
    out = permute_sites(tensor, block_sites_permutation(gamma))
    return np.ascontiguousarray(out).reshape((d**n,) + batch)


def product_on_blocks(gamma: Partition, factors: Sequence[StateVector]) -> StateVector:
    """The unsymmetrized product with factor k occupying the sites of block k."""
    if len(factors) != gamma.s:
        raise DomainError(f"{len(factors)} factors supplied for {gamma.s} blocks")
    d = factors[0].dim_local
    for k, (f, size) in enumerate(zip(factors, gamma.sizes)):
        if f.dim_local != d or f.num_sites != size:
            raise DomainError(
                f"factor {k + 1} lives on (d={f.dim_local}, n={f.num_sites}), "
                f"block needs (d={d}, n={size})"
            )
    prod = tensor_product(factors).amplitudes
    return StateVector(d, gamma.n, place_blocks(gamma, prod, d))


def antisymmetrize_product(gamma: Partition, factors: Sequence[StateVector]) -> StateVector:
    """A(Gamma) applied to the block product of ``factors``.

    When d < N the result is necessarily zero; this is returned with a
    :class:`DegenerateAntisymmetrizationWarning`.
    """
    prod = product_on_blocks(gamma, factors)
    if prod.dim_local < gamma.n:
        warnings.warn(
            f"d={prod.dim_local} < N={gamma.n}: the antisymmetrized state vanishes",
            DegenerateAntisymmetrizationWarning,
            stacklevel=2,
        )
    return AntisymmetrizerAction(gamma.n, prod.dim_local, math.sqrt(gamma.multinomial)).act(prod)


@dataclass(frozen=True, eq=False)
class SeparableState:
    """A state A(Gamma) (x)_k psi_k certified to lie in S(Gamma, V).

    Each factor has been checked to lie in W(Gamma_k, V_k).
    """

    partition: Partition
    structure: OrthogonalStructure
    factors: tuple[StateVector, ...]
    vector: StateVector


def separable_state(
    gamma: Partition,
    structure: OrthogonalStructure,
    factors: Sequence[StateVector],
    tol: float = 1e-12,
) -> SeparableState:
    structure.check_partition(gamma)
    for k, (block, frame, f) in enumerate(zip(gamma.blocks, structure.frames, factors)):
        basis = subspace_w(block, frame, structure.local_dim)
        res = basis.residual(f)
        if res >= tol * max(1.0, f.norm()):
            raise SupportError(f"factor {k + 1} is outside W(Gamma_{k + 1}, V_{k + 1}) by {res:.3e}")
    vec = antisymmetrize_product(gamma, factors)
    return SeparableState(gamma, structure, tuple(factors), vec)

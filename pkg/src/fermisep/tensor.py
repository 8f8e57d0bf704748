"""Dense complex kernel for the product space (C^d)^{(x)N}.

Basis kets are ordered row-major with site 1 most significant, so the flat
index of ``|a_1>|a_2>...|a_N>`` is ``a_1 d^(N-1) + ... + a_N``.  Everything
here is immutable: arrays handed to the constructors are copied and frozen.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError

#: Largest side length d**N for which dense operators are built.
DENSE_CAP = 4096

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def _check_positive(name: str, value: int) -> int:
    if int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def encode_index(digits: Sequence[int], d: int) -> int:
    """Flat index of the multi-index ``digits`` (site 1 most significant)."""
    d = _check_positive("d", d)
    flat = 0
    for a in digits:
        if not 0 <= a < d:
            raise DomainError(f"digit {a} outside [0, {d})")
        flat = flat * d + int(a)
    return flat


def decode_index(flat: int, d: int, n: int) -> tuple[int, ...]:
    """Inverse of :func:`encode_index`."""
    d = _check_positive("d", d)
    n = _check_positive("N", n)
    if not 0 <= flat < d**n:
        raise DomainError(f"flat index {flat} outside [0, {d**n})")
    digits = []
    for _ in range(n):
        flat, a = divmod(flat, d)
        digits.append(a)
    return tuple(reversed(digits))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Ket in (C^d)^{(x)N}, stored as a flat amplitude array of length d^N."""

    dim_local: int
    num_sites: int
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        _check_positive("dim_local", self.dim_local)
        _check_positive("num_sites", self.num_sites)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.size != self.dim_local**self.num_sites:
            raise DomainError(
                f"expected {self.dim_local**self.num_sites} amplitudes, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) >= NORM_TOL:
            raise DomainError("vector flagged normalized has norm %r" % np.linalg.norm(amps))
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_array(cls, amplitudes, dim_local: int) -> "StateVector":
        """Wrap a flat array, inferring the number of sites from its length."""
        amps = np.asarray(amplitudes).reshape(-1)
        n = round(np.log(amps.size) / np.log(dim_local)) if dim_local > 1 else 1
        if dim_local**n != amps.size:
            raise DomainError(f"length {amps.size} is not a power of d={dim_local}")
        return cls(dim_local, max(n, 1), amps)

    @classmethod
    def basis(cls, digits: Sequence[int], dim_local: int) -> "StateVector":
        amps = np.zeros(dim_local ** len(digits), dtype=complex)
        amps[encode_index(digits, dim_local)] = 1.0
        return cls(dim_local, len(digits), amps, normalized=True)

    @classmethod
    def zeros(cls, dim_local: int, num_sites: int) -> "StateVector":
        return cls(dim_local, num_sites, np.zeros(dim_local**num_sites, dtype=complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.dim_local,) * self.num_sites)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return StateVector(self.dim_local, self.num_sites, self.amplitudes / nrm, normalized=True)

    def like(self, amplitudes) -> "StateVector":
        """New vector on the same space."""
        return StateVector(self.dim_local, self.num_sites, amplitudes)

    def _same_space(self, other: "StateVector"):
        if (self.dim_local, self.num_sites) != (other.dim_local, other.num_sites):
            raise DomainError(
                f"space mismatch: (d={self.dim_local}, N={self.num_sites}) vs "
                f"(d={other.dim_local}, N={other.num_sites})"
            )

    def __add__(self, other: "StateVector") -> "StateVector":
        self._same_space(other)
        return self.like(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        self._same_space(other)
        return self.like(self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "StateVector":
        return self.like(self.amplitudes * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "StateVector":
        return self.like(-self.amplitudes)

    def __repr__(self):
        return f"StateVector(d={self.dim_local}, N={self.num_sites}, norm={self.norm():.6g})"


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square matrix on (C^d)^{(x)N}.

    Setting ``hermitian=True`` asserts self-adjointness at construction time.
    """

    dim_local: int
    num_sites: int
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        _check_positive("dim_local", self.dim_local)
        _check_positive("num_sites", self.num_sites)
        side = self.dim_local**self.num_sites
        if side > DENSE_CAP:
            raise CapacityError(f"dense operator of side {side} exceeds cap {DENSE_CAP}")
        mat = _frozen(self.entries)
        if mat.shape != (side, side):
            raise DomainError(f"expected a {side}x{side} matrix, got shape {mat.shape}")
        if self.hermitian:
            dev = np.max(np.abs(mat - mat.conj().T)) if side else 0.0
            if dev >= HERMITIAN_TOL:
                raise DomainError(f"operator flagged hermitian deviates by {dev:.3e}")
        object.__setattr__(self, "entries", mat)

    @classmethod
    def identity(cls, dim_local: int, num_sites: int) -> "Operator":
        if dim_local**num_sites > DENSE_CAP:
            raise CapacityError(f"dense operator of side {dim_local**num_sites} exceeds cap {DENSE_CAP}")
        return cls(dim_local, num_sites, np.eye(dim_local**num_sites), hermitian=True)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.dim_local, self.num_sites, self.entries.conj().T, self.hermitian)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) < tol)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return apply(self, other)
        if isinstance(other, Operator):
            if (self.dim_local, self.num_sites) != (other.dim_local, other.num_sites):
                raise DomainError("operator space mismatch")
            return Operator(self.dim_local, self.num_sites, self.entries @ other.entries)
        return NotImplemented

    def __repr__(self):
        return f"Operator(d={self.dim_local}, N={self.num_sites}, hermitian={self.hermitian})"


def tensor_product(factors):
    """Kronecker product of a nonempty list of StateVectors or of Operators."""
    factors = list(factors)
    if not factors:
        raise DomainError("tensor_product needs at least one factor")
    d = factors[0].dim_local
    if any(f.dim_local != d for f in factors):
        raise DomainError("all factors must share the same local dimension")
    n = sum(f.num_sites for f in factors)
    if all(isinstance(f, StateVector) for f in factors):
        amps = reduce(np.kron, [f.amplitudes for f in factors])
        return StateVector(d, n, amps)
    if all(isinstance(f, Operator) for f in factors):
        if d**n > DENSE_CAP:
            raise CapacityError(f"dense operator of side {d**n} exceeds cap {DENSE_CAP}")
        mat = reduce(np.kron, [f.entries for f in factors])
        return Operator(d, n, mat, hermitian=all(f.hermitian for f in factors))
    raise DomainError("factors must be all StateVectors or all Operators")


def inner(bra: StateVector, ket: StateVector) -> complex:
    """<bra|ket>, conjugate-linear in ``bra``."""
    bra._same_space(ket)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def apply(op, v: StateVector) -> StateVector:
    """Apply a dense Operator or a matrix-free action (anything with ``act``)."""
    if isinstance(op, Operator):
        if (op.dim_local, op.num_sites) != (v.dim_local, v.num_sites):
            raise DomainError("operator and vector live on different spaces")
        return v.like(op.entries @ v.amplitudes)
    act = getattr(op, "act", None)
    if act is None:
        raise TypeError(f"cannot apply object of type {type(op).__name__}")
    return act(v)

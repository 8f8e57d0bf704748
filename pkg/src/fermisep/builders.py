"""Spin-1/2 and spatial-tag building blocks.

A local space ``C^2 (x) C^T`` carries a spin (``|+>``, ``|->``, eigenstates of
sigma_z) and one of T localized position tags such as L, C, R.  The local
index of ``|s>|t>`` is ``s * T + t``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .antisym import OrthogonalStructure
from .errors import DomainError
from .tensor import StateVector

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)

AXIS_TOL = 1e-12


def unit_axis(axis, tol: float = AXIS_TOL) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) >= tol:
        raise DomainError(f"{axis} is not a unit 3-vector")
    return axis


def pauli(axis) -> np.ndarray:
    """sigma . a for a unit axis a."""
    ax, ay, az = unit_axis(axis)
    return ax * PAULI_X + ay * PAULI_Y + az * PAULI_Z


def spin_state(axis, sign: int = 1) -> np.ndarray:
    """Eigenvector of sigma . a with eigenvalue ``sign``; phase fixed by a real first entry."""
    vals, vecs = np.linalg.eigh(pauli(axis))
    v = vecs[:, 1 if sign > 0 else 0]
    j = int(np.argmax(np.abs(v) > 1e-12))
    return v * np.exp(-1j * np.angle(v[j]))


def singlet_amplitudes() -> np.ndarray:
    """(|+>|-> - |->|+>)/sqrt(2) on C^2 (x) C^2."""
    return (np.kron(UP, DOWN) - np.kron(DOWN, UP)) / np.sqrt(2)


def singlet() -> StateVector:
    return StateVector(2, 2, singlet_amplitudes(), normalized=True)


def tag_index(tag: str, tags: Sequence[str]) -> int:
    try:
        return list(tags).index(tag)
    except ValueError:
        raise DomainError(f"unknown position tag {tag!r}; known: {list(tags)}") from None


def tag_ket(tag: str, tags: Sequence[str]) -> np.ndarray:
    out = np.zeros(len(tags), dtype=complex)
    out[tag_index(tag, tags)] = 1.0
    return out


def tagged(spin, tag: str, tags: Sequence[str]) -> np.ndarray:
    """Single-particle vector |spin>|tag> in C^(2T)."""
    return np.kron(np.asarray(spin, dtype=complex), tag_ket(tag, tags))


def tagged_operator(spin_op, tag: str, tags: Sequence[str]) -> np.ndarray:
    """spin_op (x) |tag><tag| on C^(2T)."""
    t = tag_ket(tag, tags)
    return np.kron(np.asarray(spin_op, dtype=complex), np.outer(t, t.conj()))


def tag_frame(tag: str, tags: Sequence[str]) -> np.ndarray:
    """Orthonormal frame {|+>|tag>, |->|tag>} as a (2T x 2) matrix."""
    return np.stack([tagged(UP, tag, tags), tagged(DOWN, tag, tags)], axis=1)


def tag_structure(block_tags: Sequence[str], tags: Sequence[str]) -> OrthogonalStructure:
    """V_k = span{|a>|tag_k> : a = +, -} for each block."""
    return OrthogonalStructure(2 * len(tags), tuple(tag_frame(t, tags) for t in block_tags))


def regroup_spin_space(spin_part: np.ndarray, space_part: np.ndarray, n: int, tags_count: int) -> np.ndarray:
    """Reorder (spins of all sites) (x) (positions of all sites) into site-major order.

    Returns amplitudes over (C^2 (x) C^T)^{(x)n} in the standard layout.
    """
    t = np.kron(spin_part, space_part).reshape((2,) * n + (tags_count,) * n)
    order = [ax for i in range(n) for ax in (i, n + i)]
    return np.transpose(t, order).reshape(-1)


def spin_space_product(spin_part, tag_seq: Sequence[str], tags: Sequence[str]) -> StateVector:
    """Unsymmetrized |spin_part> (x) |t_1>_1 ... |t_N>_N in site-major layout."""
    n = len(tag_seq)
    space = np.ones(1, dtype=complex)
    for t in tag_seq:
        space = np.kron(space, tag_ket(t, tags))
    spin_part = np.asarray(spin_part, dtype=complex)
    if spin_part.shape != (2**n,):
        raise DomainError(f"spin part must have 2^{n} amplitudes")
    amps = regroup_spin_space(spin_part, space, n, len(tags))
    return StateVector(2 * len(tags), n, amps)


def symmetric_pair(alpha, alpha2) -> np.ndarray:
    """N(a, a')(|a>|a'> + |a'>|a>) with N = 1/sqrt(2(1 + |<a|a'>|^2))."""
    alpha = np.asarray(alpha, dtype=complex)
    alpha2 = np.asarray(alpha2, dtype=complex)
    norm = 1.0 / np.sqrt(2 * (1 + abs(np.vdot(alpha, alpha2)) ** 2))
    return norm * (np.kron(alpha, alpha2) + np.kron(alpha2, alpha))

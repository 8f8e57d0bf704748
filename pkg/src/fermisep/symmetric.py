"""The symmetric group S_N acting on particle labels and on tensor factors.

Labels are 1-based throughout, as in ``sigma(1), ..., sigma(N)``.
Composition is ``(sigma * tau)(i) = sigma(tau(i))``.

The operator ``pi_sigma`` moves the state of site ``i`` to site ``sigma(i)``::

    pi_sigma |a_1>_1 ... |a_N>_N = |a_1>_{sigma(1)} ... |a_N>_{sigma(N)}

so that ``pi_sigma pi_tau = pi_{sigma * tau}`` and ``pi_sigma^dagger =
pi_{sigma^-1}``.  Actions are applied by axis transposition; the dense matrix
is only built on request.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .tensor import Operator, StateVector

MAX_SN = 8


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..N} in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise DomainError(f"{images} is not a permutation of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        """Build from disjoint cycles, e.g. ``from_cycles(3, (1, 2, 3))``."""
        images = list(range(1, n + 1))
        for cyc in cycles:
            cyc = tuple(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def sign(self) -> int:
        inv = sum(
            1
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.images[i] > self.images[j]
        )
        return -1 if inv % 2 else 1

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.n != other.n:
            raise DomainError("cannot compose permutations of different degree")
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, s in enumerate(self.images, start=1):
            inv[s - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    def __repr__(self):
        return f"Permutation{self.images}"


@dataclass(frozen=True)
class Partition:
    """Ordered list of disjoint nonempty blocks covering {1..N}.

    Block contents are stored sorted; the block order is significant.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise DomainError("a partition needs at least one block and no empty blocks")
        labels = [i for b in blocks for i in b]
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise DomainError(f"blocks {blocks} do not partition 1..{len(labels)}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def s(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def multinomial(self) -> int:
        """M = N! / prod |block|!"""
        return math.factorial(self.n) // math.prod(math.factorial(k) for k in self.sizes)

    def site_order(self) -> tuple[int, ...]:
        """Labels listed block by block: the layout of a block-ordered Kronecker product."""
        return tuple(i for b in self.blocks for i in b)

    def __len__(self):
        return self.s

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, k):
        return self.blocks[k]


def enumerate_sn(n: int) -> list[Permutation]:
    """All of S_N in lexicographic one-line order."""
    if int(n) != n or not 1 <= n <= MAX_SN:
        raise DomainError(f"N must lie in [1, {MAX_SN}], got {n!r}")
    return list(_sn(int(n)))


@lru_cache(maxsize=None)
def _sn(n: int) -> tuple[Permutation, ...]:
    return tuple(Permutation(p) for p in itertools.permutations(range(1, n + 1)))


def permute_sites(tensor: np.ndarray, perm: Permutation) -> np.ndarray:
    """Apply pi_sigma to an array whose leading ``perm.n`` axes are sites.

    Trailing axes are carried along, so a stack of column vectors can be
    permuted in one call.
    """
    n = perm.n
    # output axis sigma(i) takes input axis i
    axes = [perm.inverse()(j + 1) - 1 for j in range(n)]
    axes += list(range(n, tensor.ndim))
    return np.transpose(tensor, axes)


@dataclass(frozen=True)
class PermutationAction:
    """Matrix-free pi_sigma on (C^d)^{(x)N}."""

    perm: Permutation
    dim_local: int

    @property
    def num_sites(self) -> int:
        return self.perm.n

    def act(self, v: StateVector) -> StateVector:
        if (v.dim_local, v.num_sites) != (self.dim_local, self.num_sites):
            raise DomainError("permutation action and vector live on different spaces")
        out = permute_sites(v.as_tensor(), self.perm)
        return v.like(out.reshape(-1))

    def adjoint(self) -> "PermutationAction":
        return PermutationAction(self.perm.inverse(), self.dim_local)

    def to_dense(self) -> Operator:
        d, n = self.dim_local, self.num_sites
        eye = np.eye(d**n, dtype=complex).reshape((d,) * n + (d**n,))
        mat = permute_sites(eye, self.perm).reshape(d**n, d**n)
        return Operator(d, n, mat)


def permutation_operator(perm: Permutation, d: int, n: int | None = None) -> PermutationAction:
    if n is not None and n != perm.n:
        raise DomainError(f"permutation of degree {perm.n} used on {n} sites")
    return PermutationAction(perm, int(d))


def act_on_partition(perm: Permutation, gamma: Partition) -> Partition:
    """Block k of the result is the image set of block k."""
    if perm.n != gamma.n:
        raise DomainError("permutation and partition have different N")
    return Partition(tuple(tuple(perm(i) for i in b) for b in gamma.blocks))


def stabilizer(gamma: Partition) -> list[Permutation]:
    """Permutations fixing every block setwise, in lexicographic order.

    This is the blockwise stabilizer; with equal-size blocks it excludes block
    exchanges, so its order is always ``prod |block|!``.
    """
    n = gamma.n
    out = []
    for parts in itertools.product(*(itertools.permutations(b) for b in gamma.blocks)):
        images = [0] * n
        for block, image in zip(gamma.blocks, parts):
            for i, j in zip(block, image):
                images[i - 1] = j
        out.append(Permutation(tuple(images)))
    return sorted(out, key=lambda p: p.images)


def coset_representatives(gamma: Partition) -> list[Permutation]:
    """Lexicographically least member of each left coset sigma I(Gamma).

    Two permutations share a left coset exactly when they send the partition
    to the same image, so the first permutation (in lexicographic order)
    reaching each image is the representative.
    """
    seen = {}
    for perm in enumerate_sn(gamma.n):
        key = act_on_partition(perm, gamma).blocks
        if key not in seen:
            seen[key] = perm
    reps = list(seen.values())
    assert len(reps) == gamma.multinomial
    return reps


def set_partitions(n: int) -> list[Partition]:
    """Every unordered set partition of {1..N}, blocks ordered by least element."""

    def grow(i: int, blocks: list[list[int]]) -> Iterable[list[list[int]]]:
        if i > n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from grow(i + 1, blocks)
        blocks.pop()

    return [Partition(tuple(map(tuple, bl))) for bl in grow(1, [])]

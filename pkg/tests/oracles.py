"""Independent reference implementations used only by the tests.

Nothing here calls into the package's permutation, antisymmetrizer or
Slater code; everything is built from explicit index loops.
"""

import itertools
import math
from functools import reduce

import numpy as np


def cycle_sign(images):
    """Sign from the cycle decomposition (not from inversion counting)."""
    n = len(images)
    seen = [False] * n
    transpositions = 0
    for start in range(n):
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = images[i] - 1
            length += 1
        if length:
            transpositions += length - 1
    return -1 if transpositions % 2 else 1


def perm_matrix(images, d):
    """Dense pi_sigma: site i content moves to site sigma(i)."""
    n = len(images)
    dim = d**n
    mat = np.zeros((dim, dim))
    for digits in itertools.product(range(d), repeat=n):
        out = [0] * n
        for i, a in enumerate(digits):
            out[images[i] - 1] = a
        col, row = _flat(digits, d), _flat(out, d)
        mat[row, col] = 1.0
    return mat


def _flat(digits, d):
    f = 0
    for a in digits:
        f = f * d + a
    return f


def antisymmetrizer(n, d):
    acc = np.zeros((d**n, d**n))
    for p in itertools.permutations(range(1, n + 1)):
        acc += cycle_sign(p) * perm_matrix(p, d)
    return acc / math.factorial(n)


def multinomial(sizes):
    return math.factorial(sum(sizes)) // math.prod(math.factorial(k) for k in sizes)


def block_product(blocks, mats, d):
    """(x)_k O_k with block k on its own sites, via an explicit permutation."""
    order = [i for b in blocks for i in b]  # layout position j holds site order[j]
    x = reduce(np.kron, mats)
    p = perm_matrix(tuple(order), d)  # moves layout slot j to site order[j]
    return p @ x @ p.T


def block_vector_product(blocks, vecs, d):
    order = [i for b in blocks for i in b]
    return perm_matrix(tuple(order), d) @ reduce(np.kron, vecs)


def slater(vectors):
    """sqrt(n!) A (v_1 x ... x v_n) from the determinant expansion."""
    n = len(vectors)
    d = len(vectors[0])
    out = np.zeros(d**n, dtype=complex)
    for p in itertools.permutations(range(n)):
        sign = cycle_sign([i + 1 for i in p])
        out += sign * reduce(np.kron, [vectors[p[i]] for i in range(n)])
    return out / math.sqrt(math.factorial(n))


def haar_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(m, rng):
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return (z + z.conj().T) / 2


def unit_vector(rng, size=3):
    v = rng.normal(size=size)
    return v / np.linalg.norm(v)

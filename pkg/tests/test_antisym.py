import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from instances import random_instance
from fermisep import (
    AntisymmetrizerAction,
    CapacityError,
    DegenerateAntisymmetrizationWarning,
    DomainError,
    EmptySpaceError,
    OrthogonalStructure,
    Partition,
    StateVector,
    SupportError,
    antisymmetrize,
    antisymmetrize_product,
    antisymmetrizer,
    asym_membership,
    rescaled_antisymmetrizer,
    separable_state,
    subspace_w,
    total_asym_basis,
)
from fermisep.antisym import place_blocks, product_on_blocks


@pytest.mark.parametrize("n,d", [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (2, 5)])
def test_dense_matches_oracle(n, d):
    assert np.max(np.abs(antisymmetrizer(n, d).entries - oracles.antisymmetrizer(n, d))) < 1e-15


def test_rescaled_form():
    g = Partition(((1, 2), (3,)))
    a = rescaled_antisymmetrizer(g, 3).entries
    assert np.allclose(a, math.sqrt(3) * oracles.antisymmetrizer(3, 3))


def test_dense_cap():
    with pytest.raises(CapacityError):
        antisymmetrizer(5, 6)


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 4))
def test_matrix_free_matches_dense(seed, n, d):
    rng = np.random.default_rng(seed)
    v = StateVector(d, n, rng.normal(size=d**n) + 1j * rng.normal(size=d**n))
    out = antisymmetrize(v)
    assert np.allclose(out.amplitudes, oracles.antisymmetrizer(n, d) @ v.amplitudes, atol=1e-13)
    ok, res = asym_membership(out)
    assert ok and res < 1e-13
    scaled = AntisymmetrizerAction(n, d, 2.0).act(v)
    assert np.allclose(scaled.amplitudes, 2 * out.amplitudes)


@pytest.mark.parametrize("n,d", [(1, 3), (2, 2), (2, 4), (3, 4), (4, 4), (3, 6)])
def test_total_basis(n, d):
    b = total_asym_basis(n, d)
    assert b.dim == math.comb(d, n)
    assert np.allclose(b.matrix.conj().T @ b.matrix, np.eye(b.dim), atol=1e-13)
    a = oracles.antisymmetrizer(n, d)
    assert np.allclose(b.projector(), a, atol=1e-13)


def test_total_basis_empty_when_d_below_n():
    assert total_asym_basis(3, 2).dim == 0


def test_slater_column_convention():
    b = subspace_w((1, 2), np.eye(3))
    assert b.occupations == ((0, 1), (0, 2), (1, 2))
    e = np.eye(3)
    assert np.allclose(b.matrix[:, 0], oracles.slater([e[0], e[1]]))


def test_orthogonal_structure_validation():
    with pytest.raises(DomainError):
        OrthogonalStructure(3, (np.array([[1, 1], [0, 0], [0, 0]]),))
    with pytest.raises(DomainError):
        OrthogonalStructure.from_vectors(2, [[[1, 0]], [[1, 1j]]])
    with pytest.raises(DomainError):
        OrthogonalStructure(3, (np.eye(2),))
    v = OrthogonalStructure.from_basis_sets(4, [[0, 1], [2]])
    assert v.dims == (2, 1)
    with pytest.raises(EmptySpaceError):
        v.check_partition(Partition(((1,), (2, 3))))
    with pytest.raises(DomainError):
        v.check_partition(Partition(((1, 2, 3),)))


def test_empty_block_space():
    with pytest.raises(EmptySpaceError):
        subspace_w((1, 2, 3), np.eye(4)[:, :2])


@given(st.integers(0, 2**32 - 1))
def test_w_dimension_and_support(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng)
    for k, (block, frame) in enumerate(zip(inst.gamma.blocks, inst.structure.frames)):
        w = subspace_w(block, frame, inst.d)
        assert w.dim == math.comb(frame.shape[1], len(block))
        assert np.allclose(w.matrix.conj().T @ w.matrix, np.eye(w.dim), atol=1e-12)
        # same span as the oracle basis
        ob = inst.w_basis(k)
        assert np.allclose(w.projector(), ob @ ob.conj().T, atol=1e-12)


def test_place_blocks_against_oracle():
    rng = np.random.default_rng(3)
    g = Partition(((2, 4), (1,), (3,)))
    vecs = [rng.normal(size=9), rng.normal(size=3), rng.normal(size=3)]
    prod = np.kron(np.kron(vecs[0], vecs[1]), vecs[2])
    assert np.allclose(place_blocks(g, prod, 3), oracles.block_vector_product(g.blocks, vecs, 3))
    sv = product_on_blocks(g, [StateVector(3, 2, vecs[0]), StateVector(3, 1, vecs[1]), StateVector(3, 1, vecs[2])])
    assert np.allclose(sv.amplitudes, oracles.block_vector_product(g.blocks, vecs, 3))


@given(st.integers(0, 2**32 - 1))
def test_separable_state_norm_is_product(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng)
    factors = [f * complex(rng.uniform(0.5, 2)) for f in inst.random_factors(rng)]
    s = separable_state(inst.gamma, inst.structure, factors)
    assert np.isclose(s.vector.norm(), np.prod([f.norm() for f in factors]), rtol=1e-12)
    m = inst.gamma.multinomial
    raw = oracles.block_vector_product(inst.gamma.blocks, [f.amplitudes for f in factors], inst.d)
    dense = math.sqrt(m) * (oracles.antisymmetrizer(inst.n, inst.d) @ raw) if inst.d ** inst.n <= 256 else None
    if dense is not None:
        assert np.allclose(s.vector.amplitudes, dense, atol=1e-12)


def test_support_violation():
    v = OrthogonalStructure.from_basis_sets(4, [[0, 1], [2, 3]])
    g = Partition(((1,), (2,)))
    with pytest.raises(SupportError):
        separable_state(g, v, [StateVector.basis((2,), 4), StateVector.basis((3,), 4)])


def test_degenerate_warning():
    g = Partition(((1,), (2,), (3,)))
    fs = [StateVector.basis((0,), 2), StateVector.basis((1,), 2), StateVector.basis((0,), 2)]
    with pytest.warns(DegenerateAntisymmetrizationWarning):
        out = antisymmetrize_product(g, fs)
    assert out.norm() == 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        antisymmetrize_product(Partition(((1,), (2,))), fs[:2])

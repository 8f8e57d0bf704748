import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from instances import random_instance
from fermisep import (
    ClosureError,
    DomainError,
    Operator,
    OrthogonalStructure,
    Partition,
    Permutation,
    StateVector,
    SupportError,
    assemble_o,
    assemble_o_tilde,
    block_identity,
    build_subsystem_observable,
    compose,
    marginal_observable,
    observable_from_matrix,
    permuted_assembly_equal,
    separable_state,
    subspace_w,
)
from fermisep.observables import identity_blocks


def random_block_obs(inst, k, rng, rank=None):
    b = inst.w_basis(k)
    m = b.shape[1]
    h = oracles.random_hermitian(m, rng)
    if rank is not None and rank < m:
        lam, u = np.linalg.eigh(h)
        lam[rank:] = 0
        h = (u * lam) @ u.conj().T
    return observable_from_matrix(inst.gamma.blocks[k], inst.structure.frames[k], b @ h @ b.conj().T, inst.d)


def oracle_o(gamma, mats, d):
    a = oracles.antisymmetrizer(gamma.n, d)
    x = oracles.block_product(gamma.blocks, mats, d)
    return gamma.multinomial * a @ x @ a


def oracle_o_tilde(gamma, mats, d):
    x = oracles.block_product(gamma.blocks, mats, d)
    acc = np.zeros_like(x, dtype=complex)
    for p in itertools.permutations(range(1, gamma.n + 1)):
        pm = oracles.perm_matrix(p, d)
        acc += pm @ x @ pm.T
    return acc / math.prod(math.factorial(k) for k in gamma.sizes)


@given(st.integers(0, 2**32 - 1))
def test_assembled_dense_and_action_match_oracle(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n_max=3, d_max=5)
    obs = [random_block_obs(inst, k, rng) for k in range(inst.gamma.s)]
    o = assemble_o(inst.gamma, inst.structure, obs)
    ref = oracle_o(inst.gamma, [x.matrix for x in obs], inst.d)
    assert np.max(np.abs(o.entries - ref)) < 1e-12
    v = StateVector(inst.d, inst.n, rng.normal(size=inst.d**inst.n) + 0j)
    assert np.allclose(o.act(v).amplitudes, ref @ v.amplitudes, atol=1e-12)
    ot = assemble_o_tilde(inst.gamma, obs)
    tref = oracle_o_tilde(inst.gamma, [x.matrix for x in obs], inst.d)
    assert np.max(np.abs(ot.entries - tref)) < 1e-12
    assert np.allclose(ot.act(v).amplitudes, tref @ v.amplitudes, atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_marginal_product_is_full_observable(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n_max=3, d_max=5)
    obs = [random_block_obs(inst, k, rng) for k in range(inst.gamma.s)]
    full = assemble_o(inst.gamma, inst.structure, obs).entries
    margs = [marginal_observable(k, inst.gamma, inst.structure, o).entries for k, o in enumerate(obs)]
    prod = margs[0]
    for m in margs[1:]:
        prod = prod @ m
    assert np.max(np.abs(prod - full)) < 1e-12
    # marginals commute
    for a, b in itertools.combinations(margs, 2):
        assert np.max(np.abs(a @ b - b @ a)) < 1e-12


def test_block_identity_is_w_projector():
    frame = np.eye(5)[:, 1:4]
    ident = block_identity((1, 2), frame, 5)
    w = subspace_w((1, 2), frame, 5)
    assert np.allclose(ident.matrix, w.projector())
    assert np.allclose(ident.eigenvalues, 1)


def test_spectral_validation():
    frame = np.eye(4)[:, :2]
    inside = StateVector.basis((0,), 4)
    outside = StateVector.basis((2,), 4)
    with pytest.raises(SupportError):
        build_subsystem_observable((1,), frame, [(1.0, outside)])
    with pytest.raises(DomainError):
        build_subsystem_observable((1,), frame, [(1j, inside)])
    with pytest.raises(DomainError):
        build_subsystem_observable((1,), frame, [(1.0, inside), (2.0, inside)])
    with pytest.raises(DomainError):
        observable_from_matrix((1,), frame, np.array([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
    with pytest.raises(SupportError):
        observable_from_matrix((1,), frame, np.diag([0, 0, 1.0, 0]))


def test_block_mismatch_errors():
    v = OrthogonalStructure.from_basis_sets(4, [[0, 1], [2, 3]])
    g = Partition(((1,), (2,)))
    o1 = block_identity((1,), v.frames[0])
    with pytest.raises(DomainError):
        assemble_o(g, v, [o1])
    with pytest.raises(DomainError):
        assemble_o(g, v, [o1, block_identity((1,), v.frames[1])])
    with pytest.raises(SupportError):
        assemble_o(g, v, [o1, block_identity((2,), v.frames[0])])
    with pytest.raises(DomainError):
        marginal_observable(2, g, v, o1)


def test_sum_is_bare_operator():
    v = OrthogonalStructure.from_basis_sets(4, [[0, 1], [2, 3]])
    g = Partition(((1,), (2,)))
    o = assemble_o(g, v, identity_blocks(g, v))
    s = o + o
    assert type(s) is Operator
    assert np.allclose(s.entries, 2 * o.entries)


def test_compose_closure():
    v = OrthogonalStructure.from_basis_sets(4, [[0, 1], [2, 3]])
    g = Partition(((1,), (2,)))
    x = np.zeros((4, 4), complex)
    x[:2, :2] = [[0, 1], [1, 0]]
    z = np.zeros((4, 4), complex)
    z[:2, :2] = [[1, 0], [0, -1]]
    ox = assemble_o(g, v, [observable_from_matrix((1,), v.frames[0], x), block_identity((2,), v.frames[1])])
    oz = assemble_o(g, v, [observable_from_matrix((1,), v.frames[0], z), block_identity((2,), v.frames[1])])
    with pytest.raises(ClosureError):
        compose(ox, oz)
    sq = compose(ox, ox)
    assert np.allclose(sq.entries, ox.entries @ ox.entries, atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_compose_commuting_blocks_matches_dense_product(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n_max=3, d_max=5)
    a, b = [], []
    for k in range(inst.gamma.s):
        w = inst.w_basis(k)
        u = np.linalg.qr(rng.normal(size=(w.shape[1], w.shape[1])) + 0j)[0]
        la, lb = rng.normal(size=w.shape[1]), rng.normal(size=w.shape[1])
        blk, fr = inst.gamma.blocks[k], inst.structure.frames[k]
        a.append(observable_from_matrix(blk, fr, w @ (u * la) @ u.conj().T @ w.conj().T, inst.d))
        b.append(observable_from_matrix(blk, fr, w @ (u * lb) @ u.conj().T @ w.conj().T, inst.d))
    oa, ob = assemble_o(inst.gamma, inst.structure, a), assemble_o(inst.gamma, inst.structure, b)
    assert np.max(np.abs(compose(oa, ob).entries - oa.entries @ ob.entries)) < 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(0, 5))
def test_relabeling_invariance(seed, which):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n_min=3, n_max=3, d_max=5)
    obs = [random_block_obs(inst, k, rng) for k in range(inst.gamma.s)]
    perm = Permutation(tuple(itertools.permutations((1, 2, 3)))[which])
    assert permuted_assembly_equal(inst.gamma, perm, obs, inst.structure)


def test_factorized_expectation_on_separable_state():
    rng = np.random.default_rng(11)
    inst = random_instance(rng, n_min=3, n_max=4, d_max=6)
    obs = [random_block_obs(inst, k, rng) for k in range(inst.gamma.s)]
    fs = inst.random_factors(rng)
    psi = separable_state(inst.gamma, inst.structure, fs).vector
    o = assemble_o(inst.gamma, inst.structure, obs)
    direct = np.vdot(psi.amplitudes, o.act(psi).amplitudes)
    assert np.isclose(direct, np.prod([x.expectation(f) for x, f in zip(obs, fs)]), atol=1e-10)


def test_coset_sum_uses_adjoint_conjugation():
    # with representatives not closed under inversion, pi X pi (no dagger) is not
    # Hermitian; it still sandwiches to O, but the dagger form is the observable
    from instances import Instance

    rng = np.random.default_rng(9)
    u = oracles.haar_unitary(4, rng)
    inst = Instance(Partition(((1, 2), (3,))), OrthogonalStructure(4, (u[:, :3], u[:, 3:])), 4)
    obs = [random_block_obs(inst, k, rng) for k in range(2)]
    x = oracles.block_product(inst.gamma.blocks, [o.matrix for o in obs], inst.d)
    reps = [(1, 2, 3), (2, 3, 1), (1, 3, 2)]  # one per coset, images of 3 are 3, 1, 2
    pms = [oracles.perm_matrix(p, 4) for p in reps]
    literal = sum(pm @ x @ pm for pm in pms)
    daggered = sum(pm @ x @ pm.T for pm in pms)
    assert np.max(np.abs(literal - literal.conj().T)) > 1e-6
    ot = assemble_o_tilde(inst.gamma, obs).entries
    assert np.max(np.abs(ot - daggered)) < 1e-12
    a = oracles.antisymmetrizer(3, 4)
    o = assemble_o(inst.gamma, inst.structure, obs).entries
    assert np.max(np.abs(a @ literal @ a - o)) < 1e-12
    assert np.max(np.abs(a @ ot @ a - o)) < 1e-12

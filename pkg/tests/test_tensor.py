import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fermisep import CapacityError, DomainError, Operator, StateVector, inner, tensor_product
from fermisep.tensor import DENSE_CAP, decode_index, encode_index


@given(st.integers(1, 6), st.integers(1, 5), st.data())
def test_index_roundtrip(d, n, data):
    digits = tuple(data.draw(st.lists(st.integers(0, d - 1), min_size=n, max_size=n)))
    flat = encode_index(digits, d)
    assert decode_index(flat, d, n) == digits
    # site 1 is the most significant digit
    assert flat == int("".join(map(str, digits)), d) if d > 1 else flat == 0


def test_index_errors():
    with pytest.raises(DomainError):
        encode_index((0, 3), 3)
    with pytest.raises(DomainError):
        decode_index(9, 3, 2)
    with pytest.raises(DomainError):
        decode_index(0, 0, 2)


def test_basis_layout():
    v = StateVector.basis((1, 0, 2), 3)
    assert v.amplitudes[1 * 9 + 0 * 3 + 2] == 1
    assert v.norm() == 1


def test_state_is_immutable():
    arr = np.array([1, 0, 0, 0], dtype=complex)
    v = StateVector(2, 2, arr)
    arr[0] = 5
    assert v.amplitudes[0] == 1
    with pytest.raises(ValueError):
        v.amplitudes[0] = 2


def test_state_validation():
    with pytest.raises(DomainError):
        StateVector(2, 2, np.ones(3))
    with pytest.raises(DomainError):
        StateVector(2, 1, [np.nan, 0])
    with pytest.raises(DomainError):
        StateVector(2, 1, [1, 1], normalized=True)
    with pytest.raises(DomainError):
        StateVector.zeros(2, 2).normalize()


def test_arithmetic_and_mismatch():
    a = StateVector.basis((0,), 2)
    b = StateVector.basis((1,), 2)
    s = (a + b) * 0.5 - b
    assert np.allclose(s.amplitudes, [0.5, -0.5])
    with pytest.raises(DomainError):
        a + StateVector.basis((0,), 3)
    with pytest.raises(DomainError):
        inner(a, StateVector.basis((0, 0), 2))


@given(st.integers(0, 2**32 - 1))
def test_tensor_product_matches_kron(seed):
    rng = np.random.default_rng(seed)
    vs = [rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(3)]
    prod = tensor_product([StateVector(3, 1, v) for v in vs])
    assert np.allclose(prod.amplitudes, np.kron(np.kron(vs[0], vs[1]), vs[2]))
    ops = [rng.normal(size=(3, 3)) for _ in range(2)]
    oprod = tensor_product([Operator(3, 1, o) for o in ops])
    assert np.allclose(oprod.entries, np.kron(ops[0], ops[1]))
    assert np.isclose(inner(prod, prod), prod.norm() ** 2)


def test_tensor_product_rejects_mixed():
    with pytest.raises(DomainError):
        tensor_product([StateVector.basis((0,), 2), StateVector.basis((0,), 3)])
    with pytest.raises(DomainError):
        tensor_product([StateVector.basis((0,), 2), Operator.identity(2, 1)])


def test_operator_cap_and_hermitian_flag():
    with pytest.raises(CapacityError):
        Operator.identity(6, 5)
    assert 6**4 <= DENSE_CAP
    with pytest.raises(DomainError):
        Operator(2, 1, [[0, 1], [0, 0]], hermitian=True)
    op = Operator(2, 1, [[0, 1j], [-1j, 0]], hermitian=True)
    assert op.is_hermitian()
    v = StateVector.basis((0,), 2)
    assert np.allclose((op @ v).amplitudes, [0, -1j])
    assert np.allclose(op.dagger().entries, op.entries)

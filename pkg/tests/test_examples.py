import math

import numpy as np
import pytest

import oracles
from fermisep.examples import example_ids, four_term, list_examples, reproduce, vtheta_frames

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1])


def sig(a):
    return a[0] * X + a[1] * Y + a[2] * Z


@pytest.mark.parametrize("example_id", example_ids())
def test_example_passes(example_id):
    rep = reproduce(example_id)
    assert rep.passed, "\n".join(rep.summary_lines())


def test_catalog_shape():
    items = list_examples()
    assert len(items) == 7 and len({e["id"] for e in items}) == 7
    with pytest.raises(KeyError):
        reproduce("missing")


def as_vec(pair):
    return np.array([complex(*c) for c in pair])


@pytest.mark.parametrize("theta,phi", [(0.3, 0.0), (0.7, 1.1), (1.2, -2.5), (math.pi / 4, math.pi)])
def test_vtheta_frames_orthonormal(theta, phi):
    v1, v2 = map(as_vec, vtheta_frames(theta, phi))
    assert abs(np.vdot(v1, v2)) < 1e-14
    assert np.isclose(np.linalg.norm(v1), 1) and np.isclose(np.linalg.norm(v2), 1)
    # the conjugate-phase variant is not orthogonal once phi is generic
    c, s, e = math.cos(theta), math.sin(theta), np.exp(-1j * phi)
    if abs(math.sin(phi) * math.sin(2 * theta)) > 1e-6:
        assert abs(np.vdot([c, np.conj(e) * s], [s, -e * c])) > 1e-6


def cunit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def test_four_term_matches_dense():
    rng = np.random.default_rng(11)
    for _ in range(50):
        al, al2 = cunit(rng), cunit(rng)
        a, b = oracles.unit_vector(rng), oracles.unit_vector(rng)
        phi = np.kron(al, al2) + np.kron(al2, al)
        phi /= np.linalg.norm(phi)
        dense = np.vdot(phi, np.kron(sig(a), sig(b)) @ phi).real
        assert abs(four_term(al, al2, a, b) - dense) < 1e-12


def test_four_term_orthogonal_pair():
    up, dn = np.array([1, 0]), np.array([0, 1])
    z = [0, 0, 1]
    # triplet m=0 has <zz> = -1
    assert abs(four_term(up, dn, z, z) + 1) < 1e-14
    assert abs(four_term(up, up, z, z) - 1) < 1e-14

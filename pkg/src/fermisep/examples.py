"""Catalog of worked examples, each an embedded scenario with expected values.

Expected values are either closed forms evaluated with plain 2x2 spin algebra
(never with the N-particle machinery under test) or frozen constants from an
independent two-particle overlap formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .builders import PAULI_X, PAULI_Y, PAULI_Z, spin_state
from .scenario import Report, dumps, run_document

SQRT2 = math.sqrt(2.0)
ID_TOL = 1e-12

Z = [0.0, 0.0, 1.0]
X = [1.0, 0.0, 0.0]
B_PLUS = [1 / SQRT2, 0.0, 1 / SQRT2]
B_MINUS = [-1 / SQRT2, 0.0, 1 / SQRT2]
STANDARD_AXES = {"a": Z, "a2": X, "b": B_PLUS, "b2": B_MINUS}


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _sigma(axis) -> np.ndarray:
    return axis[0] * PAULI_X + axis[1] * PAULI_Y + axis[2] * PAULI_Z


def _spin_elem(u, axis, v) -> complex:
    return complex(np.vdot(u, _sigma(axis) @ v))


def _pair_norm(al, al2) -> float:
    return 1.0 / math.sqrt(2 * (1 + abs(np.vdot(al, al2)) ** 2))


def four_term(al, al2, a, b) -> float:
    """N^2 times the four-term sum of spin matrix elements for psi^+(al, al2)."""
    s = (
        _spin_elem(al, a, al) * _spin_elem(al2, b, al2)
        + _spin_elem(al2, a, al2) * _spin_elem(al, b, al)
        + _spin_elem(al, a, al2) * _spin_elem(al2, b, al)
        + _spin_elem(al2, a, al) * _spin_elem(al, b, al2)
    )
    return (_pair_norm(al, al2) ** 2 * s).real


# -- individual examples ----------------------------------------------------


def _sec2_chsh() -> list[dict]:
    spin_only = {
        "version": 1,
        "name": "chsh-singlet-spin",
        "local_dim": 2,
        "num_sites": 2,
        "states": {"singlet": {"builtin": "singlet"}},
        "analyses": [
            {
                "type": "chsh",
                "state": "singlet",
                "family": "spin",
                "axes": STANDARD_AXES,
                "expect": {"value": {"equals": 2 * SQRT2, "tol": ID_TOL}},
            }
        ],
    }
    spatial = {
        "version": 1,
        "name": "chsh-singlet-spatial",
        "local_dim": 4,
        "num_sites": 2,
        "tags": ["L", "R"],
        "seed": 20240611,
        "partition": [[1], [2]],
        "structures": {"V": {"tags": ["L", "R"]}},
        "states": {
            "singlet_lr": {
                "antisymmetrized": {"state": {"spin_space": {"spin": "singlet", "tags": "LR"}}}
            },
            "product": {
                "antisymmetrized_product": {
                    "structure": "V",
                    "factors": [
                        {"spin": {"axis": [0.6, 0.0, 0.8]}, "tag": "L"},
                        {"spin": {"axis": [0.0, -0.8, 0.6]}, "tag": "R"},
                    ],
                }
            },
        },
        "analyses": [
            {"type": "norm", "state": "singlet_lr", "expect": {"norm": {"equals": 1.0, "tol": ID_TOL}}},
            {
                "type": "chsh",
                "state": "singlet_lr",
                "family": "spatial",
                "axes": STANDARD_AXES,
                "expect": {"value": {"equals": 2 * SQRT2, "tol": ID_TOL}},
            },
            {
                "type": "chsh",
                "state": "product",
                "family": "spatial",
                "axes": STANDARD_AXES,
                "expect": {"value": {"max": 2 + ID_TOL}},
            },
            {
                "type": "chsh",
                "state": "product",
                "family": "spatial",
                "sweep": {"count": 200},
                "expect": {"max_value": {"max": 2 + ID_TOL}},
            },
            {
                "type": "separability",
                "state": "product",
                "structure": "V",
                "expect": {"verdict": "separable"},
            },
            {
                "type": "separability",
                "state": "singlet_lr",
                "structure": "V",
                "expect": {"separable": False},
            },
        ],
    }
    return [spin_only, spatial]


def _sec5a_nonunique() -> list[dict]:
    factors_v = [{"slater": [{"basis": 0}, {"basis": 1}]}, {"basis": 3}]
    return [
        {
            "version": 1,
            "name": "non-uniqueness-n3d4",
            "local_dim": 4,
            "num_sites": 3,
            "partition": [[1, 2], [3]],
            "structures": {
                "V": {"basis_sets": [[0, 1], [2, 3]]},
                "Vp": {"basis_sets": [[0, 1, 2], [3]]},
            },
            "states": {
                "psi": {"antisymmetrized_product": {"structure": "V", "factors": factors_v}},
                "psi_p": {"antisymmetrized_product": {"structure": "Vp", "factors": factors_v}},
            },
            "analyses": [
                {"type": "norm", "state": "psi", "expect": {"norm": {"equals": 1.0, "tol": ID_TOL}}},
                {
                    "type": "separability",
                    "state": "psi",
                    "structure": "V",
                    "label": "V",
                    "expect": {"verdict": "separable", "fidelity": {"min": 1 - 1e-10}},
                },
                {
                    "type": "separability",
                    "state": "psi",
                    "structure": "Vp",
                    "label": "V'",
                    "expect": {"verdict": "separable", "fidelity": {"min": 1 - 1e-10}},
                },
                {
                    "type": "inner_product",
                    "bra": "psi",
                    "ket": "psi_p",
                    "expect": {"value": {"equals": 1.0, "tol": ID_TOL}},
                },
            ],
        }
    ]


VTHETA_GRID = [(0.0, 0.0), (math.pi / 5, 0.0), (math.pi / 3, 1.1), (math.pi / 2, math.pi), (2.4, 4.0)]
ASAOP_AXES = [
    (Z, Z),
    (Z, X),
    ([0.6, 0.0, 0.8], [0.0, 0.6, 0.8]),
    ([0.48, 0.6, 0.64], [-0.36, 0.8, -0.48]),
]


def vtheta_frames(theta: float, phi: float) -> tuple[list, list]:
    """V_1, V_2 spanning vectors; the second uses e^{+i phi} so the two are orthogonal."""
    c, s, e = math.cos(theta), math.sin(theta), complex(math.cos(phi), math.sin(phi))
    v1 = [_c(c), _c(e * s)]
    v2 = [_c(s), _c(-e * c)]
    return v1, v2


def _sec5a_vtheta() -> list[dict]:
    structures = {}
    analyses = []
    observables = {}
    k1, k2 = 2.0, -0.75
    for i, (theta, phi) in enumerate(VTHETA_GRID):
        v1, v2 = vtheta_frames(theta, phi)
        name = f"V{i}"
        structures[name] = {"frames": [[v1], [v2]]}
        analyses.append(
            {
                "type": "separability",
                "state": "singlet",
                "structure": name,
                "label": f"theta={theta:.6g}, phi={phi:.6g}",
                "expect": {"verdict": "separable", "fidelity": {"min": 1 - 1e-10}},
            }
        )
        observables[f"O{i}"] = {
            "assembled": {
                "structure": name,
                "blocks": [
                    {"spectral": [{"value": k1, "vector": v1}]},
                    {"spectral": [{"value": k2, "vector": v2}]},
                ],
            }
        }
        analyses.append(
            {
                "type": "expectation",
                "state": "singlet",
                "observable": f"O{i}",
                "expect": {"value": {"equals": k1 * k2, "tol": ID_TOL}},
            }
        )
    for j, (a, b) in enumerate(ASAOP_AXES):
        observables[f"S{j}"] = {"spin_correlation": {"a": a, "b": b}}
        analyses.append(
            {
                "type": "expectation",
                "state": "singlet",
                "observable": f"S{j}",
                "expect": {"value": {"equals": -float(np.dot(a, b)), "tol": ID_TOL}},
            }
        )
    return [
        {
            "version": 1,
            "name": "singlet-vtheta",
            "local_dim": 2,
            "num_sites": 2,
            "partition": [[1], [2]],
            "structures": structures,
            "states": {"singlet": {"builtin": "singlet"}},
            "observables": observables,
            "analyses": analyses,
        }
    ]


# Witness instance for non-transitivity; the overlaps below come from the
# two-particle formula <A(a b)|A(c e)> = <a|c><b|e> - <a|e><b|c>.
NT_ALPHA = [1 / math.sqrt(3)] * 3
NT_ALPHA2 = [1 / math.sqrt(6), [0.0, 2 / math.sqrt(6)], -1 / math.sqrt(6)]
NT_GAMMA = [2 / math.sqrt(6), 1 / math.sqrt(6), [0.0, 1 / math.sqrt(6)]]
NT_GAMMA2 = [1 / math.sqrt(3), 1 / math.sqrt(3), -1 / math.sqrt(3)]
NT_BETA = [1.0, 0.0, 0.0]
NT_BETA2 = [0.0, 0.0, 1.0]
NT_AB_BB = -0.2357022603955159
NT_BB_GG = -0.4714045207910318
NT_AB_GG = (0.16666666666666674, -0.38888888888888906)
NT_AB_GG_PRODUCT = (0.16666666666666674, -0.3333333333333335)
NT_GAP = 0.05555555555555558


def _embed(coeffs, slots, d=6) -> list:
    out = [0.0] * d
    for c, k in zip(coeffs, slots):
        out[k] = c
    return out


def _sec5b_nontransitive() -> list[dict]:
    v1, v2 = [0, 1, 2], [3, 4, 5]
    w1, w2 = [0, 1, 3], [2, 4, 5]

    def state(struct, s1, s2, c1, c2):
        return {
            "antisymmetrized_product": {
                "structure": struct,
                "factors": [_embed(c1, s1), _embed(c2, s2)],
            }
        }

    return [
        {
            "version": 1,
            "name": "non-transitivity-n2d6",
            "local_dim": 6,
            "num_sites": 2,
            "partition": [[1], [2]],
            "structures": {"V": {"basis_sets": [v1, v2]}, "Vp": {"basis_sets": [w1, w2]}},
            "states": {
                "psi_aa": state("V", v1, v2, NT_ALPHA, NT_ALPHA2),
                "psi_bb": state("V", v1, v2, NT_BETA, NT_BETA2),
                "psip_bb": state("Vp", w1, w2, NT_BETA, NT_BETA2),
                "psip_gg": state("Vp", w1, w2, NT_GAMMA, NT_GAMMA2),
            },
            "analyses": [
                {
                    "type": "inner_product",
                    "bra": "psi_bb",
                    "ket": "psip_bb",
                    "label": "shared state lies in both spaces",
                    "expect": {"value": {"equals": 1.0, "tol": ID_TOL}},
                },
                {
                    "type": "overlap_factorization",
                    "bra": "psi_aa",
                    "ket": "psi_bb",
                    "label": "first equality",
                    "expect": {
                        "gap": {"max": ID_TOL},
                        "total": {"equals": NT_AB_BB, "tol": ID_TOL},
                    },
                },
                {
                    "type": "overlap_factorization",
                    "bra": "psip_bb",
                    "ket": "psip_gg",
                    "label": "second equality",
                    "expect": {
                        "gap": {"max": ID_TOL},
                        "total": {"equals": NT_BB_GG, "tol": ID_TOL},
                    },
                },
                {
                    "type": "overlap_factorization",
                    "bra": "psi_aa",
                    "ket": "psip_gg",
                    "label": "transitivity fails",
                    "expect": {
                        "gap": {"min": 1e-3},
                        "total": {"equals": list(NT_AB_GG), "tol": ID_TOL},
                        "product": {"equals": list(NT_AB_GG_PRODUCT), "tol": ID_TOL},
                    },
                },
                {"type": "separability", "state": "psi_aa", "structure": "V", "expect": {"verdict": "separable"}},
                {"type": "separability", "state": "psi_aa", "structure": "Vp", "expect": {"separable": False}},
                {"type": "separability", "state": "psip_gg", "structure": "Vp", "expect": {"verdict": "separable"}},
                {"type": "separability", "state": "psip_gg", "structure": "V", "expect": {"separable": False}},
                {"type": "separability", "state": "psi_bb", "structure": "V", "expect": {"verdict": "separable"}},
                {"type": "separability", "state": "psi_bb", "structure": "Vp", "expect": {"verdict": "separable"}},
            ],
        }
    ]


CLUSTER_CASES = [
    # (spin axis of alpha, spin axis of alpha', a, b)
    (Z, Z, Z, Z),
    ([0.6, 0.0, 0.8], [0.0, 0.6, -0.8], X, [0.0, 1.0, 0.0]),
    ([0.48, 0.6, 0.64], [0.0, -0.8, 0.6], [0.6, 0.0, 0.8], [0.36, 0.48, -0.8]),
]


def _cluster_doc() -> dict:
    states, observables, analyses = {}, {}, []
    for i, (na, na2, a, b) in enumerate(CLUSTER_CASES):
        al, al2 = spin_state(na), spin_state(na2)
        expected = (_spin_elem(al, a, al) * _spin_elem(al2, b, al2)).real
        # explicit two-term form of the antisymmetrized product
        lr = np.kron(np.kron(al, [1, 0]), np.kron(al2, [0, 1]))
        rl = np.kron(np.kron(al2, [0, 1]), np.kron(al, [1, 0]))
        states[f"psi{i}"] = {
            "antisymmetrized_product": {
                "structure": "V",
                "factors": [{"spin": {"axis": na}, "tag": "L"}, {"spin": {"axis": na2}, "tag": "R"}],
            }
        }
        states[f"explicit{i}"] = {"amplitudes": [_c(z) for z in (lr - rl) / SQRT2]}
        blocks = [{"pauli": a, "tag": "L"}, {"pauli": b, "tag": "R"}]
        observables[f"O{i}"] = {"assembled": {"structure": "V", "blocks": blocks}}
        observables[f"Ot{i}"] = {"assembled": {"form": "coset-sum", "blocks": blocks}}
        analyses += [
            {
                "type": "inner_product",
                "bra": f"explicit{i}",
                "ket": f"psi{i}",
                "expect": {"value": {"equals": 1.0, "tol": ID_TOL}},
            },
            {
                "type": "factorization",
                "state": f"psi{i}",
                "observable": f"O{i}",
                "expect": {
                    "direct": {"equals": expected, "tol": ID_TOL},
                    "gap": {"max": ID_TOL},
                    "block_gap": {"max": ID_TOL},
                },
            },
            {
                "type": "expectation",
                "state": f"psi{i}",
                "observable": f"Ot{i}",
                "expect": {"value": {"equals": expected, "tol": ID_TOL}},
            },
            {"type": "separability", "state": f"psi{i}", "structure": "V", "expect": {"verdict": "separable"}},
        ]
    return {
        "version": 1,
        "name": "cluster-n2d4",
        "local_dim": 4,
        "num_sites": 2,
        "tags": ["L", "R"],
        "partition": [[1], [2]],
        "structures": {"V": {"tags": ["L", "R"]}},
        "states": states,
        "observables": observables,
        "analyses": analyses,
    }


def _sec5c_cluster() -> list[dict]:
    return [_cluster_doc()]


HELIUM_CASES = [
    # (alpha, alpha', a, b); the first pair is orthogonal
    (Z, [0.0, 0.0, -1.0], X, X),
    (Z, [0.0, 0.0, -1.0], [0.6, 0.0, 0.8], [0.0, 0.8, 0.6]),
    ([0.6, 0.0, 0.8], [0.0, 0.6, -0.8], [0.48, 0.6, 0.64], X),
]


def _sec5c_helium() -> list[dict]:
    states, observables, analyses = {}, {}, []
    for i, (na, na2, a, b) in enumerate(HELIUM_CASES):
        al, al2 = spin_state(na), spin_state(na2)
        norm = _pair_norm(al, al2)
        states[f"phi{i}"] = {
            "antisymmetrized": {
                "state": {"spin_space": {"spin": {"symmetric_pair": [{"axis": na}, {"axis": na2}]}, "tags": "LR"}}
            }
        }
        # psi^+ (x) (|L>|R> - |R>|L>)/sqrt(2), written out
        plus = norm * (np.kron(al, al2) + np.kron(al2, al))
        space = (np.kron([1, 0], [0, 1]) - np.kron([0, 1], [1, 0])) / SQRT2
        t = np.kron(plus, space).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1)
        states[f"explicit{i}"] = {"amplitudes": [_c(z) for z in t]}
        blocks = [{"pauli": a, "tag": "L"}, {"pauli": b, "tag": "R"}]
        observables[f"O{i}"] = {"assembled": {"structure": "V", "blocks": blocks}}
        observables[f"Ot{i}"] = {"assembled": {"form": "coset-sum", "blocks": blocks}}
        expected = four_term(al, al2, a, b)
        analyses += [
            {"type": "norm", "state": f"phi{i}", "expect": {"norm": {"equals": 1.0, "tol": ID_TOL}}},
            {
                "type": "inner_product",
                "bra": f"explicit{i}",
                "ket": f"phi{i}",
                "expect": {"value": {"equals": 1.0, "tol": ID_TOL}},
            },
            {"type": "separability", "state": f"phi{i}", "structure": "V", "expect": {"separable": False}},
            {
                "type": "expectation",
                "state": f"phi{i}",
                "observable": f"O{i}",
                "expect": {"value": {"equals": expected, "tol": ID_TOL}},
            },
            {
                "type": "expectation",
                "state": f"phi{i}",
                "observable": f"Ot{i}",
                "expect": {"value": {"equals": expected, "tol": ID_TOL}},
            },
        ]
        if i == 0:
            analyses[0]["label"] = f"N = {norm:.15g} at orthogonal spins"
            analyses.append(
                {
                    "type": "factorization",
                    "state": f"phi{i}",
                    "observable": f"O{i}",
                    "expect": {"gap": {"min": 1e-3}},
                }
            )
    return [
        {
            "version": 1,
            "name": "helium-phi",
            "local_dim": 4,
            "num_sites": 2,
            "tags": ["L", "R"],
            "partition": [[1], [2]],
            "structures": {"V": {"tags": ["L", "R"]}},
            "states": states,
            "observables": observables,
            "analyses": analyses,
        }
    ]


N4_CASES = [
    # (alpha, beta, a, b) for Psi; (alpha, alpha') for Phi
    ((Z, Z, Z, Z), (Z, [0.0, 0.0, -1.0])),
    (([0.6, 0.0, 0.8], [0.0, 0.6, -0.8], X, [0.0, 0.8, 0.6]), ([0.6, 0.0, 0.8], [0.0, 0.6, -0.8])),
]


def _sec5c_n4d6() -> list[dict]:
    singlet_rr = {"spin_space": {"spin": "singlet", "tags": "RR"}}
    states, observables, analyses = {}, {}, []
    for i, ((na, nb, a, b), (pa, pa2)) in enumerate(N4_CASES):
        al, be = spin_state(na), spin_state(nb)
        p, p2 = spin_state(pa), spin_state(pa2)
        states[f"psi{i}"] = {
            "antisymmetrized_product": {
                "structure": "V",
                "factors": [
                    {"spin": {"axis": na}, "tag": "L"},
                    {"spin": {"axis": nb}, "tag": "C"},
                    singlet_rr,
                ],
            }
        }
        plus = _pair_norm(p, p2) * (np.kron(p, p2) + np.kron(p2, p))
        spins = np.kron(plus, np.kron([1, 0], [0, 1]))
        states[f"phi{i}"] = {
            "antisymmetrized": {"state": {"spin_space": {"spin": [_c(z) for z in spins], "tags": "LCRR"}}}
        }
        states[f"phin{i}"] = dict(states[f"phi{i}"], normalize=True)
        observables[f"O{i}"] = {
            "assembled": {
                "structure": "V",
                "blocks": [{"pauli": a, "tag": "L"}, {"pauli": b, "tag": "C"}, {"projector": singlet_rr}],
            }
        }
        triple = (_spin_elem(al, a, al) * _spin_elem(be, b, be)).real * 1.0
        analyses += [
            {"type": "separability", "state": f"psi{i}", "structure": "V", "expect": {"verdict": "separable"}},
            {
                "type": "factorization",
                "state": f"psi{i}",
                "observable": f"O{i}",
                "label": "triple product",
                "expect": {
                    "direct": {"equals": triple, "tol": ID_TOL},
                    "gap": {"max": ID_TOL},
                    "block_gap": {"max": ID_TOL},
                },
            },
            {
                "type": "norm",
                "state": f"phi{i}",
                "label": "antisymmetrizing the block-3 product halves the norm",
                "expect": {"norm2": {"equals": 0.5, "tol": ID_TOL}},
            },
            {
                "type": "matrix_element",
                "bra": f"phi{i}",
                "ket": f"phi{i}",
                "observable": f"O{i}",
                "label": "four-term sum",
                "expect": {"value": {"equals": four_term(p, p2, a, b) / 2, "tol": ID_TOL}},
            },
            {"type": "separability", "state": f"phin{i}", "structure": "V", "expect": {"separable": False}},
        ]
    return [
        {
            "version": 1,
            "name": "cluster-n4d6",
            "local_dim": 6,
            "num_sites": 4,
            "tags": ["L", "C", "R"],
            "partition": [[1], [2], [3, 4]],
            "structures": {"V": {"tags": ["L", "C", "R"]}},
            "states": states,
            "observables": observables,
            "analyses": analyses,
        }
    ]


@dataclass(frozen=True)
class Example:
    id: str
    section: str
    description: str
    build: Callable[[], list]


CATALOG = (
    Example("sec2-chsh", "bell-correlations",
            "singlet reaches 2*sqrt(2) in spin-only and L/R-tagged forms; tagged product states stay <= 2",
            _sec2_chsh),
    Example("sec5a-nonunique-n3d4", "non-uniqueness",
            "N=3, d=4 state separable under two different orthogonal structures", _sec5a_nonunique),
    Example("sec5a-singlet-vtheta", "non-uniqueness",
            "d=2 singlet separable for a family V(theta, phi); spin-only correlation equals -a.b",
            _sec5a_vtheta),
    Example("sec5b-nontransitive", "non-transitivity",
            "N=2, d=6 overlaps factorize pairwise but not transitively", _sec5b_nontransitive),
    Example("sec5c-cluster-n2d4", "cluster-decomposition",
            "L/R-localized product states: correlations factorize, sandwich and coset forms agree",
            _sec5c_cluster),
    Example("sec5c-helium-phi", "cluster-decomposition",
            "symmetric spin pair with antisymmetric L/R part: not separable, four-term correlation",
            _sec5c_helium),
    Example("sec5c-n4d6", "cluster-decomposition",
            "N=4, d=6 with L/C/R tags: triple product for separable states, four-term sum otherwise",
            _sec5c_n4d6),
)

_BY_ID = {ex.id: ex for ex in CATALOG}


def list_examples() -> list[dict]:
    return [{"id": ex.id, "section": ex.section, "description": ex.description} for ex in CATALOG]


def example_ids() -> list[str]:
    return [ex.id for ex in CATALOG]


def get_example(example_id: str) -> Example:
    try:
        return _BY_ID[example_id]
    except KeyError:
        raise KeyError(f"unknown example {example_id!r}; known: {', '.join(_BY_ID)}") from None


@dataclass
class ExampleReport:
    example_id: str
    reports: list[Report]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def document(self) -> dict:
        return {
            "example": self.example_id,
            "passed": self.passed,
            "scenarios": [r.document for r in self.reports],
        }

    def dumps(self) -> str:
        return dumps(self.document)

    def summary_lines(self) -> list[str]:
        lines = []
        for rep in self.reports:
            doc = rep.document
            for entry in doc["analyses"]:
                for chk in entry.get("checks", []):
                    tag = "PASS" if chk["passed"] else "FAIL"
                    label = entry.get("label", entry["type"])
                    lines.append(f"{tag}  {doc['scenario']}[{entry['index']}] {label}: {chk['quantity']}")
        lines.append(f"{'PASS' if self.passed else 'FAIL'}  {self.example_id}")
        return lines


def reproduce(example_id: str, tol: float | None = None) -> ExampleReport:
    ex = get_example(example_id)
    return ExampleReport(ex.id, [run_document(doc, tol) for doc in ex.build()])

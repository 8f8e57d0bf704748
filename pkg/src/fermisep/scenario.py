"""JSON scenario files: states, observables and analyses with expectations.

A scenario is a JSON object with ``"version": 1``.  Complex numbers are
written ``[re, im]``; real numbers may be written bare.  See
``scenarios/`` for complete files.  Reports are serialized deterministically
with 15 significant digits.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .antisym import (
    AntisymmetrizerAction,
    OrthogonalStructure,
    antisymmetrize_array,
    antisymmetrize_product,
    separable_state,
    subspace_w,
)
from .builders import (
    DOWN,
    UP,
    pauli,
    singlet_amplitudes,
    spin_space_product,
    spin_state,
    symmetric_pair,
    tag_structure,
    tagged,
    tagged_operator,
)
from .errors import CapacityError, DomainError, FermisepError
from .observables import (
    A_SANDWICH,
    COSET_SUM,
    AssembledObservable,
    assemble_o,
    assemble_o_tilde,
    block_identity,
    build_subsystem_observable,
    observable_from_matrix,
)
from .separability import (
    chsh_correlators,
    expectation,
    factorization_table,
    full_separability_e,
    matrix_element,
    projector_criterion,
    separability_test,
    spin_family,
    weak_value,
)
from .symmetric import Partition
from .tensor import Operator, StateVector, inner, tensor_product

FORMAT_VERSION = 1
DEFAULT_TOL = 1e-10
TOL_ENV = "FERMISEP_TOL"

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3


class ScenarioError(DomainError):
    """Malformed or inconsistent scenario input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


def default_tolerance(env=None) -> float:
    env = os.environ if env is None else env
    raw = env.get(TOL_ENV)
    if raw is None or raw == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ScenarioError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not (tol > 0 and math.isfinite(tol)):
        raise ScenarioError(f"{TOL_ENV} must be positive and finite")
    return tol


def parse_text(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be a JSON object")
    return doc


def load_scenario(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text)


# -- value parsing ----------------------------------------------------------


def parse_complex(x) -> complex:
    if isinstance(x, bool):
        raise ScenarioError(f"expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        z = complex(x)
    elif isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        z = complex(x[0], x[1])
    else:
        raise ScenarioError(f"expected a number or [re, im], got {x!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ScenarioError("amplitudes must be finite")
    return z


def parse_vector(x, length: int | None = None) -> np.ndarray:
    if not isinstance(x, list):
        raise ScenarioError(f"expected a list of amplitudes, got {type(x).__name__}")
    vec = np.array([parse_complex(v) for v in x], dtype=complex)
    if length is not None and len(vec) != length:
        raise ScenarioError(f"expected {length} amplitudes, got {len(vec)}")
    return vec


def parse_matrix(x, size: int) -> np.ndarray:
    if not isinstance(x, list) or len(x) != size:
        raise ScenarioError(f"expected a {size}x{size} matrix")
    return np.stack([parse_vector(row, size) for row in x])


def parse_axis(x) -> np.ndarray:
    if not isinstance(x, list) or len(x) != 3:
        raise ScenarioError(f"axis must be a list of 3 reals, got {x!r}")
    try:
        axis = np.array([float(v) for v in x])
    except (TypeError, ValueError):
        raise ScenarioError(f"axis must be a list of 3 reals, got {x!r}") from None
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) >= 1e-12:
        raise ScenarioError(f"axis {x} is not a unit vector (norm {norm:.15g})")
    return axis


def _get(spec: dict, key: str, where: str):
    if not isinstance(spec, dict) or key not in spec:
        raise ScenarioError(f"{where}: missing key {key!r}")
    return spec[key]


# -- scenario context -------------------------------------------------------


@dataclass
class Context:
    d: int
    n: int
    tags: tuple[str, ...] | None
    rng: np.random.Generator | None
    partitions: dict = field(default_factory=dict)
    structures: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    certified: dict = field(default_factory=dict)
    factors: dict = field(default_factory=dict)
    observables: dict = field(default_factory=dict)

    def random(self) -> np.random.Generator:
        if self.rng is None:
            raise ScenarioError("random draws need an explicit top-level 'seed'")
        return self.rng

    def lookup(self, table: str, name, what: str):
        entries = getattr(self, table)
        if name is None:
            if len(entries) == 1:
                return next(iter(entries.values()))
            raise ScenarioError(f"{what} name required ({len(entries)} defined)")
        if name not in entries:
            raise ScenarioError(f"unknown {what} {name!r}")
        return entries[name]

    def partition(self, name=None) -> Partition:
        return self.lookup("partitions", name, "partition")

    def structure(self, name=None) -> OrthogonalStructure:
        return self.lookup("structures", name, "structure")

    def state(self, name) -> StateVector:
        return self.lookup("states", name, "state")

    def observable(self, name):
        return self.lookup("observables", name, "observable")


def spin_vector(spec) -> np.ndarray:
    if spec == "+":
        return UP.copy()
    if spec == "-":
        return DOWN.copy()
    if isinstance(spec, dict):
        return spin_state(parse_axis(_get(spec, "axis", "spin")), int(spec.get("sign", 1)))
    vec = parse_vector(spec, 2)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ScenarioError("spin vector is zero")
    return vec / nrm


def ket(ctx: Context, spec) -> np.ndarray:
    """Single-particle vector in C^d."""
    if isinstance(spec, dict):
        if "basis" in spec:
            k = spec["basis"]
            if not isinstance(k, int) or not 0 <= k < ctx.d:
                raise ScenarioError(f"basis index {k!r} outside [0, {ctx.d})")
            out = np.zeros(ctx.d, dtype=complex)
            out[k] = 1.0
            return out
        if "spin" in spec:
            spin = spin_vector(spec["spin"])
            if "tag" not in spec:
                if ctx.d != 2:
                    raise ScenarioError("a bare spin ket needs local_dim 2 or a 'tag'")
                return spin
            return tagged(spin, spec["tag"], _tags(ctx))
        raise ScenarioError(f"unrecognized ket {spec!r}")
    return parse_vector(spec, ctx.d)


def _tags(ctx: Context) -> tuple[str, ...]:
    if ctx.tags is None:
        raise ScenarioError("position tags used but no top-level 'tags' declared")
    return ctx.tags


def spin_part(spec, n: int) -> np.ndarray:
    if spec == "singlet":
        if n != 2:
            raise ScenarioError("the singlet spin part needs two sites")
        return singlet_amplitudes()
    if isinstance(spec, dict):
        if "symmetric_pair" in spec:
            pair = spec["symmetric_pair"]
            if n != 2 or len(pair) != 2:
                raise ScenarioError("symmetric_pair needs two spins on two sites")
            return symmetric_pair(spin_vector(pair[0]), spin_vector(pair[1]))
        if "product" in spec:
            spins = [spin_vector(s) for s in spec["product"]]
            if len(spins) != n:
                raise ScenarioError(f"product spin part needs {n} spins")
            return tensor_product([StateVector(2, 1, s) for s in spins]).amplitudes
        raise ScenarioError(f"unrecognized spin part {spec!r}")
    return parse_vector(spec, 2**n)


def spin_space_state(ctx: Context, spec: dict, n: int) -> StateVector:
    tags = spec.get("tags")
    if not isinstance(tags, (list, str)) or len(tags) != n:
        raise ScenarioError(f"spin_space needs {n} position tags")
    vec = spin_space_product(spin_part(_get(spec, "spin", "spin_space"), n), list(tags), _tags(ctx))
    if vec.dim_local != ctx.d:
        raise ScenarioError(f"tags give local_dim {vec.dim_local}, scenario has {ctx.d}")
    return vec


def block_vector(ctx: Context, spec, n: int, frame=None) -> StateVector:
    """State of an n-site block."""
    if not isinstance(spec, dict):
        if n == 1:
            return StateVector(ctx.d, 1, ket(ctx, spec))
        return StateVector(ctx.d, n, parse_vector(spec, ctx.d**n))
    if "slater" in spec:
        kets = [ket(ctx, k) for k in spec["slater"]]
        if len(kets) != n:
            raise ScenarioError(f"slater factor needs {n} kets, got {len(kets)}")
        prod = tensor_product([StateVector(ctx.d, 1, k) for k in kets]).amplitudes
        vec = math.sqrt(math.factorial(n)) * antisymmetrize_array(prod, n, ctx.d)
        out = StateVector(ctx.d, n, vec)
    elif "amplitudes" in spec:
        out = StateVector(ctx.d, n, parse_vector(spec["amplitudes"], ctx.d**n))
    elif "spin_space" in spec:
        out = spin_space_state(ctx, spec["spin_space"], n)
    elif "random" in spec:
        if frame is None:
            raise ScenarioError("random block factors need a structure")
        basis = subspace_w(tuple(range(1, n + 1)), frame, ctx.d)
        rng = ctx.random()
        c = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        out = basis.combine(c / np.linalg.norm(c))
    elif n == 1 and ("basis" in spec or "spin" in spec):
        out = StateVector(ctx.d, 1, ket(ctx, spec))
    else:
        raise ScenarioError(f"unrecognized block state {spec!r}")
    if spec.get("normalize"):
        out = out.normalize()
    return out


def build_structure(ctx: Context, spec) -> OrthogonalStructure:
    if not isinstance(spec, dict):
        raise ScenarioError("structure must be an object")
    if "basis_sets" in spec:
        sets = spec["basis_sets"]
        for s in sets:
            if any(not isinstance(i, int) or not 0 <= i < ctx.d for i in s):
                raise ScenarioError(f"basis set {s} outside [0, {ctx.d})")
        return OrthogonalStructure.from_basis_sets(ctx.d, sets)
    if "frames" in spec:
        frames = [np.stack([ket(ctx, k) for k in fr], axis=1) for fr in spec["frames"]]
        return OrthogonalStructure(ctx.d, tuple(frames))
    if "tags" in spec:
        return tag_structure(spec["tags"], _tags(ctx))
    raise ScenarioError(f"unrecognized structure {spec!r}")


def build_partition(ctx: Context, spec) -> Partition:
    if not isinstance(spec, list):
        raise ScenarioError("partition must be a list of blocks")
    gamma = Partition(tuple(tuple(b) for b in spec))
    if gamma.n != ctx.n:
        raise ScenarioError(f"partition covers {gamma.n} sites, scenario has {ctx.n}")
    return gamma


def build_state(ctx: Context, name: str, spec) -> StateVector:
    if not isinstance(spec, dict):
        raise ScenarioError(f"state {name!r} must be an object")
    if "amplitudes" in spec:
        out = StateVector(ctx.d, ctx.n, parse_vector(spec["amplitudes"], ctx.d**ctx.n))
    elif "builtin" in spec:
        if spec["builtin"] != "singlet":
            raise ScenarioError(f"unknown builtin state {spec['builtin']!r}")
        if (ctx.d, ctx.n) != (2, 2):
            raise ScenarioError("builtin singlet needs local_dim 2 and num_sites 2")
        out = StateVector(2, 2, singlet_amplitudes())
    elif "spin_space" in spec:
        out = spin_space_state(ctx, spec["spin_space"], ctx.n)
    elif "antisymmetrized" in spec:
        inner_spec = spec["antisymmetrized"]
        gamma = ctx.partition(inner_spec.get("partition"))
        raw = build_state(ctx, name, _get(inner_spec, "state", "antisymmetrized"))
        out = AntisymmetrizerAction(ctx.n, ctx.d, math.sqrt(gamma.multinomial)).act(raw)
    elif "antisymmetrized_product" in spec:
        inner_spec = spec["antisymmetrized_product"]
        gamma = ctx.partition(inner_spec.get("partition"))
        sname = inner_spec.get("structure")
        structure = ctx.structure(sname) if sname is not None else None
        raw = _get(inner_spec, "factors", "antisymmetrized_product")
        if len(raw) != gamma.s:
            raise ScenarioError(f"{len(raw)} factors for {gamma.s} blocks")
        frames = structure.frames if structure is not None else [None] * gamma.s
        factors = [block_vector(ctx, f, len(b), fr) for f, b, fr in zip(raw, gamma.blocks, frames)]
        if structure is not None:
            cert = separable_state(gamma, structure, factors, tol=1e-10)
            ctx.certified[name] = cert
            out = cert.vector
        else:
            out = antisymmetrize_product(gamma, factors)
        ctx.factors[name] = tuple(factors)
    else:
        raise ScenarioError(f"unrecognized state spec for {name!r}")
    if spec.get("normalize"):
        out = out.normalize()
    return out


def block_observable(ctx: Context, spec, block, frame):
    n = len(block)
    if not isinstance(spec, dict):
        raise ScenarioError("block observable must be an object")
    scale = float(spec.get("scale", 1.0))
    if "identity" in spec:
        obs = block_identity(block, frame, ctx.d)
        if scale == 1.0:
            return obs
        return build_subsystem_observable(
            block, frame, [(scale * lam, mu) for lam, mu in obs.spectral_pairs], ctx.d
        )
    if "pauli" in spec or "spin_op" in spec:
        if n != 1:
            raise ScenarioError("spin observables act on single-site blocks")
        op = pauli(parse_axis(spec["pauli"])) if "pauli" in spec else parse_matrix(spec["spin_op"], 2)
        mat = tagged_operator(op, spec["tag"], _tags(ctx)) if "tag" in spec else op
    elif "projector" in spec:
        vec = block_vector(ctx, spec["projector"], n, frame).normalize()
        mat = np.outer(vec.amplitudes, vec.amplitudes.conj())
    elif "spectral" in spec:
        pairs = [
            (float(_get(p, "value", "spectral")), block_vector(ctx, _get(p, "vector", "spectral"), n, frame))
            for p in spec["spectral"]
        ]
        return build_subsystem_observable(
            block, frame, [(scale * lam, mu) for lam, mu in pairs], ctx.d, tol=1e-10
        )
    elif "matrix" in spec:
        mat = parse_matrix(spec["matrix"], ctx.d**n)
    else:
        raise ScenarioError(f"unrecognized block observable {spec!r}")
    return observable_from_matrix(block, frame, scale * mat, ctx.d, tol=1e-10)


def build_observable(ctx: Context, spec):
    if not isinstance(spec, dict):
        raise ScenarioError("observable must be an object")
    if "assembled" in spec:
        a = spec["assembled"]
        gamma = ctx.partition(a.get("partition"))
        form = a.get("form", A_SANDWICH)
        sname = a.get("structure")
        structure = ctx.structure(sname) if sname is not None else None
        frames = structure.frames if structure is not None else [None] * gamma.s
        blocks = _get(a, "blocks", "assembled")
        if len(blocks) != gamma.s:
            raise ScenarioError(f"{len(blocks)} block observables for {gamma.s} blocks")
        obs = [block_observable(ctx, b, blk, fr) for b, blk, fr in zip(blocks, gamma.blocks, frames)]
        if form == A_SANDWICH:
            return assemble_o(gamma, structure, obs)
        if form == COSET_SUM:
            return assemble_o_tilde(gamma, obs)
        raise ScenarioError(f"unknown observable form {form!r}")
    if "spin_correlation" in spec:
        if (ctx.d, ctx.n) != (2, 2):
            raise ScenarioError("spin_correlation needs local_dim 2 and num_sites 2")
        c = spec["spin_correlation"]
        return spin_family(parse_axis(_get(c, "a", "spin_correlation")), parse_axis(_get(c, "b", "spin_correlation")))
    if "identity" in spec:
        return Operator.identity(ctx.d, ctx.n)
    raise ScenarioError(f"unrecognized observable {spec!r}")


def build_context(doc: dict, tol: float) -> Context:
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise ScenarioError(f"unsupported scenario version {version!r} (expected {FORMAT_VERSION})")
    d, n = doc.get("local_dim"), doc.get("num_sites")
    for key, v in (("local_dim", d), ("num_sites", n)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ScenarioError(f"{key} must be a positive integer")
    tags = doc.get("tags")
    if tags is not None:
        tags = tuple(tags)
        if len(set(tags)) != len(tags) or 2 * len(tags) != d:
            raise ScenarioError("tags must be distinct and local_dim must equal 2 * len(tags)")
    seed = doc.get("seed")
    rng = np.random.default_rng(seed) if seed is not None else None
    ctx = Context(d, n, tags, rng)
    parts = doc.get("partitions", {})
    if "partition" in doc:
        parts = {"default": doc["partition"], **parts}
    for name, spec in parts.items():
        ctx.partitions[name] = build_partition(ctx, spec)
    for name, spec in doc.get("structures", {}).items():
        ctx.structures[name] = build_structure(ctx, spec)
    for name, spec in doc.get("states", {}).items():
        ctx.states[name] = build_state(ctx, name, spec)
    for name, spec in doc.get("observables", {}).items():
        ctx.observables[name] = build_observable(ctx, spec)
    return ctx


# -- analyses ---------------------------------------------------------------


def _axes(spec) -> tuple:
    return tuple(parse_axis(_get(spec, k, "axes")) for k in ("a", "a2", "b", "b2"))


def _random_axis(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _analysis_separability(ctx, spec, tol):
    psi = ctx.state(spec.get("state"))
    rep = separability_test(psi, ctx.partition(spec.get("partition")), ctx.structure(spec.get("structure")), tol)
    out = {
        "verdict": rep.verdict.value,
        "separable": rep.is_separable,
        "residual_span": rep.residual_span,
        "residual_rank1": rep.residual_rank1,
        "fidelity": rep.fidelity,
        "global_phase": rep.global_phase,
        "degenerate": rep.degenerate,
    }
    if rep.witnesses is not None:
        out["witnesses"] = [w.amplitudes for w in rep.witnesses]
    return out


def _analysis_expectation(ctx, spec, tol):
    return {"value": expectation(ctx.state(spec.get("state")), ctx.observable(spec.get("observable")))}


def _analysis_matrix_element(ctx, spec, tol):
    op = ctx.observable(spec.get("observable"))
    return {"value": matrix_element(ctx.state(spec["bra"]), op, ctx.state(spec["ket"]))}


def _analysis_norm(ctx, spec, tol):
    psi = ctx.state(spec.get("state"))
    return {"norm": psi.norm(), "norm2": psi.norm() ** 2}


def _analysis_inner(ctx, spec, tol):
    return {"value": inner(ctx.state(spec["bra"]), ctx.state(spec["ket"]))}


def _analysis_overlap_factorization(ctx, spec, tol):
    """Total overlap against the product of the block-factor overlaps."""
    bra, ket_ = spec["bra"], spec["ket"]
    for name in (bra, ket_):
        if name not in ctx.factors:
            raise ScenarioError(f"state {name!r} was not built from block factors")
    total = inner(ctx.state(bra), ctx.state(ket_))
    per_block = [inner(f, g) for f, g in zip(ctx.factors[bra], ctx.factors[ket_])]
    prod = complex(np.prod(per_block))
    return {"total": total, "per_block": per_block, "product": prod, "gap": abs(total - prod)}


def _analysis_factorization(ctx, spec, tol):
    name = spec.get("state")
    op = ctx.observable(spec.get("observable"))
    if not isinstance(op, AssembledObservable) or op.structure is None:
        raise ScenarioError("factorization needs an assembled observable with a structure")
    psi = ctx.state(name)
    if name in ctx.certified:
        table = factorization_table(ctx.certified[name], op)
    else:
        from .observables import marginal_observable

        direct = expectation(psi, op)
        marg = [
            expectation(psi, marginal_observable(k, op.partition, op.structure, o))
            for k, o in enumerate(op.blocks)
        ]
        table = {"direct": direct, "marginals": marg, "marginal_product": complex(np.prod(marg))}
    table["gap"] = abs(table["direct"] - table["marginal_product"])
    if "block_product" in table:
        table["block_gap"] = abs(table["direct"] - table["block_product"])
    return table


def _analysis_chsh(ctx, spec, tol):
    psi = ctx.state(spec.get("state"))
    family = spec.get("family", "spin")
    if family not in ("spin", "spatial"):
        raise ScenarioError(f"unknown CHSH family {family!r}")
    if family == "spatial" and ctx.tags != ("L", "R"):
        raise ScenarioError("the spatial CHSH family needs tags ['L', 'R']")
    if "sweep" in spec:
        count = int(_get(spec["sweep"], "count", "sweep"))
        rng = ctx.random()
        best = -1.0
        for _ in range(count):
            axes = [_random_axis(rng) for _ in range(4)]
            c = chsh_correlators(psi, *axes, family=family)
            best = max(best, abs(c[0] + c[1] + c[2] - c[3]))
        return {"max_value": best, "count": count}
    c = chsh_correlators(psi, *_axes(_get(spec, "axes", "chsh")), family=family)
    return {"correlators": list(c), "value": abs(c[0] + c[1] + c[2] - c[3])}


def _analysis_weak_value(ctx, spec, tol):
    bra, ket_ = spec["bra"], spec["ket"]
    for name in (bra, ket_):
        if name not in ctx.certified:
            raise ScenarioError(f"weak_value needs certified states; {name!r} is not")
    res = weak_value(ctx.certified[bra], ctx.certified[ket_], ctx.observable(spec.get("observable")), tol)
    return {
        "total": res.total,
        "per_block": list(res.per_block),
        "product": res.product,
        "gap": abs(res.total - res.product),
    }


def _analysis_projector(ctx, spec, tol):
    psi = ctx.state(spec.get("state"))
    gamma = ctx.partition(spec.get("partition"))
    structure = ctx.structure(spec.get("structure"))
    projs = []
    for p, b, fr in zip(_get(spec, "projectors", "projector_criterion"), gamma.blocks, structure.frames):
        projs.append(None if p is None else block_vector(ctx, p, len(b), fr))
    res = projector_criterion(psi, gamma, structure, projs, spec.get("mode", "all"), tol)
    return {"values": [res.values[k] for k in sorted(res.values)], "verdict": res.verdict}


def _analysis_full_separability(ctx, spec, tol):
    psi = ctx.state(spec.get("state"))
    projs = [ket(ctx, p) for p in _get(spec, "projectors", "full_separability")]
    res = full_separability_e(psi, projs, tol)
    return {"values": list(res.values), "verdict": res.verdict}


ANALYSES = {
    "separability": _analysis_separability,
    "expectation": _analysis_expectation,
    "matrix_element": _analysis_matrix_element,
    "norm": _analysis_norm,
    "inner_product": _analysis_inner,
    "overlap_factorization": _analysis_overlap_factorization,
    "factorization": _analysis_factorization,
    "chsh": _analysis_chsh,
    "weak_value": _analysis_weak_value,
    "projector_criterion": _analysis_projector,
    "full_separability": _analysis_full_separability,
}


def _lookup_path(result: dict, path: str):
    cur: Any = result
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        else:
            raise ScenarioError(f"expectation refers to unknown quantity {path!r}")
    return cur


def check_expectation(path: str, observed, spec, tol: float) -> dict:
    """Compare one observed quantity with its expectation spec."""
    if isinstance(spec, dict):
        tol = float(spec.get("tol", tol))
        checks = []
        if "equals" in spec:
            checks.append(_equal(observed, spec["equals"], tol))
        if "max" in spec:
            checks.append(_real(observed) <= float(spec["max"]))
        if "min" in spec:
            checks.append(_real(observed) >= float(spec["min"]))
        if "not_equals" in spec:
            checks.append(not _equal(observed, spec["not_equals"], tol))
        if not checks:
            raise ScenarioError(f"expectation for {path!r} has no condition")
        expected = {k: v for k, v in spec.items() if k != "tol"}
        passed = all(checks)
    else:
        expected = spec
        passed = _equal(observed, spec, tol)
    return {"quantity": path, "observed": observed, "expected": expected, "tol": tol, "passed": bool(passed)}


def _real(x) -> float:
    if isinstance(x, (bool, str)) or not isinstance(x, (int, float, complex, np.number)):
        raise ScenarioError(f"cannot order {x!r}")
    return float(np.real(x))


def _equal(observed, expected, tol: float) -> bool:
    if isinstance(expected, (str, bool)) or expected is None:
        return observed == expected
    if isinstance(observed, (bool, str)):
        return False
    if isinstance(observed, (list, tuple, np.ndarray)):
        if not isinstance(expected, list) or len(observed) != len(expected):
            return False
        return all(_equal(o, e, tol) for o, e in zip(observed, expected))
    return abs(complex(observed) - parse_complex(expected)) < tol


@dataclass
class Report:
    document: dict
    passed: bool

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_ASSERTION

    def dumps(self) -> str:
        return dumps(self.document)


def run_document(doc: dict, tol: float | None = None, source: str | None = None) -> Report:
    """Execute every analysis of a parsed scenario and evaluate its expectations."""
    if tol is None:
        tol = float(doc.get("tolerance", default_tolerance()))
    if not (tol > 0 and math.isfinite(tol)):
        raise ScenarioError("tolerance must be positive and finite")
    ctx = build_context(doc, tol)
    results = []
    failures = 0
    for i, spec in enumerate(doc.get("analyses", [])):
        kind = spec.get("type") if isinstance(spec, dict) else None
        if kind not in ANALYSES:
            raise ScenarioError(f"analysis {i}: unknown type {kind!r}")
        values = ANALYSES[kind](ctx, spec, tol)
        checks = [
            check_expectation(path, _lookup_path(values, path), exp, tol)
            for path, exp in spec.get("expect", {}).items()
        ]
        failures += sum(not c["passed"] for c in checks)
        entry = {"index": i, "type": kind, "results": values}
        if "label" in spec:
            entry["label"] = spec["label"]
        if checks:
            entry["checks"] = checks
        results.append(entry)
    document = {
        "tool": "fermisep",
        "version": __version__,
        "scenario": doc.get("name", source or "<inline>"),
        "tolerance": tol,
        "inputs": doc,
        "analyses": results,
        "failures": failures,
        "passed": failures == 0,
    }
    return Report(document, failures == 0)


def run_scenario(path: str, tol: float | None = None) -> Report:
    return run_document(load_scenario(path), tol, source=os.path.basename(path))


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, CapacityError):
        return EXIT_CAPACITY
    if isinstance(exc, (FermisepError, ValueError, KeyError, TypeError)):
        return EXIT_INPUT
    raise exc


# -- deterministic serialization --------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".15g")


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, StateVector):
        return _plain(obj.amplitudes)
    if isinstance(obj, tuple):
        return [_plain(v) for v in obj]
    if isinstance(obj, list):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _emit(v, indent, level + 1) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 15 significant digits and complex as [re, im]."""
    return _emit(_plain(obj), indent, 0) + "\n"

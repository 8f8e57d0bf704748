"""Build random separable states, run the decision procedure, report worst fidelities.

    python3 scripts/roundtrip_batch.py --count 500 --max-n 4 --max-d 6
"""

import argparse
import dataclasses
import itertools
import time
from dataclasses import dataclass

import numpy as np

from fermisep import (
    OrthogonalStructure,
    Partition,
    StateVector,
    Verdict,
    separability_test,
    separable_state,
    subspace_w,
)
from fermisep.symmetric import set_partitions


@dataclass
class BatchConfig:
    count: int = 200
    seed: int = 0
    max_n: int = 4
    max_d: int = 6
    entangled_fraction: float = 0.0


def haar(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_setting(cfg: BatchConfig, rng):
    n = int(rng.integers(2, cfg.max_n + 1))
    d = int(rng.integers(n, cfg.max_d + 1))
    parts = set_partitions(n)
    gamma = parts[int(rng.integers(len(parts)))]
    dims = list(gamma.sizes)
    for _ in range(d - n):
        dims[int(rng.integers(gamma.s))] += 1
    u = haar(d, rng)
    cuts = list(itertools.accumulate([0] + dims))
    v = OrthogonalStructure(d, tuple(u[:, cuts[k]:cuts[k + 1]] for k in range(gamma.s)))
    return gamma, v


def random_factors(gamma: Partition, v: OrthogonalStructure, rng):
    out = []
    for block, frame in zip(gamma.blocks, v.frames):
        basis = subspace_w(block, frame, v.local_dim).matrix
        c = rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1])
        out.append(StateVector(v.local_dim, len(block), basis @ c).normalize())
    return out


def run(cfg: BatchConfig):
    rng = np.random.default_rng(cfg.seed)
    tally = {verdict: 0 for verdict in Verdict}
    worst_fid, worst_resid = 1.0, 0.0
    for _ in range(cfg.count):
        gamma, v = random_setting(cfg, rng)
        psi = separable_state(gamma, v, random_factors(gamma, v, rng)).vector
        if rng.uniform() < cfg.entangled_fraction:
            psi = (psi + separable_state(gamma, v, random_factors(gamma, v, rng)).vector).normalize()
        rep = separability_test(psi, gamma, v)
        tally[rep.verdict] += 1
        if rep.is_separable:
            worst_fid = min(worst_fid, rep.fidelity)
            worst_resid = max(worst_resid, rep.residual_rank1)
    return tally, worst_fid, worst_resid


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(BatchConfig):
        p.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    cfg = BatchConfig(**vars(p.parse_args()))
    t0 = time.perf_counter()
    tally, fid, resid = run(cfg)
    for verdict, c in tally.items():
        print(f"{verdict.value:>20}: {c}")
    print(f"worst witness fidelity {fid:.15f}, worst rank-1 residual {resid:.2e}")
    print(f"{cfg.count} instances in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()

"""Seeded sweeps of the decomposition routines, with job-independent JSON reports."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from .decomposition import lemma_decompose, lowner_envelope
from .generators import random_block_psd


@dataclass(frozen=True)
class SweepConfig:
    seeds: range = range(1000)
    max_dim: int = 8  # per block
    square: bool = False  # force n = m (needed by the envelope)
    min_dim: int = 1

    def dims(self, seed: int) -> tuple[int, int]:
        span = self.max_dim - self.min_dim + 1
        n = self.min_dim + seed % span
        m = n if self.square else self.min_dim + (seed // span) % span
        return n, m

    def to_json(self) -> dict[str, Any]:
        return {"seeds": [self.seeds.start, self.seeds.stop], "max_dim": self.max_dim,
                "min_dim": self.min_dim, "square": self.square}


def _lemma_row(args):
    config, seed = args
    n, m = config.dims(seed)
    M = random_block_psd(n, m, "any", seed)
    dec = lemma_decompose(M, check=False)
    scale = 1.0 + float(np.linalg.norm(M.matrix))
    return {"seed": seed, "n": n, "m": m, "fingerprint": M.fingerprint(),
            "reconstruction_residual": dec.reconstruction_residual,
            "relative_residual": dec.reconstruction_residual / scale,
            "unitarity_residual": dec.unitarity_residual}


def _envelope_row(args):
    config, seed = args
    n, _ = config.dims(seed)
    M = random_block_psd(n, n, "any", seed)
    env = lowner_envelope(M, check=False)
    scale = 1.0 + float(np.linalg.norm(M.matrix))
    return {"seed": seed, "n": n, "fingerprint": M.fingerprint(), "min_gap": env.min_gap,
            "relative_gap": env.min_gap / scale}


def _sweep(fn, config: SweepConfig, jobs: int) -> list[dict]:
    tasks = [(config, s) for s in config.seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks, chunksize=50))
    return [fn(t) for t in tasks]


def lemma_sweep(config: SweepConfig = SweepConfig(), jobs: int = 1) -> dict[str, Any]:
    """Decompose one unconstrained instance per seed and report every residual."""
    rows = _sweep(_lemma_row, config, jobs)
    return {
        "config": config.to_json(),
        "max_relative_residual": max(r["relative_residual"] for r in rows),
        "max_unitarity_residual": max(r["unitarity_residual"] for r in rows),
        "rows": rows,
    }


def envelope_sweep(config: SweepConfig = SweepConfig(max_dim=6, min_dim=2, square=True),
                   jobs: int = 1) -> dict[str, Any]:
    """Smallest eigenvalue of ``envelope - M`` for one instance per seed."""
    rows = _sweep(_envelope_row, config, jobs)
    return {
        "config": config.to_json(),
        "min_relative_gap": min(r["relative_gap"] for r in rows),
        "rows": rows,
    }

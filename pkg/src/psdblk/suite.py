"""Seeded verification campaigns over every inequality check.

Trial ``i`` of check ``c`` draws its instance from the stream
``make_rng(seed, c, i)`` with dimensions ``dims[i % len(dims)]``, so results
do not depend on how trials are distributed over workers. Aggregation keeps
the minimum margin with the lowest trial index on ties.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .checks import (
    RangeMode,
    check_accretive,
    check_cor_p,
    check_direct_sum,
    check_elem1,
    check_lw,
    check_range_modes,
    check_schatten,
    check_subadditivity,
)
from .errors import PsdBlkError
from .generators import GeneratorMode, make_rng, random_block_psd
from .linalg import adjoint, matrix_to_json
from .norms import parse_battery

COR_P_EXPONENTS = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0)
SUBADDITIVITY_TAGS = ("pow:0.5", "log1p", "frac")
ELEM1_EXPONENTS = (1.0, 1.5, 2.0, 3.0)
SCHATTEN_EXPONENTS = (1.0, 1.5, 2.0, 3.0)


@dataclass(frozen=True)
class CheckSpec:
    """How to draw instances for a check and how to run it.

    ``modes`` is cycled by trial index. ``kind`` is ``"block"`` for checks on a
    :class:`BlockPsd` and ``"pair"`` for checks on two PSD matrices.
    """

    check_id: str
    kind: str
    modes: tuple[GeneratorMode, ...]
    run: Callable


def _block(check_id, modes, fn):
    return CheckSpec(check_id, "block", tuple(GeneratorMode(m) for m in modes), fn)


def _pair(check_id, fn):
    return CheckSpec(check_id, "pair", (GeneratorMode.UNCONSTRAINED,), fn)


def catalog() -> list[CheckSpec]:
    specs = [_block("lw", ["hermitian"], lambda M, b: check_lw(M, b))]
    for p in COR_P_EXPONENTS:
        specs.append(_block(f"cor_p[p={p:g}]", ["any"],
                            lambda M, b, p=p: check_cor_p(M, p, b)))
    for tag in SUBADDITIVITY_TAGS:
        specs.append(_pair(f"subadditivity[f={tag}]",
                           lambda S, T, b, tag=tag: [check_subadditivity(S, T, tag)]))
    for p in ELEM1_EXPONENTS:
        specs.append(_pair(f"elem1[p={p:g}]", lambda S, T, b, p=p: check_elem1(S, T, p, b)))
    specs.append(_block("accretive", ["accretive"], lambda M, b: check_accretive(M, b)))
    specs.append(_block("range[full]", ["range-sep"],
                        lambda M, b: check_range_modes(M, RangeMode.FULL_RANGE, b)))
    # Hermitian X puts 0 on the boundary of the rotated range: exercises the relint verdict
    specs.append(_block("range[relint]", ["range-sep", "hermitian", "any"],
                        lambda M, b: check_range_modes(M, RangeMode.RELATIVE_INTERIOR, b)))
    specs.append(_block("range[2w]", ["any"],
                        lambda M, b: check_range_modes(M, RangeMode.UNCONDITIONAL_2W, b)))
    specs.append(_block("direct_sum", ["any"], lambda M, b: check_direct_sum(M, b)))
    for p in SCHATTEN_EXPONENTS:
        specs.append(_block(f"schatten[p={p:g}]", ["any"],
                            lambda M, b, p=p: [check_schatten(M, p)]))
    return specs


def check_ids() -> list[str]:
    return [s.check_id for s in catalog()]


@dataclass(frozen=True)
class SuiteConfig:
    dims: tuple[tuple[int, int], ...] = ((2, 2), (3, 3), (4, 4), (5, 5), (6, 6))
    trials: int = 100
    seed: int = 0
    battery: str | None = None
    boundary: str = "interior"  # "interior", "boundary" or "mixed" (odd trials on the boundary)
    checks: tuple[str, ...] | None = None
    full: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.boundary not in ("interior", "boundary", "mixed"):
            raise ValueError(f"unknown boundary policy {self.boundary!r}")
        if self.checks is not None:
            unknown = set(self.checks) - set(check_ids())
            if unknown:
                raise ValueError(f"unknown checks: {sorted(unknown)}")

    def to_json(self) -> dict[str, Any]:
        return {
            "dims": [list(d) for d in self.dims],
            "trials": self.trials,
            "seed": self.seed,
            "battery": self.battery,
            "boundary": self.boundary,
            "checks": list(self.checks) if self.checks is not None else None,
        }


class TrialError(PsdBlkError):
    def __init__(self, msg, check_id, trial):
        super().__init__(msg)
        self.check_id = check_id
        self.trial = trial


def _on_boundary(config: SuiteConfig, trial: int) -> bool:
    if config.boundary == "mixed":
        return trial % 2 == 1
    return config.boundary == "boundary"


def _pair_instance(rng, n: int, boundary: bool):
    rows = max(1, n // 2) if boundary else n
    out = []
    for _ in range(2):
        G = (rng.standard_normal((n, rows)) + 1j * rng.standard_normal((n, rows))) / np.sqrt(2)
        out.append(G @ adjoint(G))
    return out


def run_trial(spec: CheckSpec, config: SuiteConfig, trial: int):
    """Run one trial; returns ``(reports, instance_json_factory, dims)``."""
    n, m = config.dims[trial % len(config.dims)]
    boundary = _on_boundary(config, trial)
    rng = make_rng(config.seed, spec.check_id, trial)
    try:
        if spec.kind == "pair":
            S, T = _pair_instance(rng, n, boundary)
            battery = parse_battery(config.battery, n) if config.battery else None
            reports = spec.run(S, T, battery)
            instance = lambda: {"S": matrix_to_json(S), "T": matrix_to_json(T)}  # noqa: E731
        else:
            mode = spec.modes[trial % len(spec.modes)]
            M = random_block_psd(n, m, mode, rng=rng, boundary=boundary)
            battery = parse_battery(config.battery, n + m) if config.battery else None
            reports = spec.run(M, battery)
            instance = M.to_json
    except PsdBlkError as exc:
        raise TrialError(f"{spec.check_id} trial {trial} ({n}x{m}): {exc}", spec.check_id, trial) from exc
    return reports, instance, (n, m)


@dataclass
class _Row:
    check_id: str
    norm: str
    trials: int = 0
    precondition_met: int = 0
    passes: int = 0
    violations: int = 0
    raw_violations: int = 0
    min_margin: float | None = None
    worst_trial: int | None = None
    worst_fingerprint: str | None = None
    worst_instance: dict | None = None

    def add(self, report, trial, instance) -> None:
        self.trials += 1
        self.passes += report.passed
        self.raw_violations += not report.holds
        if not report.precondition_met:
            return
        self.precondition_met += 1
        self.violations += not report.passed
        if self.min_margin is None or report.margin < self.min_margin:
            self.min_margin = report.margin
            self.worst_trial = trial
            self.worst_fingerprint = report.instance_fingerprint
            self.worst_instance = instance()

    def merge(self, other: "_Row") -> None:
        self.trials += other.trials
        self.precondition_met += other.precondition_met
        self.passes += other.passes
        self.violations += other.violations
        self.raw_violations += other.raw_violations
        if other.min_margin is not None and (
            self.min_margin is None
            or other.min_margin < self.min_margin
            or (other.min_margin == self.min_margin and other.worst_trial < self.worst_trial)
        ):
            self.min_margin = other.min_margin
            self.worst_trial = other.worst_trial
            self.worst_fingerprint = other.worst_fingerprint
            self.worst_instance = other.worst_instance

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.check_id,
            "norm": self.norm,
            "trials": self.trials,
            "precondition_met": self.precondition_met,
            "passes": self.passes,
            "violations": self.violations,
            "raw_violations": self.raw_violations,
            "min_margin": self.min_margin,
            "worst_trial": self.worst_trial,
            "worst_fingerprint": self.worst_fingerprint,
            "worst_instance": self.worst_instance,
        }


def _run_chunk(args):
    config, check_id, start, stop = args
    spec = next(s for s in catalog() if s.check_id == check_id)
    rows: dict[str, _Row] = {}
    flat = []
    for trial in range(start, stop):
        reports, instance, dims = run_trial(spec, config, trial)
        for r in reports:
            rows.setdefault(r.norm_tag, _Row(check_id, r.norm_tag)).add(r, trial, instance)
            if config.full:
                flat.append((check_id, r.norm_tag, trial, dims[0], dims[1], r.instance_fingerprint,
                             r.lhs, r.rhs, r.margin, r.precondition_met, r.passed))
    return check_id, rows, flat


@dataclass
class SuiteResult:
    config: SuiteConfig
    rows: list[_Row]
    flat: list[tuple] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(r.violations for r in self.rows)

    def rows_for(self, check_id: str) -> list[_Row]:
        return [r for r in self.rows if r.check_id == check_id]

    def to_json(self) -> dict[str, Any]:
        return {
            "config": self.config.to_json(),
            "total_violations": self.violations,
            "checks": [r.to_json() for r in self.rows],
        }

    CSV_HEADER = ("check", "norm", "trial", "n", "m", "fingerprint", "lhs", "rhs", "margin",
                  "precondition_met", "pass")


def _norm_order(tag: str):
    # battery order: op, tr, fro, Schatten by p, Ky Fan by k, then wmaj
    if tag in ("op", "tr", "fro"):
        return (0, ("op", "tr", "fro").index(tag), 0.0)
    if tag.startswith("s:"):
        return (1, 0, float(tag[2:]))
    if tag.startswith("kf:"):
        return (2, 0, float(tag[3:]))
    return (3, 0, 0.0)


def run_suite(config: SuiteConfig, jobs: int = 1, chunk_size: int = 500) -> SuiteResult:
    """Run every selected check for ``config.trials`` trials and aggregate.

    ``jobs > 1`` fans chunks of trials over worker processes; the result is
    identical for any ``jobs``.
    """
    specs = [s for s in catalog() if config.checks is None or s.check_id in config.checks]
    tasks = [
        (config, s.check_id, start, min(start + chunk_size, config.trials))
        for s in specs
        for start in range(0, config.trials, chunk_size)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_chunk, tasks))
    else:
        results = [_run_chunk(t) for t in tasks]

    merged: dict[tuple[str, str], _Row] = {}
    flat = []
    for check_id, rows, chunk_flat in results:
        for tag, row in rows.items():
            key = (check_id, tag)
            if key in merged:
                merged[key].merge(row)
            else:
                merged[key] = row
        flat.extend(chunk_flat)
    order = {s.check_id: i for i, s in enumerate(specs)}
    ordered = sorted(merged.values(), key=lambda r: (order[r.check_id], _norm_order(r.norm)))
    return SuiteResult(config, ordered, flat)


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)


def parse_dims(text: str) -> tuple[tuple[int, int], ...]:
    """Parse ``"2x2,4x4"``."""
    dims = []
    for item in text.split(","):
        n, sep, m = item.strip().lower().partition("x")
        if not sep:
            raise ValueError(f"bad dims item {item!r}; expected NxM")
        n, m = int(n), int(m)
        if n < 1 or m < 1:
            raise ValueError(f"dims must be positive, got {item!r}")
        dims.append((n, m))
    if not dims:
        raise ValueError("empty dims")
    return tuple(dims)


"""Counterexample search for ``||M|| <= ||A + B||`` beyond Hermitian off-diagonal blocks.

The objective is the largest Ky Fan gap ``KyFan_k(M) - KyFan_k((A+B) (+) 0)``.
By Ky Fan dominance it is positive exactly when some symmetric norm violates
the bound. Instances are generated from unconstrained real parameter vectors
through maps that keep the structural constraint on ``X`` exact (Hermitian,
normal, or none), followed by the diagonal-shift PSD repair and a
normalization to ``tr M = 2``; the bound is homogeneous, so scaling only
changes the size of the gap.

:func:`probe_real_decomposition` looks for real orthogonal factors in the
``Im X`` decomposition of a real instance by nonlinear least squares.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import mpmath
import numpy as np
from scipy.optimize import least_squares

from .decomposition import reconstruct
from .errors import NonRealInputError, UnequalBlockSizesError
from .generators import make_rng, shift_to_psd
from .linalg import (
    BlockPsd,
    adjoint,
    dumps,
    matrix_to_json,
    psd_eigvals,
    skew_part,
    validate_block_psd,
)
from .norms import ky_fan_gaps

VIOLATION_TOL = 1e-10
TRACE_NORMALIZATION = 2.0
STALL_LIMIT = 50
MIN_STEP = 1e-6
INITIAL_STEP = 0.5


class Method(Enum):
    RANDOM_RESTART = "rr"
    HILL_CLIMB = "hc"


class Constraint(Enum):
    NORMAL_X = "normal"
    HERMITIAN_X = "hermitian"
    UNCONSTRAINED = "any"


# --------------------------------------------------------------------------
# Objective


def _score(A: np.ndarray, X: np.ndarray, B: np.ndarray) -> tuple[float, int]:
    M = np.block([[A, X], [adjoint(X), B]])
    gaps = ky_fan_gaps(psd_eigvals(A + B), psd_eigvals(M))
    # the k = 2n gap is tr M - tr(A+B) = 0 identically and carries no information
    gaps = gaps[:-1]
    k = int(np.argmax(gaps))
    return float(gaps[k]), k + 1


def violation_score(M: BlockPsd) -> tuple[float, int]:
    """Largest Ky Fan gap ``KyFan_k(M) - KyFan_k((A+B) (+) 0)`` over ``k < 2n``, and its ``k``.

    Positive iff some symmetric norm has ``||M|| > ||A + B||``.
    """
    if M.n != M.m:
        raise UnequalBlockSizesError(f"blocks must have equal size, got n={M.n}, m={M.m}")
    return _score(M.A, M.X, M.B)


def reverify_violation(M: BlockPsd, tol: float = VIOLATION_TOL / 10, dps: int = 40):
    """Recompute the score in ``dps``-digit arithmetic.

    Returns ``(confirmed, score)`` where ``confirmed`` means the high-precision
    gap exceeds ``tol`` and the assembled matrix is PSD to ``tol``.
    """
    with mpmath.workdps(dps):
        def eigs(Z):
            E = mpmath.eighe(mpmath.matrix(Z.tolist()), eigvals_only=True)
            return sorted((mpmath.re(e) for e in E), reverse=True)

        lam_m = eigs(np.asarray(M.matrix))
        lam_ab = eigs(M.A + M.B) + [mpmath.mpf(0)] * M.n
        best = None
        pm = pab = mpmath.mpf(0)
        for k in range(2 * M.n - 1):
            pm += lam_m[k]
            pab += lam_ab[k]
            gap = pm - pab
            best = gap if best is None else max(best, gap)
        scale = 1 + max(abs(x) for x in lam_m)
        psd_ok = lam_m[-1] >= -tol * scale
        return bool(best > tol and psd_ok), float(best)


# --------------------------------------------------------------------------
# Parametrization


def cayley(S: np.ndarray) -> np.ndarray:
    """``(I - S)^{-1} (I + S)``; unitary for skew-Hermitian ``S``, orthogonal for real skew ``S``."""
    I = np.eye(S.shape[0], dtype=S.dtype)
    return np.linalg.solve(I - S, I + S)


def _complex_square(v: np.ndarray, n: int) -> np.ndarray:
    return (v[: n * n] + 1j * v[n * n :]).reshape(n, n)


def _hermitian_from(v: np.ndarray, n: int) -> np.ndarray:
    """Hermitian matrix from ``n**2`` reals: diagonal, then real and imaginary upper parts."""
    H = np.zeros((n, n), dtype=np.complex128)
    iu = np.triu_indices(n, 1)
    q = len(iu[0])
    H[np.diag_indices(n)] = v[:n]
    H[iu] = v[n : n + q] + 1j * v[n + q : n + 2 * q]
    return H + np.triu(H, 1).conj().T


def parameter_count(n: int, constraint: Constraint) -> int:
    base = 4 * n * n
    if constraint is Constraint.NORMAL_X:
        return base + n * n + 2 * n
    if constraint is Constraint.HERMITIAN_X:
        return base + n * n
    return base + 2 * n * n


def build_instance(theta: np.ndarray, n: int, constraint: Constraint):
    """Map parameters to feasible blocks ``(A, X, B)`` with ``tr(A + B) = 2``."""
    LA = _complex_square(theta[: 2 * n * n], n)
    LB = _complex_square(theta[2 * n * n : 4 * n * n], n)
    rest = theta[4 * n * n :]
    A = LA @ adjoint(LA)
    B = LB @ adjoint(LB)
    if constraint is Constraint.NORMAL_X:
        # 1j * Hermitian is skew-Hermitian, so the Cayley transform is unitary
        W = cayley(1j * _hermitian_from(rest[: n * n], n))
        d = rest[n * n : n * n + n] + 1j * rest[n * n + n :]
        X = (W * d) @ adjoint(W)
    elif constraint is Constraint.HERMITIAN_X:
        X = _hermitian_from(rest, n)
    else:
        X = _complex_square(rest, n)
    A, B = shift_to_psd(A, X, B, 0.0)
    trace = float(np.trace(A).real + np.trace(B).real)
    if trace > 0:
        c = TRACE_NORMALIZATION / trace
        A, X, B = c * A, c * X, c * B
    return A, X, B


# --------------------------------------------------------------------------
# Hunt


@dataclass(frozen=True)
class HuntConfig:
    n: int = 2
    method: Method = Method.HILL_CLIMB
    iterations: int = 10_000
    seed: int = 0
    constraint: Constraint = Constraint.NORMAL_X
    chains: int = 4

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "constraint", Constraint(self.constraint))
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.n < 1 or self.chains < 1:
            raise ValueError("n and chains must be positive")

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "method": self.method.value,
            "iterations": self.iterations,
            "seed": self.seed,
            "constraint": self.constraint.value,
            "chains": self.chains,
        }


@dataclass
class SearchRecord:
    best_score: float
    best_instance: BlockPsd
    worst_k: int
    iterations: int
    seed: int
    method: Method
    constraint: Constraint
    history: list[tuple[int, float]] = field(default_factory=list)
    best_chain: int = 0
    reverified: bool | None = None
    reverified_score: float | None = None
    persisted_path: str | None = None

    @property
    def violation_found(self) -> bool:
        return self.best_score > VIOLATION_TOL

    def to_json(self) -> dict[str, Any]:
        return {
            "best_score": self.best_score,
            "worst_k": self.worst_k,
            "violation_found": self.violation_found,
            "iterations": self.iterations,
            "seed": self.seed,
            "method": self.method.value,
            "constraint": self.constraint.value,
            "n": self.best_instance.n,
            "best_chain": self.best_chain,
            "reverified": self.reverified,
            "reverified_score": self.reverified_score,
            "persisted_path": self.persisted_path,
            "history": [[i, s] for i, s in self.history],
            "best_instance": self.best_instance.to_json(),
        }


def _run_chain(args):
    config, chain, iterations = args
    n, constraint = config.n, config.constraint
    rng = make_rng(config.seed, "hunt", config.method.value, constraint.value, n, chain)
    dim = parameter_count(n, constraint)

    def evaluate(theta):
        return _score(*build_instance(theta, n, constraint))[0]

    theta = rng.standard_normal(dim)
    current = evaluate(theta)
    best_theta, best = theta, current
    history = [(0, best)]
    step, stall = INITIAL_STEP, 0
    for it in range(1, iterations):
        if config.method is Method.RANDOM_RESTART:
            theta = rng.standard_normal(dim)
            current = evaluate(theta)
        elif step < MIN_STEP:
            theta = rng.standard_normal(dim)
            current = evaluate(theta)
            step, stall = INITIAL_STEP, 0
        else:
            proposal = theta + step * rng.standard_normal(dim)
            score = evaluate(proposal)
            if score > current:
                theta, current, stall = proposal, score, 0
            else:
                stall += 1
                if stall >= STALL_LIMIT:
                    step, stall = step / 2, 0
        if current > best:
            best_theta, best = theta, current
            history.append((it, best))
    if history[-1][0] != iterations - 1:
        history.append((iterations - 1, best))
    return best, best_theta, history


def hunt(config: HuntConfig, jobs: int = 1, persist_dir: str | None = None) -> SearchRecord:
    """Maximize :func:`violation_score` over the constrained family.

    ``config.iterations`` objective evaluations are split over
    ``config.chains`` independent chains; the best chain wins, lowest index
    on ties. A positive score is re-verified in high precision and, when
    ``persist_dir`` is given, the instance is written there.
    """
    base, extra = divmod(config.iterations, config.chains)
    counts = [base + (c < extra) for c in range(config.chains)]
    tasks = [(config, c, k) for c, k in enumerate(counts) if k > 0]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_chain, tasks))
    else:
        results = [_run_chain(t) for t in tasks]

    winner = max(range(len(results)), key=lambda i: (results[i][0], -i))
    best, theta, _ = results[winner]
    # merged history: best-so-far over chains, on the global iteration counter
    history = []
    offset = 0
    running = -np.inf
    for (_, _, chain_history), (_, _, count) in zip(results, tasks):
        for it, score in chain_history:
            if score > running or it == count - 1:
                running = max(running, score)
                history.append((offset + it, float(running)))
        offset += count

    A, X, B = build_instance(theta, config.n, config.constraint)
    instance = validate_block_psd(A, X, B, provenance={
        "search": "hunt", **config.to_json(), "chain": tasks[winner][1]})
    score, k = violation_score(instance)
    record = SearchRecord(score, instance, k, config.iterations, config.seed, config.method,
                          config.constraint, history, tasks[winner][1])
    if record.violation_found:
        record.reverified, record.reverified_score = reverify_violation(instance)
        if persist_dir is not None:
            record.persisted_path = persist_violation(record, persist_dir)
    return record


def persist_violation(record: SearchRecord, directory: str) -> str:
    os.makedirs(directory, exist_ok=True)
    name = (f"violation_{record.constraint.value}_n{record.best_instance.n}_"
            f"seed{record.seed}_{record.best_instance.fingerprint()}.json")
    path = os.path.join(directory, name)
    with open(path, "w") as fh:
        fh.write(dumps(record.to_json(), indent=1))
    return path


# --------------------------------------------------------------------------
# Real orthogonal factors


@dataclass
class ProbeResult:
    min_residual: float
    U: np.ndarray
    V: np.ndarray
    top: np.ndarray
    bottom: np.ndarray
    residuals: list[float]
    restarts: int
    seed: int

    def to_json(self) -> dict[str, Any]:
        return {
            "min_residual": self.min_residual,
            "restarts": self.restarts,
            "seed": self.seed,
            "residuals": self.residuals,
            "U": matrix_to_json(self.U),
            "V": matrix_to_json(self.V),
            "top": matrix_to_json(self.top),
            "bottom": matrix_to_json(self.bottom),
        }


def _skew_from(v: np.ndarray, size: int) -> np.ndarray:
    S = np.zeros((size, size))
    S[np.triu_indices(size, 1)] = v
    return S - S.T


def probe_real_decomposition(M: BlockPsd, restarts: int = 8, seed: int = 0) -> ProbeResult:
    """Smallest residual ``||M - U diag(top,0) U^T - V diag(0,bottom) V^T||_F`` over real orthogonal ``U, V``.

    Payloads are fixed to ``(A+B)/2 +- Im X``. Each restart draws a random
    starting point and runs Levenberg-Marquardt from all four combinations
    of determinant signs; the first restart starts at ``U = V = I``.
    """
    if not M.is_real:
        raise NonRealInputError("probe_real_decomposition needs real A, X, B")
    if M.n != M.m:
        raise UnequalBlockSizesError(f"blocks must have equal size, got n={M.n}, m={M.m}")
    n, size = M.n, 2 * M.n
    half = (M.A + M.B) / 2
    im_x = skew_part(M.X)
    top, bottom = half + im_x, half - im_x
    target = np.asarray(M.matrix)
    q = size * (size - 1) // 2
    rng = make_rng(seed, "probe-real", n)

    def factors(params, signs):
        U = cayley(_skew_from(params[:q], size))
        V = cayley(_skew_from(params[q:], size))
        # Cayley images lie in SO(2n); a column flip reaches the other component.
        # Only U[:, :n] and V[:, n:] enter the reconstruction.
        U[:, 0] *= signs[0]
        V[:, n] *= signs[1]
        return U, V

    best = None
    residuals = []
    for r in range(restarts):
        start = np.zeros(2 * q) if r == 0 else rng.standard_normal(2 * q)
        for signs in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            def fun(params, signs=signs):
                U, V = factors(params, signs)
                R = reconstruct(U, V, top, bottom) - target
                return np.concatenate([R.real.ravel(), R.imag.ravel()])

            sol = least_squares(fun, start, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                max_nfev=200 * (2 * q + 1))
            res = float(np.linalg.norm(sol.fun))
            residuals.append(res)
            if best is None or res < best[0]:
                best = (res, *factors(sol.x, signs))
    res, U, V = best
    return ProbeResult(res, U, V, top, bottom, residuals, restarts, seed)


def load_record_instance(path: str) -> BlockPsd:
    from .linalg import block_from_json

    with open(path) as fh:
        return block_from_json(json.load(fh)["best_instance"])

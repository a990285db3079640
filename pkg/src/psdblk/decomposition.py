"""Unitary-orbit decompositions of PSD block matrices.

For ``M = [[A, X], [X*, B]] >= 0`` we construct unitaries ``U, V`` with

    M = U diag(A, 0) U* + V diag(0, B) V*

from the square root ``T = M^(1/2)``: writing ``T = [T1 T2]`` by columns,
``M = T T* = T1 T1* + T2 T2*`` while ``T1* T1 = A`` and ``T2* T2 = B``. An
SVD of each column block turns ``Ti Ti*`` into a unitary conjugate of the
corresponding corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .errors import (
    DecompositionResidualExceededError,
    EnvelopeViolationError,
    UnequalBlockSizesError,
)
from .linalg import (
    BlockPsd,
    abs_matrix,
    adjoint,
    direct_sum,
    eigvals_desc,
    hermitian_part,
    matrix_to_json,
    skew_part,
    sqrt_psd,
    unitarity_residual,
    validate_block_psd,
)

RESIDUAL_RTOL = 1e-10


class Mode(Enum):
    REAL_PART = "re"
    IMAGINARY_PART = "im"


@dataclass(frozen=True)
class Decomposition:
    U: np.ndarray
    V: np.ndarray
    top: np.ndarray
    bottom: np.ndarray
    reconstruction_residual: float
    unitarity_residual: float

    def reconstruct(self) -> np.ndarray:
        return reconstruct(self.U, self.V, self.top, self.bottom)

    def to_json(self) -> dict[str, Any]:
        return {
            "U": matrix_to_json(self.U),
            "V": matrix_to_json(self.V),
            "top": matrix_to_json(self.top),
            "bottom": matrix_to_json(self.bottom),
            "reconstruction_residual": self.reconstruction_residual,
            "unitarity_residual": self.unitarity_residual,
        }


def reconstruct(U, V, top, bottom) -> np.ndarray:
    """``U diag(top, 0) U* + V diag(0, bottom) V*``."""
    n, m = top.shape[0], bottom.shape[0]
    U1 = U[:, :n]
    V2 = V[:, n:]
    if V2.shape[1] != m:
        raise UnequalBlockSizesError("payload sizes do not match the unitaries")
    return U1 @ top @ adjoint(U1) + V2 @ bottom @ adjoint(V2)


def _corner_unitary(T_cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unitary ``W`` with ``T_cols T_cols* = W diag(T_cols* T_cols, 0) W*``.

    From the full SVD ``T_cols = P S Q*`` we take ``W = P diag(Q*, I)``.
    """
    k = T_cols.shape[1]
    P, _, Qh = np.linalg.svd(T_cols, full_matrices=True)
    rest = np.eye(P.shape[0] - k, dtype=np.complex128)
    return P @ direct_sum(Qh, rest), Qh


def _finish(M: np.ndarray, U, V, top, bottom, check: bool) -> Decomposition:
    scale = 1.0 + np.linalg.norm(M)
    residual = float(np.linalg.norm(reconstruct(U, V, top, bottom) - M))
    unit = max(unitarity_residual(U), unitarity_residual(V))
    if check and (residual > RESIDUAL_RTOL * scale or unit > RESIDUAL_RTOL):
        raise DecompositionResidualExceededError(
            f"reconstruction residual {residual:.3e} (allowed {RESIDUAL_RTOL * scale:.3e}), "
            f"unitarity residual {unit:.3e}",
            residual,
        )
    for Z in (U, V, top, bottom):
        Z.flags.writeable = False
    return Decomposition(U, V, top, bottom, residual, unit)


def lemma_decompose(M: BlockPsd, check: bool = True) -> Decomposition:
    """Decompose ``M`` into ``U diag(A,0) U* + V diag(0,B) V*``.

    Raises :class:`DecompositionResidualExceededError` if the result does not
    reproduce ``M`` to ``1e-10 (1 + ||M||_F)`` and ``check`` is set.
    """
    n, m = M.n, M.m
    full = M.matrix
    T = sqrt_psd(full)
    U, _ = _corner_unitary(T[:, :n])
    W, _ = _corner_unitary(T[:, n:])
    # W places B in the leading corner; the block swap moves it to the trailing one.
    swap = np.concatenate([np.arange(m, m + n), np.arange(m)])
    V = W[:, swap]
    return _finish(full, U, V, M.A.copy(), M.B.copy(), check)


def _congruence(n: int, mode: Mode) -> np.ndarray:
    """Unitary ``K`` such that ``K M K*`` has corners ``(A+B)/2 +- Re X`` (or ``Im X``)."""
    I = np.eye(n)
    K = np.block([[I, I], [-I, I]]).astype(np.complex128) / np.sqrt(2)
    if mode is Mode.IMAGINARY_PART:
        # diag(I, iI) turns the off-diagonal block into -iX, whose real part is Im X.
        K = K @ direct_sum(I.astype(np.complex128), 1j * I)
    return K


def congruence_decompose(M: BlockPsd, mode: Mode | str = Mode.REAL_PART, check: bool = True) -> Decomposition:
    """Decompose ``M`` with payloads ``(A+B)/2 + R`` on top and ``(A+B)/2 - R`` below.

    ``R`` is ``Re X`` for ``mode="re"`` and ``Im X`` for ``mode="im"``. Blocks
    must have equal sizes.
    """
    mode = Mode(mode)
    if M.n != M.m:
        raise UnequalBlockSizesError(f"congruence needs n = m, got n={M.n}, m={M.m}")
    n = M.n
    half = (M.A + M.B) / 2
    R = hermitian_part(M.X) if mode is Mode.REAL_PART else skew_part(M.X)
    top, bottom = half + R, half - R
    K = _congruence(n, mode)
    N = K @ M.matrix @ adjoint(K)
    N = hermitian_part(N)
    rotated = validate_block_psd(top, N[:n, n:], bottom)
    inner = lemma_decompose(rotated, check=False)
    U = adjoint(K) @ inner.U
    V = adjoint(K) @ inner.V
    return _finish(M.matrix, U, V, top, bottom, check)


@dataclass(frozen=True)
class Envelope:
    decomposition: Decomposition
    envelope: np.ndarray
    min_gap: float


ENVELOPE_RTOL = 1e-10


def lowner_envelope(M: BlockPsd, check: bool = True) -> Envelope:
    """Upper bound ``E >= M`` in the Loewner order built from the ``Im X`` decomposition.

    ``E = (U diag(C, 0) U* + V diag(0, C) V*) / 2`` with
    ``C = A + B + |X - X*|``. Returns the smallest eigenvalue of ``E - M``.
    """
    dec = congruence_decompose(M, Mode.IMAGINARY_PART, check=check)
    C = M.A + M.B + abs_matrix(M.X - adjoint(M.X))
    E = reconstruct(dec.U, dec.V, C, C) / 2
    gap = float(eigvals_desc(hermitian_part(E - M.matrix))[-1])
    allowed = -ENVELOPE_RTOL * (1.0 + np.linalg.norm(M.matrix))
    if check and gap < allowed:
        raise EnvelopeViolationError(f"envelope gap {gap:.3e} below {allowed:.3e}", gap)
    return Envelope(dec, E, gap)

"""Dense complex-matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. This module
holds the Hermitian/PSD tolerance policy used everywhere else, the sorted
Hermitian eigensolver, spectral matrix functions, the :class:`BlockPsd`
container and its JSON encoding.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import (
    ConvergenceFailureError,
    DimensionMismatchError,
    InvalidMatrixError,
    NonpositiveExponentError,
    NotHermitianError,
    NotPsdError,
    NotSquareError,
)

HERMITIAN_RTOL = 1e-10
PSD_RTOL = 1e-10


def as_matrix(Z, name: str = "matrix") -> np.ndarray:
    """Return ``Z`` as a finite 2-D ``complex128`` array (copying)."""
    arr = np.array(Z, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidMatrixError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrixError(f"{name} has non-finite entries")
    return arr


def _require_square(Z: np.ndarray, name: str) -> None:
    if Z.shape[0] != Z.shape[1]:
        raise NotSquareError(f"{name} must be square, got shape {Z.shape}")


def adjoint(Z: np.ndarray) -> np.ndarray:
    return Z.conj().T


def hermitian_defect(Z: np.ndarray) -> float:
    """Relative Hermitian defect ``||Z - Z*||_F / (1 + ||Z||_F)``."""
    return float(np.linalg.norm(Z - adjoint(Z)) / (1.0 + np.linalg.norm(Z)))


def is_hermitian(Z: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    Z = np.asarray(Z)
    return Z.shape[0] == Z.shape[1] and hermitian_defect(Z) <= rtol


def hermitian_part(Z: np.ndarray) -> np.ndarray:
    """``Re Z = (Z + Z*) / 2``."""
    return (Z + adjoint(Z)) / 2


def skew_part(Z: np.ndarray) -> np.ndarray:
    """``Im Z = (Z - Z*) / 2i``, itself Hermitian."""
    return (Z - adjoint(Z)) / 2j


def symmetrize(Z, name: str = "matrix", rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Check ``Z`` is Hermitian within ``rtol`` and return ``(Z + Z*)/2``."""
    Z = as_matrix(Z, name)
    _require_square(Z, name)
    defect = hermitian_defect(Z)
    if defect > rtol:
        raise NotHermitianError(
            f"{name} is not Hermitian: relative defect {defect:.3e} > {rtol:.1e}", defect
        )
    return hermitian_part(Z)


def psd_threshold(eigenvalues: np.ndarray, rtol: float = PSD_RTOL) -> float:
    """Clamping threshold ``tau = rtol * (1 + max |lambda|)``."""
    scale = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return rtol * (1.0 + scale)


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues sorted decreasing and matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, f: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
        lam = self.eigenvalues if f is None else f(self.eigenvalues)
        Q = self.eigenvectors
        return (Q * lam) @ adjoint(Q)


def eig_hermitian_desc(Z, rtol: float = HERMITIAN_RTOL) -> SpectralData:
    """Eigendecomposition of a Hermitian matrix with eigenvalues in decreasing order."""
    H = symmetrize(Z, rtol=rtol)
    try:
        lam, Q = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailureError(f"Hermitian eigensolver failed: {exc}") from exc
    lam = lam[::-1].copy()
    Q = Q[:, ::-1].copy()
    lam.flags.writeable = False
    Q.flags.writeable = False
    return SpectralData(lam, Q)


def eigvals_desc(Z) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, decreasing. No eigenvectors."""
    H = symmetrize(Z)
    try:
        return np.linalg.eigvalsh(H)[::-1]
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailureError(f"Hermitian eigensolver failed: {exc}") from exc


def _check_psd(lam: np.ndarray, name: str, rtol: float) -> np.ndarray:
    """Raise unless ``min(lam) >= -tau``; return ``lam`` clamped at zero."""
    tau = psd_threshold(lam, rtol)
    low = float(np.min(lam))
    if low < -tau:
        raise NotPsdError(f"{name} is not PSD: smallest eigenvalue {low:.6e} < -{tau:.3e}", low, -tau)
    return np.clip(lam, 0.0, None)


def _psd_spectrum(Z, name: str, rtol: float) -> SpectralData:
    spec = eig_hermitian_desc(Z)
    return SpectralData(_check_psd(spec.eigenvalues, name, rtol), spec.eigenvectors)


def psd_eigvals(Z, name: str = "matrix", rtol: float = PSD_RTOL) -> np.ndarray:
    """Eigenvalues of a PSD matrix, decreasing, with ``[-tau, 0)`` clamped to 0."""
    return _check_psd(eigvals_desc(Z), name, rtol)


def sqrt_psd(Z, rtol: float = PSD_RTOL) -> np.ndarray:
    """Principal square root of a PSD matrix; eigenvalues in ``[-tau, 0)`` are clamped."""
    return _psd_spectrum(Z, "matrix", rtol).reconstruct(np.sqrt)


def matrix_power_psd(Z, p: float, rtol: float = PSD_RTOL) -> np.ndarray:
    """Spectral power ``Z**p`` for PSD ``Z`` and ``p > 0``."""
    if not p > 0:
        raise NonpositiveExponentError(f"exponent must be positive, got {p}")
    return _psd_spectrum(Z, "matrix", rtol).reconstruct(lambda lam: lam**p)


def psd_function(Z, f: Callable[[np.ndarray], np.ndarray], rtol: float = PSD_RTOL) -> np.ndarray:
    """Apply a scalar function ``f`` on ``[0, inf)`` spectrally."""
    return _psd_spectrum(Z, "matrix", rtol).reconstruct(f)


def abs_matrix(Z) -> np.ndarray:
    """``|Z| = (Z* Z)^(1/2)``."""
    Z = as_matrix(Z)
    return sqrt_psd(hermitian_part(adjoint(Z) @ Z))


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.result_type(*blocks))
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def pad_to(Z: np.ndarray, size: int) -> np.ndarray:
    """Embed a square matrix as ``Z (+) 0`` of the given total size."""
    k = Z.shape[0]
    if k == size:
        return Z
    return direct_sum(Z, np.zeros((size - k, size - k), dtype=Z.dtype))


def unitarity_residual(U: np.ndarray) -> float:
    """``||U* U - I||_F``."""
    return float(np.linalg.norm(adjoint(U) @ U - np.eye(U.shape[1])))


# --------------------------------------------------------------------------
# Block PSD container


@dataclass(frozen=True, eq=False)
class BlockPsd:
    """A PSD matrix ``[[A, X], [X*, B]]`` stored by its blocks.

    Build instances through :func:`validate_block_psd`; the constructor does
    not check anything.
    """

    A: np.ndarray
    X: np.ndarray
    B: np.ndarray
    provenance: dict[str, Any] | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def matrix(self) -> np.ndarray:
        M = np.block([[self.A, self.X], [adjoint(self.X), self.B]])
        M.flags.writeable = False
        return M

    @property
    def is_real(self) -> bool:
        return all(not np.any(Z.imag) for Z in (self.A, self.X, self.B))

    def __eq__(self, other):
        if not isinstance(other, BlockPsd):
            return NotImplemented
        return all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in ((self.A, other.A), (self.X, other.X), (self.B, other.B))
        )

    __hash__ = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "n": self.n,
            "m": self.m,
            "A": matrix_to_json(self.A),
            "X": matrix_to_json(self.X),
            "B": matrix_to_json(self.B),
        }
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    def fingerprint(self) -> str:
        """Hash of the canonical JSON of the blocks (provenance excluded)."""
        payload = {k: v for k, v in self.to_json().items() if k != "provenance"}
        return hashlib.sha256(dumps(payload).encode()).hexdigest()[:16]


def validate_block_psd(A, X, B, tol: float = PSD_RTOL, provenance=None) -> BlockPsd:
    """Validate blocks and return a :class:`BlockPsd`.

    ``A`` and ``B`` are symmetrized when Hermitian within tolerance. The
    assembled matrix must have smallest eigenvalue at least
    ``-tol * (1 + max |lambda|)``.
    """
    A = as_matrix(A, "A")
    X = as_matrix(X, "X")
    B = as_matrix(B, "B")
    n, m = A.shape[0], B.shape[0]
    if A.shape != (n, n) or B.shape != (m, m) or X.shape != (n, m):
        raise DimensionMismatchError(
            f"block shapes do not conform: A {A.shape}, X {X.shape}, B {B.shape}"
        )
    A = symmetrize(A, "A")
    B = symmetrize(B, "B")
    lam = np.linalg.eigvalsh(np.block([[A, X], [adjoint(X), B]]))
    tau = psd_threshold(lam, tol)
    if lam[0] < -tau:
        raise NotPsdError(
            f"block matrix is not PSD: smallest eigenvalue {lam[0]:.6e} < -{tau:.3e}",
            float(lam[0]),
            -tau,
        )
    for Z in (A, X, B):
        Z.flags.writeable = False
    return BlockPsd(A, X, B, provenance)


# --------------------------------------------------------------------------
# JSON


def matrix_to_json(Z: np.ndarray) -> dict[str, Any]:
    Z = np.asarray(Z, dtype=np.complex128)
    return {
        "rows": int(Z.shape[0]),
        "cols": int(Z.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in Z.ravel()],
    }


def matrix_from_json(obj: dict[str, Any]) -> np.ndarray:
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if len(data) != rows * cols:
        raise DimensionMismatchError(f"expected {rows * cols} entries, got {len(data)}")
    arr = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_matrix(arr.reshape(rows, cols))


def block_from_json(obj: dict[str, Any], tol: float = PSD_RTOL) -> BlockPsd:
    M = validate_block_psd(
        matrix_from_json(obj["A"]),
        matrix_from_json(obj["X"]),
        matrix_from_json(obj["B"]),
        tol=tol,
        provenance=obj.get("provenance"),
    )
    if (M.n, M.m) != (obj.get("n", M.n), obj.get("m", M.m)):
        raise DimensionMismatchError("declared n, m disagree with block shapes")
    return M


def dumps(obj: Any, **kwargs) -> str:
    """Canonical JSON: insertion-ordered keys, shortest round-trip floats."""
    return json.dumps(obj, allow_nan=False, **kwargs)

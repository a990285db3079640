"""Symmetric norms, numerical range tests and weak majorization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInputError, InvalidNormParameterError, NotSquareError
from .linalg import as_matrix, hermitian_part, skew_part

GRID_SIZE = 1024
ANGLE_RESOLUTION = 1e-12
RANGE_TOL = 1e-8
MAJORIZATION_RTOL = 1e-10
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class NormKind:
    """A symmetric norm: ``op``, ``tr``, ``fro``, ``s`` (Schatten-p) or ``kf`` (Ky Fan-k)."""

    tag: str
    param: float | int | None = None

    def __post_init__(self):
        if self.tag not in ("op", "tr", "fro", "s", "kf"):
            raise InvalidNormParameterError(f"unknown norm tag {self.tag!r}")
        if self.tag == "s" and not (self.param is not None and self.param >= 1):
            raise InvalidNormParameterError(f"Schatten norm needs p >= 1, got {self.param}")
        if self.tag == "kf" and not (isinstance(self.param, int) and self.param >= 1):
            raise InvalidNormParameterError(f"Ky Fan norm needs integer k >= 1, got {self.param}")

    @classmethod
    def operator(cls):
        return cls("op")

    @classmethod
    def trace(cls):
        return cls("tr")

    @classmethod
    def frobenius(cls):
        return cls("fro")

    @classmethod
    def schatten(cls, p: float):
        return cls("s", float(p))

    @classmethod
    def ky_fan(cls, k: int):
        return cls("kf", int(k))

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        text = text.strip()
        if text in ("op", "tr", "fro"):
            return cls(text)
        head, _, arg = text.partition(":")
        try:
            if head == "s":
                return cls.schatten(float(arg))
            if head == "kf":
                return cls.ky_fan(int(arg))
        except ValueError:
            pass
        raise InvalidNormParameterError(f"cannot parse norm code {text!r}")

    def __str__(self) -> str:
        if self.tag == "s":
            return f"s:{self.param:g}"
        if self.tag == "kf":
            return f"kf:{self.param}"
        return self.tag


def singular_values(Z) -> np.ndarray:
    """Singular values in decreasing order."""
    return np.linalg.svd(as_matrix(Z), compute_uv=False)


def norm_from_singular_values(sigma: np.ndarray, kind: NormKind) -> float:
    """Evaluate ``kind`` on a decreasing vector of singular values."""
    if kind.tag == "op":
        return float(sigma[0])
    if kind.tag == "tr":
        return float(np.sum(sigma))
    if kind.tag == "fro":
        return float(np.linalg.norm(sigma))
    if kind.tag == "s":
        p = kind.param
        top = sigma[0]
        if top == 0:
            return 0.0
        return float(top * np.sum((sigma / top) ** p) ** (1.0 / p))
    k = kind.param
    if k > len(sigma):
        raise InvalidNormParameterError(f"Ky Fan k={k} exceeds dimension {len(sigma)}")
    return float(np.sum(sigma[:k]))


def sym_norm(Z, kind: NormKind) -> float:
    """Unitarily invariant norm of a (possibly rectangular) matrix."""
    sigma = singular_values(Z)
    if kind.tag == "kf" and kind.param > min(np.shape(Z)):
        raise InvalidNormParameterError(
            f"Ky Fan k={kind.param} out of range for shape {np.shape(Z)}"
        )
    return norm_from_singular_values(sigma, kind)


def default_battery(dim: int) -> list[NormKind]:
    """Operator, trace, Frobenius, Schatten 1.5 and 3, and every Ky Fan norm up to ``dim``."""
    kinds = [NormKind.operator(), NormKind.trace(), NormKind.frobenius(),
             NormKind.schatten(1.5), NormKind.schatten(3)]
    kinds += [NormKind.ky_fan(k) for k in range(1, dim + 1)]
    return kinds


def parse_battery(text: str | None, dim: int) -> list[NormKind]:
    """Parse ``"op,tr,s:1.5,kf:*"``; ``kf:*`` expands to every k up to ``dim``.

    ``None`` gives :func:`default_battery`.
    """
    if text is None:
        return default_battery(dim)
    kinds: list[NormKind] = []
    for item in text.split(","):
        item = item.strip()
        if item == "kf:*":
            kinds += [NormKind.ky_fan(k) for k in range(1, dim + 1)]
        elif item:
            kind = NormKind.parse(item)
            if kind.tag != "kf" or kind.param <= dim:
                kinds.append(kind)
    if not kinds:
        raise InvalidNormParameterError("empty norm battery")
    return kinds


# --------------------------------------------------------------------------
# Numerical range


def _rotated_hermitian_parts(X: np.ndarray, angles: np.ndarray) -> np.ndarray:
    # Re(e^{it} X) = cos(t) Re X - sin(t) Im X; both parts are exactly Hermitian
    H, K = hermitian_part(X), skew_part(X)
    return np.cos(angles)[:, None, None] * H - np.sin(angles)[:, None, None] * K


def _golden_max(f, lo: float, hi: float, resolution: float = ANGLE_RESOLUTION):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(argmax, max)``."""
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > resolution:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _refine(H, K, grid_values: np.ndarray, index: int) -> tuple[float, float]:
    """Golden-section refinement around a grid maximum; ``index`` picks the eigenvalue."""
    j = int(np.argmax(grid_values))
    step = TWO_PI / GRID_SIZE
    best_t, best_v = j * step, float(grid_values[j])

    def f(t):
        return float(np.linalg.eigvalsh(math.cos(t) * H - math.sin(t) * K)[index])

    t, v = _golden_max(f, best_t - step, best_t + step)
    if v > best_v:
        best_t, best_v = t % TWO_PI, v
    return best_v, best_t


def _angle_scan(X: np.ndarray):
    H, K = hermitian_part(X), skew_part(X)
    half = np.arange(GRID_SIZE // 2) * (TWO_PI / GRID_SIZE)
    lam = np.linalg.eigvalsh(_rotated_hermitian_parts(X, half))
    # Re(e^{i(t+pi)} X) = -Re(e^{it} X): the second half of the grid is free
    return H, K, np.concatenate([lam, -lam[:, ::-1]])


def _square(X, name="X") -> np.ndarray:
    X = as_matrix(X, name)
    if X.shape[0] != X.shape[1]:
        raise NotSquareError(f"{name} must be square, got shape {X.shape}")
    return X


def numerical_radius(X) -> tuple[float, float]:
    """Numerical radius ``w(X) = max_t lambda_max(Re(e^{it} X))`` and a maximizing angle."""
    H, K, lam = _angle_scan(_square(X))
    return _refine(H, K, lam[:, -1], -1)


class RangeVerdict(Enum):
    ZERO_OUTSIDE_RANGE = "zero_outside_range"
    ZERO_OUTSIDE_RELATIVE_INTERIOR_ONLY = "zero_outside_relative_interior_only"
    ZERO_INSIDE = "zero_inside"


@dataclass(frozen=True)
class RangePosition:
    verdict: RangeVerdict
    separating_angle: float | None
    certificate_eigenvalue: float


def classify_zero_vs_range(X, tol: float = RANGE_TOL) -> RangePosition:
    """Locate 0 relative to the numerical range ``W(X)``.

    Uses ``g = max_t lambda_min(Re(e^{it} X))``: ``g > tol`` means some rotation
    of ``X`` is strictly accretive (0 outside ``W(X)``), ``|g| <= tol`` means a
    rotation is accretive with 0 on the boundary, ``g < -tol`` means 0 is
    interior.
    """
    H, K, lam = _angle_scan(_square(X))
    return _verdict(*_refine(H, K, lam[:, 0], 0), tol)


def range_profile(X, tol: float = RANGE_TOL) -> tuple[float, RangePosition]:
    """``(numerical_radius(X)[0], classify_zero_vs_range(X))`` from a single angle scan."""
    H, K, lam = _angle_scan(_square(X))
    w, _ = _refine(H, K, lam[:, -1], -1)
    return w, _verdict(*_refine(H, K, lam[:, 0], 0), tol)


def _verdict(g: float, t: float, tol: float) -> RangePosition:
    if g > tol:
        return RangePosition(RangeVerdict.ZERO_OUTSIDE_RANGE, t, g)
    if g >= -tol:
        return RangePosition(RangeVerdict.ZERO_OUTSIDE_RELATIVE_INTERIOR_ONLY, t, g)
    return RangePosition(RangeVerdict.ZERO_INSIDE, None, g)


# --------------------------------------------------------------------------
# Majorization


@dataclass(frozen=True)
class MajorizationResult:
    holds: bool
    worst_k: int
    worst_gap: float
    lower_prefix: float
    upper_prefix: float

    def __iter__(self):
        return iter((self.holds, self.worst_k, self.worst_gap))


def _prefix_sums(upper, lower) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(list(upper), dtype=float)
    l = np.asarray(list(lower), dtype=float)
    if len(u) == 0 or len(l) == 0:
        raise EmptyInputError("majorization needs non-empty sequences")
    size = max(len(u), len(l))
    u = np.sort(np.pad(u, (0, size - len(u))))[::-1]
    l = np.sort(np.pad(l, (0, size - len(l))))[::-1]
    return np.cumsum(u), np.cumsum(l)


def weak_majorizes(upper: Iterable[float], lower: Iterable[float],
                   rtol: float = MAJORIZATION_RTOL) -> MajorizationResult:
    """Check ``lower`` is weakly majorized by ``upper``.

    Both sequences are zero-padded to equal length and sorted decreasing.
    ``worst_k`` (1-based) maximizes ``prefix(lower) - prefix(upper)``; a
    positive ``worst_gap`` is a violation.
    """
    pu, pl = _prefix_sums(upper, lower)
    gaps = pl - pu
    j = int(np.argmax(gaps))
    allowed = rtol * (1.0 + abs(pu[-1]))
    return MajorizationResult(bool(np.all(gaps <= allowed)), j + 1, float(gaps[j]),
                              float(pl[j]), float(pu[j]))


def ky_fan_gaps(upper: Sequence[float], lower: Sequence[float]) -> np.ndarray:
    """``prefix(lower, k) - prefix(upper, k)`` for every k."""
    pu, pl = _prefix_sums(upper, lower)
    return pl - pu

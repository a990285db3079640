"""Seeded random instances and the exact equality fixture.

Randomness comes from a Philox counter-based bit generator. Independent
streams are derived from ``(seed, label, index...)`` through
``numpy.random.SeedSequence`` spawn keys, so a trial's instance depends only
on its own coordinates and never on scheduling.
"""

from __future__ import annotations

import hashlib
from enum import Enum

import numpy as np

from .errors import UnsupportedModeDimensionsError
from .linalg import BlockPsd, adjoint, validate_block_psd

GENERATOR_VERSION = "psdblk-gen/1"
INTERIOR_MARGIN = 0.1


class GeneratorMode(Enum):
    UNCONSTRAINED = "any"
    HERMITIAN_X = "hermitian"
    NORMAL_X = "normal"
    ACCRETIVE_X = "accretive"
    ZERO_OUTSIDE_RANGE_X = "range-sep"
    REAL_ENTRIES = "real"


_SQUARE_ONLY = {
    GeneratorMode.HERMITIAN_X,
    GeneratorMode.NORMAL_X,
    GeneratorMode.ACCRETIVE_X,
    GeneratorMode.ZERO_OUTSIDE_RANGE_X,
}


def _label_key(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label)
    digest = hashlib.blake2b(str(label).encode(), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int, *labels) -> np.random.Generator:
    """Philox stream for ``seed`` split by ``labels`` (strings or non-negative ints)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_label_key(x) for x in labels))
    return np.random.Generator(np.random.Philox(ss))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian entries, ``E|z|^2 = 1``."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian."""
    Q, R = np.linalg.qr(complex_gaussian(rng, (n, n)))
    d = np.diagonal(R)
    phases = np.where(d == 0, 1.0, d / np.abs(d))
    return Q * phases


def random_psd(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    G = rng.standard_normal((n, n)) if real else complex_gaussian(rng, (n, n))
    return G @ adjoint(G)


def random_hermitian(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    G = rng.standard_normal((n, n)) if real else complex_gaussian(rng, (n, n))
    return (G + adjoint(G)) / 2


def shift_to_psd(A: np.ndarray, X: np.ndarray, B: np.ndarray, margin: float, exact: bool = False):
    """Add ``(margin - lambda_min) I`` to both corners when ``lambda_min < margin``.

    ``X`` is untouched; the assembled matrix ends with smallest eigenvalue
    ``margin`` (up to rounding). With ``exact`` the shift is applied even when
    it is negative, so the result lands on ``lambda_min = margin``.
    """
    lam_min = np.linalg.eigvalsh(np.block([[A, X], [adjoint(X), B]]))[0]
    if lam_min < margin or exact:
        shift = margin - lam_min
        A = A + shift * np.eye(A.shape[0])
        B = B + shift * np.eye(B.shape[0])
    return A, B


def _draw(rng, n: int, m: int, mode: GeneratorMode, margin: float, boundary: bool):
    if mode is GeneratorMode.UNCONSTRAINED or mode is GeneratorMode.REAL_ENTRIES:
        real = mode is GeneratorMode.REAL_ENTRIES
        size = n + m
        rows = max(1, size // 2) if boundary else size
        G = rng.standard_normal((rows, size)) if real else complex_gaussian(rng, (rows, size))
        M = adjoint(G) @ G
        return M[:n, :n], M[:n, n:], M[n:, n:]

    A = random_psd(rng, n)
    B = random_psd(rng, m)
    if mode is GeneratorMode.HERMITIAN_X:
        X = random_hermitian(rng, n)
    elif mode is GeneratorMode.NORMAL_X:
        W = haar_unitary(rng, n)
        X = (W * complex_gaussian(rng, n)) @ adjoint(W)
    elif mode is GeneratorMode.ACCRETIVE_X:
        # Re(P + iH) = P exactly when H is exactly Hermitian
        X = random_psd(rng, n) + 1j * random_hermitian(rng, n)
    else:
        K = complex_gaussian(rng, (n, n))
        c = np.linalg.norm(K, 2) + 0.1 + rng.uniform()
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        X = phase * (c * np.eye(n) + K)
    A, B = shift_to_psd(A, X, B, margin, exact=boundary)
    return A, X, B


def random_block_psd(
    n: int,
    m: int,
    mode: GeneratorMode | str = GeneratorMode.UNCONSTRAINED,
    seed: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    boundary: bool = False,
) -> BlockPsd:
    """Draw a random PSD block matrix satisfying the structural constraint of ``mode``.

    Either ``seed`` or ``rng`` must be given. With ``boundary=True`` the
    diagonal shift uses margin 0 (and unconstrained Gram matrices are
    rank-deficient), so instances sit on the PSD boundary.
    """
    mode = GeneratorMode(mode)
    if mode in _SQUARE_ONLY and n != m:
        raise UnsupportedModeDimensionsError(f"mode {mode.value!r} needs n = m, got {n}x{m}")
    if rng is None:
        if seed is None:
            raise ValueError("pass either seed or rng")
        rng = make_rng(seed, "block", mode.value, n, m, int(boundary))
    margin = 0.0 if boundary else INTERIOR_MARGIN
    A, X, B = _draw(rng, n, m, mode, margin, boundary)
    provenance = {
        "mode": mode.value,
        "seed": seed,
        "dims": [n, m],
        "boundary": boundary,
        "generator": GENERATOR_VERSION,
    }
    return validate_block_psd(A, X, B, provenance=provenance)


def example_equality() -> BlockPsd:
    """The 2+2 instance with ``A = e11``, ``B = e22``, ``X = e12``.

    Its assembled matrix is rank one with spectrum ``(2, 0, 0, 0)``; it
    attains equality in ``||M|| <= ||A+B|| + 2 w(X)`` and shows the Hermitian
    hypothesis on ``X`` cannot be dropped.
    """
    A = [[1, 0], [0, 0]]
    B = [[0, 0], [0, 1]]
    X = [[0, 1], [0, 0]]
    return validate_block_psd(A, X, B, provenance={"fixture": "example_equality"})

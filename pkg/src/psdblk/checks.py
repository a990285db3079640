"""Verifiers for the symmetric-norm inequalities on PSD block matrices.

Each verifier computes both sides of one inequality for every norm in a
battery and returns :class:`CheckReport` rows. All norms involved are
unitarily invariant, so they are evaluated on singular values; matrices of
different sizes are compared through zero padding (``Z`` is identified with
``Z (+) 0``). Where the inequality is a consequence of a weak majorization, an
extra ``wmaj`` row records the worst Ky Fan prefix comparison.

Instances that fail a hypothesis are still evaluated: their rows carry
``precondition_met=False`` and pass vacuously, but ``holds`` and ``margin``
show what actually happened.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ExponentBelowOneError,
    NonpositiveExponentError,
    UnequalBlockSizesError,
    UnknownFunctionTagError,
)
from .linalg import (
    BlockPsd,
    adjoint,
    dumps,
    eigvals_desc,
    hermitian_part,
    is_hermitian,
    matrix_to_json,
    psd_eigvals,
    psd_threshold,
    symmetrize,
)
from .norms import (
    NormKind,
    RangeVerdict,
    default_battery,
    norm_from_singular_values,
    range_profile,
    singular_values,
    weak_majorizes,
)

CHECK_RTOL = 1e-9


@dataclass(frozen=True)
class CheckReport:
    inequality_id: str
    instance_fingerprint: str
    norm_tag: str
    lhs: float
    rhs: float
    margin: float
    holds: bool
    passed: bool
    precondition_met: bool

    def to_json(self) -> dict:
        return asdict(self)


def make_report(check_id: str, fingerprint: str, tag: str, lhs: float, rhs: float,
                precondition: bool) -> CheckReport:
    margin = rhs - lhs
    holds = margin >= -CHECK_RTOL * (1.0 + abs(rhs))
    return CheckReport(check_id, fingerprint, tag, float(lhs), float(rhs), float(margin),
                       bool(holds), bool(holds or not precondition), bool(precondition))


def pair_fingerprint(S: np.ndarray, T: np.ndarray) -> str:
    payload = dumps({"S": matrix_to_json(S), "T": matrix_to_json(T)})
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _pad(values: np.ndarray, size: int) -> np.ndarray:
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    return np.pad(v, (0, size - len(v))) if len(v) < size else v


def _battery(battery: Sequence[NormKind] | None, dim: int) -> list[NormKind]:
    if battery is None:
        return default_battery(dim)
    return [k for k in battery if k.tag != "kf" or k.param <= dim]


def _norm_rows(check_id, fp, battery, dim, lhs_sigma, rhs_terms, precondition, kinds=None):
    """One report per norm: ``||lhs|| <= sum(coef * ||sigma||)`` over ``rhs_terms``."""
    lhs_sigma = _pad(lhs_sigma, dim)
    rhs_terms = [(c, _pad(s, dim)) for c, s in rhs_terms]
    rows = []
    for kind in kinds if kinds is not None else _battery(battery, dim):
        lhs = norm_from_singular_values(lhs_sigma, kind)
        rhs = sum(c * norm_from_singular_values(s, kind) for c, s in rhs_terms)
        rows.append(make_report(check_id, fp, str(kind), lhs, rhs, precondition))
    return rows


def _majorization_row(check_id, fp, upper, lower, precondition) -> CheckReport:
    res = weak_majorizes(upper, lower)
    return make_report(check_id, fp, "wmaj", res.lower_prefix, res.upper_prefix, precondition)


def _require_square_blocks(M: BlockPsd) -> None:
    if M.n != M.m:
        raise UnequalBlockSizesError(f"blocks must have equal size, got n={M.n}, m={M.m}")


# --------------------------------------------------------------------------
# Block-matrix inequalities


def check_lw(M: BlockPsd, battery=None, check_id: str = "lw") -> list[CheckReport]:
    """``||M|| <= ||A + B||`` when ``X`` is Hermitian, plus the Ky Fan majorization."""
    _require_square_blocks(M)
    fp = M.fingerprint()
    precondition = is_hermitian(M.X)
    lam_m = psd_eigvals(M.matrix)
    lam_ab = psd_eigvals(M.A + M.B)
    rows = _norm_rows(check_id, fp, battery, M.size, lam_m, [(1.0, lam_ab)], precondition)
    rows.append(_majorization_row(check_id, fp, lam_ab, lam_m, precondition))
    return rows


def check_cor_p(M: BlockPsd, p: float, battery=None, check_id: str | None = None) -> list[CheckReport]:
    """``||M^p|| <= 2^|p-1| (||(A+B)^p|| + || |X - X*|^p ||)`` for ``p > 0``."""
    if not p > 0:
        raise NonpositiveExponentError(f"exponent must be positive, got {p}")
    _require_square_blocks(M)
    check_id = check_id or f"cor_p[p={p:g}]"
    lhs_sigma = psd_eigvals(M.matrix) ** p
    ab_sigma = psd_eigvals(M.A + M.B) ** p
    # singular values of |Z|^p are those of Z raised to p
    skew_sigma = singular_values(M.X - adjoint(M.X)) ** p
    factor = 2.0 ** abs(p - 1)
    return _norm_rows(check_id, M.fingerprint(), battery, M.size, lhs_sigma,
                      [(factor, ab_sigma), (factor, skew_sigma)], True)


def is_accretive(X: np.ndarray) -> bool:
    """``Re X`` is PSD up to the usual clamping threshold."""
    lam = np.linalg.eigvalsh(hermitian_part(X))
    return bool(lam[0] >= -psd_threshold(lam))


def check_accretive(M: BlockPsd, battery=None, check_id: str = "accretive") -> list[CheckReport]:
    """``||M|| <= ||A + B|| + ||Re X||`` for accretive ``X``.

    The ``wmaj`` row checks the stronger statement that the eigenvalues of
    ``M`` are weakly majorized by ``lambda(A+B) + lambda(Re X)`` (both sorted
    decreasing, added entrywise).
    """
    _require_square_blocks(M)
    fp = M.fingerprint()
    re_x = hermitian_part(M.X)
    precondition = is_accretive(M.X)
    lam_m = psd_eigvals(M.matrix)
    lam_ab = psd_eigvals(M.A + M.B)
    rows = _norm_rows(check_id, fp, battery, M.size, lam_m,
                      [(1.0, lam_ab), (1.0, singular_values(re_x))], precondition)
    upper = lam_ab + eigvals_desc(re_x)
    rows.append(_majorization_row(check_id, fp, upper, lam_m, precondition))
    return rows


class RangeMode(Enum):
    FULL_RANGE = "full"
    RELATIVE_INTERIOR = "relint"
    UNCONDITIONAL_2W = "2w"


def check_range_modes(M: BlockPsd, mode: RangeMode | str, battery=None,
                      check_id: str | None = None) -> list[CheckReport]:
    """Bounds driven by the numerical range of ``X``.

    ``full``: ``||M|| <= ||A+B|| + ||X||`` for every battery norm when 0 is
    outside ``W(X)``. ``relint``: ``||M||_op <= ||A+B||_op + w(X)`` unless 0
    is interior to ``W(X)``. ``2w``: ``||M||_op <= ||A+B||_op + 2 w(X)``
    unconditionally.
    """
    mode = RangeMode(mode)
    _require_square_blocks(M)
    check_id = check_id or f"range[{mode.value}]"
    fp = M.fingerprint()
    w, position = range_profile(M.X)
    lam_m = psd_eigvals(M.matrix)
    lam_ab = psd_eigvals(M.A + M.B)
    if mode is RangeMode.FULL_RANGE:
        precondition = position.verdict is RangeVerdict.ZERO_OUTSIDE_RANGE
        return _norm_rows(check_id, fp, battery, M.size, lam_m,
                          [(1.0, lam_ab), (1.0, singular_values(M.X))], precondition)
    if mode is RangeMode.RELATIVE_INTERIOR:
        precondition = position.verdict is not RangeVerdict.ZERO_INSIDE
        coef = 1.0
    else:
        precondition = True
        coef = 2.0
    return [make_report(check_id, fp, "op", lam_m[0], lam_ab[0] + coef * w, precondition)]


def check_direct_sum(M: BlockPsd, battery=None, check_id: str = "direct_sum") -> list[CheckReport]:
    """``||M (+) M|| <= 2 ||A (+) B||``, with the underlying majorization."""
    _require_square_blocks(M)
    fp = M.fingerprint()
    lam_m = psd_eigvals(M.matrix)
    doubled = np.concatenate([lam_m, lam_m])
    lam_ab = np.concatenate([psd_eigvals(M.A), psd_eigvals(M.B)])
    dim = 2 * M.size
    rows = _norm_rows(check_id, fp, battery, dim, doubled, [(2.0, lam_ab)], True)
    rows.append(_majorization_row(check_id, fp, 2.0 * lam_ab, doubled, True))
    return rows


def check_schatten(M: BlockPsd, p: float, check_id: str | None = None) -> CheckReport:
    """``||M||_p <= 2^(1-1/p) (||A||_p^p + ||B||_p^p)^(1/p)`` for ``p >= 1``."""
    if not p >= 1:
        raise ExponentBelowOneError(f"Schatten exponent must be >= 1, got {p}")
    check_id = check_id or f"schatten[p={p:g}]"
    kind = NormKind.schatten(p)
    lhs = norm_from_singular_values(psd_eigvals(M.matrix), kind)
    a = norm_from_singular_values(psd_eigvals(M.A), kind)
    b = norm_from_singular_values(psd_eigvals(M.B), kind)
    # (a^p + b^p)^(1/p) computed as a scaled l^p norm to avoid overflow
    top = max(a, b)
    combined = 0.0 if top == 0 else top * ((a / top) ** p + (b / top) ** p) ** (1.0 / p)
    rhs = 2.0 ** (1.0 - 1.0 / p) * combined
    return make_report(check_id, M.fingerprint(), str(kind), lhs, rhs, True)


# --------------------------------------------------------------------------
# Two-matrix ingredients


def concave_function(tag: str) -> Callable[[np.ndarray], np.ndarray]:
    """Concave ``f`` on ``[0, inf)`` with ``f(0) = 0``: ``pow:<p>`` (0 < p <= 1), ``log1p``, ``frac``."""
    if tag == "log1p":
        return np.log1p
    if tag == "frac":
        return lambda t: t / (1.0 + t)
    head, _, arg = tag.partition(":")
    if head == "pow":
        try:
            p = float(arg)
        except ValueError:
            p = math.nan
        if 0 < p <= 1:
            return lambda t: t**p
    raise UnknownFunctionTagError(f"unknown concave function tag {tag!r}")


def check_subadditivity(S, T, f: str, check_id: str | None = None) -> CheckReport:
    """Eigenvalues of ``f(S+T)`` are weakly majorized by ``lambda(f(S)) + lambda(f(T))``."""
    func = concave_function(f)
    check_id = check_id or f"subadditivity[f={f}]"
    S = symmetrize(S, "S")
    T = symmetrize(T, "T")
    # f is increasing, so f of a decreasing spectrum stays decreasing
    lower = func(psd_eigvals(S + T))
    upper = func(psd_eigvals(S)) + func(psd_eigvals(T))
    return _majorization_row(check_id, pair_fingerprint(S, T), upper, lower, True)


def check_elem1(S, T, p: float, battery=None, check_id: str | None = None) -> list[CheckReport]:
    """``||((S+T)/2)^p|| <= (||S^p|| + ||T^p||) / 2`` for ``p >= 1``."""
    if not p >= 1:
        raise ExponentBelowOneError(f"exponent must be >= 1, got {p}")
    check_id = check_id or f"elem1[p={p:g}]"
    S = symmetrize(S, "S")
    T = symmetrize(T, "T")
    lhs = psd_eigvals((S + T) / 2) ** p
    rows = _norm_rows(check_id, pair_fingerprint(S, T), battery, S.shape[0], lhs,
                      [(0.5, psd_eigvals(S) ** p), (0.5, psd_eigvals(T) ** p)], True)
    return rows

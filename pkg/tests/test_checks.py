import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psdblk.checks import (
    CHECK_RTOL,
    RangeMode,
    check_accretive,
    check_cor_p,
    check_direct_sum,
    check_elem1,
    check_lw,
    check_range_modes,
    check_schatten,
    check_subadditivity,
    concave_function,
    make_report,
)
from psdblk.errors import (
    ExponentBelowOneError,
    NonpositiveExponentError,
    NotPsdError,
    UnequalBlockSizesError,
    UnknownFunctionTagError,
)
from psdblk.generators import random_block_psd
from psdblk.linalg import validate_block_psd
from psdblk.norms import NormKind

from conftest import random_psd

I2 = np.eye(2)
Z2 = np.zeros((2, 2))
OP = [NormKind.operator()]
TR = [NormKind.trace()]


def by_tag(reports):
    return {r.norm_tag: r for r in reports}


def all_pass(reports):
    return all(r.passed and r.holds for r in reports)


def test_report_tolerance():
    assert make_report("t", "f", "op", 1.0 + 0.5e-9, 1.0, True).passed
    assert not make_report("t", "f", "op", 1.0 + 3e-9, 1.0, True).passed
    vacuous = make_report("t", "f", "op", 5.0, 1.0, False)
    assert vacuous.passed and not vacuous.holds and vacuous.lhs == 5.0
    assert CHECK_RTOL == 1e-9


def test_lw_identity_blocks():
    rows = by_tag(check_lw(validate_block_psd(I2, Z2, I2)))
    for k, (lhs, rhs) in enumerate([(1, 2), (2, 4), (3, 4), (4, 4)], start=1):
        assert rows[f"kf:{k}"].lhs == pytest.approx(lhs)
        assert rows[f"kf:{k}"].rhs == pytest.approx(rhs)
    assert all_pass(rows.values())


def test_lw_example_records_violation(example):
    rows = by_tag(check_lw(example))
    kf1 = rows["kf:1"]
    assert not kf1.precondition_met and kf1.passed and not kf1.holds
    assert kf1.margin == pytest.approx(-1.0, abs=1e-14)
    assert rows["wmaj"].margin == pytest.approx(-1.0, abs=1e-14)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.booleans())
def test_lw_hermitian_property(seed, n, boundary):
    rows = check_lw(random_block_psd(n, n, "hermitian", seed, boundary=boundary))
    assert all(r.precondition_met for r in rows) and all_pass(rows)


def test_lw_without_precondition_records_violations():
    raw = sum(not r.holds for s in range(1000) for r in check_lw(random_block_psd(2, 2, "any", s), OP))
    assert raw > 0


@given(st.integers(0, 2**32 - 1))
def test_lw_zero_x_matches_basic_inequality(seed):
    rng = np.random.default_rng(seed)
    A, B = random_psd(rng, 3), random_psd(rng, 3)
    M = validate_block_psd(A, np.zeros((3, 3)), B)
    lam_m = np.sort(np.linalg.eigvalsh(M.matrix))[::-1]
    lam_ab = np.sort(np.concatenate([np.linalg.eigvalsh(A + B), np.zeros(3)]))[::-1]
    rows = by_tag(check_lw(M))
    for k in range(1, 7):
        direct = lam_ab[:k].sum() - lam_m[:k].sum()
        assert rows[f"kf:{k}"].margin == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("p, value", [(1, 2.0), (2, 4.0), (3, 8.0)])
def test_cor_p_example_operator_equality(example, p, value):
    (row,) = check_cor_p(example, p, OP)
    assert row.lhs == pytest.approx(value, abs=1e-12)
    assert row.rhs == pytest.approx(value, abs=1e-12)
    assert row.passed


def test_cor_p_half_trace_equality():
    D = np.diag([1.0, 2.0])
    (row,) = check_cor_p(validate_block_psd(D, Z2, D), 0.5, TR)
    expected = 2 + 2 * math.sqrt(2)
    # trace of diag(1,2,1,2)^(1/2)
    assert row.lhs == pytest.approx(2 * (1 + math.sqrt(2)), abs=1e-12)
    assert row.rhs == pytest.approx(expected, abs=1e-12)
    assert abs(row.margin) <= 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_cor_p_schatten_three(seed, n):
    (row,) = check_cor_p(random_block_psd(n, n, "any", seed), 3, [NormKind.schatten(3)])
    assert row.passed and row.holds


@given(st.integers(0, 2**32 - 1))
def test_cor_p_one_is_triangle_bound(seed):
    M = random_block_psd(3, 3, "any", seed)
    rows = by_tag(check_cor_p(M, 1))
    direct = np.linalg.norm(M.A + M.B, 2) + np.linalg.norm(M.X - M.X.conj().T, 2)
    assert rows["op"].rhs == pytest.approx(direct, rel=1e-12)
    assert rows["op"].lhs <= direct + 1e-9


def test_cor_p_rejects_nonpositive(example):
    with pytest.raises(NonpositiveExponentError):
        check_cor_p(example, 0)


def test_subadditivity_trivial_cases(rng):
    S = random_psd(rng, 3)
    zero = check_subadditivity(S, np.zeros((3, 3)), "pow:0.5")
    assert abs(zero.margin) <= 1e-12 * (1 + zero.rhs)
    ident = check_subadditivity(np.eye(3), np.eye(3), "pow:0.5")
    # gaps k (sqrt(2) - 2) are least negative at k = 1
    assert ident.lhs == pytest.approx(math.sqrt(2)) and ident.rhs == pytest.approx(2.0)
    assert ident.holds


@given(st.integers(0, 2**32 - 1), st.sampled_from(["pow:0.5", "pow:0.25", "log1p", "frac"]))
def test_subadditivity_property(seed, tag):
    rng = np.random.default_rng(seed)
    row = check_subadditivity(random_psd(rng, 6), random_psd(rng, 6), tag)
    assert row.passed and row.holds


def test_subadditivity_errors():
    with pytest.raises(UnknownFunctionTagError):
        concave_function("pow:2")
    with pytest.raises(UnknownFunctionTagError):
        concave_function("exp")
    with pytest.raises(NotPsdError):
        check_subadditivity(np.diag([1.0, -1.0]), np.eye(2), "frac")


def test_elem1_equal_pair(rng):
    S = random_psd(rng, 3)
    assert all(abs(r.margin) <= 1e-9 * (1 + r.rhs) for r in check_elem1(S, S, 2.5))


def test_elem1_disjoint_diagonals():
    (row,) = check_elem1(np.diag([2.0, 0.0]), np.diag([0.0, 2.0]), 2, TR)
    assert row.lhs == pytest.approx(2.0) and row.rhs == pytest.approx(4.0)


@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 1.5, 3.0]))
def test_elem1_property(seed, p):
    rng = np.random.default_rng(seed)
    assert all_pass(check_elem1(random_psd(rng, 4), random_psd(rng, 4), p))


def test_elem1_rejects_small_exponent():
    with pytest.raises(ExponentBelowOneError):
        check_elem1(I2, I2, 0.5)


def test_accretive_identity_blocks():
    rows = by_tag(check_accretive(validate_block_psd(I2, I2, I2)))
    assert rows["op"].lhs == pytest.approx(2.0) and rows["op"].rhs == pytest.approx(3.0)
    assert rows["op"].precondition_met and all_pass(rows.values())


def test_accretive_zero_x_matches_lw():
    M = random_block_psd(3, 3, "any", 0)
    M = validate_block_psd(M.A, np.zeros((3, 3)), M.B)
    a, b = by_tag(check_accretive(M)), by_tag(check_lw(M))
    for tag in b:
        assert a[tag].margin == pytest.approx(b[tag].margin, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_accretive_property(seed, n):
    rows = check_accretive(random_block_psd(n, n, "accretive", seed))
    assert all(r.precondition_met for r in rows) and all_pass(rows)


def test_accretive_flag_off_for_non_accretive(example):
    assert not any(r.precondition_met for r in check_accretive(example))


def test_range_2w_example_equality(example):
    (row,) = check_range_modes(example, "2w")
    assert row.lhs == pytest.approx(2.0, abs=1e-12) and row.rhs == pytest.approx(2.0, abs=1e-12)
    assert row.passed


def test_range_full_identity():
    rows = by_tag(check_range_modes(validate_block_psd(I2, I2, I2), RangeMode.FULL_RANGE))
    assert rows["op"].precondition_met
    assert rows["op"].lhs == pytest.approx(2.0) and rows["op"].rhs == pytest.approx(3.0)


def test_range_relint_interior_flag():
    X = np.array([[0.0, 1.0], [0.0, 0.0]])
    M = validate_block_psd(2 * I2, X, 2 * I2)
    (row,) = check_range_modes(M, "relint")
    assert not row.precondition_met


@given(st.integers(0, 2**32 - 1), st.sampled_from(["range-sep", "hermitian", "any"]))
def test_range_monotone(seed, mode):
    M = random_block_psd(3, 3, mode, seed)
    (rel,) = check_range_modes(M, "relint")
    (two,) = check_range_modes(M, "2w")
    assert two.rhs >= rel.rhs
    if rel.precondition_met:
        assert rel.passed and rel.holds and two.passed


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_range_full_property(seed, n):
    rows = check_range_modes(random_block_psd(n, n, "range-sep", seed), "full")
    assert all(r.precondition_met for r in rows) and all_pass(rows)


def test_range_unequal_blocks():
    with pytest.raises(UnequalBlockSizesError):
        check_range_modes(random_block_psd(2, 3, "any", 0), "2w")


def test_direct_sum_zero_x(rng):
    A, B = random_psd(rng, 2), random_psd(rng, 2)
    rows = by_tag(check_direct_sum(validate_block_psd(A, Z2, B)))
    trace = np.trace(A + B).real
    # full Ky Fan sum is an equality; at k = 4 the right side already has the whole factor 2
    assert rows["kf:8"].lhs == pytest.approx(2 * trace) == rows["kf:8"].rhs
    assert rows["kf:4"].rhs == pytest.approx(2 * trace)
    assert all_pass(rows.values())


def test_direct_sum_equal_blocks():
    rows = by_tag(check_direct_sum(validate_block_psd(I2, I2, I2)))
    assert rows["op"].lhs == pytest.approx(2.0) and rows["op"].rhs == pytest.approx(2.0)


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_direct_sum_property(seed, n):
    assert all_pass(check_direct_sum(random_block_psd(n, n, "any", seed)))


def test_schatten_equal_blocks():
    row = check_schatten(validate_block_psd(I2, I2, I2), 2)
    assert row.lhs == pytest.approx(math.sqrt(8)) and row.rhs == pytest.approx(math.sqrt(8))


def test_schatten_zero_x_trace(rng):
    A, B = random_psd(rng, 3), random_psd(rng, 3)
    row = check_schatten(validate_block_psd(A, np.zeros((3, 3)), B), 1)
    assert row.lhs == pytest.approx(np.trace(A + B).real) == row.rhs


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
def test_schatten_property(seed, n, m):
    assert check_schatten(random_block_psd(n, m, "any", seed), 3).passed


def test_schatten_rejects_small_exponent(example):
    with pytest.raises(ExponentBelowOneError):
        check_schatten(example, 0.9)

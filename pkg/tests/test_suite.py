import numpy as np
import pytest

from psdblk.errors import PsdBlkError
from psdblk.linalg import block_from_json, dumps
from psdblk.suite import SuiteConfig, catalog, check_ids, parse_dims, run_suite


@pytest.fixture(scope="module")
def one_trial():
    return run_suite(SuiteConfig(dims=((2, 2),), trials=1, seed=7))


def test_single_trial_rows(one_trial):
    keys = [(r.check_id, r.norm) for r in one_trial.rows]
    assert len(keys) == len(set(keys))
    assert {r.check_id for r in one_trial.rows} == set(check_ids())
    assert all(r.trials == 1 for r in one_trial.rows)
    assert one_trial.violations == 0


def test_single_trial_reproducible(one_trial):
    again = run_suite(SuiteConfig(dims=((2, 2),), trials=1, seed=7))
    assert dumps(again.to_json()) == dumps(one_trial.to_json())


def test_report_fields(one_trial):
    obj = one_trial.to_json()
    row = obj["checks"][0]
    assert {"id", "trials", "passes", "min_margin", "worst_instance", "norm"} <= set(row)
    block_from_json(row["worst_instance"])


def test_jobs_and_chunking_do_not_change_result():
    config = SuiteConfig(dims=((2, 2), (3, 3)), trials=12, seed=1, checks=("lw", "range[relint]", "elem1[p=2]"))
    base = dumps(run_suite(config).to_json())
    assert dumps(run_suite(config, chunk_size=5).to_json()) == base
    assert dumps(run_suite(config, jobs=2, chunk_size=4).to_json()) == base


def test_seed_changes_result():
    a = run_suite(SuiteConfig(dims=((2, 2),), trials=3, seed=0, checks=("lw",)))
    b = run_suite(SuiteConfig(dims=((2, 2),), trials=3, seed=1, checks=("lw",)))
    assert a.rows[0].worst_fingerprint != b.rows[0].worst_fingerprint


def test_modes_match_check():
    modes = {s.check_id: [m.value for m in s.modes] for s in catalog()}
    assert modes["lw"] == ["hermitian"]
    assert modes["accretive"] == ["accretive"]
    assert modes["range[full]"] == ["range-sep"]


def test_lw_preconditions_met_on_hermitian_draws():
    res = run_suite(SuiteConfig(dims=((2, 2), (3, 3)), trials=50, checks=("lw",), boundary="mixed"))
    assert all(r.precondition_met == r.trials for r in res.rows)
    counts = {r.norm: r.trials for r in res.rows}
    # kf:5 and kf:6 only exist for the 3x3 half of the draws
    assert counts["op"] == 50 and counts["kf:6"] == 25
    assert res.violations == 0


def test_full_flat_rows():
    res = run_suite(SuiteConfig(dims=((2, 2),), trials=2, checks=("schatten[p=2]",), full=True))
    assert [row[2] for row in res.flat] == [0, 1]
    assert len(res.flat[0]) == len(res.CSV_HEADER)


def test_battery_restriction():
    res = run_suite(SuiteConfig(dims=((2, 2),), trials=2, checks=("lw",), battery="op,kf:*"))
    assert [r.norm for r in res.rows] == ["op", "kf:1", "kf:2", "kf:3", "kf:4", "wmaj"]


def test_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(trials=0)
    with pytest.raises(ValueError):
        SuiteConfig(checks=("nope",))
    with pytest.raises(ValueError):
        SuiteConfig(boundary="edge")


def test_trial_errors_carry_context():
    with pytest.raises(PsdBlkError, match="trial 0"):
        run_suite(SuiteConfig(dims=((2, 3),), trials=1, checks=("lw",)))


@pytest.mark.parametrize("text, dims", [("2x2", ((2, 2),)), ("2x2, 4X3", ((2, 2), (4, 3)))])
def test_parse_dims(text, dims):
    assert parse_dims(text) == dims


@pytest.mark.parametrize("text", ["2", "0x2", "ax2"])
def test_parse_dims_errors(text):
    with pytest.raises(ValueError):
        parse_dims(text)

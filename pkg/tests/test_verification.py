import pytest

from bm_census.enumeration import SearchConfig
from bm_census.verification import (
    EngineDisagreement,
    Metric,
    VerificationDiff,
    VerificationRun,
    VerifyScope,
    run_verification,
    verify_table2,
)


def test_table1_matches_up_to_known_errata():
    run = run_verification(VerifyScope.TABLE1)
    assert len(run.diffs) == 180
    mismatches = {(d.key, d.metric) for d in run.mismatches}
    assert mismatches == {
        ("F12", Metric.ISO),
        ("F12", Metric.ISO_ANTI),
        ("F54", Metric.ISO_ANTI),
        ("F57", Metric.ISO_ANTI),
    }
    assert all(d.erratum for d in run.mismatches)
    assert run.passed()
    assert not run.passed(strict=True)


def test_table2_orders_two_and_three():
    run = run_verification(VerifyScope.TABLE2, max_order=3)
    assert len(run.diffs) == 74
    mismatches = {(d.key, d.order, d.expected, d.computed) for d in run.mismatches}
    assert mismatches == {("T7", 2, 12, 8), ("CR", 3, 136, 139)}
    assert all(d.erratum and d.metric is Metric.RAW for d in run.mismatches)
    assert run.passed()
    assert not run.passed(strict=True)


def test_theorem_checks():
    run = run_verification(VerifyScope.THEOREM)
    assert len(run.diffs) == 32
    assert all(d.match and d.order is None for d in run.diffs)
    assert run.diffs[0].expected == run.diffs[0].computed == "F3"


def test_cross_check_finds_no_disagreement():
    run = verify_table2(SearchConfig(), VerificationRun(), max_order=2, cross_check=True)
    assert len(run.diffs) == 37
    assert not run.disagreements


def test_table2_needs_a_covered_order():
    with pytest.raises(ValueError):
        verify_table2(SearchConfig(), VerificationRun(), max_order=1)


def test_run_status():
    ok = VerificationDiff("F1", 2, Metric.RAW, 10, 10)
    bad = VerificationDiff("F1", 2, Metric.RAW, 10, 9)
    assert ok.match and not bad.match
    assert VerificationRun([ok]).passed()
    assert not VerificationRun([ok, bad]).passed()
    assert not VerificationRun([ok], [EngineDisagreement("F1", 2, 10, 9)]).passed()

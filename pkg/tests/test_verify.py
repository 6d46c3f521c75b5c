import pytest

from firesim.verify import (
    CASES, LUMPED_FULL, VerificationReport, observed_order, verify, verify_advdiff, verify_gridspeed, verify_lumped,
)


@pytest.fixture(scope="module")
def lumped_report():
    return verify_lumped()


def test_observed_order():
    assert observed_order([4.0, 1.0, 0.25], [0.4, 0.2, 0.1]) == pytest.approx(2.0)


def test_lumped_case(lumped_report):
    assert lumped_report.passed
    names = [c.name for c in lumped_report.checks]
    assert len(names) == len(set(names))
    rows = {(r[0], r[1]): r for r in lumped_report.table}
    # implicit Euler at dt = 0.1 against the published 3.38 K
    assert LUMPED_FULL["euler", "T"][1] / 3 <= rows["euler", 0.1][2] <= LUMPED_FULL["euler", "T"][1] * 3
    # first and second order error ratios between dt = 1, 0.1, 0.01
    e = [rows["euler", dt][2] for dt in (1.0, 0.1, 0.01)]
    assert 8 < e[1] / e[2] < 12
    order = next(c for c in lumped_report.checks if c.name.startswith("rk2 order"))
    assert order.gating and order.measured >= 1.8


def test_advdiff_case():
    report = verify_advdiff()
    assert report.passed
    errors = dict(report.table)
    assert errors[7] < errors[1] / 10
    assert errors[1] > errors[3] > errors[7]


def test_gridspeed_case_reduced():
    report = verify_gridspeed((250, 500, 1000))
    assert report.passed
    speeds = [s for _, s in report.table]
    assert speeds == sorted(speeds)


def test_report_text_and_dispatch(lumped_report):
    report = VerificationReport({"lumped": lumped_report})
    text = report.to_text()
    assert text.startswith("[PASS] lumped") and "(reference only)" in text
    assert CASES == ("lumped", "advdiff", "gridspeed")
    with pytest.raises(ValueError):
        verify("nope")
    assert list(verify("advdiff").cases) == ["advdiff"]

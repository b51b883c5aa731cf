from sphereacs.report import AuditReport


def test_verdicts_and_counts():
    report = AuditReport("demo")
    report.add("ok", 1.0, 1.0 + 1e-12, 1e-9, "close enough")
    report.add("bad", 1.0, 2.0, 1e-9, "asserted failure")
    report.add("noted", 0.0, 1.0, 1e-9, "recorded only", asserted=False)
    assert not report.passed
    assert [c.name for c in report.failures()] == ["bad"]
    assert [c.name for c in report.mismatches()] == ["noted"]
    assert report.counts() == (1, 1, 1)
    assert sum(report.counts()) == len(report.checks)


def test_report_passes_when_only_recorded_mismatches():
    report = AuditReport("demo")
    report.add("noted", 0.0, 1.0, 1e-9, "recorded only", asserted=False)
    assert report.passed
    assert report.max_error() == 1.0


def test_table_render():
    report = AuditReport("demo")
    report.add("alpha", 1.0, 1.0, 1e-9, "claim text")
    text = report.table()
    assert "demo" in text
    assert "alpha" in text
    assert "pass" in text


def test_select_and_max_error_prefix():
    report = AuditReport("demo")
    report.add("fam[0]", 0.0, 0.5, 1e-9, "x", asserted=False)
    report.add("fam[1]", 0.0, 0.25, 1e-9, "x", asserted=False)
    report.add("other", 0.0, 0.0, 1e-9, "y")
    assert len(report.select("fam")) == 2
    assert report.max_error("fam") == 0.5

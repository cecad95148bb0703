import json
import os

import pytest

from kmismatch.pipeline import RunConfig, run_pipeline
from kmismatch.report import SCHEMA_VERSION, AnalysisReport, emit_report, read_report

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def golden(name):
    with open(os.path.join(GOLDEN, name), "rb") as fh:
        return fh.read()


def test_empty_report_is_valid_json():
    data = json.loads(emit_report(AnalysisReport({}, {}), "json"))
    assert data["schema"] == SCHEMA_VERSION
    for key in ("mismatches", "excluded", "covered", "unused", "diagnostics"):
        assert data[key] == []


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(AnalysisReport({}, {}), "xml")


def test_schema_version_is_checked():
    data = json.loads(emit_report(AnalysisReport({}, {}), "json"))
    data["schema"] = 99
    with pytest.raises(ValueError):
        AnalysisReport.from_dict(data)


def test_ath5k_golden_json(fixture_tree):
    report = run_pipeline(RunConfig(fixture_tree("ath5k")))
    assert emit_report(report, "json") == golden("ath5k.json")


def test_ath5k_golden_text(fixture_tree):
    report = run_pipeline(RunConfig(fixture_tree("ath5k")))
    text = emit_report(report, "text")
    assert text == golden("ath5k.txt")
    body = text.decode()
    for needle in ("ATH_PCI = y", "ATH5K_y || ATH5K_m", "#1"):
        assert needle in body


@pytest.mark.parametrize("name", ["ath5k", "four_category", "tristate"])
def test_json_round_trip(fixture_tree, name):
    report = run_pipeline(RunConfig(fixture_tree(name)))
    blob = emit_report(report, "json")
    back = read_report(blob)
    assert back == report
    assert emit_report(back, "json") == blob
    assert emit_report(back, "text") == emit_report(report, "text")

import json

import pytest

from tracex.report import (
    BY_LINKS_METRICS,
    CaseListing,
    OrphanPolicy,
    ReportError,
    by_links_table,
    detect_orphans,
    extreme_cases,
    information_table,
    null_shared_census,
    scatter_svg,
    write_records_csv,
)


def row(src, tgt, is_link, **overrides):
    base = {
        "source_id": src, "target_id": tgt, "is_link": is_link,
        "h_x": 2.0, "h_y": 3.0, "h_pool": 4.0, "mi": 1.0,
        "loss": 1.0, "noise": 2.0, "si": 0.5, "sx": 0.4,
        "d1": 1.0, "d2": 2.0, "d3": 0.0, "null_shared": False,
        "wmd": 1.0, "scm": 0.3, "cos": 0.2, "euc": 0.5,
        "wmd_sim": 0.5, "cos_sim": 0.83, "wmd_relaxed": False,
    }
    base.update(overrides)
    return base


def test_information_table_identities():
    rows = [
        row("a", "x", True, mi=2.0, loss=0.5, noise=1.0, h_x=2.5, h_y=3.0),
        row("a", "y", False, mi=1.0, loss=0.2, noise=2.0, h_x=1.2, h_y=3.0),
    ]
    table = information_table(rows, "tb")
    # published-layout identity: mi + ci_noise = h_x, mi + ci_loss = h_y
    assert table["mi"] + table["ci_noise"] == pytest.approx(table["h_x"], abs=1e-9)
    assert table["mi"] + table["ci_loss"] == pytest.approx(table["h_y"], abs=1e-9)
    assert "[" in table["si"] and "[" in table["sx"]


def test_information_table_zero_loss_noise_for_identical_pairs():
    rows = [row("a", "x", True, loss=0.0, noise=0.0)]
    table = information_table(rows, "tb")
    assert table["ci_noise"] == 0.0
    assert table["ci_loss"] == 0.0


def test_by_links_column_set():
    assert set(BY_LINKS_METRICS) == {
        "scm", "wmd_sim", "cos", "euc", "h_x", "h_y",
        "ci_noise", "ci_loss", "mi", "si", "sx",
    }
    rows = [row("a", "x", True, si=2.0), row("a", "y", False, si=0.1)]
    seg = by_links_table(rows)
    assert seg["link"]["si"].mean > seg["non_link"]["si"].mean


def test_by_links_no_links_flagged():
    rows = [row("a", "y", False)]
    seg = by_links_table(rows)
    assert all(v is None for v in seg["link"].values())


def test_extreme_cases_k1():
    rows = [
        row("a", "x", True, loss=1.0),
        row("a", "y", False, loss=3.0),
        row("b", "x", False, loss=2.0),
    ]
    listings = extreme_cases(rows, "loss", k=1)
    kinds = {(c.kind, c.source_id, c.target_id) for c in listings}
    assert kinds == {("max_loss", "a", "y"), ("min_loss", "a", "x")}
    assert all(c.rank == 1 for c in listings)


def test_extreme_cases_tie_break_by_id():
    rows = [row("b", "x", False), row("a", "x", False), row("a", "y", False)]
    listings = extreme_cases(rows, "noise", k=3)
    maxima = [c for c in listings if c.kind == "max_noise"]
    assert [(c.source_id, c.target_id) for c in maxima] == [("a", "x"), ("a", "y"), ("b", "x")]


def test_detect_orphans_top_candidate_first():
    rows = [
        row("a", "x", True, mi=1.0),
        row("a", "y", False, mi=5.0),
        row("b", "x", False, mi=0.1),
    ]
    orphans = detect_orphans(rows, OrphanPolicy())
    assert orphans[0].source_id == "a" and orphans[0].target_id == "y"
    assert all(not c.is_link for c in orphans)


def test_detect_orphans_quantile_interpolation():
    links = [row("s", f"t{i}", True, mi=float(i)) for i in range(100)]
    non_link = row("s", "zz", False, mi=98.02)
    orphans = detect_orphans(links + [non_link], OrphanPolicy(quantile=0.99))
    # threshold = 99th percentile of 0..99 = 98.01 by linear interpolation
    assert [(c.source_id, c.target_id) for c in orphans] == [("s", "zz")]


def test_detect_orphans_requires_links():
    with pytest.raises(ReportError):
        detect_orphans([row("a", "x", False)], OrphanPolicy())


def test_orphan_policy_validation():
    with pytest.raises(ReportError):
        OrphanPolicy(quantile=1.0)
    with pytest.raises(ReportError):
        OrphanPolicy(metric="wmd")


def test_null_shared_census():
    rows = [
        row("a", "x", True, null_shared=True),
        row("a", "y", False, null_shared=True),
        row("b", "x", False, null_shared=False),
    ]
    assert null_shared_census(rows) == {"count_total": 2, "count_links": 1}


def test_records_csv_headers_only_when_empty(tmp_path):
    path = tmp_path / "records.csv"
    write_records_csv([], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("source_id,target_id,is_link,h_x")


def test_emit_deterministic(tmp_path):
    rows = [row("a", "x", True), row("a", "y", False)]
    p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    write_records_csv(rows, p1)
    write_records_csv(rows, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_scatter_svg_labels_and_determinism():
    rows = [row("a", "x", True), row("a", "y", False, wmd_sim=0.7, mi=2.0)]
    svg = scatter_svg(rows)
    assert "WMD similarity" in svg
    assert "Mutual Information (bits)" in svg
    assert svg == scatter_svg(rows)
    assert scatter_svg([]).startswith("<svg")


def test_case_listing_json_shape(tmp_path):
    from tracex.report import write_cases_jsonl

    listing = CaseListing("max_loss", "a", "x", True, 1.5, 1)
    path = tmp_path / "cases.jsonl"
    write_cases_jsonl([listing], path)
    doc = json.loads(path.read_text().splitlines()[0])
    assert doc["kind"] == "max_loss" and doc["rank"] == 1

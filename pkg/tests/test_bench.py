import csv
import io

import pytest

from helpers import generated_battery

from bfeq.bench import (
    CSV_HEADER, STRATEGIES, UsageError, check_strategy, compare, csv_row, expanded, load_snapshot,
    materialise, run_update, save_snapshot, write_csv,
)
from bfeq.generators import bijective


def test_strategy_mode_compatibility():
    for strategy, mode in STRATEGIES.items():
        check_strategy(strategy, mode)
        other = "axiom" if mode == "rewrite" else "rewrite"
        with pytest.raises(UsageError):
            check_strategy(strategy, other)
    with pytest.raises(UsageError):
        check_strategy("dred", "rewrite")


def test_all_strategies_agree_on_example(ex):
    result = compare(ex.E, ex.program, ex.deletions)
    assert result.agree
    assert set(result.reports) == set(STRATEGIES)
    assert result.reports["bfeq"].delta == 3
    assert result.reports["remat-eq"].delta == 3
    assert result.reports["bf-axiom"].size_after == 8


def test_all_strategies_agree_on_generated_instances():
    for inst in generated_battery():
        assert compare(inst.facts, inst.program, inst.deletions, workers=2).agree, inst.name


def test_run_update_rejects_wrong_store(ex):
    store, _ = materialise(ex.E, ex.program, "axiom")
    with pytest.raises(UsageError):
        run_update(store, "bfeq", ex.deletions)


def test_csv_schema(ex):
    store, _ = materialise(ex.E, ex.program, "rewrite")
    report = run_update(store, "bfeq", ex.deletions)
    row = csv_row("example", report, 3, 2)
    text = write_csv(None, [row])
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    (parsed,) = csv.DictReader(io.StringIO(text))
    assert parsed["|I|"] == "8" and parsed["ΔI"] == "3" and parsed["strategy"] == "bfeq"


def test_csv_append_writes_header_once(tmp_path, ex):
    store, _ = materialise(ex.E, ex.program, "rewrite")
    row = csv_row("example", run_update(store, "bfeq", []), 3, 2)
    path = tmp_path / "out.csv"
    write_csv(path, [row], append=True)
    write_csv(path, [row], append=True)
    lines = path.read_text().splitlines()
    assert len(lines) == 3 and lines[0].startswith("dataset,")


@pytest.mark.parametrize("mode", ["rewrite", "axiom"])
def test_snapshot_round_trip(tmp_path, mode):
    inst = bijective(4, extra=0.5, seed=1)
    store, _ = materialise(inst.facts, inst.program, mode)
    save_snapshot(tmp_path / "snap", inst.dictionary, store, dataset="bij")
    d, loaded, meta = load_snapshot(tmp_path / "snap")
    assert meta == {"mode": mode, "dataset": "bij"}
    assert list(d) == list(inst.dictionary)
    assert expanded(loaded) == expanded(store)
    assert list(loaded.E) == list(store.E)
    assert loaded.program == store.program
    if mode == "rewrite":
        assert loaded.pi == store.pi and loaded.voc_counts == store.voc_counts


def test_update_after_reload_matches_in_memory(tmp_path):
    inst = bijective(5, extra=0.6, seed=2)
    store, _ = materialise(inst.facts, inst.program, "rewrite")
    save_snapshot(tmp_path / "s", inst.dictionary, store)
    _, loaded, _ = load_snapshot(tmp_path / "s")
    run_update(store, "bfeq", inst.facts[:4])
    run_update(loaded, "bfeq", inst.facts[:4])
    assert loaded.pi == store.pi and loaded.I == store.I


def test_remat_reports_additions_and_removals(ex):
    store, _ = materialise(ex.E, ex.program, "rewrite")
    report = run_update(store, "remat-eq", ex.deletions)
    assert (report.added, report.removed) == (3, 0)
    store, _ = materialise(ex.E, ex.program, "axiom")
    report = run_update(store, "remat-axiom", ex.deletions)
    assert (report.added, report.removed, report.size_after) == (0, 6, 8)

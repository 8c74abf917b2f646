import csv
import json
import subprocess
import sys

import pytest

from bfeq.cli import main

RULES = """\
?y1 == ?y2 :- [?y1, :R, ?x], [?y2, :R, ?x] .
?y1 == ?y2 :- [?x, :R, ?y1], [?x, :R, ?y2] .
"""


@pytest.fixture
def files(tmp_path):
    (tmp_path / "facts.nt").write_text(":a :R :b .\n:c :R :d .\n:a :R :d .\n")
    (tmp_path / "rules.dlog").write_text(RULES)
    (tmp_path / "del.nt").write_text(":a :R :d .\n")
    (tmp_path / "empty.nt").write_text("")
    return tmp_path


def test_materialise_reports_five_facts(files, capsys):
    assert main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
                 "--out", str(files / "snap")]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["|I|"] == 5 and stats["mode"] == "rewrite"
    assert (files / "snap" / "repmap.txt").read_text() == ":c -> :a\n:d -> :b\n"


def test_materialise_axiom_mode(files, capsys):
    main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
          "--mode", "axiom", "--out", str(files / "snap")])
    assert json.loads(capsys.readouterr().out)["|J|"] == 14


def test_materialise_empty_facts(files, capsys):
    main(["materialise", "--facts", str(files / "empty.nt"), "--rules", str(files / "rules.dlog"),
          "--out", str(files / "snap")])
    assert json.loads(capsys.readouterr().out)["|I|"] == 0


def test_update_writes_report_csv_and_snapshot(files):
    main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
          "--out", str(files / "snap"), "--report", str(files / "m.json")])
    assert main(["update", "--snapshot", str(files / "snap"), "--delete", str(files / "del.nt"),
                 "--report", str(files / "u.json"), "--csv", str(files / "u.csv")]) == 0
    report = json.loads((files / "u.json").read_text())
    assert (report["added"], report["removed"], report["ΔI"]) == (3, 0, 3)
    (row,) = csv.DictReader((files / "u.csv").open())
    assert row["dataset"] == files.name and row["|I|"] == "8"
    assert len((files / "snap" / "store.nt").read_text().splitlines()) == 8
    assert (files / "snap" / "repmap.txt").read_text() == ""


def test_empty_update_changes_nothing(files, capsys):
    main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
          "--out", str(files / "snap")])
    before = (files / "snap" / "store.nt").read_text()
    capsys.readouterr()
    main(["update", "--snapshot", str(files / "snap"), "--delete", str(files / "empty.nt"),
          "--report", str(files / "u.json")])
    report = json.loads((files / "u.json").read_text())
    assert report["derivations"]["total"] == 0
    assert (files / "snap" / "store.nt").read_text() == before


def test_update_incompatible_strategy_is_usage_error(files):
    main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
          "--mode", "axiom", "--out", str(files / "snap")])
    with pytest.raises(SystemExit) as info:
        main(["update", "--snapshot", str(files / "snap"), "--strategy", "bfeq"])
    assert info.value.code == 2


def test_random_deletion_needs_seed(files):
    main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
          "--out", str(files / "snap")])
    with pytest.raises(SystemExit):
        main(["update", "--snapshot", str(files / "snap"), "--fraction", "0.5"])


def test_sweep_leaves_snapshot_alone(files, capsys):
    main(["materialise", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
          "--out", str(files / "snap")])
    before = (files / "snap" / "store.nt").read_text()
    capsys.readouterr()
    main(["update", "--snapshot", str(files / "snap"), "--sweep", "0.3,1.0", "--seed", "1",
          "--csv", str(files / "s.csv")])
    rows = list(csv.DictReader((files / "s.csv").open()))
    assert [r["|E⁻|"] for r in rows] == ["1", "3"]
    assert rows[1]["|I|"] == "0"
    assert (files / "snap" / "store.nt").read_text() == before


def test_parse_error_exit_code(files, capsys):
    (files / "bad.nt").write_text(":a :b\n")
    code = main(["materialise", "--facts", str(files / "bad.nt"), "--rules", str(files / "rules.dlog"),
                 "--out", str(files / "snap")])
    assert code == 1
    assert "line 1" in capsys.readouterr().err


def test_missing_file_exit_code(files, capsys):
    assert main(["materialise", "--facts", str(files / "nope.nt"), "--rules", str(files / "rules.dlog"),
                 "--out", str(files / "snap")]) == 1


def test_generate_then_compare(files, capsys):
    out = files / "gen"
    assert main(["generate", "--kind", "clique", "--size", "20", "--groups", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["compare", "--facts", str(out / "facts.nt"), "--rules", str(out / "rules.dlog"),
                 "--fraction", "0.2", "--seed", "3"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert {r["strategy"] for r in rows} == {"bfeq", "bf-axiom", "remat-eq", "remat-axiom"}
    assert all(r["dataset"] == "gen" for r in rows)
    assert len({r["|E⁻|"] for r in rows}) == 1


def test_compare_is_deterministic_apart_from_time(files, capsys):
    out = files / "gen"
    main(["generate", "--kind", "bijective", "--size", "8", "--extra", "0.5", "--out", str(out)])
    runs = []
    for _ in range(2):
        capsys.readouterr()
        main(["compare", "--facts", str(out / "facts.nt"), "--rules", str(out / "rules.dlog"),
              "--count", "4", "--seed", "9"])
        runs.append([{k: v for k, v in r.items() if k != "T_ms"}
                     for r in csv.DictReader(capsys.readouterr().out.splitlines())])
    assert runs[0] == runs[1]


def test_verify_file_and_random(files, capsys):
    assert main(["verify", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
                 "--delete", str(files / "del.nt")]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")
    assert main(["verify", "--random", "15", "--seed", "2"]) == 0
    assert "15/15" in capsys.readouterr().out


def test_verify_refuses_large_input(files):
    with pytest.raises(SystemExit):
        main(["verify", "--facts", str(files / "facts.nt"), "--rules", str(files / "rules.dlog"),
              "--max-facts", "2"])


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "bfeq.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "materialise" in proc.stdout

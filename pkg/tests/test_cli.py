import json
import subprocess
from pathlib import Path

import pytest

from kgbench.cli import main

from conftest import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ingest_stats(capsys, mini_dir):
    code, out, _ = run(capsys, "ingest", "--graph", mini_dir / "alpha.nt")
    assert code == 0
    stats = json.loads(out)
    assert stats["id"] == "alpha"
    assert stats["triples"] > 0
    assert set(stats["entities"]) == {"class", "property", "instance"}
    assert stats["parse_issues"] == 0


def test_ingest_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "ingest", "--graph", "definitely-not-here.nt")
    assert code == 2
    assert "no such file" in err


def test_ingest_malformed_strict_fails_lenient_passes(capsys, tmp_path):
    path = tmp_path / "broken.nt"
    path.write_text("<http://x/a> <http://x/p> <http://x/b> .\nbroken\n", encoding="utf-8")
    code, _, err = run(capsys, "ingest", "--graph", path)
    assert code == 1 and "line 2" in err
    code, out, _ = run(capsys, "ingest", "--graph", path, "--lenient")
    assert code == 0
    assert json.loads(out)["parse_issues"] == 1


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_match_reproduces_frozen_baseline(capsys, mini_dir, tmp_path):
    out_file = tmp_path / "align.tsv"
    code, _, _ = run(
        capsys,
        "match",
        "--source", mini_dir / "alpha.nt",
        "--target", mini_dir / "beta.nt",
        "--alt-labels",
        "--out", out_file,
    )
    assert code == 0
    frozen = (mini_dir / "align_baselineAltLabel.tsv").read_text(encoding="utf-8")
    assert out_file.read_text(encoding="utf-8") == frozen


def test_extract_gold(capsys, tmp_path):
    out_dir = tmp_path / "gold"
    code, _, _ = run(
        capsys,
        "extract-gold",
        "--pages", DATA / "wiki" / "pages.jsonl",
        "--targets", "beta",
        "--out-dir", out_dir,
    )
    assert code == 0
    meta = json.loads((out_dir / "gold_meta.json").read_text(encoding="utf-8"))
    assert meta["pairs"]["alpha-beta"]["gold_pairs"] == 3
    assert meta["pairs"]["alpha-beta"]["candidate_links"] == 7
    assert len(meta["dropped_redirects"]) == 1
    gold_lines = (out_dir / "gold_alpha_beta.tsv").read_text(encoding="utf-8").splitlines()
    assert len(gold_lines) == 3


def test_evaluate_single_task(capsys, mini_dir, tmp_path):
    out_dir = tmp_path / "bundle"
    code, _, _ = run(
        capsys,
        "evaluate",
        "--alignment", mini_dir / "align_baselineLabel.tsv",
        "--gold", mini_dir / "gold.tsv",
        "--graphs", mini_dir / "alpha.nt", mini_dir / "beta.nt",
        "--matcher", "baselineLabel",
        "--task", "alpha-beta",
        "--out", out_dir,
    )
    assert code == 0
    code, out, _ = run(capsys, "report", "--verify", out_dir)
    assert code == 0 and out == "bundle ok\n"
    aggregates = json.loads((out_dir / "aggregates.json").read_text(encoding="utf-8"))
    overall = aggregates["matchers"]["baselineLabel"]["tasks"]["alpha-beta"]["sections"]["overall"]
    assert overall["Prec."] == 1.0
    assert overall["Rec."] == pytest.approx(0.8)


def test_evaluate_task_list_matches_reference(capsys, mini_dir, tmp_path, monkeypatch):
    monkeypatch.chdir(mini_dir)  # tasks.json uses paths relative to the mini corpus
    out_dir = tmp_path / "bundle"
    code, _, _ = run(capsys, "evaluate", "--tasks", "tasks.json", "--out", out_dir)
    assert code == 0
    for name in ("cells.csv", "aggregates.json"):
        assert (out_dir / name).read_bytes() == (mini_dir / "reference" / name).read_bytes()


def test_evaluate_reruns_byte_identical(capsys, mini_dir, tmp_path, monkeypatch):
    monkeypatch.chdir(mini_dir)
    run(capsys, "evaluate", "--tasks", "tasks.json", "--out", tmp_path / "one")
    run(capsys, "--jobs", "2", "evaluate", "--tasks", "tasks.json", "--out", tmp_path / "two")
    for name in ("cells.csv", "aggregates.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()
    one = json.loads((tmp_path / "one" / "manifest.json").read_text(encoding="utf-8"))
    assert {"gold.tsv", "alpha.nt", "beta.nt"} <= set(one["config"]["inputs"])


def test_evaluate_usage_errors(capsys, mini_dir, tmp_path):
    code, _, err = run(capsys, "evaluate", "--out", tmp_path / "b")
    assert code == 2 and "evaluate needs" in err

    bad = tmp_path / "tasks.json"
    bad.write_text("{}", encoding="utf-8")
    code, _, err = run(capsys, "evaluate", "--tasks", bad, "--out", tmp_path / "b")
    assert code == 2 and "task list" in err

    bad.write_text("not json", encoding="utf-8")
    code, _, _ = run(capsys, "evaluate", "--tasks", bad, "--out", tmp_path / "b")
    assert code == 1


def test_arity_counts(capsys, mini_dir):
    code, out, _ = run(capsys, "arity", "--alignment", mini_dir / "align_externalToy.tsv")
    assert code == 0
    payload = json.loads(out)
    assert payload["total"] == 7
    assert payload["counts"] == {"1:1": 3, "1:n": 1, "n:1": 2, "n:m": 1}


def test_sample_deterministic_and_session(capsys, mini_dir, tmp_path):
    args = [
        "sample",
        "--alignment", mini_dir / "align_baselineAltLabel.tsv",
        "-n", "4",
        "--seed", "7",
        "--matcher", "baselineAltLabel",
        "--task", "alpha-beta",
    ]
    run(capsys, *args, "--out", tmp_path / "one.jsonl")
    run(capsys, *args, "--out", tmp_path / "two.jsonl")
    one = (tmp_path / "one.jsonl").read_text(encoding="utf-8")
    assert one == (tmp_path / "two.jsonl").read_text(encoding="utf-8")
    assert len(one.splitlines()) == 4

    code, _, _ = run(
        capsys,
        *args,
        "--out", tmp_path / "three.jsonl",
        "--sessions-dir", tmp_path / "sessions",
        "--session-id", "mini-1",
        "--graphs", mini_dir / "alpha.nt", mini_dir / "beta.nt",
    )
    assert code == 0
    session = json.loads(
        (tmp_path / "sessions" / "mini-1" / "session.json").read_text(encoding="utf-8")
    )
    assert len(session["items"]) == 4
    assert session["meta"]["seed"] == 7
    for item in session["items"]:
        assert item["correspondence"]["source"] in session["cards"]

    code, _, err = run(capsys, *args, "--out", tmp_path / "x.jsonl", "--session-id", "y")
    assert code == 2 and "needs --sessions-dir" in err


def test_kappa_hand_fixture(capsys, tmp_path):
    ratings = tmp_path / "ratings.tsv"
    ratings.write_text("2\t1\n1\t2\n", encoding="utf-8")
    code, out, _ = run(capsys, "kappa", "--ratings", ratings)
    assert code == 0
    assert out == "-0.333333\tpoor\n"


def test_kappa_degenerate_is_internal_error(capsys, tmp_path):
    ratings = tmp_path / "ratings.tsv"
    ratings.write_text("3\t0\n3\t0\n", encoding="utf-8")
    code, _, err = run(capsys, "kappa", "--ratings", ratings)
    assert code == 1 and "no category variance" in err


def test_report_merge_and_verify(capsys, mini_dir, tmp_path):
    code, _, _ = run(
        capsys,
        "report",
        "--cells", mini_dir / "reference" / "cells.csv",
        "--out", tmp_path / "rebuilt",
    )
    assert code == 0
    assert (tmp_path / "rebuilt" / "aggregates.json").read_bytes() == (
        mini_dir / "reference" / "aggregates.json"
    ).read_bytes()

    (tmp_path / "rebuilt" / "cells.csv").write_text("matcher\n", encoding="utf-8")
    code, _, err = run(capsys, "report", "--verify", tmp_path / "rebuilt")
    assert code == 1 and "digest" in err

    code, _, err = run(capsys, "report")
    assert code == 2 and "report needs" in err


def test_console_script_installed(tmp_path):
    ratings = tmp_path / "ratings.tsv"
    ratings.write_text("2\t1\n1\t2\n", encoding="utf-8")
    proc = subprocess.run(
        ["kgbench", "kappa", "--ratings", str(ratings)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "-0.333333\tpoor\n"

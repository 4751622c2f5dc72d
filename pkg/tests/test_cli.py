"""CLI contracts: output shapes, exit codes, determinism, and caching."""
from __future__ import annotations

import json

import pytest

import glgamma.cache
from glgamma.cache import (cache_load, cache_path, cache_store, group_key,
                           group_payload, profile_key, profile_payload)
from glgamma.characters import GL1Datum
from glgamma.cli import SUITE_BUILDERS, SUITE_ORDER, main
from glgamma.report import (count_statuses, overall_exit, reports_to_json,
                            summarize)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _run(capsys, argv: list[str]) -> tuple[int, str, str]:
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _fake_report(ok: bool) -> dict:
    status = "pass" if ok else "fail"
    return {"suite": "converse", "params": {"q": 3},
            "ok": ok, "cases": [{"name": "stub", "status": status}]}


# ---------------------------------------------------------------------------
# inspection subcommands
# ---------------------------------------------------------------------------

def test_classes_gl2_f3(capsys, tmp_path):
    code, out, _ = _run(capsys, ["classes", "--q", "3", "--n", "2",
                                 "--cache-dir", str(tmp_path)])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 9
    assert lines[-1] == "classes=8 total=48 group_order=48"


def test_classes_cached_rerun_is_identical(capsys, tmp_path):
    first = _run(capsys, ["classes", "--q", "3", "--n", "2",
                          "--cache-dir", str(tmp_path)])
    second = _run(capsys, ["classes", "--q", "3", "--n", "2",
                           "--cache-dir", str(tmp_path)])
    assert first == second
    assert cache_load(tmp_path, group_key(3, 2)) is not None


def test_char_dims_and_norms(capsys):
    expected = [(["char", "--q", "3", "--spec", "ps:0,1"], 4),
                (["char", "--q", "3", "--spec", "st:0"], 3),
                (["char", "--q", "3", "--spec", "cusp2:t=1"], 2),
                (["char", "--q", "3", "--spec", "det:0", "--n", "2"], 1)]
    for argv, dim in expected:
        code, out, _ = _run(capsys, argv)
        assert code == 0
        assert f"dim={dim}" in out
        assert "norm=1" in out


def test_bessel_matrix_agrees_with_profile_line(capsys):
    code, profile_out, _ = _run(capsys, ["bessel", "--q", "3",
                                         "--spec", "cusp2:t=1"])
    assert code == 0
    code, matrix_out, _ = _run(capsys, ["bessel", "--q", "3",
                                        "--spec", "cusp2:t=1",
                                        "--matrix", "0,1;1,0"])
    assert code == 0
    exact = matrix_out.splitlines()[0].removeprefix("J = ")
    assert exact in profile_out


def test_gamma_kinds_all_print_exact_values(capsys):
    argvs = [["gamma", "--q", "3", "--pi", "st:0", "--tau", "cusp2:1"],
             ["gamma", "--q", "3", "--pi", "st:0", "--tau", "cusp2:1",
              "--kind", "gk-tilde"],
             ["gamma", "--q", "3", "--pi", "ps:0,1", "--kind", "gj"],
             ["gamma", "--q", "3", "--pi", "ps:0,1", "--kind", "gj",
              "--a", "1"]]
    for argv in argvs:
        code, out, _ = _run(capsys, argv)
        assert code == 0
        assert "gamma = {" in out
        assert "|gamma|^2 = {" in out


def test_gamma_gk_requires_tau(capsys):
    code, _, err = _run(capsys, ["gamma", "--q", "3", "--pi", "st:0"])
    assert code == 2
    assert "--tau" in err


def test_kloosterman_matrix_agrees_with_profile(capsys):
    code, profile_out, _ = _run(capsys, ["kloosterman", "--q", "3",
                                         "--c", "1", "--alphas", "0,1"])
    assert code == 0
    code, matrix_out, _ = _run(capsys, ["kloosterman", "--q", "3",
                                        "--c", "1", "--alphas", "0,1",
                                        "--matrix", "2"])
    assert code == 0
    exact = matrix_out.splitlines()[0].removeprefix("Kl = ")
    assert exact in profile_out


# ---------------------------------------------------------------------------
# verify subcommand
# ---------------------------------------------------------------------------

def test_verify_bs_kloosterman_passes(capsys):
    code, out, err = _run(capsys, ["verify", "bs-kloosterman", "--q", "3",
                                   "--c", "1", "--k", "2"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "1"
    assert doc["ok"] is True
    assert len(doc["reports"]) == 1
    assert doc["reports"][0]["suite"] == "bs-kloosterman"
    assert doc["reports"][0]["timing"] is None
    assert "PASS" in err


def test_verify_gk_fe_smoke_q2(capsys):
    code, out, _ = _run(capsys, ["verify", "gk-fe", "--q", "2"])
    assert code == 0
    doc = json.loads(out)
    suites = {r["suite"] for r in doc["reports"]}
    assert suites == {"gk-fe", "gk-fe-fn", "gk-fe-dual"}


def test_verify_every_suite_name_is_wired():
    for name in SUITE_ORDER:
        assert name in SUITE_BUILDERS
    assert len(SUITE_ORDER) == 12


def test_verify_unknown_suite_is_usage_error(capsys):
    code, _, _ = _run(capsys, ["verify", "nosuch", "--q", "3"])
    assert code == 2


def test_verify_missing_q_is_usage_error(capsys):
    code, _, _ = _run(capsys, ["verify", "converse"])
    assert code == 2


def test_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(SUITE_BUILDERS, "converse",
                        lambda args: [_fake_report(False)])
    code, out, err = _run(capsys, ["verify", "converse", "--q", "3"])
    assert code == 1
    assert json.loads(out)["ok"] is False
    assert "FAIL" in err


def test_verify_out_file_and_stdout_are_byte_identical(capsys, tmp_path):
    f1, f2 = tmp_path / "r1.json", tmp_path / "r2.json"
    code, out1, _ = _run(capsys, ["verify", "converse", "--q", "3",
                                  "--out", str(f1)])
    assert code == 0
    code, out2, _ = _run(capsys, ["verify", "converse", "--q", "3",
                                  "--out", str(f2)])
    assert code == 0
    assert out1 == out2
    assert f1.read_bytes() == f2.read_bytes()
    assert f1.read_text() == out1


def test_budget_refusal_exit_code(capsys):
    code, _, err = _run(capsys, ["classes", "--q", "16", "--n", "6"])
    assert code == 2
    assert err.startswith("refused:")


def test_bad_spec_exit_code(capsys):
    code, _, err = _run(capsys, ["char", "--q", "3", "--spec", "bogus:1"])
    assert code == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# cache subcommand and round trips
# ---------------------------------------------------------------------------

def test_cache_warm_show_clear(capsys, tmp_path):
    code, out, _ = _run(capsys, ["cache", "warm", "--q", "3", "--n", "2",
                                 "--cache-dir", str(tmp_path)])
    assert code == 0
    assert "stored" in out
    code, out, _ = _run(capsys, ["cache", "show",
                                 "--cache-dir", str(tmp_path)])
    assert code == 0
    assert group_key(3, 2) in out
    code, out, _ = _run(capsys, ["cache", "clear",
                                 "--cache-dir", str(tmp_path)])
    assert code == 0
    assert "removed=1" in out
    code, out, _ = _run(capsys, ["cache", "show",
                                 "--cache-dir", str(tmp_path)])
    assert code == 0
    assert group_key(3, 2) not in out


def test_cache_warm_profile(capsys, tmp_path):
    code, out, _ = _run(capsys, ["cache", "warm", "--q", "3",
                                 "--tau", "gl1:0+gl1:1", "--c", "1",
                                 "--cache-dir", str(tmp_path)])
    assert code == 0
    key = profile_key(3, (GL1Datum(0), GL1Datum(1)), 1, 1)
    loaded = cache_load(tmp_path, key)
    assert loaded == profile_payload(3, (GL1Datum(0), GL1Datum(1)), 1, 1)


def test_cache_round_trip_group_q3_n4(tmp_path):
    payload = group_payload(3, 4)
    cache_store(tmp_path, group_key(3, 4), payload)
    loaded = cache_load(tmp_path, group_key(3, 4))
    assert loaded == payload
    labels = [entry["label"] for entry in loaded["classes"]]
    assert labels == [entry["label"] for entry in payload["classes"]]


def test_cache_version_bump_is_a_miss(tmp_path, monkeypatch):
    payload = group_payload(3, 2)
    cache_store(tmp_path, group_key(3, 2), payload)
    monkeypatch.setattr(glgamma.cache, "SCHEMA_VERSION", "999")
    assert cache_load(tmp_path, group_key(3, 2)) is None


def test_cache_hash_corruption_warns_and_misses(tmp_path):
    payload = group_payload(3, 2)
    path = cache_store(tmp_path, group_key(3, 2), payload)
    entry = json.loads(path.read_text())
    entry["payload"]["order"] = 47
    path.write_text(json.dumps(entry))
    with pytest.warns(UserWarning):
        assert cache_load(tmp_path, group_key(3, 2)) is None


def test_cache_unreadable_entry_warns_and_misses(tmp_path):
    path = cache_path(tmp_path, group_key(3, 2))
    tmp_path.mkdir(exist_ok=True)
    path.write_text("{not json")
    with pytest.warns(UserWarning):
        assert cache_load(tmp_path, group_key(3, 2)) is None


# ---------------------------------------------------------------------------
# report document
# ---------------------------------------------------------------------------

def test_report_document_shape():
    text = reports_to_json([_fake_report(True), _fake_report(True)])
    assert text.endswith("\n")
    doc = json.loads(text)
    assert doc["schema"] == "1"
    assert doc["ok"] is True
    for report in doc["reports"]:
        assert set(report) == {"suite", "params", "ok", "cases", "timing"}
        assert report["timing"] is None


def test_report_exit_and_counts():
    good, bad = _fake_report(True), _fake_report(False)
    assert overall_exit([good, good]) == 0
    assert overall_exit([good, bad]) == 1
    assert count_statuses(bad) == (0, 0, 1)


def test_summarize_hides_sampling_params():
    report = {"suite": "gj-fe",
              "params": {"q": 3, "seed": 7, "extra": 4, "t": 1},
              "ok": True, "cases": [{"name": "x", "status": "pass"}]}
    line = summarize(report)
    assert "seed" not in line
    assert "extra" not in line
    assert line.startswith("gj-fe[q=3, t=1]: PASS")

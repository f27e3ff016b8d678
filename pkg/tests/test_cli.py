import json
import os
import shutil
import subprocess
import sys

import jsonschema
import pytest

from conftest import CORPUS, GOLDEN, ROOT
from spreadkit.report import canonical_value, dumps
from fractions import Fraction

DATA = ROOT / "tests" / "data"

# name -> argv; reports are compared byte-for-byte with tests/golden/<name>.json
CASES = {
    "analyze_complete06_k3": ["analyze", CORPUS / "complete_06.facets", "--k", "3"],
    "analyze_path04_k1": ["analyze", CORPUS / "path_04.graph", "--k", "1"],
    "analyze_path04_k0": ["analyze", CORPUS / "path_04.graph", "--k", "0"],
    "decompose_star12": ["decompose", CORPUS / "complete_12.facets", "--k", "3", "--t", "1",
                         "--r", "2", "--q", "1"],
    "decompose_single": ["decompose", CORPUS / "complete_03.facets", "--k", "3", "--t", "1",
                         "--r", "2", "--q", "1", "--family", DATA / "single.family"],
    "decompose_adversarial": ["decompose", DATA / "complete4.facets", "--k", "2", "--t", "1",
                              "--r", "1", "--q", "2", "--family", DATA / "adversarial.family"],
    "extremal_complete06": ["extremal", CORPUS / "complete_06.facets", "--k", "3", "--t", "1"],
    "extremal_complete05": ["extremal", CORPUS / "complete_05.facets", "--k", "3", "--t", "1"],
    "extremal_path04": ["extremal", CORPUS / "path_04.graph", "--k", "2", "--t", "1"],
    "extremal_complete07_nontrivial": ["extremal", CORPUS / "complete_07.facets", "--k", "3",
                                       "--t", "1", "--nontrivial"],
    "montecarlo_complete08": ["montecarlo", CORPUS / "complete_08.facets", "--k", "3",
                              "--p", "0.4", "--trials", "20000", "--seed", "5"],
    "montecarlo_two_color": ["montecarlo", CORPUS / "complete_10.facets", "--k", "2",
                             "--p", "0.5", "--trials", "20000", "--seed", "8", "--two-color"],
    "plan_2p32": ["plan", "--n", str(2 ** 32), "--k", "2", "--t", "1"],
    "plan_2p26": ["plan", "--n", str(2 ** 26), "--k", "2", "--t", "1", "--star", "100",
                  "--m", "3"],
    "verify_cycle08": ["verify", CORPUS / "cycle_08.graph", "--seed", "1"],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_report(name, run_cli, schema):
    code, out, err = run_cli(*CASES[name], "--format", "json")
    assert err == ""
    data = json.loads(out)
    jsonschema.validate(data, schema)
    path = GOLDEN / f"{name}.json"
    if os.environ.get("SPREADKIT_REGEN"):
        path.write_text(out)
    assert out == path.read_text(), f"report differs from {path.name}"
    assert code == (0 if data["status"] == "pass" else 5)


def load(name):
    return json.loads((GOLDEN / f"{name}.json").read_text())


class TestGoldenContent:
    def test_analyze(self):
        res = load("analyze_complete06_k3")["results"]
        assert res["r_star"] == 2.0 and res["lemma_spread"]["holds"]
        assert res["local_lym"]["worst_ratio"] == "1/2"
        res = load("analyze_path04_k1")["results"]
        assert res["rank"] == 2 and res["lemma_spread"]["holds"]
        res = load("analyze_path04_k0")["results"]
        assert res["layer_size"] == 1 and res["lemma_spread"]["holds"]

    def test_decompose(self):
        res = load("decompose_star12")["results"]
        assert res["cover"] == [[1]] and res["remainder_size"] == 0
        assert res["stop_reason"] == "exhausted" and res["family_size"] == 55
        res = load("decompose_single")["results"]
        assert res["stop_reason"] == "oversize_set" and res["last_set"] == [1, 2, 3]
        res = load("decompose_adversarial")
        assert res["status"] == "pass"
        assert res["results"]["checks"]["cover_t_intersecting"]["holds"] is False

    def test_extremal(self):
        res = load("extremal_complete06")["results"]
        assert res["star_optimal"] and res["max_size"] == 10
        res = load("extremal_complete05")["results"]
        assert not res["star_optimal"] and not res["borg_threshold_met"]
        res = load("extremal_path04")["results"]
        assert res["max_size"] == 2 and res["star_optimal"]
        assert load("extremal_complete07_nontrivial")["results"]["max_nontrivial"] == 13

    def test_plan(self):
        res = load("plan_2p32")["results"]
        assert res["q"] == 264 and res["r0"] == str(2 ** 31)
        assert all(res[k] for k in res if k.startswith(("hyp_", "cond_")))
        assert load("plan_2p26")["results"]["hyp_n_vs_tklog2"] is False


class TestExitCodes:
    def test_usage_errors(self, run_cli):
        assert run_cli("analyze")[0] == 2
        assert run_cli("analyze", ROOT / "missing.facets", "--k", "1")[0] == 2
        assert run_cli("plan", "--n", "4", "--k", "4", "--t", "1")[0] == 2
        assert run_cli("decompose", CORPUS / "complete_05.facets", "--k", "2",
                       "--r", "x")[0] == 2

    def test_parse_error(self, run_cli, tmp_path):
        bad = tmp_path / "bad.facets"
        bad.write_text("1 2\n0 3\n")
        code, _, err = run_cli("analyze", bad, "--k", "1")
        assert code == 2 and "line 2" in err

    def test_family_outside_layer(self, run_cli):
        code, _, err = run_cli("decompose", CORPUS / "complete_05.facets", "--k", "2",
                               "--family", DATA / "single.family")
        assert code == 2 and "not in the ambient" in err

    def test_budget_exhausted(self, run_json):
        code, data, _ = run_json("extremal", CORPUS / "complete_09.facets", "--k", "4",
                                 "--nontrivial", "--budget", "3")
        assert code == 4 and data["status"] == "budget_exhausted"

    def test_counterexample_candidate_exit(self, run_json, monkeypatch):
        from spreadkit import cli, oracle
        real = oracle.ekr_verdict

        def fake(*args, **kwargs):
            from dataclasses import replace
            return replace(real(*args, **kwargs), star_optimal=False)

        monkeypatch.setattr(cli, "ekr_verdict", fake)
        code, data, _ = run_json("extremal", CORPUS / "complete_06.facets", "--k", "3")
        assert code == 3 and data["status"] == "counterexample_candidate"
        assert data["results"]["witness"]

    def test_empty_corpus(self, run_cli, tmp_path):
        assert run_cli("verify", "--corpus", tmp_path)[0] == 2

    def test_corrupted_golden_fails_with_named_check(self, run_json, tmp_path):
        for suffix in (".graph", ".golden.json"):
            shutil.copy(CORPUS / f"path_06{suffix}", tmp_path / f"path_06{suffix}")
        golden = tmp_path / "path_06.golden.json"
        data = json.loads(golden.read_text())
        data["layers"]["2"]["size"] += 1
        golden.write_text(json.dumps(data))
        code, report, _ = run_json("verify", "--corpus", tmp_path)
        assert code == 5 and report["status"] == "fail"
        assert [v["check"] for v in report["violations"]] == ["golden.layers.2.size"]


def test_table_format(run_cli):
    code, out, _ = run_cli("analyze", CORPUS / "complete_05.facets", "--k", "2")
    assert code == 0 and out.startswith("analyze  status=pass")
    assert not out.lstrip().startswith("{")


def test_output_file_and_timing(run_cli, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run_cli("plan", "--n", "100", "--k", "2", "--format", "json",
                           "--output", target, "--timing")
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["runtime_ms"] >= 0


def test_threads_env_default(monkeypatch):
    from spreadkit import cli
    monkeypatch.setenv("SPREADKIT_THREADS", "3")
    assert cli.build_parser().parse_args(["plan", "--n", "9", "--k", "2"]).threads == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spreadkit", "plan", "--n", "64", "--k", "2",
                           "--format", "json"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["command"] == "plan"


def test_canonical_values():
    assert canonical_value(Fraction(3, 4)) == "3/4"
    assert canonical_value(Fraction(4, 2)) == "2"
    assert canonical_value(1 / 3) == 0.333333333333
    assert canonical_value(float("inf")) == "inf"
    assert dumps({"b": 1, "a": [1.0]}) == '{\n  "a": [\n    1.0\n  ],\n  "b": 1\n}\n'
    with pytest.raises(TypeError):
        canonical_value(object())

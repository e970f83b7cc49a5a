from __future__ import annotations

import json
import subprocess
import sys

import pytest

from strandlab.cli import main

from conftest import fixture_path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestValidate:
    @pytest.mark.parametrize(
        "name",
        [
            "r1_space",
            "r1_t5_space",
            "r1_system",
            "nack_protocol",
            "ping_space",
        ],
    )
    def test_well_formed_fixtures(self, capsys, name):
        assert run_cli("validate", fixture_path(name)) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_cross_agent_conflict_fails(self, tmp_path, capsys):
        body = {
            "kind": "extended-space",
            "messages": ["u"],
            "agents": ["a", "b"],
            "strands": [
                {"id": "s1", "agent": "a", "trace": ["+u"]},
                {"id": "s2", "agent": "b", "trace": ["-u"]},
            ],
            "conflicts": [["s1", "s2"]],
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(body))
        assert run_cli("validate", path) == 1
        assert "conflict pair spans agents" in capsys.readouterr().out

    def test_non_prefix_closed_system_fails(self, tmp_path, capsys):
        body = {
            "kind": "system",
            "agents": ["a"],
            "histories": {"a": [[], ["sent u", "sent v"]]},
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(body))
        assert run_cli("validate", path) == 1
        assert "prefix" in capsys.readouterr().out

    def test_malformed_json_is_usage_error(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert run_cli("validate", path) == 2
        assert "not valid JSON" in capsys.readouterr().err

    def test_missing_file_is_usage_error(self, tmp_path):
        assert run_cli("validate", tmp_path / "absent.json") == 2


class TestEnumerate:
    def test_bundles_output_parses(self, capsys):
        assert run_cli("enumerate", fixture_path("ping_space"), "--bundles") == 0
        body = json.loads(capsys.readouterr().out)
        assert body["kind"] == "bundles"
        # the ping space has exactly three bundles up to 2 nodes
        assert len(body["bundles"]) == 3

    def test_translate_output_shape(self, capsys):
        assert (
            run_cli(
                "enumerate",
                fixture_path("ping_space"),
                "--translate",
                "--horizon",
                2,
            )
            == 0
        )
        body = json.loads(capsys.readouterr().out)
        assert body["kind"] == "runs" and body["horizon"] == 2
        assert all(len(run) == 3 for run in body["runs"])

    def test_gen_system_requires_system_file(self, capsys):
        assert run_cli("enumerate", fixture_path("r1_space"), "--gen-system") == 2
        assert "system file" in capsys.readouterr().err

    def test_run_protocol_out_file(self, tmp_path):
        out = tmp_path / "runs.json"
        assert (
            run_cli(
                "enumerate",
                fixture_path("nack_protocol"),
                "--run-protocol",
                "--horizon",
                3,
                "--out",
                out,
            )
            == 0
        )
        assert json.loads(out.read_text())["kind"] == "runs"

    def test_repeated_runs_are_byte_identical(self, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"chains{i}.json"
            assert (
                run_cli(
                    "enumerate",
                    fixture_path("nack_space"),
                    "--chains",
                    "--horizon",
                    3,
                    "--max-nodes",
                    6,
                    "--out",
                    out,
                )
                == 0
            )
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_negative_horizon_is_usage_error(self):
        assert (
            run_cli(
                "enumerate", fixture_path("ping_space"), "--translate", "--horizon", -1
            )
            == 2
        )


class TestCheck:
    def test_equal_runs(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        for out in (a, b):
            run_cli(
                "enumerate",
                fixture_path("nack_system"),
                "--gen-system",
                "--horizon",
                3,
                "--out",
                out,
            )
        assert run_cli("check", "--equal", a, b) == 0
        assert "PASS" in capsys.readouterr().out

    def test_unequal_runs(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        run_cli(
            "enumerate", fixture_path("nack_space"), "--translate",
            "--horizon", 6, "--max-nodes", 6, "--out", a,
        )
        run_cli(
            "enumerate", fixture_path("nack_protocol"), "--run-protocol",
            "--horizon", 6, "--out", b,
        )
        assert run_cli("check", "--equal", a, b) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_history_preserving_pass(self, tmp_path, capsys):
        runs = tmp_path / "runs.json"
        run_cli(
            "enumerate", fixture_path("ping_space"), "--translate",
            "--horizon", 4, "--max-nodes", 2, "--out", runs,
        )
        assert (
            run_cli(
                "check", "--history-preserving", fixture_path("ping_space"), runs,
                "--max-nodes", 2,
            )
            == 0
        )
        assert "PASS" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "n,fixture",
        [
            (1, "ping_space"),
            (2, "ping_space"),
            (4, "r1_t5_space"),
            (5, "nack_system"),
            (6, "nack_protocol"),
            (7, "u1u2u3_protocol"),
        ],
    )
    def test_theorems_pass_on_fixtures(self, capsys, n, fixture):
        assert run_cli("check", "--theorem", n, fixture_path(fixture)) == 0
        assert capsys.readouterr().out.startswith("PASS")

    def test_theorem_3_takes_space_and_system(self, capsys):
        assert (
            run_cli(
                "check", "--theorem", 3,
                fixture_path("r1_space"), fixture_path("r1_system"),
            )
            == 0
        )
        assert capsys.readouterr().out.startswith("PASS")

    @pytest.mark.parametrize("n,fixture", [(1, "r1_space"), (2, "nack_space")])
    def test_lemmas_pass_on_fixtures(self, capsys, n, fixture):
        assert run_cli("check", "--lemma", n, fixture_path(fixture)) == 0
        assert capsys.readouterr().out.startswith("PASS")

    def test_theorem_4_needs_conflicts(self, capsys):
        assert run_cli("check", "--theorem", 4, fixture_path("r1_space")) == 2
        assert "extended space" in capsys.readouterr().err

    def test_theorem_7_rejects_non_monotone(self, capsys):
        assert run_cli("check", "--theorem", 7, fixture_path("nack_protocol")) == 2
        assert "monotone" in capsys.readouterr().err

    def test_wrong_arity_is_usage_error(self):
        assert run_cli("check", "--theorem", 1) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "strandlab.cli", "validate", str(fixture_path("r1_space"))],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "ok"

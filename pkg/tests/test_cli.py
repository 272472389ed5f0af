import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from entrolab.cli import main

REPO = Path(__file__).resolve().parent.parent


def run_cli(args, env_extra=None, cwd=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run(
        [sys.executable, "-m", "entrolab.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd or REPO,
    )


class TestEstimate:
    def test_writes_artifacts_and_summary(self, tmp_path):
        out = tmp_path / "art"
        code = main(
            [
                "estimate",
                "--system",
                "rotation:p=1,q=9",
                "--eps-grid",
                "0.5,0.25,0.125",
                "--n-max",
                "4",
                "--out",
                str(out),
                "--format",
                "both",
            ]
        )
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schema_version"] == "1"
        assert set(summary["methods"]) == {"cover", "span", "sep"}
        assert "max_abs" in summary["discrepancy"]
        for method in ("cover", "span", "sep"):
            assert (out / f"{method}.csv").exists()
        sweep = json.loads((out / "sweep.json").read_text())
        assert sweep["schema_version"] == "1"

    def test_rotation_rates_trend_to_zero(self, tmp_path):
        out = tmp_path / "art"
        assert (
            main(
                [
                    "estimate",
                    "--system",
                    "rotation:p=1,q=11",
                    "--eps-grid",
                    "0.5,0.25,0.125",
                    "--n-max",
                    "5",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        sweep = json.loads((out / "sweep.json").read_text())
        for entries in sweep["methods"].values():
            for est in entries:
                counts = est["counts"]
                assert len(set(counts)) == 1  # isometry: constant in n
                assert est["log_rates"][-1] == min(est["log_rates"])

    def test_eps_entry_above_one_exits_2(self, tmp_path, capsys):
        code = main(
            [
                "estimate",
                "--system",
                "rotation:p=1,q=5",
                "--eps-grid",
                "1.5,0.5",
                "--out",
                str(tmp_path / "x"),
            ]
        )
        assert code == 2
        assert "1.5" in capsys.readouterr().err

    def test_bad_system_exits_2(self, tmp_path):
        assert (
            main(
                [
                    "estimate",
                    "--system",
                    "dyadic_doubling:m=1",
                    "--out",
                    str(tmp_path / "x"),
                ]
            )
            == 2
        )

    def test_unwritable_out_exits_3(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("file, not a directory")
        code = main(
            [
                "estimate",
                "--system",
                "rotation:p=1,q=5",
                "--eps-grid",
                "0.5,0.25",
                "--n-max",
                "3",
                "--out",
                str(target / "nested"),
            ]
        )
        assert code == 3

    def test_config_file_with_flag_overrides(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(
            json.dumps(
                {
                    "system": {"kind": "rotation", "p": 1, "q": 7},
                    "methods": ["span"],
                    "eps_grid": [0.5, 0.25],
                    "n_max": 3,
                }
            )
        )
        out = tmp_path / "art"
        assert (
            main(["estimate", "--config", str(cfg), "--n-max", "4", "--out", str(out)])
            == 0
        )
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_max"] == 4
        assert list(summary["methods"]) == ["span"]

    def test_custom_system_from_csv(self, tmp_path):
        pts = tmp_path / "traj.csv"
        rows = []
        x = 0.2
        for _ in range(30):
            rows.append(f"{x},0.0")
            x = 4.0 * x * (1.0 - x)
        pts.write_text("\n".join(rows) + "\n")
        cfg = tmp_path / "run.json"
        cfg.write_text(
            json.dumps(
                {
                    "system": {"kind": "custom", "points": str(pts)},
                    "methods": ["span"],
                    "eps_grid": [0.5, 0.25],
                    "n_max": 3,
                }
            )
        )
        assert main(["estimate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


class TestDeterminism:
    def test_thread_count_does_not_change_bytes(self, tmp_path):
        args = [
            "estimate",
            "--system",
            "dyadic_doubling:m=5",
            "--eps-grid",
            "0.5,0.25,0.125",
            "--n-max",
            "5",
            "--format",
            "both",
        ]
        outputs = {}
        for threads in ("1", "8"):
            out = tmp_path / f"t{threads}"
            proc = run_cli(
                args + ["--out", str(out)], env_extra={"ENTROLAB_THREADS": threads}
            )
            assert proc.returncode == 0, proc.stderr
            outputs[threads] = {
                p.name: p.read_bytes() for p in sorted(out.iterdir())
            }
        assert outputs["1"] == outputs["8"]

    def test_repeat_runs_identical(self, tmp_path):
        args = [
            "estimate",
            "--system",
            "rotation:p=2,q=13",
            "--eps-grid",
            "0.5,0.25",
            "--n-max",
            "4",
        ]
        blobs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            assert main(args + ["--out", str(out)]) == 0
            blobs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        assert blobs[0] == blobs[1]


class TestVerify:
    def test_default_passes(self, tmp_path, capsys):
        code = main(
            [
                "verify",
                "--system",
                "rotation:p=1,q=8",
                "--eps-grid",
                "0.5,0.25",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 0
        report = json.loads((tmp_path / "verify_report.json").read_text())
        assert report["ok"]
        names = {r["invariant"] for r in report["invariants"]}
        assert "sandwich_metric" in names and "lebesgue_lemma" in names

    def test_scale_guard(self, capsys):
        code = main(["verify", "--system", "rotation:p=1,q=509"])
        assert code == 2
        assert "guard" in capsys.readouterr().err

    def test_asymmetric_custom_input_exits_2(self, tmp_path):
        dist = tmp_path / "pts.csv"
        dist.write_text("0,0\nnope\n")
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"system": {"kind": "custom", "points": str(dist)}})
        )
        assert main(["verify", "--config", str(cfg)]) == 2


class TestCat:
    def test_bundled_corpus_passes(self, tmp_path):
        code = main(["cat", "--trials", "40", "--entangle", "15", "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "cat_report.json").read_text())
        assert report["ok"]
        assert {r["invariant"] for r in report["lemmas"]} >= {
            "pointwise_transformation",
            "kan_universal",
            "colimit_preservation",
            "entangled_colimits",
        }

    def test_fixture_corpus(self, tmp_path):
        fixture = {
            "schema_version": "1",
            "cases": [
                {
                    "dom": [[True, True], [False, True]],
                    "cod": [[True, True, True], [False, True, True], [False, False, True]],
                    "maps": [[0, 1], [0, 2], [1, 1]],
                }
            ],
        }
        fdir = tmp_path / "fixtures"
        fdir.mkdir()
        (fdir / "case1.json").write_text(json.dumps(fixture))
        assert main(["cat", "--fixtures", str(fdir)]) == 0

    def test_invalid_fixture_map_exits_2(self, tmp_path):
        fixture = {
            "schema_version": "1",
            "cases": [
                {
                    "dom": [[True, True], [False, True]],
                    "cod": [[True, False], [False, True]],
                    "maps": [[0, 1], [1, 0]],  # second map is not monotone
                }
            ],
        }
        fdir = tmp_path / "fixtures"
        fdir.mkdir()
        (fdir / "bad.json").write_text(json.dumps(fixture))
        assert main(["cat", "--fixtures", str(fdir)]) == 2

    def test_empty_fixture_dir_exits_2(self, tmp_path):
        fdir = tmp_path / "fixtures"
        fdir.mkdir()
        assert main(["cat", "--fixtures", str(fdir)]) == 2


class TestReport:
    def _make_artifacts(self, tmp_path):
        out = tmp_path / "art"
        assert (
            main(
                [
                    "estimate",
                    "--system",
                    "rotation:p=1,q=7",
                    "--eps-grid",
                    "0.5,0.25",
                    "--n-max",
                    "3",
                    "--out",
                    str(out),
                    "--format",
                    "json",
                ]
            )
            == 0
        )
        return out

    def test_tidy_csv(self, tmp_path, capsys):
        out = self._make_artifacts(tmp_path)
        assert main(["report", "--artifacts", str(out)]) == 0
        text = capsys.readouterr().out
        lines = text.strip().split("\n")
        assert lines[0] == "method,eps,n,log_rate"
        # 3 methods x 2 grains x 3 horizons
        assert len(lines) == 1 + 18

    def test_single_method(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "system": {"kind": "rotation", "p": 1, "q": 7},
                    "methods": ["sep"],
                    "eps_grid": [0.5, 0.25],
                    "n_max": 3,
                }
            )
        )
        out = tmp_path / "art"
        assert main(["estimate", "--config", str(cfg), "--out", str(out)]) == 0
        assert main(["report", "--artifacts", str(out)]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert all(line.startswith("sep,") for line in lines[1:])

    def test_corrupt_json_exits_3(self, tmp_path, capsys):
        out = tmp_path / "art"
        out.mkdir()
        (out / "sweep.json").write_text('{"methods": {"span": [not json')
        assert main(["report", "--artifacts", str(out)]) == 3
        assert "line" in capsys.readouterr().err

    def test_missing_artifacts_exit_3(self, tmp_path):
        assert main(["report", "--artifacts", str(tmp_path / "nowhere")]) == 3


def test_entry_point_runs():
    proc = run_cli(["estimate", "--system", "rotation:p=1,q=5", "--eps-grid", "0.5,0.25", "--n-max", "3", "--out", "/tmp/entrolab_cli_smoke"])
    assert proc.returncode == 0, proc.stderr

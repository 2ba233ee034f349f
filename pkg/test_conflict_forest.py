#!/usr/bin/env python3
"""
Tests for the conflict_forest command line interface.
"""

import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

# Add current directory to path to import modules
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from conflict_forest import EXIT_CAP, EXIT_INPUT, EXIT_OK, EXIT_VERIFY, main


class TestCommandLine(unittest.TestCase):

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())
        self.stdout = io.StringIO()
        self.stderr = io.StringIO()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def run_cli(self, *argv):
        self.stdout, self.stderr = io.StringIO(), io.StringIO()
        with patch("sys.stdout", self.stdout), patch("sys.stderr", self.stderr):
            return main([str(a) for a in argv])

    def path(self, name):
        return self.test_dir / name

    def test_wheel_schedule_and_verify(self):
        self.assertEqual(self.run_cli("gen", "wheel", "--k", 3, "--out", self.path("w.json")), EXIT_OK)
        instance = json.loads(self.path("w.json").read_text())
        self.assertEqual(len(instance["nodes"]), 55)
        self.assertEqual(instance["format"], 1)

        code = self.run_cli("schedule", self.path("w.json"), "--algo", "mst-greedy", "--out", self.path("r.json"))
        self.assertEqual(code, EXIT_OK)
        report = json.loads(self.path("r.json").read_text())
        self.assertEqual(report["algorithm"], "mst-greedy")
        self.assertGreaterEqual(report["stats"]["slot_count"], 3)
        self.assertTrue(report["verification"]["feasible"])

        self.assertEqual(self.run_cli("verify", self.path("w.json"), self.path("r.json")), EXIT_OK)
        self.assertIn("OK:", self.stdout.getvalue())

    def test_tampered_report_fails_verification(self):
        self.run_cli("gen", "wheel", "--k", 3, "--out", self.path("w.json"))
        self.run_cli("schedule", self.path("w.json"), "--algo", "conn", "--out", self.path("r.json"))
        report = json.loads(self.path("r.json").read_text())
        report["slots"] = [sorted(link for slot in report["slots"] for link in slot)]
        self.path("bad.json").write_text(json.dumps(report))
        self.assertEqual(self.run_cli("verify", self.path("w.json"), self.path("bad.json")), EXIT_VERIFY)
        self.assertIn("Verification failed", self.stdout.getvalue())

    def test_dual_conn_report(self):
        self.run_cli("gen", "random", "--model", "explicit", "--n", 6, "--links", 9, "--seed", 2,
                     "--out", self.path("x.json"))
        code = self.run_cli("schedule", self.path("x.json"), "--dual", "--rho", "--out", self.path("d.json"))
        self.assertEqual(code, EXIT_OK)
        report = json.loads(self.path("d.json").read_text())
        self.assertTrue(report["dual"])
        self.assertEqual(report["stats"]["slot_count"], 2 * len(report["slots"]))
        self.assertIn("rho_estimate", report["stats"])
        self.assertEqual(self.run_cli("verify", self.path("x.json"), self.path("d.json")), EXIT_OK)

    def test_steiner_on_wheel(self):
        self.run_cli("gen", "wheel", "--k", 4, "--steiner", "--model", "line", "--out", self.path("s.json"))
        code = self.run_cli("schedule", self.path("s.json"), "--algo", "steiner", "--out", self.path("r.json"))
        self.assertEqual(code, EXIT_OK)
        report = json.loads(self.path("r.json").read_text())
        self.assertLessEqual(report["stats"]["slot_count"], report["stats"]["load"] + 1)
        self.assertEqual(self.run_cli("verify", self.path("s.json"), self.path("r.json")), EXIT_OK)

    def test_steiner_needs_terminals(self):
        self.run_cli("gen", "wheel", "--k", 3, "--out", self.path("w.json"))
        self.assertEqual(self.run_cli("schedule", self.path("w.json"), "--algo", "steiner"), EXIT_INPUT)

    def test_oracle_schedule(self):
        self.run_cli("gen", "random", "--model", "explicit", "--n", 5, "--links", 7, "--seed", 3,
                     "--out", self.path("x.json"))
        self.assertEqual(self.run_cli("oracle", self.path("x.json"), "--mode", "schedule"), EXIT_OK)
        result = json.loads(self.stdout.getvalue())
        self.assertEqual(result["mode"], "schedule")
        self.assertEqual(result["baseline_source"], "conn")
        self.assertGreaterEqual(result["ratio"], 1.0)
        self.assertEqual(sum(len(slot) for slot in result["witness"]), 4)

    def test_oracle_forest_and_cap(self):
        self.run_cli("gen", "random", "--model", "explicit", "--n", 5, "--links", 7, "--seed", 3,
                     "--out", self.path("x.json"))
        self.assertEqual(self.run_cli("oracle", self.path("x.json"), "--mode", "forest"), EXIT_OK)
        result = json.loads(self.stdout.getvalue())
        self.assertGreaterEqual(result["optimum"], result["baseline"])

        self.run_cli("gen", "wheel", "--k", 3, "--out", self.path("w.json"))
        self.assertEqual(self.run_cli("oracle", self.path("w.json"), "--mode", "schedule"), EXIT_CAP)
        self.assertIn("CONFLICT_FOREST_CAPS", self.stderr.getvalue())

    def test_dual_needs_conn(self):
        self.run_cli("gen", "wheel", "--k", 3, "--out", self.path("w.json"))
        code = self.run_cli("schedule", self.path("w.json"), "--algo", "mst-greedy", "--dual")
        self.assertEqual(code, EXIT_INPUT)
        self.assertIn("--dual", self.stderr.getvalue())

    def test_forest_oracle_warns_about_prior(self):
        self.run_cli("gen", "random", "--model", "explicit", "--n", 5, "--links", 7, "--seed", 3,
                     "--out", self.path("x.json"))
        self.run_cli("schedule", self.path("x.json"), "--out", self.path("r.json"))
        with self.assertLogs("conflict_forest", level="WARNING") as logs:
            code = self.run_cli("oracle", self.path("x.json"), "--mode", "forest", "--prior", self.path("r.json"))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(any("--prior is ignored" in line for line in logs.output))
        self.assertEqual(json.loads(self.stdout.getvalue())["baseline_source"], "cap_kruskal")

    def test_input_errors(self):
        self.path("broken.json").write_text("{\"format\": 1}")
        self.assertEqual(self.run_cli("schedule", self.path("broken.json")), EXIT_INPUT)
        self.assertEqual(self.run_cli("schedule", self.path("absent.json")), EXIT_INPUT)
        self.assertEqual(self.run_cli("gen", "random"), EXIT_INPUT)
        self.run_cli("gen", "grid", "--rows", 2, "--cols", 2, "--out", self.path("g.json"))
        self.assertEqual(self.run_cli("schedule", self.path("g.json"), self.path("g.json")), EXIT_INPUT)

    def test_batch_with_jobs(self):
        for seed in (1, 2, 3):
            self.run_cli("gen", "random", "--n", 7, "--p", 1.0, "--pi", 5.0, "--seed", seed,
                         "--model", "sinr", "--out", self.path(f"r{seed}.json"))
        inputs = [self.path(f"r{seed}.json") for seed in (1, 2, 3)]
        code = self.run_cli("schedule", *inputs, "--out-dir", self.path("reports"), "--jobs", 2)
        self.assertEqual(code, EXIT_OK)
        for seed in (1, 2, 3):
            report = json.loads(self.path(f"reports/r{seed}.conn.json").read_text())
            self.assertTrue(report["verification"]["spanning"])

    def test_mst_length_class_on_grid(self):
        self.run_cli("gen", "grid", "--rows", 3, "--cols", 3, "--spacing", 2.0, "--model", "sinr",
                     "--out", self.path("g.json"))
        code = self.run_cli("schedule", self.path("g.json"), "--algo", "mst-length-class",
                            "--out", self.path("r.json"))
        self.assertEqual(code, EXIT_OK)

    def test_mst_length_class_on_wheel(self):
        self.run_cli("gen", "wheel", "--k", 3, "--out", self.path("w.json"))
        code = self.run_cli("schedule", self.path("w.json"), "--algo", "mst-length-class",
                            "--out", self.path("r.json"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(self.run_cli("verify", self.path("w.json"), self.path("r.json")), EXIT_OK)

    def test_reruns_are_byte_identical(self):
        for name in ("a", "b"):
            self.run_cli("gen", "random", "--n", 8, "--seed", 12, "--out", self.path(f"{name}.json"))
            self.run_cli("schedule", self.path(f"{name}.json"), "--out", self.path(f"{name}.report.json"))
        self.assertEqual(self.path("a.json").read_bytes(), self.path("b.json").read_bytes())
        self.assertEqual(self.path("a.report.json").read_bytes(), self.path("b.report.json").read_bytes())


if __name__ == "__main__":
    unittest.main()

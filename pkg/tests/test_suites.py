"""
Tests for the construction registry, verification suites, bench tables and the command line
"""

import csv
import io
import json
import tempfile
import unittest
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np

import fanq_cli
from fanq.errors import UnknownConstructionError
from fanq.simulator import StateVector
from fanq.suites import (
    bench_rows, build_construction, check, coerce_params, parse_params, registry, run_suite,
)
from fanq.suites.checks import _sample_outcomes


def run_cli(*argv):
    """(stdout, stderr, exit code) of one CLI invocation"""
    out, err = io.StringIO(), io.StringIO()
    code = 0
    with redirect_stdout(out), redirect_stderr(err):
        try:
            fanq_cli.main(list(argv))
        except SystemExit as e:
            code = e.code
    return out.getvalue(), err.getvalue(), code


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestRegistry(unittest.TestCase):

    def test_builtins_registered(self):
        names = registry.suite_names()
        self.assertEqual(len(names), 18)
        self.assertEqual(names[0], "fanout-parity")
        self.assertIn("or-approx", registry.construction_names())
        self.assertIn("qfp", registry.procedures)
        self.assertIn("phase-estimation", registry.procedures)

    def test_unknown_names(self):
        with self.assertRaises(UnknownConstructionError) as ctx:
            registry.get_suite("nope")
        self.assertIn("unknown suite 'nope'", str(ctx.exception))
        with self.assertRaises(UnknownConstructionError):
            build_construction("nope")

    def test_params(self):
        self.assertEqual(parse_params(["n=3", "mode=ideal"]), {"n": "3", "mode": "ideal"})
        with self.assertRaises(ValueError):
            parse_params(["n"])
        params = coerce_params({"n": 8, "phi": 0.5}, {"n": "4"})
        self.assertEqual(params, {"n": 4, "phi": 0.5})
        self.assertIsInstance(coerce_params({"phi": 0.5}, {"phi": "1"})["phi"], float)
        with self.assertRaises(ValueError):
            coerce_params({"n": 8}, {"m": "2"})

    def test_build_construction(self):
        c = build_construction("parity-from-fanout", {"n": "3"})
        self.assertEqual(len(c.register("x")), 3)


class TestChecks(unittest.TestCase):

    def test_relations(self):
        self.assertTrue(check("a", 1.0, 1.0 + 1e-12).passed)
        self.assertFalse(check("b", 3, 2, tolerance=0.0, relation="le").passed)
        self.assertTrue(check("c", 3, 2, tolerance=0.0, relation="ge").passed)
        self.assertTrue(check("d", "000", "000", relation="eq").passed)
        with self.assertRaises(ValueError):
            check("e", 1, 1, relation="near")

    def test_fanout_parity_suite(self):
        report = run_suite("fanout-parity")
        self.assertTrue(report.passed)
        self.assertEqual(len(report.checks), 8)
        rows = report.rows()
        self.assertEqual(rows[0]["suite"], "fanout-parity")
        self.assertEqual([r["check"] for r in rows], sorted(r["check"] for r in rows))

    def test_sampled_outcomes_come_from_the_state(self):
        rng = np.random.default_rng(3)
        state = StateVector(np.array([0, 0, 1, 1]) / np.sqrt(2))
        self.assertEqual(_sample_outcomes(state, [0], 100, rng), {"1": 100})
        counts = _sample_outcomes(state, [1], 100, rng)
        self.assertEqual(sorted(counts), ["0", "1"])
        self.assertEqual(sum(counts.values()), 100)

    def test_threshold_suite(self):
        report = run_suite("threshold", seed=1)
        self.assertTrue(report.passed)
        self.assertIn("approx/n=3,t=2/sampled", [c.check_id for c in report.checks])


class TestBench(unittest.TestCase):

    def test_scaled_rows(self):
        rows = bench_rows("or-reduce", [4, 8])
        self.assertEqual([r["n"] for r in rows], [4, 8])
        for row in rows:
            self.assertEqual(row["depth"], 3)
            self.assertIn("size_ratio", row)
            self.assertGreater(row["qubits"], row["n"])

    def test_d_ignored_without_parameter(self):
        rows = bench_rows("mod-q", [3, 5], [1, 2])
        self.assertEqual([(r["n"], r["d"]) for r in rows], [(3, 1), (5, 1)])

    def test_parse_range(self):
        self.assertEqual(fanq_cli.parse_range("16..128", geometric=True), [16, 32, 64, 128])
        self.assertEqual(fanq_cli.parse_range("1..3", geometric=False), [1, 2, 3])
        self.assertEqual(fanq_cli.parse_range("4,8,12", geometric=False), [4, 8, 12])
        with self.assertRaises(ValueError):
            fanq_cli.parse_range("8..4", geometric=True)


class TestCli(unittest.TestCase):

    def test_build_then_simulate(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = str(Path(tmp) / "or2.json")
            out, _, code = run_cli("build", "or-approx", "n=2", "--out", path)
            self.assertEqual(code, 0)
            (row,) = csv_rows(out)
            self.assertEqual(row["construction"], "or-approx")
            self.assertEqual(json.loads(Path(path).read_text())["format"], "fanq-circuit")

            out, _, code = run_cli("simulate", path, "--input", "all")
            self.assertEqual(code, 0)
            rows = csv_rows(out)
            self.assertEqual({r["input"] for r in rows}, {"00", "10", "01", "11"})
            zero = [r for r in rows if r["input"] == "00"]
            self.assertEqual(len(zero), 1)
            self.assertEqual((zero[0]["register"], zero[0]["value"]), ("out", "0"))
            self.assertAlmostEqual(float(zero[0]["probability"]), 1.0)

    def test_simulate_shots(self):
        out, _, code = run_cli("simulate", "parity-from-fanout", "n=2", "--input", "11", "--shots", "20")
        self.assertEqual(code, 0)
        (row,) = csv_rows(out)
        self.assertEqual((row["outcome"], row["count"]), ("0", "20"))

    def test_procedure(self):
        out, _, code = run_cli("simulate", "phase-estimation", "n=2", "m=4", "--shots", "8", "--format", "json")
        self.assertEqual(code, 0)
        rows = json.loads(out)
        self.assertEqual(rows[-1]["x"], "all")
        self.assertEqual(rows[-1]["trials"], 8)
        self.assertEqual(rows[-1]["queries"], 8)

    def test_verify(self):
        out, _, code = run_cli("verify", "fanout-parity")
        self.assertEqual(code, 0)
        rows = csv_rows(out)
        self.assertEqual(len(rows), 8)
        self.assertTrue(all(r["passed"] == "True" for r in rows))

    def test_bench(self):
        out, _, code = run_cli("bench", "or-reduce", "--n", "4..16")
        self.assertEqual(code, 0)
        self.assertEqual([r["n"] for r in csv_rows(out)], ["4", "8", "16"])

    def test_errors_exit_one(self):
        _, err, code = run_cli("frobnicate")
        self.assertEqual(code, 1)
        self.assertIn("Unknown command", err)
        _, err, code = run_cli("build", "nope")
        self.assertEqual(code, 1)
        self.assertIn("unknown construction 'nope'", err)
        _, _, code = run_cli("build", "or-approx", "size=3")
        self.assertEqual(code, 1)
        _, _, code = run_cli("simulate", "or-approx", "n=2", "--input", "101")
        self.assertEqual(code, 1)
        _, _, code = run_cli("build")
        self.assertEqual(code, 1)

    def test_version_and_list(self):
        out, _, _ = run_cli("version")
        self.assertIn("fanq", out)
        out, _, _ = run_cli("list")
        self.assertIn("suites:", out)
        self.assertIn("fanout-parity", out)


if __name__ == '__main__':
    unittest.main()

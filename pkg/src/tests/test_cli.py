import io
import os
import sys
import unittest
from contextlib import redirect_stderr, redirect_stdout

import pandas as pd

# Add the project root to sys.path
current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.bench.cli import cli_main, parse_seeds
from src.tests.test_config import cleanup_test_dir, create_temp_test_dir


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_main(argv)
    return code, out.getvalue(), err.getvalue()


class TestParseSeeds(unittest.TestCase):
    def test_forms(self):
        self.assertEqual(parse_seeds("7"), [7])
        self.assertEqual(parse_seeds("1,2,3"), [1, 2, 3])
        self.assertEqual(parse_seeds("0-4"), [0, 1, 2, 3, 4])

    def test_invalid(self):
        for text in ("", "a,b", "5-2"):
            with self.assertRaises(ValueError):
                parse_seeds(text)


class TestCli(unittest.TestCase):
    def setUp(self):
        self.test_dir = create_temp_test_dir()

    def tearDown(self):
        cleanup_test_dir(self.test_dir)

    def test_unknown_flag(self):
        code, _, _ = invoke(["run", "--func", "branin", "--bogus", "1"])
        self.assertEqual(code, 2)

    def test_invalid_algorithm_names_the_flag(self):
        code, _, err = invoke(["run", "--func", "branin", "--algo", "rembo", "--out", str(self.test_dir / "x.csv")])
        self.assertEqual(code, 2)
        self.assertIn("--algo", err)

    def test_invalid_seeds(self):
        code, _, err = invoke(["run", "--func", "branin", "--seeds", "9-1"])
        self.assertEqual(code, 2)
        self.assertIn("--seeds", err)

    def test_invalid_n0_for_random_search(self):
        code, _, err = invoke(
            [
                "run",
                "--func", "quadratic-bowl",
                "--algo", "random",
                "--budget", "10",
                "--n0", "10",
                "--out", str(self.test_dir / "random.csv"),
            ]
        )
        self.assertEqual(code, 2)
        self.assertIn("--n0", err)

    def test_describe_bowl(self):
        code, out, _ = invoke(["describe", "--func", "quadratic-bowl", "--dim", "20", "--log-level", "WARNING"])
        self.assertEqual(code, 0)
        self.assertIn("D: 20", out)
        self.assertIn("d_e: 2", out)
        self.assertIn("f_max: 0.000000", out)

    def test_describe_too_small_dimension(self):
        code, _, err = invoke(["describe", "--func", "hartmann3", "--dim", "2"])
        self.assertEqual(code, 2)
        self.assertIn("--dim", err)

    def test_run_random_writes_csv(self):
        out = self.test_dir / "random.csv"
        code, stdout, _ = invoke(
            [
                "run",
                "--func", "quadratic-bowl",
                "--dim", "6",
                "--algo", "random",
                "--budget", "5",
                "--seeds", "0-1",
                "--out", str(out),
                "--log-level", "WARNING",
            ]
        )
        self.assertEqual(code, 0)
        self.assertIn("median simple regret", stdout)
        frame = pd.read_csv(out, dtype={"seed": str})
        self.assertEqual(len(frame), 11)
        self.assertEqual(frame["seed"].iloc[-1], "summary")

    def test_selftest_passes(self):
        code, out, _ = invoke(["selftest", "--log-level", "ERROR"])
        self.assertEqual(code, 0)
        self.assertIn("8/8 checks passed", out)


if __name__ == "__main__":
    unittest.main()

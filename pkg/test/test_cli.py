import contextlib
import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

from scott_spectra._utils import BudgetExceededError, ExtensionError, GameInvariantError
from scott_spectra.cli import EXIT_BUDGET, EXIT_FAILURE, EXIT_INPUT, EXIT_OK, main
from scott_spectra.kstruct import Report

SLOW = bool(os.environ.get("SCOTT_SPECTRA_SLOW"))

GOLDEN = os.path.join(os.path.dirname(__file__), "data", "finite_ranks.json")
FINITE_3 = '{"kind": "finite", "n": 3}'
OMEGA_ZETA = '{"kind": "limit_plus_zeta", "cnf": [[1, 1]]}'


def run(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestOrderInfo(unittest.TestCase):
    def test_finite(self):
        code, out = run("order-info", "--order", FINITE_3, "--json")
        self.assertEqual(code, EXIT_OK)
        result = json.loads(out)
        self.assertEqual((result["wf"], result["wfc"]), ("3", "3"))
        self.assertEqual(result["prefix"], ["0", "1", "2"])
        self.assertTrue(result["ok"])

    def test_limit_plus_zeta(self):
        code, out = run("order-info", "--order", OMEGA_ZETA, "--rn", "greedy", "--samples", "10", "--json")
        self.assertEqual(code, EXIT_OK)
        result = json.loads(out)
        self.assertEqual((result["wf"], result["wfc"]), ("ω", "ω+1"))
        self.assertFalse(result["well_founded"])
        self.assertEqual(result["rn"]["mode"], "greedy")

    def test_bad_input(self):
        self.assertEqual(run("order-info", "--order", '{"kind": "ordinal", "cnf": [[0, 1], [1, 1]]}')[0], EXIT_INPUT)
        self.assertEqual(run("order-info", "--order", "not json")[0], EXIT_INPUT)
        self.assertEqual(run("order-info")[0], EXIT_INPUT)
        self.assertEqual(run("order-info", "--order", FINITE_3, "--order", FINITE_3)[0], EXIT_INPUT)


class TestModelAndVerify(unittest.TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def _path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def test_model_then_axioms(self):
        code, out = run("model", "--order", FINITE_3, "--stages", "2", "--out", self._path("m.json"), "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["stage"], 2)
        code, out = run("verify", self._path("m.json"), "--suite", "axioms", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(out)["ok"])

    def test_model_is_deterministic(self):
        for name in ("a.json", "b.json"):
            self.assertEqual(run("model", "--order", OMEGA_ZETA, "--stages", "2", "--seed", "7",
                                 "--out", self._path(name))[0], EXIT_OK)
        with open(self._path("a.json"), "rb") as fa, open(self._path("b.json"), "rb") as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_model_zero_stages(self):
        self.assertEqual(run("model", "--order", FINITE_3, "--stages", "0", "--out", self._path("m.json"))[0],
                         EXIT_OK)
        self.assertTrue(os.path.isfile(self._path("m.json")))

    def test_model_bad_input(self):
        self.assertEqual(run("model", "--order", FINITE_3, "--stages", "-1", "--out", self._path("m.json"))[0],
                         EXIT_INPUT)
        self.assertEqual(run("model", "--order", FINITE_3)[0], EXIT_INPUT)

    def test_budget(self):
        with patch("scott_spectra.cli.grow", side_effect=BudgetExceededError("Node budget exhausted", [10])):
            code, _ = run("model", "--order", FINITE_3, "--out", self._path("m.json"))
        self.assertEqual(code, EXIT_BUDGET)
        self.assertFalse(os.path.exists(self._path("m.json")))

    def test_corrupt_snapshot(self):
        with open(self._path("bad.json"), "w") as f:
            f.write("{not json")
        self.assertEqual(run("verify", self._path("bad.json"))[0], EXIT_INPUT)
        self.assertEqual(run("verify", "--suite", "axioms")[0], EXIT_INPUT)

    def test_finite_rank_suite(self):
        code, out = run("verify", "--suite", "finite-rank", "--golden", GOLDEN, "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["suite"], "finite-rank")
        self.assertEqual(run("verify", "--suite", "finite-rank")[0], EXIT_INPUT)
        self.assertEqual(run("verify", "--suite", "finite-rank", "--golden", self._path("missing.json"))[0],
                         EXIT_INPUT)

    def test_greedy_finite_has_no_games(self):
        # siblings of a greedy finite order are never E-related, so no position can be played
        self.assertEqual(run("model", "--order", FINITE_3, "--rn", "greedy", "--stages", "3",
                             "--out", self._path("m.json"))[0], EXIT_OK)
        code, out = run("verify", self._path("m.json"), "--suite", "games", "--samples", "50", "--json")
        self.assertEqual(code, EXIT_FAILURE)
        result = json.loads(out)
        self.assertFalse(result["ok"])
        self.assertFalse(result["checks"]["played"]["pass"])

        code, out = run("verify", self._path("m.json"), "--suite", "freeness", "--json")
        self.assertEqual(code, EXIT_FAILURE)
        self.assertEqual(set(json.loads(out)["checks"]), {"evidenced"})

    def test_game_errors_are_failures(self):
        self.assertEqual(run("model", "--order", FINITE_3, "--stages", "3", "--out", self._path("m.json"))[0],
                         EXIT_OK)
        with patch("scott_spectra.cli.free_witness_evidence",
                   side_effect=GameInvariantError("Defender lost round 1", [(1,), (2,)])):
            self.assertEqual(run("verify", self._path("m.json"), "--suite", "freeness")[0], EXIT_FAILURE)
        with patch("scott_spectra.cli.grow", side_effect=ExtensionError("Extension failed", [])):
            self.assertEqual(run("model", "--order", FINITE_3, "--out", self._path("n.json"))[0], EXIT_FAILURE)

    def test_snapshot_seed(self):
        self.assertEqual(run("model", "--order", FINITE_3, "--stages", "3", "--seed", "7",
                             "--out", self._path("m.json"))[0], EXIT_OK)
        with patch("scott_spectra.cli.free_witness_evidence", return_value=Report()) as evidence:
            self.assertEqual(run("verify", self._path("m.json"), "--suite", "freeness")[0], EXIT_OK)
            self.assertEqual({c.kwargs["seed"] for c in evidence.call_args_list}, {7})
            evidence.reset_mock()
            self.assertEqual(run("verify", self._path("m.json"), "--suite", "freeness", "--seed", "2")[0], EXIT_OK)
            self.assertEqual({c.kwargs["seed"] for c in evidence.call_args_list}, {2})

    @unittest.skipUnless(SLOW, "set SCOTT_SPECTRA_SLOW to run the game and freeness suites")
    def test_game_suites(self):
        self.assertEqual(run("model", "--order", FINITE_3, "--stages", "3", "--out", self._path("m.json"))[0],
                         EXIT_OK)
        for suite in ("games", "freeness"):
            code, out = run("verify", self._path("m.json"), "--suite", suite, "--samples", "5", "--depth", "2",
                            "--json")
            self.assertEqual(code, EXIT_OK, out)


class TestSpectrum(unittest.TestCase):
    def test_two_orders(self):
        code, out = run("spectrum", "--order", FINITE_3, "--order", OMEGA_ZETA)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("spectrum: {3, ω+1}", out.splitlines())

    def test_wf_mode(self):
        code, out = run("spectrum", "--order", OMEGA_ZETA, "--mode", "wf", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["entries"], [[[1, 1]]])

    def test_order_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "order.json")
            with open(path, "w") as f:
                f.write(FINITE_3)
            code, out = run("spectrum", "--order", path, "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["spectrum"], "{3}")

    def test_errors(self):
        self.assertEqual(run("spectrum")[0], EXIT_INPUT)
        with self.assertRaises(SystemExit):
            run("spectrum", "--order", FINITE_3, "--mode", "scott")


if __name__ == '__main__':
    unittest.main()

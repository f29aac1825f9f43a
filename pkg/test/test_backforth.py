import os
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from scott_spectra._utils import PreconditionError
from scott_spectra.backforth import (CHALLENGER_WON, DEFENDER_SURVIVED, challenger_distinguish, defender_game,
                                     free_witness_evidence, sample_game_positions, sim_alpha, sim_level, sim_tuple)
from scott_spectra.kstruct import NEG_INF, ROOT, EVal
from scott_spectra.limitgen import grow, new_approx, realize_child, realize_sibling
from scott_spectra.linorder import mk_order
from scott_spectra.rn_system import GREEDY, build_rn

SLOW = bool(os.environ.get("SCOTT_SPECTRA_SLOW"))


class TestSimilarity(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.f = self.order.fin
        a = new_approx(self.order, build_rn(self.order))
        a, self.x = realize_child(a, ROOT, self.f(3), 0)
        a, self.y = realize_sibling(a, self.x, EVal.pair(self.f(1), 2))
        a, self.z = realize_sibling(a, self.x, NEG_INF)
        self.a = a

    def test_reflexive(self):
        for alpha in self.order.elements(4):
            self.assertTrue(sim_alpha(self.a, self.x, self.x, alpha))

    def test_levels(self):
        self.assertTrue(sim_alpha(self.a, self.x, self.y, self.f(0)))
        self.assertTrue(sim_alpha(self.a, self.x, self.y, self.f(1)))
        self.assertFalse(sim_alpha(self.a, self.x, self.y, self.f(2)))
        self.assertTrue(sim_level(self.a, self.x, self.y, self.f(1), 2))
        self.assertFalse(sim_level(self.a, self.x, self.y, self.f(1), 3))
        self.assertFalse(sim_alpha(self.a, self.x, self.z, self.f(0)))

    def test_tuples(self):
        self.assertTrue(sim_tuple(self.a, (self.x,), (self.y,), self.f(1)))
        self.assertFalse(sim_tuple(self.a, (self.x, self.y), (self.y, self.y), self.f(0)))
        self.assertFalse(sim_tuple(self.a, (self.x,), (self.z,), self.f(0)))


class TestDefender(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.f = self.order.fin
        a = grow(new_approx(self.order, build_rn(self.order)), 2)
        a, self.x = realize_child(a, ROOT, self.f(3), 0)
        a, self.x2 = realize_sibling(a, self.x, EVal.pair(self.f(2), 0))
        self.a = a

    def test_identical_tuples(self):
        for seed in range(5):
            _, transcript = defender_game(self.a, (self.x,), (self.x,), [self.f(2), self.f(1), self.f(0)], seed=seed)
            self.assertEqual(transcript.outcome, DEFENDER_SURVIVED)
            self.assertEqual(len(transcript.rounds), 3)

    def test_close_siblings(self):
        for seed in range(5):
            b, transcript = defender_game(self.a, (self.x,), (self.x2,), [self.f(1), self.f(0)], seed=seed)
            self.assertFalse(transcript.challenger_won)
            self.assertTrue(b.check_colors().ok)
            self.assertEqual(transcript.to_dict()["outcome"], DEFENDER_SURVIVED)

    def test_fixed_margin(self):
        _, transcript = defender_game(self.a, (self.x,), (self.x2,), [self.f(1)], seed=3, m=4)
        self.assertEqual(transcript.outcome, DEFENDER_SURVIVED)

    def test_other_orders(self):
        specs = [{"kind": "finite", "n": n} for n in range(2, 6)] + [{"kind": "limit_plus_zeta", "cnf": [[1, 1]]}]
        played = 0
        for spec in specs:
            order = mk_order(spec)
            a = grow(new_approx(order, build_rn(order)), 3)
            prefix = order.elements(3)
            games = 0
            for i, (x, y, e) in enumerate(sample_game_positions(a, np.random.default_rng(0), 10 ** 6)):
                levels = sorted((b for b in prefix if b < e.level and order.in_wf(b)), reverse=True)[:2]
                if not levels:
                    continue
                with self.subTest(order=order.name, x=x, y=y):
                    _, transcript = defender_game(a, (x,), (y,), levels, seed=i)
                    self.assertEqual(transcript.outcome, DEFENDER_SURVIVED)
                games += 1
                if games == 3:
                    break
            played += games
        self.assertGreater(played, 0)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            defender_game(self.a, (self.x,), (self.x2,), [self.f(0), self.f(1)])
        with self.assertRaises(PreconditionError):
            defender_game(self.a, (self.x,), (self.x2,), [self.f(2)])

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31))
    def test_sampled_positions(self, seed):
        rng = np.random.default_rng(seed)
        for x, y, e in sample_game_positions(self.a, rng, 3):
            levels = sorted((b for b in self.order.elements(4) if b < e.level), reverse=True)[:2]
            if levels:
                _, transcript = defender_game(self.a, (x,), (y,), levels, seed=seed)
                self.assertEqual(transcript.outcome, DEFENDER_SURVIVED)


class TestChallenger(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.f = self.order.fin
        a = new_approx(self.order, build_rn(self.order))
        a, self.x = realize_child(a, ROOT, self.f(3), 0)
        a, self.y = realize_sibling(a, self.x, EVal.pair(self.f(1), 2))
        a, self.z = realize_sibling(a, self.x, NEG_INF)
        self.a = a

    def test_atomic_difference(self):
        _, transcript = challenger_distinguish(self.a, self.x, self.z, self.f(0))
        self.assertEqual(transcript.outcome, CHALLENGER_WON)
        self.assertEqual(transcript.won_at, 0)
        self.assertEqual(transcript.rounds, [])

    def test_low_e_value(self):
        b, transcript = challenger_distinguish(self.a, self.x, self.y, self.f(2))
        self.assertTrue(transcript.challenger_won)
        self.assertEqual(transcript.won_at, 1)
        challenge = transcript.rounds[0].challenge
        self.assertEqual(b.base.parent[challenge], self.x)
        self.assertEqual((b.base.rho[challenge], b.base.eps[challenge]), (self.f(1), 2))

    def test_answers_are_distinguished(self):
        a, w = realize_child(self.a, self.y, self.f(1), 2)
        b, transcript = challenger_distinguish(a, self.x, self.y, self.f(2))
        self.assertTrue(transcript.challenger_won)
        z = transcript.rounds[0].challenge
        self.assertEqual(transcript.rounds[0].response, w)
        self.assertLess(b.base.e(z, w), EVal.pair(self.f(1), 0))

    def test_persists_after_growth(self):
        grown = grow(self.a, 1)
        _, transcript = challenger_distinguish(grown, self.x, self.y, self.f(2))
        self.assertTrue(transcript.challenger_won)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            challenger_distinguish(self.a, self.x, self.y, self.f(1))
        order = mk_order({"kind": "limit_plus_zeta", "cnf": [[1, 1]]})
        a = new_approx(order, build_rn(order))
        a, x = realize_child(a, ROOT, order.zeta(3), 0)
        a, y = realize_child(a, ROOT, order.zeta(3), 1)
        with self.assertRaises(PreconditionError):
            challenger_distinguish(a, x, y, order.zeta(0))


class TestFreeness(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 3})
        self.a = grow(new_approx(self.order, build_rn(self.order)), 3)

    def test_evidence(self):
        for alpha in (self.order.fin(1), self.order.fin(2)):
            report = free_witness_evidence(self.a, alpha, depth=2, budget=2)
            self.assertTrue(report.ok, report.failures())
            self.assertEqual(set(report.checks), {"root-child", "pairs", "defender", "challenger", "budget"})

    def test_caller_is_untouched(self):
        size = self.a.base.size
        free_witness_evidence(self.a, self.order.fin(2), depth=1, budget=1)
        self.assertEqual(self.a.base.size, size)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            free_witness_evidence(self.a, self.order.fin(0))
        early = grow(new_approx(self.order, build_rn(self.order)), 1)
        with self.assertRaises(PreconditionError):
            free_witness_evidence(early, self.order.fin(2))

    def test_greedy_finite_has_no_levels(self):
        # R_1 = {max}, so no sibling lies strictly between (beta, m) and (alpha, 0)
        a = grow(new_approx(self.order, build_rn(self.order, GREEDY)), 3)
        for alpha in (self.order.fin(1), self.order.fin(2)):
            with self.assertRaises(PreconditionError):
                free_witness_evidence(a, alpha)

    def test_greedy_limit_plus_zeta(self):
        order = mk_order({"kind": "limit_plus_zeta", "cnf": [[1, 1]]})
        a = grow(new_approx(order, build_rn(order, GREEDY)), 3)
        report = free_witness_evidence(a, order.ord(1), depth=1, budget=1)
        self.assertTrue(report.ok, report.failures())
        self.assertIsNone(report.checks["pairs"])

    @unittest.skipUnless(SLOW, "set SCOTT_SPECTRA_SLOW to run freeness evidence on lambda+zeta")
    def test_evidence_limit_plus_zeta(self):
        order = mk_order({"kind": "limit_plus_zeta", "cnf": [[1, 1]]})
        a = grow(new_approx(order, build_rn(order)), 5)
        report = free_witness_evidence(a, order.ord(2), depth=2, budget=2)
        self.assertTrue(report.ok, report.failures())


if __name__ == '__main__':
    unittest.main()

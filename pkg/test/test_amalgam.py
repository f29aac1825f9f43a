import os
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from scott_spectra._utils import (AmalgamationError, EmbeddingError, EpsilonBoundError, MarginTooSmallError,
                                  NotAtomicEquivError, NotClosedError, NotWellFoundedError, ParentMissingError)
from scott_spectra.amalgam import Embedding, amalgamate, amalgamate_point, extend_tuple, isolate_embed, margin
from scott_spectra.kstruct import NEG_INF, ROOT, EVal, KStruct, atomic_equiv, check_axioms
from scott_spectra.limitgen import sibling_witness
from scott_spectra.linorder import mk_order
from scott_spectra.rn_system import GREEDY, build_rn

SLOW = bool(os.environ.get("SCOTT_SPECTRA_SLOW"))


def random_extension(s: KStruct, rng: np.random.Generator, steps: int) -> KStruct:
    """Grow s by isolated leaves and sibling witnesses chosen at random"""
    order = s.order
    for _ in range(steps):
        nodes = s.nodes
        x = nodes[int(rng.integers(len(nodes)))]
        if x != ROOT and rng.random() < 0.5:
            levels = [b for b in order.elements(order.size) if b < s.rho[x]]
            if levels:
                level = levels[int(rng.integers(len(levels)))]
                s, _ = sibling_witness(s, x, EVal.pair(level, int(rng.integers(3))))
                continue
        labels = [b for b in order.elements(order.size) if x == ROOT or b < s.rho[x]]
        if labels:
            s, _ = isolate_embed(s, x, labels[int(rng.integers(len(labels)))], int(rng.integers(3)), verify=False)
    return s


class TestIsolate(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.rn = build_rn(self.order)
        self.root = KStruct.root_only(self.order, self.rn)

    def test_isolated_siblings(self):
        s, x = isolate_embed(self.root, ROOT, self.order.fin(3), 0)
        s, y = isolate_embed(s, ROOT, self.order.fin(3), 0)
        self.assertEqual(s.e(x, y), NEG_INF)
        self.assertEqual(s.e(x, x), EVal.pair(self.order.fin(3), 0))

    def test_rho_must_decrease(self):
        s, x = isolate_embed(self.root, ROOT, self.order.fin(1), 0)
        with self.assertRaises(AmalgamationError):
            isolate_embed(s, x, self.order.fin(1), 0)
        with self.assertRaises(AmalgamationError):
            isolate_embed(s, 42, self.order.fin(0), 0)


class TestEmbedding(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.rn = build_rn(self.order)
        self.a, self.x = isolate_embed(KStruct.root_only(self.order, self.rn), ROOT, self.order.fin(3), 0)

    def test_identity_and_compose(self):
        b, _ = isolate_embed(self.a, ROOT, self.order.fin(2), 0)
        emb = Embedding.identity(self.a, b).compose(Embedding.identity(b))
        self.assertEqual(emb(self.x), self.x)

    def test_rejects_label_change(self):
        other, y = isolate_embed(KStruct.root_only(self.order, self.rn), ROOT, self.order.fin(2), 0)
        with self.assertRaises(EmbeddingError):
            Embedding(self.a, other, {self.x: y})

    def test_rejects_other_system(self):
        other = KStruct.root_only(self.order, build_rn(self.order))
        with self.assertRaises(EmbeddingError):
            Embedding(KStruct.root_only(self.order, self.rn), other, {})


class TestAmalgamatePoint(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.rn = build_rn(self.order)
        self.f = self.order.fin
        self.root = KStruct.root_only(self.order, self.rn)

    def test_unrelated_points_stay_apart(self):
        b, x = isolate_embed(self.root, ROOT, self.f(3), 0)
        a_plus_c, c = isolate_embed(self.root, ROOT, self.f(3), 0)
        d = amalgamate_point(Embedding.identity(self.root, b), a_plus_c, c)
        new = d.next_id - 1
        self.assertEqual(d.size, 3)
        self.assertEqual(d.e(x, new), NEG_INF)

    def test_value_through_common_point(self):
        a, x = isolate_embed(self.root, ROOT, self.f(3), 0)
        b, y = sibling_witness(a, x, EVal.pair(self.f(2), 0))
        a_plus_c, c = sibling_witness(a, x, EVal.pair(self.f(1), 3))
        d = amalgamate_point(Embedding.identity(a, b), a_plus_c, c)
        new = d.next_id - 1
        self.assertEqual(d.e(y, new), EVal.pair(self.f(1), 3))
        self.assertEqual(d.e(x, new), EVal.pair(self.f(1), 3))
        self.assertTrue(check_axioms(d).ok)

    def test_bad_requests(self):
        a, x = isolate_embed(self.root, ROOT, self.f(3), 0)
        with self.assertRaises(AmalgamationError):
            amalgamate_point(Embedding.identity(a), a, x)
        bigger, _ = isolate_embed(a, ROOT, self.f(2), 0)
        bigger, c = isolate_embed(bigger, ROOT, self.f(1), 0)
        with self.assertRaises(AmalgamationError):
            amalgamate_point(Embedding.identity(self.root, a), bigger, c)


class TestAmalgamate(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.rn = build_rn(self.order)

    def test_trivial_sides(self):
        rng = np.random.default_rng(3)
        a = random_extension(KStruct.root_only(self.order, self.rn), rng, 4)
        b = random_extension(a, rng, 4)
        d, _, _ = amalgamate(Embedding.identity(a, b), Embedding.identity(a))
        self.assertEqual(d.to_dict(), b.to_dict())
        d, _, into = amalgamate(Embedding.identity(a), Embedding.identity(a, b))
        self.assertEqual(d.size, b.size)
        self.assertEqual(sorted(into.map.values()), d.nodes)

    def test_source_must_be_shared(self):
        a = KStruct.root_only(self.order, self.rn)
        other = KStruct.root_only(self.order, self.rn)
        with self.assertRaises(AmalgamationError):
            amalgamate(Embedding.identity(a), Embedding.identity(other))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31))
    def test_amalgamation_property(self, seed):
        rng = np.random.default_rng(seed)
        a = random_extension(KStruct.root_only(self.order, self.rn), rng, 3)
        b = random_extension(a, rng, 4)
        c = random_extension(a, rng, 4)
        d, b_in_d, c_in_d = amalgamate(Embedding.identity(a, b), Embedding.identity(a, c))
        report = check_axioms(d)
        self.assertTrue(report.ok, report.failures())
        for x in a.nodes:
            self.assertEqual(b_in_d(x), c_in_d(x))

    @unittest.skipUnless(SLOW, "set SCOTT_SPECTRA_SLOW to run the long amalgamation sample")
    def test_amalgamation_property_long(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            a = random_extension(KStruct.root_only(self.order, self.rn), rng, 4)
            d, _, _ = amalgamate(Embedding.identity(a, random_extension(a, rng, 5)),
                                 Embedding.identity(a, random_extension(a, rng, 5)))
            self.assertTrue(check_axioms(d).ok)


class TestExtendTuple(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "finite", "n": 4})
        self.rn = build_rn(self.order)
        self.f = self.order.fin
        self.root = KStruct.root_only(self.order, self.rn)

    def test_root_child_gets_the_margin(self):
        s, v = isolate_embed(self.root, ROOT, self.f(3), 0)
        out, v2 = extend_tuple(s, (), (), v, self.f(1), 1)
        self.assertEqual(out.e(v, v2), EVal.pair(self.f(1), 1))
        self.assertEqual((out.rho[v2], out.eps[v2]), (self.f(3), 0))

    def test_between_mates_are_transported(self):
        s, y = isolate_embed(self.root, ROOT, self.f(3), 0)
        s, v = sibling_witness(s, y, EVal.pair(self.f(2), 5))
        s, y2 = sibling_witness(s, y, EVal.pair(self.f(2), 6))
        out, v2 = extend_tuple(s, (y,), (y2,), v, self.f(1), 6)
        self.assertEqual(out.e(v2, y2), EVal.pair(self.f(2), 5))
        self.assertGreaterEqual(out.e(v, v2), margin(out, v, self.f(1), 6))
        self.assertTrue(atomic_equiv(out, (y, v), (y2, v2)))

    def test_member_of_tuple(self):
        s, y = isolate_embed(self.root, ROOT, self.f(3), 0)
        s, y2 = sibling_witness(s, y, EVal.pair(self.f(2), 0))
        out, answer = extend_tuple(s, (y,), (y2,), y, self.f(1), 1)
        self.assertIs(out, s)
        self.assertEqual(answer, y2)

    def test_level_outside_r_n(self):
        order = mk_order({"kind": "limit_plus_zeta", "cnf": [[1, 1]]})
        s, v = isolate_embed(KStruct.root_only(order, build_rn(order, GREEDY)), ROOT, order.zeta(1), 0)
        # 1 is not in R_1 = {0, ζ(0), ζ(1), ...}, so the margin moves up to ζ(0)
        out, v2 = extend_tuple(s, (), (), v, order.ord(1), 1)
        self.assertEqual(out.e(v, v2), EVal.pair(order.zeta(0), 0))

    def test_diagnoses(self):
        f = self.f
        s, x = isolate_embed(self.root, ROOT, f(3), 0)
        s, x2 = isolate_embed(s, ROOT, f(3), 0)
        s, z = isolate_embed(s, ROOT, f(2), 0)
        s, c = isolate_embed(s, x, f(1), 0)
        s, big = isolate_embed(s, ROOT, f(2), 4)

        with self.assertRaises(NotAtomicEquivError):
            extend_tuple(s, (x,), (z,), c, f(0), 1)
        with self.assertRaises(MarginTooSmallError):
            extend_tuple(s, (x,), (x2,), c, f(0), 1)
        with self.assertRaises(EpsilonBoundError):
            extend_tuple(s, (), (), big, f(0), 1)
        with self.assertRaises(ParentMissingError):
            extend_tuple(s, (), (), c, f(0), 1)
        with self.assertRaises(NotClosedError):
            extend_tuple(s, (c,), (c,), c, f(0), 1, close=False)

        order = mk_order({"kind": "limit_plus_zeta", "cnf": [[1, 1]]})
        t, v = isolate_embed(KStruct.root_only(order, build_rn(order)), ROOT, order.zeta(2), 0)
        with self.assertRaises(NotWellFoundedError):
            extend_tuple(t, (), (), v, order.zeta(0), 1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31))
    def test_extension_contract(self, seed):
        rng = np.random.default_rng(seed)
        f = self.f
        s, x = isolate_embed(self.root, ROOT, f(3), 0)
        s, y = sibling_witness(s, x, EVal.pair(f(2), int(rng.integers(3))))
        for _ in range(int(rng.integers(1, 4))):
            s, _ = isolate_embed(s, x, f(int(rng.integers(3))), int(rng.integers(3)), verify=False)
        v = s.children(x)[int(rng.integers(len(s.children(x))))]
        beta = f(int(rng.integers(2)))
        m = 1 + max(s.eps[z] for z in (x, y, v))

        out, v2 = extend_tuple(s, (x,), (y,), v, beta, m)
        self.assertEqual(out.parent[v2], y)
        self.assertTrue(atomic_equiv(out, (x, v), (y, v2)))
        self.assertGreaterEqual(out.e(v, v2), margin(out, v, beta, m))
        self.assertTrue(check_axioms(out).ok)


class TestExtendTupleGreedy(unittest.TestCase):
    def setUp(self) -> None:
        self.order = mk_order({"kind": "limit_plus_zeta", "cnf": [[1, 1]]})
        self.root = KStruct.root_only(self.order, build_rn(self.order, GREEDY))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31))
    def test_extension_contract(self, seed):
        rng = np.random.default_rng(seed)
        order = self.order
        labels = [order.ord(0), order.ord(1), order.ord(2), order.zeta(0)]
        s, x = isolate_embed(self.root, ROOT, order.zeta(1), 0)
        # ζ(0) is a member of R_1, so it can carry a sibling
        s, y = sibling_witness(s, x, EVal.pair(order.zeta(0), int(rng.integers(3, 6))))
        for _ in range(int(rng.integers(1, 4))):
            s, _ = isolate_embed(s, x, labels[int(rng.integers(len(labels)))], int(rng.integers(3)), verify=False)
        v = s.children(x)[int(rng.integers(len(s.children(x))))]
        beta = order.ord(int(rng.integers(3)))
        m = 1 + max(s.eps[z] for z in (x, y, v))

        out, v2 = extend_tuple(s, (x,), (y,), v, beta, m)
        self.assertEqual(out.parent[v2], y)
        self.assertTrue(atomic_equiv(out, (x, v), (y, v2)))
        self.assertGreaterEqual(out.e(v, v2), margin(out, v, beta, m))
        self.assertTrue(check_axioms(out).ok)


if __name__ == '__main__':
    unittest.main()

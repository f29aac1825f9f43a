import logging
import threading
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from scott_spectra._utils import BudgetExceededError
from scott_spectra.kstruct import Report
from scott_spectra.linorder import LinOrder, OrderElem
from scott_spectra.rn_system import GREEDY, RnSystem

logger = logging.getLogger(__name__)


@dataclass
class _Sequence:
    """Partially computed G(alpha_k): the inherited seeds plus the greedy picks found so far"""
    target: OrderElem
    seeds: List[OrderElem]
    lower: Optional[OrderElem] = None
    picks: List[OrderElem] = field(default_factory=list)
    scan: int = 0
    open: bool = False


class GreedyRn(RnSystem):
    """
    R_n system built greedily along the enumeration alpha_0, alpha_1, ... of the order.

    R_1 is the sequence of left-to-right maxima of the enumeration, or {max} when the order has a maximum.
    G(alpha_k) first inherits the elements below alpha_k of G(alpha_j) for every earlier-listed alpha_j above
    alpha_k. If the predecessor of alpha_k is among them, or was listed earlier, that finishes the set.
    Otherwise it greedily picks an increasing subsequence of the later enumeration lying between the largest
    earlier-listed element below alpha_k and alpha_k, stopping at the predecessor. Finally
    R_{n+1} = {alpha_n} ∪ R_n ∪ ⋃_{a ∈ R_n} G(a).

    Membership is decided through the least element of R_n at or above a bound. By coherence of G, the least
    element of R_{n+1} at or above b is the least of alpha_n, the least element gamma of R_n at or above b, and
    the least element of G(gamma) at or above b.
    """
    mode = GREEDY
    coherence_prefix: int = 150

    def __init__(self, order: LinOrder, search_budget: int = 10_000, **kwargs):
        super().__init__(order, search_budget=search_budget, **kwargs)
        self._records: List[OrderElem] = []
        self._record_scan = 0
        self._sequences: Dict[int, _Sequence] = {}
        self._built = 0
        self._least: Dict[Tuple[int, OrderElem], Optional[OrderElem]] = {}
        # memo tables are only read and filled under this lock
        self._lock = threading.RLock()

    def _element(self, i: int) -> Optional[OrderElem]:
        if i >= self.search_budget:
            raise BudgetExceededError("R_n search exceeded its enumeration budget",
                                      [f"index {i} >= budget {self.search_budget} in {self.order.name}"])
        return self.order.element(i)

    # R_1

    def __r1_least_geq(self, b: OrderElem) -> Optional[OrderElem]:
        if self.order.has_max:
            top = self.order.max_element
            return top if b <= top else None
        k = bisect_left(self._records, b)
        if k < len(self._records):
            return self._records[k]
        while True:
            e = self._element(self._record_scan)
            if e is None:
                return None
            self._record_scan += 1
            if not self._records or e > self._records[-1]:
                self._records.append(e)
                if e >= b:
                    return e

    # Fundamental sequences

    def _sequence(self, k: int) -> _Sequence:
        if k in self._sequences:
            return self._sequences[k]
        # built in listing order so that inheriting from earlier sequences never recurses
        while self._built < k:
            self._sequence(self._built)
        self._built = k + 1

        a = self._element(k)
        p = self.order.pred(a)
        earlier = [self._element(i) for i in range(k)]
        seeds = set()
        for j, e in enumerate(earlier):
            if e > a:
                seeds.update(self._below(j, a))
        seq = _Sequence(a, sorted(seeds), scan=k + 1)

        if a == self.order.least or (p is not None and p in seeds):
            pass
        elif p is not None and self.order.index_of(p) < k:
            seq.seeds = sorted(seeds | {p})
        else:
            below = [e for e in earlier if e < a]
            seq.lower = max(below) if below else None
            seq.open = True

        self._sequences[k] = seq
        return seq

    def __advance(self, seq: _Sequence) -> None:
        e = self._element(seq.scan)
        seq.scan += 1
        if e is None:
            seq.open = False
            return
        if e < seq.target and (seq.lower is None or e >= seq.lower) and (not seq.picks or e > seq.picks[-1]):
            seq.picks.append(e)
            if self.order.succ(e) == seq.target:
                seq.open = False

    def _below(self, k: int, x: OrderElem) -> List[OrderElem]:
        """Elements of G(alpha_k) below x, for x < alpha_k"""
        seq = self._sequence(k)
        while seq.open and (not seq.picks or seq.picks[-1] < x):
            self.__advance(seq)
        return [s for s in seq.seeds if s < x] + [p for p in seq.picks if p < x]

    def _least_in_sequence(self, k: int, b: OrderElem) -> Optional[OrderElem]:
        """Least element of G(alpha_k) at or above b"""
        seq = self._sequence(k)
        while seq.open and (not seq.picks or seq.picks[-1] < b):
            self.__advance(seq)
        found = [s for s in seq.seeds if s >= b][:1] + [p for p in seq.picks if p >= b][:1]
        return min(found) if found else None

    def _all(self, k: int) -> List[OrderElem]:
        seq = self._sequence(k)
        if self.order.is_limit(seq.target):
            raise ValueError(f"G({seq.target}) is infinite")
        while seq.open:
            self.__advance(seq)
        return sorted(set(seq.seeds) | set(seq.picks))

    def g_seq(self, a: OrderElem, k: int) -> List[OrderElem]:
        self.order.check(a)
        with self._lock:
            seq = self._sequence(self.order.index_of(a))
            while seq.open and len(seq.picks) < k:
                self.__advance(seq)
            return sorted(set(seq.seeds) | set(seq.picks))[:k]

    def g_contains(self, a: OrderElem, x: OrderElem) -> bool:
        self.order.check(a, x)
        if not x < a:
            return False
        with self._lock:
            return self._least_in_sequence(self.order.index_of(a), x) == x

    # R_n

    def least_geq(self, n: int, b: OrderElem) -> Optional[OrderElem]:
        self._check_level(n)
        self.order.check(b)
        with self._lock:
            return self.__least_geq(n, b)

    def __least_geq(self, n: int, b: OrderElem) -> Optional[OrderElem]:
        key = (n, b)
        if key in self._least:
            return self._least[key]

        if n == 1:
            result = self.__r1_least_geq(b)
        else:
            candidates = []
            forced = self.order.element(n - 1)
            if forced is not None and forced >= b:
                candidates.append(forced)
            gamma = self.__least_geq(n - 1, b)
            if gamma is not None:
                candidates.append(gamma)
                if gamma != b:
                    g = self._least_in_sequence(self.order.index_of(gamma), b)
                    if g is not None:
                        candidates.append(g)
            result = min(candidates) if candidates else None

        self._least[key] = result
        return result

    def member(self, n: int, a: OrderElem) -> bool:
        return self.least_geq(n, a) == a

    def wf_bound(self, n: int) -> OrderElem:
        """
        Element of the well-founded part above every well-founded member of R_n.

        Parameters:
        -----------
        n : int
            Level, at least one.

        Returns:
        --------
        OrderElem
            Upper bound in the well-founded part of a lambda+zeta order.
        """
        self._check_level(n)
        if self.order.well_founded:
            raise ValueError(f"{self.order.name} is well-founded, every R_n is bounded by its maximum")
        with self._lock:
            return self.__bounds(n)[0]

    def __bounds(self, n: int) -> Tuple[OrderElem, OrderElem]:
        # (bound of the well-founded part, least ill-founded member) of R_n
        if n == 1:
            # records increase, so the first ill-founded record is the least ill-founded member of R_1
            bound = r = self.__r1_least_geq(self.order.least)
            while self.order.in_wf(r):
                bound = r
                r = self.__r1_least_geq(self.order.succ(r))
            return bound, r

        bound, zeta = self.__bounds(n - 1)
        inherited = self._all(self.order.index_of(zeta))
        forced = self.order.element(n - 1)
        wf_part = [x for x in inherited if self.order.in_wf(x)]
        ill_part = [x for x in inherited if not self.order.in_wf(x)]
        if self.order.in_wf(forced):
            wf_part.append(forced)
        else:
            ill_part.append(forced)
        return max([bound] + wf_part), min([zeta] + ill_part)

    def _check_sequences(self, report: Report, elems: List[OrderElem], levels: int, table) -> None:
        witness = None
        for n in range(1, levels + 1):
            for a, m in zip(elems, table[n]):
                if not m:
                    continue
                p = self.order.pred(a)
                lifted = [p] if p is not None else (self.g_seq(a, 3) if self.order.is_limit(a) else [])
                missing = [x for x in lifted if not self.member(n + 1, x)]
                if missing:
                    witness = (n, str(a), str(missing[0]))
                    break
            if witness:
                break
        report.add("R4", witness)

        witness = None
        sample = elems[:self.coherence_prefix]
        for a in sample:
            p = self.order.pred(a)
            if p is not None and not self.g_contains(a, p):
                witness = (str(a), str(p))
                break
            prefix = self.g_seq(a, 5)
            if any(x >= a for x in prefix) or any(x >= y for x, y in zip(prefix, prefix[1:])):
                witness = (str(a),)
                break
        report.add("sequences", witness)

        witness = None
        for beta in sample:
            for gamma in self.g_seq(beta, 4):
                bad = [alpha for alpha in sample if gamma < alpha < beta and not self.g_contains(alpha, gamma)]
                if bad:
                    witness = (str(gamma), str(bad[0]), str(beta))
                    break
            if witness:
                break
        report.add("coherence", witness)
        logger.debug(f"Prefix audit of {self.order.name}: {len(elems)} elements, {levels} levels")


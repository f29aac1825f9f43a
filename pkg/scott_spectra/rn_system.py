from abc import ABC, abstractmethod
from typing import List, Optional

from scott_spectra.linorder import LinOrder, OrderElem
from scott_spectra.kstruct import Report

TRIVIAL = "trivial"
GREEDY = "greedy"


class RnSystem(ABC):
    """
    Abstract base class for the level sets R_1 ⊆ R_2 ⊆ ... of an order together with the fundamental
    sequences G and the sequence beta_n that generate them.
    """
    mode: str = ""

    def __init__(self, order: LinOrder, **kwargs):
        self.order = order
        for key in kwargs:
            setattr(self, key, kwargs[key])

    @abstractmethod
    def member(self, n: int, a: OrderElem) -> bool:
        """
        Decide whether a belongs to R_n.

        Parameters:
        -----------
        n : int
            Level, at least one.

        a : OrderElem
            Element of the underlying order.

        Returns:
        --------
        bool
            True iff a is in R_n.
        """
        pass

    @abstractmethod
    def least_geq(self, n: int, b: OrderElem) -> Optional[OrderElem]:
        """
        Least element of R_n that is >= b, None when R_n has no such element.

        Parameters:
        -----------
        n : int
            Level, at least one.

        b : OrderElem
            Lower bound.

        Returns:
        --------
        Optional[OrderElem]
            The least member of R_n at or above b.
        """
        pass

    @abstractmethod
    def g_seq(self, a: OrderElem, k: int) -> List[OrderElem]:
        """
        First k elements of the fundamental sequence G(a), increasing and below a.

        Parameters:
        -----------
        a : OrderElem
            Element whose sequence is requested.

        k : int
            Number of elements; fewer are returned when G(a) is finite.

        Returns:
        --------
        List[OrderElem]
            Strictly increasing prefix of G(a).
        """
        pass

    def beta(self, n: int) -> OrderElem:
        """beta_n, the element forced into R_{n+1}"""
        a = self.order.element(n)
        if a is None:
            raise ValueError(f"{self.order.name} has no element with index {n}")
        return a

    def least_above(self, n: int, b: OrderElem) -> Optional[OrderElem]:
        """Least element of R_n strictly above b"""
        nxt = self.order.succ(b)
        return None if nxt is None else self.least_geq(n, nxt)

    def _check_level(self, n: int) -> None:
        if n < 1:
            raise ValueError("R_n is indexed from n = 1")

    def check_prefix(self, levels: int, prefix: int) -> Report:
        """
        Audit the level sets on the first ``prefix`` enumerated elements.

        Checks that R_1 reaches the top of the prefix (R1), that R_n ⊆ R_{n+1} (R2) and that the i-th
        enumerated element is in R_{i+1} for i >= 1. Subclasses add checks of their fundamental sequences.
        """
        report = Report()
        elems = self.order.elements(prefix)
        table = {n: [self.member(n, a) for a in elems] for n in range(1, levels + 2)}

        top = self.order.max_element if self.order.has_max else max(elems)
        report.add("R1", None if self.member(1, top) else (str(top),))

        witness = None
        for n in range(1, levels + 1):
            bad = [a for a, m, m2 in zip(elems, table[n], table[n + 1]) if m and not m2]
            if bad:
                witness = (n, str(bad[0]))
                break
        report.add("R2", witness)

        bad = [(i + 1, str(a)) for i, a in enumerate(elems[1:levels + 1], start=1) if not self.member(i + 1, a)]
        report.add("beta", bad[0] if bad else None)

        self._check_sequences(report, elems, levels, table)
        return report

    def _check_sequences(self, report: Report, elems: List[OrderElem], levels: int, table) -> None:
        pass


def build_rn(order: LinOrder, mode: str = TRIVIAL, **kwargs) -> RnSystem:
    """
    Build the R_n system of an order.

    Parameters:
    -----------
    order : LinOrder
        Underlying order.

    mode : str
        ``trivial`` (R_n is the whole order) or ``greedy`` (fundamental sequences chosen greedily along the
        enumeration). Default is trivial.

    Returns:
    --------
    RnSystem
    """
    if mode == TRIVIAL:
        from scott_spectra.trivial_rn import TrivialRn
        return TrivialRn(order, **kwargs)
    if mode == GREEDY:
        from scott_spectra.greedy_rn import GreedyRn
        return GreedyRn(order, **kwargs)
    raise ValueError(f"Unknown R_n mode {mode!r}")


def rn_member(rn: RnSystem, n: int, a: OrderElem) -> bool:
    return rn.member(n, a)


def g_seq(rn: RnSystem, a: OrderElem, k: int) -> List[OrderElem]:
    return rn.g_seq(a, k)

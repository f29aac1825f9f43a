from typing import List, Optional

from scott_spectra.linorder import OrderElem
from scott_spectra.rn_system import RnSystem, TRIVIAL


class TrivialRn(RnSystem):
    """
    R_n = L for every n. Valid for any order in which the ill-founded part, if any, does not need to be
    kept away from the well-founded levels.
    """
    mode = TRIVIAL

    def member(self, n: int, a: OrderElem) -> bool:
        self._check_level(n)
        self.order.check(a)
        return True

    def least_geq(self, n: int, b: OrderElem) -> Optional[OrderElem]:
        self._check_level(n)
        self.order.check(b)
        return b

    def g_seq(self, a: OrderElem, k: int) -> List[OrderElem]:
        raise NotImplementedError("Fundamental sequences are not supported with trivial R_n")

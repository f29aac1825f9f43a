import json
from dataclasses import dataclass
from functools import total_ordering
from typing import Any, Dict, List, Optional, Union

from scott_spectra._ordinals import OrdCNF, OrdinalEnumerator
from scott_spectra._utils import ForeignElementError, OrderSpecError

LT, EQ, GT = -1, 0, 1

FINITE = "finite"
ORDINAL = "ordinal"
LIMIT_PLUS_ZETA = "limit_plus_zeta"


@total_ordering
@dataclass(frozen=True)
class OrderElem:
    """
    Element of a presented linear order.

    ``kind`` is one of ``fin``, ``ord`` or ``zeta`` and ``value`` is an int, an OrdCNF or an integer offset
    respectively. ``owner`` is the name of the LinOrder the element belongs to; comparing elements of
    different orders raises ForeignElementError.
    """
    owner: str
    kind: str
    value: Any

    @property
    def _key(self):
        return (1, self.value) if self.kind == "zeta" else (0, self.value)

    def __lt__(self, other):
        if not isinstance(other, OrderElem):
            return NotImplemented
        if other.owner != self.owner:
            raise ForeignElementError("Elements of different orders are incomparable", [self.owner, other.owner])
        return self._key < other._key

    def to_json(self) -> Dict[str, Any]:
        if self.kind == "ord":
            return {"ord": self.value.to_json()}
        return {self.kind: self.value}

    def __str__(self) -> str:
        return f"ζ({self.value})" if self.kind == "zeta" else str(self.value)


class LinOrder:
    """
    Decidable presentation of one of the linear orders Finite(n), Ordinal(lam) or LimitPlusZeta(lam).

    LimitPlusZeta(lam) is lam followed by a copy of the integers. Its enumeration dovetails the two parts: even
    indices walk the ordinals below lam, odd indices walk the integers in the spiral 0, -1, 1, -2, 2, ...
    """

    def __init__(self, kind: str, n: Optional[int] = None, lam: Optional[OrdCNF] = None):
        self.kind = kind
        self.n = n
        self.lam = lam
        if kind == FINITE:
            self.name = f"finite({n})"
        else:
            self.name = f"{kind}({lam})"
            self._ordinals = OrdinalEnumerator(lam)

    @property
    def spec(self) -> Dict[str, Any]:
        if self.kind == FINITE:
            return {"kind": FINITE, "n": self.n}
        return {"kind": self.kind, "cnf": self.lam.to_json()}

    def __repr__(self) -> str:
        return f"LinOrder({self.name})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LinOrder) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)

    # Constructors for elements

    def fin(self, i: int) -> OrderElem:
        if self.kind != FINITE or not 0 <= i < self.n:
            raise ValueError(f"{i} is not an element of {self.name}")
        return OrderElem(self.name, "fin", int(i))

    def ord(self, value: Union[int, OrdCNF]) -> OrderElem:
        if isinstance(value, int):
            if self.kind == FINITE:
                return self.fin(value)
            value = OrdCNF.from_int(value)
        if self.kind == FINITE or not value < self.lam:
            raise ValueError(f"{value} is not an element of {self.name}")
        return OrderElem(self.name, "ord", value)

    def zeta(self, z: int) -> OrderElem:
        if self.kind != LIMIT_PLUS_ZETA:
            raise ValueError(f"{self.name} has no ill-founded part")
        return OrderElem(self.name, "zeta", int(z))

    def elem_from_json(self, data: Dict[str, Any]) -> OrderElem:
        (kind, value), = data.items()
        if kind == "fin":
            return self.fin(value)
        if kind == "ord":
            return self.ord(OrdCNF.from_json(value))
        if kind == "zeta":
            return self.zeta(value)
        raise ValueError(f"Unknown element encoding {data}")

    def check(self, *elements: OrderElem) -> None:
        for a in elements:
            if not isinstance(a, OrderElem) or a.owner != self.name:
                raise ForeignElementError(f"Element does not belong to {self.name}", [repr(a)])

    # Enumeration

    @property
    def size(self) -> Optional[int]:
        if self.kind == FINITE:
            return self.n
        if self.kind == ORDINAL:
            return self._ordinals.size
        return None

    def element(self, i: int) -> Optional[OrderElem]:
        """i-th element of the fixed enumeration, None past the end of a finite order"""
        if i < 0:
            raise ValueError("Enumeration index must be non-negative")
        if self.kind == FINITE:
            return self.fin(i) if i < self.n else None
        if self.kind == ORDINAL:
            value = self._ordinals.nth(i)
            return None if value is None else OrderElem(self.name, "ord", value)
        k, odd = divmod(i, 2)
        if not odd:
            return OrderElem(self.name, "ord", self._ordinals.nth(k))
        m, r = divmod(k, 2)
        return self.zeta(-(m + 1) if r else m)

    def index_of(self, a: OrderElem) -> int:
        self.check(a)
        if a.kind == "fin":
            return a.value
        if a.kind == "ord":
            k = self._ordinals.index(a.value)
            return 2 * k if self.kind == LIMIT_PLUS_ZETA else k
        z = a.value
        k = 2 * z if z >= 0 else 2 * (-z) - 1
        return 2 * k + 1

    def elements(self, count: int) -> List[OrderElem]:
        out = []
        for i in range(count):
            e = self.element(i)
            if e is None:
                break
            out.append(e)
        return out

    # Order structure

    @property
    def least(self) -> OrderElem:
        return self.fin(0) if self.kind == FINITE else OrderElem(self.name, "ord", OrdCNF())

    @property
    def has_max(self) -> bool:
        return self.kind == FINITE or (self.kind == ORDINAL and self.lam.is_successor)

    @property
    def max_element(self) -> Optional[OrderElem]:
        if self.kind == FINITE:
            return self.fin(self.n - 1)
        if self.kind == ORDINAL and self.lam.is_successor:
            return OrderElem(self.name, "ord", self.lam.pred())
        return None

    def cmp(self, a: OrderElem, b: OrderElem) -> int:
        self.check(a, b)
        return LT if a < b else (GT if b < a else EQ)

    def succ(self, a: OrderElem) -> Optional[OrderElem]:
        self.check(a)
        if a.kind == "fin":
            return self.fin(a.value + 1) if a.value + 1 < self.n else None
        if a.kind == "zeta":
            return self.zeta(a.value + 1)
        nxt = a.value.succ()
        return OrderElem(self.name, "ord", nxt) if nxt < self.lam else None

    def pred(self, a: OrderElem) -> Optional[OrderElem]:
        self.check(a)
        if a.kind == "fin":
            return self.fin(a.value - 1) if a.value > 0 else None
        if a.kind == "zeta":
            return self.zeta(a.value - 1)
        prev = a.value.pred()
        return None if prev is None else OrderElem(self.name, "ord", prev)

    def is_limit(self, a: OrderElem) -> bool:
        self.check(a)
        return a.kind == "ord" and a.value.is_limit

    def in_wf(self, a: OrderElem) -> bool:
        self.check(a)
        return a.kind != "zeta"

    def ordinal_of(self, a: OrderElem) -> OrdCNF:
        """Order type of the initial segment below a, for a in the well-founded part"""
        self.check(a)
        if a.kind == "zeta":
            raise ValueError(f"{a} lies in the ill-founded part of {self.name}")
        return OrdCNF.from_int(a.value) if a.kind == "fin" else a.value

    def elem_of_ordinal(self, o: OrdCNF) -> OrderElem:
        if self.kind != FINITE:
            return self.ord(o)
        if not o.is_finite:
            raise ValueError(f"{o} is not an element of {self.name}")
        return self.fin(o.to_int())

    @property
    def well_founded(self) -> bool:
        return self.kind != LIMIT_PLUS_ZETA

    def wf(self) -> OrdCNF:
        return OrdCNF.from_int(self.n) if self.kind == FINITE else self.lam

    def wfc(self) -> OrdCNF:
        return self.wf() if self.well_founded else self.lam.succ()


def mk_order(spec: Union[str, Dict[str, Any], LinOrder]) -> LinOrder:
    """
    Build a LinOrder from an order spec.

    Parameters:
    -----------
    spec : Union[str, Dict[str, Any], LinOrder]
        ``{"kind": "finite", "n": 3}``, ``{"kind": "ordinal", "cnf": [[1, 1]]}`` or
        ``{"kind": "limit_plus_zeta", "cnf": [[1, 1]]}``, either as a dict or as its JSON text.

    Returns:
    --------
    LinOrder
        The presented order with its fixed enumeration.
    """
    if isinstance(spec, LinOrder):
        return spec
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as err:
            raise OrderSpecError("Order spec is not valid JSON", [str(err)])
    if not isinstance(spec, dict) or "kind" not in spec:
        raise OrderSpecError("Order spec must be an object with a 'kind'", [repr(spec)])

    kind = spec["kind"]
    if kind == FINITE:
        n = spec.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise OrderSpecError("Finite orders need an integer n >= 2", [repr(n)])
        return LinOrder(FINITE, n=n)

    if kind not in (ORDINAL, LIMIT_PLUS_ZETA):
        raise OrderSpecError(f"Unknown order kind {kind!r}", [repr(spec)])
    if "cnf" not in spec:
        raise OrderSpecError("Ordinal orders need a 'cnf'", [repr(spec)])
    lam = OrdCNF.from_json(spec["cnf"])
    if kind == ORDINAL and lam < OrdCNF.from_int(2):
        raise OrderSpecError("Ordinal orders need lambda >= 2", [str(lam)])
    if kind == LIMIT_PLUS_ZETA and not lam.is_limit:
        raise OrderSpecError("lambda+zeta needs a limit lambda",
                             [f"{lam} has no limit top, so its last element would lack a successor"])
    return LinOrder(kind, lam=lam)


def cmp(order: LinOrder, a: OrderElem, b: OrderElem) -> int:
    return order.cmp(a, b)


def succ(order: LinOrder, a: OrderElem) -> Optional[OrderElem]:
    return order.succ(a)


def pred(order: LinOrder, a: OrderElem) -> Optional[OrderElem]:
    return order.pred(a)


def wf_of(order: LinOrder) -> OrdCNF:
    return order.wf()


def wfc_of(order: LinOrder) -> OrdCNF:
    return order.wfc()

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from scott_spectra._utils import OrderSpecError

OMEGA = "ω"


@dataclass(frozen=True, order=True)
class OrdCNF:
    """
    Ordinal below omega^omega in Cantor normal form.

    ``terms`` is a tuple of (exponent, coefficient) pairs with strictly decreasing exponents and positive
    coefficients. Lexicographic comparison of the term tuples is exactly the ordinal order, so the generated
    dataclass ordering is used as is.
    """
    terms: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        terms = tuple((int(e), int(c)) for e, c in self.terms)
        errors = []
        for k, (e, c) in enumerate(terms):
            if e < 0:
                errors.append(f"negative exponent {e} in term {k}")
            if c < 1:
                errors.append(f"non-positive coefficient {c} in term {k}")
            if k > 0 and terms[k - 1][0] <= e:
                errors.append(f"exponents not strictly decreasing at term {k}")
        if errors:
            raise OrderSpecError("Invalid Cantor normal form", errors)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_int(cls, n: int) -> "OrdCNF":
        if n < 0:
            raise OrderSpecError("Ordinals are non-negative", [f"got {n}"])
        return cls(((0, n),)) if n > 0 else cls()

    @classmethod
    def omega(cls, exponent: int = 1, coefficient: int = 1) -> "OrdCNF":
        return cls(((exponent, coefficient),))

    @classmethod
    def from_json(cls, data) -> "OrdCNF":
        if isinstance(data, int):
            return cls.from_int(data)
        if not isinstance(data, (list, tuple)) or not all(isinstance(t, (list, tuple)) and len(t) == 2 for t in data):
            raise OrderSpecError("CNF must be a list of [exponent, coefficient] pairs", [repr(data)])
        if not all(isinstance(x, int) and not isinstance(x, bool) for t in data for x in t):
            raise OrderSpecError("CNF entries must be integers", [repr(data)])
        return cls(tuple(tuple(t) for t in data))

    def to_json(self) -> List[List[int]]:
        return [[e, c] for e, c in self.terms]

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def to_int(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def __add__(self, other: "OrdCNF") -> "OrdCNF":
        if not isinstance(other, OrdCNF):
            return NotImplemented
        if other.is_zero:
            return self
        lead, coef = other.terms[0]
        kept = [t for t in self.terms if t[0] > lead]
        same = [c for e, c in self.terms if e == lead]
        if same:
            return OrdCNF(tuple(kept) + ((lead, coef + same[0]),) + other.terms[1:])
        return OrdCNF(tuple(kept) + other.terms)

    def succ(self) -> "OrdCNF":
        return self + OrdCNF.from_int(1)

    def pred(self) -> Optional["OrdCNF"]:
        """Immediate predecessor, None for zero and limits"""
        if not self.is_successor:
            return None
        e, c = self.terms[-1]
        head = self.terms[:-1]
        return OrdCNF(head + ((0, c - 1),)) if c > 1 else OrdCNF(head)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
                continue
            base = OMEGA if e == 1 else f"{OMEGA}^{e}"
            parts.append(base if c == 1 else f"{base}·{c}")
        return "+".join(parts)


@lru_cache(maxsize=None)
def _stage(dim: int, s: int) -> Tuple[Tuple[int, ...], ...]:
    # Vectors of N^dim with max entry s, increasing as ordinals (leading coordinate = highest exponent).
    return tuple(v for v in product(range(s + 1), repeat=dim) if max(v) == s)


@lru_cache(maxsize=None)
def _stage_position(dim: int, s: int) -> Dict[Tuple[int, ...], int]:
    return {v: k for k, v in enumerate(_stage(dim, s))}


def _iroot(p: int, dim: int) -> int:
    s = int(round(p ** (1.0 / dim)))
    while (s + 1) ** dim <= p:
        s += 1
    while s > 0 and s ** dim > p:
        s -= 1
    return s


def _vector_to_cnf(vector: Sequence[int]) -> Tuple[Tuple[int, int], ...]:
    dim = len(vector)
    return tuple((dim - 1 - k, c) for k, c in enumerate(vector) if c > 0)


class OrdinalEnumerator:
    """
    Deterministic bijection between the naturals and the ordinals below ``lam``.

    The ordinals below lam split into blocks lam_{<j} + omega^{e_j}*t + beta (beta < omega^{e_j}), one for
    every CNF term j and every t below its coefficient. Singleton blocks (e_j = 0) come first in increasing
    order; infinite blocks are visited round-robin and each enumerates N^{e_j} by max-norm stages, every stage
    in increasing ordinal order. For lam <= omega the enumeration is increasing.
    """

    def __init__(self, lam: OrdCNF):
        self.lam = lam
        self._singles: List[OrdCNF] = []
        self._blocks: List[Tuple[OrdCNF, int]] = []
        self._block_of: Dict[Tuple[int, int], Tuple[bool, int]] = {}

        prefix: Tuple[Tuple[int, int], ...] = ()
        for j, (e, c) in enumerate(lam.terms):
            for t in range(c):
                base = OrdCNF(prefix + (((e, t),) if t > 0 else ()))
                if e == 0:
                    self._block_of[(j, t)] = (False, len(self._singles))
                    self._singles.append(base)
                else:
                    self._block_of[(j, t)] = (True, len(self._blocks))
                    self._blocks.append((base, e))
            prefix = prefix + ((e, c),)

    @property
    def size(self) -> Optional[int]:
        return None if self._blocks else len(self._singles)

    def nth(self, i: int) -> Optional[OrdCNF]:
        if i < 0:
            raise ValueError("Enumeration index must be non-negative")
        if i < len(self._singles):
            return self._singles[i]
        if not self._blocks:
            return None
        i -= len(self._singles)
        base, dim = self._blocks[i % len(self._blocks)]
        p = i // len(self._blocks)
        s = _iroot(p, dim)
        vector = _stage(dim, s)[p - s ** dim]
        return OrdCNF(base.terms + _vector_to_cnf(vector))

    def index(self, alpha: OrdCNF) -> int:
        j, t, rest = self.__locate(alpha)
        infinite, k = self._block_of[(j, t)]
        if not infinite:
            return k
        dim = self._blocks[k][1]
        vector = [0] * dim
        for e, c in rest:
            vector[dim - 1 - e] = c
        vector = tuple(vector)
        s = max(vector)
        p = s ** dim + _stage_position(dim, s)[vector]
        return len(self._singles) + p * len(self._blocks) + k

    def __locate(self, alpha: OrdCNF):
        a = alpha.terms
        i = 0
        for j, (e, c) in enumerate(self.lam.terms):
            if i == len(a):
                return j, 0, ()
            ea, ca = a[i]
            if ea > e or (ea == e and ca > c):
                break
            if ea < e:
                return j, 0, a[i:]
            if ca < c:
                return j, ca, a[i + 1:]
            i += 1
        raise ValueError(f"{alpha} is not below {self.lam}")

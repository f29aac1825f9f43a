import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from scott_spectra._utils import BudgetExceededError
from scott_spectra.kstruct import Report

logger = logging.getLogger(__name__)

EQUALITY = "="


@dataclass
class FinStruct:
    """
    Finite relational structure on the universe 0..size-1.

    Relations are boolean numpy arrays of shape (size,) * arity. Constants name elements of the universe.
    """
    size: int
    relations: Dict[str, np.ndarray] = field(default_factory=dict)
    constants: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("Structures need a non-empty universe")
        for name, arr in self.relations.items():
            arr = np.asarray(arr, dtype=bool)
            if arr.ndim < 1 or any(d != self.size for d in arr.shape):
                raise ValueError(f"Relation {name} has shape {arr.shape}, expected ({self.size},) * arity")
            self.relations[name] = arr
        for name, c in self.constants.items():
            if not 0 <= c < self.size:
                raise ValueError(f"Constant {name} = {c} lies outside the universe")

    @classmethod
    def from_tuples(cls, size: int, relations: Dict[str, Tuple[int, Sequence[Sequence[int]]]],
                    constants: Optional[Dict[str, int]] = None) -> "FinStruct":
        """Build from ``{name: (arity, tuples)}``"""
        arrays = {}
        for name, (arity, tuples) in relations.items():
            arr = np.zeros((size,) * arity, dtype=bool)
            for t in tuples:
                arr[tuple(t)] = True
            arrays[name] = arr
        return cls(size, arrays, dict(constants or {}))

    def symbols(self) -> List[Tuple[str, int]]:
        """(name, arity) in canonical order: by arity, then equality before relations sorted by name"""
        named = [(EQUALITY, 2)] + [(name, self.relations[name].ndim) for name in sorted(self.relations)]
        return sorted(named, key=lambda sym: (sym[1], named.index(sym)))

    def to_dict(self) -> Dict[str, Any]:
        return {"size": self.size,
                "relations": {name: {"arity": int(arr.ndim), "tuples": np.argwhere(arr).tolist()}
                              for name, arr in sorted(self.relations.items())},
                "constants": dict(sorted(self.constants.items()))}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FinStruct":
        relations = {name: (rel["arity"], rel["tuples"]) for name, rel in data.get("relations", {}).items()}
        return cls.from_tuples(int(data["size"]), relations, data.get("constants"))

    def to_networkx(self) -> nx.DiGraph:
        """Unary and binary relations as node and edge label sets"""
        graph = nx.DiGraph()
        names = {c: n for n, c in self.constants.items()}
        for x in range(self.size):
            graph.add_node(x, labels=frozenset(), constant=names.get(x))
        for name, arr in sorted(self.relations.items()):
            if arr.ndim > 2:
                raise ValueError(f"Relation {name} has arity {arr.ndim}; only unary and binary relations export")
            for t in np.argwhere(arr):
                x, y = int(t[0]), int(t[-1])
                if x == y:
                    graph.nodes[x]["labels"] = graph.nodes[x]["labels"] | {name}
                else:
                    labels = graph.edges[x, y]["labels"] if graph.has_edge(x, y) else frozenset()
                    graph.add_edge(x, y, labels=labels | {name})
        return graph


def atomic_formulas(A: FinStruct, k: int) -> List[Tuple[str, Tuple[Any, ...]]]:
    """
    Frozen enumeration of the atomic formulas in the variables x_0..x_{k-1} and the constants of A.

    Terms are the variable indices 0..k-1 followed by the constant names in sorted order. Formulas are ordered
    by (arity, symbol index, term tuple); ``qf_type`` evaluates them in this order.
    """
    terms = list(range(k)) + sorted(A.constants)
    return [(name, t) for name, arity in A.symbols() for t in itertools.product(terms, repeat=arity)]


def qf_type(A: FinStruct, xs: Sequence[int]) -> np.ndarray:
    """Truth values of ``atomic_formulas(A, len(xs))`` at xs"""
    idx = list(xs) + [A.constants[name] for name in sorted(A.constants)]
    blocks = []
    for name, arity in A.symbols():
        if name == EQUALITY:
            blocks.append(np.equal.outer(idx, idx).ravel())
        else:
            blocks.append(A.relations[name][np.ix_(*[idx] * arity)].ravel())
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=bool)


def _pattern(xs: Sequence[int]) -> Tuple[int, ...]:
    return tuple(xs.index(x) for x in xs)


class BackAndForth:
    """
    Back-and-forth relations of one finite structure, memoised over a single analysis.

    ``width`` bounds the length of the extensions d in the recursive clauses.
    """

    def __init__(self, A: FinStruct, width: int = 1):
        self.A = A
        self.width = width
        self._types: Dict[Tuple[int, ...], bytes] = {}
        self._groups: Dict[int, Dict[bytes, List[Tuple[int, ...]]]] = {}
        self._leq: Dict[Tuple[int, tuple, tuple], bool] = {}
        self._sym: Dict[Tuple[int, tuple, tuple], bool] = {}

    def tuples(self, k: int) -> Iterator[Tuple[int, ...]]:
        return itertools.product(range(self.A.size), repeat=k)

    def extensions(self) -> List[Tuple[int, ...]]:
        return [d for k in range(self.width + 1) for d in self.tuples(k)]

    def type_of(self, xs: Tuple[int, ...]) -> bytes:
        if xs not in self._types:
            self._types[xs] = qf_type(self.A, xs).tobytes()
        return self._types[xs]

    def same_type(self, xs: Tuple[int, ...]) -> List[Tuple[int, ...]]:
        """Tuples with the quantifier-free type of xs"""
        k = len(xs)
        if k not in self._groups:
            groups: Dict[bytes, List[Tuple[int, ...]]] = {}
            for t in self.tuples(k):
                groups.setdefault(self.type_of(t), []).append(t)
            self._groups[k] = groups
        return self._groups[k][self.type_of(xs)]

    def leq(self, alpha: int, xs: Tuple[int, ...], ys: Tuple[int, ...]) -> bool:
        if len(xs) != len(ys):
            return False
        if alpha == 0:
            return self.type_of(xs) == self.type_of(ys)
        key = (alpha, xs, ys)
        if key not in self._leq:
            # ≤_{alpha-1} refines every lower level, so checking beta = alpha - 1 suffices
            self._leq[key] = all(
                any(self.leq(alpha - 1, ys + d, xs + c) for c in self.tuples(len(d)))
                for d in self.extensions())
        return self._leq[key]

    def sym(self, alpha: int, xs: Tuple[int, ...], ys: Tuple[int, ...]) -> bool:
        if len(xs) != len(ys):
            return False
        if alpha == 0:
            return self.type_of(xs) == self.type_of(ys)
        key = (alpha, xs, ys)
        if key not in self._sym:
            forth = all(any(self.sym(alpha - 1, xs + d, ys + c) for c in self.tuples(len(d)))
                        for d in self.extensions())
            back = forth and all(any(self.sym(alpha - 1, xs + d, ys + c) for d in self.tuples(len(c)))
                                 for c in self.extensions())
            self._sym[key] = back
        return self._sym[key]

    def free(self, alpha: int, xs: Tuple[int, ...]) -> bool:
        """
        xs is alpha-free: for every b there are xs', b' with xs b ≤_{alpha-1} xs' b' and xs' not ≤_alpha xs.

        At alpha = 0 the first clause is vacuous and xs' ranges over tuples with the equality pattern of xs. The
        tuples b have length at most the number of elements missing from xs and are tried longest first.
        """
        k = len(xs)
        if alpha == 0:
            pattern = _pattern(xs)
            return any(_pattern(t) == pattern and not self.leq(0, t, xs) for t in self.tuples(k))
        for length in range(self.A.size - len(set(xs)), -1, -1):
            for bs in self.tuples(length):
                if not any(not self.leq(alpha, t[:k], xs) for t in self.same_type(xs + bs)
                           if self.leq(alpha - 1, xs + bs, t)):
                    return False
        return True


def leq_alpha(A: FinStruct, xs: Sequence[int], ys: Sequence[int], alpha: int, width: int = 1) -> bool:
    return BackAndForth(A, width).leq(alpha, tuple(xs), tuple(ys))


def sym_alpha(A: FinStruct, xs: Sequence[int], ys: Sequence[int], alpha: int, width: int = 1) -> bool:
    return BackAndForth(A, width).sym(alpha, tuple(xs), tuple(ys))


def alpha_free(A: FinStruct, xs: Sequence[int], alpha: int, width: int = 1) -> bool:
    return BackAndForth(A, width).free(alpha, tuple(xs))


def scott_rank_finite(A: FinStruct, max_size: int = 6, width: int = 1, max_alpha: Optional[int] = None) -> int:
    """
    Least alpha such that no non-empty tuple of length at most |A| is alpha-free.

    Parameters:
    -----------
    A : FinStruct
        Structure to analyse.

    max_size : int
        Largest universe accepted. Default is 6.

    width : int
        Extension length in the back-and-forth clauses. Default is 1.

    max_alpha : Optional[int]
        Largest rank tried, |A| + 1 by default.

    Returns:
    --------
    int
        The Scott rank of A.
    """
    if A.size > max_size:
        raise BudgetExceededError("Structure too large for the rank search", [f"{A.size} > {max_size}"])
    bf = BackAndForth(A, width)
    cap = A.size + 1 if max_alpha is None else max_alpha
    for alpha in range(cap + 1):
        free = next((xs for k in range(1, A.size + 1) for xs in bf.tuples(k) if bf.free(alpha, xs)), None)
        if free is None:
            logger.debug(f"Scott rank {alpha} for a structure of size {A.size}")
            return alpha
        logger.debug(f"{free} is {alpha}-free")
    raise BudgetExceededError("Rank search exceeded its bound", [f"alpha > {cap}"])


def automorphisms(A: FinStruct) -> List[Tuple[int, ...]]:
    out = []
    for p in itertools.permutations(range(A.size)):
        if any(p[c] != c for c in A.constants.values()):
            continue
        if all(np.array_equal(arr, arr[np.ix_(*[list(p)] * arr.ndim)]) for arr in A.relations.values()):
            out.append(p)
    return out


def same_orbit(A: FinStruct, xs: Sequence[int], ys: Sequence[int]) -> bool:
    ys = tuple(ys)
    return len(xs) == len(ys) and any(tuple(p[x] for x in xs) == ys for p in automorphisms(A))


def load_golden(file: str) -> List[Tuple[FinStruct, int]]:
    """Golden file: a JSON list of ``{"structure": ..., "rank": ...}`` records"""
    with open(file) as f:
        data = json.load(f)
    return [(FinStruct.from_dict(case["structure"]), int(case["rank"])) for case in data]


def check_golden(file: str, **kwargs) -> Report:
    report = Report()
    for i, (A, expected) in enumerate(load_golden(file)):
        got = scott_rank_finite(A, **kwargs)
        report.add(f"case{i}", None if got == expected else (expected, got))
    logger.info(f"Finite rank suite {file}: {'pass' if report.ok else report.failures()}")
    return report

from dataclasses import dataclass, field
from functools import total_ordering
from itertools import combinations_with_replacement
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from scott_spectra.linorder import EQ, GT, LT, LinOrder, OrderElem

ROOT = 0

NEG_INF_TAG, PAIR_TAG, TOP_TAG = 0, 1, 2


@total_ordering
@dataclass(frozen=True)
class EVal:
    """
    Value of E: minus infinity, a pair (level, count) in L x omega ordered lexicographically, or the top value
    that E takes on the root pair.
    """
    tag: int
    level: Optional[OrderElem] = None
    count: int = 0

    @classmethod
    def pair(cls, level: OrderElem, count: int = 0) -> "EVal":
        if count < 0:
            raise ValueError("E counts are natural numbers")
        return cls(PAIR_TAG, level, int(count))

    @property
    def is_neg_inf(self) -> bool:
        return self.tag == NEG_INF_TAG

    @property
    def el(self) -> Tuple[int, Optional[OrderElem]]:
        """E_L as a comparable key; minus infinity below every level and top above"""
        return self.tag, self.level

    @property
    def ew(self) -> int:
        return self.count

    def __lt__(self, other):
        if not isinstance(other, EVal):
            return NotImplemented
        if self.tag != other.tag:
            return self.tag < other.tag
        if self.tag != PAIR_TAG:
            return False
        return (self.level, self.count) < (other.level, other.count)

    def to_json(self) -> Any:
        if self.tag == NEG_INF_TAG:
            return "-inf"
        if self.tag == TOP_TAG:
            return "top"
        return [self.level.to_json(), self.count]

    @classmethod
    def from_json(cls, order: LinOrder, data) -> "EVal":
        if data == "-inf":
            return NEG_INF
        if data == "top":
            return TOP
        level, count = data
        return cls.pair(order.elem_from_json(level), count)

    def __str__(self) -> str:
        if self.tag == NEG_INF_TAG:
            return "-inf"
        if self.tag == TOP_TAG:
            return "top"
        return f"({self.level},{self.count})"


NEG_INF = EVal(NEG_INF_TAG)
TOP = EVal(TOP_TAG)


def eval_cmp(a: EVal, b: EVal) -> int:
    return LT if a < b else (GT if b < a else EQ)


@dataclass
class Report:
    """
    Outcome of a battery of labelled checks. Each label maps to None when the check passed or to the first
    failing witness.
    """
    checks: Dict[str, Optional[tuple]] = field(default_factory=dict)

    def add(self, label: str, witness: Optional[tuple]) -> None:
        if self.checks.get(label) is None:
            self.checks[label] = None if witness is None else tuple(witness)

    def merge(self, other: "Report") -> "Report":
        for label, witness in other.checks.items():
            self.add(label, witness)
        return self

    @property
    def ok(self) -> bool:
        return all(w is None for w in self.checks.values())

    def failures(self) -> Dict[str, tuple]:
        return {label: w for label, w in self.checks.items() if w is not None}

    def to_dict(self) -> Dict[str, Any]:
        return {label: {"pass": w is None, "witness": None if w is None else [str(x) for x in w]}
                for label, w in self.checks.items()}


class KStruct:
    """
    Finite structure of the class K: a tree of nodes rooted at ``ROOT`` with labels rho and eps on the non-root
    nodes and the function E on pairs of between nodes.

    Values are treated as immutable. Bulk edits go through ``builder()``, which copies the tables once.
    Node ids are assigned in creation order and never reused.
    """

    def __init__(self, order: LinOrder, rn, parent: Dict[int, int], rho: Dict[int, OrderElem],
                 eps: Dict[int, int], evals: Dict[Tuple[int, int], EVal], next_id: int):
        self.order = order
        self.rn = rn
        self.parent = parent
        self.rho = rho
        self.eps = eps
        self.evals = evals
        self.next_id = next_id
        self.__index()

    @classmethod
    def root_only(cls, order: LinOrder, rn) -> "KStruct":
        return cls(order, rn, {}, {}, {}, {}, 1)

    def __index(self):
        self.nodes: List[int] = sorted({ROOT} | set(self.parent))
        self._children: Dict[int, List[int]] = {x: [] for x in self.nodes}
        for x in self.nodes[1:]:
            self._children.setdefault(self.parent[x], []).append(x)

        # depth and (rho, eps) signature; cyclic or dangling parents leave nodes unindexed
        self._depth: Dict[int, int] = {ROOT: 0}
        self._sig: Dict[int, tuple] = {ROOT: ()}
        frontier = [ROOT]
        while frontier:
            nxt = []
            for x in frontier:
                for y in self._children.get(x, []):
                    if y in self._depth:
                        continue
                    self._depth[y] = self._depth[x] + 1
                    self._sig[y] = self._sig[x] + ((self.rho.get(y), self.eps.get(y)),)
                    nxt.append(y)
            frontier = nxt

        self._classes: Dict[tuple, List[int]] = {}
        for x in self.nodes[1:]:
            if x in self._sig:
                self._classes.setdefault(self._sig[x], []).append(x)

    # Tree structure

    @property
    def size(self) -> int:
        return len(self.nodes)

    def __contains__(self, x: int) -> bool:
        return x == ROOT or x in self.parent

    def _check_node(self, x: int) -> None:
        if x not in self:
            raise ValueError(f"Unknown node {x}")

    def children(self, x: int) -> List[int]:
        self._check_node(x)
        return list(self._children.get(x, []))

    def depth(self, x: int) -> int:
        self._check_node(x)
        return self._depth[x]

    def signature(self, x: int) -> tuple:
        self._check_node(x)
        return self._sig[x]

    def path(self, x: int) -> List[int]:
        """Non-root ancestors of x from the root downwards, ending with x"""
        self._check_node(x)
        out = []
        while x != ROOT:
            out.append(x)
            x = self.parent[x]
        return out[::-1]

    def leq(self, x: int, y: int) -> bool:
        """x ⪯ y: x is y or an ancestor of y"""
        while True:
            if x == y:
                return True
            if y == ROOT:
                return False
            y = self.parent[y]

    def between(self, x: int, y: int) -> bool:
        self._check_node(x)
        self._check_node(y)
        if ROOT in (x, y):
            raise ValueError("between is defined on non-root nodes")
        return self._sig[x] == self._sig[y]

    def mates(self, x: int) -> List[int]:
        """Nodes between x, x included"""
        return list(self._classes[self._sig[x]])

    def classes(self) -> List[List[int]]:
        return [list(c) for _, c in sorted(self._classes.items(), key=lambda kv: kv[1][0])]

    def e(self, x: int, y: int) -> EVal:
        """E(x, y), with pairs outside the domain read as minus infinity"""
        if x == ROOT and y == ROOT:
            return TOP
        return self.evals.get((x, y) if x <= y else (y, x), NEG_INF)

    # Derived structures

    def builder(self) -> "KBuilder":
        return KBuilder(self)

    def substructure(self, nodes: Iterable[int]) -> "KStruct":
        """Induced substructure on a set closed under parents; node ids are kept"""
        keep = set(nodes) | {ROOT}
        for x in keep:
            self._check_node(x)
            if x != ROOT and self.parent[x] not in keep:
                raise ValueError(f"Node set is not closed under parents at {x}")
        return KStruct(self.order, self.rn,
                       {x: p for x, p in self.parent.items() if x in keep},
                       {x: r for x, r in self.rho.items() if x in keep},
                       {x: c for x, c in self.eps.items() if x in keep},
                       {k: v for k, v in self.evals.items() if k[0] in keep and k[1] in keep},
                       self.next_id)

    def to_dict(self) -> Dict[str, Any]:
        nodes = [{"id": ROOT}] + [{"id": x, "parent": self.parent[x], "rho": self.rho[x].to_json(),
                                   "eps": self.eps[x]} for x in self.nodes[1:]]
        evals = [[a, b, v.to_json()] for (a, b), v in sorted(self.evals.items())]
        return {"nodes": nodes, "evals": evals, "next_id": self.next_id}

    @classmethod
    def from_dict(cls, order: LinOrder, rn, data: Dict[str, Any]) -> "KStruct":
        parent, rho, eps = {}, {}, {}
        for node in data["nodes"]:
            x = int(node["id"])
            if x == ROOT:
                continue
            parent[x] = int(node["parent"])
            rho[x] = order.elem_from_json(node["rho"])
            eps[x] = int(node["eps"])
        evals = {}
        for a, b, v in data["evals"]:
            a, b = int(a), int(b)
            evals[(a, b) if a <= b else (b, a)] = EVal.from_json(order, v)
        return cls(order, rn, parent, rho, eps, evals, int(data["next_id"]))

    def to_networkx(self, colors: Optional[Dict[int, int]] = None) -> nx.DiGraph:
        graph = nx.DiGraph()
        for x in self.nodes:
            attrs = {"depth": self._depth.get(x)}
            if x != ROOT:
                attrs.update(rho=str(self.rho[x]), eps=self.eps[x])
            if colors is not None:
                attrs["color"] = colors.get(x)
            graph.add_node(x, **attrs)
        graph.add_edges_from((p, x) for x, p in self.parent.items())
        return graph

    def __repr__(self) -> str:
        return f"KStruct({self.order.name}, {self.size} nodes)"


class KBuilder:
    """Mutable copy of a KStruct used for bulk extension"""

    def __init__(self, base: KStruct):
        self.order = base.order
        self.rn = base.rn
        self.parent = dict(base.parent)
        self.rho = dict(base.rho)
        self.eps = dict(base.eps)
        self.evals = dict(base.evals)
        self.next_id = base.next_id
        self._sig = dict(base._sig)
        self._depth = dict(base._depth)
        self._classes = {k: list(v) for k, v in base._classes.items()}

    def add_node(self, parent: int, rho: OrderElem, eps: int) -> int:
        if parent not in self._sig:
            raise ValueError(f"Unknown parent {parent}")
        self.order.check(rho)
        x = self.next_id
        self.next_id += 1
        self.parent[x] = parent
        self.rho[x] = rho
        self.eps[x] = int(eps)
        self._depth[x] = self._depth[parent] + 1
        self._sig[x] = self._sig[parent] + ((rho, int(eps)),)
        self._classes.setdefault(self._sig[x], []).append(x)
        self.evals[(x, x)] = EVal.pair(rho, 0)
        return x

    def mates(self, x: int) -> List[int]:
        return list(self._classes[self._sig[x]])

    def depth(self, x: int) -> int:
        return self._depth[x]

    def e(self, x: int, y: int) -> EVal:
        if x == ROOT and y == ROOT:
            return TOP
        return self.evals.get((x, y) if x <= y else (y, x), NEG_INF)

    def set_e(self, x: int, y: int, value: EVal) -> None:
        self.evals[(x, y) if x <= y else (y, x)] = value

    def build(self) -> KStruct:
        return KStruct(self.order, self.rn, self.parent, self.rho, self.eps, self.evals, self.next_id)


def between(s: KStruct, x: int, y: int) -> bool:
    return s.between(x, y)


def closure(s: KStruct, xs: Sequence[int], ys: Optional[Sequence[int]] = None):
    """
    Close a tuple, or a pair of tuples in parallel, under parents.

    Missing non-root ancestors are inserted immediately before their first descendant. For a pair, ancestors
    are matched level by level; if the pairing becomes inconsistent (different depths, or an ancestor paired
    with two different partners) None is returned.
    """
    ys_given = ys is not None
    ys = xs if ys is None else ys
    if len(xs) != len(ys):
        return None
    out_x, out_y = [], []
    partner_x: Dict[int, int] = {}
    partner_y: Dict[int, int] = {}

    def pair_up(a, b) -> bool:
        if partner_x.get(a, b) != b or partner_y.get(b, a) != a:
            return False
        partner_x[a] = b
        partner_y[b] = a
        return True

    for x, y in zip(xs, ys):
        if (x == ROOT) != (y == ROOT):
            return None
        anc_x, anc_y = s.path(x)[:-1], s.path(y)[:-1]
        if len(anc_x) != len(anc_y):
            return None
        for a, b in zip(anc_x, anc_y):
            if a in partner_x or b in partner_y:
                if not pair_up(a, b):
                    return None
                continue
            pair_up(a, b)
            out_x.append(a)
            out_y.append(b)
        if x != ROOT and not pair_up(x, y):
            return None
        out_x.append(x)
        out_y.append(y)
    return (tuple(out_x), tuple(out_y)) if ys_given else tuple(out_x)


def atomic_equiv(s: KStruct, xs: Sequence[int], ys: Sequence[int], colors: Optional[Dict[int, int]] = None) -> bool:
    """
    Whether x_i -> y_i preserves the atomic diagram: equality, the root, ⪯ and P among tuple members, the
    labels rho and eps, the colours when given, and the exact value of E between tuple members.
    """
    if len(xs) != len(ys):
        return False
    for x, y in zip(xs, ys):
        if (x == ROOT) != (y == ROOT):
            return False
        if x != ROOT and (s.rho[x] != s.rho[y] or s.eps[x] != s.eps[y]):
            return False
        if colors is not None and colors[x] != colors[y]:
            return False
    n = len(xs)
    for i in range(n):
        for j in range(n):
            xi, xj, yi, yj = xs[i], xs[j], ys[i], ys[j]
            if (xi == xj) != (yi == yj):
                return False
            if s.leq(xi, xj) != s.leq(yi, yj):
                return False
            if (s.parent.get(xi) == xj) != (s.parent.get(yi) == yj):
                return False
            if j >= i and s.e(xi, xj) != s.e(yi, yj):
                return False
    return True


def check_axioms(s: KStruct) -> Report:
    """
    Check the tree axioms P1-P6, the domain of E and the axioms Q0-Q6 of the class K.

    Parameters:
    -----------
    s : KStruct
        Structure to check.

    Returns:
    --------
    Report
        Labelled results; a structure is in K iff the report is ok.
    """
    report = Report()
    nodes = s.nodes

    report.add("P3", next(((x,) for x in nodes[1:] if s.parent[x] not in s.parent and s.parent[x] != ROOT), None))
    unreachable = [x for x in nodes if x not in s._depth]
    report.add("P1", (unreachable[0],) if unreachable else None)
    report.add("P4", (unreachable[0],) if unreachable else None)
    report.add("P2", None if nodes[0] == ROOT and ROOT not in s.parent else (ROOT,))
    bad = [x for x in nodes[1:] if not isinstance(s.rho.get(x), OrderElem) or s.rho[x].owner != s.order.name
           or not isinstance(s.eps.get(x), int) or s.eps[x] < 0]
    report.add("P5", (bad[0],) if bad else None)
    if not report.ok:
        return report

    witness = None
    for y in nodes[1:]:
        x = s.parent[y]
        if x != ROOT and not s.rho[x] > s.rho[y]:
            witness = (x, y)
            break
    report.add("P6", witness)

    domain = {(a, b) for cls in s._classes.values() for a, b in combinations_with_replacement(cls, 2)}
    stray = sorted(set(s.evals) ^ domain)
    report.add("E-domain", stray[0] if stray else None)
    report.add("Q1", next(((a, b) for a, b in s.evals if a > b), None))
    if not report.ok:
        return report

    q0 = q2 = q3 = q4 = q5 = q6 = None
    for cls in s._classes.values():
        for x in cls:
            if s.e(x, x) != EVal.pair(s.rho[x], 0):
                q0 = q0 or (x,)
        for x in cls:
            top = EVal.pair(s.rho[x], 0)
            n = s._depth[x]
            for y in cls:
                exy = s.e(x, y)
                if exy > top:
                    q3 = q3 or (x, y)
                if q2 is None:
                    for z in cls:
                        if s.e(x, z) < min(exy, s.e(y, z)):
                            q2 = (x, y, z)
                            break
                if exy.tag == 1 and exy.level != s.rho[x] and not s.rn.member(n, exy.level):
                    q6 = q6 or (x, y)
                for xc in s._children[x]:
                    for yc in s._children[y]:
                        ec = s.e(xc, yc)
                        if ec.el > exy.el:
                            q5 = q5 or (x, y, xc, yc)
                        if not exy.is_neg_inf and s.eps[xc] >= exy.ew and ec.el == exy.el:
                            q4 = q4 or (x, y, xc, yc)
    report.add("Q0", q0)
    report.add("Q2", q2)
    report.add("Q3", q3)
    report.add("Q4", q4)
    report.add("Q5", q5)
    report.add("Q6", q6)
    return report

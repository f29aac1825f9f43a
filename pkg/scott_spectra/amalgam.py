import logging
from typing import Dict, Optional, Sequence, Tuple

from scott_spectra._utils import (AmalgamationError, CertificationError, EmbeddingError, EpsilonBoundError,
                                  GameInvariantError, MarginTooSmallError, NotAtomicEquivError, NotClosedError,
                                  NotWellFoundedError, ParentMissingError)
from scott_spectra.kstruct import NEG_INF, ROOT, EVal, KBuilder, KStruct, atomic_equiv, check_axioms, closure
from scott_spectra.linorder import OrderElem

logger = logging.getLogger(__name__)


def _certify(s: KStruct, what: str) -> None:
    report = check_axioms(s)
    if not report.ok:
        raise CertificationError(f"{what} is not in K", [report])


def _same_references(a: KStruct, b: KStruct) -> bool:
    return a.order == b.order and a.rn is b.rn


class Embedding:
    """
    Injective node map src -> dst preserving the root, P, rho, eps and E. Preservation is checked on
    construction and a failure raises EmbeddingError.
    """

    def __init__(self, src: KStruct, dst: KStruct, mapping: Dict[int, int]):
        self.src = src
        self.dst = dst
        self.map = dict(mapping)
        self.map[ROOT] = self.map.get(ROOT, ROOT)
        self.__verify()

    @classmethod
    def identity(cls, src: KStruct, dst: Optional[KStruct] = None) -> "Embedding":
        return cls(src, src if dst is None else dst, {x: x for x in src.nodes})

    def compose(self, other: "Embedding") -> "Embedding":
        """self followed by other"""
        if other.src is not self.dst:
            raise EmbeddingError("Embeddings do not compose", [repr(self.dst), repr(other.src)])
        return Embedding(self.src, other.dst, {x: other.map[y] for x, y in self.map.items()})

    def __call__(self, x: int) -> int:
        return self.map[x]

    def __verify(self):
        src, dst, f = self.src, self.dst, self.map
        if not _same_references(src, dst):
            raise EmbeddingError("Embedding between structures over different orders or R systems",
                                 [src.order.name, dst.order.name])
        if set(f) != set(src.nodes):
            raise EmbeddingError("Embedding is not total on its source", sorted(set(src.nodes) ^ set(f)))
        if f[ROOT] != ROOT:
            raise EmbeddingError("Embedding moves the root", [f[ROOT]])
        if len(set(f.values())) != len(f) or any(y not in dst for y in f.values()):
            raise EmbeddingError("Embedding is not injective into its target", [])
        for x in src.nodes[1:]:
            y = f[x]
            if dst.parent.get(y) != f[src.parent[x]] or dst.rho[y] != src.rho[x] or dst.eps[y] != src.eps[x]:
                raise EmbeddingError(f"Embedding does not preserve P, rho or eps at {x}", [(x, y)])
        for (a, b), value in src.evals.items():
            if dst.e(f[a], f[b]) != value:
                raise EmbeddingError(f"Embedding does not preserve E at ({a}, {b})", [(a, b)])

    def __repr__(self) -> str:
        return f"Embedding({self.src!r} -> {self.dst!r})"


def amalgamate_point(a_in_b: Embedding, a_plus_c: KStruct, c: int, verify: bool = True) -> KStruct:
    """
    Amalgamate a single new point c over A into B.

    The new node copies the parent, rho and eps of c. For every b of B between c,
    E(b, c) is the maximum over a in A between c of min(E(b, a), E(a, c)), and minus infinity when there is
    no such a.

    Parameters:
    -----------
    a_in_b : Embedding
        Embedding of A into B.

    a_plus_c : KStruct
        A together with the single leaf c.

    c : int
        The new leaf of a_plus_c.

    verify : bool
        Re-check the inputs and the result against the axioms of K. Default is True.

    Returns:
    --------
    KStruct
        B extended by the image of c, which gets the id ``next_id - 1`` of the result.
    """
    a, b = a_in_b.src, a_in_b.dst
    if not (_same_references(a, b) and _same_references(a, a_plus_c)):
        raise AmalgamationError("Structures refer to different orders or R systems", [])
    if c in a or c not in a_plus_c:
        raise AmalgamationError(f"{c} is not a new point over A", [c])
    if set(a_plus_c.nodes) != set(a.nodes) | {c}:
        raise AmalgamationError("A + c must extend A by exactly one node", [])
    if a_plus_c.parent[c] not in a:
        raise AmalgamationError(f"Parent of {c} lies outside A", [a_plus_c.parent[c]])
    if verify:
        Embedding.identity(a, a_plus_c)
        _certify(b, "B")
        _certify(a_plus_c, "A + c")

    f = a_in_b.map
    builder = b.builder()
    new = builder.add_node(f[a_plus_c.parent[c]], a_plus_c.rho[c], a_plus_c.eps[c])
    witnesses = [x for x in a_plus_c.mates(c) if x != c]
    for y in builder.mates(new):
        if y == new:
            continue
        value = NEG_INF
        for x in witnesses:
            value = max(value, min(b.e(y, f[x]), a_plus_c.e(x, c)))
        builder.set_e(y, new, value)

    d = builder.build()
    if verify:
        _certify(d, "Amalgam")
    return d


def amalgamate(a_in_b: Embedding, a_in_c: Embedding, verify: bool = True) -> Tuple[KStruct, Embedding, Embedding]:
    """
    Amalgamate B and C over A by adding the points of C outside A one at a time.

    Parameters:
    -----------
    a_in_b, a_in_c : Embedding
        Embeddings of a common A into B and C.

    verify : bool
        Certify the inputs and the amalgam. Default is True.

    Returns:
    --------
    Tuple[KStruct, Embedding, Embedding]
        The amalgam D together with the embeddings of B and C into D, which agree on A.
    """
    if a_in_b.src is not a_in_c.src:
        raise AmalgamationError("Embeddings must share their source", [])
    a, b, c = a_in_b.src, a_in_b.dst, a_in_c.dst
    if verify:
        for s, what in ((a, "A"), (b, "B"), (c, "C")):
            _certify(s, what)

    g = {a_in_c.map[x]: a_in_b.map[x] for x in a.nodes}
    d = b
    for x in sorted((x for x in c.nodes if x not in g), key=lambda y: (c.depth(y), y)):
        done = c.substructure(g)
        d = amalgamate_point(Embedding(done, d, g), c.substructure(list(g) + [x]), x, verify=False)
        g[x] = d.next_id - 1

    if verify:
        _certify(d, "Amalgam")
    return d, Embedding.identity(b, d), Embedding(c, d, g)


def isolate_into(builder: KBuilder, parent: int, rho: OrderElem, eps: int) -> int:
    """Add an isolated leaf to a builder in place"""
    if parent not in builder.parent and parent != ROOT:
        raise AmalgamationError(f"Unknown parent {parent}", [parent])
    if parent != ROOT and not rho < builder.rho[parent]:
        raise AmalgamationError(f"rho {rho} is not below rho({parent}) = {builder.rho[parent]}", [(parent, str(rho))])
    x = builder.add_node(parent, rho, eps)
    for y in builder.mates(x):
        if y != x:
            builder.set_e(x, y, NEG_INF)
    return x


def isolate_embed(s: KStruct, parent: int, rho: OrderElem, eps: int, verify: bool = True) -> Tuple[KStruct, int]:
    """New leaf under parent with E = -inf against every other node between it"""
    builder = s.builder()
    x = isolate_into(builder, parent, rho, eps)
    out = builder.build()
    if verify:
        _certify(out, "Isolated extension")
    return out, x


def margin(s: KStruct, x: int, beta: OrderElem, m: int) -> EVal:
    """min((rho(x), 0), (beta, m))"""
    return min(EVal.pair(s.rho[x], 0), EVal.pair(beta, m))


def _check_closed(s: KStruct, xs: Sequence[int], what: str) -> None:
    members = set(xs) | {ROOT}
    for x in xs:
        if x != ROOT and s.parent[x] not in members:
            raise NotClosedError(f"{what} is not closed under P", [(x, s.parent[x])])


def extend_tuple(s: KStruct, us: Sequence[int], us2: Sequence[int], v: int, beta: OrderElem, m: int,
                 close: bool = True, verify: bool = True) -> Tuple[KStruct, int]:
    """
    Transport v along the correspondence us -> us2.

    Given atomically equivalent tuples us and us2 with E(u_i, u_i') >= min((rho(u_i), 0), (beta, m)) for each i,
    add a node v' such that us + (v,) and us2 + (v',) satisfy the same two conditions.

    Parameters:
    -----------
    s : KStruct
        Structure in K.

    us, us2 : Sequence[int]
        Corresponding tuples. With ``close`` they are first closed under P in parallel, otherwise they must
        already be closed.

    v : int
        Non-root node whose parent is among us or is the root.

    beta : OrderElem
        Level in the well-founded part of the order.

    m : int
        Count bound; eps of every listed node and of its ancestors must be below m.

    close : bool
        Close the tuples under P before checking. Default is True.

    verify : bool
        Certify the result and re-check the postconditions. Default is True.

    Returns:
    --------
    Tuple[KStruct, int]
        The extended structure and v'. When v is already some u_i the structure is returned unchanged with
        v' = u_i'.
    """
    if len(us) != len(us2):
        raise NotAtomicEquivError("Tuples differ in length", [len(us), len(us2)])
    if close:
        closed = closure(s, us, us2)
        if closed is None:
            raise NotAtomicEquivError("Tuples cannot be closed under P in parallel", [tuple(us), tuple(us2)])
        us, us2 = closed
    else:
        _check_closed(s, us, "us")
        _check_closed(s, us2, "us2")
    us, us2 = tuple(us), tuple(us2)

    if v == ROOT or v not in s:
        raise ValueError(f"{v} is not a non-root node")
    if v in us:
        return s, us2[us.index(v)]
    u = s.parent[v]
    if u != ROOT and u not in us:
        raise ParentMissingError(f"Parent {u} of {v} is not among us", [(v, u)])
    if not atomic_equiv(s, us, us2):
        raise NotAtomicEquivError("Tuples are not atomically equivalent", [us, us2])
    if not s.order.in_wf(beta):
        raise NotWellFoundedError(f"{beta} lies outside the well-founded part", [str(beta)])
    for x, x2 in zip(us, us2):
        if x != ROOT and s.e(x, x2) < margin(s, x, beta, m):
            raise MarginTooSmallError(f"E({x}, {x2}) = {s.e(x, x2)} is below the margin", [(x, x2)])
    listed = [x for x in us + us2 + (v,) if x != ROOT]
    big = [x for x in listed if s.eps[x] >= m]
    if big:
        raise EpsilonBoundError(f"eps({big[0]}) = {s.eps[big[0]]} is not below m = {m}", big)

    u2 = ROOT if u == ROOT else us2[us.index(u)]
    ys = [(y, y2) for y, y2 in zip(us, us2) if y != ROOT and s.between(y, v)]

    # finite structure on us, us2, v and the new v'
    domain = sorted(set(listed))
    builder = s.substructure(domain).builder()
    v2 = builder.add_node(u2, s.rho[v], s.eps[v])
    values: Dict[int, EVal] = {}
    for y, y2 in ys:
        values.setdefault(y2, s.e(v, y))
    for y, _ in ys:
        if y not in values:
            values[y] = max(min(s.e(v, yj), s.e(yj2, y)) for yj, yj2 in ys)
    if v not in values:
        n = s.depth(v)
        if beta >= s.rho[v]:
            bound = EVal.pair(s.rho[v], 0)
        elif s.rn.member(n, beta):
            bound = margin(s, v, beta, m)
        else:
            gamma = s.rn.least_above(n, beta)
            bound = EVal.pair(s.rho[v], 0) if gamma is None else min(EVal.pair(s.rho[v], 0), EVal.pair(gamma, 0))
        values[v] = max([bound] + [min(s.e(v, yj), s.e(yj2, v)) for yj, yj2 in ys])
    for y in builder.mates(v2):
        if y != v2:
            builder.set_e(v2, y, values.get(y, NEG_INF))
    local = builder.build()

    out = amalgamate_point(Embedding.identity(s.substructure(domain), s), local, v2, verify=False)
    v2 = out.next_id - 1
    logger.debug(f"Transported {v} to {v2} at level ({beta},{m}), E(v,v') = {out.e(v, v2)}")

    if verify:
        _certify(out, "Extension")
        if not atomic_equiv(out, us + (v,), us2 + (v2,)):
            raise GameInvariantError("Extended tuples are not atomically equivalent", [us + (v,), us2 + (v2,)])
        if out.e(v, v2) < margin(out, v, beta, m):
            raise GameInvariantError("Extended pair misses the margin", [(v, v2)])
    return out, v2

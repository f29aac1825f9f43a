import json
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Set, Tuple

from scott_spectra._utils import BudgetExceededError, CertificationError, SnapshotError
from scott_spectra.amalgam import Embedding, amalgamate_point, isolate_into
from scott_spectra.kstruct import ROOT, EVal, KStruct, Report, check_axioms
from scott_spectra.linorder import LinOrder, OrderElem, mk_order
from scott_spectra.rn_system import RnSystem, build_rn

logger = logging.getLogger(__name__)


@dataclass
class Approx:
    """
    Finite approximation of the limit model: a structure of K with the colouring A_i.

    Colours are natural numbers, the root has colour 0 and fresh colours are handed out in node creation order.
    Two non-root nodes share a colour iff they are between each other and E between them is above minus
    infinity.

    Growth is deterministic. ``seed`` travels with the snapshot and seeds the challengers of the games and the
    freeness evidence run against it, so a stored snapshot is re-verified with the same sample.
    """
    base: KStruct
    colors: Dict[int, int]
    next_color: int = 1
    stage: int = 0
    seed: int = 0
    log: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def order(self) -> LinOrder:
        return self.base.order

    @property
    def rn(self) -> RnSystem:
        return self.base.rn

    def signatures(self) -> Set[tuple]:
        """(rho, eps) label sequences realised by the nodes"""
        return {self.base.signature(x) for x in self.base.nodes}

    def check_colors(self) -> Report:
        """A2 (one colour per node) and A1 (colours are the E-positivity classes)"""
        report = Report()
        s = self.base
        missing = [x for x in s.nodes if x not in self.colors]
        report.add("A2", (missing[0],) if missing else None)
        if missing:
            return report

        witness = None
        owner: Dict[int, Any] = {}
        for x in s.nodes:
            key = ROOT if x == ROOT else s.signature(x)
            if owner.setdefault(self.colors[x], key) != key:
                witness = (x,)
                break
        if witness is None:
            for cls in s.classes():
                for i, x in enumerate(cls):
                    for y in cls[i + 1:]:
                        if (self.colors[x] == self.colors[y]) != (not s.e(x, y).is_neg_inf):
                            witness = (x, y)
                            break
                    if witness:
                        break
                if witness:
                    break
        report.add("A1", witness)
        return report

    def to_dict(self) -> Dict[str, Any]:
        return {"order": self.order.spec, "rn": self.rn.mode, "structure": self.base.to_dict(),
                "colors": [[x, c] for x, c in sorted(self.colors.items())], "next_color": self.next_color,
                "stage": self.stage, "seed": self.seed, "log": self.log}

    def save_to_file(self, file: str):
        """Write the snapshot as canonical JSON"""
        with open(file, "w") as f:
            f.write(json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")))

    @classmethod
    def load_from_file(cls, file: str, **rn_kwargs) -> "Approx":
        """Load a snapshot and re-verify it"""
        try:
            with open(file) as f:
                data = json.load(f)
            order = mk_order(data["order"])
            rn = build_rn(order, data["rn"], **rn_kwargs)
            approx = cls(KStruct.from_dict(order, rn, data["structure"]),
                         {int(x): int(c) for x, c in data["colors"]}, int(data["next_color"]),
                         int(data["stage"]), int(data["seed"]), list(data["log"]))
        except (OSError, ValueError, KeyError, TypeError) as err:
            raise SnapshotError(f"Unreadable snapshot {file}", [str(err)])

        report = check_axioms(approx.base).merge(approx.check_colors())
        if not report.ok:
            raise SnapshotError(f"Snapshot {file} fails verification", [report])
        return approx


def new_approx(order: LinOrder, rn: RnSystem, seed: int = 0) -> Approx:
    return Approx(KStruct.root_only(order, rn), {ROOT: 0}, 1, 0, seed, [])


def color_of(a: Approx, x: int) -> int:
    if x not in a.colors:
        raise ValueError(f"Unknown node {x}")
    return a.colors[x]


def _recolor(s: KStruct, colors: Dict[int, int], next_color: int) -> Tuple[Dict[int, int], int]:
    colors = dict(colors)
    for x in s.nodes:
        if x in colors:
            continue
        shared = next((colors[y] for y in s.mates(x) if y in colors and not s.e(x, y).is_neg_inf), None)
        if shared is None:
            shared = next_color
            next_color += 1
        colors[x] = shared
    return colors, next_color


def adopt(a: Approx, base: KStruct, record: Dict[str, Any]) -> Approx:
    """Replace the structure of an approximation by an extension of it and colour the new nodes"""
    colors, next_color = _recolor(base, a.colors, a.next_color)
    return replace(a, base=base, colors=colors, next_color=next_color, log=a.log + [record])


def _verify(a: Approx, what: str) -> None:
    report = check_axioms(a.base).merge(a.check_colors())
    if not report.ok:
        raise CertificationError(f"{what} is not a model approximation", [report])


def _sibling_request(s: KStruct, x: int, target: EVal) -> Tuple[Embedding, KStruct, int]:
    # the path to x plus a copy of x under the same parent; ancestors are shared so only (x, x') needs E
    sub = s.substructure(s.path(x))
    builder = sub.builder()
    c = builder.add_node(s.parent[x], s.rho[x], s.eps[x])
    builder.set_e(x, c, target)
    return Embedding.identity(sub, s), builder.build(), c


def sibling_witness(s: KStruct, x: int, target: EVal) -> Tuple[KStruct, int]:
    """
    Add a sibling x' of x with E(x, x') = target.

    target must be below (rho(x), 0) with level in R_{|x|}.
    """
    emb, req, c = _sibling_request(s, x, target)
    out = amalgamate_point(emb, req, c, verify=False)
    return out, out.next_id - 1


def _check_budget(size: int, max_nodes: int) -> None:
    if size > max_nodes:
        raise BudgetExceededError("Growth exceeded its node budget", [f"{size} > {max_nodes} nodes"])


def grow(a: Approx, stages: int, max_nodes: int = 20_000, verify: bool = True) -> Approx:
    """
    Run growth stages on an approximation.

    At stage s, with P the first s enumerated elements of the order:

    * every node present at the start of the stage gets a child labelled (alpha, c) for each alpha in P
      below its rho and each c <= s, unless such a child exists;
    * every non-root node x present at the start of the stage gets a between sibling x' with
      E(x, x') = (gamma, n) for each gamma in P below rho(x) with gamma in R_{|x|} and each n <= s, unless
      one exists;
    * new nodes are coloured.

    Parameters:
    -----------
    a : Approx
        Approximation to grow.

    stages : int
        Number of stages to run.

    max_nodes : int
        Node budget; exceeding it raises BudgetExceededError. Default is 20000.

    verify : bool
        Certify the structure and the colouring after every stage. Default is True.

    Returns:
    --------
    Approx
        The grown approximation; the input is left untouched.
    """
    for _ in range(stages):
        s = a.stage + 1
        prefix = a.order.elements(s)
        counts = range(s + 1)
        base = a.base
        existing = list(base.nodes)

        builder = base.builder()
        for x in existing:
            labels = {(base.rho[y], base.eps[y]) for y in base.children(x)}
            for alpha in prefix:
                if x != ROOT and not alpha < base.rho[x]:
                    continue
                for c in counts:
                    if (alpha, c) not in labels:
                        isolate_into(builder, x, alpha, c)
        base = builder.build()
        _check_budget(base.size, max_nodes)

        for x in existing[1:]:
            n = base.depth(x)
            for gamma in prefix:
                if not gamma < base.rho[x] or not a.rn.member(n, gamma):
                    continue
                for k in counts:
                    target = EVal.pair(gamma, k)
                    if any(base.e(x, y) == target for y in base.mates(x)):
                        continue
                    base, _ = sibling_witness(base, x, target)
                    _check_budget(base.size, max_nodes)

        colors, next_color = _recolor(base, a.colors, a.next_color)
        a = replace(a, base=base, colors=colors, next_color=next_color, stage=s,
                    log=a.log + [{"kind": "grow", "stage": s, "nodes": base.size}])
        if verify:
            _verify(a, f"Stage {s}")
        logger.info(f"Stage {s}: {base.size} nodes, {next_color} colours")
    return a


def realize(a: Approx, req: KStruct, c: int, base_in_a: Embedding, verify: bool = True) -> Tuple[Approx, int]:
    """
    Realise a one-point extension inside the approximation.

    Parameters:
    -----------
    a : Approx
        Approximation.

    req : KStruct
        A structure B plus the single new leaf c.

    c : int
        The new point of req.

    base_in_a : Embedding
        Embedding of B (req without c) into ``a.base``.

    verify : bool
        Certify the request and the result. Default is True.

    Returns:
    --------
    Tuple[Approx, int]
        The new approximation and the node realising c.
    """
    if base_in_a.dst is not a.base:
        raise ValueError("Embedding does not land in the approximation")
    base = amalgamate_point(base_in_a, req, c, verify=verify)
    node = base.next_id - 1
    out = adopt(a, base, {"kind": "realize", "point": c, "node": node, "request": req.to_dict(),
                          "map": [[x, y] for x, y in sorted(base_in_a.map.items())]})
    if verify:
        _verify(out, "Realisation")
    return out, node


def realize_child(a: Approx, parent: int, rho: OrderElem, eps: int, verify: bool = True) -> Tuple[Approx, int]:
    """A child of parent labelled (rho, eps), realised as an isolated point when none exists yet"""
    s = a.base
    existing = next((y for y in s.children(parent) if s.rho[y] == rho and s.eps[y] == eps), None)
    if existing is not None:
        return a, existing
    sub = s.substructure(s.path(parent))
    builder = sub.builder()
    c = isolate_into(builder, parent, rho, eps)
    return realize(a, builder.build(), c, Embedding.identity(sub, s), verify=verify)


def realize_sibling(a: Approx, x: int, target: EVal, verify: bool = True) -> Tuple[Approx, int]:
    """A between sibling x' of x with E(x, x') = target, reusing one when it exists"""
    s = a.base
    existing = next((y for y in s.mates(x) if y != x and s.e(x, y) == target), None)
    if existing is not None:
        return a, existing
    emb, req, c = _sibling_request(s, x, target)
    return realize(a, req, c, emb, verify=verify)


def find_pair(a: Approx, x: int, lower: EVal, upper: EVal) -> Optional[int]:
    """A between sibling x' of x with lower < E(x, x') < upper, if the approximation has one"""
    s = a.base
    return next((y for y in s.mates(x) if y != x and lower < s.e(x, y) < upper), None)

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from scott_spectra._utils import BudgetExceededError, GameInvariantError, PreconditionError
from scott_spectra.amalgam import extend_tuple
from scott_spectra.kstruct import ROOT, EVal, Report, atomic_equiv, closure
from scott_spectra.limitgen import Approx, adopt, find_pair, realize_child, realize_sibling
from scott_spectra.linorder import OrderElem

logger = logging.getLogger(__name__)

DEFENDER_SURVIVED = "DefenderSurvived"
CHALLENGER_WON = "ChallengerWon"


@dataclass(frozen=True)
class GameRound:
    side: str
    challenge: int
    response: Optional[int]
    level: Any
    depth: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {"side": self.side, "challenge": self.challenge, "response": self.response,
                "level": str(self.level), "depth": self.depth}


@dataclass
class GameTranscript:
    rounds: List[GameRound] = field(default_factory=list)
    outcome: str = DEFENDER_SURVIVED
    won_at: Optional[int] = None

    @property
    def challenger_won(self) -> bool:
        return self.outcome == CHALLENGER_WON

    def to_dict(self) -> Dict[str, Any]:
        return {"rounds": [r.to_dict() for r in self.rounds], "outcome": self.outcome, "won_at": self.won_at}


def sim_level(a: Approx, x: int, y: int, alpha: OrderElem, n: int = 0) -> bool:
    """x ~_{alpha,n} y: E(x, y) >= min((rho(x), 0), (alpha, n))"""
    s = a.base
    if x == y:
        return True
    if ROOT in (x, y) or not s.between(x, y):
        return False
    return s.e(x, y) >= min(EVal.pair(s.rho[x], 0), EVal.pair(alpha, n))


def sim_alpha(a: Approx, x: int, y: int, alpha: OrderElem) -> bool:
    return sim_level(a, x, y, alpha, 0)


def _atomic(a: Approx, xs: Sequence[int], ys: Sequence[int]):
    closed = closure(a.base, xs, ys)
    if closed is None or not atomic_equiv(a.base, closed[0], closed[1], a.colors):
        return None
    return closed


def sim_tuple(a: Approx, xs: Sequence[int], ys: Sequence[int], alpha: OrderElem) -> bool:
    """Tuples closed under P, atomically equivalent and pointwise ~_alpha"""
    closed = _atomic(a, xs, ys)
    return closed is not None and all(sim_alpha(a, x, y, alpha) for x, y in zip(*closed))


def _sim_above(a: Approx, xs: Sequence[int], ys: Sequence[int], beta: OrderElem) -> bool:
    # ~_alpha for some alpha > beta: E_L above beta, or E at its maximum (rho, 0)
    closed = _atomic(a, xs, ys)
    if closed is None:
        return False
    s = a.base
    for x, y in zip(*closed):
        if x == y:
            continue
        e = s.e(x, y)
        if not (e >= EVal.pair(s.rho[x], 0) or (not e.is_neg_inf and e.level > beta)):
            return False
    return True


def _margin_holds(a: Approx, xs: Sequence[int], ys: Sequence[int], beta: OrderElem, m: int) -> bool:
    closed = _atomic(a, xs, ys)
    if closed is None:
        return False
    s = a.base
    return all(x == y or s.e(x, y) >= min(EVal.pair(s.rho[x], 0), EVal.pair(beta, m)) for x, y in zip(*closed))


def _max_eps(a: Approx, nodes: Sequence[int]) -> int:
    s = a.base
    return max([s.eps[z] for x in nodes for z in s.path(x)], default=0)


def _transport(a: Approx, us: Tuple[int, ...], us2: Tuple[int, ...], v: int, beta: OrderElem, m: int,
               verify: bool) -> Tuple[Approx, Tuple[int, ...], Tuple[int, ...], int]:
    """Answer v by transporting its path one node at a time"""
    us, us2 = closure(a.base, us, us2)
    answer = None
    for w in a.base.path(v):
        if w in us:
            answer = us2[us.index(w)]
            continue
        base, answer = extend_tuple(a.base, us, us2, w, beta, m, close=False, verify=verify)
        if base is not a.base:
            a = adopt(a, base, {"kind": "extend", "node": w, "answer": answer, "level": str(beta), "m": m})
        us, us2 = us + (w,), us2 + (answer,)
    return a, us, us2, answer


def _challenge(a: Approx, rng: np.random.Generator, m: Optional[int]) -> Tuple[Approx, int]:
    s = a.base
    pool = [x for x in s.nodes[1:] if m is None or all(s.eps[z] < m for z in s.path(x))]
    if pool and rng.random() >= 0.25:
        return a, pool[int(rng.integers(len(pool)))]

    parents = [ROOT] + pool
    parent = parents[int(rng.integers(len(parents)))]
    labels = [b for b in a.order.elements(max(a.stage, 1)) if parent == ROOT or b < s.rho[parent]]
    if not labels:
        parent = ROOT
        labels = a.order.elements(max(a.stage, 1))
    rho = labels[int(rng.integers(len(labels)))]
    eps = int(rng.integers(m if m is not None else 3))
    return realize_child(a, parent, rho, eps, verify=False)


def defender_game(a: Approx, xs: Sequence[int], ys: Sequence[int], levels: Sequence[OrderElem], seed: int = 0,
                  m: Optional[int] = None, verify: bool = True) -> Tuple[Approx, GameTranscript]:
    """
    Play the back-and-forth game with a seeded challenger and the extension lemma as the defender.

    Parameters:
    -----------
    a : Approx
        Approximation to play in; challenges and answers are realised in it.

    xs, ys : Sequence[int]
        Starting position, ~_alpha for some alpha above ``levels[0]``.

    levels : Sequence[OrderElem]
        Strictly decreasing levels beta_1 > ... > beta_d in the well-founded part, one per round.

    seed : int
        Seed of the challenger. Default is 0.

    m : Optional[int]
        Fixed count bound. By default every round uses 1 + the largest eps among the mentioned nodes and
        their ancestors. With a fixed m the position only needs E(x_i, y_i) >= min((rho, 0), (beta_1, m)) and
        the challenger is restricted to nodes whose path has eps below m.

    verify : bool
        Certify every extension. Default is True.

    Returns:
    --------
    Tuple[Approx, GameTranscript]
        The approximation after the game and the transcript.
    """
    levels = list(levels)
    if any(not b < c for c, b in zip(levels, levels[1:])):
        raise PreconditionError("Game levels must be strictly decreasing", [str(b) for b in levels])
    if any(not a.order.in_wf(b) for b in levels):
        raise PreconditionError("Game levels must lie in the well-founded part", [str(b) for b in levels])
    xs, ys = tuple(xs), tuple(ys)
    if levels:
        ok = _sim_above(a, xs, ys, levels[0]) if m is None else _margin_holds(a, xs, ys, levels[0], m)
        if not ok:
            raise PreconditionError("Starting position is not equivalent above the first level", [xs, ys])

    rng = np.random.default_rng(seed)
    transcript = GameTranscript()
    for i, beta in enumerate(levels, start=1):
        a, v = _challenge(a, rng, m)
        right = bool(rng.integers(2))
        bound = m if m is not None else 1 + _max_eps(a, xs + ys + (v,))
        if right:
            a, ys, xs, answer = _transport(a, ys, xs, v, beta, bound, verify)
        else:
            a, xs, ys, answer = _transport(a, xs, ys, v, beta, bound, verify)
        transcript.rounds.append(GameRound("right" if right else "left", v, answer, beta, i))
        if not sim_tuple(a, xs, ys, beta):
            raise GameInvariantError(f"Defender lost round {i} at level {beta}", [xs, ys])
    logger.info(f"Defender survived {len(levels)} rounds")
    return a, transcript


def challenger_distinguish(a: Approx, x: int, y: int, alpha: OrderElem,
                           verify: bool = True) -> Tuple[Approx, GameTranscript]:
    """
    Challenger strategy for a pair that is not ~_alpha.

    If the atomic types differ the challenger wins at once. Otherwise E(x, y) = (beta, l) with beta below alpha
    and the challenger plays a child z of x with rho(z) = beta and eps(z) = l. Every candidate answer w, a child
    of y with the same labels, has E_L(z, w) < beta and the strategy continues on (z, w) at level beta.
    """
    if sim_alpha(a, x, y, alpha):
        raise PreconditionError(f"{x} and {y} are already ~_{alpha}", [(x, y)])
    if not a.order.in_wf(alpha):
        raise PreconditionError(f"{alpha} lies outside the well-founded part", [str(alpha)])

    transcript = GameTranscript(outcome=CHALLENGER_WON, won_at=0)

    def play(a: Approx, xs: Tuple[int, ...], ys: Tuple[int, ...], level: OrderElem, depth: int) -> Approx:
        if _atomic(a, xs, ys) is None:
            transcript.won_at = max(transcript.won_at, depth)
            return a
        x, y = xs[-1], ys[-1]
        e = a.base.e(x, y)
        if sim_alpha(a, x, y, level):
            transcript.outcome = DEFENDER_SURVIVED
            return a
        a, z = realize_child(a, x, e.level, e.ew, verify=verify)
        s = a.base
        answers = [w for w in s.children(y) if s.rho[w] == s.rho[z] and s.eps[w] == s.eps[z]]
        if not answers:
            transcript.rounds.append(GameRound("challenger", z, None, e.level, depth + 1))
            transcript.won_at = max(transcript.won_at, depth + 1)
        for w in answers:
            transcript.rounds.append(GameRound("challenger", z, w, e.level, depth + 1))
            a = play(a, xs + (z,), ys + (w,), e.level, depth + 1)
        return a

    a = play(a, (x,), (y,), alpha, 0)
    logger.info(f"Challenger on ({x}, {y}) at {alpha}: {transcript.outcome} after {transcript.won_at} rounds")
    return a, transcript


def sample_game_positions(a: Approx, rng: np.random.Generator, count: int) -> List[Tuple[int, int, EVal]]:
    """Random between pairs x != y with E(x, y) > -inf, together with E(x, y)"""
    s = a.base
    pairs = [(x, y) for cls in s.classes() for x in cls for y in cls
             if x < y and not s.e(x, y).is_neg_inf]
    if not pairs:
        return []
    picks = rng.choice(len(pairs), size=min(count, len(pairs)), replace=False)
    return [(pairs[i][0], pairs[i][1], s.e(*pairs[i])) for i in sorted(int(p) for p in picks)]


def _levels_below(a: Approx, top: OrderElem, depth: int) -> List[OrderElem]:
    below = sorted((b for b in a.order.elements(max(a.stage, 1)) if b < top), reverse=True)
    return below[:depth]


def _admissible(a: Approx, beta: OrderElem, alpha: OrderElem) -> bool:
    # sibling levels lie in R_1, so a pair strictly between (beta, m) and (alpha, 0) needs R_1 to meet [beta, alpha)
    gamma = a.rn.least_geq(1, beta)
    return gamma is not None and gamma < alpha


def free_witness_evidence(a: Approx, alpha: OrderElem, depth: int = 2, budget: int = 3, seed: int = 0,
                          samples: int = 20, verify: bool = True) -> Report:
    """
    Finite evidence that a root child x with rho(x) = alpha is alpha-free.

    For every sampled beta < alpha and m <= budget it looks for a between sibling x' with
    (alpha, 0) > E(x, x') > (beta, m), realising one when the approximation has none. It then lets the
    defender survive ``depth`` rounds from (x, x') starting at level beta, and checks that the challenger
    distinguishes x from x' at alpha.

    Only levels beta with a member of R_1 in [beta, alpha) are sampled. Under the trivial system every level
    qualifies. Under the greedy system of a finite order R_1 = {max} and none does, so a PreconditionError is
    raised.

    Parameters:
    -----------
    a : Approx
        Approximation; it is extended locally and the caller's value is left untouched.

    alpha : OrderElem
        Enumerated element of the well-founded part above the least element.

    depth : int
        Game depth. Default is 2.

    budget : int
        Largest m. Default is 3.

    seed : int
        Seed of the challengers. Default is 0.

    samples : int
        Number of levels beta to sample. Default is 20.

    Returns:
    --------
    Report
        Labels ``root-child``, ``pairs``, ``defender``, ``challenger`` and ``budget``.
    """
    order = a.order
    if not order.in_wf(alpha) or alpha == order.least:
        raise PreconditionError(f"{alpha} must be a positive element of the well-founded part", [str(alpha)])
    if alpha not in order.elements(a.stage):
        raise PreconditionError(f"{alpha} is not enumerated by stage {a.stage}", [str(alpha)])

    report = Report()
    rng = np.random.default_rng(seed)
    try:
        a, x = realize_child(a, ROOT, alpha, 0, verify=verify)
        report.add("root-child", None if a.base.rho[x] == alpha else (x,))
        betas = sorted(b for b in order.elements(max(a.stage, 1)) if b < alpha and _admissible(a, b, alpha))
        if not betas:
            raise PreconditionError(f"No level below {alpha} has a member of R_1 between it and {alpha}",
                                    [str(alpha), a.rn.mode])
        if len(betas) > samples:
            betas = sorted(betas[int(i)] for i in rng.choice(len(betas), size=samples, replace=False))

        top = EVal.pair(alpha, 0)
        for beta in betas:
            for m in range(budget + 1):
                lower = EVal.pair(beta, m)
                x2 = find_pair(a, x, lower, top)
                if x2 is None:
                    gamma = a.rn.least_geq(1, beta)
                    target = EVal.pair(beta, m + 1) if gamma == beta else EVal.pair(gamma, 0)
                    a, x2 = realize_sibling(a, x, target, verify=verify)
                report.add("pairs", None if lower < a.base.e(x, x2) < top else (x, x2))

                levels = [beta] + _levels_below(a, beta, depth - 1)
                # E(x, x') > (beta, m) gives the margin (beta, m + 1)
                _, transcript = defender_game(a, (x,), (x2,), levels, seed=int(rng.integers(2 ** 31)), m=m + 1,
                                              verify=verify)
                report.add("defender", None if transcript.outcome == DEFENDER_SURVIVED else (x, x2, str(beta)))

                a, transcript = challenger_distinguish(a, x, x2, alpha, verify=verify)
                report.add("challenger", None if transcript.challenger_won else (x, x2))
    except BudgetExceededError as err:
        report.add("budget", tuple(err.errors))
    report.add("budget", None)
    logger.info(f"Freeness evidence for {alpha}: {'pass' if report.ok else report.failures()}")
    return report

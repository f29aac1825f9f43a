import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from scott_spectra._utils import (BudgetExceededError, CertificationError, ExtensionError, GameInvariantError,
                                  PreconditionError, SnapshotError)
from scott_spectra.backforth import (challenger_distinguish, defender_game, free_witness_evidence,
                                     sample_game_positions)
from scott_spectra.finite_rank import check_golden
from scott_spectra.kstruct import EVal, Report, check_axioms
from scott_spectra.limitgen import Approx, grow, new_approx
from scott_spectra.linorder import LinOrder, mk_order
from scott_spectra.rn_system import GREEDY, TRIVIAL, build_rn
from scott_spectra.spectra import WF, WFC, predicted_spectrum

logger = logging.getLogger(__name__)

SUITES = ("axioms", "games", "freeness", "finite-rank")
PERSISTENCE_STAGES = 2

EXIT_OK, EXIT_FAILURE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    order_spec: Tuple[str, ...] = ()
    rn_mode: str = TRIVIAL
    spectrum_mode: str = WFC
    seed: Optional[int] = None
    stages: int = 2
    depth: int = 3
    samples: int = 20
    out: Optional[str] = None
    json_output: bool = False
    golden: Optional[str] = None
    snapshot: Optional[str] = None
    suite: str = "axioms"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fields = {key: value for key, value in vars(args).items() if key in cls.__dataclass_fields__}
        fields["order_spec"] = tuple(args.order or ())
        return cls(**fields)

    def validate(self) -> "RunConfig":
        if self.stages < 0:
            raise ValueError(f"--stages must be non-negative, got {self.stages}")
        for name in ("depth", "samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name} must be positive, got {getattr(self, name)}")
        return self

    def seed_for(self, a: Optional[Approx] = None) -> int:
        if self.seed is not None:
            return self.seed
        return a.seed if a is not None else 0

    def orders(self) -> List[LinOrder]:
        return [mk_order(_read_spec(spec)) for spec in self.order_spec]

    def order(self) -> LinOrder:
        if len(self.order_spec) != 1:
            raise ValueError(f"{self.command} needs exactly one --order")
        return self.orders()[0]


def _read_spec(spec: str) -> str:
    if os.path.isfile(spec):
        with open(spec) as f:
            return f.read()
    return spec


def cmd_order_info(config: RunConfig) -> Dict[str, Any]:
    order = config.order()
    rn = build_rn(order, config.rn_mode)
    prefix = order.elements(config.samples)
    levels = {str(n): [str(a) for a in prefix if rn.member(n, a)] for n in range(1, config.depth + 1)}
    audit = rn.check_prefix(config.depth, config.samples)
    return {"order": order.name, "spec": order.spec, "size": order.size, "well_founded": order.well_founded,
            "wf": str(order.wf()), "wfc": str(order.wfc()), "prefix": [str(a) for a in prefix],
            "rn": {"mode": rn.mode, "levels": levels}, "audit": audit.to_dict(), "ok": audit.ok}


def cmd_model(config: RunConfig) -> Dict[str, Any]:
    if config.out is None:
        raise ValueError("model needs --out")
    order = config.order()
    approx = grow(new_approx(order, build_rn(order, config.rn_mode), config.seed_for()), config.stages)
    report = check_axioms(approx.base).merge(approx.check_colors())
    if not report.ok:
        raise CertificationError("Grown model fails verification", [report])
    approx.save_to_file(config.out)
    return {"out": config.out, "stage": approx.stage, "nodes": approx.base.size, "colors": approx.next_color,
            "ok": True}


def _games(a: Approx, config: RunConfig, rng: np.random.Generator) -> Report:
    report = Report()
    prefix = a.order.elements(max(a.stage, 1))
    distinguished = []
    played = 0
    for x, y, e in sample_game_positions(a, rng, config.samples):
        levels = sorted((b for b in prefix if b < e.level and a.order.in_wf(b)), reverse=True)[:config.depth]
        if levels:
            played += 1
            try:
                _, transcript = defender_game(a, (x,), (y,), levels, seed=int(rng.integers(2 ** 31)))
                report.add("defender", None if not transcript.challenger_won else (x, y))
            except GameInvariantError as err:
                report.add("defender", (x, y, str(err)))
        if e < EVal.pair(a.base.rho[x], 0) and a.order.in_wf(e.level):
            played += 1
            alpha = a.order.succ(e.level)
            _, transcript = challenger_distinguish(a, x, y, alpha)
            report.add("challenger", None if transcript.challenger_won else (x, y))
            distinguished.append((x, y, alpha))
    # a snapshot with no playable position certifies nothing
    report.add("played", None if played else (a.stage, a.rn.mode))
    logger.info(f"Played {played} games on a stage {a.stage} snapshot")
    if distinguished:
        grown = grow(a, PERSISTENCE_STAGES)
        for x, y, alpha in distinguished:
            _, transcript = challenger_distinguish(grown, x, y, alpha)
            report.add("persistence", None if transcript.challenger_won else (x, y))
    return report


def _freeness(a: Approx, config: RunConfig) -> Report:
    report = Report()
    order = a.order
    alphas = [b for b in order.elements(a.stage) if order.in_wf(b) and b != order.least][:config.samples]
    evidenced = 0
    for alpha in alphas:
        try:
            evidence = free_witness_evidence(a, alpha, depth=config.depth, seed=config.seed_for(a))
        except PreconditionError as err:
            logger.info(f"No freeness evidence for {alpha}: {err}")
            continue
        evidenced += 1
        for label, witness in evidence.checks.items():
            report.add(f"{alpha}:{label}", witness)
    report.add("evidenced", None if evidenced else (a.stage, a.rn.mode))
    return report


def cmd_verify(config: RunConfig) -> Dict[str, Any]:
    if config.suite == "finite-rank":
        if config.golden is None:
            raise ValueError("finite-rank needs --golden")
        report = check_golden(config.golden)
    else:
        if config.snapshot is None:
            raise ValueError(f"{config.suite} needs a snapshot")
        a = Approx.load_from_file(config.snapshot)
        if config.suite == "axioms":
            report = check_axioms(a.base).merge(a.check_colors())
        elif config.suite == "games":
            report = _games(a, config, np.random.default_rng(config.seed_for(a)))
        else:
            report = _freeness(a, config)
    logger.info(f"Suite {config.suite}: {'pass' if report.ok else 'FAIL'}")
    return {"suite": config.suite, "ok": report.ok, "checks": report.to_dict()}


def cmd_spectrum(config: RunConfig) -> Dict[str, Any]:
    if not config.order_spec:
        raise ValueError("spectrum needs at least one --order")
    descriptor = predicted_spectrum([_read_spec(spec) for spec in config.order_spec], config.spectrum_mode)
    return {"spectrum": str(descriptor), **descriptor.to_dict()}


COMMANDS = {"order-info": cmd_order_info, "model": cmd_model, "verify": cmd_verify, "spectrum": cmd_spectrum}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", action="append", help="order spec as JSON text or a JSON file")
    common.add_argument("--rn", dest="rn_mode", choices=(TRIVIAL, GREEDY), default=TRIVIAL)
    common.add_argument("--mode", dest="spectrum_mode", choices=(WFC, WF), default=WFC)
    common.add_argument("--seed", type=int, help="model seed; verify defaults to the snapshot's")
    common.add_argument("--stages", type=int, default=2)
    common.add_argument("--depth", type=int, default=3)
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--out")
    common.add_argument("--json", dest="json_output", action="store_true")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="scott-spectra",
                                     description="Models with prescribed Scott spectra over presented linear orders")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("order-info", parents=[common], help="wf, wfc and R_n prefixes of an order")
    sub.add_parser("model", parents=[common], help="grow a model approximation and write a snapshot")
    verify = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    verify.add_argument("snapshot", nargs="?")
    verify.add_argument("--suite", choices=SUITES, default="axioms")
    verify.add_argument("--golden", help="finite Scott rank golden file")
    sub.add_parser("spectrum", parents=[common], help="predicted Scott spectrum of a list of orders")
    return parser


def _emit(result: Dict[str, Any], config: RunConfig) -> None:
    text = json.dumps(result, sort_keys=True, indent=2)
    if config.out is not None and config.command != "model":
        with open(config.out, "w") as f:
            f.write(text + "\n")
    if config.json_output:
        print(text)
        return
    for key, value in result.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        print(f"{key}: {value}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        config = RunConfig.from_args(args).validate()
        result = COMMANDS[config.command](config)
    except BudgetExceededError as err:
        logger.error(f"{err}: {err.errors}")
        return EXIT_BUDGET
    except (CertificationError, GameInvariantError, ExtensionError) as err:
        report = err.errors[0] if err.errors and isinstance(err.errors[0], Report) else None
        logger.error(f"{err}: {report.failures() if report else err.errors}")
        return EXIT_FAILURE
    except (SnapshotError, PreconditionError, ValueError, OSError) as err:
        logger.error(str(err))
        return EXIT_INPUT

    _emit(result, config)
    return EXIT_OK if result.get("ok", True) else EXIT_FAILURE

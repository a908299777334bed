"""Command-line interface.

Every command prints one JSON run report on stdout and a short summary on
stderr (suppressed by ``--quiet``).  Exit codes: 0 success, 2 invalid
input, 3 solver failure, 4 enumeration too large.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any

from . import __version__
from .algebra import AlgebraError, Scenario
from .analytic import BinaryCorrelationData, DegenerateMarginal, asin2_criterion, asin_criterion
from .bell import (
    BellFunctional,
    Distribution,
    DistributionError,
    EnumerationTooLarge,
    FunctionalError,
    cglmp,
    chsh,
    classical_bound,
)
from .dsl import parse_functional, render_functional
from .moments import FEASIBILITY_THRESHOLD, check_membership, quantum_bound
from .sdp import SolverOptions, Status, dump_problem

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_ENUMERATION = 4


class InputError(Exception):
    pass


def _digest(payload: Any) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _finite(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _report(command: str, inputs: Any, level: int | None, status: str, value: float | None, **extra) -> dict:
    report = {
        "command": command,
        "inputs_digest": _digest(inputs),
        "level": level,
        "status": status,
        "value": _finite(value) if status in ("Optimal", "MaxIters") else None,
        "gap": extra.pop("gap", None),
        "iterations": extra.pop("iterations", None),
        "wall_time": 0.0,
        "verdict": extra.pop("verdict", None),
        "version": __version__,
    }
    report["details"] = extra
    return report


def _load_scenario(path: str | None) -> Scenario:
    if path is None:
        return Scenario.uniform(2, 2)
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read scenario {path}: {exc}") from exc
    if isinstance(data, dict) and "scenario" in data:
        data = data["scenario"]
    return Scenario.from_dict(data)


def _load_functional(args: argparse.Namespace) -> BellFunctional:
    chosen = [v is not None for v in (args.functional, args.file, args.expr)]
    if sum(chosen) != 1:
        raise InputError("give exactly one of --functional, --file or --expr")
    if args.functional is not None:
        name = args.functional.strip()
        if name == "chsh":
            return chsh()
        if name.startswith("cglmp:"):
            try:
                d = int(name.split(":", 1)[1])
            except ValueError:
                raise InputError(f"bad CGLMP dimension in {name!r}") from None
            return cglmp(d)
        raise InputError(f"unknown built-in functional {name!r} (use chsh or cglmp:<d>)")
    scenario = _load_scenario(args.scenario)
    if args.file is not None:
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc}") from exc
        return parse_functional(text, scenario, name=Path(args.file).stem)
    return parse_functional(args.expr, scenario, name="expr")


def _load_distribution(path: str) -> Distribution:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    d = Distribution.from_json(text)
    d.validate(strict=True)
    return d


def _options(args: argparse.Namespace) -> SolverOptions:
    return SolverOptions(gap_tol=args.tol, max_iters=args.max_iters)


def _functional_inputs(f: BellFunctional) -> dict:
    return {"scenario": f.scenario.to_dict(), "functional": render_functional(f)}


def cmd_bound(args: argparse.Namespace) -> tuple[dict, int]:
    f = _load_functional(args)
    res = quantum_bound(f, args.level, _options(args))
    if args.dump_sdp:
        dump_problem(res.problem, args.dump_sdp)
    r = res.result
    inputs = {**_functional_inputs(f), "level": args.level, "tol": args.tol, "max_iters": args.max_iters}
    report = _report(
        "bound",
        inputs,
        args.level,
        r.status.value,
        res.value,
        gap=_finite(r.gap),
        iterations=r.iterations,
        functional=f.name,
        dual_objective=_finite(r.dual_objective),
        min_eig=_finite(r.min_eig),
        moment_matrix_size=res.structure.n,
        num_moments=res.structure.num_vars,
        message=r.message,
    )
    return report, EXIT_OK if r.status == Status.OPTIMAL else EXIT_SOLVER


def cmd_member(args: argparse.Namespace) -> tuple[dict, int]:
    d = _load_distribution(args.distribution)
    res = check_membership(d, args.level, _options(args))
    if args.dump_sdp:
        dump_problem(res.problem, args.dump_sdp)
    r = res.result
    ok = r.status in (Status.OPTIMAL, Status.MAX_ITERS)
    if not ok:
        verdict = "INCONCLUSIVE"
    else:
        verdict = "PASS" if res.passed else "FAIL"
    inputs = {"distribution": json.loads(d.to_json()), "level": args.level, "tol": args.tol, "max_iters": args.max_iters}
    report = _report(
        "member",
        inputs,
        args.level,
        r.status.value,
        res.margin,
        gap=_finite(r.gap),
        iterations=r.iterations,
        verdict=verdict,
        threshold=FEASIBILITY_THRESHOLD,
        solver_margin=_finite(r.objective),
        dual_objective=_finite(r.dual_objective),
        moment_matrix_size=res.structure.n,
        message=r.message,
    )
    return report, EXIT_OK if r.status == Status.OPTIMAL else EXIT_SOLVER


def cmd_check_asin(args: argparse.Namespace) -> tuple[dict, int]:
    d = _load_distribution(args.distribution)
    data = BinaryCorrelationData.from_distribution(d)
    asin_ok, asin_slack = asin_criterion(data.c_ab)
    details: dict[str, Any] = {
        "asin": {"verdict": "PASS" if asin_ok else "FAIL", "slack": asin_slack},
    }
    try:
        asin2_ok, asin2_slack = asin2_criterion(data)
    except DegenerateMarginal as exc:
        details["asin2"] = {"verdict": "INCONCLUSIVE", "slack": None, "reason": str(exc)}
        details["hint"] = "a marginal is deterministic; run `qcorr member` for an SDP test"
        verdict = "FAIL" if not asin_ok else "INCONCLUSIVE"
        value = asin_slack
    else:
        details["asin2"] = {"verdict": "PASS" if asin2_ok else "FAIL", "slack": asin2_slack}
        verdict = "PASS" if asin_ok and asin2_ok else "FAIL"
        value = asin2_slack
    inputs = {"distribution": json.loads(d.to_json())}
    report = _report("check-asin", inputs, 1, "Optimal", value, verdict=verdict, **details)
    return report, EXIT_OK


def cmd_classical(args: argparse.Namespace) -> tuple[dict, int]:
    f = _load_functional(args)
    value = classical_bound(f)
    report = _report("classical", _functional_inputs(f), None, "Optimal", value, functional=f.name)
    return report, EXIT_OK


def _summary(report: dict) -> str:
    parts = []
    if report["level"] is not None:
        parts.append(f"level {report['level']}")
    parts.append(f"status {report['status']}")
    if report["value"] is not None:
        parts.append(f"value {report['value']:.10g}")
    if report["verdict"]:
        parts.append(f"verdict {report['verdict']}")
    return f"{report['command']}: " + ", ".join(parts)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", type=int, default=1, help="hierarchy level (default 1)")
    common.add_argument("--tol", type=float, default=1e-8, help="relative duality-gap tolerance")
    common.add_argument("--max-iters", type=int, default=200)
    common.add_argument("--seed", type=int, default=None, help="recorded in the report")
    common.add_argument("--dump-sdp", metavar="PATH", help="write the SDP in sparse text form")
    common.add_argument("--quiet", action="store_true", help="no summary on stderr")
    common.add_argument("-v", "--verbose", action="store_true", help="log solver iterations")

    functional = argparse.ArgumentParser(add_help=False)
    functional.add_argument("--functional", help="built-in: chsh or cglmp:<d>")
    functional.add_argument("--file", help="functional written in the text format")
    functional.add_argument("--expr", help="functional given inline in the text format")
    functional.add_argument("--scenario", help="scenario JSON for --file/--expr (default 2x2 binary)")

    parser = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qcorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("bound", parents=[common, functional], help="quantum upper bound of a Bell functional")
    p.set_defaults(run=cmd_bound)
    p = sub.add_parser("member", parents=[common], help="hierarchy test of a probability table")
    p.add_argument("distribution", help="distribution JSON file")
    p.set_defaults(run=cmd_member)
    p = sub.add_parser("check-asin", parents=[common], help="arcsine criteria for 2x2 binary data")
    p.add_argument("distribution", help="distribution JSON file")
    p.set_defaults(run=cmd_check_asin)
    p = sub.add_parser("classical", parents=[common, functional], help="local bound by enumeration")
    p.set_defaults(run=cmd_classical)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.level < 1:
        parser.error("--level must be at least 1")
    start = time.perf_counter()
    try:
        report, code = args.run(args)
    except EnumerationTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUMERATION
    except (InputError, AlgebraError, DistributionError, FunctionalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["wall_time"] = time.perf_counter() - start
    if args.seed is not None:
        report["details"]["seed"] = args.seed
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not args.quiet:
        print(_summary(report), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``thetagraph {verify,sweep,fp,rep,channel,replay}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..channels import ChannelError
from ..scalars import DEFAULT_TOL, BackendMismatch, ThetaError
from .commands import ACTIONS, Report, RunConfig, UsageError, run
from .expr import ExprError

__all__ = ["main", "build_parser", "RunConfig", "Report", "run", "UsageError"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, theta_required: bool = False) -> None:
    p.add_argument("--theta", required=theta_required, help="nonzero theta, e.g. 2, 3/5+4/5i, exp(i*pi/3)")
    p.add_argument("--backend", choices=("auto", "exact", "float"), default="auto")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--out", help="also write the JSON report to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thetagraph", description="Quantum graphs L(theta) and their algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _common(sub.add_parser("verify", help="run every structural check at one theta"), True)

    p = sub.add_parser("sweep", help="dimension / block table over many theta")
    _common(p, True)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("fp", help="normal forms and products in A_theta")
    _common(p, True)
    p.add_argument("exprs", nargs="+", metavar="EXPR")

    _common(sub.add_parser("rep", help="decompose phi_theta into irreducibles"), True)

    p = sub.add_parser("channel", help="graph checks for a Kraus channel or Gram frame")
    _common(p)
    p.add_argument("channel_file", metavar="FILE")
    p.add_argument("--action", choices=ACTIONS, default="graph")
    p.add_argument("--trials", type=int, default=20)

    p = sub.add_parser("replay", help="re-run the configuration echoed in a JSON report")
    p.add_argument("report", metavar="REPORT.json")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.command == "replay":
        try:
            data = json.loads(Path(ns.report).read_text(encoding="utf-8"))
            cfg = RunConfig.from_dict(data["config"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot replay {ns.report}: {exc}") from None
        cfg.output = "json" if ns.json else cfg.output
        cfg.output_path = ns.out
        return cfg
    return RunConfig(
        command=ns.command,
        theta=ns.theta,
        backend=ns.backend,
        tol=ns.tol,
        seed=ns.seed,
        output="json" if ns.json else "text",
        output_path=ns.out,
        exprs=list(getattr(ns, "exprs", []) or []),
        channel_file=getattr(ns, "channel_file", None),
        action=getattr(ns, "action", "graph"),
        trials=getattr(ns, "trials", 20),
        jobs=getattr(ns, "jobs", 1),
    )


def _dump(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, default=str)


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        config = config_from_args(ns)
        report = run(config)
    except (UsageError, ThetaError, ExprError, ChannelError, BackendMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = _dump(report)
    if config.output_path:
        Path(config.output_path).write_text(text + "\n", encoding="utf-8")
    print(text if config.output == "json" else report.render_text())
    return report.exit_code

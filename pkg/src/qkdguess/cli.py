"""Command-line front end.

Subcommands wrap the library one-to-one: `rate` (secure key rate), `pestar`
(maximum guessing probability), `critical` (both critical error rates),
`table1` (critical-rate scan over xy-plane angles) and `scatter` (seeded
random P_B/P_E samples).  All numerics live in the library modules; this
module only parses arguments and formats CSV/JSON.

Exit codes: 0 success, 1 usage error, 2 infeasible rates or missing
crossing, 3 non-convergence warning (result still printed).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import Sequence

from .analysis import (
    critical_rate_scan,
    critical_report,
    format_scatter_csv,
    format_table_csv,
    scatter,
)
from .errors import DomainError, InfeasibleRates, NoCrossing, QkdGuessError
from .guessing import OptimizerOptions, maximize_guessing
from .keyrate import secure_key_rate
from .protocol import ProtocolConfig, standard_bb84, standard_sixstate


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse hook
        raise _UsageError(message)


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def _resolve_protocol(name: str) -> ProtocolConfig:
    if name == "bb84":
        return standard_bb84()
    if name == "sixstate":
        return standard_sixstate()
    try:
        with open(name, encoding="utf-8") as fh:
            return ProtocolConfig.from_json(fh.read())
    except OSError as exc:
        raise _UsageError(f"cannot read protocol config {name!r}: {exc}") from exc
    except DomainError as exc:
        raise _UsageError(str(exc)) from exc


def _resolve_eps(text: str, t: int) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"invalid --eps value {text!r}") from exc
    if len(values) == 1:
        return values * t
    if len(values) == t:
        return values
    raise _UsageError(f"--eps needs 1 or {t} comma-separated values, got {len(values)}")


def _parse_float_list(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"invalid {name} value {text!r}") from exc


def _emit(text: str, out: str) -> None:
    """Write to stdout or atomically to a file (temp + rename)."""
    if out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".qkdguess-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_path, out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _emit_report(payload: dict, fmt: str, out: str) -> None:
    if fmt == "json":
        _emit(json.dumps(payload, indent=2) + "\n", out)
    else:
        header = ",".join(payload)
        row = ",".join(_csv_cell(v) for v in payload.values())
        _emit(header + "\n" + row + "\n", out)


def _cmd_rate(args) -> int:
    config = _resolve_protocol(args.protocol)
    eps = _resolve_eps(args.eps, config.t)
    report = secure_key_rate(config, eps)
    _emit_report(report.to_dict(), args.format, args.out)
    return 0


def _cmd_pestar(args) -> int:
    config = _resolve_protocol(args.protocol)
    eps = _resolve_eps(args.eps, config.t)
    if args.starts < 1:
        raise _UsageError("--starts must be at least 1")
    result = maximize_guessing(
        config, eps, OptimizerOptions(starts=args.starts, seed=args.seed)
    )
    payload = {
        "p_e_star": result.p_e_star,
        "best_lambda3": result.best_lambda3,
        "starts_used": result.starts_used,
        "converged": result.converged,
    }
    _emit_report(payload, args.format, args.out)
    if not result.converged:
        print("warning: best restarts disagree; result may not be the maximum",
              file=sys.stderr)
        return 3
    return 0


def _cmd_critical(args) -> int:
    config = _resolve_protocol(args.protocol)
    report = critical_report(config, seed=args.seed, starts=args.starts)
    _emit_report(report.to_dict(), args.format, args.out)
    return 0


def _cmd_table1(args) -> int:
    phis = _parse_float_list(args.phi1, "--phi1")
    if not phis:
        raise _UsageError("--phi1 needs at least one angle")
    if args.deg:
        phis = [math.radians(p) for p in phis]
    reports = critical_rate_scan(
        phis, seed=args.seed, starts=args.starts, threads=args.threads
    )
    if args.format == "csv":
        _emit(format_table_csv(reports), args.out)
    else:
        payload = [
            {
                "phi1": _round12(r.phi1 if r.phi1 is not None else 0.0),
                "eps_cr_pct": round(100 * r.eps_cr, 2),
                "eps_tilde_cr_pct": round(100 * r.eps_tilde_cr, 2),
                "delta_eps_pct": round(100 * r.delta_eps, 2),
                "pe_star": round(r.pe_star_at_crossing, 4),
            }
            for r in reports
        ]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    if args.plot:
        from .plotting import save_critical_scan_figure

        save_critical_scan_figure(reports, args.plot)
    return 0


def _cmd_scatter(args) -> int:
    config = _resolve_protocol(args.protocol)
    if args.samples < 0:
        raise _UsageError("--samples must be nonnegative")
    points = scatter(config, args.samples, args.seed)
    if args.format == "csv":
        _emit(format_scatter_csv(points), args.out)
    else:
        payload = {
            "protocol": args.protocol,
            "seed": args.seed,
            "points": [
                {"p_b": _round12(p.p_b), "p_e": _round12(p.p_e)} for p in points
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    if args.plot:
        from .plotting import save_scatter_figure

        save_scatter_figure(points, config, args.plot)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="qkdguess",
                     description="Guessing-probability and key-rate analysis "
                                 "for qubit QKD over Bell-diagonal states.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, protocol=True, fmt_default="json"):
        if protocol:
            p.add_argument("--protocol", required=True,
                           help="builtin name (bb84 | sixstate) or path to a JSON config")
        p.add_argument("--seed", type=int, default=0, help="master random seed")
        p.add_argument("--out", default="-", help="output path, or - for stdout")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p_rate = sub.add_parser("rate", help="secure key rate for given error rates")
    add_common(p_rate)
    p_rate.add_argument("--eps", required=True,
                        help="error rate: one value (symmetric) or one per basis")
    p_rate.set_defaults(handler=_cmd_rate)

    p_pe = sub.add_parser("pestar", help="maximum eavesdropper guessing probability")
    add_common(p_pe)
    p_pe.add_argument("--eps", required=True,
                      help="error rate: one value (symmetric) or one per basis")
    p_pe.add_argument("--starts", type=int, default=32,
                      help="restarts of the basis optimizer")
    p_pe.set_defaults(handler=_cmd_pestar)

    p_cr = sub.add_parser("critical", help="critical error rates for both criteria")
    add_common(p_cr)
    p_cr.add_argument("--starts", type=int, default=32)
    p_cr.set_defaults(handler=_cmd_critical)

    p_tab = sub.add_parser("table1", help="critical-rate scan over xy-plane angles")
    add_common(p_tab, protocol=False, fmt_default="csv")
    p_tab.add_argument("--phi1", required=True,
                       help="comma-separated angles of the second basis")
    p_tab.add_argument("--deg", action="store_true",
                       help="interpret --phi1 in degrees instead of radians")
    p_tab.add_argument("--starts", type=int, default=32)
    p_tab.add_argument("--threads", type=int, default=1,
                       help="parallel table columns (0 = auto)")
    p_tab.add_argument("--plot", default=None, metavar="PATH",
                       help="also render the scan to an image file")
    p_tab.set_defaults(handler=_cmd_table1)

    p_sc = sub.add_parser("scatter", help="random P_B/P_E samples (seeded)")
    add_common(p_sc, fmt_default="csv")
    p_sc.add_argument("--samples", type=int, default=4000)
    p_sc.add_argument("--plot", default=None, metavar="PATH",
                      help="also render the scatter to an image file")
    p_sc.set_defaults(handler=_cmd_scatter)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run `{parser.prog} --help` for usage", file=sys.stderr)
        return 1
    except (InfeasibleRates, NoCrossing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QkdGuessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

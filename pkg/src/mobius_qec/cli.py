"""Command-line front end: ``mobius-qec <command> [options]``.

Results go to stdout (or ``--out``).  When writing to a file, JSON artifacts
are wrapped as ``{"provenance": ..., "data": ...}`` and CSV artifacts start
with ``# provenance: {...}``; on stdout the provenance line goes to stderr so
the payload stays machine readable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .analysis import (
    DEFAULT_BUDGET,
    INF,
    BudgetExceeded,
    ChannelModel,
    corollary_pl_bound,
    exact_beta,
    exhaustive_fractions,
    parse_bias,
    theorem1_beta_bound,
)
from .checks import bound_curve_rows, format_report, run_checks
from .construction import FAMILIES, ConstructionError, build
from .decoder import TIE_BREAKS, MwpmDecoder
from .enumerators import EnumerationTooLarge, normalizer_we_direct, stabilizer_we, undetectable_we
from .montecarlo import NoCrossingError, estimate_pl, sweep, threshold
from .stabilizer import PauliOperator, min_weight_logical

EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_IO = 4
SCHEMA_PATH = Path(__file__).with_name("schemas") / "records.schema.json"
RANDOMIZED = {"simulate", "sweep", "threshold"}


@dataclass
class ExperimentConfig:
    command: str
    options: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, **self.options}

    @classmethod
    def from_json(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        return cls(data.pop("command"), data)


class Output:
    def __init__(self, args: argparse.Namespace, config: ExperimentConfig) -> None:
        self.path = args.out
        self.provenance = {"tool": "mobius_qec", "version": __version__, "config": config.to_json()}

    def _write(self, text: str) -> None:
        if self.path is None or self.path == "-":
            sys.stdout.write(text)
            return
        Path(self.path).write_text(text)

    def json(self, data: Any) -> None:
        if self.path in (None, "-"):
            print("# provenance: " + json.dumps(self.provenance), file=sys.stderr)
            self._write(json.dumps(data) + "\n")
        else:
            self._write(json.dumps({"provenance": self.provenance, "data": data}, indent=2) + "\n")

    def csv(self, header: list[str], rows: list[list[Any]]) -> None:
        buf = io.StringIO()
        line = "# provenance: " + json.dumps(self.provenance)
        if self.path in (None, "-"):
            print(line, file=sys.stderr)
        else:
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        self._write(buf.getvalue())

    def text(self, body: str) -> None:
        self._write(body if body.endswith("\n") else body + "\n")


def _a_out(a: float) -> float | str:
    return "inf" if a == INF else a


def _code(args: argparse.Namespace):
    lc = args.Lc if args.Lc is not None else args.L
    lf = args.Lf if args.Lf is not None else args.L
    if lc is None or lf is None:
        raise ConstructionError("give --L or both --Lc and --Lf")
    return build(args.family, lc, lf, distance_w_max=args.w_max)


def cmd_build(args, out: Output) -> None:
    code = _code(args)
    if args.out and args.out != "-":
        base = Path(args.out)
        base.mkdir(parents=True, exist_ok=True)
        (base / "hx.txt").write_text(code.h_x.to_text())
        (base / "hz.txt").write_text(code.h_z.to_text())
        (base / "params.json").write_text(json.dumps({"provenance": out.provenance, "data": code.params()}, indent=2) + "\n")
        return
    out.text("# H_X\n" + code.h_x.to_text() + "# H_Z\n" + code.h_z.to_text())


def cmd_params(args, out: Output) -> None:
    code = _code(args)
    record = {"n": code.n, "k": code.k, "dX": code.d_x, "dZ": code.d_z}
    if args.verbose:
        record = code.params()
    out.json(record)


def cmd_logicals(args, out: Output) -> None:
    code = _code(args)
    data = {
        "logical_x": [p.label() for p in code.logical_x_basis],
        "logical_z": [p.label() for p in code.logical_z_basis],
    }
    for sector in ("x", "z"):
        v = min_weight_logical(code, sector, args.w_max)
        if v is not None:
            op = PauliOperator(code.n, x=v) if sector == "x" else PauliOperator(code.n, z=v)
            data[f"min_weight_{sector}"] = op.label()
    out.json(data)


def cmd_enumerate(args, out: Output) -> None:
    code = _code(args)
    if args.kind == "S":
        we = stabilizer_we(code)
    elif args.kind == "N":
        we = normalizer_we_direct(code)
    else:
        we = undetectable_we(code, args.method)
    if args.format == "json":
        out.json({"kind": args.kind, "coefficients": list(we)})
    else:
        out.csv(["w", args.kind], [[w, c] for w, c in enumerate(we) if c])


def cmd_decode(args, out: Output) -> None:
    code = _code(args)
    decoder = MwpmDecoder(code, args.tie_break)
    if args.graph_dump:
        base = Path(args.graph_dump)
        base.mkdir(parents=True, exist_ok=True)
        (base / "graph_x.txt").write_text(decoder.graph_x.edge_list_text())
        (base / "graph_z.txt").write_text(decoder.graph_z.edge_list_text())
    if args.error is not None:
        error = PauliOperator.from_label(args.error, code.n)
        outcome = decoder.decode_and_classify(error)
        out.json({"error": error.label(), "correction": outcome.correction.label(),
                  "residual": outcome.residual_class})
        return
    if args.syndrome is None:
        raise ValueError("give --error or --syndrome")
    bits = [int(ch) for ch in args.syndrome if ch in "01"]
    out.json({"correction": decoder.decode(bits).label()})


def cmd_fractions(args, out: Output) -> None:
    code = _code(args)
    table = exhaustive_fractions(code, args.j, tie_break=args.tie_break, budget=args.budget, workers=args.workers)
    rows = [[r["class"], r["i"], r["l"], r["failed"], r["total"], f"{r['fraction']:.3f}"] for r in table.rows()]
    header = ["class", "i", "l", "failed", "total", "fraction"]
    if args.audit:
        other = "reverse" if args.tie_break == "lex" else "lex"
        alt = exhaustive_fractions(code, args.j, tie_break=other, budget=args.budget, workers=args.workers).by_label()
        header.append(f"fraction_{other}")
        for row in rows:
            row.append(f"{float(alt[row[0]]):.3f}")
    out.csv(header, rows)


def cmd_beta(args, out: Output) -> None:
    code = _code(args)
    j = args.j if args.j is not None else (code.distance - 1) // 2 + 1
    table = exhaustive_fractions(code, j, tie_break=args.tie_break, budget=args.budget, workers=args.workers)
    records = []
    for a in args.A:
        value = exact_beta(table, a)
        records.append({"family": code.pair.family, "d": code.distance, "j": j, "A": _a_out(a),
                        "value": float(value), "exact": f"{value.numerator}/{value.denominator}"})
    out.json(records)


def cmd_bound(args, out: Output) -> None:
    if args.curve:
        rows = bound_curve_rows(args.d, args.p)
        out.csv(["family", "d", "A", "p", "bound"], [[r["family"], r["d"], r["A"], r["p"], r["bound"]] for r in rows])
        return
    records = []
    for d in args.d:
        for a in args.A:
            if args.kind == "theorem":
                value = theorem1_beta_bound(args.family, d, ChannelModel.from_bias(args.p, a))
            else:
                value = corollary_pl_bound(args.family, d, a, args.p)
            records.append({"family": args.family, "d": d, "A": _a_out(a), "p": args.p,
                            "kind": args.kind, "value": value})
    out.json(records)


def cmd_simulate(args, out: Output) -> None:
    code = _code(args)
    report = estimate_pl(code, ChannelModel.from_bias(args.p[0], args.A[0]), seed=args.seed,
                         min_failures=args.min_failures, max_shots=args.max_shots,
                         batch_size=args.batch_size, workers=args.workers, tie_break=args.tie_break)
    out.json(report.to_json())


def cmd_sweep(args, out: Output) -> None:
    code = _code(args)
    reports = sweep(code, args.A[0], args.p, seed=args.seed, min_failures=args.min_failures,
                    max_shots=args.max_shots, batch_size=args.batch_size, workers=args.workers,
                    tie_break=args.tie_break)
    out.csv(["p", "p_L", "ci_low", "ci_high", "shots", "failures"],
            [[r.p, r.p_l_hat, r.ci_low, r.ci_high, r.shots, r.failures] for r in reports])


def cmd_threshold(args, out: Output) -> None:
    est = threshold(args.family, args.A[0], args.p, distances=args.distances, seed=args.seed,
                    shots=args.shots, workers=args.workers, tie_break=args.tie_break)
    if args.format == "json":
        out.json(est.to_json())
        return
    rows = []
    for d, reports in est.curves.items():
        rows.extend([d, r.p, r.p_l_hat, r.ci_low, r.ci_high] for r in reports)
    out.csv(["d", "p", "p_L", "ci_low", "ci_high"], rows)
    print(f"# threshold {est.value:.4f} " + json.dumps(est.to_json()["crossings"]), file=sys.stderr)


def cmd_reproduce(args, out: Output) -> int:
    rows = run_checks(args.criteria, skip_slow=args.skip_slow, tie_break=args.tie_break, workers=args.workers)
    if args.format == "json":
        out.json([r.to_json() for r in rows])
    else:
        out.text(format_report(rows))
    return 1 if any(r.status == "fail" for r in rows) else 0


def cmd_export(args, out: Output) -> None:
    if args.what == "schema":
        out.text(SCHEMA_PATH.read_text())
        return
    code = _code(args)
    if args.what == "generators":
        out.text("\n".join(g.label() for g in code.generators()))
    elif args.what == "hx":
        out.text(code.h_x.to_text())
    elif args.what == "hz":
        out.text(code.h_z.to_text())


def _bias_list(values: list[str]) -> list[float]:
    return [parse_bias(v) for v in values]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobius-qec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file or directory (default stdout)")
    common.add_argument("--config", default=None, help="JSON config whose keys become option defaults")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--tie-break", dest="tie_break", choices=TIE_BREAKS, default="lex")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max decode calls for exhaustive sweeps")

    code = argparse.ArgumentParser(add_help=False)
    code.add_argument("--family", choices=FAMILIES, default="cylindrical")
    code.add_argument("--L", type=int, default=None, help="sets both Lc and Lf")
    code.add_argument("--Lc", type=int, default=None)
    code.add_argument("--Lf", type=int, default=None)
    code.add_argument("--w-max", dest="w_max", type=int, default=5, help="distance search weight cap")

    channel = argparse.ArgumentParser(add_help=False)
    channel.add_argument("--A", nargs="+", default=["1"], help="bias values; 'inf' for phase flip")
    channel.add_argument("--p", type=float, nargs="+", default=[0.01])
    channel.add_argument("--seed", type=int, default=None)
    channel.add_argument("--min-failures", dest="min_failures", type=int, default=100)
    channel.add_argument("--max-shots", dest="max_shots", type=int, default=10**6)
    channel.add_argument("--batch-size", dest="batch_size", type=int, default=4096)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("build", parents=[common, code], help="write H_X and H_Z")
    p.set_defaults(func=cmd_build)
    p = sub.add_parser("params", parents=[common, code], help="n, k, dX, dZ")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_params)
    p = sub.add_parser("logicals", parents=[common, code], help="logical operator basis")
    p.set_defaults(func=cmd_logicals)
    p = sub.add_parser("enumerate", parents=[common, code], help="weight enumerator as CSV")
    p.add_argument("--kind", choices=("L", "S", "N"), default="L")
    p.add_argument("--method", choices=("macwilliams", "direct"), default="macwilliams")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_enumerate)
    p = sub.add_parser("decode", parents=[common, code], help="decode one error or syndrome")
    p.add_argument("--error", default=None, help='e.g. "Y7 Y10"')
    p.add_argument("--syndrome", default=None, help="bit string, X checks first")
    p.add_argument("--graph-dump", dest="graph_dump", default=None, help="directory for matching-graph edge lists")
    p.set_defaults(func=cmd_decode)
    p = sub.add_parser("fractions", parents=[common, code], help="exhaustive class fractions as CSV")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--audit", action="store_true", help="add the other tie rule's fractions")
    p.set_defaults(func=cmd_fractions)
    p = sub.add_parser("beta", parents=[common, code], help="exact beta_j at each bias")
    p.add_argument("--j", type=int, default=None, help="default t+1")
    p.add_argument("--A", nargs="+", default=["1", "10", "100", "inf"])
    p.set_defaults(func=cmd_beta)
    p = sub.add_parser("bound", parents=[common], help="closed-form bounds")
    p.add_argument("--family", choices=("cylindrical", "moebius"), default="cylindrical")
    p.add_argument("--d", type=int, nargs="+", default=[3, 5, 7, 9, 11])
    p.add_argument("--A", nargs="+", default=["1", "10", "inf"])
    p.add_argument("--p", type=float, default=0.001)
    p.add_argument("--kind", choices=("corollary", "theorem"), default="corollary")
    p.add_argument("--curve", action="store_true", help="CSV over the bias grid for both families")
    p.set_defaults(func=cmd_bound)
    p = sub.add_parser("simulate", parents=[common, code, channel], help="Monte Carlo logical error rate")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("sweep", parents=[common, code, channel], help="Monte Carlo over a p grid")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("threshold", parents=[common, channel], help="crossing of d=3 and d=5 curves")
    p.add_argument("--family", choices=("cylindrical", "moebius", "surface"), default="cylindrical")
    p.add_argument("--distances", type=int, nargs="+", default=[3, 5])
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_threshold)
    p = sub.add_parser("reproduce-paper", parents=[common], help="run every reference check")
    p.add_argument("--skip-slow", dest="skip_slow", action="store_true")
    p.add_argument("--criteria", type=int, nargs="+", default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_reproduce)
    p = sub.add_parser("export", parents=[common, code], help="schema, generators or check matrices")
    p.add_argument("what", choices=("schema", "generators", "hx", "hz"))
    p.set_defaults(func=cmd_export)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config:
        data = json.loads(Path(args.config).read_text())
        config = ExperimentConfig.from_json(data)
        if config.command != args.command:
            raise ValueError(f"config is for {config.command!r}, not {args.command!r}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**config.options)
        args = parser.parse_args(argv)
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = _apply_config(parser, argv)
        if hasattr(args, "A"):
            args.A = _bias_list([str(a) for a in args.A])
        if args.command in RANDOMIZED and args.seed is None:
            args.seed = secrets.randbits(63)
            print(f"# generated seed {args.seed}", file=sys.stderr)
        options = {k: v for k, v in vars(args).items() if k not in ("func", "command", "config")}
        options["A"] = [_a_out(a) for a in options.get("A", [])] if "A" in options else None
        if options["A"] is None:
            del options["A"]
        out = Output(args, ExperimentConfig(args.command, options))
        status = args.func(args, out)
        return int(status or 0)
    except (BudgetExceeded, EnumerationTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConstructionError, NoCrossingError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

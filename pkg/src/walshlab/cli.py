"""Command-line front end.

Subcommands: ``stats``, ``kernel``, ``transform``, ``verify``, ``thm1``,
``thm2``, ``corollaries``, ``report``.  Exit codes are a stable contract:
0 means success (and, for verifications, a passing verdict), 1 means a
verification ran and came back false, 2 means a usage or config error.
Identical invocations write byte-identical data files; wall-clock metadata
lives only in ``.meta.json`` sidecars.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .analysis import PExponent
from .experiments import (
    ConfigError,
    ExperimentConfig,
    corollary_suite,
    theorem1_weak_type,
    theorem2_growth,
    theorem2_weak_divergence,
    verify_all,
    verify_kernel_l1_sandwich,
    verify_kernels,
    verify_lemma1,
)
from .functions import load_csv, store_csv
from .operators import RhoWeight, UnitWeight, scheme_from_json
from .reporting import ExperimentReport, load_report
from .spectral import dirichlet_direct, dirichlet_dyadic, dirichlet_fast, fwht_forward, fwht_inverse, index_stats
from .functions import SpectralVector


def _parse_int_list(text: str) -> tuple[int, ...]:
    """Accept '4..9' ranges or '4,5,6' lists."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.split(",") if tok)


def _parse_probes(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for tok in text.split(","):
        n, s = tok.split(":")
        pairs.append((int(n), int(s)))
    return tuple(pairs)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _write_report_files(
    report: ExperimentReport,
    output: str | None,
    series: tuple[str, str] | None = None,
    series_rows: list | None = None,
) -> None:
    out = Path(output) if output else Path(f"walshlab-{report.name}.json")
    report.write(out)
    report.write_cases_csv(out.with_suffix(".cases.csv"))
    if series:
        report.write_series_tsv(out.with_suffix(".series.tsv"), *series, rows=series_rows)
    print(f"{report.name}: {'pass' if report.verdict else 'FAIL'} -> {out}")


# -- subcommands -------------------------------------------------------------


def _cmd_stats(args) -> int:
    stats = index_stats(args.n)
    payload = stats.to_json_dict()
    if args.format == "table":
        width = max(len(k) for k in payload)
        text = "\n".join(f"{k:<{width}}  {v}" for k, v in payload.items()) + "\n"
    else:
        text = json.dumps(payload, separators=(",", ":")) + "\n"
    _emit(text, args.output)
    return 0


def _cmd_kernel(args) -> int:
    mode = "exact"  # kernels are integer-valued; exact is the natural emission
    if args.construction == "fast":
        f = dirichlet_fast(args.n, args.resolution, mode)
    elif args.construction == "dyadic":
        if args.n & (args.n - 1):
            raise ValueError("the closed-form construction needs a power-of-two order")
        f = dirichlet_dyadic(args.n.bit_length() - 1, args.resolution, mode)
    else:
        f = dirichlet_direct(args.n, args.resolution, mode)
    if args.format == "json":
        text = json.dumps({"order": args.n, "resolution": args.resolution,
                           "values": [str(v) for v in f.values]}) + "\n"
        _emit(text, args.output)
    else:
        if args.output:
            store_csv(f, args.output)
        else:
            sys.stdout.write("index,value\n")
            for i, v in enumerate(f.values):
                sys.stdout.write(f"{i},{v}\n")
    return 0


def _cmd_transform(args) -> int:
    f = load_csv(args.input, "exact" if args.exact else None)
    if args.inverse:
        spec = SpectralVector(f.m, f.values, f.mode)
        result = fwht_inverse(spec)
    else:
        result = fwht_forward(f)
    out = args.output
    if out:
        store_csv(result, out)
    else:
        vals = result.values if hasattr(result, "values") else result.coeffs
        sys.stdout.write("index,value\n")
        for i, v in enumerate(vals):
            sys.stdout.write(f"{i},{v!r}\n" if result.mode == "float64" else f"{i},{v}\n")
    return 0


_VERIFIERS = {
    "all": verify_all,
    "kernels": verify_kernels,
    "lemma1": verify_lemma1,
    "sandwich": verify_kernel_l1_sandwich,
}


def _cmd_verify(args) -> int:
    report = _VERIFIERS[args.which](args.resolution)
    out = Path(args.output) if args.output else Path(f"walshlab-verify-{args.which}.json")
    report.write(out)
    print(f"verify {args.which} (m={args.resolution}): {'pass' if report.verdict else 'FAIL'} -> {out}")
    return 0 if report.verdict else 1


def _load_config(path: str) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    return ExperimentConfig.from_json_dict(data)


def _cmd_thm1(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        if args.jobs != 1:
            cfg = dataclasses.replace(cfg, jobs=args.jobs)
    else:
        cfg = ExperimentConfig(
            p_list=tuple(args.p) if args.p else ("1/4", "1/2", "3/4"),
            support_levels=args.levels or tuple(range(4, 10)),
            trials=args.trials,
            seed=args.seed,
            jobs=args.jobs,
        )
    report = theorem1_weak_type(cfg)
    _write_report_files(
        report,
        args.output,
        series=("M", "max_wt_off"),
        series_rows=report.summary["cells"],
    )
    return 0 if report.verdict else 1


def _cmd_thm2(args) -> int:
    ok = True
    if args.part in ("a", "both"):
        if args.config:
            cfg = _load_config(args.config)
        else:
            cfg = ExperimentConfig(
                p_list=tuple(args.p) if args.p else ("1/2", "1/3"),
                resolution=args.resolution,
                scales=args.scales or tuple(range(3, args.resolution)),
                seed=args.seed,
            )
        report = theorem2_growth(cfg)
        _write_report_files(report, args.output, series=("n", "ratio"))
        ok = ok and report.verdict
    if args.part in ("b", "both"):
        if args.config and args.part == "b":
            cfg = _load_config(args.config)
            phi = scheme_from_json(cfg.scheme) if cfg.scheme else UnitWeight()
        else:
            p_list = tuple(args.p) if args.p else ("1/2",)
            if args.phi == "rho":
                phi = RhoWeight(PExponent.parse(p_list[0]))
                expectation = args.expectation or "bounded"
            else:
                phi = UnitWeight()
                expectation = args.expectation or "divergent"
            cfg = ExperimentConfig(
                p_list=p_list,
                resolution=args.resolution,
                scales=args.scales or tuple(range(4, args.resolution)),
                probes=_parse_probes(args.probes) if args.probes else None,
                expectation=expectation,
                seed=args.seed,
            )
        report = theorem2_weak_divergence(cfg, phi)
        out = args.output
        if out and args.part == "both":
            out = str(Path(out).with_suffix(".part-b.json"))
        _write_report_files(report, out, series=("n", "ratio"))
        ok = ok and report.verdict
    return 0 if ok else 1


def _cmd_corollaries(args) -> int:
    report = corollary_suite(
        args.resolution,
        args.p,
        trials=args.trials,
        seed=args.seed,
        jobs=args.jobs,
    )
    _write_report_files(report, args.output)
    return 0 if report.verdict else 1


def _cmd_report(args) -> int:
    report = load_report(args.input)
    if args.format == "tsv":
        if not (args.x and args.y):
            raise ValueError("tsv output needs --x and --y case keys")
        out = Path(args.output) if args.output else Path(args.input).with_suffix(".series.tsv")
        report.write_series_tsv(out, args.x, args.y)
    else:
        out = Path(args.output) if args.output else Path(args.input).with_suffix(".cases.csv")
        report.write_cases_csv(out)
    print(f"{report.name} -> {out}")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walshlab",
        description="Walsh-Fourier analysis on the dyadic group: kernels, transforms, and verification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("stats", help="binary-expansion characteristics of an order")
    sp.add_argument("n", type=int)
    sp.add_argument("--format", choices=("json", "table"), default="json")
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_stats)

    sp = sub.add_parser("kernel", help="emit a Dirichlet kernel as CSV")
    sp.add_argument("n", type=int)
    sp.add_argument("--resolution", type=int, required=True, metavar="M")
    sp.add_argument("--construction", choices=("direct", "fast", "dyadic"), default="direct")
    sp.add_argument("--exact", action="store_true", help="exact values (kernels always are)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_kernel)

    sp = sub.add_parser("transform", help="forward or inverse spectral transform of a CSV function")
    sp.add_argument("--input", required=True)
    sp.add_argument("--inverse", action="store_true")
    sp.add_argument("--exact", action="store_true", help="force exact-mode parsing")
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_transform)

    sp = sub.add_parser("verify", help="run the exhaustive kernel verifications")
    sp.add_argument("which", choices=tuple(_VERIFIERS))
    sp.add_argument("--resolution", type=int, required=True, metavar="M")
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("thm1", help="weak-type stability of the weighted maximal operator on atoms")
    sp.add_argument("--config", help="JSON experiment config (overrides flags)")
    sp.add_argument("--p", action="append", help="exponent, e.g. 1/2 (repeatable)")
    sp.add_argument("--levels", type=_parse_int_list, help="support levels, e.g. 4..9")
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_thm1)

    sp = sub.add_parser("thm2", help="sharpness: growth and weak divergence")
    sp.add_argument("--part", choices=("a", "b", "both"), default="both")
    sp.add_argument("--config")
    sp.add_argument("--p", action="append")
    sp.add_argument("--resolution", type=int, default=12, metavar="M")
    sp.add_argument("--scales", type=_parse_int_list, help="scales, e.g. 3..11")
    sp.add_argument("--phi", choices=("unit", "rho"), default="unit", help="weight for part b")
    sp.add_argument("--probes", help="probe orders for part b, e.g. 4:0,5:0")
    sp.add_argument("--expectation", choices=("divergent", "bounded"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_thm2)

    sp = sub.add_parser("corollaries", help="weak-type trends for the derived operators")
    sp.add_argument("--resolution", type=int, default=10, metavar="M")
    sp.add_argument("--p", default="1/2")
    sp.add_argument("--trials", type=int, default=60)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_corollaries)

    sp = sub.add_parser("report", help="render a report JSON as CSV cases or a TSV series")
    sp.add_argument("input")
    sp.add_argument("--format", choices=("csv", "tsv"), default="csv")
    sp.add_argument("--x", help="case key for the TSV x column")
    sp.add_argument("--y", help="case key for the TSV y column")
    sp.add_argument("--output")
    sp.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"walshlab: config error: {'; '.join(exc.problems)}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"walshlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

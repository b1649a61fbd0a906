"""Command-line front end.

Subcommands: ``anonymize``, ``audit``, ``attack``, ``evaluate``, ``stats``.
Every flag has a config-file equivalent (``--config``, flat ``key = value``
lines); flags override the file.  The effective configuration is echoed into
every report for reproducibility.

Exit codes: 0 success (audit: satisfied), 1 audit violation, 2 usage or
validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields as dataclass_fields
from pathlib import Path

from .analysis import PrivacyParams, audit_tlkc
from .anonymize import (
    Baseline1,
    Baseline2,
    ParameterError,
    TlkcAnonymizer,
    TlkcExtAnonymizer,
)
from .background import BkSpec, confidence, match, parse_candidate
from .io import RunConfig, load_log, read_config, save_log
from .log import (
    EventLog,
    LogError,
    Perspective,
    TimestampAccuracy,
    discretize_sensitive,
    relativize_log,
    truncate_to_accuracy,
    variants,
)
from .metrics import dfg_compare, emd_data_utility, handover_compare

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _add_common(parser: argparse.ArgumentParser, *, needs_output=False):
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    parser.add_argument("--input", "-i", help="input event log (.xes or .csv)")
    if needs_output:
        parser.add_argument("--output", "-o", help="output event log path")
    parser.add_argument("--format", choices=["xes", "csv"], help="force the log format")
    parser.add_argument("-T", "--accuracy", help="timestamp accuracy: seconds|minutes|hours|days")
    parser.add_argument("-L", type=int, dest="L", help="maximal background-knowledge size")
    parser.add_argument("-K", type=int, dest="K", help="anonymity threshold")
    parser.add_argument("-C", type=float, dest="C", help="confidence bound in (0,1]")
    parser.add_argument("--theta", type=float, help="frequency threshold for the classic greedy")
    parser.add_argument("--alpha", type=float, help="privacy-gain weight (normalized score)")
    parser.add_argument("--beta", type=float, help="utility weight (normalized score)")
    parser.add_argument("--bk", help="background knowledge <type>/<attr>, e.g. rel/ar")
    parser.add_argument(
        "--sensitive",
        help="comma-separated sensitive case attributes, e.g. Disease or Disease,Age",
    )
    parser.add_argument(
        "--discretize",
        help="comma-separated numeric sensitive attributes to bin into "
        "low/middle/high by quartiles before any other processing",
    )
    parser.add_argument(
        "--relativize",
        action="store_true",
        default=None,
        help="rebase every case to the shared epoch origin before processing "
        "(use for calendar-time logs; already-relative logs are used as-is)",
    )
    parser.add_argument("--tie-break", type=int, dest="tie_break", help="seed for an "
                        "alternative tie-break order (default: canonical rule)")
    parser.add_argument("--threads", type=int, help="upper bound on internal parallelism")
    parser.add_argument("--csv-case", help="CSV case id column")
    parser.add_argument("--csv-activity", help="CSV activity column")
    parser.add_argument("--csv-timestamp", help="CSV timestamp column")
    parser.add_argument("--csv-resource", help="CSV resource column ('' for none)")
    parser.add_argument("--csv-timestamp-format", help="strptime pattern or 'iso'")


def _build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    names = {f.name for f in dataclass_fields(RunConfig)}
    for name in names:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    for listy in ("sensitive", "discretize"):
        if isinstance(values.get(listy), str):
            values[listy] = tuple(
                s.strip() for s in values[listy].split(",") if s.strip()
            )
    if values.get("csv_resource") == "":
        values["csv_resource"] = None
    values = {k: v for k, v in values.items() if k in names}
    return RunConfig(**values)


def _load_prepared(config: RunConfig) -> EventLog:
    if not config.input:
        raise LogError("no input log given (use --input)")
    log = load_log(
        config.input,
        fmt=config.format,
        colmap=config.colmap(),
        sensitive_attrs=config.sensitive,
    )
    for attr in config.discretize:
        log = discretize_sensitive(log, attr)
    if config.relativize:
        log = relativize_log(log, t0=0)
    return truncate_to_accuracy(log, TimestampAccuracy.parse(config.accuracy))


def _privacy_params(config: RunConfig) -> PrivacyParams:
    return PrivacyParams(
        accuracy=config.accuracy,
        L=config.L,
        K=config.K,
        C=config.C,
        bk=config.bk,
        sensitive=config.sensitive,
        theta=config.theta,
        alpha=config.alpha,
        beta=config.beta,
    )


def _config_lines(config: RunConfig) -> list:
    return [f"{key} = {'' if value is None else value}" for key, value in config.items()]


def _write_report(path, lines) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _make_anonymizer(config: RunConfig):
    algorithm = config.algorithm.lower()
    if algorithm == "tlkc":
        if config.theta is None:
            raise LogError("the tlkc algorithm needs --theta")
        return TlkcAnonymizer(
            accuracy=config.accuracy,
            L=config.L,
            K=config.K,
            C=config.C,
            theta=config.theta,
            bk=config.bk,
            sensitive=config.sensitive,
            tie_break=config.tie_break,
        )
    if algorithm == "tlkc-ext":
        alpha = 0.5 if config.alpha is None else config.alpha
        beta = 0.5 if config.beta is None else config.beta
        return TlkcExtAnonymizer(
            accuracy=config.accuracy,
            L=config.L,
            K=config.K,
            C=config.C,
            alpha=alpha,
            beta=beta,
            bk=config.bk,
            sensitive=config.sensitive,
            tie_break=config.tie_break,
        )
    ps = BkSpec.parse(config.bk).perspective
    if algorithm == "baseline1":
        return Baseline1(k=config.K, ps=ps, accuracy=config.accuracy)
    if algorithm == "baseline2":
        return Baseline2(k=config.K, ps=ps, accuracy=config.accuracy)
    raise LogError(
        f"unknown algorithm {config.algorithm!r}; expected tlkc, tlkc-ext, "
        "baseline1 or baseline2"
    )


def cmd_anonymize(args) -> int:
    config = _build_config(args)
    if not config.output:
        raise LogError("no output path given (use --output)")
    log = _load_prepared(config)
    anonymizer = _make_anonymizer(config)
    started = time.perf_counter()
    result = anonymizer.anonymize(log)
    elapsed = time.perf_counter() - started
    out_fmt = config.format or Path(config.output).suffix.lstrip(".").lower() or None
    save_log(result.log, config.output, fmt=out_fmt, colmap=config.colmap())

    lines = ["# effective configuration"]
    lines += _config_lines(config)
    lines.append("# iterations")
    for i, rec in enumerate(result.iterations, start=1):
        lines.append(
            f"{i}. winner={rec.winner} score={rec.score:.6f} "
            f"remaining_mvts={rec.remaining_mvts}"
        )
    if result.suppression.descriptors:
        lines.append("# suppression set")
        lines.append(", ".join(str(d) for d in result.suppression))
    lines.append("# summary")
    lines.append(f"events removed: {result.events_removed}")
    lines.append(f"cases dropped: {len(result.dropped_cases)}")
    lines.append(f"runtime seconds: {elapsed:.3f}")
    report_path = args.report or f"{config.output}.report.txt"
    _write_report(report_path, lines)

    print(
        f"{config.algorithm}: {result.events_removed} events removed, "
        f"{len(result.dropped_cases)} cases dropped, "
        f"{len(result.log)} cases written to {config.output}"
    )
    if not result.log.instances:
        print("warning: the anonymized log is empty", file=sys.stderr)
    return EXIT_OK


def cmd_audit(args) -> int:
    config = _build_config(args)
    log = _load_prepared(config)
    report = audit_tlkc(log, _privacy_params(config))
    lines = ["# effective configuration"] + _config_lines(config) + report.lines()
    for line in report.lines():
        print(line)
    if args.report:
        _write_report(args.report, lines)
    if args.report_json:
        payload = {
            "satisfied": report.satisfied,
            "violations": report.records(),
            "config": dict(config.items()),
        }
        Path(args.report_json).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def cmd_attack(args) -> int:
    config = _build_config(args)
    log = _load_prepared(config)
    spec = BkSpec.parse(config.bk)
    cand = parse_candidate(args.candidate, spec)
    matched = match(log, spec, cand, TimestampAccuracy.parse(config.accuracy))
    print(f"candidate {cand} -> {len(matched)} match(es)")
    if matched:
        print("cases: " + ", ".join(inst.case_id for inst in matched))
        for attr in config.sensitive:
            dist, top = confidence(matched, attr)
            parts = ", ".join(
                f"{value}={fraction:.3f}"
                for value, fraction in sorted(dist.items(), key=lambda kv: str(kv[0]))
            )
            print(f"confidence[{attr}]: {parts} (max {top:.3f})")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _build_config(args)
    original = _load_prepared(config)
    anon_config = RunConfig(**{**dict(_cfg_kv(config)), "input": args.anonymized})
    anonymized = _load_prepared(anon_config)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    ps = BkSpec.parse(config.bk).perspective
    accuracy = TimestampAccuracy.parse(config.accuracy)
    payload = {"config": dict(config.items()), "anonymized": args.anonymized, "metrics": {}}
    for metric in metrics:
        if metric == "emd":
            report = emd_data_utility(original, anonymized, ps, accuracy)
            payload["metrics"]["emd"] = {
                "du": report.du,
                "transport_cost": report.transport_cost,
                "perspective": ps.value,
            }
            print(f"emd ({ps.value}): {report.summary()}")
        elif metric == "dfg":
            cmp = dfg_compare(original, anonymized)
            payload["metrics"]["dfg"] = _graph_payload(cmp, args.edge_diff)
            print(f"dfg: {cmp.summary()}")
        elif metric == "handover":
            cmp = handover_compare(original, anonymized)
            payload["metrics"]["handover"] = _graph_payload(cmp, args.edge_diff)
            print(f"handover: {cmp.summary()}")
        else:
            raise LogError(f"unknown metric {metric!r}; expected emd, dfg or handover")
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return EXIT_OK


def _cfg_kv(config: RunConfig):
    for f in dataclass_fields(RunConfig):
        yield f.name, getattr(config, f.name)


def _graph_payload(cmp, include_edges):
    payload = {"fitness": cmp.fitness, "precision": cmp.precision, "f1": cmp.f1}
    if include_edges:
        payload["missing_edges"] = [list(e) for e in cmp.missing_edges]
        payload["extra_edges"] = [list(e) for e in cmp.extra_edges]
    return payload


def cmd_stats(args) -> int:
    config = _build_config(args)
    log = _load_prepared(config)
    print(f"cases: {len(log)}")
    print(f"events: {log.total_events}")
    print(f"activities: {len(log.activities())}")
    resources = log.resources()
    print(f"resources: {len(resources)}")
    accuracy = TimestampAccuracy.parse(config.accuracy)
    for ps in Perspective:
        if ps.has_resource and not log.has_resources():
            print(f"variants[{ps.value}]: n/a (missing resources)")
            continue
        _, unique = variants(log, ps, accuracy)
        print(f"variants[{ps.value}]: {len(unique)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tlkcpriv",
        description="Anonymize process-mining event logs against linkage attacks, "
        "audit privacy guarantees and quantify utility loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("anonymize", help="anonymize a log and write the result")
    _add_common(p, needs_output=True)
    p.add_argument(
        "--algorithm",
        help="tlkc | tlkc-ext | baseline1 | baseline2",
    )
    p.add_argument("--report", help="report path (default: <output>.report.txt)")
    p.set_defaults(func=cmd_anonymize)

    p = sub.add_parser("audit", help="check a log against the privacy requirements")
    _add_common(p)
    p.add_argument("--report", help="write the text report here")
    p.add_argument("--report-json", help="write a machine-readable report here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("attack", help="simulate a linkage attack with one candidate")
    _add_common(p)
    p.add_argument(
        "candidate",
        help="candidate literal: {a,b} (set), [a^2,b] (multiset), <a,b> (sequence), "
        "<a@3,b@7> (timed); elements are act, act/res or /res",
    )
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="compare an anonymized log against the original")
    _add_common(p)
    p.add_argument("--anonymized", required=True, help="anonymized log path")
    p.add_argument("--metrics", default="emd,dfg", help="comma list: emd,dfg,handover")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--edge-diff", action="store_true", help="include edge diffs in the report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="print case/event/variant counts")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except LogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

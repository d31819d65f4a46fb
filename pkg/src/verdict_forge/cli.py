"""Batch command line: ``select``, ``extract``, ``solve`` and ``report``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from ._format import fmt_real
from .consensus import SOLVERS, SolverDivergence, build_constraints, solve, trace_record
from .corpus import DEFAULT_MIN_COMMENTS, DEFAULT_THRESHOLD, ingest, iter_selected, write_posts
from .extraction import ExtractorConfig, extract_corpus, read_analyses, write_analyses
from .report import (
    EXIT_OK,
    EXIT_PARTIAL,
    EXIT_TOTAL_FAILURE,
    compare_with_annotations,
    emit_report,
    run_pipeline,
    summarize,
)
from .verdict import classify

logger = logging.getLogger("verdict_forge")


def cmd_select(args) -> int:
    errors = []
    selected = list(iter_selected(ingest(args.input, errors), args.min_comments, args.threshold))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_posts((p for p, _ in selected), out)
    with open(out.parent / "scores.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["post_id", "entropy", "fraction_polar", "score", "labeled_count"])
        for post, cs in selected:
            w.writerow([post.id, fmt_real(cs.entropy), fmt_real(cs.fraction_polar), fmt_real(cs.score), cs.labeled_count])
    logger.info("selected %d posts (%d malformed records skipped)", len(selected), len(errors))
    return EXIT_OK


def _config(args) -> ExtractorConfig:
    return ExtractorConfig(
        backend=args.backend,
        endpoint_url=args.endpoint_url,
        model_name=args.model,
        retry_limit=args.retry_limit,
        timeout_seconds=args.timeout,
        max_in_flight=args.max_in_flight,
    )


def cmd_extract(args) -> int:
    posts = list(ingest(args.input))
    results = extract_corpus(posts, _config(args))
    n_ok = write_analyses(args.output, results)
    failed = [(pid, r) for pid, r in results if isinstance(r, BaseException)]
    for pid, exc in failed:
        logger.error("post %s: %s", pid, exc)
    if posts and not n_ok:
        return EXIT_TOTAL_FAILURE
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_solve(args) -> int:
    cache = read_analyses(args.analyses)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for post_id, analyses in cache.items():
            constraints = build_constraints(analyses)
            try:
                assignment = solve(constraints, method=args.solver, cross_check=args.cross_check)
            except SolverDivergence as exc:
                logger.error("post %s: %s", post_id, exc)
                return EXIT_TOTAL_FAILURE
            record = trace_record(post_id, assignment, constraints, analyses, classify(assignment))
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_report(args) -> int:
    posts = list(ingest(args.posts))
    if not posts:
        logger.error("no posts in %s", args.posts)
        return EXIT_TOTAL_FAILURE
    cache = read_analyses(args.analyses) if args.analyses else None
    config = _config(args) if args.backend else ExtractorConfig()
    result = run_pipeline(
        posts,
        config,
        analyses=cache,
        extract_missing=cache is None or args.backend is not None,
        cross_check=args.cross_check,
    )
    for pid, exc in sorted(result.errors.items()):
        logger.error("post %s: %s", pid, exc)
    if args.annotations:
        report = compare_with_annotations(result.outcomes, args.annotations)
    else:
        report = summarize(result.outcomes)
    emit_report(report, result.outcomes, args.out_dir, result.errors)
    return result.exit_code


def _add_backend_args(p, required: bool):
    p.add_argument("--backend", choices=("rule_based", "remote"), default="rule_based" if required else None)
    p.add_argument("--endpoint-url", default=None, help="chat-completion endpoint (remote backend)")
    p.add_argument("--model", default=None, help="model name sent to the remote endpoint")
    p.add_argument("--retry-limit", type=int, default=3)
    p.add_argument("--timeout", type=int, default=60, help="request timeout in seconds")
    p.add_argument("--max-in-flight", type=int, default=4, help="concurrent remote requests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="verdict-forge", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="keep engaged, high-controversy posts")
    p.add_argument("--input", required=True)
    p.add_argument("--min-comments", type=int, default=DEFAULT_MIN_COMMENTS)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("extract", help="content/quality vectors per comment")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_backend_args(p, required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("solve", help="weighted MaxSAT consensus per post")
    p.add_argument("--analyses", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--solver", choices=sorted(SOLVERS), default="closed_form")
    p.add_argument("--cross-check", action="store_true", help="verify every instance against the exhaustive oracle")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("report", help="end-to-end run and evaluation tables")
    p.add_argument("--posts", required=True)
    p.add_argument("--analyses", default=None, help="cached analyses.jsonl; skips extraction")
    p.add_argument("--annotations", default=None, help="post_id,label or post_id,reviewer_id,label CSV")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--cross-check", action="store_true")
    _add_backend_args(p, required=False)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_TOTAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())

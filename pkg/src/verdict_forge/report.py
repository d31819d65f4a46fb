"""End-to-end pipeline runs and the evaluation tables they produce."""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from ._format import fmt_real, round_real
from .consensus import ConsensusAssignment, build_constraints, solve
from .corpus import ControversyScore, NoLabeledComments, Post, controversy_score, majority_label
from .extraction import ExtractionError, ExtractorConfig, MissingComment, extract_post, make_backend
from .labels import LABELS, RULES, Rule, VerdictLabel, to_label
from .verdict import classify

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_TOTAL_FAILURE, EXIT_PARTIAL = 0, 1, 2


@dataclass(frozen=True)
class PostOutcome:
    post_id: str
    majority: Optional[VerdictLabel]
    solver: VerdictLabel
    changed: bool
    rule: Rule
    controversy: Optional[ControversyScore] = None
    assignment: Optional[ConsensusAssignment] = None


@dataclass
class PipelineResult:
    outcomes: list
    errors: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if not self.outcomes:
            return EXIT_TOTAL_FAILURE
        return EXIT_PARTIAL if self.errors else EXIT_OK


@dataclass(frozen=True)
class AggregationReport:
    n_posts: int
    change_rate: Optional[float]
    transition_counts: dict
    agreement_rate: Optional[float] = None
    per_rule_counts: dict = field(default_factory=dict)
    n_with_majority: int = 0
    n_changed: int = 0
    annotation_coverage: int = 0
    annotation_matches: int = 0
    unknown_post_ids: tuple = ()
    tied_post_ids: tuple = ()


def _outcome(post: Post, analyses: Sequence, cross_check: bool) -> PostOutcome:
    expected = [c.id for c in post.top_level_comments]
    got = {a.comment_id for a in analyses}
    if got != set(expected):
        missing = sorted(set(expected) - got) or sorted(got - set(expected))
        raise MissingComment(missing[0])
    assignment = solve(build_constraints(analyses), cross_check=cross_check)
    verdict = classify(assignment)
    majority = majority_label(post)
    try:
        cs = controversy_score(post)
    except NoLabeledComments:
        cs = None
    return PostOutcome(
        post_id=post.id,
        majority=majority,
        solver=verdict.label,
        changed=majority is not None and majority != verdict.label,
        rule=verdict.rule,
        controversy=cs,
        assignment=assignment,
    )


def run_pipeline(
    posts: Sequence[Post],
    config: ExtractorConfig = ExtractorConfig(),
    analyses: Optional[Mapping] = None,
    backend=None,
    extract_missing: bool = True,
    cross_check: bool = False,
) -> PipelineResult:
    """Extract (or reuse cached analyses), weight, solve and classify every post.

    Per-post failures land in ``PipelineResult.errors`` keyed by post id; the
    run only fails outright when given no posts.
    """
    posts = list(posts)
    if not posts:
        raise ValueError("run_pipeline needs at least one post")
    cache = dict(analyses or {})
    if extract_missing and backend is None and any(p.id not in cache for p in posts):
        backend = make_backend(config)

    def run(post):
        try:
            if post.id in cache:
                items = cache[post.id]
            elif extract_missing:
                items = extract_post(post, config, backend)
            else:
                raise ExtractionError(f"no cached analyses for post {post.id!r}")
            return post.id, _outcome(post, items, cross_check)
        except (ExtractionError, ValueError) as exc:
            logger.warning("post %s failed: %s", post.id, exc)
            return post.id, exc

    workers = config.max_in_flight if config.backend == "remote" else 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, posts))
    else:
        results = [run(p) for p in posts]

    outcomes, errors = [], {}
    for post_id, res in results:
        if isinstance(res, BaseException):
            errors[post_id] = res
        else:
            outcomes.append(res)
    return PipelineResult(outcomes, errors)


def transition_matrix(outcomes: Sequence[PostOutcome]) -> dict:
    counts = {a: {b: 0 for b in LABELS} for a in LABELS}
    for o in outcomes:
        if o.majority is not None:
            counts[o.majority][o.solver] += 1
    return counts


def change_rate_from_transitions(transitions: Mapping) -> Optional[float]:
    total = sum(n for row in transitions.values() for n in row.values())
    if not total:
        return None
    off = sum(n for a, row in transitions.items() for b, n in row.items() if a != b)
    return off / total


def read_annotations(path) -> tuple:
    """Load ``post_id,label`` or ``post_id,reviewer_id,label`` rows.

    Multiple rows for a post are reviewer votes reduced by strict majority.
    Returns ``({post_id: label}, tied_post_ids)``.
    """
    votes: dict = {}
    with open(Path(path), encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return {}, ()
        fields = [f.strip() for f in reader.fieldnames]
        if "post_id" not in fields or "label" not in fields:
            raise ValueError(f"{path}: header must contain post_id and label, got {fields}")
        reader.fieldnames = fields
        for line_number, row in enumerate(reader, start=2):
            try:
                label = to_label(row["label"])
            except ValueError as exc:
                raise ValueError(f"{path}:{line_number}: {exc}") from None
            votes.setdefault(row["post_id"].strip(), Counter())[label] += 1
    resolved, tied = {}, []
    for post_id, counter in votes.items():
        ranked = counter.most_common()
        if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
            tied.append(post_id)
        else:
            resolved[post_id] = ranked[0][0]
    return resolved, tuple(sorted(tied))


def summarize(outcomes: Sequence[PostOutcome]) -> AggregationReport:
    transitions = transition_matrix(outcomes)
    with_majority = [o for o in outcomes if o.majority is not None]
    rules = Counter(o.rule for o in outcomes)
    return AggregationReport(
        n_posts=len(outcomes),
        change_rate=change_rate_from_transitions(transitions),
        transition_counts=transitions,
        per_rule_counts={r: rules.get(r, 0) for r in RULES},
        n_with_majority=len(with_majority),
        n_changed=sum(o.changed for o in outcomes),
    )


def compare_with_annotations(outcomes: Sequence[PostOutcome], annotations) -> AggregationReport:
    """Agreement between solver labels and human labels.

    ``annotations`` is a CSV path or an already-resolved ``{post_id: label}``
    mapping. Annotated ids without an outcome are listed, not fatal.
    """
    if isinstance(annotations, Mapping):
        human, tied = {k: to_label(v) for k, v in annotations.items()}, ()
    else:
        human, tied = read_annotations(annotations)
    base = summarize(outcomes)
    by_id = {o.post_id: o for o in outcomes}
    covered = [pid for pid in human if pid in by_id]
    matches = sum(by_id[pid].solver == human[pid] for pid in covered)
    unknown = sorted(set(human) - set(by_id))
    return AggregationReport(
        n_posts=base.n_posts,
        change_rate=base.change_rate,
        transition_counts=base.transition_counts,
        agreement_rate=matches / len(covered) if covered else None,
        per_rule_counts=base.per_rule_counts,
        n_with_majority=base.n_with_majority,
        n_changed=base.n_changed,
        annotation_coverage=len(covered),
        annotation_matches=matches,
        unknown_post_ids=tuple(unknown),
        tied_post_ids=tuple(tied),
    )


def _real(value) -> str:
    return "" if value is None else fmt_real(value)


def _opt_round(value):
    return None if value is None else round_real(value)


def emit_report(report: AggregationReport, outcomes: Sequence[PostOutcome], out_dir, errors: Optional[Mapping] = None) -> None:
    """Write ``outcomes.csv``, ``transitions.csv`` and ``summary.json`` to ``out_dir``.

    Output is byte-identical for identical inputs: rows are sorted by post id,
    reals carry six decimals and JSON keys are sorted.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "outcomes.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["post_id", "majority", "solver", "changed", "rule", "entropy", "score"])
        for o in sorted(outcomes, key=lambda o: o.post_id):
            cs = o.controversy
            w.writerow([
                o.post_id,
                "" if o.majority is None else o.majority.value,
                o.solver.value,
                "true" if o.changed else "false",
                o.rule.value,
                _real(cs.entropy if cs else None),
                _real(cs.score if cs else None),
            ])

    with open(out / "transitions.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["from", "to", "count"])
        for a in LABELS:
            for b in LABELS:
                w.writerow([a.value, b.value, report.transition_counts[a][b]])

    summary = {
        "n_posts": report.n_posts,
        "n_with_majority": report.n_with_majority,
        "n_changed": report.n_changed,
        "change_rate": _opt_round(report.change_rate),
        "agreement_rate": _opt_round(report.agreement_rate),
        "annotation_coverage": report.annotation_coverage,
        "annotation_matches": report.annotation_matches,
        "unknown_post_ids": list(report.unknown_post_ids),
        "tied_post_ids": list(report.tied_post_ids),
        "per_rule_counts": {r.value: report.per_rule_counts.get(r, 0) for r in RULES},
        "errors": {pid: str(exc) for pid, exc in sorted((errors or {}).items())},
    }
    with open(out / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + "\n")

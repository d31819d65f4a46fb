"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary adds a
PASS/FAIL line per criterion.
"""

import itertools
import json
import math
import random
import time
from collections import Counter

import numpy as np
import pytest

from verdict_forge.consensus import (
    PREDICATES,
    Predicate,
    SoftConstraint,
    build_constraints,
    solve_closed_form,
    solve_oracle,
)
from verdict_forge.corpus import (
    Comment,
    Post,
    controversy_score,
    entropy_from_histogram,
    ingest,
    select_controversial,
)
from verdict_forge.extraction import (
    ExtractionError,
    MissingComment,
    ParseError,
    SchemaViolation,
    dump_response,
    validate_response,
)
from verdict_forge.extraction.schema import QualityVector
from verdict_forge.extraction.backends import ExtractorConfig
from verdict_forge.labels import LABELS, Rule, VerdictLabel
from verdict_forge.report import emit_report, run_pipeline, summarize, compare_with_annotations, PostOutcome
from verdict_forge.verdict import classify
from verdict_forge.weighting import split_stream_weights

from conftest import analysis, random_analyses

import build_fixtures

pytestmark = pytest.mark.acceptance

SEED = 7


def _random_constraints(rng, n):
    """Constraint list for ``n`` comments with uniform content/quality vectors."""
    out = []
    for i in range(n):
        j, e, d, f, nb = (rng.randint(1, 5) for _ in range(5))
        wl, we = (j + d) * nb, (e + f) * nb
        cid = f"c{i}"
        out += [
            SoftConstraint(Predicate.HARM, rng.random() < 0.5, wl, cid),
            SoftConstraint(Predicate.INTENT, rng.random() < 0.5, wl, cid),
            SoftConstraint(Predicate.EMPATHY, rng.random() < 0.5, we, cid),
            SoftConstraint(Predicate.APOLOGY, rng.random() < 0.5, we, cid),
        ]
    return out


def test_c1_oracle_equivalence():
    rng = random.Random(SEED)
    n_instances = 10_000
    instances = [_random_constraints(rng, rng.randint(1, 200)) for _ in range(n_instances)]
    start = time.perf_counter()
    for cs in instances:
        cf, orc = solve_closed_form(cs), solve_oracle(cs)
        assert cf.values == orc.values and cf.total_cost == orc.total_cost
    elapsed = time.perf_counter() - start
    print(f"c1: {n_instances} instances solved twice in {elapsed:.2f}s")
    assert elapsed < 10.0
    # the fast generator above must agree with the public path
    for _ in range(50):
        analyses = random_analyses(rng, rng.randint(1, 200))
        cs = build_constraints(analyses)
        assert solve_closed_form(cs) == solve_oracle(cs)


# Five rows written as predicates, independent of the lookup table.
TABLE_ROWS = [
    ("Vindication", lambda h, i, e, a: not h, VerdictLabel.NTA),
    ("Malice", lambda h, i, e, a: h and i, VerdictLabel.YTA),
    ("Tragedy (empathy)", lambda h, i, e, a: h and not i and e, VerdictLabel.NAH),
    ("Tragedy (apology)", lambda h, i, e, a: h and not i and a, VerdictLabel.NAH),
    ("Negligence", lambda h, i, e, a: h and not i and not e and not a, VerdictLabel.ESH),
]


def test_c2_decision_tree_fidelity():
    from verdict_forge.consensus import ConsensusAssignment

    for values in itertools.product((False, True), repeat=4):
        labels = {label for _, pred, label in TABLE_ROWS if pred(*values)}
        assert len(labels) == 1, values
        got = classify(ConsensusAssignment(*values, total_cost=0))
        assert got.label is labels.pop(), values


def test_c3_split_stream_formulas():
    weights = []
    for q in itertools.product(range(1, 6), repeat=5):
        j, e, d, f, nb = q
        w = split_stream_weights(QualityVector(*q))
        assert w.w_logic == (j + d) * nb and w.w_ethic == (e + f) * nb
        weights += [w.w_logic, w.w_ethic]
    assert len(weights) == 2 * 3125
    assert max(weights) == 50 and min(weights) == 2


def _direct_entropy(counts):
    total = sum(counts)
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def _post_from_hist(hist, extra_unlabeled=0, pid="p"):
    comments = []
    for label, n in zip(LABELS, hist):
        comments += [Comment(f"{label}{i}", f"{label.value} here", 1) for i in range(n)]
    comments += [Comment(f"u{i}", "no verdict", 1) for i in range(extra_unlabeled)]
    return Post(pid, comments=comments)


def test_c4_entropy_and_selection():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        hist = rng.integers(0, 40, size=4)
        if hist.sum() == 0:
            hist[0] = 1
        unlabeled = int(rng.integers(0, 20))
        cs = controversy_score(_post_from_hist(hist.tolist(), unlabeled))
        h = _direct_entropy(hist.tolist())
        polar = (hist[0] + hist[1]) / hist.sum()  # unlabeled comments excluded
        assert abs(cs.entropy - h) <= 1e-12
        assert abs(cs.score - h * polar) <= 1e-12
        assert abs(entropy_from_histogram(dict(zip(LABELS, hist.tolist()))).entropy - h) <= 1e-12
    assert entropy_from_histogram({lbl: 5 for lbl in LABELS}).entropy == 2.0
    assert entropy_from_histogram({VerdictLabel.YTA: 9}).entropy == 0.0

    # 50-comment gate: 49 fails, 50 passes at the same high score
    assert select_controversial([_post_from_hist([13, 12, 12, 12])]) == []
    big = _post_from_hist([13, 13, 12, 12])
    assert select_controversial([big]) == [big]
    # score gate is strict
    p = _post_from_hist([30, 30, 0, 0])
    assert controversy_score(p).score == 1.0
    assert select_controversial([p], threshold=1.0) == []
    assert select_controversial([p], threshold=0.9) == [p]


def test_c5_expert_vs_trolls():
    expert = analysis("expert", [0, 0, 0, 0], [5, 5, 5, 5, 5])
    trolls = [analysis(f"t{i}", [1, 0, 0, 0], [2, 1, 3, 1, 1]) for i in range(9)]
    assert all(split_stream_weights(t.quality).w_logic == 5 for t in trolls)
    cs = build_constraints([expert] + trolls)
    for solver in (solve_closed_form, solve_oracle):
        result = solver(cs)
        assert result.harm is False
        assert result.per_predicate_margin[Predicate.HARM] == 45 - 50


ONE = {"comment_id": "c1", "comment_content_vector": [0, 1, 0, 1],
       "comment_quality_vector": [3, 3, 3, 3, 3], "reasoning": "Fine."}
GOOD = json.dumps({"analyses": [ONE]})


def _with(**changes):
    item = {**ONE, **changes}
    return json.dumps({"analyses": [item]})


def _without(key):
    item = {k: v for k, v in ONE.items() if k != key}
    return json.dumps({"analyses": [item]})


MALFORMED = [
    # (raw response, expected ids, error type, field for SchemaViolation)
    ("Here is the analysis: " + GOOD, {"c1"}, ParseError, None),
    ("```json\n" + GOOD + "\n```", {"c1"}, ParseError, None),
    (GOOD + " Hope this helps!", {"c1"}, ParseError, None),
    (GOOD.replace("]}", "],}"), {"c1"}, ParseError, None),
    (GOOD.replace("3]", "3,]"), {"c1"}, ParseError, None),
    (GOOD.replace("}]", "},]"), {"c1"}, ParseError, None),
    (GOOD[:-5], {"c1"}, ParseError, None),
    ("", {"c1"}, ParseError, None),
    (GOOD.replace('"', "'"), {"c1"}, ParseError, None),
    (GOOD.replace("[3, 3, 3, 3, 3]", "[3, 3, NaN, 3, 3]"), {"c1"}, ParseError, None),
    (GOOD.replace('{"comment_id"', '{"comment_id": "c0", "comment_id"'), {"c1"}, ParseError, None),
    (GOOD + GOOD, {"c1"}, ParseError, None),
    (_with(comment_quality_vector=[3, 3, 3, 3, 6]), {"c1"}, SchemaViolation, "quality[4]"),
    (_with(comment_quality_vector=[0, 3, 3, 3, 3]), {"c1"}, SchemaViolation, "quality[0]"),
    (_with(comment_quality_vector=[3, -1, 3, 3, 3]), {"c1"}, SchemaViolation, "quality[1]"),
    (_with(comment_quality_vector=[3, 3, 3.5, 3, 3]), {"c1"}, SchemaViolation, "quality[2]"),
    (_with(comment_quality_vector=[3, 3, 3, "4", 3]), {"c1"}, SchemaViolation, "quality[3]"),
    (_with(comment_quality_vector=[3, 3, 3, 3]), {"c1"}, SchemaViolation, "quality"),
    (_with(comment_quality_vector=[3, 3, 3, 3, 3, 3]), {"c1"}, SchemaViolation, "quality"),
    (_with(comment_content_vector=[0, 1, 2, 1]), {"c1"}, SchemaViolation, "content[2]"),
    (_with(comment_content_vector=[0, 1, 0, True]), {"c1"}, SchemaViolation, "content[3]"),
    (_with(comment_content_vector=[0, 1, 0]), {"c1"}, SchemaViolation, "content"),
    (_with(comment_content_vector="0101"), {"c1"}, SchemaViolation, "content"),
    (_with(reasoning=7), {"c1"}, SchemaViolation, "reasoning"),
    (_with(comment_id=12), {"c1"}, SchemaViolation, "comment_id"),
    (_without("comment_quality_vector"), {"c1"}, SchemaViolation, "comment_quality_vector"),
    (_without("comment_content_vector"), {"c1"}, SchemaViolation, "comment_content_vector"),
    (_without("comment_id"), {"c1"}, SchemaViolation, "comment_id"),
    (_with(verdict="NTA"), {"c1"}, SchemaViolation, "verdict"),
    (json.dumps([ONE]), {"c1"}, SchemaViolation, "analyses"),
    (json.dumps({"analyses": ONE}), {"c1"}, SchemaViolation, "analyses"),
    (json.dumps({"analyses": [ONE], "note": "x"}), {"c1"}, SchemaViolation, "note"),
    (json.dumps({"analyses": [ONE, ONE]}), {"c1"}, SchemaViolation, "comment_id"),
    (GOOD, {"c1", "c2"}, MissingComment, None),
    (json.dumps({"analyses": []}), {"c1"}, MissingComment, None),
    (_with(comment_id="c9"), {"c1"}, MissingComment, None),
    (json.dumps({"analyses": [ONE, {**ONE, "comment_id": "c2"}]}), {"c1"}, MissingComment, None),
]


def test_c6_schema_gate():
    assert len(MALFORMED) >= 30
    seen = Counter()
    for raw, ids, err, field in MALFORMED:
        with pytest.raises(err) as exc:
            validate_response(raw, ids)
        assert isinstance(exc.value, ExtractionError)
        if field is not None:
            assert exc.value.field == field, raw
        seen[err] += 1
    assert set(seen) == {ParseError, SchemaViolation, MissingComment}

    rng = random.Random(SEED)
    for _ in range(300):
        analyses = random_analyses(rng, rng.randint(1, 20))
        analyses = [analysis(a.comment_id, a.content.to_list(), a.quality.to_list(), f"r{rng.random()}")
                    for a in analyses]
        raw = dump_response(analyses)
        back = validate_response(raw, {a.comment_id for a in analyses})
        assert back == analyses and dump_response(back) == raw


OUTPUTS = ("outcomes.csv", "transitions.csv", "summary.json")


def test_c7_end_to_end_determinism(tmp_path, fixture_posts_path):
    blobs = []
    for run in ("first", "second"):
        posts = list(ingest(fixture_posts_path))
        assert len(posts) == 20
        res = run_pipeline(posts, ExtractorConfig(backend="rule_based"))
        assert not res.errors
        emit_report(summarize(res.outcomes), res.outcomes, tmp_path / run, res.errors)
        blobs.append({name: (tmp_path / run / name).read_bytes() for name in OUTPUTS})
    assert blobs[0] == blobs[1]


def test_c8_fixture_change_rate_and_agreement(fixture_posts_path, annotations_path):
    posts = list(ingest(fixture_posts_path))
    res = run_pipeline(posts)
    report = summarize(res.outcomes)
    assert report.change_rate > 0
    overturned = [o for o in res.outcomes if o.majority is VerdictLabel.NTA and o.solver is VerdictLabel.YTA]
    assert overturned

    # at least one flip comes from a low-scored, high-quality minority outweighing the top-voted majority
    from verdict_forge.extraction import extract_post
    by_id = {p.id: p for p in posts}
    mechanism = False
    for o in overturned:
        analyses = extract_post(by_id[o.post_id], ExtractorConfig())
        yes = [a for a in analyses if a.content.harm]
        no = [a for a in analyses if not a.content.harm]
        if len(yes) < len(no) and any(a.quality.to_list() == [5] * 5 for a in yes):
            mechanism = True
    assert mechanism

    outs = [PostOutcome(pid, None, VerdictLabel(lbl), False, Rule.MALICE)
            for pid, lbl in build_fixtures.annotation_outcome_labels()]
    rep = compare_with_annotations(outs, annotations_path)
    assert rep.annotation_coverage == 50 and rep.annotation_matches == 43
    assert rep.agreement_rate == 0.86


def _margins(cs):
    return solve_closed_form(cs).per_predicate_margin


def test_c9_solver_invariants():
    rng = random.Random(SEED)
    cases = 1000
    for _ in range(cases):
        cs = _random_constraints(rng, rng.randint(1, 60))
        base = solve_oracle(cs)

        # positive scaling
        k = rng.randint(2, 50)
        scaled = solve_oracle([c._replace(weight=c.weight * k) for c in cs])
        assert scaled.values == base.values and scaled.total_cost == k * base.total_cost

        # monotonicity: extra True support never turns a True into False
        p = rng.choice(PREDICATES)
        more = solve_oracle(cs + [SoftConstraint(p, True, rng.randint(1, 50), "extra")])
        if base.value(p):
            assert more.value(p)
        less = solve_oracle(cs + [SoftConstraint(p, False, rng.randint(1, 50), "extra")])
        if not base.value(p):
            assert not less.value(p)

        # independence: touching one predicate leaves the other three alone
        q = rng.choice(PREDICATES)
        extra = [SoftConstraint(q, rng.random() < 0.5, rng.randint(1, 50), f"x{i}") for i in range(rng.randint(1, 5))]
        other = solve_oracle(cs + extra)
        for r in PREDICATES:
            if r != q:
                assert other.value(r) == base.value(r)

        # permutation
        shuffled = cs[:]
        rng.shuffle(shuffled)
        perm = solve_oracle(shuffled)
        assert perm.values == base.values and perm.total_cost == base.total_cost

import random
import sys
from pathlib import Path

import pytest

from verdict_forge.consensus import build_constraints
from verdict_forge.corpus import Comment, Post
from verdict_forge.extraction import CommentAnalysis, ContentVector, QualityVector

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(FIXTURES))


def make_post(specs, post_id="p1"):
    """Build a post from ``(score, body)`` or ``(score, created_at, body)`` tuples."""
    comments = []
    for i, spec in enumerate(specs):
        if len(spec) == 2:
            score, body = spec
            t = 1000 + i
        else:
            score, t, body = spec
        comments.append(Comment(id=f"c{i}", body=body, score=score, created_at=t))
    return Post(id=post_id, title="t", body="b", comments=comments)


def analysis(cid, content, quality, reasoning=""):
    return CommentAnalysis(cid, ContentVector.from_list(content), QualityVector.from_list(quality), reasoning)


def random_analyses(rng: random.Random, n: int):
    return [
        analysis(
            f"c{i}",
            [rng.randint(0, 1) for _ in range(4)],
            [rng.randint(1, 5) for _ in range(5)],
        )
        for i in range(n)
    ]


def random_instance(rng: random.Random, max_comments=200):
    return build_constraints(random_analyses(rng, rng.randint(1, max_comments)))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            if "test_acceptance.py" not in rep.nodeid:
                continue
            lines.append((rep.nodeid.split("::")[-1], "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture
def fixture_posts_path():
    return FIXTURES / "posts_20.jsonl"


@pytest.fixture
def annotations_path():
    return FIXTURES / "annotations_50.csv"

"""Post/comment ingestion, label parsing and controversy scoring."""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .labels import LABELS, VerdictLabel

logger = logging.getLogger(__name__)

DEFAULT_MIN_COMMENTS = 50
DEFAULT_THRESHOLD = 0.9

# Acronyms only; spelled-out phrases and community variants (INFO, NTJ...) are not labels.
_LABEL_RE = re.compile(r"\b(NTA|YTA|ESH|NAH)\b", re.IGNORECASE)
_UNSET = object()


class CorpusError(Exception):
    pass


class NoLabeledComments(CorpusError):
    def __init__(self, post_id: str):
        super().__init__(f"post {post_id!r} has no labeled top-level comments")
        self.post_id = post_id


class MalformedRecord(CorpusError):
    def __init__(self, line_number: int, reason: str = ""):
        super().__init__(f"line {line_number}: {reason}" if reason else f"line {line_number}")
        self.line_number = line_number
        self.reason = reason


def parse_label(body: str) -> Optional[VerdictLabel]:
    """Return the first verdict acronym in ``body``, or ``None``.

    Matching is case-insensitive and word-boundary delimited, so ``"nta"``
    counts but ``"antagonist"`` does not.
    """
    m = _LABEL_RE.search(body or "")
    return VerdictLabel(m.group(1).upper()) if m else None


@dataclass(frozen=True)
class Comment:
    id: str
    body: str
    score: int
    created_at: int = 0
    is_top_level: bool = True
    parsed_label: Optional[VerdictLabel] = field(default=_UNSET, compare=True)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.id:
            raise ValueError("comment id must be non-empty")
        if self.parsed_label is _UNSET:
            object.__setattr__(self, "parsed_label", parse_label(self.body))


@dataclass(frozen=True)
class Post:
    id: str
    title: str = ""
    body: str = ""
    comments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "comments", tuple(self.comments))
        ids = [c.id for c in self.comments]
        if len(ids) != len(set(ids)):
            dupes = sorted(k for k, v in Counter(ids).items() if v > 1)
            raise ValueError(f"post {self.id!r}: duplicate comment ids {dupes}")

    @property
    def top_level_comments(self) -> list:
        return [c for c in self.comments if c.is_top_level]


@dataclass(frozen=True)
class ControversyScore:
    entropy: float
    fraction_polar: float
    score: float
    labeled_count: int
    label_histogram: dict

    def as_row(self) -> dict:
        return {
            "entropy": self.entropy,
            "fraction_polar": self.fraction_polar,
            "score": self.score,
            "labeled_count": self.labeled_count,
        }


def label_histogram(post: Post) -> dict:
    counts = Counter(c.parsed_label for c in post.top_level_comments if c.parsed_label is not None)
    return {label: counts.get(label, 0) for label in LABELS}


def entropy_from_histogram(histogram: dict) -> ControversyScore:
    """Label entropy (bits) and its polar-weighted score for a label histogram."""
    counts = {VerdictLabel(k): int(v) for k, v in histogram.items()}
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("histogram is empty")
    h = 0.0
    for n in counts.values():
        if n:
            p = n / total
            h -= p * math.log2(p)
    # -0.0 can appear for a degenerate histogram
    h = abs(h)
    polar = (counts.get(VerdictLabel.NTA, 0) + counts.get(VerdictLabel.YTA, 0)) / total
    full = {label: counts.get(label, 0) for label in LABELS}
    return ControversyScore(h, polar, h * polar, total, full)


def controversy_score(post: Post) -> ControversyScore:
    hist = label_histogram(post)
    if not any(hist.values()):
        raise NoLabeledComments(post.id)
    return entropy_from_histogram(hist)


def majority_label(post: Post) -> Optional[VerdictLabel]:
    """Label of the highest-scoring labeled top-level comment.

    Equal scores fall back to the earliest ``created_at`` and then the
    smallest id, so the result never depends on list order.
    """
    labeled = [c for c in post.top_level_comments if c.parsed_label is not None]
    if not labeled:
        return None
    best = min(labeled, key=lambda c: (-c.score, c.created_at, c.id))
    return best.parsed_label


def select_controversial(
    corpus: Iterable[Post],
    min_comments: int = DEFAULT_MIN_COMMENTS,
    threshold: float = DEFAULT_THRESHOLD,
) -> list:
    """Keep posts with enough top-level comments and a score strictly above ``threshold``."""
    if min_comments < 0:
        raise ValueError("min_comments must be >= 0")
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    return [post for post, _ in iter_selected(corpus, min_comments, threshold)]


def iter_selected(corpus, min_comments=DEFAULT_MIN_COMMENTS, threshold=DEFAULT_THRESHOLD):
    """Yield ``(post, ControversyScore)`` for every post passing both gates."""
    for post in corpus:
        if len(post.top_level_comments) < min_comments:
            continue
        try:
            cs = controversy_score(post)
        except NoLabeledComments as exc:
            logger.warning("skipping post: %s", exc)
            continue
        if cs.score > threshold:
            yield post, cs


def _require(record, key, kind, line_number, default=_UNSET):
    if key not in record:
        if default is not _UNSET:
            return default
        raise MalformedRecord(line_number, f"missing field {key!r}")
    value = record[key]
    # bool is an int subclass; never accept it where an int is expected
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise MalformedRecord(line_number, f"field {key!r} has type {type(value).__name__}")
    return value


def post_from_record(record: dict, line_number: int = 0) -> Post:
    if not isinstance(record, dict):
        raise MalformedRecord(line_number, "record is not an object")
    post_id = _require(record, "id", str, line_number)
    if not post_id:
        raise MalformedRecord(line_number, "empty post id")
    raw_comments = _require(record, "comments", list, line_number)
    comments = []
    for raw in raw_comments:
        if not isinstance(raw, dict):
            raise MalformedRecord(line_number, "comment is not an object")
        cid = _require(raw, "id", str, line_number)
        if not cid:
            raise MalformedRecord(line_number, "empty comment id")
        comments.append(
            Comment(
                id=cid,
                body=_require(raw, "body", str, line_number),
                score=_require(raw, "score", int, line_number),
                created_at=_require(raw, "created_utc", int, line_number),
                is_top_level=_require(raw, "is_top_level", bool, line_number, True),
            )
        )
    try:
        return Post(
            id=post_id,
            title=_require(record, "title", str, line_number, ""),
            body=_require(record, "body", str, line_number, ""),
            comments=comments,
        )
    except ValueError as exc:
        raise MalformedRecord(line_number, str(exc)) from None


def post_to_record(post: Post) -> dict:
    return {
        "id": post.id,
        "title": post.title,
        "body": post.body,
        "comments": [
            {
                "id": c.id,
                "body": c.body,
                "score": c.score,
                "created_utc": c.created_at,
                "is_top_level": c.is_top_level,
            }
            for c in post.comments
        ],
    }


def ingest(path, errors: Optional[list] = None) -> Iterator[Post]:
    """Stream posts from a JSONL file in file order.

    Malformed lines are skipped and logged; when ``errors`` is a list the
    corresponding :class:`MalformedRecord` (1-based line number) is appended
    to it. An unreadable file raises ``OSError`` on first iteration.
    """
    with open(Path(path), encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_number, f"invalid JSON: {exc.msg}") from None
                post = post_from_record(record, line_number)
            except MalformedRecord as exc:
                logger.warning("malformed record: %s", exc)
                if errors is not None:
                    errors.append(exc)
                continue
            yield post


def write_posts(posts: Iterable[Post], path) -> int:
    n = 0
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        for post in posts:
            fh.write(json.dumps(post_to_record(post), ensure_ascii=False) + "\n")
            n += 1
    return n

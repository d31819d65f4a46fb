"""Per-comment vectors and strict validation of extractor responses."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

CONTENT_FIELDS = ("harm", "intent", "empathy", "apology")
QUALITY_FIELDS = ("justification", "ethic", "deliberation", "fairness", "nonbias")
QUALITY_MIN, QUALITY_MAX = 1, 5

_ITEM_KEYS = ("comment_id", "comment_content_vector", "comment_quality_vector", "reasoning")


class ExtractionError(Exception):
    pass


class ParseError(ExtractionError):
    """Response body is not exactly one JSON object."""

    def __init__(self, offset: int, message: str = ""):
        super().__init__(f"malformed JSON at offset {offset}" + (f": {message}" if message else ""))
        self.offset = offset


class SchemaViolation(ExtractionError):
    def __init__(self, comment_id: Optional[str], field: str, detail: str = ""):
        where = f"comment {comment_id!r}" if comment_id is not None else "response"
        super().__init__(f"{where}: invalid {field}" + (f" ({detail})" if detail else ""))
        self.comment_id = comment_id
        self.field = field


class MissingComment(ExtractionError):
    """The response omitted an expected comment id or named an unknown one."""

    def __init__(self, comment_id: str, unexpected: bool = False):
        kind = "unexpected" if unexpected else "missing"
        super().__init__(f"{kind} comment id {comment_id!r}")
        self.comment_id = comment_id
        self.unexpected = unexpected


@dataclass(frozen=True)
class ContentVector:
    harm: bool
    intent: bool
    empathy: bool
    apology: bool

    @classmethod
    def from_list(cls, values) -> "ContentVector":
        return cls(*(bool(v) for v in values))

    def to_list(self) -> list:
        return [int(self.harm), int(self.intent), int(self.empathy), int(self.apology)]


@dataclass(frozen=True)
class QualityVector:
    justification: int
    ethic: int
    deliberation: int
    fairness: int
    nonbias: int

    def __post_init__(self):
        for name in QUALITY_FIELDS:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or not QUALITY_MIN <= v <= QUALITY_MAX:
                raise ValueError(f"{name} must be an integer in 1..5, got {v!r}")

    @classmethod
    def from_list(cls, values) -> "QualityVector":
        return cls(*(int(v) for v in values))

    def to_list(self) -> list:
        return [self.justification, self.ethic, self.deliberation, self.fairness, self.nonbias]


@dataclass(frozen=True)
class CommentAnalysis:
    comment_id: str
    content: ContentVector
    quality: QualityVector
    reasoning: str = ""

    def to_dict(self) -> dict:
        return {
            "comment_id": self.comment_id,
            "comment_content_vector": self.content.to_list(),
            "comment_quality_vector": self.quality.to_list(),
            "reasoning": self.reasoning,
        }


def dump_response(analyses: Iterable[CommentAnalysis]) -> str:
    """Canonical serialization; ``validate_response`` inverts it exactly."""
    return json.dumps({"analyses": [a.to_dict() for a in analyses]}, ensure_ascii=False)


def _reject_constant(name):
    raise ValueError(f"non-standard JSON constant {name}")


def _no_duplicate_keys(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise ValueError(f"duplicate key {key!r}")
        obj[key] = value
    return obj


def _loads_strict(raw: str):
    try:
        return json.loads(raw, parse_constant=_reject_constant, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.pos, exc.msg) from None
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def _int_vector(values, cid, name, lo, hi, length):
    if not isinstance(values, list):
        raise SchemaViolation(cid, name, "not a list")
    if len(values) != length:
        raise SchemaViolation(cid, name, f"expected {length} entries, got {len(values)}")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int):
            raise SchemaViolation(cid, f"{name}[{i}]", f"non-integer {v!r}")
        if not lo <= v <= hi:
            raise SchemaViolation(cid, f"{name}[{i}]", f"{v} outside {lo}..{hi}")
    return values


def parse_analysis(item) -> CommentAnalysis:
    if not isinstance(item, dict):
        raise SchemaViolation(None, "analyses[]", "entry is not an object")
    cid = item.get("comment_id")
    if not isinstance(cid, str) or not cid:
        raise SchemaViolation(None, "comment_id", "missing or not a non-empty string")
    for key in item:
        if key not in _ITEM_KEYS:
            raise SchemaViolation(cid, key, "unknown field")
    for key in _ITEM_KEYS:
        if key not in item:
            raise SchemaViolation(cid, key, "missing")
    content = _int_vector(item["comment_content_vector"], cid, "content", 0, 1, 4)
    quality = _int_vector(item["comment_quality_vector"], cid, "quality", QUALITY_MIN, QUALITY_MAX, 5)
    if not isinstance(item["reasoning"], str):
        raise SchemaViolation(cid, "reasoning", "not a string")
    return CommentAnalysis(
        comment_id=cid,
        content=ContentVector.from_list(content),
        quality=QualityVector.from_list(quality),
        reasoning=item["reasoning"],
    )


def validate_response(raw: str, expected_ids) -> list:
    """Parse and check a raw extractor response.

    The body must be a single JSON object ``{"analyses": [...]}`` with nothing
    before or after it (surrounding whitespace aside). The returned analyses
    follow response order. Any id mismatch rejects the whole response.
    """
    expected = set(expected_ids)
    doc = _loads_strict(raw)
    if not isinstance(doc, dict):
        raise SchemaViolation(None, "analyses", "top level is not an object")
    if set(doc) != {"analyses"}:
        extra = sorted(set(doc) - {"analyses"})
        raise SchemaViolation(None, extra[0] if extra else "analyses", "top level must hold only 'analyses'")
    items = doc["analyses"]
    if not isinstance(items, list):
        raise SchemaViolation(None, "analyses", "not a list")

    analyses = []
    seen = set()
    for item in items:
        a = parse_analysis(item)
        if a.comment_id in seen:
            raise SchemaViolation(a.comment_id, "comment_id", "duplicate")
        if a.comment_id not in expected:
            raise MissingComment(a.comment_id, unexpected=True)
        seen.add(a.comment_id)
        analyses.append(a)
    missing = sorted(expected - seen)
    if missing:
        raise MissingComment(missing[0])
    return analyses

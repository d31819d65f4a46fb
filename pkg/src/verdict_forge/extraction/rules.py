"""Deterministic keyword extractor used offline and in tests.

This is a reproducibility harness, not a model: it maps lexical cues from a
versioned rule table (``data/rules_v<N>.json``) to predicate bits and quality
scores.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass
from importlib import resources

from ..corpus import parse_label
from .schema import (
    CONTENT_FIELDS,
    QUALITY_FIELDS,
    QUALITY_MAX,
    QUALITY_MIN,
    CommentAnalysis,
    ContentVector,
    QualityVector,
)

DEFAULT_RULES_VERSION = "1"
_WORD_RE = re.compile(r"\w+")


def _compile(patterns):
    return tuple(re.compile(p, re.IGNORECASE) for p in patterns)


@dataclass(frozen=True)
class _Dimension:
    base: int
    up: tuple
    down: tuple
    force_min: tuple
    min_words_bonus: int

    def score(self, text: str, n_words: int) -> int:
        if any(p.search(text) for p in self.force_min):
            return QUALITY_MIN
        value = self.base
        value += sum(1 for p in self.up if p.search(text))
        value -= sum(1 for p in self.down if p.search(text))
        if self.min_words_bonus and n_words >= self.min_words_bonus:
            value += 1
        return max(QUALITY_MIN, min(QUALITY_MAX, value))


class RuleTable:
    def __init__(self, data: dict):
        self.version = str(data["version"])
        self.content = {
            name: (_compile(data["content"][name]["cues"]), _compile(data["content"][name]["negations"]))
            for name in CONTENT_FIELDS
        }
        self.label_implies = {k.upper(): tuple(v) for k, v in data.get("label_implies", {}).items()}
        self.quality = {}
        for name in QUALITY_FIELDS:
            d = data["quality"][name]
            self.quality[name] = _Dimension(
                base=int(d["base"]),
                up=_compile(d.get("up", [])),
                down=_compile(d.get("down", [])),
                force_min=_compile(d.get("force_min", [])),
                min_words_bonus=int(d.get("min_words_bonus", 0)),
            )

    def extract(self, comment_id: str, body: str) -> CommentAnalysis:
        text = body or ""
        label = parse_label(text)
        implied = set(self.label_implies.get(label.value, ())) if label else set()
        bits = {}
        for name, (cues, negations) in self.content.items():
            hit = name in implied or any(p.search(text) for p in cues)
            bits[name] = hit and not any(p.search(text) for p in negations)
        n_words = len(_WORD_RE.findall(text))
        quality = QualityVector(*(self.quality[name].score(text, n_words) for name in QUALITY_FIELDS))
        matched = [name for name in CONTENT_FIELDS if bits[name]]
        reasoning = f"Rule table v{self.version} matched: {', '.join(matched) if matched else 'no predicates'}."
        return CommentAnalysis(comment_id, ContentVector(**bits), quality, reasoning)


@functools.lru_cache(maxsize=None)
def load_rule_table(version: str = DEFAULT_RULES_VERSION) -> RuleTable:
    raw = resources.files(__package__).joinpath("data").joinpath(f"rules_v{version}.json").read_text("utf-8")
    return RuleTable(json.loads(raw))


def rule_based_extract(comment, table: RuleTable | None = None) -> CommentAnalysis:
    table = table or load_rule_table()
    return table.extract(comment.id, comment.body)

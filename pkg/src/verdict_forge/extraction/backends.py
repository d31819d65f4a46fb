"""Extractor backends and the ``analyses.jsonl`` cache."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

import httpx

from .prompt import build_messages
from .rules import DEFAULT_RULES_VERSION, load_rule_table
from .schema import (
    ExtractionError,
    MissingComment,
    ParseError,
    SchemaViolation,
    parse_analysis,
    validate_response,
)

logger = logging.getLogger(__name__)

API_KEY_ENV = "VERDICT_FORGE_API_KEY"
BACKENDS = ("rule_based", "remote")
# Rough chars-per-token ratio for English prose; only used to refuse oversized posts up front.
_CHARS_PER_TOKEN = 4


class ExtractionFailed(ExtractionError):
    def __init__(self, post_id: str, cause: BaseException):
        super().__init__(f"extraction failed for post {post_id!r}: {cause}")
        self.post_id = post_id
        self.cause = cause


class TokenLimitExceeded(ExtractionError):
    """A post does not fit in one request; posts are never split."""

    def __init__(self, post_id: str, detail: str):
        super().__init__(f"post {post_id!r} exceeds the token budget: {detail}")
        self.post_id = post_id


@dataclass(frozen=True)
class ExtractorConfig:
    backend: str = "rule_based"
    endpoint_url: Optional[str] = None
    model_name: Optional[str] = None
    temperature: float = 0.0
    max_output_tokens: int = 1000
    retry_limit: int = 3
    timeout_seconds: int = 60
    backoff_seconds: float = 1.0
    max_in_flight: int = 4
    max_prompt_tokens: int = 100_000
    rules_version: str = DEFAULT_RULES_VERSION

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.retry_limit < 1:
            raise ValueError("retry_limit must be >= 1")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.backend == "remote" and not (self.endpoint_url and self.model_name):
            raise ValueError("remote backend requires endpoint_url and model_name")


class RuleBasedBackend:
    def __init__(self, config: ExtractorConfig = ExtractorConfig()):
        self.table = load_rule_table(config.rules_version)

    def extract(self, post) -> list:
        return [self.table.extract(c.id, c.body) for c in post.top_level_comments]


class RemoteBackend:
    """Chat-completion client: one request per post, strict validation, retries.

    A response that fails validation is re-prompted once with the validator's
    message before the attempt counts as failed. Failed attempts back off
    exponentially from ``config.backoff_seconds``.
    """

    def __init__(
        self,
        config: ExtractorConfig,
        client: Optional[httpx.Client] = None,
        api_key: Optional[str] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if config.backend != "remote":
            raise ValueError("RemoteBackend needs a remote config")
        self.config = config
        self.api_key = api_key or os.environ.get(API_KEY_ENV)
        if not self.api_key:
            raise ValueError(f"remote backend requires credentials in ${API_KEY_ENV}")
        self.client = client or httpx.Client(timeout=config.timeout_seconds)
        self.sleep = sleep

    def _complete(self, post_id: str, messages: list) -> str:
        payload = {
            "model": self.config.model_name,
            "messages": messages,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
        }
        resp = self.client.post(
            self.config.endpoint_url,
            json=payload,
            headers={"Authorization": f"Bearer {self.api_key}"},
        )
        resp.raise_for_status()
        try:
            choice = resp.json()["choices"][0]
            content = choice["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ExtractionError(f"unexpected completion envelope: {exc!r}") from None
        if choice.get("finish_reason") == "length":
            raise TokenLimitExceeded(post_id, f"output truncated at {self.config.max_output_tokens} tokens")
        if not isinstance(content, str):
            raise ExtractionError("completion content is not text")
        return content

    def _attempt(self, post_id: str, messages: list, expected: set) -> list:
        raw = self._complete(post_id, messages)
        try:
            return validate_response(raw, expected)
        except (ParseError, SchemaViolation, MissingComment) as exc:
            logger.info("post %s: re-prompting after invalid response: %s", post_id, exc)
            retry = messages + [
                {"role": "assistant", "content": raw},
                {
                    "role": "user",
                    "content": f"Your previous response was rejected by the validator: {exc}. "
                    "Return only the corrected JSON object.",
                },
            ]
            return validate_response(self._complete(post_id, retry), expected)

    def extract(self, post) -> list:
        messages = build_messages(post)
        n_chars = sum(len(m["content"]) for m in messages)
        if n_chars / _CHARS_PER_TOKEN > self.config.max_prompt_tokens:
            raise TokenLimitExceeded(post.id, f"~{n_chars // _CHARS_PER_TOKEN} prompt tokens")
        expected = {c.id for c in post.top_level_comments}
        last_error: BaseException = ExtractionError("no attempts made")
        for attempt in range(self.config.retry_limit):
            if attempt:
                self.sleep(self.config.backoff_seconds * 2 ** (attempt - 1))
            try:
                return self._attempt(post.id, messages, expected)
            except TokenLimitExceeded:
                raise
            except (ExtractionError, httpx.HTTPError) as exc:
                logger.warning("post %s: attempt %d failed: %s", post.id, attempt + 1, exc)
                last_error = exc
        raise ExtractionFailed(post.id, last_error)


def make_backend(config: ExtractorConfig, **kwargs):
    if config.backend == "rule_based":
        return RuleBasedBackend(config)
    return RemoteBackend(config, **kwargs)


def extract_post(post, config: ExtractorConfig = ExtractorConfig(), backend=None) -> list:
    """One :class:`CommentAnalysis` per top-level comment, in comment order."""
    if not post.top_level_comments:
        raise ValueError(f"post {post.id!r} has no top-level comments")
    backend = backend or make_backend(config)
    analyses = backend.extract(post)
    by_id = {a.comment_id: a for a in analyses}
    order = [c.id for c in post.top_level_comments]
    if set(by_id) != set(order) or len(analyses) != len(order):
        missing = sorted(set(order) - set(by_id)) or sorted(set(by_id) - set(order))
        raise MissingComment(missing[0] if missing else post.id)
    return [by_id[cid] for cid in order]


def extract_corpus(posts: Iterable, config: ExtractorConfig = ExtractorConfig(), backend=None) -> list:
    """Extract every post; returns ``(post_id, analyses or exception)`` in input order."""
    posts = list(posts)
    backend = backend or make_backend(config)

    def run(post):
        try:
            return post.id, extract_post(post, config, backend)
        except (ExtractionError, ValueError) as exc:
            return post.id, exc

    workers = config.max_in_flight if config.backend == "remote" else 1
    if workers == 1:
        return [run(p) for p in posts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, posts))


def write_analyses(path, results: Iterable) -> int:
    """Write ``(post_id, analyses)`` pairs to ``analyses.jsonl``; exceptions are skipped."""
    n = 0
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        for post_id, analyses in results:
            if isinstance(analyses, BaseException):
                continue
            line = {"post_id": post_id, "analyses": [a.to_dict() for a in analyses]}
            fh.write(json.dumps(line, ensure_ascii=False) + "\n")
            n += 1
    return n


def read_analyses(path) -> dict:
    """Load an ``analyses.jsonl`` cache into ``{post_id: [CommentAnalysis]}``."""
    cache = {}
    with open(Path(path), encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                post_id = record["post_id"]
                items = record["analyses"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(0, f"line {line_number}: {exc}") from None
            cache[post_id] = [parse_analysis(item) for item in items]
    return cache

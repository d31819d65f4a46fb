"""Per-comment content/quality extraction behind a pluggable backend."""

from .backends import (
    API_KEY_ENV,
    ExtractionFailed,
    ExtractorConfig,
    RemoteBackend,
    RuleBasedBackend,
    TokenLimitExceeded,
    extract_corpus,
    extract_post,
    make_backend,
    read_analyses,
    write_analyses,
)
from .prompt import build_messages, build_prompt
from .rules import RuleTable, load_rule_table, rule_based_extract
from .schema import (
    CommentAnalysis,
    ContentVector,
    ExtractionError,
    MissingComment,
    ParseError,
    QualityVector,
    SchemaViolation,
    dump_response,
    validate_response,
)

__all__ = [
    "API_KEY_ENV",
    "CommentAnalysis",
    "ContentVector",
    "ExtractionError",
    "ExtractionFailed",
    "ExtractorConfig",
    "MissingComment",
    "ParseError",
    "QualityVector",
    "RemoteBackend",
    "RuleBasedBackend",
    "RuleTable",
    "SchemaViolation",
    "TokenLimitExceeded",
    "build_messages",
    "build_prompt",
    "dump_response",
    "extract_corpus",
    "extract_post",
    "load_rule_table",
    "make_backend",
    "read_analyses",
    "rule_based_extract",
    "validate_response",
    "write_analyses",
]

"""Reasoning-weighted aggregation of crowd verdicts via weighted MaxSAT."""

from .consensus import (
    ConsensusAssignment,
    EmptyInput,
    Mismatch,
    Predicate,
    SoftConstraint,
    SolverDivergence,
    build_constraints,
    explain,
    solve,
    solve_closed_form,
    solve_oracle,
)
from .corpus import (
    Comment,
    ControversyScore,
    MalformedRecord,
    NoLabeledComments,
    Post,
    controversy_score,
    ingest,
    majority_label,
    parse_label,
    select_controversial,
)
from .estimators import ConsensusAggregator, ControversySelector, RuleBasedVectorizer, SplitStreamWeighter
from .extraction import (
    CommentAnalysis,
    ContentVector,
    ExtractorConfig,
    QualityVector,
    build_prompt,
    extract_post,
    rule_based_extract,
    validate_response,
)
from .labels import Rule, VerdictLabel
from .report import (
    AggregationReport,
    PipelineResult,
    PostOutcome,
    compare_with_annotations,
    emit_report,
    run_pipeline,
    summarize,
)
from .verdict import VerdictResult, classify
from .weighting import StreamWeights, split_stream_weights

__version__ = "0.1.0"

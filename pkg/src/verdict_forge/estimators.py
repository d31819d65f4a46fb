"""scikit-learn compatible wrappers around the aggregation pipeline.

Comments are rows of a ``(n_comments, 9)`` integer matrix laid out as
``[harm, intent, empathy, apology, justif, ethic, delib, fairness, nonbias]``;
posts are identified by a ``groups`` vector, as in grouped CV splitters.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .consensus import PREDICATES, build_constraints, solve
from .corpus import DEFAULT_MIN_COMMENTS, DEFAULT_THRESHOLD, NoLabeledComments, controversy_score
from .extraction import CommentAnalysis, ContentVector, QualityVector, load_rule_table
from .extraction.rules import DEFAULT_RULES_VERSION
from .validation import check_comment_matrix, check_groups, check_quality_array
from .verdict import classify

COMMENT_FEATURES = (
    "harm", "intent", "empathy", "apology",
    "justification", "ethic", "deliberation", "fairness", "nonbias",
)


class SplitStreamWeighter(TransformerMixin, BaseEstimator):
    """Quality scores ``(n, 5)`` to ``[w_logic, w_ethic]`` ``(n, 2)``."""

    def fit(self, X, y=None):
        check_quality_array(X)
        self.n_features_in_ = 5
        return self

    def transform(self, X):
        Q = check_quality_array(X)
        nonbias = Q[:, 4]
        w_logic = (Q[:, 0] + Q[:, 2]) * nonbias
        w_ethic = (Q[:, 1] + Q[:, 3]) * nonbias
        return np.column_stack([w_logic, w_ethic])

    def get_feature_names_out(self, input_features=None):
        return np.array(["w_logic", "w_ethic"], dtype=object)


class RuleBasedVectorizer(TransformerMixin, BaseEstimator):
    """Comment texts to the 9-column comment matrix via the keyword rule table."""

    def __init__(self, rules_version=DEFAULT_RULES_VERSION):
        self.rules_version = rules_version

    def fit(self, X, y=None):
        self.table_ = load_rule_table(self.rules_version)
        return self

    def transform(self, X):
        check_is_fitted(self, "table_")
        rows = []
        for i, text in enumerate(X):
            a = self.table_.extract(str(i), text)
            rows.append(a.content.to_list() + a.quality.to_list())
        return np.asarray(rows, dtype=np.int64).reshape(-1, len(COMMENT_FEATURES))

    def get_feature_names_out(self, input_features=None):
        return np.array(COMMENT_FEATURES, dtype=object)


def _analyses_from_matrix(content, quality, ids):
    return [
        CommentAnalysis(str(cid), ContentVector.from_list(c), QualityVector.from_list(q.tolist()))
        for cid, c, q in zip(ids, content, quality)
    ]


class ConsensusAggregator(BaseEstimator):
    """Weighted MaxSAT consensus and verdict for each group of comments.

    Parameters
    ----------
    solver : {"closed_form", "oracle", "z3"}, default="closed_form"
        Engine used to solve each group's instance.
    cross_check : bool, default=False
        Also solve with the exhaustive oracle and raise on disagreement.

    Attributes
    ----------
    groups_ : ndarray of shape (n_groups,)
        Group ids in order of first appearance.
    assignments_ : ndarray of shape (n_groups, 4), dtype=bool
    margins_ : ndarray of shape (n_groups, 4), dtype=int
    total_costs_ : ndarray of shape (n_groups,)
    labels_ : ndarray of shape (n_groups,), dtype=object
        Verdict labels as strings.
    rules_ : ndarray of shape (n_groups,), dtype=object
    """

    def __init__(self, solver="closed_form", cross_check=False):
        self.solver = solver
        self.cross_check = cross_check

    def _aggregate(self, X, groups):
        content, quality = check_comment_matrix(X)
        groups = check_groups(groups, content.shape[0])
        _, first = np.unique(groups, return_index=True)
        order = groups[np.sort(first)]
        results = []
        for g in order:
            rows = np.flatnonzero(groups == g)
            analyses = _analyses_from_matrix(content[rows], quality[rows], rows)
            assignment = solve(build_constraints(analyses), method=self.solver, cross_check=self.cross_check)
            results.append((assignment, classify(assignment)))
        return order, results

    def fit(self, X, y=None, groups=None):
        order, results = self._aggregate(X, groups)
        self.n_features_in_ = len(COMMENT_FEATURES)
        self.groups_ = order
        self.assignments_ = np.array([a.values for a, _ in results], dtype=bool).reshape(-1, 4)
        self.margins_ = np.array(
            [[a.per_predicate_margin[p] for p in PREDICATES] for a, _ in results], dtype=np.int64
        ).reshape(-1, 4)
        self.total_costs_ = np.array([a.total_cost for a, _ in results], dtype=np.int64)
        self.labels_ = np.array([v.label.value for _, v in results], dtype=object)
        self.rules_ = np.array([v.rule.value for _, v in results], dtype=object)
        return self

    def predict(self, X, groups=None):
        """Verdict label per group; the aggregator keeps no learned state."""
        _, results = self._aggregate(X, groups)
        return np.array([v.label.value for _, v in results], dtype=object)

    def fit_predict(self, X, y=None, groups=None):
        return self.fit(X, groups=groups).labels_

    def transform(self, X, groups=None):
        """Signed per-predicate margins, shape ``(n_groups, 4)``."""
        _, results = self._aggregate(X, groups)
        return np.array(
            [[a.per_predicate_margin[p] for p in PREDICATES] for a, _ in results], dtype=np.int64
        ).reshape(-1, 4)


class ControversySelector(BaseEstimator):
    """Engagement and label-entropy filter over a sequence of posts."""

    def __init__(self, min_comments=DEFAULT_MIN_COMMENTS, threshold=DEFAULT_THRESHOLD):
        self.min_comments = min_comments
        self.threshold = threshold

    def fit(self, X, y=None):
        if self.min_comments < 0 or not np.isfinite(self.threshold):
            raise ValueError("min_comments must be >= 0 and threshold finite")
        scores, support = [], []
        for post in X:
            try:
                cs = controversy_score(post)
            except NoLabeledComments:
                cs = None
            scores.append(cs)
            support.append(
                cs is not None
                and len(post.top_level_comments) >= self.min_comments
                and cs.score > self.threshold
            )
        self.scores_ = scores
        self.support_ = np.array(support, dtype=bool)
        return self

    def get_support(self, indices=False):
        check_is_fitted(self, "support_")
        return np.flatnonzero(self.support_) if indices else self.support_

    def transform(self, X):
        posts = list(X)
        mask = self.fit(posts).support_
        return [p for p, keep in zip(posts, mask) if keep]

    def fit_transform(self, X, y=None):
        return self.transform(X)

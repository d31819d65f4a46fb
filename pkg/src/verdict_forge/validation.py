"""Array validation for the estimator API."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

N_CONTENT = 4
N_QUALITY = 5
N_COMMENT_FEATURES = N_CONTENT + N_QUALITY


def _integral(X, name):
    X = check_array(X, dtype=None, ensure_2d=True)
    if X.dtype == bool:
        return X.astype(np.int64)
    if not np.issubdtype(X.dtype, np.number):
        raise ValueError(f"{name} must be numeric, got dtype {X.dtype}")
    if not np.all(np.isfinite(X)) or not np.all(X == np.round(X)):
        raise ValueError(f"{name} must contain integers only")
    return X.astype(np.int64)


def check_content_array(X) -> np.ndarray:
    """Validate an ``(n_comments, 4)`` array of 0/1 predicate bits."""
    X = _integral(X, "content")
    if X.shape[1] != N_CONTENT:
        raise ValueError(f"content array needs {N_CONTENT} columns, got {X.shape[1]}")
    if not np.isin(X, (0, 1)).all():
        raise ValueError("content entries must be 0 or 1")
    return X


def check_quality_array(X) -> np.ndarray:
    """Validate an ``(n_comments, 5)`` array of 1..5 quality scores."""
    X = _integral(X, "quality")
    if X.shape[1] != N_QUALITY:
        raise ValueError(f"quality array needs {N_QUALITY} columns, got {X.shape[1]}")
    if X.min() < 1 or X.max() > 5:
        raise ValueError("quality entries must lie in 1..5")
    return X


def check_comment_matrix(X) -> tuple:
    """Split an ``(n_comments, 9)`` matrix into validated content and quality blocks."""
    X = _integral(X, "comment matrix")
    if X.shape[1] != N_COMMENT_FEATURES:
        raise ValueError(f"comment matrix needs {N_COMMENT_FEATURES} columns, got {X.shape[1]}")
    return check_content_array(X[:, :N_CONTENT]), check_quality_array(X[:, N_CONTENT:])


def check_groups(groups, n_samples: int) -> np.ndarray:
    if groups is None:
        return np.zeros(n_samples, dtype=np.int64)
    groups = np.asarray(groups)
    if groups.ndim != 1 or groups.shape[0] != n_samples:
        raise ValueError(f"groups must be 1-d with {n_samples} entries")
    return groups

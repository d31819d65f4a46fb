"""Split-stream credibility weights."""

from __future__ import annotations

from typing import NamedTuple


class StreamWeights(NamedTuple):
    w_logic: int
    w_ethic: int


def split_stream_weights(quality) -> StreamWeights:
    """Logic and ethic weights for one comment.

    ``w_logic = (justification + deliberation) * nonbias`` weighs claims about
    harm and intent; ``w_ethic = (ethic + fairness) * nonbias`` weighs claims
    about empathy and apology. Both lie in 2..50 for valid vectors.
    """
    return StreamWeights(
        (quality.justification + quality.deliberation) * quality.nonbias,
        (quality.ethic + quality.fairness) * quality.nonbias,
    )

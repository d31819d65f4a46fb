"""Verdict labels and the decision rules that produce them."""

from __future__ import annotations

import enum
import functools


@functools.total_ordering
class VerdictLabel(str, enum.Enum):
    """The four community verdicts, ordered NTA < YTA < ESH < NAH.

    The order is used for tie-breaking and for the axes of every report table.
    """

    NTA = "NTA"
    YTA = "YTA"
    ESH = "ESH"
    NAH = "NAH"

    @property
    def rank(self) -> int:
        return _LABEL_ORDER.index(self)

    def __lt__(self, other):
        if not isinstance(other, VerdictLabel):
            return NotImplemented
        return self.rank < other.rank

    def __str__(self) -> str:
        return self.value


_LABEL_ORDER = tuple(VerdictLabel)
LABELS = _LABEL_ORDER


class Rule(str, enum.Enum):
    VINDICATION = "Vindication"
    MALICE = "Malice"
    TRAGEDY = "Tragedy"
    NEGLIGENCE = "Negligence"

    def __str__(self) -> str:
        return self.value


RULES = tuple(Rule)

#: Fixed pairing between a decision rule and the label it emits.
RULE_LABEL = {
    Rule.VINDICATION: VerdictLabel.NTA,
    Rule.MALICE: VerdictLabel.YTA,
    Rule.TRAGEDY: VerdictLabel.NAH,
    Rule.NEGLIGENCE: VerdictLabel.ESH,
}


def to_label(value) -> VerdictLabel:
    """Coerce a string such as ``"nta"`` to a :class:`VerdictLabel`."""
    if isinstance(value, VerdictLabel):
        return value
    try:
        return VerdictLabel(str(value).strip().upper())
    except ValueError:
        raise ValueError(f"unknown verdict label: {value!r}") from None

"""Hierarchical verdict assignment from the consensus predicates."""

from __future__ import annotations

from dataclasses import dataclass

from .labels import RULE_LABEL, Rule, VerdictLabel

_F, _T = False, True

#: Decision tree expanded to all 16 (harm, intent, empathy, apology) rows.
TRUTH_TABLE = {
    (_F, _F, _F, _F): Rule.VINDICATION,
    (_F, _F, _F, _T): Rule.VINDICATION,
    (_F, _F, _T, _F): Rule.VINDICATION,
    (_F, _F, _T, _T): Rule.VINDICATION,
    (_F, _T, _F, _F): Rule.VINDICATION,
    (_F, _T, _F, _T): Rule.VINDICATION,
    (_F, _T, _T, _F): Rule.VINDICATION,
    (_F, _T, _T, _T): Rule.VINDICATION,
    (_T, _F, _F, _F): Rule.NEGLIGENCE,
    (_T, _F, _F, _T): Rule.TRAGEDY,
    (_T, _F, _T, _F): Rule.TRAGEDY,
    (_T, _F, _T, _T): Rule.TRAGEDY,
    (_T, _T, _F, _F): Rule.MALICE,
    (_T, _T, _F, _T): Rule.MALICE,
    (_T, _T, _T, _F): Rule.MALICE,
    (_T, _T, _T, _T): Rule.MALICE,
}


@dataclass(frozen=True)
class VerdictResult:
    label: VerdictLabel
    rule: Rule
    assignment: object


def classify(assignment) -> VerdictResult:
    """Map a consensus assignment to NTA/YTA/NAH/ESH.

    No harm vindicates; intentional harm is malice; accidental harm is a
    tragedy when empathy or apology repairs it and negligence otherwise.
    """
    key = tuple(bool(v) for v in (assignment.harm, assignment.intent, assignment.empathy, assignment.apology))
    rule = TRUTH_TABLE[key]
    return VerdictResult(RULE_LABEL[rule], rule, assignment)

"""Weighted MaxSAT consensus over the four global predicates.

Every comment contributes one soft unit clause per predicate, and there are
no hard clauses. Unit clauses over independent variables make the optimum
decompose per predicate: a predicate is True exactly when the weight asserting
True beats the weight asserting False. :func:`solve_closed_form` uses that
reduction; :func:`solve_oracle` enumerates all 16 assignments and exists to
check it. With only soft clauses every instance is satisfiable, so there is no
UNSAT outcome to report.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .weighting import split_stream_weights


class Predicate(str, enum.Enum):
    HARM = "harm"
    INTENT = "intent"
    EMPATHY = "empathy"
    APOLOGY = "apology"

    def __str__(self) -> str:
        return self.value


PREDICATES = tuple(Predicate)
LOGIC_PREDICATES = (Predicate.HARM, Predicate.INTENT)
ETHIC_PREDICATES = (Predicate.EMPATHY, Predicate.APOLOGY)


class ConsensusError(Exception):
    pass


class EmptyInput(ConsensusError):
    pass


class Mismatch(ConsensusError):
    """An assignment does not belong to the constraint set it is explained against."""


class SolverDivergence(ConsensusError):
    pass


class SoftConstraint(NamedTuple):
    predicate: Predicate
    polarity: bool
    weight: int
    source_comment_id: str

    def to_dict(self) -> dict:
        return {
            "predicate": Predicate(self.predicate).value,
            "polarity": self.polarity,
            "weight": self.weight,
            "source_comment_id": self.source_comment_id,
        }


@dataclass(frozen=True)
class ConsensusAssignment:
    harm: bool
    intent: bool
    empathy: bool
    apology: bool
    total_cost: int
    per_predicate_margin: dict = field(default_factory=dict)

    def value(self, predicate: Predicate) -> bool:
        return getattr(self, Predicate(predicate).value)

    @property
    def values(self) -> tuple:
        return (self.harm, self.intent, self.empathy, self.apology)

    def as_dict(self) -> dict:
        return {p.value: self.value(p) for p in PREDICATES}


def build_constraints(analyses: Sequence) -> list:
    """Four soft constraints per analysis; harm/intent carry the logic weight."""
    if not analyses:
        raise EmptyInput("no comment analyses to aggregate")
    constraints = []
    for a in analyses:
        w = split_stream_weights(a.quality)
        cid = a.comment_id
        constraints += [
            SoftConstraint(Predicate.HARM, bool(a.content.harm), w.w_logic, cid),
            SoftConstraint(Predicate.INTENT, bool(a.content.intent), w.w_logic, cid),
            SoftConstraint(Predicate.EMPATHY, bool(a.content.empathy), w.w_ethic, cid),
            SoftConstraint(Predicate.APOLOGY, bool(a.content.apology), w.w_ethic, cid),
        ]
    return constraints


def _check_nonempty(constraints):
    constraints = list(constraints)
    if not constraints:
        raise EmptyInput("no constraints to solve")
    for c in constraints:
        if c.weight < 0:
            raise ValueError(f"negative weight on {c}")
    return constraints


def tally(constraints: Iterable[SoftConstraint]) -> dict:
    """``{predicate: (weight asserting True, weight asserting False)}``."""
    totals = {p: [0, 0] for p in PREDICATES}
    for c in constraints:
        totals[c.predicate][0 if c.polarity else 1] += c.weight
    return {p: tuple(v) for p, v in totals.items()}


def solve_closed_form(constraints: Iterable[SoftConstraint]) -> ConsensusAssignment:
    constraints = _check_nonempty(constraints)
    sums = tally(constraints)
    margins = {p: t - f for p, (t, f) in sums.items()}
    # margin 0 resolves to False: no claim established
    values = {p.value: margins[p] > 0 for p in PREDICATES}
    cost = sum(min(t, f) for t, f in sums.values())
    return ConsensusAssignment(**values, total_cost=cost, per_predicate_margin=margins)


def assignment_cost(values: Sequence[bool], constraints: Iterable[SoftConstraint]) -> int:
    """Total weight of the constraints violated by ``values`` (ordered as PREDICATES)."""
    assigned = dict(zip(PREDICATES, values))
    return sum(c.weight for c in constraints if assigned[c.predicate] != c.polarity)


def solve_oracle(constraints: Iterable[SoftConstraint]) -> ConsensusAssignment:
    """Exhaustive search over all 16 assignments.

    Candidates are visited in lexicographic order over (harm, intent, empathy,
    apology) with False before True, and only a strictly cheaper candidate
    replaces the incumbent, so ties go to the False-preferring assignment.
    """
    constraints = _check_nonempty(constraints)
    # Pool weights by (predicate, asserted value); a candidate's cost is then
    # the sum of the pools it contradicts.
    pools = Counter()
    for c in constraints:
        pools[c.predicate, c.polarity] += c.weight
    best, best_cost = None, None
    for values in itertools.product((False, True), repeat=len(PREDICATES)):
        cost = sum(pools[p, not v] for p, v in zip(PREDICATES, values))
        if best_cost is None or cost < best_cost:
            best, best_cost = values, cost
    margins = {p: pools[p, True] - pools[p, False] for p in PREDICATES}
    return ConsensusAssignment(*best, total_cost=best_cost, per_predicate_margin=margins)


def solve_z3(constraints: Iterable[SoftConstraint]) -> ConsensusAssignment:
    """Cross-check through z3's Optimize (MaxSAT) engine; requires ``z3-solver``.

    z3 is free to pick either value on a zero-margin predicate, so only the
    cost and the strictly decided predicates are comparable with the other
    solvers.
    """
    import z3

    constraints = _check_nonempty(constraints)
    variables = {p: z3.Bool(p.value) for p in PREDICATES}
    opt = z3.Optimize()
    for c in constraints:
        if c.weight == 0:
            continue
        v = variables[c.predicate]
        opt.add_soft(v if c.polarity else z3.Not(v), c.weight)
    if opt.check() != z3.sat:  # unreachable: soft clauses only
        raise ConsensusError("z3 reported an unsatisfiable soft-only instance")
    model = opt.model()
    values = tuple(z3.is_true(model.eval(variables[p], model_completion=True)) for p in PREDICATES)
    sums = tally(constraints)
    margins = {p: t - f for p, (t, f) in sums.items()}
    return ConsensusAssignment(*values, total_cost=assignment_cost(values, constraints), per_predicate_margin=margins)


SOLVERS = {"closed_form": solve_closed_form, "oracle": solve_oracle, "z3": solve_z3}


def solve(constraints, method: str = "closed_form", cross_check: bool = False) -> ConsensusAssignment:
    """Solve with ``method``; with ``cross_check`` also run the oracle and demand agreement."""
    constraints = list(constraints)
    result = SOLVERS[method](constraints)
    if cross_check:
        ref = solve_oracle(constraints)
        if method == "z3":
            agree = ref.total_cost == result.total_cost and all(
                result.value(p) == ref.value(p) for p in PREDICATES if ref.per_predicate_margin[p] != 0
            )
        else:
            agree = ref == result
        if not agree:
            raise SolverDivergence(f"{method} solver returned {result}, oracle returned {ref}")
    return result


@dataclass(frozen=True)
class PredicateExplanation:
    predicate: Predicate
    value: bool
    margin: int
    weight_true: int
    weight_false: int
    cost: int
    supporting: tuple
    opposing: tuple


@dataclass(frozen=True)
class ExplanationTrace:
    total_cost: int
    predicates: dict
    violated: tuple

    def margins(self) -> dict:
        return {p.value: e.margin for p, e in self.predicates.items()}


def _top(constraints, k=3):
    ranked = sorted(constraints, key=lambda c: (-c.weight, c.source_comment_id))
    return tuple(c.source_comment_id for c in ranked[:k])


def explain(assignment: ConsensusAssignment, constraints: Sequence[SoftConstraint], top_k: int = 3) -> ExplanationTrace:
    """Per-predicate margins, the strongest supporting/opposing comments and the violated set.

    "Supporting" constraints agree with the assigned value, "opposing" ones
    are violated by it.
    """
    constraints = _check_nonempty(constraints)
    sums = tally(constraints)
    margins = {p: t - f for p, (t, f) in sums.items()}
    if assignment_cost(assignment.values, constraints) != assignment.total_cost:
        raise Mismatch("total_cost does not match the constraint set")
    if {Predicate(k): v for k, v in assignment.per_predicate_margin.items()} != margins:
        raise Mismatch("margins do not match the constraint set")

    predicates = {}
    violated = []
    for p in PREDICATES:
        value = assignment.value(p)
        mine = [c for c in constraints if c.predicate == p]
        agree = [c for c in mine if c.polarity == value]
        disagree = [c for c in mine if c.polarity != value]
        violated += disagree
        t, f = sums[p]
        predicates[p] = PredicateExplanation(
            predicate=p,
            value=value,
            margin=margins[p],
            weight_true=t,
            weight_false=f,
            cost=sum(c.weight for c in disagree),
            supporting=_top(agree, top_k),
            opposing=_top(disagree, top_k),
        )
    return ExplanationTrace(assignment.total_cost, predicates, tuple(violated))


def trace_record(post_id: str, assignment: ConsensusAssignment, constraints, analyses=None, verdict=None) -> dict:
    """One ``trace.jsonl`` line."""
    trace = explain(assignment, constraints)
    record = {
        "post_id": post_id,
        "assignment": assignment.as_dict(),
        "total_cost": assignment.total_cost,
        "margins": trace.margins(),
        "violated": [c.to_dict() for c in trace.violated],
        "explanation": {
            p.value: {
                "weight_true": e.weight_true,
                "weight_false": e.weight_false,
                "cost": e.cost,
                "supporting": list(e.supporting),
                "opposing": list(e.opposing),
            }
            for p, e in trace.predicates.items()
        },
    }
    if analyses is not None:
        record["weights"] = {
            a.comment_id: split_stream_weights(a.quality)._asdict() for a in analyses
        }
    if verdict is not None:
        record["verdict"] = verdict.label.value
        record["rule"] = verdict.rule.value
    return record

"""Verdicts, budgets, and report records shared across the engine.

Every decision procedure in this package returns a certificate, not a bare
boolean: bounded verdicts carry the containing index, unbounded verdicts an
escape ray that replays, refutations a witness tuple.  The types here are the
common currency.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

CONFIRMED = "confirmed"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not_applicable"

BOUNDED = "bounded"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Budget:
    """Search limits: window radius for enumeration, max chain index."""

    window: int = 64
    max_index: int = 8

    def shrunk(self, window: int) -> "Budget":
        return replace(self, window=min(self.window, window))


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class BoundVerdict:
    """Outcome of a boundedness query against a bornology or chain.

    outcome "bounded": ``index`` is a chain level verified to contain the set.
    outcome "unbounded": ``direction`` (when available) is a ray r with
    base_point + t*r inside the set and outside every tested level; ``witness``
    holds escaping points.  outcome "inconclusive": budget exhausted.
    """

    outcome: str
    index: int | None = None
    direction: tuple | None = None
    base_point: tuple | None = None
    witness: tuple = ()
    note: str = ""

    @property
    def bounded(self) -> bool:
        return self.outcome == BOUNDED

    @property
    def unbounded(self) -> bool:
        return self.outcome == UNBOUNDED


def bounded_at(index: int, note: str = "") -> BoundVerdict:
    return BoundVerdict(BOUNDED, index=index, note=note)


def unbounded(direction=None, base_point=None, witness=(), note="") -> BoundVerdict:
    return BoundVerdict(
        UNBOUNDED,
        direction=direction,
        base_point=base_point,
        witness=tuple(witness),
        note=note,
    )


def inconclusive(note: str = "") -> BoundVerdict:
    return BoundVerdict(INCONCLUSIVE, note=note)


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    witness: object = None
    detail: str = ""


@dataclass(frozen=True)
class CheckReport:
    """A named bundle of axiom/condition checks with per-item witnesses."""

    subject: str
    items: tuple[CheckItem, ...]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def failures(self) -> tuple[CheckItem, ...]:
        return tuple(item for item in self.items if not item.passed)

    def item(self, name: str) -> CheckItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)


@dataclass(frozen=True)
class Verdict:
    """Three-valued outcome of a property check, with a replayable witness."""

    status: str  # confirmed | refuted | inconclusive | not_applicable
    witness: object = None
    detail: str = ""

    @property
    def confirmed(self) -> bool:
        return self.status == CONFIRMED

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED


def confirmed(detail: str = "", witness=None) -> Verdict:
    return Verdict(CONFIRMED, witness=witness, detail=detail)


def refuted(witness=None, detail: str = "") -> Verdict:
    return Verdict(REFUTED, witness=witness, detail=detail)


def verdict_inconclusive(detail: str = "") -> Verdict:
    return Verdict(INCONCLUSIVE, detail=detail)


def not_applicable(detail: str = "", witness=None) -> Verdict:
    return Verdict(NOT_APPLICABLE, witness=witness, detail=detail)


@dataclass(frozen=True)
class TheoremReport:
    """Result of machine-checking one characterization statement.

    ``conditions`` maps condition labels to Verdicts; ``status`` is the merged
    outcome.  Refutations carry machine-checkable witnesses that replay through
    the membership/boundedness primitives.
    """

    theorem: str
    status: str
    conditions: dict[str, Verdict] = field(default_factory=dict)
    budget: Budget = DEFAULT_BUDGET
    detail: str = ""

    @property
    def confirmed(self) -> bool:
        return self.status == CONFIRMED

    def condition(self, name: str) -> Verdict:
        return self.conditions[name]


def merge_status(verdicts) -> str:
    """Overall status: refuted dominates, then inconclusive, else confirmed."""
    statuses = [v.status for v in verdicts]
    if any(s == REFUTED for s in statuses):
        return REFUTED
    if any(s == INCONCLUSIVE for s in statuses):
        return INCONCLUSIVE
    return CONFIRMED

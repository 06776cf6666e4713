"""Data model for ordinary, jumping and marked succession rules."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple


class RuleError(ValueError):
    """Base class for malformed rules."""


class UnresolvedLabelError(RuleError):
    def __init__(self, label: "Label", referrer: "Label | None" = None):
        self.label = label
        self.referrer = referrer
        where = f" (referenced by {referrer})" if referrer is not None else ""
        super().__init__(f"label {label.unmarked()} has no production{where}")


@dataclass(frozen=True, order=True)
class Label:
    """Node identity in a generating tree.

    ``(3)``, ``(3)_1`` and ``(3)_2`` are distinct labels; the tag tells apart
    equal values that carry different productions.
    """

    value: int
    marked: bool = False
    tag: int = 0

    def toggled(self) -> "Label":
        # marking a marked label gives the plain label back
        return Label(self.value, not self.marked, self.tag)

    def unmarked(self) -> "Label":
        return Label(self.value, False, self.tag) if self.marked else self

    @property
    def sign(self) -> int:
        return -1 if self.marked else 1

    def __str__(self) -> str:
        body = f"{self.value}:{self.tag}" if self.tag else str(self.value)
        return f"(~{body})" if self.marked else f"({body})"


ZERO = Label(0)


class Branch(NamedTuple):
    jump: int
    successor: Label
    multiplicity: int


def _normalize(branches: Iterable[tuple[int, Label, int]]) -> tuple[Branch, ...]:
    merged: dict[tuple[int, Label], int] = {}
    for jump, succ, mult in branches:
        jump, mult = int(jump), int(mult)
        if jump < 1:
            raise RuleError(f"jump must be a positive level offset, got {jump}")
        if mult < 0:
            succ, mult = succ.toggled(), -mult
        if mult == 0:
            continue
        merged[(jump, succ)] = merged.get((jump, succ), 0) + mult
    return tuple(Branch(j, s, m) for (j, s), m in merged.items())


@dataclass(frozen=True, eq=False)
class Production:
    """All branches produced by one parent label.

    Branches are stored with positive multiplicity; a negative exponent on a
    plain successor is folded into the marked successor.  Duplicate
    ``(jump, successor)`` pairs are merged, first appearance fixes the order.
    """

    parent: Label
    branches: tuple[Branch, ...] = ()

    def __post_init__(self) -> None:
        if self.parent.marked:
            raise RuleError(f"productions are keyed by unmarked labels, got {self.parent}")
        object.__setattr__(self, "branches", _normalize(self.branches))

    def _key(self):
        return self.parent, tuple(sorted(self.branches))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Production):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @property
    def jumps(self) -> list[int]:
        return sorted({b.jump for b in self.branches})

    def sons(self) -> int:
        """Number of sons counted with absolute multiplicity."""
        return sum(b.multiplicity for b in self.branches)

    def signed_sons(self) -> int:
        return sum(b.multiplicity * b.successor.sign for b in self.branches)


@dataclass(frozen=True)
class SuccessionRule:
    axiom: Label
    productions: Mapping[Label, Production] = field(default_factory=dict)

    def __post_init__(self) -> None:
        prods = dict(self.productions)
        for key, prod in prods.items():
            if key != prod.parent:
                raise RuleError(f"production keyed by {key} belongs to {prod.parent}")
        object.__setattr__(self, "productions", prods)
        self._check_resolved(self.axiom, None)
        for prod in prods.values():
            for b in prod.branches:
                self._check_resolved(b.successor, prod.parent)

    def _check_resolved(self, label: Label, referrer: Label | None) -> None:
        base = label.unmarked()
        if base not in self.productions and base.value != 0:
            raise UnresolvedLabelError(base, referrer)

    @classmethod
    def build(
        cls,
        axiom: Label,
        table: Mapping[Label, Iterable[tuple[int, Label, int]]],
    ) -> "SuccessionRule":
        return cls(axiom, {lab: Production(lab, tuple(brs)) for lab, brs in table.items()})

    def production(self, label: Label) -> Production | None:
        return self.productions.get(label.unmarked())

    def labels(self) -> list[Label]:
        """Every unmarked label mentioned by the rule, axiom first."""
        seen: dict[Label, None] = {self.axiom.unmarked(): None}
        for prod in self.productions.values():
            seen.setdefault(prod.parent)
            for b in prod.branches:
                seen.setdefault(b.successor.unmarked())
        return list(seen)

    def max_jump(self) -> int:
        return max((b.jump for p in self.productions.values() for b in p.branches), default=1)

    def has_marks(self) -> bool:
        return self.axiom.marked or any(
            b.successor.marked for p in self.productions.values() for b in p.branches
        )


class RuleKind(enum.Enum):
    ORDINARY = "ordinary"
    JUMPING = "jumping"
    MARKED = "marked"
    JUMPING_MARKED = "jumping-marked"


def classify(rule) -> RuleKind:
    """Works for finite and parametric rules (anything with ``max_jump``/``has_marks``)."""
    jumps = rule.max_jump() > 1
    marks = rule.has_marks()
    if jumps and marks:
        return RuleKind.JUMPING_MARKED
    if jumps:
        return RuleKind.JUMPING
    if marks:
        return RuleKind.MARKED
    return RuleKind.ORDINARY


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    violations: tuple[tuple[Label, int], ...] = ()

    def __bool__(self) -> bool:
        return self.consistent


def is_consistent(rule: SuccessionRule) -> ConsistencyReport:
    """Check that every positive label ``(v)`` has exactly ``v`` sons.

    A label ``(0)`` must have no sons.  Negative labels only occur in compiler
    intermediates and are not checked.  Each violation is reported as
    ``(label, actual son count)``.
    """
    bad: list[tuple[Label, int]] = []
    for label in rule.labels():
        prod = rule.productions.get(label)
        sons = prod.sons() if prod is not None else 0
        if label.value >= 0 and sons != label.value:
            bad.append((label, sons))
    return ConsistencyReport(not bad, tuple(bad))


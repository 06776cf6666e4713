"""Recurrence -> extended rule -> jump-free rule -> ordinary rule.

Default initial conditions mean ``f_0 = 1`` and ``f_h = 0`` for ``h < 0``.
Throughout, ``S_i = a_1 + ... + a_i`` and ``(q_i, r_i)`` satisfy
``r_i = S_i + q_i * a_1``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .numseq import Recurrence, eval_sequence
from .rulecore import ZERO, Label, RuleKind, SuccessionRule, classify
from .treeengine import totals

log = logging.getLogger(__name__)

# cap on fresh labels created while unrolling generic initial conditions
MAX_PREFIX_LABELS = 1_000


class CompileError(ValueError):
    pass


class A1NotPositive(CompileError):
    pass


class InvalidQ(CompileError):
    pass


class CoreNotPositive(CompileError):
    pass


class PrefixNotEliminable(CompileError):
    pass


class _Tagger:
    """Hands out labels, tagging repeated values in order of appearance."""

    def __init__(self) -> None:
        self._used: dict[int, int] = {}

    def fresh(self, value: int) -> Label:
        tag = self._used.get(value, -1) + 1
        self._used[value] = tag
        return Label(value, tag=tag)


def _extended_branches(coeffs: Sequence[int], target: Label) -> list[tuple[int, Label, int]]:
    return [(i, target, a) for i, a in enumerate(coeffs, start=1) if a]


def _root_jumps(rec: Recurrence) -> list[int]:
    """Jump exponents of the initial-condition axiom, one per jump 1..k."""
    a, h, k = rec.coeffs, rec.inits, rec.order
    e = [h[0]]
    for i in range(2, k):
        e.append(h[i - 1] - sum(h[j - 1] * a[i - j - 1] for j in range(1, i)))
    e.append(a[k - 1])
    return e


def _trivial_inits(rec: Recurrence) -> bool:
    return rec.inits is None or list(rec.inits) == eval_sequence(rec.core(), rec.order - 1)[1:]


def to_extended_rule(rec: Recurrence) -> SuccessionRule:
    a1 = Label(rec.coeffs[0])
    core = {a1: _extended_branches(rec.coeffs, a1)}
    if _trivial_inits(rec):
        return SuccessionRule.build(a1, core)
    e = _root_jumps(rec)
    root = Label(rec.inits[0], tag=1 if rec.inits[0] == a1.value else 0)
    table = {root: [(i, a1, x) for i, x in enumerate(e, start=1) if x]}
    table.update(core)
    return SuccessionRule.build(root, table)


def eliminate_jumps(rec: Recurrence) -> SuccessionRule:
    """Jump-free rule over the partial-sum labels ``(S_1) .. (S_k)``.

    Labels may be zero or negative, and negative exponents turn into marked
    ``(a_1)`` sons.  With explicit initial values the axiom is unrolled into
    a chain of fresh labels that merges into the same partial-sum labels.
    """
    if not rec.is_default and not _trivial_inits(rec):
        return _unroll_generic(rec, _JumpFreeCore(rec))
    S = rec.partial_sums()
    tagger = _Tagger()
    labels = [tagger.fresh(s) for s in S]
    a1 = labels[0]
    table = {}
    for i, lab in enumerate(labels):
        nxt = labels[min(i + 1, len(labels) - 1)]
        table[lab] = [(1, nxt, 1), (1, a1, S[i] - 1)]
    return SuccessionRule.build(a1, table)


@dataclass(frozen=True)
class QRDecomposition:
    q: tuple[int, ...]
    r: tuple[int, ...]


def qr_for(coeffs: Sequence[int], q_choice: Optional[Sequence[int]] = None) -> QRDecomposition:
    coeffs = list(coeffs)
    a1 = coeffs[0]
    if a1 < 1:
        raise A1NotPositive(f"mark elimination needs a_1 > 0, got {a1}")
    S = Recurrence(coeffs).partial_sums()[1:]
    if q_choice is None:
        q = tuple(0 if s > 0 else -s // a1 + 1 for s in S)
    else:
        q = tuple(int(x) for x in q_choice)
        if len(q) != len(S):
            raise InvalidQ(f"expected {len(S)} q values (q_2..q_{len(coeffs)}), got {len(q)}")
        for i, (s, qi) in enumerate(zip(S, q), start=2):
            if s > 0 and qi != 0:
                raise InvalidQ(f"S_{i} = {s} > 0 forces q_{i} = 0")
            if s <= 0 and (qi < 1 or s + qi * a1 < 1):
                raise InvalidQ(f"S_{i} = {s} <= 0 needs q_{i} >= 1 with r_{i} = S_{i} + q_{i}*a_1 >= 1")
    r = tuple(s + qi * a1 for s, qi in zip(S, q))
    return QRDecomposition(q, r)


@dataclass(frozen=True)
class OrdinaryCompilation:
    rule: SuccessionRule
    qr: QRDecomposition
    # (parent label, exponent) for every negative exponent of (a_1)
    negative: tuple[tuple[Label, int], ...] = ()

    @property
    def ordinary(self) -> bool:
        return not self.negative


def _ordinary_parts(rec: Recurrence, qr: QRDecomposition):
    """Labels and son tables of the mark-free rule, before wrapping."""
    a1v = rec.coeffs[0]
    k = rec.order
    tagger = _Tagger()
    A = tagger.fresh(a1v)
    R = [tagger.fresh(r) for r in qr.r]  # R[i-2] is (r_i)
    q = qr.q
    table: dict[Label, list[tuple[int, Label, int]]] = {}
    if k == 1:
        table[A] = [(1, A, a1v)]
        return A, R, table
    q2 = q[0]
    table[A] = [(1, ZERO, q2), (1, R[0], 1), (1, A, a1v - (q2 + 1))]
    for i in range(2, k + 1):
        qi, ri = q[i - 2], qr.r[i - 2]
        q_next = q[i - 1] if i < k else qi
        nxt = R[i - 1] if i < k else R[i - 2]
        table[R[i - 2]] = [
            (1, ZERO, q2 * qi),
            (1, R[0], qi),
            (1, ZERO, q_next),
            (1, nxt, 1),
            (1, A, ri - (qi * (q2 + 1) + q_next + 1)),
        ]
    return A, R, table


def to_ordinary_rule(rec: Recurrence, qr: Optional[QRDecomposition] = None) -> OrdinaryCompilation:
    if rec.coeffs[0] < 1:
        raise A1NotPositive(f"mark elimination needs a_1 > 0, got {rec.coeffs[0]}")
    if qr is None:
        qr = qr_for(rec.coeffs)
    A, _, table = _ordinary_parts(rec, qr)
    negative = tuple(
        (parent, m) for parent, brs in table.items() for _, s, m in brs if s == A and m < 0
    )
    rule = SuccessionRule.build(A, table)
    if negative:
        log.info("q=%s leaves negative exponents %s", qr.q, negative)
    return OrdinaryCompilation(rule, qr, negative)


@dataclass(frozen=True)
class PositivityWitness:
    qr: QRDecomposition
    slack: tuple[int, ...]


def slack_for(coeffs: Sequence[int], q: Sequence[int]) -> list[int]:
    a1, k = coeffs[0], len(coeffs)
    if k == 1:
        return [a1 - 1]
    S = Recurrence(coeffs).partial_sums()
    q2 = q[0]
    out = [a1 - (q2 + 1)]
    for i in range(2, k + 1):
        qi = q[i - 2]
        ri = S[i - 1] + qi * a1
        q_next = q[i - 1] if i < k else qi
        out.append(ri - (qi * (q2 + 1) + q_next + 1))
    return out


def positivity_check(rec: Recurrence) -> Optional[PositivityWitness]:
    """Search for ``q_2 .. q_k`` satisfying every inequality of the positivity system.

    Returns the lexicographically least witness, or ``None`` when none exists
    within the admissible ranges.  ``None`` means the test is inconclusive; it
    says nothing against positivity of the sequence.
    """
    coeffs = rec.coeffs
    a1, k = coeffs[0], len(coeffs)
    if a1 < 1:
        return None
    if k == 1:
        return PositivityWitness(QRDecomposition((), ()), (a1 - 1,))
    S = rec.partial_sums()

    def candidates(i: int, upper: int) -> range:
        s = S[i - 1]
        if s > 0:
            return range(0, 1) if upper >= 0 else range(0)
        return range(max(1, -s // a1 + 1), upper + 1)

    def search(q: list[int]) -> Optional[list[int]]:
        i = len(q) + 1  # q_i is the last assigned value
        q2, qi = q[0], q[-1]
        ri = S[i - 1] + qi * a1
        if i == k:
            return q if ri - (qi * (q2 + 1) + qi + 1) >= 0 else None
        for q_next in candidates(i + 1, ri - qi * (q2 + 1) - 1):
            found = search(q + [q_next])
            if found is not None:
                return found
        return None

    for q2 in candidates(2, a1 - 1):
        found = search([q2])
        if found is not None:
            slack = slack_for(coeffs, found)
            assert min(slack) >= 0
            return PositivityWitness(qr_for(coeffs, found), tuple(slack))
    return None


# Generic initial conditions.
#
# Every label of the rules built here stands for a node whose descendants are
# w_j copies of the core axiom (a_1) placed j levels below it; w is the
# label's "state".  A node of state w with w_1 sons needs sons whose states
# add up to w_1*a + shift(w), where a is the coefficient vector.  Core labels
# have fixed states, so unrolling a chain of fresh labels from the axiom state
# until it lands on core states gives an equivalent rule.


def _shift(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(w[1:]) + (0,)


def _axpy(c: int, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    return tuple(c * xi + yi for xi, yi in zip(x, y))


class _Core:
    """Core rule plus the state of each of its labels."""

    allow_nonpositive = False

    def __init__(self, rec: Recurrence):
        self.a = tuple(rec.coeffs)
        self.states: dict[tuple[int, ...], Label] = {}
        self.table: dict[Label, list] = {}
        self.axiom: Label
        self.tagger = _Tagger()

    def chain_state(self, w) -> tuple[int, ...]:
        return _axpy(1, _shift(w), self.a)


class _JumpFreeCore(_Core):
    allow_nonpositive = True

    def __init__(self, rec: Recurrence):
        super().__init__(rec)
        S = rec.partial_sums()
        w = self.a
        for s in S:
            lab = self.tagger.fresh(s)
            self.states.setdefault(w, lab)
            w = self.chain_state(w)
        base = eliminate_jumps(rec.core())
        self.axiom = base.axiom
        self.table = {p: list(prod.branches) for p, prod in base.productions.items()}


class _OrdinaryCore(_Core):
    def __init__(self, rec: Recurrence, qr: QRDecomposition):
        super().__init__(rec)
        A, R, table = _ordinary_parts(rec, qr)
        for lab in [A, ZERO] + R:
            self.tagger._used[lab.value] = max(self.tagger._used.get(lab.value, -1), lab.tag)
        self.axiom = A
        self.table = table
        self.states[self.a] = A
        w = self.a
        for i, lab in enumerate(R, start=2):
            w = self.chain_state(w)
            self.states.setdefault(_axpy(qr.q[i - 2], self.a, w), lab)
        self.states.setdefault(tuple(0 for _ in self.a), ZERO)


def _core_multiple(target, a, states, limit: int) -> Optional[int]:
    """Largest m in [0, limit] with target - m*a a core state, if any."""
    best = None
    for s in states:
        diff = [t - x for t, x in zip(target, s)]
        m, rem = divmod(diff[0], a[0])
        if rem or not 0 <= m <= limit or best is not None and m <= best:
            continue
        if all(d == m * ai for d, ai in zip(diff, a)):
            best = m
    return best


def _unroll_generic(rec: Recurrence, core: _Core) -> SuccessionRule:
    a = core.a
    root_state = tuple(_root_jumps(rec))
    fresh: dict[tuple[int, ...], Label] = {}
    prefix: dict[Label, list] = {}
    todo: list[tuple[int, ...]] = []

    def label_for(state: tuple[int, ...]) -> Label:
        if state in core.states:
            return core.states[state]
        if state not in fresh:
            if len(fresh) >= MAX_PREFIX_LABELS:
                raise PrefixNotEliminable("initial-condition prefix does not close up")
            fresh[state] = core.tagger.fresh(state[0])
            todo.append(state)
        return fresh[state]

    def sons(w: tuple[int, ...]) -> list:
        w1 = w[0]
        target = _axpy(w1, a, _shift(w))
        if core.allow_nonpositive:
            child = _axpy(-(w1 - 1), a, target)
            return [(1, label_for(child), 1), (1, core.axiom, w1 - 1)]
        if w1 < 1:
            raise PrefixNotEliminable(f"state {w} would need {w1} sons")
        # m sons (a_1), w1 - 1 - m zero sons and one carrier son of state target - m*a;
        # a carrier that is already a core label wins, otherwise m is as large as possible
        m = _core_multiple(target, a, core.states, w1 - 1)
        if m is None:
            if target[0] < 1:
                raise PrefixNotEliminable(f"no mark-free sons for state {w}")
            m = min(w1 - 1, (target[0] - 1) // a[0])
        child = _axpy(-m, a, target)
        return [(1, ZERO, w1 - 1 - m), (1, label_for(child), 1), (1, core.axiom, m)]

    root = label_for(root_state)
    while todo:
        w = todo.pop(0)
        prefix[fresh[w]] = sons(w)
    table = dict(prefix)
    for lab, brs in core.table.items():
        table.setdefault(lab, brs)
    return SuccessionRule.build(root, table)


def compile_generic(rec: Recurrence, witness: Optional[PositivityWitness] = None) -> SuccessionRule:
    """Ordinary rule for a recurrence with explicit initial values.

    The first levels use freshly tagged labels that absorb the initial values
    and then flow into the ordinary rule of the default-condition core.
    """
    core_rec = rec.core()
    if core_rec.coeffs[0] < 1:
        raise CoreNotPositive("mark elimination needs a_1 > 0")
    if witness is None:
        witness = positivity_check(core_rec)
        if witness is None:
            raise CoreNotPositive(f"positivity test inconclusive for {list(rec.coeffs)}")
    if _trivial_inits(rec):
        return to_ordinary_rule(core_rec, witness.qr).rule
    if rec.inits[0] < 1:
        raise PrefixNotEliminable(f"f_1 = {rec.inits[0]} leaves the root without sons")
    return _unroll_generic(rec, _OrdinaryCore(rec, witness.qr))


@dataclass
class StageReport:
    stage: str
    applicable: bool
    matches: Optional[bool] = None
    first_divergence: Optional[tuple[int, int, int]] = None  # (level, expected, got)
    note: str = ""
    rule: Optional[SuccessionRule] = field(default=None, repr=False)


@dataclass
class VerificationReport:
    recurrence: Recurrence
    depth: int
    expected: list[int]
    stages: list[StageReport]

    @property
    def all_match(self) -> bool:
        return all(s.matches for s in self.stages if s.applicable)


def _compare(stage: str, rule: SuccessionRule, expected: list[int], depth: int) -> StageReport:
    got = totals(rule, depth)
    for n, (x, y) in enumerate(zip(expected, got)):
        if x != y:
            return StageReport(stage, True, False, (n, x, y), rule=rule)
    return StageReport(stage, True, True, rule=rule)


def verify(rec: Recurrence, depth: int) -> VerificationReport:
    """Expand every applicable stage and compare against the recurrence."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    expected = eval_sequence(rec, depth)
    stages = [
        _compare("extended", to_extended_rule(rec), expected, depth),
        _compare("jumpfree", eliminate_jumps(rec), expected, depth),
    ]
    last = "generic" if not rec.is_default else "ordinary"
    witness = positivity_check(rec.core()) if rec.coeffs[0] >= 1 else None
    if rec.coeffs[0] < 1:
        stages.append(StageReport(last, False, note="a_1 <= 0: marks cannot be removed"))
    elif witness is None:
        stages.append(StageReport(last, False, note="positivity test inconclusive"))
    elif rec.is_default:
        comp = to_ordinary_rule(rec, witness.qr)
        stages.append(_compare(last, comp.rule, expected, depth))
    else:
        try:
            rule = compile_generic(rec, witness)
        except PrefixNotEliminable as exc:
            stages.append(StageReport(last, False, note=str(exc)))
        else:
            stages.append(_compare(last, rule, expected, depth))
    return VerificationReport(rec, depth, expected, stages)


def is_ordinary(rule: SuccessionRule) -> bool:
    return classify(rule) is RuleKind.ORDINARY

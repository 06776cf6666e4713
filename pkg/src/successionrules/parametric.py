"""Succession rules with infinitely many labels.

Productions are schemas in the parent value ``k``: successor labels and
multiplicities are affine in ``k``, and a successor may also be a whole run of
labels ``(lo..hi)`` as in the Motzkin and Catalan rules.
"""
from __future__ import annotations

import operator
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rulecore import Label, RuleError
from .treeengine import LevelProfile


class NegativeMultiplicity(RuleError):
    def __init__(self, label: int, schema: "Schema", value: int):
        self.label = label
        self.schema = schema
        super().__init__(f"label ({label}) gets multiplicity {value} from schema {schema}")


class LevelIndexViolation(RuleError):
    pass


class NonIntegerEvaluation(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    """``coef * k + const``."""

    coef: int = 0
    const: int = 0

    def __call__(self, k: int) -> int:
        return self.coef * k + self.const

    @property
    def is_constant(self) -> bool:
        return self.coef == 0

    def __str__(self) -> str:
        if self.coef == 0:
            return str(self.const)
        lead = {1: "k", -1: "-k"}.get(self.coef, f"{self.coef}k")
        if self.const == 0:
            return lead
        return f"{lead}{'+' if self.const > 0 else '-'}{abs(self.const)}"


K = Affine(1, 0)


def const(c: int) -> Affine:
    return Affine(0, c)


@dataclass(frozen=True)
class Successor:
    """Labels ``lo..hi`` (or just ``lo``), each with the given multiplicity."""

    lo: Affine
    multiplicity: Affine = Affine(0, 1)
    hi: Affine | None = None
    marked: bool = False

    def labels(self, k: int) -> range:
        lo = self.lo(k)
        return range(lo, (self.hi(k) if self.hi is not None else lo) + 1)


_OPS = {
    ">=": operator.ge,
    "<=": operator.le,
    ">": operator.gt,
    "<": operator.lt,
    "==": operator.eq,
    "!=": operator.ne,
}


@dataclass(frozen=True)
class Guard:
    lhs: Affine
    op: str
    rhs: Affine

    def __post_init__(self) -> None:
        if self.op not in _OPS:
            raise RuleError(f"unknown comparison {self.op!r}")

    def holds(self, k: int) -> bool:
        return _OPS[self.op](self.lhs(k), self.rhs(k))

    def __str__(self) -> str:
        return f"{self.lhs}{self.op}{self.rhs}"


@dataclass(frozen=True)
class Schema:
    jump: int
    successors: tuple[Successor, ...]
    guards: tuple[Guard, ...] = ()

    def applies(self, k: int) -> bool:
        return all(g.holds(k) for g in self.guards)


@dataclass(frozen=True)
class ParametricRule:
    axiom: int
    schemas: tuple[Schema, ...]
    level_indexed: bool = False

    def max_jump(self) -> int:
        return max((s.jump for s in self.schemas), default=1)

    def has_marks(self) -> bool:
        return any(succ.marked for s in self.schemas for succ in s.successors)


def expand_parametric(rule: ParametricRule, depth: int) -> list[LevelProfile]:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    levels: list[defaultdict[int, int]] = [defaultdict(int) for _ in range(depth + 1)]
    levels[0][rule.axiom] = 1
    for n in range(depth + 1):
        for k, count in levels[n].items():
            if not count:
                continue
            if rule.level_indexed and k != n:
                raise LevelIndexViolation(f"label ({k}) found on level {n}")
            for schema in rule.schemas:
                if n + schema.jump > depth or not schema.applies(k):
                    continue
                target = levels[n + schema.jump]
                for succ in schema.successors:
                    m = succ.multiplicity(k)
                    if m < 0:
                        raise NegativeMultiplicity(k, schema, m)
                    sign = -1 if succ.marked else 1
                    for lab in succ.labels(k):
                        target[lab] += sign * count * m
    return [
        LevelProfile(n, {Label(k): c for k, c in sorted(lv.items()) if c})
        for n, lv in enumerate(levels)
    ]


def parametric_totals(rule: ParametricRule, depth: int) -> list[int]:
    return [p.total for p in expand_parametric(rule, depth)]


def _as_fraction_poly(poly) -> list[Fraction]:
    if isinstance(poly, (int, Fraction)):
        return [Fraction(poly)]
    return [Fraction(c) for c in poly]


def holonomic_terms(coeff_polys: Sequence, n: int) -> list[int]:
    """``f_0..f_n`` of ``f_m = sum_j p_j(m) f_{m-j}`` with ``f_0 = 1``, ``f_{<0} = 0``.

    Each ``p_j`` is a coefficient list, lowest degree first.
    """
    polys = [_as_fraction_poly(p) for p in coeff_polys]
    f = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j, p in enumerate(polys, start=1):
            if m - j >= 0:
                acc += sum(c * m**d for d, c in enumerate(p)) * f[m - j]
        f.append(acc)
    if any(x.denominator != 1 for x in f):
        raise NonIntegerEvaluation("recurrence produced a non-integer term")
    return [int(x) for x in f]


def holonomic_to_level_indexed(coeff_polys: Sequence) -> ParametricRule:
    """Level-indexed rule for ``f_n = p_1(n) f_{n-1} + ... + p_m(n) f_{n-m}``.

    A label ``(k)`` sits on level ``k``; its jump-``j`` sons land on level
    ``k + j`` and carry the factor ``p_j(k + j)``.  Only polynomials of degree
    at most one fit the affine schema language.
    """
    schemas = []
    for j, poly in enumerate(coeff_polys, start=1):
        p = _as_fraction_poly(poly)
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        if len(p) > 2:
            raise ValueError(f"p_{j} has degree {len(p) - 1}; only affine coefficients are supported")
        c0 = p[0]
        c1 = p[1] if len(p) > 1 else Fraction(0)
        # p_j(k + j) = c1*k + (c0 + c1*j)
        coef, cst = c1, c0 + c1 * j
        if coef.denominator != 1 or cst.denominator != 1:
            raise NonIntegerEvaluation(f"p_{j}(k+{j}) = {coef}k + {cst} is not integral for every k")
        mult = Affine(int(coef), int(cst))
        if mult == Affine(0, 0):
            continue
        neg = Affine(-mult.coef, -mult.const)
        if mult.coef >= 0 and mult.const >= 0:
            schemas.append(Schema(j, (Successor(Affine(1, j), mult),)))
        elif mult.coef <= 0 and mult.const <= 0:
            schemas.append(Schema(j, (Successor(Affine(1, j), neg, marked=True),)))
        else:
            # sign changes with k: plain sons where positive, marked sons where negative
            zero = Affine(0, 0)
            schemas.append(Schema(j, (Successor(Affine(1, j), mult),), (Guard(mult, ">", zero),)))
            schemas.append(
                Schema(j, (Successor(Affine(1, j), neg, marked=True),), (Guard(mult, "<", zero),))
            )
    return ParametricRule(0, tuple(schemas), level_indexed=True)


# Rules that appear as worked examples; kept here as ready-made values.

def involution_rule() -> ParametricRule:
    """``(1); (k) -> (k-1)^{k-1} (k+1)``: ordinary rule for the involution numbers."""
    return ParametricRule(
        1, (Schema(1, (Successor(Affine(1, -1), Affine(1, -1)), Successor(Affine(1, 1)))),)
    )


def powers_of_two_rule() -> ParametricRule:
    """``(2); (k) -> (1)^{k-1} (k+1)``."""
    return ParametricRule(
        2, (Schema(1, (Successor(const(1), Affine(1, -1)), Successor(Affine(1, 1)))),)
    )


def motzkin2_rule() -> ParametricRule:
    """``(1); (k) =1=> (1)(2)...(k-1)(k+1); (k) =2=> (k)``."""
    return ParametricRule(
        1,
        (
            Schema(1, (Successor(const(1), hi=Affine(1, -1)), Successor(Affine(1, 1)))),
            Schema(2, (Successor(K),)),
        ),
    )


def catalan_marked_rule() -> ParametricRule:
    """``(2); (k) -> (2)...(k)(k+1)(k); (k) -> (~k)``."""
    return ParametricRule(
        2,
        (
            Schema(1, (Successor(const(2), hi=K), Successor(Affine(1, 1)), Successor(K))),
            Schema(1, (Successor(K, marked=True),)),
        ),
    )

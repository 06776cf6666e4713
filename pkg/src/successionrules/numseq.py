"""Exact evaluation of C-finite recurrences and their rational generating functions.

A recurrence ``f_n = a_1 f_{n-1} + ... + a_k f_{n-k}`` always starts from
``f_0 = 1``.  With default initial conditions every ``f_h`` with ``h < 0`` is
zero; with explicit ones the caller supplies ``f_1 .. f_{k-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class Recurrence:
    """Integer coefficient vector plus an initial-condition policy.

    ``inits`` is ``None`` for default initial conditions, otherwise the tuple
    ``(h_1, ..., h_{k-1})``.
    """

    coeffs: tuple[int, ...]
    inits: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("a recurrence needs at least one coefficient")
        if coeffs[-1] == 0:
            raise ValueError(
                f"trailing coefficient a_{len(coeffs)} is zero; drop it to get the genuine degree"
            )
        object.__setattr__(self, "coeffs", coeffs)
        if self.inits is not None:
            inits = tuple(int(h) for h in self.inits)
            if len(inits) != len(coeffs) - 1:
                raise ValueError(
                    f"expected {len(coeffs) - 1} explicit initial values (f_1..f_{len(coeffs) - 1}), "
                    f"got {len(inits)}"
                )
            object.__setattr__(self, "inits", inits)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def is_default(self) -> bool:
        return self.inits is None

    def core(self) -> "Recurrence":
        """Same coefficients with default initial conditions."""
        return Recurrence(self.coeffs)

    def partial_sums(self) -> list[int]:
        out, acc = [], 0
        for a in self.coeffs:
            acc += a
            out.append(acc)
        return out


@dataclass(frozen=True)
class RationalGF:
    """``numerator / denominator`` with integer coefficients, lowest degree first."""

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]

    def __post_init__(self) -> None:
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if not den or den[0] != 1:
            raise ValueError("denominator must have constant term 1")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    def __str__(self) -> str:
        return f"({format_poly(self.numerator)}) / ({format_poly(self.denominator)})"


def _trim(poly: Iterable[int]) -> tuple[int, ...]:
    p = [int(c) for c in poly]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def eval_sequence(rec: Recurrence, n: int) -> list[int]:
    """Return ``[f_0, ..., f_n]`` computed straight from the recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    a = rec.coeffs
    k = len(a)
    f = [1]
    for m in range(1, n + 1):
        if rec.inits is not None and m < k:
            f.append(rec.inits[m - 1])
            continue
        f.append(sum(a[i - 1] * f[m - i] for i in range(1, min(k, m) + 1)))
    return f


def generating_function(rec: Recurrence) -> RationalGF:
    den = (1,) + tuple(-c for c in rec.coeffs)
    if rec.is_default:
        return RationalGF((1,), den)
    k = rec.order
    head = eval_sequence(rec, k - 1)
    # numerator = (f_0 + ... + f_{k-1} x^{k-1}) * den  mod x^k
    num = [sum(head[j] * den[i - j] for j in range(i + 1)) for i in range(k)]
    return RationalGF(tuple(num), den)


def series_of_gf(gf: RationalGF, n: int) -> list[int]:
    """First ``n + 1`` power-series coefficients of ``gf``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    num, den = gf.numerator, gf.denominator
    out: list[int] = []
    for m in range(n + 1):
        c = num[m] if m < len(num) else 0
        for i in range(1, min(m, len(den) - 1) + 1):
            c -= den[i] * out[m - i]
        out.append(c)
    return out


def format_poly(poly: Sequence[int], var: str = "x") -> str:
    """Render ``1 - 3x - 2x^2 + x^3`` style text."""
    parts: list[str] = []
    for deg, c in enumerate(poly):
        if c == 0:
            continue
        mag = abs(c)
        if deg == 0:
            body = str(mag)
        else:
            mono = var if deg == 1 else f"{var}^{deg}"
            body = mono if mag == 1 else f"{mag}{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"{'+' if c > 0 else '-'} {body}")
    return " ".join(parts) if parts else "0"

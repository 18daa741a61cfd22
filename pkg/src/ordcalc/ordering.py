"""Closed-form ordered expansions of powers and functions of n = a^dagger a.

Normal order:  n^k = sum_m S(k, m) (a^dagger)^m a^m, and
    f(n) = sum_m Delta^m f(0) / m! (a^dagger)^m a^m.
Anti-normal order:  n^k = (-1)^k sum_m (-1)^m S(k+1, m+1) a^m (a^dagger)^m, and
    f(n) = sum_m (-1)^m (Delta^m g(0) + Delta^(m+1) g(0)) / m! a^m (a^dagger)^m
with g(u) = f(-u).

All infinite series are cut at a caller-supplied order M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .combinatorics import (
    FunctionTable,
    StirlingTable,
    TableTooShortError,
    forward_difference,
    stirling2,
)
from .opalgebra import OperatorExpr, Ordering

__all__ = [
    "Ordering",
    "Source",
    "OrderedExpansion",
    "normal_power",
    "antinormal_power",
    "normal_function",
    "antinormal_function",
    "lemma1_coefficients",
    "lemma2_coefficients",
    "taylor_difference_check",
]


@dataclass(frozen=True)
class Source:
    """Where an expansion came from: ``power``, ``function``, ``lemma1`` or ``lemma2``."""

    kind: str
    parameter: object = None


@dataclass(frozen=True)
class OrderedExpansion:
    """sum_m c_m (a^dagger)^m a^m (normal) or sum_m c_m a^m (a^dagger)^m (anti-normal).

    ``coefficients[m]`` is c_m for m = 0..len-1.  Exact sources give
    Fractions, float sources give floats.
    """

    ordering: Ordering
    coefficients: tuple
    source: Source

    @property
    def max_m(self) -> int:
        return len(self.coefficients) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coefficients)

    def __getitem__(self, m: int):
        if 0 <= m < len(self.coefficients):
            return self.coefficients[m]
        return Fraction(0) if self.exact else 0.0

    def nonzero(self) -> dict:
        return {m: c for m, c in enumerate(self.coefficients) if c != 0}

    def to_operator(self) -> OperatorExpr:
        """Exact operator form; only valid for exact expansions."""
        if not self.exact:
            raise TypeError("float expansions have no exact operator form")
        return OperatorExpr(self.ordering, {(m, m): c for m, c in enumerate(self.coefficients)})


def normal_power(k: int, table: StirlingTable | None = None) -> OrderedExpansion:
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = table or stirling2
    coeffs = tuple(Fraction(s(k, m)) for m in range(k + 1))
    return OrderedExpansion(Ordering.NORMAL, coeffs, Source("power", k))


def antinormal_power(k: int, table: StirlingTable | None = None) -> OrderedExpansion:
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = table or stirling2
    coeffs = tuple(Fraction((-1) ** (k + m) * s(k + 1, m + 1)) for m in range(k + 1))
    return OrderedExpansion(Ordering.ANTINORMAL, coeffs, Source("power", k))


def normal_function(f: FunctionTable, max_m: int) -> OrderedExpansion:
    """Normal-ordered f(n) from samples f(0..max_m)."""
    if max_m > f.max_x:
        raise TableTooShortError(f"need {max_m + 1} samples, table has {len(f)}")
    coeffs = tuple(forward_difference(f, m) / math.factorial(m) for m in range(max_m + 1))
    return OrderedExpansion(Ordering.NORMAL, coeffs, Source("function", f))


def antinormal_function(g: FunctionTable, max_m: int) -> OrderedExpansion:
    """Anti-normal-ordered f(n) from samples of g(u) = f(-u) at u = 0..max_m+1.

    The caller negates the argument; the extra sample feeds the (1 + Delta)
    factor at the highest order.
    """
    if max_m + 1 > g.max_x:
        raise TableTooShortError(f"need {max_m + 2} samples, table has {len(g)}")
    diffs = [forward_difference(g, m) for m in range(max_m + 2)]
    coeffs = tuple(
        (-1) ** m * (diffs[m] + diffs[m + 1]) / math.factorial(m) for m in range(max_m + 1)
    )
    return OrderedExpansion(Ordering.ANTINORMAL, coeffs, Source("function", g))


def _exp_series(scale: float, x: float, max_m: int) -> tuple:
    # scale * x^m / m!, built incrementally so large m does not overflow m!.
    out = [scale]
    for m in range(1, max_m + 1):
        out.append(out[-1] * x / m)
    return tuple(out)


def lemma1_coefficients(gamma: float, max_m: int) -> OrderedExpansion:
    """exp(-gamma n) = :exp((e^-gamma - 1) n):, expanded to order max_m."""
    coeffs = _exp_series(1.0, math.expm1(-gamma), max_m)
    return OrderedExpansion(Ordering.NORMAL, coeffs, Source("lemma1", gamma))


def lemma2_coefficients(gamma: float, max_m: int) -> OrderedExpansion:
    """exp(-gamma n) = e^gamma (anti-normal) exp((1 - e^gamma) n), to order max_m."""
    coeffs = _exp_series(math.exp(gamma), -math.expm1(gamma), max_m)
    return OrderedExpansion(Ordering.ANTINORMAL, coeffs, Source("lemma2", gamma))


def taylor_difference_check(taylor: Sequence, m: int, max_k: int, table: StirlingTable | None = None):
    """sum_{k=m}^{max_k} taylor[k] S(k, m), with taylor[k] = f^(k)(0) / k!.

    Should equal Delta^m f(0) / m!; entries past the end of ``taylor`` count as 0.
    """
    if max_k < m:
        raise ValueError("truncation max_k must be >= m")
    s = table or stirling2
    terms = [taylor[k] * s(k, m) for k in range(m, min(max_k, len(taylor) - 1) + 1)]
    if all(isinstance(t, (int, Fraction)) for t in terms):
        return sum(terms, Fraction(0))
    return math.fsum(terms)

"""Exact integer combinatorics used by the ordering formulas.

Stirling numbers of the second kind, binomials, falling factorials and the
forward difference operator on integer-point samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence, Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"


class TableTooShortError(ValueError):
    """A forward difference asked for more samples than the table holds."""


def binomial(m: int, j: int) -> int:
    if j < 0 or m < 0 or j > m:
        return 0
    return math.comb(m, j)


def falling_factorial(x: int, m: int) -> int:
    """x (x-1) ... (x-m+1); the empty product (m = 0) is 1."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if x >= 0:
        return math.perm(x, m) if m <= x else 0
    out = 1
    for i in range(m):
        out *= x - i
    return out


def stirling2(k: int, m: int) -> int:
    """S(k, m) from the explicit alternating sum over j = 0..m.

    Uses 0**0 == 1, so S(0, 0) = 1 and S(k, 0) = 0 for k >= 1.
    """
    if k < 0 or m < 0:
        raise ValueError("k and m must be nonnegative")
    if m > k:
        return 0
    total = sum((-1) ** (m - j) * math.comb(m, j) * j**k for j in range(m + 1))
    q, r = divmod(total, math.factorial(m))
    assert r == 0
    return q


class StirlingTable:
    """Triangular table of S(k, m), 0 <= m <= k <= max_k, built by recurrence.

    Growing the table is not thread-safe; grow it before sharing.
    """

    def __init__(self, max_k: int = 0):
        self._rows: list[tuple[int, ...]] = [(1,)]
        self.grow(max_k)

    @property
    def max_k(self) -> int:
        return len(self._rows) - 1

    def grow(self, max_k: int) -> None:
        if max_k < 0:
            raise ValueError("max_k must be nonnegative")
        while self.max_k < max_k:
            prev = self._rows[-1]
            k = len(prev)  # index of the new row
            row = [0] * (k + 1)
            for m in range(1, k + 1):
                keep = m * prev[m] if m < k else 0
                row[m] = keep + prev[m - 1]
            self._rows.append(tuple(row))

    def __call__(self, k: int, m: int) -> int:
        if m > k:
            return 0
        if k > self.max_k:
            self.grow(k)
        return self._rows[k][m]

    def row(self, k: int) -> tuple[int, ...]:
        if k > self.max_k:
            self.grow(k)
        return self._rows[k]

    def rows(self) -> list[tuple[int, ...]]:
        return list(self._rows)


_shared = StirlingTable(32)


def stirling2_recurrence(k: int, m: int) -> int:
    return _shared(k, m)


def _kind_of(values: Sequence) -> str:
    has_float = any(isinstance(v, float) for v in values)
    has_exact = any(
        isinstance(v, Rational) and not isinstance(v, (int, bool)) for v in values
    )
    if has_float and has_exact:
        raise TypeError("cannot mix exact rationals and floats in one table")
    for v in values:
        if not isinstance(v, (int, float, Rational)):
            raise TypeError(f"unsupported sample type {type(v).__name__}")
    return FLOAT if has_float else EXACT


@dataclass(frozen=True)
class FunctionTable:
    """Samples f(0), f(1), ..., f(M) of a scalar function.

    Either every sample is an exact rational or every sample is a float.
    Plain ints are promoted to whichever kind the table has.
    """

    samples: tuple
    kind: str

    def __init__(self, samples: Iterable, kind: str | None = None):
        values = list(samples)
        if not values:
            raise ValueError("a function table needs at least one sample")
        inferred = _kind_of(values)
        if kind is None:
            kind = inferred
        elif kind not in (EXACT, FLOAT):
            raise ValueError(f"unknown table kind {kind!r}")
        elif kind == EXACT and inferred == FLOAT:
            raise TypeError("float samples in an exact table")
        if kind == EXACT:
            values = [Fraction(v) for v in values]
        else:
            values = [float(v) for v in values]
        object.__setattr__(self, "samples", tuple(values))
        object.__setattr__(self, "kind", kind)

    @classmethod
    def from_function(
        cls, f: Callable[[int], Scalar], max_x: int, kind: str | None = None
    ) -> "FunctionTable":
        return cls((f(x) for x in range(max_x + 1)), kind)

    @property
    def max_x(self) -> int:
        return len(self.samples) - 1

    @property
    def exact(self) -> bool:
        return self.kind == EXACT

    def __len__(self) -> int:
        return len(self.samples)


def forward_difference(f: FunctionTable, m: int) -> Scalar:
    """Delta^m f(0) = sum_k (-1)^(m-k) C(m, k) f(k)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > f.max_x:
        raise TableTooShortError(
            f"forward difference of order {m} needs {m + 1} samples, "
            f"table has {len(f)}"
        )
    terms = [(-1) ** (m - k) * math.comb(m, k) * f.samples[k] for k in range(m + 1)]
    if f.exact:
        return sum(terms, Fraction(0))
    return math.fsum(terms)

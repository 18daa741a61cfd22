"""Truncated Fock-space checks of the exp(-gamma n) identities.

Coherent states are built directly from their amplitudes; no displacement
operator is exponentiated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

import mpmath
import numpy as np

from .opalgebra import OperatorExpr, Ordering
from .ordering import OrderedExpansion

DEFAULT_DIM = 64
# Tail length inspected when deciding whether a series is blowing up.
GROWTH_WINDOW = 10
SERIES_DPS = 40


class TruncationError(ValueError):
    """An expansion needs more of the Fock ladder than the space provides."""


class FockSpace:
    """Span of |0>, ..., |dim-1> with dense ladder matrices."""

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
        a.setflags(write=False)
        self.a = a

    @cached_property
    def adag(self) -> np.ndarray:
        m = self.a.conj().T.copy()
        m.setflags(write=False)
        return m

    @cached_property
    def number(self) -> np.ndarray:
        m = self.adag @ self.a
        m.setflags(write=False)
        return m

    def commutator_defect(self) -> float:
        """Largest entry of [a, a^dagger] - I on the first dim-1 basis vectors."""
        c = self.a @ self.adag - self.adag @ self.a - np.eye(self.dim)
        return float(np.max(np.abs(c[: self.dim - 1, : self.dim - 1]), initial=0.0))


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    label: str

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def fock_state(space: FockSpace, n: int) -> StateVector:
    if not 0 <= n < space.dim:
        raise TruncationError(f"|{n}> does not fit in dimension {space.dim}")
    v = np.zeros(space.dim, dtype=complex)
    v[n] = 1.0
    v.setflags(write=False)
    return StateVector(v, f"fock {n}")


def coherent_state(space: FockSpace, alpha: complex) -> StateVector:
    """Amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!), cut at the space dimension."""
    alpha = complex(alpha)
    v = np.empty(space.dim, dtype=complex)
    amp = cmath.exp(-abs(alpha) ** 2 / 2)
    for n in range(space.dim):
        if n:
            amp *= alpha / math.sqrt(n)
        v[n] = amp
    v.setflags(write=False)
    return StateVector(v, f"coherent {alpha}")


def laguerre(m: int, x: float) -> float:
    """L_m(x) from (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    prev, cur = 0.0, 1.0
    for k in range(m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def antinormal_moment(m: int, alpha: complex) -> float:
    """<alpha| a^m (a^dagger)^m |alpha> = sum_k |alpha|^2k C(m,k)^2 (m-k)!.

    Summed exactly in rationals (|alpha|^2 converted without rounding).
    """
    x = Fraction(abs(complex(alpha)) ** 2)
    total = sum(
        x**k * math.comb(m, k) ** 2 * math.factorial(m - k) for k in range(m + 1)
    )
    return float(total)


@dataclass(frozen=True)
class SeriesReport:
    """How a truncated series ended.

    ``diverged`` means term magnitudes grew across the last GROWTH_WINDOW
    terms; ``converged`` additionally requires the last term to be below
    ``tol`` relative to the sum.
    """

    terms: int
    last_term: float
    max_term: float
    diverged: bool
    converged: bool

    def as_dict(self) -> dict:
        return {
            "terms": self.terms,
            "last_term": self.last_term,
            "max_term": self.max_term,
            "diverged": self.diverged,
            "converged": self.converged,
        }


def _report(terms: list, value: float, tol: float) -> SeriesReport:
    mags = [abs(t) for t in terms]
    last = mags[-1]
    diverged = False
    if len(mags) > GROWTH_WINDOW:
        tail = mags[-GROWTH_WINDOW - 1 :]
        diverged = tail[-1] > tail[0]
    diverged = diverged or not math.isfinite(last)
    converged = not diverged and last <= tol * max(1.0, abs(value))
    return SeriesReport(len(terms), last, max(mags), diverged, converged)


def expect_exp_coherent_closed(gamma: float, alpha: complex) -> float:
    return math.exp(abs(complex(alpha)) ** 2 * math.expm1(-gamma))


def expect_exp_coherent_series(
    gamma: float, alpha: complex, max_m: int, tol: float = 1e-12
) -> tuple[float, SeriesReport]:
    """e^gamma sum_{m<=max_m} (1 - e^gamma)^m L_m(-|alpha|^2), with a report.

    Terms alternate in sign and can be many orders of magnitude larger than
    the sum, so they are accumulated at SERIES_DPS decimal digits.
    """
    with mpmath.workdps(SERIES_DPS):
        x = -mpmath.expm1(gamma)
        y = -mpmath.mpf(abs(complex(alpha))) ** 2
        scale = mpmath.exp(gamma)
        terms = []
        prev, lag = mpmath.mpf(0), mpmath.mpf(1)
        power = mpmath.mpf(1)
        for m in range(max_m + 1):
            terms.append(scale * power * lag)
            prev, lag = lag, ((2 * m + 1 - y) * lag - m * prev) / (m + 1)
            power *= x
        value = float(mpmath.fsum(terms))
    return value, _report([float(t) for t in terms], value, tol)


def expect_exp_fock_closed(gamma: float, n: int) -> float:
    return math.exp(-gamma * n)


def expect_exp_fock_series(
    gamma: float, n: int, max_m: int, tol: float = 1e-12
) -> tuple[float, SeriesReport]:
    """e^gamma sum_{m<=max_m} (1 - e^gamma)^m (m+n)! / (n! m!), with a report."""
    with mpmath.workdps(SERIES_DPS):
        x = -mpmath.expm1(gamma)
        term = mpmath.exp(gamma)
        terms = [term]
        for m in range(1, max_m + 1):
            term = term * x * (m + n) / m
            terms.append(term)
        value = float(mpmath.fsum(terms))
    return value, _report([float(t) for t in terms], value, tol)


def negbinom_partial_sum(x: float, n: int, max_extra: int) -> float:
    """sum_{k=n}^{n+max_extra} x^(k-n) C(k, n); tends to (1-x)^-(n+1) for |x| < 1."""
    term = 1.0
    terms = [term]
    for j in range(1, max_extra + 1):
        term *= x * (n + j) / j
        terms.append(term)
    return math.fsum(terms)


def negbinom_terms_needed(x: float, n: int, tol: float) -> int:
    """Smallest K whose tail after the partial sum is provably below ``tol``.

    Once the term ratio |x| (n+j+1)/(j+1) drops below r < 1 the tail is at
    most |term| r / (1 - r).
    """
    ax = abs(x)
    if ax >= 1:
        raise ValueError("series only converges for |x| < 1")
    if ax == 0:
        return 0
    term = 1.0
    j = 0
    while True:
        r = ax * (n + j + 1) / (j + 1)
        if r < 1 and term * r / (1 - r) < tol:
            return j
        j += 1
        term *= ax * (n + j) / j


Expansion = Union[OperatorExpr, OrderedExpansion]


def _monomials(e: Expansion):
    if isinstance(e, OrderedExpansion):
        for m, c in enumerate(e.coefficients):
            yield m, m, c
    else:
        for (p, q), c in e.terms.items():
            yield p, q, c


def _leak_bound(psi: np.ndarray, raise_by: int, dim: int) -> float:
    """Upper bound on sum_n |psi_n|^2 (n+r)!/n! over components pushed past the cutoff."""
    total = 0.0
    for n in range(max(0, dim - raise_by), dim):
        w = abs(psi[n])
        if w == 0:
            continue
        log_term = 2 * math.log(w) + math.lgamma(n + raise_by + 1) - math.lgamma(n + 1)
        if log_term > 700:
            return math.inf
        total += math.exp(log_term)
    return total


def term_expectations(
    e: Expansion, psi: StateVector, space: FockSpace, leak_tol: float = 1e-12
) -> list[tuple[int, int, complex]]:
    """Per-monomial contributions c <psi| monomial |psi>.

    Normal monomials only lower the state and are exact on the truncated
    vector.  Anti-normal monomials raise it first; if the part of the state
    pushed past the top level could change a contribution by more than
    ``leak_tol``, :class:`TruncationError` is raised.  For a state with
    finite support this is exactly the condition support + m < dim.
    """
    if psi.dim != space.dim:
        raise ValueError("state and space dimensions differ")
    ordering = e.ordering
    mons = list(_monomials(e))
    if not mons:
        return []
    top = max(max(p, q) for p, q, _ in mons)
    ladder = space.a if ordering is Ordering.NORMAL else space.adag
    stack = [np.asarray(psi.amplitudes)]
    for _ in range(top):
        stack.append(ladder @ stack[-1])

    out = []
    for p, q, c in mons:
        c = complex(c) if not isinstance(c, Fraction) else complex(float(c))
        if c == 0:
            out.append((p, q, 0j))
            continue
        if ordering is Ordering.ANTINORMAL:
            r = max(p, q)
            leak = abs(c) * _leak_bound(psi.amplitudes, r, space.dim)
            if leak > leak_tol:
                raise TruncationError(
                    f"a^{q} ad^{p} pushes the state past dimension {space.dim} "
                    f"(leak bound {leak:.3g} > {leak_tol:g})"
                )
        # normal: <a^p psi | a^q psi>;  antinormal: <ad^q psi | ad^p psi>
        left, right = (stack[p], stack[q]) if ordering is Ordering.NORMAL else (stack[q], stack[p])
        out.append((p, q, c * complex(np.vdot(left, right))))
    return out


def matrix_expectation(
    e: Expansion, psi: StateVector, space: FockSpace, leak_tol: float = 1e-12
) -> complex:
    """<psi| e |psi> by dense matrix-vector products in the truncated space."""
    contributions = [t for _, _, t in term_expectations(e, psi, space, leak_tol)]
    return complex(math.fsum(t.real for t in contributions), math.fsum(t.imag for t in contributions))


def matrix_expectation_report(
    e: OrderedExpansion, psi: StateVector, space: FockSpace, leak_tol: float = 1e-12, tol: float = 1e-12
) -> tuple[complex, SeriesReport]:
    contributions = [t for _, _, t in term_expectations(e, psi, space, leak_tol)]
    value = complex(math.fsum(t.real for t in contributions), math.fsum(t.imag for t in contributions))
    return value, _report(contributions, abs(value), tol)

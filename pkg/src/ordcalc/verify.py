"""Identity suites behind ``ordcalc verify``.

Each suite returns a list of :class:`Check` records holding the worst error
seen for one identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import fock
from .combinatorics import (
    FunctionTable,
    StirlingTable,
    falling_factorial,
    forward_difference,
    stirling2,
)
from .opalgebra import OperatorExpr, Ordering, parse, rewrite_antinormal, rewrite_normal
from .ordering import (
    antinormal_function,
    antinormal_power,
    lemma1_coefficients,
    lemma2_coefficients,
    normal_function,
    normal_power,
    taylor_difference_check,
)

MAX_K = 12
GAMMAS = (0.1, 0.5, 1.0)
LEMMA_M = 20
COHERENT_GAMMAS = (0.05, 0.1, 0.3, 0.6)
ALPHAS = (0.5, 1.0, 1 + 1j, 2.0)


@dataclass(frozen=True)
class Check:
    identity: str
    max_error: float
    tolerance: float
    cases: int

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "identity": self.identity,
            "passed": self.passed,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "cases": self.cases,
        }


def _exact_check(name: str, pairs) -> Check:
    # pairs yields (got, want) exact values; the error is the largest |got - want|.
    worst = 0
    n = 0
    for got, want in pairs:
        worst = max(worst, abs(got - want))
        n += 1
    return Check(name, float(worst), 0.0, n)


def _coeff_pairs(a, b):
    for m in range(max(len(a.coefficients), len(b.coefficients))):
        yield a[m], b[m]


def _oracle_pairs(closed, rewriter):
    for k in range(MAX_K + 1):
        e = closed(k)
        oracle = rewriter(parse(f"n^{k}"))
        keys = set(oracle.terms) | {(m, m) for m in range(e.max_m + 1)}
        for p, q in keys:
            want = e[p] if p == q else 0
            yield oracle.coefficient(p, q), want


def stirling_suite() -> list[Check]:
    table = StirlingTable(MAX_K + 1)
    ks = range(MAX_K + 1)
    checks = [
        _exact_check(
            "explicit sum == recurrence",
            ((stirling2(k, m), table(k, m)) for k in ks for m in range(k + 1)),
        ),
        _exact_check(
            "S(k+1,m+1) == (m+1) S(k,m+1) + S(k,m)",
            (
                (table(k + 1, m + 1), (m + 1) * table(k, m + 1) + table(k, m))
                for k in ks
                for m in range(k + 1)
            ),
        ),
        _exact_check(
            "x^k == sum_m S(k,m) x(x-1)..(x-m+1)",
            (
                (x**k, sum(table(k, m) * falling_factorial(x, m) for m in range(k + 1)))
                for k in ks
                for x in range(31)
            ),
        ),
        _exact_check("normal_power == rewrite oracle", _oracle_pairs(normal_power, rewrite_normal)),
        _exact_check(
            "antinormal_power == rewrite oracle", _oracle_pairs(antinormal_power, rewrite_antinormal)
        ),
    ]

    def function_pairs():
        for k in ks:
            f = FunctionTable.from_function(lambda x: x**k, k, "exact")
            g = FunctionTable.from_function(lambda u: (-u) ** k, k + 1, "exact")
            yield from _coeff_pairs(normal_function(f, k), normal_power(k))
            yield from _coeff_pairs(antinormal_function(g, k), antinormal_power(k))

    checks.append(_exact_check("function path == power path", function_pairs()))
    return checks


def _float_check(name: str, errors, tol: float) -> Check:
    errors = list(errors)
    return Check(name, max(errors, default=0.0), tol, len(errors))


def lemma_suite() -> list[Check]:
    def lemma1_errors():
        for gamma in GAMMAS:
            f = FunctionTable.from_function(lambda x: math.exp(-gamma * x), LEMMA_M, "float")
            got = normal_function(f, LEMMA_M)
            want = lemma1_coefficients(gamma, LEMMA_M)
            yield from (abs(got[m] - want[m]) for m in range(LEMMA_M + 1))

    def lemma2_errors():
        for gamma in GAMMAS:
            g = FunctionTable.from_function(lambda u: math.exp(gamma * u), LEMMA_M + 1, "float")
            got = antinormal_function(g, LEMMA_M)
            want = lemma2_coefficients(gamma, LEMMA_M)
            yield from (abs(got[m] - want[m]) for m in range(LEMMA_M + 1))

    def taylor_errors():
        gamma, max_k = 0.5, 60
        taylor = [(-gamma) ** k / math.factorial(k) for k in range(max_k + 1)]
        f = FunctionTable.from_function(lambda x: math.exp(-gamma * x), 10, "float")
        for m in range(11):
            got = taylor_difference_check(taylor, m, max_k)
            yield abs(got - forward_difference(f, m) / math.factorial(m))

    return [
        _float_check("lemma 1: difference path == closed form", lemma1_errors(), 1e-12),
        _float_check("lemma 2: difference path == closed form", lemma2_errors(), 1e-12),
        _float_check("Stirling-weighted Taylor sum == Delta^m f(0)/m!", taylor_errors(), 1e-12),
    ]


def _series_until_converged(fn: Callable, *args, start: int = 200, cap: int = 6400):
    m = start
    while True:
        value, report = fn(*args, m)
        if report.converged or m >= cap:
            return value
        m *= 2


def fock_suite() -> list[Check]:
    def moment_errors():
        for m in range(21):
            for alpha in (0.0, 0.5, 1.0, 1 + 1j, 1.5, 2.0, 2j):
                want = math.factorial(m) * fock.laguerre(m, -abs(alpha) ** 2)
                got = fock.antinormal_moment(m, alpha)
                yield abs(got - want) / abs(want)

    def matrix_moment_errors():
        space = fock.FockSpace(128)
        for alpha in (0.5, 1.0, 1 + 1j, 2.0):
            psi = fock.coherent_state(space, alpha)
            for m in range(11):
                mono = OperatorExpr(Ordering.ANTINORMAL, {(m, m): 1})
                got = fock.matrix_expectation(mono, psi, space)
                want = fock.antinormal_moment(m, alpha)
                yield abs(got - want) / max(1.0, abs(want))

    def coherent_errors():
        for gamma in COHERENT_GAMMAS:
            for alpha in ALPHAS:
                got = _series_until_converged(fock.expect_exp_coherent_series, gamma, alpha)
                yield abs(got - fock.expect_exp_coherent_closed(gamma, alpha))

    def coherent_matrix_errors():
        space = fock.FockSpace(64)
        for gamma in COHERENT_GAMMAS:
            for alpha in ALPHAS:
                psi = fock.coherent_state(space, alpha)
                got = fock.matrix_expectation(lemma1_coefficients(gamma, 200), psi, space)
                yield abs(got - fock.expect_exp_coherent_closed(gamma, alpha))

    def fock_errors():
        for gamma in (0.1, 0.3, 0.6):
            for n in range(11):
                got = _series_until_converged(fock.expect_exp_fock_series, gamma, n, start=500)
                yield abs(got - fock.expect_exp_fock_closed(gamma, n))

    def negbinom_errors():
        for x in (-0.6, -0.3, 0.0, 0.25, 0.5, 0.6):
            for n in range(9):
                want = (1 - x) ** (-n - 1)
                k = fock.negbinom_terms_needed(x, n, 1e-13)
                yield abs(fock.negbinom_partial_sum(x, n, k) - want)

    return [
        _float_check("a^m ad^m moment == m! L_m(-|alpha|^2) (relative)", moment_errors(), 1e-9),
        _float_check("matrix moment == analytic moment (relative)", matrix_moment_errors(), 1e-8),
        _float_check("coherent: anti-normal series == closed form", coherent_errors(), 1e-8),
        _float_check("coherent: normal-ordered matrix == closed form", coherent_matrix_errors(), 1e-8),
        _float_check("Fock: series == exp(-gamma n)", fock_errors(), 1e-8),
        _float_check("negative binomial partial sum == (1-x)^-(n+1)", negbinom_errors(), 1e-10),
        _float_check(
            "truncated [a, ad] == 1 below the top level",
            [fock.FockSpace(d).commutator_defect() for d in (2, 8, 64)],
            1e-12,
        ),
    ]


SUITES = {
    "stirling": stirling_suite,
    "lemmas": lemma_suite,
    "fock": fock_suite,
}


def run(suite: str) -> list[Check]:
    if suite == "all":
        return [c for fn in SUITES.values() for c in fn()]
    return SUITES[suite]()

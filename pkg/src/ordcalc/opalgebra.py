"""Exact single-mode boson algebra over words in a and a^dagger.

Expressions are parsed into raw words, then rewritten with nothing but the
commutator [a, a^dagger] = 1 until every word is normal ordered
(a^dagger left of a) or anti-normal ordered (a left of a^dagger).  The
result is an :class:`OperatorExpr` keyed by (dagger power, annihilator power).

This engine deliberately knows no closed forms; it is the brute-force oracle
the Stirling-number expansions are checked against.

Grammar (whitespace insignificant)::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' INT)?
    base   := 'a' | 'ad' | 'a†' | 'n' | INT | '(' expr ')'

A divisor must be a nonzero integer literal.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


class Ordering(str, enum.Enum):
    NORMAL = "normal"
    ANTINORMAL = "antinormal"


class Letter(str, enum.Enum):
    A = "a"
    ADAG = "ad"


# Internal word encoding: one character per letter.
_CODE = {Letter.A: "a", Letter.ADAG: "d"}
_DECODE = {"a": Letter.A, "d": Letter.ADAG}


@dataclass(frozen=True)
class RawWord:
    coefficient: Fraction
    letters: tuple[Letter, ...] = ()

    @property
    def code(self) -> str:
        return "".join(_CODE[x] for x in self.letters)

    @classmethod
    def from_code(cls, code: str, coefficient=1) -> "RawWord":
        return cls(Fraction(coefficient), tuple(_DECODE[c] for c in code))


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>a†|ad|a|n)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Token:
    kind: str  # 'int', 'name', 'op' or 'end'
    text: str
    offset: int  # character offset


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(source) and source[pos].isspace():
            pos += 1
        if pos == len(source):
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ParseError(
                f"unexpected character {source[pos]!r}",
                len(source[:pos].encode()),
                ("INT", "a", "ad", "a†", "n", "(", ")", "+", "-", "*", "/", "^"),
            )
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


# A parsed value is a list of (coefficient, code) pairs.
_Words = list


class _Parser:
    _BASE_START = ("INT", "a", "ad", "a†", "n", "(")

    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, message: str, expected: Iterable[str]) -> ParseError:
        offset = len(self.source[: self.tok.offset].encode())
        return ParseError(message, offset, expected)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> _Words:
        words = self.expr()
        if self.tok.kind != "end":
            raise self.fail(
                f"unexpected {self.tok.text!r}", ("+", "-", "*", "/", "^", "end of input")
            )
        return words

    def expr(self) -> _Words:
        negate = False
        if self.at_op("-"):
            negate = True
            self.i += 1
        words = self.term()
        if negate:
            words = [(-c, w) for c, w in words]
        while self.at_op("+", "-"):
            sign = 1 if self.tok.text == "+" else -1
            self.i += 1
            words = words + [(sign * c, w) for c, w in self.term()]
        return words

    def term(self) -> _Words:
        words = self.factor()
        while self.at_op("*", "/"):
            op = self.tok.text
            self.i += 1
            if op == "*":
                rhs = self.factor()
                words = [(c1 * c2, w1 + w2) for c1, w1 in words for c2, w2 in rhs]
            else:
                if self.tok.kind != "int":
                    raise self.fail("divisor must be an integer literal", ("INT",))
                d = int(self.tok.text)
                if d == 0:
                    raise self.fail("division by zero", ("nonzero INT",))
                self.i += 1
                words = [(c / d, w) for c, w in words]
        return words

    def factor(self) -> _Words:
        words = self.base()
        if self.at_op("^"):
            self.i += 1
            if self.tok.kind != "int":
                raise self.fail("exponent must be a nonnegative integer literal", ("INT",))
            power = int(self.tok.text)
            self.i += 1
            out: _Words = [(Fraction(1), "")]
            for _ in range(power):
                out = [(c1 * c2, w1 + w2) for c1, w1 in out for c2, w2 in words]
            words = out
        return words

    def base(self) -> _Words:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return [(Fraction(int(tok.text)), "")]
        if tok.kind == "name":
            self.i += 1
            return [(Fraction(1), {"a": "a", "ad": "d", "a†": "d", "n": "da"}[tok.text])]
        if self.at_op("("):
            self.i += 1
            words = self.expr()
            if not self.at_op(")"):
                raise self.fail("unbalanced parenthesis", (")",))
            self.i += 1
            return words
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise self.fail(f"unexpected {what}", self._BASE_START)


def parse(source: str) -> list[RawWord]:
    """Expand ``source`` into a list of coefficient-weighted words.

    >>> parse("a*ad - 1")
    [RawWord(coefficient=Fraction(1, 1), letters=(<Letter.A: 'a'>, <Letter.ADAG: 'ad'>)), RawWord(coefficient=Fraction(-1, 1), letters=())]
    """
    return [RawWord.from_code(w, c) for c, w in _Parser(source).parse()]


@dataclass(frozen=True)
class OperatorExpr:
    """Sum of ordered monomials with exact rational coefficients.

    Key (p, q) is (a^dagger)^p a^q under the normal tag and a^q (a^dagger)^p
    under the anti-normal tag.  Zero coefficients are never stored.
    """

    ordering: Ordering
    terms: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (p, q), c in self.terms.items():
            if p < 0 or q < 0:
                raise ValueError(f"negative power in key {(p, q)}")
            c = Fraction(c)
            if c:
                clean[(int(p), int(q))] = c
        object.__setattr__(self, "ordering", Ordering(self.ordering))
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self.ordering == other.ordering and self.terms == other.terms

    def __hash__(self):
        return hash((self.ordering, frozenset(self.terms.items())))

    def coefficient(self, p: int, q: int) -> Fraction:
        return self.terms.get((p, q), Fraction(0))

    def diagonal(self) -> dict[int, Fraction]:
        """Coefficients of the p == q monomials, keyed by p."""
        return {p: c for (p, q), c in self.terms.items() if p == q}

    def to_words(self) -> list[RawWord]:
        out = []
        for (p, q), c in self.terms.items():
            code = "d" * p + "a" * q if self.ordering is Ordering.NORMAL else "a" * q + "d" * p
            out.append(RawWord.from_code(code, c))
        return out

    def __str__(self) -> str:
        return print_expr(self)


def _inversion(ordering: Ordering) -> str:
    # The pair that must not appear in a canonical word.
    return "ad" if ordering is Ordering.NORMAL else "da"


def _key(code: str, ordering: Ordering) -> tuple[int, int]:
    return code.count("d"), code.count("a")


def _rewrite(words: Iterable[RawWord], ordering: Ordering, rng: random.Random | None):
    bad = _inversion(ordering)
    swapped = bad[::-1]
    sign = 1 if ordering is Ordering.NORMAL else -1
    pending: dict[str, Fraction] = {}
    done: dict[str, Fraction] = {}

    def add(code: str, c: Fraction) -> None:
        target = pending if bad in code else done
        target[code] = target.get(code, 0) + c

    for w in words:
        add(w.code, Fraction(w.coefficient))

    while pending:
        if rng is None:
            code = next(iter(pending))
            i = code.index(bad)
        else:
            code = rng.choice(list(pending))
            spots = [j for j in range(len(code) - 1) if code[j : j + 2] == bad]
            i = rng.choice(spots)
        c = pending.pop(code)
        if not c:
            continue
        # normal:     a ad -> ad a + 1
        # antinormal: ad a -> a ad - 1
        add(code[:i] + swapped + code[i + 2 :], c)
        add(code[:i] + code[i + 2 :], sign * c)

    terms: dict[tuple[int, int], Fraction] = {}
    for code, c in done.items():
        k = _key(code, ordering)
        terms[k] = terms.get(k, 0) + c
    return OperatorExpr(ordering, terms)


def rewrite_normal(words: Iterable[RawWord], rng: random.Random | None = None) -> OperatorExpr:
    """Canonical normal-ordered form of a sum of words.

    Repeatedly replaces the leftmost ``a ad`` with ``ad a + 1``.  Passing an
    ``rng`` picks the word and the inversion at random instead; the result
    must not depend on it.
    """
    return _rewrite(words, Ordering.NORMAL, rng)


def rewrite_antinormal(words: Iterable[RawWord], rng: random.Random | None = None) -> OperatorExpr:
    """Canonical anti-normal form, using ``ad a -> a ad - 1``."""
    return _rewrite(words, Ordering.ANTINORMAL, rng)


def rewrite(words: Iterable[RawWord], ordering: Ordering | str, rng=None) -> OperatorExpr:
    return _rewrite(words, Ordering(ordering), rng)


def _power(name: str, k: int) -> str:
    return name if k == 1 else f"{name}^{k}"


def _monomial(p: int, q: int, ordering: Ordering) -> str:
    parts = []
    if ordering is Ordering.NORMAL:
        parts += [_power("ad", p)] if p else []
        parts += [_power("a", q)] if q else []
    else:
        parts += [_power("a", q)] if q else []
        parts += [_power("ad", p)] if p else []
    return "*".join(parts)


def print_expr(e: OperatorExpr) -> str:
    """Deterministic text that :func:`parse` reads back to the same operator.

    Monomials are sorted by total degree, then dagger power, both descending.
    """
    if not e.terms:
        return "0"
    out = []
    for (p, q) in sorted(e.terms, key=lambda k: (-(k[0] + k[1]), -k[0], -k[1])):
        c = e.terms[(p, q)]
        mono = _monomial(p, q, e.ordering)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out)

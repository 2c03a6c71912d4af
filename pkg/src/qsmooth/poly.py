"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial is a finite map from exponent tuples to nonzero Fraction
coefficients.  The zero polynomial has an empty term map.  All operations
are pure; Polynomial values are immutable after construction and safe to
share between threads.

The text grammar accepted by :func:`parse` (and emitted by
:func:`poly_to_text`) uses declared variable names, integer or rational
literals such as ``7`` and ``3/4``, the operators ``+ - * ^`` and
parentheses.  Exponents are non-negative integer literals.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

Exponent = tuple  # tuple[int, ...], one entry per variable


class PolyError(ValueError):
    """Base error for polynomial construction and parsing problems."""


class ParseError(PolyError):
    """Syntax or naming error in polynomial text, with a position."""

    def __init__(self, message: str, text: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Fraction]):
        clean = {}
        for expt, coeff in terms.items():
            c = Fraction(coeff)
            if c == 0:
                continue
            if len(expt) != nvars or any(e < 0 for e in expt):
                raise PolyError(f"bad exponent {expt} for {nvars} variables")
            clean[tuple(expt)] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, {})

    @staticmethod
    def constant(nvars: int, value) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: Fraction(value)})

    @staticmethod
    def one(nvars: int) -> "Polynomial":
        return Polynomial.constant(nvars, 1)

    @staticmethod
    def variable(nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise PolyError(f"variable index {index} out of range for {nvars} variables")
        expt = [0] * nvars
        expt[index] = 1
        return Polynomial(nvars, {tuple(expt): Fraction(1)})

    @staticmethod
    def monomial(nvars: int, expt: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(nvars, {tuple(expt): Fraction(coeff)})

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def linear_part(self) -> "Polynomial":
        """The degree-1 homogeneous component."""
        return Polynomial(
            self.nvars, {e: c for e, c in self.terms.items() if sum(e) == 1}
        )

    # -- ring operations -------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise PolyError("variable count mismatch")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial(self.nvars, {e: co * c for e, co in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolyError("negative power of a polynomial")
        result = Polynomial.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus and evaluation ------------------------------------------

    def partial_derivative(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.nvars:
            raise PolyError(f"variable index {index} out of range for {self.nvars} variables")
        out: dict = {}
        for e, c in self.terms.items():
            k = e[index]
            if k == 0:
                continue
            de = list(e)
            de[index] = k - 1
            out[tuple(de)] = c * k
        return Polynomial(self.nvars, out)

    def substitute(
        self, assignment: Sequence["Polynomial"], out_nvars: Optional[int] = None
    ) -> "Polynomial":
        """Ring-homomorphism image sending variable i to ``assignment[i]``.

        All images must share a variable count, which becomes the result's;
        ``out_nvars`` is only needed when ``assignment`` is empty.
        """
        if len(assignment) != self.nvars:
            raise PolyError(
                f"arity mismatch: {self.nvars} variables, {len(assignment)} images"
            )
        if assignment:
            m = assignment[0].nvars
            if any(g.nvars != m for g in assignment):
                raise PolyError("assignment images disagree on variable count")
        elif out_nvars is None:
            raise PolyError("out_nvars required for an empty assignment")
        else:
            m = out_nvars
        result = Polynomial.zero(m)
        # cache successive powers of each image
        powers: list[list[Polynomial]] = [[Polynomial.one(m)] for _ in range(self.nvars)]
        for e, c in self.terms.items():
            term = Polynomial.constant(m, c)
            for i, k in enumerate(e):
                while len(powers[i]) <= k:
                    powers[i].append(powers[i][-1] * assignment[i])
                term = term * powers[i][k]
            result = result + term
        return result

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise PolyError("arity mismatch in evaluation")
        vals = [Fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(vals, e):
                if k:
                    term *= v**k
            total += term
        return total

    def weighted_degrees(self, weights: Sequence[int]) -> set:
        if len(weights) != self.nvars:
            raise PolyError("weight vector arity mismatch")
        return {sum(w * k for w, k in zip(weights, e)) for e in self.terms}

    def is_quasi_homogeneous(self, weights: Sequence[int]):
        """Return (True, degree) when all monomials share one weighted degree.

        The zero polynomial is quasi-homogeneous of undefined degree,
        reported as (True, None).
        """
        degs = self.weighted_degrees(weights)
        if not degs:
            return True, None
        if len(degs) == 1:
            return True, next(iter(degs))
        return False, None

    def __repr__(self):
        return f"Polynomial({self.nvars}, {poly_to_text(self, None)})"


# -- monomial orders -----------------------------------------------------


class MonomialOrder:
    """Total multiplicative monomial order with 1 minimal.

    kind is one of "grevlex", "lex", or "elim" (block order eliminating the
    first ``block`` variables, graded-reverse-lex inside each block).  An
    optional permutation reorders variables before comparison:
    effective exponent i is ``expt[permutation[i]]``.
    """

    __slots__ = ("kind", "block", "permutation")

    def __init__(self, kind: str = "grevlex", block: int = 0, permutation=None):
        if kind not in ("grevlex", "lex", "elim"):
            raise PolyError(f"unknown monomial order {kind!r}")
        if kind == "elim" and block <= 0:
            raise PolyError("elimination order needs a positive block size")
        self.kind = kind
        self.block = block
        self.permutation = tuple(permutation) if permutation is not None else None

    def _apply_perm(self, expt: Exponent) -> Exponent:
        if self.permutation is None:
            return expt
        return tuple(expt[p] for p in self.permutation)

    def key(self, expt: Exponent):
        """Sort key: ascending key order is ascending monomial order."""
        e = self._apply_perm(expt)
        if self.kind == "lex":
            return e
        if self.kind == "grevlex":
            return (sum(e), tuple(-v for v in reversed(e)))
        head, tail = e[: self.block], e[self.block :]
        return (
            sum(head),
            tuple(-v for v in reversed(head)),
            sum(tail),
            tuple(-v for v in reversed(tail)),
        )

    def compare(self, a: Exponent, b: Exponent) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def descriptor(self) -> str:
        perm = "" if self.permutation is None else f",perm={list(self.permutation)}"
        if self.kind == "elim":
            return f"elim({self.block}){perm}"
        return f"{self.kind}{perm}"

    def __repr__(self):
        return f"MonomialOrder({self.descriptor()})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(nvars: int, eliminate: Sequence[int]) -> MonomialOrder:
    """Block order making the ``eliminate`` variables dominate the rest."""
    eliminate = list(eliminate)
    rest = [i for i in range(nvars) if i not in set(eliminate)]
    return MonomialOrder("elim", block=len(eliminate), permutation=eliminate + rest)


# -- parsing ---------------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            return None, self.pos
        return self.text[self.pos], self.pos

    def next_token(self):
        """Return (kind, value, pos); kinds: num, name, op, end."""
        ch, pos = self.peek()
        if ch is None:
            return "end", None, pos
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            num = int(self.text[start : self.pos])
            # rational literal p/q
            save = self.pos
            self._skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == "/":
                self.pos += 1
                self._skip_ws()
                dstart = self.pos
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
                if dstart == self.pos:
                    raise ParseError("malformed rational literal", self.text, dstart)
                den = int(self.text[dstart : self.pos])
                if den == 0:
                    raise ParseError("zero denominator", self.text, dstart)
                return "num", Fraction(num, den), start
            self.pos = save
            return "num", Fraction(num), start
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            return "name", self.text[start : self.pos], start
        if ch in "+-*^()":
            self.pos += 1
            return "op", ch, pos
        raise ParseError(f"unexpected character {ch!r}", self.text, pos)


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(names)}
        self.nvars = len(names)
        self.tok = _Tokenizer(text)
        self.current = self.tok.next_token()

    def _advance(self):
        self.current = self.tok.next_token()

    def _expect_op(self, op: str):
        kind, value, pos = self.current
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", self.text, pos)
        self._advance()

    def parse(self) -> Polynomial:
        poly = self._expr()
        kind, _, pos = self.current
        if kind != "end":
            raise ParseError("trailing input", self.text, pos)
        return poly

    def _expr(self) -> Polynomial:
        kind, value, _ = self.current
        negate = False
        while kind == "op" and value in "+-":
            if value == "-":
                negate = not negate
            self._advance()
            kind, value, _ = self.current
        poly = self._term()
        if negate:
            poly = -poly
        while True:
            kind, value, _ = self.current
            if kind == "op" and value in "+-":
                sign = -1 if value == "-" else 1
                self._advance()
                # unary chains after a binary operator
                kind, value, _ = self.current
                while kind == "op" and value in "+-":
                    if value == "-":
                        sign = -sign
                    self._advance()
                    kind, value, _ = self.current
                rhs = self._term()
                poly = poly + (rhs if sign > 0 else -rhs)
            else:
                return poly

    def _term(self) -> Polynomial:
        poly = self._power()
        while True:
            kind, value, _ = self.current
            if kind == "op" and value == "*":
                self._advance()
                poly = poly * self._power()
            else:
                return poly

    def _power(self) -> Polynomial:
        base = self._primary()
        kind, value, pos = self.current
        if kind == "op" and value == "^":
            self._advance()
            kind, value, pos = self.current
            if kind == "op" and value == "-":
                raise ParseError("negative exponent", self.text, pos)
            if kind != "num" or value.denominator != 1:
                raise ParseError("exponent must be a non-negative integer", self.text, pos)
            self._advance()
            return base ** int(value)
        return base

    def _primary(self) -> Polynomial:
        kind, value, pos = self.current
        if kind == "num":
            self._advance()
            return Polynomial.constant(self.nvars, value)
        if kind == "name":
            if value not in self.names:
                raise ParseError(f"undeclared variable {value!r}", self.text, pos)
            self._advance()
            return Polynomial.variable(self.nvars, self.names[value])
        if kind == "op" and value == "(":
            self._advance()
            poly = self._expr()
            self._expect_op(")")
            return poly
        raise ParseError("malformed expression", self.text, pos)


def parse(text: str, names: Sequence[str]) -> Polynomial:
    """Parse polynomial text over the declared variable names."""
    return _Parser(text, names).parse()


def poly_to_text(poly: Polynomial, names: Optional[Sequence[str]] = None) -> str:
    """Canonical text: terms in descending graded-reverse-lex order,
    explicit ``*`` and ``^``.  parse(poly_to_text(p)) == p.
    """
    if names is None:
        names = [f"x{i}" for i in range(poly.nvars)]
    if poly.is_zero():
        return "0"
    items = sorted(poly.terms.items(), key=lambda t: GREVLEX.key(t[0]), reverse=True)
    pieces = []
    for i, (expt, coeff) in enumerate(items):
        sign = "-" if coeff < 0 else "+"
        mag = -coeff if coeff < 0 else coeff
        factors = []
        for j, k in enumerate(expt):
            if k == 1:
                factors.append(names[j])
            elif k > 1:
                factors.append(f"{names[j]}^{k}")
        if not factors or mag != 1:
            factors.insert(0, str(mag))
        body = "*".join(factors)
        if i == 0:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


def random_polynomial(rng, nvars: int, max_degree: int, max_terms: int,
                      coeff_bound: int = 9) -> Polynomial:
    """Random sparse polynomial for property tests (deterministic under rng)."""
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        expt = [0] * nvars
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            expt[rng.randrange(nvars)] += 1
        num = rng.randint(-coeff_bound, coeff_bound)
        den = rng.randint(1, 4)
        if num:
            terms[tuple(expt)] = terms.get(tuple(expt), Fraction(0)) + Fraction(num, den)
    return Polynomial(nvars, {e: c for e, c in terms.items() if c})

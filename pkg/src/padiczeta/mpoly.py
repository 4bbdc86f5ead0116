"""Exact multivariate polynomial arithmetic over the integers.

Polynomials are stored as a map from exponent vectors to arbitrary
precision integer coefficients; no zero coefficient is ever kept.  The
module covers parsing of the CLI polynomial grammar, evaluation modulo
p^M, formal partial derivatives, and the shift-rescale substitution
f(x0 + p^L y) = p^e * f_L(y) used by the desingularization charts.

Coefficients live in Z, a subring of Z_p for every p, which matches the
setting where all input series have coefficients in the valuation ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    DimensionMismatch,
    NegativeExponent,
    PolynomialSyntaxError,
    VariableOutOfRange,
    ZeroPolynomial,
)
from .padic import PAdicApprox, int_valuation


@dataclass(frozen=True)
class MPoly:
    """Integer-coefficient polynomial in n variables.

    terms maps exponent tuples of length n to nonzero coefficients.  The
    instance is immutable; all arithmetic returns new polynomials.
    """

    n: int
    terms: Mapping[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for expo, coeff in self.terms.items():
            if len(expo) != self.n:
                raise DimensionMismatch(f"exponent vector {expo} has length != {self.n}")
            if coeff != 0:
                clean[tuple(expo)] = coeff
        object.__setattr__(self, "terms", clean)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(n: int) -> "MPoly":
        return MPoly(n, {})

    @staticmethod
    def constant(n: int, value: int) -> "MPoly":
        return MPoly(n, {(0,) * n: value})

    @staticmethod
    def variable(n: int, j: int) -> "MPoly":
        """The variable x_j, 1-based."""
        expo = tuple(1 if i == j - 1 else 0 for i in range(n))
        return MPoly(n, {expo: 1})

    # -- ring operations --------------------------------------------------

    def _same_n(self, other: "MPoly") -> None:
        if self.n != other.n:
            raise DimensionMismatch("mixed variable counts")

    def __add__(self, other: "MPoly") -> "MPoly":
        self._same_n(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            terms[expo] = terms.get(expo, 0) + coeff
        return MPoly(self.n, terms)

    def __neg__(self) -> "MPoly":
        return MPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other: "MPoly") -> "MPoly":
        self._same_n(other)
        terms: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                terms[expo] = terms.get(expo, 0) + c1 * c2
        return MPoly(self.n, terms)

    def __pow__(self, k: int) -> "MPoly":
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: int) -> "MPoly":
        return MPoly(self.n, {e: c * v for e, v in self.terms.items()})

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(a == 0 for a in e) for e in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.n, 0)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def content_valuation(self, p: int) -> int | None:
        """Minimum p-adic valuation over the coefficients; None if zero."""
        vals = [int_valuation(c, p) for c in self.terms.values()]
        if not vals:
            return None
        return min(v for v in vals if v is not None)

    # -- evaluation and calculus -------------------------------------------

    def evaluate(self, point: Sequence[int], modulus: int | None = None) -> int:
        """Value at an integer point, optionally reduced modulo `modulus`."""
        if len(point) != self.n:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.n}")
        total = 0
        for expo, coeff in self.terms.items():
            term = coeff
            for x, a in zip(point, expo):
                if a:
                    term *= pow(x, a, modulus) if modulus else x**a
            total += term
            if modulus:
                total %= modulus
        return total % modulus if modulus else total

    def partial(self, j: int) -> "MPoly":
        """Formal partial derivative with respect to x_j, 1-based."""
        terms: dict[tuple[int, ...], int] = {}
        for expo, coeff in self.terms.items():
            a = expo[j - 1]
            if a == 0:
                continue
            new = list(expo)
            new[j - 1] = a - 1
            key = tuple(new)
            terms[key] = terms.get(key, 0) + coeff * a
        return MPoly(self.n, terms)

    def substitute_affine(self, shift: Sequence[int], scale: int) -> "MPoly":
        """Return f(shift + scale * y) expanded exactly over the integers."""
        if len(shift) != self.n:
            raise DimensionMismatch("shift vector length mismatch")
        result = MPoly.zero(self.n)
        # x_j -> shift_j + scale*y_j, expanded via repeated multiplication
        substs = [
            MPoly.constant(self.n, shift[j]) + MPoly.variable(self.n, j + 1).scale(scale)
            for j in range(self.n)
        ]
        for expo, coeff in self.terms.items():
            term = MPoly.constant(self.n, coeff)
            for j, a in enumerate(expo):
                if a:
                    term = term * substs[j] ** a
            result = result + term
        return result

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms, key=lambda e: (-sum(e), tuple(-a for a in e)))
        pieces = []
        for expo in ordered:
            coeff = self.terms[expo]
            factors = []
            if abs(coeff) != 1 or all(a == 0 for a in expo):
                factors.append(str(abs(coeff)))
            for j, a in enumerate(expo):
                if a == 1:
                    factors.append(f"x{j + 1}")
                elif a > 1:
                    factors.append(f"x{j + 1}^{a}")
            text = "*".join(factors)
            if not pieces:
                pieces.append(text if coeff > 0 else f"-{text}")
            else:
                pieces.append(f"+ {text}" if coeff > 0 else f"- {text}")
        return " ".join(pieces)


# -- parser -----------------------------------------------------------------
#
# expr   := ['-'] term (('+'|'-') term)*
# term   := factor ('*' factor)*
# factor := base ['^' natural]
# base   := natural | variable | '(' expr ')'
#
# Implicit multiplication is not part of the grammar.


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.pos = 0

    def error(self, message: str, cls=PolynomialSyntaxError):
        raise cls(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer literal")
        return int(self.text[start:self.pos])

    def base(self) -> MPoly:
        ch = self.peek()
        if ch == "(":
            self.take()
            inner = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return inner
        if ch == "x":
            self.take()
            start = self.pos
            idx = self.integer()
            if not (1 <= idx <= self.n):
                self.pos = start
                self.error(f"variable x{idx} out of range 1..{self.n}", VariableOutOfRange)
            return MPoly.variable(self.n, idx)
        if ch.isdigit():
            return MPoly.constant(self.n, self.integer())
        self.error("expected a number, variable, or '('")

    def factor(self) -> MPoly:
        b = self.base()
        if self.peek() == "^":
            self.take()
            if self.peek() == "-":
                self.error("exponents must be nonnegative", NegativeExponent)
            expo = self.integer()
            return b**expo
        return b

    def term(self) -> MPoly:
        result = self.factor()
        while self.peek() == "*":
            self.take()
            result = result * self.factor()
        return result

    def expr(self) -> MPoly:
        negate = False
        if self.peek() == "-":
            self.take()
            negate = True
        result = self.term()
        if negate:
            result = -result
        while True:
            ch = self.peek()
            if ch == "+":
                self.take()
                result = result + self.term()
            elif ch == "-":
                self.take()
                result = result - self.term()
            else:
                return result

    def parse(self) -> MPoly:
        result = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected character {self.text[self.pos]!r}")
        return result


def parse_polynomial(text: str, n: int) -> MPoly:
    """Parse the polynomial grammar into an expanded canonical MPoly.

    Variables are x1..xn; the operators are + - * ^ with parentheses, and
    ^ takes a nonnegative integer literal.  Errors carry the offset of
    the offending character.
    """
    return _Parser(text, n).parse()


# -- systems ------------------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PolySystem:
    """Constraints f_1..f_(l-1) cutting out the variety, plus the target f_l.

    The variety {f_1 = ... = f_(l-1) = 0} inside Z_p^n is expected to be
    a closed submanifold of dimension n - l + 1 >= 1; the target is the
    phase / congruence polynomial studied along it.  Optional resolution
    data is a user-supplied list of (N_i, v_i) pairs.
    """

    p: int
    n: int
    constraints: tuple[MPoly, ...]
    target: MPoly
    resolution_data: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(self.constraints) < 1:
            raise ValueError("at least one constraint is required (l >= 2)")
        if self.l > self.n:
            raise ValueError(f"need l <= n, got l={self.l}, n={self.n}")
        for f in self.constraints:
            if f.n != self.n:
                raise DimensionMismatch("constraint in wrong variable count")
        if self.target.n != self.n:
            raise DimensionMismatch("target in wrong variable count")
        if self.target.is_zero():
            raise ZeroPolynomial("target polynomial must be nonzero")
        if self.target.is_constant():
            raise ValueError("target must be nonconstant (it has to vanish somewhere)")
        if self.resolution_data is not None:
            data = tuple((int(N), int(v)) for N, v in self.resolution_data)
            if any(N < 1 or v < 1 for N, v in data):
                raise ValueError("resolution data entries must be positive")
            object.__setattr__(self, "resolution_data", data)

    @property
    def l(self) -> int:
        return len(self.constraints) + 1

    @property
    def dim(self) -> int:
        """Dimension n - l + 1 of the constrained variety."""
        return self.n - self.l + 1

    def all_polys(self) -> tuple[MPoly, ...]:
        return self.constraints + (self.target,)


def system_from_strings(
    p: int,
    n: int,
    constraints: Sequence[str],
    target: str,
    resolution_data=None,
) -> PolySystem:
    return PolySystem(
        p=p,
        n=n,
        constraints=tuple(parse_polynomial(s, n) for s in constraints),
        target=parse_polynomial(target, n),
        resolution_data=resolution_data,
    )


def evaluate_mod(f: MPoly, point: Sequence[int], p: int, M: int) -> PAdicApprox:
    """Value of f at the point, exact modulo p^M."""
    return PAdicApprox(p, f.evaluate(point, p**M), M)


def jacobian(
    system: PolySystem,
    point: Sequence[int],
    rows: Sequence[int] | None = None,
    M: int = 1,
) -> list[list[PAdicApprox]]:
    """Formal partial derivatives (df_i/dx_j) evaluated at the point mod p^M.

    rows selects which of f_1..f_l to include (1-based); the default is
    the constraints only.
    """
    if rows is None:
        rows = list(range(1, system.l))
    polys = system.all_polys()
    out = []
    for i in rows:
        f = polys[i - 1]
        out.append([evaluate_mod(f.partial(j), point, system.p, M) for j in range(1, system.n + 1)])
    return out


def jacobian_int(system: PolySystem, point: Sequence[int], rows: Sequence[int], modulus: int) -> list[list[int]]:
    """Same as jacobian but as plain integers mod `modulus` (internal fast path)."""
    polys = system.all_polys()
    return [
        [polys[i - 1].partial(j).evaluate(point, modulus) for j in range(1, system.n + 1)]
        for i in rows
    ]


def shift_rescale(f: MPoly, x0: Sequence[int], L: int, p: int) -> tuple[int, MPoly]:
    """Write f(x0 + p^L y) = p^e * f_L(y) with f_L not divisible by p.

    The expansion is exact integer arithmetic and e is the minimum p-adic
    valuation over the expanded coefficients, so f_L has at least one
    unit coefficient.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot shift-rescale the zero polynomial")
    if L < 0:
        raise ValueError("L must be >= 0")
    expanded = f.substitute_affine(list(x0), p**L)
    e = expanded.content_valuation(p)
    assert e is not None
    scale = p**e
    return e, MPoly(f.n, {expo: c // scale for expo, c in expanded.terms.items()})

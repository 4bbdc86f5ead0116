"""Dirac-delta regularization of surface integrals.

delta_r is p^(r(l-1)) on constraint vectors lying in (p^r Z_p)^(l-1) and
0 elsewhere, so it integrates to 1 and concentrates, as r grows, an
ambient integral over Z_p^n onto the constraint variety.  The finite-
level approximations I_r computed here come with certified tail bounds:
points whose integrand is not exactly determined at the scan depth
contribute a bounded, explicitly accounted remainder, and everything
resolved is summed as exact rationals (times exact character values for
twisted integrands).

The stabilization check compares I_r against the surface-measure zeta
value from the shell machinery; agreement within the certified tail for
all r past some threshold is the verified statement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .characters import MultChar, chi_value
from .errors import BudgetExceeded
from .mpoly import PolySystem
from .padic import ScaledUnit, int_valuation, psi_ratio
from .support import Support
from .variety import DEFAULT_BUDGET
from .zeta import build_shell_table

# The delta_r scale factor p^(r(l-1)); isolated so falsification tests can
# patch it and watch the limit check trip.
def _delta_scale(p: int, r: int, l: int) -> int:
    return p ** (r * (l - 1))


@dataclass(frozen=True)
class DeltaApprox:
    """Finite-level value of I_r with a certified truncation bound.

    value collects every exactly-resolved contribution; the true I_r
    differs from it by at most tail_bound, which decreases geometrically
    in the scan depth.
    """

    r: int
    s: int
    chi: MultChar | None
    value: Fraction | complex
    tail_bound: Fraction


def _ambient_walk(system: PolySystem, r: int, depth: int, support: Support | None, budget: int):
    """Yield (point, level, kind, mult) over the constraint-filtered tree.

    Nodes are descended while the integrand is undetermined: constraints
    filter digits up to level r, and below that a subtree is emitted as
    soon as the target's valuation (kind "resolved", with the exact
    value) is known.  kind "deep" marks depth-limit leaves whose target
    is still indistinguishable from 0.  Once constraints and support are
    settled, coordinates absent from the target are pinned instead of
    enumerated; mult counts the collapsed sibling classes.
    """
    p, n = system.p, system.n
    spent = 0
    all_digits = list(itertools.product(range(p), repeat=n))
    active = [i for i in range(n) if any(expo[i] for expo in system.target.terms)]
    inactive = n - len(active)
    active_digits = []
    for combo in itertools.product(range(p), repeat=len(active)):
        digit = [0] * n
        for i, d in zip(active, combo):
            digit[i] = d
        active_digits.append(tuple(digit))

    def descend(x: tuple[int, ...], j: int, mult: int):
        nonlocal spent
        spent += 1
        if spent > budget:
            raise BudgetExceeded(f"ambient walk exceeded budget {budget}")
        if support is not None and not support.admits_prefix(x, j, p):
            return
        settled = j >= r and (support is None or j >= support.level)
        if settled:
            value = system.target.evaluate(x, p**depth)
            v = int_valuation(value % p**j, p)
            if v is not None:
                yield x, j, ("resolved", v, value), mult
                return
            if j == depth:
                yield x, j, ("deep", None, 0), mult
                return
        elif j == depth:
            # constraints or support still unresolved at the scan depth
            yield x, j, ("deep", None, 0), mult
            return
        step = p**j
        modulus = step * p
        if settled:
            # no filtering below: collapse the target-inactive coordinates
            for digit in active_digits:
                child = tuple(c + step * d for c, d in zip(x, digit))
                yield from descend(child, j + 1, mult * p**inactive)
            return
        for digit in all_digits:
            child = tuple(c + step * d for c, d in zip(x, digit))
            if j < r and any(f.evaluate(child, modulus) != 0 for f in system.constraints):
                continue
            yield from descend(child, j + 1, mult)

    for x0 in itertools.product(range(p), repeat=n):
        if r >= 1 and any(f.evaluate(x0, p) != 0 for f in system.constraints):
            continue
        yield from descend(x0, 1, 1)


def delta_integral(
    system: PolySystem,
    s: int,
    chi: MultChar | None,
    r: int,
    depth: int,
    support: Support | None = None,
    budget: int = DEFAULT_BUDGET,
) -> DeltaApprox:
    """I_r: the delta_r-regularized ambient integral of chi(ac f_l) |f_l|^s.

    s must be a positive integer so shell contributions are exactly
    summable rationals with a provable geometric tail; depth > r is the
    scan level.  Twisted integrands additionally need the angular class
    resolved, and points where it is not are moved into the tail bound.
    """
    if s < 1:
        raise ValueError("s must be a positive integer")
    if depth <= r:
        raise ValueError("scan depth must exceed r")
    p, l = system.p, system.l
    scale = _delta_scale(p, r, l)
    c_needed = 0 if chi is None or chi.is_trivial() else max(chi.conductor, 1)
    exact = Fraction(0)
    twisted = 0.0 + 0.0j
    tail = Fraction(0)
    for _, j, (kind, v, value), mult in _ambient_walk(system, r, depth, support, budget):
        coset = Fraction(mult, p ** (j * system.n))
        if kind == "deep":
            tail += scale * coset * Fraction(1, p ** (depth * s))
            continue
        magnitude = Fraction(1, p ** (v * s))
        if c_needed == 0:
            exact += scale * coset * magnitude
        elif v + c_needed <= j:
            u = (value // p**v) % p**c_needed
            twisted += chi_value(chi, u) * float(scale * coset * magnitude)
        else:
            tail += scale * coset * magnitude  # angular class unresolved
    if c_needed == 0:
        return DeltaApprox(r=r, s=s, chi=chi, value=exact, tail_bound=tail)
    return DeltaApprox(r=r, s=s, chi=chi, value=twisted, tail_bound=tail)


def delta_oscillatory(
    system: PolySystem,
    z: ScaledUnit,
    r: int,
    support: Support | None = None,
    budget: int = DEFAULT_BUDGET,
) -> complex:
    """The delta_r-regularized ambient sum of Psi(z f_l), computed exactly.

    Psi(z f_l(x)) is locally constant at level m = ord of |z|, so the
    walk terminates with no tail: every subtree is resolved once its
    target value mod p^m and its constraint digits are fixed.
    """
    p, l = system.p, system.l
    m = z.m
    scale = _delta_scale(p, r, l)
    total = 0.0 + 0.0j
    spent = 0
    digits = list(itertools.product(range(p), repeat=system.n))

    def descend(x: tuple[int, ...], j: int):
        nonlocal total, spent
        spent += 1
        if spent > budget:
            raise BudgetExceeded(f"ambient walk exceeded budget {budget}")
        if support is not None and not support.admits_prefix(x, j, p):
            return
        if j >= max(r, m) and (support is None or j >= support.level):
            # Psi(z f_l) is locally constant from here on: the subtree sum
            # is exact with no tail
            value = system.target.evaluate(x, p**m)
            total += psi_ratio(z.u * value, p, m) * scale / p ** (j * system.n)
            return
        step = p**j
        modulus = step * p
        for digit in digits:
            child = tuple(c + step * d for c, d in zip(x, digit))
            if j < r and any(f.evaluate(child, modulus) != 0 for f in system.constraints):
                continue
            descend(child, j + 1)

    for x0 in itertools.product(range(p), repeat=system.n):
        if r >= 1 and any(f.evaluate(x0, p) != 0 for f in system.constraints):
            continue
        descend(x0, 1)
    return total


def delta_normalization(p: int, l: int, r: int, depth: int) -> Fraction:
    """sum over u mod p^depth of delta_r(u) p^(-depth (l-1)), by enumeration.

    Equals 1 exactly for r <= depth; kept brute-force so it can serve as
    an independent check of the scale factor.
    """
    count = 0
    modulus = p**depth
    threshold = p**r
    for u in itertools.product(range(modulus), repeat=l - 1):
        if all(x % threshold == 0 for x in u):
            count += 1
    return Fraction(count * _delta_scale(p, r, l), modulus ** (l - 1))


@dataclass(frozen=True)
class DeltaLimitRow:
    r: int
    value: Fraction | complex
    tail_bound: Fraction
    surface_value: Fraction | complex
    gap: float


@dataclass(frozen=True)
class DeltaLimitReport:
    rows: tuple[DeltaLimitRow, ...]
    passed: bool
    r0: int | None  # smallest r from which every later row is within its tail


def delta_limit_check(
    system: PolySystem,
    s: int,
    chi: MultChar | None,
    r_values: Sequence[int],
    depth: int,
    support: Support | None = None,
    budget: int = DEFAULT_BUDGET,
    zeta_depth: int = 12,
) -> DeltaLimitReport:
    """Compare I_r against the surface-measure zeta value as r grows.

    The surface side is the reconstructed (validated) zeta evaluated at
    t = p^(-s), exact for the trivial character; the check passes when
    |I_r - Z| <= tail_bound(I_r) for every r >= some r0 in the range.
    """
    from .ratfn import reconstruct_rational

    p = system.p
    c_level = 1 if chi is None or chi.is_trivial() else max(chi.conductor, 1)
    table = build_shell_table(system, zeta_depth, c_level=c_level, support=support, budget=budget)
    t = Fraction(1, p**s)
    if chi is None or chi.is_trivial():
        surface = reconstruct_rational(table.trivial_series()).eval_exact(t)
    else:
        surface = 0.0 + 0.0j
        for u in table.unit_classes():
            series_fn = table.class_fn(u)
            surface += chi_value(chi, u) * float(series_fn.eval_exact(t))
    rows = []
    for r in sorted(r_values):
        approx = delta_integral(system, s, chi, r, depth, support, budget)
        gap = abs(complex(approx.value) - complex(surface))
        rows.append(
            DeltaLimitRow(
                r=r,
                value=approx.value,
                tail_bound=approx.tail_bound,
                surface_value=surface,
                gap=gap,
            )
        )
    r0 = None
    for i, row in enumerate(rows):
        if all(later.gap <= float(later.tail_bound) for later in rows[i:]):
            r0 = row.r
            break
    return DeltaLimitReport(rows=tuple(rows), passed=r0 is not None, r0=r0)

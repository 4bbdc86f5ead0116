"""Enumeration and counting of constraint varieties modulo p^m.

Three enumeration engines live here:

* a brute-force scan of the full residue grid, the independent oracle
  every other counting path is checked against;
* a Hensel-lifting tree for systems with good reduction, which walks the
  congruence solutions level by level, solving one small F_p linear
  system per node, and never materializes more than a root-to-leaf path;
* a filtered congruence tree that works without any smoothness
  assumption (used for bad-reduction candidate centers, the ambient
  integrals, and the image oracle).

Image-level operations (counting the reduction of the variety's Z_p
points rather than congruence solutions) dispatch on good reduction and
pull in the chart decomposition lazily to avoid an import cycle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BadReductionInput, BudgetExceeded, NotStabilized
from .mpoly import MPoly, PolySystem
from .padic import int_valuation
from .support import Support

DEFAULT_BUDGET = 10**7


class _BudgetMeter:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(f"enumeration budget {self.limit} exhausted")


# -- F_p linear algebra -------------------------------------------------------


def fp_rank(matrix: Sequence[Sequence[int]], p: int) -> int:
    rows = [[x % p for x in row] for row in matrix]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@dataclass
class _FpSolver:
    """Precomputed RREF of an F_p matrix for repeated affine solves."""

    p: int
    pivot_cols: list[int]
    free_cols: list[int]
    reduced: list[list[int]]  # RREF of A
    transform: list[list[int]]  # T with T*A = reduced

    @staticmethod
    def build(matrix: Sequence[Sequence[int]], p: int) -> "_FpSolver":
        rows = [[x % p for x in row] for row in matrix]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        trans = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)]
        pivot_cols: list[int] = []
        r = 0
        for c in range(ncols):
            pivot = next((i for i in range(r, nrows) if rows[i][c]), None)
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            trans[r], trans[pivot] = trans[pivot], trans[r]
            inv = pow(rows[r][c], -1, p)
            rows[r] = [x * inv % p for x in rows[r]]
            trans[r] = [x * inv % p for x in trans[r]]
            for i in range(nrows):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
                    trans[i] = [(x - f * y) % p for x, y in zip(trans[i], trans[r])]
            pivot_cols.append(c)
            r += 1
        free_cols = [c for c in range(ncols) if c not in pivot_cols]
        return _FpSolver(p, pivot_cols, free_cols, rows, trans)

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    def solve_affine(self, rhs: Sequence[int]) -> Iterator[tuple[int, ...]]:
        """All solutions d of A d = rhs over F_p, in lexicographic order of d."""
        p = self.p
        c = [sum(t * b for t, b in zip(row, rhs)) % p for row in self.transform]
        for i in range(self.rank, len(self.reduced)):
            if c[i] % p:
                return  # inconsistent
        ncols = len(self.reduced[0]) if self.reduced else 0
        solutions = []
        for assignment in itertools.product(range(p), repeat=len(self.free_cols)):
            d = [0] * ncols
            for col, val in zip(self.free_cols, assignment):
                d[col] = val
            for i, col in enumerate(self.pivot_cols):
                acc = c[i]
                for fcol, val in zip(self.free_cols, assignment):
                    acc -= self.reduced[i][fcol] * val
                d[col] = acc % p
            solutions.append(tuple(d))
        solutions.sort()
        yield from solutions


# -- verdicts and counters ----------------------------------------------------


@dataclass(frozen=True)
class GoodReductionVerdict:
    good: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.good


@dataclass
class FiberCount:
    """Count of variety points at one level, optionally split into shells.

    by_shell maps (ord of the target value, angular class mod p^c) to a
    count; points whose target valuation cannot be resolved at this
    level go to `deep`, so count == sum(by_shell.values()) + deep when
    shell data is present.
    """

    m: int
    count: int
    by_shell: dict[tuple[int, int], int] | None = None
    deep: int = 0


def _classify_shell(
    value: int, p: int, level: int, angular_level: int
) -> tuple[int, int] | None:
    """(ord, ac mod p^c) of a residue known mod p^level, None if unresolved."""
    v = int_valuation(value % p**level, p)
    if v is None or v + angular_level > level:
        return None
    return v, (value // p**v) % p**angular_level


def brute_force_points(
    system: PolySystem,
    m: int,
    budget: int = DEFAULT_BUDGET,
    angular_level: int | None = None,
    support: Support | None = None,
    collect: bool = False,
) -> FiberCount | tuple[FiberCount, list[tuple[int, ...]]]:
    """Exhaustive count of congruence solutions modulo p^m.

    Scans all p^(m n) residue vectors, so it is only usable at desk
    scale, but it is the oracle every cleverer path is compared with.
    """
    p, n = system.p, system.n
    total = p ** (m * n)
    if total > budget:
        raise BudgetExceeded(f"p^(m*n) = {total} exceeds budget {budget}")
    modulus = p**m
    result = FiberCount(m=m, count=0, by_shell={} if angular_level else None)
    points = []
    for x in itertools.product(range(modulus), repeat=n):
        if support is not None and not support.admits_prefix(x, m, p):
            continue
        if any(f.evaluate(x, modulus) for f in system.constraints):
            continue
        result.count += 1
        if collect:
            points.append(x)
        if angular_level:
            shell = _classify_shell(system.target.evaluate(x, modulus), p, m, angular_level)
            if shell is None:
                result.deep += 1
            else:
                result.by_shell[shell] = result.by_shell.get(shell, 0) + 1
    return (result, points) if collect else result


def good_reduction_test(system: PolySystem, budget: int = DEFAULT_BUDGET) -> GoodReductionVerdict:
    """Check the constraint Jacobian has full rank at every F_p point.

    Bad verdicts carry a witness residue where the rank drops.
    """
    p, n = system.p, system.n
    if p**n > budget:
        raise BudgetExceeded(f"p^n = {p**n} exceeds budget {budget}")
    rows = list(range(1, system.l))
    partials = [[f.partial(j) for j in range(1, n + 1)] for f in system.constraints]
    for x in itertools.product(range(p), repeat=n):
        if any(f.evaluate(x, p) for f in system.constraints):
            continue
        matrix = [[df.evaluate(x, p) for df in row] for row in partials]
        if fp_rank(matrix, p) != system.l - 1:
            return GoodReductionVerdict(False, witness=x)
    return GoodReductionVerdict(True)


# -- Hensel tree ---------------------------------------------------------------


class HenselLifter:
    """Digit-lifting engine for constraints with good reduction mod p.

    The F_p Jacobian only depends on a point's reduction mod p, so one
    solver is prepared per root in V(F_p) and reused along the whole
    subtree above it.
    """

    def __init__(self, p: int, n: int, constraints: Sequence[MPoly], budget: int = DEFAULT_BUDGET):
        self.p = p
        self.n = n
        self.constraints = tuple(constraints)
        if p**n > budget:
            raise BudgetExceeded(f"p^n = {p**n} exceeds budget {budget}")
        self._partials = [
            [f.partial(j) for j in range(1, n + 1)] for f in self.constraints
        ]
        self._solvers: dict[tuple[int, ...], _FpSolver] = {}
        self._roots: list[tuple[int, ...]] = []
        expected_rank = len(self.constraints)
        for x in itertools.product(range(p), repeat=n):
            if any(f.evaluate(x, p) for f in self.constraints):
                continue
            solver = _FpSolver.build(
                [[df.evaluate(x, p) for df in row] for row in self._partials], p
            )
            if solver.rank != expected_rank:
                raise BadReductionInput(
                    f"Jacobian rank {solver.rank} < {expected_rank} at {x}"
                )
            self._roots.append(x)
            self._solvers[x] = solver

    @property
    def dim(self) -> int:
        return self.n - len(self.constraints)

    def roots(self) -> list[tuple[int, ...]]:
        return list(self._roots)

    def children(self, x: tuple[int, ...], j: int) -> list[tuple[int, ...]]:
        """Lifts of a level-j solution to level j+1, lexicographic in the digit."""
        p = self.p
        step = p**j
        modulus = step * p
        rhs = []
        for f in self.constraints:
            value = f.evaluate(x, modulus)
            assert value % step == 0, "node does not satisfy constraints at its level"
            rhs.append((-(value // step)) % p)
        solver = self._solvers[tuple(c % p for c in x)]
        return [
            tuple(c + step * d for c, d in zip(x, digit))
            for digit in solver.solve_affine(rhs)
        ]


def _lifter_for(system: PolySystem, budget: int) -> HenselLifter:
    return HenselLifter(system.p, system.n, system.constraints, budget)


def iter_hensel_points(
    system: PolySystem,
    m: int,
    budget: int = DEFAULT_BUDGET,
    support: Support | None = None,
) -> Iterator[tuple[int, ...]]:
    """Stream the level-m congruence solutions of a good-reduction system.

    Depth-first, lexicographic in the digit vectors, one root-to-leaf
    path in memory at a time.
    """
    lifter = _lifter_for(system, budget)
    meter = _BudgetMeter(budget)
    p = system.p

    def descend(x: tuple[int, ...], j: int) -> Iterator[tuple[int, ...]]:
        meter.spend()
        if support is not None and not support.admits_prefix(x, j, p):
            return
        if j == m:
            yield x
            return
        for child in lifter.children(x, j):
            yield from descend(child, j + 1)

    for root in lifter.roots():
        yield from descend(root, 1)


def hensel_enumerate(
    system: PolySystem,
    m: int,
    budget: int = DEFAULT_BUDGET,
    angular_level: int | None = None,
    support: Support | None = None,
) -> FiberCount:
    """Count level-m solutions by actual tree traversal (not the count law).

    The good-reduction count law #V(F_p) * p^((m-1)(n-l+1)) is what tests
    compare this against; the traversal never assumes it.
    """
    result = FiberCount(m=m, count=0, by_shell={} if angular_level else None)
    modulus = system.p**m
    for x in iter_hensel_points(system, m, budget, support):
        result.count += 1
        if angular_level:
            shell = _classify_shell(
                system.target.evaluate(x, modulus), system.p, m, angular_level
            )
            if shell is None:
                result.deep += 1
            else:
                result.by_shell[shell] = result.by_shell.get(shell, 0) + 1
    return result


def hensel_lift_point(
    system: PolySystem, root: tuple[int, ...], level: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, ...]:
    """One deterministic lift of an F_p root to a level-`level` solution.

    Follows the lexicographically smallest digit at every step.
    """
    lifter = _lifter_for(system, budget)
    x = root
    for j in range(1, level):
        children = lifter.children(x, j)
        if not children:
            raise BadReductionInput(f"no lift above {x} at level {j}")
        x = children[0]
    return x


# -- filtered congruence tree (no smoothness assumed) --------------------------


def iter_congruence_points(
    p: int,
    n: int,
    polys: Sequence[MPoly],
    m: int,
    budget: int = DEFAULT_BUDGET,
    support: Support | None = None,
) -> Iterator[tuple[int, ...]]:
    """Stream all x mod p^m with every poly = 0 mod p^m, level by level.

    Works for any system, with no smoothness assumption: for a level-j
    solution x, the digits d lifting it satisfy the affine F_p system
    grad f_i(x) . d = -f_i(x)/p^j, which holds for j >= 1 because the
    Taylor tail carries p^(2j).  Rank-deficient rows just mean fewer or
    no conditions, so the solver handles singular points too.  The
    budget meters node visits.
    """
    meter = _BudgetMeter(budget)
    polys = list(polys)
    partials = [[f.partial(j) for j in range(1, n + 1)] for f in polys]
    solvers: dict[tuple[int, ...], _FpSolver] = {}

    def solver_at(x: tuple[int, ...]) -> _FpSolver:
        key = tuple(c % p for c in x)
        if key not in solvers:
            solvers[key] = _FpSolver.build(
                [[df.evaluate(key, p) for df in row] for row in partials], p
            )
        return solvers[key]

    def descend(x: tuple[int, ...], j: int) -> Iterator[tuple[int, ...]]:
        meter.spend()
        if support is not None and not support.admits_prefix(x, j, p):
            return
        if j == m:
            yield x
            return
        step = p**j
        modulus = step * p
        rhs = []
        for f in polys:
            value = f.evaluate(x, modulus)
            assert value % step == 0
            rhs.append((-(value // step)) % p)
        for digit in solver_at(x).solve_affine(rhs):
            yield from descend(tuple(c + step * d for c, d in zip(x, digit)), j + 1)

    if m == 0:
        yield (0,) * n
        return
    for x in itertools.product(range(p), repeat=n):
        if all(f.evaluate(x, p) == 0 for f in polys):
            yield from descend(x, 1)


# -- image-level operations ----------------------------------------------------


def image_oracle(
    system: PolySystem,
    m: int,
    buffer: int,
    budget: int = DEFAULT_BUDGET,
) -> set[tuple[int, ...]]:
    """Overapproximate the reduction image mod p^m by deep projection.

    Enumerates congruence solutions at level m + buffer, projects them
    mod p^m, and insists the result agrees with buffer + 1 (raising
    NotStabilized otherwise).  Stability is evidence, not proof; the
    decomposition cross-checks catch a wrong-but-stable buffer.
    """
    modulus = system.p**m

    def projected(extra: int) -> set[tuple[int, ...]]:
        return {
            tuple(c % modulus for c in x)
            for x in iter_congruence_points(
                system.p, system.n, system.constraints, m + extra, budget
            )
        }

    base = projected(buffer)
    recheck = projected(buffer + 1)
    if base != recheck:
        raise NotStabilized(
            f"image projection not stable at level {m}+{buffer} (sizes "
            f"{len(base)} vs {len(recheck)})"
        )
    return base


def reduction_image_count(system: PolySystem, m: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of classes mod p^m hit by actual Z_p points of the variety.

    Good reduction: equals the congruence count (Hensel).  Bad
    reduction: computed through the good-reduction chart decomposition,
    whose pieces are disjoint cosets.
    """
    if m == 0:
        return 1
    if good_reduction_test(system, budget):
        return hensel_enumerate(system, m, budget).count
    from .smoothing import measure_charts  # deferred: smoothing imports this module

    decomposition = measure_charts(system, budget)
    return decomposition.image_count(m, budget)


# -- critical locus probe -------------------------------------------------------


def _det_int(matrix: list[list[int]]) -> int:
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    if size == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = 0
    for j in range(size):
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = matrix[0][j] * _det_int(minor)
        total += term if j % 2 == 0 else -term
    return total


@dataclass(frozen=True)
class CriticalLocusReport:
    """Finite-level probe for critical residues of the target on the variety.

    An empty suspect list is evidence (not proof) that the critical
    locus sits inside the target's zero set; the probe can flag false
    suspects whose minors gain valuation at deeper levels, but it never
    misses a genuine critical residue at this level.
    """

    level: int
    suspects: tuple[tuple[int, ...], ...]

    @property
    def clean(self) -> bool:
        return not self.suspects


def critical_locus_probe(
    system: PolySystem, M: int, budget: int = DEFAULT_BUDGET
) -> CriticalLocusReport:
    """List residues mod p^M where all l x l Jacobian minors vanish mod p^M.

    Suspects additionally satisfy the constraints mod p^M and have
    target valuation < M (deeper target zeros are allowed by the
    hypothesis being probed).
    """
    p, n, l = system.p, system.n, system.l
    modulus = p**M
    polys = system.all_polys()
    partials = [[f.partial(j) for j in range(1, n + 1)] for f in polys]
    suspects = []
    for x in iter_congruence_points(p, n, system.constraints, M, budget):
        target_value = system.target.evaluate(x, modulus)
        v = int_valuation(target_value, p)
        if v is None or v >= M:
            continue
        jac = [[df.evaluate(x, modulus) for df in row] for row in partials]
        all_zero = True
        for cols in itertools.combinations(range(n), l):
            minor = [[jac[i][c] for c in cols] for i in range(l)]
            if _det_int(minor) % modulus:
                all_zero = False
                break
        if all_zero:
            suspects.append(x)
    return CriticalLocusReport(level=M, suspects=tuple(suspects))


def point_dump_rows(points: Iterator[tuple[int, ...]], level: int) -> Iterator[list]:
    """CSV rows `level,x1,...,xn` for a point stream."""
    for x in points:
        yield [level, *x]

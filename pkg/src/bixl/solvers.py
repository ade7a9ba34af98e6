"""The three solving algorithms for bilinear systems.

* ``y_xl``: echelonize the degree-<=d y-Macaulay matrix and harvest rows of
  total degree <= 1.
* ``y_mxl``: staged mutant variant; degree falls found during elimination are
  re-injected as generators and multiplied by y-monomials until a fixpoint,
  then the degree bound is raised.
* ``y_hxl``: hybrid guess-and-determine over ``a_x`` x-variables and ``a_y``
  y-variables; each partial evaluation is screened with the witness
  consistency test (Gaussian or Wiedemann backend) and promising guesses are
  completed with ``y_xl``.

Every returned solution is verified by evaluation before it leaves a solver.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .linalg import in_row_space, row_echelon, wiedemann_consistent
from .macaulay import build_module_matrix, build_y_macaulay
from .polyring import (
    BilinearSequence,
    XLinPoly,
    evaluate,
    substitute,
)

__all__ = [
    "SOLUTION_FOUND",
    "NO_SOLUTION",
    "UNDETERMINED",
    "BudgetExceededError",
    "SolveReport",
    "HybridConfig",
    "y_xl",
    "y_mxl",
    "y_hxl",
    "witness_consistency_test",
    "extract_solution",
    "brute_force",
]

SOLUTION_FOUND = "solution_found"
NO_SOLUTION = "no_solution"
UNDETERMINED = "undetermined"

DEFAULT_BRUTE_FORCE_BUDGET = 1 << 24
DEFAULT_ENUM_BUDGET = 1 << 12


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive step would exceed its configured budget."""


@dataclass
class SolveReport:
    """Outcome of one solver run.

    ``solution`` is set only for ``solution_found`` and always satisfies
    ``evaluate(B, u, v) == 0`` (checked before the report is built);
    ``solving_degree`` is present exactly when ``linear_polys`` is nonempty.
    """

    status: str
    solution: tuple[np.ndarray, np.ndarray] | None = None
    solving_degree: int | None = None
    per_degree_ranks: dict[int, int] = field(default_factory=dict)
    linear_polys: list[XLinPoly] = field(default_factory=list)
    mutant_counts: list[int] = field(default_factory=list)
    guesses_tried: int = 0
    seed: int | None = None
    wall_time: float = 0.0
    notes: tuple[str, ...] = ()

    @property
    def found(self) -> bool:
        return self.status == SOLUTION_FOUND


@dataclass(frozen=True)
class HybridConfig:
    """Guess budget for y-HXL: a_x in [0, n_x] (a_x == n_x is the exhaustive
    over-x limit) and a_y in [0, n_y)."""

    a_x: int
    a_y: int
    backend: str = "gaussian"
    lexicographic: bool = True

    def __post_init__(self) -> None:
        if self.backend not in ("gaussian", "wiedemann"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.a_x < 0 or self.a_y < 0:
            raise ValueError("guess counts must be nonnegative")


def _verify(B: BilinearSequence, u, v) -> bool:
    return not evaluate(B, u, v).any()


def _row_to_poly(row: np.ndarray, cols, p) -> XLinPoly:
    terms = {}
    for idx in np.flatnonzero(row):
        c = cols[idx]
        terms[((-1 if c.x_index is None else c.x_index), c.y_part.exponents)] = int(row[idx])
    return XLinPoly(p.n_x, p.n_y, p.q, terms)


def _low_degree_rows(ech, mac, p) -> tuple[list[XLinPoly], bool]:
    """Echelon rows of total degree <= 1, plus whether the constant
    polynomial 1 is among them (pivot in the constant column).

    Columns are sorted degree-descending, so a row whose pivot sits in the
    degree-<=1 block is supported entirely inside that block; the rows found
    here span exactly the degree-<=1 part of the row space.
    """
    polys: list[XLinPoly] = []
    has_one = False
    cols = mac.columns
    for t, j in enumerate(ech.pivot_cols):
        if cols[j].degree > 1:
            continue
        poly = _row_to_poly(ech.matrix[t], cols, p)
        if poly.degree == 0:
            has_one = True
        polys.append(poly)
    return polys, has_one


def extract_solution(
    B: BilinearSequence,
    linear_polys: list[XLinPoly],
    *,
    redo_degree: int | None = None,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> tuple[np.ndarray, np.ndarray] | None:
    """Complete a set of degree-<=1 module polynomials to a verified zero.

    Solves the linear system the polynomials impose on (x, y).  When it is
    underdetermined, small solution sets are enumerated within
    ``enum_budget`` candidate evaluations; otherwise constant-determined
    variables are substituted into B and the reduced system is re-solved
    with y-XL at ``redo_degree``.  Returns None when no verified point is
    reachable within budget.
    """
    p = B.params
    if not linear_polys:
        return None
    nv = p.n_x + p.n_y
    rows = []
    for poly in linear_polys:
        if poly.degree > 1:
            raise ValueError("extract_solution expects polynomials of degree <= 1")
        coeffs, const = poly.linear_coefficients()
        rows.append(np.concatenate([coeffs, [(-const) % p.q]]))
    aug = np.array(rows, dtype=np.int64)
    ech = row_echelon(aug, p.q, reduced=True)
    piv = list(ech.pivot_cols)
    if nv in piv:
        return None  # 0 = nonzero constant: inconsistent
    free = [j for j in range(nv) if j not in piv]
    base = np.zeros(nv, dtype=np.int64)
    for t, j in enumerate(piv):
        base[j] = ech.matrix[t, nv]

    def candidate(assign: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
        point = base.copy()
        for j, val in assign.items():
            point[j] = val
        for t, j in enumerate(piv):
            acc = int(ech.matrix[t, nv])
            for fj in free:
                cf = int(ech.matrix[t, fj])
                if cf:
                    acc -= cf * point[fj]
            point[j] = acc % p.q
        return point[: p.n_x], point[p.n_x :]

    if not free:
        u, v = candidate({})
        return (u, v) if _verify(B, u, v) else None

    if p.q ** len(free) <= enum_budget:
        for vals in itertools.product(range(p.q), repeat=len(free)):
            u, v = candidate(dict(zip(free, vals)))
            if _verify(B, u, v):
                return u, v
        return None

    # too many free variables to enumerate: substitute what is pinned down
    fixed_x = {j: int(base[j]) for t, j in enumerate(piv) if j < p.n_x and not ech.matrix[t, free].any()}
    fixed_y = {
        j - p.n_x: int(base[j])
        for t, j in enumerate(piv)
        if j >= p.n_x and not ech.matrix[t, free].any()
    }
    if (fixed_x or fixed_y) and redo_degree is not None and len(fixed_y) < p.n_y:
        reduced, keep_x, keep_y = substitute(B, fixed_x, fixed_y)
        sub = y_xl(reduced, redo_degree, enum_budget=enum_budget)
        if sub.found:
            uu = np.zeros(p.n_x, dtype=np.int64)
            vv = np.zeros(p.n_y, dtype=np.int64)
            for j, val in fixed_x.items():
                uu[j] = val
            for j, val in fixed_y.items():
                vv[j] = val
            su, sv = sub.solution
            for pos, j in enumerate(keep_x):
                uu[j] = su[pos]
            for pos, j in enumerate(keep_y):
                vv[j] = sv[pos]
            if _verify(B, uu, vv):
                return uu, vv
    return None


def y_xl(
    B: BilinearSequence,
    d: int | None = None,
    *,
    order: str = "grlex",
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> SolveReport:
    """One round of y-XL at degree d (default: the witness bound).

    Builds M_{y,<=d}(B), echelonizes, and extracts all rows of total degree
    <= 1.  Status is ``solution_found`` when extraction yields a verified
    zero, ``no_solution`` when the constant polynomial 1 lies in the row
    space, else ``undetermined``.
    """
    t0 = time.perf_counter()
    p = B.params
    if d is None:
        d = analysis.twit_bound(p.n_x, p.n_y, p.m)
    if d < 2:
        raise ValueError("y-XL needs degree at least 2")
    mac = build_y_macaulay(B, d, order=order)
    ech = row_echelon(mac.entries, p.q, reduced=False)
    linear, has_one = _low_degree_rows(ech, mac, p)
    report = SolveReport(
        status=UNDETERMINED,
        per_degree_ranks={d: ech.rank},
        linear_polys=linear,
        solving_degree=d if linear else None,
    )
    if has_one:
        report.status = NO_SOLUTION
    elif linear:
        point = extract_solution(B, linear, redo_degree=d, enum_budget=enum_budget)
        if point is not None:
            report.status = SOLUTION_FOUND
            report.solution = point
    report.wall_time = time.perf_counter() - t0
    return report


def y_mxl(
    B: BilinearSequence,
    d_max: int | None = None,
    *,
    order: str = "grlex",
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> SolveReport:
    """Staged MutantXL restricted to y-multipliers.

    For d = 3, 4, ... the current generators are expanded into a Macaulay
    matrix at degree d and echelonized; every echelon row of degree < d is a
    degree fall and joins the generator set (all generators stay x-linear,
    so re-multiplication by y-monomials keeps the module framing).  The
    inner loop repeats until the rank stops growing, then d increments.
    Stops at the first degree producing a polynomial of total degree <= 1.
    """
    t0 = time.perf_counter()
    p = B.params
    if d_max is None:
        d_max = analysis.twit_bound(p.n_x, p.n_y, p.m) + 1
    if d_max < 3:
        raise ValueError("y-MXL needs a degree bound of at least 3")
    base = [XLinPoly.from_bilinear(f, p.q) for f in B.polys]
    gens: list[XLinPoly] = list(base)
    known_low = len(base)
    report = SolveReport(status=UNDETERMINED)
    for d in range(3, d_max + 1):
        prev_rank = -1
        while True:
            mac = build_module_matrix(gens, p, d, order=order)
            ech = row_echelon(mac.entries, p.q, reduced=False)
            report.per_degree_ranks[d] = ech.rank
            linear, has_one = _low_degree_rows(ech, mac, p)
            if linear:
                report.linear_polys = linear
                report.solving_degree = d
                if has_one:
                    report.status = NO_SOLUTION
                else:
                    point = extract_solution(B, linear, redo_degree=d, enum_budget=enum_budget)
                    if point is not None:
                        report.status = SOLUTION_FOUND
                        report.solution = point
                report.wall_time = time.perf_counter() - t0
                return report
            if ech.rank == prev_rank:
                break
            prev_rank = ech.rank
            # every echelon row of degree < d is a (possibly old) degree
            # fall; the low-degree basis replaces the generator set, which
            # keeps the span and re-multiplies new mutants automatically
            low = [
                _row_to_poly(ech.matrix[t], mac.columns, p)
                for t, j in enumerate(ech.pivot_cols)
                if mac.columns[j].degree < d  # pivot degree == row degree
            ]
            report.mutant_counts.append(max(0, len(low) - known_low))
            known_low = len(low)
            if low:
                gens = low
    report.wall_time = time.perf_counter() - t0
    return report


def witness_consistency_test(B: BilinearSequence, d: int, *, order: str = "grlex") -> bool:
    """True iff 1 lies in the span of the rows of M_{y,<=d}(B), i.e. the
    linear system z M = e with e the constant-column indicator is solvable.
    A true verdict certifies that B = 0 has no solution."""
    mac = build_y_macaulay(B, d, order=order)
    const_col = mac.constant_column()
    if const_col is None:
        return False  # homogeneous column set: constants are not reachable
    e = np.zeros(len(mac.columns), dtype=np.int64)
    e[const_col] = 1
    ech = row_echelon(mac.entries, B.params.q, reduced=False)
    return in_row_space(ech, e, B.params.q)


def y_hxl(
    B: BilinearSequence,
    cfg: HybridConfig,
    *,
    order: str = "grlex",
    rng: np.random.Generator | None = None,
    wiedemann_trials: int = 8,
    completion_slack: int = 2,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> SolveReport:
    """Hybrid guess-and-determine solver.

    Enumerates (u, v) over F^{a_x} x F^{a_y} in lexicographic order, forms
    the partial evaluation, and tests solvability of z M = e at the
    guess-adjusted degree.  A guess whose linear system is inconsistent
    (1 not yet in the module) is completed via y-XL; when completion stalls
    on a non-generic instance the degree is escalated by up to
    ``completion_slack``, which either completes the guess or certifies
    1 in the module after all (the guess is dead).  If every guess ends
    certified-consistent the whole system has no solution; a guess that
    survives all escalations uncompleted withholds that verdict.
    """
    t0 = time.perf_counter()
    p = B.params
    if not (0 <= cfg.a_x <= p.n_x) or not (0 <= cfg.a_y < p.n_y):
        raise ValueError("invalid guess counts for this system")
    d = analysis.hxl_degree(p.n_x, p.n_y, p.m, cfg.a_x, cfg.a_y)
    if rng is None:
        rng = np.random.default_rng(0)
    guesses = itertools.product(
        itertools.product(range(p.q), repeat=cfg.a_x),
        itertools.product(range(p.q), repeat=cfg.a_y),
    )
    if not cfg.lexicographic:
        pool = list(guesses)
        rng.shuffle(pool)
        guesses = iter(pool)
    report = SolveReport(status=UNDETERMINED, per_degree_ranks={})
    failed_completions = 0
    tried = 0
    for u_guess, v_guess in guesses:
        tried += 1
        part, keep_x, keep_y = substitute(
            B, dict(enumerate(u_guess)), dict(enumerate(v_guess))
        )
        if cfg.backend == "wiedemann":
            # Alg.-2 style screen: certified consistency kills the guess, and
            # only the consistent side of the verdict is certain
            mac = build_y_macaulay(part, d, order=order)
            e = np.zeros(len(mac.columns), dtype=np.int64)
            const_col = mac.constant_column()
            if const_col is not None:
                e[const_col] = 1
            verdict = wiedemann_consistent(
                mac.entries, e, p.q, trials=wiedemann_trials, rng=rng
            )
            if verdict.consistent:
                continue
        dead = False
        for dd in range(d, d + completion_slack + 1):
            sub = y_xl(part, dd, order=order, enum_budget=enum_budget)
            if sub.status == NO_SOLUTION:
                dead = True  # 1 in the module at degree dd: certified
                break
            if sub.found:
                su, sv = sub.solution
                uu = np.zeros(p.n_x, dtype=np.int64)
                vv = np.zeros(p.n_y, dtype=np.int64)
                uu[: cfg.a_x] = u_guess
                vv[: cfg.a_y] = v_guess
                for pos, j in enumerate(keep_x):
                    uu[j] = su[pos]
                for pos, j in enumerate(keep_y):
                    vv[j] = sv[pos]
                if _verify(B, uu, vv):
                    report.status = SOLUTION_FOUND
                    report.solution = (uu, vv)
                    report.solving_degree = sub.solving_degree
                    report.linear_polys = sub.linear_polys
                    report.guesses_tried = tried
                    report.wall_time = time.perf_counter() - t0
                    return report
        if not dead:
            failed_completions += 1
    report.guesses_tried = tried
    if failed_completions == 0:
        report.status = NO_SOLUTION
    else:
        report.notes = (
            f"{failed_completions} guess(es) passed the consistency screen but "
            "could not be completed; no-solution verdict withheld",
        )
    report.wall_time = time.perf_counter() - t0
    return report


def brute_force(
    B: BilinearSequence,
    *,
    budget: int = DEFAULT_BRUTE_FORCE_BUDGET,
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All common zeros of B by exhaustive evaluation, in lexicographic
    order of (u, v).  Intended as the verification oracle for small systems.

    Raises:
        BudgetExceededError: when q**(n_x + n_y) exceeds ``budget``.
    """
    p = B.params
    total = p.q ** (p.n_x + p.n_y)
    if total > budget:
        raise BudgetExceededError(
            f"{total} points exceed the brute-force budget of {budget}"
        )
    n_u = p.q**p.n_x
    n_v = p.q**p.n_y
    U = np.array(list(itertools.product(range(p.q), repeat=p.n_x)), dtype=np.int64).reshape(n_u, p.n_x)
    V = np.array(list(itertools.product(range(p.q), repeat=p.n_y)), dtype=np.int64).reshape(n_v, p.n_y)
    ok = np.ones((n_u, n_v), dtype=bool)
    for f in B.polys:
        vals = (U @ f.A @ V.T + (U @ f.b)[:, None] + (V @ f.c)[None, :] + f.d0) % p.q
        ok &= vals == 0
        if not ok.any():
            return []
    out = []
    for iu, iv in zip(*np.nonzero(ok)):
        out.append((tuple(int(t) for t in U[iu]), tuple(int(t) for t in V[iv])))
    return out

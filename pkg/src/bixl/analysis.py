"""Degree formulas, semiregularity checks, syzygy construction and cost
estimation for over-determined bilinear systems.

The three closed-form degrees for a y-semiregular sequence of shape
(n_x, n_y, m) with n_x + n_y <= m:

* degree of regularity    ceil(n_x (n_y - 1) / (m - n_x)) + 1
* first fall degree       min{ d : d > n_x (n_y - 1) / (m - n_x) + 1 }
* witness degree bound    ceil(n_y (n_x + 1) / (m - n_x - 1)) + 1

Cost estimates are reported as log2 of a field-multiplication count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import rank as gf_rank
from .macaulay import build_y_macaulay, degree_part
from .polyring import (
    BilinearSequence,
    Params,
    YPoly,
    YPolyVector,
    jacobian_x,
    random_sequence,
    verify_syzygy,
)

__all__ = [
    "DegreeProfile",
    "CostEstimate",
    "dreg_formula",
    "tff_formula",
    "twit_bound",
    "hxl_degree",
    "degree_profile",
    "is_y_semiregular",
    "semiregularity_trial",
    "empirical_first_fall",
    "empirical_dreg",
    "cramer_syzygy",
    "estimate",
    "optimal_hybrid",
    "ALGORITHMS",
]

ALGORITHMS = ("y-xl", "y-mxl", "y-hxl-ge", "y-hxl-w", "f4", "exhaustive")


def _comb(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def dreg_formula(n_x: int, n_y: int, m: int) -> int:
    """y-degree of regularity of a y-semiregular sequence."""
    if m <= n_x:
        raise ValueError("need m > n_x")
    return math.ceil(n_x * (n_y - 1) / (m - n_x)) + 1


def tff_formula(n_x: int, n_y: int, m: int) -> int:
    """Smallest integer strictly above n_x(n_y - 1)/(m - n_x) + 1: the
    y-first-fall degree of a y-semiregular sequence."""
    if m <= n_x:
        raise ValueError("need m > n_x")
    return math.floor(n_x * (n_y - 1) / (m - n_x) + 1) + 1


def twit_bound(n_x: int, n_y: int, m: int) -> int:
    """Witness-degree bound; requires the over-determinedness margin
    n_x + n_y <= m - 2."""
    if n_x + n_y > m - 2:
        raise ValueError("witness bound needs n_x + n_y <= m - 2")
    return math.ceil(n_y * (n_x + 1) / (m - n_x - 1)) + 1


def hxl_degree(n_x: int, n_y: int, m: int, a_x: int, a_y: int) -> int:
    """Working degree of the hybrid solver for a given guess budget."""
    den = m - n_x + a_x - 1
    if den <= 0:
        raise ValueError("need m - n_x + a_x - 1 > 0")
    return math.ceil((n_y - a_y) * (n_x - a_x + 1) / den) + 1


@dataclass(frozen=True)
class DegreeProfile:
    """The three theoretical degrees for one parameter set.

    ``d_wit`` is None when m < n_x + n_y + 2 (the bound does not apply).
    ``divisible`` flags (m - n_x) | n_x(n_y - 1), exactly the case where
    d_ff = d_reg + 1.
    """

    d_reg: int
    d_ff: int
    d_wit: int | None
    divisible: bool


def degree_profile(n_x: int, n_y: int, m: int) -> DegreeProfile:
    if n_x + n_y > m:
        raise ValueError("profile defined for determined or over-determined shapes")
    divisible = (n_x * (n_y - 1)) % (m - n_x) == 0
    d_wit = twit_bound(n_x, n_y, m) if n_x + n_y <= m - 2 else None
    return DegreeProfile(dreg_formula(n_x, n_y, m), tff_formula(n_x, n_y, m), d_wit, divisible)


# ---------------------------------------------------------------------------
# rank-based measurements
# ---------------------------------------------------------------------------


def semiregular_rank_target(n_x: int, n_y: int, m: int) -> int:
    """Expected rank of the full degree-<=d~ y-Macaulay matrix of a
    y-semiregular homogeneous sequence: all parts below d~ have full row
    rank (the hockey-stick sum m*C(n_y + d~ - 3, d~ - 3)) and the part at
    d~ reaches its column count n_x*C(n_y + d~ - 2, d~ - 1)."""
    d = dreg_formula(n_x, n_y, m)
    return m * _comb(n_y + d - 3, d - 3) + n_x * _comb(n_y + d - 2, d - 1)


def is_y_semiregular(B: BilinearSequence, order: str = "grlex") -> bool:
    """Single aggregate rank check of the degree-<=d~ y-Macaulay matrix.

    For homogeneous input the degree parts occupy disjoint column blocks, so
    the total rank equals the sum of the per-part ranks and hitting the
    aggregate target forces every part to be at full rank.
    """
    p = B.params
    if p.n_x + p.n_y > p.m:
        raise ValueError("semiregularity test needs n_x + n_y <= m")
    if not B.is_homogeneous:
        raise ValueError("semiregularity is defined on homogeneous sequences")
    d = dreg_formula(p.n_x, p.n_y, p.m)
    mac = build_y_macaulay(B, d, order=order)
    return gf_rank(mac.entries, p.q) == semiregular_rank_target(p.n_x, p.n_y, p.m)


def semiregularity_trial(p: Params, rng: np.random.Generator) -> bool:
    """One run of the randomized semiregularity experiment: sample a uniform
    homogeneous sequence and test it."""
    return is_y_semiregular(random_sequence(p, homogeneous=True, rng=rng))


def empirical_first_fall(B: BilinearSequence, d_max: int, order: str = "grlex") -> int | None:
    """Smallest d <= d_max at which the degree-d part of the quadratic part
    has row-deficient rank (a nontrivial y-syzygy appears); None if no
    deficiency shows up."""
    tilde = B.quadratic_part()
    p = B.params
    for d in range(2, d_max + 1):
        rows = p.m * _comb(p.n_y + d - 3, d - 2)
        if rows == 0:
            continue
        if gf_rank(degree_part(tilde, d, order=order).entries, p.q) < rows:
            return d
    return None


def empirical_dreg(B: BilinearSequence, d_max: int, order: str = "grlex") -> int | None:
    """Smallest d <= d_max at which the degree-d part spans every degree-d
    monomial linear in x; None if never reached."""
    p = B.params
    if not B.is_homogeneous:
        raise ValueError("empirical degree of regularity needs homogeneous input")
    for d in range(2, d_max + 1):
        cols = p.n_x * _comb(p.n_y + d - 2, d - 1)
        if gf_rank(degree_part(B, d, order=order).entries, p.q) == cols:
            return d
    return None


def cramer_syzygy(B: BilinearSequence, rows: Sequence[int]) -> YPolyVector:
    """Degree-n_x syzygy supported on a chosen set of n_x + 1 rows.

    The entries are the alternating-sign n_x x n_x minors of the x-Jacobian
    restricted to those rows; Laplace expansion of the Jacobian augmented
    with any of its own columns shows the combination vanishes.
    """
    p = B.params
    rows = sorted(int(r) for r in rows)
    if len(set(rows)) != p.n_x + 1:
        raise ValueError(f"need {p.n_x + 1} distinct row indices")
    if rows[0] < 0 or rows[-1] >= p.m:
        raise ValueError("row index out of range")
    if p.m <= p.n_x:
        raise ValueError("need m > n_x")
    jac = jacobian_x(B)
    sub = [jac[i] for i in rows]

    def det(mat: list[list[YPoly]]) -> YPoly:
        n = len(mat)
        if n == 0:
            return YPoly.constant(1, p.n_y, p.q)
        if n == 1:
            return mat[0][0]
        acc = YPoly.zero(p.n_y, p.q)
        for i in range(n):
            minor = [row[1:] for t, row in enumerate(mat) if t != i]
            term = mat[i][0] * det(minor)
            acc = acc + term.scale((-1) ** i)
        return acc

    entries = [YPoly.zero(p.n_y, p.q) for _ in range(p.m)]
    for pos, i in enumerate(rows):
        minor = [sub[t] for t in range(p.n_x + 1) if t != pos]
        entries[i] = det(minor).scale((-1) ** pos)
    return YPolyVector(tuple(entries))


# ---------------------------------------------------------------------------
# cost estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostEstimate:
    """log2 field-multiplication count for one (algorithm, parameters) pair."""

    algorithm: str
    log2_mults: float
    q: int
    n_x: int
    n_y: int
    m: int
    a_x: int | None = None
    a_y: int | None = None
    omega: float | None = None
    backend: str | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.log2_mults) or self.log2_mults < 0:
            raise ValueError("cost must be finite and nonnegative")


def _log2_xl_shape(m: int, n_x_eff: int, n_y_eff: int, d: int, omega: float) -> float:
    rows = m * _comb(n_y_eff + d - 2, d - 2)
    cols = n_x_eff * _comb(n_y_eff + d - 1, d - 1)
    return math.log2(rows) + (omega - 1) * math.log2(cols)


def estimate(
    algorithm: str,
    p: Params,
    *,
    a_x: int = 0,
    a_y: int = 0,
    omega: float = 2.8,
) -> CostEstimate:
    """Displayed operation count of one algorithm, in log2.

    Tags: ``y-xl`` (echelon at the witness bound), ``y-mxl`` (echelon at the
    first-fall degree), ``y-hxl-ge`` / ``y-hxl-w`` (hybrid with Gaussian or
    Wiedemann inner solver at the guess-adjusted degree), ``f4`` and
    ``exhaustive`` (reference out-of-the-box methods).
    """
    if not 2.0 <= omega <= 3.0:
        raise ValueError("omega must lie in [2, 3]")
    n_x, n_y, m, q = p.n_x, p.n_y, p.m, p.q
    backend: str | None = None
    if algorithm == "y-xl":
        d = twit_bound(n_x, n_y, m)
        cost = _log2_xl_shape(m, n_x, n_y, d, omega)
    elif algorithm == "y-mxl":
        d = tff_formula(n_x, n_y, m)
        cost = _log2_xl_shape(m, n_x, n_y, d, omega)
    elif algorithm == "y-hxl-ge":
        _check_guess(p, a_x, a_y)
        d = hxl_degree(n_x, n_y, m, a_x, a_y)
        cost = (a_x + a_y) * math.log2(q) + _log2_xl_shape(
            m, n_x - a_x + 1, n_y - a_y, d, omega
        )
        backend = "gaussian"
    elif algorithm == "y-hxl-w":
        _check_guess(p, a_x, a_y)
        d = hxl_degree(n_x, n_y, m, a_x, a_y)
        cost = (
            (a_x + a_y) * math.log2(q)
            + math.log2(n_y - a_y + 1)
            + 3 * math.log2(n_x - a_x + 1)
            + 2 * math.log2(_comb(n_y - a_y + d - 1, d - 1))
        )
        backend = "wiedemann"
    elif algorithm == "f4":
        d = tff_formula(n_x, n_y, m)
        cost = omega * math.log2(_comb(n_x + n_y + d, d))
    elif algorithm == "exhaustive":
        cost = n_x * math.log2(q) + math.log2(m) + (omega - 1) * math.log2(n_y)
    else:
        raise ValueError(f"unknown algorithm tag {algorithm!r}")
    use_guess = algorithm.startswith("y-hxl")
    return CostEstimate(
        algorithm,
        cost,
        q,
        n_x,
        n_y,
        m,
        a_x=a_x if use_guess else None,
        a_y=a_y if use_guess else None,
        omega=omega,
        backend=backend,
    )


def _check_guess(p: Params, a_x: int, a_y: int) -> None:
    # a_x == n_x realizes the exhaustive-over-x limit and is allowed here
    if not (0 <= a_x <= p.n_x) or not (0 <= a_y < p.n_y):
        raise ValueError("guess counts out of range")


def wiedemann_hxl_cost(p: Params, a_x: int, a_y: int) -> float:
    """Full expected-operation bound for the Wiedemann-backed hybrid,
    without the rows-equal-columns simplification of the closed form:
    q^{a_x+a_y} * n0 (eta + n1 log2 n1) log2 n0 on the exact matrix shape
    of the partially evaluated system.  This is the count the optimal-guess
    search uses; the closed form in :func:`estimate` understates the cost
    for strongly rectangular shapes.
    """
    _check_guess(p, a_x, a_y)
    n_x, n_y, m, q = p.n_x - a_x, p.n_y - a_y, p.m, p.q
    d = hxl_degree(p.n_x, p.n_y, p.m, a_x, a_y)
    rows = m * _comb(n_y + d - 2, d - 2)
    cols = (n_x + 1) * _comb(n_y + d - 1, d - 1)
    nnz = rows * (n_x + 1) * (n_y + 1)
    n0, n1 = min(rows, cols), max(rows, cols)
    log_n0 = math.log2(n0) if n0 > 1 else 1.0
    ops = n0 * (nnz + n1 * math.log2(max(n1, 2))) * log_n0
    return (a_x + a_y) * math.log2(q) + math.log2(ops)


def optimal_hybrid(
    p: Params,
    q: int | None = None,
    omega: float = 2.8,
) -> tuple[int, int, str, CostEstimate]:
    """Exhaustive scan over guess budgets and backends.

    Gaussian candidates are priced by the closed-form estimate, Wiedemann
    candidates by :func:`wiedemann_hxl_cost`.  Ties (to 1e-9) break toward
    fewer guessed variables, then toward the Gaussian backend, then toward
    guessing x-variables rather than y-variables.
    """
    if q is not None and q != p.q:
        p = Params(p.n_x, p.n_y, p.m, q)
    best = None
    for a_x in range(0, p.n_x + 1):
        for a_y in range(0, p.n_y):
            ge = estimate("y-hxl-ge", p, a_x=a_x, a_y=a_y, omega=omega)
            wi = wiedemann_hxl_cost(p, a_x, a_y)
            for backend, cost in (("gaussian", ge.log2_mults), ("wiedemann", wi)):
                key = (round(cost, 9), a_x + a_y, 0 if backend == "gaussian" else 1, a_y, a_x)
                if best is None or key < best[0]:
                    best = (key, a_x, a_y, backend, cost)
    assert best is not None
    _, a_x, a_y, backend, cost = best
    est = CostEstimate(
        "y-hxl-ge" if backend == "gaussian" else "y-hxl-w",
        cost,
        p.q,
        p.n_x,
        p.n_y,
        p.m,
        a_x=a_x,
        a_y=a_y,
        omega=omega,
        backend=backend,
    )
    return a_x, a_y, backend, est

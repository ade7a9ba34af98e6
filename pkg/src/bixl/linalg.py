"""Exact linear algebra over GF(q): echelon forms, rank, left solves and a
probabilistic sparse consistency check in the style of Wiedemann.

The elimination kernel is blocked: pivots are found per column panel with
vectorized row operations, and the trailing submatrix is updated with one
float64 matrix product per panel.  Products of residues stay below 2**53 as
long as ``block * (q-1)**2 < 2**53``, so the float path is exact; the block
width shrinks automatically for large q and a scalar int64 path covers the
remainder up to q < 2**31.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

try:  # numba accelerates the per-panel scalar phase; numpy covers its absence
    import numba
except ImportError:  # pragma: no cover
    numba = None

__all__ = [
    "EchelonResult",
    "ConsistencyVerdict",
    "row_echelon",
    "rank",
    "solve_left",
    "in_row_space",
    "wiedemann_consistent",
]

_FLOAT_BUDGET = float(2**53)


@dataclass(frozen=True)
class EchelonResult:
    """Echelon form of a matrix over GF(q).

    ``matrix`` keeps the input shape (zero rows at the bottom); pivot entries
    are 1 with zeros below, and also above when reduced.  ``pivot_cols`` is
    strictly increasing with ``len(pivot_cols) == rank``.
    """

    matrix: np.ndarray
    rank: int
    pivot_cols: tuple[int, ...]
    reduced: bool = True


def _as_int_matrix(mat, q: int) -> np.ndarray:
    if sp.issparse(mat):
        mat = mat.toarray()
    a = np.asarray(mat, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return a % q


_BLOCK = 128


def _float_path_ok(q: int, n_cols: int) -> bool:
    # deferred reduction lets trailing entries grow by block*(q-1)^2 per
    # panel, i.e. up to (n_cols + block) * (q-1)^2 overall; keep that exact
    return (n_cols + _BLOCK) * (q - 1) ** 2 + q < _FLOAT_BUDGET


def _panel_numpy(fa: np.ndarray, r: int, c0: int, c1: int, q: int) -> tuple[list[int], list[float]]:
    """Scalar elimination of one column panel; multipliers are stashed in the
    eliminated positions for the caller's BLAS trailing update."""
    m = fa.shape[0]
    panel = fa[:, c0:c1]
    panel_cols: list[int] = []
    panel_inv: list[float] = []
    rr = r
    for j in range(c0, c1):
        if rr >= m:
            break
        jj = j - c0
        col = panel[rr:m, jj]
        np.mod(col, q, out=col)
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i0 = rr + int(nz[0])
        if i0 != rr:
            tmp = fa[rr].copy()
            fa[rr] = fa[i0]
            fa[i0] = tmp
        inv = float(pow(int(panel[rr, jj]), -1, q))
        prow = panel[rr, jj:]
        np.mod(prow, q, out=prow)  # reduce before scaling: keeps inv * value < q**2
        np.mod(prow * inv, q, out=prow)
        prow[0] = 1.0
        if rr + 1 < m:
            f = panel[rr + 1 : m, jj].copy()
            # unreduced rank-1 update; only columns right of jj can be
            # nonzero in the pivot row's panel part
            panel[rr + 1 : m, jj:] -= np.outer(f, prow)
            panel[rr + 1 : m, jj] = f  # multiplier stash
        panel_cols.append(j)
        panel_inv.append(inv)
        rr += 1
    return panel_cols, panel_inv


if numba is not None:

    @numba.njit(cache=True, nogil=True)
    def _panel_jit(fa, r, c0, c1, q):  # pragma: no cover - exercised via wrapper
        m, n = fa.shape
        w = c1 - c0
        jcols = np.empty(w, np.int64)
        invs = np.empty(w, np.float64)
        k = 0
        rr = r
        for j in range(c0, c1):
            if rr >= m:
                break
            piv = -1
            for i in range(rr, m):
                v = fa[i, j] % q
                fa[i, j] = v
                if piv < 0 and v != 0.0:
                    piv = i
            if piv < 0:
                continue
            if piv != rr:
                for t in range(n):
                    tmp = fa[rr, t]
                    fa[rr, t] = fa[piv, t]
                    fa[piv, t] = tmp
            base = int(fa[rr, j])
            acc = 1
            e = q - 2
            while e:
                if e & 1:
                    acc = acc * base % q
                base = base * base % q
                e >>= 1
            inv = float(acc)
            for t in range(j, c1):
                fa[rr, t] = fa[rr, t] % q * inv % q
            fa[rr, j] = 1.0
            for i in range(rr + 1, m):
                f = fa[i, j]
                if f != 0.0:
                    for t in range(j + 1, c1):
                        fa[i, t] -= f * fa[rr, t]
                fa[i, j] = f
            jcols[k] = j
            invs[k] = inv
            k += 1
            rr += 1
        return jcols[:k], invs[:k]

    def _panel(fa, r, c0, c1, q):
        jcols, invs = _panel_jit(fa, r, c0, c1, q)
        return [int(j) for j in jcols], [float(v) for v in invs]

else:  # pragma: no cover
    _panel = _panel_numpy


def _echelon_float(a: np.ndarray, q: int, reduced: bool) -> tuple[np.ndarray, list[int]]:
    """Blocked Gaussian elimination on a float64 copy; returns (matrix, pivots).

    Reduction mod q is deferred: inside a panel only the column being
    searched is reduced (multipliers must be true residues), and the
    trailing submatrix is left unreduced between the per-panel BLAS updates.
    All intermediate magnitudes stay below ``(n + block) * (q-1)**2``, which
    ``_float_path_ok`` keeps under 2**53, so every float64 operation is
    exact.
    """
    m, n = a.shape
    fa = np.ascontiguousarray(a, dtype=np.float64)
    piv_cols: list[int] = []
    r = 0
    c0 = 0
    while c0 < n and r < m:
        c1 = min(c0 + _BLOCK, n)
        panel_cols, panel_inv = _panel(fa, r, c0, c1, q)
        k = len(panel_cols)
        if k:
            jcols = np.array(panel_cols)
            if c1 < n:
                # finish the trailing parts of the k pivot rows sequentially:
                # row t needs the final rows of pivots < t before scaling
                for t in range(k):
                    row = r + t
                    if t:
                        fa[row, c1:] -= fa[row, jcols[:t]] @ fa[r : r + t, c1:]
                    np.mod(fa[row, c1:], q, out=fa[row, c1:])
                    np.mod(fa[row, c1:] * panel_inv[t], q, out=fa[row, c1:])
                # single BLAS update for everything below the panel pivots;
                # the result stays unreduced until that area is panelled.
                # early panels of Macaulay matrices touch few rows, so only
                # rows with a nonzero multiplier enter the product
                if r + k < m:
                    fmult = fa[r + k : m, :][:, jcols]
                    active = np.flatnonzero(fmult.any(axis=1))
                    if active.size > 0.6 * (m - r - k):
                        fa[r + k : m, c1:] -= fmult @ fa[r : r + k, c1:]
                    elif active.size:
                        rows = r + k + active
                        fa[rows, c1:] -= fmult[active] @ fa[r : r + k, c1:]
            # clear multiplier stash and the left-of-pivot panel entries
            fa[r + k : m, :][:, jcols] = 0.0
            for t in range(1, k):
                fa[r + t, jcols[:t]] = 0.0
            piv_cols.extend(panel_cols)
            r += k
        c0 = c1
    np.mod(fa, q, out=fa)
    rank_ = len(piv_cols)
    if reduced and rank_:
        g1 = rank_
        jall = np.array(piv_cols)
        while g1 > 0:
            g0 = max(0, g1 - _BLOCK)
            start = piv_cols[g0]
            np.mod(fa[g0:g1, start:], q, out=fa[g0:g1, start:])
            # reduce inside the group, bottom-up
            for t in range(g1 - 1, g0, -1):
                j = piv_cols[t]
                coeffs = fa[g0:t, j]
                nz = np.flatnonzero(coeffs)
                if nz.size:
                    rows = g0 + nz
                    fa[rows, j:] = np.mod(fa[rows, j:] - np.outer(fa[rows, j], fa[t, j:]), q)
            # batch update all rows above the group; the multiplier gather
            # must be reduced or magnitudes would compound across groups
            if g0 > 0:
                fmult = np.mod(fa[0:g0, :][:, jall[g0:g1]], q)
                if fmult.any():
                    fa[0:g0, start:] -= fmult @ fa[g0:g1, start:]
            g1 = g0
        np.mod(fa, q, out=fa)
    return fa.astype(np.int64), piv_cols


def _echelon_int(a: np.ndarray, q: int, reduced: bool) -> tuple[np.ndarray, list[int]]:
    """Per-pivot int64 elimination; exact for q < 2**31, used when the float
    budget would force tiny blocks."""
    a = a.copy()
    m, n = a.shape
    piv_cols: list[int] = []
    r = 0
    for j in range(n):
        if r >= m:
            break
        nz = np.flatnonzero(a[r:m, j])
        if nz.size == 0:
            continue
        i0 = r + int(nz[0])
        if i0 != r:
            a[[r, i0], :] = a[[i0, r], :]
        inv = pow(int(a[r, j]), -1, q)
        a[r, j:] = (a[r, j:] * inv) % q
        rows = np.flatnonzero(a[:, j])
        rows = rows[rows != r] if reduced else rows[rows > r]
        if rows.size:
            a[rows, j:] = (a[rows, j:] - np.outer(a[rows, j], a[r, j:])) % q
        piv_cols.append(j)
        r += 1
    return a, piv_cols


def row_echelon(mat, q: int, *, reduced: bool = True) -> EchelonResult:
    """Row echelon form over GF(q), reduced by default.

    The row space is preserved; rows are permuted so the ``rank`` pivot rows
    come first with strictly increasing pivot columns.
    """
    a = _as_int_matrix(mat, q)
    if a.size == 0:
        return EchelonResult(a, 0, (), reduced)
    if _float_path_ok(q, a.shape[1]):
        mat_out, piv = _echelon_float(a, q, reduced)
    else:
        mat_out, piv = _echelon_int(a, q, reduced)
    return EchelonResult(mat_out, len(piv), tuple(piv), reduced)


def rank(mat, q: int) -> int:
    """Rank over GF(q)."""
    return row_echelon(mat, q, reduced=False).rank


def _reduce_against(ech: EchelonResult, vec: np.ndarray, q: int) -> np.ndarray:
    """Residual of ``vec`` against the echelon basis (works for reduced and
    non-reduced forms since pivots are processed left to right)."""
    v = vec.copy() % q
    for t, j in enumerate(ech.pivot_cols):
        coeff = v[j]
        if coeff:
            v = (v - coeff * ech.matrix[t]) % q
    return v

def in_row_space(ech: EchelonResult, vec, q: int) -> bool:
    v = np.asarray(vec, dtype=np.int64)
    return not _reduce_against(ech, v, q).any()


def solve_left(mat, b, q: int) -> np.ndarray | None:
    """Some z with ``z @ mat == b`` over GF(q), or None when b is outside the
    row space of ``mat``."""
    a = _as_int_matrix(mat, q)
    bb = np.asarray(b, dtype=np.int64).ravel() % q
    n_rows, n_cols = a.shape
    if bb.shape != (n_cols,):
        raise ValueError("right-hand side length must equal the column count")
    if n_rows == 0:
        return np.zeros(0, dtype=np.int64) if not bb.any() else None
    aug = np.hstack([a.T, bb[:, None]])
    ech = row_echelon(aug, q, reduced=True)
    z = np.zeros(n_rows, dtype=np.int64)
    for t, j in enumerate(ech.pivot_cols):
        if j == n_rows:  # pivot in the augmented column: inconsistent
            return None
        z[j] = ech.matrix[t, n_rows]
    return z


# ---------------------------------------------------------------------------
# Wiedemann-style consistency check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Outcome of the probabilistic left-solvability test.

    ``consistent`` verdicts always carry a certificate z with z @ M == b,
    verified by multiplication, so they are never wrong.  A probably-
    inconsistent verdict is wrong with probability at most
    ``2**failure_bound``.
    """

    consistent: bool
    certificate: np.ndarray | None
    failure_bound: float

    def __post_init__(self) -> None:
        if self.consistent and self.certificate is None:
            raise ValueError("consistent verdicts require a certificate")


def _berlekamp_massey(seq: list[int], q: int) -> list[int]:
    """Minimal LFSR connection polynomial of the sequence over GF(q).

    Returns coefficients ``c_0..c_L`` with c_0 = 1 such that
    ``sum_i c_i * s[k - i] == 0`` for all k >= L.
    """
    c = [1]
    b = [1]
    L = 0
    shift = 1
    delta_b = 1
    for i, s in enumerate(seq):
        delta = s
        for t in range(1, L + 1):
            delta = (delta + c[t] * seq[i - t]) % q
        delta %= q
        if delta == 0:
            shift += 1
            continue
        coeff = (delta * pow(delta_b, -1, q)) % q
        if 2 * L <= i:
            old_c = c[:]
            c = c + [0] * (len(b) + shift - len(c))
            for t, bv in enumerate(b):
                c[t + shift] = (c[t + shift] - coeff * bv) % q
            b = old_c
            L = i + 1 - L
            delta_b = delta
            shift = 1
        else:
            c = c + [0] * max(0, len(b) + shift - len(c))
            for t, bv in enumerate(b):
                c[t + shift] = (c[t + shift] - coeff * bv) % q
            shift += 1
    return [x % q for x in c]


def _krylov_solve(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    rhs: np.ndarray,
    q: int,
    rng: np.random.Generator,
) -> np.ndarray | None:
    """Try to solve A w = rhs for square implicit A via one Wiedemann run.

    Computes the minimal generator of the projected Krylov sequence
    u . A^i rhs and rebuilds a candidate solution from it.  The candidate is
    checked exactly; None means this attempt failed (singular projection or
    unlucky u), not that the system is unsolvable.
    """
    if not rhs.any():
        return np.zeros(n, dtype=np.int64)
    rhs = rhs % q
    u = rng.integers(0, q, size=n, dtype=np.int64)
    seq: list[int] = []
    vec = rhs
    for _ in range(2 * n + 1):
        seq.append(int(u @ vec % q))
        vec = matvec(vec)
    conn = _berlekamp_massey(seq, q)
    # conn c_0..c_L (c_0 = 1) generates the scalar sequence; with high
    # probability over u the reversed polynomial annihilates the Krylov
    # vectors: sum_i mrev[i] A^i rhs = 0.  Rebuild a candidate from that and
    # check it exactly.
    mrev = [cf % q for cf in reversed(conn)]
    L = len(mrev) - 1
    t = next((i for i, cf in enumerate(mrev) if cf), None)
    if t is None:
        return None
    inv_t = pow(mrev[t], -1, q)
    w = np.zeros(n, dtype=np.int64)
    vec = rhs  # second pass: vec = A^j rhs, picking up terms j = i - t - 1
    for j in range(0, L - t):
        coeff = mrev[j + t + 1]
        if coeff:
            w = (w + coeff * vec) % q
        if j != L - t - 1:
            vec = matvec(vec)
    w = (-inv_t * w) % q
    if np.array_equal(matvec(w), rhs):
        return w
    return None


def wiedemann_consistent(
    mat,
    b,
    q: int,
    *,
    trials: int = 8,
    rng: np.random.Generator | None = None,
) -> ConsistencyVerdict:
    """Probabilistic test whether ``z @ mat = b`` is solvable.

    The rectangular system is reduced to a random square one: for tall
    matrices z is restricted to a random subspace (z = P w, solve
    (M^T P) w = b), for wide ones the equations are projected (solve
    (Q M^T) z = Q b).  Each trial uses fresh randomness; any candidate is
    verified exactly, so a consistent verdict is certain.  After ``trials``
    failures the verdict is probably-inconsistent with failure bound
    ``trials * log2(1/q)``.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    dense_ok = not sp.issparse(mat)
    M = np.asarray(mat, dtype=np.int64) % q if dense_ok else mat.tocsr().astype(np.int64)
    n_rows, n_cols = M.shape
    bb = np.asarray(b, dtype=np.int64).ravel() % q
    if bb.shape != (n_cols,):
        raise ValueError("right-hand side length must equal the column count")
    MT = M.T if dense_ok else M.T.tocsr()

    def mt_dot(v: np.ndarray) -> np.ndarray:
        return np.asarray(MT @ v, dtype=np.int64).ravel() % q

    def m_dot_left(z: np.ndarray) -> np.ndarray:
        return np.asarray(z @ M, dtype=np.int64).ravel() % q

    for _ in range(max(trials, 1)):
        if n_rows > n_cols:
            P = rng.integers(0, q, size=(n_rows, n_cols), dtype=np.int64)

            def matvec(v: np.ndarray) -> np.ndarray:
                return mt_dot((P @ v) % q)

            w = _krylov_solve(matvec, n_cols, bb, q, rng)
            z = (P @ w) % q if w is not None else None
        else:
            Q = rng.integers(0, q, size=(n_rows, n_cols), dtype=np.int64)
            rhs = (Q @ bb) % q

            def matvec(v: np.ndarray) -> np.ndarray:
                return (Q @ mt_dot(v)) % q

            z = _krylov_solve(matvec, n_rows, rhs, q, rng)
        if z is not None and np.array_equal(m_dot_left(z), bb):
            return ConsistencyVerdict(True, z, float("-inf"))
    return ConsistencyVerdict(False, None, -max(trials, 1) * math.log2(q))

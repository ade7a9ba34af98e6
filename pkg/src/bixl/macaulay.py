"""Construction of y-Macaulay matrices.

``build_y_macaulay(B, d)`` collects the coefficient rows of every product
``mu * f`` with ``f`` in the sequence and ``mu`` a y-monomial of degree at
most ``d - 2``.  Columns are the monomials those products can reach, sorted
strictly decreasing under the configured monomial order (grlex by default,
grevlex selectable); for affine sequences that includes the pure-y block
down to the constant column, for homogeneous sequences only the x-linear
monomials of degrees 2..d occur.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .polyring import (
    BilinearSequence,
    ColumnMonomial,
    Params,
    XLinPoly,
    YMonomial,
    monomial_sort_key,
    y_monomials_exact,
    y_monomials_upto,
)

__all__ = [
    "YMacaulayMatrix",
    "column_monomials",
    "module_columns",
    "build_y_macaulay",
    "build_module_matrix",
    "degree_part",
    "dump_sms",
]


def _sorted_columns(cols: Iterable[ColumnMonomial], n_x: int, order: str) -> tuple[ColumnMonomial, ...]:
    return tuple(sorted(cols, key=lambda c: monomial_sort_key(c, n_x, order), reverse=True))


def column_monomials(p: Params, d: int, homogeneous: bool, order: str = "grlex") -> tuple[ColumnMonomial, ...]:
    """Column labels of the degree-<=d y-Macaulay matrix.

    Affine case: ``{x_i * mu, mu : deg mu <= d-1}``, which has
    ``(n_x + 1) * C(n_y + d - 1, d - 1)`` elements.  Homogeneous case: only
    the producible x-linear monomials ``{x_i * mu : 1 <= deg mu <= d-1}``.
    """
    if d < 2:
        raise ValueError("degree bound must be at least 2")
    cols: list[ColumnMonomial] = []
    for exp in y_monomials_upto(p.n_y, d - 1):
        mono = YMonomial(tuple(exp))
        deg = mono.degree
        for i in range(p.n_x):
            if homogeneous and deg == 0:
                continue
            cols.append(ColumnMonomial(i, mono))
        if not homogeneous:
            cols.append(ColumnMonomial(None, mono))
    return _sorted_columns(cols, p.n_x, order)


def module_columns(p: Params, d: int, order: str = "grlex") -> tuple[ColumnMonomial, ...]:
    """Ambient column set for x-linear module elements of degree <= d:
    ``{x_i * mu : deg mu <= d-1}`` plus all pure-y monomials of degree <= d.
    Superset of the affine Macaulay columns; used by the mutant solver whose
    generators may carry pure-y parts of full degree."""
    cols: list[ColumnMonomial] = []
    for exp in y_monomials_upto(p.n_y, d):
        mono = YMonomial(tuple(exp))
        if mono.degree <= d - 1:
            for i in range(p.n_x):
                cols.append(ColumnMonomial(i, mono))
        cols.append(ColumnMonomial(None, mono))
    return _sorted_columns(cols, p.n_x, order)


@dataclass(frozen=True)
class YMacaulayMatrix:
    """Coefficient matrix with exact row and column labels.

    ``entries`` is dense int64 or CSR depending on the requested layout;
    ``rows[i]`` records the (generator index, multiplier) provenance of row i.
    """

    entries: np.ndarray | sp.csr_matrix
    columns: tuple[ColumnMonomial, ...]
    rows: tuple[tuple[int, YMonomial], ...]
    degree_bound: int
    q: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.entries)

    def dense(self) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(self.entries.todense(), dtype=np.int64)
        return self.entries

    def column_index(self) -> dict[tuple[int, tuple[int, ...]], int]:
        return {
            ((-1 if c.x_index is None else c.x_index), c.y_part.exponents): idx
            for idx, c in enumerate(self.columns)
        }

    def constant_column(self) -> int | None:
        """Index of the constant-monomial column, if present (affine case)."""
        for idx in range(len(self.columns) - 1, -1, -1):
            c = self.columns[idx]
            if c.x_index is None and c.y_part.degree == 0:
                return idx
        return None

    def row_poly(self, i: int, n_x: int, n_y: int) -> XLinPoly:
        """Read row i back as a polynomial via the column labels."""
        row = self.dense()[i]
        terms = {}
        for idx in np.flatnonzero(row):
            c = self.columns[idx]
            key = ((-1 if c.x_index is None else c.x_index), c.y_part.exponents)
            terms[key] = int(row[idx])
        return XLinPoly(n_x, n_y, self.q, terms)


def _fill_rows(
    gens: Sequence[XLinPoly],
    multipliers_by_gen: Sequence[Sequence[tuple[int, ...]]],
    columns: Sequence[ColumnMonomial],
    q: int,
    sparse: bool,
):
    colmap = {
        ((-1 if c.x_index is None else c.x_index), c.y_part.exponents): idx
        for idx, c in enumerate(columns)
    }
    provenance: list[tuple[int, YMonomial]] = []
    entries_i: list[int] = []
    entries_j: list[int] = []
    entries_v: list[int] = []
    r = 0
    for k, (g, mults) in enumerate(zip(gens, multipliers_by_gen)):
        for mu in mults:
            provenance.append((k, YMonomial(mu)))
            shift = any(mu)
            for (x, exp), coeff in g.terms.items():
                key = (x, tuple(a + b for a, b in zip(exp, mu))) if shift else (x, exp)
                entries_i.append(r)
                entries_j.append(colmap[key])
                entries_v.append(coeff)
            r += 1
    shape = (r, len(columns))
    if sparse:
        mat = sp.csr_matrix(
            (np.array(entries_v, dtype=np.int64), (entries_i, entries_j)), shape=shape
        )
    else:
        mat = np.zeros(shape, dtype=np.int64)
        mat[entries_i, entries_j] = entries_v
    return mat, tuple(provenance)


def _multipliers_desc(n_y: int, max_degree: int, n_x: int, order: str) -> list[tuple[int, ...]]:
    monos = [ColumnMonomial(None, YMonomial(tuple(e))) for e in y_monomials_upto(n_y, max_degree)]
    monos.sort(key=lambda c: monomial_sort_key(c, n_x, order), reverse=True)
    return [c.y_part.exponents for c in monos]


def build_y_macaulay(
    B: BilinearSequence,
    d: int,
    order: str = "grlex",
    sparse: bool = False,
) -> YMacaulayMatrix:
    """Degree-<=d y-Macaulay matrix of a bilinear sequence.

    One row per pair (f_k, mu) with deg mu <= d - 2, holding the
    coefficients of mu * f_k over the column labels.  Rows are grouped by
    multiplier degree descending; the exact order is deterministic but only
    the row multiset is contractual.
    """
    if d < 2:
        raise ValueError("degree bound must be at least 2")
    p = B.params
    homogeneous = B.is_homogeneous
    columns = column_monomials(p, d, homogeneous, order)
    mults = _multipliers_desc(p.n_y, d - 2, p.n_x, order)
    gens = [XLinPoly.from_bilinear(f, p.q) for f in B.polys]
    # multiplier-major enumeration keeps rows grouped by multiplier degree
    provenance: list[tuple[int, YMonomial]] = []
    gen_rows: list[tuple[int, tuple[int, ...]]] = [
        (k, mu) for mu in mults for k in range(p.m)
    ]
    colmap = {
        ((-1 if c.x_index is None else c.x_index), c.y_part.exponents): idx
        for idx, c in enumerate(columns)
    }
    entries_i: list[int] = []
    entries_j: list[int] = []
    entries_v: list[int] = []
    for r, (k, mu) in enumerate(gen_rows):
        provenance.append((k, YMonomial(mu)))
        g = gens[k]
        shift = any(mu)
        for (x, exp), coeff in g.terms.items():
            key = (x, tuple(a + b for a, b in zip(exp, mu))) if shift else (x, exp)
            entries_i.append(r)
            entries_j.append(colmap[key])
            entries_v.append(coeff)
    shape = (len(gen_rows), len(columns))
    if sparse:
        mat = sp.csr_matrix(
            (np.array(entries_v, dtype=np.int64), (entries_i, entries_j)), shape=shape
        )
    else:
        mat = np.zeros(shape, dtype=np.int64)
        mat[entries_i, entries_j] = entries_v
    return YMacaulayMatrix(mat, columns, tuple(provenance), d, p.q)


def build_module_matrix(
    gens: Sequence[XLinPoly],
    p: Params,
    d: int,
    order: str = "grlex",
) -> YMacaulayMatrix:
    """Macaulay-style matrix of arbitrary x-linear generators at degree d.

    Generator g of degree e receives every multiplier of degree <= d - e.
    Columns come from :func:`module_columns`.
    """
    columns = module_columns(p, d, order)
    mult_pool = _multipliers_desc(p.n_y, max(d - 2, 0), p.n_x, order)
    per_gen = []
    for g in gens:
        cap = d - max(g.degree, 0)
        per_gen.append([mu for mu in mult_pool if sum(mu) <= cap])
    mat, provenance = _fill_rows(gens, per_gen, columns, p.q, sparse=False)
    return YMacaulayMatrix(mat, columns, provenance, d, p.q)


def degree_part(B: BilinearSequence, j: int, order: str = "grlex", sparse: bool = False) -> YMacaulayMatrix:
    """Degree-j part of the y-Macaulay matrix of a homogeneous sequence:
    rows are the products with multiplier degree exactly j - 2, columns the
    x-linear monomials of total degree j."""
    if j < 2:
        raise ValueError("degree part needs j >= 2")
    if not B.is_homogeneous:
        raise ValueError("degree parts are defined for homogeneous sequences")
    p = B.params
    cols = [
        ColumnMonomial(i, YMonomial(tuple(exp)))
        for exp in y_monomials_exact(p.n_y, j - 1)
        for i in range(p.n_x)
    ]
    columns = _sorted_columns(cols, p.n_x, order)
    mults = [
        c.y_part.exponents
        for c in sorted(
            (ColumnMonomial(None, YMonomial(tuple(e))) for e in y_monomials_exact(p.n_y, j - 2)),
            key=lambda c: monomial_sort_key(c, p.n_x, order),
            reverse=True,
        )
    ]
    gens = [XLinPoly.from_bilinear(f, p.q) for f in B.polys]
    gen_rows = [(k, mu) for mu in mults for k in range(p.m)]
    colmap = {
        ((-1 if c.x_index is None else c.x_index), c.y_part.exponents): idx
        for idx, c in enumerate(columns)
    }
    entries_i: list[int] = []
    entries_j: list[int] = []
    entries_v: list[int] = []
    provenance = []
    for r, (k, mu) in enumerate(gen_rows):
        provenance.append((k, YMonomial(mu)))
        for (x, exp), coeff in gens[k].terms.items():
            key = (x, tuple(a + b for a, b in zip(exp, mu)))
            entries_i.append(r)
            entries_j.append(colmap[key])
            entries_v.append(coeff)
    shape = (len(gen_rows), len(columns))
    if sparse:
        mat = sp.csr_matrix(
            (np.array(entries_v, dtype=np.int64), (entries_i, entries_j)), shape=shape
        )
    else:
        mat = np.zeros(shape, dtype=np.int64)
        mat[entries_i, entries_j] = entries_v
    return YMacaulayMatrix(mat, columns, tuple(provenance), j, p.q)


def dump_sms(matrix: YMacaulayMatrix | np.ndarray | sp.spmatrix, q: int | None, fh: IO[str]) -> None:
    """Write SMS-style triplet text: ``rows cols q`` header, one 1-based
    ``i j v`` line per nonzero, terminated by ``0 0 0``."""
    if isinstance(matrix, YMacaulayMatrix):
        q = matrix.q
        entries = matrix.entries
    else:
        if q is None:
            raise ValueError("modulus required for raw matrices")
        entries = matrix
    coo = sp.coo_matrix(entries)
    fh.write(f"{coo.shape[0]} {coo.shape[1]} {q}\n")
    for i, j, v in zip(coo.row, coo.col, coo.data):
        if v % q:
            fh.write(f"{i + 1} {j + 1} {v % q}\n")
    fh.write("0 0 0\n")

"""Monomials, bilinear polynomials and bilinear sequences over GF(q).

A bilinear polynomial with respect to the variable split (x, y) is

    f = x A y^T + b x^T + c y^T + d0

with ``A`` an ``n_x x n_y`` matrix over GF(q).  This module owns the data
model (sequences, monomial labels, the order used to sort Macaulay columns)
plus evaluation, partial evaluation, homogenization, Jacobians, syzygy
verification and seeded random sampling.  Everything is a pure function on
immutable values.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .field import FieldCtx

__all__ = [
    "Params",
    "YMonomial",
    "ColumnMonomial",
    "BilinearPoly",
    "BilinearSequence",
    "YPoly",
    "YPolyVector",
    "XLinPoly",
    "MONOMIAL_ORDERS",
    "cmp_monomials",
    "monomial_sort_key",
    "y_monomials_upto",
    "y_monomials_exact",
    "evaluate",
    "partial_evaluate",
    "substitute",
    "homogenize",
    "dehomogenize",
    "jacobian_x",
    "random_sequence",
    "plant_solution",
    "verify_syzygy",
]

MONOMIAL_ORDERS = ("grlex", "grevlex")


@dataclass(frozen=True)
class Params:
    """Shape of a bilinear system: variable counts, length and field size.

    ``n_x == 0`` is permitted so that fully x-evaluated systems (the
    exhaustive limit of the hybrid solver) remain representable; solver entry
    points that need a genuine bilinear system check ``n_x >= 1`` themselves.
    """

    n_x: int
    n_y: int
    m: int
    q: int

    def __post_init__(self) -> None:
        if self.n_x < 0 or self.n_y < 1 or self.m < 1:
            raise ValueError(f"invalid shape (n_x={self.n_x}, n_y={self.n_y}, m={self.m})")
        FieldCtx(self.q)  # validates primality

    @property
    def field(self) -> FieldCtx:
        return FieldCtx(self.q)

    @property
    def n_vars(self) -> int:
        return self.n_x + self.n_y


@dataclass(frozen=True)
class YMonomial:
    """Monomial in the y-variables, stored as an exponent tuple."""

    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.exponents):
            raise ValueError("negative exponent")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __mul__(self, other: "YMonomial") -> "YMonomial":
        return YMonomial(tuple(a + b for a, b in zip(self.exponents, other.exponents, strict=True)))

    def __str__(self) -> str:
        if self.degree == 0:
            return "1"
        parts = []
        for j, e in enumerate(self.exponents):
            if e == 1:
                parts.append(f"y{j + 1}")
            elif e > 1:
                parts.append(f"y{j + 1}^{e}")
        return "*".join(parts)


@dataclass(frozen=True)
class ColumnMonomial:
    """Column label of a y-Macaulay matrix: an optional single x-variable
    (0-based index, ``None`` for a pure-y monomial) times a y-monomial."""

    x_index: int | None
    y_part: YMonomial

    @property
    def degree(self) -> int:
        return self.y_part.degree + (0 if self.x_index is None else 1)

    def __str__(self) -> str:
        y = str(self.y_part)
        if self.x_index is None:
            return y
        x = f"x{self.x_index + 1}"
        return x if y == "1" else f"{x}*{y}"


def _exponent_vector(mono: ColumnMonomial, n_x: int) -> tuple[int, ...]:
    xs = [0] * n_x
    if mono.x_index is not None:
        xs[mono.x_index] = 1
    return tuple(xs) + mono.y_part.exponents


def monomial_sort_key(mono: ColumnMonomial, n_x: int, order: str = "grlex"):
    """Sort key such that sorting with ``reverse=True`` gives the order's
    decreasing sequence (the column convention of the Macaulay matrices)."""
    vec = _exponent_vector(mono, n_x)
    if order == "grlex":
        return (mono.degree, vec)
    if order == "grevlex":
        return (mono.degree, tuple(-e for e in reversed(vec)))
    raise ValueError(f"unknown monomial order {order!r}")


def cmp_monomials(a: ColumnMonomial, b: ColumnMonomial, order: str = "grlex", *, n_x: int | None = None) -> int:
    """Three-way comparison of column monomials.

    Degree decides first; ties break per ``order`` with the variable order
    x1 > ... > x_{n_x} > y1 > ... > y_{n_y}.  Returns -1, 0 or 1.
    """
    if len(a.y_part.exponents) != len(b.y_part.exponents):
        raise ValueError("monomials over different y-variable counts")
    if n_x is None:
        n_x = max(
            a.x_index + 1 if a.x_index is not None else 0,
            b.x_index + 1 if b.x_index is not None else 0,
        )
    ka = monomial_sort_key(a, n_x, order)
    kb = monomial_sort_key(b, n_x, order)
    return (ka > kb) - (ka < kb)


def y_monomials_exact(n_y: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of the given total degree, in no particular order."""
    if degree < 0:
        return []
    if n_y == 0:
        return [()] if degree == 0 else []
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], remaining_vars: int, remaining_deg: int) -> None:
        if remaining_vars == 1:
            out.append(prefix + (remaining_deg,))
            return
        for e in range(remaining_deg + 1):
            rec(prefix + (e,), remaining_vars - 1, remaining_deg - e)

    rec((), n_y, degree)
    return out


def y_monomials_upto(n_y: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= ``degree``."""
    out: list[tuple[int, ...]] = []
    for d in range(degree + 1):
        out.extend(y_monomials_exact(n_y, d))
    return out


def _as_field_array(values, shape: tuple[int, ...], q: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64) % q
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


class BilinearPoly:
    """One bilinear polynomial ``x A y^T + b x^T + c y^T + d0`` over GF(q)."""

    __slots__ = ("A", "b", "c", "d0")

    def __init__(self, A, b, c, d0: int, q: int):
        A = np.asarray(A, dtype=np.int64)
        n_x, n_y = A.shape if A.ndim == 2 else (0, 0)
        if A.ndim != 2:
            raise ValueError("A must be a 2-d matrix")
        self.A = _as_field_array(A, (n_x, n_y), q)
        self.b = _as_field_array(b, (n_x,), q)
        self.c = _as_field_array(c, (n_y,), q)
        self.d0 = int(d0) % q

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_y(self) -> int:
        return self.A.shape[1]

    @property
    def is_homogeneous(self) -> bool:
        return self.d0 == 0 and not self.b.any() and not self.c.any()

    def quadratic_part(self, q: int) -> "BilinearPoly":
        return BilinearPoly(self.A, np.zeros(self.n_x, np.int64), np.zeros(self.n_y, np.int64), 0, q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearPoly):
            return NotImplemented
        return (
            self.d0 == other.d0
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.c, other.c)
        )

    def __hash__(self) -> int:
        return hash((self.A.tobytes(), self.b.tobytes(), self.c.tobytes(), self.d0))

    def __repr__(self) -> str:
        return f"BilinearPoly(n_x={self.n_x}, n_y={self.n_y})"


class BilinearSequence:
    """Ordered sequence of m bilinear polynomials sharing (n_x, n_y, q)."""

    __slots__ = ("params", "polys")

    def __init__(self, params: Params, polys: Sequence[BilinearPoly]):
        polys = tuple(polys)
        if len(polys) != params.m:
            raise ValueError(f"expected {params.m} polynomials, got {len(polys)}")
        for f in polys:
            if f.n_x != params.n_x or f.n_y != params.n_y:
                raise ValueError("polynomial shape does not match params")
        self.params = params
        self.polys = polys

    @property
    def is_homogeneous(self) -> bool:
        return all(f.is_homogeneous for f in self.polys)

    def quadratic_part(self) -> "BilinearSequence":
        q = self.params.q
        return BilinearSequence(self.params, [f.quadratic_part(q) for f in self.polys])

    def __iter__(self) -> Iterator[BilinearPoly]:
        return iter(self.polys)

    def __len__(self) -> int:
        return self.params.m

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearSequence):
            return NotImplemented
        return self.params == other.params and self.polys == other.polys

    def __repr__(self) -> str:
        p = self.params
        return f"BilinearSequence(n_x={p.n_x}, n_y={p.n_y}, m={p.m}, q={p.q})"


# ---------------------------------------------------------------------------
# sparse polynomials in F[y] (Jacobian entries, syzygies)
# ---------------------------------------------------------------------------


class YPoly:
    """Sparse polynomial in the y-variables: exponent tuple -> coefficient."""

    __slots__ = ("n_y", "q", "terms")

    def __init__(self, n_y: int, q: int, terms: Mapping[tuple[int, ...], int] | None = None):
        self.n_y = n_y
        self.q = q
        self.terms: dict[tuple[int, ...], int] = {}
        if terms:
            for exp, coeff in terms.items():
                coeff = int(coeff) % q
                if coeff:
                    if len(exp) != n_y:
                        raise ValueError("exponent tuple of wrong length")
                    self.terms[tuple(exp)] = coeff

    @classmethod
    def zero(cls, n_y: int, q: int) -> "YPoly":
        return cls(n_y, q)

    @classmethod
    def constant(cls, value: int, n_y: int, q: int) -> "YPoly":
        return cls(n_y, q, {(0,) * n_y: value})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Degree of the polynomial; zero polynomial reports -1."""
        return max((sum(e) for e in self.terms), default=-1)

    def __add__(self, other: "YPoly") -> "YPoly":
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            new = (out.get(exp, 0) + coeff) % self.q
            if new:
                out[exp] = new
            else:
                out.pop(exp, None)
        res = YPoly(self.n_y, self.q)
        res.terms = out
        return res

    def __sub__(self, other: "YPoly") -> "YPoly":
        return self + other.scale(-1)

    def scale(self, factor: int) -> "YPoly":
        factor %= self.q
        return YPoly(self.n_y, self.q, {e: c * factor for e, c in self.terms.items()})

    def __mul__(self, other: "YPoly") -> "YPoly":
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                new = (out.get(exp, 0) + c1 * c2) % self.q
                if new:
                    out[exp] = new
                else:
                    out.pop(exp, None)
        res = YPoly(self.n_y, self.q)
        res.terms = out
        return res

    def __eq__(self, other) -> bool:
        if not isinstance(other, YPoly):
            return NotImplemented
        return self.q == other.q and self.terms == other.terms

    def __repr__(self) -> str:
        return f"YPoly({self.terms!r})"


@dataclass(frozen=True)
class YPolyVector:
    """Length-m vector of y-polynomials (syzygy candidates G)."""

    entries: tuple[YPoly, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("empty vector")

    @property
    def degree(self) -> int:
        return max(g.degree for g in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# polynomials linear in the x block (span of {x_i * mu} + F[y])
# ---------------------------------------------------------------------------

# term key: (x_index or -1, y exponent tuple)
TermKey = tuple[int, tuple[int, ...]]


class XLinPoly:
    """Polynomial with x-degree at most one: the ambient space of every row
    of a y-Macaulay matrix and of all y-XL / y-MXL intermediates."""

    __slots__ = ("n_x", "n_y", "q", "terms")

    def __init__(self, n_x: int, n_y: int, q: int, terms: Mapping[TermKey, int] | None = None):
        self.n_x = n_x
        self.n_y = n_y
        self.q = q
        self.terms: dict[TermKey, int] = {}
        if terms:
            for key, coeff in terms.items():
                coeff = int(coeff) % q
                if coeff:
                    self.terms[(int(key[0]), tuple(key[1]))] = coeff

    @classmethod
    def from_bilinear(cls, f: BilinearPoly, q: int) -> "XLinPoly":
        n_x, n_y = f.n_x, f.n_y
        terms: dict[TermKey, int] = {}
        zero = (0,) * n_y
        for i in range(n_x):
            for j in range(n_y):
                if f.A[i, j]:
                    exp = zero[:j] + (1,) + zero[j + 1 :]
                    terms[(i, exp)] = int(f.A[i, j])
            if f.b[i]:
                terms[(i, zero)] = int(f.b[i])
        for j in range(n_y):
            if f.c[j]:
                exp = zero[:j] + (1,) + zero[j + 1 :]
                terms[(-1, exp)] = int(f.c[j])
        if f.d0:
            terms[(-1, zero)] = f.d0
        return cls(n_x, n_y, q, terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max(((0 if x < 0 else 1) + sum(e) for x, e in self.terms), default=-1)

    @property
    def x_degree(self) -> int:
        return max((0 if x < 0 else 1 for x, _ in self.terms), default=0)

    def mul_y_monomial(self, exponents: tuple[int, ...]) -> "XLinPoly":
        if all(e == 0 for e in exponents):
            return self
        out = XLinPoly(self.n_x, self.n_y, self.q)
        out.terms = {
            (x, tuple(a + b for a, b in zip(exp, exponents))): c
            for (x, exp), c in self.terms.items()
        }
        return out

    def monomials(self) -> list[ColumnMonomial]:
        return [
            ColumnMonomial(None if x < 0 else x, YMonomial(exp)) for x, exp in self.terms
        ]

    def linear_coefficients(self) -> tuple[np.ndarray, int]:
        """For a degree-<=1 polynomial: coefficient vector over (x | y) and
        the constant term."""
        if self.degree > 1:
            raise ValueError("polynomial has degree above one")
        coeffs = np.zeros(self.n_x + self.n_y, dtype=np.int64)
        const = 0
        zero = (0,) * self.n_y
        for (x, exp), c in self.terms.items():
            if x >= 0:
                coeffs[x] = c
            elif exp == zero:
                const = c
            else:
                coeffs[self.n_x + exp.index(1)] = c
        return coeffs, const

    def __eq__(self, other) -> bool:
        if not isinstance(other, XLinPoly):
            return NotImplemented
        return self.terms == other.terms and self.q == other.q

    def __repr__(self) -> str:
        return f"XLinPoly({len(self.terms)} terms, deg={self.degree})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (x, exp), c in sorted(self.terms.items()):
            mono = ColumnMonomial(None if x < 0 else x, YMonomial(exp))
            bits.append(f"{c}*{mono}")
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# sequence-level operations
# ---------------------------------------------------------------------------


def evaluate(B: BilinearSequence, u, v) -> np.ndarray:
    """Evaluate every polynomial of B at the point (u, v)."""
    p = B.params
    u = np.asarray(u, dtype=np.int64) % p.q
    v = np.asarray(v, dtype=np.int64) % p.q
    if u.shape != (p.n_x,) or v.shape != (p.n_y,):
        raise ValueError("point has wrong component counts")
    vals = np.empty(p.m, dtype=np.int64)
    for k, f in enumerate(B.polys):
        vals[k] = (u @ f.A @ v + f.b @ u + f.c @ v + f.d0) % p.q
    return vals


def substitute(
    B: BilinearSequence,
    x_vals: Mapping[int, int],
    y_vals: Mapping[int, int],
) -> tuple[BilinearSequence, tuple[int, ...], tuple[int, ...]]:
    """Substitute constants for arbitrary subsets of the x and y variables.

    Returns the reduced sequence plus the (0-based) indices of the surviving
    x and y variables, so callers can stitch partial points back together.
    """
    p = B.params
    sub_x = sorted(x_vals)
    sub_y = sorted(y_vals)
    if any(i < 0 or i >= p.n_x for i in sub_x) or any(j < 0 or j >= p.n_y for j in sub_y):
        raise ValueError("substituted index out of range")
    keep_x = tuple(i for i in range(p.n_x) if i not in x_vals)
    keep_y = tuple(j for j in range(p.n_y) if j not in y_vals)
    uvec = np.array([x_vals[i] for i in sub_x], dtype=np.int64) % p.q
    vvec = np.array([y_vals[j] for j in sub_y], dtype=np.int64) % p.q
    new_params = Params(len(keep_x), len(keep_y), p.m, p.q)
    new_polys = []
    for f in B.polys:
        A = f.A
        newA = A[np.ix_(keep_x, keep_y)]
        newb = (f.b[list(keep_x)] + A[np.ix_(keep_x, sub_y)] @ vvec) % p.q
        newc = (f.c[list(keep_y)] + uvec @ A[np.ix_(sub_x, keep_y)]) % p.q
        newd = (f.d0 + uvec @ A[np.ix_(sub_x, sub_y)] @ vvec + f.b[sub_x] @ uvec + f.c[sub_y] @ vvec) % p.q
        new_polys.append(BilinearPoly(newA, newb, newc, int(newd), p.q))
    return BilinearSequence(new_params, new_polys), keep_x, keep_y


def partial_evaluate(B: BilinearSequence, u_prefix, v_prefix) -> BilinearSequence:
    """Substitute x_1..x_{a_x} = u and y_1..y_{a_y} = v.

    ``a_x == n_x`` is accepted (the sequence degenerates to a linear system
    in y with ``n_x == 0``), which the hybrid solver uses for its
    exhaustive-over-x limit; ``a_y`` must stay below ``n_y``.
    """
    p = B.params
    u = [int(t) for t in np.asarray(u_prefix, dtype=np.int64).ravel()]
    v = [int(t) for t in np.asarray(v_prefix, dtype=np.int64).ravel()]
    if len(u) > p.n_x or len(v) >= p.n_y:
        raise ValueError("prefix too long")
    seq, _, _ = substitute(B, dict(enumerate(u)), dict(enumerate(v)))
    return seq


def homogenize(B: BilinearSequence) -> BilinearSequence:
    """Homogenize with fresh variables x0, y0 at index 0: the affine parts
    move into row/column 0 of the coefficient matrix."""
    p = B.params
    new_params = Params(p.n_x + 1, p.n_y + 1, p.m, p.q)
    polys = []
    for f in B.polys:
        A = np.zeros((p.n_x + 1, p.n_y + 1), dtype=np.int64)
        A[1:, 1:] = f.A
        A[1:, 0] = f.b
        A[0, 1:] = f.c
        A[0, 0] = f.d0
        polys.append(BilinearPoly(A, np.zeros(p.n_x + 1, np.int64), np.zeros(p.n_y + 1, np.int64), 0, p.q))
    return BilinearSequence(new_params, polys)


def dehomogenize(B: BilinearSequence) -> BilinearSequence:
    """Substitute x0 = 1, y0 = 1 (index-0 variables are the homogenizers)."""
    p = B.params
    if p.n_x < 1 or p.n_y < 2:
        raise ValueError("need the index-0 variable in both blocks")
    new_params = Params(p.n_x - 1, p.n_y - 1, p.m, p.q)
    polys = []
    for f in B.polys:
        A = f.A[1:, 1:]
        b = (f.A[1:, 0] + f.b[1:]) % p.q
        c = (f.A[0, 1:] + f.c[1:]) % p.q
        d0 = int(f.A[0, 0] + f.b[0] + f.c[0] + f.d0) % p.q
        polys.append(BilinearPoly(A, b, c, d0, p.q))
    return BilinearSequence(new_params, polys)


def jacobian_x(B: BilinearSequence) -> list[list[YPoly]]:
    """Jacobian with respect to x: entry (i, j) = d f_i / d x_j, an
    affine-linear polynomial in F[y]."""
    p = B.params
    zero = (0,) * p.n_y
    jac: list[list[YPoly]] = []
    for f in B.polys:
        row = []
        for j in range(p.n_x):
            terms: dict[tuple[int, ...], int] = {}
            for k in range(p.n_y):
                if f.A[j, k]:
                    terms[zero[:k] + (1,) + zero[k + 1 :]] = int(f.A[j, k])
            if f.b[j]:
                terms[zero] = int(f.b[j])
            row.append(YPoly(p.n_y, p.q, terms))
        jac.append(row)
    return jac


def random_sequence(p: Params, homogeneous: bool, rng: np.random.Generator) -> BilinearSequence:
    """Uniform i.i.d. coefficients; the homogeneous flag zeroes b, c, d0."""
    polys = []
    for _ in range(p.m):
        A = rng.integers(0, p.q, size=(p.n_x, p.n_y), dtype=np.int64)
        if homogeneous:
            b = np.zeros(p.n_x, np.int64)
            c = np.zeros(p.n_y, np.int64)
            d0 = 0
        else:
            b = rng.integers(0, p.q, size=p.n_x, dtype=np.int64)
            c = rng.integers(0, p.q, size=p.n_y, dtype=np.int64)
            d0 = int(rng.integers(0, p.q))
        polys.append(BilinearPoly(A, b, c, d0, p.q))
    return BilinearSequence(p, polys)


def plant_solution(B: BilinearSequence, u, v) -> BilinearSequence:
    """Shift the constant terms so that (u, v) becomes a common zero."""
    p = B.params
    vals = evaluate(B, u, v)
    polys = [
        BilinearPoly(f.A, f.b, f.c, int(f.d0 - vals[k]) % p.q, p.q)
        for k, f in enumerate(B.polys)
    ]
    return BilinearSequence(p, polys)


def verify_syzygy(B: BilinearSequence, G: YPolyVector | Sequence[YPoly]) -> bool:
    """Exact symbolic check that ``sum_i G_i * f_i`` is the zero polynomial."""
    entries = G.entries if isinstance(G, YPolyVector) else tuple(G)
    p = B.params
    if len(entries) != p.m:
        raise ValueError(f"expected {p.m} entries, got {len(entries)}")
    acc: dict[TermKey, int] = {}

    def put(key: TermKey, coeff: int) -> None:
        new = (acc.get(key, 0) + coeff) % p.q
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)

    for g, f in zip(entries, B.polys):
        if g.n_y != p.n_y:
            raise ValueError("syzygy entry over wrong variable count")
        for exp, gc in g.terms.items():
            for i in range(p.n_x):
                row = f.A[i]
                for j in range(p.n_y):
                    if row[j]:
                        key = (i, tuple(exp[t] + (1 if t == j else 0) for t in range(p.n_y)))
                        put(key, gc * int(row[j]))
                if f.b[i]:
                    put((i, exp), gc * int(f.b[i]))
            for j in range(p.n_y):
                if f.c[j]:
                    key = (-1, tuple(exp[t] + (1 if t == j else 0) for t in range(p.n_y)))
                    put(key, gc * int(f.c[j]))
            if f.d0:
                put((-1, exp), gc * f.d0)
    return not acc

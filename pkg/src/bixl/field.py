"""Exact arithmetic in the prime field GF(q).

Elements are plain Python/numpy integers kept canonically in ``[0, q)``;
matrix-level arithmetic lives in :mod:`bixl.linalg`.  A :class:`FieldCtx`
validates the modulus once and is then shared freely (it is immutable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["FieldCtx", "is_prime", "inv", "pow_mod", "rand_elem"]

_INV_TABLE_MAX_Q = 1 << 16


def is_prime(n: int) -> bool:
    """Trial-division primality check, adequate for moduli below 2**31."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (g, s, t) with s*a + t*b = g = gcd(a, b)."""
    prev_s, s = 1, 0
    prev_t, t = 0, 1
    while b:
        quot, rem = divmod(a, b)
        a, b = b, rem
        prev_s, s = s, prev_s - quot * s
        prev_t, t = t, prev_t - quot * t
    return a, prev_s, prev_t


@dataclass(frozen=True)
class FieldCtx:
    """Context for GF(q) with prime q.

    Immutable after construction and safe to share between threads.  When
    ``cache_inverses`` is set (and q < 2**16) a full inverse table is built
    eagerly; otherwise inverses go through extended Euclid on demand.
    """

    q: int
    cache_inverses: bool = False
    _inv_table: tuple[int, ...] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q >= (1 << 31):
            raise ValueError(f"modulus must be an int below 2**31, got {self.q!r}")
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")
        if self.cache_inverses and self.q < _INV_TABLE_MAX_Q:
            table = (0,) + tuple(pow(a, self.q - 2, self.q) for a in range(1, self.q))
            object.__setattr__(self, "_inv_table", table)

    def normalize(self, a: int) -> int:
        return a % self.q


def inv(a: int, ctx: FieldCtx) -> int:
    """Multiplicative inverse of ``a`` in GF(q).

    Raises:
        ZeroDivisionError: if ``a`` is zero mod q.
    """
    q = ctx.q
    a = a % q
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(q)")
    if ctx._inv_table is not None:
        return ctx._inv_table[a]
    g, s, _ = _xgcd(a, q)
    assert g == 1
    return s % q


def pow_mod(a: int, e: int, ctx: FieldCtx) -> int:
    """``a**e mod q`` for e >= 0, with ``pow_mod(0, 0) == 1``."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(a % ctx.q, e, ctx.q)


def rand_elem(rng: np.random.Generator, ctx: FieldCtx) -> int:
    """Uniform element of GF(q); deterministic for a fixed generator state."""
    return int(rng.integers(0, ctx.q))

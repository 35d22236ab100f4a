"""Integer partitions: enumeration, dominance, conjugation and hook statistics."""

from __future__ import annotations

import re
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, floor, prod

__all__ = [
    "Partition",
    "enumerate_partitions",
    "partition_index",
    "conjugate",
    "n_stat",
    "n_stat_by_rows",
    "dominance_leq",
    "hooks",
    "hook_product",
    "z_stat",
    "multiplicity",
    "theta_durfee_height",
    "parse_partition",
    "format_partition",
    "hook_shape",
]

_MULT_CACHE_THRESHOLD = 64


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    Instances compare, hash and sort as plain tuples, so descending
    lexicographic order is ``sorted(..., reverse=True)``.
    """

    __slots__ = ()

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        if parts and parts[-1] < 1:
            raise ValueError(f"parts must be positive: {parts}")
        return super().__new__(cls, parts)

    @classmethod
    def from_unsorted(cls, parts) -> "Partition":
        return cls(sorted((p for p in parts if p), reverse=True))

    @property
    def parts(self) -> tuple:
        return tuple(self)

    @property
    def n(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return format_partition(self)

    def cells(self):
        """Yield the 1-based cells (row, col) of the Ferrers diagram."""
        for i, part in enumerate(self, start=1):
            for j in range(1, part + 1):
                yield (i, j)

    def contains(self, cell) -> bool:
        i, j = cell
        return 1 <= i <= len(self) and 1 <= j <= self[i - 1]


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


def _partitions_max(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_max(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> tuple:
    """All partitions of ``n`` in descending lexicographic order."""
    _check_n(n)
    return tuple(Partition(p) for p in _partitions_max(n, n))


@lru_cache(maxsize=None)
def partition_index(n: int) -> dict:
    return {lam: i for i, lam in enumerate(enumerate_partitions(n))}


@lru_cache(maxsize=4096)
def conjugate(lam: Partition) -> Partition:
    if not lam:
        return Partition(())
    return Partition(sum(1 for p in lam if p > j) for j in range(lam[0]))


def n_stat(lam: Partition) -> int:
    """n(lambda) = sum_i binom(lam^t_i, 2)."""
    return sum(comb(c, 2) for c in conjugate(lam))


def n_stat_by_rows(lam: Partition) -> int:
    """n(lambda) = sum_i (i-1) lam_i; an independent route to :func:`n_stat`."""
    return sum(i * p for i, p in enumerate(lam))


def dominance_leq(lam: Partition, mu: Partition) -> bool:
    """True iff every prefix sum of ``lam`` is at most that of ``mu``."""
    if sum(lam) != sum(mu):
        raise ValueError("dominance order compares partitions of equal weight")
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if a > b:
            return False
    return True


def hooks(lam: Partition) -> dict:
    """Map each cell (i, j) to (arm, leg) with arm = lam_i - j, leg = lam^t_j - i."""
    conj = conjugate(lam)
    return {(i, j): (lam[i - 1] - j, conj[j - 1] - i) for (i, j) in lam.cells()}


def hook_product(lam: Partition) -> int:
    return prod(a + l + 1 for a, l in hooks(lam).values())


def multiplicity(lam: Partition) -> dict:
    if len(lam) > _MULT_CACHE_THRESHOLD:
        return _multiplicity_cached(lam)
    return Counter(lam)


@lru_cache(maxsize=1024)
def _multiplicity_cached(lam: Partition) -> dict:
    return Counter(lam)


def z_stat(rho: Partition) -> int:
    """z_rho = prod_i i^{m_i} m_i!."""
    return prod(i**m * factorial(m) for i, m in multiplicity(rho).items())


def theta_durfee_height(lam: Partition, theta) -> int:
    """Smallest u >= 1 with cell (u, floor(u/theta) + 1) outside ``lam``."""
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    u = 1
    while lam.contains((u, floor(u / theta) + 1)):
        u += 1
    return u


def hook_shape(n: int, s: int) -> Partition:
    """The hook (s, 1^{n-s})."""
    return Partition((s,) + (1,) * (n - s))


_PARTITION_RE = re.compile(r"^\s*\[\s*(\d+(\s*,\s*\d+)*)?\s*\]\s*$")


def parse_partition(text: str) -> Partition:
    """Parse the bracketed text form, e.g. ``"[3, 1,1]"``."""
    if not _PARTITION_RE.match(text):
        raise ValueError(f"not a partition literal: {text!r}")
    body = text.strip()[1:-1].strip()
    if not body:
        return Partition(())
    return Partition(int(p) for p in body.split(","))


def format_partition(lam) -> str:
    return "[" + ",".join(str(p) for p in lam) + "]"

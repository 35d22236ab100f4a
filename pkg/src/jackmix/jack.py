"""Jack polynomials in the power-sum basis and their closed-form coefficients.

J_lam is built by Gram-Schmidt on the monomials, walking the partitions of n
upward in reverse lexicographic order (a linear extension of dominance), and
normalized so that its p_{1^n} coefficient is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from .linalg import SingularSystemError, solve
from .partitions import (
    Partition,
    conjugate,
    enumerate_partitions,
    hook_product,
    hooks,
    multiplicity,
    n_stat,
    z_stat,
)
from .symfunc import SymExpansion, convert, get_degree_cap

__all__ = [
    "JackTable",
    "jack_table",
    "hook_pair_product",
    "c_two_cycle",
    "c_n_cycle",
    "c_top_row",
    "d_coeff",
    "character",
    "jack_at_ones",
    "chi_to_m",
    "eval_m_product",
    "DegenerateInnerProduct",
]


class DegenerateInnerProduct(ArithmeticError):
    pass


def _theta(theta) -> Fraction:
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    return theta


@dataclass(frozen=True)
class JackTable:
    n: int
    theta: Fraction
    partitions: tuple
    c: dict  # (lam, rho) -> Fraction
    j: dict  # lam -> Fraction

    def row(self, lam) -> list:
        return [self.c[(lam, rho)] for rho in self.partitions]

    def expansion(self, lam) -> SymExpansion:
        return SymExpansion("p", self.n, {rho: self.c[(lam, rho)] for rho in self.partitions})


@lru_cache(maxsize=None)
def _monomials_in_p(n: int) -> tuple:
    parts = enumerate_partitions(n)
    rows = []
    for lam in parts:
        e = convert(SymExpansion.single("m", lam), "p")
        rows.append(tuple(e[rho] for rho in parts))
    return tuple(rows)


@lru_cache(maxsize=64)
def jack_table(n: int, theta) -> JackTable:
    theta = _theta(theta)
    if n < 1 or n > get_degree_cap():
        raise ValueError(f"n must lie in 1..{get_degree_cap()}")
    parts = enumerate_partitions(n)
    weight = [z_stat(rho) * theta ** len(rho) for rho in parts]
    mono = _monomials_in_p(n)
    last = len(parts) - 1  # index of 1^n

    def inner(a, b):
        return sum(x * y * w for x, y, w in zip(a, b, weight) if x and y)

    done = []  # (vector, norm)
    vecs = {}
    norms = {}
    for idx in range(len(parts) - 1, -1, -1):
        v = list(mono[idx])
        m = mono[idx]
        for u, nu in done:
            coef = inner(m, u) / nu
            if coef:
                v = [a - coef * b for a, b in zip(v, u)]
        if not v[last]:
            raise DegenerateInnerProduct(f"zero p_(1^n) coefficient for {parts[idx]}")
        s = v[last]
        v = [a / s for a in v]
        nv = inner(v, v)
        if nv == 0:
            raise DegenerateInnerProduct(f"zero norm for {parts[idx]}")
        done.append((v, nv))
        vecs[parts[idx]] = v
        norms[parts[idx]] = nv
    c = {}
    for lam in parts:
        for rho, val in zip(parts, vecs[lam]):
            c[(lam, rho)] = val
    return JackTable(n, theta, parts, c, {lam: norms[lam] for lam in parts})


def hook_pair_product(lam: Partition, theta) -> Fraction:
    """j_lam = prod over cells of ((a+1)theta + leg)(a theta + leg + 1)."""
    theta = Fraction(theta)
    out = Fraction(1)
    for a, l in hooks(lam).values():
        out *= ((a + 1) * theta + l) * (a * theta + l + 1)
    return out


def c_two_cycle(lam: Partition, theta) -> Fraction:
    if sum(lam) < 2:
        raise ValueError("need n >= 2")
    return Fraction(theta) * n_stat(conjugate(lam)) - n_stat(lam)


def c_n_cycle(lam: Partition, theta) -> Fraction:
    theta = Fraction(theta)
    out = Fraction(1)
    for i, j in lam.cells():
        if (i, j) != (1, 1):
            out *= theta * (j - 1) - (i - 1)
    return out


def c_top_row(rho: Partition, theta) -> Fraction:
    """c_{(n), rho} = theta^{n - len(rho)} n! / z_rho."""
    n = sum(rho)
    return Fraction(theta) ** (n - len(rho)) * Fraction(factorial(n), z_stat(rho))


def d_coeff(lam: Partition, rho: Partition, table: JackTable) -> Fraction:
    n = table.n
    return table.c[(lam, rho)] * z_stat(rho) / table.theta ** (n - len(rho)) / hook_product(lam)


def jack_at_ones(lam: Partition, N: int, theta) -> Fraction:
    theta = Fraction(theta)
    return prod((N - (i - 1) + theta * (j - 1) for i, j in lam.cells()), start=Fraction(1))


# ------------------------------------------------------------- characters


def _beta_set(lam) -> tuple:
    L = len(lam)
    return tuple(lam[i] + (L - 1 - i) for i in range(L))


def _from_beta(beta) -> Partition:
    b = sorted(beta, reverse=True)
    L = len(b)
    return Partition([x - (L - 1 - i) for i, x in enumerate(b) if x - (L - 1 - i) > 0])


@lru_cache(maxsize=None)
def _mn(lam: Partition, rho: tuple) -> int:
    if not rho:
        return 1 if not lam else 0
    r, rest = rho[0], rho[1:]
    beta = set(_beta_set(lam))
    total = 0
    for b in beta:
        nb = b - r
        if nb < 0 or nb in beta:
            continue
        height = sum(1 for x in beta if nb < x < b)
        new = (beta - {b}) | {nb}
        total += (-1) ** height * _mn(_from_beta(new), rest)
    return total


def character(lam: Partition, rho: Partition) -> int:
    """chi_lam(rho) by the Murnaghan-Nakayama rule on beta-numbers."""
    if sum(lam) != sum(rho):
        raise ValueError("lam and rho must have the same weight")
    return _mn(Partition(lam), tuple(rho))


# ------------------------------------------------------- chi in cycle counts


def eval_m_product(mu: Partition, rho: Partition) -> int:
    """prod_{i >= 2} m_{mu_i}(rho), the cycle-count monomial indexed by mu."""
    mult = multiplicity(rho)
    return prod(mult.get(p, 0) for p in mu[1:])


def chi_to_m(lam: Partition, k: int | None = None) -> dict:
    """Coefficients a_mu with chi_lam = sum_mu a_mu prod_{i>=2} m_{mu_i}, over mu_1 >= n-k."""
    n = sum(lam)
    if k is None:
        k = n - lam[0]
    if lam[0] < n - k:
        raise ValueError("need lam_1 >= n - k")
    if 2 * k > n:
        raise ValueError("need k <= n/2")
    basis = [mu for mu in enumerate_partitions(n) if mu[0] >= n - k]
    classes = enumerate_partitions(n)
    a = [[eval_m_product(mu, rho) for mu in basis] for rho in classes]
    b = [character(lam, rho) for rho in classes]
    try:
        sol = solve(a, b)
    except SingularSystemError as exc:
        raise SingularSystemError(f"character of {lam} not in the cycle-count span: {exc}") from None
    return {mu: v for mu, v in zip(basis, sol) if v}

"""The Metropolis random-transposition chain lumped to cycle types.

A transposition either merges two cycles (accepted with prob 1 ^ theta) or
splits one (accepted with prob 1 ^ 1/theta); the stationary law is the
Ewens distribution with parameter alpha = 1/theta.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod

import numpy as np
from scipy import sparse

from .partitions import Partition, conjugate, enumerate_partitions, n_stat, partition_index, z_stat

__all__ = [
    "PeriodicityError",
    "SparseKernel",
    "build_kernel",
    "default_laziness",
    "eigenvalue",
    "EwensDist",
    "ewens",
    "t_matrix",
    "holding_closed_form",
    "kernel_row",
    "sample_step",
    "sample_ewens",
    "splitmix64",
    "replica_rng",
]


class PeriodicityError(ValueError):
    pass


def _theta(theta) -> Fraction:
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    return theta


def default_laziness(n: int, theta) -> Fraction:
    """1/n at theta = 1 (where the plain chain has period 2), else 0."""
    return Fraction(1, n) if Fraction(theta) == 1 else Fraction(0)


@dataclass(frozen=True)
class SparseKernel:
    n: int
    theta: Fraction
    delta: Fraction
    states: tuple
    rows: tuple  # rows[i] = {j: prob}
    exact: bool = True

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self) -> dict:
        return partition_index(self.n)

    def entry(self, lam, mu):
        idx = self.index()
        return self.rows[idx[lam]].get(idx[mu], 0)

    def dense(self) -> list:
        zero = Fraction(0) if self.exact else 0.0
        out = [[zero] * self.size for _ in range(self.size)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                out[i][j] = v
        return out

    def to_csr(self) -> sparse.csr_matrix:
        data, ri, ci = [], [], []
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                ri.append(i)
                ci.append(j)
                data.append(float(v))
        return sparse.csr_matrix((data, (ri, ci)), shape=(self.size, self.size))

    def step(self, vec: list) -> list:
        """Row vector times kernel, exact."""
        out = [Fraction(0)] * self.size
        for i, a in enumerate(vec):
            if a:
                for j, p in self.rows[i].items():
                    out[j] += a * p
        return out

    def triplets(self):
        for i, row in enumerate(self.rows):
            for j in sorted(row):
                yield self.states[i], self.states[j], row[j]


def _moves(lam: Partition):
    """Yield (target, count, kind) over transpositions from lam; kind 'merge' or 'split'."""
    parts = list(lam)
    L = len(parts)
    for a in range(L):
        for b in range(a + 1, L):
            rest = parts[:a] + parts[a + 1 : b] + parts[b + 1 :]
            yield Partition.from_unsorted(rest + [parts[a] + parts[b]]), parts[a] * parts[b], "merge"
    seen = set()
    for k, size in enumerate(parts):
        if size in seen:
            # identical parts give identical targets; account for them together
            continue
        mult = parts.count(size)
        seen.add(size)
        rest = parts[:k] + parts[k + 1 :]
        for x in range(1, size // 2 + 1):
            y = size - x
            count = size if x != y else size // 2
            yield Partition.from_unsorted(rest + [x, y]), count * mult, "split"


def build_kernel(n: int, theta, delta=None, exact: bool = True) -> SparseKernel:
    """Lumped Metropolis kernel with laziness: P <- delta I + (1 - delta) P."""
    theta = _theta(theta)
    if n < 2:
        raise ValueError("n must be at least 2")
    delta = default_laziness(n, theta) if delta is None else Fraction(delta)
    if not 0 <= delta < 1:
        raise ValueError("laziness must lie in [0, 1)")
    if theta == 1 and delta == 0:
        raise PeriodicityError("the theta = 1 chain has period 2; use positive laziness")
    states = enumerate_partitions(n)
    idx = partition_index(n)
    rows = []
    for i, lam in enumerate(states):
        row = kernel_row(lam, theta, delta, exact=exact)
        rows.append({idx[mu]: p for mu, p in sorted(row.items(), key=lambda kv: idx[kv[0]])})
    return SparseKernel(n, theta, delta, states, tuple(rows), exact)


def kernel_row(lam: Partition, theta, delta=0, exact: bool = True) -> dict:
    """Transition probabilities out of ``lam`` as {target: prob}."""
    theta = Fraction(theta)
    delta = Fraction(delta)
    n = sum(lam)
    conv = (lambda x: x) if exact else float
    acc_merge = conv(min(Fraction(1), theta))
    acc_split = conv(min(Fraction(1), 1 / theta))
    total = comb(n, 2)
    row: dict = {}
    for target, count, kind in _moves(lam):
        p = conv(Fraction(count, total)) * (acc_merge if kind == "merge" else acc_split)
        row[target] = row.get(target, 0) + p
    hold = conv(Fraction(1)) - sum(row.values())
    if exact:
        if hold < 0:
            raise AssertionError(f"negative holding probability at {lam}")
        expected = holding_closed_form(lam, theta)
        if hold != expected:
            raise AssertionError(f"holding mismatch at {lam}: {hold} != {expected}")
    d = conv(delta)
    row = {mu: (1 - d) * v for mu, v in row.items()}
    lam = Partition(lam)
    row[lam] = d + (1 - d) * hold
    return {mu: v for mu, v in row.items() if v}


def holding_closed_form(lam: Partition, theta) -> Fraction:
    """1 - 1^theta + (sum_k binom(lam_k, 2) / binom(n, 2)) (1^theta - 1^(1/theta))."""
    theta = Fraction(theta)
    n = sum(lam)
    s = Fraction(sum(comb(p, 2) for p in lam), comb(n, 2))
    lo, hi = min(Fraction(1), theta), min(Fraction(1), 1 / theta)
    return 1 - lo + s * (lo - hi)


def eigenvalue(lam: Partition, theta, delta=0) -> Fraction:
    theta = _theta(theta)
    delta = Fraction(delta)
    n = sum(lam)
    beta = 1 - min(theta, Fraction(1)) + (theta * n_stat(conjugate(lam)) - n_stat(lam)) / (
        max(theta, Fraction(1)) * comb(n, 2)
    )
    return delta + (1 - delta) * beta


def t_matrix(n: int, theta) -> list:
    """The dense T_theta matrix on cycle types (rows sum to 1, not stochastic for theta < 1)."""
    theta = _theta(theta)
    states = enumerate_partitions(n)
    idx = partition_index(n)
    b = comb(n, 2)
    out = [[Fraction(0)] * len(states) for _ in states]
    for i, lam in enumerate(states):
        out[i][i] += (theta - 1) * sum(comb(p, 2) for p in lam) / (theta * b)
        for target, count, kind in _moves(lam):
            w = Fraction(count, b) if kind == "merge" else Fraction(count, b) / theta
            out[i][idx[target]] += w
    return out


# ------------------------------------------------------------------ Ewens


@dataclass(frozen=True)
class EwensDist:
    n: int
    theta: Fraction
    states: tuple
    probs: dict  # Partition -> Fraction
    Pi: Fraction
    z: Fraction

    def vector(self) -> list:
        return [self.probs[s] for s in self.states]


def ewens_prob(rho: Partition, theta) -> Fraction:
    theta = Fraction(theta)
    n = sum(rho)
    Pi = prod((1 + theta * i for i in range(n)), start=Fraction(1))
    return theta ** (n - len(rho)) * Fraction(factorial(n), z_stat(rho)) / Pi


def ewens(n: int, theta) -> EwensDist:
    theta = _theta(theta)
    if n < 1:
        raise ValueError("n must be positive")
    Pi = prod((1 + theta * i for i in range(n)), start=Fraction(1))
    z = Pi / theta**n
    states = enumerate_partitions(n)
    probs = {rho: theta ** (-len(rho)) * Fraction(factorial(n), z_stat(rho)) / z for rho in states}
    return EwensDist(n, theta, states, probs, Pi, z)


# --------------------------------------------------------------- sampling


_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replica_rng(seed: int, replica: int) -> random.Random:
    """Independent stream for replica ``replica``: seeded by splitmix64(seed + replica)."""
    return random.Random(splitmix64((seed + replica) & _MASK64))


def sample_step(lam, theta, delta, rng) -> Partition:
    """One move of the lumped chain from ``lam``."""
    theta = float(theta)
    n = sum(lam)
    if delta and rng.random() < float(delta):
        return Partition(lam)
    u = rng.randrange(n)
    v = rng.randrange(n - 1)
    if v >= u:
        v += 1
    parts = list(lam)
    cum = []
    s = 0
    for p in parts:
        s += p
        cum.append(s)
    a = bisect.bisect_right(cum, u)
    b = bisect.bisect_right(cum, v)
    if a == b:
        if theta > 1 and rng.random() >= 1.0 / theta:
            return Partition(lam)
        size = parts[a]
        d = (v - u) % size
        parts[a : a + 1] = [d, size - d]
    else:
        if theta < 1 and rng.random() >= theta:
            return Partition(lam)
        merged = parts[a] + parts[b]
        for k in sorted((a, b), reverse=True):
            del parts[k]
        parts.append(merged)
    return Partition(sorted(parts, reverse=True))


def sample_ewens(n: int, theta, rng) -> Partition:
    """Chinese restaurant process with alpha = 1/theta."""
    alpha = 1.0 / float(theta)
    tables: list = []
    owner: list = []  # table of each seated customer
    for i in range(n):
        if rng.random() < alpha / (alpha + i):
            owner.append(len(tables))
            tables.append(1)
        else:
            t = owner[rng.randrange(i)]
            owner.append(t)
            tables[t] += 1
    return Partition(sorted(tables, reverse=True))


def float_kernel_csr(n: int, theta, delta=None) -> sparse.csr_matrix:
    return build_kernel(n, theta, delta, exact=False).to_csr()


def as_array(vec) -> np.ndarray:
    return np.array([float(x) for x in vec])

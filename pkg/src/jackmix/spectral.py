"""Eigenfunctions, distances to stationarity and the L^2 spectral bound.

Left eigenfunctions are g_lam(rho) = c_{lam,rho} / sqrt(j_lam Pi / (theta^n n!)).
Everything here is phrased through g^2 and c, which are rational.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, lgamma, log

import numpy as np

from .chain import EwensDist, SparseKernel, eigenvalue, ewens
from .jack import JackTable, c_n_cycle, jack_table
from .partitions import Partition, conjugate, enumerate_partitions, hooks, n_stat, partition_index

__all__ = [
    "NumericInstability",
    "EigenSystem",
    "eigen_system",
    "ProbVector",
    "left_eigen_failures",
    "left_eigen_check",
    "completeness_failures",
    "completeness_check",
    "distribution_at",
    "tv_distance",
    "l2_distance",
    "l2_direct",
    "l2_identity_closed_form",
    "l2_bound_by_lambda1",
    "sandwich_check",
    "log_j",
    "partitions_with_tail",
    "L2Estimate",
    "l2_large_n",
    "hook_l2_ncycle",
]

log_ = logging.getLogger(__name__)


class NumericInstability(ArithmeticError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    n: int
    theta: Fraction
    delta: Fraction
    table: JackTable
    beta: dict  # lam -> eigenvalue (laziness applied)
    g2: dict  # (lam, rho) -> g_lam(rho)^2
    pi: EwensDist

    def f2(self, lam, rho) -> Fraction:
        """Squared right eigenfunction f = g / pi."""
        return self.g2[(lam, rho)] / self.pi.probs[rho] ** 2


def eigen_system(n: int, theta, delta=None) -> EigenSystem:
    theta = Fraction(theta)
    if delta is None:
        delta = Fraction(1, n) if theta == 1 and n > 1 else Fraction(0)
    delta = Fraction(delta)
    table = jack_table(n, theta)
    pi = ewens(n, theta)
    scale = theta**n * factorial(n) / pi.Pi
    g2 = {}
    for lam in table.partitions:
        jl = table.j[lam]
        for rho in table.partitions:
            g2[(lam, rho)] = table.c[(lam, rho)] ** 2 * scale / jl
    beta = {lam: (eigenvalue(lam, theta, delta) if n > 1 else Fraction(1)) for lam in table.partitions}
    return EigenSystem(n, theta, delta, table, beta, g2, pi)


@dataclass
class ProbVector:
    n: int
    states: tuple
    values: list
    mode: str = "exact"

    def as_dict(self) -> dict:
        return dict(zip(self.states, self.values))

    def __getitem__(self, lam):
        return self.values[partition_index(self.n)[lam]]


# ------------------------------------------------------------------ checks


def left_eigen_failures(system: EigenSystem, kernel: SparseKernel) -> list:
    """Partitions lam for which c_lam P != beta_lam c_lam."""
    bad = []
    for lam in system.table.partitions:
        row = system.table.row(lam)
        out = kernel.step(row)
        b = system.beta[lam]
        if any(o != b * r for o, r in zip(out, row)):
            bad.append(lam)
    return bad


def left_eigen_check(system: EigenSystem, kernel: SparseKernel) -> bool:
    bad = left_eigen_failures(system, kernel)
    if bad:
        log_.error("left eigenvector check failed for %s", bad)
    return not bad


def completeness_failures(system: EigenSystem) -> list:
    """States where sum_lam g^2 != pi or sum_lam f^2 != 1/pi; returns (rho, residuals)."""
    bad = []
    parts = system.table.partitions
    for rho in parts:
        p = system.pi.probs[rho]
        left = sum(system.g2[(lam, rho)] for lam in parts)
        right = sum(system.f2(lam, rho) for lam in parts)
        if left != p or right != 1 / p:
            bad.append((rho, left - p, right - 1 / p))
    return bad


def completeness_check(system: EigenSystem, kernel: SparseKernel | None = None) -> bool:
    bad = completeness_failures(system)
    if bad:
        log_.error("completeness failed at %s", bad)
    return not bad


# --------------------------------------------------------- distributions


def distribution_at(start: Partition, k: int, kernel: SparseKernel, mode: str = "auto") -> ProbVector:
    """delta_start P^k, exactly or in floats."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if mode == "auto":
        mode = "exact" if kernel.exact and kernel.size <= 60 else "float"
    idx = partition_index(kernel.n)[Partition(start)]
    if mode == "exact":
        if not kernel.exact:
            raise ValueError("exact powering needs an exact kernel")
        vec = [Fraction(0)] * kernel.size
        vec[idx] = Fraction(1)
        for _ in range(k):
            vec = kernel.step(vec)
        return ProbVector(kernel.n, kernel.states, vec, "exact")
    vals = float_powers(kernel, start, [k])[0]
    return ProbVector(kernel.n, kernel.states, list(vals), "float")


def float_powers(kernel: SparseKernel, start, ks) -> list:
    """Float distributions at each step count in ``ks`` (sorted ascending) by sparse matvec."""
    pt = kernel.to_csr().T.tocsr()
    vec = np.zeros(kernel.size)
    vec[partition_index(kernel.n)[Partition(start)]] = 1.0
    out = []
    done = 0
    for k in ks:
        for _ in range(k - done):
            vec = pt @ vec
        done = k
        drift = abs(math.fsum(vec) - 1.0)
        if drift > 1e-12 * max(1, k):
            raise NumericInstability(f"probability mass drifted by {drift:.3e}")
        out.append(vec.copy())
    return out


def tv_distance(v, pi: EwensDist):
    values = v.values if isinstance(v, ProbVector) else v
    target = pi.vector()
    if all(isinstance(x, Fraction) for x in values):
        return sum(abs(a - b) for a, b in zip(values, target)) / 2
    return 0.5 * math.fsum(abs(float(a) - float(b)) for a, b in zip(values, target))


def l2_distance(start: Partition, k: int, system: EigenSystem) -> Fraction:
    """||P_x^k / pi - 1||^2 by the spectral sum."""
    x = Partition(start)
    px = system.pi.probs[x]
    s = sum(system.beta[lam] ** (2 * k) * system.g2[(lam, x)] for lam in system.table.partitions)
    return s / px**2 - 1


def l2_direct(start: Partition, k: int, kernel: SparseKernel, pi: EwensDist | None = None) -> Fraction:
    pi = pi or ewens(kernel.n, kernel.theta)
    v = distribution_at(start, k, kernel, mode="exact")
    return sum((a - p) ** 2 / p for a, p in zip(v.values, pi.vector()))


def l2_identity_closed_form(n: int, theta, delta, k: int) -> Fraction:
    """theta^n n! Pi sum_{lam != (n)} beta^{2k} / j_lam for the start 1^n."""
    theta = Fraction(theta)
    t = jack_table(n, theta)
    Pi = ewens(n, theta).Pi
    top = Partition((n,))
    s = sum(eigenvalue(lam, theta, delta) ** (2 * k) / t.j[lam] for lam in t.partitions if lam != top)
    return theta**n * factorial(n) * Pi * s


def l2_bound_by_lambda1(start: Partition, k: int, system: EigenSystem) -> dict:
    """Spectral terms (excluding the constant mode) grouped as ('+', lam_1) or ('-', lam^t_1) by sign of beta."""
    x = Partition(start)
    px = system.pi.probs[x]
    top = Partition((system.n,))
    groups: dict = {}
    for lam in system.table.partitions:
        term = system.beta[lam] ** (2 * k) * system.g2[(lam, x)] / px**2
        if lam == top:
            term -= 1  # the constant mode cancels the -1
            if term == 0:
                continue
            key = ("+", lam[0])
        elif system.beta[lam] >= 0:
            key = ("+", lam[0])
        else:
            key = ("-", conjugate(lam)[0])
        groups[key] = groups.get(key, 0) + term
    return dict(sorted(groups.items()))


def sandwich_check(start, k, kernel: SparseKernel, system: EigenSystem) -> bool:
    pi = system.pi
    v = distribution_at(start, k, kernel, mode="exact")
    tv = tv_distance(v, pi)
    l2 = l2_distance(start, k, system)
    if not 4 * tv**2 <= l2:
        raise AssertionError(f"4 tv^2 = {4 * tv**2} exceeds L2 = {l2} at start {start}, k={k}")
    return True


# ----------------------------------------------------- large-n float work


def log_j(lam: Partition, theta: float) -> float:
    """log j_lam(theta) in floats."""
    return math.fsum(
        log(((a + 1) * theta + l) * (a * theta + l + 1)) for a, l in hooks(lam).values()
    )


def log_Pi(n: int, theta: float) -> float:
    return math.fsum(log(1 + theta * i) for i in range(n))


def _beta_float(lam, theta: float, delta: float) -> float:
    n = sum(lam)
    b = 1 - min(theta, 1.0) + (theta * n_stat(conjugate(lam)) - n_stat(lam)) / (max(theta, 1.0) * comb(n, 2))
    return delta + (1 - delta) * b


def partitions_with_tail(n: int, K: int):
    """All lam |- n with n - lam_1 <= K, i.e. (n - m, mu) for mu |- m, mu_1 <= n - m."""
    out = [Partition((n,))]
    for m in range(1, min(K, n - 1) + 1):
        for mu in enumerate_partitions(m):
            if mu[0] <= n - m:
                out.append(Partition((n - m,) + tuple(mu)))
    return out


def _top_with_first_row(n: int, s: int) -> Partition:
    q, r = divmod(n, s)
    return Partition((s,) * q + ((r,) if r else ()))


@dataclass(frozen=True)
class L2Estimate:
    kept: float  # exact spectral sum over the kept partitions (constant mode excluded)
    tail: float  # certified upper bound on the remaining terms
    K: int

    @property
    def upper(self) -> float:
        return self.kept + self.tail


def _group_beta_max(n: int, s: int, theta: float, delta: float) -> float:
    """max |beta| over lam with lam_1 = s (beta is monotone in dominance)."""
    hi = _beta_float(_top_with_first_row(n, s), theta, delta)
    lo = _beta_float(Partition((s,) + (1,) * (n - s)), theta, delta)
    return max(abs(hi), abs(lo))


def l2_large_n(n: int, theta, delta, ks, start: str = "id", K: int = 40) -> list:
    """L^2 distance at each k from the identity ('id') or n-cycle ('ncycle') start.

    Terms with n - lam_1 <= K are summed exactly in floats; the rest is bounded
    using sum_{lam_1 = s} theta^n n! Pi / j_lam <= binom(n, s) Pi_n / Pi_s
    (id start) or sum_lam g_lam((n))^2 = pi((n)) (n-cycle start).
    """
    th = float(theta)
    dl = float(delta)
    kept = partitions_with_tail(n, K)
    logPi = log_Pi(n, th)
    log_pre = n * log(th) + lgamma(n + 1) + logPi
    top = Partition((n,))
    terms = []  # (log weight, beta)
    for lam in kept:
        if lam == top:
            continue
        lw = log_pre - log_j(lam, th)
        if start == "ncycle":
            c = float(abs(c_n_cycle(lam, Fraction(theta))))
            if c == 0:
                continue
            # g^2/pi^2 = c^2 theta^n n! / (j Pi) * (n Pi / (theta^{n-1} n!))^2
            lw = 2 * log(c) + n * log(th) + lgamma(n + 1) - log_j(lam, th) - logPi
            lw += 2 * (log(n) + logPi - (n - 1) * log(th) - lgamma(n + 1))
        elif start != "id":
            raise ValueError("start must be 'id' or 'ncycle'")
        terms.append((lw, _beta_float(lam, th, dl)))
    # tail weights per first-row length
    tail_groups = []
    if n - K - 1 >= 1:
        for s in range(1, n - K):
            bmax = _group_beta_max(n, s, th, dl)
            if start == "id":
                lw = math.log(comb(n, s)) + logPi - log_Pi(s, th)
                lw = min(lw, logPi)
            else:
                # 1 / pi((n)) = n Pi / (theta^{n-1} n!)
                lw = log(n) + logPi - (n - 1) * log(th) - lgamma(n + 1)
            tail_groups.append((lw, bmax))
    out = []
    for k in ks:
        kept_sum = math.fsum(_term(lw, b, k) for lw, b in terms)
        if start == "id":
            tail = math.fsum(_term(lw, b, k) for lw, b in tail_groups)
        else:
            tail = max((_term(lw, b, k) for lw, b in tail_groups), default=0.0)
        out.append(L2Estimate(kept_sum, tail, K))
    return out


def _term(logw: float, beta: float, k: int) -> float:
    if beta == 0:
        return 0.0 if k > 0 else _safe_exp(logw)
    return _safe_exp(logw + 2 * k * log(abs(beta)))


def _safe_exp(x: float) -> float:
    return math.inf if x > 709.0 else math.exp(x)


def hook_l2_ncycle(n: int, t: int, delta=None) -> float:
    """Spectral L^2 distance from the n-cycle at theta = 1: only hooks survive, each with weight 1."""
    dl = 1.0 / n if delta is None else float(delta)
    total = 0.0
    for s in range(1, n):
        lam = Partition((s,) + (1,) * (n - s))
        b = _beta_float(lam, 1.0, dl)
        total += _term(0.0, b, t)
    return total

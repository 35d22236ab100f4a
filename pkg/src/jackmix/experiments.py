"""Lower-bound statistics and cutoff profiles.

The normalized coefficients d_lam for lam in {(n), (n-1,1), (n-2,1,1), (n-2,2)}
are quadratic polynomials in the cycle counts m_1, m_2.  They are recovered
at any n by restricting the chain to span{1, m_1, m_1^2, m_2}, which it
preserves, and diagonalizing the resulting 4x4 matrix exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .chain import build_kernel, default_laziness, eigenvalue, ewens, kernel_row, replica_rng, sample_ewens, sample_step
from .linalg import left_null_vector, solve
from .partitions import Partition, hook_product, multiplicity
from .spectral import float_powers, l2_large_n

__all__ = [
    "SPAN",
    "MomentCoeffs",
    "cycle_features",
    "d_expansions",
    "d_value",
    "d_expansion_closed_forms",
    "second_moment_coeffs",
    "second_moment_closed_forms",
    "d_moments",
    "chebyshev_tv_lower",
    "t_of_c",
    "cutoff_profile",
    "lower_bound_witness",
    "ncycle_fk_experiment",
]

log = logging.getLogger(__name__)

SPAN = ("1", "m1", "m1^2", "m2")


def cycle_features(rho) -> tuple:
    m = multiplicity(rho)
    m1, m2 = m.get(1, 0), m.get(2, 0)
    return (1, m1, m1 * m1, m2)


def _probe_states(n: int) -> list:
    cands = [
        (1,) * n,
        (2,) + (1,) * (n - 2),
        (2, 2) + (1,) * (n - 4),
        (3,) + (1,) * (n - 3),
        (n,),
        (n - 1, 1),
        (n - 2, 2),
        (n - 2, 1, 1),
        (3, 2) + (1,) * (n - 5),
        (2, 2, 2) + (1,) * (n - 6),
    ]
    out = []
    for c in cands:
        if sum(c) == n and all(p > 0 for p in c):
            lam = Partition.from_unsorted(c)
            if lam not in out:
                out.append(lam)
    return out


@lru_cache(maxsize=256)
def span_matrix(n: int, theta, delta=0) -> tuple:
    """A with (P b_i)(rho) = sum_j A[i][j] b_j(rho) for b = (1, m1, m1^2, m2)."""
    theta, delta = Fraction(theta), Fraction(delta)
    states = _probe_states(n)
    rows, targets = [], [[] for _ in SPAN]
    for rho in states:
        rows.append(cycle_features(rho))
        exp = [Fraction(0)] * 4
        for mu, p in kernel_row(rho, theta, delta).items():
            f = cycle_features(mu)
            for i in range(4):
                exp[i] += p * f[i]
        for i in range(4):
            targets[i].append(exp[i])
    # overdetermined: solve raises if the span were not invariant on the probes
    return tuple(tuple(solve(rows, targets[i])) for i in range(4))


def _named_shapes(n: int) -> dict:
    return {
        "(n)": Partition((n,)),
        "(n-1,1)": Partition((n - 1, 1)),
        "(n-2,1,1)": Partition((n - 2, 1, 1)),
        "(n-2,2)": Partition((n - 2, 2)),
    }


@lru_cache(maxsize=256)
def d_expansions(n: int, theta) -> dict:
    """{lam: (a_1, a_m1, a_m1^2, a_m2)} with d_lam(rho) = a . (1, m1, m1^2, m2)."""
    if n < 5:
        raise ValueError("need n >= 5")
    theta = Fraction(theta)
    A = span_matrix(n, theta, 0)
    ones = Partition((1,) * n)
    feat = cycle_features(ones)
    out = {}
    for lam in _named_shapes(n).values():
        beta = eigenvalue(lam, theta, 0)
        shifted = [[A[i][j] - (beta if i == j else 0) for j in range(4)] for i in range(4)]
        v = left_null_vector(shifted)
        val = sum(a * f for a, f in zip(v, feat))
        target = Fraction(factorial(n), hook_product(lam))  # d_{lam, 1^n}
        out[lam] = tuple(a * target / val for a in v)
    return out


def d_value(coeffs, rho) -> Fraction:
    return sum(a * f for a, f in zip(coeffs, cycle_features(rho)))


def d_expansion_closed_forms(n: int, theta) -> dict:
    """Reference closed forms for d_(n-1,1), d_(n-2,1,1), d_(n-2,2) in (1, m1, m1^2, m2)."""
    t = Fraction(theta)
    a = (1 + (n - 1) * t) / (t * n)
    b = (2 + (n - 2) * t) / (2 * t * n)
    d1 = (-1 / t, a, Fraction(0), Fraction(0))
    d2 = (1 / t**2, -((1 + (n - 1) * t) / (n * t**2) + b), b, -(2 + (n - 2) * t) / (t**2 * n))
    r = n - 2 + 1 / t
    s = n - 3 + 1 / t
    d3 = (
        Fraction(0),
        r / ((n - 1) * (n - 2)) * ((n - 3) * (1 - 1 / t) - Fraction(3, 2) * s),
        r * s / (2 * (n - 1) * (n - 2)),
        r * s / ((n - 1) * (n - 2)),
    )
    return {Partition((n - 1, 1)): d1, Partition((n - 2, 1, 1)): d2, Partition((n - 2, 2)): d3}


@dataclass(frozen=True)
class MomentCoeffs:
    u: Fraction
    v: Fraction
    w: Fraction
    x: Fraction

    def as_tuple(self) -> tuple:
        return (self.u, self.v, self.w, self.x)


def second_moment_coeffs(n: int, theta) -> MomentCoeffs:
    """Solve d1^2 = u + v d1 + w d2 + x d3 on the basis (1, m1, m1^2, m2)."""
    if n < 5:
        raise ValueError("need n >= 5")
    shapes = _named_shapes(n)
    ex = d_expansions(n, theta)
    d1, d2, d3 = ex[shapes["(n-1,1)"]], ex[shapes["(n-2,1,1)"]], ex[shapes["(n-2,2)"]]
    if d1[2] or d1[3]:
        raise AssertionError("d_(n-1,1) should be affine in m1")
    sq = (d1[0] ** 2, 2 * d1[0] * d1[1], d1[1] ** 2, Fraction(0))
    a = [[1 if i == 0 else 0, d1[i], d2[i], d3[i]] for i in range(4)]
    return MomentCoeffs(*solve(a, sq))


def second_moment_closed_forms(n: int, theta) -> MomentCoeffs:
    t = Fraction(theta)
    u = ((n**2 - 4 * n + 3) * t**3 + (n - 1) * t**2 + (n - 1) ** 2 * t + n - 3) / (t**2 * (t + 1) * (t * (n - 3) + 1) * n)
    v = ((n**3 - 6 * n**2 + 11 * n - 6) * t**3 + 2 * (2 * n**2 - 7 * n + 4) * t**2 + (3 * n + 2) * t - 4) / (
        t * n * ((n**2 - 5 * n + 6) * t**2 + (3 * n - 8) * t + 2)
    )
    w = 2 * (1 + t * (n - 1)) ** 2 / ((1 + t) * (2 + t * (n - 2)) * n)
    x = 2 * (1 + t * (n - 1)) ** 2 * (n - 1) * (n - 2) / ((1 + t) * n**2 * (1 + t * (2 * n - 5) + t**2 * (n - 2) * (n - 3)))
    return MomentCoeffs(u, v, w, x)


def d_moments(start, k: int, n: int, theta, delta=0) -> tuple:
    """(mean, variance) of d_(n-1,1) after k steps from ``start``."""
    theta, delta = Fraction(theta), Fraction(delta)
    start = Partition(start)
    shapes = _named_shapes(n)
    ex = d_expansions(n, theta)
    mc = second_moment_coeffs(n, theta)
    lam1, lam2, lam3 = shapes["(n-1,1)"], shapes["(n-2,1,1)"], shapes["(n-2,2)"]
    b1, b2, b3 = (eigenvalue(l, theta, delta) ** k for l in (lam1, lam2, lam3))
    d1, d2, d3 = (d_value(ex[l], start) for l in (lam1, lam2, lam3))
    mean = b1 * d1
    second = mc.u + mc.v * b1 * d1 + mc.w * b2 * d2 + mc.x * b3 * d3
    return mean, second - mean**2


def chebyshev_tv_lower(mean_k: float, var_k: float, var_inf: float, grid: int = 400) -> tuple:
    """max over eta in (0, mean_k) of P_inf(d < eta) - P_k(d < eta), each side bounded by Cantelli.

    Stationary d has mean 0 and variance var_inf.  Returns (bound, eta).
    """
    if mean_k <= 0:
        return 0.0, 0.0
    best = (0.0, 0.0)
    for i in range(1, grid):
        eta = mean_k * i / grid
        p_inf = 1 - var_inf / (var_inf + eta * eta)
        p_k = var_k / (var_k + (mean_k - eta) ** 2) if var_k > 0 else 0.0
        val = p_inf - p_k
        if val > best[0]:
            best = (val, eta)
    return best


def t_of_c(n: int, theta, c: float) -> int:
    """round(1/2 (1/theta v 1) n (log n + c)), clamped at 0."""
    fac = max(1.0 / float(theta), 1.0)
    return max(0, int(round(0.5 * fac * n * (math.log(n) + c))))


def cutoff_profile(n: int, theta, cs, delta=None, start="id", mode="auto", K: int = 40) -> list:
    """Rows {c, t, tv, tv_lower, tv_upper, l2_bound, tv_method} for the profile t(c).

    In exact mode tv is computed from delta_start P^t.  Otherwise tv is not
    available; tv_lower comes from the d-statistic moments and tv_upper from
    the truncated spectral sum with certified tail, and both are made
    monotone using that TV is non-increasing in t.
    """
    theta = Fraction(theta)
    delta = default_laziness(n, theta) if delta is None else Fraction(delta)
    cs = list(cs)
    ts = [t_of_c(n, theta, c) for c in cs]
    from .partitions import enumerate_partitions as _ep

    if mode == "auto":
        mode = "exact" if n <= 60 and len(_ep(n)) <= 5000 else "float"
    if start == "id":
        st, start_key = Partition((1,) * n), "id"
    elif start == "ncycle":
        st, start_key = Partition((n,)), "ncycle"
    else:
        st, start_key = Partition(start), None
    order = sorted(set(ts))
    rows = []
    l2s = {}
    if start_key is not None:
        est = l2_large_n(n, theta, delta, order, start=start_key, K=K)
        l2s = {t: e.upper for t, e in zip(order, est)}
    if mode == "exact":
        kernel = build_kernel(n, theta, delta, exact=False)
        pi = ewens(n, theta)
        vecs = float_powers(kernel, st, order)
        pif = np.array([float(p) for p in pi.vector()])
        tvs = {t: 0.5 * float(np.abs(v - pif).sum()) for t, v in zip(order, vecs)}
        for c, t in zip(cs, ts):
            l2 = l2s.get(t)
            rows.append(
                {"c": c, "t": t, "tv": tvs[t], "tv_lower": tvs[t], "tv_upper": tvs[t],
                 "l2_bound": l2, "tv_method": "exact-power"}
            )
        return rows
    if start_key != "id":
        raise ValueError("float-mode profiles are only certified from the identity start")
    mc = second_moment_coeffs(n, theta)
    lower, upper = {}, {}
    for t in order:
        mean, var = d_moments(st, t, n, theta, delta)
        lower[t], _ = chebyshev_tv_lower(float(mean), float(var), float(mc.u))
        upper[t] = min(1.0, 0.5 * math.sqrt(l2s[t]))
    # TV(t) >= LB(t') for t' >= t and TV(t) <= UB(t') for t' <= t
    run = 0.0
    for t in reversed(order):
        run = max(run, lower[t])
        lower[t] = run
    run = 1.0
    for t in order:
        run = min(run, upper[t])
        upper[t] = run
    for c, t in zip(cs, ts):
        rows.append(
            {"c": c, "t": t, "tv": None, "tv_lower": lower[t], "tv_upper": upper[t],
             "l2_bound": l2s[t], "tv_method": "moment-lower/spectral-upper"}
        )
    return rows


# ------------------------------------------------------------ Monte Carlo


def _binom_se(p: float, reps: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / reps) if reps else float("nan")


def _run_chain(start, steps, theta, delta, rng) -> Partition:
    lam = Partition(start)
    for _ in range(steps):
        lam = sample_step(lam, theta, delta, rng)
    return lam


def lower_bound_witness(n: int, theta, c: float, reps: int, seed: int, delta=None) -> dict:
    """Monte Carlo estimate of P_k[d < e^c / 2] and P_inf[d < e^c / 2] at k = t(-c)."""
    theta = Fraction(theta)
    delta = default_laziness(n, theta) if delta is None else Fraction(delta)
    k = t_of_c(n, theta, -c)
    if k < 1:
        raise ValueError("k(c) < 1; increase n or decrease c")
    eta = 0.5 * math.exp(c)
    coeffs = d_expansions(n, theta)[Partition((n - 1, 1))]
    cf = [float(a) for a in coeffs]

    def dval(lam):
        f = cycle_features(lam)
        return sum(a * b for a, b in zip(cf, f))

    start = Partition((1,) * n)
    hit_k = hit_inf = 0
    for r in range(reps):
        rng = replica_rng(seed, r)
        if dval(_run_chain(start, k, theta, delta, rng)) < eta:
            hit_k += 1
        if dval(sample_ewens(n, theta, rng)) < eta:
            hit_inf += 1
    pk, pinf = hit_k / reps, hit_inf / reps
    mean, var = d_moments(start, k, n, theta, delta)
    u = float(second_moment_coeffs(n, theta).u)
    cheb_k = float(var) / (float(var) + (float(mean) - eta) ** 2) if float(mean) > eta else 1.0
    return {
        "n": n,
        "theta": str(theta),
        "delta": str(delta),
        "c": c,
        "k": k,
        "eta": eta,
        "reps": reps,
        "seed": seed,
        "p_chain": pk,
        "p_chain_se": _binom_se(pk, reps),
        "p_stationary": pinf,
        "p_stationary_se": _binom_se(pinf, reps),
        "tv_witness": pinf - pk,
        "tv_witness_se": math.hypot(_binom_se(pk, reps), _binom_se(pinf, reps)),
        "exact_mean": float(mean),
        "exact_variance": float(var),
        "chebyshev_p_chain_upper": cheb_k,
        "cantelli_p_stationary_lower": 1 - u / (u + eta * eta),
    }


def ncycle_fk_experiment(n: int, k: int, t: int, reps: int, seed: int, theta=1, delta=None) -> dict:
    """f_k = m_1 + ... + m_k - H_k, from the n-cycle vs stationarity.

    Reports P(f_k <= -H_k / 2) (fixed threshold) and P(f_k <= -H_k + E_inf-centred
    midpoint) where the midpoint is half way between the chain mean and 0.
    """
    theta = Fraction(theta)
    if 2 * k > n:
        raise ValueError("need k <= n/2")
    delta = default_laziness(n, theta) if delta is None else Fraction(delta)
    H = sum(Fraction(1, i) for i in range(1, k + 1))
    Hf = float(H)
    # stationary mean of m_1 + ... + m_k under Ewens(1/theta)
    alpha = 1.0 / float(theta)
    mean_inf = sum(alpha * _ewens_cycle_mean_factor(n, i, alpha) for i in range(1, k + 1))

    def fk(lam):
        m = multiplicity(lam)
        return sum(m.get(i, 0) for i in range(1, k + 1)) - Hf

    start = Partition((n,))
    chain_vals, stat_vals = [], []
    for r in range(reps):
        rng = replica_rng(seed, r)
        chain_vals.append(fk(_run_chain(start, t, theta, delta, rng)))
        stat_vals.append(fk(sample_ewens(n, theta, rng)))
    chain_mean = sum(chain_vals) / reps
    thr_written = -Hf / 2
    thr_mid = 0.5 * (chain_mean + (mean_inf - Hf))

    def frac(vals, thr):
        return sum(1 for v in vals if v <= thr) / reps

    out = {"n": n, "k": k, "t": t, "reps": reps, "seed": seed, "theta": str(theta), "delta": str(delta),
           "harmonic": Hf, "stationary_mean_fk": mean_inf - Hf, "chain_mean_fk": chain_mean}
    for name, thr in (("written", thr_written), ("midpoint", thr_mid)):
        pc, ps = frac(chain_vals, thr), frac(stat_vals, thr)
        out[name] = {
            "threshold": thr,
            "p_chain": pc,
            "p_chain_se": _binom_se(pc, reps),
            "p_stationary": ps,
            "p_stationary_se": _binom_se(ps, reps),
            "gap": pc - ps,
            "gap_se": math.hypot(_binom_se(pc, reps), _binom_se(ps, reps)),
        }
    return out


def _ewens_cycle_mean_factor(n: int, i: int, alpha: float) -> float:
    """E[m_i] / alpha under Ewens(alpha) on S_n: (1/i) prod_{j<i} (n-j)/(alpha+n-1-j)."""
    out = 1.0 / i
    for j in range(i):
        out *= (n - j) / (alpha + n - 1 - j)
    return out

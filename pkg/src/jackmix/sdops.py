"""Sekiguchi-Debiard type operators acting on power sums.

Closed forms act on a single p_lam; ``apply`` extends them linearly.  N is
always the number of variables and n the degree.  A slow oracle built from
D_theta(X) x^alpha = a_delta^{-1} sum_w eps(w) prod_j (X + (w delta)_j + theta alpha_j) x^{w delta + alpha}
checks the closed forms at small n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import comb

from .chain import PeriodicityError, build_kernel
from .jack import character
from .linalg import left_null_vector, matmul
from .partitions import Partition, enumerate_partitions, partition_index, z_stat
from .symfunc import SymExpansion, convert, p_to_m_coeff

__all__ = [
    "KINDS",
    "OperatorSpec",
    "apply",
    "operator_matrix",
    "oracle_apply",
    "lb2_markov_rows",
    "elementary_U",
    "U_generic",
    "V_generic",
    "composition_stationary",
    "composition_stationary_n3_reference",
    "sum_xd_squared",
    "c_N3",
    "c_N3_reference",
    "dtheta3_reference",
]

KINDS = ("D110", "D002", "D120", "D210", "D003", "Dtheta2", "Dtheta3", "LB2")


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    theta: Fraction = Fraction(1)
    N: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator {self.kind!r}")
        object.__setattr__(self, "theta", Fraction(self.theta))
        if self.theta <= 0:
            raise ValueError("theta must be positive")


# monomials in p are kept as dicts {Partition: Fraction}


def _add(acc: dict, parts, coef) -> None:
    if not coef:
        return
    key = Partition(sorted(parts, reverse=True))
    acc[key] = acc.get(key, 0) + coef


def _without(lam, *idx) -> list:
    drop = set(idx)
    return [p for k, p in enumerate(lam) if k not in drop]


def _compositions2(r):
    return [(a, r - a) for a in range(1, r)]


def _compositions3(r):
    return [(a, b, r - a - b) for a in range(1, r) for b in range(1, r - a) if r - a - b >= 1]


def _d110(lam, N) -> dict:
    out: dict = {}
    for s, ls in enumerate(lam):
        rest = _without(lam, s)
        for r1, r2 in _compositions2(ls):
            _add(out, rest + [r1, r2], Fraction(ls, 2))
        _add(out, lam, Fraction(ls * (2 * N - ls - 1), 2))
    return out


def _d002(lam, N=None) -> dict:
    out: dict = {}
    _add(out, lam, sum(p * p for p in lam))
    L = len(lam)
    for s in range(L):
        for t in range(L):
            if s != t:
                _add(out, _without(lam, s, t) + [lam[s] + lam[t]], lam[s] * lam[t])
    return out


def _d120(lam, N) -> dict:
    out: dict = {}
    L = len(lam)
    for s, ls in enumerate(lam):
        rest = _without(lam, s)
        _add(out, lam, Fraction(ls * ls * (2 * N - ls - 1), 2))
        for u in range(1, ls):
            _add(out, rest + [u, ls - u], Fraction(ls * ls, 2))
    for s in range(L):
        for t in range(L):
            if s == t:
                continue
            ls, lt = lam[s], lam[t]
            rest = _without(lam, s, t)
            w = Fraction(ls * lt, 2)
            _add(out, rest + [ls + lt], w * (2 * N - ls - lt - 1))
            for u in range(1, ls + lt):
                _add(out, rest + [u, ls + lt - u], w)
    return out


def _d210(lam, N) -> dict:
    out: dict = {}
    for s, ls in enumerate(lam):
        rest = _without(lam, s)
        for r1, r2 in _compositions2(ls):
            _add(out, rest + [r1, r2], ls * (N - Fraction(1 + ls, 2)))
        for r1, r2, r3 in _compositions3(ls):
            _add(out, rest + [r1, r2, r3], Fraction(ls, 3))
        _add(out, lam, ls * ((N - 1) * (N - ls) + Fraction((2 * ls - 1) * (ls - 1), 6)))
    return out


def _d003(lam, N=None) -> dict:
    out: dict = {}
    L = len(lam)
    _add(out, lam, sum(p**3 for p in lam))
    for s in range(L):
        for t in range(L):
            if s == t:
                continue
            _add(out, _without(lam, s, t) + [lam[s] + lam[t]], 3 * lam[s] ** 2 * lam[t])
            for u in range(L):
                if u in (s, t):
                    continue
                _add(out, _without(lam, s, t, u) + [lam[s] + lam[t] + lam[u]], lam[s] * lam[t] * lam[u])
    return out


def c_N3(N: int, n: int, theta) -> Fraction:
    """Scalar part of D_theta^3 on degree n: e_3 of the multiset {(w delta)_j} shifted by theta n."""
    t = Fraction(theta)
    b = comb(N, 2)
    s2 = Fraction(comb(2 * N, 3), 4)  # sum_{i<N} i^2
    a = b + t * n
    return (a**3 - 3 * a * s2 + 2 * b**2) / 6


def c_N3_reference(N: int, n: int, theta) -> Fraction:
    t = Fraction(theta)
    b = comb(N, 2)
    b3 = comb(2 * N, 3)
    return (
        Fraction(1, 6) * (b**3 - Fraction(3, 4) * b * b3 + 2 * b**2)
        + t / 2 * (b**2 * n - Fraction(1, 4) * b3 * n)
        + t**2 / 3 * b * n**2
        + t**3 * n**3 / 6
    )


def _lin(*terms) -> dict:
    out: dict = {}
    for coef, d in terms:
        for k, v in d.items():
            out[k] = out.get(k, 0) + coef * v
    return out


def _single(op: OperatorSpec, lam: Partition) -> dict:
    N, t = op.N, op.theta
    n = sum(lam)
    ident = {Partition(lam): Fraction(1)}
    if op.kind == "D110":
        return _d110(lam, N)
    if op.kind == "D002":
        return _d002(lam)
    if op.kind == "D120":
        return _d120(lam, N)
    if op.kind == "D210":
        return _d210(lam, N)
    if op.kind == "D003":
        return _d003(lam)
    if op.kind == "Dtheta2":
        const = Fraction(1, 2) * (t**2 * n**2 + t * n * N * (N - 1) + Fraction(N * (N - 1) * (N - 2) * (3 * N - 1), 12))
        return _lin((const, ident), (-t, _d110(lam, N)), (-(t**2) / 2, _d002(lam)))
    if op.kind == "Dtheta3":
        a = comb(N, 2) + t * n
        return _lin(
            (c_N3(N, n, t), ident),
            (t**3 / 3, _d003(lam)),
            (t**2, _d120(lam, N)),
            (t, _d210(lam, N)),
            (-a * t, _d110(lam, N)),
            (-a * t**2 / 2, _d002(lam)),
        )
    if op.kind == "LB2":
        scale = Fraction(1, comb(n, 2))
        return _lin(
            (scale / 2, _d002(lam)),
            (-scale * n / 2, ident),
            (scale / t, _d110(lam, N)),
            (-scale * (N - 1) * n / t, ident),
        )
    raise ValueError(op.kind)


def dtheta3_reference(theta, N: int, f: SymExpansion) -> SymExpansion:
    """Reference D_theta^3 combination, kept for comparison only."""
    t = Fraction(theta)
    f = convert(f, "p")
    b = comb(N, 2)
    out: dict = {}
    for lam, c in f.coeffs.items():
        n = sum(lam)
        img = _lin(
            (c_N3_reference(N, n, t), {lam: Fraction(1)}),
            (t**3 / 3, _d003(lam)),
            (-(t**3) * n / 2, _d002(lam)),
            (2 * t**2 / 3, _d120(lam, N)),
            (-2 * t**2 * n / 3, _d110(lam, N)),
            (-(t**2) * b / 3, _d002(lam)),
            (2 * t / 3, _d210(lam, N)),
            (-2 * t * b / 3, _d110(lam, N)),
        )
        for k, v in img.items():
            out[k] = out.get(k, 0) + c * v
    return SymExpansion("p", f.degree, out)


def apply(op: OperatorSpec, f: SymExpansion) -> SymExpansion:
    """Apply ``op`` to a power-sum expansion."""
    if f.basis != "p":
        f = convert(f, "p")
    if op.N < f.degree:
        raise ValueError(f"need N >= degree ({op.N} < {f.degree})")
    out: dict = {}
    for lam, a in f.coeffs.items():
        for k, v in _single(op, lam).items():
            out[k] = out.get(k, 0) + a * v
    return SymExpansion("p", f.degree, out)


def operator_matrix(op: OperatorSpec, n: int) -> list:
    """M with op p_lam = sum_mu M[lam][mu] p_mu, canonical order."""
    parts = enumerate_partitions(n)
    rows = []
    for lam in parts:
        img = apply(op, SymExpansion.single("p", lam))
        rows.append([img[mu] for mu in parts])
    return rows


def lb2_markov_rows(n: int, theta, N: int | None = None) -> list:
    return operator_matrix(OperatorSpec("LB2", theta, N or n), n)


# ------------------------------------------------------------------ oracle


def _elem(vals, k):
    e = [Fraction(1)] + [Fraction(0)] * k
    for v in vals:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * v
    return e[k]


_WEIGHTS = {
    "D110": lambda wd, a, t: sum(x * y for x, y in zip(wd, a)),
    "D002": lambda wd, a, t: sum(y * y for y in a),
    "D120": lambda wd, a, t: sum(x * y * y for x, y in zip(wd, a)),
    "D210": lambda wd, a, t: sum(x * x * y for x, y in zip(wd, a)),
    "D003": lambda wd, a, t: sum(y**3 for y in a),
    "Dtheta2": lambda wd, a, t: _elem([x + t * y for x, y in zip(wd, a)], 2),
    "Dtheta3": lambda wd, a, t: _elem([x + t * y for x, y in zip(wd, a)], 3),
}


def _sign(perm) -> int:
    s, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, L = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                L += 1
            if L % 2 == 0:
                s = -s
    return s


def oracle_apply(kind: str, theta, N: int, f: SymExpansion) -> SymExpansion:
    """Brute-force action in N variables: Schur coefficients from the alternant, then back to p."""
    theta = Fraction(theta)
    f = convert(f, "p")
    n = f.degree
    if kind == "LB2":
        u = _lin((1, oracle_apply("D002", theta, N, f).coeffs), (-n, f.coeffs))
        v = _lin((1, oracle_apply("D110", theta, N, f).coeffs), (-(N - 1) * n, f.coeffs))
        s = Fraction(1, comb(n, 2))
        return SymExpansion("p", n, _lin((s / 2, u), (s / theta, v)))
    weight = _WEIGHTS[kind]
    delta = tuple(range(N - 1, -1, -1))
    perms = [(p, _sign(p)) for p in permutations(range(N))]
    schur: dict = {}
    for mu in enumerate_partitions(n):
        if len(mu) > N:
            continue
        target = tuple(mu[i] if i < len(mu) else 0 for i in range(N))
        total = Fraction(0)
        for p, sg in perms:
            wd = tuple(delta[p[i]] for i in range(N))
            alpha = tuple(target[i] + delta[i] - wd[i] for i in range(N))
            if min(alpha) < 0:
                continue
            nu = Partition(sorted((a for a in alpha if a), reverse=True))
            fa = sum(c * p_to_m_coeff(lam, nu) for lam, c in f.coeffs.items())
            if fa:
                total += sg * fa * weight(wd, alpha, theta)
        if total:
            schur[mu] = total
    out: dict = {}
    for mu, a in schur.items():
        for rho in enumerate_partitions(n):
            ch = character(mu, rho)
            if ch:
                out[rho] = out.get(rho, 0) + a * Fraction(ch, z_stat(rho))
    return SymExpansion("p", n, out)


# ------------------------------------------------------- other bases


def U_generic(f: SymExpansion) -> SymExpansion:
    """sum_i x_i^2 d_i^2 = sum_i (x_i d_i)^2 - x_i d_i, returned in the basis of f."""
    fp = convert(f, "p")
    d2 = apply(OperatorSpec("D002", 1, max(fp.degree, 1)), fp)
    return convert(d2 - fp.scale(fp.degree), f.basis)


def V_generic(f: SymExpansion, N: int) -> SymExpansion:
    """V = 1/2 sum_{i != j} (x_i^2 d_i - x_j^2 d_j) / (x_i - x_j) in N variables."""
    fp = convert(f, "p")
    return convert(apply(OperatorSpec("D110", 1, N), fp), f.basis)


def elementary_U(r1: int, r2: int) -> SymExpansion:
    """Reference form of U(e_{r1} e_{r2}): 3(1+r1) e_{r1,r2} - sum_{j<r1} 2(r1+r2-2j) e_{r1+r2-j, j}."""
    if r1 < 1 or r2 < r1:
        raise ValueError("need 1 <= r1 <= r2")
    out: dict = {}
    _add(out, [r1, r2], 3 * (1 + r1))
    for j in range(r1):
        _add(out, [p for p in (r1 + r2 - j, j) if p], -2 * (r1 + r2 - 2 * j))
    return SymExpansion("e", r1 + r2, out)


# ---------------------------------------------------- composition chains


def composition_stationary(theta1, theta2, n: int) -> list:
    """Left fixed vector of P_theta1 P_theta2 (no laziness), canonical order."""
    theta1, theta2 = Fraction(theta1), Fraction(theta2)
    if n > 9:
        raise ValueError("n <= 9 only")
    if theta1 == 1 and theta2 == 1:
        raise PeriodicityError("P_1 P_1 is not ergodic on partitions")
    mats = []
    for t in (theta1, theta2):
        # P_1 is periodic alone but may be composed with an aperiodic factor
        k = build_kernel(n, t, Fraction(0)) if t != 1 else _plain_kernel(n)
        mats.append(k.dense())
    M = matmul(mats[0], mats[1])
    size = len(M)
    A = [[M[i][j] - (1 if i == j else 0) for j in range(size)] for i in range(size)]
    v = left_null_vector(A)
    s = sum(v)
    return [x / s for x in v]


def _plain_kernel(n: int):
    from .chain import SparseKernel, kernel_row

    parts = enumerate_partitions(n)
    idx = partition_index(n)
    rows = tuple({idx[mu]: p for mu, p in kernel_row(lam, 1, 0).items()} for lam in parts)
    return SparseKernel(n, Fraction(1), Fraction(0), parts, rows, True)


def composition_stationary_n3_reference(a1, a2) -> list:
    """Reference n = 3 formula, entries in the order (1^3), (2,1), (3).

    Its parameters are Ewens parameters: for a1, a2 in (0, 1] it agrees with
    composition_stationary(1/a1, 1/a2, 3) read in reverse canonical order.
    """
    t1, t2 = Fraction(a1), Fraction(a2)
    den = 8 + t2 + t1**2 * (t2 - 1) * t2 - t1 * (-1 + 9 * t2 + t2**2)
    return [
        t2 * (t1 * (3 - 4 * t2) + t1**2 * (t2 - 1) + t2) / den,
        3 * (-(t2 - 3) * t2 + t1 * (1 - 4 * t2 + t2**2)) / den,
        (-2 * t1 + 2 * (t2 - 2) ** 2) / den,
    ]


def sum_xd_squared(f: SymExpansion) -> SymExpansion:
    """sum_i (x_i d_i)^2, returned in the basis of f."""
    fp = convert(f, "p")
    return convert(apply(OperatorSpec("D002", 1, max(fp.degree, 1)), fp), f.basis)

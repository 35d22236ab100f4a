"""Exact invariant suite behind ``jackmix verify``.

Each check takes ``quick`` and returns a list of failure strings.  ``quick``
caps every range at n <= 6.  Known disagreements between reference formulas and
exact computation are listed separately by :func:`deviations`; they do not
count as failures.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

from .chain import build_kernel, eigenvalue, ewens, holding_closed_form, t_matrix
from .jack import (
    c_n_cycle,
    c_two_cycle,
    character,
    d_coeff,
    hook_pair_product,
    jack_at_ones,
    jack_table,
)
from .linalg import matmul
from .partitions import (
    Partition,
    conjugate,
    dominance_leq,
    enumerate_partitions,
    hook_product,
    n_stat,
    n_stat_by_rows,
    z_stat,
)
from .sdops import (
    OperatorSpec,
    U_generic,
    V_generic,
    apply,
    composition_stationary,
    composition_stationary_n3_reference,
    lb2_markov_rows,
    oracle_apply,
    sum_xd_squared,
)
from .spectral import (
    completeness_failures,
    eigen_system,
    float_powers,
    l2_direct,
    l2_distance,
    l2_identity_closed_form,
    left_eigen_failures,
    tv_distance,
)
from .symfunc import BASES, SymExpansion, convert, p_to_m_coeff, theta_inner
from .experiments import (
    d_expansion_closed_forms,
    d_expansions,
    d_moments,
    d_value,
    second_moment_closed_forms,
    second_moment_coeffs,
)

log = logging.getLogger(__name__)

THETAS = (Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3))
CHECKS: list = []


def check(fn):
    CHECKS.append(fn)
    return fn


def _cap(n, quick):
    return min(n, 6) if quick else n


def _covers(n):
    parts = enumerate_partitions(n)
    for a, b in combinations(parts, 2):
        if a != b and dominance_leq(b, a):
            yield a, b  # a strictly dominates b


# ------------------------------------------------------------ partitions


@check
def partitions_basic(quick):
    bad = []
    for n in range(1, _cap(12, quick) + 1):
        for lam in enumerate_partitions(n):
            if conjugate(conjugate(lam)) != lam:
                bad.append(f"conjugate not involutive at {lam}")
            if n_stat(lam) != n_stat_by_rows(lam):
                bad.append(f"n_stat routes disagree at {lam}")
            if hook_product(lam) != hook_product(conjugate(lam)):
                bad.append(f"hook product not conjugation invariant at {lam}")
    for n in range(1, _cap(10, quick) + 1):
        if sum(Fraction(factorial(n), hook_product(l)) ** 2 for l in enumerate_partitions(n)) != factorial(n):
            bad.append(f"sum of squared dimensions != n! at n={n}")
        for a, b in _covers(n):
            if not (n_stat(conjugate(a)) > n_stat(conjugate(b)) and n_stat(a) < n_stat(b)):
                bad.append(f"n-statistic monotonicity fails for {a} > {b}")
    return bad


# ------------------------------------------------------------- symfunc


def _expand_poly(f: SymExpansion, N: int) -> dict:
    """Brute-force coefficients of sorted exponent vectors of a p-expansion in N variables."""
    out: dict = {}
    for rho, c in f.coeffs.items():
        terms = {(0,) * N: 1}
        for part in rho:
            nxt: dict = {}
            for e, v in terms.items():
                for i in range(N):
                    e2 = list(e)
                    e2[i] += part
                    e2 = tuple(e2)
                    nxt[e2] = nxt.get(e2, 0) + v
            terms = nxt
        for e, v in terms.items():
            key = Partition(sorted((x for x in e if x), reverse=True))
            out.setdefault(key, {})
            out[key][e] = out[key].get(e, 0) + c * v
    return {k: next(iter(d.values())) for k, d in out.items() if any(d.values())}


@check
def symfunc_roundtrips(quick):
    bad = []
    for n in range(1, _cap(10, quick) + 1):
        for lam in enumerate_partitions(n):
            for a in BASES:
                f = SymExpansion.single(a, lam)
                for b in BASES:
                    if convert(convert(f, b), a) != f:
                        bad.append(f"{a}->{b}->{a} not identity at {lam}")
    for n in range(1, _cap(6, quick) + 1):
        for rho in enumerate_partitions(n):
            direct = _expand_poly(SymExpansion.single("p", rho), n)
            for lam in enumerate_partitions(n):
                if direct.get(lam, 0) != p_to_m_coeff(rho, lam):
                    bad.append(f"p->m coefficient [{rho}:{lam}] disagrees with expansion")
    for n in range(1, _cap(8, quick) + 1):
        for th in (Fraction(1, 2), Fraction(2)):
            for lam in enumerate_partitions(n):
                f = SymExpansion.single("e", lam)
                if theta_inner(f, f, th) <= 0:
                    bad.append(f"theta_inner not positive at e_{lam}")
    return bad


# ----------------------------------------------------------------- jack


@check
def jack_identities(quick):
    bad = []
    for n in range(1, _cap(9, quick) + 1):
        ones = Partition((1,) * n)
        two = Partition((2,) + (1,) * (n - 2)) if n >= 2 else None
        top = Partition((n,))
        for th in THETAS:
            t = jack_table(n, th)
            for lam in t.partitions:
                if t.c[(lam, ones)] != 1:
                    bad.append(f"c[{lam},1^n] != 1 (theta={th})")
                if t.j[lam] != hook_pair_product(lam, th):
                    bad.append(f"j[{lam}] != hook pair product (theta={th})")
                if two and t.c[(lam, two)] != c_two_cycle(lam, th):
                    bad.append(f"two-cycle coefficient at {lam} (theta={th})")
                if t.c[(lam, top)] != c_n_cycle(lam, th):
                    bad.append(f"n-cycle coefficient at {lam} (theta={th})")
                if th == 1:
                    for rho in t.partitions:
                        chi = character(lam, rho)
                        if t.c[(lam, rho)] != Fraction(hook_product(lam) * chi, z_stat(rho)):
                            bad.append(f"theta=1 character relation at {lam},{rho}")
                        if d_coeff(lam, rho, t) != chi:
                            bad.append(f"d != chi at {lam},{rho}")
                if n <= 7:
                    for N in (n, n + 1, n + 2):
                        val = sum(t.c[(lam, rho)] * N ** len(rho) for rho in t.partitions)
                        if val != jack_at_ones(lam, N, th):
                            bad.append(f"J_{lam}(1^{N}) mismatch (theta={th})")
    for n in range(1, _cap(8, quick) + 1):
        for th in (Fraction(1, 2), Fraction(2), Fraction(3)):
            t, s = jack_table(n, th), jack_table(n, 1 / th)
            for lam in t.partitions:
                for mu in t.partitions:
                    if t.c[(conjugate(lam), mu)] != (-th) ** (n - len(mu)) * s.c[(lam, mu)]:
                        bad.append(f"duality fails at {lam},{mu} (theta={th})")
    return bad


def _cj_bound(n, s, th, transpose):
    C1 = math.sqrt(th) + 1 / math.sqrt(th)
    C2 = 1 + 1 / th
    num = math.exp((C1 * math.sqrt(n - s) + C2) * math.log(n - s + 1))
    if transpose:
        if s == 1:
            return math.inf
        return num / (th * math.exp(-math.pi**2 * th / 12) * (s - 1) ** (1 + th))
    return num / (th * math.exp(-math.pi**2 / (12 * th)) * s ** (1 + 1 / th))


@check
def jack_inequalities(quick):
    bad = []
    for n in range(2, _cap(10, quick) + 1):
        for th in (Fraction(1, 2), Fraction(1), Fraction(2)):
            t = jack_table(n, th)
            tf = float(th)
            for lam in t.partitions:
                l1 = lam[0]
                rest = Partition(lam[1:])
                jr = float(hook_pair_product(rest, th)) if rest else 1.0
                rhs = factorial(l1) ** 2 * tf ** (2 * l1 - 1) * l1 ** (1 / tf - 1) * math.exp(-math.pi**2 / (12 * tf**2)) * jr
                if float(t.j[lam]) < rhs * (1 - 1e-9):
                    bad.append(f"j split inequality fails at {lam} (theta={th})")
                ratio = float(t.c[(lam, Partition((n,)))] ** 2 / t.j[lam])
                if ratio > _cj_bound(n, l1, tf, False) * (1 + 1e-9):
                    bad.append(f"c/j bound fails at {lam} (theta={th})")
                if ratio > _cj_bound(n, conjugate(lam)[0], tf, True) * (1 + 1e-9):
                    bad.append(f"c/j transpose bound fails at {lam} (theta={th})")
    return bad


# ---------------------------------------------------------------- chain


@check
def chain_kernel(quick):
    bad = []
    for n in range(2, _cap(10, quick) + 1):
        for th in (Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(3)):
            pi = ewens(n, th)
            for delta in (Fraction(0), Fraction(1, n)):
                k = build_kernel(n, th, delta)
                for i, row in enumerate(k.rows):
                    if sum(row.values()) != 1:
                        bad.append(f"row sum at {k.states[i]} (n={n}, theta={th})")
                    for j, p in row.items():
                        if pi.probs[k.states[i]] * p != pi.probs[k.states[j]] * k.rows[j].get(i, 0):
                            bad.append(f"detailed balance {k.states[i]}->{k.states[j]} (theta={th})")
    for n in range(2, _cap(8, quick) + 1):
        for th in (Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(3)):
            P = build_kernel(n, th, 0).dense()
            T = t_matrix(n, th)
            size = len(P)
            for i in range(size):
                for j in range(size):
                    want = th * T[i][j] + (1 - th) * (i == j) if th < 1 else T[i][j]
                    if P[i][j] != want:
                        bad.append(f"P vs T_theta at ({i},{j}) n={n} theta={th}")
    return bad


@check
def chain_spectrum(quick):
    bad = []
    for n in range(2, _cap(8, quick) + 1):
        for th in (Fraction(1, 2), Fraction(2)):
            P = build_kernel(n, th, 0).dense()
            betas = [eigenvalue(l, th) for l in enumerate_partitions(n)]
            M = P
            for k in range(1, len(P) + 1):
                if sum(M[i][i] for i in range(len(M))) != sum(b**k for b in betas):
                    bad.append(f"trace(P^{k}) != sum beta^{k} (n={n}, theta={th})")
                M = matmul(M, P)
    for n in range(2, _cap(12, quick) + 1):
        for th in THETAS:
            for a, b in _covers(n):
                if eigenvalue(a, th) < eigenvalue(b, th):
                    bad.append(f"beta not monotone for {a} > {b} (theta={th})")
            lo = min(th, 1)
            for lam in enumerate_partitions(n):
                beta = eigenvalue(lam, th)
                l1 = lam[0]
                if 2 * l1 >= n and beta > 1 - lo * Fraction(2 * l1 * (n - l1), n * (n - 1)):
                    bad.append(f"big-lambda_1 bound fails at {lam} (theta={th})")
                if beta > 1 - lo * (1 - Fraction(l1 - 1, n - 1)):
                    bad.append(f"general bound fails at {lam} (theta={th})")
                if beta < 0:
                    bt = eigenvalue(conjugate(lam), th)
                    if not (bt > 0 and -beta <= bt):
                        bad.append(f"negative eigenvalue not dominated by transpose at {lam} (theta={th})")
    return bad


@check
def chain_holding(quick):
    bad = []
    for n in range(2, _cap(12, quick) + 1):
        for th in (t for t in THETAS if t != 1):
            K = build_kernel(n, th, Fraction(0))
            for lam in K.states:
                if K.entry(lam, lam) != holding_closed_form(lam, th):
                    bad.append(f"holding at {lam}, n={n}, theta={th}")
    return bad


# ------------------------------------------------------------- spectral


@check
def spectral_identities(quick):
    bad = []
    for n in range(2, _cap(8, quick) + 1):
        for th in (Fraction(1, 2), Fraction(2)):
            sysm = eigen_system(n, th, 0)
            k = build_kernel(n, th, 0)
            if left_eigen_failures(sysm, k):
                bad.append(f"left eigenvectors fail n={n} theta={th}")
            if completeness_failures(sysm):
                bad.append(f"completeness fails n={n} theta={th}")
            ks = range(0, 21, 4 if quick else 1)
            for start in sysm.table.partitions:
                for t in ks:
                    if l2_distance(start, t, sysm) != l2_direct(start, t, k, sysm.pi):
                        bad.append(f"spectral L2 != direct at {start}, k={t}")
            ones = Partition((1,) * n)
            for t in ks:
                if l2_distance(ones, t, sysm) != l2_identity_closed_form(n, th, 0, t):
                    bad.append(f"identity-start closed form at n={n}, k={t}")
            # two-cycle and n-cycle starts with the closed-form coefficients substituted
            scale = th**n * factorial(n) / sysm.pi.Pi
            for rho, cf in ((Partition((2,) + (1,) * (n - 2)), c_two_cycle), (Partition((n,)), c_n_cycle)):
                if n == 2 and rho == Partition((2,)) and cf is c_two_cycle:
                    continue
                px = sysm.pi.probs[rho]
                for t in ks:
                    s = sum(sysm.beta[l] ** (2 * t) * cf(l, th) ** 2 * scale / hook_pair_product(l, th) for l in sysm.table.partitions)
                    if s / px**2 - 1 != l2_distance(rho, t, sysm):
                        bad.append(f"closed-form L2 from {rho} at k={t}")
    return bad


@check
def spectral_monotone_tv(quick):
    bad = []
    for n in (8, 12) if quick else (8, 12, 20, 30):
        for th in (Fraction(1, 2), Fraction(1), Fraction(2)):
            k = build_kernel(n, th, Fraction(1, n), exact=False)
            pi = ewens(n, th)
            ks = list(range(0, 4 * n))
            for start in (Partition((1,) * n), Partition((n,))):
                vecs = float_powers(k, start, ks)
                tvs = [tv_distance(list(v), pi) for v in vecs]
                for a, b in zip(tvs, tvs[1:]):
                    if b > a + 1e-10:
                        bad.append(f"TV increases from {start} at n={n}, theta={th}")
                        break
    return bad


# ----------------------------------------------------------- experiments


@check
def experiment_identities(quick):
    bad = []
    for n in range(5, (6 if quick else 12) + 1):
        for th in (Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(3)):
            solved = second_moment_coeffs(n, th)
            closed = second_moment_closed_forms(n, th)
            for name in ("v", "w", "x"):
                if getattr(solved, name) != getattr(closed, name):
                    bad.append(f"moment coefficient {name} at n={n}, theta={th}")
            ex = d_expansions(n, th)
            pi = ewens(n, th)
            lam1 = Partition((n - 1, 1))
            var = sum(p * d_value(ex[lam1], rho) ** 2 for rho, p in pi.probs.items())
            if solved.u != var:
                bad.append(f"u != Var_pi(d_(n-1,1)) at n={n}, theta={th}")
            if n <= 9:
                t = jack_table(n, th)
                for lam, coeffs in ex.items():
                    for rho in t.partitions:
                        if d_value(coeffs, rho) != d_coeff(lam, rho, t):
                            bad.append(f"d-expansion of {lam} at {rho}, theta={th}")
            for start in (Partition((1,) * n), Partition((n,))):
                for k in (0, 1, 5, 20):
                    if d_moments(start, k, n, th, 0)[1] < 0:
                        bad.append(f"negative variance from {start}, k={k}")
    return bad


# ----------------------------------------------------------------- sdops


def _is_eigen(img: SymExpansion, f: SymExpansion) -> bool:
    ratio = None
    for k in set(img.coeffs) | set(f.coeffs):
        a, b = img[k], f[k]
        if b == 0:
            if a:
                return False
            continue
        if ratio is None:
            ratio = a / b
        elif a / b != ratio:
            return False
    return True


@check
def sdops_identities(quick):
    bad = []
    kinds = ("D110", "D002", "D120", "D210", "D003", "Dtheta2", "Dtheta3", "LB2")
    for n in range(2, (3 if quick else 4) + 1):
        for N in (n, n + 1):
            for kind in kinds:
                for lam in enumerate_partitions(n):
                    f = SymExpansion.single("p", lam)
                    th = Fraction(3, 2)
                    if apply(OperatorSpec(kind, th, N), f) != oracle_apply(kind, th, N, f):
                        bad.append(f"{kind} closed form != oracle at {lam}, N={N}")
    for n in range(2, _cap(8, quick) + 1):
        for th in (Fraction(1, 2), Fraction(2), Fraction(3)):
            M = lb2_markov_rows(n, th)
            if M != t_matrix(n, th):
                bad.append(f"LB2 matrix != T_theta at n={n}, theta={th}")
            if any(sum(r) != 1 for r in M):
                bad.append(f"LB2 rows do not sum to 1 at n={n}")
            t = jack_table(n, th)
            for lam in t.partitions:
                J = t.expansion(lam)
                img = apply(OperatorSpec("LB2", th, n), J)
                if img != J.scale(eigenvalue(lam, th) if th >= 1 else (eigenvalue(lam, th) - 1 + th) / th):
                    bad.append(f"J_{lam} not an LB2 eigenvector with the predicted eigenvalue")
    for n in range(2, _cap(6, quick) + 1):
        for th in (Fraction(1, 2), Fraction(2)):
            t = jack_table(n, th)
            for lam in t.partitions:
                J = t.expansion(lam)
                for kind in ("Dtheta2", "Dtheta3"):
                    if not _is_eigen(apply(OperatorSpec(kind, th, n + 1), J), J):
                        bad.append(f"J_{lam} not an eigenvector of {kind} (theta={th})")
    for n in range(2, _cap(8, quick) + 1):
        parts = enumerate_partitions(n)
        th = Fraction(2)
        for i, lam in enumerate(parts):
            img = convert(apply(OperatorSpec("Dtheta2", th, n), convert(SymExpansion.single("m", lam), "p")), "m")
            for mu, v in img.coeffs.items():
                if v and not dominance_leq(mu, lam):
                    bad.append(f"Dtheta2 not triangular in m-basis: m_{lam} -> m_{mu}")
    bad += _fixture_failures()
    return bad


def _h(*terms):
    return {Partition(k): Fraction(v) for k, v in terms}


def _fixture_failures() -> list:
    bad = []
    h4 = SymExpansion.single("h", Partition((4,)))
    want = _h(((1, 1, 1, 1), -2), ((2, 1, 1), 10), ((2, 2), -8), ((3, 1), -12), ((4,), 28))
    if sum_xd_squared(h4).coeffs != want:
        bad.append("sum (x d)^2 h_4 fixture")
    h321 = SymExpansion.single("h", Partition((3, 2, 1)))
    want_u = _h(((2, 1, 1, 1, 1), 2), ((2, 2, 1, 1), -8), ((3, 1, 1, 1), -2), ((3, 2, 1), 14),
                ((3, 3), 6), ((4, 1, 1), 6), ((4, 2), 8), ((5, 1), 10))
    if sum_xd_squared(h321).coeffs != want_u:
        bad.append("U h_321 fixture (read as sum (x d)^2)")
    want_v = _h(((2, 1, 1, 1, 1), -1), ((2, 2, 1, 1), 4), ((3, 1, 1, 1), 1), ((3, 2, 1), 32))
    if V_generic(h321, 7).coeffs != want_v:
        bad.append("V h_321 fixture at N = 7")
    fx = SymExpansion.single("p", Partition((3, 1, 1)))
    for th in (Fraction(1, 2), Fraction(2), Fraction(5)):
        img = apply(OperatorSpec("Dtheta2", th, 5), fx)
        want = {
            Partition((2, 1, 1, 1)): -3 * th,
            Partition((3, 1, 1)): 7 * th**2 + 33 * th + 35,
            Partition((4, 1)): -6 * th**2,
            Partition((3, 2)): -(th**2),
        }
        if img.coeffs != want:
            bad.append(f"Dtheta2 p3 p1^2 fixture at N=5, theta={th}")
        d3 = apply(OperatorSpec("Dtheta3", th, 5), fx)
        for mu in ((1, 1, 1, 1, 1), (5,), (2, 2, 1)):
            if d3[Partition(mu)] <= 0:
                bad.append(f"Dtheta3 distance-2 coefficient at {mu} not positive")
        if d3[Partition((2, 1, 1, 1))] >= 0:
            bad.append("Dtheta3 distance-1 coefficient at (2,1,1,1) not negative")
    for a1 in (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)):
        for a2 in (Fraction(1, 5), Fraction(1, 2), Fraction(1)):
            if composition_stationary(1 / a1, 1 / a2, 3) != composition_stationary_n3_reference(a1, a2)[::-1]:
                bad.append(f"n=3 composition stationary reference at ({a1},{a2})")
    return bad


# ------------------------------------------------------------ deviations


def deviations() -> list:
    """Reference formulas that disagree with exact computation, as readable strings."""
    out = []
    n, th = 6, Fraction(2)
    s, c = second_moment_coeffs(n, th), second_moment_closed_forms(n, th)
    if s.u != c.u:
        out.append(f"second-moment u at n={n}, theta={th}: solved {s.u}, reference {c.u}")
    d = d_expansions(5, th)[Partition((3, 2))]
    dc = d_expansion_closed_forms(5, th)[Partition((3, 2))]
    if d != dc:
        out.append(f"d_(n-2,2) expansion at n=5, theta=2: solved {tuple(map(str, d))}, reference {tuple(map(str, dc))}")
    for n in (6,):
        lam = Partition((n - 2, 2))
        ref = 1 - min(th, 1) + (th * comb(n - 2, 2) - 2) / (max(th, 1) * comb(n, 2))
        if ref != eigenvalue(lam, th):
            out.append(f"listed beta_(n-2,2) at n={n}, theta=2: reference {ref}, exact {eigenvalue(lam, th)}")
    u11 = U_generic(SymExpansion.single("e", Partition((1, 1))))
    out.append(f"U(e_1 e_1) exact {dict((str(k), str(v)) for k, v in u11.coeffs.items())}; reference diagonal 6")
    return out


def run_suite(quick: bool = False) -> list:
    """[(name, failures)] over all checks."""
    results = []
    for fn in CHECKS:
        log.info("running %s", fn.__name__)
        try:
            fails = fn(quick)
        except Exception as exc:  # a crash is a failure of that check
            fails = [f"{type(exc).__name__}: {exc}"]
        results.append((fn.__name__, fails))
    return results

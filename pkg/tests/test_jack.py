import math
from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from jackmix.jack import (
    DegenerateInnerProduct,
    c_n_cycle,
    c_top_row,
    c_two_cycle,
    character,
    chi_to_m,
    d_coeff,
    eval_m_product,
    hook_pair_product,
    jack_at_ones,
    jack_table,
)
from jackmix.partitions import Partition, conjugate, enumerate_partitions, hook_product, multiplicity, z_stat

P = Partition
TH = [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]


def frobenius_character(lam, rho):
    """Independent oracle: coefficient of x^(lam+delta) in a_delta * p_rho, by explicit polynomial expansion."""
    N = len(lam)
    delta = tuple(range(N - 1, -1, -1))
    terms = {}
    for w in permutations(range(N)):
        sign = 1
        for i in range(N):
            for j in range(i + 1, N):
                if w[i] > w[j]:
                    sign = -sign
        terms[tuple(delta[w[i]] for i in range(N))] = sign
    for r in rho:
        nxt = {}
        for e, c in terms.items():
            for i in range(N):
                e2 = list(e)
                e2[i] += r
                e2 = tuple(e2)
                nxt[e2] = nxt.get(e2, 0) + c
        terms = nxt
    return terms.get(tuple(l + d for l, d in zip(lam, delta)), 0)


def test_n2_table():
    th = Fraction(7, 3)
    t = jack_table(2, th)
    assert t.c[(P((2,)), P((1, 1)))] == 1 and t.c[(P((2,)), P((2,)))] == th
    assert t.c[(P((1, 1)), P((1, 1)))] == 1 and t.c[(P((1, 1)), P((2,)))] == -1
    assert t.j[P((2,))] == 2 * th**2 * (1 + th)


def test_bad_theta():
    with pytest.raises(ValueError):
        jack_table(3, 0)
    with pytest.raises(ValueError):
        jack_table(3, -1)
    assert issubclass(DegenerateInnerProduct, ArithmeticError)


def test_hook_pair_product_examples():
    th = Fraction(5, 2)
    assert hook_pair_product(P((1,)), th) == th
    assert hook_pair_product(P((2,)), th) == 2 * th**2 * (1 + th)
    for n in range(1, 8):
        for lam in enumerate_partitions(n):
            assert hook_pair_product(lam, 1) == hook_product(lam) ** 2


def test_two_cycle_examples():
    th = Fraction(4, 3)
    assert c_two_cycle(P((2,)), th) == th
    assert c_two_cycle(P((1, 1)), th) == -1
    assert c_two_cycle(P((2, 1)), th) == th - 1
    with pytest.raises(ValueError):
        c_two_cycle(P((1,)), th)


def test_n_cycle_examples():
    th = Fraction(3, 2)
    for n in range(1, 8):
        assert c_n_cycle(P((n,)), th) == th ** (n - 1) * factorial(n - 1)
        for s in range(1, n + 1):
            hook = P((s,) + (1,) * (n - s))
            assert abs(c_n_cycle(hook, 1)) == factorial(s - 1) * factorial(n - s)
    assert c_n_cycle(P((2, 2)), 1) == 0


def test_top_row_formula():
    for n in range(1, 8):
        for th in TH:
            t = jack_table(n, th)
            for rho in t.partitions:
                assert t.c[(P((n,)), rho)] == c_top_row(rho, th)


def test_d_coeff_examples():
    for n in range(4, 9):
        th = Fraction(2, 5)
        t = jack_table(n, th)
        ones = P((1,) * n)
        lam1 = P((n - 1, 1))
        assert d_coeff(lam1, ones, t) == n - 1
        for rho in t.partitions:
            assert d_coeff(P((n,)), rho, t) == 1
            m1 = multiplicity(rho).get(1, 0)
            assert d_coeff(lam1, rho, t) == -1 / th + (1 + (n - 1) * th) / (th * n) * m1


def test_character_examples():
    for n in range(4, 9):
        for rho in enumerate_partitions(n):
            m = multiplicity(rho)
            m1, m2 = m.get(1, 0), m.get(2, 0)
            assert character(P((n,)), rho) == 1
            assert character(P((n - 1, 1)), rho) == m1 - 1
            assert character(P((n - 2, 2)), rho) == Fraction(m1 * m1, 2) - Fraction(3 * m1, 2) + m2


@pytest.mark.parametrize("n", range(1, 7))
def test_character_against_frobenius(n):
    for lam in enumerate_partitions(n):
        for rho in enumerate_partitions(n):
            assert character(lam, rho) == frobenius_character(lam, rho)


def test_character_orthogonality():
    for n in range(1, 9):
        parts = enumerate_partitions(n)
        for a in parts:
            for b in parts:
                s = sum(Fraction(character(a, r) * character(b, r), z_stat(r)) for r in parts)
                assert s == (1 if a == b else 0)


def test_jack_at_ones_examples():
    th = Fraction(9, 4)
    assert jack_at_ones(P((1,)), 3, th) == 3
    assert jack_at_ones(P((2, 1)), 3, 1) == 24
    assert jack_at_ones(P((2,)), 2, th) == 2 * (2 + th)


def test_chi_to_m_examples():
    for n in range(4, 10):
        assert chi_to_m(P((n,)), 0) == {P((n,)): 1}
        one = {P((n,)): -1, P((n - 1, 1)): 1}
        assert chi_to_m(P((n - 1, 1)), 1) == one
    for n in range(4, 10):
        got = chi_to_m(P((n - 2, 1, 1)), 2)
        assert got == {P((n,)): 1, P((n - 1, 1)): Fraction(-3, 2), P((n - 2, 1, 1)): Fraction(1, 2), P((n - 2, 2)): -1}


def test_chi_to_m_reproduces_characters():
    for n in range(4, 10):
        for lam in enumerate_partitions(n):
            k = n - lam[0]
            if 2 * k > n:
                with pytest.raises(ValueError):
                    chi_to_m(lam, k)
                continue
            a = chi_to_m(lam, k)
            for rho in enumerate_partitions(n):
                assert sum(v * eval_m_product(mu, rho) for mu, v in a.items()) == character(lam, rho)


@pytest.mark.parametrize("n", range(1, 8))
@pytest.mark.parametrize("th", TH)
def test_table_identities(n, th):
    t = jack_table(n, th)
    ones = P((1,) * n)
    for lam in t.partitions:
        assert t.c[(lam, ones)] == 1
        assert t.j[lam] == hook_pair_product(lam, th)
        assert sum(t.c[(lam, r)] ** 2 * z_stat(r) * th ** len(r) for r in t.partitions) == t.j[lam]
        assert t.c[(lam, P((n,)))] == c_n_cycle(lam, th)
        if n >= 2:
            assert t.c[(lam, P((2,) + (1,) * (n - 2)))] == c_two_cycle(lam, th)
        for N in (n, n + 1, n + 2):
            assert sum(t.c[(lam, r)] * N ** len(r) for r in t.partitions) == jack_at_ones(lam, N, th)
    for a in t.partitions:
        for b in t.partitions:
            if a != b:
                inner = sum(t.c[(a, r)] * t.c[(b, r)] * z_stat(r) * th ** len(r) for r in t.partitions)
                assert inner == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_theta_one_is_character_table(n):
    t = jack_table(n, 1)
    for lam in t.partitions:
        for rho in t.partitions:
            chi = character(lam, rho)
            assert t.c[(lam, rho)] == Fraction(hook_product(lam) * chi, z_stat(rho))
            assert d_coeff(lam, rho, t) == chi


@pytest.mark.parametrize("n", range(1, 8))
@pytest.mark.parametrize("th", [Fraction(1, 2), Fraction(2), Fraction(3)])
def test_duality(n, th):
    t, s = jack_table(n, th), jack_table(n, 1 / th)
    for lam in t.partitions:
        for mu in t.partitions:
            assert t.c[(conjugate(lam), mu)] == (-th) ** (n - len(mu)) * s.c[(lam, mu)]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.fractions(min_value=Fraction(1, 7), max_value=7).filter(lambda x: x > 0))
def test_random_theta_norms(n, th):
    t = jack_table(n, th)
    for lam in t.partitions:
        assert t.j[lam] == hook_pair_product(lam, th) > 0


def _cj_rhs(n, s, th, transpose):
    C1 = math.sqrt(th) + 1 / math.sqrt(th)
    C2 = 1 + 1 / th
    num = math.exp((C1 * math.sqrt(n - s) + C2) * math.log(n - s + 1))
    if transpose:
        return math.inf if s == 1 else num / (th * math.exp(-math.pi**2 * th / 12) * (s - 1) ** (1 + th))
    return num / (th * math.exp(-math.pi**2 / (12 * th)) * s ** (1 + 1 / th))


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("th", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_split_and_ratio_inequalities(n, th):
    t = jack_table(n, th)
    f = float(th)
    for lam in t.partitions:
        s = lam[0]
        rest = P(lam[1:])
        jr = float(hook_pair_product(rest, th)) if rest else 1.0
        rhs = factorial(s) ** 2 * f ** (2 * s - 1) * s ** (1 / f - 1) * math.exp(-math.pi**2 / (12 * f * f)) * jr
        assert float(t.j[lam]) >= rhs * (1 - 1e-9)
        ratio = float(t.c[(lam, P((n,)))] ** 2 / t.j[lam])
        assert ratio <= _cj_rhs(n, s, f, False) * (1 + 1e-9)
        assert ratio <= _cj_rhs(n, conjugate(lam)[0], f, True) * (1 + 1e-9)

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from worked_examples import (
    DTHETA2,
    DTHETA2_SQUARED,
    DTHETA3,
    EXAMPLE_N,
    H4_SUM_XD2,
    START,
    U_H321,
    V_H321,
    poly_coeffs,
)
from jackmix.chain import PeriodicityError, build_kernel, eigenvalue, ewens, t_matrix
from jackmix.jack import jack_table
from jackmix.partitions import Partition, enumerate_partitions
from jackmix.sdops import (
    KINDS,
    OperatorSpec,
    U_generic,
    V_generic,
    apply,
    composition_stationary,
    composition_stationary_n3_reference,
    dtheta3_reference,
    elementary_U,
    lb2_markov_rows,
    operator_matrix,
    oracle_apply,
    sum_xd_squared,
)
from jackmix.symfunc import SymExpansion, convert

P = Partition


def p_single(lam):
    return SymExpansion.single("p", P(lam))


def test_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec("D999", 1, 3)
    with pytest.raises(ValueError):
        OperatorSpec("Dtheta2", 0, 3)
    with pytest.raises(ValueError):
        apply(OperatorSpec("D110", 1, 2), p_single((2, 1)))


@pytest.mark.parametrize("kind", [k for k in KINDS if k != "LB2"])
@pytest.mark.parametrize("n", range(1, 5))
def test_closed_forms_match_oracle(kind, n):
    th = Fraction(3, 2)
    for N in (n, n + 1):
        for lam in enumerate_partitions(n):
            f = p_single(lam)
            assert apply(OperatorSpec(kind, th, N), f).coeffs == oracle_apply(kind, th, N, f).coeffs


def test_lb2_oracle():
    for lam in enumerate_partitions(4):
        f = p_single(lam)
        assert apply(OperatorSpec("LB2", 2, 4), f).coeffs == oracle_apply("LB2", 2, 4, f).coeffs


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("th", [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)])
def test_lb2_equals_t(n, th):
    M = lb2_markov_rows(n, th)
    assert M == t_matrix(n, th)
    assert all(sum(r) == 1 for r in M)
    if th >= 1 and th != 1:
        assert M == build_kernel(n, th, 0).dense()


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("th", [Fraction(1, 2), Fraction(2)])
def test_jacks_diagonalize(n, th):
    t = jack_table(n, th)
    parts = t.partitions
    ops = {k: operator_matrix(OperatorSpec(k, th, n + 1), n) for k in ("Dtheta2", "Dtheta3", "LB2")}
    for lam in parts:
        c = t.row(lam)
        for kind, M in ops.items():
            img = [sum(c[i] * M[i][j] for i in range(len(parts))) for j in range(len(parts))]
            ratio = img[-1] / c[-1]
            assert img == [ratio * x for x in c], (kind, lam)
            if kind == "LB2":
                b = eigenvalue(lam, th)
                assert ratio == (b if th >= 1 else (b - 1 + th) / th)


def test_reference_dtheta3_not_diagonal():
    n, th = 4, Fraction(2)
    t = jack_table(n, th)
    bad = 0
    for lam in t.partitions:
        f = SymExpansion("p", n, {rho: t.c[(lam, rho)] for rho in t.partitions})
        img = dtheta3_reference(th, n + 1, f)
        ratio = img[P((1,) * n)]
        if any(img[rho] != ratio * t.c[(lam, rho)] for rho in t.partitions):
            bad += 1
    assert bad > 0


def _monomial_matrix(n, th):
    """Matrix of the normalized LB2 chain in the m basis."""
    parts = enumerate_partitions(n)
    op = OperatorSpec("LB2", th, n)
    rows = []
    for lam in parts:
        img = convert(apply(op, convert(SymExpansion.single("m", lam), "p")), "m")
        rows.append([img[mu] for mu in parts])
    return rows


@pytest.mark.parametrize("n", range(2, 9))
def test_unipotent_in_monomials(n):
    M = _monomial_matrix(n, Fraction(2))
    for i in range(len(M)):
        for j in range(i):
            assert M[i][j] == 0


def _check_fixture(ref, compute, degree):
    got = {}
    for mu in enumerate_partitions(5):
        coeffs = poly_coeffs(lambda th: compute(th)[P(mu)], degree)
        if coeffs:
            got[mu] = coeffs
    want = {mu: {k: Fraction(v) for k, v in poly.items()} for mu, poly in ref.items()}
    return got, want


def test_dtheta2_fixture_reconciles_at_n5():
    f = p_single(START)
    got, want = _check_fixture(DTHETA2, lambda th: apply(OperatorSpec("Dtheta2", th, EXAMPLE_N), f), 2)
    assert got == want
    got6, _ = _check_fixture(DTHETA2, lambda th: apply(OperatorSpec("Dtheta2", th, 6), f), 2)
    assert got6 != want


def test_dtheta3_fixture_oracle_fallback():
    f = p_single(START)
    got, want = _check_fixture(DTHETA3, lambda th: apply(OperatorSpec("Dtheta3", th, EXAMPLE_N), f), 3)
    for th in (Fraction(1, 2), Fraction(2)):
        assert apply(OperatorSpec("Dtheta3", th, EXAMPLE_N), f).coeffs == oracle_apply("Dtheta3", th, EXAMPLE_N, f).coeffs
    assert got[(5,)] == want[(5,)]
    assert got[(1, 1, 1, 1, 1)] == {1: 1} != want[(1, 1, 1, 1, 1)]
    # distance-2 coefficients positive, a distance-1 coefficient negative
    for th in (Fraction(1, 2), Fraction(2), Fraction(7)):
        img = apply(OperatorSpec("Dtheta3", th, EXAMPLE_N), f)
        assert img[P((5,))] > 0 and img[P((2, 2, 1))] > 0 and img[P((1,) * 5)] > 0
        assert img[P((2, 1, 1, 1))] < 0 and img[P((4, 1))] < 0


def test_dtheta3_reference_low_order_parts():
    f = p_single(START)
    got, want = _check_fixture(
        DTHETA3, lambda th: dtheta3_reference(th, EXAMPLE_N, f), 3
    )
    for mu in ((1, 1, 1, 1, 1), (2, 1, 1, 1), (2, 2, 1), (5,)):
        assert got[mu] == want[mu]
    for mu in ((3, 1, 1), (4, 1), (3, 2)):
        assert {k: v for k, v in got[mu].items() if k < 3} == {k: v for k, v in want[mu].items() if k < 3}


def _truncated(ref, true):
    """ref equals true with its last decimal digit dropped (or equals it)."""
    if ref == true:
        return True
    return true.denominator == 1 and ref == int(true / 10)


def test_dtheta2_squared_fixture():
    f = p_single(START)

    def twice(th):
        o = OperatorSpec("Dtheta2", th, EXAMPLE_N)
        return apply(o, apply(o, f))

    got, want = _check_fixture(DTHETA2_SQUARED, twice, 4)
    assert set(got) == set(want)
    for mu in want:
        assert set(got[mu]) == set(want[mu])
        for k in want[mu]:
            assert _truncated(want[mu][k], got[mu][k]), (mu, k, want[mu][k], got[mu][k])
    assert got[(1, 1, 1, 1, 1)] == want[(1, 1, 1, 1, 1)]
    assert got[(2, 2, 1)] == want[(2, 2, 1)]


def test_h_basis_fixtures():
    h4 = SymExpansion.single("h", P((4,)))
    assert sum_xd_squared(h4).coeffs == {P(k): v for k, v in H4_SUM_XD2.items()}
    h321 = SymExpansion.single("h", P((3, 2, 1)))
    assert sum_xd_squared(h321).coeffs == {P(k): v for k, v in U_H321.items()}
    u = U_generic(h321).coeffs
    for k, v in U_H321.items():
        assert u.get(P(k), 0) == (v - 6 if k == (3, 2, 1) else v)
    assert V_generic(h321, 7).coeffs == {P(k): v for k, v in V_H321.items()}


def test_elementary_U():
    assert elementary_U(1, 1).coeffs == {P((1, 1)): 6, P((2,)): -4}
    with pytest.raises(ValueError):
        elementary_U(2, 1)
    for r1 in range(1, 4):
        for r2 in range(r1, 8 - r1 + 1):
            shown = elementary_U(r1, r2)
            true = U_generic(SymExpansion.single("e", P((r2, r1))))
            diag = P((r2, r1))
            for k in set(shown.coeffs) | set(true.coeffs):
                if k != diag:
                    assert shown[k] == true[k]
            assert true[diag] == 2 * r1 != shown[diag]


@pytest.mark.parametrize("r", range(1, 7))
def test_v_scalar_on_e(r):
    e = SymExpansion.single("e", P((r,)))
    img = V_generic(e, 8)
    assert set(img.coeffs) <= {P((r,))}


def test_composition_stationary():
    for th in (Fraction(1, 2), Fraction(3)):
        for n in (3, 4, 5):
            assert composition_stationary(th, th, n) == ewens(n, th).vector()
    v = composition_stationary(2, 3, 3)
    assert sum(v) == 1 and all(x > 0 for x in v)
    assert v == [Fraction(41, 65), Fraction(21, 65), Fraction(3, 65)]
    assert composition_stationary_n3_reference(2, 3) == [Fraction(3, 5), Fraction(12, 35), Fraction(2, 35)]
    with pytest.raises(PeriodicityError):
        composition_stationary(1, 1, 3)
    with pytest.raises(ValueError):
        composition_stationary(2, 3, 10)
    assert sum(composition_stationary(1, 2, 4)) == 1


@settings(max_examples=20, deadline=None)
@given(
    st.fractions(min_value=Fraction(1, 9), max_value=1).filter(lambda x: x > 0),
    st.fractions(min_value=Fraction(1, 9), max_value=1).filter(lambda x: x > 0),
)
def test_n3_reference_in_ewens_parameters(a1, a2):
    assert composition_stationary(1 / a1, 1 / a2, 3) == composition_stationary_n3_reference(a1, a2)[::-1]

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from floerd.complex import tensor, unknot
from floerd.errors import PreconditionError
from floerd.knots import doubled_trefoil_model, torus_alexander, torus_staircase
from floerd.surgery import (
    DBarTable,
    SurgeryProblem,
    compute_d,
    d_invariant,
    dbar_table,
    dp_min_filtration,
    fmt_rational,
    grading_shift,
    parse_rational,
    theorem_bounds,
    torus_factor_minima,
)


def torsion_coefficient(poly, m):
    """t_m = sum_{j >= 1} j a_{|m| + j}."""
    m = abs(m)
    return sum(j * poly.coeffs.get(m + j, 0) for j in range(1, poly.genus + 1))


def lspace_d(p, q, m):
    return -grading_shift(q, abs(m)) - 2 * torsion_coefficient(torus_alexander(p), m)


def test_grading_shift_values():
    assert grading_shift(25, 0) == Fraction(-6)
    assert grading_shift(25, 5) == Fraction(-2)
    assert grading_shift(25, 10) == 0
    assert grading_shift(9, 3) == 0


def test_unknot_is_lens_space():
    # S^3_q(U) = L(q, 1): d = -s(q, |m|), symmetric under conjugation
    for q in range(1, 31):
        for m in range(-((q - 1) // 2), (q - 1) // 2 + 1):
            assert d_invariant(SurgeryProblem(unknot(), q, m)) == -grading_shift(q, abs(m))


def test_t45_table():
    t = torus_staircase(5)
    table = dbar_table(t, 5)
    assert table.d == {0: 0, 5: 0, 10: 0}
    assert table.dbar == {0: 0, 5: 0, 10: 0}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 8), st.data())
def test_torus_d_matches_torsion_coefficients(p, extra, data):
    g = (p - 1) * (p - 2) // 2
    q = 2 * g - 1 + extra
    q = max(q, 1)
    m = data.draw(st.integers(-((q - 1) // 2), (q - 1) // 2))
    assert d_invariant(SurgeryProblem(torus_staircase(p), q, m)) == lspace_d(p, q, m)


def test_boxes_do_not_change_d():
    d = doubled_trefoil_model()
    tref = torus_staircase(3)
    for q in (1, 3, 7):
        for m in range(-((q - 1) // 2), (q - 1) // 2 + 1):
            assert d_invariant(SurgeryProblem(d, q, m)) == d_invariant(SurgeryProblem(tref, q, m))


def test_d_is_additive_on_trefoil_sum_at_zero():
    # V_0 of T(2,3) # T(2,3) is 1
    c = tensor(torus_staircase(3), torus_staircase(3))
    res = compute_d(SurgeryProblem(c, 5, 0))
    assert res.d == -grading_shift(5, 0) - 2
    assert res.stable


def test_surgery_preconditions():
    t = torus_staircase(5)
    with pytest.raises(PreconditionError):
        SurgeryProblem(t, 10, 0)
    with pytest.raises(PreconditionError):
        SurgeryProblem(t, 25, 13)
    with pytest.raises(PreconditionError):
        SurgeryProblem(t, 0, 0)


def test_rational_formatting():
    assert fmt_rational(Fraction(0)) == "0/1"
    assert fmt_rational(Fraction(-3, 4)) == "-3/4"
    assert parse_rational("-3/4") == Fraction(-3, 4)


def test_dbar_table_roundtrip():
    t = DBarTable(3, 9, {0: Fraction(-4), 3: Fraction(-2)})
    assert DBarTable.from_dict(t.to_dict()).d == t.d
    bare = DBarTable.from_dict({"p": 3, "dbar": {"3": "2/1"}})
    assert bare.dbar == {0: 0, 3: 2}
    assert t.indexed() == {1: 2}


def test_dp_matches_brute_force():
    import itertools

    factors = [torus_factor_minima(7)] + [{-1: 0, 0: 1, 1: 2}] * 3
    brute = min(
        sum(f[g] for f, g in zip(factors, gs))
        for gs in itertools.product((-1, 0, 1), repeat=len(factors))
        if sum(gs) == 0
    )
    assert dp_min_filtration(factors) == brute


@pytest.mark.parametrize("p", [3, 7, 11, 19, 23, 31])
def test_theorem_bounds_closed_forms(p):
    tb = theorem_bounds(p)
    assert tb.dp_min == (p * p + 4 * p - 1) // 4
    assert tb.special_cycle == ((p * p - 1) // 8, (p * p + 8 * p - 1) // 8)
    assert tb.as_pair() == (-p - 1, -p + 1)
    assert tb.dbar_lower == 2


def test_bounds_reject_bad_p():
    with pytest.raises(PreconditionError):
        theorem_bounds(5)

import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from floerd.errors import BudgetExceededError, PreconditionError
from floerd.linkalg import (
    LinkingForm,
    Metabolizer,
    cyclotomic_gcd,
    enumerate_metabolizers,
    group_ring_coprime,
    is_metabolizer,
    primitive_root,
    psi,
    rational_rank,
    relation_span_is_full,
    rho_permutation,
    span,
    special_vector,
    subgroups_of_order,
    verify_appendix_theorem,
)


def brute_subgroups(p, n, order):
    """Every subgroup of (Z/p^2)^n of the given order, by closing generator pairs."""
    mod = p * p
    elems = list(itertools.product(range(mod), repeat=n))
    found = set()
    for a in elems:
        for b in elems:
            H = span([a, b], mod, n)
            if len(H) == order:
                found.add(H)
    return found


@pytest.mark.parametrize("order", [1, 3, 9, 27, 81])
def test_subgroup_enumeration_matches_brute_force(order):
    ours = {M.elements for M in subgroups_of_order(3, 2, order)}
    assert ours == brute_subgroups(3, 2, order)


def test_metabolizers_brute_force_p3_n2():
    for signs in ("++", "+-"):
        form = LinkingForm.parse(3, signs)
        brute = {
            H for H in brute_subgroups(3, 2, 9)
            if all(form.vanishes(a, b) for a in H for b in H)
        }
        assert {M.elements for M in enumerate_metabolizers(3, 2, form)} == brute


def test_metabolizer_counts():
    assert [M.gens for M in enumerate_metabolizers(3, 1)] == [((3,),)]
    assert len(enumerate_metabolizers(3, 2, LinkingForm.parse(3, "++"))) == 1
    pm = enumerate_metabolizers(3, 2, LinkingForm.parse(3, "+-"))
    assert {M.elements for M in pm} == {
        span([(1, 1)], 9, 2),
        span([(1, 8)], 9, 2),
        span([(3, 0), (0, 3)], 9, 2),
    }


def test_enumeration_is_deterministic_and_sorted():
    a = enumerate_metabolizers(7, 3)
    b = enumerate_metabolizers(7, 3)
    assert [M.hnf for M in a] == [M.hnf for M in b]
    assert [M.hnf for M in a] == sorted(M.hnf for M in a)
    assert all(M.order == 7**3 for M in a)


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        enumerate_metabolizers(3, 4)
    with pytest.raises(BudgetExceededError):
        enumerate_metabolizers(43, 3)


def test_form_parsing():
    assert LinkingForm.parse(3, "+-").signs == (1, -1)
    with pytest.raises(PreconditionError):
        LinkingForm.parse(3, "+x")
    assert LinkingForm(3, (1,)).value((3,), (3,)) == 0
    assert LinkingForm(3, (1,)).value((1,), (1,)) == Fraction(1, 9)


def test_special_vector_examples():
    assert special_vector(Metabolizer.from_generators(3, [(1, 3)])).z == (3, 0)
    assert special_vector(Metabolizer.from_generators(3, [(3, 0), (0, 3)])).z == (3, 3)


def check_special(M):
    sv = special_vector(M)
    p = M.p
    assert sv.z in M.elements
    assert all(x % p == 0 for x in sv.z)
    assert sum(1 for x in sv.z if x == p) >= (M.n + 1) // 2
    assert all(sv.z[c] == p for c in sv.pivots)
    assert sorted(sv.permutation) == list(range(M.n))


@pytest.mark.parametrize("n", [1, 2])
def test_special_vector_on_every_order_pn_subgroup(n):
    for M in subgroups_of_order(3, n, 3**n):
        check_special(M)


@pytest.mark.parametrize("p,n", [(5, 2), (7, 2), (3, 3)])
def test_special_vector_larger(p, n):
    for M in subgroups_of_order(p, n, p**n):
        check_special(M)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.tuples(st.integers(0, 48), st.integers(0, 48)), min_size=1, max_size=3))
def test_special_vector_from_random_generators(p, gens):
    M = Metabolizer.from_generators(p, gens)
    if M.order != p * p:
        with pytest.raises(PreconditionError):
            special_vector(M)
    else:
        check_special(M)


def test_psi():
    assert psi((3, 6, 0), 3) == (2,)
    assert psi((7, 42, 14, 0), 7) == (2, 1, 0)
    with pytest.raises(PreconditionError):
        psi((1,), 3)


def test_rho_cycles_from_examples():
    assert rho_permutation(23, 5).cycle == (1, 5, 2, 10, 4, 3, 8, 6, 7, 11, 9)
    assert rho_permutation(31, 3).cycle == (1, 3, 9, 4, 12, 5, 15, 14, 11, 2, 6, 13, 8, 7, 10)
    assert rho_permutation(7).cycle == (1, 3, 2)


def test_primitive_roots():
    assert [primitive_root(p) for p in (3, 7, 11, 23, 31)] == [2, 3, 2, 5, 3]


def test_rho_rejects_non_generator():
    with pytest.raises(PreconditionError):
        rho_permutation(7, 2)


def test_f_z_for_p31_both_orders_coprime():
    # alpha_4 = 1, alpha_13 = 2, alpha_1 = 4 (the p = 31 example)
    alpha = [0] * 15
    alpha[0], alpha[3], alpha[12] = 4, 1, 2
    coeffs = rho_permutation(31, 3).t_coefficients(alpha)
    expected = [0] * 15
    expected[0], expected[3], expected[11] = 4, 1, 2
    assert coeffs == expected
    printed = [0] * 15
    printed[0], printed[3], printed[11] = 4, 2, 1
    for c in (coeffs, printed):
        by_rank, by_gcd, g = group_ring_coprime(c, 15)
        assert by_rank and by_gcd and g == "1"


def test_roots_of_unity_check():
    # f(zeta) != 0 at every 15th root of unity, numerically
    import cmath

    for coeffs in ([4, 0, 0, 1] + [0] * 7 + [2], [4, 0, 0, 2] + [0] * 7 + [1]):
        for k in range(15):
            z = cmath.exp(2j * cmath.pi * k / 15)
            assert abs(sum(c * z**i for i, c in enumerate(coeffs))) > 1e-6


def test_gcd_detects_common_factor():
    # 1 + t is divisible by the cyclotomic factor of t^2 - 1
    g = cyclotomic_gcd([1, 1], 2)
    assert g.as_expr() == sympy.Symbol("t") + 1
    assert group_ring_coprime([1, 0, -1], 4)[:2] == (False, False)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.lists(st.integers(-3, 3), min_size=1, max_size=9))
def test_rank_and_gcd_agree(q, coeffs):
    coeffs = (coeffs + [0] * q)[:q]
    if not any(coeffs):
        return
    by_rank, by_gcd, _ = group_ring_coprime(coeffs, q)
    assert by_rank == by_gcd


def test_rational_rank():
    assert rational_rank([[1, 2], [2, 4]]) == 1
    assert rational_rank([[1, 0], [0, Fraction(1, 2)]]) == 2


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (7, 1), (7, 2), (7, 3), (11, 2)])
def test_relation_span_is_full(p, n):
    for M in enumerate_metabolizers(p, n):
        cert = relation_span_is_full(M, p)
        assert cert.full and cert.deciders_agree


@pytest.mark.parametrize("form", ["+", "++", "+-"])
def test_appendix_forces_zero_p3(form):
    res = verify_appendix_theorem(3, len(form), LinkingForm.parse(3, form))
    assert res.metabolizers and res.all_force_zero


def test_appendix_forces_zero_p7_mixed_forms():
    for form in ("++", "+-", "+++", "++-"):
        res = verify_appendix_theorem(7, len(form), LinkingForm.parse(7, form))
        assert res.all_force_zero


def test_appendix_verdicts():
    assert verify_appendix_theorem(3, 1, dbar={0: 0, 3: 2}).verdict == "obstructed"
    assert verify_appendix_theorem(3, 1, dbar={0: 0, 3: 0}).verdict == "unobstructed"
    # the same table applies to every summand, so (3, 3) gives 2 + 2 != 0
    res = verify_appendix_theorem(3, 2, LinkingForm.parse(3, "+-"), dbar={0: 0, 3: 2})
    assert res.verdict == "obstructed"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([7, 11, 23]), st.lists(st.integers(0, 22), min_size=1, max_size=4))
def test_psi_is_rho_equivariant(p, ks):
    rho = rho_permutation(p)
    m = tuple((k % p) * p for k in ks)
    am = tuple(rho.a * x % (p * p) for x in m)
    assert psi(am, p) == rho.apply(psi(m, p))


@pytest.mark.parametrize("n", [1, 2])
def test_special_vector_on_p7_metabolizers(n):
    for M in enumerate_metabolizers(7, n):
        check_special(M)

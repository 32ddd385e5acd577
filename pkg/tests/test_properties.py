"""Property suites: structure of complexes, tensor laws, window stability,
determinism of serialized output.  Runnable on their own:

    pytest tests/test_properties.py
"""


from hypothesis import given, settings, strategies as st

from floerd.complex import tensor, to_json, transpose, unknot, validate
from floerd.knots import AlexanderPoly, doubled_trefoil_model, gaps_and_deltas, staircase_complex, torus_staircase
from floerd.obstruct import emit, obstruct, obstruct_complex
from floerd.quotient import TruncatedQuotientComplex, default_window, tower_bottom, truncated_homology
from floerd.surgery import SurgeryProblem, d_invariant, grading_shift

SETTINGS = settings(max_examples=40, deadline=None)


@st.composite
def alternating_polys(draw, max_terms=4, max_exp=9):
    k = draw(st.integers(1, max_terms))
    exps = sorted(draw(st.sets(st.integers(1, max_exp), min_size=k, max_size=k)))
    coeffs = {0: (-1) ** k}
    for pos, e in enumerate(reversed(exps)):
        coeffs[e] = coeffs[-e] = (-1) ** pos
    return AlexanderPoly(coeffs)


@st.composite
def staircases(draw):
    return staircase_complex(gaps_and_deltas(draw(alternating_polys())), "rand")


small_models = st.one_of(
    st.just(unknot()),
    st.just(doubled_trefoil_model()),
    st.just(transpose(doubled_trefoil_model())),
    st.sampled_from([torus_staircase(3), torus_staircase(5)]),
    staircases(),
)


def torsion_coefficient(poly, m):
    m = abs(m)
    return sum(j * poly.coeffs.get(m + j, 0) for j in range(1, poly.genus + 1))


@SETTINGS
@given(staircases())
def test_random_staircases_validate(c):
    rep = validate(c)
    assert rep.ok, str(rep)
    assert rep.homology_rank == 1


@SETTINGS
@given(st.lists(small_models, min_size=2, max_size=3))
def test_random_tensor_products_validate(factors):
    out = factors[0]
    for f in factors[1:]:
        if out.n * f.n > 3000:
            break
        out = tensor(out, f)
    rep = validate(out)
    assert rep.ok, str(rep)


@SETTINGS
@given(small_models)
def test_tensor_unit(c):
    assert tensor(c, unknot()).isomorphic(c)
    assert tensor(unknot(), c).isomorphic(c)


@SETTINGS
@given(small_models, small_models, st.sampled_from([unknot(), torus_staircase(3), doubled_trefoil_model()]))
def test_tensor_associative(a, b, c):
    if a.n * b.n * c.n > 4000:
        return
    assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))


@SETTINGS
@given(small_models)
def test_transpose_involution(c):
    assert transpose(transpose(c)) == c


@SETTINGS
@given(staircases(), st.integers(0, 6), st.integers(1, 4))
def test_window_stability(c, m, extra):
    m = min(m, c.genus)
    n = default_window(c, m)
    assert tower_bottom(TruncatedQuotientComplex(c, m, n)) == tower_bottom(
        TruncatedQuotientComplex(c, m, n + extra)
    )


@SETTINGS
@given(alternating_polys(), st.integers(0, 4), st.data())
def test_staircase_d_matches_torsion_coefficients(poly, extra, data):
    c = staircase_complex(gaps_and_deltas(poly), "rand")
    q = max(2 * poly.genus - 1, 1) + extra
    m = data.draw(st.integers(-((q - 1) // 2), (q - 1) // 2))
    expected = -grading_shift(q, abs(m)) - 2 * torsion_coefficient(poly, m)
    assert d_invariant(SurgeryProblem(c, q, m)) == expected


@SETTINGS
@given(small_models, st.integers(1, 9), st.data())
def test_d_is_conjugation_symmetric(c, extra, data):
    g = c.genus if c.genus is not None else c.alexander_top()
    q = max(2 * g - 1, 1) + extra
    m = data.draw(st.integers(0, (q - 1) // 2))
    assert d_invariant(SurgeryProblem(c, q, m)) == d_invariant(SurgeryProblem(c, q, -m))


@SETTINGS
@given(small_models)
def test_json_serialization_is_deterministic(c):
    assert to_json(c) == to_json(c)


def test_reports_are_byte_identical_across_runs():
    a = obstruct_complex(torus_staircase(5), 5)
    b = obstruct_complex(torus_staircase(5), 5)
    for fmt in ("json", "csv", "text"):
        assert emit(a, fmt) == emit(b, fmt)
    assert emit(obstruct(7), "json") == emit(obstruct(7), "json")


@SETTINGS
@given(small_models, small_models)
def test_transpose_commutes_with_tensor(a, b):
    if a.n * b.n > 4000:
        return
    assert transpose(tensor(a, b)).isomorphic(tensor(transpose(a), transpose(b)))


@SETTINGS
@given(staircases())
def test_staircase_hfk_is_one_class_per_exponent(c):
    k = c.n // 2
    expected = {}
    for s in range(-k, k + 1):
        x = c.index[f"x{s}"]
        expected[(int(c.j[x]), int(c.gr[x]))] = 1
    assert c.hfk_ranks() == expected


@settings(max_examples=25, deadline=None)
@given(small_models, st.integers(0, 3))
def test_truncated_homology_stable_under_window_growth(c, m):
    m = min(m, c.alexander_top())
    n = default_window(c, m)
    a = truncated_homology(TruncatedQuotientComplex(c, m, n), with_u_action=False)
    b = truncated_homology(TruncatedQuotientComplex(c, m, n + 1), with_u_action=False)
    assert all(b.dims[g] == v for g, v in a.dims.items())
    assert a.tower_bottom == b.tower_bottom


@SETTINGS
@given(small_models, st.integers(0, 6))
def test_d_invariant_under_transpose_at_zero(c, extra):
    g = c.alexander_top()
    q = max(2 * g - 1, 1) + extra
    assert d_invariant(SurgeryProblem(c, q, 0)) == d_invariant(SurgeryProblem(transpose(c), q, 0))

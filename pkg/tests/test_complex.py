import pytest

from floerd.complex import (
    BasisElement,
    BifilteredComplex,
    DifferentialEntry,
    from_json,
    tensor,
    tensor_power,
    to_json,
    transpose,
    unknot,
    validate,
)
from floerd.errors import InvalidComplexError
from floerd.knots import doubled_trefoil_model, torus_staircase


def trefoil_like(**changes):
    basis = [
        BasisElement("a", 0, (0, 1)),
        BasisElement("b", -1, (0, 0)),
        BasisElement("c", -2, (0, -1)),
    ]
    diff = [DifferentialEntry("b", "a", 1), DifferentialEntry("b", "c", 0)]
    diff = changes.get("diff", diff)
    basis = changes.get("basis", basis)
    return BifilteredComplex.from_elements("tref", basis, diff)


def test_unknot_and_trefoil_validate():
    assert validate(unknot()).ok
    rep = validate(trefoil_like())
    assert rep.ok and rep.homology_rank == 1


def test_dropping_both_arrows_gives_rank_three():
    rep = validate(trefoil_like(diff=[]))
    assert rep.checks["rank"] is False and rep.homology_rank == 3


def test_dropping_one_arrow_leaves_rank_one():
    # one arrow b -> c kills b and c; a survives alone
    rep = validate(trefoil_like(diff=[DifferentialEntry("b", "c", 0)]))
    assert rep.homology_rank == 1


def test_grading_violation_is_named():
    rep = validate(trefoil_like(diff=[DifferentialEntry("b", "a", 0), DifferentialEntry("b", "c", 0)]))
    assert not rep.ok and rep.checks["grading"] is False
    assert "b -> U^0 a" in rep.failure


def test_filtration_must_drop_strictly():
    basis = [BasisElement("x", 1, (0, 0)), BasisElement("y", 0, (0, 0))]
    rep = validate(BifilteredComplex.from_elements("bad", basis, [DifferentialEntry("x", "y", 0)]))
    assert rep.checks["filtration"] is False
    with pytest.raises(InvalidComplexError) as exc:
        rep.raise_if_failed()
    assert exc.value.check == "filtration"


def test_d_squared_violation_detected():
    basis = [
        BasisElement("x", 2, (1, 1)),
        BasisElement("y", 1, (0, 1)),
        BasisElement("z", 0, (0, 0)),
    ]
    diff = [DifferentialEntry("x", "y", 0), DifferentialEntry("y", "z", 0)]
    rep = validate(BifilteredComplex.from_elements("sq", basis, diff))
    assert rep.checks["d_squared"] is False
    assert "x" in rep.failure and "z" in rep.failure


def test_duplicate_ids_rejected():
    basis = [BasisElement("x", 0, (0, 0)), BasisElement("x", 0, (0, 0))]
    with pytest.raises(InvalidComplexError):
        BifilteredComplex.from_elements("dup", basis)


def test_tensor_with_unknot_is_identity():
    t = torus_staircase(5)
    assert tensor(t, unknot()).isomorphic(t)
    assert tensor(unknot(), t).isomorphic(t)


def test_tensor_counts_and_genus():
    d = doubled_trefoil_model()
    c = tensor(torus_staircase(3), d)
    assert c.n == 45 and c.genus == 2
    assert validate(c).ok
    assert tensor_power(d, 0).n == 1


def test_transpose_is_involution():
    d = doubled_trefoil_model()
    assert transpose(transpose(d)) == d
    assert transpose(transpose(d)).name == d.name


def test_json_roundtrip_is_exact():
    c = tensor(torus_staircase(3), doubled_trefoil_model())
    text = to_json(c)
    back = from_json(text)
    assert back == c and back.name == c.name
    assert to_json(back) == text


def test_hfk_ranks_of_trefoil():
    assert trefoil_like().hfk_ranks() == {(-1, -2): 1, (0, -1): 1, (1, 0): 1}

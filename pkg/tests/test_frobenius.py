import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithlc.coordring import gl1c_ring, gl_ring
from arithlc.errors import UnsupportedIdeal
from arithlc.frobenius import check_horizontal, make_lift, p_derivation_ring, trivial_lift
from arithlc.padic import make_context
from arithlc.solver import MetricTuple, solve

CTX = make_context(3, 3)
R2 = gl_ring(CTX, 2)


@st.composite
def elems(draw):
    terms = draw(st.dictionaries(st.tuples(*[st.integers(0, 2)] * 4), st.integers(-9, 9), max_size=3))
    return R2.from_int_terms(terms)


@pytest.fixture(scope="module")
def lc_lift():
    conn = solve(MetricTuple.constant(((1, 0), (0, 2))), 3, R2)
    return conn.lifts[0]


@given(a=elems(), b=elems())
def test_lift_is_ring_endomorphism(lc_lift, a, b):
    L = lc_lift
    assert L.apply(a * b).equals(L.apply(a) * L.apply(b))
    assert L.apply(a + b).equals(L.apply(a) + L.apply(b))


@given(a=elems())
def test_lift_reduces_to_frobenius(lc_lift, a):
    assert (lc_lift.apply(a) - a**3).is_zero_mod_p()


def test_lift_on_inverse_det(lc_lift):
    d = R2.generic_matrix().det()
    assert lc_lift.apply(d.inverse()).equals(lc_lift.apply(d).inverse())


def test_trivial_lift_derivation_vanishes_on_generators():
    L = trivial_lift(R2)
    for g in R2.gens():
        assert p_derivation_ring(L, g).is_zero()


def test_make_lift_rejects_non_identity_residue():
    bad = R2.generic_matrix()
    with pytest.raises(ValueError):
        make_lift(bad, R2)


def test_unsupported_ideal():
    L = trivial_lift(R2)
    x11 = R2.var(0)
    with pytest.raises(UnsupportedIdeal):
        check_horizontal(L, [x11 - 1])


def test_trivial_lift_is_horizontal_for_conformal_group():
    x11, x12, x21, x22 = R2.gens()
    assert check_horizontal(trivial_lift(R2), [x11 - x22, x12 + x21])
    G = gl1c_ring(CTX)
    a, b = G.gens()
    assert check_horizontal(trivial_lift(G), [a * a + b * b - 1]) is False

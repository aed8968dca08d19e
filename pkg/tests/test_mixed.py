import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithlc.errors import DomainError, NotAUnit
from arithlc.mixed import (Mat2, QuadExtElem, bareiss_det, d_determinant, etale_presentation, flint_det,
                           star_congruence_check, identity_y, linear_system, mixed_ring, moebius_lifts, n2_factored, odd_part,
                           random_y, section_check, star_curvature_traces, symbolic_y, trace_power_commutes)

ints = st.integers(-40, 40)
RING = mixed_ring([3])


def rf(v):
    return RING.const(v)


def mats_equal(M, K):
    return all(M.r[i][j].equals(K.r[i][j]) for i in range(2) for j in range(2))


@given(ints, ints, ints, ints, ints)
def test_quadratic_extension_matches_matrix_model(a, b, c, d, c0):
    x, y = QuadExtElem(rf(a), rf(b), rf(c0)), QuadExtElem(rf(c), rf(d), rf(c0))
    Mx, My = x.matrix(), y.matrix()
    assert mats_equal(Mx * My, (x * y).matrix())
    assert x.trace().equals(Mx.trace())
    assert x.norm().equals(Mx.det())


@given(ints, ints, ints, st.integers(0, 12))
def test_power_trace_two_routes(a, b, c0, e):
    x = QuadExtElem(rf(a), rf(b), rf(c0))
    assert (x**e).trace().equals((x.matrix() ** e).trace())


@given(ints, ints, ints, ints, st.sampled_from([3, 5, 7]))
def test_trace_of_pth_power(a, b, c, d, p):
    A, B = RING.var("a"), RING.var("b")
    M = Mat2([[A * a + rf(b), B * c], [A + B * d, rf(a - d)]])
    assert trace_power_commutes(M, p)


@given(st.lists(st.lists(st.integers(-9, 9), min_size=5, max_size=5), min_size=5, max_size=5))
def test_bareiss_matches_flint(rows):
    assert bareiss_det(rows) == flint_det(rows)


def test_d_determinant_small_values():
    assert d_determinant(2, identity_y(2)) == -1
    assert d_determinant(3, identity_y(3)) == 2
    assert d_determinant(2, identity_y(2), normalized=False) == -16
    assert odd_part(d_determinant(3, identity_y(3))) == 1


def test_d_determinant_n2_factored():
    rng = random.Random(5)
    for _ in range(10):
        y = random_y(2, rng)
        assert d_determinant(2, y) == n2_factored(y)
        assert d_determinant(2, y, method="bareiss") == d_determinant(2, y)


def test_symbolic_determinant_factors():
    _, Y = symbolic_y(2)
    assert d_determinant(2, Y, method="bareiss") == n2_factored(Y)


def test_linear_system_is_square():
    rows = linear_system(3, identity_y(3))
    assert len(rows) == len(rows[0])


def test_localized_ring_arithmetic():
    R = mixed_ring([3])
    a, b = R.var("a"), R.var("b")
    f = (a + b) ** 3
    g = a**3 + b**3
    assert (f - g).zero_mod(3)
    assert not (f - g).is_zero()
    assert (R.inverse_gen(1) * (a**6 + b**6)).equals(R.const(1))
    assert (R.inverse_gen(0) * 2).equals(R.const(1))


@pytest.mark.parametrize("p,p2", [(3, 3), (3, 5)])
@pytest.mark.parametrize("d", [1, 2])
def test_star_curvature(p, p2, d):
    sc = star_curvature_traces(d, p, p2)
    assert sc.routes_agree
    assert all(star_congruence_check(sc).values())
    assert not sc.value_alpha.is_zero()


def test_star_curvature_rejects_bad_d():
    with pytest.raises(NotAUnit):
        star_curvature_traces(3, 3, 5)
    with pytest.raises(DomainError):
        star_curvature_traces(0, 3, 5)


@pytest.mark.parametrize("p", [3, 5])
def test_moebius_roundtrip(p):
    ml = moebius_lifts(1, p)
    assert ml.roundtrip and ml.coefficient_nonzero


@pytest.mark.parametrize("p", [3, 5, 7])
def test_etale_section(p):
    out = section_check(etale_presentation((((1, 0), (0, 2)),) * 2, p))
    assert out["metric_mod_p"] and out["torsion_exact"]

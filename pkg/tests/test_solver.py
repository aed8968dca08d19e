import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithlc.coordring import Matrix, gl_ring, reduce_mod_p_and_x1
from arithlc.errors import DomainError, NotAUnit
from arithlc.padic import CyclotomicInt, GaloisElement, PadicScalar, make_context
from arithlc.solver import (MetricTuple, christoffel, christoffel_symmetric, christoffel_via_delta, closed_form_n1,
                            closed_form_n1_legendre, closed_form_n1_series, identity_point, point_context, random_metric_tuple,
                            random_point,
                            solve, solve_at_point, solve_for, verify_congruence_christoffel, verify_det_lambda,
                            verify_vertical_congruences)

units = st.integers(-200, 200)


@settings(max_examples=25)
@given(units, st.sampled_from([3, 5, 7]))
def test_n1_closed_form_three_routes(d, p):
    if d % p == 0:
        with pytest.raises(NotAUnit):
            solve_for(MetricTuple.constant(((d,),)), p, 3)
        return
    conn = solve_for(MetricTuple.constant(((d,),)), p, 3)
    lam = conn.lams[0][0, 0].evaluate([1])
    assert lam == closed_form_n1(d, p, 3)
    assert lam == closed_form_n1_series(d, p, 3)
    assert lam == closed_form_n1_legendre(d, p, 3)
    assert (lam - 1).truncate(1).is_zero()


def test_n1_known_value():
    conn = solve_for(MetricTuple.constant(((2,),)), 7, 2)
    assert conn.lams[0][0, 0].evaluate([1]) == make_context(7, 2).scalar(8)
    # Lambda is a constant: it takes the same value at every unit point
    assert conn.lams[0][0, 0].evaluate([3]) == make_context(7, 2).scalar(8)


def test_n1_christoffel_residue():
    conn = solve_for(MetricTuple.constant(((2,),)), 3, 2)
    G = christoffel(conn)
    assert reduce_mod_p_and_x1(G[0][0, 0]) == make_context(3, 2).scalar(1, 1)


@pytest.fixture(scope="module")
def conn_diag12():
    return solve_for(MetricTuple.constant(((1, 0), (0, 2))), 5, 3)


def test_fixed_point_equations(conn_diag12):
    assert conn_diag12.verify_metric()
    assert conn_diag12.verify_torsion()
    for L in conn_diag12.lams:
        for a, b in zip(L.entries(), [1, 0, 0, 1]):
            assert (a - b).is_zero_mod_p()


def test_christoffel_two_routes(conn_diag12):
    G, H = christoffel(conn_diag12), christoffel_via_delta(conn_diag12)
    assert all(g.equals(h) for g, h in zip(G, H))
    assert christoffel_symmetric(G)


def test_christoffel_congruences(conn_diag12):
    assert all(r.passed for r in verify_congruence_christoffel(conn_diag12))


@pytest.mark.parametrize("situation", ["center", "torus"])
def test_det_and_trace_of_lambda(conn_diag12, situation):
    assert all(r.passed for r in verify_det_lambda(conn_diag12, situation))


def test_torus_needs_diagonal_metric():
    conn = solve_for(MetricTuple.constant(((1, 1), (1, 2))), 3, 2)
    with pytest.raises(DomainError):
        verify_det_lambda(conn, "torus")
    assert all(r.passed for r in verify_det_lambda(conn, "center"))


@pytest.mark.parametrize("seed", range(3))
def test_point_backend_matches_symbolic_evaluation(seed):
    rng = random.Random(seed)
    p, N = 3, 3
    metric = random_metric_tuple(2, p, rng)
    R = gl_ring(make_context(p, N), 2)
    conn = solve(metric, N, R)
    ctx = R.base
    for _ in range(3):
        while True:
            pt = [rng.randint(-20, 20) for _ in range(4)]
            if (pt[0] * pt[3] - pt[1] * pt[2]) % p:
                break
        X = Matrix([[PadicScalar(ctx, (pt[0],)), PadicScalar(ctx, (pt[1],))],
                    [PadicScalar(ctx, (pt[2],)), PadicScalar(ctx, (pt[3],))]])
        pc = solve_at_point(metric, X, N)
        for Ls, Lp in zip(conn.lams, pc.lams):
            assert [e.evaluate(pt) for e in Ls.entries()] == list(Lp.entries())


def test_point_backend_n3():
    rng = random.Random(2)
    metric = random_metric_tuple(3, 5, rng)
    ctx = point_context(5, 3)
    ident = solve_at_point(metric, identity_point(ctx, 3), 3)
    for _ in range(3):
        conn = solve_at_point(metric, random_point(ctx, 3, rng), 3)
        assert conn.verify_metric() and conn.verify_torsion()
        assert all(r.passed for r in verify_congruence_christoffel(conn, ident))


def test_vertical_congruences_inert_prime():
    i = CyclotomicInt.zeta(4)
    one = CyclotomicInt.from_list(4, [1])
    q = ((one * 2, one + i), (one + i, one * 3))
    gauge = [GaloisElement(1, 4), GaloisElement(3, 4)]
    assert all(r.passed for r in verify_vertical_congruences(q, gauge, 3))


def test_input_validation():
    with pytest.raises(DomainError):
        MetricTuple.constant(((1, 2), (3, 1)))
    with pytest.raises(DomainError):
        solve_for(MetricTuple.constant(((1,),)), 2, 2)
    with pytest.raises(NotAUnit):
        solve_for(MetricTuple.constant(((1, 1), (1, 1))), 3, 2)
    with pytest.raises(DomainError):
        R = gl_ring(make_context(3, 2), 1)
        solve(MetricTuple.constant(((1,),)), 3, R)


def test_truncation_is_consistent():
    metric = MetricTuple.constant(((1, 0), (0, 2)))
    R = gl_ring(make_context(3, 4), 2)
    hi, lo = solve(metric, 4, R), solve(metric, 3, R)
    assert all(a.truncate(3).equals(b) for a, b in zip(hi.lams, lo.lams))

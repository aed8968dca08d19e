import pytest

from arithlc.conformal import (det_compat, det_perp_commutator, delta_at_identity_check, horizontality_biconditional,
                               restriction_agrees, solve_conformal, value_at_identity)
from arithlc.errors import NotAUnit


@pytest.fixture(scope="module")
def cd22():
    return solve_conformal(2, 2, 3, 2)


def test_residuals_vanish(cd22):
    assert all(r.is_zero() for r in cd22.residuals())


def test_value_at_identity(cd22):
    assert value_at_identity(cd22.v1).coeffs[0] == 6


def test_series_and_newton_agree():
    for d1, d2, p in [(2, 2, 3), (2, 3, 5), (1, 4, 3)]:
        a = solve_conformal(d1, d2, p, 3)
        b = solve_conformal(d1, d2, p, 3, ring=a.ring, method="newton")
        assert a.v1.equals(b.v1) and a.v2.equals(b.v2)


def test_restricted_solver_agrees(cd22):
    assert restriction_agrees(cd22)
    assert restriction_agrees(solve_conformal(2, 3, 5, 2))


def test_delta_at_identity(cd22):
    assert all(delta_at_identity_check(cd22).values())


def test_det_compat(cd22):
    table, factor = det_compat(cd22)
    assert all(table.values())


def test_non_unit_d():
    with pytest.raises(NotAUnit):
        solve_conformal(2, 3, 3, 2)


def test_horizontality_biconditional():
    out = horizontality_biconditional([(1, 1), (1, 2), (2, 2), (-1, 1)], 3, 2)
    assert all(match for _, _, match in out.values())
    assert out[("1", "1")][0] and not out[("2", "2")][0]


def test_det_perp_commutator_nonzero():
    rep = det_perp_commutator(solve_conformal(2, 2, 5, 2))
    assert rep.sqrt_minus_one * rep.sqrt_minus_one == rep.sqrt_minus_one.ctx.scalar(-1)
    assert not rep.commutator_zero
    assert rep.consistent

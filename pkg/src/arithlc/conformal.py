"""The n = 2 conformal case on GL_1^c = {[[a, b], [-b, a]]}.

For q_i = d_i * 1 the Levi-Civita lifts preserve the conformal group and act by
right multiplication with [[u_i, v_i], [-v_i, u_i]].  Here (v_1, v_2) is the
unique solution divisible by p of the pair of circle equations

    x1^2 - 2 e x2 + e^2 x2^2 = theta_1 - 1
    x1^2 + 2 e x1 + e^2 x2^2 = e^2 (theta_2 - 1)

with e = phi(d_2/d_1) and theta_i = d_i^p (a^2+b^2)^p / (phi(d_i) (a^(2p) + b^(2p))).
Subtracting gives x1 + x2 = L; substituting leaves a quadratic in x1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coordring import Matrix, PolyRing, RingElem, apply_hom, gl1c_ring, reduce_mod_p_and_x1
from .errors import DomainError, ExactDivisionFailure, NotAUnit
from .frobenius import FrobeniusLift, check_horizontal, conformal_restriction, make_gl1c_lift
from .padic import (BaseContext, PadicScalar, binomial_series, embed, frobenius_base, make_context,
                    p_derivation_base, sqrt_minus_one)
from .solver import MetricTuple, solve


@dataclass
class ConformalData:
    d1: object
    d2: object
    ring: PolyRing
    N: int
    eps: PadicScalar
    theta1: RingElem
    theta2: RingElem
    v1: RingElem
    v2: RingElem
    u1: RingElem
    u2: RingElem

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def base(self) -> BaseContext:
        return self.ring.base

    def residuals(self) -> tuple:
        """Both circle equations evaluated at (v1, v2); zero for a true solution."""
        e = self.eps
        v1, v2 = self.v1, self.v2
        r1 = v1 * v1 - v2 * (e * 2) + v2 * v2 * (e * e) - (self.theta1 - 1)
        r2 = v1 * v1 + v1 * (e * 2) + v2 * v2 * (e * e) - (self.theta2 - 1) * (e * e)
        return r1, r2


def _unit(d, ctx: BaseContext) -> PadicScalar:
    s = embed(d, ctx)
    if not s.is_unit():
        raise NotAUnit(f"d = {d} is not a unit at p = {ctx.p}")
    return s


def theta(d: PadicScalar, R: PolyRing, N: int) -> RingElem:
    p = R.p
    a, b = R.gens(N)
    factor = d**p * frobenius_base(d).inverse()
    return (a * a + b * b) ** p * (a ** (2 * p) + b ** (2 * p)).inverse() * factor


def _inverse_near(c: PadicScalar, h: RingElem, N: int, one: RingElem) -> RingElem:
    """(c (1 + h))^{-1} for h = 0 mod p, by the geometric series."""
    return binomial_series(h, Fraction(-1), N, c.ctx.p**N, one) * c.inverse()


def _quadratic_small_root(a: RingElem, b: RingElem, c: RingElem, b0: PadicScalar, N: int) -> RingElem:
    """Root = 0 mod p of a z^2 + b z + c with c = 0 mod p and b = b0 (1 + h), h = 0 mod p.

    Rationalized quadratic formula z = -2c / (b (1 + S)), S = (1 - 4ac/b^2)^{1/2},
    which stays valid when the leading coefficient a is not a unit.
    """
    R = a.ring
    one = R.one(N)
    binv = _inverse_near(b0, (b * b0.inverse() - 1), N, one)
    w = a * c * binv * binv * 4
    S = binomial_series(-w, Fraction(1, 2), N, R.p**N, one)
    half = R.base.scalar(2).inverse()
    inv1pS = binomial_series((S - 1) * half, Fraction(-1), N, R.p**N, one) * half
    return -(c * 2) * binv * inv1pS


def _newton_root(a: RingElem, b: RingElem, c: RingElem, b0: PadicScalar, N: int) -> RingElem:
    """Same root by Newton iteration from 0; the derivative stays = b0 mod p."""
    R = a.ring
    one = R.one(N)
    z = R.zero(N)
    for _ in range(N.bit_length() + 1):
        deriv = a * z * 2 + b
        dinv = _inverse_near(b0, deriv * b0.inverse() - 1, N, one)
        z = z - (a * z * z + b * z + c) * dinv
    return z


def solve_conformal(d1, d2, p: int, N: int, m: int | None = None, ring: PolyRing | None = None,
                    method: str = "series") -> ConformalData:
    """Unique solution (v1, v2) divisible by p, together with u1, u2."""
    if p == 2:
        raise DomainError("p must be odd")
    if ring is None:
        ring = gl1c_ring(make_context(p, N, m))
    ctx = ring.base
    D1, D2 = _unit(d1, ctx), _unit(d2, ctx)
    eps = frobenius_base(D2 * D1.inverse())
    th1, th2 = theta(D1, ring, N), theta(D2, ring, N)
    half = ctx.scalar(2).inverse()
    if d1 == d2 and method == "series":
        # v = -1/2 + 1/2 (2 theta - 1)^{1/2}
        sq = binomial_series((th1 - 1) * 2, Fraction(1, 2), N, p**N, ring.one(N))
        v = (sq - 1) * half
        v1, v2 = v, -v
    else:
        L = ((th2 - 1) * (eps * eps) - (th1 - 1)) * (eps * 2).inverse()
        qa = ring.const(eps * eps + 1, N)
        qb = (ring.one(N) - L * eps) * (eps * 2)
        qc = L * L * (eps * eps) - L * (eps * 2) - (th1 - 1)
        root = _newton_root if method == "newton" else _quadratic_small_root
        v1 = root(qa, qb, qc, eps * 2, N)
        v2 = L - v1
    for v in (v1, v2):
        if not v.is_zero_mod_p():
            raise ExactDivisionFailure("conformal solution is not divisible by p")
    u2 = v1 * eps.inverse() + 1
    u1 = 1 - v2 * eps
    return ConformalData(d1, d2, ring, N, eps, th1, th2, v1, v2, u1, u2)


def closed_form_lifts(cd: ConformalData) -> list[FrobeniusLift]:
    return [make_gl1c_lift(cd.u1, cd.v1), make_gl1c_lift(cd.u2, cd.v2)]


def restricted_solver_matrices(cd: ConformalData) -> list[Matrix]:
    """Lambda_i of the general GL_2 solver for q_i = d_i * 1, restricted to the conformal group."""
    from .coordring import gl_ring

    metric = MetricTuple((((cd.d1, 0), (0, cd.d1)), ((cd.d2, 0), (0, cd.d2))), cd.base.m)
    R = gl_ring(cd.base, 2)
    conn = solve(metric, cd.N, R)
    h = conformal_restriction(R, cd.ring)
    return [L.map(lambda e: apply_hom(h, e)) for L in conn.lams]


def restriction_agrees(cd: ConformalData) -> bool:
    mats = restricted_solver_matrices(cd)
    closed = [Matrix([[cd.u1, cd.v1], [-cd.v1, cd.u1]]), Matrix([[cd.u2, cd.v2], [-cd.v2, cd.u2]])]
    return all(a.equals(b) for a, b in zip(mats, closed))


def delta_at_identity_check(cd: ConformalData) -> dict:
    """delta_i of the conformal matrix modulo (p, a - 1, b) against -1/2 (dd/d^p) times a sign pattern."""
    if cd.d1 != cd.d2:
        raise DomainError("needs d1 = d2")
    p = cd.p
    ctx = cd.base
    d = embed(cd.d1, ctx)
    r = (p_derivation_base(d) * (d.truncate(cd.N - 1) ** p).inverse()).truncate(1)
    mhalf = (ctx.scalar(2).inverse() * r * -1).truncate(1)
    patterns = {1: ((1, 1), (-1, 1)), 2: ((1, -1), (1, 1))}
    out = {}
    for i, (u, v) in ((1, (cd.u1, cd.v1)), (2, (cd.u2, cd.v2))):
        W = Matrix([[(u - 1).div_p(1), v.div_p(1)], [(-v).div_p(1), (u - 1).div_p(1)]])
        got = [[reduce_mod_p_and_x1(W[a, b]) for b in range(2)] for a in range(2)]
        want = [[mhalf * s for s in row] for row in patterns[i]]
        out[i] = got == want
    return out


def value_at_identity(e: RingElem) -> PadicScalar:
    """Value at a = 1, b = 0 at full precision."""
    return e.evaluate([1, 0])


# ---------------------------------------------------------------------------
# horizontality of a^2 + b^2 = 1


def unit_circle_horizontal(cd: ConformalData) -> list[bool]:
    R = cd.ring
    a, b = R.gens(cd.N)
    ideal = [a * a + b * b - 1]
    return [check_horizontal(L, ideal) for L in closed_form_lifts(cd)]


def horizontality_biconditional(pairs, p: int, N: int, m: int | None = None) -> dict:
    """For each (d1, d2): (both lifts horizontal, dd1 = dd2 = 0) and whether they match."""
    ring = gl1c_ring(make_context(p, N, m))
    out = {}
    for d1, d2 in pairs:
        cd = solve_conformal(d1, d2, p, N, m, ring)
        horiz = all(unit_circle_horizontal(cd))
        flat = all(p_derivation_base(embed(d, ring.base)).is_zero() for d in (d1, d2))
        out[(repr(d1), repr(d2))] = (horiz, flat, horiz == flat)
    return out


# ---------------------------------------------------------------------------
# det and det-perp


def det_compat(cd: ConformalData) -> dict:
    """phi_i(a^2 + b^2) = (d^p/phi(d)) (a^2 + b^2)^p exactly at precision N."""
    if cd.d1 != cd.d2:
        raise DomainError("det compatibility is stated for d1 = d2")
    R = cd.ring
    d = embed(cd.d1, cd.base)
    factor = d**cd.p * frobenius_base(d).inverse()
    a, b = R.gens(cd.N)
    z = a * a + b * b
    rhs = z**cd.p * factor
    return {i + 1: L.apply(z).equals(rhs) for i, L in enumerate(closed_form_lifts(cd))}, factor


@dataclass
class DetPerpReport:
    sqrt_minus_one: PadicScalar
    images: list
    commutator: RingElem
    generator_commutator_zero: bool

    @property
    def commutator_zero(self) -> bool:
        return self.commutator.is_zero()

    @property
    def consistent(self) -> bool:
        """The lifts commute on the group iff they commute on s."""
        return self.commutator_zero == self.generator_commutator_zero


def det_perp_commutator(cd: ConformalData) -> DetPerpReport:
    """phi_1 phi_2(s) - phi_2 phi_1(s) for s = (a + ib)/(a - ib) = (a + ib)^2 / (a^2 + b^2)."""
    if cd.d1 != cd.d2:
        raise DomainError("stated for d1 = d2")
    R = cd.ring
    i = sqrt_minus_one(cd.base)
    a, b = R.gens(cd.N)
    w = a + b * i
    unit_check = (w * (a - b * i)).equals(a * a + b * b)
    if not unit_check:
        raise ArithmeticError("(a + ib)(a - ib) != a^2 + b^2")
    s = w * w * (a * a + b * b).inverse()
    L1, L2 = closed_form_lifts(cd)
    images = [L1.apply(s), L2.apply(s)]
    comm = L1.apply(images[1]) - L2.apply(images[0])
    gens_zero = all((L1.apply(L2.apply(g)) - L2.apply(L1.apply(g))).is_zero() for g in (a, b))
    return DetPerpReport(i, images, comm, gens_zero)

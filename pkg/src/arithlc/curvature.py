"""Curvature as the commutator of Frobenius lifts divided by p, with the Riemann and Ricci
congruences it satisfies modulo p and modulo (p, x - 1).

Symbolic curvature is computed in the coordinate ring.  For n = 3 the same
quantities are evaluated at random points of GL_3 over a Galois ring: if
Y_k(Z) = Z^(p) Lambda_k(Z) is the image of the point Z under lift k, then the
curvature at X is (Y_j(Y_i(X)) - Y_i(Y_j(X)))/p for integer metrics.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .coordring import Matrix, RingElem, apply_hom, gl1c_ring, reduce_mod_p_and_x1
from .errors import DomainError
from .frobenius import compose_apply, conformal_restriction
from .padic import embed, p_derivation_base
from .solver import (CongruenceReport, Connection, MetricTuple, _half, c_matrices, delta_q, identity_point,
                     point_context, random_point, solve_at_point)


@dataclass
class CurvatureTensor:
    """Phi[(i, j)] = phi_ij(x); R[(i, j)] = x^(p^2)t q^(p^2) Phi_ij; ricci = (R_ik)."""

    Phi: dict
    R: dict = field(default_factory=dict)
    ricci: Matrix | None = None
    point: Matrix | None = None

    def component(self, i, j, m, k):
        return self.Phi[(i, j)][m, k]


def _one_based(t):
    return tuple(v + 1 for v in t)


# ---------------------------------------------------------------------------
# symbolic


def curvature(conn: Connection) -> CurvatureTensor:
    """Phi_ij = (phi_i phi_j(x) - phi_j phi_i(x))/p, exact, at precision N - 1."""
    if not conn.is_symbolic:
        raise DomainError("use point_curvature for point connections")
    if conn.N < 2:
        raise DomainError("curvature needs precision >= 2")
    R = conn.ring
    lifts = conn.lifts
    x = R.generic_matrix(conn.N)
    n = conn.n
    images = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                images[(i, j)] = compose_apply(lifts[i], lifts[j], x)
    Phi = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                Phi[(i, j)] = Matrix([[R.zero(conn.N - 1)] * n for _ in range(n)])
            else:
                Phi[(i, j)] = (images[(i, j)] - images[(j, i)]).div_p(1)
    return CurvatureTensor(Phi)


def _gauge_invariant_q(metric: MetricTuple):
    q = metric.qs[0]
    if any(qi != q for qi in metric.qs):
        raise DomainError("Riemann congruences need a vertical gauge invariant metric (all q_i equal)")
    return q


def riemann(ct: CurvatureTensor, conn: Connection) -> CurvatureTensor:
    """Fill in R and the Ricci matrix modulo p."""
    p = conn.p
    n = conn.n
    q = _gauge_invariant_q(conn.metric)
    base = conn.base
    if conn.is_symbolic:
        Rg = conn.ring
        x = Rg.generic_matrix(1)
        conv = lambda c: Rg.const(c, 1)  # noqa: E731
    else:
        x = conn.point.truncate(1)
        conv = lambda c: c.truncate(1)  # noqa: E731
    p2 = p * p
    xp2 = x.pth_power(p2)
    qp2 = Matrix([[conv(embed(c, base).truncate(1) ** p2) for c in r] for r in q])
    left = xp2.T * qp2
    ct.R = {ij: left * Phi.truncate(1) for ij, Phi in ct.Phi.items()}
    xinv = xp2.inverse()
    Psi = {ij: xinv * Phi.truncate(1) for ij, Phi in ct.Phi.items()}
    rows = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = None
            for j in range(n):
                term = Psi[(j, i)][j, k]
                acc = term if acc is None else acc + term
            row.append(acc)
        rows.append(row)
    ct.ricci = Matrix(rows)
    return ct


def _zero_mod_p(e) -> bool:
    return e.truncate(1).is_zero()


def _residue_at_identity(e):
    if isinstance(e, RingElem):
        return reduce_mod_p_and_x1(e)
    return e.truncate(1)


def _first_failure_witness(e):
    if isinstance(e, RingElem):
        return e.truncate(1).serialize(max_terms=1)
    return repr(e.truncate(1))


class _Recorder:
    """Collects per-index zero tests mod p and keeps the first nonzero residue."""

    def __init__(self, name):
        self.name = name
        self.table = {}
        self.witness = ""

    def zero(self, key, e):
        ok = _zero_mod_p(e)
        if not ok and not self.witness:
            self.witness = f"{key}: {_first_failure_witness(e)}"
        self.table[key] = ok

    def report(self):
        return CongruenceReport(self.name, self.table, witness=self.witness)


def riemann_checks(ct: CurvatureTensor, conn: Connection, at_identity: tuple | None = None) -> list:
    """Both Riemann residue congruences, the four Riemann symmetries and Ricci symmetry, all mod p.

    For point data the mod (p, x - 1) congruence needs the tensor at the identity point:
    pass at_identity = (CurvatureTensor, Connection) evaluated at X = 1.
    """
    n = conn.n
    p = conn.p
    half = _half(1, p)
    R = ct.R
    idx = [(i, j, m, k) for i in range(n) for j in range(n) for m in range(n) for k in range(n)]

    def Rc(i, j, m, k):
        return R[(i, j)][m, k]

    C = c_matrices(conn)[0]
    residue_rec = _Recorder("riemann_mod_p")
    for i, j, m, k in idx:
        rhs = (C[i, k] + C[j, m] - C[j, k] - C[i, m]).truncate(1) ** p * half
        residue_rec.zero(_one_based((i, j, m, k)), Rc(i, j, m, k) - rhs)
    reports = [residue_rec.report()]

    ident = None
    if conn.is_symbolic:
        ident = (ct, conn)
    elif at_identity is not None:
        ident = at_identity
    if ident is not None:
        ct1, conn1 = ident
        dq = delta_q(conn1)[0]
        t2 = {}
        for i, j, m, k in idx:
            rhs = (dq[j, k] + dq[i, m] - dq[i, k] - dq[j, m]).truncate(1) ** p * half
            t2[_one_based((i, j, m, k))] = _residue_at_identity(ct1.R[(i, j)][m, k]) == rhs
        reports.append(CongruenceReport("riemann_mod_p_x1", t2))

    sym = {name: _Recorder(name) for name in ("antisym_last_pair", "antisym_first_pair", "bianchi",
                                              "pair_exchange")}
    for i, j, k, m in idx:
        key = _one_based((i, j, k, m))
        sym["antisym_last_pair"].zero(key, Rc(i, j, k, m) + Rc(i, j, m, k))
        sym["antisym_first_pair"].zero(key, Rc(i, j, k, m) + Rc(j, i, k, m))
        sym["pair_exchange"].zero(key, Rc(i, j, k, m) - Rc(k, m, i, j))
    for m, i, j, k in idx:
        sym["bianchi"].zero(_one_based((m, i, j, k)), Rc(m, i, j, k) + Rc(m, j, k, i) + Rc(m, k, i, j))
    reports.extend(r.report() for r in sym.values())
    ric = _Recorder("ricci_symmetric")
    for i in range(n):
        for k in range(n):
            ric.zero(_one_based((i, k)), ct.ricci[i, k] - ct.ricci[k, i])
    reports.append(ric.report())
    return reports


def antisymmetric(ct: CurvatureTensor) -> bool:
    return all((ct.Phi[(i, j)] + ct.Phi[(j, i)]).is_zero() for (i, j) in ct.Phi)


def den_exponent_bound(ct: CurvatureTensor) -> int:
    return max((e.den_exponent() for Phi in ct.Phi.values() for e in Phi.entries()
                if isinstance(e, RingElem)), default=0)


# ---------------------------------------------------------------------------
# the general congruence, any gauge


def verify_first_order_curvature(ct: CurvatureTensor, conn: Connection) -> list:
    """Components of the curvature modulo p and modulo (p, x - 1), summed over r and s as written.

    With q_i the twisted tuple, C_i from the vertical ci equation, q^{ms} the entries
    of q_i^{-1} and x^{rs} those of x^{-1}.
    """
    if not conn.is_symbolic:
        raise DomainError("symbolic connection required")
    n, p = conn.n, conn.p
    Rg = conn.ring
    half = _half(1, p)
    p2 = p * p
    base = conn.base
    qs = [Matrix([[embed(c, base) for c in r] for r in q]) for q in conn.metric.qs]
    qinv = [q.inverse().truncate(1) for q in qs]
    x = Rg.generic_matrix(1)
    xinv_p2 = x.inverse().pth_power(p2)
    C = [c.truncate(1) for c in c_matrices(conn)]
    G = {}
    for i in range(n):
        for k in range(n):
            for r in range(n):
                G[(i, k, r)] = ((C[i][k, r] + C[k][i, r] - C[r][i, k]) ** p) * half

    def term(i, m, k):
        acc = None
        for r in range(n):
            for s in range(n):
                t = xinv_p2[r, s] * Rg.const(qinv[i][m, s] ** p2, 1) * G[(i, k, r)]
                acc = t if acc is None else acc + t
        return acc

    t1 = _Recorder("curvature_mod_p")
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for m in range(n):
                for k in range(n):
                    rhs = term(j, m, k) - term(i, m, k)
                    t1.zero(_one_based((i, j, m, k)), ct.Phi[(i, j)][m, k] - rhs)

    dq = delta_q(conn)
    dG = {}
    for i in range(n):
        for k in range(n):
            for r in range(n):
                dG[(i, k, r)] = (dq[i][k, r] + dq[k][i, r] - dq[r][i, k]).truncate(1) ** p * half
    t2 = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for m in range(n):
                for k in range(n):
                    rhs = base.scalar(0, 1)
                    for r in range(n):
                        rhs = rhs + qinv[i][m, r] ** p2 * dG[(i, k, r)] - qinv[j][m, r] ** p2 * dG[(j, k, r)]
                    t2[_one_based((i, j, m, k))] = _residue_at_identity(ct.Phi[(i, j)][m, k]) == rhs
    return [t1.report(), CongruenceReport("curvature_mod_p_x1", t2)]


# ---------------------------------------------------------------------------
# n = 2, q = d * 1


def phi12_residue_expected(d, p: int, m=None):
    """(dd/d^p)^p mod p, the off-diagonal entry of Phi_12 at the identity."""
    from .padic import make_context

    ctx = make_context(p, 2, m)
    dd = embed(d, ctx)
    v = p_derivation_base(dd) * (dd.truncate(1) ** p).inverse()
    return v.truncate(1) ** p


def phi12_residue_check(ct: CurvatureTensor, conn: Connection) -> CongruenceReport:
    if conn.n != 2:
        raise DomainError("n = 2 only")
    q = _gauge_invariant_q(conn.metric)
    d = q[0][0]
    if q != ((d, 0), (0, d)):
        raise DomainError("q must be d times the identity")
    e = phi12_residue_expected(d, conn.p, conn.metric.m)
    Phi = ct.Phi[(0, 1)]
    res = [[_residue_at_identity(Phi[a, b]) for b in range(2)] for a in range(2)]
    zero = e * 0
    table = {
        (1, 1): res[0][0] == zero,
        (1, 2): res[0][1] == e,
        (2, 1): res[1][0] == -e,
        (2, 2): res[1][1] == zero,
    }
    return CongruenceReport("phi12_mod_p_x1", table, detail=f"expected off-diagonal {e.coeffs}")


def phi12_restricted_nonzero(ct: CurvatureTensor, conn: Connection) -> bool:
    """Is Phi_12 nonzero modulo p after restricting to x11 = x22, x12 = -x21?"""
    R = conn.ring
    G = gl1c_ring(R.base)
    h = conformal_restriction(R, G)
    return any(not apply_hom(h, e).truncate(1).is_zero() for e in ct.Phi[(0, 1)].entries())


# ---------------------------------------------------------------------------
# point evaluation


def _lift_image(metric: MetricTuple, Z: Matrix, N: int) -> list:
    conn = solve_at_point(metric, Z, N)
    Zp = Z.truncate(N).pth_power(Z[0, 0].ctx.p)
    return [Zp * L for L in conn.lams], conn


def point_curvature(metric: MetricTuple, X: Matrix, N: int = 2) -> tuple:
    """Curvature tensor (mod p) and the connection, both evaluated at X."""
    if not metric.is_rational():
        raise DomainError("point curvature supports integer metrics")
    n = metric.n
    Y, conn = _lift_image(metric, X, N)
    YY = {}
    for i in range(n):
        Yi, _ = _lift_image(metric, Y[i], N)
        for j in range(n):
            YY[(i, j)] = Yi[j]
    Phi = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                Phi[(i, j)] = Matrix([[X[0, 0].ctx.scalar(0, N - 1)] * n for _ in range(n)])
            else:
                Phi[(i, j)] = (YY[(i, j)] - YY[(j, i)]).div_p(1)
    ct = CurvatureTensor(Phi, point=X)
    return riemann(ct, conn), conn


def point_riemann_suite(metric: MetricTuple, p: int, points: int, rng: random.Random, r: int = 2) -> dict:
    """Run every Riemann check at `points` random points (plus the identity)."""
    ctx = point_context(p, 2, r)
    ct1, conn1 = point_curvature(metric, identity_point(ctx, metric.n))
    merged: dict = {}
    for _ in range(points):
        X = random_point(ctx, metric.n, rng)
        ct, conn = point_curvature(metric, X)
        for rep in riemann_checks(ct, conn, at_identity=(ct1, conn1)):
            merged.setdefault(rep.name, []).append(rep.passed)
    return {name: (all(v), len(v)) for name, v in merged.items()}

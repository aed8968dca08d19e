"""Levi-Civita n-tuples of Frobenius lifts on GL_n, Christoffel symbols, and their congruences.

Given symmetric q_1..q_n in GL_n(O) the solver finds Lambda_1..Lambda_n with
Lambda_i = 1 mod p such that

    Lambda_i^t A_i Lambda_i = B_i                     (metric)
    (A_i (Lambda_i - 1))_kj = (A_j (Lambda_j - 1))_ki  (torsion free)

where A_i = x^(p)t phi(q_i) x^(p) and B_i = (x^t q_i x)^(p).  Starting from
Lambda = 1, step nu divides the metric defect by p^nu, symmetrizes it into
D_ijk = (C_ijk + C_jik - C_kij)/2 and corrects Lambda_i by p^nu A_i^{-1} D_i^t.
Each correction is only needed to precision N - nu.

Two backends share the iteration: the symbolic one works in the localized
coordinate ring; the point backend works with matrices over a Galois ring,
which is the same computation pushed through an evaluation homomorphism.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .coordring import Matrix, PolyRing, RingElem, SubstitutionMap, apply_hom, gl_ring, laurent_ring, \
    reduce_mod_p_and_x1, ring_identity
from .errors import DomainError, NotAUnit
from .frobenius import FrobeniusLift, make_lift
from .padic import (BaseContext, CyclotomicInt, GaloisElement, PadicScalar, binomial_series, embed,
                    frobenius_base, galois_apply, galois_ring, legendre, make_context, p_derivation_base,
                    sqrt_unit)

# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class MetricTuple:
    """n symmetric n x n matrices with int or CyclotomicInt entries."""

    qs: tuple
    m: int | None = None

    def __post_init__(self):
        qs = tuple(tuple(tuple(row) for row in q) for q in self.qs)
        object.__setattr__(self, "qs", qs)
        n = len(qs)
        if n == 0:
            raise DomainError("empty metric tuple")
        for q in qs:
            if len(q) != n or any(len(r) != n for r in q):
                raise DomainError(f"each q_i must be {n} x {n}")
            for i in range(n):
                for j in range(n):
                    if q[i][j] != q[j][i]:
                        raise DomainError("metric is not symmetric")

    @property
    def n(self) -> int:
        return len(self.qs)

    @classmethod
    def constant(cls, q, m=None) -> "MetricTuple":
        n = len(q)
        return cls(tuple(q for _ in range(n)), m)

    def is_rational(self) -> bool:
        return all(isinstance(x, int) for q in self.qs for r in q for x in r)

    def describe(self) -> str:
        return "; ".join(str([list(r) for r in q]) for q in self.qs)


def vertical_setup(q, gauge) -> MetricTuple:
    """Twist q by the vertical gauge: q_i = sigma_i^{-1}(q), with sigma_1 = id."""
    gauge = list(gauge)
    if not gauge[0].is_identity():
        raise DomainError("the first gauge element must be the identity")
    m = gauge[0].m
    qs = []
    for s in gauge:
        sinv = s.inverse()
        qs.append(tuple(tuple(galois_apply(sinv, x) for x in row) for row in q))
    return MetricTuple(tuple(qs), m if m > 1 else None)


def random_metric(n: int, p: int, rng: random.Random, bound: int = 9) -> tuple:
    """Random symmetric integer matrix whose determinant is a unit mod p."""
    while True:
        q = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                q[i][j] = q[j][i] = rng.randint(-bound, bound)
        if Matrix([[PadicScalar(make_context(p, 1), (v,)) for v in r] for r in q]).det().is_unit():
            return tuple(tuple(r) for r in q)


def random_metric_tuple(n: int, p: int, rng: random.Random, bound: int = 9) -> MetricTuple:
    return MetricTuple(tuple(random_metric(n, p, rng, bound) for _ in range(n)))


def _scalar_matrix(q, ctx: BaseContext) -> Matrix:
    return Matrix([[embed(x, ctx) for x in r] for r in q])


# ---------------------------------------------------------------------------
# the iteration, generic over entry type


def _half(k: int, p: int) -> int:
    return pow(2, -1, p**k)


def lc_iterate(A, B, Ainv, one: Matrix, p: int, N: int, trace=None):
    """Run the N-1 correction steps; entries may be RingElem or PadicScalar."""
    n = len(A)
    lams = [one for _ in range(n)]
    for nu in range(1, N):
        k = N - nu
        C = [(B[i] - lams[i].T * A[i] * lams[i]).div_p(nu) for i in range(n)]
        half = _half(k, p)
        for i in range(n):
            D = Matrix([[(C[i][j, kk] + C[j][i, kk] - C[kk][i, j]) * half for kk in range(n)] for j in range(n)])
            Z = Ainv[i].truncate(k) * D.T
            lams[i] = lams[i] + Z.mul_p(nu, N)
        if trace is not None:
            trace.append({"step": nu, "terms": sum(x.nterms() for L in lams for x in L.entries())
                          if hasattr(lams[0][0, 0], "nterms") else 0})
    return lams


# ---------------------------------------------------------------------------
# connections


@dataclass
class Connection:
    """Solved n-tuple: Lambda_i with cached A_i, B_i, on a ring or at a point."""

    metric: MetricTuple
    base: BaseContext
    N: int
    lams: list
    A: list
    B: list
    ring: PolyRing | None = None
    point: Matrix | None = None
    Ainv: list | None = None
    stats: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.metric.n

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def is_symbolic(self) -> bool:
        return self.ring is not None

    @property
    def lifts(self) -> list[FrobeniusLift]:
        if not self.is_symbolic:
            raise ValueError("point connections carry no lifts")
        if not hasattr(self, "_lifts"):
            self._lifts = [make_lift(L, self.ring) for L in self.lams]
        return self._lifts

    def verify_metric(self) -> bool:
        return all((L.T * A * L).equals(B) for L, A, B in zip(self.lams, self.A, self.B))

    def verify_torsion(self) -> bool:
        n = self.n
        T = [A * (L - 1) for A, L in zip(self.A, self.lams)]
        return all((T[i][k, j] - T[j][k, i]).is_zero() for i in range(n) for j in range(n) for k in range(n))

    def truncate(self, N: int) -> "Connection":
        return Connection(self.metric, self.base, N, [L.truncate(N) for L in self.lams],
                          [a.truncate(N) for a in self.A], [b.truncate(N) for b in self.B],
                          self.ring, self.point, None)


def _metric_scalars(metric: MetricTuple, ctx: BaseContext):
    qs = [_scalar_matrix(q, ctx) for q in metric.qs]
    for q in qs:
        if not q.det().is_unit():
            raise NotAUnit(f"det(q) is not a unit at p={ctx.p}")
    return qs


def ring_for(metric: MetricTuple, p: int, N: int) -> PolyRing:
    return gl_ring(make_context(p, N, metric.m), metric.n)


def build_AB(metric: MetricTuple, ring: PolyRing, N: int | None = None):
    """A_i = x^(p)t phi(q_i) x^(p) and B_i = (x^t q_i x)^(p) as ring matrices."""
    N = ring.base.N if N is None else N
    p = ring.p
    qs = _metric_scalars(metric, ring.base)
    x = ring.generic_matrix(N)
    P = x.pth_power(p)
    A, B = [], []
    for q in qs:
        qR = q.map(lambda c: ring.const(c, N))
        phq = q.map(lambda c: ring.const(frobenius_base(c), N))
        A.append(P.T * phq * P)
        B.append((x.T * qR * x).pth_power(p))
    return A, B, P, qs


def solve(metric: MetricTuple, N: int, ring: PolyRing | None = None) -> Connection:
    """Symbolic Levi-Civita n-tuple modulo p^N (ring defaults to GL_n over the metric's base)."""
    if ring is None:
        raise ValueError("pass a ring (see ring_for) or use solve_for")
    if N < 1:
        raise DomainError("N must be >= 1")
    if N > ring.base.N:
        raise DomainError(f"ring base precision {ring.base.N} < requested N={N}")
    A, B, P, qs = build_AB(metric, ring, N)
    Pinv = P.inverse()
    Ainv = []
    for q in qs:
        phinv = q.map(frobenius_base)
        phinv = Matrix([[ring.const(c, N) for c in r] for r in _inverse_scalar(phinv).rows])
        Ainv.append(Pinv * phinv * Pinv.T)
    one = ring_identity(ring, metric.n, N)
    stats: list = []
    lams = lc_iterate(A, B, Ainv, one, ring.p, N, stats)
    return Connection(metric, ring.base, N, lams, A, B, ring=ring, Ainv=Ainv, stats=stats)


def solve_for(metric: MetricTuple, p: int, N: int) -> Connection:
    return solve(metric, N, ring_for(metric, p, N))


def _inverse_scalar(M: Matrix) -> Matrix:
    return M.inverse()


# ---------------------------------------------------------------------------
# point backend


def random_point(ctx: BaseContext, n: int, rng: random.Random) -> Matrix:
    """Random matrix over the Galois ring with unit determinant."""
    mod = ctx.modulus
    while True:
        X = Matrix([[PadicScalar(ctx, [rng.randrange(mod) for _ in range(ctx.f)]) for _ in range(n)]
                    for _ in range(n)])
        if X.det().is_unit():
            return X


def identity_point(ctx: BaseContext, n: int) -> Matrix:
    return Matrix.identity(n, ctx.scalar(1), ctx.scalar(0))


def point_AB(metric: MetricTuple, X: Matrix):
    ctx = X[0, 0].ctx
    if not metric.is_rational():
        raise DomainError("point evaluation supports integer metrics only")
    p = ctx.p
    qs = [_scalar_matrix(q, ctx) for q in metric.qs]
    P = X.pth_power(p)
    A = [P.T * q * P for q in qs]
    B = [(X.T * q * X).pth_power(p) for q in qs]
    return A, B, qs


def solve_at_point(metric: MetricTuple, X: Matrix, N: int) -> Connection:
    """The Levi-Civita tuple evaluated at a point X of GL_n over a Galois ring (integer metrics)."""
    ctx = X[0, 0].ctx
    X = X.truncate(N)
    A, B, qs = point_AB(metric, X)
    Ainv = [a.inverse() for a in A]
    one = identity_point(ctx, metric.n).truncate(N)
    lams = lc_iterate(A, B, Ainv, one, ctx.p, N)
    return Connection(metric, ctx, N, lams, A, B, point=X, Ainv=Ainv)


def point_context(p: int, N: int, r: int = 2) -> BaseContext:
    return galois_ring(p, N, r)


# ---------------------------------------------------------------------------
# Christoffel symbols and the congruences they satisfy


def christoffel(conn: Connection) -> list:
    """Gamma_i = (1/p)(Lambda_i^t - 1) A_i, at precision N - 1."""
    out = []
    for L, A in zip(conn.lams, conn.A):
        out.append(((L.T - 1) * A).div_p(1))
    return out


def christoffel_via_delta(conn: Connection) -> list:
    """Gamma_i = Delta_i^t (x^(p)t)^{-1} A_i with Delta_i = x^(p)(Lambda_i - 1)/p (symbolic only)."""
    R = conn.ring
    x = R.generic_matrix(conn.N)
    P = x.pth_power(R.p)
    PinvT = P.inverse().T
    out = []
    for L, A in zip(conn.lams, conn.A):
        Delta = (P * (L - 1)).div_p(1)
        out.append(Delta.T * PinvT.truncate(conn.N - 1) * A.truncate(conn.N - 1))
    return out


def christoffel_symmetric(gammas) -> bool:
    n = len(gammas)
    return all((gammas[i][j, k] - gammas[j][i, k]).is_zero() for i in range(n) for j in range(n) for k in range(n))


def c_matrices(conn: Connection) -> list:
    """C_i = -x^(p)t dq_i x^(p) + (1/p)[(x^t q_i x)^(p) - x^(p)t q_i^(p) x^(p)], precision N - 1."""
    p = conn.p
    N = conn.N
    out = []
    if conn.is_symbolic:
        R = conn.ring
        x = R.generic_matrix(N)
        qs = _metric_scalars(conn.metric, conn.base)
        conv = lambda c, k: R.const(c, k)  # noqa: E731
    else:
        x = conn.point
        ctx = conn.base
        qs = [_scalar_matrix(q, ctx) for q in conn.metric.qs]
        conv = lambda c, k: c.truncate(k)  # noqa: E731
    P = x.pth_power(p)
    for q, B in zip(qs, conn.B):
        dq = q.map(lambda c: conv(p_derivation_base(c.truncate(N)), N - 1))
        qp = q.map(lambda c: conv(c.truncate(N) ** p, N))
        second = (B - P.T * qp * P).div_p(1)
        out.append(second - P.truncate(N - 1).T * dq * P.truncate(N - 1))
    return out


def delta_q(conn: Connection) -> list:
    N = conn.N
    return [_scalar_matrix(q, conn.base).map(lambda c: p_derivation_base(c.truncate(N))) for q in conn.metric.qs]


@dataclass
class CongruenceReport:
    name: str
    table: dict
    detail: str = ""
    witness: str = ""

    @property
    def passed(self) -> bool:
        return all(self.table.values())

    def failures(self):
        return [k for k, v in self.table.items() if not v]


def _residue_at_identity(e):
    """Residue mod (p, x-1) of a RingElem or of a point value already at the identity."""
    if isinstance(e, RingElem):
        return reduce_mod_p_and_x1(e)
    return e.truncate(1)


def verify_congruence_christoffel(conn: Connection, at_identity: Connection | None = None) -> list:
    """Both Christoffel congruences, per (i, j, k).

    For a symbolic connection the mod p check is an identity in the ring and
    the mod (p, x-1) check substitutes x = 1.  For a point connection the mod p
    check holds at that point; the mod (p, x-1) check needs the connection
    evaluated at the identity (pass it as at_identity).
    """
    n = conn.n
    p = conn.p
    G = christoffel(conn)
    C = c_matrices(conn)
    half1 = _half(1, p)
    t1 = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                rhs = (C[i][j, k] + C[j][i, k] - C[k][i, j]) * half1
                t1[(i + 1, j + 1, k + 1)] = (G[i][j, k] - rhs).truncate(1).is_zero()
    reports = [CongruenceReport("christoffel_mod_p", t1)]
    ident = conn if (conn.is_symbolic or at_identity is None) else at_identity
    if conn.is_symbolic or at_identity is not None:
        G1 = christoffel(ident) if ident is not conn else G
        dq = delta_q(ident)
        t2 = {}
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    rhs = (dq[i][j, k] + dq[j][i, k] - dq[k][i, j]).truncate(1) * (p - half1)
                    lhs = _residue_at_identity(G1[i][j, k])
                    t2[(i + 1, j + 1, k + 1)] = lhs == rhs
        reports.append(CongruenceReport("christoffel_mod_p_x1", t2))
    return reports


def verify_vertical_congruences(q, gauge, p: int, N: int = 2) -> list:
    """Vertical congruences: twist by the gauge, solve at the chosen prime, check both congruences."""
    metric = vertical_setup(q, gauge)
    conn = solve_for(metric, p, N)
    return verify_congruence_christoffel(conn)


# ---------------------------------------------------------------------------
# determinant and trace of Lambda modulo the center / torus ideal


def _situation_map(ring: PolyRing, situation: str):
    n = ring.n
    if situation == "center":
        T = laurent_ring(ring.base, ("a",))
        a = T.var(0)
        images = [a if i == j else T.zero() for i in range(n) for j in range(n)]
    elif situation == "torus":
        T = laurent_ring(ring.base, tuple(f"a{i + 1}" for i in range(n)))
        images = [T.var(i) if i == j else T.zero() for i in range(n) for j in range(n)]
    else:
        raise DomainError(f"unknown situation {situation!r}")
    return SubstitutionMap(ring, T, images)


def verify_det_lambda(conn: Connection, situation: str) -> list:
    """tr((x^(p))^{-1} Delta) = -1/2 tr((q^(p))^{-1} dq) mod (p, J), and the det(Lambda) formula mod J."""
    if not conn.is_symbolic:
        raise DomainError("det/trace congruences need a symbolic connection")
    R = conn.ring
    p, N, n = conn.p, conn.N, conn.n
    qs = _metric_scalars(conn.metric, conn.base)
    if situation == "torus":
        for q in qs:
            if any(not q[i, j].is_zero() for i in range(n) for j in range(n) if i != j):
                raise DomainError("torus situation needs diagonal q")
    h = _situation_map(R, situation)
    trace_table, det_table = {}, {}
    for i, (q, L) in enumerate(zip(qs, conn.lams)):
        W = (L - 1).div_p(1)
        trW = W[0, 0]
        for j in range(1, n):
            trW = trW + W[j, j]
        lhs = apply_hom(h, trW).truncate(1)
        dq = q.map(lambda c: p_derivation_base(c))
        qp = q.map(lambda c: c**p)
        M = qp.inverse().truncate(N - 1) * dq
        tr = M[0, 0]
        for j in range(1, n):
            tr = tr + M[j, j]
        rhs = tr.truncate(1) * (p - _half(1, p))
        trace_table[i + 1] = (lhs - h.target.const(rhs, 1)).is_zero()
        detL = apply_hom(h, L.det())
        if situation == "torus" and conn.metric.is_rational():
            dqv = 1
            for j in range(n):
                dqv *= conn.metric.qs[i][j][j]
            expected = conn.base.scalar(legendre(dqv, p) * pow(dqv, (p - 1) // 2, p**N), N)
        else:
            # det(1 + p (q^(p))^{-1} dq)^{-1/2}; the square root is the branch = 1 mod p
            inner = (qp.inverse().truncate(N - 1) * dq).mul_p(1, N) + 1
            dv = inner.det()
            expected = binomial_series(dv - 1, Fraction(-1, 2), N, p**N, conn.base.scalar(1, N))
        det_table[i + 1] = (detL - h.target.const(expected, N)).is_zero()
    return [CongruenceReport(f"trace_{situation}", trace_table),
            CongruenceReport(f"det_{situation}", det_table)]


# ---------------------------------------------------------------------------
# n = 1


def closed_form_n1(d, p: int, N: int, m: int | None = None) -> PadicScalar:
    """(d^p / phi(d))^{1/2} with the square root = 1 mod p."""
    ctx = make_context(p, N, m)
    dd = embed(d, ctx)
    return sqrt_unit(dd**p * frobenius_base(dd).inverse())


def closed_form_n1_series(d, p: int, N: int, m: int | None = None) -> PadicScalar:
    """The same value from the series (1 + p dd/d^p)^{-1/2}."""
    ctx = make_context(p, N, m)
    dd = embed(d, ctx)
    h = p_derivation_base(dd) * (dd.truncate(N - 1) ** p).inverse()
    return binomial_series(h.mul_p(1, N), Fraction(-1, 2), N, p**N, ctx.scalar(1))


def closed_form_n1_legendre(d: int, p: int, N: int) -> PadicScalar:
    """(d/p) d^{(p-1)/2} for d in Z_p^x."""
    return make_context(p, N).scalar(legendre(d, p) * pow(d, (p - 1) // 2, p**N))

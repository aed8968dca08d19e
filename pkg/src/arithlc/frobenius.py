"""Frobenius lifts x -> x^(p) Lambda on localized coordinate rings.

A lift is stored through its per-variable defects Delta_v, where the image of
a variable v is v^p + p*Delta_v.  Applying the lift to a polynomial g uses the
Hasse-derivative expansion

    g^sigma(v^p + p Delta) = sum_alpha p^|alpha| (H^alpha g^sigma)(v^p) Delta^alpha,

truncated at |alpha| < precision, where sigma is the base Frobenius on
coefficients.  (H^alpha g)(v^p) is an exponent inflation, so the expensive
part is confined to low powers of Delta, each needed only to the precision
left after the p^|alpha| factor.
"""

from __future__ import annotations

import itertools
from math import comb

from .coordring import Matrix, PolyRing, RingElem, ring_identity
from .errors import PrecisionUnderflow, UnsupportedIdeal


def _multi_indices(nvars: int, max_order: int):
    out = []
    for total in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            a = [0] * nvars
            for v in combo:
                a[v] += 1
            out.append(tuple(a))
    return out


def hasse_table(R: PolyRing, num, k: int, max_order: int) -> dict:
    """All Hasse derivatives H^alpha of a numerator tuple with |alpha| <= max_order."""
    alphas = _multi_indices(R.nvars, max_order)
    table = {a: [dict() for _ in range(R.f)] for a in alphas}
    mod = R.p**k
    for t_idx, comp in enumerate(num):
        for e, c in comp.terms():
            c = int(c)
            for a in alphas:
                coef = c
                ok = True
                for ev, av in zip(e, a):
                    if av > ev:
                        ok = False
                        break
                    if av:
                        coef *= comb(ev, av)
                if ok and coef % mod:
                    key = tuple(ev - av for ev, av in zip(e, a))
                    d = table[a][t_idx]
                    d[key] = (d.get(key, 0) + coef) % mod
    return {a: R._from_int_comps(tuple(comps), k) for a, comps in table.items()
            if any(comps)}


class FrobeniusLift:
    """Ring endomorphism lifting Frobenius: v -> v^p + p*Delta_v, coefficients by the base Frobenius."""

    def __init__(self, ring: PolyRing, deltas, lam: Matrix | None = None):
        if len(deltas) != ring.nvars:
            raise ValueError("one defect per variable required")
        self.ring = ring
        self.deltas = list(deltas)
        self.lam = lam
        self.prec = min(d.prec for d in self.deltas) + 1
        self._dpow: dict = {}
        self._gen_inv: dict = {}

    # construction -----------------------------------------------------------
    @classmethod
    def from_images(cls, ring: PolyRing, images, lam=None) -> "FrobeniusLift":
        p = ring.p
        deltas = []
        for v, y in zip(ring.gens(), images):
            diff = y - v.truncate(y.prec) ** p
            if not diff.is_zero_mod_p():
                raise ValueError("image does not reduce to the p-th power map")
            deltas.append(diff.div_p(1))
        return cls(ring, deltas, lam)

    def images(self, k: int | None = None):
        k = self.prec if k is None else min(k, self.prec)
        p = self.ring.p
        return [v.truncate(k) ** p + d.mul_p(1, k) for v, d in zip(self.ring.gens(k), self.deltas)]

    # application ------------------------------------------------------------
    def _delta_power(self, alpha, k):
        key = (alpha, k)
        hit = self._dpow.get(key)
        if hit is not None:
            return hit
        if sum(alpha) == 0:
            hit = self.ring.one(k)
        else:
            v = next(i for i, a in enumerate(alpha) if a)
            lower = list(alpha)
            lower[v] -= 1
            hit = self._delta_power(tuple(lower), k) * self.deltas[v].truncate(k)
        self._dpow[key] = hit
        return hit

    def _apply_num(self, num, k) -> RingElem:
        R = self.ring
        p = R.p
        sig = R._tfrob(num, k)
        table = hasse_table(R, sig, k, k - 1)
        infl = [p] * R.nvars
        acc = None
        for alpha, h in sorted(table.items(), key=lambda t: (sum(t[0]), t[0])):
            order = sum(alpha)
            inflated = tuple(c.inflate(infl) for c in h)
            if order == 0:
                term = R.elem(inflated, k)
            else:
                low = k - order
                dp = self._delta_power(alpha, low)
                term = (R.elem(R._convert(inflated, k, low), low) * dp).mul_p(order, k)
            acc = term if acc is None else acc + term
        return acc if acc is not None else R.zero(k)

    def _gen_image_inverse(self, idx, k):
        key = (idx, k)
        hit = self._gen_inv.get(key)
        if hit is None:
            hit = self._apply_num(self.ring.gen_num(idx, k), k).inverse()
            self._gen_inv[key] = hit
        return hit

    def apply(self, f):
        if isinstance(f, Matrix):
            return f.map(self.apply)
        if not isinstance(f, RingElem):
            raise TypeError("apply expects a RingElem or Matrix")
        k = min(f.prec, self.prec)
        g = f.truncate(k)
        out = self._apply_num(g.num, k)
        for idx, e in g.den:
            out = out * self._gen_image_inverse(idx, k) ** e
        return out

    __call__ = apply


def make_lift(lam: Matrix, ring: PolyRing) -> FrobeniusLift:
    """Lift with x -> x^(p) Lambda on GL_n; Lambda must be congruent to 1 mod p."""
    n = ring.n
    ident = ring_identity(ring, n)
    for a, b in zip(lam.entries(), ident.entries()):
        if not (a - b).is_zero_mod_p():
            raise ValueError("Lambda is not congruent to the identity mod p")
    p = ring.p
    k = min(x.prec for x in lam.entries())
    x = ring.generic_matrix(k)
    P = x.pth_power(p)
    W = (lam - ident).div_p(1)
    delta = P.truncate(k - 1) * W
    return FrobeniusLift(ring, delta.entries(), lam)


def make_gl1c_lift(u: RingElem, v: RingElem) -> FrobeniusLift:
    """Lift on the conformal group: [[a,b],[-b,a]] -> [[a^p,b^p],[-b^p,a^p]] [[u,v],[-v,u]]."""
    R = u.ring
    p = R.p
    k = min(u.prec, v.prec)
    a, b = R.gens(k)
    ap, bp = a**p, b**p
    images = [ap * u - bp * v, ap * v + bp * u]
    lam = Matrix([[u, v], [-v, u]])
    return FrobeniusLift.from_images(R, images, lam)


def trivial_lift(ring: PolyRing, k: int | None = None) -> FrobeniusLift:
    k = ring.base.N if k is None else k
    if k < 2:
        raise PrecisionUnderflow("a lift needs precision >= 2")
    return FrobeniusLift(ring, [ring.zero(k - 1) for _ in range(ring.nvars)])


def compose_apply(L1: FrobeniusLift, L2: FrobeniusLift, f):
    """L1(L2(f))."""
    return L1.apply(L2.apply(f))


def p_derivation_ring(L: FrobeniusLift, f: RingElem) -> RingElem:
    """(L(f) - f^p)/p."""
    k = min(f.prec, L.prec)
    if k < 2:
        raise PrecisionUnderflow("need precision >= 2")
    g = f.truncate(k)
    return (L.apply(g) - g ** L.ring.p).div_p(1)


# ---------------------------------------------------------------------------
# horizontality for the two supported ideals


def _gl1c_quotient_is_zero(f: RingElem) -> bool:
    """Is f zero in the ring modulo a^2 + b^2 - 1 (denominators are units there)?"""
    R = f.ring
    k = f.prec
    ctx = R.ctx(k)
    a, b = ctx.gens()
    one_minus_b2 = 1 - b * b
    for comp in f.num:
        even, odd = {}, {}
        for (ea, eb), c in comp.terms():
            target = even if ea % 2 == 0 else odd
            key = (ea // 2, eb)
            target[key] = (target.get(key, 0) + int(c))
        for part in (even, odd):
            if part and not ctx.from_dict(part).compose(one_minus_b2, b).is_zero():
                return False
    return True


def conformal_restriction(ring: PolyRing, target: PolyRing):
    """Substitution GL_2 -> conformal group: x11=x22=a, x12=b, x21=-b."""
    from .coordring import SubstitutionMap

    a, b = target.gens()
    return SubstitutionMap(ring, target, [a, b, -b, a])


def _same(gens, expected):
    if len(gens) != len(expected):
        return False
    return all(g.equals(e) for g, e in zip(gens, expected))


def check_horizontal(L: FrobeniusLift, ideal_generators, conformal_ring: PolyRing | None = None) -> bool:
    """True iff L maps the ideal into itself.

    Supported: (x11 - x22, x12 + x21) on GL_2, decided on the parametrization
    x = [[a, b], [-b, a]]; and (a^2 + b^2 - 1) on the conformal group, decided
    in the quotient by that relation.
    """
    R = L.ring
    if R.kind == "gl" and R.n == 2:
        x11, x12, x21, x22 = R.gens()
        if not _same(ideal_generators, [x11 - x22, x12 + x21]):
            raise UnsupportedIdeal("only (x11 - x22, x12 + x21) is supported on GL_2")
        from .coordring import gl1c_ring, apply_hom

        G = conformal_ring if conformal_ring is not None else gl1c_ring(R.base)
        res = conformal_restriction(R, G)
        return all(apply_hom(res, L.apply(g.truncate(L.prec))).is_zero() for g in ideal_generators)
    if R.kind == "gl1c":
        a, b = R.gens()
        if not _same(ideal_generators, [a * a + b * b - 1]):
            raise UnsupportedIdeal("only (a^2 + b^2 - 1) is supported on the conformal group")
        return all(_gl1c_quotient_is_zero(L.apply(g.truncate(L.prec))) for g in ideal_generators)
    raise UnsupportedIdeal(f"no horizontality test for ring kind {R.kind}")

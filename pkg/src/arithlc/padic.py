"""Truncated p-adic scalars over Z_p and over unramified cyclotomic completions.

The completion of Z[zeta_m] at a prime above p is modelled as
(Z/p^N)[t]/(g) where g is one monic irreducible factor of the m-th
cyclotomic polynomial modulo p, Hensel-lifted to modulus p^N.  The base
Frobenius fixes Z_p and sends t to the unique root of g that is congruent to
t^p modulo p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import sympy

from .errors import DomainError, NotAUnit, PrecisionUnderflow

# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, low degree first)


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a, b, mod=None):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    if mod is not None:
        out = [c % mod for c in out]
    return _trim(out)


def _pscale(a, c, mod=None):
    out = [c * x for x in a]
    if mod is not None:
        out = [x % mod for x in out]
    return _trim(out)


def _pmul(a, b, mod=None):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    if mod is not None:
        out = [c % mod for c in out]
    return _trim(out)


def _pdivmod_monic(a, g, mod=None):
    """Divide by a monic polynomial g; exact over any coefficient ring."""
    a = list(a)
    dg = len(g) - 1
    if len(a) <= dg:
        return [], _trim([c % mod for c in a] if mod else a)
    q = [0] * (len(a) - dg)
    for k in range(len(a) - 1, dg - 1, -1):
        c = a[k] % mod if mod else a[k]
        if c:
            q[k - dg] = c
            for j in range(dg + 1):
                a[k - dg + j] -= c * g[j]
    r = a[:dg]
    if mod is not None:
        r = [c % mod for c in r]
        q = [c % mod for c in q]
    return _trim(q), _trim(r)


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m: int) -> tuple[int, ...]:
    t = sympy.Symbol("t")
    poly = sympy.Poly(sympy.cyclotomic_poly(m, t), t)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


# ---------------------------------------------------------------------------
# base context


@dataclass(frozen=True)
class BaseContext:
    """Defines the truncated complete base ring; immutable once built."""

    p: int
    N: int
    m: int | None
    g: tuple[int, ...]
    frob_image: tuple[int, ...]
    frob_powers: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def f(self) -> int:
        return len(self.g) - 1

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def is_rational(self) -> bool:
        return self.f == 1 and self.m is None

    def scalar(self, value, prec: int | None = None) -> "PadicScalar":
        return PadicScalar.from_int(self, value, prec)

    def t(self) -> "PadicScalar":
        if self.f == 1:
            return PadicScalar(self, ((-self.g[0]) % self.modulus,), self.N)
        return PadicScalar(self, (0, 1) + (0,) * (self.f - 2), self.N)

    def describe(self) -> str:
        kind = "rational" if self.m is None else f"cyclotomic m={self.m}"
        return f"p={self.p} N={self.N} {kind} g={list(self.g)}"


def _mul_mod_g(a, b, g, mod):
    _, r = _pdivmod_monic(_pmul(a, b), g, mod)
    return r


def _residue_inverse(a, g, p):
    """Inverse of a in F_p[t]/(g mod p)."""
    t = sympy.Symbol("t")
    pa = sympy.Poly(list(reversed([c % p for c in a])) or [0], t, modulus=p)
    pg = sympy.Poly(list(reversed([c % p for c in g])), t, modulus=p)
    if pa.is_zero:
        raise NotAUnit("zero residue")
    s, _, h = pa.gcdex(pg)
    if h.degree() != 0:
        raise NotAUnit("residue shares a factor with g")
    hinv = pow(int(h.all_coeffs()[0]) % p, -1, p)
    return [(int(c) * hinv) % p for c in reversed(s.all_coeffs())]


def _hensel_factor(F, g0, p, N):
    """Lift a monic factor g0 of F mod p to a factor of F mod p^N."""
    h0, r = _pdivmod_monic(F, g0, p)
    assert not r, "g0 does not divide F mod p"
    t = sympy.Symbol("t")
    P = lambda a: sympy.Poly(list(reversed(a)) or [0], t, modulus=p)  # noqa: E731
    s_, t_, one = P(g0).gcdex(P(h0))
    assert one.degree() == 0
    inv = pow(int(one.all_coeffs()[0]) % p, -1, p)
    s = [(int(c) * inv) % p for c in reversed(s_.all_coeffs())]
    tt = [(int(c) * inv) % p for c in reversed(t_.all_coeffs())]
    g, h = list(g0), list(h0)
    for k in range(1, N):
        pk = p**k
        err = _padd(F, _pscale(_pmul(g, h), -1), p ** (k + 1))
        assert all(c % pk == 0 for c in err)
        e = [(c // pk) % p for c in err]
        _, a = _pdivmod_monic(_pmul(tt, e, p), g0, p)
        b, rem = _pdivmod_monic(_padd(e, _pscale(_pmul(a, h0), -1), p), g0, p)
        assert not rem
        g = _padd(g, _pscale(a, pk))
        h = _padd(h, _pscale(b, pk))
    mod = p**N
    return [c % mod for c in g]


def _frobenius_root(g, p, N):
    """Root of g in (Z/p^N)[t]/(g) congruent to t^p, by Newton iteration."""
    mod = p**N
    f = len(g) - 1
    if f == 1:
        # the root is the constant -g0; Frobenius acts trivially on Z_p
        return [(-g[0]) % mod]
    _, F = _pdivmod_monic([0] * p + [1], g, mod)
    dg = [(k * g[k]) % mod for k in range(1, len(g))]

    def evaluate(poly, x):
        acc = []
        for c in reversed(poly):
            acc = _padd(_mul_mod_g(acc, x, g, mod), [c], mod)
        return acc

    for _ in range(N.bit_length() + 1):
        val = evaluate(g, F)
        if not val:
            break
        der = evaluate(dg, F)
        inv = _unit_inverse_raw(der, g, p, N)
        F = _padd(F, _pscale(_mul_mod_g(val, inv, g, mod), -1), mod)
    assert not evaluate(g, F)
    return F


def _unit_inverse_raw(a, g, p, N):
    mod = p**N
    w = _residue_inverse(a, g, p)
    for _ in range(N.bit_length() + 1):
        aw = _mul_mod_g(a, w, g, mod)
        w = _mul_mod_g(w, _padd([2], _pscale(aw, -1), mod), g, mod)
    return w


@lru_cache(maxsize=None)
def make_context(p: int, N: int, m: int | None = None) -> BaseContext:
    """Build the base ring Z/p^N (m=None) or the completion of Z[zeta_m] at p.

    The prime above p is fixed by choosing the irreducible factor of the
    cyclotomic polynomial mod p whose negated lower coefficients form the
    lexicographically smallest tuple; for linear factors this is the smallest
    root.
    """
    if p == 2:
        raise DomainError("p must be odd")
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime")
    if N < 1:
        raise DomainError("precision N must be at least 1")
    mod = p**N
    if m is None:
        g = (0, 1)
        frob = (0,)
    else:
        if m < 1:
            raise DomainError("conductor must be positive")
        if m % p == 0:
            raise DomainError(f"p={p} divides m={m}: ramified")
        F = list(cyclotomic_coeffs(m))
        t = sympy.Symbol("t")
        _, factors = sympy.Poly(list(reversed(F)), t, modulus=p).factor_list()
        cands = []
        for fac, _mult in factors:
            co = [int(c) % p for c in reversed(fac.all_coeffs())]
            lead_inv = pow(co[-1], -1, p)
            co = [(c * lead_inv) % p for c in co]
            cands.append(co)
        cands.sort(key=lambda co: tuple((-c) % p for c in co[:-1]))
        g = tuple(_hensel_factor(F, cands[0], p, N))
        frob = tuple(_frobenius_root(list(g), p, N))
    f = len(g) - 1
    frob = tuple(list(frob) + [0] * (f - len(frob)))
    powers = []
    cur = [1]
    for _ in range(f):
        powers.append(tuple(list(cur) + [0] * (f - len(cur))))
        cur = _mul_mod_g(cur, list(frob), list(g), mod)
    return BaseContext(p, N, m, g, frob, tuple(powers))


def galois_ring(p: int, M: int, r: int = 2) -> BaseContext:
    """Unramified extension of Z/p^M of degree r (a Galois ring), used for point evaluation."""
    return make_context(p, M, p**r - 1)


# ---------------------------------------------------------------------------
# scalars


class PadicScalar:
    """Element of the truncated base ring; arithmetic is exact mod p^prec."""

    __slots__ = ("ctx", "coeffs", "prec")

    def __init__(self, ctx: BaseContext, coeffs, prec: int | None = None):
        prec = ctx.N if prec is None else prec
        if prec < 0:
            raise PrecisionUnderflow("negative precision")
        mod = ctx.p**prec
        co = [int(c) % mod for c in coeffs]
        co += [0] * (ctx.f - len(co))
        if len(co) != ctx.f:
            raise ValueError("coefficient vector longer than deg g")
        self.ctx = ctx
        self.coeffs = tuple(co)
        self.prec = prec

    @classmethod
    def from_int(cls, ctx, value, prec=None):
        return cls(ctx, (int(value),), prec)

    # coercion ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.ctx != self.ctx:
                raise ValueError("context mismatch")
            return other
        if isinstance(other, int):
            return PadicScalar(self.ctx, (other,), self.prec)
        if isinstance(other, Fraction):
            return PadicScalar.from_fraction(self.ctx, other, self.prec)
        return NotImplemented

    @classmethod
    def from_fraction(cls, ctx, q: Fraction, prec=None):
        prec = ctx.N if prec is None else prec
        mod = ctx.p**prec
        if q.denominator % ctx.p == 0:
            raise NotAUnit(f"denominator of {q} divisible by p")
        return cls(ctx, ((q.numerator * pow(q.denominator, -1, mod)) % mod,), prec)

    @property
    def modulus(self) -> int:
        return self.ctx.p**self.prec

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        return PadicScalar(self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)], prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.ctx, [-a for a in self.coeffs], self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        mod = self.ctx.p**prec
        if self.ctx.f == 1:
            return PadicScalar(self.ctx, ((self.coeffs[0] * other.coeffs[0]) % mod,), prec)
        r = _mul_mod_g(list(self.coeffs), list(other.coeffs), list(self.ctx.g), mod)
        return PadicScalar(self.ctx, r, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicScalar(self.ctx, (1,), self.prec)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        mod = self.ctx.p ** min(self.prec, other.prec)
        return all((a - b) % mod == 0 for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.coeffs, self.prec))

    def __repr__(self):
        if self.ctx.f == 1:
            return f"{self.coeffs[0]} (mod {self.ctx.p}^{self.prec})"
        return f"{list(self.coeffs)} (mod {self.ctx.p}^{self.prec})"

    # structure -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        """p-adic valuation, capped at the precision."""
        if self.is_zero():
            return self.prec
        v = 0
        p = self.ctx.p
        while all(c % p ** (v + 1) == 0 for c in self.coeffs):
            v += 1
        return v

    def truncate(self, prec: int) -> "PadicScalar":
        return PadicScalar(self.ctx, self.coeffs, min(prec, self.prec))

    def lift(self, ctx: BaseContext) -> "PadicScalar":
        """Reinterpret the stored integers in a context of the same g at another precision."""
        return PadicScalar(ctx, self.coeffs, min(ctx.N, self.prec))

    def residue(self) -> tuple[int, ...]:
        p = self.ctx.p
        return tuple(c % p for c in self.coeffs)

    def is_unit(self) -> bool:
        try:
            _residue_inverse(list(self.coeffs), list(self.ctx.g), self.ctx.p)
        except NotAUnit:
            return False
        return True

    def inverse(self) -> "PadicScalar":
        if self.prec == 0:
            return self
        if self.ctx.f == 1:
            c = self.coeffs[0]
            if c % self.ctx.p == 0:
                raise NotAUnit(f"{c} is divisible by p")
            return PadicScalar(self.ctx, (pow(c, -1, self.modulus),), self.prec)
        w = _unit_inverse_raw(list(self.coeffs), list(self.ctx.g), self.ctx.p, self.prec)
        return PadicScalar(self.ctx, w, self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def div_p(self, k: int = 1) -> "PadicScalar":
        """Exact division by p^k; the result has precision prec - k."""
        if k > self.prec:
            raise PrecisionUnderflow("division by p exceeds precision")
        pk = self.ctx.p**k
        if any(c % pk for c in self.coeffs):
            from .errors import ExactDivisionFailure

            raise ExactDivisionFailure(f"{self!r} not divisible by p^{k}")
        return PadicScalar(self.ctx, [c // pk for c in self.coeffs], self.prec - k)

    def mul_p(self, k: int = 1, prec: int | None = None) -> "PadicScalar":
        """Multiply by p^k, gaining k digits of precision (capped by prec or ctx.N)."""
        target = min(self.prec + k, self.ctx.N if prec is None else prec)
        pk = self.ctx.p**k
        return PadicScalar(self.ctx, [c * pk for c in self.coeffs], target)


def frobenius_base(a: PadicScalar) -> PadicScalar:
    """Base Frobenius: identity on Z_p, t -> frob_image."""
    ctx = a.ctx
    if ctx.f == 1:
        return a
    mod = a.modulus
    out = [0] * ctx.f
    for k, c in enumerate(a.coeffs):
        if c:
            row = ctx.frob_powers[k]
            for j in range(ctx.f):
                out[j] += c * row[j]
    return PadicScalar(ctx, [x % mod for x in out], a.prec)


def p_derivation_base(a: PadicScalar) -> PadicScalar:
    """Fermat-quotient derivation (phi(a) - a^p)/p, precision drops by one."""
    if a.prec < 2:
        raise PrecisionUnderflow("need precision >= 2 for the p-derivation")
    return (frobenius_base(a) - a ** a.ctx.p).div_p(1)


def legendre(d: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    if d % p == 0:
        raise DomainError(f"p={p} divides d={d}")
    r = pow(d % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


# ---------------------------------------------------------------------------
# binomial series, generic over any ring element type


def binomial_coeffs(exponent: Fraction, terms: int, modulus: int) -> list[int]:
    """binom(exponent, k) mod modulus for k < terms; denominators must be prime to modulus."""
    out = []
    c = Fraction(1)
    for k in range(terms):
        out.append((c.numerator * pow(c.denominator, -1, modulus)) % modulus)
        c = c * (exponent - k) / (k + 1)
    return out


def binomial_series(h, exponent: Fraction, terms: int, modulus: int, one):
    """sum_{k<terms} binom(exponent, k) h^k, for h topologically nilpotent (h = 0 mod p)."""
    coeffs = binomial_coeffs(Fraction(exponent), terms, modulus)
    acc = one * coeffs[0]
    power = one
    for k in range(1, terms):
        power = power * h
        if coeffs[k]:
            acc = acc + power * coeffs[k]
    return acc


def sqrt_unit(u: PadicScalar) -> PadicScalar:
    """Square root congruent to 1 mod p of a scalar congruent to 1 mod p."""
    p = u.ctx.p
    h = u - 1
    if any(c % p for c in h.coeffs):
        raise NotAUnit("sqrt_unit needs u = 1 mod p")
    one = PadicScalar(u.ctx, (1,), u.prec)
    return binomial_series(h, Fraction(1, 2), u.prec, u.modulus, one)


def sqrt_minus_one(ctx: BaseContext) -> PadicScalar:
    """sqrt(-1) in the base: t itself when m = 4, else the Hensel lift of the smaller root."""
    p = ctx.p
    if ctx.m == 4:
        return ctx.t()
    if ctx.f != 1:
        raise DomainError("no canonical square root of -1 in this base")
    if p % 4 != 1:
        raise DomainError(f"-1 is not a square mod {p}")
    r = min(x for x in range(1, p) if (x * x + 1) % p == 0)
    s = PadicScalar(ctx, (r,))
    for _ in range(ctx.N.bit_length() + 1):
        s = s - (s * s + 1) * (s * 2).inverse()
    return s


# ---------------------------------------------------------------------------
# exact cyclotomic integers and their Galois action


@dataclass(frozen=True)
class CyclotomicInt:
    """Exact element of Z[zeta_m], stored reduced modulo the m-th cyclotomic polynomial."""

    m: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_list(cls, m: int, coeffs) -> "CyclotomicInt":
        F = list(cyclotomic_coeffs(m))
        _, r = _pdivmod_monic([int(c) for c in coeffs], F)
        r = list(r) + [0] * (len(F) - 1 - len(r))
        return cls(m, tuple(r))

    @classmethod
    def zeta(cls, m: int) -> "CyclotomicInt":
        return cls.from_list(m, [0, 1])

    def _coerce(self, other):
        if isinstance(other, CyclotomicInt):
            if other.m != self.m:
                raise ValueError("conductor mismatch")
            return other
        if isinstance(other, int):
            return CyclotomicInt.from_list(self.m, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return CyclotomicInt(self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInt(self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        return CyclotomicInt.from_list(self.m, _pmul(list(self.coeffs), list(other.coeffs)))

    __rmul__ = __mul__

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self):
        terms = [f"{c}*z^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class GaloisElement:
    """The automorphism zeta -> zeta^a of Q(zeta_m)."""

    a: int
    m: int

    def __post_init__(self):
        if gcd(self.a, self.m) != 1:
            raise DomainError(f"gcd({self.a}, {self.m}) != 1")
        object.__setattr__(self, "a", self.a % self.m if self.m > 1 else 1)

    @classmethod
    def identity(cls, m: int) -> "GaloisElement":
        return cls(1, m)

    def inverse(self) -> "GaloisElement":
        return GaloisElement(pow(self.a, -1, self.m) if self.m > 1 else 1, self.m)

    def __matmul__(self, other: "GaloisElement") -> "GaloisElement":
        return GaloisElement(self.a * other.a, self.m)

    def is_identity(self) -> bool:
        return self.a % self.m == 1 % self.m


def galois_apply(sigma: GaloisElement, a):
    """zeta -> zeta^sigma.a on an exact cyclotomic integer (integers are fixed)."""
    if isinstance(a, int):
        return a
    if sigma.m != a.m:
        raise ValueError("conductor mismatch")
    out = [0] * a.m
    for k, c in enumerate(a.coeffs):
        out[(k * sigma.a) % a.m] += c
    return CyclotomicInt.from_list(a.m, out)


def embed(a, ctx: BaseContext) -> PadicScalar:
    """Send an exact cyclotomic integer (or int) into the completion, zeta -> t."""
    if isinstance(a, int):
        return PadicScalar.from_int(ctx, a)
    if ctx.m != a.m:
        raise ValueError(f"conductor mismatch: {a.m} vs context {ctx.m}")
    t = ctx.t()
    acc = PadicScalar(ctx, (0,))
    for c in reversed(a.coeffs):
        acc = acc * t + c
    return acc

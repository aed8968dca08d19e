from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithlc.errors import DomainError, NotAUnit, PrecisionUnderflow
from arithlc.padic import (CyclotomicInt, GaloisElement, PadicScalar, binomial_series, embed, frobenius_base,
                           galois_apply, galois_ring, legendre, make_context, p_derivation_base, sqrt_minus_one,
                           sqrt_unit)

CTXS = [make_context(3, 4), make_context(5, 3), make_context(3, 3, 4), make_context(5, 3, 4), galois_ring(7, 3, 2)]


@st.composite
def scalars(draw, ctx):
    return PadicScalar(ctx, [draw(st.integers(0, ctx.modulus - 1)) for _ in range(ctx.f)])


ctx_st = st.sampled_from(CTXS)


@given(st.data())
def test_ring_axioms(data):
    ctx = data.draw(ctx_st)
    a, b, c = (data.draw(scalars(ctx)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ctx.scalar(0)
    assert a * 1 == a


@given(st.data())
def test_inverse_of_units(data):
    ctx = data.draw(ctx_st)
    a = data.draw(scalars(ctx))
    if a.is_unit():
        assert a * a.inverse() == ctx.scalar(1)
    else:
        with pytest.raises(NotAUnit):
            a.inverse()


@given(st.data())
def test_frobenius_is_a_lift(data):
    ctx = data.draw(ctx_st)
    a, b = data.draw(scalars(ctx)), data.draw(scalars(ctx))
    assert frobenius_base(a * b) == frobenius_base(a) * frobenius_base(b)
    assert frobenius_base(a + b) == frobenius_base(a) + frobenius_base(b)
    # reduces to the p-power map
    assert (frobenius_base(a) - a**ctx.p).truncate(1).is_zero()


@given(st.data())
def test_p_derivation_rules(data):
    ctx = data.draw(ctx_st)
    p = ctx.p
    a, b = data.draw(scalars(ctx)), data.draw(scalars(ctx))
    da, db = p_derivation_base(a), p_derivation_base(b)
    k = ctx.N - 1
    ap, bp = a.truncate(k) ** p, b.truncate(k) ** p
    assert p_derivation_base(a * b) == ap * db + bp * da + (da * db).mul_p(1, k)
    cross = ctx.scalar(0, k)
    for i in range(1, p):
        from math import comb
        cross = cross + a.truncate(k) ** i * b.truncate(k) ** (p - i) * (comb(p, i) // p)
    assert p_derivation_base(a + b) == da + db - cross


def test_fermat_quotient_on_integers():
    ctx = make_context(5, 3)
    for n in range(1, 40):
        assert p_derivation_base(ctx.scalar(n)) == ctx.scalar((n - n**5) // 5, 2)


def test_precision_rules():
    ctx = make_context(3, 3)
    a = ctx.scalar(9)
    assert a.valuation() == 2
    assert a.div_p(2) == ctx.scalar(1, 1)
    with pytest.raises(PrecisionUnderflow):
        p_derivation_base(ctx.scalar(2, 1))
    assert ctx.scalar(2).mul_p(1) == ctx.scalar(6)


def test_legendre_and_sqrt():
    assert [legendre(d, 7) for d in range(1, 7)] == [1, 1, -1, 1, -1, -1]
    with pytest.raises(DomainError):
        legendre(14, 7)
    ctx = make_context(7, 4)
    u = ctx.scalar(1 + 7 * 3)
    r = sqrt_unit(u)
    assert r * r == u and (r - 1).truncate(1).is_zero()
    i = sqrt_minus_one(make_context(5, 4))
    assert i * i == make_context(5, 4).scalar(-1)
    with pytest.raises(DomainError):
        sqrt_minus_one(make_context(3, 2))


@given(st.integers(-50, 50).filter(lambda v: v % 5))
def test_binomial_series_inverse(v):
    ctx = make_context(5, 4)
    h = ctx.scalar(5 * v)
    inv = binomial_series(h, Fraction(-1), 4, 5**4, ctx.scalar(1))
    assert inv * (h + 1) == ctx.scalar(1)


def test_cyclotomic_structure():
    i = CyclotomicInt.zeta(4)
    assert i * i == CyclotomicInt.from_list(4, [-1])
    conj = GaloisElement(3, 4)
    assert galois_apply(conj, i) == CyclotomicInt.from_list(4, [0, -1])
    assert (conj @ conj).is_identity()
    z = CyclotomicInt.zeta(5)
    assert z * z * z * z * z == CyclotomicInt.from_list(5, [1])
    assert z * z * z * z == -(z * z * z + z * z + z + 1)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_embedding_is_a_homomorphism(p):
    ctx = make_context(p, 3, 4)
    i = CyclotomicInt.zeta(4)
    a = CyclotomicInt.from_list(4, [2, 1])
    b = CyclotomicInt.from_list(4, [-3, 4])
    assert embed(a * b, ctx) == embed(a, ctx) * embed(b, ctx)
    assert embed(a + b, ctx) == embed(a, ctx) + embed(b, ctx)
    assert embed(i, ctx) ** 2 == ctx.scalar(-1)


def test_inert_prime_frobenius_is_conjugation():
    ctx = make_context(3, 3, 4)
    a = CyclotomicInt.from_list(4, [2, 5])
    assert frobenius_base(embed(a, ctx)) == embed(galois_apply(GaloisElement(3, 4), a), ctx)


def test_split_prime_has_rational_completion():
    assert make_context(5, 3, 4).f == 1
    assert make_context(3, 3, 4).f == 2


def test_domain_guards():
    with pytest.raises(DomainError):
        make_context(2, 3)
    with pytest.raises(DomainError):
        make_context(3, 3, 3)

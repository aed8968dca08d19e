"""Localized polynomial rings O[x, u^{-1}] mod p^k and matrices over them.

An element is stored as numerator / (product of registered unit polynomials).
The numerator is a tuple of FLINT polynomials over Z/p^k, one per power of the
base generator t, so coefficients live in the truncated base ring.  Each
element carries its own precision k.

The first registered denominator generator is the ring's structural unit
(det(x) for GL_n, a^2+b^2 for the conformal group, the product of variables
for a torus).  Further generators are added lazily when a unit is inverted;
every one of them is checked to reduce mod p to c * (structural unit)^e,
which makes it a non-zero-divisor mod p^k.  Equality is therefore decided by
the numerator alone after bringing both sides to a common denominator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import flint

from .errors import ExactDivisionFailure, NotAUnit, PrecisionUnderflow
from .padic import BaseContext, PadicScalar, binomial_series, frobenius_base

# ---------------------------------------------------------------------------
# polynomial ring with a denominator registry


@dataclass
class _Gen:
    comps: tuple[dict, ...]  # canonical integer terms per t-component
    prec: int | None  # precision it is known to (None = exact)
    res_exp: int  # residue is c * unit^res_exp
    label: str


def _leibniz_det_terms(n: int) -> dict:
    """Integer terms of det of the generic n x n matrix, variables row-major."""
    terms = {}
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        exp = [0] * (n * n)
        for i in range(n):
            exp[i * n + perm[i]] = 1
        terms[tuple(exp)] = terms.get(tuple(exp), 0) + sign
    return terms


class PolyRing:
    """O[vars][unit^{-1}] with O the truncated base ring."""

    def __init__(self, base: BaseContext, names, unit_terms: dict, kind: str, n: int | None = None,
                 unit_label: str = "det"):
        self.base = base
        self.p = base.p
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.kind = kind
        self.n = n
        self.f = base.f
        self._ctxs: dict[int, object] = {}
        self._gens: list[_Gen] = []
        self._gen_keys: dict = {}
        self._gen_cache: dict = {}
        comps = (dict(unit_terms),) + tuple({} for _ in range(self.f - 1))
        self._gens.append(_Gen(comps, None, 1, unit_label))

    # flint plumbing -------------------------------------------------------
    def ctx(self, k: int):
        if k < 1:
            raise PrecisionUnderflow("precision must stay >= 1")
        c = self._ctxs.get(k)
        if c is None:
            c = flint.fmpz_mod_mpoly_ctx.get(self.names, ordering="deglex", modulus=self.p**k)
            self._ctxs[k] = c
        return c

    def _zero(self, k):
        z = self.ctx(k).from_dict({})
        return (z,) * self.f

    def _from_int_comps(self, comps, k, scale: int = 1):
        ctx = self.ctx(k)
        mod = self.p**k
        out = []
        for d in comps:
            out.append(ctx.from_dict({e: (scale * c) % mod for e, c in d.items() if (scale * c) % mod}))
        out += [ctx.from_dict({})] * (self.f - len(out))
        return tuple(out)

    @staticmethod
    def _to_int_comps(num):
        return tuple({e: int(c) for e, c in comp.terms()} for comp in num)

    def _convert(self, num, k_from, k_to, scale_pow: int = 0):
        """Re-express a numerator at precision k_to, optionally multiplied by p^scale_pow."""
        if k_from == k_to and scale_pow == 0:
            return num
        scale = self.p**scale_pow
        return self._from_int_comps(self._to_int_comps(num), k_to, scale)

    # numerator tuple arithmetic ------------------------------------------
    def _tadd(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _tsub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def _tneg(self, a):
        return tuple(-x for x in a)

    def _tmul(self, a, b, k):
        f = self.f
        if f == 1:
            return (a[0] * b[0],)
        zero = self.ctx(k).from_dict({})
        acc = [zero] * (2 * f - 1)
        for i in range(f):
            if a[i].is_zero():
                continue
            for j in range(f):
                if not b[j].is_zero():
                    acc[i + j] = acc[i + j] + a[i] * b[j]
        g = self.base.g
        mod = self.p**k
        for deg in range(2 * f - 2, f - 1, -1):
            c = acc[deg]
            if c.is_zero():
                continue
            for j in range(f):
                if g[j] % mod:
                    acc[deg - f + j] = acc[deg - f + j] - c * (g[j] % mod)
        return tuple(acc[:f])

    def _tscale(self, a, c: PadicScalar, k):
        """Multiply a numerator by a base-ring constant."""
        if self.f == 1:
            return (a[0] * (c.coeffs[0] % self.p**k),)
        ctx = self.ctx(k)
        const = tuple(ctx.from_dict({(0,) * self.nvars: v % self.p**k}) if v % self.p**k else ctx.from_dict({})
                      for v in c.coeffs)
        return self._tmul(a, const, k)

    def _tfrob(self, a, k):
        """Apply the base Frobenius to the coefficients of a numerator."""
        f = self.f
        if f == 1:
            return a
        rows = self.base.frob_powers
        mod = self.p**k
        zero = self.ctx(k).from_dict({})
        out = [zero] * f
        for i in range(f):
            if a[i].is_zero():
                continue
            for j in range(f):
                if rows[i][j] % mod:
                    out[j] = out[j] + a[i] * (rows[i][j] % mod)
        return tuple(out)

    @staticmethod
    def _tis_zero(a):
        return all(x.is_zero() for x in a)

    # denominator generators ----------------------------------------------
    def gen_num(self, idx: int, k: int):
        key = (idx, k)
        hit = self._gen_cache.get(key)
        if hit is None:
            hit = self._from_int_comps(self._gens[idx].comps, k)
            self._gen_cache[key] = hit
        return hit

    def gen_power(self, idx: int, e: int, k: int):
        if e == 0:
            return self.one_num(k)
        key = (idx, k, e)
        hit = self._gen_cache.get(key)
        if hit is None:
            if e == 1:
                hit = self.gen_num(idx, k)
            else:
                half = self.gen_power(idx, e // 2, k)
                hit = self._tmul(half, half, k)
                if e % 2:
                    hit = self._tmul(hit, self.gen_num(idx, k), k)
            self._gen_cache[key] = hit
        return hit

    def den_num(self, den, k):
        acc = self.one_num(k)
        for idx, e in den:
            acc = self._tmul(acc, self.gen_power(idx, e, k), k)
        return acc

    def one_num(self, k):
        ctx = self.ctx(k)
        return (ctx.from_dict({(0,) * self.nvars: 1}),) + (ctx.from_dict({}),) * (self.f - 1)

    def unit_residue(self, num, k):
        """Write num mod p as c * unit^e; returns (c as residue tuple, e) or raises NotAUnit."""
        res = self._convert(num, k, 1)
        if self._tis_zero(res):
            raise NotAUnit("numerator vanishes mod p")
        unit = self.gen_num(0, 1)[0]
        e = 0
        comps = list(res)
        while True:
            quots = []
            ok = True
            for c in comps:
                if c.is_zero():
                    quots.append(c)
                    continue
                q, r = divmod(c, unit)
                if not r.is_zero():
                    ok = False
                    break
                quots.append(q)
            if not ok:
                break
            comps = quots
            e += 1
        if not all(c.is_constant() for c in comps):
            shown = [str(c) for c in comps]
            raise NotAUnit(f"residue is not c*{self._gens[0].label}^e: quotient {shown} after e={e}")
        const = tuple(int(c.leading_coefficient()) if not c.is_zero() else 0 for c in comps)
        return const, e

    def register_unit(self, num, k, label: str | None = None) -> int:
        comps = self._to_int_comps(num)
        key = (k, tuple(tuple(sorted(d.items())) for d in comps))
        idx = self._gen_keys.get(key)
        if idx is not None:
            return idx
        base_num = self.gen_num(0, k)
        if num == base_num:
            return 0
        _, e = self.unit_residue(num, k)
        idx = len(self._gens)
        self._gens.append(_Gen(comps, k, e, label or f"u{idx}"))
        self._gen_keys[key] = idx
        return idx

    def gen_label(self, idx):
        return self._gens[idx].label

    def gen_degree(self, idx):
        return max((sum(e) for d in self._gens[idx].comps for e in d), default=0)

    # element constructors ---------------------------------------------------
    def elem(self, num, k, den=()):
        return RingElem(self, num, tuple(sorted(den)), k)

    def zero(self, k=None):
        k = self.base.N if k is None else k
        return self.elem(self._zero(k), k)

    def one(self, k=None):
        k = self.base.N if k is None else k
        return self.elem(self.one_num(k), k)

    def const(self, c, k=None) -> "RingElem":
        k = self.base.N if k is None else k
        if isinstance(c, RingElem):
            return c.truncate(k)
        if isinstance(c, PadicScalar):
            k = min(k, c.prec)
            vals = c.coeffs
        elif isinstance(c, Fraction):
            vals = PadicScalar.from_fraction(self.base, c, k).coeffs
        else:
            vals = (int(c),)
        ctx = self.ctx(k)
        mod = self.p**k
        zero_exp = (0,) * self.nvars
        num = tuple(ctx.from_dict({zero_exp: v % mod}) if v % mod else ctx.from_dict({}) for v in vals)
        num += (ctx.from_dict({}),) * (self.f - len(num))
        return self.elem(num, k)

    def var(self, name_or_index, k=None) -> "RingElem":
        k = self.base.N if k is None else k
        i = name_or_index if isinstance(name_or_index, int) else self.names.index(name_or_index)
        exp = [0] * self.nvars
        exp[i] = 1
        num = (self.ctx(k).from_dict({tuple(exp): 1}),) + (self.ctx(k).from_dict({}),) * (self.f - 1)
        return self.elem(num, k)

    def gens(self, k=None):
        return [self.var(i, k) for i in range(self.nvars)]

    def unit_elem(self, k=None) -> "RingElem":
        k = self.base.N if k is None else k
        return self.elem(self.gen_num(0, k), k)

    def from_int_terms(self, terms: dict, k=None) -> "RingElem":
        k = self.base.N if k is None else k
        return self.elem(self._from_int_comps((terms,), k), k)

    # matrices of variables ------------------------------------------------
    def generic_matrix(self, k=None) -> "Matrix":
        if self.kind == "gl":
            n = self.n
            xs = self.gens(k)
            return Matrix([[xs[i * n + j] for j in range(n)] for i in range(n)])
        if self.kind == "gl1c":
            a, b = self.gens(k)
            return Matrix([[a, b], [-b, a]])
        raise ValueError(f"no generic matrix for ring kind {self.kind}")

    def describe(self) -> str:
        return f"{self.kind}[{','.join(self.names)}] over {self.base.describe()}"


def gl_ring(base: BaseContext, n: int) -> PolyRing:
    names = [f"x{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return PolyRing(base, names, _leibniz_det_terms(n), "gl", n, "det")


def gl1c_ring(base: BaseContext) -> PolyRing:
    """Coordinates a, b of the conformal group [[a, b], [-b, a]]; unit a^2 + b^2."""
    return PolyRing(base, ("a", "b"), {(2, 0): 1, (0, 2): 1}, "gl1c", 2, "a^2+b^2")


def laurent_ring(base: BaseContext, names) -> PolyRing:
    """Polynomials in the given variables with all variables inverted."""
    nv = len(names)
    return PolyRing(base, names, {(1,) * nv: 1}, "torus", nv, "prod")


# ---------------------------------------------------------------------------
# elements


def _merge_den(a, b):
    d = dict(a)
    for idx, e in b:
        d[idx] = d.get(idx, 0) + e
    return tuple(sorted((i, e) for i, e in d.items() if e))


class RingElem:
    """numerator / prod(generator^e), exact modulo p^prec."""

    __slots__ = ("ring", "num", "den", "prec")

    def __init__(self, ring: PolyRing, num, den, prec: int):
        self.ring = ring
        self.num = num
        self.den = den
        self.prec = prec

    # alignment -------------------------------------------------------------
    def truncate(self, k: int) -> "RingElem":
        if k >= self.prec:
            return self
        return RingElem(self.ring, self.ring._convert(self.num, self.prec, k), self.den, k)

    def _with_den(self, den, k):
        """Numerator after rewriting over the larger denominator den at precision k."""
        R = self.ring
        num = self.num if self.prec == k else R._convert(self.num, self.prec, k)
        mine = dict(self.den)
        for idx, e in den:
            extra = e - mine.get(idx, 0)
            if extra < 0:
                raise AssertionError("target denominator does not dominate")
            if extra:
                num = R._tmul(num, R.gen_power(idx, extra, k), k)
        return num

    def _align(self, other):
        k = min(self.prec, other.prec)
        if self.den == other.den:
            a = self.num if self.prec == k else self.ring._convert(self.num, self.prec, k)
            b = other.num if other.prec == k else self.ring._convert(other.num, other.prec, k)
            return a, b, self.den, k
        d = dict(self.den)
        for idx, e in other.den:
            d[idx] = max(d.get(idx, 0), e)
        den = tuple(sorted(d.items()))
        return self._with_den(den, k), other._with_den(den, k), den, k

    def _coerce(self, other):
        if isinstance(other, RingElem):
            if other.ring is not self.ring:
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, (int, PadicScalar, Fraction)):
            return self.ring.const(other, self.prec)
        return NotImplemented

    # arithmetic --------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, den, k = self._align(other)
        return RingElem(self.ring, self.ring._tadd(a, b), den, k)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(self.ring, self.ring._tneg(self.num), self.den, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, den, k = self._align(other)
        return RingElem(self.ring, self.ring._tsub(a, b), den, k)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        R = self.ring
        if isinstance(other, int):
            return RingElem(R, tuple(x * (other % R.p**self.prec) for x in self.num), self.den, self.prec)
        if isinstance(other, PadicScalar):
            k = min(self.prec, other.prec)
            a = self.truncate(k)
            return RingElem(R, R._tscale(a.num, other, k), a.den, k)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        k = min(self.prec, other.prec)
        a = self.num if self.prec == k else R._convert(self.num, self.prec, k)
        b = other.num if other.prec == k else R._convert(other.num, other.prec, k)
        return RingElem(R, R._tmul(a, b, k), _merge_den(self.den, other.den), k)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one(self.prec)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # predicates --------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.ring._tis_zero(self.num)

    def equals(self, other) -> bool:
        other = self._coerce(other)
        return (self - other).is_zero()

    def __eq__(self, other):
        if isinstance(other, (RingElem, int, PadicScalar, Fraction)):
            return self.equals(other)
        return NotImplemented

    __hash__ = None

    def is_zero_mod_p(self, k: int = 1) -> bool:
        return self.truncate(k).is_zero()

    # p-adic structure --------------------------------------------------------
    def div_p(self, k: int = 1) -> "RingElem":
        """Exact division by p^k (numerator coefficients must all be divisible)."""
        if k == 0:
            return self
        if k >= self.prec:
            raise PrecisionUnderflow(f"dividing precision {self.prec} element by p^{k}")
        R = self.ring
        pk = R.p**k
        comps = R._to_int_comps(self.num)
        for d in comps:
            for c in d.values():
                if c % pk:
                    raise ExactDivisionFailure(f"coefficient {c} not divisible by {R.p}^{k}")
        new = tuple({e: c // pk for e, c in d.items()} for d in comps)
        return RingElem(R, R._from_int_comps(new, self.prec - k), self.den, self.prec - k)

    def mul_p(self, k: int, target: int | None = None) -> "RingElem":
        """p^k * self, with precision raised to min(prec + k, target)."""
        R = self.ring
        target = R.base.N if target is None else target
        newk = min(self.prec + k, target)
        return RingElem(R, R._convert(self.num, self.prec, newk, k), self.den, newk)

    def frob_coeffs(self) -> "RingElem":
        """Base Frobenius on coefficients only (variables untouched)."""
        if self.den and self.ring.f > 1:
            raise NotImplementedError("coefficient Frobenius of a fraction with non-rational generators")
        return RingElem(self.ring, self.ring._tfrob(self.num, self.prec), self.den, self.prec)

    # inversion -------------------------------------------------------------
    def inverse(self) -> "RingElem":
        """Inverse by moving the numerator into the denominator registry."""
        R = self.ring
        k = self.prec
        num_den = R.den_num(self.den, k)
        if all(c.is_constant() for c in self.num):
            c = PadicScalar(R.base, [int(x.leading_coefficient()) if not x.is_zero() else 0 for x in self.num], k)
            return RingElem(R, R._tscale(num_den, c.inverse(), k), (), k)
        idx = R.register_unit(self.num, k)
        return RingElem(R, num_den, ((idx, 1),), k)

    def __truediv__(self, other):
        if isinstance(other, RingElem):
            return self * other.inverse()
        if isinstance(other, int):
            return self * PadicScalar(self.ring.base, (other,), self.prec).inverse()
        if isinstance(other, PadicScalar):
            return self * other.inverse()
        return NotImplemented

    # evaluation --------------------------------------------------------------
    def evaluate(self, point) -> PadicScalar:
        """Value at an integer point (sequence of ints, one per variable)."""
        R = self.ring
        k = self.prec
        vals = [int(v) for v in point]

        def ev(num):
            return PadicScalar(R.base, [int(c(*vals)) if not c.is_zero() else 0 for c in num], k)

        value = ev(self.num)
        if self.den:
            d = ev(R.den_num(self.den, k))
            value = value * d.inverse()
        return value

    # introspection -----------------------------------------------------------
    def total_degree(self) -> int:
        return max((c.total_degree() for c in self.num if not c.is_zero()), default=0)

    def nterms(self) -> int:
        return sum(len(c) for c in self.num)

    def den_exponent(self) -> int:
        return sum(e for _, e in self.den)

    def serialize(self, max_terms: int | None = None) -> str:
        """Deterministic text: deglex-descending monomials, coefficient vectors, denominator."""
        R = self.ring
        comps = R._to_int_comps(self.num)
        monos = sorted(set().union(*[set(d) for d in comps]), key=lambda e: (sum(e), e), reverse=True)
        parts = []
        for e in monos:
            vec = [d.get(e, 0) for d in comps]
            coef = str(vec[0]) if R.f == 1 else "[" + ",".join(map(str, vec)) + "]"
            mono = "*".join(f"{R.names[i]}^{a}" if a > 1 else R.names[i] for i, a in enumerate(e) if a)
            parts.append(coef + ("*" + mono if mono else ""))
        total = len(parts)
        if max_terms is not None and total > max_terms:
            parts = parts[:max_terms] + [f"...(+{total - max_terms} terms)"]
        body = " + ".join(parts) if parts else "0"
        if self.den:
            dens = "*".join(f"{R.gen_label(i)}^{e}" for i, e in self.den)
            body = f"({body})/({dens})"
        return f"{body} mod {R.p}^{self.prec}"

    def __repr__(self):
        return self.serialize(max_terms=8)


# ---------------------------------------------------------------------------
# unit inversion by series


def invert_unit(f: RingElem) -> RingElem:
    """Inverse of a unit via its residue c*unit^e and a geometric series in p.

    The result uses only the structural denominator (and the generators that
    were in f's own denominator move to the numerator).
    """
    R = f.ring
    k = f.prec
    (cvec, e) = R.unit_residue(f.num, k)
    c = PadicScalar(R.base, cvec, k)
    lead = R._tmul(R._tscale(R.gen_power(0, e, k), c, k), R.one_num(k), k)
    rest = RingElem(R, R._tsub(f.num, lead), (), k)
    cinv = c.inverse()
    # f.num = c*U^e * (1 + h),  h = rest / (c U^e)
    h = RingElem(R, rest.num, ((0, e),) if e else (), k) * cinv
    series = binomial_series(h, Fraction(-1), k, R.p**k, R.one(k))
    num_den = RingElem(R, R.den_num(f.den, k), (), k)
    return num_den * series * RingElem(R, R.one_num(k), ((0, e),) if e else (), k) * cinv


# ---------------------------------------------------------------------------
# matrices over any commutative element type


class Matrix:
    """Square or rectangular matrix over RingElem or PadicScalar entries."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        return [x for r in self.rows for x in r]

    def map(self, fn) -> "Matrix":
        return Matrix([[fn(x) for x in r] for r in self.rows])

    def transpose(self) -> "Matrix":
        n, m = self.shape
        return Matrix([[self.rows[i][j] for i in range(n)] for j in range(m)])

    @property
    def T(self):
        return self.transpose()

    def __add__(self, other):
        if isinstance(other, Matrix):
            return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])
        n = self.shape[0]
        return Matrix([[x + other if i == j else x for j, x in enumerate(r)] for i, r in enumerate(self.rows)]) \
            if n else self

    def __sub__(self, other):
        if isinstance(other, Matrix):
            return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])
        return self + (-other)

    def __neg__(self):
        return self.map(lambda x: -x)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            n, m = self.shape
            m2, l = other.shape
            assert m == m2, "shape mismatch"
            out = []
            for i in range(n):
                row = []
                for j in range(l):
                    acc = self.rows[i][0] * other.rows[0][j]
                    for t in range(1, m):
                        acc = acc + self.rows[i][t] * other.rows[t][j]
                    row.append(acc)
                out.append(row)
            return Matrix(out)
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        return self.map(lambda x: other * x)

    def det(self):
        n = self.shape[0]
        r = self.rows
        if n == 1:
            return r[0][0]
        if n == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        acc = None
        for j in range(n):
            term = r[0][j] * self.minor(0, j).det()
            if j % 2:
                term = -term
            acc = term if acc is None else acc + term
        return acc

    def minor(self, i, j) -> "Matrix":
        return Matrix([[x for c, x in enumerate(row) if c != j] for rr, row in enumerate(self.rows) if rr != i])

    def adjugate(self) -> "Matrix":
        n = self.shape[0]
        if n == 1:
            one = self.rows[0][0] * 0 + 1
            return Matrix([[one]])
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                c = self.minor(i, j).det()
                cof[j][i] = -c if (i + j) % 2 else c
        return Matrix(cof)

    def inverse(self, det_inverse=None) -> "Matrix":
        """adj(M) * det(M)^{-1}; det inverted by its own inverse() unless det_inverse is given."""
        d = self.det()
        dinv = d.inverse() if det_inverse is None else det_inverse(d)
        return self.adjugate() * dinv

    def pth_power(self, e: int) -> "Matrix":
        """Entrywise power M^{(e)}."""
        return self.map(lambda x: x**e)

    def truncate(self, k) -> "Matrix":
        return self.map(lambda x: x.truncate(k))

    def div_p(self, k=1) -> "Matrix":
        return self.map(lambda x: x.div_p(k))

    def mul_p(self, k, target=None) -> "Matrix":
        return self.map(lambda x: x.mul_p(k, target))

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.entries())

    def equals(self, other) -> bool:
        return all((a - b).is_zero() for a, b in zip(self.entries(), other.entries()))

    @staticmethod
    def identity(n, one, zero) -> "Matrix":
        return Matrix([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def diag(values, zero) -> "Matrix":
        n = len(values)
        return Matrix([[values[i] if i == j else zero for j in range(n)] for i in range(n)])

    def __repr__(self):
        return "Matrix(" + repr(self.rows) + ")"


RingMatrix = Matrix


def entrywise_pth_power(M: Matrix, p: int) -> Matrix:
    return M.pth_power(p)


def ring_identity(R: PolyRing, n: int, k=None) -> Matrix:
    return Matrix.identity(n, R.one(k), R.zero(k))


def const_matrix(R: PolyRing, rows, k=None) -> Matrix:
    return Matrix([[R.const(x, k) for x in r] for r in rows])


# ---------------------------------------------------------------------------
# substitution homomorphisms


class SubstitutionMap:
    """Ring map source -> target: base map on coefficients, variables to images."""

    def __init__(self, source: PolyRing, target: PolyRing, images, base_map: str = "id"):
        if len(images) != source.nvars:
            raise ValueError("one image per source variable required")
        if base_map not in ("id", "frob"):
            raise ValueError("base_map must be 'id' or 'frob'")
        if source.base != target.base:
            raise ValueError("source and target must share the base ring")
        self.source = source
        self.target = target
        self.images = [target.const(y) if not isinstance(y, RingElem) else y for y in images]
        self.base_map = base_map
        self.prec = min(y.prec for y in self.images)
        # image of the structural unit must be a unit in the target
        self._unit_image = self._image_of_num(source.gen_num(0, self.prec), self.prec)
        target.register_unit(self._unit_image.num, self.prec) if not all(
            c.is_constant() for c in self._unit_image.num) else None
        self._gen_inv_cache: dict = {}

    def _common(self, k):
        ims = [y.truncate(k) for y in self.images]
        d: dict = {}
        for y in ims:
            for idx, e in y.den:
                d[idx] = max(d.get(idx, 0), e)
        den = tuple(sorted(d.items()))
        return [y._with_den(den, k) for y in ims], den

    def _image_of_num(self, num, k) -> RingElem:
        S, T = self.source, self.target
        if self.base_map == "frob":
            num = S._tfrob(num, k)
        nums, den = self._common(k)
        rational_images = all(all(c.is_zero() for c in y[1:]) for y in nums)
        comps = [c for c in num]
        by_degree: dict[int, list] = {}
        for t_idx, comp in enumerate(comps):
            for e, c in comp.terms():
                by_degree.setdefault(sum(e), [{} for _ in comps])[t_idx][e] = int(c)
        if not by_degree:
            return T.zero(k)
        dmax = max(by_degree)
        tctx = T.ctx(k)
        acc = T._zero(k)
        powcache: dict = {}
        for deg, parts in sorted(by_degree.items()):
            part_num = T._zero(k)
            for t_idx, terms in enumerate(parts):
                if not terms:
                    continue
                poly = S._from_int_comps((terms,), k)[0]
                if rational_images:
                    img0 = poly.compose(*[y[0] for y in nums], ctx=tctx)
                    comp_img = (img0,) + (tctx.from_dict({}),) * (T.f - 1)
                else:
                    comp_img = self._generic_compose(poly, nums, k, powcache)
                # multiply by t^t_idx
                if t_idx:
                    tpow = T.const(T.base.t() ** t_idx, k).num
                    comp_img = T._tmul(comp_img, tpow, k)
                part_num = T._tadd(part_num, comp_img)
            if deg < dmax and den:
                part_num = T._tmul(part_num, T.den_num(tuple((i, e * (dmax - deg)) for i, e in den), k), k)
            acc = T._tadd(acc, part_num)
        full_den = tuple((i, e * dmax) for i, e in den)
        return T.elem(acc, k, full_den)

    def _generic_compose(self, poly, nums, k, powcache):
        T = self.target
        acc = T._zero(k)
        for e, c in poly.terms():
            term = T.one_num(k)
            for v, a in enumerate(e):
                if a:
                    key = (v, a)
                    pw = powcache.get(key)
                    if pw is None:
                        pw = nums[v]
                        for _ in range(a - 1):
                            pw = T._tmul(pw, nums[v], k)
                        powcache[key] = pw
                    term = T._tmul(term, pw, k)
            acc = T._tadd(acc, tuple(x * int(c) for x in term))
        return acc

    def gen_image_inverse(self, idx, k) -> RingElem:
        key = (idx, k)
        hit = self._gen_inv_cache.get(key)
        if hit is None:
            hit = self._image_of_num(self.source.gen_num(idx, k), k).inverse()
            self._gen_inv_cache[key] = hit
        return hit

    def __call__(self, f: RingElem) -> RingElem:
        return apply_hom(self, f)


def apply_hom(h: SubstitutionMap, f) -> RingElem:
    """Apply a substitution homomorphism; denominators are inverted in the target."""
    if isinstance(f, Matrix):
        return f.map(lambda x: apply_hom(h, x))
    k = min(f.prec, h.prec)
    g = f.truncate(k)
    out = h._image_of_num(g.num, k)
    for idx, e in g.den:
        out = out * h.gen_image_inverse(idx, k) ** e
    return out


def identity_map(R: PolyRing, k=None) -> SubstitutionMap:
    return SubstitutionMap(R, R, R.gens(k))


def compose_maps(h1: SubstitutionMap, h2: SubstitutionMap) -> SubstitutionMap:
    """The map f -> h1(h2(f))."""
    if h2.target is not h1.source:
        raise ValueError("maps not composable")
    images = [apply_hom(h1, y) for y in h2.images]
    if h1.base_map == "frob" and h2.base_map == "frob":
        raise NotImplementedError("double Frobenius on coefficients")
    base_map = "frob" if "frob" in (h1.base_map, h2.base_map) else "id"
    return SubstitutionMap(h2.source, h1.target, images, base_map)


def reduce_mod_p_and_x1(f: RingElem) -> PadicScalar:
    """Value modulo (p, x - 1): substitute the identity point and reduce mod p."""
    R = f.ring
    if R.kind == "gl":
        n = R.n
        point = [1 if i == j else 0 for i in range(n) for j in range(n)]
    elif R.kind == "gl1c":
        point = [1, 0]
    else:
        point = [1] * R.nvars
    return f.truncate(1).evaluate(point)


def reduce_mod_p(f: RingElem) -> RingElem:
    return f.truncate(1)

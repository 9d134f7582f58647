"""Exact arithmetic in O_F = Z_p[pi] for F/Q_p totally ramified.

The field F is described by a monic Eisenstein polynomial g of degree e_F
over Z_p; pi denotes the class of x in Z_p[x]/(g(x)).  The valuation v_F is
normalized so that v_F(pi) = 1, hence v_F(p) = e_F.  The residue field is
F_p by design.

Three element flavours are provided:

* OFExact   -- an exact element of F, held as a Fraction vector on the
               basis 1, pi, ..., pi^(e_F-1).  No precision; used for master
               data (lift coefficients, Eisenstein polynomials) and for the
               symbolic Witt-polynomial construction.
* OFElement -- an integral element known modulo pi^prec.  Coefficient i of
               the basis vector is carried modulo p**ceil((prec-i)/e_F).
* FElement  -- unit * pi^shift with an OFElement unit, covering F = O_F[1/p]
               with possibly negative shift.

Multiplication propagates precision with valuation awareness: for a known
mod pi^Na and b known mod pi^Nb the product is known mod
pi^min(Na + vlow(b), Nb + vlow(a)) where vlow is the exact valuation when
finite and the precision bound otherwise.  This is what makes "zero at
precision k" elements behave as honest O(pi^k) error terms downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import IntegralityError, NoRootError, PrecisionError, SpecMismatchError

DEFAULT_PREC = 12


@lru_cache(maxsize=None)
def _pk(p: int, k: int) -> int:
    return p**k


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, math.isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


def _vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_frac(q: Fraction, p: int) -> int | None:
    if q == 0:
        return None
    return _vp_int(q.numerator, p) - _vp_int(q.denominator, p)


@dataclass(frozen=True)
class AtLeast:
    """Marker for a quantity only known to be >= bound."""

    bound: int

    def __repr__(self) -> str:
        return f">={self.bound}"


@dataclass(frozen=True)
class FieldSpec:
    """A totally ramified F/Q_p given by p and a monic Eisenstein polynomial.

    eisenstein holds g_0..g_{e_F} with g_{e_F} = 1, v_p(g_0) = 1 and
    v_p(g_i) >= 1 for 0 < i < e_F.
    """

    p: int
    eisenstein: tuple[int, ...]
    e_F: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "eisenstein", tuple(int(c) for c in self.eisenstein))
        p, g = self.p, self.eisenstein
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if len(g) < 2 or g[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree >= 1")
        if g[0] == 0 or _vp_int(g[0], p) != 1:
            raise ValueError("constant term of g must have p-valuation exactly 1")
        for c in g[1:-1]:
            if c != 0 and _vp_int(c, p) < 1:
                raise ValueError("lower coefficients of g must be divisible by p")
        object.__setattr__(self, "e_F", len(g) - 1)

    @property
    def e(self) -> int:
        """v_F(p); equals e_F since F/Q_p is totally ramified."""
        return self.e_F

    def coeff_modulus_exp(self, prec: int, i: int) -> int:
        """Exponent k such that basis coefficient i is carried mod p**k."""
        if prec <= i:
            return 0
        return -((i - prec) // self.e_F)  # ceil((prec - i)/e_F)

    def to_json(self) -> dict:
        return {"p": self.p, "eisenstein": list(self.eisenstein)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        return cls(int(obj["p"]), tuple(int(c) for c in obj["eisenstein"]))


def qp_spec(p: int) -> FieldSpec:
    """F = Q_p itself, with pi = p (g = x - p)."""
    return FieldSpec(p, (-p, 1))


def _check_spec(a, b) -> None:
    if a.spec is not b.spec and a.spec != b.spec:
        raise SpecMismatchError("operands live over different field specs")


def _reduce_poly(spec: FieldSpec, vec: list) -> list:
    """Reduce a coefficient list (any length) modulo g."""
    g, e = spec.eisenstein, spec.e_F
    vec = list(vec)
    for d in range(len(vec) - 1, e - 1, -1):
        c = vec[d]
        if c:
            vec[d] = 0
            for i in range(e):
                vec[d - e + i] -= c * g[i]
    vec = vec[:e]
    while len(vec) < e:
        vec.append(0)
    return vec


def _poly_divmod_frac(a: list[Fraction], b: list[Fraction]):
    """Quotient/remainder of Fraction coefficient lists, b nonzero."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [Fraction(0)] * max(len(a) - db, 1)
    for d in range(len(a) - 1, db - 1, -1):
        c = a[d] / lb
        if c:
            q[d - db] = c
            for i in range(db + 1):
                a[d - db + i] -= c * b[i]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


@dataclass(frozen=True, slots=True)
class OFExact:
    """Exact element of F as Fractions on the basis 1, pi, ..., pi^(e_F-1)."""

    spec: FieldSpec
    vec: tuple[Fraction, ...]

    @classmethod
    def make(cls, spec: FieldSpec, coords) -> "OFExact":
        if isinstance(coords, int):
            coords = [coords]
        vec = _reduce_poly(spec, [Fraction(c) for c in coords])
        return cls(spec, tuple(Fraction(c) for c in vec))

    @classmethod
    def zero(cls, spec: FieldSpec) -> "OFExact":
        return cls.make(spec, [0])

    @classmethod
    def one(cls, spec: FieldSpec) -> "OFExact":
        return cls.make(spec, [1])

    @classmethod
    def pi(cls, spec: FieldSpec) -> "OFExact":
        return cls.make(spec, [0, 1])

    def __add__(self, other: "OFExact") -> "OFExact":
        _check_spec(self, other)
        return OFExact(self.spec, tuple(a + b for a, b in zip(self.vec, other.vec)))

    def __sub__(self, other: "OFExact") -> "OFExact":
        _check_spec(self, other)
        return OFExact(self.spec, tuple(a - b for a, b in zip(self.vec, other.vec)))

    def __neg__(self) -> "OFExact":
        return OFExact(self.spec, tuple(-a for a in self.vec))

    def __mul__(self, other: "OFExact") -> "OFExact":
        _check_spec(self, other)
        e = self.spec.e_F
        conv = [Fraction(0)] * (2 * e - 1)
        for i, a in enumerate(self.vec):
            if a:
                for j, b in enumerate(other.vec):
                    if b:
                        conv[i + j] += a * b
        return OFExact(self.spec, tuple(_reduce_poly(self.spec, conv)))

    def __pow__(self, n: int) -> "OFExact":
        if n < 0:
            return self.inv() ** (-n)
        out = OFExact.one(self.spec)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.vec)

    def val(self) -> int | None:
        """Exact v_F, None for zero."""
        e, p = self.spec.e_F, self.spec.p
        vals = [e * _vp_frac(c, p) + i for i, c in enumerate(self.vec) if c != 0]
        return min(vals) if vals else None

    def is_integral(self) -> bool:
        p = self.spec.p
        return all(c == 0 or _vp_frac(c, p) >= 0 for c in self.vec)

    def times_pi(self, k: int) -> "OFExact":
        """Multiply by pi^k for any integer k, exactly."""
        if k == 0:
            return self
        if k > 0:
            return self * OFExact.pi(self.spec) ** k
        g, e = self.spec.eisenstein, self.spec.e_F
        # 1/pi = -(g_1 + g_2 pi + ... + pi^(e-1)) / g_0
        inv_pi = OFExact.make(self.spec, [Fraction(-g[i + 1], g[0]) for i in range(e)])
        return self * inv_pi ** (-k)

    def inv(self) -> "OFExact":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        g = [Fraction(c) for c in self.spec.eisenstein]
        # extended Euclid over Q[x]: s*a + t*g = constant (g is irreducible)
        r0 = g
        r1 = list(self.vec)
        while len(r1) > 1 and r1[-1] == 0:
            r1.pop()
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod_frac(r0, r1)
            qs1 = [Fraction(0)] * (len(q) + len(s1) - 1)
            for i, a in enumerate(q):
                if a:
                    for j, b in enumerate(s1):
                        qs1[i + j] += a * b
            width = max(len(s0), len(qs1))
            s_new = [
                (s0[i] if i < len(s0) else Fraction(0))
                - (qs1[i] if i < len(qs1) else Fraction(0))
                for i in range(width)
            ]
            r0, r1, s0, s1 = r1, r, s1, s_new
        c = r1[0]
        if c == 0:
            raise ZeroDivisionError("element not invertible")
        return OFExact.make(self.spec, [x / c for x in s1])

    def __truediv__(self, other: "OFExact") -> "OFExact":
        return self * other.inv()

    def residue(self) -> int:
        """Image in the residue field F_p (element must be integral)."""
        if not self.is_integral():
            raise IntegralityError("residue of a non-integral element")
        c = self.vec[0]
        p = self.spec.p
        return c.numerator * pow(c.denominator, -1, p) % p

    def at_prec(self, prec: int) -> "OFElement":
        """Materialize as a truncated integral element known mod pi^prec."""
        if not self.is_integral():
            raise IntegralityError("cannot truncate a non-integral element")
        spec = self.spec
        ints = []
        for i, c in enumerate(self.vec):
            k = spec.coeff_modulus_exp(prec, i)
            if k:
                m = spec.p ** k
                ints.append(c.numerator * pow(c.denominator, -1, m) % m)
            else:
                ints.append(0)
        return OFElement(spec, max(prec, 0), tuple(ints))


@dataclass(frozen=True, slots=True)
class OFElement:
    """Integral element of O_F known modulo pi^prec."""

    spec: FieldSpec
    prec: int
    vec: tuple[int, ...]

    @classmethod
    def _norm(cls, spec: FieldSpec, prec: int, coords) -> "OFElement":
        prec = max(prec, 0)
        vec = _reduce_poly(spec, [int(c) for c in coords])
        out = []
        for i, c in enumerate(vec):
            k = spec.coeff_modulus_exp(prec, i)
            out.append(c % _pk(spec.p, k) if k and c else 0)
        return cls(spec, prec, tuple(out))

    @classmethod
    def zero(cls, spec: FieldSpec, prec: int = DEFAULT_PREC) -> "OFElement":
        return _ofelt_zero(spec, max(prec, 0))

    @classmethod
    def one(cls, spec: FieldSpec, prec: int = DEFAULT_PREC) -> "OFElement":
        return cls._norm(spec, prec, [1])

    @classmethod
    def from_int(cls, spec: FieldSpec, n: int, prec: int = DEFAULT_PREC) -> "OFElement":
        return cls._norm(spec, prec, [n])

    @classmethod
    def pi(cls, spec: FieldSpec, prec: int = DEFAULT_PREC) -> "OFElement":
        return cls._norm(spec, prec, [0, 1])

    @classmethod
    def from_coords(cls, spec: FieldSpec, coords, prec: int = DEFAULT_PREC) -> "OFElement":
        return cls._norm(spec, prec, coords)

    def __add__(self, other: "OFElement") -> "OFElement":
        _check_spec(self, other)
        prec = min(self.prec, other.prec)
        if len(self.vec) == 1:  # unramified base: plain residue arithmetic
            if prec <= 0:
                return OFElement(self.spec, 0, (0,))
            c = (self.vec[0] + other.vec[0]) % _pk(self.spec.p, prec)
            return OFElement(self.spec, prec, (c,))
        return OFElement._norm(
            self.spec, prec, [a + b for a, b in zip(self.vec, other.vec)]
        )

    def __sub__(self, other: "OFElement") -> "OFElement":
        _check_spec(self, other)
        prec = min(self.prec, other.prec)
        return OFElement._norm(
            self.spec, prec, [a - b for a, b in zip(self.vec, other.vec)]
        )

    def __neg__(self) -> "OFElement":
        return OFElement._norm(self.spec, self.prec, [-a for a in self.vec])

    def __mul__(self, other: "OFElement") -> "OFElement":
        _check_spec(self, other)
        prec = min(self.prec + other.vlow(), other.prec + self.vlow())
        if prec <= 0:
            return OFElement.zero(self.spec, 0)
        if len(self.vec) == 1:
            c = (self.vec[0] * other.vec[0]) % _pk(self.spec.p, prec)
            return OFElement(self.spec, prec, (c,))
        e = self.spec.e_F
        conv = [0] * (2 * e - 1)
        for i, a in enumerate(self.vec):
            if a:
                for j, b in enumerate(other.vec):
                    if b:
                        conv[i + j] += a * b
        return OFElement._norm(self.spec, prec, conv)

    def __pow__(self, n: int) -> "OFElement":
        out = OFElement.one(self.spec, self.prec)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def val(self) -> int | None:
        """Exact v_F if < prec, else None (meaning >= prec)."""
        e, p = self.spec.e_F, self.spec.p
        best = None
        for i, c in enumerate(self.vec):
            if c:
                v = e * _vp_int(c, p) + i
                if best is None or v < best:
                    best = v
        return best

    def vlow(self) -> int:
        v = self.val()
        return self.prec if v is None else v

    def is_zero_at_prec(self) -> bool:
        return not any(self.vec)

    def is_unit(self) -> bool:
        return self.prec >= 1 and self.vec[0] % self.spec.p != 0

    def at_prec(self, prec: int) -> "OFElement":
        if prec > self.prec:
            raise PrecisionError("cannot raise precision of a truncated element")
        return OFElement._norm(self.spec, prec, self.vec)

    def shift_pi(self, k: int) -> "OFElement":
        """Multiply by pi^k (k >= 0), gaining k digits of absolute precision."""
        if k < 0:
            raise ValueError("shift_pi takes k >= 0; use div_pi for division")
        if k == 0:
            return self
        coords = [0] * k + list(self.vec)
        return OFElement._norm(self.spec, self.prec + k, coords)

    def div_pi(self, k: int = 1) -> "OFElement":
        """Divide exactly by pi^k; requires vlow() >= k."""
        if k == 0:
            return self
        if self.vlow() < k:
            raise ValueError("element not divisible by pi^k")
        spec = self.spec
        p, e, g = spec.p, spec.e_F, spec.eisenstein
        w = g[0] // p  # p-adic unit with g_0 = p*w
        vec, prec = list(self.vec), self.prec
        for _ in range(k):
            k0 = spec.coeff_modulus_exp(prec, 0)
            if k0 >= 2:
                mod = p ** (k0 - 1)
                t = (vec[0] % p ** k0) // p
                s = t * pow(w, -1, mod) % mod
            else:
                # no usable information on the carried coefficient
                s = 0
            # value/pi = sum_{i>=1} c_i pi^(i-1) - s*(g_1 + ... + g_e pi^(e-1))
            nxt = [vec[i + 1] - s * g[i + 1] for i in range(e - 1)]
            nxt.append(-s)
            vec, prec = nxt, prec - 1
            if prec <= 0:
                return OFElement.zero(spec, 0)
        return OFElement._norm(spec, prec, vec)

    def residue(self) -> int:
        if self.prec < 1:
            raise PrecisionError("no residue information at precision 0")
        return self.vec[0] % self.spec.p

    def inverse(self) -> "OFElement":
        """Inverse of a unit, exact at the same precision."""
        if not self.is_unit():
            raise PrecisionError("precision exhausted: not a visible unit")
        x = OFElement.from_int(self.spec, pow(self.residue(), -1, self.spec.p), self.prec)
        for _ in range(64):
            err = OFElement.one(self.spec, self.prec) - self * x
            if err.is_zero_at_prec():
                return x
            x = x + x * err
        raise ArithmeticError("unit inversion failed to converge")

    def digits(self) -> tuple[int, ...]:
        """Base-pi digit expansion d_0..d_{prec-1}, each in 0..p-1."""
        if self.is_zero_at_prec():
            return (0,) * self.prec
        out = []
        cur = self
        for _ in range(self.prec):
            d = cur.residue()
            out.append(d)
            cur = (cur - OFElement.from_int(self.spec, d, cur.prec)).div_pi(1)
        return tuple(out)

    def to_json(self) -> dict:
        # trailing zero digits carry nothing beyond prec; dropping them
        # keeps exact zeros (huge sentinel prec) from exploding the output
        if self.is_zero_at_prec():
            return {"digits": [], "prec": self.prec}
        ds = list(self.digits())
        while ds and ds[-1] == 0:
            ds.pop()
        return {"digits": ds, "prec": self.prec}

    @classmethod
    def from_json(cls, spec: FieldSpec, obj: dict) -> "OFElement":
        prec = int(obj["prec"])
        out = cls.zero(spec, prec)
        for i, d in enumerate(int(x) for x in obj["digits"]):
            out = out + cls.from_int(spec, d, prec - i).shift_pi(i)
        return out


@lru_cache(maxsize=None)
def _ofelt_zero(spec: FieldSpec, prec: int) -> "OFElement":
    return OFElement(spec, prec, (0,) * spec.e_F)


@lru_cache(maxsize=None)
def _felt_zero(spec: FieldSpec, absprec: int) -> "FElement":
    return FElement(_ofelt_zero(spec, absprec), 0)


def _felt_normalize(unit: OFElement, shift: int) -> "FElement":
    v = unit.val()
    if v is None:
        absprec = unit.prec + shift
        return FElement(OFElement.zero(unit.spec, max(absprec, 0)), 0)
    if v > 0:
        return FElement(unit.div_pi(v), shift + v)
    return FElement(unit, shift)


@dataclass(frozen=True, slots=True)
class FElement:
    """unit * pi^shift with v_F(unit) = 0, or a canonical zero-at-precision."""

    unit: OFElement
    shift: int

    @property
    def spec(self) -> FieldSpec:
        return self.unit.spec

    @classmethod
    def make(cls, unit: OFElement, shift: int = 0) -> "FElement":
        return _felt_normalize(unit, shift)

    @classmethod
    def from_int(cls, spec: FieldSpec, n: int, prec: int = DEFAULT_PREC) -> "FElement":
        return cls.make(OFElement.from_int(spec, n, prec))

    @classmethod
    def one(cls, spec: FieldSpec, prec: int = DEFAULT_PREC) -> "FElement":
        return cls(OFElement.one(spec, prec), 0)

    @classmethod
    def zero_at(cls, spec: FieldSpec, absprec: int) -> "FElement":
        return _felt_zero(spec, max(absprec, 0))

    @classmethod
    def from_exact(cls, x: OFExact, absprec: int = DEFAULT_PREC) -> "FElement":
        """Materialize an exact element, known modulo pi^absprec."""
        v = x.val()
        if v is None or v >= absprec:
            return cls.zero_at(x.spec, absprec)
        unit = x.times_pi(-v)
        return cls(unit.at_prec(absprec - v), v)

    def is_zero_at_prec(self) -> bool:
        return self.unit.is_zero_at_prec()

    @property
    def absprec(self) -> int:
        """Value is known modulo pi^absprec."""
        return self.unit.prec + self.shift

    def val(self) -> int | AtLeast:
        if self.is_zero_at_prec():
            return AtLeast(self.absprec)
        return self.shift

    def vlow(self) -> int:
        v = self.val()
        return v.bound if isinstance(v, AtLeast) else v

    def is_integral(self) -> bool:
        """True when the value is in O_F as far as the precision can tell."""
        return self.vlow() >= 0

    def __add__(self, other: "FElement") -> "FElement":
        _check_spec(self, other)
        # a zero carrying at least the other label is additively inert;
        # this keeps padded exact zeros out of the hot unit arithmetic
        if self.absprec >= other.absprec and self.is_zero_at_prec():
            return other
        if other.absprec >= self.absprec and other.is_zero_at_prec():
            return self
        s = min(self.shift, other.shift)
        ua = self.unit.shift_pi(self.shift - s)
        ub = other.unit.shift_pi(other.shift - s)
        return _felt_normalize(ua + ub, s)

    def __sub__(self, other: "FElement") -> "FElement":
        return self + (-other)

    def __neg__(self) -> "FElement":
        return FElement(-self.unit, self.shift)

    def __mul__(self, other: "FElement") -> "FElement":
        _check_spec(self, other)
        return _felt_normalize(self.unit * other.unit, self.shift + other.shift)

    def __truediv__(self, other: "FElement") -> "FElement":
        _check_spec(self, other)
        if other.is_zero_at_prec():
            raise PrecisionError("precision exhausted: divisor indistinguishable from 0")
        return _felt_normalize(
            self.unit * other.unit.inverse(), self.shift - other.shift
        )

    def __pow__(self, n: int) -> "FElement":
        if n < 0:
            return FElement.one(self.spec, self.unit.prec) / self ** (-n)
        return _felt_normalize(self.unit ** n, self.shift * n)

    def times_pi(self, k: int) -> "FElement":
        return FElement(self.unit, self.shift + k)

    def cap_absprec(self, absprec: int) -> "FElement":
        """Truncate the precision label to at most absprec."""
        if self.absprec <= absprec:
            return self
        return _felt_normalize(
            self.unit.at_prec(max(absprec - self.shift, 0)), self.shift
        )

    def congruent(self, other: "FElement", k: int) -> bool:
        """True iff self - other is zero mod pi^k (raises if undecidable)."""
        d = self - other
        if d.is_zero_at_prec():
            if d.absprec < k:
                raise PrecisionError(
                    f"cannot compare modulo pi^{k} at absprec {d.absprec}"
                )
            return True
        return d.vlow() >= k

    def to_json(self) -> dict:
        out = self.unit.to_json()
        out["shift"] = self.shift
        return out


# --- spec-level operation names -------------------------------------------

def of_add(a: OFElement, b: OFElement) -> OFElement:
    return a + b


def of_val(a: OFElement) -> int | AtLeast:
    v = a.val()
    return AtLeast(a.prec) if v is None else v


def of_div(a: OFElement, b: OFElement) -> FElement:
    _check_spec(a, b)
    if b.val() is None:
        raise PrecisionError("precision exhausted: divisor indistinguishable from 0")
    return FElement.make(a) / FElement.make(b)


def of_root(a: OFElement, m: int) -> list[OFElement]:
    """All m-th roots of a unit a obtained by Hensel lifting residue roots.

    The list is sorted by residue root, so 1 comes first whenever it is a
    root.  Raises NoRootError when the residue class has no m-th root in
    F_p, and ValueError for p | m (outside the simple Hensel regime; every
    use in this library has m < p).
    """
    p = a.spec.p
    if m < 1:
        raise ValueError("m must be >= 1")
    if a.val() != 0:
        raise ValueError("of_root requires a unit")
    if m % p == 0:
        raise ValueError("p divides m: simple Hensel lifting unavailable")
    r0 = a.residue()
    residue_roots = [r for r in range(1, p) if pow(r, m, p) == r0]
    if not residue_roots:
        raise NoRootError(f"residue {r0} has no {m}-th root in F_{p}")
    lifts = []
    m_el = OFElement.from_int(a.spec, m, a.prec)
    for r in residue_roots:
        x = OFElement.from_int(a.spec, r, a.prec)
        for _ in range(64):
            fx = x ** m - a
            if fx.is_zero_at_prec():
                break
            deriv = m_el * x ** (m - 1)
            x = x - fx * deriv.inverse()
        else:
            raise ArithmeticError("root lifting failed to converge")
        lifts.append(x)
    return lifts

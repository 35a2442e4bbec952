"""Exact univariate polynomials and rational functions over Fraction.

Everything downstream of the discrete operator algebra manipulates
coefficients that are rational functions of the lattice variable n with
rational coefficients.  Floating point would blur the zero-tests that the
algebra relies on (telescoping of product terms, exact cancellation in
bracket identities), so this small layer does the arithmetic with
`fractions.Fraction` and reduces every quotient to lowest terms with a
monic denominator.  Values at integer points are exact; floats only appear
when a caller converts on the way out.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to Fraction")


class Polynomial:
    """Dense polynomial, coefficients stored low degree first, trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, v) -> "Polynomial":
        return cls((v,))

    @classmethod
    def identity(cls) -> "Polynomial":
        """The polynomial n."""
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Sequence) -> "Polynomial":
        p = cls((1,))
        for r in roots:
            p = p * cls((-_as_fraction(r), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial mapped to -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        return Polynomial(c / lead for c in self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial((other,))
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        return self + (-other if isinstance(other, Polynomial) else Polynomial((-_as_fraction(other),)))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial(c * other for c in self.coeffs)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial((1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise TypeError("divmod needs a Polynomial divisor")
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        rem = list(self.coeffs)
        dlead = other.coeffs[-1]
        dd = other.degree
        while len(rem) - 1 >= dd and rem:
            k = len(rem) - 1 - dd
            f = rem[-1] / dlead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(q), Polynomial(rem)

    def shift(self, m) -> "Polynomial":
        """p(n + m), computed by Horner in (n + m)."""
        m = _as_fraction(m)
        step = Polynomial((m, 1))
        out = Polynomial()
        for c in reversed(self.coeffs):
            out = out * step + c
        return out

    def __call__(self, v):
        """Evaluate; exact for int/Fraction inputs, float for float input."""
        if isinstance(v, float):
            acc = 0.0
            for c in reversed(self.coeffs):
                acc = acc * v + float(c)
            return acc
        v = _as_fraction(v)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Polynomial(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*n")
            else:
                parts.append(f"{c}*n^{i}")
        return "Polynomial(" + " + ".join(parts) + ")"


def _int_primitive(p: Polynomial) -> list:
    """Primitive integer coefficient list of a nonzero rational multiple of p."""
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [c.numerator * (den // c.denominator) for c in p.coeffs]
    cont = 0
    for v in ints:
        cont = math.gcd(cont, v)
    if cont > 1:
        ints = [v // cont for v in ints]
    return ints


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd via a primitive pseudo-remainder sequence over the integers.

    Plain Fraction Euclid blows up on coefficients that came from floats
    (53-bit numerators everywhere); stripping content keeps the integer
    remainders small enough that degree-30 operands stay cheap.
    """
    if a.is_zero():
        return b.monic() if not b.is_zero() else b
    if b.is_zero():
        return a.monic()
    A, B = _int_primitive(a), _int_primitive(b)
    if len(A) < len(B):
        A, B = B, A
    while True:
        if len(B) == 1:
            return Polynomial((1,))
        # pseudo-remainder: scale as we go so every step stays integral
        r = list(A)
        db = len(B) - 1
        lb = B[-1]
        while len(r) - 1 >= db:
            k = len(r) - 1 - db
            lead = r[-1]
            r = [c * lb for c in r]
            for i, c in enumerate(B):
                r[k + i] -= lead * c
            while r and r[-1] == 0:
                r.pop()
        if not r:
            lead = B[-1]
            return Polynomial([Fraction(c, lead) for c in B])
        cont = 0
        for v in r:
            cont = math.gcd(cont, v)
        if cont > 1:
            r = [v // cont for v in r]
        A, B = B, r


def _exact_quotient(a: Polynomial, g: Polynomial) -> Polynomial:
    q, _ = divmod(a, g)
    return q


class RationalFn:
    """Quotient of two Polynomials, kept reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction, float)):
            num = Polynomial((num,))
        if den is None:
            den = Polynomial((1,))
        elif isinstance(den, (int, Fraction, float)):
            den = Polynomial((den,))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num = Polynomial()
            self.den = Polynomial((1,))
            return
        # constant num or den cannot share a nontrivial factor: skip the gcd
        if den.degree > 0 and num.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, _ = divmod(num, g)
                den, _ = divmod(den, g)
        lead = den.leading()
        if lead == 1:
            self.num = num
            self.den = den
        else:
            self.num = Polynomial(c / lead for c in num.coeffs)
            self.den = Polynomial(c / lead for c in den.coeffs)

    @classmethod
    def _raw(cls, num: Polynomial, den: Polynomial) -> "RationalFn":
        """Wrap an already-reduced pair (den monic, gcd(num, den) = 1)."""
        obj = object.__new__(cls)
        if num.is_zero():
            obj.num = Polynomial()
            obj.den = Polynomial((1,))
        else:
            obj.num = num
            obj.den = den
        return obj

    @classmethod
    def const(cls, v) -> "RationalFn":
        return cls(Polynomial((v,)))

    @classmethod
    def zero(cls) -> "RationalFn":
        return cls(Polynomial())

    @classmethod
    def identity(cls) -> "RationalFn":
        return cls(Polynomial.identity())

    @classmethod
    def from_poles(cls, residues: Sequence, poles: Sequence) -> "RationalFn":
        """sum_i residue_i / (n - pole_i), assembled over a common denominator."""
        if len(residues) != len(poles):
            raise ValueError("residues and poles must pair up")
        poles = [_as_fraction(p) for p in poles]
        den = Polynomial.from_roots(poles)
        num = Polynomial()
        for i, c in enumerate(residues):
            other = Polynomial.from_roots([p for j, p in enumerate(poles) if j != i])
            num = num + _as_fraction(c) * other
        return cls(num, den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFn.const(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self) -> "RationalFn":
        return RationalFn._raw(-self.num, self.den)

    def __add__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction, float)):
            other = RationalFn.const(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        d1, d2 = self.den, other.den
        if d1.degree == 0 and d2.degree == 0:
            return RationalFn._raw(self.num + other.num, d1)
        g = poly_gcd(d1, d2)
        if g.degree == 0:
            # coprime reduced inputs: the cross sum is already reduced
            return RationalFn._raw(self.num * d2 + other.num * d1, d1 * d2)
        d2r = _exact_quotient(d2, g)
        num = self.num * d2r + other.num * _exact_quotient(d1, g)
        return RationalFn(num, d1 * d2r)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction, float)):
            other = RationalFn.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "RationalFn":
        return (-self) + other

    def __mul__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction, float)):
            other = RationalFn.const(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return RationalFn.zero()
        na, da = self.num, self.den
        nb, db = other.num, other.den
        # cross-cancel so the big gcd over the products never happens
        if na.degree > 0 and db.degree > 0:
            g = poly_gcd(na, db)
            if g.degree > 0:
                na = _exact_quotient(na, g)
                db = _exact_quotient(db, g)
        if nb.degree > 0 and da.degree > 0:
            g = poly_gcd(nb, da)
            if g.degree > 0:
                nb = _exact_quotient(nb, g)
                da = _exact_quotient(da, g)
        return RationalFn._raw(na * nb, da * db)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction, float)):
            other = RationalFn.const(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        if self.num.is_zero():
            return RationalFn.zero()
        na, da = self.num, self.den
        nb, db = other.num, other.den
        if na.degree > 0 and nb.degree > 0:
            g = poly_gcd(na, nb)
            if g.degree > 0:
                na = _exact_quotient(na, g)
                nb = _exact_quotient(nb, g)
        if db.degree > 0 and da.degree > 0:
            g = poly_gcd(db, da)
            if g.degree > 0:
                db = _exact_quotient(db, g)
                da = _exact_quotient(da, g)
        num = na * db
        den = da * nb
        lead = den.leading()
        if lead != 1:
            num = Polynomial(c / lead for c in num.coeffs)
            den = Polynomial(c / lead for c in den.coeffs)
        return RationalFn._raw(num, den)

    def shift(self, m) -> "RationalFn":
        """f(n + m); substitution preserves reducedness and the monic lead."""
        return RationalFn._raw(self.num.shift(m), self.den.shift(m))

    def delta(self) -> "RationalFn":
        """(Delta f)(n) = f(n+1) - f(n)."""
        return self.shift(1) - self

    def __call__(self, v):
        """Evaluate; raises ZeroDivisionError exactly at a pole."""
        if isinstance(v, float):
            d = self.den(v)
            if d == 0.0:
                raise ZeroDivisionError(f"pole at {v}")
            return self.num(v) / d
        return self.num(v) / self.den(v)

    def __repr__(self) -> str:
        if self.den.degree == 0:
            return f"RationalFn({self.num!r})"
        return f"RationalFn({self.num!r} / {self.den!r})"

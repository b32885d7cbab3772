"""Exact arithmetic in cyclotomic fields Q(zeta_n), with certified signs.

Elements are stored in the power basis 1, zeta, ..., zeta^(d-1) with
Fraction coefficients, where d = totient(n) and zeta = exp(2*pi*i/n).
Equality, zero tests and field operations are exact.  Signs of the real or
imaginary part of the complex embedding are decided algebraically when the
part is exactly zero, and otherwise certified by interval refinement.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath


class FieldError(ValueError):
    pass


def _totient(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials (low-to-high coefficients).
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // den[-1]
        out[k] = q
        for j, dj in enumerate(den):
            num[k + j] -= q * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, low to high, monic."""
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _raw_mpf_to_fraction(raw) -> Fraction:
    # raw is an mpf value tuple (sign, mantissa, exponent, bitcount).
    sign, man, exp, _ = raw
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise FieldError("non-finite interval endpoint")
    v = Fraction(int(man), 1) * Fraction(2) ** int(exp)
    return -v if sign else v


class CyclotomicField:
    """Q(zeta_n): conductor, degree and reduction data for the power basis."""

    def __init__(self, conductor: int):
        if conductor < 1:
            raise FieldError("conductor must be a positive integer")
        self.conductor = conductor
        self.degree = _totient(conductor)
        phi = cyclotomic_polynomial(conductor)
        assert len(phi) == self.degree + 1 and phi[-1] == 1
        self._phi = phi
        # zeta^k for k = 0..n-1 expressed in the power basis (integer rows).
        d = self.degree
        rows = []
        row = [0] * d
        row[0] = 1
        for _ in range(conductor):
            rows.append(tuple(row))
            # multiply by zeta, fold zeta^d = -(phi[0] + ... + phi[d-1]x^(d-1))
            top = row[d - 1]
            row = [0] + row[:-1]
            if top:
                for j in range(d):
                    row[j] -= top * phi[j]
        self._power_rows = rows
        self.zero = FieldElement(self, (Fraction(0),) * d)
        one = [Fraction(0)] * d
        one[0] = Fraction(1)
        self.one = FieldElement(self, tuple(one))

    def __repr__(self):
        return f"CyclotomicField({self.conductor})"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and self.conductor == other.conductor

    def __hash__(self):
        return hash(("CyclotomicField", self.conductor))

    def zeta(self, k: int = 1) -> "FieldElement":
        """zeta_n^k as a field element."""
        row = self._power_rows[k % self.conductor]
        return FieldElement(self, tuple(Fraction(c) for c in row))

    def from_rational(self, q) -> "FieldElement":
        coeffs = [Fraction(0)] * self.degree
        coeffs[0] = Fraction(q)
        return FieldElement(self, tuple(coeffs))

    def element(self, coeffs) -> "FieldElement":
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != self.degree:
            raise FieldError(
                f"expected {self.degree} coefficients, got {len(coeffs)}"
            )
        return FieldElement(self, coeffs)

    def _reduce(self, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
        # Reduce a coefficient list of length <= 2d-1 to the power basis.
        d = self.degree
        if len(coeffs) <= d:
            out = list(coeffs) + [Fraction(0)] * (d - len(coeffs))
            return tuple(out)
        out = list(coeffs[:d])
        for k in range(d, len(coeffs)):
            c = coeffs[k]
            if c:
                # zeta^n = 1, so any power folds through k mod n.
                row = self._power_rows[k % self.conductor]
                for j in range(d):
                    if row[j]:
                        out[j] += c * row[j]
        return tuple(out)


@lru_cache(maxsize=None)
def field_make(conductor: int) -> CyclotomicField:
    """The cyclotomic field with the given conductor (interned)."""
    return CyclotomicField(conductor)


class FieldElement:
    """An element of Q(zeta_n) in the power basis, immutable."""

    __slots__ = ("field", "coeffs", "_hash", "_approx")

    def __init__(self, field: CyclotomicField, coeffs: tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs
        self._hash = None
        self._approx = None

    def _check(self, other: "FieldElement") -> "FieldElement":
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldError("field mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(
            self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(
            self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return FieldElement(self.field, self.field._reduce(prod))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        acc = self.field.one
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse, via the multiplication matrix."""
        if self.is_zero():
            raise ZeroDivisionError("division by zero field element")
        d = self.field.degree
        # Columns: self * zeta^j in the power basis.
        cols = []
        cur = self
        zeta = self.field.zeta()
        for _ in range(d):
            cols.append(cur.coeffs)
            cur = cur * zeta
        # Solve M x = e0 by Gaussian elimination over Fraction.
        mat = [[cols[j][i] for j in range(d)] for i in range(d)]
        rhs = [Fraction(1 if i == 0 else 0) for i in range(d)]
        for col in range(d):
            piv = next(r for r in range(col, d) if mat[r][col] != 0)
            mat[col], mat[piv] = mat[piv], mat[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            inv = 1 / mat[col][col]
            mat[col] = [v * inv for v in mat[col]]
            rhs[col] *= inv
            for r in range(d):
                if r != col and mat[r][col]:
                    f = mat[r][col]
                    mat[r] = [v - f * w for v, w in zip(mat[r], mat[col])]
                    rhs[r] -= f * rhs[col]
        return FieldElement(self.field, tuple(rhs))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.conductor, self.coeffs))
        return self._hash

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def conjugate(self) -> "FieldElement":
        """Complex conjugate: the field automorphism zeta -> zeta^(n-1)."""
        n = self.field.conductor
        d = self.field.degree
        out = [Fraction(0)] * d
        for k, c in enumerate(self.coeffs):
            if c:
                row = self.field._power_rows[(n - k) % n]
                for j in range(d):
                    if row[j]:
                        out[j] += c * row[j]
        return FieldElement(self.field, tuple(out))

    def real_is_zero(self) -> bool:
        return self == -self.conjugate()

    def imag_is_zero(self) -> bool:
        return self == self.conjugate()

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise FieldError("element is not rational")
        return self.coeffs[0]

    # -- certified embedding ------------------------------------------------

    def enclosure(self, part: str = "real", bits: int = 64) -> "EmbeddedInterval":
        """A certified Fraction interval around re/im of the embedding."""
        lo, hi = _embed_bounds(self, part, bits)
        return EmbeddedInterval(lo, hi, element=self, part=part, bits=bits)

    def sign(self, part: str = "real") -> int:
        """Exact sign (-1, 0, +1) of the real or imaginary embedded part."""
        if part == "real":
            if self.real_is_zero():
                return 0
        elif part == "imag":
            if self.imag_is_zero():
                return 0
        else:
            raise FieldError(f"unknown part {part!r}")
        bits = 64
        while True:
            lo, hi = _embed_bounds(self, part, bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def approx(self, digits: int = 17) -> complex:
        """Floating approximation of the complex embedding (not authoritative)."""
        with mpmath.workdps(digits + 10):
            z = mpmath.mpc(0)
            n = self.field.conductor
            for k, c in enumerate(self.coeffs):
                if c:
                    z += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(
                        mpmath.mpf(2 * k) / n
                    )
            return complex(z)

    def decimal(self, part: str = "real", digits: int = 40) -> str:
        """Deterministic decimal string of the embedded part."""
        with mpmath.workdps(digits + 15):
            n = self.field.conductor
            v = mpmath.mpf(0)
            for k, c in enumerate(self.coeffs):
                if c:
                    ang = mpmath.mpf(2 * k) / n
                    base = mpmath.cospi(ang) if part == "real" else mpmath.sinpi(ang)
                    v += mpmath.mpf(c.numerator) / c.denominator * base
            return mpmath.nstr(v, digits, strip_zeros=False)

    def to_json(self) -> dict:
        return {
            "conductor": self.field.conductor,
            "coeffs": [_frac_str(c) for c in self.coeffs],
        }

    @staticmethod
    def from_json(data: dict) -> "FieldElement":
        field = field_make(int(data["conductor"]))
        return field.element([Fraction(c) for c in data["coeffs"]])

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                if k == 0:
                    terms.append(str(c))
                elif k == 1:
                    terms.append(f"{c}*z" if c != 1 else "z")
                else:
                    terms.append(f"{c}*z^{k}" if c != 1 else f"z^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"<{body} in Q(z_{self.field.conductor})>"


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)


def _embed_bounds(elem: FieldElement, part: str, bits: int):
    iv = mpmath.iv
    old = iv.prec
    try:
        iv.prec = bits
        n = elem.field.conductor
        total = iv.mpf(0)
        two_pi = 2 * iv.pi
        for k, c in enumerate(elem.coeffs):
            if c:
                ang = two_pi * k / n
                base = iv.cos(ang) if part == "real" else iv.sin(ang)
                total += (iv.mpf(c.numerator) / c.denominator) * base
        lo_raw, hi_raw = total._mpi_
        return _raw_mpf_to_fraction(lo_raw), _raw_mpf_to_fraction(hi_raw)
    finally:
        iv.prec = old


class EmbeddedInterval:
    """Certified rational bounds on the embedded real or imaginary part.

    refine() returns a new interval of at most half the width, nested in
    this one.
    """

    def __init__(self, lower: Fraction, upper: Fraction, element=None,
                 part: str = "real", bits: int = 64):
        if lower > upper:
            raise FieldError("invalid interval bounds")
        self.lower = lower
        self.upper = upper
        self._element = element
        self._part = part
        self._bits = bits

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def refine(self) -> "EmbeddedInterval":
        if self._element is None:
            raise FieldError("interval is not refinable")
        target = self.width / 2
        bits = self._bits
        lower, upper = self.lower, self.upper
        while upper - lower > target:
            bits *= 2
            lo, hi = _embed_bounds(self._element, self._part, bits)
            # Intersect so refinement is monotone.
            lower = max(lower, lo)
            upper = min(upper, hi)
        return EmbeddedInterval(lower, upper, self._element, self._part, bits)

    def __repr__(self):
        return f"EmbeddedInterval[{self.lower}, {self.upper}]"


@lru_cache(maxsize=None)
def _float_roots(conductor: int) -> tuple[complex, ...]:
    with mpmath.workdps(40):
        return tuple(
            complex(mpmath.expjpi(mpmath.mpf(2 * k) / conductor))
            for k in range(conductor)
        )


def fast_approx(elem: FieldElement) -> complex:
    """Cheap float approximation (~1e-14 relative error); prefilter only."""
    z = elem._approx
    if z is None:
        roots = _float_roots(elem.field.conductor)
        z = 0j
        for k, c in enumerate(elem.coeffs):
            if c:
                z += float(c) * roots[k]
        elem._approx = z
    return z


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Exact field operation: one of add, sub, mul, div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise FieldError(f"unknown operation {op!r}")


def field_sign(a: FieldElement, part: str = "real") -> int:
    return a.sign(part)


def compare_real(a: FieldElement, b: FieldElement) -> int:
    """Exact comparison of two real-embedded elements."""
    return (a - b).sign("real")

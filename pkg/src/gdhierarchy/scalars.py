"""Exact scalars: rationals and the ring Q[zeta]/(zeta^(2(r+1)) + r).

Rationals are ``gmpy2.mpq`` when gmpy2 is importable and
``fractions.Fraction`` otherwise; both expose ``numerator``/``denominator``
and compare equal to each other, so callers never need to care.

``zeta`` is a fixed choice of ``(-r)^(1/(2(r+1)))``.  All fractional powers
of ``-r`` that occur in the variable dictionaries are integral powers of
``zeta``, and ``sqrt(-r) = zeta^(r+1)``.
"""
from __future__ import annotations

from fractions import Fraction

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _mpq

    def Q(num=0, den=1):
        if isinstance(num, Fraction):
            return _mpq(num.numerator, num.denominator)
        return _mpq(num, den)

    RATIONAL_TYPES = (int, Fraction, type(_mpq(0)))
    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover
    def Q(num=0, den=1):
        return Fraction(num, den)

    RATIONAL_TYPES = (int, Fraction)
    BACKEND = "fractions"

ZERO = Q(0)
ONE = Q(1)


def is_rational(x) -> bool:
    return isinstance(x, RATIONAL_TYPES)


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def binom(n: int, k: int):
    """Generalized binomial n(n-1)...(n-k+1)/k! for any integer n, k >= 0."""
    out = ONE
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


class NotInvertible(ArithmeticError):
    pass


class CycScalar:
    """Element sum c_i zeta^i, i < 2(r+1), reduced by zeta^(2(r+1)) = -r."""

    __slots__ = ("r", "coeffs")

    def __init__(self, r: int, coeffs):
        n = 2 * (r + 1)
        coeffs = tuple(Q(c) if isinstance(c, (int, Fraction)) else c for c in coeffs)
        if len(coeffs) > n:
            coeffs = _reduce(r, list(coeffs))
        elif len(coeffs) < n:
            coeffs = coeffs + (ZERO,) * (n - len(coeffs))
        self.r = r
        self.coeffs = coeffs

    @classmethod
    def rational(cls, r: int, c) -> "CycScalar":
        return cls(r, (Q(c),))

    @classmethod
    def zeta_power(cls, r: int, p: int, c=1) -> "CycScalar":
        """c * zeta^p for any integer p (negative allowed)."""
        n = 2 * (r + 1)
        q, rem = divmod(p, n)
        # zeta^p = (-r)^q zeta^rem; q may be negative.
        scale = Q(c) * Q(-r) ** q
        coeffs = [ZERO] * n
        coeffs[rem] = scale
        return cls(r, coeffs)

    @classmethod
    def sqrt_minus_r(cls, r: int) -> "CycScalar":
        return cls.zeta_power(r, r + 1)

    def _coerce(self, other):
        if isinstance(other, CycScalar):
            if other.r != self.r:
                raise ValueError("mixing zeta rings for different r")
            return other
        if is_rational(other):
            return CycScalar(self.r, (Q(other),))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycScalar(self.r, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.r, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_rational(other):
            return CycScalar(self.r, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = len(self.coeffs)
        prod = [ZERO] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycScalar(self.r, _reduce(self.r, prod))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_rational(other):
            return CycScalar(self.r, [a / other for a in self.coeffs])
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def inverse(self) -> "CycScalar":
        nz = [i for i, c in enumerate(self.coeffs) if c]
        if not nz:
            raise ZeroDivisionError("inverse of zero")
        if len(nz) == 1:
            i = nz[0]
            return CycScalar.zeta_power(self.r, -i, 1 / self.coeffs[i])
        return self._inverse_by_linear_solve()

    def _inverse_by_linear_solve(self) -> "CycScalar":
        # Multiplication by self is a linear map on Q^n; invert it if possible.
        import sympy

        n = len(self.coeffs)
        cols = []
        for j in range(n):
            basis = CycScalar.zeta_power(self.r, j)
            cols.append([sympy.Rational(int(c.numerator), int(c.denominator))
                         for c in (self * basis).coeffs])
        mat = sympy.Matrix(cols).T
        if mat.det() == 0:
            raise NotInvertible(f"{self} is a zero divisor in Q[zeta]/(zeta^{n}+{self.r})")
        rhs = sympy.Matrix([1] + [0] * (n - 1))
        sol = mat.LUsolve(rhs)
        return CycScalar(self.r, [Q(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in sol])

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.r, self.coeffs))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def to_json(self):
        return [[str(c.numerator), str(c.denominator)] for c in self.coeffs]

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return "Cyc(" + (" + ".join(parts) or "0") + ")"


def _reduce(r: int, coeffs: list) -> tuple:
    n = 2 * (r + 1)
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, n - 1, -1):
        c = coeffs[i]
        if c:
            coeffs[i - n] += c * (-r)
        coeffs[i] = ZERO
    return tuple(coeffs[:n])

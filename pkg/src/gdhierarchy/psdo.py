"""Pseudo-differential operators and their symbols over a differential ring.

The coefficient ring is supplied as a small object with ``zero``, ``one``,
``const(c)`` and ``dx(a)``; ``SeriesRing`` wraps ``TSeries`` (derivation
d/dT1) and ``jets.JetRing`` wraps abstract jet polynomials.

An operator stores the coefficients of d_x^n for n in its window.  ``lo`` is
the lowest order that is known exactly; coefficients below it were truncated.
Finite operators that are known exactly at every order use ``lo = EXACT``.
Composition propagates windows automatically, so an operator never claims
more precision than its inputs justify.
"""
from __future__ import annotations

from typing import Callable, Mapping

from .scalars import ONE, Q, binom
from .series import SeriesSpace, TSeries

EXACT = -(10 ** 9)


class WindowError(ValueError):
    pass


class SeriesRing:
    """TSeries with derivation d/dx, x being the space's designated variable."""

    def __init__(self, space: SeriesSpace, cap: int):
        if space.x is None:
            raise ValueError("space has no designated x variable")
        self.space = space
        self.cap = cap
        self.zero = TSeries.zero(space, cap)
        self.one = TSeries.const(space, 1, cap)

    def const(self, c, eps: int = 0):
        return TSeries.const(self.space, c, self.cap, eps=eps)

    def dx(self, a):
        return a.diff(self.space.x)

    def __eq__(self, other):
        return isinstance(other, SeriesRing) and other.space == self.space

    def __hash__(self):
        return hash(self.space)


class PsDO:
    __slots__ = ("ring", "coeffs", "lo")

    def __init__(self, ring, coeffs: Mapping[int, object], lo: int = EXACT):
        self.ring = ring
        self.lo = lo
        self.coeffs = {n: c for n, c in coeffs.items() if n >= lo and c}

    # construction ------------------------------------------------------
    @classmethod
    def d(cls, ring, n: int = 1) -> "PsDO":
        """The monomial d_x^n."""
        return cls(ring, {n: ring.one})

    @classmethod
    def mult(cls, ring, f) -> "PsDO":
        """Multiplication operator by f."""
        return cls(ring, {0: f})

    # basic protocol ------------------------------------------------------
    @property
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else self.lo

    def __getitem__(self, n: int):
        if n < self.lo:
            raise WindowError(f"order {n} lies below the known window (lo={self.lo})")
        return self.coeffs.get(n, self.ring.zero)

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        parts = [f"({c})*D^{n}" for n, c in sorted(self.coeffs.items(), reverse=True)]
        tail = "" if self.lo == EXACT else f" + O(D^{self.lo - 1})"
        return "PsDO(" + (" + ".join(parts) or "0") + tail + ")"

    def __add__(self, other):
        if not isinstance(other, PsDO):
            other = PsDO.mult(self.ring, other if not _is_scalar(other) else self.ring.const(other))
        lo = max(self.lo, other.lo)
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return PsDO(self.ring, out, lo)

    __radd__ = __add__

    def __neg__(self):
        return PsDO(self.ring, {n: -c for n, c in self.coeffs.items()}, self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        """Multiplication by a scalar or ring element from the left."""
        if isinstance(scalar, PsDO):
            raise TypeError("use @ or compose() for operator products")
        return PsDO(self.ring, {n: scalar * c for n, c in self.coeffs.items()}, self.lo)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, PsDO):
            return NotImplemented
        lo = max(self.lo, other.lo)
        keys = {n for n in set(self.coeffs) | set(other.coeffs) if n >= lo}
        return all(self[n] == other[n] for n in keys)

    __hash__ = None

    def map(self, f: Callable) -> "PsDO":
        return PsDO(self.ring, {n: f(c) for n, c in self.coeffs.items()}, self.lo)

    def with_ring(self, ring, f: Callable = lambda c: c) -> "PsDO":
        return PsDO(ring, {n: f(c) for n, c in self.coeffs.items()}, self.lo)

    def truncate(self, lo: int) -> "PsDO":
        """Forget all orders below ``lo``."""
        return PsDO(self.ring, self.coeffs, max(lo, self.lo))

    # plus / minus / residue ----------------------------------------------
    def plus(self) -> "PsDO":
        if self.lo > 0:
            raise WindowError("plus part needs the window to reach order 0")
        return PsDO(self.ring, {n: c for n, c in self.coeffs.items() if n >= 0})

    def minus(self) -> "PsDO":
        return PsDO(self.ring, {n: c for n, c in self.coeffs.items() if n < 0}, self.lo)

    def split(self) -> tuple["PsDO", "PsDO"]:
        return self.plus(), self.minus()

    def residue(self):
        return self[-1]

    def is_differential(self) -> bool:
        return self.lo <= 0 and all(n >= 0 for n in self.coeffs)

    def apply(self, f):
        """Act on f as a differential operator: sum a_n d^n f / dx^n."""
        if not self.is_differential():
            raise WindowError("only differential operators act on series")
        out = self.ring.zero
        df = f
        for n in range(0, self.order + 1):
            if n:
                df = self.ring.dx(df)
            c = self.coeffs.get(n)
            if c is not None:
                out = out + c * df
        return out

    def symbol(self) -> "Symbol":
        return Symbol(self.ring, self.coeffs, self.lo)


def _is_scalar(x) -> bool:
    from .scalars import is_rational
    return is_rational(x)


class _Derivs:
    """Cache of x-derivatives of one operator's coefficients."""

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.cache = {n: [c] for n, c in coeffs.items()}

    def get(self, n: int, l: int):
        lst = self.cache[n]
        while len(lst) <= l:
            lst.append(self.ring.dx(lst[-1]))
        return lst[l]


def compose(A: PsDO, B: PsDO, lo: int | None = None, hi: int | None = None) -> PsDO:
    """A o B restricted to orders >= lo (and <= hi when given).

    Uses d^n o b = sum_l binom(n, l) b^(l) d^(n-l); for n >= 0 the sum stops
    at l = n.  Orders above ``hi`` are simply not computed, so a result
    requested with ``hi`` is only meant for reading single coefficients.
    """
    ring = A.ring
    if not A.coeffs or not B.coeffs:
        lo0 = max(A.lo + B.order, B.lo + A.order)
        return PsDO(ring, {}, lo0 if lo0 > EXACT // 2 else EXACT)
    mA, mB = A.order, B.order
    exact_lo = max(A.lo + mB, B.lo + mA)
    finite = exact_lo <= EXACT // 2
    if lo is None:
        if not finite:
            lo = exact_lo
        elif min(A.coeffs) >= 0:
            lo = min(B.coeffs)
        else:
            raise WindowError("exact operator with negative orders: pass lo")
    lo_out = lo if finite else max(lo, exact_lo)
    top = mA + mB if hi is None else min(hi, mA + mB)
    derivs = _Derivs(ring, B.coeffs)
    out: dict[int, object] = {}
    for n, a in A.coeffs.items():
        for t in range(lo_out, min(n + mB, top) + 1):
            acc = None
            for m in B.coeffs:
                l = n + m - t
                if l < 0 or (n >= 0 and l > n):
                    continue
                c = binom(n, l)
                if not c:
                    continue
                term = derivs.get(m, l)
                if c != 1:
                    term = term * c
                acc = term if acc is None else acc + term
            if acc:
                prod = a * acc
                out[t] = out[t] + prod if t in out else prod
    natural = finite and min(A.coeffs) >= 0 and lo_out <= min(B.coeffs)
    return PsDO(ring, out, EXACT if natural else lo_out)


def commutator(A: PsDO, B: PsDO, lo: int | None = None) -> PsDO:
    return compose(A, B, lo) - compose(B, A, lo)


def power(A: PsDO, n: int, lo: int | None = None) -> PsDO:
    if n < 1:
        raise ValueError("power needs n >= 1")
    out = A
    for k in range(1, n):
        # A^k o A is exact one order of A above the window of A^k
        step = None if lo is None else lo - (n - k - 1) * A.order
        out = compose(out, A, step)
    return out


def _check_monic(A: PsDO, m: int):
    if A.order != m or A.coeffs.get(m) != A.ring.one:
        raise ValueError(f"operator is not monic of order {m}")


def rth_root(A: PsDO, r: int, depth: int) -> PsDO:
    """The unique d + sum_{k=0}^{depth} q_k d^{-k} whose r-th power is A."""
    _check_monic(A, r)
    if A.lo > r - 1 - depth:
        raise WindowError(f"input known only down to order {A.lo}; root depth {depth} "
                          f"needs order {r - 1 - depth}")
    ring = A.ring
    q: dict[int, object] = {1: ring.one}
    for k in range(0, depth + 1):
        t = r - 1 - k
        cur = PsDO(ring, q)
        # [cur^r]_t: build cur^(r-1) down to order t-1, then read one order.
        P = cur
        for j in range(2, r):
            P = compose(P, cur, lo=t - 1 - (r - 1 - j), hi=None)
        known = compose(P, cur, lo=t, hi=t)[t] if r > 1 else ring.zero
        val = (A[t] - known) * Q(1, r)
        if val:
            q[-k] = val
    return PsDO(ring, q, -depth)


def inverse(A: PsDO, depth: int) -> PsDO:
    """Inverse of a monic operator of order m, down to order -m-depth."""
    m = A.order
    _check_monic(A, m)
    ring = A.ring
    b: dict[int, object] = {-m: ring.one}
    for k in range(1, depth + 1):
        t = -k
        cur = PsDO(ring, b)
        val = compose(A, cur, lo=t, hi=t)[t]
        if val:
            b[-m - k] = -val
    return PsDO(ring, b, -m - depth)


def power_frac(A: PsDO, n: int, r: int, depth: int, root: PsDO | None = None) -> PsDO:
    """A^{n/r}.  For r | n and n > 0 this is an exact integer power."""
    if n > 0 and n % r == 0:
        return power(A, n // r)
    if root is None:
        root = rth_root(A, r, depth)
    if n < 0:
        inv = inverse(root, depth)
        return power(inv, -n, lo=-depth + n)
    m, b = divmod(n, r)
    out = power(root, b)
    for _ in range(m):
        out = compose(A, out)
    return out


class Symbol:
    """Laurent series in z with ring coefficients (the symbol of an operator).

    Products here are commutative pointwise products of symbols, not
    operator compositions.
    """

    __slots__ = ("ring", "coeffs", "lo")

    def __init__(self, ring, coeffs: Mapping[int, object], lo: int = EXACT):
        self.ring = ring
        self.lo = lo
        self.coeffs = {n: c for n, c in coeffs.items() if n >= lo and c}

    @property
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else self.lo

    def __getitem__(self, n):
        if n < self.lo:
            raise WindowError(f"order {n} below window {self.lo}")
        return self.coeffs.get(n, self.ring.zero)

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        parts = [f"({c})*z^{n}" for n, c in sorted(self.coeffs.items(), reverse=True)]
        return "Symbol(" + (" + ".join(parts) or "0") + ")"

    def __eq__(self, other):
        if not isinstance(other, Symbol):
            return NotImplemented
        lo = max(self.lo, other.lo)
        keys = {n for n in set(self.coeffs) | set(other.coeffs) if n >= lo}
        return all(self[n] == other[n] for n in keys)

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, Symbol):
            other = Symbol(self.ring, {0: other if not _is_scalar(other) else self.ring.const(other)})
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return Symbol(self.ring, out, max(self.lo, other.lo))

    __radd__ = __add__

    def __neg__(self):
        return Symbol(self.ring, {n: -c for n, c in self.coeffs.items()}, self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Symbol):
            return Symbol(self.ring, {n: c * other for n, c in self.coeffs.items()}, self.lo)
        if not self.coeffs or not other.coeffs:
            return Symbol(self.ring, {}, max(self.lo + other.order, other.lo + self.order))
        lo = max(self.lo + other.order, other.lo + self.order)
        out: dict[int, object] = {}
        for n, a in self.coeffs.items():
            for m, b in other.coeffs.items():
                t = n + m
                if t < lo:
                    continue
                p = a * b
                out[t] = out[t] + p if t in out else p
        return Symbol(self.ring, out, lo if lo > EXACT // 2 else EXACT)

    __rmul__ = __mul__

    def truncate(self, lo: int) -> "Symbol":
        return Symbol(self.ring, self.coeffs, max(lo, self.lo))

    def dz(self) -> "Symbol":
        return Symbol(self.ring, {n - 1: c * n for n, c in self.coeffs.items() if n},
                      self.lo - 1 if self.lo > EXACT // 2 else EXACT)

    def dx(self) -> "Symbol":
        return Symbol(self.ring, {n: self.ring.dx(c) for n, c in self.coeffs.items()}, self.lo)

    def map(self, f: Callable) -> "Symbol":
        return Symbol(self.ring, {n: f(c) for n, c in self.coeffs.items()}, self.lo)

    def with_ring(self, ring, f: Callable = lambda c: c) -> "Symbol":
        return Symbol(ring, {n: f(c) for n, c in self.coeffs.items()}, self.lo)

    def plus(self) -> "Symbol":
        if self.lo > 0:
            raise WindowError("plus part needs the window to reach z^0")
        return Symbol(self.ring, {n: c for n, c in self.coeffs.items() if n >= 0})

    def minus(self) -> "Symbol":
        return Symbol(self.ring, {n: c for n, c in self.coeffs.items() if n < 0}, self.lo)

    def subst_z(self, value):
        """Evaluate at z = value; only polynomial (non-negative) symbols allowed."""
        if any(n < 0 for n in self.coeffs) or self.lo > 0:
            raise WindowError("substitution into a symbol with a negative tail")
        out = self.ring.zero
        for n in range(self.order, -1, -1):  # Horner
            out = out * value + self.coeffs.get(n, self.ring.zero)
        return out

    def to_operator(self) -> PsDO:
        """Replace z by d_x (coefficients placed to the left)."""
        return PsDO(self.ring, self.coeffs, self.lo)

    def power_frac(self, p: int, r: int, depth: int) -> "Symbol":
        """Commutative power S^{p/r} for S = z^r + lower with no z^{r-1} term."""
        if self.order != r or self.coeffs.get(r) != self.ring.one:
            raise ValueError("symbol is not monic of degree r")
        w = Symbol(self.ring, {n - r: c for n, c in self.coeffs.items() if n < r},
                   self.lo - r if self.lo > EXACT // 2 else EXACT)
        if w.coeffs and w.order > -1:
            raise ValueError("symbol has a z^(r-1) or higher lower-order term")
        # (1+w)^(p/r) = sum_k binom(p/r, k) w^k, w of order <= -1
        alpha = Q(p, r)
        acc = Symbol(self.ring, {0: self.ring.one}, -depth)
        wk = Symbol(self.ring, {0: self.ring.one}, -depth)
        coeff = ONE
        k = 0
        while True:
            k += 1
            wk = (wk * w).truncate(-depth)
            if not wk.coeffs:
                break
            coeff = coeff * (alpha - (k - 1)) / k
            if coeff:
                acc = acc + wk * coeff
        return Symbol(self.ring, {n + p: c for n, c in acc.coeffs.items()}, acc.lo + p)

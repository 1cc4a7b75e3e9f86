"""Truncated multivariate power series with Laurent dependence on epsilon.

A ``TSeries`` lives in a ``SeriesSpace``: an ordered variable list together
with a flag per variable saying whether it counts toward the truncation
degree.  The series is exact for every monomial whose graded degree is at
most ``cap`` and carries no information above it.  Ungraded variables (the
hierarchy solver uses ``T1`` this way) are kept exactly, so they must only
ever occur polynomially.

Monomials are packed into a single int: epsilon occupies the low slot with
an offset, variable ``i`` occupies slot ``i + 1``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping

from . import kernels
from .scalars import ONE, ZERO, CycScalar, Q, is_rational

SLOT = 16
MASK = (1 << SLOT) - 1
EPS_OFF = 1 << (SLOT - 1)


class TruncationError(ValueError):
    pass


class SeriesSpace:
    def __init__(self, names: Iterable[str], graded: Iterable[bool] | None = None,
                 x: str | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.graded = tuple(graded) if graded is not None else (True,) * len(self.names)
        if len(self.graded) != len(self.names):
            raise ValueError("graded mask length mismatch")
        self.x = x
        self._graded_shifts = [SLOT * (i + 1) for i, g in enumerate(self.graded) if g]
        self._deg_cache: dict[int, int] = {}

    def __eq__(self, other):
        return (isinstance(other, SeriesSpace) and self.names == other.names
                and self.graded == other.graded and self.x == other.x)

    def __hash__(self):
        return hash((self.names, self.graded, self.x))

    def __repr__(self):
        return f"SeriesSpace({list(self.names)})"

    def shift(self, name: str) -> int:
        return SLOT * (self.index[name] + 1)

    def is_graded(self, name: str) -> bool:
        return self.graded[self.index[name]]

    def pack(self, eps: int, exps: Iterable[int]) -> int:
        key = eps + EPS_OFF
        for i, e in enumerate(exps):
            if e < 0 or e > MASK:
                raise ValueError(f"exponent {e} out of range")
            key |= e << (SLOT * (i + 1))
        return key

    def unpack(self, key: int) -> tuple[int, tuple[int, ...]]:
        eps = (key & MASK) - EPS_OFF
        exps = tuple((key >> (SLOT * (i + 1))) & MASK for i in range(len(self.names)))
        return eps, exps

    def degree(self, key: int) -> int:
        d = self._deg_cache.get(key)
        if d is None:
            base = key >> SLOT << SLOT
            d = self._deg_cache.get(base)
            if d is None:
                d = sum((key >> s) & MASK for s in self._graded_shifts)
                self._deg_cache[base] = d
            self._deg_cache[key] = d
        return d

    def exponent(self, key: int, name: str) -> int:
        return (key >> self.shift(name)) & MASK

    @staticmethod
    def eps_of(key: int) -> int:
        return (key & MASK) - EPS_OFF


class TSeries:
    __slots__ = ("space", "terms", "cap", "_buckets")

    def __init__(self, space: SeriesSpace, terms: Mapping[int, object] | None = None,
                 cap: int = 0, *, clean: bool = True):
        self.space = space
        self.cap = cap
        if terms is None:
            terms = {}
        elif clean:
            deg = space.degree
            terms = {k: v for k, v in terms.items() if v and deg(k) <= cap}
        self.terms = terms
        self._buckets = None

    # construction ----------------------------------------------------
    @classmethod
    def zero(cls, space, cap):
        return cls(space, {}, cap, clean=False)

    @classmethod
    def const(cls, space, c, cap, eps=0):
        return cls(space, {space.pack(eps, (0,) * len(space.names)): _scalar(c)}, cap)

    @classmethod
    def var(cls, space, name, cap, coeff=1):
        exps = [0] * len(space.names)
        exps[space.index[name]] = 1
        return cls(space, {space.pack(0, exps): _scalar(coeff)}, cap)

    @classmethod
    def monomial(cls, space, exps: Mapping[str, int], cap, coeff=1, eps=0):
        v = [0] * len(space.names)
        for n, e in exps.items():
            v[space.index[n]] = e
        return cls(space, {space.pack(eps, v): _scalar(coeff)}, cap)

    @classmethod
    def from_items(cls, space, items: Mapping[tuple, object], cap):
        """``items`` maps ``(eps, exponent_tuple)`` to coefficients."""
        terms: dict[int, object] = {}
        for (eps, exps), c in items.items():
            k = space.pack(eps, exps)
            terms[k] = terms.get(k, 0) + _scalar(c)
        return cls(space, terms, cap)

    def _new(self, terms, cap=None, clean=True):
        return TSeries(self.space, terms, self.cap if cap is None else cap, clean=clean)

    # basic protocol ----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return f"TSeries(0, cap={self.cap})"
        parts = []
        for (eps, exps), c in sorted(self.items()):
            mono = [f"{n}^{e}" if e > 1 else n for n, e in zip(self.space.names, exps) if e]
            if eps:
                mono.insert(0, f"eps^{eps}")
            parts.append(f"{c}" + ("*" + "*".join(mono) if mono else ""))
        body = " + ".join(parts[:12]) + (" + ..." if len(parts) > 12 else "")
        return f"TSeries({body}, cap={self.cap})"

    def items(self):
        unpack = self.space.unpack
        for k, c in self.terms.items():
            yield unpack(k), c

    def _check(self, other):
        if other.space != self.space:
            raise TruncationError(f"incompatible spaces {self.space} vs {other.space}")

    def __eq__(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            cap = min(self.cap, other.cap)
            return (self.truncate(cap) - other.truncate(cap)).terms == {}
        if is_rational(other) or isinstance(other, CycScalar):
            return self == TSeries.const(self.space, other, self.cap)
        return NotImplemented

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, TSeries):
            if other == 0:
                return self
            other = TSeries.const(self.space, other, self.cap)
        self._check(other)
        cap = min(self.cap, other.cap)
        acc = dict(self.terms)
        kernels.axpy(acc, other.terms, 1)
        return self._new(acc, cap)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()}, clean=False)

    def __sub__(self, other):
        if not isinstance(other, TSeries):
            return self + (-_scalar(other))
        self._check(other)
        acc = dict(self.terms)
        kernels.axpy(acc, other.terms, -1)
        return self._new(acc, min(self.cap, other.cap))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            cap = min(self.cap, other.cap)
            return self._new(self.mul_window(other, 0, cap), cap, clean=True)
        if other == 0:
            return self._new({}, clean=False)
        other = _scalar(other)
        return self._new({k: c * other for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TSeries):
            return self * other.inverse()
        inv = ONE / other if is_rational(other) else other.inverse()
        return self * inv

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = TSeries.const(self.space, 1, self.cap)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # graded structure --------------------------------------------------
    def buckets(self):
        if self._buckets is None:
            deg = self.space.degree
            groups: dict[int, tuple[list, list]] = {}
            for k, c in self.terms.items():
                g = groups.setdefault(deg(k), ([], []))
                g[0].append(k)
                g[1].append(c)
            self._buckets = [(d, ks, cs) for d, (ks, cs) in sorted(groups.items())]
        return self._buckets

    def mul_window(self, other: "TSeries", lo: int, hi: int) -> dict:
        """Raw product terms with graded degree in [lo, hi]."""
        out = kernels.mul_buckets(self.buckets(), other.buckets(), lo, hi, EPS_OFF)
        return {k: v for k, v in out.items() if v}

    def layer(self, d: int) -> "TSeries":
        deg = self.space.degree
        return self._new({k: c for k, c in self.terms.items() if deg(k) == d}, clean=False)

    def truncate(self, cap: int) -> "TSeries":
        if cap >= self.cap:
            return self
        return self._new(self.terms, cap)

    def with_cap(self, cap: int) -> "TSeries":
        """Re-declare the exactness bound (only valid if the caller knows it)."""
        return TSeries(self.space, self.terms, cap)

    def min_degree(self) -> int | None:
        b = self.buckets()
        return b[0][0] if b else None

    def max_degree(self) -> int | None:
        b = self.buckets()
        return b[-1][0] if b else None

    # calculus ----------------------------------------------------------
    def diff(self, name: str, times: int = 1) -> "TSeries":
        out = self
        shift = self.space.shift(name)
        graded = self.space.is_graded(name)
        for _ in range(times):
            out = out._new(kernels.diff_slot(out.terms, shift, MASK),
                           out.cap - 1 if graded else out.cap, clean=False)
        return out

    def dx(self) -> "TSeries":
        return self.diff(self.space.x)

    def integrate(self, name: str) -> "TSeries":
        """Antiderivative in ``name`` with zero constant term in that variable."""
        shift = self.space.shift(name)
        step = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & MASK
            out[k + step] = c / (e + 1)
        return self._new(out)

    def euler_eps(self) -> "TSeries":
        """eps d/d eps."""
        return self._new({k: c * ((k & MASK) - EPS_OFF) for k, c in self.terms.items()})

    def euler(self, names: Iterable[str] | None = None) -> "TSeries":
        """sum_i T_i d/dT_i over the given variables (all by default)."""
        idx = range(len(self.space.names)) if names is None else \
            [self.space.index[n] for n in names]
        shifts = [SLOT * (i + 1) for i in idx]
        out = {}
        for k, c in self.terms.items():
            w = sum((k >> s) & MASK for s in shifts)
            if w:
                out[k] = c * w
        return self._new(out, clean=False)

    # epsilon structure -----------------------------------------------
    def eps_powers(self) -> list[int]:
        return sorted({(k & MASK) - EPS_OFF for k in self.terms})

    def eps_shift(self, p: int) -> "TSeries":
        return self._new({k + p: c for k, c in self.terms.items()}, clean=False)

    def eps_coefficient(self, p: int) -> "TSeries":
        """Coefficient of eps^p, returned as an eps-free series."""
        return self._new({k - p: c for k, c in self.terms.items()
                          if (k & MASK) - EPS_OFF == p}, clean=False)

    def eps_component(self, g: int) -> "TSeries":
        """Genus stratum: the coefficient of eps^(g-1)."""
        return self.eps_coefficient(g - 1)

    def eps_free(self) -> bool:
        return all((k & MASK) == EPS_OFF for k in self.terms)

    # evaluation --------------------------------------------------------
    def coefficient(self, exps: Mapping[str, int] | Iterable[int], eps: int = 0):
        if isinstance(exps, Mapping):
            v = [0] * len(self.space.names)
            for n, e in exps.items():
                v[self.space.index[n]] = e
            exps = v
        return self.terms.get(self.space.pack(eps, exps), ZERO)

    def set_zero(self, names: Iterable[str]) -> "TSeries":
        """Restrict to the locus where the given variables vanish."""
        mask = 0
        for n in names:
            mask |= MASK << self.space.shift(n)
        return self._new({k: c for k, c in self.terms.items() if not k & mask}, clean=False)

    def map_coefficients(self, f) -> "TSeries":
        return self._new({k: f(c) for k, c in self.terms.items()})

    # exp / log -----------------------------------------------------------
    def _layers(self):
        return {d: TSeries(self.space, dict(zip(ks, cs)), self.cap, clean=False)
                for d, ks, cs in self.buckets()}

    def log(self) -> "TSeries":
        """log of a series whose graded-degree-0 part is exactly 1."""
        layers = self._layers()
        one = TSeries.const(self.space, 1, self.cap)
        if layers.get(0, TSeries.zero(self.space, self.cap)).terms != one.terms:
            raise ValueError("log requires the degree-0 part to be exactly 1")
        # d * log_d = d * A_d - sum_{j<d} j log_j A_{d-j}  (Euler grading)
        out: dict[int, TSeries] = {}
        for d in range(1, self.cap + 1):
            acc = dict(layers[d].terms) if d in layers else {}
            for j in range(1, d):
                if j in out and (d - j) in layers:
                    kernels.axpy(acc, out[j].mul_window(layers[d - j], d, d), Q(-j, d))
            out[d] = TSeries(self.space, acc, self.cap)
        terms: dict = {}
        for s in out.values():
            terms.update(s.terms)
        return self._new(terms, clean=False)

    def exp(self) -> "TSeries":
        """exp of a series with vanishing graded-degree-0 part."""
        layers = self._layers()
        if 0 in layers and layers[0].terms:
            raise ValueError("exp requires a vanishing degree-0 part")
        out = {0: TSeries.const(self.space, 1, self.cap)}
        for d in range(1, self.cap + 1):
            acc: dict = {}
            for j in range(1, d + 1):
                if j in layers and (d - j) in out:
                    kernels.axpy(acc, layers[j].mul_window(out[d - j], d, d), Q(j, d))
            out[d] = TSeries(self.space, acc, self.cap)
        terms: dict = {}
        for s in out.values():
            terms.update(s.terms)
        return self._new(terms)

    def inverse(self) -> "TSeries":
        """1/A for A with graded-degree-0 part a nonzero constant."""
        layers = self._layers()
        l0 = layers.get(0)
        if l0 is None or len(l0.terms) != 1 or next(iter(l0.terms)) != self.space.pack(
                0, (0,) * len(self.space.names)):
            raise ValueError("inverse requires a constant degree-0 part")
        c0 = next(iter(l0.terms.values()))
        inv0 = ONE / c0 if is_rational(c0) else c0.inverse()
        out = {0: TSeries.const(self.space, inv0, self.cap)}
        for d in range(1, self.cap + 1):
            acc: dict = {}
            for j in range(1, d + 1):
                if j in layers:
                    kernels.axpy(acc, layers[j].mul_window(out[d - j], d, d), 1)
            out[d] = TSeries(self.space, acc, self.cap) * (-inv0)
        terms: dict = {}
        for s in out.values():
            terms.update(s.terms)
        return self._new(terms)

    # substitution --------------------------------------------------------
    def subst(self, images: Mapping[str, "TSeries"], target: SeriesSpace,
              cap: int | None = None) -> "TSeries":
        """Linear change of variables into ``target``.

        Each image must be a linear form in the target variables whose graded
        degree equals that of the source variable (so truncation commutes
        with substitution); unmapped variables must exist in the target and
        are carried over unchanged.
        """
        cap = self.cap if cap is None else cap
        if cap > self.cap and any(self.space.graded):
            raise TruncationError("substitution cannot raise the exactness bound")
        forms = []
        for i, name in enumerate(self.space.names):
            img = images.get(name)
            if img is None:
                if name not in target.index:
                    raise KeyError(f"no image for {name}")
                img = TSeries.var(target, name, cap)
            if img.space != target:
                raise TruncationError("image lives in the wrong space")
            want = 1 if self.space.graded[i] else 0
            form = []
            for k, c in img.terms.items():
                if target.degree(k) != want or (k & MASK) != EPS_OFF or \
                        sum(target.unpack(k)[1]) != 1:
                    raise TruncationError(f"image of {name} is not linear: {img}")
                form.append((k - EPS_OFF, c))
            forms.append(form)
        return self._linear_map(forms, target, cap)

    def _linear_map(self, forms, target: SeriesSpace, cap: int) -> "TSeries":
        # forms[i]: list of (packed target monomial without eps offset, scalar)
        deg = target.degree
        expand: dict[tuple[int, int], dict[int, object]] = {}

        def power(i, e):
            got = expand.get((i, e))
            if got is None:
                if e == 0:
                    got = {0: ONE}
                else:
                    prev = power(i, e - 1)
                    got = {}
                    for k1, c1 in prev.items():
                        for k2, c2 in forms[i]:
                            k = k1 + k2
                            got[k] = got.get(k, 0) + c1 * c2
                    got = {k: c for k, c in got.items() if c}
                expand[(i, e)] = got
            return got

        acc: dict = {}
        n = len(self.space.names)
        for key, c in self.terms.items():
            partial = {key & MASK: c}
            for i in range(n):
                e = (key >> (SLOT * (i + 1))) & MASK
                if not e:
                    continue
                nxt: dict = {}
                for k1, c1 in partial.items():
                    for k2, c2 in power(i, e).items():
                        k = k1 + k2
                        if deg(k) <= cap:
                            nxt[k] = nxt.get(k, 0) + c1 * c2
                partial = nxt
                if not partial:
                    break
            kernels.axpy(acc, partial, 1)
        return TSeries(target, acc, cap)

    def rescale(self, images: Mapping[str, tuple[str, object]], target: SeriesSpace,
                cap: int | None = None) -> "TSeries":
        """Fast path of ``subst`` for images of the form ``scalar * variable``."""
        cap = self.cap if cap is None else cap
        plan = []
        for name in self.space.names:
            tname, scale = images.get(name, (name, 1))
            plan.append((target.shift(tname), scale))
        acc: dict = {}
        pw: dict = {}
        for k, c in self.terms.items():
            key = k & MASK
            coeff = c
            for i, (tshift, scale) in enumerate(plan):
                e = (k >> (SLOT * (i + 1))) & MASK
                if e:
                    key += e << tshift
                    f = pw.get((i, e))
                    if f is None:
                        f = pw[(i, e)] = _pow(scale, e)
                    coeff = coeff * f
            if target.degree(key) <= cap:
                acc[key] = acc.get(key, 0) + coeff
        return TSeries(target, acc, cap)

    # serialization ---------------------------------------------------------
    def to_json_obj(self) -> dict:
        grouped: dict[tuple, list] = {}
        for (eps, exps), c in self.items():
            grouped.setdefault(exps, []).append((eps, c))
        terms = []
        for exps in sorted(grouped):
            entries = []
            for eps, c in sorted(grouped[exps], key=lambda t: t[0]):
                if isinstance(c, CycScalar):
                    entries.append({"power": eps, "zeta_coeffs": c.to_json()})
                else:
                    entries.append({"power": eps, "num": str(c.numerator),
                                    "den": str(c.denominator)})
            terms.append({"exponents": list(exps), "eps": entries})
        return {"varset": list(self.space.names), "graded": list(self.space.graded),
                "x": self.space.x, "degreeCap": self.cap, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict, space: SeriesSpace | None = None, r: int | None = None):
        if space is None:
            space = SeriesSpace(obj["varset"], obj.get("graded"), obj.get("x"))
        items = {}
        for t in obj["terms"]:
            exps = tuple(t["exponents"])
            for e in t["eps"]:
                if "zeta_coeffs" in e:
                    zc = e["zeta_coeffs"]
                    c = CycScalar(r or len(zc) // 2 - 1, [Q(int(n), int(d)) for n, d in zc])
                else:
                    c = Q(int(e["num"]), int(e["den"]))
                items[(e["power"], exps)] = c
        return cls.from_items(space, items, obj["degreeCap"])

    @classmethod
    def from_json(cls, text: str, **kw):
        return cls.from_json_obj(json.loads(text), **kw)


def _scalar(c):
    if isinstance(c, (int, Fraction)):
        return Q(c)
    return c


def _pow(x, e):
    out = ONE
    for _ in range(e):
        out = out * x
    return out


def eps_component(a: TSeries, g: int) -> TSeries:
    return a.eps_component(g)

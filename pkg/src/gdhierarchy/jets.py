"""Abstract jet polynomials and the differential-degree decomposition.

Generators ``f{j}_{k}`` stand for the k-th x-derivative of the coefficient
of d_x^j in L_0 (j <= r-2); ``g{j}_{k}`` play the same role for L_1.  The
derivation sends ``f{j}_{k}`` to ``f{j}_{k+1}``; a monomial's differential
degree is the sum of its k's weighted by multiplicity.

Jet polynomials are ``TSeries`` over ungraded generator variables, so the
whole ``psdo`` machinery applies to them unchanged.  A JetPoly in the
z-Laurent sense is simply a ``Symbol`` over a ``JetRing``.
"""
from __future__ import annotations

from typing import Mapping

from .psdo import EXACT, PsDO, SeriesRing, Symbol, power_frac
from .series import MASK, SLOT, SeriesSpace, TSeries


class JetOverflow(ValueError):
    pass


class JetRing:
    def __init__(self, r: int, kmax: int, with_l1: bool = False):
        self.r = r
        self.kmax = kmax
        self.with_l1 = with_l1
        families = ["f", "g"] if with_l1 else ["f"]
        names = [f"{fam}{j}_{k}" for fam in families for j in range(r - 1)
                 for k in range(kmax + 1)]
        self.space = SeriesSpace(names, [False] * len(names))
        self.zero = TSeries.zero(self.space, 0)
        self.one = TSeries.const(self.space, 1, 0)
        # (shift, shift of derivative or None, differential weight) per generator
        self._slots = []
        for name in names:
            fam_j, k = name.split("_")
            k = int(k)
            nxt = f"{fam_j}_{k + 1}" if k < kmax else None
            self._slots.append((self.space.shift(name),
                                self.space.shift(nxt) if nxt else None, k))

    def __eq__(self, other):
        return isinstance(other, JetRing) and other.space == self.space

    def __hash__(self):
        return hash(self.space)

    def const(self, c, eps: int = 0):
        return TSeries.const(self.space, c, 0)

    def gen(self, family: str, j: int, k: int = 0) -> TSeries:
        if k > self.kmax:
            raise JetOverflow(f"derivative order {k} exceeds kmax={self.kmax}")
        return TSeries.var(self.space, f"{family}{j}_{k}", 0)

    def dx(self, a: TSeries) -> TSeries:
        out: dict[int, object] = {}
        for key, c in a.terms.items():
            for shift, nshift, _ in self._slots:
                e = (key >> shift) & MASK
                if e:
                    if nshift is None:
                        raise JetOverflow(f"jet derivative beyond kmax={self.kmax}")
                    k2 = key - (1 << shift) + (1 << nshift)
                    out[k2] = out.get(k2, 0) + c * e
        return TSeries(self.space, out, 0)

    def diff_degree(self, key: int) -> int:
        return sum(((key >> s) & MASK) * w for s, _, w in self._slots)

    def degree_part(self, a: TSeries, m: int) -> TSeries:
        return TSeries(self.space, {k: c for k, c in a.terms.items()
                                    if self.diff_degree(k) == m}, 0, clean=False)


def L0_symbol(ring: JetRing) -> Symbol:
    coeffs = {ring.r: ring.one}
    for j in range(ring.r - 1):
        coeffs[j] = ring.gen("f", j)
    return Symbol(ring, coeffs)


def L1_symbol(ring: JetRing) -> Symbol:
    if not ring.with_l1:
        raise ValueError("ring was built without L1 generators")
    return Symbol(ring, {j: ring.gen("g", j) for j in range(ring.r - 1)})


def L0_operator(ring: JetRing) -> PsDO:
    return L0_symbol(ring).to_operator()


def jet_power(a: int, ring: JetRing, depth: int) -> Symbol:
    """Symbol of the operator power L_0^{a/r}, orders >= a - depth."""
    return power_frac(L0_operator(ring), a, ring.r, depth).symbol()


def diff_degree_part(J: Symbol, m: int, plus_only: bool = False) -> Symbol:
    ring = J.ring
    out = {n: ring.degree_part(c, m) for n, c in J.coeffs.items()
           if not plus_only or n >= 0}
    lo = J.lo if not plus_only else (EXACT if J.lo <= 0 else J.lo)
    return Symbol(ring, out, lo)


def jet_values(target: SeriesRing, L0: Mapping[int, TSeries], kmax: int,
               L1: Mapping[int, TSeries] | None = None, r: int | None = None) -> dict:
    """Concrete values for each generator from solved coefficient series."""
    vals = {}
    for fam, coeffs in (("f", L0), ("g", L1 or {})):
        for j, c in coeffs.items():
            cur = c
            for k in range(kmax + 1):
                vals[f"{fam}{j}_{k}"] = cur
                if k < kmax:
                    cur = target.dx(cur)
    if r is not None:
        fams = ("f", "g") if L1 is not None else ("f",)
        for fam in fams:
            for j in range(r - 1):
                for k in range(kmax + 1):
                    vals.setdefault(f"{fam}{j}_{k}", target.zero)
    return vals


def evaluate(poly: TSeries, values: Mapping[str, TSeries], target: SeriesRing) -> TSeries:
    """Substitute concrete series for the generators of one jet polynomial."""
    space = poly.space
    used = []
    for i, name in enumerate(space.names):
        shift = SLOT * (i + 1)
        if any((k >> shift) & MASK for k in poly.terms):
            if name not in values:
                raise KeyError(f"no value supplied for generator {name}")
            used.append((shift, name))
    cache: dict[tuple[str, int], TSeries] = {}

    def pw(name, e):
        v = cache.get((name, e))
        if v is None:
            v = values[name] if e == 1 else pw(name, e - 1) * values[name]
            cache[(name, e)] = v
        return v

    out = target.zero
    for key, c in poly.terms.items():
        term = None
        for shift, name in used:
            e = (key >> shift) & MASK
            if e:
                p = pw(name, e)
                term = p if term is None else term * p
        out = out + (target.const(c) if term is None else term * c)
    return out


def substitute_jets(J: Symbol, values: Mapping[str, TSeries], target: SeriesRing) -> Symbol:
    return Symbol(target, {n: evaluate(c, values, target) for n, c in J.coeffs.items()}, J.lo)

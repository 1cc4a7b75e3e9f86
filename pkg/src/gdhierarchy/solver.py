"""Gelfand-Dickey flows integrated from the initial operator d^r + r eps^{-r} x.

Time variables are T1..TN with x = T1.  T1 is kept as an exact polynomial
variable; truncation counts only the degree in T2..TN.  Quasi-homogeneity
makes every coefficient of a fixed T_{>=2} monomial a polynomial in T1 with
finitely many eps powers, so nothing is lost by not grading T1 or eps.

The operator is built layer by layer in T_{>=2}-degree.  Layer d+1 is read
off from the flows evaluated on layers <= d; every monomial reachable
through several times is computed along each of them and the results must
coincide exactly.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace

from .psdo import PsDO, SeriesRing, compose, rth_root
from .series import MASK, SeriesSpace, TSeries


class ConfigError(ValueError):
    pass


class PathDependence(ArithmeticError):
    pass


class PatternViolation(ArithmeticError):
    pass


@dataclass(frozen=True)
class TruncationSpec:
    r: int
    N: int
    D: int
    G: int = 1
    M: int | None = None
    J: int = 2

    def __post_init__(self):
        if self.r < 2:
            raise ConfigError("r must be at least 2")
        if self.N < 1 or self.D < 0 or self.G < 0 or self.J < 0:
            raise ConfigError("N >= 1 and D, G, J >= 0 are required")
        if self.M is None:
            object.__setattr__(self, "M", max(2 * self.r + self.D + 2, self.N + 1))
        if self.M < self.N:
            raise ConfigError(f"depth M={self.M} cannot resolve residues up to n={self.N}")

    def require_dilaton(self):
        if self.N < self.r + 1:
            raise ConfigError(f"dilaton checks need T_{self.r + 1}; state was solved with N={self.N}")

    def times(self) -> list[str]:
        return [f"T{i}" for i in range(1, self.N + 1)]

    def space(self) -> SeriesSpace:
        return SeriesSpace(self.times(), [i > 1 for i in range(1, self.N + 1)], x="T1")

    def to_json_obj(self) -> dict:
        return asdict(self)


def initial_L(spec: TruncationSpec, ring: SeriesRing | None = None) -> PsDO:
    ring = ring or SeriesRing(spec.space(), spec.D)
    x = TSeries.var(ring.space, "T1", ring.cap, coeff=spec.r).eps_shift(-spec.r)
    return PsDO(ring, {spec.r: ring.one, 0: x})


def truncate_op(A: PsDO, cap: int) -> PsDO:
    return A.map(lambda c: c.truncate(cap))


def fractional_powers(L: PsDO, r: int, N: int, depth: int, need_lo: int = 0) -> dict[int, PsDO]:
    """L^{n/r} for n = 1..N, each exact at orders >= need_lo.

    Uses L^{(mr+b)/r} = L^m o Q^b, Q = L^{1/r}: composing with the differential
    operator L is much cheaper than composing two infinite tails.
    """
    need = {n: need_lo - r * ((N - n) // r) for n in range(1, N + 1)}
    # Q^n is built as Q^{n-1} o Q, so each lower power must reach one order deeper.
    for n in range(min(r, N + 1) - 2, 0, -1):
        need[n] = min(need[n], need[n + 1] - 1)
    root_depth = max([n - 1 - need[n] for n in range(1, min(r, N + 1))] + [0])
    if root_depth > depth:
        raise ConfigError(f"depth {depth} too small; need {root_depth}")
    Q = rth_root(L, r, root_depth)
    pw: dict[int, PsDO] = {}
    for n in range(1, N + 1):
        if n < r:
            pw[n] = Q if n == 1 else compose(pw[n - 1], Q, lo=need[n])
        elif n == r:
            pw[n] = L
        else:
            pw[n] = compose(L, pw[n - r], lo=need[n])
    return pw


def flow_rhs(L: PsDO, n: int, r: int, P: PsDO | None = None) -> PsDO:
    """eps^{n-1} [(L^{n/r})_+, L]; orders >= r-1 must cancel."""
    if P is None:
        P = fractional_powers(L, r, n, n)[n].plus()
    comm = compose(P, L) - compose(L, P)
    bad = [i for i, c in comm.coeffs.items() if i >= r - 1 and c]
    if bad:
        raise ArithmeticError(f"flow {n}: commutator has nonzero order(s) {bad}")
    return comm.map(lambda c: c.eps_shift(n - 1))


@dataclass
class HierarchyState:
    spec: TruncationSpec
    L: PsDO
    provenance: dict = field(default_factory=dict)

    @property
    def space(self) -> SeriesSpace:
        return self.L.ring.space

    @property
    def ring(self) -> SeriesRing:
        return self.L.ring

    def f(self, i: int) -> TSeries:
        return self.L[i]

    def powers(self, need_lo: int = -1, N: int | None = None) -> dict[int, PsDO]:
        """Cached L^{n/r}, n <= N, exact to order need_lo."""
        N = N or self.spec.N
        cache = self.__dict__.setdefault("_pw_cache", {})
        key = (need_lo, N)
        if key not in cache:
            cache[key] = fractional_powers(self.L, self.spec.r, N, self.spec.M, need_lo)
        return cache[key]

    def plus_parts(self) -> dict[int, PsDO]:
        return {n: P.plus() for n, P in self.powers(0).items()}

    def strata(self, J: int | None = None) -> list[PsDO]:
        return stratify(self, J)

    def to_json_obj(self) -> dict:
        return {
            "format": "gdhierarchy-state",
            "version": 1,
            "spec": self.spec.to_json_obj(),
            "L": {str(i): c.to_json_obj() for i, c in sorted(self.L.coeffs.items())
                  if i < self.spec.r},
            "provenance": self.provenance,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "HierarchyState":
        if obj.get("format") != "gdhierarchy-state":
            raise ConfigError("not a hierarchy state file")
        spec = TruncationSpec(**obj["spec"])
        space = spec.space()
        ring = SeriesRing(space, spec.D)
        coeffs = {spec.r: ring.one}
        for i, c in obj["L"].items():
            coeffs[int(i)] = TSeries.from_json_obj(c, space=space)
        return cls(spec, PsDO(ring, coeffs), dict(obj.get("provenance", {})))


def _integrate_layer(rhs: dict[int, TSeries], d: int, space: SeriesSpace, what: str) -> dict:
    """Assemble layer d+1 from layer-d flow values, checking every path."""
    out: dict[int, object] = {}
    origin: dict[int, int] = {}
    layers = {n: val.layer(d).terms for n, val in rhs.items()}
    for n, terms in layers.items():
        shift = space.shift(f"T{n}")
        step = 1 << shift
        for key, c in terms.items():
            k2 = key + step
            e = ((k2 >> shift) & MASK)
            v = c / e
            if k2 in out:
                if out[k2] != v:
                    eps, exps = space.unpack(k2)
                    raise PathDependence(
                        f"{what}: monomial eps^{eps} {dict(zip(space.names, exps))} "
                        f"differs between T{origin[k2]} and T{n}")
            else:
                out[k2] = v
                origin[k2] = n
    # A monomial containing T_n but missing from flow n must vanish along the others.
    for k2, v in out.items():
        for n in rhs:
            shift = space.shift(f"T{n}")
            if (k2 >> shift) & MASK and n != origin[k2]:
                key = k2 - (1 << shift)
                if not layers[n].get(key):
                    eps, exps = space.unpack(k2)
                    raise PathDependence(
                        f"{what}: monomial eps^{eps} {dict(zip(space.names, exps))} "
                        f"reached by T{origin[k2]} but not by T{n}")
    return out


def solve_jets(spec: TruncationSpec, resume: HierarchyState | None = None,
               log=None) -> HierarchyState:
    space = spec.space()
    ring = SeriesRing(space, spec.D)
    r = spec.r
    start = 0
    if resume is not None:
        L = _embed(resume, spec, ring)
        if resume.spec.N == spec.N and resume.spec.r == r:
            start = min(resume.spec.D, spec.D)
    else:
        L = initial_L(spec, ring)
    flows = [n for n in range(2, spec.N + 1) if n % r]
    trivial = [n for n in range(2, spec.N + 1) if n % r == 0]
    t0 = time.perf_counter()
    for d in range(start, spec.D):
        Ld = truncate_op(L, d)
        plus = {n: P.plus() for n, P in
                fractional_powers(Ld, r, spec.N, spec.M, 0).items()}
        rhs_ops = {n: flow_rhs(Ld, n, r, plus[n]) for n in flows + trivial}
        for n in trivial:
            if any(rhs_ops[n].coeffs.values()):
                raise ArithmeticError(f"flow T{n} is not trivial")
        new = {}
        for i in range(r - 1):
            rhs = {n: rhs_ops[n][i] for n in flows}
            new[i] = _integrate_layer(rhs, d, space, f"f{i}")
        coeffs = {r: ring.one}
        for i in range(r - 1):
            keep = {k: c for k, c in L[i].terms.items() if space.degree(k) <= d}
            keep.update(new[i])
            coeffs[i] = TSeries(space, keep, spec.D)
        L = PsDO(ring, coeffs)
        if log:
            log(f"layer {d + 1}: {sum(len(c) for c in L.coeffs.values())} terms, "
                f"{time.perf_counter() - t0:.1f}s")
    state = HierarchyState(spec, L, {"layers_solved": spec.D, "path_checked": True})
    check_pattern(state)
    return state


def _embed(old: HierarchyState, spec: TruncationSpec, ring: SeriesRing) -> PsDO:
    if old.spec.r != spec.r:
        raise ConfigError("cannot resume with a different r")
    if spec.N < old.spec.N or spec.D < old.spec.D:
        raise ConfigError("resuming can only raise N or D")
    names = ring.space.names
    coeffs = {spec.r: ring.one}
    for i in range(spec.r - 1):
        c = old.L[i]
        items = {(eps, tuple(exps) + (0,) * (len(names) - len(exps))): v
                 for (eps, exps), v in c.items()}
        coeffs[i] = TSeries.from_items(ring.space, items, old.spec.D)
        coeffs[i] = TSeries(ring.space, coeffs[i].terms, spec.D, clean=False)
    return PsDO(ring, coeffs)


def check_pattern(state: HierarchyState):
    """Every f_i has only eps powers >= i - r, and L has no d^{r-1} term."""
    r = state.spec.r
    for i, c in state.L.coeffs.items():
        if i >= r - 1 and i != r:
            raise PatternViolation(f"unexpected order {i} in L")
        if i < r:
            low = [p for p in c.eps_powers() if p < i - r]
            if low:
                raise PatternViolation(f"f{i} has eps^{min(low)} below eps^{i - r}")


def stratify(state: HierarchyState, J: int | None = None) -> list[PsDO]:
    """[L_0, L_1, ..., L_J] with L = sum_j sum_i eps^{i-r+j} f_i^[j] d^i."""
    check_pattern(state)
    r = state.spec.r
    J = state.spec.J if J is None else J
    ring = state.ring
    out = []
    for j in range(J + 1):
        coeffs = {r: ring.one} if j == 0 else {}
        for i in range(r - 1):
            coeffs[i] = state.L[i].eps_coefficient(i - r + j)
        out.append(PsDO(ring, coeffs))
    return out


def reassemble(strata: list[PsDO], r: int) -> PsDO:
    ring = strata[0].ring
    coeffs = {r: ring.one}
    for j, Lj in enumerate(strata):
        for i in range(r - 1):
            c = Lj[i].eps_shift(i - r + j)
            coeffs[i] = coeffs[i] + c if i in coeffs else c
    return PsDO(ring, coeffs)


def save_json(obj: dict, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def with_spec(spec: TruncationSpec, **kw) -> TruncationSpec:
    return replace(spec, **kw)

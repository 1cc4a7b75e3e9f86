"""Residual-based verification of every identity the engine relies on.

Each check computes LHS - RHS as a series (or symbol) and passes only if the
residual is literally zero up to the exactness bound of its inputs.  There are
no tolerances anywhere.
"""
from __future__ import annotations

import random
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from . import jets
from .potentials import (DictionaryMap, HessianMismatch, OpenDiskOracle, compare_closed_with_oracle,
                         conjectural_open_Fg, correlators_of, extended_F0, hessian_table,
                         key_rule, monomial_ks, open_F0, phi_rule, r2_bridge)
from .psdo import PsDO, Symbol
from .scalars import Q
from .series import TSeries
from .solver import (ConfigError, HierarchyState, PatternViolation, check_pattern, reassemble,
                     solve_jets, stratify, with_spec)
from .wave import WaveState, phi_stratum


@dataclass
class CheckReport:
    check: str
    params: dict = field(default_factory=dict)
    status: str = "pass"
    residual_monomials_if_failed: list = field(default_factory=list)
    millis: int = 0
    note: str = ""
    compared: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def zero(self, label: str, value) -> bool:
        """Record one residual; any nonzero content fails the report."""
        self.compared += 1
        bad = _nonzero_terms(value)
        if bad:
            self.status = "fail"
            self.residual_monomials_if_failed += [f"{label}: {t}" for t in bad[:5]]
            return False
        return True

    def expect(self, label: str, ok: bool, detail: str = ""):
        self.compared += 1
        if not ok:
            self.status = "fail"
            self.residual_monomials_if_failed.append(f"{label}: {detail}".rstrip(": "))

    def to_json_obj(self) -> dict:
        out = {"check": self.check, "params": self.params, "status": self.status,
               "residual_monomials_if_failed": self.residual_monomials_if_failed,
               "millis": self.millis, "compared": self.compared}
        if self.note:
            out["note"] = self.note
        return out


def _nonzero_terms(value) -> list[str]:
    if isinstance(value, TSeries):
        return [_fmt_term(value, eps, exps, c) for (eps, exps), c in sorted(value.items())]
    if isinstance(value, (Symbol, PsDO)):
        out = []
        for n, c in sorted(value.coeffs.items()):
            out += [f"z^{n} " + t for t in _nonzero_terms(c)]
        return out
    return [repr(value)] if value else []


def _fmt_term(s: TSeries, eps, exps, c) -> str:
    mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(s.space.names, exps) if e)
    return f"{c} eps^{eps} {mono or '1'}"


@contextmanager
def _timed(rep: CheckReport):
    t0 = time.perf_counter()
    try:
        yield rep
    except (ArithmeticError, ConfigError, KeyError) as exc:
        rep.status = "fail"
        rep.residual_monomials_if_failed.append(f"{type(exc).__name__}: {exc}")
    finally:
        rep.millis = int((time.perf_counter() - t0) * 1000)


# ------------------------------------------------------------------ O operator
class OOperator:
    """O = (1/(r+1)) d/dT_{r+1} - eps d/deps - sum_i T_i d/dT_i."""

    def __init__(self, r: int):
        self.r = r

    def __call__(self, x):
        if isinstance(x, TSeries):
            return (x.diff(f"T{self.r + 1}") * Q(1, self.r + 1)
                    - x.euler_eps() - x.euler())
        if isinstance(x, Symbol):
            return x.map(self)
        if isinstance(x, PsDO):
            return x.map(self)
        raise TypeError(type(x))

    def dilaton_symbol(self, S: Symbol) -> Symbol:
        """(z d/dz + O) applied to a symbol."""
        return Symbol(S.ring, {n: c * n + self(c) for n, c in S.coeffs.items()}, S.lo)


def _var(space, name, cap, coeff=1):
    return TSeries.var(space, name, cap, coeff=coeff)


def _eval_z(S: Symbol, value: TSeries) -> TSeries:
    return S.plus().subst_z(value)


# --------------------------------------------------------------------- string
def check_string(ws: WaveState) -> list[CheckReport]:
    spec = ws.spec
    r, N = spec.r, spec.N
    dmap = DictionaryMap(r, N)
    space = ws.phi.space
    reps = []
    for g in range(0, spec.G + 1):
        phig = phi_stratum(ws, g)
        rep = CheckReport("string", {"form": "T", "genus": g, "r": r})
        with _timed(rep):
            rhs = TSeries.zero(space, phig.cap)
            for k in range(1, N - r + 1):
                rhs = rhs + _var(space, f"T{k + r}", phig.cap, k + r) * phig.diff(f"T{k}")
            if g == 0:
                rhs = rhs + _var(space, f"T{r}", phig.cap, r)
            rep.zero("dphi/dT1 - rhs", phig.diff("T1") - rhs)
        reps.append(rep)

        rep = CheckReport("string", {"form": "t", "genus": g, "r": r})
        with _timed(rep):
            pt = dmap.to_t(phig)
            rep.zero("phi", _string_residual_t(pt, dmap, "t" if g == 0 else None))
        reps.append(rep)

        rep = CheckReport("string", {"form": "open", "genus": g, "r": r,
                                     "conjectural": g >= 1})
        with _timed(rep):
            F = open_F0(ws) if g == 0 else conjectural_open_Fg(ws, g)
            rep.zero("F^o", _string_residual_t(F, dmap, "s" if g == 0 else None))
            if g == 0:
                v = F.coefficient({"t0_0": 1, "s": 1})
                rep.expect("<tau^0_0 sigma>_0 = 1", v == 1, f"got {v}")
        reps.append(rep)
    return reps


def _string_residual_t(F: TSeries, dmap: DictionaryMap, inhom: str | None) -> TSeries:
    r, N = dmap.r, dmap.N
    sp = F.space
    rhs = TSeries.zero(sp, F.cap)
    for k in range(1, N - r + 1):
        rhs = rhs + _var(sp, dmap.t_name(k + r), F.cap) * F.diff(dmap.t_name(k))
    if inhom == "t":
        rhs = rhs + _var(sp, f"t{r - 1}_0", F.cap)
    elif inhom == "s":
        rhs = rhs + _var(sp, "s", F.cap)
    return F.diff("t0_0") - rhs


# -------------------------------------------------------------------- dilaton
def check_dilaton(ws: WaveState, seed: int = 0) -> list[CheckReport]:
    spec = ws.spec
    spec.require_dilaton()
    r, N = spec.r, spec.N
    state = ws.state
    O = OOperator(r)
    dmap = DictionaryMap(r, N)
    reps = []

    rep = CheckReport("dilaton", {"part": "O Phi = Phi/2", "r": r})
    with _timed(rep):
        rep.zero("O Phi - Phi/2", O(ws.Phi) - ws.Phi * Q(1, 2))
        base = (ws.Phi.diff(f"T{r + 1}") * Q(1, r + 1)).set_zero(spec.times()[1:])
        rep.zero("(1/(r+1)) dPhi/dT_{r+1} at T>=2=0 minus 1/2", base - Q(1, 2))
    reps.append(rep)

    for g in range(0, spec.G + 1):
        rep = CheckReport("dilaton", {"part": "t-form phi_g", "genus": g, "r": r})
        with _timed(rep):
            pt = dmap.to_t(phi_stratum(ws, g))
            rep.zero("phi_g", _dilaton_residual_t(pt, g, with_s=False))
        reps.append(rep)
        rep = CheckReport("dilaton", {"part": "open", "genus": g, "r": r,
                                      "conjectural": g >= 1})
        with _timed(rep):
            F = open_F0(ws) if g == 0 else conjectural_open_Fg(ws, g)
            rep.zero("F^o_g", _dilaton_residual_t(F, g, with_s=True))
            if g == 1:
                v = F.coefficient({"t0_1": 1})
                rep.expect("dF^o_1/dt^0_1 at 0 = 1/2", v == Q(1, 2), f"got {v}")
        reps.append(rep)

    rep = CheckReport("dilaton", {"part": "(z d/dz + O) L^(n/r) = n L^(n/r)", "r": r, "N": N})
    with _timed(rep):
        for n, P in state.powers(-1).items():
            S = P.symbol()
            rep.zero(f"n={n}", O.dilaton_symbol(S) - S * n)
    reps.append(rep)

    rep = CheckReport("dilaton", {"part": "O identity and [O, d/dT1]", "r": r, "seed": seed})
    with _timed(rep):
        rng = random.Random(seed)
        space = state.space
        for trial in range(3):
            f = random_series(space, spec.D, rng)
            d1 = f.diff("T1")
            rep.zero("[O,d1]f - d1 f", O(d1) - O(f).diff("T1") - d1)
            for n, P in state.powers(0).items():
                Ap = P.plus()
                lhs = O(Ap.apply(f))
                corr = O.dilaton_symbol(Ap.symbol()).to_operator()
                rhs = Ap.apply(O(f)) + corr.apply(f)
                rep.zero(f"n={n} trial={trial}", lhs - rhs)
    reps.append(rep)
    return reps


def _dilaton_residual_t(F: TSeries, g: int, with_s: bool) -> TSeries:
    names = [n for n in F.space.names if n != "s" or with_s]
    rhs = F.euler(names) + F * (g - 1)
    if g == 1:
        rhs = rhs + Q(1, 2)
    return F.diff("t0_1") - rhs


def random_series(space, cap: int, rng: random.Random, terms: int = 6) -> TSeries:
    items = {}
    n = len(space.names)
    for _ in range(terms):
        exps = [0] * n
        for _ in range(rng.randint(0, 2)):
            exps[rng.randrange(n)] += 1
        exps[0] += rng.randint(0, 2)
        items[(rng.randint(-2, 1), tuple(exps))] = Q(rng.randint(-5, 5), rng.randint(1, 4))
    return TSeries.from_items(space, items, cap)


# ----------------------------------------------------------------------- TRR1
def _t_hessian(state: HierarchyState, dmap: DictionaryMap, H, alpha: int, p: int, mu: int):
    """d^2 F^c_0 / dt^alpha_p dt^mu_0 as a t-series."""
    a = dmap.k_of(alpha, p)
    h = H[(a, mu + 1)]
    return dmap.to_t(h) * (dmap.factor(a) * dmap.factor(mu + 1))


def check_trr1(ws: WaveState, pmax: int = 2) -> list[CheckReport]:
    spec = ws.spec
    r, N = spec.r, spec.N
    state = ws.state
    H = hessian_table(state)
    phi0, phi1 = phi_stratum(ws, 0), phi_stratum(ws, 1)
    reps = []

    rep = CheckReport("trr1", {"form": "T", "r": r, "a_max": N - r})
    with _timed(rep):
        for a in range(1, N - r + 1):
            A = Q(a + r)
            rhs = phi0.diff(f"T{a}").diff(f"T{r}") * (A / (2 * r))
            rhs = rhs + phi0.diff(f"T{a}") * phi1.diff(f"T{r}") * (A / r)
            for b in range(1, r):
                rhs = rhs + H[(a, b)] * phi1.diff(f"T{r - b}") * (A / (b * (r - b)))
            rep.zero(f"a={a}", phi1.diff(f"T{a + r}") - rhs)
    reps.append(rep)

    dmap = DictionaryMap(r, N)
    p0, p1 = dmap.to_t(phi0), dmap.to_t(phi1)
    Fo0, Fo1, Fext = open_F0(ws), conjectural_open_Fg(ws, 1), extended_F0(ws)
    top = f"t{r - 1}_0"
    for alpha in range(r):
        for p in range(pmax + 1):
            if dmap.k_of(alpha, p + 1) > N:
                continue
            cur, nxt = f"t{alpha}_{p}", f"t{alpha}_{p + 1}"
            hs = {mu: _t_hessian(state, dmap, H, alpha, p, mu) for mu in range(r - 1)}
            rep = CheckReport("trr1", {"form": "t", "alpha": alpha, "p": p, "r": r})
            with _timed(rep):
                rhs = p0.diff(cur).diff(top) * Q(1, 2) + p0.diff(cur) * p1.diff(top)
                for mu in range(r - 1):
                    rhs = rhs + hs[mu] * p1.diff(f"t{r - 2 - mu}_0")
                rep.zero("phi_1", p1.diff(nxt) - rhs)
            reps.append(rep)
            rep = CheckReport("trr1", {"form": "open", "alpha": alpha, "p": p, "r": r,
                                       "conjectural": True},
                              note="consistency of the dictionaries and transport")
            with _timed(rep):
                rhs = (Fext.diff(cur) * Fo1.diff(top) + Fo0.diff(cur) * Fo1.diff("s")
                       + Fo0.diff(cur).diff("s") * Q(1, 2))
                for mu in range(r - 1):
                    rhs = rhs + hs[mu] * Fo1.diff(f"t{r - 2 - mu}_0")
                rep.zero("F^o_1", Fo1.diff(nxt) - rhs)
            reps.append(rep)
    return reps


# ----------------------------------------------------------- symbol identities
def jet_hessian(ring: jets.JetRing, a: int) -> dict[int, TSeries]:
    """H_ab as jet polynomials from the z^{-1}..z^{-(r-1)} coefficients."""
    r = ring.r
    S = jets.L0_symbol(ring)
    P = S.power_frac(a, r, a + r)
    H = {}
    for j in range(1, r):
        acc = P[-j]
        for b in range(1, j):
            acc = acc - H[b] * S.power_frac(-b, r, r)[-j] * Q(1, b)
        H[j] = acc * j
    return H


def membership_residual(S: Symbol, a: int, r: int, H: dict[int, object]) -> Symbol:
    """(S^{a/r})_- - sum_b (1/b) H_b S^{-b/r}, orders -1..-r."""
    diff = S.power_frac(a, r, a + r).minus()
    for b in range(1, r):
        diff = diff - S.power_frac(-b, r, r - b) * (H[b] * Q(1, b))
    return Symbol(S.ring, {n: c for n, c in diff.coeffs.items() if -r <= n <= -1})


def check_symbol_identities(state: HierarchyState, amax_jet: int | None = None) -> list[CheckReport]:
    spec = state.spec
    r, N = spec.r, spec.N
    amax_jet = amax_jet or 2 * r + 2
    reps = []

    rep = CheckReport("symbols", {"part": "degree-one formula (jets)", "r": r, "a_max": amax_jet})
    with _timed(rep):
        depth = 4
        R = jets.JetRing(r, depth + 2 * amax_jet + 2)
        L0 = jets.L0_symbol(R)
        for a in range(1, amax_jet + 1):
            J = jets.jet_power(a, R, depth + a)
            d1 = jets.diff_degree_part(J, 1)
            rhs = L0.power_frac(a - 2 * r, r, depth + a + 2 * r) * L0.dz() * L0.dx() \
                * Q(a * (a - r), 2 * r * r)
            rep.zero(f"a={a}", d1 - rhs.truncate(J.lo))
            rep.zero(f"a={a} degree 0", jets.diff_degree_part(J, 0) - L0.power_frac(a, r, depth + a))
    reps.append(rep)

    rep = CheckReport("symbols", {"part": "membership (jets)", "r": r, "a_max": amax_jet})
    with _timed(rep):
        R0 = jets.JetRing(r, 0)
        S0 = jets.L0_symbol(R0)
        for a in range(1, amax_jet + 1):
            if a % r == 0:
                continue
            H = jet_hessian(R0, a)
            rep.zero(f"a={a}", membership_residual(S0, a, r, H))
    reps.append(rep)

    strata = stratify(state, 1)
    S = strata[0].symbol()
    S1 = strata[1].symbol()
    Ht = hessian_table(state)
    ring = state.ring

    rep = CheckReport("symbols", {"part": "membership (series)", "r": r, "N": N})
    with _timed(rep):
        for a in range(1, N + 1):
            if a % r:
                rep.zero(f"a={a}", membership_residual(S, a, r, {b: Ht[(a, b)] for b in range(1, r)}))
        # jet Hessian evaluated on the solved L_0 agrees with the series Hessian
        R0 = jets.JetRing(r, 0)
        vals = jets.jet_values(ring, {j: S[j] for j in range(r - 1)}, 0, r=r)
        for a in range(1, min(N, 2 * r + 2) + 1):
            if a % r:
                Hj = jet_hessian(R0, a)
                for b in range(1, r):
                    rep.zero(f"H[{a},{b}] jets vs series",
                             jets.evaluate(Hj[b], vals, ring) - Ht[(a, b)])
    reps.append(rep)

    kmax = N + r + 4
    R = jets.JetRing(r, kmax)
    vals = jets.jet_values(ring, {j: S[j] for j in range(r - 1)}, kmax, r=r)

    def pos(n):  # (L0^{n/r})_+ , commutative
        return S.power_frac(n, r, max(n, 0) + r).plus()

    def plus1(n):  # (L0^{n/r} operator)_{+,1} on the solved data
        J = jets.jet_power(n, R, n)
        return jets.substitute_jets(jets.diff_degree_part(J, 1, plus_only=True), vals, ring)

    for a in range(1, N + 1):
        rep = CheckReport("symbols", {"part": "open TRR-1 constituents", "a": a, "r": r})
        with _timed(rep):
            A = Q(a + r)
            coef = {b: Ht[(a, b)] * (A / (b * (r - b))) for b in range(1, r)}
            # first
            lhs = pos(a + r).dz()
            rhs = pos(a) * S.dz() * (A / r)
            for b in range(1, r):
                rhs = rhs + pos(r - b).dz() * coef[b]
            rep.zero("first", lhs - rhs)
            # second
            lhs = pos(a + r).dz().dz()
            rhs = pos(a) * S.dz().dz() * (A / r) + pos(a).dz() * S.dz() * (A / r)
            for b in range(1, r):
                rhs = rhs + pos(r - b).dz().dz() * coef[b]
            rep.zero("second", lhs - rhs)
            # third
            lhs = plus1(a + r)
            rhs = pos(a).dz() * S.dx() * (A / (2 * r))
            for b in range(1, r):
                rhs = rhs + plus1(r - b) * coef[b]
            rep.zero("third", lhs - rhs)
            # fourth
            lhs = (S.power_frac(a, r, a + r) * S1).plus() * (A / r)
            rhs = pos(a) * S1 * (A / r)
            for b in range(1, r):
                rhs = rhs + (S.power_frac(-b, r, r) * S1).plus() * (coef[b] * Q(r - b, r))
            rep.zero("fourth", lhs - rhs)
            # reformulated third
            lhs = (S.power_frac(a, r, a + r).dz() * S.dx()).plus() * (A / (2 * r))
            rhs = pos(a).dz() * S.dx() * (A / (2 * r))
            for b in range(1, r):
                rhs = rhs + (S.power_frac(-b, r, r).dz() * S.dx()).plus() \
                    * (Ht[(a, b)] * (A / (2 * r * b)))
            rep.zero("third, reformulated", lhs - rhs)
        reps.append(rep)
    return reps


# ------------------------------------------------------- genus-0/1 GD relations
def check_gd_relations(ws: WaveState) -> list[CheckReport]:
    spec = ws.spec
    r, N = spec.r, spec.N
    state = ws.state
    ring = state.ring
    strata = stratify(state, 1)
    S, S1 = strata[0].symbol(), strata[1].symbol()
    phi0, phi1 = phi_stratum(ws, 0), phi_stratum(ws, 1)
    z0 = phi0.diff("T1")
    kmax = N + r + 4
    R = jets.JetRing(r, kmax)
    vals = jets.jet_values(ring, {j: S[j] for j in range(r - 1)}, kmax, r=r)
    rep0 = CheckReport("gd", {"genus": 0, "r": r, "a_max": N})
    rep1 = CheckReport("gd", {"genus": 1, "r": r, "a_max": N})
    with _timed(rep0):
        for a in range(1, N + 1):
            pa = S.power_frac(a, r, a + r).plus()
            rep0.zero(f"a={a}", phi0.diff(f"T{a}") - pa.subst_z(z0))
    with _timed(rep1):
        for a in range(1, N + 1):
            pa = S.power_frac(a, r, a + r).plus()
            J = jets.jet_power(a, R, a)
            p1 = jets.substitute_jets(jets.diff_degree_part(J, 1, plus_only=True), vals, ring)
            mixed = (S.power_frac(a - r, r, a + r) * S1).plus() * Q(a, r)
            rhs = (phi1.diff("T1") * pa.dz().subst_z(z0)
                   + phi0.diff("T1").diff("T1") * Q(1, 2) * pa.dz().dz().subst_z(z0)
                   + p1.subst_z(z0) + mixed.subst_z(z0))
            rep1.zero(f"a={a}", phi1.diff(f"T{a}") - rhs)
    return [rep0, rep1]


# ------------------------------------------------------------------ dimension
def check_dimension(ws: WaveState, tables: list | None = None) -> list[CheckReport]:
    spec = ws.spec
    r = spec.r
    rep = CheckReport("dimension", {"r": r, "G": spec.G})
    with _timed(rep):
        scan_phi(ws, rep)
        for tbl in tables or []:
            scan_table(tbl, rep)
    return [rep]


def scan_phi(ws: WaveState, rep: CheckReport):
    r = ws.spec.r
    for g, phig in ws.strata.items():
        sp = phig.space
        for key, c in phig.terms.items():
            ks = monomial_ks(sp, key)
            if c and not phi_rule(ks, r, g):
                rep.expect(f"phi_{g}", False, f"monomial T{ks} = {c} violates the rule")
        rep.compared += 1


def scan_table(tbl, rep: CheckReport):
    r = tbl.r
    for e in tbl.entries:
        ins = tuple((i["a"], i["d"]) for i in e["insertions"])
        key = (ins, e["k"])
        rep.expect(f"{e['flavor']} g={e['genus']} {key}", key_rule(e["flavor"], key, r, e["genus"]))


# ---------------------------------------------------------------- r=2 bridge
def check_r2bridge(ws: WaveState) -> list[CheckReport]:
    spec = ws.spec
    if spec.r != 2:
        raise ConfigError("the r=2 bridge check needs a state solved with r=2")
    dmap = DictionaryMap(2, spec.N)
    reps = []
    rep = CheckReport("r2bridge", {"genus": 0, "oracle": "open genus-0 TRR"})
    with _timed(rep):
        vals = correlators_of(open_F0(ws), dmap, "open", 0)
        disk = OpenDiskOracle()
        keys = set(vals) | _disk_keys(dmap, spec.D, with_s=True)
        for ins, k in sorted(keys):
            if any(a == 1 for a, _ in ins):
                continue
            v = vals.get((ins, k), Q(0))
            cl = disk([d for _, d in ins], k)
            rep.expect(f"{ins} k={k}", r2_bridge(cl, 0, k) == v, f"engine {v} oracle {cl}")
    reps.append(rep)
    for g in range(1, spec.G + 1):
        rep = CheckReport("r2bridge", {"genus": g, "conjectural": True})
        with _timed(rep):
            conj = correlators_of(conjectural_open_Fg(ws, g), dmap, "conjectural", g)
            classical = _classical_open(ws, g, dmap)
            for key in sorted(set(conj) | set(classical)):
                ins, k = key
                if any(a == 1 for a, _ in ins):
                    continue
                cv = classical.get(key, Q(0))
                rep.expect(f"{key}", r2_bridge(cv, g, k) == conj.get(key, Q(0)),
                           f"conjectural {conj.get(key)} classical {cv}")
        reps.append(rep)
    return reps


def _classical_open(ws: WaveState, g: int, dmap: DictionaryMap) -> dict:
    """Numbers of phi_g with t^0_d = t_d, t^1_d = delta_{d,0} s (r = 2)."""
    phig = phi_stratum(ws, g)
    tsp = dmap.t_space()
    images = {}
    for k in range(1, dmap.N + 1):
        a, d = dmap.label(k)
        c = dmap.factor(k).rational_value()
        if a == 0:
            images[f"T{k}"] = TSeries.var(tsp, dmap.t_name(k), phig.cap, coeff=c)
        elif d == 0:
            images[f"T{k}"] = TSeries.var(tsp, "s", phig.cap, coeff=c)
        else:
            images[f"T{k}"] = TSeries.zero(tsp, phig.cap)
    F = phig.subst(images, tsp, phig.cap)
    return correlators_of(F, dmap, "conjectural", g)


def _disk_keys(dmap: DictionaryMap, D: int, with_s: bool) -> set:
    """Genus-0 r=2 keys within the T_{>=2}-degree budget (s counts as T_2)."""
    from itertools import combinations_with_replacement
    ks = [k for k in range(3, dmap.N + 1, 2)]
    out = set()
    for deg in range(0, D + 1):
        for kpart in range(0, deg + 1):
            for rest in combinations_with_replacement(ks, deg - kpart):
                ds = [dmap.label(k)[1] for k in rest]
                # 2 sum d - 2 l - k = -3 fixes the number of tau_0 insertions
                m2 = 2 * sum(ds) - 2 * len(ds) - kpart + 3
                if m2 < 0 or m2 % 2:
                    continue
                ins = tuple(sorted([(0, d) for d in ds] + [(0, 0)] * (m2 // 2)))
                out.add((ins, kpart))
    return out


# ---------------------------------------------------------- hierarchy / oracle
def check_hierarchy(state: HierarchyState, stability: bool = True) -> list[CheckReport]:
    spec = state.spec
    r = spec.r
    reps = []
    rep = CheckReport("hierarchy", {"part": "pattern and trivial flows", "r": r, "N": spec.N,
                                    "D": spec.D})
    with _timed(rep):
        try:
            check_pattern(state)
            rep.expect("eps pattern", True)
        except PatternViolation as exc:
            rep.expect("eps pattern", False, str(exc))
        for m in range(r, spec.N + 1, r):
            for i in range(r - 1):
                rep.zero(f"d f{i} / dT{m}", state.L[i].diff(f"T{m}"))
        jfull = max([p - i + r for i in range(r - 1) for p in state.L[i].eps_powers()] + [0])
        rep.zero("reassembly", reassemble(stratify(state, jfull), r) - state.L)
        rep.expect("path independence", bool(state.provenance.get("path_checked")))
    reps.append(rep)
    if stability:
        rep = CheckReport("hierarchy", {"part": "depth and eps-cap stability", "M": spec.M + 2,
                                        "J": spec.J + 1})
        with _timed(rep):
            other = solve_jets(with_spec(spec, M=spec.M + 2, J=spec.J + 1))
            rep.zero("L under M+2", other.L - state.L)
            a, b = stratify(state, spec.J), stratify(other, spec.J + 1)
            for j in range(spec.J + 1):
                rep.zero(f"L_{j} under J+1", a[j] - b[j])
            for n, P in state.powers(-1).items():
                rep.zero(f"res L^({n}/r) under M+2", P.residue() - other.powers(-1)[n].residue())
        reps.append(rep)
    return reps


def check_oracle(state: HierarchyState) -> list[CheckReport]:
    rep = CheckReport("oracle", {"part": "closed genus 0 vs TRR", "r": state.spec.r,
                                 "D": state.spec.D})
    with _timed(rep):
        try:
            hessian_table(state)
        except HessianMismatch as exc:
            rep.expect("Hessian cross-checks", False, str(exc))
        n, bad = compare_closed_with_oracle(state)
        rep.compared += n
        for b in bad:
            rep.expect("closed", False, b)
        rep.expect("nonempty comparison", n > 0, "no shared keys")
    return [rep]


CHECKS = ("hierarchy", "string", "dilaton", "trr1", "symbols", "gd", "dimension",
          "oracle", "r2bridge")


def run_checks(ws: WaveState, names, tables: list | None = None) -> list[CheckReport]:
    out: list[CheckReport] = []
    state = ws.state
    for name in names:
        if name == "hierarchy":
            out += check_hierarchy(state)
        elif name == "string":
            out += check_string(ws)
        elif name == "dilaton":
            out += check_dilaton(ws)
        elif name == "trr1":
            out += check_trr1(ws)
        elif name == "symbols":
            out += check_symbol_identities(state)
        elif name == "gd":
            out += check_gd_relations(ws)
        elif name == "dimension":
            out += check_dimension(ws, tables)
        elif name == "oracle":
            out += check_oracle(state)
        elif name == "r2bridge":
            out += check_r2bridge(ws)
        else:
            raise ConfigError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    return out

"""Variable dictionaries, r-spin potentials, correlator tables and oracles.

T-variables relate to t-variables by T_k = c_k t^a_d:

* a <= r-2, k = a + 1 + r d:  c_k = zeta^(-E_k) / k!_r,
  E_k = 3k - (r+1)(2d+1),  k!_r = prod_{i<=d} (a + 1 + r i);
* k = m r:                    c_k = zeta^(-m(r-2)) / (m! r^m), (a, d) = (r-1, m-1);

with zeta^(2(r+1)) = -r, so sqrt(-r) = zeta^(r+1).  In t-variables the
series ``t0_0`` (the image of T1) stays ungraded, everything else is graded.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable

from .psdo import Symbol
from .scalars import ONE, ZERO, CycScalar, Q, binom
from .series import MASK, SLOT, SeriesSpace, TSeries
from .solver import HierarchyState, stratify
from .wave import WaveState, phi_stratum


class NonRational(ArithmeticError):
    pass


class SelectionRuleViolation(ArithmeticError):
    pass


class HessianMismatch(ArithmeticError):
    pass


# --------------------------------------------------------------------- dictionary
class DictionaryMap:
    def __init__(self, r: int, N: int):
        self.r = r
        self.N = N

    def label(self, k: int) -> tuple[int, int]:
        r = self.r
        if k % r == 0:
            return r - 1, k // r - 1
        return (k - 1) % r, (k - 1) // r

    def k_of(self, a: int, d: int) -> int:
        return self.r * (d + 1) if a == self.r - 1 else a + 1 + self.r * d

    def kfact_r(self, k: int) -> int:
        a, d = self.label(k)
        out = 1
        for i in range(d + 1):
            out *= a + 1 + self.r * i
        return out

    def factor(self, k: int) -> CycScalar:
        """c_k with T_k = c_k t^a_d."""
        r = self.r
        a, d = self.label(k)
        if a == r - 1:
            m = d + 1
            return CycScalar.zeta_power(r, -m * (r - 2), Q(1, factorial(m) * r ** m))
        E = 3 * k - (r + 1) * (2 * d + 1)
        return CycScalar.zeta_power(r, -E, Q(1, self.kfact_r(k)))

    def t_name(self, k: int) -> str:
        a, d = self.label(k)
        return f"t{a}_{d}"

    def t_space(self) -> SeriesSpace:
        names = [self.t_name(k) for k in range(1, self.N + 1)] + ["s"]
        return SeriesSpace(names, [n != "t0_0" for n in names])

    def images(self, mode: str = "plain", cap: int = 0) -> dict[str, TSeries]:
        """Linear forms T_k -> c_k t^a_d, with the (r-1)-line optionally
        rescaled by 1/sqrt(-r) ('scale') or also shifted by -r s ('shift')."""
        if mode not in ("plain", "scale", "shift"):
            raise ValueError(mode)
        tsp = self.t_space()
        inv_sqrt = CycScalar.sqrt_minus_r(self.r).inverse()
        out = {}
        for k in range(1, self.N + 1):
            c = self.factor(k)
            a, d = self.label(k)
            img = TSeries.var(tsp, self.t_name(k), cap, coeff=c)
            if a == self.r - 1 and mode != "plain":
                img = img * inv_sqrt
                if mode == "shift" and d == 0:
                    img = img + TSeries.var(tsp, "s", cap, coeff=c * inv_sqrt * (-self.r))
            out[f"T{k}"] = img
        return out

    def to_t(self, series: TSeries, mode: str = "plain") -> TSeries:
        return series.subst(self.images(mode, series.cap), self.t_space(), series.cap)

    def key_of(self, exps_t: dict[str, int]) -> tuple[tuple[tuple[int, int], ...], int]:
        ins = []
        k = 0
        for name, e in exps_t.items():
            if name == "s":
                k = e
            else:
                a, d = name[1:].split("_")
                ins += [(int(a), int(d))] * e
        return tuple(sorted(ins)), k


# ------------------------------------------------------------ selection rules
def phi_rule(ks: Iterable[int], r: int, g: int) -> bool:
    """Every monomial prod T_{k_i} of phi_g: sum(k_i - r - 1) = (r+1)(g-1)."""
    return sum(k - r - 1 for k in ks) == (r + 1) * (g - 1)


def closed_rule(ks: Iterable[int], r: int, g: int) -> bool:
    return sum(k - r - 1 for k in ks) == (r + 1) * (2 * g - 2)


def open_rule(insertions, k: int, r: int, g: int) -> bool:
    """sum(a_i/r + d_i - 1) - k/r = (r+1)(g-1)/r, multiplied through by r."""
    return sum(a + r * d - r for a, d in insertions) - k == (r + 1) * (g - 1)


def closed_key_rule(insertions, r: int, g: int = 0) -> bool:
    return sum(a + r * d - r for a, d in insertions) == 2 * (r + 1) * (g - 1)


def monomial_ks(space: SeriesSpace, key: int) -> list[int]:
    ks = []
    for i, name in enumerate(space.names):
        e = (key >> (SLOT * (i + 1))) & MASK
        ks += [int(name[1:])] * e
    return ks


# ---------------------------------------------------------------- closed side
def closed_two_point(state: HierarchyState, n: int) -> TSeries:
    """eps^{n-1} res L^{n/r} = sum_g eps^{2g-2} d^2 F_g / dT_1 dT_n."""
    r = state.spec.r
    if n % r == 0:
        raise ValueError(f"n={n} is a multiple of r={r}")
    return state.powers(-1)[n].residue().eps_shift(n - 1)


def closed_two_point_genus(state: HierarchyState, n: int, g: int) -> TSeries:
    return closed_two_point(state, n).eps_coefficient(2 * g - 2)


def L0_symbol(state: HierarchyState) -> Symbol:
    return stratify(state, 1)[0].symbol()


def hessian_table(state: HierarchyState, amax: int | None = None) -> dict[tuple[int, int], TSeries]:
    """d^2 F_0 / dT_a dT_b for 1 <= a <= amax, 1 <= b <= r-1.

    Read off from the membership identity: the z^{-1}..z^{-(r-1)} coefficients
    of (L0^{a/r})_- - sum_b (1/b) H_ab L0^{-b/r} vanish, and L0^{-b/r} starts
    at z^{-b}, so the system is triangular.  The z^{-r} coefficient must then
    vanish too; that and three further relations are checked here.
    """
    r = state.spec.r
    amax = amax or state.spec.N
    cache = state.__dict__.setdefault("_hessian", {})
    if amax in cache:
        return cache[amax]
    S = L0_symbol(state)
    neg = {b: S.power_frac(-b, r, r - b) for b in range(1, r)}
    H: dict[tuple[int, int], TSeries] = {}
    ring = S.ring
    for a in range(1, amax + 1):
        if a % r == 0:
            for b in range(1, r):
                H[(a, b)] = ring.zero
            continue
        P = S.power_frac(a, r, a + r)
        for j in range(1, r):
            acc = P[-j]
            for b in range(1, j):
                acc = acc - H[(a, b)] * neg[b][-j] * Q(1, b)
            H[(a, j)] = acc * j
        resid = P[-r]
        for b in range(1, r):
            resid = resid - H[(a, b)] * neg[b][-r] * Q(1, b)
        if resid:
            raise HessianMismatch(f"a={a}: z^-{r} coefficient does not vanish")
    _hessian_crosschecks(state, H, amax)
    cache[amax] = H
    return H


def _hessian_crosschecks(state, H, amax):
    r = state.spec.r
    G = {n: closed_two_point_genus(state, n, 0) for n in range(1, state.spec.N + 1) if n % r}
    for (a, b), h in H.items():
        if a % r == 0:
            continue
        if b == 1 and h != G[a]:
            raise HessianMismatch(f"H[{a},1] differs from the genus-0 two-point function")
        # T1-integration route: d/dT1 H_ab = d/dT_b (d^2F_0/dT1 dT_a)
        if h.diff("T1") != G[a].diff(f"T{b}"):
            raise HessianMismatch(f"d/dT1 H[{a},{b}] differs from d/dT{b} of the two-point function")
        if a < r and (b, a) in H and H[(b, a)] != h:
            raise HessianMismatch(f"H[{a},{b}] is not symmetric")


def closed_F0_hessian(state: HierarchyState, a: int, b: int) -> TSeries:
    r = state.spec.r
    if not 1 <= b <= r - 1:
        raise ValueError("b must lie in 1..r-1")
    return hessian_table(state, max(a, state.spec.N))[(a, b)]


# ------------------------------------------------------------- correlators
Key = tuple  # (insertions tuple of (a, d), k)


def _to_rational(v, where: str):
    if isinstance(v, CycScalar):
        if not v.is_rational():
            raise NonRational(f"{where}: value {v} is not rational")
        return v.rational_value()
    return v


def correlators_of(series: TSeries, dmap: DictionaryMap, flavor: str, g: int,
                   extra: tuple = (), check_rule: bool = True) -> dict[Key, object]:
    """All correlators encoded by a t-variable series.

    ``extra`` lists insertions already differentiated out of the series.
    Value = coefficient times the factorials of the multiplicities and k!.
    """
    out: dict[Key, object] = {}
    r = dmap.r
    names = series.space.names
    for (eps, exps), c in series.items():
        if eps:
            raise ValueError("correlator series must be eps-free")
        mono = {n: e for n, e in zip(names, exps) if e}
        ins, k = dmap.key_of(mono)
        val = c
        for e in exps:
            val = val * factorial(e)
        key = (tuple(sorted(ins + tuple(extra))), k)
        val = _to_rational(val, f"{flavor} g={g} {key}")
        if check_rule and val and not key_rule(flavor, key, r, g):
            raise SelectionRuleViolation(f"{flavor} g={g} {key} = {val} violates the selection rule")
        if key in out and out[key] != val:
            raise ArithmeticError(f"{flavor}: inconsistent values for {key}")
        out[key] = val
    return out


def key_rule(flavor: str, key: Key, r: int, g: int) -> bool:
    ins, k = key
    if flavor == "closed":
        return k == 0 and closed_key_rule(ins, r, g)
    # Extended genus 0 carries an implicit a=-1 insertion; after removing it
    # the constraint coincides with the open one at k = 0.
    return open_rule(ins, k, r, g)


def closed_genus0_table(state: HierarchyState) -> dict[Key, object]:
    """Closed genus-0 correlators containing a primary insertion tau^{b-1}_0."""
    r = state.spec.r
    dmap = DictionaryMap(r, state.spec.N)
    H = hessian_table(state)
    out: dict[Key, object] = {}
    for (a, b), h in H.items():
        if a % r == 0 or not h:
            continue
        scale = dmap.factor(a) * dmap.factor(b)
        ht = dmap.to_t(h) * scale
        vals = correlators_of(ht, dmap, "closed", 0,
                              extra=(dmap.label(a), dmap.label(b)))
        for key, v in vals.items():
            if key in out and out[key] != v:
                raise ArithmeticError(f"closed genus 0: {key} differs between Hessian entries")
            out[key] = v
    return out


def closed_keys_in_range(state: HierarchyState) -> list[Key]:
    """Genus-0 closed keys with a primary insertion that the Hessian resolves."""
    r, N, D = state.spec.r, state.spec.N, state.spec.D
    dmap = DictionaryMap(r, N)
    keys = set()
    ks_graded = [k for k in range(2, N + 1) if k % r]
    for a in range(1, N + 1):
        if a % r == 0:
            continue
        for b in range(1, r):
            cap = D  # Hessian entries are exact to T_{>=2}-degree D
            for deg in range(0, cap + 1):
                for rest in _multisets(ks_graded, deg):
                    ks = [a, b] + list(rest)
                    # T1 multiplicity fixed by the rule: each T1 adds -r
                    s = sum(k - r - 1 for k in ks) + 2 * (r + 1)
                    if s < 0 or s % r:
                        continue
                    ks += [1] * (s // r)
                    ins = tuple(sorted(dmap.label(k) for k in ks))
                    if len(ins) >= 3:
                        keys.add((ins, 0))
    return sorted(keys)


def _multisets(items, size):
    if size == 0:
        yield ()
        return
    from itertools import combinations_with_replacement
    yield from combinations_with_replacement(items, size)


def _split_multiset(items):
    """Yield (part1, part2, weight) over all ways to split a list of labeled
    insertions into two groups, grouped by multiset with binomial weights."""
    from collections import Counter
    from itertools import product
    counts = sorted(Counter(items).items())
    ranges = [range(m + 1) for _, m in counts]
    for takes in product(*ranges):
        w = 1
        p1, p2 = [], []
        for (x, m), t in zip(counts, takes):
            w *= int(binom(m, t))
            p1 += [x] * t
            p2 += [x] * (m - t)
        yield p1, p2, w


class Genus0Oracle:
    """Closed genus-0 r-spin correlators by genus-0 TRR from primary seeds.

    <tau^a_{p+1} B C X> = sum_{X1 + X2 = X} <tau^a_p X1 tau^mu_0>
                          eta^{mu nu} <tau^nu_0 B C X2>,  eta^{mu nu} = [mu+nu = r-2],
    with X1 nonempty.  Seeds are primary correlators (all d = 0).
    """

    def __init__(self, r: int, seeds: dict[tuple, object]):
        self.r = r
        self.seeds = {tuple(sorted(k)): v for k, v in seeds.items()}
        self.memo: dict[tuple, object] = {}

    def __call__(self, insertions) -> object:
        key = tuple(sorted(insertions))
        got = self.memo.get(key)
        if got is None:
            got = self.memo[key] = self._compute(key)
        return got

    def _compute(self, key):
        r = self.r
        if len(key) < 3 or not closed_key_rule(key, r, 0):
            return ZERO
        if any(a == r - 1 for a, _ in key):
            return ZERO
        desc = [i for i, (_, d) in enumerate(key) if d > 0]
        if not desc:
            if key not in self.seeds:
                raise KeyError(f"missing primary seed {key}")
            return self.seeds[key]
        i = desc[0]
        a, p1 = key[i]
        rest = list(key[:i] + key[i + 1:])
        B, C = rest[0], rest[1]
        X = rest[2:]
        total = ZERO
        for X1, X2, w in _split_multiset(X):
            if not X1:
                continue
            for mu in range(r - 1):
                left = self([(a, p1 - 1), *X1, (mu, 0)])
                if not left:
                    continue
                right = self([(r - 2 - mu, 0), B, C, *X2])
                if right:
                    total += w * left * right
        return total


def primary_seeds(table: dict[Key, object]) -> dict[tuple, object]:
    return {ins: v for (ins, k), v in table.items() if all(d == 0 for _, d in ins)}


def compare_closed_with_oracle(state: HierarchyState) -> tuple[int, list[str]]:
    """Compare hierarchy and TRR oracle on every key both can evaluate.

    Returns the number of keys compared and a list of mismatches.
    """
    table = closed_genus0_table(state)
    keys = closed_keys_in_range(state)
    seeds = {ins: table.get((ins, k), ZERO) for ins, k in keys if all(d == 0 for _, d in ins)}
    oracle = Genus0Oracle(state.spec.r, seeds)
    bad, n = [], 0
    for key in keys:
        try:
            ov = oracle(key[0])
        except KeyError:
            continue
        n += 1
        hv = table.get(key, ZERO)
        if hv != ov:
            bad.append(f"{key}: hierarchy {hv} oracle {ov}")
    extra = [k for k in table if k not in set(keys)]
    if extra:
        bad.append(f"hierarchy produced keys outside the enumerated range: {extra[:3]}")
    return n, bad


# --------------------------------------------------------------- open side
def _t_phi(ws: WaveState, g: int, mode: str) -> TSeries:
    dmap = DictionaryMap(ws.spec.r, ws.spec.N)
    return dmap.to_t(phi_stratum(ws, g), mode)


def open_F0(ws: WaveState) -> TSeries:
    r = ws.spec.r
    inv = CycScalar.sqrt_minus_r(r).inverse()
    return (_t_phi(ws, 0, "shift") - _t_phi(ws, 0, "scale")) * inv


def conjectural_open_Fg(ws: WaveState, g: int) -> TSeries:
    if g < 1:
        raise ValueError("conjectural potentials start at genus 1")
    r = ws.spec.r
    pref = CycScalar.zeta_power(r, (g - 1) * (r + 1))  # (-r)^{(g-1)/2}
    return _t_phi(ws, g, "shift") * pref


def extended_F0(ws: WaveState) -> TSeries:
    return _t_phi(ws, 0, "scale") * CycScalar.sqrt_minus_r(ws.spec.r)


def extract(series: TSeries, dmap: DictionaryMap, insertions, k: int = 0):
    """Correlator for the given insertions and k boundary points."""
    counts: dict[str, int] = {}
    for a, d in insertions:
        name = f"t{a}_{d}"
        counts[name] = counts.get(name, 0) + 1
    if k:
        counts["s"] = k
    val = series.coefficient(counts)
    for e in counts.values():
        val = val * factorial(e)
    return val


def r2_bridge_factor(g: int, k: int) -> CycScalar:
    """(-2)^{(g+k-1)/2} as an element of Q[zeta], zeta^6 = -2."""
    return CycScalar.zeta_power(2, 3 * (g + k - 1))


def r2_bridge(value, g: int, k: int):
    """Map a classical open number to its r=2 spin counterpart.

    For g+k even the classical number must vanish; it is returned as zero
    instead of being multiplied by an irrational factor.
    """
    if (g + k) % 2 == 0:
        if value:
            raise ArithmeticError(f"classical open number with g+k even is nonzero: {value}")
        return CycScalar.rational(2, 0)
    return r2_bridge_factor(g, k) * value


class OpenDiskOracle:
    """Classical genus-0 open intersection numbers <tau_{d_1}..tau_{d_l} sigma^k>^o_0
    from the open TRRs, with <sigma^3> = <tau_0 sigma> = 1."""

    def __init__(self):
        self.memo: dict[tuple, object] = {}

    @staticmethod
    def closed(ds) -> object:
        n = len(ds)
        if n < 3 or sum(ds) != n - 3:
            return ZERO
        den = 1
        for d in ds:
            den *= factorial(d)
        return Q(factorial(n - 3), den)

    def __call__(self, ds, k: int):
        key = (tuple(sorted(ds)), k)
        got = self.memo.get(key)
        if got is None:
            got = self.memo[key] = self._compute(*key)
        return got

    def _compute(self, ds, k):
        # dimension: 2 sum d - 2 l - k = -3
        if 2 * sum(ds) - 2 * len(ds) - k != -3:
            return ZERO
        if all(d == 0 for d in ds):
            return ONE if (len(ds), k) in ((0, 3), (1, 1)) else ZERO
        i = max(range(len(ds)), key=lambda j: ds[j])
        n = ds[i] - 1
        rest = list(ds[:i] + ds[i + 1:])
        total = ZERO
        if rest:
            other, Y = rest[0], rest[1:]
            for Y1, Y2, w in _split_multiset(Y):
                c = self.closed([n, 0] + Y1)
                if c:
                    total += w * c * self([0, other] + Y2, k)
                for j1 in range(k + 1):
                    left = self([n] + Y1, j1)
                    if left:
                        total += w * binom(k, j1) * left * self([other] + Y2, k - j1 + 1)
        else:
            # recursion with s as the second distinguished point
            j = k - 1
            Y = rest
            c = self.closed([n, 0])
            if c:
                total += c * self([0], k)
            for j1 in range(j + 1):
                left = self([n], j1)
                if left:
                    total += binom(j, j1) * left * self([], j - j1 + 2)
        return total


# ------------------------------------------------------------------ tables
@dataclass
class CorrelatorTable:
    r: int
    entries: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, flavor: str, g: int, insertions, k: int, value, conjectural: bool,
            rule_checked: bool = True):
        self.entries.append({
            "flavor": flavor, "genus": g,
            "insertions": [{"a": a, "d": d} for a, d in insertions],
            "k": k, "value": _value_json(value),
            "conjectural": conjectural, "selection_rule_checked": rule_checked,
        })

    def sort(self):
        self.entries.sort(key=lambda e: (e["flavor"], e["genus"], e["k"],
                                         [(i["a"], i["d"]) for i in e["insertions"]]))

    def to_json(self) -> str:
        self.sort()
        return json.dumps({"r": self.r, "meta": self.meta, "correlators": self.entries},
                          sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        self.sort()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["flavor", "genus", "insertions", "k", "value",
                    "conjectural", "selection_rule_checked"])
        for e in self.entries:
            ins = " ".join(f"{i['a']}:{i['d']}" for i in e["insertions"])
            v = e["value"]
            val = f"{v['num']}/{v['den']}" if "num" in v else json.dumps(v["zeta_coeffs"])
            w.writerow([e["flavor"], e["genus"], ins, e["k"], val,
                        str(e["conjectural"]).lower(), str(e["selection_rule_checked"]).lower()])
        return buf.getvalue()


def _value_json(v):
    if isinstance(v, CycScalar):
        if v.is_rational():
            v = v.rational_value()
        else:
            return {"zeta_coeffs": v.to_json()}
    return {"num": str(v.numerator), "den": str(v.denominator)}


def build_table(flavor: str, g: int, state: HierarchyState, ws: WaveState | None) -> CorrelatorTable:
    r = state.spec.r
    dmap = DictionaryMap(r, state.spec.N)
    tbl = CorrelatorTable(r, meta={"r": r, "N": state.spec.N, "D": state.spec.D,
                                   "flavor": flavor, "genus": g})
    if flavor == "closed":
        if g != 0:
            raise ValueError("closed tables are produced in genus 0")
        vals = closed_genus0_table(state)
        conj = False
    elif flavor == "open":
        if g != 0:
            raise ValueError("open genus >= 1 is the conjectural flavor")
        vals = correlators_of(open_F0(ws), dmap, "open", 0)
        conj = False
    elif flavor == "conjectural":
        vals = correlators_of(conjectural_open_Fg(ws, g), dmap, "conjectural", g)
        conj = True
    elif flavor == "extended":
        if g != 0:
            raise ValueError("extended tables are produced in genus 0")
        vals = correlators_of(extended_F0(ws), dmap, "extended", 0)
        conj = False
    else:
        raise ValueError(f"unknown flavor {flavor}")
    for (ins, k), v in vals.items():
        if v:
            tbl.add(flavor, g, ins, k, v, conj)
    tbl.meta["conjectural"] = conj
    return tbl

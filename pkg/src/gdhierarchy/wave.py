"""The wave function Phi, its logarithm phi and the genus strata phi_g.

Phi solves dPhi/dT_n = eps^{n-1} (L^{n/r})_+ Phi with Phi = 1 on T_{>=2} = 0.
It is assembled layer by layer in T_{>=2}-degree exactly like L, with every
flow n = 2..N (including multiples of r) cross-checked on shared monomials.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .series import TSeries
from .solver import (ConfigError, HierarchyState, PatternViolation, _integrate_layer,
                     truncate_op)


class NegativeGenus(PatternViolation):
    pass


@dataclass
class WaveState:
    state: HierarchyState
    Phi: TSeries
    phi: TSeries
    strata: dict[int, TSeries] = field(default_factory=dict)

    @property
    def spec(self):
        return self.state.spec

    def to_json_obj(self) -> dict:
        return {"Phi": self.Phi.to_json_obj(), "phi": self.phi.to_json_obj()}

    @classmethod
    def from_json_obj(cls, state: HierarchyState, obj: dict) -> "WaveState":
        space = state.space
        Phi = TSeries.from_json_obj(obj["Phi"], space=space)
        phi = TSeries.from_json_obj(obj["phi"], space=space)
        return cls(state, Phi, phi, _strata(phi, state.spec.G))


def solve_Phi(state: HierarchyState, log=None) -> TSeries:
    spec = state.spec
    space = state.space
    plus = state.plus_parts()
    Phi = TSeries.const(space, 1, spec.D)
    for d in range(spec.D):
        cur = Phi.truncate(d)
        rhs = {}
        for n in range(2, spec.N + 1):
            P = truncate_op(plus[n], d)
            rhs[n] = P.apply(cur).eps_shift(n - 1)
        new = _integrate_layer(rhs, d, space, "Phi")
        terms = dict(Phi.terms)
        terms.update(new)
        Phi = TSeries(space, terms, spec.D)
        if log:
            log(f"Phi layer {d + 1}: {len(Phi)} terms")
    return Phi


def solve_phi(state: HierarchyState, log=None) -> WaveState:
    return wave_from_Phi(state, solve_Phi(state, log))


def wave_from_Phi(state: HierarchyState, Phi: TSeries) -> WaveState:
    phi = Phi.log()
    low = [p for p in phi.eps_powers() if p < -1]
    if low:
        raise NegativeGenus(f"log Phi has eps^{min(low)}: a stratum of negative genus")
    return WaveState(state, Phi, phi, _strata(phi, state.spec.G))


def _strata(phi: TSeries, G: int) -> dict[int, TSeries]:
    top = max(G, max(phi.eps_powers(), default=-1) + 1)
    return {g: phi.eps_component(g) for g in range(0, top + 1)}


def phi_stratum(ws: WaveState, g: int) -> TSeries:
    if g < 0:
        return TSeries.zero(ws.phi.space, ws.phi.cap)
    if g not in ws.strata:
        raise ConfigError(f"genus {g} outside the solved range")
    return ws.strata[g]

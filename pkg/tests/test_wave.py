import pytest

from gdhierarchy.checks import OOperator
from gdhierarchy.scalars import Q
from gdhierarchy.series import TSeries
from gdhierarchy.solver import ConfigError
from gdhierarchy.wave import NegativeGenus, WaveState, phi_stratum, wave_from_Phi

from conftest import wave


@pytest.mark.parametrize("r,N,D", [(2, 5, 4), (3, 6, 4)])
def test_phi_strata(r, N, D):
    ws = wave(r, N, D)
    assert min(ws.phi.eps_powers()) >= -1
    assert not phi_stratum(ws, -1) and not phi_stratum(ws, -3)
    assert ws.phi == sum((phi_stratum(ws, g).eps_shift(g - 1) for g in ws.strata),
                         TSeries.zero(ws.phi.space, ws.phi.cap))
    with pytest.raises(ConfigError):
        phi_stratum(ws, 99)


@pytest.mark.parametrize("r", [2, 3])
def test_Phi_is_exp_phi_and_normalised(r):
    ws = wave(r, r + 3, 4)
    assert ws.phi.exp() == ws.Phi
    rest = ws.spec.times()[1:]
    assert ws.Phi.set_zero(rest) == 1


@pytest.mark.parametrize("r", [2, 3])
def test_wave_equation_for_each_flow(r):
    ws = wave(r, r + 3, 4)
    plus = ws.state.plus_parts()
    for n in range(2, ws.spec.N + 1):
        lhs = ws.Phi.diff(f"T{n}")
        rhs = plus[n].apply(ws.Phi).eps_shift(n - 1)
        assert lhs == rhs


@pytest.mark.parametrize("r", [2, 3])
def test_O_Phi(r):
    ws = wave(r, r + 2, 4)
    assert OOperator(r)(ws.Phi) == ws.Phi * Q(1, 2)


def test_genus_one_coefficient():
    for r in (2, 3):
        ws = wave(r, r + 2, 3)
        assert phi_stratum(ws, 1).coefficient({f"T{r + 1}": 1}) == Q(r + 1, 2)


def test_state_roundtrip():
    ws = wave(2, 5, 3)
    back = WaveState.from_json_obj(ws.state, ws.to_json_obj())
    assert back.Phi == ws.Phi and back.strata.keys() == ws.strata.keys()


def test_negative_genus_detected():
    ws = wave(2, 4, 2)
    bad = ws.Phi + TSeries.monomial(ws.Phi.space, {"T2": 1}, ws.Phi.cap, eps=-4)
    with pytest.raises(NegativeGenus):
        wave_from_Phi(ws.state, bad)

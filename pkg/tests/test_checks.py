import random

import pytest
from hypothesis import given, settings, strategies as st

from gdhierarchy import checks
from gdhierarchy.checks import (CHECKS, CheckReport, OOperator, check_dilaton, check_dimension,
                                check_gd_relations, check_r2bridge, check_string, check_trr1,
                                random_series, run_checks)
from gdhierarchy.potentials import build_table
from gdhierarchy.scalars import Q
from gdhierarchy.series import TSeries
from gdhierarchy.solver import ConfigError
from gdhierarchy.wave import WaveState

from conftest import wave


def _all_pass(reports):
    bad = [(r.check, r.params, r.residual_monomials_if_failed[:3]) for r in reports if not r.passed]
    assert not bad, bad
    assert all(r.compared > 0 for r in reports)


def _corrupt(ws, g, exps, coeff=1):
    strata = dict(ws.strata)
    strata[g] = strata[g] + TSeries.monomial(ws.phi.space, exps, ws.phi.cap, coeff=coeff)
    return WaveState(ws.state, ws.Phi, ws.phi, strata)


@pytest.mark.parametrize("name", [c for c in CHECKS if c != "hierarchy"])
def test_every_check_passes_r2(ws2, name):
    _all_pass(run_checks(ws2, [name], [build_table("open", 0, ws2.state, ws2)]))


@pytest.mark.parametrize("name", [c for c in CHECKS if c not in ("hierarchy", "r2bridge")])
def test_every_check_passes_r3(ws3, name):
    _all_pass(run_checks(ws3, [name]))


def test_hierarchy_check_small():
    _all_pass(run_checks(wave(3, 6, 3), ["hierarchy"]))


def test_unknown_check_rejected(ws2):
    with pytest.raises(ConfigError):
        run_checks(ws2, ["nope"])


def test_r2bridge_needs_r2(ws3):
    with pytest.raises(ConfigError):
        check_r2bridge(ws3)


def test_dilaton_precondition():
    with pytest.raises(ConfigError):
        check_dilaton(wave(3, 3, 2))


def test_string_fails_on_corruption(ws2):
    bad = _corrupt(ws2, 1, {"T3": 1, "T5": 1}, 5)
    reps = check_string(bad)
    failed = [r for r in reps if not r.passed]
    assert failed and all(r.params["genus"] == 1 for r in failed)
    assert failed[0].residual_monomials_if_failed


def test_trr1_fails_on_corruption(ws3):
    bad = _corrupt(ws3, 1, {"T4": 2}, Q(1, 7))
    assert not all(r.passed for r in check_trr1(bad))


def test_gd_relation_fails_on_corruption(ws3):
    bad = _corrupt(ws3, 0, {"T5": 1, "T2": 1}, 1)
    reps = check_gd_relations(bad)
    assert not reps[0].passed and reps[1].passed


def test_dilaton_fails_on_corrupted_Phi(ws2):
    Phi = ws2.Phi + TSeries.monomial(ws2.Phi.space, {"T3": 1}, ws2.Phi.cap, eps=1)
    bad = WaveState(ws2.state, Phi, ws2.phi, ws2.strata)
    reps = check_dilaton(bad)
    assert not reps[0].passed


def test_dimension_negative(ws3):
    # injected monomial violating sum(k_i - r - 1) = (r+1)(g-1)
    bad = _corrupt(ws3, 1, {"T2": 1}, 3)
    rep, = check_dimension(bad)
    assert not rep.passed and "violates" in rep.residual_monomials_if_failed[0]
    tbl = build_table("open", 0, ws3.state, ws3)
    tbl.add("open", 0, [(0, 0)], 2, Q(1), False)
    rep, = check_dimension(ws3, [tbl])
    assert not rep.passed


def test_symbol_checks_fail_on_wrong_hessian(ws2, monkeypatch):
    real = checks.hessian_table

    def wrong(state, amax=None):
        H = dict(real(state, amax))
        H[(3, 1)] = H[(3, 1)] + 1
        return H

    monkeypatch.setattr(checks, "hessian_table", wrong)
    reps = checks.check_symbol_identities(ws2.state)
    assert any(not r.passed for r in reps)


def test_report_json_shape():
    rep = CheckReport("string", {"r": 2})
    rep.zero("x", TSeries.zero(wave(2, 4, 2).phi.space, 2))
    obj = rep.to_json_obj()
    assert set(obj) >= {"check", "params", "status", "residual_monomials_if_failed", "millis"}
    assert obj["status"] == "pass"


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(0, 10 ** 6))
def test_O_commutes_to_d1(seed):
    ws = wave(2, 4, 3)
    O = OOperator(2)
    f = random_series(ws.phi.space, 3, random.Random(seed), terms=8)
    g = random_series(ws.phi.space, 3, random.Random(seed + 1), terms=4)
    assert O(f.diff("T1")) - O(f).diff("T1") == f.diff("T1")
    assert O(f + g * 3) == O(f) + O(g) * 3

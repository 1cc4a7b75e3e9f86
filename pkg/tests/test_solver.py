import json

import pytest

from gdhierarchy.psdo import PsDO
from gdhierarchy.series import TSeries
from gdhierarchy.solver import (ConfigError, HierarchyState, PatternViolation, TruncationSpec,
                                check_pattern, flow_rhs, initial_L, reassemble, solve_jets,
                                stratify)

from conftest import solved


def test_spec_validation():
    with pytest.raises(ConfigError):
        TruncationSpec(1, 4, 3)
    with pytest.raises(ConfigError):
        TruncationSpec(2, 5, 3, M=3)
    spec = TruncationSpec(3, 8, 6)
    assert spec.M == 2 * 3 + 6 + 2
    with pytest.raises(ConfigError):
        TruncationSpec(3, 3, 2).require_dilaton()


def test_initial_operator():
    spec = TruncationSpec(2, 3, 2)
    L = initial_L(spec)
    x = TSeries.var(spec.space(), "T1", 2)
    assert L[2] == 1 and L[0] == (x * 2).eps_shift(-2)


def test_kdv_first_layer():
    # r=2: u = 2 eps^-2 x at T>=2 = 0 and du/dT3 = eps^2 (3/2 u u' + 1/4 u''') there
    st = solved(2, 5, 3)
    u = st.L[0]
    sp = st.space
    x = TSeries.var(sp, "T1", 3)
    base = u.set_zero([n for n in sp.names if n != "T1"])
    assert base == (x * 2).eps_shift(-2)
    du3 = u.diff("T3").set_zero([n for n in sp.names if n != "T1"])
    assert du3 == (x * 6).eps_shift(-2)


def test_flow_rhs_vanishes_at_high_orders_and_trivial_flows():
    spec = TruncationSpec(3, 6, 2)
    L = initial_L(spec)
    assert flow_rhs(L, 2, 3).order < 2
    assert not any(flow_rhs(L, 3, 3).coeffs.values())


@pytest.mark.parametrize("r,N,D", [(2, 6, 4), (3, 7, 4), (4, 6, 3)])
def test_independent_of_multiples_of_r(r, N, D):
    st = solved(r, N, D)
    for m in range(r, N + 1, r):
        for i in range(r - 1):
            assert not st.L[i].diff(f"T{m}")


def test_stratify_and_reassemble():
    st = solved(3, 6, 4)
    jmax = max(p - i + 3 for i in range(2) for p in st.L[i].eps_powers())
    strata = stratify(st, jmax)
    assert reassemble(strata, 3) == st.L
    for S in strata:
        for i in range(2):
            assert S[i].eps_powers() in ([], [0])


def test_pattern_violation_detected():
    st = solved(2, 5, 3)
    bad = dict(st.L.coeffs)
    bad[0] = bad[0] + TSeries.const(st.space, 1, st.spec.D, eps=-5)
    with pytest.raises(PatternViolation):
        check_pattern(HierarchyState(st.spec, PsDO(st.ring, bad)))


def test_json_roundtrip():
    st = solved(3, 5, 3)
    obj = json.loads(json.dumps(st.to_json_obj()))
    back = HierarchyState.from_json_obj(obj)
    assert back.spec == st.spec and back.L == st.L
    with pytest.raises(ConfigError):
        HierarchyState.from_json_obj({"format": "other"})


def test_resume_matches_fresh_solve():
    small = solve_jets(TruncationSpec(2, 5, 2))
    resumed = solve_jets(TruncationSpec(2, 5, 4), resume=small)
    assert resumed.L == solved(2, 5, 4).L
    with pytest.raises(ConfigError):
        solve_jets(TruncationSpec(3, 5, 4), resume=small)


def test_depth_stability():
    a = solve_jets(TruncationSpec(3, 6, 3))
    b = solve_jets(TruncationSpec(3, 6, 3, M=a.spec.M + 2))
    assert a.L == b.L

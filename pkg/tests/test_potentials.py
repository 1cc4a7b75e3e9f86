import pytest

from gdhierarchy.potentials import (DictionaryMap, Genus0Oracle, NonRational,
                                    OpenDiskOracle, SelectionRuleViolation, build_table,
                                    closed_genus0_table, closed_two_point, compare_closed_with_oracle,
                                    conjectural_open_Fg, correlators_of, extract, hessian_table,
                                    key_rule, open_F0, open_rule, phi_rule, primary_seeds,
                                    r2_bridge, r2_bridge_factor)
from gdhierarchy.scalars import CycScalar, Q
from gdhierarchy.series import TSeries

from conftest import solved, wave


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_dictionary_identities(r):
    dm = DictionaryMap(r, 4 * r)
    assert dm.factor(1) == CycScalar.zeta_power(r, r - 2)
    for k in range(1, 3 * r + 1):
        assert dm.factor(k) / dm.factor(k + r) == CycScalar.zeta_power(r, r - 2) * (k + r)
        assert dm.k_of(*dm.label(k)) == k
    assert dm.factor(r + 1) == Q(1, r + 1)


def test_selection_rule_examples():
    r = 3
    assert open_rule((), r + 1, r, 0)                  # <sigma^{r+1}>_0
    assert open_rule(((0, 1),), 0, r, 1)               # <tau^0_1>_1
    assert open_rule(((0, 0),), 1, r, 0)               # <tau^0_0 sigma>_0
    assert not open_rule(((0, 0),), 2, r, 0)
    assert phi_rule([r + 1], r, 1)
    assert key_rule("closed", (((0, 0), (0, 0), (1, 0)), 0), r, 0)


def test_r2_closed_genus0_matches_kdv_formula():
    st = solved(2, 7, 6)
    table = closed_genus0_table(st)
    assert len(table) > 20
    for (ins, k), v in table.items():
        ds = [d for _, d in ins]
        assert all(a == 0 for a, _ in ins)
        assert v == OpenDiskOracle.closed(ds)


def test_r3_closed_values():
    st = solved(3, 8, 6)
    t = closed_genus0_table(st)
    assert t[(((0, 0), (0, 0), (1, 0)), 0)] == 1
    assert t[(((1, 0), (1, 0), (1, 0), (1, 0)), 0)] == Q(1, 3)
    # descendants from the genus-0 TRR oracle
    oracle = Genus0Oracle(3, primary_seeds(t))
    assert oracle(((0, 1), (1, 0), (1, 0), (1, 0), (1, 0))) == Q(2, 3)
    assert t[(((0, 1), (1, 0), (1, 0), (1, 0), (1, 0)), 0)] == Q(2, 3)
    n, bad = compare_closed_with_oracle(st)
    assert n > 300 and not bad


def test_two_point_rejects_trivial_flow():
    with pytest.raises(ValueError):
        closed_two_point(solved(3, 6, 3), 3)


@pytest.mark.parametrize("r", [2, 3])
def test_hessian_symmetric_in_primaries(r):
    H = hessian_table(solved(r, 2 * r + 1, 4))
    for a in range(1, r):
        for b in range(1, r):
            assert H[(a, b)] == H[(b, a)]


def test_open_disk_oracle_literature_values():
    p = OpenDiskOracle()
    assert p([], 3) == 1 and p([0], 1) == 1
    # open dilaton in genus 0: <tau_1 X sigma^k> = (n + k - 1) <X sigma^k>
    assert p([1], 3) == 2 * p([], 3)
    assert p([1, 0], 1) == 1 * p([0], 1)
    # open string: <tau_0 tau_1 sigma> = <tau_0 sigma>
    assert p([0, 1], 1) == p([0], 1)


@pytest.mark.parametrize("r", [2, 3])
def test_open_string_fixture(r):
    ws = wave(r, 2 * r + 1, 4)
    F = open_F0(ws)
    assert extract(F, DictionaryMap(r, ws.spec.N), [(0, 0)], 1) == 1


@pytest.mark.parametrize("r", [2, 3])
def test_conjectural_genus_one_dilaton_constant(r):
    ws = wave(r, 2 * r + 1, 3)
    F1 = conjectural_open_Fg(ws, 1)
    assert extract(F1, DictionaryMap(r, ws.spec.N), [(0, 1)]) == Q(1, 2)


def test_r2_bridge_factor():
    assert r2_bridge_factor(0, 1) == 1
    assert r2_bridge_factor(0, 3) == -2
    assert r2_bridge_factor(1, 0) == 1
    assert r2_bridge(Q(5), 1, 2) == r2_bridge_factor(1, 2) * 5
    with pytest.raises(ArithmeticError):
        r2_bridge(Q(1), 1, 1)


def test_injected_corruption_is_caught():
    ws = wave(3, 7, 3)
    dm = DictionaryMap(3, 7)
    F = open_F0(ws)
    sp = F.space
    bad = F + TSeries.monomial(sp, {"t0_1": 2}, F.cap, coeff=7)
    with pytest.raises(SelectionRuleViolation):
        correlators_of(bad, dm, "open", 0)
    irr = F + TSeries.monomial(sp, {"t1_0": 1}, F.cap, coeff=CycScalar.zeta_power(3, 1))
    with pytest.raises((NonRational, SelectionRuleViolation)):
        correlators_of(irr, dm, "open", 0)
    ok = correlators_of(F, dm, "open", 0)
    assert all(isinstance(v, type(Q(1))) for v in ok.values())


def test_table_outputs():
    ws = wave(2, 5, 3, 1)
    tbl = build_table("conjectural", 1, ws.state, ws)
    assert tbl.entries and all(e["conjectural"] for e in tbl.entries)
    lines = tbl.to_csv().splitlines()
    assert lines[0] == "flavor,genus,insertions,k,value,conjectural,selection_rule_checked"
    assert len(lines) == len(tbl.entries) + 1
    assert tbl.to_json() == tbl.to_json()
    closed = build_table("closed", 0, ws.state, ws)
    assert not any(e["conjectural"] for e in closed.entries)
    with pytest.raises(ValueError):
        build_table("closed", 1, ws.state, ws)
    with pytest.raises(ValueError):
        build_table("bogus", 0, ws.state, ws)

import json
import subprocess
import sys

import pytest

from gdhierarchy.cli import (EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_STATE, EXIT_USAGE, main)


@pytest.fixture(scope="module")
def state_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "state.json"
    assert main(["solve", "--r", "2", "--times", "5", "--degree", "6", "--out", str(p)]) == EXIT_OK
    return p


def test_solve_writes_state(state_path):
    obj = json.loads(state_path.read_text())
    assert obj["format"] == "gdhierarchy-state"
    assert obj["spec"]["r"] == 2 and obj["spec"]["D"] == 6
    assert "wave" in obj


def test_verify_dilaton_passes(state_path, tmp_path):
    rep = tmp_path / "report.json"
    assert main(["verify", "--state", str(state_path), "--checks", "dilaton",
                 "--report", str(rep)]) == EXIT_OK
    entries = json.loads(rep.read_text())
    assert entries and all(e["status"] == "pass" for e in entries)
    for e in entries:
        assert set(e) >= {"check", "params", "status", "residual_monomials_if_failed", "millis"}


def test_verify_is_deterministic_with_threads(state_path, tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("GDH_THREADS", "3")
    assert main(["verify", "--state", str(state_path), "--stable", "--report", str(a),
                 "--checks", "string,trr1,dimension,r2bridge"]) == EXIT_OK
    monkeypatch.delenv("GDH_THREADS")
    assert main(["verify", "--state", str(state_path), "--stable", "--report", str(b),
                 "--checks", "string,trr1,dimension,r2bridge"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_numbers_conjectural_flagged(state_path, tmp_path):
    out = tmp_path / "c.json"
    assert main(["numbers", "--state", str(state_path), "--flavor", "conjectural",
                 "--genus", "1", "--out", str(out)]) == EXIT_OK
    obj = json.loads(out.read_text())
    assert obj["correlators"] and all(e["conjectural"] for e in obj["correlators"])
    csv = (tmp_path / "c.csv").read_text().splitlines()
    assert len(csv) == len(obj["correlators"]) + 1


def test_numbers_open_genus0_fixture(state_path, tmp_path):
    out = tmp_path / "o.json"
    assert main(["numbers", "--state", str(state_path), "--flavor", "open", "--out", str(out)]) == 0
    entries = json.loads(out.read_text())["correlators"]
    hit = [e for e in entries if e["k"] == 1 and e["insertions"] == [{"a": 0, "d": 0}]]
    assert hit and hit[0]["value"] == {"num": "1", "den": "1"}
    assert all(not e["conjectural"] for e in entries)


def test_config_file_supplies_flags(tmp_path):
    cfg = tmp_path / "gdh.json"
    out = tmp_path / "s.json"
    cfg.write_text(json.dumps({"solve": {"r": 3, "times": 4, "degree": 2, "out": str(out)}}))
    assert main(["--config", str(cfg), "solve"]) == EXIT_OK
    assert json.loads(out.read_text())["spec"]["N"] == 4
    # command line wins over the file
    assert main(["--config", str(cfg), "solve", "--times", "5"]) == EXIT_OK
    assert json.loads(out.read_text())["spec"]["N"] == 5


def test_bad_config_keys(tmp_path):
    cfg = tmp_path / "gdh.json"
    cfg.write_text(json.dumps({"solve": {"r": 2, "frobnicate": 1}}))
    assert main(["--config", str(cfg), "solve"]) == EXIT_CONFIG


def test_dilaton_with_small_N_is_config_error(tmp_path):
    s = tmp_path / "s.json"
    rep = tmp_path / "r.json"
    assert main(["solve", "--r", "3", "--times", "3", "--degree", "2", "--out", str(s)]) == 0
    assert main(["verify", "--state", str(s), "--checks", "dilaton",
                 "--report", str(rep)]) == EXIT_CONFIG
    assert json.loads(rep.read_text())[0]["status"] == "error"


def test_error_exit_codes(tmp_path, state_path):
    assert main(["verify", "--state", str(tmp_path / "missing.json"),
                 "--report", str(tmp_path / "r.json")]) == EXIT_STATE
    assert main(["solve", "--r", "two"]) == EXIT_USAGE
    assert main(["solve", "--r", "2"]) == EXIT_CONFIG
    assert main(["numbers", "--state", str(state_path), "--flavor", "closed",
                 "--genus", "1", "--out", str(tmp_path / "x.json")]) == EXIT_CONFIG
    assert main(["verify", "--state", str(state_path), "--checks", "bogus"]) == EXIT_CONFIG


def test_failed_check_exit_code(tmp_path, state_path):
    obj = json.loads(state_path.read_text())
    terms = obj["wave"]["Phi"]["terms"]
    # a low-degree term: O lowers the exactness cap, so top-degree terms are unseen
    t = next(t for t in terms if 0 < sum(t["exponents"][1:]) <= 2)
    t["eps"][0]["num"] = str(int(t["eps"][0]["num"]) + 1)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    rep = tmp_path / "r.json"
    assert main(["verify", "--state", str(bad), "--checks", "dilaton",
                 "--report", str(rep)]) == EXIT_FAILED
    assert any(e["status"] == "fail" for e in json.loads(rep.read_text()))


def test_module_entry_point(state_path, tmp_path):
    out = subprocess.run([sys.executable, "-m", "gdhierarchy", "verify", "--state", str(state_path),
                          "--checks", "string", "--report", str(tmp_path / "r.json")],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr

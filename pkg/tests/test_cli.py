import json

import pytest

from taylorsieve.cli import main, parse_range
from taylorsieve.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_range():
    assert parse_range("1..3") == [1, 2, 3]
    assert parse_range("2-4") == [2, 3, 4]
    assert parse_range("1,5") == [1, 5]
    with pytest.raises(ConfigError):
        parse_range("a..b")


def test_zeta_U(capsys):
    code, out, _ = run(capsys, "zeta", "--scheme", "U/3", "--E", "12")
    assert code == 0
    assert "closed form: 243/256" in out
    value = float(out.split("truncated at E=12: (")[1].split(",")[0])
    assert abs(value - 243 / 256) < 1e-4


def test_zeta_P1_and_csv(capsys, tmp_path):
    out_csv = tmp_path / "z.csv"
    code, out, _ = run(capsys, "zeta", "--scheme", "L/2", "--E", "6", "--out", str(out_csv))
    assert code == 0 and "closed form: 3/8" in out
    assert out_csv.read_text().startswith("degree,count,")


def test_points(capsys):
    code, out, _ = run(capsys, "points", "--scheme", "P2/2", "--E", "3")
    assert code == 0
    assert "1,7,7\n2,21,7\n3,73,22" in out


def test_surjectivity_one_point(capsys, tmp_path):
    scheme = tmp_path / "pt.json"
    scheme.write_text(json.dumps({"p": 2, "n": 2, "equations": ["x1", "x2"], "dim": 0}))
    # the smoothness quotient of P^2 (identity on gradients) carried by one point
    cond = tmp_path / "id.json"
    cond.write_text(json.dumps({"kind": "constant", "matrix": [[1, 0], [0, 1]]}))
    code, out, _ = run(capsys, "surjectivity", "--scheme", str(scheme), "--condition", str(cond),
                       "--e", "2", "--d", "0..2")
    assert code == 0
    assert "0,1,3,0\n1,3,3,1\n2,3,3,1" in out
    assert "d0 = 1" in out


def test_sieve_exhaustive(capsys):
    code, out, _ = run(capsys, "sieve", "--scheme", "P2/2", "--d", "1..2", "--E", "1")
    assert code == 0
    rows = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert rows[0].startswith("d,mode,probability_num")
    assert rows[1].startswith("1,exhaustive,7,8,")


def test_sieve_mc_reproducible(capsys):
    args = ("sieve", "--scheme", "U/5", "--condition", "conic", "--d", "10", "--mode", "mc",
            "--trials", "3000", "--seed", "4")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_sieve_exact_with_Z(capsys, tmp_path):
    cond = tmp_path / "c.json"
    cond.write_text(json.dumps({"kind": "smoothness", "Z": [[1, 0, 0]], "T": [[1]]}))
    code, out, _ = run(capsys, "sieve", "--scheme", "P2/2", "--condition", str(cond),
                       "--d", "6", "--mode", "exact")
    assert code == 0
    # six remaining rational points and the 1/2 factor from Z
    assert "6,exact,117649,524288," in out


def test_diag(capsys):
    code, out, _ = run(capsys, "diag", "--n", "1", "--q", "2", "--d-max", "2", "--E", "6")
    assert code == 0 and "P_d empty for d = 0..2" in out


def test_conic_demo(capsys):
    code, out, _ = run(capsys, "conic-demo")
    assert code == 0
    assert "x0*x1 + x0*x2 + 4*x1^2 + 4*x2^2" in out and "smooth = True" in out


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "zeta", "--scheme", "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "points", "--scheme", str(bad))[0] == 2
    assert run(capsys, "zeta", "--scheme", "P2/6")[0] == 2
    assert run(capsys, "sieve", "--scheme", "P2/2", "--d", "9")[0] == 3
    assert run(capsys, "conic-demo", "--x", "1,0,2")[0] == 4
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "zeta", "--scheme", "P2/2", "--E", "0")[0] == 2


def test_config_is_echoed(capsys):
    _, out, _ = run(capsys, "points", "--scheme", "P1/2", "--E", "2")
    cfg = json.loads(out.splitlines()[0][len("# config "):])
    assert cfg["command"] == "points" and len(cfg["config_hash"]) == 16

import json

import pytest

from shepwm.cli import EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, default_cache_path, main
from shepwm.parametric import save_cache


@pytest.fixture
def cache_env(tmp_path, monkeypatch, build):
    monkeypatch.setenv("SHE_CACHE_DIR", str(tmp_path / "cache"))
    (tmp_path / "cache").mkdir()
    save_cache(build(3)[0], default_cache_path(3))
    return tmp_path


def test_build_text_and_json(capsys):
    assert main(["build", "--n", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "x1 + x2 + x3 - m = 0" in out and "s1 - m = 0" in out
    assert main(["build", "--n", "3", "--json"]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["orders"] == [5, 7] and len(body["reduced"]["polys"]) == 2


def test_solve_uses_cache_dir(cache_env, capsys):
    assert main(["solve", "--n", "3", "--m", "1/2", "--json"]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["groups"][0]["angles_deg"] == [50.06528, 62.26686, 71.12892]
    assert body["discarded"]["sign-filter"] >= 1
    assert main(["solve", "--n", "3", "--m", "1/2", "--degrees"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "50.06528 62.26686 71.12892"


def test_param_then_solve(tmp_path, capsys):
    out = tmp_path / "c2.json"
    assert main(["param", "--n", "2", "--out", str(out), "--validate", "3"]) == EXIT_OK
    assert out.exists()
    assert main(["solve", "--n", "2", "--m", "3/5", "--cache", str(out)]) == EXIT_OK
    assert "group(s)" in capsys.readouterr().out


def test_sweep_writes_files(cache_env, capsys):
    csv_path, svg_path = cache_env / "s.csv", cache_env / "s.svg"
    rc = main(["sweep", "--n", "3", "--from", "0.4", "--to", "0.6", "--step", "1/100",
               "--csv", str(csv_path), "--svg", str(svg_path)])
    assert rc == EXIT_OK
    assert csv_path.read_text().startswith("m,group_index,alpha_1")
    assert svg_path.exists()


def test_verify_exit_codes(capsys):
    ok = ["verify", "--angles", "10.055,21.255,33.889,66.911,74.966", "--orders", "5,7,11,13",
          "--m", "3/4"]
    assert main(ok) == EXIT_OK
    assert main(["verify", "--angles", "10,20,30", "--orders", "5,7"]) == EXIT_VERIFY
    assert main(["verify", "--angles", "10,x", "--orders", "5"]) == EXIT_USAGE
    assert main(["verify", "--angles", "30,20", "--orders", "5"]) == EXIT_USAGE


def test_usage_errors(capsys, cache_env):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--n", "3"])
    assert exc.value.code == EXIT_USAGE
    assert main(["solve", "--n", "3", "--m", "7/5"]) == EXIT_USAGE
    assert main(["solve", "--n", "1", "--m", "1/2"]) == EXIT_USAGE
    assert main(["solve", "--n", "3", "--m", "1/2", "--cache", str(cache_env / "none.json")]) == EXIT_USAGE


def test_computation_error(cache_env, capsys):
    bad = cache_env / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--n", "3", "--m", "1/2", "--cache", str(bad)]) == EXIT_COMPUTE

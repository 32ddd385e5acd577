import json

import pytest

from floerd.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_d_command(capsys):
    code, out, _ = run(capsys, "d", "--knot", "torus:4,5", "--q", "25", "--m", "5")
    assert code == 0
    assert json.loads(out) == {"q": 25, "m": 5, "d": "0/1"}


def test_d_with_window_override(capsys):
    code, out, _ = run(capsys, "d", "--knot", "torus:4,5", "--q", "25", "--m", "0", "--window", "20")
    assert code == 0 and json.loads(out)["d"] == "0/1"


def test_window_too_small_is_math_error(capsys):
    code, _, err = run(capsys, "d", "--knot", "torus:4,5", "--q", "25", "--m", "0", "--window", "1")
    assert code == 1 and "window" in err


def test_dbar_csv(capsys):
    code, out, _ = run(capsys, "dbar", "--knot", "torus:4,5", "--p", "5", "--format", "csv")
    assert code == 0
    assert out == "m,d,dbar\n0,0/1,0/1\n5,0/1,0/1\n10,0/1,0/1\n"


def test_dbar_all_m(capsys):
    code, out, _ = run(capsys, "dbar", "--knot", "torus:2,3", "--p", "3", "--all-m")
    assert code == 0
    assert sorted(int(k) for k in json.loads(out)["d"]) == [0, 1, 2, 3, 4]


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--p", "7")
    obj = json.loads(out)
    assert code == 0 and obj["d0_upper"] == "-8/1" and obj["dp"] == "-6/1"


def test_metab_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "metab", "enumerate", "--p", "3", "--n", "2", "--form", "+-")
    assert code == 0 and json.loads(out)["count"] == 3

    code, out, _ = run(capsys, "metab", "special-vector", "--p", "3", "--gens", "1,3")
    assert code == 0 and json.loads(out)["z"] == [3, 0]

    table = tmp_path / "dbar.json"
    table.write_text(json.dumps({"p": 3, "dbar": {"0": "0/1", "3": "2/1"}}))
    code, out, _ = run(capsys, "metab", "verify", "--p", "3", "--n", "1", "--dbar", str(table))
    assert code == 0 and json.loads(out)["verdict"] == "obstructed"


def test_obstruct_bounds_only_to_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "obstruct", "--p", "7", "--bounds-only", "--out", str(out))
    assert code == 0 and json.loads(out.read_text())["verdict"] == "obstructed"


@pytest.mark.parametrize(
    "argv",
    [
        ["d", "--knot", "torus:4,6", "--q", "3", "--m", "0"],
        ["d", "--knot", "torus:4,5", "--q", "5", "--m", "0"],
        ["bounds", "--p", "5"],
        ["metab", "enumerate", "--p", "3", "--n", "5"],
        ["metab", "special-vector", "--p", "3", "--gens", "1,x"],
        ["nonsense"],
        ["d", "--knot", "lp:7", "--q", "49", "--m", "0"],
    ],
)
def test_math_and_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_io_errors_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "metab", "verify", "--p", "3", "--n", "1", "--dbar", str(tmp_path / "nope.json"))
    assert code == 2 and "nope.json" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "metab", "verify", "--p", "3", "--n", "1", "--dbar", str(bad))
    assert code == 2
    code, _, err = run(capsys, "obstruct", "--p", "7", "--out", str(tmp_path / "no" / "r.json"))
    assert code == 2


def test_console_script_installed():
    import shutil
    import subprocess

    exe = shutil.which("floerd")
    assert exe is not None
    res = subprocess.run([exe, "bounds", "--p", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["dp"] == "-2/1"

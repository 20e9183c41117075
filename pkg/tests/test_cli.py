import json
import shutil
import subprocess

import pytest

from jetvar.cli import UsageError, main, parse_problem


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_free_particle_euler_lagrange(tmp_path, capsys):
    f = write(tmp_path, "free.txt", "n = 1\nm = 1\nr = 1\nlagrangian = y1_1^2/2\n")
    code, out, _ = run(capsys, "el", f)
    assert code == 0
    assert "E_1 = -y1_11" in out.splitlines()


def test_homogeneous_reduction(tmp_path, capsys):
    f = write(tmp_path, "hom.txt", "chart = homogeneous\nlagrangian = X2_1^2/X1_1  # running example\n")
    code, out, _ = run(capsys, "el", f, "--reduce")
    lines = out.splitlines()
    assert code == 0
    assert "L = y1_1^2" in lines and "E_1 = -2*y1_11" in lines
    assert lines.index("L = y1_1^2") < lines.index("E_1 = -2*y1_11")


def test_reduce_rejects_non_homogeneous(tmp_path, capsys):
    f = write(tmp_path, "bad.txt", "chart = homogeneous\nlagrangian = X2_1^2\n")
    code, _, err = run(capsys, "reduce", f)
    assert code == 2 and "homogeneous" in err


def test_missing_lagrangian_is_a_usage_error(tmp_path, capsys):
    f = write(tmp_path, "eq.txt", "equation = y1_11\n")
    code, _, err = run(capsys, "el", f)
    assert code == 2 and err.startswith("jetvar: error:")


@pytest.mark.parametrize("text,verdict", [("y1_11", "yes"), ("y1_1", "no"), ("y1_11 + y1^3", "yes")])
def test_variational_check(tmp_path, capsys, text, verdict):
    f = write(tmp_path, "eq.txt", f"equation = {text}\n")
    code, out, _ = run(capsys, "check", f)
    assert code == 0
    assert f"variational: {verdict}" in out.splitlines()
    if verdict == "no":
        assert "H^1_11 = 2" in out.splitlines()


def test_group_axioms_suite(capsys):
    code, out, _ = run(capsys, "suite", "group-axioms", "--seed", "7", "--samples", "50", "--n", "2", "--r", "3")
    assert code == 0
    assert "status: ok" in out


def test_souriau_suite_reports_constant(tmp_path, capsys):
    f = write(tmp_path, "sou.txt", "lagrangian = y1_1^2/2\ncurve = t, t^2\ncurve = t, 3*t + 5\n")
    code, out, _ = run(capsys, "suite", "souriau", "--problem", f)
    assert code == 0
    assert "F-recurrence constant" in out
    assert "residual (t, t^2) = -2" in out


def test_unknown_suite(capsys):
    code, _, err = run(capsys, "suite", "foo")
    assert code == 2
    assert "unknown suite" in err and "group-axioms" in err and "souriau" in err


def test_structured_output_is_deterministic(tmp_path, capsys):
    f = write(tmp_path, "eq.txt", "equation = y1_1\n")
    _, first, _ = run(capsys, "check", f, "--format", "structured")
    _, second, _ = run(capsys, "--format", "structured", "check", f)
    assert first == second
    doc = json.loads(first)
    assert doc["answers"] == [{"name": "variational", "value": False}]
    _, a, _ = run(capsys, "suite", "invariants", "--format", "structured", "--seed", "3", "--samples", "5")
    _, b, _ = run(capsys, "suite", "invariants", "--format", "structured", "--seed", "3", "--samples", "5")
    assert a == b


def test_failing_check_sets_exit_status(capsys):
    code, out, _ = run(capsys, "suite", "chart-change", "--r", "3")
    assert code in (0, 1)
    assert ("status: ok" in out) == (code == 0)


def test_max_order_cap(tmp_path, capsys):
    f = write(tmp_path, "deep.txt", "lagrangian = y1_111\n")
    code, _, err = run(capsys, "el", f, "--max-order", "2")
    assert code == 2 and "r=2" in err


@pytest.mark.parametrize("text", ["n = two\n", "colour = red\n", "lagrangian = y1_1 +\n",
                                  "chart = polar\n", "n = 1\nn = 2\n", "curve = t\n"])
def test_problem_file_errors(text):
    with pytest.raises(UsageError):
        parse_problem(text)


def test_problem_file_parsing():
    spec = parse_problem("n = 2\nequation = y1_11 + y1_22, \n".replace(", \n", "\n"))
    assert spec.n == 2 and len(spec.equation) == 1 and spec.r == 2
    spec = parse_problem("equation = y1_11, y2_1\nm = 2\n")
    assert len(spec.equation) == 2


@pytest.mark.skipif(shutil.which("jetvar") is None, reason="console script not installed")
def test_console_script(tmp_path):
    f = write(tmp_path, "free.txt", "lagrangian = y1_1^2/2\n")
    done = subprocess.run(["jetvar", "el", f], capture_output=True, text=True, check=False)
    assert done.returncode == 0 and "E_1 = -y1_11" in done.stdout

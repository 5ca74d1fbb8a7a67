import pandas as pd
import pytest

from bench import COLUMNS
from cli import EXIT_BUDGET, EXIT_FAILED, EXIT_INPUT, EXIT_OK, main


@pytest.fixture
def write(tmp_path):
    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def test_gen_then_solve(tmp_path, capsys):
    path = str(tmp_path / "sigma2.txt")
    assert main(["gen", "--family", "sigma", "--n", "2", "-o", path]) == EXIT_OK
    assert main(["solve", "--alg", "slp", "--stats", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("unifiable")
    assert "X -> " in out
    assert "max_label_length=0b1111" in out


def test_gen_to_stdout(capsys):
    assert main(["gen", "--family", "sigma-prime", "--n", "0"]) == EXIT_OK
    assert "X_1 + X_2 =d X" in capsys.readouterr().out


def test_compressed_output(tmp_path, capsys):
    path = str(tmp_path / "sigma3.txt")
    main(["gen", "--family", "sigma", "--n", "3", "-o", path])
    capsys.readouterr()
    assert main(["solve", "--compressed", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[slp:N" in out
    assert "SLP:" in out


def test_not_unifiable(write, capsys):
    assert main(["solve", "--alg", "ta", write("p.txt", "X = Y + Z\nY = X * W\n")]) == EXIT_FAILED
    assert capsys.readouterr().out.startswith("not-unifiable (dependency-cycle)")


def test_budget_exceeded(tmp_path):
    path = str(tmp_path / "sigma3.txt")
    main(["gen", "--family", "sigma", "--n", "3", "-o", path])
    assert main(["solve", "--alg", "ta", "--budget", "5", path]) == EXIT_BUDGET


def test_input_errors(write, capsys):
    assert main(["solve", write("bad.txt", "X = Y = Z\n")]) == EXIT_INPUT
    assert "line 1, column 7" in capsys.readouterr().err
    assert main(["solve", write("mixed.txt", "X = Y + Z\nU =d V * W\n")]) == EXIT_INPUT
    assert main(["solve", "--alg", "hom", "--require-hom", write("sum.txt", "X = Y + Z\n")]) == EXIT_INPUT
    assert main(["solve", "missing-file.txt"]) == EXIT_INPUT


def test_argument_errors():
    assert main(["solve"]) == EXIT_INPUT
    assert main(["solve", "--alg", "rewrite", "p.txt"]) == EXIT_INPUT
    assert main(["--help"]) == EXIT_OK


def test_verify(write, capsys):
    problem = write("p.txt", "X = T * Y\n")
    good = write("good.txt", "Y -> a + b\nX -> T * a + T * b\n")
    bad = write("bad.txt", "Y -> a + b\nX -> T * a\n")
    assert main(["verify", problem, good]) == EXIT_OK
    assert "✅ substitution verified" in capsys.readouterr().out
    assert main(["verify", "--json", problem, bad]) == EXIT_FAILED
    assert '"passed": false' in capsys.readouterr().out


def test_verbose_solve(tmp_path, capsys):
    path = str(tmp_path / "sigma1.txt")
    main(["gen", "--family", "sigma", "--n", "1", "-o", path])
    assert main(["-v", "solve", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "📋 results" in out
    assert "every decider agrees" in out


def test_bench_csv(tmp_path, capsys):
    path = tmp_path / "bench.csv"
    assert main(["bench", "--family", "sigma", "--alg", "ta", "slp", "--max-n", "1", "--quiet", "--csv", str(path)]) == EXIT_OK
    frame = pd.read_csv(path)
    assert list(frame.columns) == COLUMNS
    assert len(frame) == 4
    assert "sigma" in capsys.readouterr().out

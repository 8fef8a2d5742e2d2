import subprocess
import sys

import pytest

from spdwg.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, config_from_args, main, read_config_file


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_markdown_table(capsys):
    code, out, _ = _run(capsys, "--problem", "t3", "--k", "2", "--s", "1", "--gammas", "1,1,1",
                        "--mesh", "tri", "--levels", "0..1", "--format", "markdown")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("**t3**")
    assert lines[2].startswith("| 1/h | eps0 | Rate")
    assert lines[4].startswith("| 2 | ") and lines[5].startswith("| 4 | ")


def test_dof_report(capsys):
    code, out, _ = _run(capsys, "--dof-report", "--k", "2", "--mesh", "tri", "--levels", "0..3")
    assert code == EXIT_OK
    rows = [line.split(",") for line in out.splitlines()]
    assert rows[0] == ["level", "NT", "NE", "simplified", "general", "difference"]
    assert rows[1] == ["0", "8", "16", "128", "160", "32"]
    for r in rows[1:]:
        assert int(r[5]) == 2 * int(r[2])


def test_max_principle_report(capsys):
    code, out, _ = _run(capsys, "--problem", "t14", "--max-principle", "--levels", "2")
    assert code == EXIT_OK
    assert "min_interior u_h|v" in out and "max_boundary u_h|e" in out


@pytest.mark.parametrize("argv", [["--problem", "t99"], ["--problem", "t3", "--s", "3"],
                                  ["--problem", "t3", "--levels", "3..1"],
                                  ["--problem", "t3", "--gammas", "1,x,1"], []])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == EXIT_CONFIG
    assert "configuration error" in err


def test_unwritable_output_exit_4(capsys, tmp_path):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = _run(capsys, "--problem", "t3", "--levels", "0", "--output", str(target))
    assert code == EXIT_IO and "I/O" in err


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# study\nproblem = t5\nlevels = 0..2\nformat = markdown\nk = 2\n")
    assert read_config_file(cfg)["levels"] == (0, 1, 2)
    config = config_from_args(["--config", str(cfg), "--levels", "1,2"])
    assert config.problem == "t5" and config.levels == (1, 2) and config.format == "markdown"
    cfg.write_text("colour = blue\n")
    assert main(["--config", str(cfg)]) == EXIT_CONFIG


def test_csv_is_byte_identical_across_threads(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("SPDWG_THREADS", threads)
        path = tmp_path / f"out{threads}.csv"
        assert main(["--problem", "t8", "--levels", "0..1", "--output", str(path)]) == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_dumps(tmp_path, capsys):
    matrix, mesh = tmp_path / "A.txt", tmp_path / "mesh.txt"
    code, out, _ = _run(capsys, "--problem", "t3", "--levels", "0", "--condition",
                        "--dump-matrix", str(matrix), "--dump-mesh", str(mesh))
    assert code == EXIT_OK
    assert "level,n_unknowns,condition" in out
    assert matrix.read_text().startswith("% ")
    assert mesh.read_text().startswith("v ")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "spdwg", "--dof-report", "--levels", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("level,NT")

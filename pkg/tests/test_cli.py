import csv
import io

import pytest

from qeclipse import cli
from qeclipse.harness import read_rows

GRID = ["--n", "6", "--m-list", "1,2,4", "--sigma-list", "1,4,16", "--delta-list", "1,4", "--trials", "6"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestMargins:
    def test_text(self, capsys):
        code, out, _ = run(capsys, "margins", "--n", "6", "--m", "3")
        assert code == 0
        assert out.startswith("n = 6  m = 3")
        assert "tau = " in out and "pbarbar_factor = " in out

    def test_csv_single_row(self, capsys):
        code, out, _ = run(capsys, "margins", "--n", "6", "--m", "3", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 1
        row = rows[0]
        assert len(row["tau_j"].split(";")) == 3
        assert int(row["pbar_indicator"]) <= float(row["pbarbar_factor"]) <= int(row["linear_indicator"])

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        _, out, _ = run(capsys, "margins", "--format", "csv")
        run(capsys, "margins", "--format", "csv", "--out", str(tmp_path / "m.csv"))
        assert (tmp_path / "m.csv").read_text() == out


class TestPhase:
    def test_outputs_are_byte_identical_across_workers(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir()
        b.mkdir()
        assert run(capsys, "phase", *GRID, "--out", str(a / "g.csv"), "--svg", str(a / "h.svg"))[0] == 0
        assert (
            run(capsys, "phase", *GRID, "--workers", "2", "--out", str(b / "g.csv"), "--svg", str(b / "h.svg"))[0]
            == 0
        )
        names = sorted(p.name for p in a.iterdir())
        assert names == ["g.csv", "h.delta-1.svg", "h.delta-4.svg"]
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes()
        assert len(read_rows(a / "g.csv")) == 3 * 3 * 2

    def test_single_delta_keeps_svg_name(self, capsys, tmp_path):
        argv = GRID[:-4] + ["--delta-list", "2", "--trials", "4", "--svg", str(tmp_path / "one.svg")]
        assert run(capsys, "phase", *argv)[0] == 0
        assert [p.name for p in tmp_path.iterdir()] == ["one.svg"]

    def test_curves_are_printed(self, capsys):
        code, out, _ = run(capsys, "phase", *GRID)
        assert code == 0
        assert "p_bbar delta=1 " in out and "p_bbar delta=4 " in out and "linear " in out
        # no output file: the CSV goes to stdout after the curves
        assert "n,m,sigma,delta" in out

    def test_config_file_and_override(self, capsys, tmp_path):
        conf = tmp_path / "grid.conf"
        conf.write_text(
            "# desk-sized smoke grid\nn = 6\nm-list = 1, 2, 4\nsigma_list = 1 4 16\ndelta-list = 1,4\ntrials = 6\n",
            encoding="utf-8",
        )
        run(capsys, "phase", "--config", str(conf), "--out", str(tmp_path / "from_file.csv"))
        run(capsys, "phase", *GRID, "--out", str(tmp_path / "from_flags.csv"))
        assert (tmp_path / "from_file.csv").read_bytes() == (tmp_path / "from_flags.csv").read_bytes()
        run(capsys, "phase", "--config", str(conf), "--trials", "4", "--out", str(tmp_path / "o.csv"))
        assert {r.trials for r in read_rows(tmp_path / "o.csv")} == {4}


class TestOtherCommands:
    def test_widths_table(self, capsys):
        code, out, _ = run(capsys, "widths", "--n", "16", "--samples", "2000", "--sigma-list", "4,8")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,sigma,r,samples,estimate,stderr,bound,ratio"
        assert len(lines) == 3

    def test_widths_deterministic(self, capsys):
        argv = ("widths", "--n", "8", "--samples", "500")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_bound_prints_constants(self, capsys):
        code, out, _ = run(capsys, "bound", "--w", "1", "--eta", "0.1353352832366127")
        assert code == 0
        assert "C1 = 1.0, C2 = 1.0" in out and "prop1_m = 10" in out
        assert "warning" not in out

    def test_bound_flags_small_width(self, capsys):
        code, out, _ = run(capsys, "bound", "--w", "0.05", "--c2", "2")
        assert code == 0
        assert "warning: w < 0.1" in out and "C2 = 2.0" in out

    def test_bound_default_width_from_scene(self, capsys):
        _, out, _ = run(capsys, "bound", "--n", "64", "--sigma", "8", "--r", "2")
        assert "w = 1.6" in out

    def test_distcheck(self, capsys):
        code, out, _ = run(capsys, "distcheck")
        assert code == 0
        assert out.count("PASS") == 6


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["margins", "--n", "0"],
            ["margins", "--delta", "-1"],
            ["margins", "--format", "xml"],
            ["phase", "--m-list", "4,2", "--trials", "2"],
            ["phase", "--trials", "1"],
            ["phase", "--level", "1.5", "--trials", "2"],
            ["bound", "--eta", "1.5"],
            ["nonsense"],
            [],
        ],
    )
    def test_invalid_input(self, capsys, argv):
        assert run(capsys, *argv)[0] == 1

    def test_unknown_config_key(self, capsys, tmp_path):
        conf = tmp_path / "c.conf"
        conf.write_text("bogus = 3\n")
        code, _, err = run(capsys, "margins", "--config", str(conf))
        assert code == 1 and "bogus" in err

    def test_bad_config_choice(self, capsys, tmp_path):
        conf = tmp_path / "c.conf"
        conf.write_text("profile = huge\n")
        assert run(capsys, "phase", "--config", str(conf))[0] == 1

    def test_malformed_config_line(self, capsys, tmp_path):
        conf = tmp_path / "c.conf"
        conf.write_text("just words\n")
        assert run(capsys, "margins", "--config", str(conf))[0] == 1

    def test_solver_budget(self, capsys):
        code, _, err = run(capsys, "phase", *GRID, "--max-iter", "1")
        assert code == 2 and "budget" in err

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "margins", "--config", str(tmp_path / "absent.conf"))[0] == 3

    def test_unwritable_output(self, capsys, tmp_path):
        assert run(capsys, "margins", "--out", str(tmp_path / "no" / "dir" / "x.txt"))[0] == 3

    def test_help_is_success(self, capsys):
        assert run(capsys, "--help")[0] == 0

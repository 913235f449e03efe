import pytest

from imexkg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestMethods:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "methods", "list")
        assert code == 0
        assert out.count("IMKG") == 16

    def test_check_clean_method(self, capsys):
        code, out, _ = run(capsys, "methods", "check", "IMKG232a")
        assert code == 0
        assert "I_stable Y  A_stable Y  VI Y" in out
        assert "SD Y" in out
        assert "explicit polynomial 1 1 0.5 0.25" in out

    def test_check_flagged_method_exits_one(self, capsys):
        code, out, _ = run(capsys, "methods", "check", "IMKG243a")
        assert code == 1
        assert "flagged" in out
        assert "order2:" in out

    def test_unknown_method_exits_two(self, capsys):
        with pytest.raises(SystemExit) as err:
            run(capsys, "methods", "check", "IMKG999x")
        assert err.value.code == 2

    def test_usage_error_exits_two(self, capsys):
        with pytest.raises(SystemExit) as err:
            run(capsys, "methods")
        assert err.value.code == 2


class TestStability:
    def test_poly(self, capsys):
        code, out, _ = run(capsys, "stability", "poly", "IMKG343a")
        assert code == 0
        assert "kg_class KGNO" in out

    def test_hmap_row_count(self, capsys, tmp_path):
        path = tmp_path / "g.csv"
        code, out, _ = run(
            capsys, "stability", "hmap", "IMKG232b",
            "--xmax", "2.5", "--zmax", "50", "--nx", "21", "--nz", "31",
            "-o", str(path),
        )
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "x,z,rho"
        assert len(lines) == 1 + 21 * 31

    def test_hmap_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["stability", "hmap", "IMKG232a", "--xmax", "1.5", "--zmax", "20",
                "--nx", "11", "--nz", "11"]
        run(capsys, *args, "-o", str(a))
        run(capsys, *args, "-o", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_region(self, capsys):
        code, out, _ = run(capsys, "stability", "region", "IMKG232b", "--n0", "2.0")
        assert code == 0
        assert "T_contained(n0=2) Y" in out
        assert "gamma_min 0" in out


class TestDerive:
    def test_imkg3q4_tableau_file(self, capsys, tmp_path):
        path = tmp_path / "derived.tab"
        code, out, _ = run(
            capsys, "derive", "imkg3q4",
            "--d2", "1", "--d3", "1", "--alpha2", str(2 / 3), "--beta1", "0",
            "-o", str(path),
        )
        assert code == 0
        from imexkg import lookup, read_tableau_file

        derived = read_tableau_file(path)
        assert derived.equals(lookup("IMKG343a").tableau, tol=1e-12)


class TestRuns:
    def test_integrate_hevi(self, capsys, tmp_path):
        path = tmp_path / "traj.csv"
        code, out, _ = run(
            capsys, "integrate", "hevi", "IMKG232a",
            "--dt", "0.125", "--tend", "1.0", "-o", str(path),
        )
        assert code == 0
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 9

    def test_converge_hevi(self, capsys, tmp_path):
        path = tmp_path / "conv.csv"
        code, out, _ = run(
            capsys, "converge", "hevi", "IMKG343a",
            "--dts", "0.125,0.0625,0.03125,0.015625", "--tend", "1.0",
            "-o", str(path),
        )
        assert code == 0
        order = float(out.split("fitted_order")[1].split()[0])
        assert order == pytest.approx(3.0, abs=0.3)

    def test_bad_dts_exits_two(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "converge", "hevi", "IMKG343a",
            "--dts", "0.1", "--tend", "1.0", "-o", str(tmp_path / "x.csv"),
        )
        assert code == 2

    def test_integrate_column(self, capsys, tmp_path):
        path = tmp_path / "col.csv"
        code, _, _ = run(
            capsys, "integrate", "column", "IMKG232b",
            "--dt", "5.0", "--tend", "50.0", "-o", str(path),
        )
        assert code == 0
        assert len(path.read_text().splitlines()) == 12

import json
import pytest
from mngn.main import run

pytestmark = pytest.mark.integration


class TestSolveCommand:

    def test_paraboloid_trace(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--method", "mngn2-abd", "--x0", "0,3,3", "--trace"])
        out = capsys.readouterr().out
        assert code == 0
        assert "status: converged" in out
        norm_line = next(line for line in out.splitlines() if line.startswith("norm:"))
        assert float(norm_line.split()[1]) == pytest.approx(3.6816, abs=5e-3)
        assert out.splitlines()[0].split()[:3] == ["k", "alpha", "beta"]

    def test_norm_is_measured_from_profile(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--x0", "0,3,3", "--xbar", "1,2,3", "--output", "json"])
        payload = json.loads(capsys.readouterr().out)
        x = payload["result"]["x_final"]
        offset = [x[0] - 1.0, x[1] - 2.0, x[2] - 3.0]
        assert code in (0, 2)
        assert payload["norm"] == pytest.approx(sum(v * v for v in offset) ** 0.5, abs=1e-12)

    def test_json_output(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--x0", "0,3,3", "--output", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["method"] == "mngn2-abd"
        assert payload["result"]["converged"] is True
        assert "trace" not in payload["result"]

    def test_not_converged_exit_code(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--x0", "0,3,3", "--max-iter", "1"])
        assert code == 2
        assert "failed (max-iter)" in capsys.readouterr().out

    def test_fixed_eta_required(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--method", "mngn2-ab"])
        assert code == 1
        assert "eta" in capsys.readouterr().err

    def test_eta_rejected_for_other_methods(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--method", "mngn", "--eta", "0.5"])
        assert code == 1

    def test_single_method_only(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--method", "mngn,ckb1"])
        assert code == 1
        assert "exactly one method" in capsys.readouterr().err

    def test_wrong_start_length(self, capsys):
        code = run(["solve", "--problem", "paraboloid", "--x0", "0,3"])
        assert code == 1
        assert "expected 3" in capsys.readouterr().err


class TestBenchCommand:

    ARGS = ["bench", "--problem", "paraboloid", "--methods", "mngn2-abd,mngn2-a", "--trials", "3", "--seed", "7"]

    def test_table(self, capsys):
        code = run(self.ARGS + ["--title", "Paraboloid"])
        lines = capsys.readouterr().out.splitlines()
        assert code == 0
        assert lines[0] == "Paraboloid"
        assert [line.split()[0] for line in lines[3:]] == ["mngn2-abd", "mngn2-a"]

    def test_same_seed_same_bytes(self, tmp_path):
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        assert run(self.ARGS + ["--output", "csv", "--out", str(first)]) == 0
        assert run(self.ARGS + ["--output", "csv", "--jobs", "3", "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_json_determinism(self, capsys):
        run(self.ARGS + ["--output", "json"])
        first = capsys.readouterr().out
        run(self.ARGS + ["--output", "json"])
        assert capsys.readouterr().out == first

    def test_unknown_method_lists_valid(self, capsys):
        code = run(["bench", "--problem", "paraboloid", "--methods", "newton"])
        assert code == 1
        assert "mngn2-abd" in capsys.readouterr().err

    def test_unknown_format(self, capsys):
        code = run(self.ARGS + ["--output", "xml"])
        assert code == 1
        assert "table" in capsys.readouterr().err

    def test_unknown_problem(self, capsys):
        code = run(["bench", "--problem", "rosenbrock"])
        assert code == 1
        assert "chain" in capsys.readouterr().err

    def test_usage_error_writes_no_file(self, tmp_path):
        out = tmp_path / "bench.csv"
        code = run(["bench", "--problem", "paraboloid", "--trials", "0", "--out", str(out)])
        assert code == 1
        assert not out.exists()

    def test_missing_dimensions_is_runtime_failure(self, capsys):
        code = run(["bench", "--problem", "chain", "--trials", "1"])
        assert code == 2
        assert "invalid-input" in capsys.readouterr().err


class TestCheckCommand:

    def test_sphere_planes_passes(self, capsys):
        code = run(["check", "--problem", "sphere-planes", "--m", "8", "--n", "10"])
        out = capsys.readouterr().out
        assert code == 0
        assert "all checks passed" in out
        assert "FAIL" not in out

    def test_json(self, capsys):
        code = run(["check", "--problem", "chain", "--m", "8", "--n", "10", "--c", "first2",
                    "--points", "3", "--output", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["passed"] is True
        assert {c["name"] for c in payload["checks"]} == {"jacobian-vs-fd", "known-solution-residual", "known-norm"}

    def test_help_exits_cleanly(self, capsys):
        assert run(["check", "--help"]) == 0
        assert "--points" in capsys.readouterr().out

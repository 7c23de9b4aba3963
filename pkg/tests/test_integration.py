"""
End-to-end tests of the command line front end.
"""

import json

import numpy as np
import pytest

from cli.main import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from core.matrix_core import frobenius_dist
from models.lagrangian_models import (
    SymmetricUnitary,
    dump_point,
    point_from_json,
    random_lagrangian,
    unitary_to_involution,
)


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command from a scratch directory so the log file lands there."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("LAGRANGIAN_GAMMA_CONFIG", raising=False)
    monkeypatch.delenv("LAGRANGIAN_GAMMA_WORKERS", raising=False)
    return tmp_path


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


class TestDegreeCommand:
    def test_n3(self, capsys):
        code, data = run_json(capsys, ["degree", "--n", "3"])
        assert code == EXIT_OK
        assert data["degree"] == 4
        assert data["closed_form"] == 4
        assert len(data["points"]) == 8

    def test_even_n_is_input_error(self, capsys):
        assert main(["degree", "--n", "4"]) == EXIT_INPUT
        assert "non-orientable" in capsys.readouterr().err

    def test_custom_angles(self, capsys):
        code, data = run_json(capsys, ["degree", "--n", "5", "--angles", "0.5,1.0,2.0,3.0,4.0"])
        assert code == EXIT_OK
        assert data["degree"] == 8

    def test_table_output(self, capsys):
        assert main(["degree", "--n", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("=" * 70)
        assert "DEGREE OF THETA_0" in out

    def test_output_is_deterministic(self, capsys):
        first = run_json(capsys, ["degree", "--n", "3"])[1]
        second = run_json(capsys, ["degree", "--n", "3"])[1]
        assert first == second

    def test_log_file_written(self, capsys, workdir):
        main(["degree", "--n", "1", "--log-level", "DEBUG"])
        assert (workdir / "logs" / "lagrangian_gamma.log").exists()


class TestPreimagesCommand:
    def test_scalar(self, capsys):
        code, data = run_json(capsys, ["preimages", "--n", "1"])
        assert code == EXIT_OK
        assert [p["eps"] for p in data["points"]] == [[0], [1]]

    def test_even_n_allowed(self, capsys):
        code, data = run_json(capsys, ["preimages", "--n", "2"])
        assert code == EXIT_OK
        assert len(data["points"]) == 4

    @pytest.mark.parametrize("angles", ["1.0,0.5", "abc", "0.5"])
    def test_bad_angles(self, angles, capsys):
        assert main(["preimages", "--n", "2", "--angles", angles]) == EXIT_INPUT


class TestLemmaCommand:
    def test_all_routes(self, capsys):
        code, data = run_json(capsys, ["lemma", "--n", "9", "--method", "all"])
        assert code == EXIT_OK
        assert data["d_brute"] == data["d_rec"] == data["d_closed"] == 32

    def test_even_n_note(self, capsys):
        assert main(["lemma", "--n", "2", "--method", "brute"]) == EXIT_OK
        assert "non-theorem scope" in capsys.readouterr().out

    def test_brute_budget(self, capsys):
        assert main(["lemma", "--n", "30", "--method", "brute"]) == EXIT_INPUT

    def test_unknown_method_rejected_by_parser(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["lemma", "--n", "3", "--method", "guess"])
        assert excinfo.value.code == 2


class TestSearchCommand:
    def test_scalar_full_coverage(self, capsys):
        code, data = run_json(capsys, ["search", "--n", "1", "--starts", "100", "--seed", "7"])
        assert code == EXIT_OK
        assert data["coverage"] == 1.0
        assert len(data["solutions"]) == 2

    def test_no_starts_fails(self, capsys):
        assert main(["search", "--n", "1", "--starts", "0"]) == EXIT_FAILED


class TestVerifyCommand:
    def test_n3(self, capsys):
        code, data = run_json(capsys, ["verify", "--n", "3", "--trials", "50", "--seed", "42"])
        assert code == EXIT_OK
        assert data["all_passed"]

    def test_even_n(self, capsys):
        code, data = run_json(capsys, ["verify", "--n", "2", "--trials", "20"])
        assert code == EXIT_OK
        assert "degree_closed_form" not in {c["check"] for c in data["checks"]}

    def test_stored_matrix(self, capsys, workdir, rng):
        path = workdir / "r.json"
        dump_point(unitary_to_involution(random_lagrangian(2, rng)), path)
        assert main(["verify", "--n", "2", "--trials", "10", "--matrix", str(path)]) == EXIT_OK

    def test_corrupted_matrix(self, capsys, workdir):
        path = workdir / "bad.json"
        path.write_text('{"n": 2, "entries": [[1, 0]')
        assert main(["verify", "--n", "2", "--matrix", str(path)]) == EXIT_INPUT

    def test_missing_config(self, capsys):
        assert main(["verify", "--n", "1", "--config", "missing.yaml"]) == EXIT_INPUT


class TestProductCommand:
    def test_identity_first_factor(self, capsys, workdir, rng):
        b = random_lagrangian(3, rng)
        dump_point(SymmetricUnitary(np.eye(3)), workdir / "a.json")
        dump_point(b, workdir / "b.json")

        assert main(["product", "a.json", "b.json"]) == EXIT_OK
        product = point_from_json(json.loads(capsys.readouterr().out))
        assert frobenius_dist(product.a, b.a.conj()) < 1e-12

    def test_involution_model(self, capsys, workdir, rng):
        r = unitary_to_involution(random_lagrangian(2, rng))
        dump_point(r, workdir / "r.json")
        assert main(["product", "r.json", "r.json", "--model", "involution"]) == EXIT_OK
        product = point_from_json(json.loads(capsys.readouterr().out))
        assert frobenius_dist(product.r, r.r) < 1e-12

    def test_model_mismatch(self, capsys, workdir, rng):
        dump_point(random_lagrangian(2, rng), workdir / "a.json")
        assert main(["product", "a.json", "a.json", "--model", "involution"]) == EXIT_INPUT

    def test_invalid_point(self, capsys, workdir):
        (workdir / "a.json").write_text(json.dumps({"n": 1, "entries": [[[2.0, 0.0]]]}))
        (workdir / "b.json").write_text(json.dumps({"n": 1, "entries": [[[1.0, 0.0]]]}))
        assert main(["product", "a.json", "b.json"]) == EXIT_INPUT
        assert "unitary" in capsys.readouterr().err

    def test_dimension_mismatch(self, capsys, workdir):
        dump_point(SymmetricUnitary(np.eye(2)), workdir / "a.json")
        dump_point(SymmetricUnitary(np.eye(3)), workdir / "b.json")
        assert main(["product", "a.json", "b.json"]) == EXIT_INPUT


class TestFrameworkCommand:
    def test_grassmannian(self, capsys):
        code, data = run_json(capsys, ["framework", "--demo", "grassmannian", "--n", "3"])
        assert code == EXIT_OK
        assert data["distinct"] >= 2
        assert sum(row["count"] for row in data["components"]) == 100

    def test_su2(self, capsys):
        code, data = run_json(capsys, ["framework", "--demo", "su2", "--samples", "50"])
        assert code == EXIT_OK
        assert data["max_deviation"] <= 1e-12

    def test_closure(self, capsys):
        code, data = run_json(capsys, ["framework", "--demo", "closure", "--samples", "20"])
        assert code == EXIT_OK
        assert len(data["checks"]) == 6

"""Integration tests for the bmx command line."""

import json

import numpy as np
import pytest

from bmx.blocks import GRID_INDICES, BlockHypermatrix, top_b_hyper
from bmx.cli import run_cli
from bmx.commands.svd import svd_report
from bmx.config import Settings
from bmx.documents import parse_document, read_value, serialize
from bmx.hypermatrix import Hypermatrix3, Matrix, delta
from bmx.products import is_orthogonal
from bmx.svd import svd3


@pytest.fixture
def solvable_path(rng, write_value):
    """A normalized random input and a check that it decomposes within tolerance."""
    a = Hypermatrix3(
        rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
    )
    a = a / a.max_abs()
    assert svd_report(svd3(a), Settings()).passed
    return write_value("input.json", a)


def run_json(capsys, *args) -> dict:
    assert run_cli([str(a) for a in args]) == 0
    return json.loads(capsys.readouterr().out)


class TestSvdWorkflow:
    def test_decompose_and_verify(self, solvable_path, tmp_path):
        out, report = tmp_path / "svd.json", tmp_path / "report.json"
        args = ["svd", solvable_path, "-o", out, "--report", report]
        assert run_cli([str(a) for a in args]) == 0
        payload = json.loads(report.read_text())
        assert set(payload["residuals"]) == {
            "characteristic",
            "spectral",
            "reconstruction",
        }
        assert payload["passed"] is True
        svd_doc = json.loads(out.read_text())
        assert len(svd_doc["sigma"]) == 8
        assert len(svd_doc["families"]) == 3
        assert run_cli(["verify", "fixed-point", str(out), str(solvable_path)]) == 0

    def test_degenerate_input(self, delta2_path, capsys):
        assert run_cli(["svd", str(delta2_path)]) == 2
        assert "bmx: error:" in capsys.readouterr().err

    def test_matrix_svd(self, write_value, capsys):
        path = write_value("diag.json", Matrix(np.diag([3.0, 4.0])))
        doc = run_json(capsys, "svd", path)
        assert doc["sigma"] == pytest.approx([4.0, 3.0])
        assert doc["route"] in ("eigen", "vandermonde")


class TestAlgebraCommands:
    def test_product(self, delta2_path, capsys):
        doc = run_json(capsys, "product", delta2_path, delta2_path, delta2_path)
        assert parse_document(json.dumps(doc)) == delta(2)

    def test_matrix_product(self, write_value, capsys):
        a = write_value("a.json", Matrix([[1, 2], [3, 4]]))
        doc = run_json(capsys, "product", a, a)
        assert parse_document(json.dumps(doc)) == Matrix([[7, 10], [15, 22]])

    def test_background_product(self, delta2_path, capsys):
        doc = run_json(capsys, "product-bg", *[delta2_path] * 4)
        assert parse_document(json.dumps(doc)) == delta(2)

    def test_kron_and_dirsum(self, delta2_path, capsys):
        kron = run_json(capsys, "kron", delta2_path, delta2_path)
        assert kron["shape"] == [4, 4, 4]
        doc = run_json(capsys, "dirsum", delta2_path, delta2_path)
        assert parse_document(json.dumps(doc)) == delta(4)

    def test_rotate(self, delta2_path, capsys):
        doc = run_json(capsys, "rotate", delta2_path, "pi", "pi", "pi")
        assert parse_document(json.dumps(doc)) == delta(2)

    def test_rotate_angle_count(self, delta2_path, capsys):
        assert run_cli(["rotate", str(delta2_path), "pi"]) == 2
        assert "takes 3 angle(s)" in capsys.readouterr().err

    def test_verify_uncorrelated(self, delta2_path):
        paths = [str(delta2_path)] * 3
        assert run_cli(["verify", "uncorrelated", *paths]) == 0


class TestGenerate:
    def test_seeded_generation_is_reproducible(self, capsys):
        first = run_json(capsys, "gen-orthogonal", "--seed", 7)
        second = run_json(capsys, "gen-orthogonal", "--seed", 7)
        assert first == second
        assert first["seed"] == 7
        assert is_orthogonal(parse_document(json.dumps(first)), 1e-9)

    def test_matrix_from_parameters(self, write_json, capsys):
        params = write_json(
            "params.json", {"values": {"r": [1, 0], "s": [-1, 0], "t": [1, 0]}}
        )
        args = ["gen-orthogonal", "--kind", "matrix", "--params", params]
        doc = run_json(capsys, *args)
        x = parse_document(json.dumps(doc)).array
        assert np.allclose(x @ x.T, np.eye(2), atol=1e-12)
        assert "seed" not in doc


class TestOrbitCommand:
    def test_invertible_orbit(self, write_value, capsys):
        path = write_value("m.json", Matrix([[1, 1], [0, 1]]))
        doc = run_json(capsys, "orbit", path, "--field", 2)
        assert (doc["size"], doc["cardinality"]) == (6, 6)
        assert [[1, 1], [0, 1]] in doc["matrices"]

    def test_guard(self, write_value, capsys):
        path = write_value("m.json", Matrix(np.eye(2)))
        assert run_cli(["orbit", str(path), "--field", "5"]) == 2
        assert "exceeds the guard" in capsys.readouterr().err


class TestMapCommand:
    def test_map2(self, write_json, write_value, tmp_path, capsys):
        identity = json.loads(serialize(Matrix.identity(2)))
        spec = write_json("spec.json", {"a": identity, "b": identity})
        vector = write_value("x.json", Matrix([[3], [-4]]))
        out = tmp_path / "y.json"
        args = ["map", spec, vector, "-o", out, "--invertibility"]
        assert run_cli([str(a) for a in args]) == 0
        assert np.allclose(read_value(out).array.ravel(), [3, 4])
        printed = capsys.readouterr().out
        assert "input 25, image 25" in printed
        assert "Q0: invertible" in printed

    def test_map3_branches(self, write_json, write_value, capsys):
        d = json.loads(serialize(delta(2)))
        spec = write_json("spec.json", {"a": d, "b": d, "c": d})
        vector = write_value("x.json", Matrix([[2], [-1]]))
        assert run_cli(["map", str(spec), str(vector), "--branches"]) == 0
        summary = capsys.readouterr().err
        assert "power sum of order 3: input 7, image 7" in summary
        assert summary.count("branches:") == 2


class TestBlockCommand:
    def test_unitary_block_matrix(self, write_value):
        path = write_value("s.json", Matrix([[-1, 1], [1, 1]]), block_size=1)
        assert run_cli(["block", str(path)]) == 0
        assert run_cli(["verify", "block", str(path)]) == 0

    def test_delta_grid_fails(self, write_value, capsys):
        grid = BlockHypermatrix.from_blocks({i: delta(2) for i in GRID_INDICES})
        path = write_value("grid.json", grid.flatten())
        assert run_cli(["block", str(path), "--block-size", "2"]) == 1
        assert "block-orthogonality: FAILED" in capsys.readouterr().out

    def test_block_transpose(self, random_complex, write_value, capsys):
        h = random_complex((4, 4, 4))
        path = write_value("h.json", h, block_size=2)
        doc = run_json(capsys, "block", path, "--op", "tb", "--times", 2)
        expected = top_b_hyper(BlockHypermatrix.from_hypermatrix(h, 2), 2)
        assert parse_document(json.dumps(doc)) == expected.flatten()
        assert doc["block_size"] == 2

    def test_missing_block_size(self, delta2_path, capsys):
        assert run_cli(["block", str(delta2_path)]) == 2
        assert "--block-size" in capsys.readouterr().err

"""Tests for orthogonal generators, zero patterns and rotation invariance."""

import numpy as np
import pytest
from pydantic import ValidationError

from bmx.errors import ParameterError
from bmx.hypermatrix import Matrix, RotationAngle, delta
from bmx.orthogonal import (
    OrthoParamHyper,
    OrthoParamMatrix,
    degenerate_patterns,
    from_variables,
    gen_ortho_hyper,
    gen_ortho_matrix,
    orthogonality_constraints,
    pattern_witness,
    random_ortho_hyper,
    rotated_orthogonality_residual,
    rotation_triples,
    sample_ortho_hyper_params,
    sample_ortho_matrix_params,
    to_variables,
    triple_label,
    verify_rotation_invariance,
    verify_zero_pattern,
)
from bmx.products import is_orthogonal, symmetric_product

PRESERVING_TRIPLES = {
    "[0, 0, 0]",
    "[0, pi/2, pi]",
    "[pi/2, pi/2, 3pi/2]",
    "[pi, pi/2, 0]",
    "[pi, pi, pi]",
    "[3pi/2, pi/2, pi/2]",
}


class TestVariables:
    def test_layout(self):
        x = from_variables(range(8))
        assert x[1, 0, 0] == 1
        assert x[0, 1, 0] == 2
        assert x[0, 0, 1] == 4
        assert x[:, :, 0].tolist() == [[0, 2], [1, 3]]
        assert to_variables(x) == list(range(8))

    def test_constraints_match_product(self, random_complex):
        x = random_complex((2, 2, 2))
        s = symmetric_product(x)
        cube0, bilinear0, bilinear1, cube1 = orthogonality_constraints(x)
        assert s[0, 0, 0] - 1 == pytest.approx(cube0)
        assert s[1, 1, 1] - 1 == pytest.approx(cube1)
        assert abs(bilinear0) > 0 and abs(bilinear1) > 0


class TestGenOrthoMatrix:
    def test_random_draws(self, rng):
        for _ in range(100):
            x = gen_ortho_matrix(sample_ortho_matrix_params(rng))
            residuals = rotated_orthogonality_residual(x)
            assert set(residuals) == {"0", "pi/2", "pi", "3pi/2"}
            assert max(residuals.values()) <= 1e-9

    def test_excluded_parameter(self):
        with pytest.raises(ParameterError, match="r = t"):
            gen_ortho_matrix(OrthoParamMatrix(r=1j, t=1))

    def test_zero_parameter(self):
        with pytest.raises(ValidationError, match="nonzero"):
            OrthoParamMatrix(r=0, t=1)

    def test_sign(self):
        p = OrthoParamMatrix(r=1, s=-1, t=1)
        x = gen_ortho_matrix(p)
        assert np.allclose(x.array @ x.array.T, np.eye(2), atol=1e-12)


class TestGenOrthoHyper:
    def test_random_draws(self, rng):
        for _ in range(1000):
            x = random_ortho_hyper(rng)
            assert is_orthogonal(x, 1e-9)
            assert max(abs(c) for c in orthogonality_constraints(x)) <= 1e-10

    def test_parameters_on_annulus(self, rng):
        p = sample_ortho_hyper_params(rng)
        for v in (p.v1, p.v2, p.v3, p.v4, p.v5):
            assert 0.5 <= abs(v) <= 2.0
        assert p.v0**3 == pytest.approx(1)

    def test_v0_must_be_root_of_unity(self):
        with pytest.raises(ValidationError, match="cube root of unity"):
            OrthoParamHyper(v0=2, v1=1, v2=1, v3=1, v4=1, v5=1)

    def test_excluded_cube_sum(self):
        p = OrthoParamHyper(v1=1, v2=1, v3=1, v4=1, v5=-1)
        with pytest.raises(ParameterError, match="v3"):
            gen_ortho_hyper(p)

    def test_unit_parameters(self):
        x = gen_ortho_hyper(OrthoParamHyper(v1=1, v2=1, v3=1, v4=1, v5=1))
        assert is_orthogonal(x, 1e-12)


class TestZeroPatterns:
    def test_table(self):
        patterns = degenerate_patterns()
        assert len(patterns) == 32
        assert len(set(patterns)) == 32

    def test_every_pattern_solves_the_system(self):
        for pattern in degenerate_patterns():
            assert verify_zero_pattern(pattern)
            witness = pattern_witness(pattern)
            assert is_orthogonal(witness, 1e-12)
            zeros = {i for i, v in enumerate(to_variables(witness)) if v == 0}
            assert pattern <= zeros

    def test_rejects_non_solution(self):
        assert not verify_zero_pattern(frozenset({0, 2}))
        assert not verify_zero_pattern(frozenset())
        with pytest.raises(ParameterError, match="does not solve"):
            pattern_witness(frozenset({0, 2}))


class TestRotationInvariance:
    def test_table(self):
        triples = rotation_triples()
        assert len(triples) == 32
        assert all(len(t) == 3 for t in triples)
        assert (RotationAngle.ZERO,) * 3 in triples

    def test_label(self):
        assert triple_label((0, 1, 3)) == "[0, pi/2, 3pi/2]"

    def test_report_covers_every_triple(self):
        report = verify_rotation_invariance(delta(2))
        assert len(report.residuals) == 32
        assert report.notes == ["32 rotation triples checked"]
        assert {f.name for f in report.failures} <= set(report.residuals)

    def test_preserving_triples(self, rng):
        for _ in range(50):
            report = verify_rotation_invariance(random_ortho_hyper(rng))
            kept = {name for name, r in report.residuals.items() if r <= 1e-9}
            assert kept == PRESERVING_TRIPLES
            failed = {f.name for f in report.failures}
            assert failed == set(report.residuals) - PRESERVING_TRIPLES
            assert len(failed) == 26

    def test_rotation_of_matrix_keeps_orthogonality(self):
        c, s = np.cos(0.3), np.sin(0.3)
        residuals = rotated_orthogonality_residual(Matrix([[c, -s], [s, c]]))
        assert max(residuals.values()) <= 1e-12

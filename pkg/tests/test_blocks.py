"""Tests for block matrices and 2x2x2 block hypermatrices."""

import itertools

import numpy as np
import pytest
from pydantic import ValidationError

from bmx.blocks import (
    GRID_INDICES,
    K0,
    K1,
    K2,
    BlockHypermatrix,
    BlockMatrix,
    block_orthogonal_product,
    block_orthogonality_residual,
    block_prod3,
    block_unitary_check,
    grid_unit,
    rotate_b,
    rotate_b_hyper,
    rotate_e,
    rotate_e_hyper,
    top_b,
    top_b_hyper,
    top_e,
    top_e_hyper,
)
from bmx.errors import NonOrthogonalBlockError, ShapeError
from bmx.hypermatrix import (
    Hypermatrix3,
    Matrix,
    RotationAngle,
    delta,
    elementary,
    rotate_hyper,
    rotate_matrix,
    transpose,
)
from bmx.orthogonal import from_variables
from bmx.products import prod3, symmetric_product

ANGLES = list(RotationAngle)


def random_matrix(rng, n: int) -> Matrix:
    return Matrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_block_hyper(random_complex, side: int = 2) -> BlockHypermatrix:
    return BlockHypermatrix.from_hypermatrix(
        random_complex((2 * side, 2 * side, 2 * side)), side
    )


def delta_grid(overrides=None) -> BlockHypermatrix:
    blocks = {index: delta(2) for index in GRID_INDICES}
    blocks.update(overrides or {})
    return BlockHypermatrix.from_blocks(blocks)


def cancelling_block() -> Hypermatrix3:
    cbrt2 = float(np.cbrt(2))
    return from_variables([-1, 0, cbrt2, 0, 0, cbrt2, 0, -1])


class TestBlockMatrix:
    def test_round_trip(self, rng):
        m = random_matrix(rng, 6)
        bm = BlockMatrix.from_matrix(m, 2)
        assert bm.grid == 3 and bm.block_size == 2
        assert bm.to_matrix() == m
        assert bm.block(1, 2) == Matrix(m.array[2:4, 4:6])

    def test_uneven_split(self):
        with pytest.raises(ShapeError, match="does not split"):
            BlockMatrix.from_matrix(Matrix.identity(5), 2)

    def test_bad_block_shape(self):
        with pytest.raises(ValidationError, match="n x n grid"):
            BlockMatrix(blocks=np.ones((2, 3, 2, 2)))
        with pytest.raises(ValidationError, match="must be square"):
            BlockMatrix(blocks=np.ones((2, 2, 2, 3)))


class TestBlockTransposes:
    def test_top_b_moves_blocks(self, rng):
        bm = BlockMatrix.from_matrix(random_matrix(rng, 6), 2)
        moved = top_b(bm)
        for i, j in itertools.product(range(3), repeat=2):
            assert moved.block(j, i) == bm.block(i, j)

    def test_top_e_transposes_blocks(self, rng):
        bm = BlockMatrix.from_matrix(random_matrix(rng, 4), 2)
        inner = top_e(bm)
        for i, j in itertools.product(range(2), repeat=2):
            assert inner.block(i, j) == bm.block(i, j).T

    def test_both_transposes_give_full_transpose(self, rng):
        m = random_matrix(rng, 4)
        bm = BlockMatrix.from_matrix(m, 2)
        assert top_b(top_e(bm)).to_matrix() == m.T

    @pytest.mark.parametrize("theta", ANGLES)
    def test_rotate_b_on_scalar_blocks(self, rng, theta):
        m = random_matrix(rng, 3)
        rotated = rotate_b(BlockMatrix.from_matrix(m, 1), theta)
        assert rotated.to_matrix().allclose(rotate_matrix(m, theta))

    @pytest.mark.parametrize("theta", ANGLES)
    def test_rotate_e_on_single_block(self, rng, theta):
        m = random_matrix(rng, 3)
        rotated = rotate_e(BlockMatrix.from_matrix(m, 3), theta)
        assert rotated.to_matrix().allclose(rotate_matrix(m, theta))


class TestBlockUnitary:
    def test_scalar_blocks(self):
        bm = BlockMatrix.from_blocks([[[[-1]], [[1]]], [[[1]], [[1]]]])
        result = block_unitary_check(bm)
        assert result.passed
        assert result.residual <= 1e-12

    def test_identity_blocks(self):
        eye = np.eye(2)
        bm = BlockMatrix.from_blocks([[-eye, eye], [eye, eye]])
        assert block_unitary_check(bm)

    def test_failure(self):
        bm = BlockMatrix.from_blocks([[[[1]], [[1]]], [[[1]], [[1]]]])
        result = block_unitary_check(bm)
        assert not result.passed
        assert result.residual == pytest.approx(1.0)


class TestGridUnits:
    def test_k_tensors(self):
        for a, b, c in itertools.product(range(2), repeat=3):
            assert K0[a, b, c] == (a == b)
            assert K1[a, b, c] == (b == c)
            assert K2[a, b, c] == (a == c)

    def test_units_are_elementary(self):
        for index in GRID_INDICES:
            assert grid_unit(*index) == elementary((2, 2, 2), index)


class TestBlockHypermatrix:
    def test_flatten_inverts_split(self, random_complex):
        h = random_complex((6, 6, 6))
        bh = BlockHypermatrix.from_hypermatrix(h, 3)
        assert bh.grid == 2 and bh.block_side == 3
        assert bh.flatten() == h
        assert bh.block(1, 0, 1) == Hypermatrix3(h.array[3:, :3, 3:])

    def test_missing_blocks(self):
        with pytest.raises(ShapeError, match="Missing blocks"):
            BlockHypermatrix.from_blocks({(0, 0, 0): delta(2)})

    def test_mixed_block_shapes(self):
        blocks = {index: delta(2) for index in GRID_INDICES}
        blocks[(1, 1, 1)] = delta(3)
        with pytest.raises(ShapeError, match="share one shape"):
            BlockHypermatrix.from_blocks(blocks)

    def test_bad_block_shape(self):
        with pytest.raises(ValidationError, match="cubic grid"):
            BlockHypermatrix(blocks=np.ones((2, 2, 3, 2, 2, 2)))

    def test_top_b_hyper_moves_blocks(self, random_complex):
        bh = random_block_hyper(random_complex)
        moved = top_b_hyper(bh)
        for i, j, k in GRID_INDICES:
            assert moved.block(j, k, i) == bh.block(i, j, k)
        assert top_b_hyper(bh, 3).flatten() == bh.flatten()

    def test_top_e_hyper_transposes_blocks(self, random_complex):
        bh = random_block_hyper(random_complex)
        inner = top_e_hyper(bh, 2)
        for index in GRID_INDICES:
            assert inner.block(*index) == transpose(bh.block(*index), 2)

    def test_both_transposes_give_full_transpose(self, random_complex):
        bh = random_block_hyper(random_complex)
        full = top_b_hyper(top_e_hyper(bh))
        assert full.flatten() == transpose(bh.flatten())

    def test_grid_rotation_on_scalar_blocks(self, random_complex):
        h = random_complex((2, 2, 2))
        rotated = rotate_b_hyper(BlockHypermatrix.from_hypermatrix(h, 1), 1, 2, 3)
        assert rotated.flatten().allclose(rotate_hyper(h, 1, 2, 3))

    def test_block_rotation(self, random_complex):
        bh = random_block_hyper(random_complex)
        inner = rotate_e_hyper(bh, 1, 2, 3)
        for index in GRID_INDICES:
            expected = rotate_hyper(bh.block(*index), 1, 2, 3)
            assert inner.block(*index).allclose(expected)

    def test_needs_grid_two(self, random_complex):
        bh = BlockHypermatrix.from_hypermatrix(random_complex((3, 3, 3)), 1)
        with pytest.raises(ShapeError, match="2x2x2 grid"):
            top_b_hyper(bh)

    def test_block_product_matches_flat_product(self, random_complex):
        a, b, c = (random_block_hyper(random_complex) for _ in range(3))
        flat = prod3(a.flatten(), b.flatten(), c.flatten())
        assert block_prod3(a, b, c).flatten().allclose(flat, 1e-10)

    def test_orthogonal_product(self, random_complex):
        bh = random_block_hyper(random_complex)
        product = block_orthogonal_product(bh, normalization=0.5)
        expected = symmetric_product(bh.flatten() * 0.5)
        assert product.flatten().allclose(expected, 1e-10)


class TestBlockOrthogonality:
    def test_all_delta_blocks(self):
        report = block_orthogonality_residual(delta_grid())
        assert len(report.residuals) == 8
        for index in ("A010", "A100", "A110", "A001", "A011", "A101"):
            assert report.residuals[f"off-diagonal {index}"] == pytest.approx(2)
        assert report.residuals["diagonal A000"] <= 1e-12
        assert report.residuals["diagonal A111"] <= 1e-12
        assert not report.passed
        assert len(report.failures) == 6

    def test_cancellation(self):
        report = block_orthogonality_residual(
            delta_grid({(0, 1, 0): cancelling_block()})
        )
        for index in ("A010", "A001", "A100"):
            assert report.residuals[f"off-diagonal {index}"] <= 1e-12
        assert report.residuals["off-diagonal A110"] == pytest.approx(2)
        assert report.residuals["diagonal A000"] <= 1e-9

    def test_rejects_non_orthogonal_blocks(self):
        grid = delta_grid({(1, 1, 1): delta(2) * 2})
        with pytest.raises(NonOrthogonalBlockError, match="A111") as excinfo:
            block_orthogonality_residual(grid)
        assert excinfo.value.blocks == [(1, 1, 1)]

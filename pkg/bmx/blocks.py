"""Block matrices and 2x2x2 block hypermatrices.

Block operations come in two kinds: ``_b`` variants move whole blocks around
the grid and leave each block intact, ``_e`` variants act inside every block
and leave the grid alone. Flattening uses block-major indexing, so entry
``(i, i')`` of the grid and block maps to ``i * m + i'``; this matches
``numpy.kron`` of a grid unit with a block.
"""

import itertools
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from bmx.errors import NonOrthogonalBlockError, ShapeError
from bmx.hypermatrix import (
    Hypermatrix3,
    Matrix,
    RotationAngle,
    delta,
    rotate_hyper,
    rotate_matrix,
    transpose,
)
from bmx.models import CheckResult, VerificationReport
from bmx.products import is_orthogonal, prod3

log = logging.getLogger(__name__)

# normalization of a 2x2x2 grid of orthogonal blocks
HYPER_NORMALIZATION = 2 ** (-1 / 3)

K0 = Hypermatrix3.from_slices([[[1, 0], [0, 1]], [[1, 0], [0, 1]]])
K1 = Hypermatrix3.from_slices([[[1, 0], [1, 0]], [[0, 1], [0, 1]]])
K2 = Hypermatrix3.from_slices([[[1, 1], [0, 0]], [[0, 0], [1, 1]]])

GRID_INDICES = tuple(itertools.product(range(2), repeat=3))
DIAGONAL_BLOCKS = ((0, 0, 0), (1, 1, 1))
OFF_DIAGONAL_BLOCKS = (
    (0, 1, 0),
    (1, 0, 0),
    (1, 1, 0),
    (0, 0, 1),
    (0, 1, 1),
    (1, 0, 1),
)


class BlockMatrix(BaseModel):
    """An ``n x n`` grid of ``m x m`` blocks, stored as an ``(n, n, m, m)`` array."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    blocks: np.ndarray

    @field_validator("blocks", mode="before")
    @classmethod
    def _uniform_square_blocks(cls, value) -> np.ndarray:
        data = np.array(value, dtype=complex)
        if data.ndim != 4 or data.shape[0] != data.shape[1]:
            raise ShapeError(f"Block matrix needs an n x n grid, got {data.shape}")
        if data.shape[2] != data.shape[3]:
            raise ShapeError(f"Blocks must be square, got {data.shape[2:]}")
        data.setflags(write=False)
        return data

    @classmethod
    def from_blocks(cls, rows) -> "BlockMatrix":
        return cls(blocks=[[Matrix(b).array for b in row] for row in rows])

    @classmethod
    def from_matrix(cls, m: Matrix, block_size: int) -> "BlockMatrix":
        rows, cols = m.shape
        if rows != cols or rows % block_size:
            raise ShapeError(
                f"{m.shape} does not split into {block_size} x {block_size} blocks"
            )
        n = rows // block_size
        data = m.array.reshape(n, block_size, n, block_size).transpose(0, 2, 1, 3)
        return cls(blocks=data)

    @property
    def grid(self) -> int:
        return self.blocks.shape[0]

    @property
    def block_size(self) -> int:
        return self.blocks.shape[2]

    def block(self, i: int, j: int) -> Matrix:
        return Matrix(self.blocks[i, j])

    def to_matrix(self) -> Matrix:
        n, m = self.grid, self.block_size
        return Matrix(self.blocks.transpose(0, 2, 1, 3).reshape(n * m, n * m))

    def _from_units(self, units, blocks) -> "BlockMatrix":
        total = sum(np.kron(u, b) for u, b in zip(units, blocks, strict=True))
        return BlockMatrix.from_matrix(Matrix(total), self.block_size)

    def _grid_units(self):
        n = self.grid
        eye = np.eye(n)
        return [
            (i, j, np.outer(eye[i], eye[j])) for i in range(n) for j in range(n)
        ]


def top_b(bm: BlockMatrix) -> BlockMatrix:
    """Transpose the grid: block ``(i, j)`` moves to ``(j, i)``."""
    units = bm._grid_units()
    return bm._from_units(
        [u.T for _, _, u in units], [bm.blocks[i, j] for i, j, _ in units]
    )


def top_e(bm: BlockMatrix) -> BlockMatrix:
    """Transpose every block in place."""
    return BlockMatrix(blocks=bm.blocks.transpose(0, 1, 3, 2))


def rotate_b(bm: BlockMatrix, theta: RotationAngle | int) -> BlockMatrix:
    units = bm._grid_units()
    return bm._from_units(
        [rotate_matrix(Matrix(u), theta).array for _, _, u in units],
        [bm.blocks[i, j] for i, j, _ in units],
    )


def rotate_e(bm: BlockMatrix, theta: RotationAngle | int) -> BlockMatrix:
    n = bm.grid
    return BlockMatrix(
        blocks=[
            [rotate_matrix(bm.block(i, j), theta).array for j in range(n)]
            for i in range(n)
        ]
    )


def block_adjoint(bm: BlockMatrix) -> BlockMatrix:
    """``(A^Te)^Tb``."""
    return top_b(top_e(bm))


def block_unitary_check(
    bm: BlockMatrix, tol: float = 1e-9, normalized: bool = True
) -> CheckResult:
    """Residual of ``S (S^Te)^Tb = I_n (x) I_m`` and the reversed product.

    ``S`` is ``A / sqrt(n)`` when ``normalized``, otherwise ``A`` itself (the
    form taken by real-block images of unitary matrices).
    """
    scale = 1 / np.sqrt(bm.grid) if normalized else 1.0
    s = bm.to_matrix().array * scale
    adjoint = block_adjoint(bm).to_matrix().array * scale
    identity = np.eye(s.shape[0])
    residual = float(
        max(
            np.max(np.abs(s @ adjoint - identity)),
            np.max(np.abs(adjoint @ s - identity)),
        )
    )
    return CheckResult(passed=residual <= tol, residual=residual, tolerance=tol)


class BlockHypermatrix(BaseModel):
    """A cubic grid of cubic blocks, stored as a ``(g, g, g, m, m, m)`` array."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    blocks: np.ndarray

    @field_validator("blocks", mode="before")
    @classmethod
    def _uniform_cubic_blocks(cls, value) -> np.ndarray:
        data = np.array(value, dtype=complex)
        if data.ndim != 6 or len(set(data.shape[:3])) != 1:
            raise ShapeError(f"Block hypermatrix needs a cubic grid, got {data.shape}")
        if len(set(data.shape[3:])) != 1:
            raise ShapeError(f"Blocks must be cubic, got {data.shape[3:]}")
        data.setflags(write=False)
        return data

    @classmethod
    def from_blocks(cls, blocks: dict[tuple[int, int, int], Hypermatrix3]):
        """Build a 2x2x2 grid from blocks keyed by grid index."""
        missing = set(GRID_INDICES) - set(blocks)
        if missing:
            raise ShapeError(f"Missing blocks {sorted(missing)}")
        side = {blocks[index].shape for index in GRID_INDICES}
        if len(side) != 1:
            raise ShapeError(f"Blocks must share one shape, got {sorted(side)}")
        m = next(iter(side))[0]
        data = np.zeros((2, 2, 2, m, m, m), dtype=complex)
        for index in GRID_INDICES:
            data[index] = blocks[index].array
        return cls(blocks=data)

    @classmethod
    def from_hypermatrix(cls, h: Hypermatrix3, block_side: int) -> "BlockHypermatrix":
        if not h.is_cubic or h.side % block_side:
            raise ShapeError(
                f"{h.shape} does not split into blocks of side {block_side}"
            )
        g, m = h.side // block_side, block_side
        data = h.array.reshape(g, m, g, m, g, m).transpose(0, 2, 4, 1, 3, 5)
        return cls(blocks=data)

    @property
    def grid(self) -> int:
        return self.blocks.shape[0]

    @property
    def block_side(self) -> int:
        return self.blocks.shape[3]

    def block(self, i: int, j: int, k: int) -> Hypermatrix3:
        return Hypermatrix3(self.blocks[i, j, k])

    def flatten(self) -> Hypermatrix3:
        g, m = self.grid, self.block_side
        side = g * m
        return Hypermatrix3(
            self.blocks.transpose(0, 3, 1, 4, 2, 5).reshape(side, side, side)
        )

    def __mul__(self, scalar: complex) -> "BlockHypermatrix":
        return BlockHypermatrix(blocks=self.blocks * scalar)

    __rmul__ = __mul__


def _require_grid_two(bh: BlockHypermatrix) -> None:
    if bh.grid != 2:
        raise ShapeError(f"Block operation needs a 2x2x2 grid, got {bh.grid}")


def grid_unit(i: int, j: int, k: int) -> Hypermatrix3:
    """``Prod(K0[:,i,:], K1[:,:,j], K2[k,:,:])``, the unit at grid index
    ``(i, j, k)``."""
    return prod3(
        Hypermatrix3(K0.array[:, i : i + 1, :]),
        Hypermatrix3(K1.array[:, :, j : j + 1]),
        Hypermatrix3(K2.array[k : k + 1, :, :]),
    )


def _assemble(units, blocks, block_side: int) -> BlockHypermatrix:
    total = sum(
        np.kron(u.array, b.array) for u, b in zip(units, blocks, strict=True)
    )
    return BlockHypermatrix.from_hypermatrix(Hypermatrix3(total), block_side)


def top_b_hyper(bh: BlockHypermatrix, t: int = 1) -> BlockHypermatrix:
    """Transpose the grid ``t`` times; blocks travel unchanged."""
    _require_grid_two(bh)
    return _assemble(
        [transpose(grid_unit(*index), t) for index in GRID_INDICES],
        [bh.block(*index) for index in GRID_INDICES],
        bh.block_side,
    )


def top_e_hyper(bh: BlockHypermatrix, t: int = 1) -> BlockHypermatrix:
    """Transpose every block ``t`` times in place."""
    _require_grid_two(bh)
    return _assemble(
        [grid_unit(*index) for index in GRID_INDICES],
        [transpose(bh.block(*index), t) for index in GRID_INDICES],
        bh.block_side,
    )


def rotate_b_hyper(
    bh: BlockHypermatrix, theta_x, theta_y, theta_z
) -> BlockHypermatrix:
    _require_grid_two(bh)
    return _assemble(
        [
            rotate_hyper(grid_unit(*index), theta_x, theta_y, theta_z)
            for index in GRID_INDICES
        ],
        [bh.block(*index) for index in GRID_INDICES],
        bh.block_side,
    )


def rotate_e_hyper(
    bh: BlockHypermatrix, theta_x, theta_y, theta_z
) -> BlockHypermatrix:
    _require_grid_two(bh)
    return _assemble(
        [grid_unit(*index) for index in GRID_INDICES],
        [
            rotate_hyper(bh.block(*index), theta_x, theta_y, theta_z)
            for index in GRID_INDICES
        ],
        bh.block_side,
    )


def block_prod3(
    a: BlockHypermatrix, b: BlockHypermatrix, c: BlockHypermatrix
) -> BlockHypermatrix:
    """BM product computed block by block:
    block ``(i, j, k)`` is ``sum_t Prod(A_itk, B_ijt, C_tjk)``."""
    if not (a.blocks.shape == b.blocks.shape == c.blocks.shape):
        raise ShapeError("Block operands must share grid and block side")
    g = a.grid
    data = np.zeros(a.blocks.shape, dtype=complex)
    for i, j, k in itertools.product(range(g), repeat=3):
        data[i, j, k] = sum(
            prod3(a.block(i, t, k), b.block(i, j, t), c.block(t, j, k)).array
            for t in range(g)
        )
    return BlockHypermatrix(blocks=data)


def block_orthogonal_product(
    bh: BlockHypermatrix, normalization: complex = HYPER_NORMALIZATION
) -> BlockHypermatrix:
    """``Prod(S, (S^Te2)^Tb2, (S^Te)^Tb)`` for ``S = normalization * A``."""
    s = bh * normalization
    return block_prod3(
        s,
        top_b_hyper(top_e_hyper(s, 2), 2),
        top_b_hyper(top_e_hyper(s, 1), 1),
    )


def _block_sum(bh: BlockHypermatrix, i: int, j: int, k: int) -> Hypermatrix3:
    """``sum_t Prod(A_itk, A_jti^T2, A_ktj^T)``, the unnormalized block of the
    orthogonality product at ``(i, j, k)``."""
    return Hypermatrix3(
        sum(
            prod3(
                bh.block(i, t, k),
                transpose(bh.block(j, t, i), 2),
                transpose(bh.block(k, t, j)),
            ).array
            for t in range(2)
        )
    )


def _label(index: tuple[int, int, int]) -> str:
    return "A" + "".join(str(i) for i in index)


def block_orthogonality_residual(
    bh: BlockHypermatrix,
    tol: float = 1e-9,
    normalization: complex = HYPER_NORMALIZATION,
) -> VerificationReport:
    """Necessary conditions for a 2x2x2 grid of orthogonal blocks to be
    orthogonal: the six off-diagonal block sums vanish and the diagonal
    blocks of the normalized product equal ``Delta``."""
    _require_grid_two(bh)
    failing = [
        index for index in GRID_INDICES if not is_orthogonal(bh.block(*index), tol)
    ]
    if failing:
        raise NonOrthogonalBlockError(
            f"Blocks {', '.join(_label(i) for i in failing)} are not orthogonal",
            blocks=failing,
        )
    residuals = {
        f"off-diagonal {_label(index)}": _block_sum(bh, *index).max_abs()
        for index in OFF_DIAGONAL_BLOCKS
    }
    cube = normalization**3
    identity = delta(bh.block_side)
    for index in DIAGONAL_BLOCKS:
        residuals[f"diagonal {_label(index)}"] = (
            _block_sum(bh, *index) * cube - identity
        ).max_abs()
    report = VerificationReport.from_residuals("block-orthogonality", residuals, tol)
    for failure in report.failures:
        log.info(
            "Block condition %s fails (residual %.3g)", failure.name, failure.residual
        )
    return report

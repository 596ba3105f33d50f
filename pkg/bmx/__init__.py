"""bmx - Bhattacharya-Mesner hypermatrix algebra toolkit."""

__version__ = "0.1.0"

from bmx.hypermatrix import (  # noqa: E402
    Hypermatrix3,
    Matrix,
    RotationAngle,
    delta,
    dirsum,
    kron,
    transpose,
)
from bmx.products import is_orthogonal, prod3, prod3_bg  # noqa: E402
from bmx.svd import reconstruct, svd3  # noqa: E402

__all__ = [
    "Hypermatrix3",
    "Matrix",
    "RotationAngle",
    "__version__",
    "delta",
    "dirsum",
    "is_orthogonal",
    "kron",
    "prod3",
    "prod3_bg",
    "reconstruct",
    "svd3",
    "transpose",
]

"""Vector maps defined by matrix pairs and hypermatrix triples, the n = 2
invertibility polynomials, and the real 2x2-block image of complex matrices."""

import logging
from enum import Enum

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, model_validator

from bmx.errors import ParameterError, ShapeError
from bmx.hypermatrix import Hypermatrix3, Matrix, transpose
from bmx.products import prod2, prod2_bg, prod3, prod3_bg
from bmx.scaling import principal_root, root_branches

log = logging.getLogger(__name__)

ROTATION_UNIT = np.array([[0.0, -1.0], [1.0, 0.0]])


class DeltaReading(Enum):
    """How the background ``Delta^(t)`` constrains its third index."""

    diagonal = "diagonal"  # 1 only at (t, t, t)
    verbatim = "verbatim"  # 1 at (t, t, k) for every k


class MapSpec2(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Matrix
    b: Matrix

    @model_validator(mode="after")
    def _square_and_matching(self) -> "MapSpec2":
        if not (self.a.is_square and self.b.is_square) or self.a.shape != self.b.shape:
            raise ShapeError(
                f"Map needs square matrices of one size, got {self.a.shape} "
                f"and {self.b.shape}"
            )
        return self

    @property
    def n(self) -> int:
        return self.a.shape[0]


class MapSpec3(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Hypermatrix3
    b: Hypermatrix3
    c: Hypermatrix3
    reading: DeltaReading = DeltaReading.diagonal

    @model_validator(mode="after")
    def _cubic_and_matching(self) -> "MapSpec3":
        shapes = {self.a.shape, self.b.shape, self.c.shape}
        if len(shapes) != 1 or not self.a.is_cubic:
            raise ShapeError(
                f"Map needs cubic hypermatrices of one side, got {sorted(shapes)}"
            )
        return self

    @property
    def n(self) -> int:
        return self.a.side


def _vector(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=complex).ravel()
    if v.shape != (n,):
        raise ShapeError(f"Vector of length {n} expected, got {v.shape[0]}")
    return v


def vector_hypermatrix(x) -> Hypermatrix3:
    """A vector as an ``n x 1 x 1`` hypermatrix."""
    return Hypermatrix3(np.asarray(x, dtype=complex).reshape(-1, 1, 1))


def power_sum(x, order: int) -> complex:
    """``Prod(x^T, x)`` for order 2 and ``Prod(x^T2, x^T, x)`` for order 3."""
    match order:
        case 2:
            column = Matrix(np.asarray(x, dtype=complex).reshape(-1, 1))
            return prod2(column.T, column)[0, 0]
        case 3:
            h = vector_hypermatrix(x)
            return prod3(transpose(h, 2), transpose(h), h)[0, 0, 0]
    raise ParameterError(f"Power sums are defined for orders 2 and 3, got {order}")


def delta_slice(
    n: int, t: int, reading: DeltaReading | str = DeltaReading.diagonal
) -> Hypermatrix3:
    if not 0 <= t < n:
        raise ParameterError(f"Background index {t} out of range for side {n}")
    data = np.zeros((n, n, n), dtype=complex)
    if DeltaReading(reading) is DeltaReading.diagonal:
        data[t, t, t] = 1
    else:
        data[t, t, :] = 1
    return Hypermatrix3(data)


def map2_backgrounds(m: MapSpec2) -> list[Matrix]:
    """``P_k = Prod_{e_k e_k^T}(A, B)``."""
    eye = np.eye(m.n)
    return [prod2_bg(m.a, m.b, Matrix(np.outer(eye[k], eye[k]))) for k in range(m.n)]


def map3_backgrounds(m: MapSpec3) -> list[Hypermatrix3]:
    """``P_k = Prod_{Delta^(k)}(A, B, C)``."""
    return [
        prod3_bg(m.a, m.b, m.c, delta_slice(m.n, k, m.reading)) for k in range(m.n)
    ]


def _map2_forms(m: MapSpec2, x) -> list[complex]:
    v = _vector(x, m.n)
    return [complex(v @ p.array @ v) for p in map2_backgrounds(m)]


def _map3_forms(m: MapSpec3, x) -> list[complex]:
    v = _vector(x, m.n)
    return [
        complex(np.einsum("a,b,c,abc->", v, v, v, p.array))
        for p in map3_backgrounds(m)
    ]


def apply_map2(m: MapSpec2, x) -> np.ndarray:
    """``y[k]`` is the principal square root of ``Prod_{P_k}(x^T, x)``; the map
    is determined up to the sign of each entry."""
    return np.array([principal_root(f, 2) for f in _map2_forms(m, x)])


def apply_map3(m: MapSpec3, x) -> np.ndarray:
    """``y[k]`` is the principal cube root of ``Prod_{P_k}(x^T2, x^T, x)``."""
    return np.array([principal_root(f, 3) for f in _map3_forms(m, x)])


def map_branches(m: MapSpec2 | MapSpec3, x) -> list[list[complex]]:
    """Every root candidate per output coordinate, principal first."""
    if isinstance(m, MapSpec2):
        return [root_branches(f, 2) for f in _map2_forms(m, x)]
    return [root_branches(f, 3) for f in _map3_forms(m, x)]


class InvertibilityReport(BaseModel):
    """Coefficients (highest degree first) of ``Q0(x0)`` and ``Q1(x1)``."""

    coefficients: tuple[list[complex], list[complex]]
    invertible: tuple[bool, bool]
    degenerate: tuple[bool, bool]


def _display_polynomial(alpha, beta, gamma, delta, c1, c2):
    return (
        alpha**2 * c1**2
        - 2 * alpha * beta * c1 * c2
        + beta**2 * c2**2
        - alpha * gamma * delta * c1
        + beta * delta**2 * c1
        + alpha * gamma**2 * c2
        - beta * gamma * delta * c2
    )


def resultant_polynomials(m: MapSpec2, y) -> tuple[sympy.Poly, sympy.Poly]:
    """The eliminants ``Q0(x0)`` and ``Q1(x1)`` of the two quadratic forms of a
    2x2 map at output ``y``."""
    if m.n != 2:
        raise ShapeError(f"Resultant polynomials are given for n = 2, got n = {m.n}")
    a = [[sympy.sympify(complex(v)) for v in row] for row in m.a.array]
    b = [[sympy.sympify(complex(v)) for v in row] for row in m.b.array]
    y0, y1 = (sympy.sympify(complex(v)) for v in _vector(y, 2))
    x0, x1 = sympy.symbols("x0 x1")
    cross = a[1][0] * b[0][0] + a[0][0] * b[0][1]
    other = a[1][1] * b[1][0] + a[0][1] * b[1][1]
    q0 = _display_polynomial(
        a[0][1] * b[1][0] * x0**2 - y1**2,
        a[0][0] * b[0][0] * x0**2 - y0**2,
        cross * x0,
        other * x0,
        a[1][0] * b[0][1],
        a[1][1] * b[1][1],
    )
    q1 = _display_polynomial(
        a[1][1] * b[1][1] * x1**2 - y1**2,
        a[1][0] * b[0][1] * x1**2 - y0**2,
        cross * x1,
        other * x1,
        a[0][0] * b[0][0],
        a[0][1] * b[1][0],
    )
    return sympy.Poly(sympy.expand(q0), x0), sympy.Poly(sympy.expand(q1), x1)


def invertibility_check_2(m: MapSpec2, y, tol: float = 1e-12) -> InvertibilityReport:
    """Invertible per coordinate unless its polynomial is a nonzero constant.

    An identically zero polynomial passes that criterion literally and is
    flagged as degenerate.
    """
    coefficients, invertible, degenerate = [], [], []
    for poly in resultant_polynomials(m, y):
        coeffs = [complex(sympy.N(c)) for c in poly.all_coeffs()]
        scale = max([1.0, *(abs(c) for c in coeffs)])
        significant = [abs(c) > tol * scale for c in coeffs]
        constant = not any(significant[:-1])
        zero = constant and not significant[-1]
        coefficients.append(coeffs)
        invertible.append(not (constant and not zero))
        degenerate.append(zero)
    if any(degenerate):
        log.warning("Map resultant vanishes identically for %s", degenerate)
    return InvertibilityReport(
        coefficients=tuple(coefficients),
        invertible=tuple(invertible),
        degenerate=tuple(degenerate),
    )


def complex_to_real_block(m: Matrix) -> Matrix:
    """Replace each entry ``a + b i`` by ``[[a, -b], [b, a]]``."""
    return Matrix(
        np.kron(m.array.real, np.eye(2)) + np.kron(m.array.imag, ROTATION_UNIT)
    )


def real_block_to_complex(m: Matrix, tol: float = 1e-12) -> Matrix:
    rows, cols = m.shape
    if rows % 2 or cols % 2:
        raise ShapeError(f"Real block image needs even dimensions, got {m.shape}")
    if not m.is_real():
        raise ParameterError("Real block image must have real entries")
    blocks = m.array.real.reshape(rows // 2, 2, cols // 2, 2)
    re, im = blocks[:, 0, :, 0], blocks[:, 1, :, 0]
    expected = np.kron(re, np.eye(2)) + np.kron(im, ROTATION_UNIT)
    mismatch = float(np.max(np.abs(expected - m.array.real), initial=0.0))
    if mismatch > tol * max(1.0, m.max_abs()):
        raise ParameterError(
            f"Blocks are not of the form [[a, -b], [b, a]] (mismatch {mismatch:.3g})"
        )
    return Matrix(re + 1j * im)

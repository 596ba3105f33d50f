"""Generators of orthogonal 2x2 matrices and 2x2x2 hypermatrices, the zero
patterns of degenerate orthogonal hypermatrices, and rotation invariance.

Hypermatrix entries are named ``x_(i + 2j + 4k)`` for index ``(i, j, k)``, so
``X[:,:,0] = [[x0, x2], [x1, x3]]`` and ``X[:,:,1] = [[x4, x6], [x5, x7]]``.
Orthogonality of such an ``X`` is the polynomial system

    x0^3 + x2^3 = 1,  x0 x1 x4 + x2 x3 x6 = 0,
    x1 x4 x5 + x3 x6 x7 = 0,  x5^3 + x7^3 = 1.
"""

import json
import logging
from functools import cache
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict

from bmx.errors import ParameterError
from bmx.hypermatrix import (
    Hypermatrix3,
    Matrix,
    RotationAngle,
    rotate_hyper,
    rotate_matrix,
)
from bmx.models import VerificationReport
from bmx.products import is_orthogonal
from bmx.scaling import principal_root

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"

CUBE_PAIRS = ((0, 2), (5, 7))
BILINEAR_TERMS = (((0, 1, 4), (2, 3, 6)), ((1, 4, 5), (3, 6, 7)))

ANNULUS = (0.5, 2.0)


def _nonzero(value: complex) -> complex:
    if value == 0:
        raise ValueError("parameter must be nonzero")
    return value


NonZero = Annotated[complex, AfterValidator(_nonzero)]


class OrthoParamMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: NonZero
    s: Literal[-1, 1] = 1
    t: NonZero


def _cube_root_of_unity(value: complex) -> complex:
    if abs(value**3 - 1) > 1e-12:
        raise ValueError(f"v0 must be a cube root of unity, got {value}")
    return value


class OrthoParamHyper(BaseModel):
    model_config = ConfigDict(frozen=True)

    v0: Annotated[complex, AfterValidator(_cube_root_of_unity)] = 1
    v1: NonZero
    v2: NonZero
    v3: NonZero
    v4: NonZero
    v5: NonZero


def gen_ortho_matrix(p: OrthoParamMatrix) -> Matrix:
    """Orthogonal ``X`` (``X X^T = I``) with rows ``[-s t / r, s]`` and ``[r, t]``,
    each normalized."""
    if abs(p.r - p.t * 1j) <= 1e-12 * max(abs(p.r), abs(p.t)):
        raise ParameterError("Excluded parameter: r = t * sqrt(-1)")
    first = np.array([-p.s * p.t / p.r, p.s], dtype=complex)
    second = np.array([p.r, p.t], dtype=complex)
    rows = []
    for row in (first, second):
        norm = principal_root(row @ row, 2)
        if abs(norm) <= 1e-12 * float(np.max(np.abs(row))):
            raise ParameterError(f"Row {row.tolist()} has zero bilinear norm")
        rows.append(row / norm)
    return Matrix(np.stack(rows))


def gen_ortho_hyper(p: OrthoParamHyper) -> Hypermatrix3:
    """Orthogonal 2x2x2 hypermatrix from the normalized parametrization."""
    cube_sum = p.v3**3 + p.v5**3
    if abs(cube_sum) <= 1e-12 * max(abs(p.v3), abs(p.v5)) ** 3:
        raise ParameterError("Excluded parameter: v3^3 + v5^3 = 0")
    c = principal_root(cube_sum, 3)
    x = [
        p.v0 * p.v3 / c,
        -p.v1 * p.v4 * p.v5 / (p.v2 * p.v3),
        p.v0 * p.v5 / c,
        p.v1,
        p.v2,
        p.v3 / c,
        p.v4,
        p.v5 / c,
    ]
    return from_variables(x)


def from_variables(x) -> Hypermatrix3:
    """Hypermatrix with ``X[i, j, k] = x[i + 2j + 4k]``."""
    data = np.asarray(x, dtype=complex).reshape(2, 2, 2)
    return Hypermatrix3(np.transpose(data, (2, 1, 0)))


def to_variables(x: Hypermatrix3) -> list[complex]:
    return np.transpose(x.array, (2, 1, 0)).ravel().tolist()


def orthogonality_constraints(x: Hypermatrix3) -> tuple[complex, ...]:
    """The four polynomial residuals of the orthogonality system."""
    v = to_variables(x)
    cubes = tuple(v[i] ** 3 + v[j] ** 3 - 1 for i, j in CUBE_PAIRS)
    bilinear = tuple(
        v[a] * v[b] * v[c] + v[d] * v[e] * v[f]
        for (a, b, c), (d, e, f) in BILINEAR_TERMS
    )
    return cubes[0], bilinear[0], bilinear[1], cubes[1]


def _annulus_sample(rng: np.random.Generator) -> complex:
    radius = rng.uniform(*ANNULUS)
    return complex(radius * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def sample_ortho_hyper_params(rng: np.random.Generator) -> OrthoParamHyper:
    """Random admissible parameters; ``v1..v5`` on the annulus ``0.5 <= |v| <= 2``."""
    v0 = complex(np.exp(2j * np.pi * rng.integers(3) / 3))
    while True:
        v = [_annulus_sample(rng) for _ in range(5)]
        if abs(v[2] ** 3 + v[4] ** 3) > 1e-2:
            return OrthoParamHyper(v0=v0, v1=v[0], v2=v[1], v3=v[2], v4=v[3], v5=v[4])


def sample_ortho_matrix_params(rng: np.random.Generator) -> OrthoParamMatrix:
    while True:
        r, t = _annulus_sample(rng), _annulus_sample(rng)
        if abs(r * r + t * t) > 1e-2:
            return OrthoParamMatrix(r=r, s=int(rng.choice([-1, 1])), t=t)


def random_ortho_hyper(rng: np.random.Generator) -> Hypermatrix3:
    return gen_ortho_hyper(sample_ortho_hyper_params(rng))


def rotated_orthogonality_residual(x: Matrix) -> dict[str, float]:
    """Residuals of ``X^R (X^R)^T = I`` and ``(X^R)^T X^R = I`` per rotation."""
    identity = np.eye(x.shape[0])
    residuals = {}
    for angle in RotationAngle:
        rotated = rotate_matrix(x, angle).array
        residuals[angle.label] = float(
            max(
                np.max(np.abs(rotated @ rotated.T - identity)),
                np.max(np.abs(rotated.T @ rotated - identity)),
            )
        )
    return residuals


@cache
def degenerate_patterns() -> tuple[frozenset[int], ...]:
    """Zero patterns of degenerate orthogonal 2x2x2 hypermatrices, as index
    sets over ``x0..x7``."""
    raw = json.loads((DATA_DIR / "zero_patterns.json").read_text())
    return tuple(frozenset(p) for p in raw)


def verify_zero_pattern(pattern: frozenset[int]) -> bool:
    """Whether zeroing ``pattern`` kills both bilinear constraints while
    leaving both cube sums satisfiable."""
    kills = all(set(term) & pattern for pair in BILINEAR_TERMS for term in pair)
    return kills and not any(set(pair) <= pattern for pair in CUBE_PAIRS)


def pattern_witness(pattern: frozenset[int]) -> Hypermatrix3:
    """An orthogonal hypermatrix with zeros exactly where ``pattern`` says,
    plus one zero per cube pair when both members are free."""
    if not verify_zero_pattern(pattern):
        raise ParameterError(f"Pattern {sorted(pattern)} does not solve the system")
    x = [0.0 if i in pattern else 1.0 for i in range(8)]
    for pair in CUBE_PAIRS:
        free = [i for i in pair if i not in pattern]
        for i in free[1:]:
            x[i] = 0.0
    return from_variables(x)


@cache
def rotation_triples() -> tuple[tuple[RotationAngle, ...], ...]:
    raw = json.loads((DATA_DIR / "rotation_triples.json").read_text())
    return tuple(tuple(RotationAngle(q) for q in triple) for triple in raw)


def triple_label(triple) -> str:
    return "[" + ", ".join(RotationAngle(q).label for q in triple) + "]"


def verify_rotation_invariance(
    x: Hypermatrix3, tol: float = 1e-9
) -> VerificationReport:
    """Check orthogonality of ``x`` rotated by every tabulated angle triple."""
    residuals = {
        triple_label(t): is_orthogonal(rotate_hyper(x, *t), tol).residual
        for t in rotation_triples()
    }
    report = VerificationReport.from_residuals(
        "rotation-invariance",
        residuals,
        tol,
        notes=[f"{len(residuals)} rotation triples checked"],
    )
    for failure in report.failures:
        log.warning(
            "Rotation %s breaks orthogonality (residual %.3g)",
            failure.name,
            failure.residual,
        )
    return report

"""Tensorial orbits ``{A M B : A in GL_m, B in GL_n}`` of matrices over prime fields."""

import itertools
import logging
import math

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, Field, field_validator

from bmx.errors import EnumerationGuardError, ParameterError, ShapeError
from bmx.hypermatrix import Matrix

log = logging.getLogger(__name__)

MAX_PRIME = 3
MAX_DIMENSION = 3


class FiniteFieldSpec(BaseModel):
    """The field with ``p**k`` elements."""

    model_config = ConfigDict(frozen=True)

    p: int
    k: int = Field(default=1, ge=1)

    @field_validator("p")
    @classmethod
    def _prime(cls, value: int) -> int:
        if not sympy.isprime(value):
            raise ValueError(f"Field characteristic must be prime, got {value}")
        return value

    @property
    def order(self) -> int:
        return self.p**self.k


def orbit_cardinality(f: FiniteFieldSpec, n: int) -> int:
    """Size of the orbit of an invertible ``n x n`` matrix, which is ``|GL_n|``."""
    if n < 1:
        raise ParameterError(f"Matrix size must be positive, got {n}")
    q = f.order
    return math.prod(q**n - q**i for i in range(n))


def _check_guard(f: FiniteFieldSpec, *dims: int) -> None:
    if f.k != 1:
        raise ParameterError("Orbit enumeration is limited to prime fields (k = 1)")
    if f.p > MAX_PRIME or max(dims) > MAX_DIMENSION:
        raise EnumerationGuardError(
            f"Enumeration over F_{f.p} with dimensions {dims} exceeds the guard "
            f"(p <= {MAX_PRIME}, dimensions <= {MAX_DIMENSION})"
        )


def _determinants(stack: np.ndarray, p: int) -> np.ndarray:
    return np.mod(np.rint(np.linalg.det(stack.astype(float))).astype(np.int64), p)


def general_linear_group(n: int, f: FiniteFieldSpec) -> list[Matrix]:
    """Every invertible ``n x n`` matrix over ``F_p``, by determinant filter."""
    _check_guard(f, n)
    candidates = np.array(
        list(itertools.product(range(f.p), repeat=n * n)), dtype=np.int64
    ).reshape(-1, n, n)
    invertible = candidates[_determinants(candidates, f.p) != 0]
    log.debug("GL_%d(F_%d) has %d elements", n, f.p, len(invertible))
    return [Matrix(g, modulus=f.p) for g in invertible]


def _generators(n: int, p: int) -> np.ndarray:
    """Transvections ``I + E_ij`` and a primitive-root scaling per coordinate."""
    gens = []
    for i, j in itertools.permutations(range(n), 2):
        g = np.eye(n, dtype=np.int64)
        g[i, j] = 1
        gens.append(g)
    root = int(sympy.primitive_root(p))
    for i in range(n):
        g = np.eye(n, dtype=np.int64)
        g[i, i] = root
        gens.append(g)
    return np.array(gens, dtype=np.int64).reshape(-1, n, n)


def _codes(stack: np.ndarray, p: int) -> np.ndarray:
    weights = p ** np.arange(stack.shape[1] * stack.shape[2], dtype=np.int64)
    return stack.reshape(len(stack), -1) @ weights


def enumerate_orbit(m: Matrix, f: FiniteFieldSpec) -> frozenset[Matrix]:
    """All ``A M B`` with ``A``, ``B`` invertible over ``F_p``.

    The orbit is closed under multiplication by generators of both general
    linear groups, so a breadth-first closure from ``M`` reaches all of it.
    """
    rows, cols = m.shape
    _check_guard(f, rows, cols)
    if m.modulus not in (None, f.p):
        raise ShapeError(f"Matrix is over F_{m.modulus}, not F_{f.p}")
    start = Matrix(m, modulus=f.p).array.astype(np.int64)
    left, right = _generators(rows, f.p), _generators(cols, f.p)
    seen = {int(_codes(start[None], f.p)[0])}
    orbit = [start]
    frontier = start[None]
    while len(frontier):
        images = np.concatenate(
            [
                np.einsum("gab,fbc->gfac", left, frontier).reshape(-1, rows, cols),
                np.einsum("fab,gbc->gfac", frontier, right).reshape(-1, rows, cols),
            ]
        )
        images = np.mod(images, f.p)
        fresh = []
        for code, image in zip(_codes(images, f.p), images, strict=True):
            if int(code) not in seen:
                seen.add(int(code))
                fresh.append(image)
        orbit.extend(fresh)
        frontier = np.array(fresh, dtype=np.int64).reshape(-1, rows, cols)
    log.info("Orbit over F_%d has %d elements", f.p, len(orbit))
    return frozenset(Matrix(x, modulus=f.p) for x in orbit)


def in_orbit(m: Matrix, other: Matrix, f: FiniteFieldSpec) -> bool:
    return Matrix(other, modulus=f.p) in enumerate_orbit(m, f)

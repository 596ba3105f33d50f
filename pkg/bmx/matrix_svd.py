"""Matrix SVD through symmetrization: the baseline the hypermatrix case extends.

Singular values come from the eigenvalues of ``A A^T`` and ``A^T A``. The
products ``U[i,k] U[j,k]`` are then the solution of one Vandermonde system
per entry, because ``(A A^T)^p[i,j] = sum_k U[i,k] U[j,k] lambda_k^p``.
"""

import logging

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from bmx.errors import ShapeError
from bmx.hypermatrix import Matrix

log = logging.getLogger(__name__)

REPEAT_GAP = 1e-6


def jacobi_eigh(
    s: np.ndarray, tol: float = 1e-12, max_sweeps: int = 64
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors (columns) of a real symmetric matrix by
    cyclic Jacobi rotations."""
    a = np.array(s, dtype=float)
    n = a.shape[0]
    vectors = np.eye(n)
    scale = max(float(np.max(np.abs(a))), 1e-300)
    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                if theta == 0:
                    t = 1.0
                c = 1 / np.sqrt(t * t + 1)
                rotation = np.eye(n)
                rotation[p, p] = rotation[q, q] = c
                rotation[p, q], rotation[q, p] = c * t, -c * t
                a = rotation.T @ a @ rotation
                vectors = vectors @ rotation
    else:
        log.warning("Jacobi did not converge in %d sweeps", max_sweeps)
    log.debug("Jacobi finished after %d sweeps", sweep + 1)
    return np.diag(a).copy(), vectors


class MatrixSvdResult(BaseModel):
    """``A = U diag(sigma) V`` with ``U U^T = I = V^T V``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u: Matrix
    sigma: tuple[float, ...]
    v: Matrix
    repeated: bool = False
    route: str = "vandermonde"

    def reconstruct(self) -> Matrix:
        return Matrix(self.u.array @ np.diag(self.sigma) @ self.v.array)


def _is_repeated(values: np.ndarray) -> bool:
    scale = max(float(np.max(np.abs(values))), 1e-300)
    gaps = np.abs(np.diff(np.sort(values)))
    return bool(np.any(gaps < REPEAT_GAP * scale))


def _vandermonde_vectors(s: np.ndarray, eigenvalues: np.ndarray) -> np.ndarray:
    """Columns ``u_k`` with ``s = sum_k lambda_k u_k u_k^T`` up to column signs."""
    n = s.shape[0]
    top = float(np.max(np.abs(eigenvalues)))
    normalized = s / top
    nodes = eigenvalues / top
    powers = [np.eye(n)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ normalized)
    moments = np.stack(powers)  # moments[p, i, j]
    vandermonde = np.vander(nodes, n, increasing=True).T  # [p, k] = nodes[k]^p
    lu = scipy.linalg.lu_factor(vandermonde)
    grams = scipy.linalg.lu_solve(lu, moments.reshape(n, n * n)).reshape(n, n, n)
    vectors = np.zeros((n, n))
    for k in range(n):
        gram = grams[k]
        pivot = int(np.argmax(np.diag(gram)))
        vectors[:, k] = gram[:, pivot] / np.sqrt(gram[pivot, pivot])
    return vectors


def matrix_svd_sym(a: Matrix) -> MatrixSvdResult:
    """SVD of a real square matrix from its symmetric products.

    Distinct squared singular values go through the Vandermonde systems;
    repeated ones fall back to the Jacobi eigenvectors and set ``repeated``.
    """
    if not a.is_square:
        raise ShapeError(f"Symmetrization SVD needs a square matrix, got {a.shape}")
    if not a.is_real():
        raise ShapeError("Symmetrization SVD needs a real matrix")
    m = a.array.real
    left_values, left_vectors = jacobi_eigh(m @ m.T)
    right_values, right_vectors = jacobi_eigh(m.T @ m)
    order = np.argsort(-left_values, kind="stable")
    squared = np.clip(left_values[order], 0, None)
    sigma = np.sqrt(squared)
    log.debug(
        "Squared singular values %s (right side %s)",
        squared,
        np.sort(right_values)[::-1],
    )

    repeated = _is_repeated(squared)
    if repeated or sigma[0] == 0:
        u = left_vectors[:, order]
        v = np.zeros_like(m)
        right_order = np.argsort(-right_values, kind="stable")
        for k in range(m.shape[0]):
            if sigma[k] > REPEAT_GAP * sigma[0]:
                v[k] = u[:, k] @ m / sigma[k]
            else:
                v[k] = right_vectors[:, right_order[k]]
        route = "eigen"
    else:
        u = _vandermonde_vectors(m @ m.T, squared)
        v = _vandermonde_vectors(m.T @ m, squared).T
        signs = np.sign(np.diag(u.T @ m @ v.T))
        signs[signs == 0] = 1
        v = signs[:, None] * v
        route = "vandermonde"
    log.info("Matrix SVD via the %s route", route)
    return MatrixSvdResult(
        u=Matrix(u),
        sigma=tuple(float(x) for x in sigma),
        v=Matrix(v),
        repeated=repeated,
        route=route,
    )

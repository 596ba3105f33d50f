"""BM products, symmetric products of transposes and the predicates built on them."""

import logging

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from bmx.errors import ParameterError, ShapeError, SingularFiberError
from bmx.hypermatrix import Hypermatrix3, Matrix, delta, hadamard_exp, transpose
from bmx.models import CheckResult, ScalingCheck, SlotPosition

log = logging.getLogger(__name__)

FIBER_CONDITION_LIMIT = 1e12


def _require_cubic(*hypermatrices: Hypermatrix3) -> None:
    for h in hypermatrices:
        if not h.is_cubic:
            raise ShapeError(f"Expected a cubic hypermatrix, got shape {h.shape}")


def _conform(expected: int, actual: int, what: str, axis: int) -> None:
    if expected != actual:
        raise ShapeError(f"{what}: expected {expected}, got {actual}", axis=axis)


def prod2(a: Matrix, b: Matrix) -> Matrix:
    _conform(a.shape[1], b.shape[0], "Inner dimension of the matrix product", 1)
    return Matrix(a.array @ b.array)


def prod2_bg(a: Matrix, b: Matrix, m: Matrix) -> Matrix:
    """``Prod_M(A, B)[i,j] = sum A[i,t0] B[t1,j] M[t0,t1]``."""
    _conform(a.shape[1], m.shape[0], "Background rows vs columns of A", 0)
    _conform(b.shape[0], m.shape[1], "Background columns vs rows of B", 1)
    return Matrix(np.einsum("ia,bj,ab->ij", a.array, b.array, m.array))


def _check_triple(a: Hypermatrix3, b: Hypermatrix3, c: Hypermatrix3) -> int:
    (m, ell, p), (m_b, n, ell_b), (ell_c, n_c, p_c) = a.shape, b.shape, c.shape
    _conform(m, m_b, "Rows of B vs rows of A", 0)
    _conform(ell, ell_b, "Depth of B vs columns of A", 2)
    _conform(ell, ell_c, "Rows of C vs columns of A", 0)
    _conform(n, n_c, "Columns of C vs columns of B", 1)
    _conform(p, p_c, "Depth of C vs depth of A", 2)
    return ell


def prod3(a: Hypermatrix3, b: Hypermatrix3, c: Hypermatrix3) -> Hypermatrix3:
    """``Prod(A, B, C)[i,j,k] = sum_t A[i,t,k] B[i,j,t] C[t,j,k]``.

    Shapes must be ``(m, l, p)``, ``(m, n, l)`` and ``(l, n, p)``.
    """
    _check_triple(a, b, c)
    return Hypermatrix3(np.einsum("itk,ijt,tjk->ijk", a.array, b.array, c.array))


def prod3_bg(
    a: Hypermatrix3, b: Hypermatrix3, c: Hypermatrix3, m: Hypermatrix3
) -> Hypermatrix3:
    """General BM product weighted by the cubic background ``M``."""
    ell = _check_triple(a, b, c)
    if m.shape != (ell, ell, ell):
        raise ShapeError(
            f"Background must be cubic of side {ell}, got {m.shape}", axis=0
        )
    return Hypermatrix3(
        np.einsum("iak,ijb,cjk,abc->ijk", a.array, b.array, c.array, m.array)
    )


def symmetric_product(a: Hypermatrix3) -> Hypermatrix3:
    """``Prod(A, A^T2, A^T)``."""
    return prod3(a, transpose(a, 2), transpose(a))


def sym_products(a: Hypermatrix3) -> tuple[Hypermatrix3, Hypermatrix3, Hypermatrix3]:
    _require_cubic(a)
    at, at2 = transpose(a), transpose(a, 2)
    return prod3(a, at2, at), prod3(at, a, at2), prod3(at2, at, a)


def _delta_check(product: Hypermatrix3, tol: float) -> CheckResult:
    residual = (product - delta(product.side)).max_abs()
    return CheckResult(passed=residual <= tol, residual=residual, tolerance=tol)


def is_orthogonal(x: Hypermatrix3, tol: float = 1e-9) -> CheckResult:
    _require_cubic(x)
    return _delta_check(symmetric_product(x), tol)


def is_uncorrelated(
    a: Hypermatrix3, b: Hypermatrix3, c: Hypermatrix3, tol: float = 1e-9
) -> CheckResult:
    _require_cubic(a, b, c)
    return _delta_check(prod3(a, b, c), tol)


SCALING_CHARACTERIZATIONS = {
    "Prod(D^T, D^T2, D)": lambda d: prod3(transpose(d), transpose(d, 2), d),
    "Prod(D, D^T, D^T2)": lambda d: prod3(d, transpose(d), transpose(d, 2)),
    "Prod(D^T2, D, D^T)": lambda d: prod3(transpose(d, 2), d, transpose(d)),
}


def is_scaling(d: Hypermatrix3, tol: float = 1e-9) -> ScalingCheck:
    """Compare ``D^o3`` against the three cyclic self-products of ``D``."""
    _require_cubic(d)
    cube = hadamard_exp(d, 3)
    residuals = {
        name: (cube - product(d)).max_abs()
        for name, product in SCALING_CHARACTERIZATIONS.items()
    }
    matched = tuple(name for name, r in residuals.items() if r <= tol)
    return ScalingCheck(
        passed=bool(matched),
        residual=min(residuals.values()),
        tolerance=tol,
        matched=matched,
    )


class ScalingPair(BaseModel):
    """Scaling hypermatrices ``A[i,t,k] = alpha[i,t]`` and ``B[t,j,k] = beta[t,j]``
    (nonzero only where ``t = k``)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: Matrix
    beta: Matrix
    a: Hypermatrix3
    b: Hypermatrix3

    def apply(self, x: Hypermatrix3) -> Hypermatrix3:
        return prod3(self.a, x, self.b)


def scaling_pair(alpha: Matrix, beta: Matrix) -> ScalingPair:
    m, p = alpha.shape
    p_b, n = beta.shape
    _conform(p, p_b, "Rows of beta vs columns of alpha", 0)
    idx = np.arange(p)
    a = np.zeros((m, p, p), dtype=complex)
    a[:, idx, idx] = alpha.array
    b = np.zeros((p, n, p), dtype=complex)
    b[idx, :, idx] = beta.array
    return ScalingPair(alpha=alpha, beta=beta, a=Hypermatrix3(a), b=Hypermatrix3(b))


def scaling_inverse(pair: ScalingPair) -> ScalingPair:
    for name, grid in (("alpha", pair.alpha), ("beta", pair.beta)):
        if np.any(grid.array == 0):
            raise ParameterError(f"Scaling pair has a zero entry in {name}")
    return scaling_pair(Matrix(1 / pair.alpha.array), Matrix(1 / pair.beta.array))


def _fiber_solve(coeffs: np.ndarray, rhs: np.ndarray, fiber, limit: float):
    singular = np.linalg.svd(coeffs, compute_uv=False)
    condition = float("inf") if singular[-1] == 0 else singular[0] / singular[-1]
    if not condition <= limit:
        raise SingularFiberError(
            f"Fiber {fiber} is singular (condition estimate {condition:.3g})",
            fiber=fiber,
            condition=condition,
        )
    return scipy.linalg.lu_solve(scipy.linalg.lu_factor(coeffs), rhs)


def solve_factor(
    position: SlotPosition | str,
    known1: Hypermatrix3,
    known2: Hypermatrix3,
    target: Hypermatrix3,
    max_condition: float = FIBER_CONDITION_LIMIT,
) -> Hypermatrix3:
    """Solve for the unknown factor of a BM product, one linear system per fiber.

    ``known1`` and ``known2`` are the other two factors in their product order.
    """
    position = SlotPosition(position)
    t = target.array
    m, n, p = target.shape
    k1, k2 = known1.array, known2.array
    limit = max_condition
    match position:
        case SlotPosition.first:
            # Prod(X, B, C): for each (i, k), X[i,:,k] from the equations over j
            ell = k1.shape[2]
            _conform(n, ell, "Fiber system is not square (columns vs contraction)", 1)
            _check_triple(Hypermatrix3.zeros((m, ell, p)), known1, known2)
            x = np.zeros((m, ell, p), dtype=complex)
            for i in range(m):
                for k in range(p):
                    coeffs = k1[i, :, :] * k2[:, :, k].T
                    x[i, :, k] = _fiber_solve(coeffs, t[i, :, k], (i, k), limit)
        case SlotPosition.middle:
            # Prod(A, X, C): for each (i, j), X[i,j,:] from the equations over k
            ell = k1.shape[1]
            _conform(p, ell, "Fiber system is not square (depth vs contraction)", 2)
            _check_triple(known1, Hypermatrix3.zeros((m, n, ell)), known2)
            x = np.zeros((m, n, ell), dtype=complex)
            for i in range(m):
                for j in range(n):
                    coeffs = k1[i, :, :].T * k2[:, j, :].T
                    x[i, j, :] = _fiber_solve(coeffs, t[i, j, :], (i, j), limit)
        case SlotPosition.third:
            # Prod(A, B, X): for each (j, k), X[:,j,k] from the equations over i
            ell = k1.shape[1]
            _conform(m, ell, "Fiber system is not square (rows vs contraction)", 0)
            _check_triple(known1, known2, Hypermatrix3.zeros((ell, n, p)))
            x = np.zeros((ell, n, p), dtype=complex)
            for j in range(n):
                for k in range(p):
                    coeffs = k1[:, :, k] * k2[:, j, :]
                    x[:, j, k] = _fiber_solve(coeffs, t[:, j, k], (j, k), limit)
    log.debug("Solved the %s factor of shape %s", position.value, x.shape)
    return Hypermatrix3(x)

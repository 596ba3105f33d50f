"""Symmetrization SVD of 2x2x2 hypermatrices and its Kronecker/direct-sum
composition to larger sides.

The decomposition writes ``A`` as a sum of eight BM outer products

    A = sum_{i,j,k} sigma_ijk Prod(Ut[:, i, :], Vt[:, :, j], Wt[k, :, :])

where ``Ut``, ``Vt`` and ``Wt`` satisfy the spectral constraints
``Prod(A, A^T2, A^T) = Prod(Ut, Ut^T2, Ut^T)``,
``Prod(A^T, A, A^T2) = Prod(Vt^T, Vt, Vt^T2)`` and
``Prod(A^T2, A^T, A) = Prod(Wt^T2, Wt^T, Wt)``.
"""

import itertools
import logging

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from bmx.errors import CompositionError
from bmx.factors import FactorSolution, disaggregate, factor_system_solve, resplit
from bmx.hypermatrix import Hypermatrix3, block_diagonal, kron, transpose
from bmx.models import Family, SlotPosition
from bmx.products import prod3, solve_factor, sym_products
from bmx.scaling import (
    DEGENERACY_THRESHOLD,
    FAMILY_FACTORS,
    SYSTEM_CONDITION_LIMIT,
    ScalingFamily,
    char_gauge_solve,
    characteristic_residual,
)

log = logging.getLogger(__name__)

# transposes taking a factor from its family operand's frame to A's frame
_ORIENTATION = {Family.mu: 0, Family.nu: 2, Family.omega: 1}

FIXED_POINT_NOTE = (
    "fixed-point update for Ut solves against Prod(A, A^T2, A^T), the product "
    "its spectral constraint uses"
)

CONVERGED_RESIDUAL = 1e-12
COMPOSITION_TOL = 1e-6

# split ratios tried for every factor after the ones read from its operand
SPLIT_FALLBACKS = ((2, 0.5), (1j, 1), (1, -1))


class SvdOptions(BaseModel):
    gauge: complex | None = None
    tol: float = Field(default=1e-9, gt=0)
    threshold: float = Field(default=DEGENERACY_THRESHOLD, gt=0)
    sigma_condition_limit: float = Field(default=SYSTEM_CONDITION_LIMIT, gt=0)
    refine_iterations: int = Field(default=0, ge=0)


class Svd3Result(BaseModel):
    """Factors, coefficients and residual diagnostics of one decomposition."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u_tilde: Hypermatrix3
    v_tilde: Hypermatrix3
    w_tilde: Hypermatrix3
    sigma: tuple[complex, ...]
    families: tuple[ScalingFamily, ...] = ()
    factors: tuple[FactorSolution, ...] = ()
    characteristic_residual: float = 0.0
    spectral_residual: float = 0.0
    reconstruction_residual: float = 0.0
    orthogonality_residual: float = 0.0
    sigma_condition: float = 1.0
    rank_deficient: bool = False
    sigma_support: int = 8
    residual_history: list[float] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def sigma_hypermatrix(self) -> Hypermatrix3:
        return Hypermatrix3(np.array(self.sigma, dtype=complex).reshape(2, 2, 2))


def outer_term(
    u: Hypermatrix3, v: Hypermatrix3, w: Hypermatrix3, i: int, j: int, k: int
) -> Hypermatrix3:
    """``Prod(U[:, i, :], V[:, :, j], W[k, :, :])`` for the 2x1x2, 2x2x1, 1x2x2
    slices."""
    return prod3(
        Hypermatrix3(u.array[:, i : i + 1, :]),
        Hypermatrix3(v.array[:, :, j : j + 1]),
        Hypermatrix3(w.array[k : k + 1, :, :]),
    )


def sigma_system(u: Hypermatrix3, v: Hypermatrix3, w: Hypermatrix3) -> np.ndarray:
    """Rows are entries ``(a, b, c)`` of ``A``, columns the coefficients
    ``sigma_ijk``."""
    coefficients = np.einsum("aic,abj,kbc->abcijk", u.array, v.array, w.array)
    return coefficients.reshape(8, 8)


def solve_sigma(
    a: Hypermatrix3,
    u: Hypermatrix3,
    v: Hypermatrix3,
    w: Hypermatrix3,
    max_condition: float = SYSTEM_CONDITION_LIMIT,
    tol: float = 1e-9,
) -> tuple[np.ndarray, bool, int]:
    """Coefficients, whether the system was rank deficient, and their support."""
    matrix = sigma_system(u, v, w)
    rhs = a.array.reshape(8)
    condition = float(np.linalg.cond(matrix))
    if condition <= max_condition:
        sigma = scipy.linalg.lu_solve(scipy.linalg.lu_factor(matrix), rhs)
        deficient = False
    else:
        sigma = np.linalg.lstsq(matrix, rhs, rcond=None)[0]
        deficient = True
        log.warning(
            "Sigma system is rank deficient (condition %.3g); using least squares",
            condition,
        )
    cutoff = tol * max(1.0, float(np.max(np.abs(sigma))))
    return sigma, deficient, int(np.count_nonzero(np.abs(sigma) > cutoff))


def _reconstruct(
    u: Hypermatrix3, v: Hypermatrix3, w: Hypermatrix3, sigma: np.ndarray
) -> Hypermatrix3:
    total = Hypermatrix3.zeros((2, 2, 2))
    for (i, j, k), s in zip(np.ndindex(2, 2, 2), sigma, strict=True):
        if s != 0:
            total = total + outer_term(u, v, w, i, j, k) * complex(s)
    return total


def reconstruct(r: Svd3Result) -> Hypermatrix3:
    return _reconstruct(r.u_tilde, r.v_tilde, r.w_tilde, np.array(r.sigma))


def spectral_residual(
    a: Hypermatrix3, u: Hypermatrix3, v: Hypermatrix3, w: Hypermatrix3
) -> float:
    """Largest deviation of the three spectral constraints, relative to
    ``max|A|^3``."""
    targets = sym_products(a)
    products = (
        prod3(u, transpose(u, 2), transpose(u)),
        prod3(transpose(v), v, transpose(v, 2)),
        prod3(transpose(w, 2), transpose(w), w),
    )
    deviation = max((t - p).max_abs() for t, p in zip(targets, products, strict=True))
    return deviation / max(a.max_abs() ** 3, 1e-300)


def relative_error(a: Hypermatrix3, approx: Hypermatrix3) -> float:
    return (a - approx).max_abs() / max(a.max_abs(), 1e-300)


def _scaled_factor(solution: FactorSolution) -> Hypermatrix3:
    """``Prod(X, D, D^T)`` for a disaggregated factor, oriented into A's frame."""
    member = solution.family
    # the operand frame always carries the mu-shaped scaling hypermatrix
    d = ScalingFamily(
        family=Family.mu, values=member.values, gauge=member.gauge
    ).scaling_hypermatrix()
    scaled = prod3(solution.hypermatrix(), d, transpose(d))
    return transpose(scaled, _ORIENTATION[member.family])


def _solve_family(
    a: Hypermatrix3, family: Family, options: SvdOptions
) -> FactorSolution:
    member = char_gauge_solve(a, family, options.gauge, options.threshold)
    solution = factor_system_solve(a, member, FAMILY_FACTORS[family])
    solution = disaggregate(solution, tol=options.tol)
    log.info("Solved the %s family with gauge %s", family.value, member.gauge)
    return solution


def _best_split(
    solutions: list[FactorSolution],
) -> tuple[tuple[FactorSolution, ...], float]:
    """Split ratios for the three factors that best condition the sigma system.

    Each factor tries the ratios read from its operand, then SPLIT_FALLBACKS.
    """
    choices = [
        [s, *(resplit(s, ratios) for ratios in SPLIT_FALLBACKS)] for s in solutions
    ]
    scaled = [[_scaled_factor(s) for s in factor] for factor in choices]
    best, best_condition = None, float("inf")
    for combination in itertools.product(*(range(len(c)) for c in choices)):
        matrix = sigma_system(*(scaled[f][k] for f, k in enumerate(combination)))
        condition = float(np.linalg.cond(matrix))
        if best is None or condition < best_condition:
            best, best_condition = combination, condition
    log.debug("Split ratio choice %s (sigma condition %.3g)", best, best_condition)
    return tuple(choices[f][k] for f, k in enumerate(best)), best_condition


def svd3(a: Hypermatrix3, options: SvdOptions | None = None) -> Svd3Result:
    """Decompose a 2x2x2 hypermatrix.

    Raises DegenerateFamilyError when a family's Q or S vanishes,
    SingularSystemError when the gauge leaves a factor-entry system singular,
    and NoBranchError when no cube-root branch is feasible.
    """
    options = options or SvdOptions()
    factors, condition = _best_split([_solve_family(a, f, options) for f in Family])
    families = tuple(s.family for s in factors)
    u, v, w = (_scaled_factor(s) for s in factors)

    sigma, deficient, support = solve_sigma(
        a, u, v, w, options.sigma_condition_limit, options.tol
    )
    notes = []
    if deficient:
        notes.append(f"sigma system rank deficient; {support} nonzero coefficients")
    spectral = spectral_residual(a, u, v, w)
    result = Svd3Result(
        u_tilde=u,
        v_tilde=v,
        w_tilde=w,
        sigma=tuple(complex(s) for s in sigma),
        families=families,
        factors=factors,
        characteristic_residual=max(characteristic_residual(a, f) for f in families),
        spectral_residual=spectral,
        reconstruction_residual=relative_error(a, _reconstruct(u, v, w, sigma)),
        orthogonality_residual=max(s.orthogonality_residual for s in factors),
        sigma_condition=condition,
        rank_deficient=deficient,
        sigma_support=support,
        residual_history=[spectral],
        notes=notes,
    )
    log.info(
        "svd3 residuals: characteristic %.3g, spectral %.3g, reconstruction %.3g",
        result.characteristic_residual,
        result.spectral_residual,
        result.reconstruction_residual,
    )
    if options.refine_iterations:
        result = fixed_point_refine(a, result, options.refine_iterations)
    return result


def fixed_point_residual(a: Hypermatrix3, r: Svd3Result) -> float:
    return spectral_residual(a, r.u_tilde, r.v_tilde, r.w_tilde)


def fixed_point_refine(
    a: Hypermatrix3,
    r: Svd3Result,
    iterations: int = 1,
    weight: float = 1 / 3,
    tol: float = CONVERGED_RESIDUAL,
) -> Svd3Result:
    """Relaxed fixed-point sweeps on the three factors, then a fresh sigma solve.

    Each factor is moved a third of the way to the solution of its spectral
    constraint with the other two slots frozen at the current iterate.
    Sweeps stop once the spectral residual is at most ``tol``. A sweep that
    does not reduce the residual is logged.
    """
    target_u, target_v, target_w = sym_products(a)
    u, v, w = r.u_tilde, r.v_tilde, r.w_tilde
    history = list(r.residual_history) or [fixed_point_residual(a, r)]
    for step in range(iterations):
        if history[-1] <= tol:
            log.debug(
                "Spectral residual %.3g is within %.3g; converged after %d steps",
                history[-1],
                tol,
                step,
            )
            break
        x_u = solve_factor(SlotPosition.first, transpose(u, 2), transpose(u), target_u)
        x_v = solve_factor(SlotPosition.middle, transpose(v), transpose(v, 2), target_v)
        x_w = solve_factor(SlotPosition.third, transpose(w, 2), transpose(w), target_w)
        u = u + (x_u - u) * weight
        v = v + (x_v - v) * weight
        w = w + (x_w - w) * weight
        residual = spectral_residual(a, u, v, w)
        log.info("Refinement step %d: spectral residual %.3g", step + 1, residual)
        if residual >= history[-1]:
            log.warning(
                "Refinement step %d did not reduce the spectral residual "
                "(%.3g -> %.3g)",
                step + 1,
                history[-1],
                residual,
            )
        history.append(residual)

    sigma, deficient, support = solve_sigma(a, u, v, w)
    notes = list(r.notes)
    if FIXED_POINT_NOTE not in notes:
        notes.append(FIXED_POINT_NOTE)
    return r.model_copy(
        update={
            "u_tilde": u,
            "v_tilde": v,
            "w_tilde": w,
            "sigma": tuple(complex(s) for s in sigma),
            "spectral_residual": history[-1],
            "reconstruction_residual": relative_error(
                a, _reconstruct(u, v, w, sigma)
            ),
            "sigma_condition": float(np.linalg.cond(sigma_system(u, v, w))),
            "rank_deficient": deficient,
            "sigma_support": support,
            "residual_history": history,
            "notes": notes,
        }
    )


class ComposedDecomposition(BaseModel):
    """``A = Prod(U', V', W')`` with the coefficients folded into ``U'``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u_prime: Hypermatrix3
    v_prime: Hypermatrix3
    w_prime: Hypermatrix3

    @classmethod
    def from_result(cls, r: Svd3Result) -> "ComposedDecomposition":
        ones = np.ones(2)
        sigma = r.sigma_hypermatrix.array
        return cls(
            u_prime=Hypermatrix3(
                np.einsum("aic,ijk->aijkc", r.u_tilde.array, sigma).reshape(2, 8, 2)
            ),
            v_prime=Hypermatrix3(
                np.einsum("abj,i,k->abijk", r.v_tilde.array, ones, ones).reshape(
                    2, 2, 8
                )
            ),
            w_prime=Hypermatrix3(
                np.einsum("kbc,i,j->ijkbc", r.w_tilde.array, ones, ones).reshape(
                    8, 2, 2
                )
            ),
        )

    def reconstruct(self) -> Hypermatrix3:
        return prod3(self.u_prime, self.v_prime, self.w_prime)

    def residual(self, target: Hypermatrix3) -> float:
        return relative_error(target, self.reconstruct())


Decomposition = Svd3Result | ComposedDecomposition


def _composed(d: Decomposition) -> ComposedDecomposition:
    if isinstance(d, Svd3Result):
        return ComposedDecomposition.from_result(d)
    return d


def _checked(
    composed: ComposedDecomposition, expected: Hypermatrix3, tol: float
) -> ComposedDecomposition:
    residual = composed.residual(expected)
    if not residual <= tol:
        raise CompositionError(
            f"Composed decomposition is off by {residual:.3g} relative to its "
            f"operands (tolerance {tol:.3g})",
            residual=residual,
        )
    log.debug("Composed decomposition residual %.3g", residual)
    return composed


def svd_kron(
    r0: Decomposition, r1: Decomposition, tol: float = COMPOSITION_TOL
) -> ComposedDecomposition:
    """Decomposition of ``A0 kron A1`` from decompositions of the operands.

    Raises CompositionError when the composed factors miss the Kronecker
    product of the operands' reconstructions by more than ``tol``.
    """
    d0, d1 = _composed(r0), _composed(r1)
    composed = ComposedDecomposition(
        u_prime=kron(d0.u_prime, d1.u_prime),
        v_prime=kron(d0.v_prime, d1.v_prime),
        w_prime=kron(d0.w_prime, d1.w_prime),
    )
    return _checked(composed, kron(d0.reconstruct(), d1.reconstruct()), tol)


def svd_dirsum(
    r0: Decomposition, r1: Decomposition, tol: float = COMPOSITION_TOL
) -> ComposedDecomposition:
    """Decomposition of ``A0 (+) A1`` from decompositions of the operands."""
    d0, d1 = _composed(r0), _composed(r1)
    composed = ComposedDecomposition(
        u_prime=block_diagonal(d0.u_prime, d1.u_prime),
        v_prime=block_diagonal(d0.v_prime, d1.v_prime),
        w_prime=block_diagonal(d0.w_prime, d1.w_prime),
    )
    expected = block_diagonal(d0.reconstruct(), d1.reconstruct())
    return _checked(composed, expected, tol)

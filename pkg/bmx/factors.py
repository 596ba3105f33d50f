"""Factor-entry systems: cubes and triple products of one factor, then its entries.

Unknowns are ordered as ``u000^3, u010^3, u000 u001 u100, u010 u011 u110,
u001 u100 u101, u011 u110 u111, u101^3, u111^3`` for the factor of the
family operand. The nu and omega factors are recovered in the frame of
``A^T`` and ``A^T2`` and re-oriented by the caller.

Rows 0, 2, 4 and 6 of the system are the orthogonality constraints of the
factor, rows 1, 3, 5 and 7 the spectral ones.
"""

import itertools
import logging

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from bmx.errors import NoBranchError, ParameterError, SingularSystemError
from bmx.hypermatrix import Hypermatrix3
from bmx.models import Factor
from bmx.products import is_orthogonal
from bmx.scaling import (
    FAMILY_FACTORS,
    SYSTEM_CONDITION_LIMIT,
    ScalingFamily,
    factor_matrix,
    family_invariants,
    family_operand,
    principal_root,
    root_branches,
)

log = logging.getLogger(__name__)

CUBE_INDICES = ((0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1))
TRIPLE_INDICES = (
    ((0, 0, 0), (0, 0, 1), (1, 0, 0)),
    ((0, 1, 0), (0, 1, 1), (1, 1, 0)),
    ((0, 0, 1), (1, 0, 0), (1, 0, 1)),
    ((0, 1, 1), (1, 1, 0), (1, 1, 1)),
)
_PAIR_INDICES = (((1, 0, 0), (0, 0, 1)), ((1, 1, 0), (0, 1, 1)))
_DIAGONAL_ROWS = (0, 6)
_CHECKED_ROWS = [0, 1, 3, 5, 6, 7]

Quad = tuple[complex, complex, complex, complex]


class FactorSolution(BaseModel):
    """Solved cubes and triple products of one factor, and its entries once
    disaggregated."""

    model_config = ConfigDict(frozen=True)

    which: Factor
    family: ScalingFamily
    cubes: Quad
    triples: Quad
    system_residual: float = 0.0
    split_ratios: tuple[complex, complex] = (1, 1)
    entries: tuple[complex, ...] | None = None
    orthogonality_residual: float | None = None
    branch_log: list[str] = Field(default_factory=list)

    def hypermatrix(self) -> Hypermatrix3:
        """Entries as a 2x2x2 hypermatrix in the family operand's frame."""
        if self.entries is None:
            raise ParameterError(f"Factor {self.which.value} is not disaggregated")
        return Hypermatrix3(np.array(self.entries, dtype=complex).reshape(2, 2, 2))


def aggregates(x: Hypermatrix3) -> tuple[Quad, Quad]:
    """Cubes and triple products of a 2x2x2 factor, as the system orders them."""
    cubes = tuple(x[i] ** 3 for i in CUBE_INDICES)
    triples = tuple(x[i] * x[j] * x[k] for i, j, k in TRIPLE_INDICES)
    return cubes, triples


def _check_pairing(family: ScalingFamily, which: Factor | str) -> Factor:
    which = Factor(which)
    if FAMILY_FACTORS[family.family] is not which:
        raise ParameterError(
            f"Factor {which.value} is not solved from the {family.family.value} "
            "family"
        )
    return which


def factor_system(
    a: Hypermatrix3, family: ScalingFamily, which: Factor | str
) -> tuple[np.ndarray, np.ndarray]:
    """The 8x8 matrix and right-hand side for ``which``."""
    _check_pairing(family, which)
    inv = family_invariants(a, family.family)
    rhs = np.array([1, inv.P, 0, inv.Q, 0, inv.S, 1, inv.R], dtype=complex)
    return factor_matrix(family.squares), rhs


def _split_ratio(numerator: complex, denominator: complex) -> complex:
    if numerator == 0 or denominator == 0:
        return 1 + 0j
    return complex(numerator / denominator)


def factor_system_solve(
    a: Hypermatrix3,
    family: ScalingFamily,
    which: Factor | str,
    max_condition: float = SYSTEM_CONDITION_LIMIT,
) -> FactorSolution:
    which = _check_pairing(family, which)
    matrix, rhs = factor_system(a, family, which)
    condition = float(np.linalg.cond(matrix))
    if not condition <= max_condition:
        raise SingularSystemError(
            f"Factor system for {which.value} is singular "
            f"(condition {condition:.3g}); scaling values repeat",
            condition=condition,
        )
    solution = scipy.linalg.lu_solve(scipy.linalg.lu_factor(matrix), rhs)
    residual = float(np.max(np.abs(matrix @ solution - rhs)))
    residual /= max(1.0, float(np.max(np.abs(rhs))))
    b = family_operand(a, family.family)
    ratios = (
        _split_ratio(b[0, 0, 1], b[1, 0, 0]),
        _split_ratio(b[0, 1, 1], b[1, 1, 0]),
    )
    log.debug("Factor %s system solved (condition %.3g)", which.value, condition)
    return FactorSolution(
        which=which,
        family=family,
        cubes=tuple(solution[[0, 1, 6, 7]]),
        triples=tuple(solution[[2, 3, 4, 5]]),
        system_residual=residual,
        split_ratios=ratios,
    )


def _pair_product(lead: complex, triple: complex, tail: complex, other: complex):
    if lead != 0:
        return triple / lead
    if tail != 0:
        return other / tail
    return 0j


def _unknowns(cubes: Quad, triples: Quad) -> np.ndarray:
    c0, c1, c2, c3 = cubes
    return np.array([c0, c1, *triples, c2, c3], dtype=complex)


def _pair_candidates(fs: FactorSolution, roots: Quad) -> list[tuple[complex, ...]]:
    """Values of ``u001 u100`` and ``u011 u110`` to try with one branch."""
    u000, u010, u101, u111 = roots
    q0, q1, r0, r1 = fs.triples
    x, y, z = fs.family.squares
    candidates = [
        (_pair_product(u000, q0, u101, r0), _pair_product(u010, q1, u111, r1))
    ]
    weights = np.array([[x * x * y, y * y * z], [x * y * y, y * z * z]])
    coefficients = weights * np.array([[u000, u010], [u101, u111]])
    (a, b), (c, d) = coefficients
    if abs(a * d - b * c) > 1e-12 * max(abs(a * d), abs(b * c)):
        rhs = np.sum(weights * np.array([[q0, q1], [r0, r1]]), axis=1)
        pairs = scipy.linalg.solve(coefficients, rhs)
        candidates.append(tuple(complex(p) for p in pairs))
    return candidates


def _split(x: np.ndarray, pairs, ratios) -> None:
    for (lead, tail), p, rho in zip(_PAIR_INDICES, pairs, ratios, strict=True):
        root = principal_root(p / rho, 2)
        x[lead], x[tail] = root, rho * root


def _entries_for(roots: Quad, pairs, ratios) -> np.ndarray:
    x = np.zeros((2, 2, 2), dtype=complex)
    for index, value in zip(CUBE_INDICES, roots, strict=True):
        x[index] = value
    _split(x, pairs, ratios)
    return x


def disaggregate(
    fs: FactorSolution, which: Factor | str | None = None, tol: float = 1e-9
) -> FactorSolution:
    """Recover the eight entries from cubes and triple products.

    Every combination of cube-root branches is tried, each with two ways of
    fixing the pair products ``u001 u100`` and ``u011 u110``: dividing the
    solved triple products by the cube roots, and solving the two spectral
    triple-product rows of the system. A candidate is feasible when it meets
    the diagonal orthogonality rows and the four spectral rows within
    ``tol``.

    Away from the degenerate locus ``s00^2 s11^2 = s01^4`` no factor meets
    all eight rows at once, so among feasible candidates the one closest to
    orthogonal wins, then the one with the fewest non-principal roots.
    """
    if which is not None and Factor(which) is not fs.which:
        raise ParameterError(
            f"Solution is for factor {fs.which.value}, not {Factor(which).value}"
        )
    matrix = factor_matrix(fs.family.squares)
    solved = _unknowns(fs.cubes, fs.triples)
    targets = matrix @ solved
    targets[list(_DIAGONAL_ROWS)] = 1
    row_scale = max(1.0, float(np.max(np.abs(targets[_CHECKED_ROWS]))))
    branches = [root_branches(c, 3) for c in fs.cubes]
    candidates = []
    for choice in itertools.product(*(range(len(b)) for b in branches)):
        roots = tuple(b[k] for b, k in zip(branches, choice, strict=True))
        for pairs in _pair_candidates(fs, roots):
            x = Hypermatrix3(_entries_for(roots, pairs, fs.split_ratios))
            realised = _unknowns(*aggregates(x))
            rows = np.abs(matrix @ realised - targets)[_CHECKED_ROWS].max() / row_scale
            candidates.append(
                (
                    float(rows),
                    is_orthogonal(x, tol).residual,
                    sum(k != 0 for k in choice),
                    choice,
                    x,
                )
            )
    feasible = [c for c in candidates if c[0] <= tol]
    if not feasible:
        closest = min(c[0] for c in candidates)
        raise NoBranchError(
            f"No cube-root branch reproduces factor {fs.which.value} "
            f"(best residual {closest:.3g})"
        )
    least = min(c[1] for c in feasible)
    tied = [c for c in feasible if c[1] <= least * (1 + 1e-9) + 1e-12]
    _, orthogonality, _, choice, x = min(tied, key=lambda c: (c[2], c[1]))
    log.debug(
        "Factor %s uses cube-root branches %s (orthogonality residual %.3g)",
        fs.which.value,
        choice,
        orthogonality,
    )
    return fs.model_copy(
        update={
            "entries": x.entries,
            "orthogonality_residual": orthogonality,
            "branch_log": [
                *fs.branch_log,
                f"cube-root branches {list(choice)}",
                f"split ratios {[str(r) for r in fs.split_ratios]}",
            ],
        }
    )


def resplit(fs: FactorSolution, ratios: tuple[complex, complex]) -> FactorSolution:
    """The same factor with ``u001 = r0 u100`` and ``u011 = r1 u110``.

    Pair products, and with them the aggregates and the orthogonality
    residual, are unchanged.
    """
    x = fs.hypermatrix().array.copy()
    pairs = tuple(x[lead] * x[tail] for lead, tail in _PAIR_INDICES)
    ratios = tuple(complex(r) for r in ratios)
    if 0 in ratios:
        raise ParameterError("Split ratios must be nonzero")
    _split(x, pairs, ratios)
    return fs.model_copy(
        update={
            "entries": Hypermatrix3(x).entries,
            "split_ratios": ratios,
            "branch_log": [*fs.branch_log, f"re-split with {[str(r) for r in ratios]}"],
        }
    )

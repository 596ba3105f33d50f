"""Scaling-value families and the characteristic equations that fix them.

Every family is handled through the operand it symmetrizes: ``A`` for mu,
``A^T`` for nu and ``A^T2`` for omega. The symmetric product of that operand
has four distinct entries ``P, Q, S, R`` at ``(0,0,0)``, ``(0,0,1)``,
``(0,1,1)`` and ``(1,1,1)``, and the two characteristic equations read

    (s01^6 - R) Q^3 = (s00^6 - P) S^3
    (s11^6 - R) Q^3 = (s01^6 - P) S^3
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from bmx.errors import DegenerateFamilyError, ParameterError, ShapeError
from bmx.hypermatrix import Hypermatrix3, transpose
from bmx.models import Factor, Family
from bmx.products import symmetric_product

log = logging.getLogger(__name__)

DEGENERACY_THRESHOLD = 1e-12
SYSTEM_CONDITION_LIMIT = 1e10

FAMILY_TRANSPOSES = {Family.mu: 0, Family.nu: 1, Family.omega: 2}
FAMILY_FACTORS = {Family.mu: Factor.U, Family.nu: Factor.V, Family.omega: Factor.W}

_GAUGE_STEPS = (0.5, -0.5, 0.5j, -0.5j, 1.0, -1.0, 1j, -1j, 2.0, -2.0)


def principal_root(value: complex, degree: int) -> complex:
    """Principal ``degree``-th root, branch cut on the negative real axis."""
    value = complex(value)
    if value == 0:
        return 0j
    return complex(np.power(value, 1 / degree))


def root_branches(value: complex, degree: int) -> list[complex]:
    """All ``degree``-th roots, the principal one first."""
    base = principal_root(value, degree)
    if base == 0:
        return [0j]
    return [base * np.exp(2j * np.pi * k / degree) for k in range(degree)]


class ScalingFamily(BaseModel):
    """Scaling values ``(s00, s01, s11)`` of a family and the gauge fixing them."""

    model_config = ConfigDict(frozen=True)

    family: Family
    values: tuple[complex, complex, complex]
    gauge: complex

    @property
    def squares(self) -> tuple[complex, complex, complex]:
        return tuple(v * v for v in self.values)

    @property
    def sixth_powers(self) -> tuple[complex, complex, complex]:
        return tuple(v**6 for v in self.values)

    def value(self, i: int, j: int) -> complex:
        s00, s01, s11 = self.values
        return (s00, s01, s11)[min(i, j) + max(i, j)]

    def scaling_hypermatrix(self) -> Hypermatrix3:
        """``D`` of the family with the slices displayed for ``D_mu``, ``D_nu``
        and ``D_omega``."""
        return self._build(lambda i, j, k: self._entry(i, j, k, None))

    def scaling_slice(self, r: int) -> Hypermatrix3:
        """The ``D^[r]`` hypermatrix entering the characteristic constraints."""
        if r not in (0, 1):
            raise ParameterError(f"Scaling slice index must be 0 or 1, got {r}")
        return self._build(lambda i, j, k: self._entry(i, j, k, r))

    def _entry(self, i: int, j: int, k: int, r: int | None) -> complex:
        match self.family:
            case Family.mu:
                support, pair = j == k, (i, j)
            case Family.nu:
                support, pair = i == k, (j, k)
            case Family.omega:
                support, pair = i == j, (i, k)
        if not support:
            return 0j
        return self.value(pair[0], pair[1] if r is None else r)

    @staticmethod
    def _build(entry) -> Hypermatrix3:
        data = np.zeros((2, 2, 2), dtype=complex)
        for index in np.ndindex(2, 2, 2):
            data[index] = entry(*index)
        return Hypermatrix3(data)


class FamilyInvariants(BaseModel):
    model_config = ConfigDict(frozen=True)

    P: complex
    Q: complex
    S: complex
    R: complex


def family_operand(a: Hypermatrix3, family: Family | str) -> Hypermatrix3:
    """The transpose of ``a`` whose symmetric product carries ``family``."""
    if a.shape != (2, 2, 2):
        raise ShapeError(f"Scaling families need a 2x2x2 hypermatrix, got {a.shape}")
    return transpose(a, FAMILY_TRANSPOSES[Family(family)])


def family_invariants(a: Hypermatrix3, family: Family | str) -> FamilyInvariants:
    s = symmetric_product(family_operand(a, family))
    return FamilyInvariants(P=s[0, 0, 0], Q=s[0, 0, 1], S=s[0, 1, 1], R=s[1, 1, 1])


def _check_degeneracy(
    a: Hypermatrix3, family: Family, inv: FamilyInvariants, threshold: float
) -> None:
    scale = threshold * a.max_abs() ** 9
    vanishing = [
        name for name, v in (("Q", inv.Q), ("S", inv.S)) if abs(v) ** 3 <= scale
    ]
    if vanishing:
        raise DegenerateFamilyError(
            f"The {family.value} family is degenerate: "
            f"{' and '.join(vanishing)} vanish",
            family=family.value,
            vanishing=vanishing,
        )


def characteristic_equations(
    inv: FamilyInvariants, sixth_powers: tuple[complex, complex, complex]
) -> tuple[complex, complex]:
    a6, b6, c6 = sixth_powers
    q3, s3 = inv.Q**3, inv.S**3
    return (
        (b6 - inv.R) * q3 - (a6 - inv.P) * s3,
        (c6 - inv.R) * q3 - (b6 - inv.P) * s3,
    )


def characteristic_residual(a: Hypermatrix3, family: ScalingFamily) -> float:
    """Largest of the family's two characteristic equations, relative to the
    size of their terms."""
    inv = family_invariants(a, family.family)
    equations = characteristic_equations(inv, family.sixth_powers)
    scale = max(abs(inv.Q) ** 3, abs(inv.S) ** 3) * max(
        1.0, *(abs(v) for v in (inv.P, inv.R, *family.sixth_powers))
    )
    return max(abs(e) for e in equations) / scale


def factor_matrix(squares: tuple[complex, complex, complex]) -> np.ndarray:
    """The 8x8 coefficient matrix of the factor-entry system."""
    x, y, z = squares
    m = np.zeros((8, 8), dtype=complex)
    rows = (
        (x**3, y**3),
        (x * x * y, y * y * z),
        (x * y * y, y * z * z),
        (y**3, z**3),
    )
    for block, (first, second) in enumerate(rows):
        r = 2 * block
        m[r, r : r + 2] = 1
        m[r + 1, r : r + 2] = first, second
    return m


def system_condition(squares: tuple[complex, complex, complex]) -> float:
    return float(np.linalg.cond(factor_matrix(squares)))


def _sixth_powers_for_gauge(
    inv: FamilyInvariants, t: complex
) -> tuple[complex, complex, complex]:
    ratio = inv.Q**3 / inv.S**3
    return inv.P + (t - inv.R) * ratio, t, inv.R + (t - inv.P) / ratio


def _family_from_gauge(
    family: Family, inv: FamilyInvariants, t: complex
) -> ScalingFamily:
    sixth = _sixth_powers_for_gauge(inv, t)
    values = tuple(principal_root(v, 6) for v in sixth)
    return ScalingFamily(family=family, values=values, gauge=t)


def default_gauge(inv: FamilyInvariants) -> complex:
    return (inv.P + inv.R) / 2


def char_gauge_solve(
    a: Hypermatrix3,
    family: Family | str,
    gauge: complex | None = None,
    threshold: float = DEGENERACY_THRESHOLD,
) -> ScalingFamily:
    """Solve the two characteristic equations of ``family`` with ``s01^6 = gauge``.

    An explicit gauge is used as given, even when it leaves the factor-entry
    system singular. Without one, ``(P + R) / 2`` is used unless it leaves
    the system singular, in which case a fixed sequence of nearby gauges is
    scanned. If every candidate is singular the default is kept.
    """
    family = Family(family)
    inv = family_invariants(a, family)
    _check_degeneracy(a, family, inv, threshold)
    if gauge is not None:
        return _family_from_gauge(family, inv, complex(gauge))

    t0 = default_gauge(inv)
    scale = max(abs(inv.P), abs(inv.R), 1.0)
    for step in (0, *_GAUGE_STEPS):
        candidate = _family_from_gauge(family, inv, t0 + step * scale)
        condition = system_condition(candidate.squares)
        if condition < SYSTEM_CONDITION_LIMIT:
            log.debug(
                "Gauge %s for the %s family (condition %.3g)",
                candidate.gauge,
                family.value,
                condition,
            )
            return candidate
    log.debug("No well-conditioned gauge for %s; keeping %s", family.value, t0)
    return _family_from_gauge(family, inv, t0)

"""Dense matrix and third-order hypermatrix containers with index operations.

Values are immutable: every container owns a read-only ``numpy`` array, and
every operation below returns a new container.
"""

import math
from collections.abc import Sequence
from enum import IntEnum
from numbers import Number
from typing import Any

import numpy as np

from bmx.errors import IndexOutOfRangeError, ParameterError, ShapeError

_ROTATION_NAMES = {
    "0": 0,
    "pi/2": 1,
    "pi": 2,
    "3pi/2": 3,
    "2pi/4": 1,
    "4pi/4": 2,
    "6pi/4": 3,
}

# plane of each slice family: rows A[i,:,:], columns A[:,j,:], depths A[:,:,k]
_SLICE_PLANES = ((1, 2), (0, 2), (0, 1))


class RotationAngle(IntEnum):
    """Quarter-turn count of an index rotation."""

    ZERO = 0
    HALF_PI = 1
    PI = 2
    THREE_HALVES_PI = 3

    @property
    def radians(self) -> float:
        return self.value * math.pi / 2

    @property
    def label(self) -> str:
        return ("0", "pi/2", "pi", "3pi/2")[self.value]

    @classmethod
    def parse(cls, value: "str | float | RotationAngle") -> "RotationAngle":
        """Accept ``0``, ``pi/2``, ``pi``, ``3pi/2`` (``π`` allowed) or radians."""
        if isinstance(value, RotationAngle):
            return value
        if isinstance(value, str):
            key = value.strip().lower().replace(" ", "").replace("π", "pi")
            if key in _ROTATION_NAMES:
                return cls(_ROTATION_NAMES[key])
            try:
                value = float(key)
            except ValueError as exc:
                raise ParameterError(f"Unknown rotation angle '{value}'") from exc
        quarter = float(value) / (math.pi / 2)
        turns = round(quarter)
        if abs(quarter - turns) > 1e-9:
            raise ParameterError(f"Rotation angle {value} is not a multiple of pi/2")
        return cls(turns % 4)


class _DenseArray:
    order: int = 0
    __slots__ = ("_data",)

    def __init__(self, data: Any):
        if isinstance(data, _DenseArray):
            data = data.array
        self._store(np.array(data, dtype=complex))

    def _store(self, array: np.ndarray) -> None:
        if array.ndim != self.order:
            raise ShapeError(
                f"{type(self).__name__} needs {self.order} axes, got {array.ndim}"
            )
        array.setflags(write=False)
        self._data = array

    def _wrap(self, array: np.ndarray):
        return type(self)(array)

    @property
    def array(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(n) for n in self._data.shape)

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def modulus(self) -> int | None:
        return None

    @property
    def entries(self) -> tuple:
        """Entries in row-major order."""
        return tuple(self._data.ravel().tolist())

    def __getitem__(self, index):
        if not isinstance(index, tuple):
            index = (index,)
        if len(index) > self.order:
            raise IndexOutOfRangeError(
                f"{len(index)} indices given for an order-{self.order} value"
            )
        for axis, (i, n) in enumerate(zip(index, self.shape)):
            if isinstance(i, slice):
                continue
            if isinstance(i, bool) or not isinstance(i, int | np.integer):
                raise TypeError(f"Index on axis {axis} must be an int or a slice")
            if not 0 <= i < n:
                raise IndexOutOfRangeError(
                    f"Index {i} out of range for axis {axis} of size {n}"
                )
        result = self._data[index]
        return result.item() if np.ndim(result) == 0 else result

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.modulus == other.modulus
            and bool(np.array_equal(self._data, other._data))
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.shape, self.modulus, self.entries))

    def _check_same_shape(self, other: "_DenseArray") -> None:
        if type(other) is not type(self) or other.shape != self.shape:
            raise ShapeError(
                f"Operands must share type and shape, got {self.shape} and "
                f"{getattr(other, 'shape', None)}"
            )

    def __add__(self, other: "_DenseArray"):
        self._check_same_shape(other)
        return self._wrap(self._data + other._data)

    def __sub__(self, other: "_DenseArray"):
        self._check_same_shape(other)
        return self._wrap(self._data - other._data)

    def __neg__(self):
        return self._wrap(-self._data)

    def __mul__(self, scalar: Number):
        if not isinstance(scalar, Number):
            return NotImplemented
        return self._wrap(self._data * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number):
        if not isinstance(scalar, Number):
            return NotImplemented
        return self._wrap(self._data / scalar)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._data))) if self._data.size else 0.0

    def allclose(self, other: "_DenseArray", tol: float = 1e-12) -> bool:
        self._check_same_shape(other)
        return (self - other).max_abs() <= tol

    def is_real(self) -> bool:
        return bool(np.all(np.imag(self._data) == 0))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape}, entries={self.entries})"


class Hypermatrix3(_DenseArray):
    order = 3
    __slots__ = ()

    @classmethod
    def zeros(cls, shape: Sequence[int]) -> "Hypermatrix3":
        return cls(np.zeros(tuple(shape), dtype=complex))

    @classmethod
    def from_slices(cls, slices: Sequence[Any]) -> "Hypermatrix3":
        """Build from depth slices ``A[:,:,0], A[:,:,1], ...``."""
        return cls(np.stack([np.asarray(s, dtype=complex) for s in slices], axis=2))

    @property
    def is_cubic(self) -> bool:
        n0, n1, n2 = self.shape
        return n0 == n1 == n2

    @property
    def side(self) -> int:
        if not self.is_cubic:
            raise ShapeError(f"Expected a cubic hypermatrix, got shape {self.shape}")
        return self.shape[0]


class Matrix(_DenseArray):
    """Dense complex matrix, or a matrix of residues when ``modulus`` is set."""

    order = 2
    __slots__ = ("_modulus",)

    def __init__(self, data: Any, modulus: int | None = None):
        if isinstance(data, _DenseArray):
            modulus = modulus if modulus is not None else data.modulus
            data = data.array
        self._modulus = modulus
        if modulus is None:
            self._store(np.array(data, dtype=complex))
            return
        if modulus < 2:
            raise ParameterError(f"Field modulus must be at least 2, got {modulus}")
        raw = np.array(data)
        if np.iscomplexobj(raw):
            if np.any(raw.imag != 0):
                raise ParameterError("Finite-field entries must be real integers")
            raw = raw.real
        if not np.all(raw == np.round(raw)):
            raise ParameterError("Finite-field entries must be integers")
        self._store(np.mod(np.round(raw).astype(np.int64), modulus))

    def _wrap(self, array: np.ndarray) -> "Matrix":
        return Matrix(array, modulus=self._modulus)

    @property
    def modulus(self) -> int | None:
        return self._modulus

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, shape: Sequence[int]) -> "Matrix":
        return cls(np.zeros(tuple(shape), dtype=complex))

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    @property
    def T(self) -> "Matrix":
        return self._wrap(self._data.T)


def delta(n: int) -> Hypermatrix3:
    """Kronecker delta hypermatrix: 1 where i = j = k."""
    if n < 1:
        raise ShapeError(f"Side length must be positive, got {n}")
    data = np.zeros((n, n, n), dtype=complex)
    idx = np.arange(n)
    data[idx, idx, idx] = 1
    return Hypermatrix3(data)


def elementary(shape: Sequence[int], index: Sequence[int]) -> Hypermatrix3:
    data = np.zeros(tuple(shape), dtype=complex)
    data[tuple(index)] = 1
    return Hypermatrix3(data)


def transpose(a: Hypermatrix3, times: int = 1) -> Hypermatrix3:
    """Cyclic transpose ``A^T[i,j,k] = A[k,i,j]`` applied ``times`` times."""
    data = a.array
    for _ in range(times % 3):
        data = np.transpose(data, (1, 2, 0))
    return Hypermatrix3(data)


def flip_q(n: int) -> Matrix:
    """Anti-identity ``Q`` with ones on the anti-diagonal."""
    if n < 1:
        raise ShapeError(f"Side length must be positive, got {n}")
    return Matrix(np.fliplr(np.eye(n)))


def rotate_matrix(m: Matrix, theta: RotationAngle | int) -> Matrix:
    if not m.is_square:
        raise ShapeError(f"Index rotation needs a square matrix, got {m.shape}")
    theta = RotationAngle(theta)
    q = flip_q(m.shape[0]).array
    a = m.array
    match theta:
        case RotationAngle.ZERO:
            rotated = a
        case RotationAngle.HALF_PI:
            rotated = a.T @ q
        case RotationAngle.PI:
            rotated = q @ a @ q
        case RotationAngle.THREE_HALVES_PI:
            rotated = q @ a.T
    return m._wrap(rotated)


def rotate_axes(data: np.ndarray, angles: Sequence[RotationAngle | int]) -> np.ndarray:
    """Rotate the first three axes of ``data`` about x, then y, then z."""
    for plane, angle in zip(_SLICE_PLANES, angles, strict=True):
        data = np.rot90(data, -int(angle), axes=plane)
    return data


def rotate_hyper(
    a: Hypermatrix3,
    theta_x: RotationAngle | int,
    theta_y: RotationAngle | int,
    theta_z: RotationAngle | int,
) -> Hypermatrix3:
    """Rotate row slices by ``theta_x``, column slices by ``theta_y``, then
    depth slices by ``theta_z``."""
    if not a.is_cubic:
        raise ShapeError(f"Index rotation needs a cubic hypermatrix, got {a.shape}")
    angles = [RotationAngle(t) for t in (theta_x, theta_y, theta_z)]
    return Hypermatrix3(rotate_axes(a.array, angles))


def hadamard_exp(h: Hypermatrix3, z: complex) -> Hypermatrix3:
    """Entrywise principal power; zero entries stay zero."""
    data = np.zeros(h.shape, dtype=complex)
    mask = h.array != 0
    data[mask] = np.power(h.array[mask], z)
    return Hypermatrix3(data)


def kron(a: Hypermatrix3, b: Hypermatrix3) -> Hypermatrix3:
    return Hypermatrix3(np.kron(a.array, b.array))


def block_diagonal(a: Hypermatrix3, b: Hypermatrix3) -> Hypermatrix3:
    """Place ``a`` then ``b`` on the diagonal of a zero hypermatrix."""
    shape = tuple(x + y for x, y in zip(a.shape, b.shape))
    data = np.zeros(shape, dtype=complex)
    n0, n1, n2 = a.shape
    data[:n0, :n1, :n2] = a.array
    data[n0:, n1:, n2:] = b.array
    return Hypermatrix3(data)


def dirsum(a: Hypermatrix3, b: Hypermatrix3) -> Hypermatrix3:
    for name, h in (("first", a), ("second", b)):
        if not h.is_cubic:
            raise ShapeError(f"Direct sum needs cubic operands; {name} is {h.shape}")
    return block_diagonal(a, b)

"""JSON documents for hypermatrices, matrices, map specifications and svd results.

A value document looks like::

    {"order": 3, "shape": [2, 2, 2], "entries": [[1.0, 0.0], ...]}

with entries in row-major order as ``[re, im]`` pairs. Floats are written
with the shortest representation that reads back to the same double, so a
parse/serialize round trip is exact.
"""

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from bmx.errors import DocumentError
from bmx.hypermatrix import Hypermatrix3, Matrix
from bmx.models import Family
from bmx.scaling import ScalingFamily
from bmx.svd import Svd3Result

Pair = tuple[int, int] | tuple[float, float]


class HypermatrixDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order: Literal[2, 3]
    shape: list[int]
    entries: list[Pair]
    modulus: int | None = None
    name: str | None = None
    seed: int | None = None
    block_size: int | None = None

    @model_validator(mode="after")
    def _consistent(self) -> "HypermatrixDocument":
        if len(self.shape) != self.order:
            raise ValueError(
                f"shape has {len(self.shape)} axes but order is {self.order}"
            )
        if any(n < 1 for n in self.shape):
            raise ValueError(f"shape {self.shape} has a non-positive axis")
        if len(self.entries) != math.prod(self.shape):
            raise ValueError(
                f"entries has {len(self.entries)} values, shape {self.shape} "
                f"needs {math.prod(self.shape)}"
            )
        if not all(math.isfinite(x) for pair in self.entries for x in pair):
            raise ValueError("entries must be finite numbers")
        if self.modulus is not None:
            if self.order != 2:
                raise ValueError("modulus is only allowed on matrices")
            if any(float(re) != int(re) or im != 0 for re, im in self.entries):
                raise ValueError("entries must be real integers when modulus is set")
        return self

    def to_value(self) -> Hypermatrix3 | Matrix:
        data = np.array([complex(re, im) for re, im in self.entries])
        data = data.reshape(self.shape)
        if self.order == 2:
            if self.modulus is not None:
                return Matrix(data.real.astype(np.int64), modulus=self.modulus)
            return Matrix(data)
        return Hypermatrix3(data)

    @classmethod
    def from_value(
        cls, value: Hypermatrix3 | Matrix, **metadata
    ) -> "HypermatrixDocument":
        if value.modulus is not None:
            entries = [(int(x), 0) for x in value.array.ravel()]
        else:
            entries = [
                (float(z.real), float(z.imag)) for z in value.array.ravel().tolist()
            ]
        return cls(
            order=value.order,
            shape=list(value.shape),
            entries=entries,
            modulus=value.modulus,
            **metadata,
        )


class MapDocument(BaseModel):
    """``a`` and ``b`` (matrices) or ``a``, ``b`` and ``c`` (hypermatrices)."""

    model_config = ConfigDict(extra="forbid")

    a: HypermatrixDocument
    b: HypermatrixDocument
    c: HypermatrixDocument | None = None
    reading: Literal["diagonal", "verbatim"] = "diagonal"


class FamilyDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["mu", "nu", "omega"]
    values: list[Pair]
    gauge: Pair


class SvdDocument(BaseModel):
    """Serialized decomposition, enough to recompute every reported residual."""

    model_config = ConfigDict(extra="forbid")

    u_tilde: HypermatrixDocument
    v_tilde: HypermatrixDocument
    w_tilde: HypermatrixDocument
    sigma: list[Pair]
    families: list[FamilyDocument]
    input_digest: str | None = None


class MatrixSvdDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u: HypermatrixDocument
    sigma: list[float]
    v: HypermatrixDocument
    route: str
    repeated: bool = False


class ParamsDocument(BaseModel):
    """Generator parameters as ``[re, im]`` pairs keyed by name."""

    model_config = ConfigDict(extra="forbid")

    values: dict[str, Pair]

    def to_kwargs(self) -> dict[str, complex | int]:
        kwargs = {name: from_pair(pair) for name, pair in self.values.items()}
        if "s" in kwargs:
            kwargs["s"] = int(kwargs["s"].real)
        return kwargs


class OrbitDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    field: int
    size: int
    cardinality: int | None = None
    matrices: list[list[list[int]]]


def _field_path(exc: ValidationError) -> str:
    error = exc.errors()[0]
    return ".".join(str(part) for part in error["loc"]) or "<document>"


def _load_json(text: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"Invalid JSON at line {exc.lineno}: {exc.msg}", line=exc.lineno
        ) from exc


def parse_model(text: str, model: type[BaseModel]) -> BaseModel:
    raw = _load_json(text)
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        field = _field_path(exc)
        message = exc.errors()[0]["msg"]
        raise DocumentError(f"Invalid field '{field}': {message}", field=field) from exc


def parse_document(text: str) -> Hypermatrix3 | Matrix:
    return parse_model(text, HypermatrixDocument).to_value()


def dump_model(doc: BaseModel) -> str:
    return json.dumps(doc.model_dump(exclude_none=True), indent=2) + "\n"


def serialize(value: Hypermatrix3 | Matrix, **metadata) -> str:
    return dump_model(HypermatrixDocument.from_value(value, **metadata))


def to_pair(z: complex) -> tuple[float, float]:
    z = complex(z)
    return (z.real, z.imag)


def from_pair(pair) -> complex:
    re, im = pair
    return complex(re, im)


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def read_document(path: Path) -> tuple[HypermatrixDocument, str]:
    """Read a value document; return it with the digest of the raw bytes."""
    raw = Path(path).read_bytes()
    return parse_model(raw.decode("utf-8"), HypermatrixDocument), digest(raw)


def read_value(path: Path) -> Hypermatrix3 | Matrix:
    doc, _ = read_document(path)
    return doc.to_value()


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and move it into place."""
    path = Path(path)
    with tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=f".{path.name}.", delete=False
    ) as handle:
        handle.write(text)
        temp = handle.name
    os.replace(temp, path)


def svd_to_document(r: Svd3Result, input_digest: str | None = None) -> SvdDocument:
    return SvdDocument(
        u_tilde=HypermatrixDocument.from_value(r.u_tilde),
        v_tilde=HypermatrixDocument.from_value(r.v_tilde),
        w_tilde=HypermatrixDocument.from_value(r.w_tilde),
        sigma=[to_pair(s) for s in r.sigma],
        families=[
            FamilyDocument(
                family=f.family.value,
                values=[to_pair(v) for v in f.values],
                gauge=to_pair(f.gauge),
            )
            for f in r.families
        ],
        input_digest=input_digest,
    )


def svd_from_document(doc: SvdDocument) -> Svd3Result:
    return Svd3Result(
        u_tilde=doc.u_tilde.to_value(),
        v_tilde=doc.v_tilde.to_value(),
        w_tilde=doc.w_tilde.to_value(),
        sigma=tuple(from_pair(p) for p in doc.sigma),
        families=tuple(
            ScalingFamily(
                family=Family(f.family),
                values=tuple(from_pair(v) for v in f.values),
                gauge=from_pair(f.gauge),
            )
            for f in doc.families
        ),
    )

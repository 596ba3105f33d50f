from pathlib import Path
from typing import Annotated

import numpy as np

from bmx.base_command import Command
from bmx.config import Settings
from bmx.documents import MapDocument, parse_model, read_value, serialize
from bmx.errors import ShapeError
from bmx.hypermatrix import Matrix
from bmx.maps import (
    DeltaReading,
    MapSpec2,
    MapSpec3,
    apply_map2,
    apply_map3,
    invertibility_check_2,
    map_branches,
    power_sum,
)
from bmx.models import CommandResult


def load_map(path: Path) -> MapSpec2 | MapSpec3:
    doc = parse_model(path.read_text(), MapDocument)
    if doc.c is None:
        return MapSpec2(a=doc.a.to_value(), b=doc.b.to_value())
    return MapSpec3(
        a=doc.a.to_value(),
        b=doc.b.to_value(),
        c=doc.c.to_value(),
        reading=DeltaReading(doc.reading),
    )


def _number(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.12g}"
    return f"{z:.12g}"


def _vector(value) -> np.ndarray:
    if not isinstance(value, Matrix) or 1 not in value.shape:
        raise ShapeError("Map input must be a single row or column matrix")
    return value.array.ravel()


class MapCommand(Command):
    name = "map"
    description = "Apply the vector map of a matrix pair or hypermatrix triple"

    def execute(
        self,
        settings: Settings,
        spec: Annotated[Path, "Map document with a, b and optionally c"],
        vector: Annotated[Path, "Vector as a one-column matrix document"],
        branches: Annotated[bool, "List every root branch per coordinate"] = False,
        invertibility: Annotated[bool, "Report the 2x2 resultant criterion"] = False,
    ) -> CommandResult:
        m = load_map(spec)
        x = _vector(read_value(vector))
        order = 2 if isinstance(m, MapSpec2) else 3
        y = apply_map2(m, x) if order == 2 else apply_map3(m, x)
        summary = [
            f"power sum of order {order}: input {_number(power_sum(x, order))}, "
            f"image {_number(power_sum(y, order))}"
        ]
        if branches:
            for k, roots in enumerate(map_branches(m, x)):
                listed = ", ".join(_number(r) for r in roots)
                summary.append(f"y[{k}] branches: {listed}")
        if invertibility:
            report = invertibility_check_2(m, y)
            for k, (ok, flat) in enumerate(
                zip(report.invertible, report.degenerate, strict=True)
            ):
                if flat:
                    state = "degenerate"
                else:
                    state = "invertible" if ok else "not invertible"
                summary.append(f"Q{k}: {state}, coefficients {report.coefficients[k]}")
        return CommandResult(
            output=serialize(Matrix(y.reshape(-1, 1))), summary=summary
        )

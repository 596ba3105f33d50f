from pathlib import Path
from typing import Annotated

import numpy as np

from bmx.base_command import Command
from bmx.config import Settings
from bmx.documents import OrbitDocument, dump_model, read_value
from bmx.errors import ShapeError
from bmx.hypermatrix import Matrix
from bmx.models import CommandResult, VerificationReport
from bmx.orbits import FiniteFieldSpec, enumerate_orbit, orbit_cardinality


def _is_invertible(m: Matrix, p: int) -> bool:
    if not m.is_square:
        return False
    return round(float(np.linalg.det(m.array.real))) % p != 0


class OrbitCommand(Command):
    name = "orbit"
    description = "Enumerate the tensorial orbit of a matrix over a small prime field"

    def execute(
        self,
        settings: Settings,
        source: Annotated[Path, "Integer matrix document"],
        field: Annotated[int, "Prime characteristic p"] = 2,
    ) -> CommandResult:
        value = read_value(source)
        if not isinstance(value, Matrix):
            raise ShapeError("Orbits are enumerated for matrices only")
        f = FiniteFieldSpec(p=field)
        m = Matrix(value, modulus=f.p)
        orbit = sorted(enumerate_orbit(m, f), key=lambda x: x.entries)
        cardinality = None
        reports = []
        if _is_invertible(m, f.p):
            cardinality = orbit_cardinality(f, m.shape[0])
            reports.append(
                VerificationReport.from_residuals(
                    "orbit-cardinality",
                    {"|orbit| - |GL_n|": float(abs(len(orbit) - cardinality))},
                    0.0,
                )
            )
        doc = OrbitDocument(
            field=f.p,
            size=len(orbit),
            cardinality=cardinality,
            matrices=[x.array.tolist() for x in orbit],
        )
        return CommandResult(
            output=dump_model(doc),
            summary=[f"orbit over F_{f.p} has {len(orbit)} elements"],
            reports=reports,
        )

from pathlib import Path
from typing import Annotated

from bmx.base_command import Command
from bmx.config import Settings
from bmx.documents import read_value, serialize
from bmx.errors import ParameterError
from bmx.hypermatrix import (
    Matrix,
    RotationAngle,
    rotate_hyper,
    rotate_matrix,
    transpose,
)
from bmx.models import CommandResult


class TransposeCommand(Command):
    name = "transpose"
    description = "Cyclic transpose of a hypermatrix, or transpose of a matrix"

    def execute(
        self,
        settings: Settings,
        source: Annotated[Path, "Value document"],
        times: Annotated[int, "How many times to apply the transpose"] = 1,
    ) -> CommandResult:
        value = read_value(source)
        if isinstance(value, Matrix):
            result = value.T if times % 2 else value
        else:
            result = transpose(value, times)
        return CommandResult(output=serialize(result))


class RotateCommand(Command):
    name = "rotate"
    description = "Quarter-turn index rotation (one angle, or three for x, y, z)"

    def execute(
        self,
        settings: Settings,
        source: Annotated[Path, "Value document"],
        angles: Annotated[list[str], "Angles such as 0, pi/2, pi, 3pi/2"],
    ) -> CommandResult:
        value = read_value(source)
        parsed = [RotationAngle.parse(a) for a in angles]
        expected = 1 if isinstance(value, Matrix) else 3
        if len(parsed) != expected:
            raise ParameterError(
                f"{type(value).__name__} rotation takes {expected} angle(s), "
                f"got {len(parsed)}"
            )
        if isinstance(value, Matrix):
            result = rotate_matrix(value, parsed[0])
        else:
            result = rotate_hyper(value, *parsed)
        return CommandResult(output=serialize(result))

from pathlib import Path
from typing import Annotated

from bmx.base_command import Command
from bmx.config import Settings
from bmx.documents import read_value, serialize
from bmx.errors import ShapeError
from bmx.hypermatrix import Hypermatrix3, Matrix, dirsum, kron
from bmx.models import CommandResult
from bmx.products import prod2, prod2_bg, prod3, prod3_bg


def _operands(paths: list[Path], kind: type, count: int, what: str) -> list:
    values = [read_value(path) for path in paths]
    if len(values) != count or not all(isinstance(v, kind) for v in values):
        raise ShapeError(
            f"{what} takes {count} {kind.__name__} documents, got "
            f"{[type(v).__name__ for v in values]}"
        )
    return values


class ProductCommand(Command):
    name = "product"
    description = "BM product of three hypermatrices, or the product of two matrices"

    def execute(
        self,
        settings: Settings,
        operands: Annotated[list[Path], "Documents for A, B and C (or A and B)"],
    ) -> CommandResult:
        if len(operands) == 2 and isinstance(read_value(operands[0]), Matrix):
            a, b = _operands(operands, Matrix, 2, "Matrix product")
            return CommandResult(output=serialize(prod2(a, b)))
        a, b, c = _operands(operands, Hypermatrix3, 3, "BM product")
        return CommandResult(output=serialize(prod3(a, b, c)))


class ProductBgCommand(Command):
    name = "product-bg"
    description = "General BM product with a background, given last"

    def execute(
        self,
        settings: Settings,
        operands: Annotated[list[Path], "A, B, C and background M (or A, B, M)"],
    ) -> CommandResult:
        if len(operands) == 3 and isinstance(read_value(operands[0]), Matrix):
            a, b, m = _operands(operands, Matrix, 3, "Matrix background product")
            return CommandResult(output=serialize(prod2_bg(a, b, m)))
        a, b, c, m = _operands(operands, Hypermatrix3, 4, "Background BM product")
        return CommandResult(output=serialize(prod3_bg(a, b, c, m)))


class KronCommand(Command):
    name = "kron"
    description = "Kronecker product of two hypermatrices"

    def execute(
        self,
        settings: Settings,
        first: Annotated[Path, "Left operand"],
        second: Annotated[Path, "Right operand"],
    ) -> CommandResult:
        a, b = _operands([first, second], Hypermatrix3, 2, "Kronecker product")
        return CommandResult(output=serialize(kron(a, b)))


class DirsumCommand(Command):
    name = "dirsum"
    description = "Direct sum of two cubic hypermatrices"

    def execute(
        self,
        settings: Settings,
        first: Annotated[Path, "Upper-left block"],
        second: Annotated[Path, "Lower-right block"],
    ) -> CommandResult:
        a, b = _operands([first, second], Hypermatrix3, 2, "Direct sum")
        return CommandResult(output=serialize(dirsum(a, b)))

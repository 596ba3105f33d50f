from enum import Enum
from pathlib import Path
from typing import Annotated

from bmx.base_command import Command
from bmx.blocks import (
    BlockHypermatrix,
    BlockMatrix,
    block_orthogonality_residual,
    block_unitary_check,
    rotate_b,
    rotate_b_hyper,
    rotate_e,
    rotate_e_hyper,
    top_b,
    top_b_hyper,
    top_e,
    top_e_hyper,
)
from bmx.config import Settings
from bmx.documents import read_document, serialize
from bmx.errors import ParameterError
from bmx.hypermatrix import Matrix, RotationAngle
from bmx.models import CommandResult, VerificationReport


class BlockOp(Enum):
    tb = "tb"
    te = "te"
    rb = "rb"
    re = "re"
    check = "check"


def _angles(angles: list[str] | None, count: int) -> list[RotationAngle]:
    parsed = [RotationAngle.parse(a) for a in angles or []]
    if len(parsed) != count:
        raise ParameterError(
            f"Block rotation takes {count} angle(s), got {len(parsed)}"
        )
    return parsed


class BlockCommand(Command):
    name = "block"
    description = "Block transposes, rotations and block orthogonality checks"

    def execute(
        self,
        settings: Settings,
        source: Annotated[Path, "Block matrix or block hypermatrix document"],
        op: Annotated[BlockOp, "Operation to apply"] = BlockOp.check,
        block_size: Annotated[int | None, "Block size, if not in the document"] = None,
        times: Annotated[int, "Transpose power for block hypermatrices"] = 1,
        angle: Annotated[list[str] | None, "Rotation angle(s) for rb and re"] = None,
        raw: Annotated[bool, "Skip the 1/sqrt(n) scaling in checks"] = False,
    ) -> CommandResult:
        doc, input_digest = read_document(source)
        size = block_size or doc.block_size
        if size is None:
            raise ParameterError("Block operations need --block-size")
        value = doc.to_value()
        if isinstance(value, Matrix):
            bm = BlockMatrix.from_matrix(value, size)
            match op:
                case BlockOp.check:
                    result = block_unitary_check(bm, settings.tol, normalized=not raw)
                    report = VerificationReport.from_residuals(
                        "block-unitary",
                        {str(source): result.residual},
                        settings.tol,
                        input_digest=input_digest,
                    )
                    return CommandResult(reports=[report])
                case BlockOp.tb:
                    bm = top_b(bm)
                case BlockOp.te:
                    bm = top_e(bm)
                case BlockOp.rb:
                    bm = rotate_b(bm, *_angles(angle, 1))
                case BlockOp.re:
                    bm = rotate_e(bm, *_angles(angle, 1))
            return CommandResult(output=serialize(bm.to_matrix(), block_size=size))

        bh = BlockHypermatrix.from_hypermatrix(value, size)
        match op:
            case BlockOp.check:
                report = block_orthogonality_residual(bh, settings.tol)
                report = report.model_copy(update={"input_digest": input_digest})
                return CommandResult(reports=[report])
            case BlockOp.tb:
                bh = top_b_hyper(bh, times)
            case BlockOp.te:
                bh = top_e_hyper(bh, times)
            case BlockOp.rb:
                bh = rotate_b_hyper(bh, *_angles(angle, 3))
            case BlockOp.re:
                bh = rotate_e_hyper(bh, *_angles(angle, 3))
        return CommandResult(output=serialize(bh.flatten(), block_size=size))

import logging
from enum import Enum
from pathlib import Path
from typing import Annotated

from bmx.base_command import Command
from bmx.blocks import (
    BlockHypermatrix,
    BlockMatrix,
    block_orthogonality_residual,
    block_unitary_check,
)
from bmx.config import Settings
from bmx.documents import (
    SvdDocument,
    digest,
    parse_model,
    read_document,
    svd_from_document,
)
from bmx.errors import ParameterError, ShapeError
from bmx.hypermatrix import Hypermatrix3, Matrix
from bmx.models import CheckResult, CommandResult, VerificationReport
from bmx.orthogonal import rotated_orthogonality_residual, verify_rotation_invariance
from bmx.products import is_orthogonal, is_scaling, is_uncorrelated
from bmx.scaling import characteristic_residual
from bmx.svd import reconstruct, relative_error, spectral_residual

log = logging.getLogger(__name__)


class Check(Enum):
    orthogonal = "orthogonal"
    uncorrelated = "uncorrelated"
    scaling = "scaling"
    block = "block"
    fixed_point = "fixed-point"
    rotation = "rotation"


def _from_check(
    name: str, result: CheckResult, source: str, input_digest: str
) -> VerificationReport:
    return VerificationReport.from_residuals(
        name,
        {source: result.residual},
        result.tolerance,
        input_digest=input_digest,
    )


def _hypermatrix(value, source: Path) -> Hypermatrix3:
    if not isinstance(value, Hypermatrix3):
        raise ShapeError(f"{source} must hold a hypermatrix")
    return value


class VerifyCommand(Command):
    name = "verify"
    description = "Check orthogonality, uncorrelation, scaling, block or svd claims"

    def execute(
        self,
        settings: Settings,
        check: Annotated[Check, "Which property to verify"],
        inputs: Annotated[list[Path], "Documents to check"],
        block_size: Annotated[int | None, "Block size for block checks"] = None,
        raw: Annotated[bool, "Skip the 1/sqrt(n) scaling of block matrices"] = False,
    ) -> CommandResult:
        tol = settings.tol
        match check:
            case Check.uncorrelated:
                reports = [self._uncorrelated(inputs, tol)]
            case Check.fixed_point:
                reports = [self._fixed_point(inputs, settings)]
            case _:
                reports = [
                    self._single(check, path, tol, block_size, raw) for path in inputs
                ]
        return CommandResult(reports=reports)

    def _single(
        self, check: Check, path: Path, tol: float, block_size: int | None, raw: bool
    ) -> VerificationReport:
        doc, input_digest = read_document(path)
        value = doc.to_value()
        source = str(path)
        match check:
            case Check.orthogonal if isinstance(value, Matrix):
                residual = rotated_orthogonality_residual(value)["0"]
                result = CheckResult(
                    passed=residual <= tol, residual=residual, tolerance=tol
                )
                return _from_check("orthogonal", result, source, input_digest)
            case Check.orthogonal:
                result = is_orthogonal(value, tol)
                return _from_check("orthogonal", result, source, input_digest)
            case Check.scaling:
                result = is_scaling(_hypermatrix(value, path), tol)
                report = _from_check("scaling", result, source, input_digest)
                report.notes.append(f"matched {list(result.matched)}")
                return report
            case Check.rotation:
                report = verify_rotation_invariance(_hypermatrix(value, path), tol)
                return report.model_copy(update={"input_digest": input_digest})
            case Check.block:
                size = block_size or doc.block_size
                if size is None:
                    raise ParameterError("Block checks need --block-size")
                if isinstance(value, Matrix):
                    bm = BlockMatrix.from_matrix(value, size)
                    result = block_unitary_check(bm, tol, normalized=not raw)
                    return _from_check("block-unitary", result, source, input_digest)
                bh = BlockHypermatrix.from_hypermatrix(value, size)
                report = block_orthogonality_residual(bh, tol)
                return report.model_copy(update={"input_digest": input_digest})
        raise ParameterError(f"Check {check.value} does not take a single input")

    def _uncorrelated(self, inputs: list[Path], tol: float) -> VerificationReport:
        if len(inputs) != 3:
            raise ParameterError(f"uncorrelated takes 3 inputs, got {len(inputs)}")
        docs = [read_document(path) for path in inputs]
        a, b, c = (
            _hypermatrix(d.to_value(), p)
            for (d, _), p in zip(docs, inputs, strict=True)
        )
        result = is_uncorrelated(a, b, c, tol)
        joined = digest("".join(h for _, h in docs).encode())
        return _from_check("uncorrelated", result, "Prod(A, B, C)", joined)

    def _fixed_point(
        self, inputs: list[Path], settings: Settings
    ) -> VerificationReport:
        """Recompute the residuals of a serialized svd against its input."""
        if len(inputs) != 2:
            raise ParameterError("fixed-point takes an svd document and its input")
        svd_path, source = inputs
        doc, input_digest = read_document(source)
        a = _hypermatrix(doc.to_value(), source)
        svd_doc = parse_model(svd_path.read_text(), SvdDocument)
        if svd_doc.input_digest not in (None, input_digest):
            log.warning("%s was computed from a different input", svd_path)
        r = svd_from_document(svd_doc)
        residuals = {
            f"characteristic {f.family.value}": characteristic_residual(a, f)
            for f in r.families
        }
        tolerances = {name: settings.characteristic_tol for name in residuals}
        residuals["spectral"] = spectral_residual(a, r.u_tilde, r.v_tilde, r.w_tilde)
        tolerances["spectral"] = settings.spectral_tol
        residuals["reconstruction"] = relative_error(a, reconstruct(r))
        tolerances["reconstruction"] = settings.reconstruction_tol
        return VerificationReport(
            check="fixed-point",
            residuals=residuals,
            tolerances=tolerances,
            input_digest=input_digest,
        )

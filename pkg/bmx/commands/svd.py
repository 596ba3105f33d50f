from pathlib import Path
from typing import Annotated

import numpy as np

from bmx.base_command import Command
from bmx.config import Settings
from bmx.documents import (
    HypermatrixDocument,
    MatrixSvdDocument,
    dump_model,
    read_document,
    svd_to_document,
)
from bmx.hypermatrix import Matrix
from bmx.matrix_svd import matrix_svd_sym
from bmx.models import CommandResult, VerificationReport
from bmx.svd import SvdOptions, relative_error, svd3


def svd_report(r, settings: Settings, digest: str | None = None) -> VerificationReport:
    """Characteristic, spectral and reconstruction residuals against their
    configured tolerances."""
    return VerificationReport(
        check="svd",
        residuals={
            "characteristic": r.characteristic_residual,
            "spectral": r.spectral_residual,
            "reconstruction": r.reconstruction_residual,
        },
        tolerances={
            "characteristic": settings.characteristic_tol,
            "spectral": settings.spectral_tol,
            "reconstruction": settings.reconstruction_tol,
        },
        notes=list(r.notes),
        input_digest=digest,
    )


class SvdCommand(Command):
    name = "svd"
    description = "Symmetrization SVD of a 2x2x2 hypermatrix or a real square matrix"

    def execute(
        self,
        settings: Settings,
        source: Annotated[Path, "Value document"],
        refine: Annotated[int, "Fixed-point refinement sweeps after solving"] = 0,
    ) -> CommandResult:
        doc, digest = read_document(source)
        value = doc.to_value()
        if isinstance(value, Matrix):
            return self._matrix_svd(value, settings, digest)
        options = SvdOptions(
            gauge=settings.gauge, tol=settings.tol, refine_iterations=refine
        )
        result = svd3(value, options)
        return CommandResult(
            output=dump_model(svd_to_document(result, digest)),
            summary=[
                f"sigma support {result.sigma_support} of 8",
                f"sigma system condition {result.sigma_condition:.3g}",
            ],
            reports=[svd_report(result, settings, digest)],
        )

    def _matrix_svd(
        self, value: Matrix, settings: Settings, digest: str
    ) -> CommandResult:
        result = matrix_svd_sym(value)
        u, v = result.u.array, result.v.array
        identity = np.eye(u.shape[0])
        residuals = {
            "u-orthogonality": float(np.max(np.abs(u @ u.T - identity))),
            "v-orthogonality": float(np.max(np.abs(v.T @ v - identity))),
            "reconstruction": relative_error(value, result.reconstruct()),
        }
        doc = MatrixSvdDocument(
            u=HypermatrixDocument.from_value(result.u),
            sigma=list(result.sigma),
            v=HypermatrixDocument.from_value(result.v),
            route=result.route,
            repeated=result.repeated,
        )
        report = VerificationReport.from_residuals(
            "matrix-svd", residuals, settings.spectral_tol, input_digest=digest
        )
        return CommandResult(output=dump_model(doc), reports=[report])

from enum import Enum
from pathlib import Path
from typing import Annotated

import numpy as np

from bmx.base_command import Command
from bmx.config import Settings
from bmx.documents import ParamsDocument, parse_model, serialize
from bmx.models import CommandResult, VerificationReport
from bmx.orthogonal import (
    OrthoParamHyper,
    OrthoParamMatrix,
    gen_ortho_hyper,
    gen_ortho_matrix,
    orthogonality_constraints,
    rotated_orthogonality_residual,
    sample_ortho_hyper_params,
    sample_ortho_matrix_params,
)
from bmx.products import is_orthogonal


class Kind(Enum):
    hyper = "hyper"
    matrix = "matrix"


class GenOrthogonalCommand(Command):
    name = "gen-orthogonal"
    description = "Generate an orthogonal 2x2x2 hypermatrix or 2x2 matrix"

    def execute(
        self,
        settings: Settings,
        kind: Annotated[Kind, "What to generate"] = Kind.hyper,
        params: Annotated[Path | None, "Parameter document; random if absent"] = None,
    ) -> CommandResult:
        values = parse_model(params.read_text(), ParamsDocument) if params else None
        rng = np.random.default_rng(settings.seed)
        if kind is Kind.matrix:
            p = (
                OrthoParamMatrix(**values.to_kwargs())
                if values
                else sample_ortho_matrix_params(rng)
            )
            x = gen_ortho_matrix(p)
            residuals = {"X X^T = I": rotated_orthogonality_residual(x)["0"]}
        else:
            p = (
                OrthoParamHyper(**values.to_kwargs())
                if values
                else sample_ortho_hyper_params(rng)
            )
            x = gen_ortho_hyper(p)
            residuals = {"Prod(X, X^T2, X^T) = Delta": is_orthogonal(x).residual}
            residuals.update(
                {
                    f"constraint {i}": abs(c)
                    for i, c in enumerate(orthogonality_constraints(x))
                }
            )
        report = VerificationReport.from_residuals(
            "gen-orthogonal", residuals, settings.tol
        )
        seed = settings.seed if values is None else None
        return CommandResult(output=serialize(x, seed=seed), reports=[report])

import os
from pathlib import Path

from pydantic import BaseModel, Field

DEFAULT_TOL = 1e-9
TOL_ENV_VAR = "BMX_TOL"


class Settings(BaseModel):
    """Run-wide options shared by every subcommand."""

    tol: float = Field(default=DEFAULT_TOL, gt=0)
    gauge: complex | None = None
    seed: int | None = None
    report: Path | None = None
    output: Path | None = None
    verbosity: int = 0
    characteristic_tol: float = Field(default=1e-9, gt=0)
    spectral_tol: float = Field(default=1e-8, gt=0)
    reconstruction_tol: float = Field(default=1e-6, gt=0)

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        values = {}
        tol = os.getenv(TOL_ENV_VAR)
        if tol is not None:
            values["tol"] = tol
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

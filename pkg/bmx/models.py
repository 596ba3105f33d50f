from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from bmx import __version__


class Family(Enum):
    mu = "mu"
    nu = "nu"
    omega = "omega"


class Factor(Enum):
    U = "U"
    V = "V"
    W = "W"


class SlotPosition(Enum):
    first = "first"
    middle = "middle"
    third = "third"


class CheckResult(BaseModel):
    """Outcome of a single predicate together with the residual it measured."""

    model_config = ConfigDict(frozen=True)

    passed: bool
    residual: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.passed


class ScalingCheck(CheckResult):
    matched: tuple[str, ...] = ()


class Failure(BaseModel):
    name: str
    residual: float
    tolerance: float


class VerificationReport(BaseModel):
    check: str
    residuals: dict[str, float]
    tolerances: dict[str, float]
    passed: bool = True
    failures: list[Failure] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)
    tool_version: str = __version__
    input_digest: str | None = None

    @model_validator(mode="after")
    def _derive_failures(self) -> "VerificationReport":
        missing = set(self.residuals) - set(self.tolerances)
        if missing:
            raise ValueError(f"No tolerance given for residuals {sorted(missing)}")
        self.failures = [
            Failure(name=name, residual=value, tolerance=self.tolerances[name])
            for name, value in self.residuals.items()
            if not value <= self.tolerances[name]
        ]
        self.passed = not self.failures
        return self

    @classmethod
    def from_residuals(
        cls, check: str, residuals: dict[str, float], tolerance: float, **kwargs
    ) -> "VerificationReport":
        return cls(
            check=check,
            residuals=residuals,
            tolerances={name: tolerance for name in residuals},
            **kwargs,
        )


class CommandResult(BaseModel):
    """What a subcommand hands back to the runner."""

    output: str | None = None
    summary: list[str] = Field(default_factory=list)
    reports: list[VerificationReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

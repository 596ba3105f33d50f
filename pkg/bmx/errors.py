class BmxError(Exception):
    pass


class ShapeError(BmxError, ValueError):
    def __init__(self, message: str, axis: int | None = None):
        super().__init__(message)
        self.axis = axis


class IndexOutOfRangeError(BmxError, IndexError):
    pass


class DegenerateFamilyError(BmxError):
    def __init__(self, message: str, family: str, vanishing: list[str]):
        super().__init__(message)
        self.family = family
        self.vanishing = vanishing


class SingularSystemError(BmxError):
    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class SingularFiberError(BmxError):
    def __init__(self, message: str, fiber: tuple[int, int], condition: float):
        super().__init__(message)
        self.fiber = fiber
        self.condition = condition


class NoBranchError(BmxError):
    pass


class CompositionError(BmxError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ParameterError(BmxError, ValueError):
    pass


class EnumerationGuardError(BmxError):
    pass


class NonOrthogonalBlockError(BmxError):
    def __init__(self, message: str, blocks: list[tuple[int, int, int]]):
        super().__init__(message)
        self.blocks = blocks


class DocumentError(BmxError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line


class CommandNotFoundError(BmxError):
    pass

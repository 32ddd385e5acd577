class FloerdError(Exception):
    """Base class; the CLI maps these to exit code 1."""


class InvalidComplexError(FloerdError):
    def __init__(self, check: str, detail: str):
        super().__init__(f"{check}: {detail}")
        self.check = check
        self.detail = detail


class PreconditionError(FloerdError, ValueError):
    pass


class WindowTooSmallError(FloerdError):
    pass


class SizeGuardError(FloerdError):
    def __init__(self, projected: int, limit: int, what: str = "complex"):
        super().__init__(
            f"{what} would have {projected} generators (limit {limit}); "
            "pass an explicit override to materialize it anyway"
        )
        self.projected = projected
        self.limit = limit


class BudgetExceededError(FloerdError):
    pass


class KnotExprError(FloerdError, ValueError):
    def __init__(self, message: str, text: str, pos: int):
        pointer = " " * pos + "^"
        super().__init__(f"{message} at position {pos}\n  {text}\n  {pointer}")
        self.message = message
        self.pos = pos

from typing import Optional, Tuple


class EntrographError(Exception):
    """Base error; `exit_code` is what the CLI returns when it escapes a command."""

    exit_code = 1

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class InvalidInputError(EntrographError):
    exit_code = 4


class HorizonMismatchError(InvalidInputError):
    pass


class LevelOutOfRangeError(InvalidInputError):
    def __init__(self, k: int, k_min: int, k_max: int):
        self.k = k
        super().__init__(f"level {k} outside [{k_min}, {k_max}]")


class NonInvertibleError(InvalidInputError):
    def __init__(self, system: str, operation: str):
        super().__init__(f"{operation} needs an inverse, '{system}' has none")


class ExpressionError(InvalidInputError):
    def __init__(self, source: str, position: Optional[Tuple[int, int]], message: str):
        self.source = source
        self.position = position
        super().__init__(message)

    def render(self) -> str:
        lines = [f"{self.message}:", f"  {self.source}"]
        if self.position:
            start, end = self.position
            lines.append("  " + " " * start + "^" * max(end - start, 1))
        return "\n".join(lines)


class UnknownSystemError(EntrographError):
    exit_code = 3


class UnknownSelectorError(EntrographError):
    exit_code = 3


class FamilyValidationError(EntrographError):
    exit_code = 5


class IntegrationError(EntrographError):
    exit_code = 1

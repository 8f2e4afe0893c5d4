from typing import Any, Dict, Optional

class ShiftSieveError(Exception):
    """Base error; mirrors a status code plus detail message, mapped to a process exit code."""
    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __json__(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_code": self.exit_code
        }

class ConfigError(ShiftSieveError):
    exit_code = 2

class ArgumentError(ShiftSieveError):
    exit_code = 2

class FormatError(ShiftSieveError):
    exit_code = 2

class ParseError(ShiftSieveError):
    exit_code = 2

    def __init__(self, detail: str, line_number: int):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number

class RangeError(ShiftSieveError):
    exit_code = 3

class CapacityError(ShiftSieveError):
    exit_code = 3

class DomainError(ShiftSieveError):
    exit_code = 3

class ConsistencyError(ShiftSieveError):
    exit_code = 4

class SingularityError(ShiftSieveError):
    exit_code = 4

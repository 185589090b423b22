"""
Errors - Failure types that callers and the CLI tell apart
Budget and precision failures map to exit code 2, input errors to exit code 1
"""


class SnfDistError(Exception):
    """Base class for snfdist failures that are not plain validation errors"""


class BudgetExceededError(SnfDistError):
    """An enumeration would exceed its configured budget"""

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what} needs {size} items, budget is {budget}")


class PrecisionError(SnfDistError):
    """A certified computation cannot reach the requested tolerance"""


class InputFormatError(ValueError):
    """Malformed input document, with the position of the problem"""

    def __init__(self, message: str, line: int = None, column: int = None, source: str = None):
        self.line = line
        self.column = column
        self.source = source
        where = []
        if source:
            where.append(source)
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ''
        super().__init__(f"{prefix}{message}")

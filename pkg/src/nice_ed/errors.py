"""Exception hierarchy shared by all pipeline stages."""


class NiceError(Exception):
    """Base class for every error raised by this package."""

    module = "nice"

    def __str__(self):
        return f"[{self.module}] {super().__str__()}"


class IngestionError(NiceError):
    """A graph input file contains a malformed line."""

    module = "linkgraph"

    def __init__(self, message, line_no=None, path=None):
        self.line_no = line_no
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_no is not None:
            where += f"line {line_no}: "
        elif where:
            where += " "
        super().__init__(where + message)


class GraphValidationError(NiceError):
    module = "linkgraph"


class ContractViolation(NiceError, ValueError):
    """A caller broke a precondition (empty list, non-finite score...)."""


class ConfigurationError(NiceError, ValueError):
    module = "config"


class DataValidationError(NiceError, ValueError):
    module = "data"


class SchemaError(DataValidationError):
    """Dataset or predictions file does not match the expected layout."""

    module = "eval"

    def __init__(self, message, line_no=None, field=None):
        self.line_no = line_no
        self.field = field
        parts = []
        if line_no is not None:
            parts.append(f"line {line_no}")
        if field is not None:
            parts.append(f"field '{field}'")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)

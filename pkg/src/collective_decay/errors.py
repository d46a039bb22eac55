"""Exception hierarchy shared by the solvers and the command line."""


class ValidationError(ValueError):
    """Bad user input: parameters, configuration, indices."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NumericalError(RuntimeError):
    """A numerical method failed or produced an untrustworthy result."""


class NonUniqueSteadyState(NumericalError):
    pass


class CapacityError(ValidationError):
    """Problem size exceeds what a dense/exact method can hold."""

"""Exception types raised by the package."""


class DimensionError(ValueError):
    """Vector or matrix shapes do not agree."""


class ProjectionError(ArithmeticError):
    """An iterative projection failed to reach its tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


class DescentViolation(RuntimeError):
    """The dual objective increased beyond tolerance during a sweep."""

    def __init__(self, sweep, d_before, d_after, bound):
        super().__init__(
            f"descent violated at sweep {sweep}: d went {d_before!r} -> {d_after!r}, "
            f"allowed change {bound!r}; gamma underestimated or projection inaccurate"
        )
        self.sweep = sweep
        self.d_before = d_before
        self.d_after = d_after
        self.bound = bound


class InfeasibleError(ValueError):
    """The polyhedral constraints admit no point."""


class ProblemFileError(ValueError):
    """A problem file could not be turned into an instance."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line

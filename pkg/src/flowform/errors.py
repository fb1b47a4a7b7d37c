"""Exception hierarchy shared by the planner, the CLI and the verifier."""


class FlowformError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FlowformError, ValueError):
    """Input that cannot be planned: bad geometry, colliding endpoints, etc."""


class InfeasibleError(FlowformError):
    """Raised when fewer than N vertex-disjoint paths exist."""

    def __init__(self, value: int, required: int):
        self.value = value
        self.required = required
        super().__init__(
            f"infeasible: max flow {value} < {required}; "
            "consider a larger padding or a smaller cell size"
        )


class SolverError(FlowformError, RuntimeError):
    """Internal solver contract violation (negative cycle, broken decomposition)."""


class NegativeCycleError(SolverError):
    def __init__(self) -> None:
        super().__init__("negative cycle")

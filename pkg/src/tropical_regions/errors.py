"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed or out-of-contract input (bad shapes, ranges, file fields)."""


class EnumerationCapExceeded(RuntimeError):
    """Exhaustive enumeration would exceed the configured candidate cap.

    Raised instead of silently grinding; the randomized sampler handles
    instances of this size.
    """

    def __init__(self, candidates: int, cap: int):
        self.candidates = candidates
        self.cap = cap
        super().__init__(
            f"{candidates} candidate configurations exceed the cap of {cap}; "
            "use the randomized sampler instead"
        )


class SolverError(RuntimeError):
    """The LP engine failed numerically; carries the offending problem context."""


class UnboundedSampleSizeError(RuntimeError):
    """A sample-size calculator hit a zero angle estimate: no finite K works."""

    def __init__(self, vertex_indices):
        self.vertex_indices = list(vertex_indices)
        super().__init__(
            "zero estimated solid angle for vertex indices "
            f"{self.vertex_indices}: required sample size is unbounded "
            "(increase the estimation sample count)"
        )

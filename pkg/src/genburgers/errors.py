"""Exception hierarchy shared by the solver modules."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConfigurationError(ValueError):
    """A configuration is inconsistent or cannot resolve the requested problem."""


class PreconditionError(ValueError):
    """An operator was applied to input outside its admissible set."""


class SolverError(RuntimeError):
    """Base class for failures raised while iterating a solver."""

    def __init__(self, message, residual_history=(), patch_index=None):
        super().__init__(message)
        self.residual_history = list(residual_history)
        self.patch_index = patch_index

    def __str__(self):
        msg = super().__str__()
        if self.patch_index is not None:
            msg = f"patch {self.patch_index}: {msg}"
        return msg


class ConvergenceError(SolverError):
    """Picard iteration hit ``max_iterations`` before reaching tolerance."""


class CertificationError(SolverError):
    """Consecutive Picard updates failed to contract at the certified rate."""

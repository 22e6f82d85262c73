"""Exception types shared across the package."""


class ResolventLabError(Exception):
    """Base class for package errors."""

class ConfigurationError(ResolventLabError):
    """Invalid specification, grid, or experiment configuration."""

class IntegrationError(ResolventLabError):
    """Hamiltonian-flow integration failed (step underflow or drift)."""

class SolverError(ResolventLabError):
    """Linear solve failed (singular pivot)."""

class FilterDegreeError(ResolventLabError):
    """Chebyshev degree insufficient for the requested filter accuracy."""

    def __init__(self, message, required_degree=None):
        super().__init__(message)
        self.required_degree = required_degree

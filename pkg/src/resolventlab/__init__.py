"""Numerical laboratory for truncated-resolvent norms of 1D semiclassical
Schrodinger operators P = -h^2 d^2/dx^2 + V(x): trapping classification of
the classical flow, resolvent-norm scaling in h across the energy window,
and coherent-state time-domain certificates."""

__version__ = "0.1.0"

from . import classical, ehrenfest, kernels, potentials, quantum, resolvent, scaling

__all__ = ["classical", "ehrenfest", "kernels", "potentials", "quantum",
           "resolvent", "scaling", "__version__"]

"""Exception hierarchy shared by all modules.

InputError maps to CLI exit code 1, NumericalError to exit code 2.
"""


class InputError(ValueError):
    """Malformed or out-of-domain input (bad grid, duplicate points, t <= 0, ...)."""


class SizeError(InputError):
    """A combinatorial or dimensional guard tripped (e.g. too many subsets)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (quadrature non-convergence, solver breakdown,
    NaN/inf encountered where a finite value is required)."""

"""Dimension dispatch for the hyperbolic heat kernel."""

from .even_kernel import DEFAULT_QUADRATURE, eval_kernel_even
from .odd_kernel import eval_kernel_odd


def eval_kernel(n, t, r, quad=None):
    """K_n(t, r) on the unit hyperbolic space (n = 1 is the Euclidean line)."""
    if n % 2:
        return eval_kernel_odd(n, t, r)
    return eval_kernel_even(n, t, r, quad or DEFAULT_QUADRATURE)

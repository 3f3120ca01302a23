"""Heat kernels of hyperbolic space and Li-Yau type gradient estimates."""

from .errors import AccuracyError, DomainError
from .even_kernel import QuadratureSpec, eval_alpha_even, eval_kernel_even
from .kernel import eval_kernel
from .odd_kernel import KernelEval, RadialPoint, eval_alpha_odd, eval_kernel_odd
from .multiplier import MultiplierTriple, check_triple, ly_bound, ly_expression, sup_scan

__all__ = [
    "AccuracyError",
    "DomainError",
    "KernelEval",
    "MultiplierTriple",
    "QuadratureSpec",
    "RadialPoint",
    "check_triple",
    "eval_alpha_even",
    "eval_alpha_odd",
    "eval_kernel",
    "eval_kernel_even",
    "eval_kernel_odd",
    "ly_bound",
    "ly_expression",
    "sup_scan",
]

__version__ = "0.1.0"

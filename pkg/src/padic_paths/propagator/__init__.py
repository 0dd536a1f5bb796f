"""p-adic analysis, Gauss integrals, quadratic actions and their kernels."""

from .errors import PropagatorError
from .padic_core import ExactCircle, Place

__all__ = ["ExactCircle", "Place", "PropagatorError"]

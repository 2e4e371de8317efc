"""Singular values of products of complex Ginibre matrices.

Finite-N and limiting correlation kernels of the log-spectrum determinantal
process, Fredholm-determinant distributions of the largest exponent, and
Monte Carlo machinery for the Gaussian / critical / Tracy-Widom crossover.
"""

__version__ = "0.1.0"

from . import contours, ensemble, fredholm, kernels, specfun

__all__ = ["contours", "ensemble", "fredholm", "kernels", "specfun", "__version__"]

"""Advection coefficient ``h(x) = (1 + x^2)^(-alpha)`` and its sup-norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Coefficient:
    alpha: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be positive and finite, got {self.alpha!r}")


def h(c: Coefficient, x):
    """Evaluate ``(1 + x^2)^(-alpha)``; scalar in, scalar out."""
    x = np.asarray(x, dtype=float)
    out = np.power(1.0 + x * x, -c.alpha)
    return out[()] if out.ndim == 0 else out


def dh(c: Coefficient, x):
    """Derivative ``-2 alpha x (1 + x^2)^(-alpha-1)``."""
    x = np.asarray(x, dtype=float)
    out = -2.0 * c.alpha * x * np.power(1.0 + x * x, -c.alpha - 1.0)
    return out[()] if out.ndim == 0 else out


def sup_h(c: Coefficient) -> float:
    # maximum at x = 0 for every alpha > 0
    return 1.0


def argmax_dh(c: Coefficient) -> float:
    """Positive location of the maximum of ``|dh|``, where ``x^2 = 1/(2 alpha + 1)``."""
    return 1.0 / np.sqrt(2.0 * c.alpha + 1.0)


def sup_dh(c: Coefficient) -> float:
    """Exact ``max |h'|``.

    Setting the derivative of ``x (1+x^2)^(-alpha-1)`` to zero gives
    ``x^2 = 1/(2 alpha + 1)``; substituting back yields
    ``2 alpha (2 alpha + 1)^(alpha + 1/2) / (2 alpha + 2)^(alpha + 1)``.
    """
    a = c.alpha
    # evaluated in log space so large alpha does not overflow
    log_val = (np.log(2.0 * a) + (a + 0.5) * np.log(2.0 * a + 1.0)
               - (a + 1.0) * np.log(2.0 * a + 2.0))
    return float(np.exp(log_val))


def grid_sup_dh(c: Coefficient, n: int = 1_000_000, x_max: float = 1e3) -> float:
    """Brute-force ``max |h'|`` over a log-spaced grid, used to cross-check :func:`sup_dh`."""
    xs = np.geomspace(1e-8, x_max, n)
    # |h'| is even, so the positive half-line suffices
    return float(np.max(np.abs(dh(c, xs))))

"""Gauss-Legendre quadrature helpers shared by the profile and solver modules.

Three shapes of integral come up repeatedly:

* fixed-order integrals over an interval (``integrate_gl``),
* integrals driven to a relative tolerance by doubling the node count
  (``integrate_adaptive``), used where the integrand is smooth but not
  polynomial and a convergence certificate is wanted,
* cumulative integrals along a grid with cheap partial-segment evaluation
  at arbitrary interior points (:class:`CumulativeIntegral`), used for the
  arclength and height functions of the meridian.

All integrand callables must accept numpy arrays.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureError", "gauss_legendre", "integrate_gl",
    "integrate_adaptive", "CumulativeIntegral",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@lru_cache(maxsize=128)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def integrate_gl(fn, a: float, b: float, n: int) -> float:
    xi, wi = gauss_legendre(n)
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * xi
    return float(half * np.dot(wi, fn(x)))


def integrate_adaptive(fn, a: float, b: float, rtol: float = 1e-11,
                       n0: int = 32, n_max: int = 8192,
                       atol: float = 0.0) -> tuple[float, float]:
    """Double the node count until two consecutive values agree to ``rtol``.

    Returns ``(value, estimate)`` where the estimate is the relative change
    in the last doubling.  Raises :class:`QuadratureError` if the sequence
    has not settled by ``n_max`` nodes, which for profile integrands signals
    an integrand that is not actually smooth (for instance a profile whose
    boundary behavior is wrong, making ``(1-x^2)/f`` blow up).  ``atol``
    (default off) accepts the value once the doubling change falls below it
    in absolute terms — needed for integrals whose true value is zero, where
    no relative test can ever pass.
    """
    prev = integrate_gl(fn, a, b, n0)
    n = 2 * n0
    while n <= n_max:
        cur = integrate_gl(fn, a, b, n)
        scale = max(abs(cur), abs(prev), 1e-300)
        est = abs(cur - prev) / scale
        if est <= rtol or abs(cur - prev) <= atol:
            return cur, est
        prev = cur
        n *= 2
    raise QuadratureError(
        f"integral did not converge to rtol={rtol:g} by {n_max} nodes "
        f"(last change {est:.3e}); integrand may be singular")


class CumulativeIntegral:
    """Cumulative integral of ``fn`` from ``grid[0]``, with partial segments.

    The grid is fixed at construction; each segment is integrated with an
    ``order``-point Gauss rule (all segments in one vectorized call).
    ``value(u)`` then returns the integral from ``grid[0]`` to arbitrary
    points ``u`` inside the grid span by adding a partial-segment Gauss
    integral to the precomputed cumulative sums.  Nodes never touch the
    grid points themselves, so integrands with removable endpoint
    singularities are safe as long as the closed-form limit exists.
    """

    def __init__(self, fn, grid: np.ndarray, order: int = 8):
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be a 1-d array with at least 2 points")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        self.fn = fn
        self.grid = grid
        self.order = order
        xi, wi = gauss_legendre(order)
        self._xi, self._wi = xi, wi
        a = grid[:-1]
        half = 0.5 * np.diff(grid)
        nodes = (a + half)[:, None] + half[:, None] * xi[None, :]
        vals = np.asarray(fn(nodes.ravel()), dtype=float).reshape(nodes.shape)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("integrand not finite on quadrature nodes")
        seg = half * (vals @ wi)
        self.cum = np.concatenate(([0.0], np.cumsum(seg)))

    @property
    def total(self) -> float:
        return float(self.cum[-1])

    def value(self, u):
        """Integral from ``grid[0]`` to each entry of ``u`` (scalar or array)."""
        scalar = np.ndim(u) == 0
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(u < lo - 1e-12) or np.any(u > hi + 1e-12):
            raise ValueError("query point outside the tabulated range")
        u = np.clip(u, lo, hi)
        idx = np.clip(np.searchsorted(self.grid, u, side="right") - 1,
                      0, self.grid.size - 2)
        a = self.grid[idx]
        half = 0.5 * (u - a)
        nodes = (a + half)[:, None] + half[:, None] * self._xi[None, :]
        vals = np.asarray(self.fn(nodes.ravel()), dtype=float).reshape(nodes.shape)
        partial = half * (vals @ self._wi)
        out = self.cum[idx] + partial
        return float(out[0]) if scalar else out

"""Stable evaluation of orthonormal Hermite functions plus Gauss-Hermite quadrature.

h_0, h_1, ... are the L2(R)-orthonormal Hermite functions,
h_0(x) = pi**-0.25 * exp(-x**2 / 2), generated by the normalized three-term
recurrence

    h_{n+1}(x) = x * sqrt(2/(n+1)) * h_n(x) - sqrt(n/(n+1)) * h_{n-1}(x).

Raw Hermite polynomials overflow near degree 150; the normalized recurrence
is stable at every degree used here.  Indices are 0-based internally; report
writers may relabel them 1-based via :class:`IndexOrigin`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "CoefficientVector",
    "HermiteContext",
    "IndexOrigin",
    "QuadratureDomainError",
    "apply_operator",
    "as_coefficients",
    "gauss_hermite_nodes",
]


class QuadratureDomainError(ValueError):
    """The integrand is not representable on the quadrature rule."""


class IndexOrigin(Enum):
    """Labeling convention for coefficient indices (storage is always positional)."""

    ZERO_BASED = "zero_based"
    ONE_BASED = "one_based"


@dataclass
class CoefficientVector:
    """A finite real coefficient sequence, the common currency of the engine.

    Entry j always multiplies h_j; ``origin`` only controls how indices are
    labeled when the vector is exported.
    """

    values: np.ndarray
    origin: IndexOrigin = IndexOrigin.ZERO_BASED

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if values.ndim != 1:
            raise ValueError("coefficients must form a one-dimensional sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficients must be finite")
        self.values = values

    def __len__(self) -> int:
        return int(self.values.size)

    def to_json(self) -> list:
        return [float(v) for v in self.values]


def as_coefficients(c) -> np.ndarray:
    """Plain float array behind ``c`` (a CoefficientVector or any 1-d array-like)."""
    if isinstance(c, CoefficientVector):
        return c.values
    arr = np.atleast_1d(np.asarray(c, dtype=float))
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional coefficient sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


def apply_operator(matrix, c) -> np.ndarray:
    """Apply a coefficient-space operator, zero-padding shorter inputs."""
    vec = as_coefficients(c)
    dim = matrix.shape[1]
    if vec.size > dim:
        raise ValueError(f"coefficient length {vec.size} exceeds operator size {dim}")
    if vec.size < dim:
        vec = np.pad(vec, (0, dim - vec.size))
    return matrix @ vec


def gauss_hermite_nodes(count: int) -> np.ndarray:
    """Nodes of the ``count``-point Gauss-Hermite rule (weight exp(-x**2)).

    Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix with
    off-diagonal sqrt(i/2).  The spectrum is symmetrized so the returned rule
    is exactly even under x -> -x.
    """
    if count < 1:
        raise ValueError("quadrature needs at least one node")
    if count == 1:
        return np.zeros(1)
    off = np.sqrt(np.arange(1, count) / 2.0)
    nodes = eigh_tridiagonal(np.zeros(count), off, eigvals_only=True)
    return (nodes - nodes[::-1]) / 2.0


def _hermite_table(x, count):
    """Values h_0(x)..h_{count-1}(x) as a (len(x), count) array."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, count))
    with np.errstate(under="ignore"):
        out[:, 0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
        if count > 1:
            out[:, 1] = math.sqrt(2.0) * x * out[:, 0]
        for n in range(1, count - 1):
            out[:, n + 1] = (
                x * math.sqrt(2.0 / (n + 1)) * out[:, n]
                - math.sqrt(n / (n + 1.0)) * out[:, n - 1]
            )
    return out


class HermiteContext:
    """Evaluation, quadrature, and coefficient-space operators for h_0..h_{M-1}.

    Parameters
    ----------
    max_index : int
        Number M of Hermite functions handled by this context.
    quad_count : int, optional
        Number of Gauss-Hermite nodes.  Defaults to 2*M, which keeps the rule
        exact for integrands poly * exp(-x**2) up to polynomial degree 4M-1,
        hence for every product h_m * h_n with m, n < M.
    domain_cutoff : float, optional
        Half-width X of the sup-norm sampling grid.  Defaults to
        sqrt(2*(M+1)) + 5; every h_n with n < M is negligible beyond its
        classical oscillation region |x| <= sqrt(2n+1).
    grid_step : float, optional
        Sampling step of the sup-norm grid (default 0.01).

    Instances are immutable after construction and safe to share across
    threads; all operations are pure.
    """

    def __init__(self, max_index, quad_count=None, domain_cutoff=None, grid_step=0.01):
        max_index = int(max_index)
        if max_index < 1:
            raise ValueError("max_index must be >= 1")
        if quad_count is None:
            quad_count = 2 * max_index
        quad_count = int(quad_count)
        if quad_count < 2 * max_index:
            raise ValueError("quadrature needs at least 2*max_index nodes for exactness")
        if grid_step <= 0:
            raise ValueError("grid_step must be positive")

        self.max_index = max_index
        nodes = gauss_hermite_nodes(quad_count)
        weights, keep = self._christoffel_weights(nodes, quad_count)
        self.quad_nodes = nodes[keep]
        self.quad_weights = weights
        self.domain_cutoff = (
            math.sqrt(2.0 * (max_index + 1.0)) + 5.0
            if domain_cutoff is None
            else float(domain_cutoff)
        )
        if self.domain_cutoff <= 0:
            raise ValueError("domain_cutoff must be positive")
        self.grid_step = float(grid_step)
        # h_n(x_i) for n < M at the kept nodes, reused by every transform
        self._node_table = _hermite_table(self.quad_nodes, max_index)
        self._grid = None

    @staticmethod
    def _christoffel_weights(nodes, count):
        # The reweighted quadrature weight w_i * exp(x_i**2) equals
        # 1 / sum_{k<count} h_k(x_i)**2, which stays representable at node
        # magnitudes where the raw Gauss-Hermite weights have long
        # underflown.  Nodes whose entire Christoffel sum underflows are
        # dropped: every admissible integrand is below 1e-250 there.
        with np.errstate(under="ignore"):
            h_prev = math.pi ** -0.25 * np.exp(-0.5 * nodes * nodes)
            total = h_prev * h_prev
            if count > 1:
                h_cur = math.sqrt(2.0) * nodes * h_prev
                total = total + h_cur * h_cur
                for n in range(1, count - 1):
                    h_next = (
                        nodes * math.sqrt(2.0 / (n + 1)) * h_cur
                        - math.sqrt(n / (n + 1.0)) * h_prev
                    )
                    h_prev, h_cur = h_cur, h_next
                    total = total + h_cur * h_cur
        keep = total > 1e-250
        return 1.0 / total[keep], keep

    # -- evaluation ---------------------------------------------------------

    def hermite_eval(self, n, x):
        """Value of h_n at ``x`` (scalar or array) by the normalized recurrence."""
        if not 0 <= n < self.max_index:
            raise IndexError(f"Hermite index {n} outside 0..{self.max_index - 1}")
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("evaluation points must be finite")
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        with np.errstate(under="ignore"):
            h_prev = math.pi ** -0.25 * np.exp(-0.5 * arr * arr)
            if n == 0:
                return float(h_prev[0]) if scalar else h_prev
            h_cur = math.sqrt(2.0) * arr * h_prev
            for m in range(1, n):
                h_next = (
                    arr * math.sqrt(2.0 / (m + 1)) * h_cur
                    - math.sqrt(m / (m + 1.0)) * h_prev
                )
                h_prev, h_cur = h_cur, h_next
        return float(h_cur[0]) if scalar else h_cur

    def hermite_table(self, x, count=None):
        """Values h_0..h_{count-1} at ``x`` as a (len(x), count) array."""
        count = self.max_index if count is None else int(count)
        if not 1 <= count <= self.max_index:
            raise ValueError(f"count must lie in 1..{self.max_index}")
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("evaluation points must be finite")
        return _hermite_table(arr, count)

    # -- quadrature ---------------------------------------------------------

    def _sample(self, f):
        if callable(f):
            try:
                samples = np.asarray(f(self.quad_nodes), dtype=float)
            except (TypeError, ValueError):
                samples = np.array([float(f(t)) for t in self.quad_nodes])
            if samples.shape != self.quad_nodes.shape:
                samples = np.array([float(f(t)) for t in self.quad_nodes])
        else:
            samples = np.asarray(f, dtype=float)
            if samples.shape != self.quad_nodes.shape:
                raise ValueError("sample array must match the quadrature nodes")
        return samples

    def _check_integrable(self, samples):
        if not np.all(np.isfinite(samples)):
            raise QuadratureDomainError(
                "integrand overflows on the quadrature nodes "
                "(growth faster than exp(x**2/2))"
            )
        # Admissible integrands decay like exp(-x**2/2) relative to their
        # peak; mass at the outermost nodes means growth at least
        # exp(x**2/2) and a divergent reweighted rule.
        damped = np.abs(samples) * self._node_table[:, 0]
        peak = float(damped.max())
        if peak > 0.0 and max(damped[0], damped[-1]) > 1e-8 * peak:
            raise QuadratureDomainError(
                "integrand mass at the quadrature boundary "
                "(growth faster than exp(x**2/2))"
            )

    def integrate(self, f) -> float:
        """Integral over R of a callable (or node samples) with Gaussian-type decay."""
        samples = self._sample(f)
        self._check_integrable(samples)
        return float(self.quad_weights @ samples)

    def hermite_coefficients(self, f, count=None) -> CoefficientVector:
        """Coefficients (<f, h_n>)_{n < count} by the reweighted Gauss-Hermite rule.

        ``f`` is a callable on the quadrature nodes or an array of node
        values.  The exp(x**2) reweighting is folded into the stored
        weights, so the rule is exact whenever f * h_n is a polynomial times
        exp(-x**2) of degree at most 4M-1.  Functions growing faster than
        exp(x**2 / 2) overflow the reweighted integrand and raise
        :class:`QuadratureDomainError`.
        """
        count = self.max_index if count is None else int(count)
        if not 1 <= count <= self.max_index:
            raise ValueError(f"count must lie in 1..{self.max_index}")
        samples = self._sample(f)
        self._check_integrable(samples)
        coeffs = self._node_table[:, :count].T @ (self.quad_weights * samples)
        if not np.all(np.isfinite(coeffs)):
            raise QuadratureDomainError("quadrature sums overflowed")
        return CoefficientVector(coeffs)

    # -- synthesis ----------------------------------------------------------

    def synthesize(self, c):
        """Return the callable x -> sum_n c_n h_n(x)."""
        coeffs = as_coefficients(c).copy()
        if coeffs.size > self.max_index:
            raise ValueError(f"coefficient length {coeffs.size} exceeds max_index")

        def evaluate(x):
            arr = np.asarray(x, dtype=float)
            scalar = arr.ndim == 0
            arr = np.atleast_1d(arr)
            with np.errstate(under="ignore"):
                h_prev = math.pi ** -0.25 * np.exp(-0.5 * arr * arr)
                acc = coeffs[0] * h_prev
                if coeffs.size > 1:
                    h_cur = math.sqrt(2.0) * arr * h_prev
                    acc = acc + coeffs[1] * h_cur
                    for n in range(1, coeffs.size - 1):
                        h_next = (
                            arr * math.sqrt(2.0 / (n + 1)) * h_cur
                            - math.sqrt(n / (n + 1.0)) * h_prev
                        )
                        h_prev, h_cur = h_cur, h_next
                        acc = acc + coeffs[n + 1] * h_cur
            return float(acc[0]) if scalar else acc

        return evaluate

    # -- coefficient-space operators -----------------------------------------

    def derivative_matrix(self, count) -> np.ndarray:
        """Square banded matrix D with synthesize(D c) = d/dx synthesize(c).

        (Dc)_n = sqrt((n+1)/2) c_{n+1} - sqrt(n/2) c_{n-1}.  Exact on inputs
        supported strictly below index count-1; the top band is truncated, so
        keep one index of headroom per derivative order taken.
        """
        count = int(count)
        if not 1 <= count <= self.max_index - 1:
            raise ValueError(f"count must lie in 1..{self.max_index - 1}")
        band = np.sqrt(np.arange(1, count) / 2.0)
        return np.diag(band, 1) - np.diag(band, -1)

    def position_matrix(self, count) -> np.ndarray:
        """Square banded matrix P with synthesize(P c)(x) = x * synthesize(c)(x).

        (Pc)_n = sqrt(n/2) c_{n-1} + sqrt((n+1)/2) c_{n+1}; symmetric by
        construction, with the same truncation caveat as the derivative.
        """
        count = int(count)
        if not 1 <= count <= self.max_index:
            raise ValueError(f"count must lie in 1..{self.max_index}")
        band = np.sqrt(np.arange(1, count) / 2.0)
        return np.diag(band, 1) + np.diag(band, -1)

    # -- sampling grid --------------------------------------------------------

    @property
    def grid(self) -> np.ndarray:
        """Symmetric sup-norm sampling grid; always contains x = 0."""
        if self._grid is None:
            half = int(round(self.domain_cutoff / self.grid_step))
            span = half * self.grid_step
            self._grid = np.linspace(-span, span, 2 * half + 1)
        return self._grid

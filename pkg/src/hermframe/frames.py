"""Finite frame systems in Hermite coordinates.

A frame system stores N frame elements as the rows of an N x M coefficient
matrix C, so every inner product is an exact finite sum: Gram matrix
G = C C^T, frame matrix S = C^T C, canonical dual rows S^+ c_n.  All
statements are about the truncated system as a frame for its span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .hermite import CoefficientVector, as_coefficients

__all__ = [
    "DualSolveError",
    "FBoundednessTable",
    "FrameBounds",
    "FrameSystem",
    "ReconstructionDefect",
    "RieszDiagnostics",
    "analyze",
    "canonical_dual",
    "frame_bounds",
    "frame_inequality_margins",
    "from_hermite_coeffs",
    "graded_operator_norms",
    "is_riesz_basis",
    "reconstruct",
    "synthesize_frame",
    "unconditionality_probe",
]

# Relative eigenvalue threshold for numerical rank decisions.
RANK_RTOL = 1e-10
# Dense symmetric factorization up to this ambient dimension; CG beyond.
DENSE_SOLVE_LIMIT = 1024


class ReconstructionDefect(RuntimeError):
    """The input lies outside the numerical span of the frame."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = float(residual)


class DualSolveError(RuntimeError):
    """A canonical-dual solve left a row outside the numerical range of S."""

    def __init__(self, residual):
        super().__init__(
            "canonical dual solve failed: a frame row lies outside the "
            f"numerical range of the frame matrix (residual {residual:.3e}); "
            "the system is not a frame for the ambient truncated space"
        )
        self.residual = float(residual)


class FrameSystem:
    """N frame elements as Hermite-coefficient rows of an N x M matrix.

    Caches (Gram matrix, frame matrix, spectra, canonical dual) are built
    lazily and never mutated afterwards; distinct instances may be built and
    queried concurrently.
    """

    def __init__(self, coeffs):
        mat = np.array(coeffs, dtype=float)
        if mat.ndim != 2 or mat.size == 0:
            raise ValueError("frame coefficients must form a nonempty 2-d matrix")
        if not np.all(np.isfinite(mat)):
            raise ValueError("frame coefficients must be finite")
        if np.any(np.linalg.norm(mat, axis=1) == 0.0):
            raise ValueError("frame rows must be nonzero")
        mat.setflags(write=False)
        self.coeffs = mat
        self._gram = None
        self._frame_matrix = None
        self._bounds_eigs = None
        self._frame_eig = None
        self._dual = None
        self._dual_residual = None
        self.truncation_loss = 0.0

    @property
    def n_elements(self) -> int:
        return self.coeffs.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def gram(self) -> np.ndarray:
        if self._gram is None:
            self._gram = self.coeffs @ self.coeffs.T
        return self._gram

    @property
    def frame_matrix(self) -> np.ndarray:
        if self._frame_matrix is None:
            self._frame_matrix = self.coeffs.T @ self.coeffs
        return self._frame_matrix

    @property
    def dual_residual(self):
        """Max relative residual of the dual solve, or None before it ran."""
        return self._dual_residual

    def _bounds_spectrum(self) -> np.ndarray:
        # S and G share their nonzero spectrum; diagonalize the smaller one.
        if self._bounds_eigs is None:
            mat = self.frame_matrix if self.ambient_dim <= self.n_elements else self.gram
            self._bounds_eigs = np.linalg.eigvalsh(mat)
        return self._bounds_eigs

    def _frame_eigendecomposition(self):
        if self._frame_eig is None:
            self._frame_eig = np.linalg.eigh(self.frame_matrix)
        return self._frame_eig


def from_hermite_coeffs(coeffs) -> FrameSystem:
    """Wrap an N x M Hermite-coefficient matrix as a FrameSystem."""
    return FrameSystem(coeffs)


@dataclass
class FrameBounds:
    """Sharp frame bounds on the span of the system."""

    lower: float
    upper: float
    rank: int
    condition: float

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "rank": self.rank,
            "condition": self.condition,
        }


def frame_bounds(system) -> FrameBounds:
    """Extreme nonzero eigenvalues of the frame matrix S = C^T C.

    The numerical rank counts eigenvalues above 1e-10 relative to the
    largest one.
    """
    eigs = system._bounds_spectrum()
    upper = float(eigs[-1])
    if upper <= 0.0:
        raise ValueError("frame matrix has no positive spectrum")
    positive = eigs[eigs > RANK_RTOL * upper]
    lower = float(positive[0])
    return FrameBounds(lower, upper, int(positive.size), upper / lower)


def canonical_dual(system, tol=1e-8) -> FrameSystem:
    """Frame system with rows S^+ c_n, the canonical dual on the span.

    Uses a Cholesky solve when S is numerically positive definite (ambient
    dimension up to 1024), a conjugate-gradient solve per row beyond that,
    and a spectral pseudo-inverse restricted to the numerical range when S
    is rank deficient.  Raises :class:`DualSolveError` when a row cannot be
    resolved within ``tol`` relative residual.
    """
    if system._dual is not None:
        return system._dual

    C = system.coeffs
    S = system.frame_matrix
    eigs = system._bounds_spectrum()
    full_rank = float(eigs[0]) > RANK_RTOL * float(eigs[-1])

    if full_rank and system.ambient_dim <= system.n_elements:
        if system.ambient_dim <= DENSE_SOLVE_LIMIT:
            dual_rows = cho_solve(cho_factor(S), C.T).T
        else:
            dual_rows = _cg_dual_rows(system)
    else:
        w, V = system._frame_eigendecomposition()
        keep = w > RANK_RTOL * w[-1]
        inv = np.zeros_like(w)
        inv[keep] = 1.0 / w[keep]
        dual_rows = ((C @ V) * inv) @ V.T

    residual_rows = np.linalg.norm(dual_rows @ S - C, axis=1)
    rel = float(np.max(residual_rows / np.linalg.norm(C, axis=1)))
    if rel > tol:
        raise DualSolveError(rel)

    dual = FrameSystem(dual_rows)
    system._dual = dual
    system._dual_residual = rel
    return dual


def _cg_dual_rows(system):
    from scipy.sparse.linalg import cg

    C = system.coeffs
    dim = system.ambient_dim
    op = LinearOperator((dim, dim), matvec=lambda v: C.T @ (C @ v), dtype=float)
    rows = np.empty_like(C)
    for i in range(system.n_elements):
        sol, info = cg(op, C[i], rtol=1e-12, atol=0.0, maxiter=20 * dim)
        if info != 0:
            raise DualSolveError(float(np.linalg.norm(C.T @ (C @ sol) - C[i])))
        rows[i] = sol
    return rows


def analyze(system, f) -> CoefficientVector:
    """Frame coefficients (<f, e_n>)_n, i.e. C f."""
    vec = as_coefficients(f)
    if vec.size != system.ambient_dim:
        raise ValueError(
            f"dimension mismatch: expected length {system.ambient_dim}, got {vec.size}"
        )
    return CoefficientVector(system.coeffs @ vec)


def synthesize_frame(system, c) -> CoefficientVector:
    """Hermite coefficients of sum_n c_n e_n, i.e. C^T c."""
    vec = as_coefficients(c)
    if vec.size != system.n_elements:
        raise ValueError(
            f"dimension mismatch: expected length {system.n_elements}, got {vec.size}"
        )
    return CoefficientVector(system.coeffs.T @ vec)


def reconstruct(system, f, mode="dual_analysis", tol=1e-8) -> CoefficientVector:
    """Expand f through the canonical dual and return the reconstruction.

    dual_analysis returns sum_n <f, dual_n> e_n; dual_synthesis returns
    sum_n <f, e_n> dual_n.  Both equal f on the span up to solver tolerance;
    inputs outside the numerical span raise :class:`ReconstructionDefect`
    carrying the relative residual.
    """
    vec = as_coefficients(f)
    if vec.size != system.ambient_dim:
        raise ValueError(
            f"dimension mismatch: expected length {system.ambient_dim}, got {vec.size}"
        )
    dual = canonical_dual(system)
    if mode == "dual_analysis":
        result = system.coeffs.T @ (dual.coeffs @ vec)
    elif mode == "dual_synthesis":
        result = dual.coeffs.T @ (system.coeffs @ vec)
    else:
        raise ValueError("mode must be 'dual_analysis' or 'dual_synthesis'")
    scale = float(np.linalg.norm(vec))
    residual = float(np.linalg.norm(result - vec)) / (scale if scale > 0 else 1.0)
    if residual > tol:
        raise ReconstructionDefect("input outside the frame span", residual)
    return CoefficientVector(result)


@dataclass
class RieszDiagnostics:
    """Riesz-basis verdict with the Gram-spectrum evidence."""

    is_riesz_basis: bool
    n_elements: int
    ambient_dim: int
    gram_min: float
    gram_max: float
    rank: int

    def __bool__(self) -> bool:
        return self.is_riesz_basis

    def to_json(self) -> dict:
        return {
            "is_riesz_basis": self.is_riesz_basis,
            "n_elements": self.n_elements,
            "ambient_dim": self.ambient_dim,
            "gram_min": self.gram_min,
            "gram_max": self.gram_max,
            "rank": self.rank,
        }


def is_riesz_basis(system) -> RieszDiagnostics:
    """True iff the system is square with a boundedly invertible Gram matrix."""
    eigs = np.linalg.eigvalsh(system.gram)
    gmax = float(eigs[-1])
    gmin = float(eigs[0])
    rank = int(np.count_nonzero(eigs > RANK_RTOL * gmax))
    verdict = (
        system.n_elements == system.ambient_dim
        and gmin > RANK_RTOL * gmax
    )
    return RieszDiagnostics(
        verdict, system.n_elements, system.ambient_dim, gmin, gmax, rank
    )


# -- graded operator norms ----------------------------------------------------


@dataclass
class FBoundednessTable:
    """Per-grade operator-norm estimates for analysis, synthesis and frame maps."""

    grades: dict
    converged: bool
    method: str = "probes+lanczos"

    def to_json(self) -> dict:
        return {
            "grades": {str(k): dict(v) for k, v in self.grades.items()},
            "converged": self.converged,
            "method": self.method,
        }


def _spectral_norm(matrix, rng, probes=8):
    """Top singular value: probe lower bounds refined by a Lanczos solve."""
    rows, cols = matrix.shape
    if cols == 1:
        return float(np.linalg.norm(matrix[:, 0])), True

    best_ratio = 0.0
    best_vec = None
    candidates = [np.eye(cols)[j] for j in
                  np.unique(np.linspace(0, cols - 1, min(probes, cols)).astype(int))]
    candidates.extend(rng.standard_normal(cols) for _ in range(probes))
    for vec in candidates:
        scale = float(np.linalg.norm(vec))
        if scale == 0.0:
            continue
        ratio = float(np.linalg.norm(matrix @ vec)) / scale
        if ratio >= best_ratio:
            best_ratio = ratio
            best_vec = vec

    op = LinearOperator(
        (cols, cols), matvec=lambda v: matrix.T @ (matrix @ v), dtype=float
    )
    try:
        vals = eigsh(
            op,
            k=1,
            which="LA",
            v0=best_vec,
            ncv=min(cols, 64),
            maxiter=max(2000, 40 * cols),
            tol=1e-13,
            return_eigenvectors=False,
        )
        top = math.sqrt(max(float(vals[0]), 0.0))
        return max(best_ratio, top), True
    except ArpackNoConvergence as exc:
        vals = np.asarray(exc.eigenvalues, dtype=float)
        if vals.size:
            return max(best_ratio, math.sqrt(max(float(vals.max()), 0.0))), False
        return best_ratio, False


def graded_operator_norms(system, family, grade_cap, rng=None, probes=8) -> FBoundednessTable:
    """Weighted operator norms per grade k <= grade_cap.

    Grade-k norms weight Hermite coefficients (length M) and frame
    coefficients (length N) by mu_k, so each operator norm is the top
    singular value of a diagonally reweighted matrix: analysis
    W_N C W_M^{-1}, synthesis W_M C^T W_N^{-1}, frame W_M S W_M^{-1}.
    Estimates come from canonical and random probes refined by a Lanczos
    solve started at the best probe.
    """
    if grade_cap > family.max_grade:
        raise ValueError(f"grade cap {grade_cap} exceeds family max {family.max_grade}")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    C = system.coeffs
    n, m = C.shape
    grades = {}
    all_converged = True
    for k in range(grade_cap + 1):
        w_frame = family.weight_vector(k, n)
        w_ambient = family.weight_vector(k, m)
        weighted = {
            "analysis": (w_frame[:, None] * C) / w_ambient[None, :],
            "synthesis": (w_ambient[:, None] * C.T) / w_frame[None, :],
            "frame": (w_ambient[:, None] * system.frame_matrix) / w_ambient[None, :],
        }
        entry = {}
        for label, mat in weighted.items():
            value, converged = _spectral_norm(mat, rng, probes)
            entry[label] = value
            all_converged = all_converged and converged
        grades[k] = entry
    return FBoundednessTable(grades, all_converged)


# -- probe-style diagnostics ---------------------------------------------------


def frame_inequality_margins(system, bounds=None, n_probes=64, rng=None):
    """Worst slacks of A ||f||^2 <= ||C f||^2 <= B ||f||^2 over span probes.

    Probes are synthesized into the span (f = C^T g), where the lower bound
    applies.  Returns (min lower slack, min upper slack); both should be
    >= -1e-9 for consistent bounds.
    """
    if bounds is None:
        bounds = frame_bounds(system)
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    lower_slack = math.inf
    upper_slack = math.inf
    for _ in range(n_probes):
        f = system.coeffs.T @ rng.standard_normal(system.n_elements)
        norm_sq = float(f @ f)
        if norm_sq == 0.0:
            continue
        f /= math.sqrt(norm_sq)
        value = float(np.linalg.norm(system.coeffs @ f) ** 2)
        lower_slack = min(lower_slack, value - bounds.lower)
        upper_slack = min(upper_slack, bounds.upper - value)
    return lower_slack, upper_slack


def unconditionality_probe(system, f, n_permutations=20, rng=None):
    """Relative deviations of permuted-order partial sums of S f from S f.

    The frame-operator series sum_n <f, e_n> e_n is summed in random term
    orders; deviations are pure floating-point reordering noise and shrink
    to machine precision at full truncation.
    """
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    vec = as_coefficients(f)
    if vec.size != system.ambient_dim:
        raise ValueError("dimension mismatch")
    u = system.coeffs @ vec
    base = system.coeffs.T @ u
    scale = float(np.linalg.norm(base))
    scale = scale if scale > 0 else 1.0
    deviations = []
    for _ in range(n_permutations):
        order = rng.permutation(system.n_elements)
        acc = np.zeros(system.ambient_dim)
        for idx in order:
            acc += u[idx] * system.coeffs[idx]
        deviations.append(float(np.linalg.norm(acc - base)) / scale)
    return deviations

"""Graded weight families, weighted l2 norms, and empirical decay classification.

The grade-k norm of a coefficient sequence weights entry n (1-based) by
mu_k(n); the matching dual norm weights by 1/mu_k(n).  Two families are
provided: polynomial mu_k(n) = (1+n)**k and sub-exponential
mu_k(n) = exp(k * n**beta) with beta in (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermite import as_coefficients

__all__ = [
    "DecayClassification",
    "GradedNorms",
    "WeightFamily",
    "classify_decay",
    "dual_pairing_bound",
    "dual_pairing_trend",
    "moderation_constant",
    "polynomial_weights",
    "sub_exponential_weights",
    "weighted_norm",
]

POLYNOMIAL = "polynomial"
SUB_EXPONENTIAL = "sub_exponential"

# Entries at or below this magnitude count as structural zeros.
ZERO_FLOOR = 1e-300
# Leading indices excluded from decay fits (pre-asymptotic regime).
FIT_SKIP = 8
# Minimum live points for a meaningful fit.
FIT_MIN_POINTS = 8


@dataclass(frozen=True)
class WeightFamily:
    """Monotone graded weights mu_0 = 1 <= mu_1 <= ... on 1-based indices."""

    kind: str
    max_grade: int
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in (POLYNOMIAL, SUB_EXPONENTIAL):
            raise ValueError(f"unknown weight family kind {self.kind!r}")
        if self.max_grade < 0:
            raise ValueError("max_grade must be >= 0")
        if self.kind == SUB_EXPONENTIAL:
            if self.beta is None or not 0.0 < self.beta < 1.0:
                raise ValueError("sub_exponential weights need beta in (0, 1)")
        elif self.beta is not None:
            raise ValueError("beta only applies to sub_exponential weights")

    def _check_grade(self, k):
        if not 0 <= k <= self.max_grade:
            raise ValueError(f"grade {k} outside 0..{self.max_grade}")

    def mu(self, k, n):
        """Weight mu_k at index n (scalar or array, n >= 0)."""
        self._check_grade(k)
        n = np.asarray(n, dtype=float)
        if self.kind == POLYNOMIAL:
            return (1.0 + n) ** k
        return np.exp(k * n ** self.beta)

    def weight_vector(self, k, length) -> np.ndarray:
        """mu_k at the 1-based indices 1..length."""
        return self.mu(k, np.arange(1, length + 1))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "max_grade": self.max_grade}
        if self.beta is not None:
            out["beta"] = self.beta
        return out


def polynomial_weights(max_grade) -> WeightFamily:
    return WeightFamily(POLYNOMIAL, max_grade)


def sub_exponential_weights(beta, max_grade) -> WeightFamily:
    return WeightFamily(SUB_EXPONENTIAL, max_grade, beta)


def weighted_norm(c, k, family) -> float:
    """l2 norm of c against mu_k, entries indexed 1..len(c)."""
    vec = as_coefficients(c)
    return float(np.linalg.norm(vec * family.weight_vector(k, vec.size)))


def dual_pairing_bound(b, k, family) -> float:
    """l2 norm of b against 1/mu_k.

    A finite value certifies that f -> sum_n c_n b_n is bounded on grade k:
    |sum_n c_n b_n| <= weighted_norm(c, k) * dual_pairing_bound(b, k) by
    Cauchy-Schwarz.
    """
    vec = as_coefficients(b)
    return float(np.linalg.norm(vec / family.weight_vector(k, vec.size)))


def dual_pairing_trend(b, k, family, truncations=None):
    """Dual norms across prefix truncations plus a divergence flag.

    Truncations default to powers of two up to len(b).  The flag is set when
    the last two doublings both grow by more than five percent, the
    operational sign that the full dual norm diverges.
    """
    vec = as_coefficients(b)
    if truncations is None:
        truncations = []
        t = 16
        while t < vec.size:
            truncations.append(t)
            t *= 2
        truncations.append(vec.size)
    values = [dual_pairing_bound(vec[:t], k, family) for t in truncations]
    diverging = (
        len(values) >= 3
        and values[-1] > 1.05 * values[-2]
        and values[-2] > 1.05 * values[-3]
    )
    return values, diverging


class GradedNorms:
    """Per-grade norm evaluators bound to one weight family."""

    def __init__(self, family):
        self.family = family

    def norm(self, c, k) -> float:
        return weighted_norm(c, k, self.family)

    def dual_norm(self, b, k) -> float:
        return dual_pairing_bound(b, k, self.family)

    def all_norms(self, c) -> list:
        return [self.norm(c, k) for k in range(self.family.max_grade + 1)]


def moderation_constant(family, k, shift_max=64, index_max=256) -> float:
    """Empirically smallest C with mu_k(t+x) <= C * bound(t) * mu_k(x).

    bound(t) is (1+t)**k for polynomial weights and exp(k * t**beta) for
    sub-exponential ones; the maximum ratio is taken over the integer grid
    t in 0..shift_max, x in 0..index_max.
    """
    t = np.arange(0, shift_max + 1, dtype=float)[:, None]
    x = np.arange(0, index_max + 1, dtype=float)[None, :]
    lhs = family.mu(k, t + x)
    if family.kind == POLYNOMIAL:
        bound = (1.0 + t) ** k
    else:
        bound = np.exp(k * t ** family.beta)
    return float(np.max(lhs / (bound * family.mu(k, x))))


@dataclass
class DecayClassification:
    """Fitted decay law of a coefficient sequence.

    ``model`` is one of polynomial | exponential | sub_exponential | none;
    ``rate`` is +inf for finitely supported sequences; ``residual`` is the
    RMS misfit of log |c_n|.
    """

    model: str
    rate: float
    constant: float
    residual: float
    flags: dict = field(default_factory=dict)

    def finitely_supported(self) -> bool:
        return bool(self.flags.get("finitely_supported"))

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "rate": "inf" if math.isinf(self.rate) else self.rate,
            "constant": self.constant,
            "residual": self.residual,
            "flags": dict(self.flags),
        }


def classify_decay(c, beta=0.5, noise_floor=None) -> DecayClassification:
    """Least-squares decay fit of log |c_n| on the tail (first 8 indices skipped).

    Candidate regressors: log n (polynomial), n (exponential), n**beta
    (sub-exponential); the smallest log-scale RMS residual wins.  Entries at
    or below 1e-300 are structural zeros: they are excluded from the fit,
    and when they fill more than half of the tail the sequence is reported
    as finitely supported (exponential model, infinite rate).  Entries at or
    below ``noise_floor`` are additionally excluded from the fit as
    unresolved (e.g. quadrature noise) without counting as structural zeros.
    """
    vec = np.abs(as_coefficients(c))
    if vec.size < 16:
        raise ValueError("need at least 16 coefficients to classify decay")
    if not np.any(vec > 0.0):
        raise ValueError("cannot classify the identically zero sequence")

    index = np.arange(1.0, vec.size + 1.0)
    tail_vals = vec[FIT_SKIP:]
    tail_idx = index[FIT_SKIP:]
    structural = tail_vals <= ZERO_FLOOR
    floor = max(ZERO_FLOOR, float(noise_floor)) if noise_floor else ZERO_FLOOR
    live = tail_vals > floor

    flags = {}
    if noise_floor:
        flags["noise_floor"] = float(noise_floor)
    support = int(np.max(np.nonzero(vec > ZERO_FLOOR)[0])) + 1

    if np.mean(structural) > 0.5 or int(np.count_nonzero(live)) < FIT_MIN_POINTS:
        flags["finitely_supported"] = True
        flags["support"] = support
        return DecayClassification("exponential", math.inf, 0.0, 0.0, flags)

    y = np.log(tail_vals[live])
    n_live = tail_idx[live]
    flags["fit_points"] = int(n_live.size)
    candidates = (
        (POLYNOMIAL, np.log(n_live)),
        ("exponential", n_live),
        (SUB_EXPONENTIAL, n_live ** beta),
    )
    best = None
    for model, regressor in candidates:
        design = np.column_stack([np.ones_like(regressor), -regressor])
        sol, *_ = np.linalg.lstsq(design, y, rcond=None)
        residual = float(np.sqrt(np.mean((design @ sol - y) ** 2)))
        if best is None or residual < best[3]:
            best = (model, float(sol[1]), float(sol[0]), residual)

    model, rate, intercept, residual = best
    constant = float(np.exp(intercept))
    if rate <= 0.0:
        flags["growing_or_flat"] = True
        return DecayClassification("none", 0.0, constant, residual, flags)
    if model == SUB_EXPONENTIAL:
        flags["beta"] = float(beta)
    return DecayClassification(model, rate, constant, residual, flags)

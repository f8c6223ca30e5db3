"""Envelope localization checks for cross-Gram matrices.

A system is polynomially localized of order s against a reference Riesz
basis when max(|<e_m, g_n>|, |<e_m, dual g_n>|) <= C_s (1+|m-n|)**-s, and
exponentially localized at rate s with envelope exp(-s |m-n|).  At finite
truncation the engine reports the smallest constant per order and its
stability across truncations; bounded constants across a ladder are the
operational stand-in for existence of C_s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import canonical_dual, is_riesz_basis

__all__ = [
    "CrossGram",
    "EnvelopeConstant",
    "LocalizationReport",
    "check_exponential_localization",
    "check_polynomial_localization",
    "check_self_localization",
    "cross_gram",
    "offset_profile",
]

POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"


@dataclass
class CrossGram:
    """Inner products of frame rows against a reference basis and its dual."""

    against_basis: np.ndarray
    against_dual: np.ndarray
    dual_residual: float = 0.0


def cross_gram(system, reference) -> CrossGram:
    """CrossGram of ``system`` against a Riesz-basis ``reference`` (same M)."""
    if system.ambient_dim != reference.ambient_dim:
        raise ValueError("systems must share the same Hermite truncation")
    if not is_riesz_basis(reference):
        raise ValueError("reference system is not a Riesz basis")
    dual = canonical_dual(reference)
    return CrossGram(
        system.coeffs @ reference.coeffs.T,
        system.coeffs @ dual.coeffs.T,
        reference.dual_residual or 0.0,
    )


def offset_profile(matrix) -> np.ndarray:
    """Maximum |entry| at each diagonal offset distance d = |m - n|."""
    rows, cols = matrix.shape
    magnitudes = np.abs(matrix)
    profile = np.zeros(max(rows, cols))
    for offset in range(-(rows - 1), cols):
        diag = np.diagonal(magnitudes, offset=offset)
        if diag.size:
            d = abs(offset)
            profile[d] = max(profile[d], float(diag.max()))
    return profile


@dataclass
class EnvelopeConstant:
    """Smallest constant matching one envelope order (exact in log space)."""

    order: float
    constant: float
    log_constant: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "constant": self.constant if math.isfinite(self.constant) else "inf",
            "log_constant": self.log_constant,
            "passed": self.passed,
        }


@dataclass
class LocalizationReport:
    """Per-order envelope constants plus a fitted decay of the offset profile."""

    kind: str
    cap: float
    constants: list
    fitted_rate: float
    fit_residual: float
    dual_residual: float = 0.0
    flags: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(entry.passed for entry in self.constants)

    def constant_for(self, order) -> float:
        for entry in self.constants:
            if entry.order == order:
                return entry.constant
        raise KeyError(f"order {order} not checked")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "cap": self.cap,
            "constants": [entry.to_json() for entry in self.constants],
            "fitted_rate": self.fitted_rate,
            "fit_residual": self.fit_residual,
            "dual_residual": self.dual_residual,
            "all_passed": self.all_passed,
            "flags": dict(self.flags),
        }


def _combined_profile(x):
    if isinstance(x, CrossGram):
        profile = np.maximum(
            offset_profile(x.against_basis), offset_profile(x.against_dual)
        )
        return profile, x.dual_residual
    return offset_profile(np.asarray(x, dtype=float)), 0.0


def _envelope_constants(profile, orders, cap, envelope_log):
    # Work in log space: exponential envelopes overflow double precision
    # long before the matrices get interesting.
    live = profile > 0.0
    d = np.arange(profile.size, dtype=float)
    log_prof = np.log(profile[live])
    d_live = d[live]
    log_cap = math.log(cap)
    constants = []
    for s in orders:
        log_c = float(np.max(log_prof + envelope_log(s, d_live)))
        value = math.exp(log_c) if log_c < 700.0 else math.inf
        constants.append(EnvelopeConstant(float(s), value, log_c, log_c <= log_cap))
    return constants, log_prof, d_live


def _profile_fit(log_prof, d_live, regressor):
    mask = d_live > 0
    if int(np.count_nonzero(mask)) < 2:
        return 0.0, 0.0
    design = np.column_stack([np.ones(int(mask.sum())), -regressor(d_live[mask])])
    sol, *_ = np.linalg.lstsq(design, log_prof[mask], rcond=None)
    residual = float(np.sqrt(np.mean((design @ sol - log_prof[mask]) ** 2)))
    return float(sol[1]), residual


def check_polynomial_localization(x, orders, cap=1e6) -> LocalizationReport:
    """Smallest C_s with entries <= C_s (1+|m-n|)**-s, for each order s.

    Passing means C_s <= cap.  C_s is non-decreasing in s by construction.
    """
    profile, dual_residual = _combined_profile(x)
    constants, log_prof, d_live = _envelope_constants(
        profile, orders, cap, lambda s, d: s * np.log1p(d)
    )
    rate, residual = _profile_fit(log_prof, d_live, np.log1p)
    return LocalizationReport(
        POLYNOMIAL, cap, constants, rate, residual, dual_residual
    )


def check_exponential_localization(x, rates, cap=1e6) -> LocalizationReport:
    """Smallest C_s with entries <= C_s exp(-s |m-n|), for each rate s."""
    profile, dual_residual = _combined_profile(x)
    constants, log_prof, d_live = _envelope_constants(
        profile, rates, cap, lambda s, d: s * d
    )
    rate, residual = _profile_fit(log_prof, d_live, lambda d: d)
    report = LocalizationReport(
        EXPONENTIAL, cap, constants, rate, residual, dual_residual
    )
    passed = [entry.order for entry in report.constants if entry.passed]
    report.flags["largest_passing_rate"] = max(passed) if passed else None
    return report


def check_self_localization(system, kind, orders, cap=1e6) -> LocalizationReport:
    """Envelope check of a Riesz basis against itself (Gram and dual Gram)."""
    gram = cross_gram(system, system)
    if kind == POLYNOMIAL:
        return check_polynomial_localization(gram, orders, cap)
    if kind == EXPONENTIAL:
        return check_exponential_localization(gram, orders, cap)
    raise ValueError("kind must be 'polynomial' or 'exponential'")

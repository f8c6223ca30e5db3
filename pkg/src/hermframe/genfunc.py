"""Test-function corpus, seminorms, distribution pairings, expansion experiments.

Distribution-like functionals are represented purely by their coefficient
sequences b_n = F(h_n); pairings are truncated series sum_n <f, h_n> b_n.
Membership statements (rapid decay, growth classes) are verified as trends
at finite truncation, never asserted as proofs.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .frames import FrameSystem, canonical_dual
from .hermite import CoefficientVector, as_coefficients
from .localization import check_polynomial_localization, cross_gram
from .seqspaces import (
    classify_decay,
    dual_pairing_bound,
    weighted_norm,
)

__all__ = [
    "DistributionFunctional",
    "ExpansionReport",
    "ExpolHypothesisError",
    "TestFunction",
    "build_expol_frame",
    "coordinate_functional",
    "corpus_standard",
    "delta_functional",
    "frame_pair",
    "gevrey_seminorm",
    "induced_functional",
    "ingest",
    "load_corpus_manifest",
    "pair",
    "regular_functional",
    "schwartz_seminorm",
    "verify_expansion_theorem",
]

SCHWARTZ = "schwartz"
GEVREY = "gevrey"

# Ingested coefficients below this fraction of the largest entry are treated
# as quadrature noise by the decay classifier.
NOISE_FLOOR_REL = 1e-13

# Convergence is declared when the last pairing residual drops below
# PAIR_CONV_RTOL * (1 + |value|).
PAIR_CONV_RTOL = 1e-10


class ExpolHypothesisError(ValueError):
    """A perturbed-basis construction violates one of its hypotheses."""


# -- test functions -------------------------------------------------------------


@dataclass
class TestFunction:
    """A corpus member: an evaluable closure, Hermite coefficients, or both."""

    __test__ = False  # domain term, not a pytest case

    label: str
    coeffs: CoefficientVector | None = None
    func: object = None
    claimed_class: str = "none"
    alpha: float | None = None
    expected_decay: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.coeffs is None and self.func is None:
            raise ValueError("a test function needs coefficients or a closure")

    def coefficient_values(self) -> np.ndarray:
        if self.coeffs is None:
            raise ValueError(f"{self.label}: not ingested into Hermite coefficients")
        return self.coeffs.values


def ingest(tf, ctx, count=None) -> TestFunction:
    """Coefficient-represented copy of ``tf`` at the requested truncation."""
    count = ctx.max_index if count is None else int(count)
    if tf.coeffs is not None:
        vals = tf.coeffs.values
        if vals.size < count:
            vals = np.pad(vals, (0, count - vals.size))
        return replace(tf, coeffs=CoefficientVector(vals[:count].copy()))
    return replace(tf, coeffs=ctx.hermite_coefficients(tf.func, count))


def _coefficient_input(f, ctx=None):
    if isinstance(f, TestFunction):
        if f.coeffs is None:
            if ctx is None:
                raise ValueError("function not ingested and no context supplied")
            return ctx.hermite_coefficients(f.func).values
        return f.coefficient_values()
    return as_coefficients(f)


# -- seminorms ------------------------------------------------------------------


def _derivative_headroom(vec, order, ctx):
    """Trim negligible tails so ``order`` derivative bands fit below max_index.

    Raises when trimming would drop more than 1e-10 of the input's relative
    mass: the truncation really is too short for the requested derivatives.
    """
    cap = ctx.max_index if order == 0 else ctx.max_index - 1
    usable = cap - order
    if usable < 1:
        raise ValueError(
            f"truncation too short: {order} derivative bands need max_index > {order + 1}"
        )
    if vec.size > usable:
        scale = float(np.linalg.norm(vec))
        dropped = float(np.linalg.norm(vec[usable:]))
        if scale > 0 and dropped / scale > 1e-10:
            raise ValueError(
                f"truncation too short: {order} derivative bands would drop "
                f"relative coefficient mass {dropped / scale:.3e}"
            )
        vec = vec[:usable]
    return vec, vec.size + order


def schwartz_seminorm(f, k, ctx) -> float:
    """Grid maximum of |f^(m)(x)| (1+x^2)^(k/2) over derivative orders m <= k.

    Derivatives act in coefficient space; the reported value is a grid
    approximation (a lower bound of the true supremum) on the sampling grid
    of ``ctx``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    vec = _coefficient_input(f, ctx)
    vec, size = _derivative_headroom(vec, k, ctx)
    x = ctx.grid
    weight = (1.0 + x * x) ** (k / 2.0)
    deriv = ctx.derivative_matrix(size) if k > 0 else None
    current = np.pad(vec, (0, size - vec.size))
    best = 0.0
    for m in range(k + 1):
        values = ctx.synthesize(current)(x)
        best = max(best, float(np.max(np.abs(values) * weight)))
        if m < k:
            current = deriv @ current
    return best


def gevrey_seminorm(f, h, m, alpha, max_order, ctx) -> float:
    """Finite-order surrogate of the Gevrey seminorm.

    Maximum over derivative orders n <= max_order and grid points of
    h**n * exp(m |x|**(1/alpha)) * |f^(n)(x)| / n!**alpha, computed in log
    space (the exponential weight overflows doubles for small alpha).  The
    truncation order is a genuine cap: n!**alpha growth makes higher orders
    numerically meaningless in double precision.
    """
    if h <= 0 or m <= 0:
        raise ValueError("h and m must be positive")
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    if not 0 <= max_order <= 12:
        raise ValueError("max_order must lie in 0..12")
    vec = _coefficient_input(f, ctx)
    vec, size = _derivative_headroom(vec, max_order, ctx)
    x = ctx.grid
    log_weight = m * np.abs(x) ** (1.0 / alpha)
    deriv = ctx.derivative_matrix(size) if max_order > 0 else None
    current = np.pad(vec, (0, size - vec.size))
    best = -math.inf
    for n in range(max_order + 1):
        values = np.abs(ctx.synthesize(current)(x))
        with np.errstate(divide="ignore"):
            log_terms = np.log(values) + log_weight
        order_shift = n * math.log(h) - alpha * math.lgamma(n + 1)
        best = max(best, float(np.max(log_terms)) + order_shift)
        if n < max_order:
            current = deriv @ current
    return math.exp(best) if best < 700.0 else math.inf


# -- distribution functionals ----------------------------------------------------


@dataclass
class DistributionFunctional:
    """A functional represented by its coefficient sequence b_n = F(h_n)."""

    label: str
    coeffs: CoefficientVector
    growth_class: str = "tempered"


def delta_functional(count) -> DistributionFunctional:
    """Point evaluation at 0: b_n = h_{n-1}(0) in 1-based labeling.

    Odd internal indices vanish; even ones follow the two-step recurrence
    h_{j}(0) = -sqrt((j-1)/j) * h_{j-2}(0) seeded by h_0(0) = pi**-0.25.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    b = np.zeros(count)
    b[0] = math.pi ** -0.25
    for j in range(2, count, 2):
        b[j] = -math.sqrt((j - 1.0) / j) * b[j - 2]
    return DistributionFunctional("delta_0", CoefficientVector(b))


def coordinate_functional(index, count) -> DistributionFunctional:
    """The h_index coordinate functional (unit coefficient sequence)."""
    if not 0 <= index < count:
        raise ValueError(f"index {index} outside 0..{count - 1}")
    b = np.zeros(count)
    b[index] = 1.0
    return DistributionFunctional(f"coord_{index}", CoefficientVector(b))


def regular_functional(g, ctx, count=None, label="regular") -> DistributionFunctional:
    """Pairing against a fixed function g, ingested by quadrature."""
    return DistributionFunctional(label, ctx.hermite_coefficients(g, count))


# -- pairings --------------------------------------------------------------------


@dataclass
class ExpansionReport:
    """Ladder-indexed record of pairings, reconstruction errors, and decay fits."""

    ladder: list
    values: list | None = None
    residuals: list | None = None
    converged: bool | None = None
    diverged: bool = False
    errors_by_grade: dict | None = None
    decay: dict | None = None
    flags: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"ladder": list(self.ladder), "flags": dict(self.flags)}
        if self.values is not None:
            out["values"] = list(self.values)
        if self.residuals is not None:
            out["residuals"] = list(self.residuals)
        if self.converged is not None:
            out["converged"] = self.converged
        out["diverged"] = self.diverged
        if self.errors_by_grade is not None:
            out["errors_by_grade"] = {
                str(k): list(v) for k, v in self.errors_by_grade.items()
            }
        if self.decay is not None:
            out["decay"] = {name: cls.to_json() for name, cls in self.decay.items()}
        if self.extras:
            out["extras"] = self.extras
        return out


def _default_ladder(limit):
    ladder = []
    step = 16
    while step < limit:
        ladder.append(step)
        step *= 2
    ladder.append(limit)
    return ladder


def _partial_sums(terms, ladder):
    cumulative = np.concatenate([[0.0], np.cumsum(terms)])
    return [float(cumulative[t]) for t in ladder]


def _convergence(values):
    residuals = [abs(values[i] - values[i - 1]) for i in range(1, len(values))]
    if not residuals:
        return residuals, True, False
    converged = residuals[-1] <= PAIR_CONV_RTOL * (1.0 + abs(values[-1]))
    diverged = len(residuals) >= 2 and all(
        residuals[i + 1] > residuals[i] for i in range(len(residuals) - 1)
    )
    return residuals, converged, diverged


def pair(functional, f, truncations=None) -> ExpansionReport:
    """Partial sums of sum_n <f, h_n> b_n across a truncation ladder."""
    b = as_coefficients(functional.coeffs)
    c = _coefficient_input(f)
    limit = min(b.size, c.size)
    ladder = _default_ladder(limit) if truncations is None else sorted(set(int(t) for t in truncations))
    if ladder[0] < 1 or ladder[-1] > limit:
        raise ValueError(f"truncations must lie in 1..{limit}")
    values = _partial_sums(b[:limit] * c[:limit], ladder)
    residuals, converged, diverged = _convergence(values)
    return ExpansionReport(
        ladder, values=values, residuals=residuals,
        converged=converged, diverged=diverged,
    )


def frame_pair(
    functional,
    system,
    f,
    truncations=None,
    family=None,
    grade_cap=None,
    localization_order=2.0,
    localization_cap=1e6,
    check_localization=True,
) -> ExpansionReport:
    """Dual-frame pairings of a functional against f, both expansion orders.

    Computes g(e_n) = (C b)_n and g(dual_n) = (D b)_n and ladders the two
    series sum_n g(e_n) <f, dual_n> and sum_n g(dual_n) <f, e_n>; both must
    converge to the direct Hermite pairing.  With a weight family, per-grade
    dual-norm tail residuals of (g(e_n)) are reported as the dual-space
    convergence diagnostic.
    """
    m = system.ambient_dim
    b = as_coefficients(functional.coeffs)
    if b.size < m:
        b = np.pad(b, (0, m - b.size))
    b = b[:m]
    c = _coefficient_input(f)
    if c.size != m:
        raise ValueError(f"expected coefficients of length {m}, got {c.size}")

    flags = {}
    if check_localization:
        identity = FrameSystem(np.eye(m))
        report = check_polynomial_localization(
            cross_gram(system, identity), [localization_order], localization_cap
        )
        if not report.all_passed:
            flags["localization_warning"] = (
                f"envelope constant exceeds cap {localization_cap:g} "
                f"at order {localization_order:g}"
            )

    dual = canonical_dual(system)
    on_frame = system.coeffs @ b
    on_dual = dual.coeffs @ b
    coeff_frame = system.coeffs @ c
    coeff_dual = dual.coeffs @ c

    n = system.n_elements
    ladder = _default_ladder(n) if truncations is None else sorted(set(int(t) for t in truncations))
    if ladder[0] < 1 or ladder[-1] > n:
        raise ValueError(f"truncations must lie in 1..{n}")

    order_one = _partial_sums(on_frame * coeff_dual, ladder)
    order_two = _partial_sums(on_dual * coeff_frame, ladder)
    direct = float(b @ c)

    residuals_one, conv_one, div_one = _convergence(order_one)
    residuals_two, conv_two, div_two = _convergence(order_two)

    extras = {
        "order_dual_synthesis": order_two,
        "direct": direct,
        "order_agreement": abs(order_one[-1] - order_two[-1]),
        "direct_agreement": max(
            abs(order_one[-1] - direct), abs(order_two[-1] - direct)
        ),
    }
    if family is not None:
        cap = family.max_grade if grade_cap is None else int(grade_cap)
        tails = {}
        for k in range(cap + 1):
            tails[k] = [
                dual_pairing_bound(on_frame[t:], k, family) if t < n else 0.0
                for t in ladder
            ]
        extras["dual_norm_tails"] = {str(k): v for k, v in tails.items()}

    return ExpansionReport(
        ladder,
        values=order_one,
        residuals=residuals_one,
        converged=conv_one and conv_two,
        diverged=div_one or div_two,
        flags=flags,
        extras=extras,
    )


def induced_functional(system, a, family=None, grade_cap=None, norms_table=None) -> dict:
    """Hermite representation and graded bounds of f -> sum_n <f, e_n> a_n.

    The induced coefficient sequence is C^T a.  With a weight family the
    per-grade dual norms of (a_n) are reported; combined with analysis
    operator norms they bound the functional on each grade.
    """
    arr = as_coefficients(a)
    if arr.size != system.n_elements:
        raise ValueError(f"expected length {system.n_elements}, got {arr.size}")
    out = {"coeffs": CoefficientVector(system.coeffs.T @ arr)}
    if family is not None:
        cap = family.max_grade if grade_cap is None else int(grade_cap)
        dual_norms = {k: dual_pairing_bound(arr, k, family) for k in range(cap + 1)}
        out["dual_norms"] = dual_norms
        if norms_table is not None:
            out["grade_bounds"] = {
                k: dual_norms[k] * norms_table.grades[k]["analysis"]
                for k in range(cap + 1)
                if k in norms_table.grades
            }
    return out


# -- perturbed-basis construction -------------------------------------------------


def build_expol_frame(m, r, eps, rows=None) -> FrameSystem:
    """Riesz system e_n = h_n + sum_{i<=r} a_n^i h_{n+i} as an M x M matrix.

    Hypotheses enforced (1-based n): |a_n^i| <= eps_i for n >= 2,
    sum_i |a_1^i| <= 1, and sum_i eps_i < 1.  ``rows`` maps n to the
    r-vector (a_n^1, ..., a_n^r); the default is the constant row ``eps``.
    Band entries whose target index exceeds M are dropped and their squared
    mass is recorded as ``truncation_loss`` on the returned system.
    """
    m = int(m)
    r = int(r)
    if m < 1:
        raise ValueError("m must be >= 1")
    if r < 0:
        raise ExpolHypothesisError("r must be >= 0")
    eps = [float(e) for e in eps]
    if len(eps) != r:
        raise ExpolHypothesisError(f"r = {r} but {len(eps)} bounds eps were given")
    if any(e < 0 for e in eps):
        raise ExpolHypothesisError("eps entries must be >= 0")
    if sum(eps) >= 1.0:
        raise ExpolHypothesisError(
            f"sum of eps must be < 1 (got {sum(eps):g})"
        )

    coeffs = np.eye(m)
    loss = 0.0
    for n in range(1, m + 1):
        row = eps if rows is None else [float(v) for v in rows(n)]
        if len(row) != r:
            raise ExpolHypothesisError(f"row generator returned {len(row)} entries at n={n}")
        if n == 1:
            if sum(abs(v) for v in row) > 1.0 + 1e-12:
                raise ExpolHypothesisError(
                    f"sum_i |a_1^i| must be <= 1 (got {sum(abs(v) for v in row):g})"
                )
        else:
            for i, value in enumerate(row):
                if abs(value) > eps[i] + 1e-12:
                    raise ExpolHypothesisError(
                        f"|a_n^{i + 1}| = {abs(value):g} exceeds eps_{i + 1} = {eps[i]:g} at n = {n}"
                    )
        for i, value in enumerate(row, start=1):
            col = (n - 1) + i
            if col < m:
                coeffs[n - 1, col] = value
            else:
                loss += value * value

    system = FrameSystem(coeffs)
    system.truncation_loss = loss
    return system


# -- standard corpus --------------------------------------------------------------


def _gaussian(a):
    return lambda x: np.exp(-a * np.asarray(x, dtype=float) ** 2)


def _x_gaussian(x):
    x = np.asarray(x, dtype=float)
    return x * np.exp(-0.5 * x * x)


def _poly_gaussian(x):
    x = np.asarray(x, dtype=float)
    return (1.0 + x * x) * np.exp(-0.5 * x * x)


def _bump(width=3.0):
    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = np.abs(x) < width
        u = x[inside] / width
        with np.errstate(under="ignore"):
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - u * u))
        return out

    return f


def _gaussian_rate(a):
    # |<exp(-a x^2), h_2m>| decays geometrically with ratio |2a-1|/(2a+1)
    # per two indices; per-index log rate:
    return 0.5 * math.log((2.0 * a + 1.0) / abs(2.0 * a - 1.0)) if a != 0.5 else math.inf


def corpus_standard(kind, ctx, alpha=1.0) -> list:
    """Standard ingested corpus at the truncation of ``ctx``.

    h_0..h_3 as exact unit vectors; Gaussians exp(-a x^2) for a in
    {1/2, 1, 2}; the polynomial Gaussians x exp(-x^2/2) and
    (1+x^2) exp(-x^2/2); and, for the Schwartz corpus only, a compactly
    supported smooth bump.  Expected decay metadata rides along for
    cross-checks.
    """
    if kind not in (SCHWARTZ, GEVREY):
        raise ValueError("kind must be 'schwartz' or 'gevrey'")
    m = ctx.max_index
    claimed = SCHWARTZ if kind == SCHWARTZ else GEVREY
    members = []
    for j in range(min(4, m)):
        unit = np.zeros(m)
        unit[j] = 1.0
        members.append(
            TestFunction(
                f"h{j}",
                coeffs=CoefficientVector(unit),
                claimed_class=claimed,
                alpha=alpha if kind == GEVREY else None,
                expected_decay={"finitely_supported": True},
            )
        )
    for a in (0.5, 1.0, 2.0):
        rate = _gaussian_rate(a)
        expected = (
            {"finitely_supported": True}
            if math.isinf(rate)
            else {"model": "exponential", "rate": rate}
        )
        members.append(
            TestFunction(
                f"gauss_a{a:g}",
                func=_gaussian(a),
                claimed_class=claimed,
                alpha=alpha if kind == GEVREY else None,
                expected_decay=expected,
            )
        )
    members.append(
        TestFunction(
            "xgauss",
            func=_x_gaussian,
            claimed_class=claimed,
            alpha=alpha if kind == GEVREY else None,
            expected_decay={"finitely_supported": True},
        )
    )
    members.append(
        TestFunction(
            "polygauss",
            func=_poly_gaussian,
            claimed_class=claimed,
            alpha=alpha if kind == GEVREY else None,
            expected_decay={"finitely_supported": True},
        )
    )
    if kind == SCHWARTZ:
        members.append(
            TestFunction(
                "bump",
                func=_bump(),
                claimed_class=SCHWARTZ,
                expected_decay={"model": "any_rapid"},
            )
        )
    return [ingest(tf, ctx) for tf in members]


def load_corpus_manifest(path, ctx) -> list:
    """Corpus from a JSON manifest: a list of {label, kind, params | coeff_file}."""
    path = Path(path)
    entries = json.loads(path.read_text())
    if not isinstance(entries, list):
        raise ValueError("corpus manifest must be a JSON list")
    members = []
    for entry in entries:
        label = entry["label"]
        kind = entry["kind"]
        params = entry.get("params", {})
        if kind == "hermite":
            m = ctx.max_index
            unit = np.zeros(m)
            unit[int(params["index"])] = 1.0
            tf = TestFunction(label, coeffs=CoefficientVector(unit))
        elif kind == "gaussian":
            tf = TestFunction(label, func=_gaussian(float(params["a"])))
        elif kind == "x_gaussian":
            tf = TestFunction(label, func=_x_gaussian)
        elif kind == "poly_gaussian":
            tf = TestFunction(label, func=_poly_gaussian)
        elif kind == "bump":
            tf = TestFunction(label, func=_bump(float(params.get("width", 3.0))))
        elif kind == "coeff_file":
            data = json.loads((path.parent / entry["coeff_file"]).read_text())
            tf = TestFunction(label, coeffs=CoefficientVector(np.asarray(data, dtype=float)))
        else:
            raise ValueError(f"unknown corpus entry kind {kind!r}")
        members.append(ingest(tf, ctx))
    return members


# -- expansion experiments ----------------------------------------------------------


def _noise_floor(values):
    peak = float(np.max(np.abs(values)))
    return NOISE_FLOOR_REL * peak if peak > 0 else None


def _classify(values, beta):
    return classify_decay(values, beta=beta, noise_floor=_noise_floor(values))


def _decay_beta(family):
    return family.beta if family.beta is not None else 0.5


def _rate_agreement(reference, other):
    """Relative rate difference where both rates are finite; None otherwise."""
    if math.isinf(reference.rate) or math.isinf(other.rate):
        return None
    if reference.rate <= 0 or other.rate <= 0:
        return None
    return abs(other.rate - reference.rate) / reference.rate


def verify_expansion_theorem(
    system, corpus, family, grade_cap, cutoffs=None, threads=1
) -> ExpansionReport:
    """Graded reconstruction ladders, decay transfer, and empirical frame constants.

    Per corpus member f (ingested at the system truncation M):

    * graded Cauchy residuals of the dual expansion: the weighted norms
      ||sum_{n>L} <f, dual_n> e_n||_k per grade k <= grade_cap and cutoff L
      (the expansion tail is summed directly, so large weights amplify no
      cancellation noise), plus the relative l2 gap between the full
      expansion and f;
    * decay classifications of the Hermite, frame, and dual-frame
      coefficient sequences, with model agreement and relative rate gaps;
    * the per-grade ratios ||(<f, e_n>)||_k / ||f||_k whose corpus extremes
      are the empirical frame-inequality constants (A_k, B_k).
    """
    if not corpus:
        raise ValueError("corpus is empty")
    if grade_cap > family.max_grade:
        raise ValueError(f"grade cap {grade_cap} exceeds family max {family.max_grade}")
    m = system.ambient_dim
    dual = canonical_dual(system)
    if cutoffs is None:
        cutoffs = sorted({max(16, m // 8), max(16, m // 4), max(16, m // 2), m})
    else:
        cutoffs = sorted(set(int(t) for t in cutoffs))
        if cutoffs[0] < 1 or cutoffs[-1] > m:
            raise ValueError(f"cutoffs must lie in 1..{m}")
    beta = _decay_beta(family)
    grades = range(grade_cap + 1)

    def run_one(tf):
        c = tf.coefficient_values()
        if c.size != m:
            raise ValueError(f"{tf.label}: ingested at {c.size}, expected {m}")
        coeff_frame = system.coeffs @ c
        coeff_dual = dual.coeffs @ c
        full = system.coeffs.T @ coeff_dual
        scale = float(np.linalg.norm(c))
        rel_l2 = float(np.linalg.norm(full - c)) / (scale if scale > 0 else 1.0)
        errors = {k: [] for k in grades}
        for cut in cutoffs:
            tail = system.coeffs[cut:].T @ coeff_dual[cut:]
            for k in grades:
                errors[k].append(weighted_norm(tail, k, family))
        decay = {
            "hermite": _classify(c, beta),
            "frame": _classify(coeff_frame, beta),
            "dual": _classify(coeff_dual, beta),
        }
        ratios = {}
        for k in grades:
            denom = weighted_norm(c, k, family)
            ratios[k] = weighted_norm(coeff_frame, k, family) / denom if denom > 0 else None
        total = float(c @ c)
        head = float(c[: (3 * m) // 4] @ c[: (3 * m) // 4])
        transfer = {
            name: {
                "model_match": decay[name].model == decay["hermite"].model,
                "rate_gap": _rate_agreement(decay["hermite"], decay[name]),
                "either_finitely_supported": (
                    decay["hermite"].finitely_supported()
                    or decay[name].finitely_supported()
                ),
            }
            for name in ("frame", "dual")
        }
        return {
            "label": tf.label,
            "errors_by_grade": errors,
            "final_rel_l2": rel_l2,
            "decay": decay,
            "ratios": ratios,
            "tail_energy": 1.0 - head / total if total > 0 else 0.0,
            "transfer": transfer,
            "coeff_profile": {
                "hermite": np.abs(c),
                "frame": np.abs(coeff_frame),
                "dual": np.abs(coeff_dual),
            },
        }

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, corpus))
    else:
        results = [run_one(tf) for tf in corpus]

    constants = {}
    for k in grades:
        ratios = [r["ratios"][k] for r in results if r["ratios"][k] is not None]
        constants[k] = (min(ratios), max(ratios)) if ratios else (None, None)

    report = ExpansionReport(list(cutoffs))
    report.extras = {
        "functions": {r["label"]: r for r in results},
        "frame_constants": {str(k): list(v) for k, v in constants.items()},
        "grade_cap": grade_cap,
    }
    report.errors_by_grade = {
        k: [
            max(r["errors_by_grade"][k][i] for r in results)
            for i in range(len(cutoffs))
        ]
        for k in grades
    }
    report.flags["max_final_rel_l2"] = max(r["final_rel_l2"] for r in results)
    return report

"""End-to-end experiment runner: build, verify, and report.

One run walks the configured truncation ladder; at each truncation it builds
the frame, checks Riesz/frame bounds, localization (including the canonical
dual), runs the expansion suite and the functional pairings, and estimates
graded operator norms.  Cross-truncation trends stand in for the
infinite-dimensional claims.  Outputs: report.json (full, deterministic for
a fixed config + seed), summary.csv (frozen schema), and optional figures.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._json import jsonable
from .config import ConfigError, config_to_dict
from .frames import (
    FrameSystem,
    canonical_dual,
    frame_bounds,
    frame_inequality_margins,
    graded_operator_norms,
    is_riesz_basis,
    unconditionality_probe,
)
from .genfunc import (
    corpus_standard,
    build_expol_frame,
    coordinate_functional,
    delta_functional,
    frame_pair,
    load_corpus_manifest,
    regular_functional,
    verify_expansion_theorem,
)
from .hermite import HermiteContext
from .localization import (
    check_exponential_localization,
    check_polynomial_localization,
    check_self_localization,
    cross_gram,
)
from .matrixio import load_matrix
from .seqspaces import WeightFamily

__all__ = ["RunResult", "run_experiment"]

CSV_COLUMNS = ("label", "grade", "truncation", "metric", "value")


@dataclass
class RunResult:
    exit_code: int
    report: dict
    failures: list = field(default_factory=list)
    files: list = field(default_factory=list)


def _weight_family(config):
    spec = config.weights
    if spec["kind"] == "polynomial":
        return WeightFamily("polynomial", int(spec["max_grade"]))
    return WeightFamily("sub_exponential", int(spec["max_grade"]), float(spec["beta"]))


def _build_frame(config, m):
    spec = config.frame
    kind = spec["kind"]
    if kind == "identity":
        return FrameSystem(np.eye(m))
    if kind == "expol":
        eps = [float(e) for e in spec.get("eps", [])]
        return build_expol_frame(m, spec.get("r", len(eps)), eps)
    matrix = load_matrix(spec["path"])
    if matrix.shape[1] != m:
        raise ConfigError(
            f"matrix frame has ambient dimension {matrix.shape[1]}; the ladder "
            f"entry {m} must match (external matrices are not truncated)"
        )
    return FrameSystem(matrix)


def _build_corpus(config, ctx):
    if "manifest" in config.corpus:
        return load_corpus_manifest(config.corpus["manifest"], ctx)
    kind = config.corpus["kind"]
    alpha = float(config.corpus.get("alpha", 1.0))
    return corpus_standard(kind, ctx, alpha=alpha)


def _build_functional(spec, ctx):
    kind = spec["kind"]
    m = ctx.max_index
    if kind == "delta":
        return delta_functional(m)
    if kind == "coordinate":
        return coordinate_functional(int(spec["index"]), m)
    a = float(spec["a"])
    return regular_functional(
        lambda x: np.exp(-a * np.asarray(x, dtype=float) ** 2),
        ctx,
        label=f"gauss_pairing_a{a:g}",
    )


def _relative_spread(values):
    finite = [v for v in values if v is not None and math.isfinite(v)]
    if len(finite) < 2:
        return 0.0
    low, high = min(finite), max(finite)
    if high <= 0.0:
        return 0.0
    return (high - low) / high


def _run_truncation(config, m, family, rng):
    ctx = HermiteContext(m)
    system = _build_frame(config, m)
    orders = [float(s) for s in config.localization.get("orders", [])]
    rates = [float(s) for s in config.localization.get("rates", [])]
    cap = float(config.localization.get("cap", 1e6))

    riesz = is_riesz_basis(system)
    bounds = frame_bounds(system)
    lower_slack, upper_slack = frame_inequality_margins(
        system, bounds, n_probes=64, rng=rng
    )

    identity = FrameSystem(np.eye(m))
    gram = cross_gram(system, identity)
    loc_poly = check_polynomial_localization(gram, orders, cap) if orders else None
    loc_exp = check_exponential_localization(gram, rates, cap) if rates else None

    dual = canonical_dual(system)
    dual_gram = cross_gram(dual, identity)
    dual_loc = check_polynomial_localization(dual_gram, orders, cap) if orders else None

    biorthogonality = None
    self_poly = self_exp = None
    if riesz:
        biorthogonality = float(
            np.max(np.abs(system.coeffs @ dual.coeffs.T - np.eye(m)))
        )
        if orders:
            self_poly = check_self_localization(system, "polynomial", orders, cap)
        if rates:
            self_exp = check_self_localization(system, "exponential", rates, cap)

    corpus = _build_corpus(config, ctx)
    expansion = verify_expansion_theorem(
        system, corpus, family, config.grade_cap, threads=config.threads
    )

    norms = graded_operator_norms(system, family, config.grade_cap, rng=rng)

    pairings = {}
    for spec in config.functionals:
        functional = _build_functional(spec, ctx)
        per_function = {}
        for tf in corpus:
            report = frame_pair(
                functional, system, tf, family=family,
                grade_cap=config.grade_cap, check_localization=False,
            )
            point_value = None
            if functional.label == "delta_0":
                point_value = ctx.synthesize(tf.coefficient_values())(0.0)
                report.extras["point_value"] = point_value
                report.extras["point_gap"] = max(
                    abs(report.values[-1] - point_value),
                    abs(report.extras["order_dual_synthesis"][-1] - point_value),
                )
            if functional.label.startswith("coord_"):
                idx = int(functional.label.split("_")[1])
                coeff = float(tf.coefficient_values()[idx])
                report.extras["coordinate_value"] = coeff
                report.extras["coordinate_gap"] = max(
                    abs(report.values[-1] - coeff),
                    abs(report.extras["order_dual_synthesis"][-1] - coeff),
                )
            per_function[tf.label] = report
        pairings[functional.label] = per_function

    probe = rng.standard_normal(m)
    deviations = unconditionality_probe(system, probe, n_permutations=20, rng=rng)

    return {
        "truncation": m,
        "frame": {
            "kind": config.frame["kind"],
            "n_elements": system.n_elements,
            "ambient_dim": system.ambient_dim,
            "truncation_loss": system.truncation_loss,
            "bounds": bounds,
            "riesz": riesz,
            "inequality_slack": {"lower": lower_slack, "upper": upper_slack},
            "biorthogonality": biorthogonality,
            "dual_solve_residual": system.dual_residual,
            "unconditionality_max_dev": max(deviations),
        },
        "localization": {
            "polynomial": loc_poly,
            "exponential": loc_exp,
            "dual_polynomial": dual_loc,
            "self_polynomial": self_poly,
            "self_exponential": self_exp,
        },
        "expansion": expansion,
        "operator_norms": norms,
        "pairings": pairings,
    }


def _trends(runs, orders):
    by_m = [run["truncation"] for run in runs]
    trends = {"ladder": by_m}

    bounds = [(run["frame"]["bounds"].lower, run["frame"]["bounds"].upper) for run in runs]
    trends["bounds"] = {
        "lower": [b[0] for b in bounds],
        "upper": [b[1] for b in bounds],
        "lower_spread": _relative_spread([b[0] for b in bounds]),
        "upper_spread": _relative_spread([b[1] for b in bounds]),
    }

    dual_stability = {}
    for s in orders:
        constants = []
        for run in runs:
            report = run["localization"]["dual_polynomial"]
            if report is not None:
                constants.append(report.constant_for(s))
        dual_stability[str(s)] = {
            "constants": constants,
            "spread": _relative_spread(constants),
        }
    trends["dual_localization"] = dual_stability

    constants = {}
    grade_keys = runs[0]["expansion"].extras["frame_constants"].keys()
    for k in grade_keys:
        lows = [run["expansion"].extras["frame_constants"][k][0] for run in runs]
        highs = [run["expansion"].extras["frame_constants"][k][1] for run in runs]
        constants[k] = {
            "lower": lows,
            "upper": highs,
            "lower_spread": _relative_spread(lows),
            "upper_spread": _relative_spread(highs),
        }
    trends["frame_constants"] = constants
    return trends


def _evaluate_gates(config, runs, trends):
    tol = config.tolerances
    gates = []

    def gate(name, passed, detail):
        gates.append({"name": name, "passed": bool(passed), "detail": detail})

    worst_lower = min(run["frame"]["inequality_slack"]["lower"] for run in runs)
    worst_upper = min(run["frame"]["inequality_slack"]["upper"] for run in runs)
    gate(
        "frame_inequality",
        worst_lower >= -tol["frame_inequality_slack"]
        and worst_upper >= -tol["frame_inequality_slack"],
        f"worst probe slacks {worst_lower:.3e} / {worst_upper:.3e}",
    )

    if config.frame["kind"] in ("expol", "identity"):
        all_riesz = all(bool(run["frame"]["riesz"]) for run in runs)
        gate("riesz_basis", all_riesz, "square system with invertible Gram matrix")
        worst_bi = max(run["frame"]["biorthogonality"] for run in runs)
        gate(
            "biorthogonality",
            worst_bi <= tol["biorthogonality"],
            f"max |C dual^T - I| = {worst_bi:.3e}",
        )

    worst_dual = max(run["frame"]["dual_solve_residual"] or 0.0 for run in runs)
    gate("dual_solve_residual", worst_dual <= tol["dual_solve"],
         f"max relative dual residual {worst_dual:.3e}")

    for key, label in (("polynomial", "localization_polynomial"),
                       ("exponential", "localization_exponential")):
        reports = [run["localization"][key] for run in runs]
        if all(r is None for r in reports):
            continue
        ok = all(r.all_passed for r in reports if r is not None)
        gate(label, ok, "all envelope constants within cap")

    if config.frame["kind"] == "expol":
        r = len(config.frame.get("eps", []))
        ok = True
        worst = 0.0
        for run in runs:
            poly = run["localization"]["polynomial"]
            if poly is None:
                continue
            for entry in poly.constants:
                envelope = (1.0 + r) ** entry.order
                worst = max(worst, entry.constant / envelope)
                ok = ok and entry.constant <= envelope * (1.0 + 1e-9)
            expo = run["localization"]["exponential"]
            if expo is not None:
                for entry in expo.constants:
                    envelope = math.exp(entry.order * r)
                    ok = ok and entry.constant <= envelope * (1.0 + 1e-9)
        gate("expol_envelope", ok,
             f"banded envelope caps (worst polynomial ratio {worst:.3f})")

    worst_recon = max(run["expansion"].flags["max_final_rel_l2"] for run in runs)
    gate("reconstruction_error", worst_recon <= tol["reconstruction"],
         f"max relative l2 reconstruction error {worst_recon:.3e}")

    transfer_ok = True
    rate_worst = 0.0
    for run in runs:
        for label, result in run["expansion"].extras["functions"].items():
            for side in ("frame", "dual"):
                entry = result["transfer"][side]
                if not entry["model_match"]:
                    transfer_ok = False
                gap = entry["rate_gap"]
                if gap is not None:
                    rate_worst = max(rate_worst, gap)
                    if gap > tol["decay_rate_agreement"]:
                        transfer_ok = False
    gate("decay_transfer", transfer_ok,
         f"model classes agree; worst finite-rate gap {rate_worst:.3f}")

    finite_constants = True
    for run in runs:
        for k, (low, high) in run["expansion"].extras["frame_constants"].items():
            if low is None or not (low > 0.0 and math.isfinite(high)):
                finite_constants = False
    gate("frame_constants", finite_constants,
         "empirical graded frame constants positive and finite")

    pair_ok = True
    worst_pair = 0.0
    worst_order = 0.0
    worst_coord = 0.0
    for run in runs:
        for functional, per_function in run["pairings"].items():
            for label, report in per_function.items():
                worst_order = max(worst_order, report.extras["order_agreement"])
                worst_pair = max(worst_pair, report.extras["direct_agreement"])
                if "point_gap" in report.extras:
                    worst_pair = max(worst_pair, report.extras["point_gap"])
                if "coordinate_gap" in report.extras:
                    worst_coord = max(worst_coord, report.extras["coordinate_gap"])
    pair_ok = (worst_pair <= tol["pairing"]
               and worst_order <= tol["order_agreement"]
               and worst_coord <= tol["coordinate_exactness"])
    gate("pairing_agreement", pair_ok,
         f"worst pairing gap {worst_pair:.3e}, order gap {worst_order:.3e}, "
         f"coordinate gap {worst_coord:.3e}")

    if len(runs) >= 2:
        spreads = [v["spread"] for v in trends["dual_localization"].values()]
        gate("stability_dual_localization",
             all(s <= tol["stability"] for s in spreads),
             f"max dual envelope spread {max(spreads) if spreads else 0.0:.3f}")
        const_spreads = []
        for entry in trends["frame_constants"].values():
            const_spreads.extend([entry["lower_spread"], entry["upper_spread"]])
        gate("stability_frame_constants",
             all(s <= tol["stability"] for s in const_spreads),
             f"max frame-constant spread {max(const_spreads):.3f}")

    norm_ok = all(
        math.isfinite(value) and value > 0.0
        for run in runs
        for entry in run["operator_norms"].grades.values()
        for value in entry.values()
    )
    gate("operator_norms_finite", norm_ok, "all graded operator norms finite and positive")

    return gates


def _summary_rows(runs):
    rows = []

    def add(label, grade, truncation, metric, value):
        rows.append((label, grade, truncation, metric, value))

    for run in runs:
        m = run["truncation"]
        fr = run["frame"]
        add("frame", "", m, "lower_bound", fr["bounds"].lower)
        add("frame", "", m, "upper_bound", fr["bounds"].upper)
        add("frame", "", m, "condition", fr["bounds"].condition)
        add("frame", "", m, "rank", fr["bounds"].rank)
        add("frame", "", m, "is_riesz_basis", int(bool(fr["riesz"])))
        if fr["biorthogonality"] is not None:
            add("frame", "", m, "biorthogonality", fr["biorthogonality"])
        add("frame", "", m, "unconditionality_max_dev", fr["unconditionality_max_dev"])

        for key in ("polynomial", "exponential", "dual_polynomial",
                    "self_polynomial", "self_exponential"):
            report = run["localization"][key]
            if report is None:
                continue
            for entry in report.constants:
                add("localization", "", m, f"{key}_C[{entry.order:g}]", entry.constant)

        for k, values in run["operator_norms"].grades.items():
            for op_name, value in values.items():
                add("operator", k, m, f"norm_{op_name}", value)

        expansion = run["expansion"]
        for label, result in expansion.extras["functions"].items():
            add(label, "", m, "reconstruction_rel_l2", result["final_rel_l2"])
            for k, errors in result["errors_by_grade"].items():
                for cut, err in zip(expansion.ladder, errors):
                    add(label, k, m, f"expansion_tail_norm[n<={cut}]", err)
            for side in ("hermite", "frame", "dual"):
                cls = result["decay"][side]
                add(label, "", m, f"decay_model_{side}", cls.model)
                add(label, "", m, f"decay_rate_{side}",
                    "inf" if math.isinf(cls.rate) else cls.rate)
            add(label, "", m, "tail_energy", result["tail_energy"])
        for k, (low, high) in expansion.extras["frame_constants"].items():
            add("corpus", k, m, "frame_constant_lower", low)
            add("corpus", k, m, "frame_constant_upper", high)

        for functional, per_function in run["pairings"].items():
            for label, report in per_function.items():
                add(label, "", m, f"pairing_{functional}", report.values[-1])
                add(label, "", m, f"pairing_{functional}_order_gap",
                    report.extras["order_agreement"])
    return rows


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def run_experiment(config) -> RunResult:
    """Execute one configured experiment and write its report files."""
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    family = _weight_family(config)
    rng = np.random.default_rng(config.seed)

    runs = [_run_truncation(config, m, family, rng) for m in config.ladder]
    orders = [float(s) for s in config.localization.get("orders", [])]
    trends = _trends(runs, orders)
    gates = _evaluate_gates(config, runs, trends)
    failures = [g["name"] for g in gates if not g["passed"]]

    report = {
        "engine": {
            "name": "hermframe",
            "version": __version__,
            "index_origin": "one_based (reports); storage is zero_based",
        },
        "config": config_to_dict(config),
        "runs": runs,
        "trends": trends,
        "gates": gates,
        "passed": not failures,
    }
    report_json = jsonable(report)

    report_path = outdir / "report.json"
    report_path.write_text(
        json.dumps(report_json, indent=2, sort_keys=True, allow_nan=False) + "\n"
    )
    csv_path = outdir / "summary.csv"
    _write_csv(csv_path, _summary_rows(runs))
    files = [report_path, csv_path]

    if config.figures:
        from .plots import render_figures

        files.extend(render_figures(report_json, outdir))

    return RunResult(0 if not failures else 1, report_json, failures, files)

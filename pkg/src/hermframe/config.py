"""Experiment configuration: validation, serialization, and canned presets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "ConfigError",
    "DEFAULT_TOLERANCES",
    "ExperimentConfig",
    "PRESET_NAMES",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "preset",
    "save_config",
]


class ConfigError(ValueError):
    """The experiment configuration is invalid."""


DEFAULT_TOLERANCES = {
    "reconstruction": 1e-8,
    "biorthogonality": 1e-10,
    "pairing": 1e-8,
    "order_agreement": 1e-10,
    "coordinate_exactness": 1e-12,
    "frame_inequality_slack": 1e-9,
    "stability": 0.15,
    "decay_rate_agreement": 0.20,
    "dual_solve": 1e-8,
}

PRESET_NAMES = ("prophb", "prophb2", "riesz_selfloc", "bounds_ladder")

_FRAME_KINDS = ("expol", "identity", "matrix")
_WEIGHT_KINDS = ("polynomial", "sub_exponential")


@dataclass
class ExperimentConfig:
    """Everything one run needs; identical config + seed gives identical reports."""

    ladder: list
    frame: dict
    weights: dict
    grade_cap: int
    localization: dict
    corpus: dict
    functionals: list
    output_dir: str
    seed: int
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    figures: bool = True
    threads: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.ladder:
            raise ConfigError("ladder must be a nonempty list of truncations")
        ladder = [int(m) for m in self.ladder]
        if any(m < 16 for m in ladder):
            raise ConfigError("ladder truncations must be >= 16")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("ladder must be strictly increasing")
        self.ladder = ladder

        kind = self.frame.get("kind")
        if kind not in _FRAME_KINDS:
            raise ConfigError(f"frame kind must be one of {_FRAME_KINDS}, got {kind!r}")
        if kind == "expol":
            eps = self.frame.get("eps", [])
            r = self.frame.get("r", len(eps))
            if r != len(eps):
                raise ConfigError("frame.r must equal len(frame.eps)")
        if kind == "matrix" and not self.frame.get("path"):
            raise ConfigError("matrix frames need frame.path")

        wkind = self.weights.get("kind")
        if wkind not in _WEIGHT_KINDS:
            raise ConfigError(f"weights kind must be one of {_WEIGHT_KINDS}")
        max_grade = int(self.weights.get("max_grade", 0))
        if max_grade < 0:
            raise ConfigError("weights.max_grade must be >= 0")
        if wkind == "sub_exponential":
            beta = self.weights.get("beta")
            if beta is None or not 0.0 < float(beta) < 1.0:
                raise ConfigError("sub_exponential weights need beta in (0, 1)")
        if not 0 <= int(self.grade_cap) <= max_grade:
            raise ConfigError("grade_cap must lie in 0..weights.max_grade")

        if not self.localization.get("orders") and not self.localization.get("rates"):
            raise ConfigError("localization needs orders and/or rates")

        ckind = self.corpus.get("kind")
        if "manifest" not in self.corpus and ckind not in ("schwartz", "gevrey"):
            raise ConfigError("corpus needs kind 'schwartz'/'gevrey' or a manifest path")

        for f in self.functionals:
            fk = f.get("kind")
            if fk not in ("delta", "coordinate", "gaussian"):
                raise ConfigError(f"unknown functional kind {fk!r}")
            if fk == "coordinate" and "index" not in f:
                raise ConfigError("coordinate functionals need an index")
            if fk == "gaussian" and "a" not in f:
                raise ConfigError("gaussian functionals need the width parameter a")

        if int(self.seed) < 0:
            raise ConfigError("seed must be >= 0")
        self.seed = int(self.seed)
        self.grade_cap = int(self.grade_cap)
        self.threads = max(1, int(self.threads))
        merged = dict(DEFAULT_TOLERANCES)
        merged.update(self.tolerances or {})
        self.tolerances = merged


def config_to_dict(config) -> dict:
    return {
        "ladder": list(config.ladder),
        "frame": dict(config.frame),
        "weights": dict(config.weights),
        "grade_cap": config.grade_cap,
        "localization": dict(config.localization),
        "corpus": dict(config.corpus),
        "functionals": [dict(f) for f in config.functionals],
        "output_dir": config.output_dir,
        "seed": config.seed,
        "tolerances": dict(config.tolerances),
        "figures": config.figures,
        "threads": config.threads,
    }


def config_from_dict(data) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            ladder=data["ladder"],
            frame=data["frame"],
            weights=data["weights"],
            grade_cap=data["grade_cap"],
            localization=data["localization"],
            corpus=data["corpus"],
            functionals=data.get("functionals", []),
            output_dir=data.get("output_dir", "hermframe-out"),
            seed=data.get("seed", 0),
            tolerances=data.get("tolerances", {}),
            figures=data.get("figures", True),
            threads=data.get("threads", 1),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc.args[0]!r}") from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(data)


def save_config(config, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2, sort_keys=True) + "\n")


def preset(name) -> ExperimentConfig:
    """Canned verification suites; unknown names raise ConfigError."""
    common = {
        "functionals": [{"kind": "delta"}, {"kind": "coordinate", "index": 5}],
        "seed": 20240801,
        "figures": True,
        "threads": 1,
    }
    if name == "prophb":
        # Polynomial localization suite on the Schwartz-type corpus.
        return ExperimentConfig(
            ladder=[64, 128, 256],
            frame={"kind": "expol", "r": 2, "eps": [0.2, 0.1]},
            weights={"kind": "polynomial", "max_grade": 4},
            grade_cap=4,
            localization={"orders": [1, 2, 4, 8], "rates": [0.5, 1.0, 2.0], "cap": 1e6},
            corpus={"kind": "schwartz"},
            output_dir="runs/prophb",
            **common,
        )
    if name == "prophb2":
        # Exponential localization suite with sub-exponential weights
        # (beta = 1/(2*alpha), default alpha = 1).
        alpha = 1.0
        return ExperimentConfig(
            ladder=[64, 128, 256],
            frame={"kind": "expol", "r": 2, "eps": [0.2, 0.1]},
            weights={"kind": "sub_exponential", "beta": 1.0 / (2.0 * alpha), "max_grade": 4},
            grade_cap=4,
            localization={"orders": [1, 2, 4, 8], "rates": [0.5, 1.0, 2.0], "cap": 1e6},
            corpus={"kind": "gevrey", "alpha": alpha},
            output_dir="runs/prophb2",
            **common,
        )
    if name == "riesz_selfloc":
        # Self-localization of a perturbed Riesz basis (Gram and dual Gram).
        return ExperimentConfig(
            ladder=[128, 256],
            frame={"kind": "expol", "r": 1, "eps": [0.3]},
            weights={"kind": "polynomial", "max_grade": 4},
            grade_cap=2,
            localization={"orders": [1, 2, 4, 8], "rates": [0.5, 1.0, 2.0], "cap": 1e6},
            corpus={"kind": "schwartz"},
            output_dir="runs/riesz_selfloc",
            **common,
        )
    if name == "bounds_ladder":
        # Frame-bound stabilization across the documented default ladder.
        return ExperimentConfig(
            ladder=[64, 128, 256],
            frame={"kind": "expol", "r": 1, "eps": [0.3]},
            weights={"kind": "polynomial", "max_grade": 4},
            grade_cap=2,
            localization={"orders": [1, 2, 4], "rates": [0.5, 1.0], "cap": 1e6},
            corpus={"kind": "schwartz"},
            output_dir="runs/bounds_ladder",
            **common,
        )
    raise ConfigError(f"unknown preset {name!r}; choose one of {PRESET_NAMES}")

"""Command-line entry point: run experiments, emit presets, inspect matrices.

Exit codes: 0 all gates passed, 1 a numerical gate failed (named on stderr),
2 configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ConfigError, PRESET_NAMES, load_config, preset, save_config
from .genfunc import ExpolHypothesisError

__all__ = ["entry", "main"]


def _cmd_run(args):
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output_dir = args.out
    if args.no_figures:
        config.figures = False
    threads = args.threads or os.environ.get("HERMFRAME_THREADS")
    if threads is not None:
        config.threads = max(1, int(threads))
    config.validate()

    from .experiment import run_experiment

    result = run_experiment(config)
    for gate in result.report["gates"]:
        status = "PASS" if gate["passed"] else "FAIL"
        print(f"[{status}] {gate['name']}: {gate['detail']}")
    for path in result.files:
        print(f"wrote {path}")
    if result.failures:
        print(f"failed gates: {', '.join(result.failures)}", file=sys.stderr)
    return result.exit_code


def _cmd_preset(args):
    config = preset(args.name)
    if args.out:
        save_config(config, args.out)
        print(f"wrote {args.out}")
    else:
        from .config import config_to_dict

        print(json.dumps(config_to_dict(config), indent=2, sort_keys=True))
    return 0


def _cmd_inspect(args):
    from .frames import FrameSystem, frame_bounds, is_riesz_basis
    from .matrixio import load_matrix

    matrix = load_matrix(args.matrix)
    system = FrameSystem(matrix)
    bounds = frame_bounds(system)
    riesz = is_riesz_basis(system)
    print(f"matrix: {system.n_elements} x {system.ambient_dim}")
    print(f"frame bounds: lower={bounds.lower:.12g} upper={bounds.upper:.12g}")
    print(f"rank: {bounds.rank}  condition: {bounds.condition:.6g}")
    print(
        f"riesz basis: {bool(riesz)}  "
        f"(gram eigenvalues {riesz.gram_min:.6g} .. {riesz.gram_max:.6g})"
    )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hermframe",
        description="Frame verification experiments over Hermite expansions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", help="path to the experiment config")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--out", help="override the output directory")
    run_p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    run_p.add_argument("--threads", type=int, help="corpus worker threads")
    run_p.set_defaults(func=_cmd_run)

    pre_p = sub.add_parser("preset", help="emit a canned experiment config")
    pre_p.add_argument("name", choices=PRESET_NAMES)
    pre_p.add_argument("--out", help="write the config to a file instead of stdout")
    pre_p.set_defaults(func=_cmd_preset)

    ins_p = sub.add_parser("inspect", help="summarize a frame matrix file")
    ins_p.add_argument("matrix", help="matrix file (JSON or FRMX binary)")
    ins_p.set_defaults(func=_cmd_inspect)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ExpolHypothesisError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():  # console-script shim
    raise SystemExit(main())


if __name__ == "__main__":
    entry()

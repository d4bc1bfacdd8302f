"""Command-line front end.

Exit codes: 0 all checks passed, 1 verification or reconstruction failure,
2 usage or file-format error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiment import ExperimentConfig, parse_config, run_roundtrip
from .oracles import Flag, GroundTruth, isometric_embedding, make_oracle, read_truth, write_truth
from .reconstruct import ProbeError, read_operator, reconstruct, write_operator
from .verification import check_operator_law, check_ray_compatibility, distance_up_to_global_phase

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"wigner: {msg}", file=sys.stderr)


def _load(reader, path):
    try:
        return reader(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_generate(args) -> int:
    if args.m < args.n:
        raise UsageError(f"no isometry into smaller space (n={args.n}, m={args.m})")
    flag = Flag.parse(args.flag)
    if flag is Flag.DEGENERATE:
        raise UsageError("flag must be linear or antilinear")
    truth = GroundTruth(isometric_embedding(args.n, args.m, args.seed), flag, args.seed)
    write_truth(truth, args.out)
    print(f"wrote {args.out}: {truth.dim_out}x{truth.dim_in} {flag.value}")
    return EXIT_OK


def _load_truth(path) -> GroundTruth:
    truth = _load(read_truth, path)
    try:
        truth.validate(1e-10)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return truth


def cmd_reconstruct(args) -> int:
    truth = _load_truth(args.truth)
    if args.seed is not None:
        truth = GroundTruth(truth.matrix, truth.flag, args.seed)
    oracle = make_oracle(truth, strict_gauge=args.strict_gauge)
    try:
        w, report = reconstruct(oracle, args.tol, args.tol_class)
    except ProbeError as exc:
        _err(f"reconstruction failed: {exc}")
        return EXIT_FAIL
    write_operator(w, args.out)
    print(f"flag={w.flag.value}")
    print(f"distance_to_truth={distance_up_to_global_phase(w.matrix, truth.matrix):.3e}")
    for line in report.summary_lines():
        print(line)
    return EXIT_OK


def cmd_verify(args) -> int:
    w = _load(read_operator, args.operator)
    truth = _load_truth(args.truth)
    if (w.dim_out, w.dim_in) != (truth.dim_out, truth.dim_in):
        raise UsageError(f"dimension mismatch: operator {w.dim_out}x{w.dim_in}, "
                         f"truth {truth.dim_out}x{truth.dim_in}")
    tol = args.tol if args.tol is not None else 1e-9
    seed = args.seed if args.seed is not None else 0
    ok = True
    if w.flag is Flag.DEGENERATE:
        print("[operator_law] skipped (Degenerate)")
    else:
        law = check_operator_law(w, args.samples, seed, tol)
        print("[operator_law]\n" + law.to_text())
        ok &= law.passed
    compat = check_ray_compatibility(w, make_oracle(truth, strict_gauge=args.strict_gauge),
                                     args.samples, seed + 1, tol)
    print("[ray_compatibility]\n" + compat.to_text())
    ok &= compat.passed
    dist = distance_up_to_global_phase(w.matrix, truth.matrix)
    print(f"[phase_distance]\npassed={str(dist <= tol).lower()} max_violation={dist:.17g} samples=1")
    ok &= dist <= tol
    return EXIT_OK if ok else EXIT_FAIL


def cmd_roundtrip(args) -> int:
    if args.config is None:
        cfg = ExperimentConfig()
    else:
        try:
            cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from exc
        except ValueError as exc:
            raise UsageError(f"{args.config}: {exc}") from exc
    overrides = {"tol_residual": args.tol, "tol_class": args.tol_class if args.tol_class_set else None,
                 "master_seed": args.seed}
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.strict_gauge:
        cfg.strict_gauge = True
    report = run_roundtrip(cfg)
    text = report.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    for c in report.cells:
        _err(f"cell {c.dim_in}->{c.dim_out} {c.flag.value}: {c.wall_time:.3f}s")
    return EXIT_OK if report.passed else EXIT_FAIL


_GLOBAL_DEFAULTS = {"tol": None, "tol_class": None, "seed": None, "samples": 100, "strict_gauge": False}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="residual tolerance (default scales with dimension)")
    common.add_argument("--tol-class", type=float, default=argparse.SUPPRESS,
                        help="classification tolerance around +i/-i (default 1e-6)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    common.add_argument("--strict-gauge", action="store_true", default=argparse.SUPPRESS,
                        help="derive oracle phases from the input ray instead of the call counter")

    parser = argparse.ArgumentParser(prog="wigner", parents=[common],
                                     description="Reconstruct unitary/antiunitary lifts of ray isometries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a random ground-truth isometry")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("flag")
    p.add_argument("seed_pos", metavar="seed", type=int)
    p.add_argument("out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reconstruct", parents=[common], help="reconstruct from a gauge-noised oracle")
    p.add_argument("truth")
    p.add_argument("out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", parents=[common], help="verify an operator against a ground truth")
    p.add_argument("operator")
    p.add_argument("truth")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("roundtrip", parents=[common], help="batch generate/reconstruct/verify")
    p.add_argument("config", nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_roundtrip)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # parent actions are shared with the subparsers, so defaults go here
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    if args.command == "generate":
        args.seed = args.seed_pos
    args.tol_class_set = args.tol_class is not None
    if args.tol_class is None:
        args.tol_class = 1e-6
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

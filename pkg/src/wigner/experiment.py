"""Batch round-trip experiments: generate -> reconstruct -> verify."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .oracles import Flag, make_oracle, random_truth
from .prng import derive_seed
from .reconstruct import ProbeError, reconstruct
from .verification import check_operator_law, check_ray_compatibility, distance_up_to_global_phase

_FLAG_CODES = {Flag.LINEAR: 0, Flag.ANTILINEAR: 1}


@dataclass
class ExperimentConfig:
    dims_in: list = field(default_factory=lambda: list(range(1, 9)))
    extra_dims_out: list = field(default_factory=lambda: [0, 3])
    flags: list = field(default_factory=lambda: [Flag.LINEAR, Flag.ANTILINEAR])
    trials_per_cell: int = 10
    master_seed: int = 20240101
    tol_residual: float | None = None
    tol_class: float = 1e-6
    tol_verify: float = 1e-9
    tol_law: float = 1e-10
    compat_samples: int = 100
    law_samples: int = 1000
    strict_gauge: bool = False

    def __post_init__(self):
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if any(d < 1 for d in self.dims_in) or any(e < 0 for e in self.extra_dims_out):
            raise ValueError("dims_in must be positive and extra_dims_out nonnegative")
        self.flags = [Flag.parse(f) if isinstance(f, str) else Flag(f) for f in self.flags]
        if any(f not in _FLAG_CODES for f in self.flags):
            raise ValueError("flags must be Linear and/or Antilinear")
        tols = [self.tol_class, self.tol_verify, self.tol_law]
        if self.tol_residual is not None:
            tols.append(self.tol_residual)
        if any(not t > 0 for t in tols):
            raise ValueError("all tolerances must be > 0")


_INT_LIST = ("dims_in", "extra_dims_out")
_INT = ("trials_per_cell", "master_seed", "compat_samples", "law_samples")
_FLOAT = ("tol_residual", "tol_class", "tol_verify", "tol_law")


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma-separated."""
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or not value:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        try:
            if key in _INT_LIST:
                kwargs[key] = [int(x) for x in value.split(",")]
            elif key == "flags":
                kwargs[key] = [Flag.parse(x) for x in value.split(",")]
            elif key in _INT:
                kwargs[key] = int(value)
            elif key in _FLOAT:
                kwargs[key] = float(value)
            elif key == "strict_gauge":
                kwargs[key] = value.lower() in ("1", "true", "yes")
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return ExperimentConfig(**kwargs)


def format_config(cfg: ExperimentConfig) -> str:
    lines = [
        f"dims_in = {','.join(map(str, cfg.dims_in))}",
        f"extra_dims_out = {','.join(map(str, cfg.extra_dims_out))}",
        f"flags = {','.join(f.value for f in cfg.flags)}",
        f"trials_per_cell = {cfg.trials_per_cell}",
        f"master_seed = {cfg.master_seed}",
    ]
    if cfg.tol_residual is not None:
        lines.append(f"tol_residual = {cfg.tol_residual!r}")
    lines += [
        f"tol_class = {cfg.tol_class!r}",
        f"tol_verify = {cfg.tol_verify!r}",
        f"tol_law = {cfg.tol_law!r}",
        f"compat_samples = {cfg.compat_samples}",
        f"law_samples = {cfg.law_samples}",
        f"strict_gauge = {str(cfg.strict_gauge).lower()}",
    ]
    return "\n".join(lines) + "\n"


@dataclass
class TrialResult:
    seed: int
    flag_ok: bool
    phase_distance: float
    compat_violation: float
    law_violation: float
    oracle_calls: int
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.flag_ok


@dataclass
class CellResult:
    dim_in: int
    dim_out: int
    flag: Flag
    trials: list
    wall_time: float = 0.0

    @property
    def flag_accuracy(self) -> float:
        return sum(t.flag_ok for t in self.trials) / len(self.trials)

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.trials)

    def _max(self, attr: str) -> float:
        vals = [getattr(t, attr) for t in self.trials if t.error is None]
        return max(vals, default=float("nan"))

    @property
    def max_phase_distance(self) -> float:
        return self._max("phase_distance")

    @property
    def max_compat_violation(self) -> float:
        return self._max("compat_violation")

    @property
    def max_law_violation(self) -> float:
        return self._max("law_violation")


@dataclass
class RunReport:
    config: ExperimentConfig
    cells: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    def failing_seeds(self) -> list:
        return [(c.dim_in, c.dim_out, c.flag.value, t.seed, t.error or "flag mismatch")
                for c in self.cells for t in c.trials if not t.passed]

    def to_text(self) -> str:
        """Deterministic text; wall times are excluded so reruns are byte-identical."""
        out = ["# wigner roundtrip report v1"]
        out += ["# " + ln for ln in format_config(self.config).splitlines()]
        out.append("dim_in dim_out flag trials flag_accuracy max_phase_distance "
                   "max_compat_violation max_law_violation oracle_calls status")
        for c in self.cells:
            calls = max(t.oracle_calls for t in c.trials)
            out.append(
                f"{c.dim_in} {c.dim_out} {c.flag.value} {len(c.trials)} {c.flag_accuracy:.3f} "
                f"{c.max_phase_distance:.3e} {c.max_compat_violation:.3e} "
                f"{c.max_law_violation:.3e} {calls} {'PASS' if c.passed else 'FAIL'}"
            )
        for dim_in, dim_out, flag, seed, err in self.failing_seeds():
            out.append(f"failed dim_in={dim_in} dim_out={dim_out} flag={flag} seed={seed}: {err}")
        out.append(f"overall={'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out) + "\n"


def tolerance_diagnosis(tol: float, dim: int) -> str | None:
    floor = 8 * np.finfo(np.float64).eps * dim
    if tol < floor:
        return f"tolerance {tol:.1e} is below double-precision resolution (~{floor:.1e} at dim {dim})"
    return None


def run_trial(dim_in: int, dim_out: int, flag: Flag, seed: int, cfg: ExperimentConfig) -> TrialResult:
    truth = random_truth(dim_in, dim_out, flag, derive_seed(seed, 0), derive_seed(seed, 1))
    oracle = make_oracle(truth, strict_gauge=cfg.strict_gauge)
    try:
        w, report = reconstruct(oracle, cfg.tol_residual, cfg.tol_class)
    except ProbeError as exc:
        msg = str(exc)
        tol = cfg.tol_residual
        diag = tolerance_diagnosis(tol, dim_out) if tol is not None else None
        if diag:
            msg = f"{diag}; {msg}"
        return TrialResult(seed, False, float("nan"), float("nan"), float("nan"), oracle.calls_made, msg)
    expected = Flag.DEGENERATE if dim_in == 1 else flag
    dist = distance_up_to_global_phase(w.matrix, truth.matrix)
    compat = check_ray_compatibility(w, oracle, cfg.compat_samples, derive_seed(seed, 2), cfg.tol_verify)
    law = 0.0
    if w.flag is not Flag.DEGENERATE:
        law = check_operator_law(w, cfg.law_samples, derive_seed(seed, 3), cfg.tol_law).max_violation
    err = None
    if dist > cfg.tol_verify:
        err = f"phase distance {dist:.3e} > {cfg.tol_verify:.1e}"
    elif not compat.passed:
        err = f"ray compatibility violation {compat.max_violation:.3e} > {cfg.tol_verify:.1e}"
    elif law > cfg.tol_law:
        err = f"operator law violation {law:.3e} > {cfg.tol_law:.1e}"
    return TrialResult(seed, w.flag is expected, dist, compat.max_violation, law,
                       report.oracle_calls, err)


def run_roundtrip(cfg: ExperimentConfig) -> RunReport:
    cells = []
    for dim_in in cfg.dims_in:
        for extra in cfg.extra_dims_out:
            for flag in cfg.flags:
                t0 = time.perf_counter()
                trials = []
                for k in range(cfg.trials_per_cell):
                    seed = derive_seed(cfg.master_seed, dim_in, extra, _FLAG_CODES[flag], k)
                    trials.append(run_trial(dim_in, dim_in + extra, flag, seed, cfg))
                cells.append(CellResult(dim_in, dim_in + extra, flag, trials, time.perf_counter() - t0))
    cells.sort(key=lambda c: (c.dim_in, c.dim_out, _FLAG_CODES[c.flag]))
    return RunReport(cfg, cells)

"""Monte Carlo experiment engine: seeded trials, grids, CSV emission.

Seeding contract
----------------
Every trial derives one 64-bit data seed from
(grid_seed, n, s, m, trial_index) with ``derive_trial_seed`` (a splitmix64
fold, documented bit-exactly in that function) and feeds it as the key of
a counter-based Philox generator. The method name does not enter the data
seed, so all methods in a grid cell solve the same signal and ensemble
(paired comparisons); the solvers themselves draw no randomness.

``elapsed_ms`` is wall-clock and therefore never reproducible; pass
``record_timing=False`` to pin it to 0.0, under which records and CSV
output are byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
import math
import time

import numpy as np

from .initializers import InitConfig
from .model import measure, relative_error, sample_signal
from .pipeline import (METHODS, RestartConfig, solve_multi_restart,
                       solve_two_stage)
from .refine import HtpConfig

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


def splitmix64(z: int) -> int:
    """One splitmix64 scramble of a 64-bit value."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_trial_seed(grid_seed: int, n: int, s: int, m: int,
                      trial_index: int) -> int:
    """64-bit per-trial data seed, bit-exactly:

        h = splitmix64(grid_seed mod 2^64)
        for v in (n, s, m, trial_index):
            h = splitmix64(h XOR (v mod 2^64))

    The result keys the Philox stream a trial samples its signal and
    ensemble from. The method is deliberately excluded (paired design).
    """
    h = splitmix64(grid_seed & _MASK64)
    for v in (n, s, m, trial_index):
        h = splitmix64(h ^ (v & _MASK64))
    return h


def trial_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for one trial (Philox, 64-bit key)."""
    return np.random.Generator(np.random.Philox(key=seed))


@dataclass(frozen=True)
class SolverConfigs:
    """Method parameter overrides shared by every trial in a grid."""

    init: InitConfig = field(default_factory=InitConfig)
    htp: HtpConfig = field(default_factory=HtpConfig)
    restarts: int = 20

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError("restarts must be positive")

    def restart_config(self) -> RestartConfig:
        return RestartConfig(b=self.restarts, inner=self.init,
                             refine=self.htp)


@dataclass(frozen=True)
class TrialRecord:
    """One solved Monte Carlo instance."""

    n: int
    s: int
    m: int
    trial_index: int
    method: str
    seed_used: int
    success: bool
    rel_error: float
    init_dist: float
    htp_iters: int
    chosen_restart: int | None
    elapsed_ms: float


@dataclass(frozen=True)
class ExperimentGrid:
    """A (method, s, m, trial) product driving ``run_grid``."""

    n: int
    s_list: tuple[int, ...]
    m_list: tuple[int, ...]
    trials: int
    seed: int
    methods: tuple[str, ...]
    success_threshold: float = 1e-3
    configs: SolverConfigs = field(default_factory=SolverConfigs)

    def __post_init__(self):
        object.__setattr__(self, "s_list", tuple(int(v) for v in self.s_list))
        object.__setattr__(self, "m_list", tuple(int(v) for v in self.m_list))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.n < 1 or not self.s_list or not self.m_list:
            raise ConfigError("grid needs n >= 1 and nonempty s/m lists")
        if any(not 1 <= s <= self.n for s in self.s_list):
            raise ConfigError("every s must satisfy 1 <= s <= n")
        if any(m < 1 for m in self.m_list):
            raise ConfigError("every m must be positive")
        if self.trials < 1:
            raise ConfigError("need at least one trial")
        if self.success_threshold <= 0:
            raise ConfigError("success threshold must be positive")
        unknown = [meth for meth in self.methods if meth not in METHODS]
        if unknown or not self.methods:
            raise ConfigError(f"methods must be a nonempty subset of {METHODS}")


def _solve_prepared(signal, ensemble, method, configs, threshold,
                    record_timing, seed, trial_index):
    truth = signal.to_dense()
    t0 = time.perf_counter()
    if method == "tp_mr":
        report = solve_multi_restart(ensemble, signal.s,
                                     configs.restart_config(), truth=truth)
    else:
        report = solve_two_stage(ensemble, signal.s, method,
                                 configs.init, configs.htp, truth=truth)
    elapsed_ms = (time.perf_counter() - t0) * 1e3 if record_timing else 0.0
    return TrialRecord(
        n=signal.n, s=signal.s, m=ensemble.m, trial_index=trial_index,
        method=method, seed_used=seed,
        success=bool(report.rel_error <= threshold),
        rel_error=report.rel_error, init_dist=report.init_dist,
        htp_iters=report.iterations, chosen_restart=report.chosen_restart,
        elapsed_ms=elapsed_ms)


def run_trial(n: int, s: int, m: int, method: str, trial_index: int,
              grid_seed: int, configs: SolverConfigs | None = None, *,
              success_threshold: float = 1e-3,
              record_timing: bool = True) -> TrialRecord:
    """Sample one instance from the derived seed, solve it, record it.

    Identical arguments yield identical records apart from ``elapsed_ms``
    (pass record_timing=False for byte-identical reruns). Degenerate
    solves are recorded (rel_error = 1 for a zero estimate), never raised.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    configs = configs or SolverConfigs()
    seed = derive_trial_seed(grid_seed, n, s, m, trial_index)
    rng = trial_rng(seed)
    signal = sample_signal(n, s, rng)
    ensemble = measure(signal, m, rng)
    return _solve_prepared(signal, ensemble, method, configs,
                           success_threshold, record_timing, seed,
                           trial_index)


def _cell_task(args):
    work, s, m, trial_index = args
    seed = derive_trial_seed(work.seed, work.n, s, m, trial_index)
    rng = trial_rng(seed)
    signal = sample_signal(work.n, s, rng)
    ensemble = measure(signal, m, rng)
    return [
        _solve_prepared(signal, ensemble, method, work.configs,
                        work.success_threshold, work.record_timing, seed,
                        trial_index)
        for method in work.methods
    ]


@dataclass(frozen=True)
class _GridWork:
    """Pickled per-task bundle (grid plus the timing switch)."""

    n: int
    seed: int
    methods: tuple[str, ...]
    success_threshold: float
    configs: SolverConfigs
    record_timing: bool


@dataclass(frozen=True)
class CellSummary:
    """Aggregate for one (method, s, m) cell."""

    method: str
    s: int
    m: int
    trials: int
    successes: int
    success_rate: float
    wilson_low: float
    wilson_high: float
    iters_p50: float
    iters_p90: float


@dataclass(frozen=True)
class GridResult:
    records: list
    cells: list


def wilson_interval(successes: int, trials: int,
                    z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def aggregate(records, threshold: float | None = None) -> list[CellSummary]:
    """Per-cell summaries sorted like the records (method, s, m)."""
    cells = {}
    for r in records:
        cells.setdefault((r.method, r.s, r.m), []).append(r)
    out = []
    for (method, s, m) in sorted(cells):
        grp = cells[(method, s, m)]
        n_trials = len(grp)
        if threshold is None:
            successes = sum(r.success for r in grp)
        else:
            successes = sum(r.rel_error <= threshold for r in grp)
        low, high = wilson_interval(successes, n_trials)
        iters = np.array([r.htp_iters for r in grp], dtype=float)
        out.append(CellSummary(
            method=method, s=s, m=m, trials=n_trials, successes=successes,
            success_rate=successes / n_trials, wilson_low=low,
            wilson_high=high, iters_p50=float(np.percentile(iters, 50)),
            iters_p90=float(np.percentile(iters, 90))))
    return out


def summary_table(cells) -> str:
    """Fixed-width text rendering of the per-cell aggregates."""
    header = (f"{'method':<18}{'s':>5}{'m':>7}{'trials':>8}{'rate':>8}"
              f"{'wilson95':>18}{'it_p50':>8}{'it_p90':>8}")
    lines = [header, "-" * len(header)]
    for c in cells:
        lines.append(
            f"{c.method:<18}{c.s:>5}{c.m:>7}{c.trials:>8}"
            f"{c.success_rate:>8.3f}"
            f"{'[' + format(c.wilson_low, '.3f') + ', ' + format(c.wilson_high, '.3f') + ']':>18}"
            f"{c.iters_p50:>8.1f}{c.iters_p90:>8.1f}")
    return "\n".join(lines)


def run_grid(grid: ExperimentGrid, parallelism: int = 1,
             record_timing: bool = True) -> GridResult:
    """Run every (s, m, method, trial) cell of the grid.

    Methods within a cell share the sampled data (paired comparisons).
    Tasks run across a process pool when parallelism > 1; records come
    back sorted by (method, s, m, trial_index), independent of the worker
    count.
    """
    if parallelism < 1:
        raise ConfigError("parallelism must be positive")
    work = _GridWork(n=grid.n, seed=grid.seed, methods=grid.methods,
                     success_threshold=grid.success_threshold,
                     configs=grid.configs, record_timing=record_timing)
    tasks = [(work, s, m, t)
             for s in grid.s_list
             for m in grid.m_list
             for t in range(grid.trials)]
    if parallelism == 1:
        batches = [_cell_task(t) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=parallelism) as pool:
            batches = list(pool.map(_cell_task, tasks, chunksize=1))
    records = [r for batch in batches for r in batch]
    records.sort(key=lambda r: (r.method, r.s, r.m, r.trial_index))
    return GridResult(records=records, cells=aggregate(records))


CSV_HEADER = ("n,s,m,trial,method,seed,success,rel_error,init_dist,"
              "htp_iters,chosen_restart,elapsed_ms")


def _fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def emit_csv(records) -> str:
    """Render records under the fixed header; floats keep 17 significant
    digits so parse(emit(records)) round-trips exactly."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            str(r.n), str(r.s), str(r.m), str(r.trial_index), r.method,
            str(r.seed_used), "1" if r.success else "0",
            _fmt_float(r.rel_error), _fmt_float(r.init_dist),
            str(r.htp_iters),
            "" if r.chosen_restart is None else str(r.chosen_restart),
            _fmt_float(r.elapsed_ms)]))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[TrialRecord]:
    """Inverse of ``emit_csv``."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized CSV header")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 12:
            raise ValueError(f"expected 12 fields, found {len(parts)}")
        records.append(TrialRecord(
            n=int(parts[0]), s=int(parts[1]), m=int(parts[2]),
            trial_index=int(parts[3]), method=parts[4],
            seed_used=int(parts[5]), success=parts[6] == "1",
            rel_error=float(parts[7]), init_dist=float(parts[8]),
            htp_iters=int(parts[9]),
            chosen_restart=None if parts[10] == "" else int(parts[10]),
            elapsed_ms=float(parts[11])))
    return records


def _coerce_section(cls, data, name):
    if not isinstance(data, dict):
        raise ConfigError(f"{name} must be an object")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad {name} settings: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad {name} settings: {exc}") from None


def grid_from_dict(data: dict) -> ExperimentGrid:
    """Build an ExperimentGrid from config-JSON content.

    Top-level keys mirror the ExperimentGrid fields (snake_case); the
    optional "configs" object takes "init", "htp" (field overrides) and
    "restarts" (an integer).
    """
    if not isinstance(data, dict):
        raise ConfigError("grid config must be a JSON object")
    allowed = {"n", "s_list", "m_list", "trials", "seed", "methods",
               "success_threshold", "configs"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"n", "s_list", "m_list", "trials", "seed", "methods"} - set(data)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")

    configs = SolverConfigs()
    raw = data.get("configs", {})
    if raw:
        if not isinstance(raw, dict):
            raise ConfigError("configs must be an object")
        extra = set(raw) - {"init", "htp", "restarts"}
        if extra:
            raise ConfigError(f"unknown configs keys: {sorted(extra)}")
        init = (_coerce_section(InitConfig, raw["init"], "init")
                if "init" in raw else InitConfig())
        htp = (_coerce_section(HtpConfig, raw["htp"], "htp")
               if "htp" in raw else HtpConfig())
        restarts = raw.get("restarts", 20)
        if not isinstance(restarts, int) or restarts < 1:
            raise ConfigError("restarts must be a positive integer")
        configs = SolverConfigs(init=init, htp=htp, restarts=restarts)

    try:
        return ExperimentGrid(
            n=int(data["n"]), s_list=tuple(data["s_list"]),
            m_list=tuple(data["m_list"]), trials=int(data["trials"]),
            seed=int(data["seed"]), methods=tuple(data["methods"]),
            success_threshold=float(data.get("success_threshold", 1e-3)),
            configs=configs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad grid config: {exc}") from None

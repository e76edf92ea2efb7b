"""Seeded Monte Carlo runner behind the ``trunctest`` CLI.

Trial ``i`` draws everything from ``numpy.random.default_rng(split(seed, i))``,
so the output depends only on the config and never on thread count or
scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from . import kernels, lowerbound, testers
from .distributions import (
    JuntaSpec,
    JuntaTruncated,
    ParitySpec,
    ParityTruncated,
    ProblemParams,
    Uniform,
    random_junta,
    random_parity,
    sample_batch,
    uniform_points,
    volume,
)
from .f2core import CoordSet, log2_binom

log = logging.getLogger(__name__)

MODES = ("consistent", "uniformity", "lowerbound-moments", "lowerbound-mle", "calibrate")
CSV_COLUMNS = ("trial_index", "seed", "source", "T", "statistic", "threshold", "verdict", "elapsed_ns")
DEFAULT_SAMPLE_CAP = 10**8
# child index reserved for the calibration stream of uniformity runs
CALIBRATION_INDEX = 2**64 - 1
# per-batch false-positive target when alpha is calibrated under median amplification
AMPLIFY_BATCH_DELTA = Fraction(1, 10)

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Configuration refused before any trial ran."""


def split(master_seed: int, index: int) -> int:
    """Child seed for trial ``index``: SplitMix64 finalizer over seed + (index+1)*gamma.

    The map is a bijection in ``index`` (mod 2^64) for a fixed master seed,
    and in the master seed for a fixed index.
    """
    z = (master_seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(split(master_seed, index))


def sample_cap() -> int:
    raw = os.environ.get("TRUNCTEST_SAMPLE_CAP")
    if raw is None:
        return DEFAULT_SAMPLE_CAP
    try:
        return int(float(raw))
    except ValueError:
        raise ConfigError(f"TRUNCTEST_SAMPLE_CAP must be a number, got {raw!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    params: ProblemParams
    trials: int
    master_seed: int = 0
    c2: float = 4.0
    alpha: Union[float, str] = "calibrated"
    amplify: str = "none"
    source: str = "uniform"
    T: int | None = None
    calib_trials: int = 100_000
    threads: int = 1
    timing: bool = False

    def echo(self) -> dict:
        """Config fields that determine the output (thread count excluded)."""
        d = asdict(self)
        d.pop("threads")
        d.pop("timing")
        d["params"] = {"n": self.params.n, "k": self.params.k, "eps": str(self.params.eps)}
        return d


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    source: str
    T: int
    statistic: Union[int, float]
    threshold: str
    verdict: str = ""
    elapsed_ns: int = 0

    def row(self) -> list:
        stat = self.statistic
        if isinstance(stat, float):
            stat = format(stat, ".17g")
        return [self.trial_index, self.seed, self.source, self.T, stat,
                self.threshold, self.verdict, self.elapsed_ns]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    summary: dict
    records: list[TrialRecord] = field(default_factory=list)


def run_trials(fn: Callable[[int, np.random.Generator], object], trials: int,
               master_seed: int, threads: int = 1) -> list:
    """Map ``fn(index, rng)`` over trial indices, results in index order."""

    def chunk_run(bounds):
        lo, hi = bounds
        return [fn(i, trial_rng(master_seed, i)) for i in range(lo, hi)]

    if threads <= 1 or trials < 2:
        return chunk_run((0, trials))
    size = max(1, math.ceil(trials / (threads * 4)))
    chunks = [(lo, min(trials, lo + size)) for lo in range(0, trials, size)]
    out = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(chunk_run, chunks):
            out.extend(part)
    return out


def fmt_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_real(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- sources

def _fixed_or_random(cfg: ExperimentConfig):
    """Resolve ``cfg.source`` into ``rng -> SourceDistribution``."""
    p = cfg.params
    spec = cfg.source.strip()
    if spec == "uniform":
        d = Uniform(p.n)
        return lambda rng: d
    kind, _, arg = spec.partition(":")
    if kind == "junta":
        if arg == "random":
            return lambda rng: JuntaTruncated(random_junta(p, 1 - p.eps, rng))
        try:
            f = JuntaSpec.from_record(Path(arg).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read junta instance {arg!r}: {e}") from None
        except ValueError as e:
            raise ConfigError(f"bad junta instance {arg!r}: {e}") from None
        _check_instance(f, p)
        d = JuntaTruncated(f)
        return lambda rng: d
    if kind == "parity":
        if arg == "random":
            return lambda rng: ParityTruncated(random_parity(p.n, p.k, rng))
        try:
            S = CoordSet.of(p.n, [int(i) for i in arg.split(",")])
            ps = ParitySpec(S)
        except ValueError as e:
            raise ConfigError(f"bad parity support {arg!r}: {e}") from None
        d = ParityTruncated(ps)
        return lambda rng: d
    raise ConfigError(f"unknown source {spec!r}; use uniform, junta:<file|random>, parity:<i,j,..|random>")


def _check_instance(f: JuntaSpec, p: ProblemParams) -> None:
    if f.n != p.n:
        raise ConfigError(f"instance lives in dimension {f.n}, config says n={p.n}")
    if f.k > p.k:
        raise ConfigError(f"instance has {f.k} relevant variables, config allows k={p.k}")
    if volume(f) > 1 - p.eps:
        raise ConfigError(f"instance volume {volume(f)} exceeds 1 - eps = {1 - p.eps}")


# ---------------------------------------------------------------- validation

def _check_cap(T: int, what: str, terms: dict) -> None:
    cap = sample_cap()
    if T > cap:
        worst = max(terms, key=terms.get)
        raise ConfigError(
            f"{what} = {T} exceeds the sample cap {cap}; largest factor is "
            f"{worst} = {terms[worst]:.6g} (set TRUNCTEST_SAMPLE_CAP to override)"
        )


def validate(cfg: ExperimentConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.amplify not in ("none", "median"):
        raise ConfigError(f"amplify must be none or median, got {cfg.amplify!r}")
    if cfg.c2 <= 0:
        raise ConfigError("c2 must be positive")
    if not (cfg.alpha == "calibrated" or isinstance(cfg.alpha, (int, float))):
        raise ConfigError(f"alpha must be a number or 'calibrated', got {cfg.alpha!r}")
    if cfg.T is not None and cfg.T < 0:
        raise ConfigError("T must be nonnegative")
    if cfg.mode == "calibrate" and cfg.trials < 1000:
        raise ConfigError("calibrate needs at least 1000 trials")
    if cfg.mode == "uniformity" and cfg.alpha == "calibrated" and cfg.calib_trials < 1000:
        raise ConfigError("calib_trials must be >= 1000")
    p = cfg.params
    lb = log2_binom(p.n, p.k)
    if cfg.mode == "consistent":
        _check_cap(testers.budget_T1(p), "T1", {
            "2^k": 2.0**p.k, "log2 C(n,k)": lb,
            "1/log2(1/(1-eps))": 1 / testers._log2_inv_one_minus(p.eps)})
    elif cfg.mode in ("uniformity", "calibrate"):
        b = testers.budget_T2(p, cfg.c2)
        _check_cap(b.T2, "T2", {
            "c2/eps^2": cfg.c2 / float(p.eps) ** 2, "2^(k/2)*sqrt(log2 C(n,k))": 2 ** (p.k / 2) * math.sqrt(lb),
            "log2 C(n,k)": lb})
    else:
        T = cfg.T if cfg.T is not None else lowerbound.round_T(p.n, p.k)
        _check_cap(T, "T", {"log2 C(n,k)": lb})
    if cfg.mode in ("consistent", "uniformity", "lowerbound-mle"):
        _fixed_or_random(cfg)


# ---------------------------------------------------------------- modes

def _timer(cfg):
    return time.perf_counter_ns if cfg.timing else (lambda: 0)


def _tester_trials(cfg: ExperimentConfig, T: int, decide, threshold: str):
    resolve = _fixed_or_random(cfg)
    clock = _timer(cfg)

    def one(i, rng):
        t0 = clock()
        d = resolve(rng)
        xs = sample_batch(d, rng, T)
        stat, verdict = decide(xs)
        return TrialRecord(i, split(cfg.master_seed, i), d.tag, T, stat, threshold,
                           str(verdict), clock() - t0)

    return run_trials(one, cfg.trials, cfg.master_seed, cfg.threads)


def _rate(records) -> float:
    return sum(r.verdict == "truncated" for r in records) / len(records)


def _run_consistent(cfg):
    p = cfg.params
    T = testers.budget_T1(p)
    thr = testers.consistent_threshold(p)
    log.info("consistent: T1=%d, pattern threshold %s", T, thr)

    def decide(xs):
        stat = testers.min_pattern_count(xs, p.n, p.k)
        return stat, testers.Verdict.TRUNCATED if stat <= thr else testers.Verdict.UNTRUNCATED

    records = _tester_trials(cfg, T, decide, fmt_rational(thr))
    return {"mode": cfg.mode, "trials": cfg.trials, "T1": T, "threshold": fmt_rational(thr),
            "truncated_rate": _rate(records)}, records


def _resolve_alpha(cfg, b: testers.SampleBudget) -> tuple[float, dict]:
    if cfg.alpha != "calibrated":
        return float(cfg.alpha), {}
    p = cfg.params
    m = 2**p.k
    if cfg.amplify == "median":
        T = b.T2 // testers.AMPLIFY_BATCHES
        delta = AMPLIFY_BATCH_DELTA
    else:
        T, delta = b.T2, b.delta
    rng = trial_rng(cfg.master_seed, CALIBRATION_INDEX)
    alpha = testers.calibrate_alpha(m, float(p.eps), T, delta, cfg.calib_trials, rng)
    log.info("calibrated alpha=%.6g (m=%d, T=%d, delta=%s)", alpha, m, T, delta)
    return alpha, {"calibration": {"m": m, "T": T, "delta": fmt_rational(delta),
                                   "trials": cfg.calib_trials}}


def _run_uniformity(cfg):
    p = cfg.params
    b = testers.budget_T2(p, cfg.c2)
    alpha, extra = _resolve_alpha(cfg, b)
    if cfg.amplify == "median":
        thr = testers.AMPLIFY_BATCHES / 2
    else:
        thr = testers.collision_threshold(b.T2, testers.UniformityParams(2**p.k, float(p.eps), alpha))

    def decide(xs):
        stat, _, verdict = testers.uniformity_scan(xs, p, alpha, cfg.amplify)
        return stat, verdict

    records = _tester_trials(cfg, b.T2, decide, fmt_real(thr))
    summary = {"mode": cfg.mode, "trials": cfg.trials, "T2": b.T2, "delta": fmt_rational(b.delta),
               "c2": cfg.c2, "alpha": alpha, "amplify": cfg.amplify, "threshold": fmt_real(thr),
               "truncated_rate": _rate(records)}
    summary.update(extra)
    return summary, records


def _lb_T(cfg):
    p = cfg.params
    return cfg.T if cfg.T is not None else lowerbound.round_T(p.n, p.k)


def _run_moments(cfg):
    p = cfg.params
    T = _lb_T(cfg)
    clock = _timer(cfg)
    thr = fmt_rational(lowerbound.mle_threshold(p.n, p.k, T))

    def one(i, rng):
        t0 = clock()
        gens = uniform_points(rng, p.n, (1, T))
        w = int(lowerbound.dual_weight_counts(gens, p.n, p.k)[0])
        return TrialRecord(i, split(cfg.master_seed, i), "uniform", T, w, thr, "", clock() - t0)

    records = run_trials(one, cfg.trials, cfg.master_seed, cfg.threads)
    rep = lowerbound.moment_report([r.statistic for r in records], p.n, p.k, T)
    summary = {"mode": cfg.mode, "T": T, **rep.as_dict()}
    summary["exact_expectation"] = fmt_rational(rep.exact_expectation)
    return summary, records


def _run_mle(cfg):
    p = cfg.params
    T = _lb_T(cfg)
    if T < 1:
        raise ConfigError("the distinguisher needs T >= 1")
    resolve = _fixed_or_random(cfg)
    clock = _timer(cfg)
    thr = lowerbound.mle_threshold(p.n, p.k, T)
    mismatches = []

    def one(i, rng):
        t0 = clock()
        d = resolve(rng)
        xs = sample_batch(d, rng, T)[None, :]
        count = int(lowerbound.parity_consistent_counts(xs, p.n, p.k)[0])
        w = int(lowerbound.dual_weight_counts(xs, p.n, p.k)[0])
        flag = lowerbound.mle_flags(count, p.n, p.k, T)
        if flag != lowerbound.mle_flags(w, p.n, p.k, T):
            mismatches.append(i)
        verdict = testers.Verdict.TRUNCATED if flag else testers.Verdict.UNTRUNCATED
        return TrialRecord(i, split(cfg.master_seed, i), d.tag, T, count, fmt_rational(thr),
                           str(verdict), clock() - t0)

    records = run_trials(one, cfg.trials, cfg.master_seed, cfg.threads)
    return {"mode": cfg.mode, "trials": cfg.trials, "T": T, "threshold": fmt_rational(thr),
            "truncated_rate": _rate(records), "identity_mismatches": len(mismatches)}, records


def _run_calibrate(cfg):
    p = cfg.params
    b = testers.budget_T2(p, cfg.c2)
    m = 2**p.k
    clock = _timer(cfg)

    def one(i, rng):
        t0 = clock()
        c = int(kernels.row_collisions(rng.integers(0, m, size=(1, b.T2)), m)[0])
        return TrialRecord(i, split(cfg.master_seed, i), "uniform", b.T2, c, "", "", clock() - t0)

    records = run_trials(one, cfg.trials, cfg.master_seed, cfg.threads)
    counts = [r.statistic for r in records]
    alpha = testers.alpha_from_null(counts, m, float(p.eps), b.T2, b.delta)
    thr = testers.collision_threshold(b.T2, testers.UniformityParams(m, float(p.eps), alpha))
    for r in records:
        r.threshold = fmt_real(thr)
    return {"mode": cfg.mode, "trials": cfg.trials, "m": m, "T2": b.T2,
            "delta": fmt_rational(b.delta), "alpha": alpha, "threshold": fmt_real(thr),
            "null_mean": float(np.mean(counts)), "expected_mean": math.comb(b.T2, 2) / m}, records


_RUNNERS = {
    "consistent": _run_consistent,
    "uniformity": _run_uniformity,
    "lowerbound-moments": _run_moments,
    "lowerbound-mle": _run_mle,
    "calibrate": _run_calibrate,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    validate(cfg)
    summary, records = _RUNNERS[cfg.mode](cfg)
    return ExperimentResult(cfg, summary, records)


# ---------------------------------------------------------------- output

def records_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def result_json(result: ExperimentResult) -> str:
    doc = {
        "config": _jsonable(result.config.echo()),
        "summary": _jsonable(result.summary),
        "columns": list(CSV_COLUMNS),
        "records": [r.row() for r in result.records],
    }
    return json.dumps(doc, indent=1) + "\n"


def check_writable(path) -> None:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if path.is_dir() or not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ConfigError(f"cannot write output to {str(path)!r}")


def write_result(result: ExperimentResult, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = records_csv(result.records)
    elif fmt == "json":
        text = result_json(result)
    else:
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    with open(path, "w", newline="") as fh:
        fh.write(text)

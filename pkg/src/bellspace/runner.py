"""Experiment orchestration: trial generation, accumulation and reporting."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import estimators, oracle
from .config import ExperimentConfig, to_mapping
from .errors import UnmeasuredContextError
from .estimators import CorrelationAccumulator, CorrelationTable
from .inequalities import CHSHReport, chsh_combination, evaluate_chsh
from .probability_space import MASK64
from .report import dumps, write_csv

log = logging.getLogger(__name__)

# fixed so that the chunk boundaries never depend on the worker count
CHUNK = 1 << 17


def chunk_bounds(trials, chunk=CHUNK):
    return [(a, min(a + chunk, trials)) for a in range(0, trials, chunk)]


def generate(source, dist, seed, trials, workers=1, dump=None):
    """Accumulate ``trials`` trials, optionally writing ``i j x y`` lines to ``dump``."""

    def work(bounds):
        start, stop = bounds
        cell, x, y = source.trials(dist, seed, start, stop)
        return CorrelationAccumulator.from_trials(cell, x, y), ((cell, x, y) if dump is not None else None)

    acc = CorrelationAccumulator()
    bounds = chunk_bounds(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, bounds))
    else:
        results = map(work, bounds)
    for part, arrays in results:
        acc = estimators.merge(acc, part)
        if arrays is not None:
            write_trials(dump, *arrays)
    return acc


def write_trials(fh, cell, x, y):
    cell = cell.astype(np.int64)
    lines = np.column_stack([1 + (cell >> 1), 1 + (cell & 1), x, y])
    np.savetxt(fh, lines, fmt="%d")


@dataclass
class RunReport:
    config: dict
    accumulator: CorrelationAccumulator
    frequencies: np.ndarray
    absolute: CorrelationTable
    conditional: Optional[CorrelationTable]
    chsh: CHSHReport
    exact: Optional[dict]
    identity_residual: float
    timing: Optional[dict] = None
    unmeasured: tuple = ()

    @property
    def complete(self) -> bool:
        return self.conditional is not None

    def to_dict(self):
        def table(t):
            return {"kind": t.kind, "values": t.values, "standard_errors": t.standard_errors}

        if self.conditional is None:
            conditional = {
                "available": False,
                "unmeasured": [list(c) for c in self.unmeasured],
            }
        else:
            conditional = dict(available=True, **table(self.conditional))
        return {
            "config": self.config,
            "frequencies": {
                "total": self.accumulator.total,
                "counts": self.accumulator.counts(),
                "table": self.frequencies,
            },
            "absolute": table(self.absolute),
            "conditional": conditional,
            "chsh": self.chsh.to_dict(),
            "exact": self.exact,
            "identity_residual": self.identity_residual,
            "timing": self.timing,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def exact_section(source, dist):
    table = oracle.exact_table(source)
    if table is None:
        return None
    q = table.as_array()
    p = dist.as_array()
    return {
        "source": table.source,
        "conditional": q,
        "rational": [[str(v) for v in row] for row in table.values] if table.is_rational else None,
        "chsh_conditional": float(table.chsh()),
        "chsh_absolute": abs(float(chsh_combination(p * q))),
    }


def _residual(acc):
    counts = acc.counts()
    mask = counts > 0
    c = estimators.absolute_correlation(acc).values
    p = estimators.setting_frequency(acc)
    q = np.zeros((2, 2))
    q[mask] = acc.sums()[mask] / counts[mask]
    return float(np.max(np.abs(c - p * q)))


def build_report(cfg: ExperimentConfig, acc: CorrelationAccumulator, source=None, timing=None) -> RunReport:
    source = source if source is not None else cfg.source.build()
    C = estimators.absolute_correlation(acc)
    p_hat = estimators.setting_frequency(acc)
    try:
        Q = estimators.conditional_correlation(acc)
        unmeasured = ()
    except UnmeasuredContextError:
        Q = None
        unmeasured = tuple((1 + (k >> 1), 1 + (k & 1)) for k, n in enumerate(acc.n) if n == 0)
    return RunReport(
        config=to_mapping(cfg, execution=False),
        accumulator=acc,
        frequencies=p_hat,
        absolute=C,
        conditional=Q,
        chsh=evaluate_chsh(C, Q, p_hat, cfg.guard_k),
        exact=exact_section(source, cfg.settings),
        identity_residual=_residual(acc),
        timing=timing,
        unmeasured=unmeasured,
    )


def run_experiment(cfg: ExperimentConfig, workers=None, record_timing=False) -> RunReport:
    """Run ``cfg.trials`` trials and evaluate every inequality form.

    The result depends on ``(seed, config)`` only; ``workers`` changes the
    wall time and nothing else.
    """
    workers = cfg.workers if workers is None else workers
    source = cfg.source.build()
    t0 = time.perf_counter()
    if cfg.out_trials:
        with open(cfg.out_trials, "w", encoding="utf-8") as fh:
            acc = generate(source, cfg.settings, cfg.seed, cfg.trials, workers, dump=fh)
    else:
        acc = generate(source, cfg.settings, cfg.seed, cfg.trials, workers)
    elapsed = time.perf_counter() - t0
    timing = {"generate_seconds": elapsed, "workers": workers} if record_timing else None
    report = build_report(cfg, acc, source, timing)
    log.info("ran %d trials in %.3fs", cfg.trials, elapsed)
    if cfg.out_report:
        with open(cfg.out_report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return report


SWEEP_HEADER = (
    "index",
    "angle",
    "seed",
    "s_conditional",
    "se_conditional",
    "violated_conditional",
    "s_absolute",
    "s_generalized",
    "violated_generalized",
)


@dataclass
class SweepResult:
    parameter: str
    rows: list
    reports: list


def run_sweep(cfg: ExperimentConfig, workers=None) -> SweepResult:
    """One run per grid point of the swept angle; point ``k`` uses ``seed + k``."""
    sweep = cfg.sweep
    if sweep is None:
        raise ValueError("configuration has no [sweep] section")
    rows = []
    reports = []
    for k, angle in enumerate(sweep.grid()):
        point = replace(
            cfg,
            source=cfg.source.with_angle(sweep.angle, angle),
            seed=(cfg.seed + k) & MASK64,
            out_report=None,
            out_trials=None,
        )
        rep = run_experiment(point, workers=workers)
        ch = rep.chsh
        rows.append(
            (
                k,
                float(angle),
                point.seed,
                ch.s_conditional,
                None if ch.conditional is None else ch.conditional.standard_error,
                None if ch.conditional is None else ch.conditional.violated,
                ch.s_absolute,
                ch.s_generalized,
                None if ch.generalized is None else ch.generalized.violated,
            )
        )
        reports.append(rep)
    if cfg.out_csv:
        write_csv(cfg.out_csv, SWEEP_HEADER, rows)
    return SweepResult(sweep.angle, rows, reports)

"""Benchmark grid: estimator x matrix size x series length x replicates.

Each grid cell simulates replicate series from a random stable VAR(1) (the
data-generating recipe of the comparative study), fits the requested
estimators on the training span, scores them on the held-out span, and
streams one CSV row per fit. A summary CSV holds per-cell means and
Mardia p-value quantiles. Reruns with the same spec and seed produce
byte-identical rows apart from the timing column.
"""

import csv
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .covariance import MatrixSeries
from .diagnostics import EvalReport, evaluate
from .estimators import (
    FitOptions,
    fit_mar1_lse,
    fit_mar1_yw,
    fit_mar_burg,
    fit_var1_burg,
    fit_var1_yw,
    fit_vecmar_nkp,
)
from .simulation import SimConfig, generate

log = logging.getLogger(__name__)

ROWS_SCHEMA = "marest-bench-rows v1"
SUMMARY_SCHEMA = "marest-bench-summary v1"

ESTIMATORS = {
    "mar_yw": lambda s, opts: fit_mar1_yw(s, opts),
    "mar_burg": lambda s, opts: fit_mar_burg(s, 1, opts),
    "mar_lse": lambda s, opts: fit_mar1_lse(s, opts),
    "var_yw": lambda s, opts: fit_var1_yw(s),
    "var_burg": lambda s, opts: fit_var1_burg(s),
    "vecmar_yw": lambda s, opts: fit_vecmar_nkp(s, "yw"),
    "vecmar_burg": lambda s, opts: fit_vecmar_nkp(s, "burg"),
}

_REPORT_FIELDS = [f.name for f in fields(EvalReport)]
ROW_COLUMNS = ["estimator", "m", "T", "replicate", "seed"] + _REPORT_FIELDS + ["error"]


@dataclass(frozen=True)
class BenchSpec:
    """Grid definition. Sizes are square matrix sides (vector dim = m^2)."""

    sizes: tuple = (2, 3, 5)
    lengths: tuple = (100, 300)
    replicates: int = 100
    estimators: tuple = ("mar_yw", "mar_burg", "mar_lse", "var_yw")
    base_seed: int = 42
    test_len: int = 100
    output_dir: Path = Path("results")
    burn_in: int = 200
    jobs: int = 1
    scheme: str = "one_step"
    fit_options: FitOptions = field(default_factory=FitOptions)

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.scheme not in ("one_step", "free_run"):
            raise ValueError(f"unknown evaluation scheme {self.scheme!r}")
        if not self.sizes or any(m < 1 for m in self.sizes):
            raise ValueError("sizes must be positive")
        if not self.lengths or any(t < 3 for t in self.lengths):
            raise ValueError("lengths must be >= 3")
        if self.test_len < 1:
            raise ValueError("test_len must be >= 1")
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            raise ValueError(f"unknown estimators: {', '.join(unknown)}")
        object.__setattr__(self, "sizes", tuple(self.sizes))
        object.__setattr__(self, "lengths", tuple(self.lengths))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "output_dir", Path(self.output_dir))


@dataclass
class BenchRow:
    estimator: str
    m: int
    T: int
    replicate: int
    seed: int
    report: EvalReport = None
    error: str = ""

    def as_record(self) -> dict:
        rec = {
            "estimator": self.estimator,
            "m": self.m,
            "T": self.T,
            "replicate": self.replicate,
            "seed": self.seed,
            "error": self.error,
        }
        for name in _REPORT_FIELDS:
            value = getattr(self.report, name) if self.report is not None else float("nan")
            if name == "causal":
                rec[name] = "" if self.report is None else str(int(value))
            else:
                rec[name] = _fmt(value)
        return rec


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cell_seed(base_seed: int, m: int, t_len: int, replicate: int) -> int:
    """Stable per-replicate seed: base + CRC32 of the cell coordinates."""
    tag = f"m={m};T={t_len};rep={replicate}".encode()
    return base_seed + zlib.crc32(tag)


def _run_replicate(args):
    spec, m, t_len, replicate = args
    seed = cell_seed(spec.base_seed, m, t_len, replicate)
    cfg = SimConfig(d=m * m, T=t_len + spec.test_len, burn_in=spec.burn_in, seed=seed)
    data = MatrixSeries.from_vecs(generate(cfg), m, m)
    train = MatrixSeries(data.data[:t_len])
    test = MatrixSeries(data.data[t_len:])
    rows = []
    for name in spec.estimators:
        row = BenchRow(estimator=name, m=m, T=t_len, replicate=replicate, seed=seed)
        start = time.perf_counter()
        try:
            model = ESTIMATORS[name](train, spec.fit_options)
            elapsed = time.perf_counter() - start
            report = evaluate(model, train, test, scheme=spec.scheme)
            report.fit_seconds = elapsed
            row.report = report
        except Exception as exc:  # failures become rows, never abort the grid
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


@dataclass
class GridResult:
    rows_path: Path
    summary_path: Path
    rows: list
    failures: int


def run_grid(spec: BenchSpec) -> GridResult:
    """Run the full grid and write rows.csv plus summary.csv."""
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    tasks = [
        (spec, m, t_len, rep)
        for m in spec.sizes
        for t_len in spec.lengths
        for rep in range(spec.replicates)
    ]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(_run_replicate, tasks))
    else:
        chunks = [_run_replicate(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]

    rows_path = spec.output_dir / "rows.csv"
    with open(rows_path, "w", newline="") as fh:
        fh.write(f"# schema: {ROWS_SCHEMA}\n")
        fh.write(f"# residuals: {spec.scheme} predictions over the test span\n")
        writer = csv.DictWriter(fh, fieldnames=ROW_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row.as_record())

    summary_path = spec.output_dir / "summary.csv"
    write_summary(rows, summary_path)
    _check_timing_monotone(rows)
    failures = sum(1 for r in rows if r.error)
    return GridResult(rows_path=rows_path, summary_path=summary_path, rows=rows, failures=failures)


_SUMMARY_METRICS = ["mae", "mse", "rmse", "smape", "fit_seconds"]
SUMMARY_COLUMNS = (
    ["estimator", "m", "T", "n", "n_failed"]
    + [f"mean_{k}" for k in _SUMMARY_METRICS]
    + ["p_min", "p_q01", "p_q05", "p_median"]
)


def _summary_record(key, group) -> dict:
    est, m, t_len = key
    good = [r.report for r in group if not r.error]
    rec = {
        "estimator": est,
        "m": m,
        "T": t_len,
        "n": len(group),
        "n_failed": sum(1 for r in group if r.error),
    }
    for name in _SUMMARY_METRICS:
        vals = np.array([getattr(rep, name) for rep in good]) if good else np.array([np.nan])
        rec[f"mean_{name}"] = _fmt(float(np.nanmean(vals)) if np.any(np.isfinite(vals)) else float("nan"))
    pvals = np.array([rep.mardia_joint_p for rep in good]) if good else np.array([np.nan])
    finite = pvals[np.isfinite(pvals)]
    for col, q in (("p_min", 0.0), ("p_q01", 0.01), ("p_q05", 0.05), ("p_median", 0.5)):
        rec[col] = _fmt(float(np.quantile(finite, q)) if finite.size else float("nan"))
    return rec


def write_summary(rows, path: Path) -> None:
    """Per-cell means and Mardia p-value quantiles, plus per-estimator
    aggregates over the whole grid (m = T = 'all')."""
    cells = {}
    overall = {}
    for row in rows:
        cells.setdefault((row.estimator, row.m, row.T), []).append(row)
        overall.setdefault((row.estimator, "all", "all"), []).append(row)
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {SUMMARY_SCHEMA}\n")
        fh.write("# p-value quantiles are over Mardia joint p-values of successful fits\n")
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for key in sorted(cells) + sorted(overall):
            group = cells.get(key) or overall[key]
            writer.writerow(_summary_record(key, group))


def _check_timing_monotone(rows) -> None:
    """Soft sanity check: mean fit time should not decrease as T grows."""
    means = {}
    for row in rows:
        if row.error:
            continue
        means.setdefault((row.estimator, row.m), {}).setdefault(row.T, []).append(
            row.report.fit_seconds
        )
    for (est, m), per_len in means.items():
        lengths = sorted(per_len)
        avg = [float(np.mean(per_len[t])) for t in lengths]
        for prev, cur, t_prev, t_cur in zip(avg, avg[1:], lengths, lengths[1:]):
            if cur < prev * 0.5:
                log.info(
                    "timing dip for %s m=%d: T=%d took %.2gs vs T=%d %.2gs",
                    est, m, t_cur, cur, t_prev, prev,
                )

"""Static comparison charts rendered from benchmark rows.

Each figure is written as a self-contained vector image together with a
plain-text sidecar holding exactly the aggregated numbers that were drawn,
so downstream checks never have to parse pixels.
"""

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import DataError

_METRICS = ["mae", "rmse", "smape", "fit_seconds"]
_LABELS = {"mae": "MAE", "rmse": "RMSE", "smape": "SMAPE", "fit_seconds": "fit time [s]"}


def _read_rows(csv_path) -> list:
    path = Path(csv_path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    rows = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    required = {"estimator", "m", "T", "error", *_METRICS}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise DataError(f"{path} is not a benchmark rows file (missing columns)")
    for rec in reader:
        if rec["error"]:
            continue
        try:
            rows.append(
                {
                    "estimator": rec["estimator"],
                    "m": int(rec["m"]),
                    "T": int(rec["T"]),
                    **{k: float(rec[k]) for k in _METRICS},
                }
            )
        except ValueError as exc:
            raise DataError(f"malformed row in {path}: {exc}") from exc
    return rows


def _cell_means(rows) -> dict:
    sums = {}
    for row in rows:
        key = (row["estimator"], row["m"], row["T"])
        agg = sums.setdefault(key, {k: 0.0 for k in _METRICS} | {"n": 0})
        for k in _METRICS:
            agg[k] += row[k]
        agg["n"] += 1
    return {
        key: {k: agg[k] / agg["n"] for k in _METRICS} for key, agg in sums.items()
    }


def _write_sidecar(path: Path, header, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(records)


def _line_chart(means, x_field, fixed_field, fixed_value, out_base: Path):
    selected = {
        key: vals
        for key, vals in means.items()
        if (key[2] if fixed_field == "T" else key[1]) == fixed_value
    }
    if not selected:
        raise DataError(f"no data for {fixed_field}={fixed_value}")
    estimators = sorted({key[0] for key in selected})
    xs = sorted({key[1] if x_field == "m" else key[2] for key in selected})

    def cell_key(est, x):
        return (est, x, fixed_value) if x_field == "m" else (est, fixed_value, x)

    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    records = []
    for ax, metric in zip(axes.ravel(), _METRICS):
        for est in estimators:
            pts = [(x, selected[cell_key(est, x)][metric]) for x in xs if cell_key(est, x) in selected]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=est)
        ax.set_xlabel("matrix size m" if x_field == "m" else "series length T")
        ax.set_ylabel(_LABELS[metric])
        if metric == "fit_seconds":
            ax.set_yscale("log")
    for est in estimators:
        for x in xs:
            if cell_key(est, x) in selected:
                records.append([est, x] + [repr(selected[cell_key(est, x)][k]) for k in _METRICS])
    axes[0, 0].legend(fontsize=8)
    fig.suptitle(f"estimator comparison at {fixed_field}={fixed_value}")
    fig.tight_layout()
    img = out_base.with_suffix(".svg")
    fig.savefig(img)
    plt.close(fig)
    sidecar = out_base.parent / (out_base.name + ".data.csv")
    _write_sidecar(sidecar, ["estimator", x_field] + _METRICS, records)
    return [img, sidecar]


def _time_surface(means, out_base: Path):
    estimators = sorted({key[0] for key in means})
    sizes = sorted({key[1] for key in means})
    lengths = sorted({key[2] for key in means})
    if not estimators:
        raise DataError("no data for time surface")
    ncols = min(3, len(estimators))
    nrows = math.ceil(len(estimators) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 3.2 * nrows), squeeze=False)
    records = []
    for idx, est in enumerate(estimators):
        ax = axes[idx // ncols][idx % ncols]
        grid = [
            [means.get((est, m, t), {}).get("fit_seconds", float("nan")) for t in lengths]
            for m in sizes
        ]
        pc = ax.pcolormesh(lengths, sizes, grid, shading="nearest")
        fig.colorbar(pc, ax=ax, label="fit time [s]")
        ax.set_title(est)
        ax.set_xlabel("T")
        ax.set_ylabel("m")
        for i, m in enumerate(sizes):
            for j, t in enumerate(lengths):
                if (est, m, t) in means:
                    records.append([est, m, t, repr(grid[i][j])])
    for idx in range(len(estimators), nrows * ncols):
        axes[idx // ncols][idx % ncols].axis("off")
    fig.suptitle("mean fit time over (size, length)")
    fig.tight_layout()
    img = out_base.with_suffix(".svg")
    fig.savefig(img)
    plt.close(fig)
    sidecar = out_base.parent / (out_base.name + ".data.csv")
    _write_sidecar(sidecar, ["estimator", "m", "T", "fit_seconds"], records)
    return [img, sidecar]


def plot_results(csv_path, kind: str, out_dir, fix_length=None, fix_size=None) -> list:
    """Render one comparison figure and its data sidecar; returns the paths.

    ``vs_size`` plots metric means against matrix size at a fixed length
    (``fix_length``; inferred when the rows hold a single length), ``vs_length``
    against series length at a fixed size, ``time_surface`` maps mean fit time
    over the whole (size, length) grid.
    """
    rows = _read_rows(csv_path)
    if not rows:
        raise DataError(f"no usable rows in {csv_path}")
    means = _cell_means(rows)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if kind == "vs_size":
        if fix_length is None:
            lengths = sorted({key[2] for key in means})
            if len(lengths) != 1:
                raise DataError("multiple lengths present; pass --fix-length")
            fix_length = lengths[0]
        return _line_chart(means, "m", "T", fix_length, out_dir / f"vs_size_T{fix_length}")
    if kind == "vs_length":
        if fix_size is None:
            sizes = sorted({key[1] for key in means})
            if len(sizes) != 1:
                raise DataError("multiple sizes present; pass --fix-size")
            fix_size = sizes[0]
        return _line_chart(means, "T", "m", fix_size, out_dir / f"vs_length_m{fix_size}")
    if kind == "time_surface":
        return _time_surface(means, out_dir / "time_surface")
    raise ValueError(f"unknown plot kind {kind!r}")

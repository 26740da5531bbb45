"""Command-line entry points: the ``bench`` harness and single-series ``fit``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 grid completed with
partial fit failures.
"""

import json
import sys
from pathlib import Path

import click
import numpy as np

from .bench import ESTIMATORS, BenchSpec, run_grid
from .covariance import MatrixSeries
from .errors import DataError
from .estimators import FitOptions, is_causal
from .plots import plot_results

_ESTIMATOR_NAMES = sorted(ESTIMATORS)


def _int_list(_ctx, _param, value):
    try:
        return tuple(int(tok) for tok in value.split(",") if tok.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def _name_list(_ctx, _param, value):
    names = tuple(tok.strip() for tok in value.split(",") if tok.strip())
    unknown = [n for n in names if n not in ESTIMATORS]
    if unknown:
        raise click.BadParameter(
            f"unknown estimators {', '.join(unknown)}; choose from {', '.join(_ESTIMATOR_NAMES)}"
        )
    return names


@click.group()
def bench():
    """Benchmark matrix-AR and VAR estimators on simulated grids."""


@bench.command()
@click.option("--sizes", default="2,3,5", callback=_int_list, show_default=True,
              help="Comma-separated square matrix sizes.")
@click.option("--lengths", default="100,300", callback=_int_list, show_default=True,
              help="Comma-separated training lengths.")
@click.option("--replicates", default=100, show_default=True, help="Replicates per grid cell.")
@click.option("--estimators", default="mar_yw,mar_burg,mar_lse,var_yw", callback=_name_list,
              show_default=True, help=f"Comma-separated subset of: {', '.join(_ESTIMATOR_NAMES)}.")
@click.option("--seed", default=42, show_default=True, help="Base seed for the whole grid.")
@click.option("--test-len", default=100, show_default=True, help="Held-out span per replicate.")
@click.option("--burn-in", default=200, show_default=True, help="Simulation burn-in steps.")
@click.option("--jobs", default=1, show_default=True, help="Parallel replicate workers.")
@click.option("--scheme", default="one_step", show_default=True,
              type=click.Choice(["one_step", "free_run"]),
              help="Test-span predictions: rolling one-step with true history, "
                   "or a free-running forecast from the end of training.")
@click.option("--out", "out_dir", default="results", show_default=True, type=click.Path(),
              help="Output directory for rows.csv and summary.csv.")
def run(sizes, lengths, replicates, estimators, seed, test_len, burn_in, jobs, scheme, out_dir):
    """Run the benchmark grid and write per-fit rows plus a summary."""
    try:
        spec = BenchSpec(
            sizes=sizes,
            lengths=lengths,
            replicates=replicates,
            estimators=estimators,
            base_seed=seed,
            test_len=test_len,
            burn_in=burn_in,
            jobs=jobs,
            scheme=scheme,
            output_dir=Path(out_dir),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    result = run_grid(spec)
    click.echo(f"wrote {result.rows_path} ({len(result.rows)} rows)")
    click.echo(f"wrote {result.summary_path}")
    if result.failures:
        click.echo(f"{result.failures} fit(s) failed; see the error column", err=True)
        raise click.exceptions.Exit(3)


@bench.command()
@click.option("--csv", "csv_path", required=True, type=click.Path(), help="rows.csv from 'bench run'.")
@click.option("--kind", required=True, type=click.Choice(["vs_size", "vs_length", "time_surface"]))
@click.option("--fix-length", default=None, type=int, help="Training length held fixed (vs_size).")
@click.option("--fix-size", default=None, type=int, help="Matrix size held fixed (vs_length).")
@click.option("--out", "out_dir", default="figs", show_default=True, type=click.Path())
def plot(csv_path, kind, fix_length, fix_size, out_dir):
    """Render a comparison figure and its plain-text data sidecar."""
    paths = plot_results(csv_path, kind, out_dir, fix_length=fix_length, fix_size=fix_size)
    for path in paths:
        click.echo(f"wrote {path}")


def _parse_shape(value):
    try:
        m, n = value.lower().split("x")
        return int(m), int(n)
    except ValueError:
        raise click.BadParameter(f"expected MxN (e.g. 3x3), got {value!r}")


@click.command()
@click.option("--input", "input_path", required=True, type=click.Path(),
              help="CSV with T rows of m*n values per row, in column-stacking "
                   "(vec) order: first the m entries of column 1, then column 2, ...")
@click.option("--shape", required=True, help="Matrix shape MxN, e.g. 3x3.")
@click.option("--method", default="mar_burg", show_default=True,
              type=click.Choice(_ESTIMATOR_NAMES))
@click.option("--order", default=1, show_default=True, help="AR order (mar_burg only for p > 1).")
@click.option("--seed", default=None, type=int, help="Seed for randomized inner starts.")
@click.option("--max-iter", default=500, show_default=True)
@click.option("--tol", default=1e-10, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the fitted model as JSON.")
def fit(input_path, shape, method, order, seed, max_iter, tol, as_json):
    """Fit one model to a series stored as CSV (see --input for the format)."""
    m, n = _parse_shape(shape)
    if order < 1:
        raise click.UsageError("order must be >= 1")
    if order > 1 and method != "mar_burg":
        raise click.UsageError(f"order {order} > 1 is only supported by mar_burg")
    try:
        raw = np.loadtxt(input_path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise DataError(f"cannot read {input_path}: {exc}")
    except ValueError as exc:
        raise DataError(f"malformed CSV in {input_path}: {exc}")
    if raw.shape[1] != m * n:
        raise DataError(f"expected {m * n} values per row for shape {m}x{n}, got {raw.shape[1]}")
    if not np.all(np.isfinite(raw)):
        raise DataError(f"{input_path} contains NaN or Inf values")
    series = MatrixSeries.from_vecs(raw, m, n)
    opts = FitOptions(max_iter=max_iter, tol=tol, seed=seed)
    try:
        if method == "mar_burg":
            from .estimators import fit_mar_burg

            model = fit_mar_burg(series, order, opts)
        else:
            model = ESTIMATORS[method](series, opts)
    except ValueError as exc:
        raise DataError(str(exc))
    causal, rho = is_causal(model)
    if as_json:
        click.echo(json.dumps(_model_payload(method, model, causal, rho), indent=2))
    else:
        _echo_model(method, model, causal, rho)


def _model_payload(method, model, causal, rho):
    payload = {
        "method": method,
        "causal": causal,
        "rho": rho,
        "converged": bool(model.converged),
        "sigma": model.sigma.tolist(),
    }
    if hasattr(model, "coeffs"):
        payload.update(
            m=model.m,
            n=model.n,
            p=model.p,
            mean=model.mean.tolist(),
            coefficients=[{"a": a.tolist(), "b": b.tolist()} for a, b in model.coeffs],
        )
    else:
        payload.update(d=model.d, mean=model.mean.tolist(), phi=model.phi.tolist())
    return payload


def _echo_model(method, model, causal, rho):
    click.echo(f"method: {method}")
    click.echo(f"rho: {rho:.6g}  causal: {causal}  converged: {model.converged}")
    with np.printoptions(precision=4, suppress=True):
        if hasattr(model, "coeffs"):
            for i, (a, b) in enumerate(model.coeffs, start=1):
                click.echo(f"A[{i}] =\n{a}")
                click.echo(f"B[{i}] =\n{b}")
        else:
            click.echo(f"Phi =\n{model.phi}")
        click.echo(f"noise covariance diagonal: {np.diag(model.sigma)}")


def _dispatch(command) -> None:
    try:
        command.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


def main_bench() -> None:
    _dispatch(bench)


def main_fit() -> None:
    _dispatch(fit)

"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate
statistic, 4 reference-reproduction tolerance failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click
import numpy as np

from .dgp import EtaSpec
from .errors import (
    DataError,
    DegenerateStatisticError,
    InvalidSpecError,
    KernspecError,
    NonFiniteDataError,
    SingularDesignError,
    ToleranceError,
)
from .harness import ExperimentConfig, apply_test_csv, emit_report, null_distribution_sample, run_power, run_size
from .kernels import Bandwidth, parse_exponent
from .localtime import (
    FunctionalConfig,
    coupled_sup_discrepancy,
    default_window,
    gaussian_bump,
    intersection_local_time,
    simulate_gauss_path,
)
from .reference import reproduce_table

_KERNELS = click.Choice(["gaussian", "epanechnikov", "uniform"])
_FORMATS = click.Choice(["json", "csv", "markdown"])


def _sweep_options(f):
    options = [
        click.option("--n", "n_list", multiple=True, type=int, help="sample size (repeatable)"),
        click.option(
            "--bw-exp",
            "bw_exps",
            multiple=True,
            help="bandwidth exponent p in h=n^-p; decimal or fraction like 1/2.5 (repeatable)",
        ),
        click.option("--r", type=float, default=0.0, show_default=True, help="innovation correlation"),
        click.option(
            "--eta",
            type=click.Choice(["iid", "ar", "ma"]),
            default="iid",
            show_default=True,
            help="error-process mode for the regressor innovations",
        ),
        click.option("--lambda", "lam", type=float, default=0.0, show_default=True, help="eta coefficient"),
        click.option("--kappa", type=float, default=0.0, show_default=True, help="local-to-unity coefficient"),
        click.option("--reps", type=int, default=5000, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--kernel", type=_KERNELS, default="gaussian", show_default=True),
        click.option("--format", "fmt", type=_FORMATS, default="markdown", show_default=True),
        click.option("--out", type=click.Path(dir_okay=False), default=None, help="write output here too"),
        click.option("--jobs", type=int, default=1, show_default=True, help="parallel workers"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _build_config(n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel, nu=None):
    n_list = tuple(n_list) if n_list else (100, 200, 500)
    exps = tuple(parse_exponent(p) for p in bw_exps) if bw_exps else (0.25, 1.0 / 3.0, 0.4)
    return ExperimentConfig(
        n_list=n_list,
        bw_exponents=exps,
        r=r,
        eta_mode=eta,
        lam=lam,
        kappa=kappa,
        kernel=kernel,
        nu=nu,
        reps=reps,
        base_seed=seed,
    )


@click.group()
def cli():
    """Specification testing for regressions with near-integrated regressors."""


@cli.command()
@_sweep_options
def size(n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel, fmt, out, jobs):
    """Null rejection rates over an (n, bandwidth) grid."""
    config = _build_config(n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel)
    report = run_size(config, n_jobs=jobs)
    click.echo(emit_report(report, fmt, out), nl=False)
    click.echo(f"runtime: {report.runtime_seconds:.2f}s", err=True)


@cli.command()
@click.option("--nu", type=float, required=True, help="growth exponent of the mean shift |x|^nu")
@_sweep_options
def power(nu, n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel, fmt, out, jobs):
    """Rejection rates under the local polynomial alternative."""
    config = _build_config(n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel, nu=nu)
    report = run_power(config, n_jobs=jobs)
    click.echo(emit_report(report, fmt, out), nl=False)
    click.echo(f"runtime: {report.runtime_seconds:.2f}s", err=True)


@cli.command()
@_sweep_options
def nulldist(n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel, fmt, out, jobs):
    """Sample the standardized statistic under the null at one grid point."""
    n_list = tuple(n_list) if n_list else (500,)
    bw_exps = tuple(bw_exps) if bw_exps else ("1/3",)
    config = _build_config(n_list, bw_exps, r, eta, lam, kappa, reps, seed, kernel)
    sample = null_distribution_sample(config, n_jobs=jobs)
    text = _emit_nulldist(sample, config, fmt)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


def _emit_nulldist(sample: np.ndarray, config: ExperimentConfig, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["z"])
        for z in sample:
            writer.writerow([format(z, ".12g")])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(
            {"schema": "kernspec-nulldist-v1", "config": config.to_dict(), "z": sample.tolist()},
            indent=2,
            sort_keys=True,
        ) + "\n"
    mean = float(np.mean(sample))
    sd = float(np.std(sample, ddof=1))
    p95 = float(np.quantile(sample, 0.95))
    return (
        "# null-distribution sample\n\n"
        f"draws: {len(sample)}\n"
        f"mean: {mean:.4f}\nsd: {sd:.4f}\n95th percentile: {p95:.4f}\n"
    )


@cli.command("test")
@click.argument("csvfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", default="linear", show_default=True, help="null family: linear, poly:k, power, wexp")
@click.option("--kernel", type=_KERNELS, default="gaussian", show_default=True)
@click.option("--bw-exp", "bw_exp", default="1/3", show_default=True, help="bandwidth exponent")
@click.option("--h", "h", type=float, default=None, help="explicit bandwidth (overrides --bw-exp)")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--theta-init", default=None, help="comma-separated initial parameters for nonlinear nulls")
@click.option("--format", "fmt", type=_FORMATS, default="markdown", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def test_cmd(csvfile, model, kernel, bw_exp, h, alpha, theta_init, fmt, out):
    """Run the specification test on an aligned-pairs CSV (header t,x,y)."""
    init = None
    if theta_init is not None:
        init = [float(v) for v in theta_init.split(",")]
    result = apply_test_csv(
        csvfile,
        model=model,
        kernel=kernel,
        h=h,
        bw_exponent=parse_exponent(bw_exp),
        alpha=alpha,
        theta_init=init,
    )
    verdict = "reject" if result.reject else "fail to reject"
    line = (
        f"{verdict} the null ({result.model}) at level {result.alpha:g}: "
        f"z={result.z:.4f}, p={result.p_value:.4g}, n={result.n}, h={result.h:.5g}"
    )
    bw = Bandwidth(h=result.h, n=result.n)
    if not bw.nh2_ok:
        click.echo("warning: n h^2 <= 1; the bandwidth is too small for the pair sums to fill", err=True)
    if not bw.nh4log2_ok:
        click.echo(
            "warning: n h^4 log^2 n >= 1; with an endogenous regressor this bandwidth "
            "is larger than the theory backing the test allows",
            err=True,
        )
    if fmt == "json":
        payload = {
            "statistic": result.statistic,
            "norm_sq": result.norm_sq,
            "z": result.z,
            "p_value": result.p_value,
            "reject": result.reject,
            "alpha": result.alpha,
            "n": result.n,
            "h": result.h,
            "kernel": result.kernel,
            "model": result.model,
            "theta": list(result.theta),
            "verdict": verdict,
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        text = line + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)
    if fmt == "json":
        click.echo(line, err=True)


@cli.command("localtime-demo")
@click.option("--n", "n_list", multiple=True, type=int, help="path lengths for the coupling check")
@click.option("--seeds", type=int, default=20, show_default=True, help="seeds per path length")
@click.option("--kappa", type=float, default=0.0, show_default=True)
@click.option("--m", "grid_m", type=int, default=20000, show_default=True, help="grid size for the window-sensitivity rows")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def localtime_demo(n_list, seeds, kappa, grid_m, seed, out):
    """Coupling discrepancies and window sensitivity of the local-time estimator."""
    n_list = tuple(n_list) if n_list else (500, 1000, 2000)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "n", "seed", "kappa", "epsilon", "value"])
    eta = EtaSpec("iid")
    for n in n_list:
        c_n = float(np.sqrt(n)) * float(n) ** (1.0 / 3.0)
        config = FunctionalConfig(g=gaussian_bump, c_n=c_n)
        for s in range(seeds):
            sup = coupled_sup_discrepancy(
                int(np.int64(seed) + s), n, kappa, eta, config
            )
            writer.writerow(["sup_discrepancy", n, s, kappa, "", format(sup, ".6g")])
    path = simulate_gauss_path(kappa, grid_m, seed)
    eps0 = default_window(path.values, grid_m)
    for eps in (0.5 * eps0, eps0, 2.0 * eps0):
        est = intersection_local_time(path, 1.0, 0.0, eps)
        writer.writerow(
            ["window_sensitivity", grid_m, seed, kappa, format(eps, ".6g"), format(est.value, ".6g")]
        )
    text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


@cli.command()
@click.option("--table", type=click.IntRange(1, 6), required=True)
@click.option("--reps", type=int, default=5000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--kernel", type=_KERNELS, default="gaussian", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def reproduce(table, reps, seed, kernel, jobs, out):
    """Re-run a stored reference-table design and diff cell by cell."""
    result = reproduce_table(table, reps=reps, base_seed=seed, kernel=kernel, n_jobs=jobs)
    text = result.to_markdown()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)
    if not result.ok:
        raise ToleranceError(f"{result.failures} cells out of tolerance in table {table}")


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        code = exc.exit_code
    except click.UsageError as exc:
        exc.show()
        code = 1
    except click.Abort:
        click.echo("aborted", err=True)
        code = 1
    except click.ClickException as exc:
        exc.show()
        code = 1
    except (DataError, NonFiniteDataError, SingularDesignError) as exc:
        click.echo(f"data error: {exc}", err=True)
        code = 2
    except DegenerateStatisticError as exc:
        click.echo(f"degenerate statistic: {exc}", err=True)
        code = 3
    except ToleranceError as exc:
        click.echo(f"reproduction failure: {exc}", err=True)
        code = 4
    except InvalidSpecError as exc:
        click.echo(f"usage error: {exc}", err=True)
        code = 1
    except KernspecError as exc:
        click.echo(f"error: {exc}", err=True)
        code = 2
    else:
        code = 0
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()

"""Monte Carlo engine: size and power sweeps, null-distribution samples,
CSV ingestion, and report emission.

Replications are embarrassingly parallel.  Every replication owns a
stream keyed by the frozen 64-bit mix of (base seed, sample size,
bandwidth index, replication index), and cells aggregate integer
rejection counts, so a report is a pure function of (config, base seed)
no matter how many workers execute it.  Wall-clock runtime is carried
on the Report object for display but deliberately excluded from every
emitted format, which keeps emissions byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm

from .dgp import EtaSpec, InnovationSpec, long_run_phi, make_sample_path
from .errors import (
    DataError,
    DegenerateStatisticError,
    InvalidSpecError,
    NonFiniteDataError,
    RankDeficiencyError,
    SingularDesignError,
)
from .kernels import bandwidth_from_exponent
from .models import AlternativeSpec, apply_alternative, get_model
from .rng import mix64
from .teststat import run_test

REPORT_SCHEMA = "kernspec-report-v1"

_FAILURE_ERRORS = (
    SingularDesignError,
    RankDeficiencyError,
    DegenerateStatisticError,
    NonFiniteDataError,
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo sweep: the grid, the generating law, and the test."""

    n_list: tuple[int, ...] = (100, 200, 500)
    bw_exponents: tuple[float, ...] = (0.25, 1.0 / 3.0, 0.4)
    r: float = 0.0
    eta_mode: str = "iid"
    lam: float = 0.0
    kappa: float = 0.0
    model: str = "linear"
    kernel: str = "gaussian"
    theta_true: tuple[float, ...] = (0.0, 1.0)
    nu: float | None = None
    reps: int = 5000
    base_seed: int = 0
    levels: tuple[float, ...] = (0.05, 0.01)

    def __post_init__(self):
        if self.reps < 1:
            raise InvalidSpecError("reps must be at least 1")
        if not self.n_list or not self.bw_exponents:
            raise InvalidSpecError("n_list and bw_exponents must be nonempty")
        for level in self.levels:
            if not 0.0 < level < 1.0:
                raise InvalidSpecError(f"levels must lie in (0, 1), got {level}")
        # fail fast on bad process parameters
        self.eta_spec()
        InnovationSpec(self.r)
        model = get_model(self.model)
        if len(self.theta_true) != model.dim:
            raise InvalidSpecError(
                f"theta_true must have {model.dim} entries for model {model.name!r}"
            )

    def eta_spec(self) -> EtaSpec:
        return EtaSpec(mode=self.eta_mode, lam=self.lam if self.eta_mode != "iid" else 0.0)

    def rho_n(self, n: int, h: float) -> float:
        """Local-deviation scale 1 / (n^{1/4 + nu/3} h^{1/4}) for power runs."""
        if self.nu is None:
            raise InvalidSpecError("rho_n is only defined when nu is set")
        return 1.0 / (float(n) ** (0.25 + self.nu / 3.0) * h**0.25)

    def to_dict(self) -> dict:
        return {
            "n_list": list(self.n_list),
            "bw_exponents": list(self.bw_exponents),
            "r": self.r,
            "eta_mode": self.eta_mode,
            "lam": self.lam,
            "kappa": self.kappa,
            "model": self.model,
            "kernel": self.kernel,
            "theta_true": list(self.theta_true),
            "nu": self.nu,
            "reps": self.reps,
            "base_seed": self.base_seed,
            "levels": list(self.levels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(
            n_list=tuple(d["n_list"]),
            bw_exponents=tuple(d["bw_exponents"]),
            r=d["r"],
            eta_mode=d["eta_mode"],
            lam=d["lam"],
            kappa=d["kappa"],
            model=d["model"],
            kernel=d["kernel"],
            theta_true=tuple(d["theta_true"]),
            nu=d["nu"],
            reps=d["reps"],
            base_seed=d["base_seed"],
            levels=tuple(d["levels"]),
        )


@dataclass
class ReportCell:
    """Aggregated outcome for one (n, exponent) grid point."""

    n: int
    exponent: float
    h: float
    reps: int
    failures: int
    rejections: dict[str, int]

    @property
    def effective(self) -> int:
        return self.reps - self.failures

    def rate(self, level: float) -> float:
        if self.effective == 0:
            return math.nan
        return self.rejections[_level_key(level)] / self.effective

    def se(self, level: float) -> float:
        if self.effective == 0:
            return math.nan
        p = self.rate(level)
        return math.sqrt(p * (1.0 - p) / self.effective)


@dataclass
class Report:
    """Rejection-rate grid plus config echo; runtime is display-only."""

    kind: str
    config: ExperimentConfig
    cells: list[ReportCell] = field(default_factory=list)
    runtime_seconds: float | None = None

    def cell(self, n: int, exponent: float) -> ReportCell:
        for c in self.cells:
            if c.n == n and abs(c.exponent - exponent) < 1e-12:
                return c
        raise KeyError(f"no cell for n={n}, exponent={exponent}")

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "kind": self.kind,
            "config": self.config.to_dict(),
            "cells": [
                {
                    "n": c.n,
                    "exponent": c.exponent,
                    "h": c.h,
                    "reps": c.reps,
                    "failures": c.failures,
                    "rejections": c.rejections,
                }
                for c in self.cells
            ],
        }


def _level_key(level: float) -> str:
    return format(float(level), "g")


def _perturbed_init(theta_true: Sequence[float]) -> np.ndarray:
    """Deterministic 10 percent perturbation of the true parameter."""
    theta = np.asarray(theta_true, dtype=np.float64)
    out = theta * 1.1
    out[theta == 0.0] = 0.1
    return out


def replication_seed(base_seed: int, n: int, p_index: int, rep: int) -> int:
    """The documented per-replication stream key."""
    return mix64(base_seed, n, p_index, rep)


def _simulate_one(config: ExperimentConfig, n: int, p_index: int, h: float, rep: int):
    """Run one replication; returns (z, failed)."""
    seed = replication_seed(config.base_seed, n, p_index, rep)
    model = get_model(config.model)
    theta_true = np.asarray(config.theta_true, dtype=np.float64)

    def f_null(x):
        return model.f(x, theta_true)

    if config.nu is None:
        f_true = f_null
    else:
        alt = AlternativeSpec(nu=config.nu, rho_n=config.rho_n(n, h))
        f_true = apply_alternative(f_null, alt)

    path = make_sample_path(
        n,
        f_true=f_true,
        innovations=InnovationSpec(config.r),
        eta=config.eta_spec(),
        kappa=config.kappa,
        seed=seed,
    )
    theta_init = None if model.name == "linear" else _perturbed_init(theta_true)
    try:
        result = run_test(
            path, model=model, kernel=config.kernel, h=h, theta_init=theta_init
        )
    except _FAILURE_ERRORS:
        return math.nan, True
    if model.name != "linear" and not result.converged:
        return math.nan, True
    return result.z, False


def _chunk_worker(config: ExperimentConfig, n: int, p_index: int, h: float, lo: int, hi: int):
    """Aggregate a block of replications; called by each parallel worker."""
    thresholds = [norm.isf(level) for level in config.levels]
    counts = np.zeros(len(thresholds), dtype=np.int64)
    failures = 0
    zs = np.empty(hi - lo)
    for rep in range(lo, hi):
        z, failed = _simulate_one(config, n, p_index, h, rep)
        zs[rep - lo] = z
        if failed:
            failures += 1
            continue
        for j, thr in enumerate(thresholds):
            if z >= thr:
                counts[j] += 1
    return counts, failures, zs


def _run_cells(config: ExperimentConfig, kind: str, n_jobs: int, collect_z: bool = False):
    start = time.perf_counter()
    report = Report(kind=kind, config=config)
    z_all: list[np.ndarray] = []
    for n in config.n_list:
        for p_index, p in enumerate(config.bw_exponents):
            h = bandwidth_from_exponent(n, p).h
            if n_jobs == 1:
                chunks = [_chunk_worker(config, n, p_index, h, 0, config.reps)]
            else:
                bounds = np.linspace(0, config.reps, 4 * n_jobs + 1, dtype=int)
                jobs = [
                    delayed(_chunk_worker)(config, n, p_index, h, int(lo), int(hi))
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                    if hi > lo
                ]
                chunks = Parallel(n_jobs=n_jobs)(jobs)
            counts = np.zeros(len(config.levels), dtype=np.int64)
            failures = 0
            for c_counts, c_failures, c_zs in chunks:
                counts += c_counts
                failures += c_failures
                if collect_z:
                    z_all.append(c_zs)
            report.cells.append(
                ReportCell(
                    n=n,
                    exponent=p,
                    h=h,
                    reps=config.reps,
                    failures=failures,
                    rejections={
                        _level_key(level): int(c) for level, c in zip(config.levels, counts)
                    },
                )
            )
    report.runtime_seconds = time.perf_counter() - start
    if collect_z:
        z = np.concatenate(z_all) if z_all else np.empty(0)
        return report, z[np.isfinite(z)]
    return report


def run_size(config: ExperimentConfig, n_jobs: int = 1) -> Report:
    """Null rejection rates over the (n, exponent) grid."""
    if config.nu is not None:
        raise InvalidSpecError("size runs must not carry an alternative (nu)")
    return _run_cells(config, "size", n_jobs)


def run_power(config: ExperimentConfig, n_jobs: int = 1) -> Report:
    """Rejection rates under the local polynomial alternative."""
    if config.nu is None:
        raise InvalidSpecError("power runs need the alternative exponent nu")
    return _run_cells(config, "power", n_jobs)


def null_distribution_sample(config: ExperimentConfig, n_jobs: int = 1) -> np.ndarray:
    """The replication-level standardized statistics under the null.

    Requires a single (n, exponent) grid point; failed replications are
    dropped, so the output length is reps minus failures.
    """
    if config.nu is not None:
        raise InvalidSpecError("the null-distribution sample must not carry an alternative")
    if len(config.n_list) != 1 or len(config.bw_exponents) != 1:
        raise InvalidSpecError("null_distribution_sample needs exactly one (n, exponent) pair")
    _, z = _run_cells(config, "nulldist", n_jobs, collect_z=True)
    return z


def apply_test_csv(
    source,
    model="linear",
    kernel="gaussian",
    h: float | None = None,
    bw_exponent: float | None = None,
    alpha: float = 0.05,
    theta_init=None,
):
    """Run the specification test on an aligned-pairs CSV.

    The file must carry the header ``t,x,y``; each row stores one
    aligned observation pair, i.e. the regressor value and the response
    observed one step later.  No shifting is applied here.
    """
    if hasattr(source, "read"):
        rows = list(csv.reader(source))
    else:
        with open(source, newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows:
        raise DataError("CSV is empty")
    header = [c.strip().lower() for c in rows[0]]
    if header[:3] != ["t", "x", "y"]:
        raise DataError(f"CSV header must be 't,x,y', got {rows[0]!r}")
    xs: list[float] = []
    ys: list[float] = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 3:
            raise DataError(f"row {i}: expected 3 columns, got {len(row)}")
        for col_name, col_idx, sink in (("x", 1, xs), ("y", 2, ys)):
            cell = row[col_idx].strip()
            try:
                value = float(cell)
            except ValueError as exc:
                raise DataError(
                    f"row {i}, column '{col_name}': cannot parse {cell!r} as a number"
                ) from exc
            if not math.isfinite(value):
                raise DataError(f"row {i}, column '{col_name}': non-finite value {cell!r}")
            sink.append(value)
    if len(xs) < 10:
        raise DataError(f"need at least 10 data rows, got {len(xs)}")
    return run_test(
        (np.asarray(xs), np.asarray(ys)),
        model=model,
        kernel=kernel,
        h=h,
        bw_exponent=bw_exponent,
        alpha=alpha,
        theta_init=theta_init,
    )


def emit_report(report: Report, fmt: str = "markdown", out=None) -> str:
    """Serialize a report (json, csv or markdown); optionally write to a path.

    Emissions are canonical: they contain only the stable schema
    (config echo plus integer counts and derived rates), never wall
    time, so reruns with the same config and seed emit identical bytes.
    """
    fmt = fmt.lower()
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = _report_csv(report)
    elif fmt == "markdown":
        text = _report_markdown(report)
    else:
        raise InvalidSpecError(f"unknown report format {fmt!r}")
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text


def parse_report(text: str) -> Report:
    """Inverse of the json emission."""
    d = json.loads(text)
    if d.get("schema") != REPORT_SCHEMA:
        raise DataError(f"unknown report schema {d.get('schema')!r}")
    report = Report(kind=d["kind"], config=ExperimentConfig.from_dict(d["config"]))
    for c in d["cells"]:
        report.cells.append(
            ReportCell(
                n=c["n"],
                exponent=c["exponent"],
                h=c["h"],
                reps=c["reps"],
                failures=c["failures"],
                rejections=dict(c["rejections"]),
            )
        )
    return report


def _report_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "exponent", "h", "level", "rate", "se", "rejections", "failures", "effective"])
    for cell in report.cells:
        for level in report.config.levels:
            writer.writerow(
                [
                    cell.n,
                    format(cell.exponent, ".10g"),
                    format(cell.h, ".10g"),
                    _level_key(level),
                    format(cell.rate(level), ".6f"),
                    format(cell.se(level), ".6f"),
                    cell.rejections[_level_key(level)],
                    cell.failures,
                    cell.effective,
                ]
            )
    return buf.getvalue()


def _exponent_label(p: float) -> str:
    for num, den in ((1, 4), (1, 3), (1, 2)):
        if abs(p - num / den) < 1e-9:
            return f"n^-{num}/{den}"
    if abs(p - 0.4) < 1e-9:
        return "n^-1/2.5"
    return f"n^-{p:.4g}"


def _report_markdown(report: Report) -> str:
    cfg = report.config
    lines = [f"# {report.kind} report", ""]
    lines.append(
        f"model={cfg.model} kernel={cfg.kernel} r={cfg.r} eta={cfg.eta_mode}"
        + (f" lambda={cfg.lam}" if cfg.eta_mode != "iid" else "")
        + (f" nu={cfg.nu}" if cfg.nu is not None else "")
        + f" kappa={cfg.kappa} reps={cfg.reps} seed={cfg.base_seed}"
    )
    lines.append("")
    for level in cfg.levels:
        lines.append(f"## nominal level {_level_key(level)}")
        lines.append("")
        header = "| n | " + " | ".join(f"h={_exponent_label(p)}" for p in cfg.bw_exponents) + " |"
        lines.append(header)
        lines.append("|" + "---|" * (len(cfg.bw_exponents) + 1))
        for n in cfg.n_list:
            row = [str(n)]
            for p in cfg.bw_exponents:
                row.append(format(report.cell(n, p).rate(level), ".3f"))
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
    failures = sum(c.failures for c in report.cells)
    lines.append(f"failed replications: {failures}")
    lines.append("")
    return "\n".join(lines)

"""Batch simulation harness comparing correlation methods across data regimes.

One replicate draws a random DAG and weights, samples a dataset under the
configured regime, then runs PC once per (method, alpha) on a correlation
matrix estimated a single time per method.  Output is a flat records table
plus a per-cell summary at the best alpha (lowest mean structural distance,
ties resolved toward the smaller alpha).
"""

from __future__ import annotations

import configparser
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter

import numpy as np

from .citest import RankCiDecider, TestConfig
from .correlation import METHODS, estimate_correlation_matrix
from .graph import cpdag, shd
from .pc import run_pc
from .simulate import SemModel, derive_seed, random_dag, random_weights, sample_sem

__all__ = [
    "REGIMES",
    "DEFAULT_ALPHA_LOG10",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentRecord",
    "ExperimentResult",
    "SummaryRow",
    "load_config",
    "parse_config_text",
    "run_experiment",
    "summarize",
    "records_to_csv",
    "records_from_csv",
    "summary_to_csv",
    "write_plot_data",
]

REGIMES = ("normal", "f11", "contaminated")

_REGIME_MODEL = {
    "normal": ("standard_normal", "identity"),
    "f11": ("standard_normal", "f11"),
    "contaminated": ("cauchy_mixture", "identity"),
}

DEFAULT_ALPHA_LOG10 = (-7.0, -6.0, -5.0, -4.25, -3.5, -2.75, -2.0, -1.5, -1.0, -0.75)


class ConfigError(ValueError):
    """Invalid or unknown experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    p_values: tuple[int, ...]
    n_values: tuple[int, ...]
    degree: float
    regimes: tuple[str, ...] = ("normal",)
    methods: tuple[str, ...] = ("pearson", "spearman")
    alpha_log10: tuple[float, ...] = DEFAULT_ALPHA_LOG10
    replicates: int = 20
    seed: int = 0
    max_cond: int | None = None

    def __post_init__(self):
        if not self.p_values:
            raise ConfigError("need at least one p value")
        if not self.n_values:
            raise ConfigError("need at least one n value")
        for p in self.p_values:
            if p < 2:
                raise ConfigError(f"p must be at least 2, got {p}")
        for n in self.n_values:
            if n < 4:
                raise ConfigError(f"n must be at least 4 for the z test, got {n}")
        if self.degree <= 0:
            raise ConfigError(f"expected degree must be positive, got {self.degree}")
        for p in self.p_values:
            if self.degree > p - 1:
                raise ConfigError(
                    f"expected degree {self.degree} impossible at p={p} (max {p - 1})"
                )
        if not self.regimes:
            raise ConfigError("need at least one regime")
        for r in self.regimes:
            if r not in REGIMES:
                raise ConfigError(f"unknown regime {r!r}; expected one of {REGIMES}")
        if len(set(self.regimes)) != len(self.regimes):
            raise ConfigError("duplicate regimes")
        if not self.methods:
            raise ConfigError("need at least one method")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("duplicate methods")
        if not self.alpha_log10:
            raise ConfigError("need at least one alpha")
        for v in self.alpha_log10:
            if not v < 0.0:
                raise ConfigError(f"log10 alpha must be negative, got {v}")
        if len(set(self.alpha_log10)) != len(self.alpha_log10):
            raise ConfigError("duplicate alpha values")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be at least 1, got {self.replicates}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if self.max_cond is not None and self.max_cond < 0:
            raise ConfigError(f"max_cond must be nonnegative, got {self.max_cond}")


_REQUIRED_KEYS = ("p", "n", "degree")
_ALL_KEYS = (
    "p",
    "n",
    "degree",
    "regimes",
    "methods",
    "alpha_log10",
    "replicates",
    "seed",
    "max_cond",
)


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the key-value config format; unknown sections or keys are errors.

    One '[experiment]' section; list values are whitespace-separated.
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from None
    sections = parser.sections()
    if sections != ["experiment"]:
        raise ConfigError(f"expected exactly one [experiment] section, got {sections}")
    section = parser["experiment"]
    unknown = sorted(set(section) - set(_ALL_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in _REQUIRED_KEYS if k not in section]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")

    def _ints(key: str) -> tuple[int, ...]:
        try:
            return tuple(int(tok) for tok in section[key].split())
        except ValueError:
            raise ConfigError(f"key {key!r} must be a list of integers") from None

    def _floats(key: str) -> tuple[float, ...]:
        try:
            return tuple(float(tok) for tok in section[key].split())
        except ValueError:
            raise ConfigError(f"key {key!r} must be a list of numbers") from None

    kwargs: dict = {"p_values": _ints("p"), "n_values": _ints("n")}
    try:
        kwargs["degree"] = float(section["degree"])
    except ValueError:
        raise ConfigError("key 'degree' must be a number") from None
    if "regimes" in section:
        kwargs["regimes"] = tuple(section["regimes"].split())
    if "methods" in section:
        kwargs["methods"] = tuple(section["methods"].split())
    if "alpha_log10" in section:
        kwargs["alpha_log10"] = _floats("alpha_log10")
    if "replicates" in section:
        try:
            kwargs["replicates"] = int(section["replicates"])
        except ValueError:
            raise ConfigError("key 'replicates' must be an integer") from None
    if "seed" in section:
        try:
            kwargs["seed"] = int(section["seed"])
        except ValueError:
            raise ConfigError("key 'seed' must be an integer") from None
    if "max_cond" in section:
        try:
            kwargs["max_cond"] = int(section["max_cond"])
        except ValueError:
            raise ConfigError("key 'max_cond' must be an integer") from None
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


@dataclass(frozen=True)
class ExperimentRecord:
    p: int
    n: int
    d: float
    regime: str
    method: str
    alpha: float
    replicate: int
    seed: int
    shd: int
    tests_run: int
    max_cond_used: int
    runtime_ms: float


@dataclass
class ExperimentResult:
    records: list[ExperimentRecord]
    failures: list[str]


def _replicate_model(config: ExperimentConfig, regime: str, p: int, n: int, rep: int):
    """Deterministic model and dataset for one replicate coordinate."""
    seed = derive_seed(config.seed, p, n, config.degree, regime, rep)
    rng = np.random.default_rng(seed)
    s = config.degree / (p - 1)
    dag = random_dag(p, s, rng)
    weights = random_weights(dag, rng)
    noise, transform = _REGIME_MODEL[regime]
    model = SemModel(dag, weights, noise=noise, transform=transform)
    data = sample_sem(model, n, rng)
    return seed, model, data


def _run_replicate(args) -> tuple[list[ExperimentRecord], list[str]]:
    config, regime, p, n, rep = args
    records: list[ExperimentRecord] = []
    failures: list[str] = []
    where = f"regime={regime} p={p} n={n} replicate={rep}"
    try:
        seed, model, data = _replicate_model(config, regime, p, n, rep)
        truth = cpdag(model.dag)
    except Exception as err:
        failures.append(f"{where}: data generation failed: {err}")
        return records, failures
    for method in config.methods:
        try:
            sigma = estimate_correlation_matrix(data, method)
        except Exception as err:
            failures.append(f"{where} method={method}: estimation failed: {err}")
            continue
        for log_alpha in config.alpha_log10:
            alpha = 10.0**log_alpha
            try:
                decider = RankCiDecider(
                    sigma, n, TestConfig("fisher_z", method=method, alpha=alpha)
                )
                t0 = perf_counter()
                result = run_pc(decider, p, max_cond=config.max_cond)
                elapsed_ms = (perf_counter() - t0) * 1000.0
                records.append(
                    ExperimentRecord(
                        p=p,
                        n=n,
                        d=config.degree,
                        regime=regime,
                        method=method,
                        alpha=alpha,
                        replicate=rep,
                        seed=seed,
                        shd=shd(result.pdag, truth),
                        tests_run=result.tests_run,
                        max_cond_used=result.max_cond_used,
                        runtime_ms=elapsed_ms,
                    )
                )
            except Exception as err:
                failures.append(f"{where} method={method} alpha={alpha:.3g}: {err}")
    return records, failures


def _record_sort_key(r: ExperimentRecord):
    return (r.p, r.n, r.regime, r.method, r.alpha, r.replicate)


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run every (regime, p, n, replicate, method, alpha) combination.

    A failing run is reported in ``failures`` and skipped, never fatal.
    Records come back sorted, so output does not depend on scheduling.
    """
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    tasks = [
        (config, regime, p, n, rep)
        for regime in config.regimes
        for p in config.p_values
        for n in config.n_values
        for rep in range(config.replicates)
    ]
    records: list[ExperimentRecord] = []
    failures: list[str] = []
    if threads == 1:
        outcomes = map(_run_replicate, tasks)
        for recs, fails in outcomes:
            records.extend(recs)
            failures.extend(fails)
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for recs, fails in pool.map(_run_replicate, tasks, chunksize=1):
                records.extend(recs)
                failures.extend(fails)
    records.sort(key=_record_sort_key)
    failures.sort()
    return ExperimentResult(records, failures)


_CSV_HEADER = "p,n,d,regime,method,alpha,replicate,seed,shd,tests_run,max_cond_used,runtime_ms"


def records_to_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_CSV_HEADER + "\n")
        for r in sorted(records, key=_record_sort_key):
            fh.write(
                f"{r.p},{r.n},{format(r.d, '.17g')},{r.regime},{r.method},"
                f"{format(r.alpha, '.17g')},{r.replicate},{r.seed},{r.shd},"
                f"{r.tests_run},{r.max_cond_used},{format(r.runtime_ms, '.3f')}\n"
            )


def records_from_csv(path) -> list[ExperimentRecord]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError(f"unexpected records header in {path}")
    out = []
    for ln in lines[1:]:
        if not ln:
            continue
        parts = ln.split(",")
        if len(parts) != 12:
            raise ValueError(f"malformed records line: {ln!r}")
        out.append(
            ExperimentRecord(
                p=int(parts[0]),
                n=int(parts[1]),
                d=float(parts[2]),
                regime=parts[3],
                method=parts[4],
                alpha=float(parts[5]),
                replicate=int(parts[6]),
                seed=int(parts[7]),
                shd=int(parts[8]),
                tests_run=int(parts[9]),
                max_cond_used=int(parts[10]),
                runtime_ms=float(parts[11]),
            )
        )
    return out


@dataclass(frozen=True)
class SummaryRow:
    p: int
    n: int
    d: float
    regime: str
    method: str
    best_alpha: float
    mean_shd: float
    replicates: int


def summarize(records) -> list[SummaryRow]:
    """Mean structural distance at the best alpha for each experimental cell.

    Best alpha minimizes the mean over replicates; exact ties go to the
    smaller alpha.
    """
    cells: dict[tuple, dict[float, list[int]]] = {}
    for r in records:
        key = (r.p, r.n, r.d, r.regime, r.method)
        cells.setdefault(key, {}).setdefault(r.alpha, []).append(r.shd)
    rows = []
    for key in sorted(cells):
        by_alpha = cells[key]
        scored = sorted(
            (sum(shds) / len(shds), alpha, len(shds)) for alpha, shds in by_alpha.items()
        )
        mean_shd, best_alpha, count = scored[0]
        p, n, d, regime, method = key
        rows.append(SummaryRow(p, n, d, regime, method, best_alpha, mean_shd, count))
    return rows


def summary_to_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("p,n,d,regime,method,best_alpha,mean_shd,replicates\n")
        for r in rows:
            fh.write(
                f"{r.p},{r.n},{format(r.d, '.17g')},{r.regime},{r.method},"
                f"{format(r.best_alpha, '.17g')},{format(r.mean_shd, '.17g')},{r.replicates}\n"
            )


def write_plot_data(records, out_dir) -> list[Path]:
    """One whitespace-delimited file per (regime, degree, p).

    Rows are 'n method mean-shd-at-best-alpha', sorted by (method, n),
    under a comment header that plotting tools skip.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = summarize(records)
    groups: dict[tuple, list[SummaryRow]] = {}
    for row in rows:
        groups.setdefault((row.regime, row.d, row.p), []).append(row)
    paths = []
    for (regime, d, p), cell_rows in sorted(groups.items()):
        path = out / f"plot_{regime}_d{format(d, '.17g')}_p{p}.dat"
        cell_rows.sort(key=lambda r: (r.method, r.n))
        with open(path, "w", newline="") as fh:
            fh.write("# n method mean_shd\n")
            for r in cell_rows:
                fh.write(f"{r.n} {r.method} {format(r.mean_shd, '.17g')}\n")
        paths.append(path)
    return paths

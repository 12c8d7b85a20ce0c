"""Replicated pricing experiments and their CSV / Markdown reports."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .asian import (
    METHODS,
    AsianProblem,
    ConfigurationError,
    MarketParams,
    OptionParams,
    build_level_problem,
    build_single_level_problem,
    discounted_price,
)
from .low_discrepancy import (
    MCSource,
    QMCSource,
    direction_numbers,
    max_dimension,
    replication_seed,
    seeded_rng,
)
from .mlevel import LevelPlan, ml_estimate, sample_mean

CSV_COLUMNS = (
    "method", "multilevel", "L", "m", "n_finest", "N_L", "runs",
    "average", "stddev", "avg_time_s", "seed",
)
TABLE1_NL = (2, 4, 8, 16, 32, 64)
TABLE1_METHODS = ("mc", "forward", "pca", "regression")
TIMING_NOTE = "Times are wall-clock seconds per run; one-time setup (direction numbers, transforms) is excluded."


@dataclass(frozen=True)
class ExperimentConfig:
    """One pricing experiment.

    ``N`` is the sample count of a single-level run; ``N_L`` the finest-level
    count of a multilevel run.
    """

    method: str = "regression"
    multilevel: bool = True
    L: int = 10
    m: int = 2
    N_L: int | None = 16
    N: int | None = None
    market: MarketParams = field(default_factory=MarketParams)
    option: OptionParams = field(default_factory=OptionParams)
    runs: int = 100
    seed: int = 2012
    factor: int = 2
    randomization: str = "digital"
    workers: int = 1

    @property
    def problem(self) -> AsianProblem:
        return AsianProblem(self.market, self.option, self.m, self.L)

    @property
    def n_finest(self) -> int:
        return self.m**self.L

    @property
    def sample_count(self) -> int:
        return self.N_L if self.multilevel else self.N

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.method == "haar" and self.m != 2:
            raise ConfigurationError("the Haar transform needs m = 2")
        if self.m < 2 or self.L < 0:
            raise ConfigurationError("need m >= 2 and L >= 0")
        if self.randomization not in QMCSource.RANDOMIZATIONS:
            raise ConfigurationError(f"unknown randomization {self.randomization!r}")
        if self.runs < 1:
            raise ConfigurationError("need at least one run")
        if self.multilevel and not (self.N_L and self.N_L >= 1):
            raise ConfigurationError("multilevel runs need N_L >= 1")
        if not self.multilevel and not (self.N and self.N >= 1):
            raise ConfigurationError("single-level runs need N >= 1")
        if self.method != "mc" and self.n_finest > max_dimension():
            raise ConfigurationError(
                f"dimension {self.n_finest} exceeds the Sobol table ({max_dimension()})"
            )


@dataclass
class RunStatistics:
    config: ExperimentConfig
    prices: np.ndarray
    times: np.ndarray

    @property
    def average(self) -> float:
        return float(np.mean(self.prices))

    @property
    def stddev(self) -> float | None:
        if len(self.prices) < 2:
            return None
        return float(np.std(self.prices, ddof=1))

    @property
    def avg_time(self) -> float:
        return float(np.mean(self.times))


def _source(cfg: ExperimentConfig, dim: int, seed: int):
    rng = seeded_rng(seed)
    if cfg.method == "mc":
        return MCSource(dim, rng)
    return QMCSource(dim, rng, randomization=cfg.randomization)


def _prepare(cfg: ExperimentConfig):
    """Everything that is built once per experiment and kept out of the timings."""
    prob = cfg.problem
    if cfg.multilevel:
        plan = LevelPlan(cfg.m, cfg.L, cfg.N_L, cfg.factor)
        problems = [build_level_problem(l, prob, cfg.method) for l in plan.levels]
        dims = [plan.dimension(l) for l in plan.levels]
    else:
        plan = None
        problems = [build_single_level_problem(prob, cfg.method)]
        dims = [cfg.n_finest]
    if cfg.method != "mc":
        for d in set(dims):
            direction_numbers(d)
    return plan, problems, dims


def _replicate(cfg: ExperimentConfig, plan, problems, dims, index: int) -> tuple[float, float]:
    rep_seed = replication_seed(cfg.seed, index)
    # one independent stream (and shift) per level
    sources = [_source(cfg, d, replication_seed(rep_seed, l)) for l, d in enumerate(dims)]
    t0 = time.perf_counter()
    if plan is not None:
        value = ml_estimate(plan, problems, sources).value
    else:
        value = sample_mean(problems[0], sources[0], cfg.N)
    elapsed = time.perf_counter() - t0
    return discounted_price(value, cfg.market, cfg.option), elapsed


def run_experiment(cfg: ExperimentConfig) -> RunStatistics:
    """Price ``cfg.runs`` independent replications.

    Replication ``i`` is seeded from ``(cfg.seed, i)`` alone, so results do not
    depend on ``workers``.
    """
    cfg.validate()
    plan, problems, dims = _prepare(cfg)
    job = lambda i: _replicate(cfg, plan, problems, dims, i)  # noqa: E731
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            out = list(pool.map(job, range(cfg.runs)))
    else:
        out = [job(i) for i in range(cfg.runs)]
    prices = np.array([p for p, _ in out])
    times = np.array([t for _, t in out])
    return RunStatistics(cfg, prices, times)


@dataclass
class Table2Report:
    multilevel: RunStatistics
    single: RunStatistics

    @property
    def stddev_ratio(self) -> float | None:
        a, b = self.multilevel.stddev, self.single.stddev
        if a is None or b is None or b == 0:
            return None
        return a / b

    @property
    def time_ratio(self) -> float:
        return self.multilevel.avg_time / self.single.avg_time


def run_table2(ml_cfg: ExperimentConfig, sl_cfg: ExperimentConfig) -> Table2Report:
    """Multilevel versus single-level run of the same problem."""
    if not ml_cfg.multilevel or sl_cfg.multilevel:
        raise ConfigurationError("table2 compares one multilevel and one single-level config")
    for name in ("L", "m", "market", "option"):
        if getattr(ml_cfg, name) != getattr(sl_cfg, name):
            raise ConfigurationError(f"table2 configs disagree on {name}")
    ml_cfg.validate()
    sl_cfg.validate()
    return Table2Report(run_experiment(ml_cfg), run_experiment(sl_cfg))


def table2_configs(runs: int = 100, seed: int = 2012, N_L: int = 64, N: int = 4096,
                   method: str = "regression", **kw) -> tuple[ExperimentConfig, ExperimentConfig]:
    ml = ExperimentConfig(method=method, multilevel=True, N_L=N_L, runs=runs, seed=seed, **kw)
    return ml, replace(ml, multilevel=False, N_L=None, N=N)


def run_table1(runs: int = 100, seed: int = 2012, nl_values=TABLE1_NL, methods=TABLE1_METHODS,
               **kw) -> list[RunStatistics]:
    return [
        run_experiment(ExperimentConfig(method=meth, multilevel=True, N_L=nl, runs=runs, seed=seed, **kw))
        for nl in nl_values
        for meth in methods
    ]


def _num(x: float | None, spec: str = ".10g") -> str:
    return "" if x is None else format(x, spec)


def csv_row(stats: RunStatistics) -> dict[str, str]:
    c = stats.config
    return {
        "method": c.method,
        "multilevel": str(c.multilevel).lower(),
        "L": str(c.L),
        "m": str(c.m),
        "n_finest": str(c.n_finest),
        "N_L": str(c.sample_count),
        "runs": str(c.runs),
        "average": _num(stats.average),
        "stddev": _num(stats.stddev),
        "avg_time_s": _num(stats.avg_time, ".6g"),
        "seed": str(c.seed),
    }


def _sci(x: float | None) -> str:
    if x is None:
        return "n/a"
    if x == 0:
        return "0"
    e = int(np.floor(np.log10(abs(x))))
    return f"{x / 10.0**e:.2f}e{e:+d}"


def _markdown(stats: list[RunStatistics]) -> str:
    methods = list(dict.fromkeys(s.config.method for s in stats))
    counts = list(dict.fromkeys(s.config.sample_count for s in stats))
    cell = {(s.config.method, s.config.sample_count): s for s in stats}
    first = stats[0].config
    label = "N_L" if first.multilevel else "N"
    head = f"| {label} | " + " | ".join(f"{m} average | {m} stddev" for m in methods) + " |"
    rule = "|---|" + "---|---|" * len(methods)
    lines = [head, rule]
    for n in counts:
        row, trow = [str(n)], [""]
        for m in methods:
            s = cell.get((m, n))
            if s is None:
                row += ["", ""]
                trow += ["", ""]
            else:
                row += [f"{s.average:.6f}", _sci(s.stddev)]
                trow += [f"({s.avg_time:.4f} s)", ""]
        lines.append("| " + " | ".join(row) + " |")
        lines.append("| " + " | ".join(trow) + " |")
    kind = "Multilevel" if first.multilevel else "Single-level"
    lines.append("")
    lines.append(
        f"{kind} (Q)MC with {first.n_finest} time steps (L={first.L}, m={first.m}); "
        f"{first.runs} runs, seed {first.seed}. {TIMING_NOTE}"
    )
    return "\n".join(lines) + "\n"


def emit(stats, fmt: str = "csv") -> str:
    """Render one or more :class:`RunStatistics` as ``csv`` or ``md``."""
    if isinstance(stats, RunStatistics):
        stats = [stats]
    stats = list(stats)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for s in stats:
            w.writerow(csv_row(s))
        return buf.getvalue()
    if fmt == "md":
        return _markdown(stats)
    raise ValueError(f"unknown format {fmt!r}")


def emit_table2(report: Table2Report, fmt: str = "md") -> str:
    if fmt == "csv":
        return emit([report.multilevel, report.single], "csv")
    if fmt != "md":
        raise ValueError(f"unknown format {fmt!r}")
    lines = ["| | | average | stddev | time (s) |", "|---|---|---|---|---|"]
    for name, s in (("MLQMC", report.multilevel), ("QMC", report.single)):
        c = s.config
        size = f"N_L={c.N_L}" if c.multilevel else f"N={c.N}"
        lines.append(f"| {name} - {c.method} | ({size}) | {s.average:.6f} | {_sci(s.stddev)} | {s.avg_time:.4f} |")
    sr = report.stddev_ratio
    lines.append("")
    lines.append(f"stddev ratio (MLQMC/QMC): {'n/a' if sr is None else format(sr, '.3f')}; "
                 f"time ratio (MLQMC/QMC): {report.time_ratio:.3f}")
    lines.append(TIMING_NOTE)
    return "\n".join(lines) + "\n"

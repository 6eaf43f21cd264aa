"""Experiment driver: seeded grids, deterministic CSV emission.

Every grid cell derives its random streams from (seed, cell coordinates),
never from the algorithm under test, so runs with different algorithms see
identical channels and re-runs with any worker count produce byte-identical
CSV files.  Wall-clock timings appear only in the runtime experiment, whose
values are machine-dependent by nature.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .beamforming import feasible_m_range, spzf_two_user
from .channels import ChannelModel, sample_channel, substream
from .metrics import (
    SecrecyConfig,
    estimate_outage_two_user,
    estimate_secrecy_rate,
    fray_approx,
    fray_empirical,
    optimal_m_search,
)
from .partition import make_partitioner, pseudo_loss

SCHEMA_VERSION = 1
CSV_HEADER = (
    "schema,experiment,algo,model,n,m,n_e,snr_db,metric,value,stderr,trials,seed,wall_time_ms"
)

EXPERIMENTS = ("fray", "outage", "min-outage", "secrecy", "runtime")


@dataclass
class ExperimentConfig:
    experiment: str
    model: str = "rayleigh"
    paths: int = 10
    spacing_ratio: float = 0.5
    sigma2: float = 1.0
    n: list[int] = field(default_factory=lambda: [20])
    m: list[int] | None = None
    algos: list[str] = field(default_factory=lambda: ["random-fc"])
    trials: int = 10_000
    seed: int = 0
    snr_db: list[float] = field(default_factory=lambda: [0, 5, 10, 15, 20, 25, 30])
    n_e: int = 1
    out: str = "results.csv"
    threads: int = 1
    m_search_trials: int | None = None

    def channel_model(self) -> ChannelModel:
        return ChannelModel(
            model=self.model,
            sigma2=self.sigma2,
            paths=self.paths,
            spacing_ratio=self.spacing_ratio,
        )

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n:
            raise ValueError("empty antenna grid")
        if not self.algos:
            raise ValueError("no algorithms selected")


@dataclass
class ResultRow:
    experiment: str
    algo: str
    model: str
    n: int | None
    m: int | None
    n_e: int | None
    snr_db: float | None
    metric: str
    value: float
    stderr: float | None
    trials: int
    seed: int
    wall_time_ms: float | None = None

    def to_csv(self) -> str:
        cells = [
            str(SCHEMA_VERSION),
            self.experiment,
            self.algo,
            self.model,
            _fmt(self.n),
            _fmt(self.m),
            _fmt(self.n_e),
            _fmt(self.snr_db),
            self.metric,
            _fmt(self.value),
            _fmt(self.stderr),
            str(self.trials),
            str(self.seed),
            _fmt(self.wall_time_ms),
        ]
        return ",".join(cells)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def write_csv(rows: list[ResultRow], path: str):
    with open(path, "w", newline="\n") as f:
        f.write(CSV_HEADER + "\n")
        for row in rows:
            f.write(row.to_csv() + "\n")


def _m_values(cfg: ExperimentConfig, n: int) -> list[int]:
    if cfg.m:
        return list(cfg.m)
    ms = feasible_m_range(n)
    if not ms:
        raise ValueError(f"no feasible set count for n={n}; pass m explicitly")
    return ms


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    cfg.validate()
    return {
        "fray": _run_fray,
        "outage": _run_outage,
        "min-outage": _run_min_outage,
        "secrecy": _run_secrecy,
        "runtime": _run_runtime,
    }[cfg.experiment](cfg)


def _run_fray(cfg: ExperimentConfig) -> list[ResultRow]:
    model = cfg.channel_model()
    rows = []
    if not cfg.m:
        raise ValueError("fray needs explicit m values")
    for m in cfg.m:
        est = fray_empirical(
            m, sigma2=cfg.sigma2, trials=cfg.trials, seed=(cfg.seed, m),
            model=model if cfg.model == "geometric" else None,
        )
        rows.append(
            ResultRow(cfg.experiment, "", cfg.model, None, m, None, None,
                      "fray", est.probability, est.stderr, cfg.trials, cfg.seed)
        )
        rows.append(
            ResultRow(cfg.experiment, "", cfg.model, None, m, None, None,
                      "fray_approx", fray_approx(m), 0.0, 0, cfg.seed)
        )
    return rows


def _run_outage(cfg: ExperimentConfig) -> list[ResultRow]:
    model = cfg.channel_model()
    rows = []
    for n in cfg.n:
        for m in _m_values(cfg, n):
            for algo in cfg.algos:
                est = estimate_outage_two_user(
                    n, m, algo=algo, model=model, trials=cfg.trials,
                    seed=(cfg.seed, n, m), threads=cfg.threads,
                )
                for metric, e in (
                    ("pr_e1", est.e1),
                    ("pr_e2_given_e1c", est.e2_given_e1c),
                    ("pr_outage", est.outage),
                ):
                    rows.append(
                        ResultRow(cfg.experiment, algo, cfg.model, n, m, None, None,
                                  metric, e.probability, e.stderr, e.trials, cfg.seed)
                    )
    return rows


def _run_min_outage(cfg: ExperimentConfig) -> list[ResultRow]:
    model = cfg.channel_model()
    rows = []
    for n in cfg.n:
        for algo in cfg.algos:
            m_star, est = optimal_m_search(
                n, algo=algo, model=model, trials=cfg.trials,
                seed=(cfg.seed, n), threads=cfg.threads,
            )
            rows.append(
                ResultRow(cfg.experiment, algo, cfg.model, n, m_star, None, None,
                          "min_outage", est.outage.probability, est.outage.stderr,
                          est.trials, cfg.seed)
            )
    return rows


def _run_secrecy(cfg: ExperimentConfig) -> list[ResultRow]:
    model = cfg.channel_model()
    rows = []
    for n in cfg.n:
        for algo in cfg.algos:
            if cfg.m:
                m_star = cfg.m[0]
            else:
                m_star, _ = optimal_m_search(
                    n, algo=algo, model=model,
                    trials=cfg.m_search_trials or cfg.trials,
                    seed=(cfg.seed, n, 1), threads=cfg.threads,
                )
            for snr_idx, snr in enumerate(cfg.snr_db):
                est = estimate_secrecy_rate(
                    SecrecyConfig(snr_db=snr, n=n, n_e=cfg.n_e),
                    algo=algo, model=model, trials=cfg.trials,
                    seed=(cfg.seed, n, snr_idx), m=m_star, threads=cfg.threads,
                )
                for metric, me in (
                    ("rate_user1", est.rate_user1),
                    ("rate_user2", est.rate_user2),
                    ("rate_min", est.rate_min),
                ):
                    rows.append(
                        ResultRow(cfg.experiment, algo, cfg.model, n, m_star,
                                  cfg.n_e, snr, metric, me.mean, me.stderr,
                                  me.trials, cfg.seed)
                    )
                rows.append(
                    ResultRow(cfg.experiment, algo, cfg.model, n, m_star, cfg.n_e,
                              snr, "pr_outage", est.outage.probability,
                              est.outage.stderr, est.outage.trials, cfg.seed)
                )
    return rows


def _run_runtime(cfg: ExperimentConfig) -> list[ResultRow]:
    model = cfg.channel_model()
    rows = []
    for n in cfg.n:
        for algo in cfg.algos:
            if cfg.m:
                m = cfg.m[0]
            else:
                m, _ = optimal_m_search(
                    n, algo=algo, model=model,
                    trials=cfg.m_search_trials or 1000,
                    seed=(cfg.seed, n, 1), threads=cfg.threads,
                )
            fn = make_partitioner(algo)
            rng = substream((cfg.seed, n), 2)
            draws = [sample_channel(n, model, rng) for _ in range(cfg.trials)]
            t_cell = time.perf_counter()
            times = np.empty(cfg.trials)
            for t, h in enumerate(draws):
                t0 = time.perf_counter()
                fn(h, m, rng)
                times[t] = (time.perf_counter() - t0) * 1e3
            wall = (time.perf_counter() - t_cell) * 1e3
            stderr = float(times.std(ddof=1) / np.sqrt(times.size)) if times.size > 1 else None
            rows.append(
                ResultRow(cfg.experiment, algo, cfg.model, n, m, None, None,
                          "runtime_ms", float(times.mean()), stderr,
                          cfg.trials, cfg.seed, wall_time_ms=wall)
            )
    return rows


def load_complex_vector(path: str) -> np.ndarray:
    """Read a complex vector from text: one "re im" pair per line, '#' comments."""
    values = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 're im', got {line!r}")
            values.append(complex(float(parts[0]), float(parts[1])))
    if not values:
        raise ValueError(f"{path}: no entries found")
    return np.asarray(values, dtype=complex)


def solve_once(h1_path: str, h2_path: str, algo: str, m: int, seed: int = 0) -> dict:
    """Single two-user solve from channel files; returns a printable report."""
    h1 = load_complex_vector(h1_path)
    h2 = load_complex_vector(h2_path)
    if h1.size != h2.size:
        raise ValueError(
            f"channel lengths differ: {h1.size} vs {h2.size}"
        )
    rng = substream(seed)
    part = make_partitioner(algo)(h1, m, rng)
    result = spzf_two_user(h1, h2, part)
    report = {
        "n": h1.size,
        "m": part.n_sets,
        "algo": algo,
        "partition": [sorted(int(i) for i in idx) for idx in part.sets()],
        "pseudo_loss": pseudo_loss(h1, part),
        "outcome": "success" if result.success else result.outcome,
    }
    if result.success:
        report["w"] = result.w
        report["stage_phases"] = result.stage_phases
        report["residuals"] = result.residuals
    else:
        report["failing_stage"] = result.failing_stage
    return report

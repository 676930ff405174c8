"""Seeded Monte-Carlo studies of the estimator and persistent reports.

Scenarios
---------
table1
    Corpus texts judged by a mock oracle at the (p, q) rates measured for six
    LLM judges, over a ratio x size grid.
phase_sweep
    Entropy gap as the separation p - q grows at fixed q.
rate_study
    Gap and miscluster rate as n grows at fixed (p, q), with a log-log slope.
generative_study
    Labels drawn i.i.d. from cluster probabilities; |E_true - E_hat| against
    the generative-model bound.
concentration
    Sampling error of the empirical entropy and of the smallest cluster,
    against the Hoeffding and Chernoff radii.

Every replication owns a seed derived from ``(seed, cell, rep)``, so results
do not depend on execution order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .assignment import ClusterAssignment
from .clustering import SpectralConfig
from .corpus import allocate_counts, builtin_lists, generate_collection
from .entropy import (
    BoundConditionError,
    chernoff_c2,
    entropy,
    h,
    hoeffding_radius,
)
from .graph import SbmParams, sample_sbm, sample_sbm_from_labels
from .oracle import MockOracle, build_adjacency
from .pipeline import run_pipeline

FORMAT_VERSION = 1
SCENARIOS = ("table1", "phase_sweep", "rate_study", "generative_study", "concentration")

# (p, q) rates measured for each judge, per experiment (item list)
TABLE1_ROWS = {
    "hobbies": {
        "LLAMA": (0.17, 0.00),
        "MINISTRAL": (0.99, 0.77),
        "COHERE": (0.61, 0.05),
        "A21": (0.96, 0.15),
        "PHI": (0.67, 0.01),
        "GPT": (0.87, 0.07),
    },
    "events": {
        "LLAMA": (0.75, 0.00),
        "MINISTRAL": (1.00, 0.75),
        "COHERE": (0.98, 0.46),
        "A21": (0.50, 0.01),
        "PHI": (0.28, 0.00),
        "GPT": (0.96, 0.20),
    },
}
# mean gaps observed with the live judges, same cell order as the default grid
TABLE1_REPORTED = {
    "hobbies": {
        "LLAMA": (0.36, 0.49, 0.44, 0.34, 0.43, 0.46, 0.30, 0.27, 0.26),
        "MINISTRAL": (0.22, 0.27, 0.13, 0.25, 0.23, 0.21, 0.14, 0.22, 0.21),
        "COHERE": (0.04, 0.02, 0.06, 0.02, 0.03, 0.00, 0.00, 0.00, 0.00),
        "A21": (0.05, 0.00, 0.00, 0.00, 0.01, 0.00, 0.00, 0.00, 0.00),
        "PHI": (0.08, 0.07, 0.07, 0.03, 0.03, 0.00, 0.00, 0.00, 0.00),
        "GPT": (0.06, 0.02, 0.00, 0.01, 0.00, 0.00, 0.00, 0.00, 0.00),
    },
    "events": {
        "LLAMA": (0.04, 0.02, 0.05, 0.03, 0.03, 0.07, 0.04, 0.00, 0.00),
        "MINISTRAL": (0.20, 0.20, 0.19, 0.17, 0.24, 0.19, 0.04, 0.07, 0.19),
        "COHERE": (0.08, 0.04, 0.09, 0.08, 0.09, 0.04, 0.00, 0.01, 0.04),
        "A21": (0.09, 0.14, 0.12, 0.08, 0.00, 0.01, 0.00, 0.00, 0.00),
        "PHI": (0.10, 0.04, 0.19, 0.16, 0.03, 0.06, 0.07, 0.06, 0.00),
        "GPT": (0.02, 0.01, 0.06, 0.02, 0.04, 0.00, 0.00, 0.00, 0.00),
    },
}
TABLE1_RATIOS = ((0.2, 0.3, 0.5), (0.3, 0.3, 0.4), (0.5, 0.5))
TABLE1_SIZES = (30, 50, 70)


class ReportVersionError(ValueError):
    pass


def derive_seed(master: int, *counters: int) -> int:
    return int(np.random.SeedSequence([master, *counters]).generate_state(1, np.uint64)[0])


def mc_slack(p: float, reps: int) -> float:
    """Three binomial standard errors at rate ``p`` over ``reps`` draws."""
    return 3 * math.sqrt(max(p * (1 - p), 0.0) / reps)


def _default(value, fallback):
    return fallback if value is None else value


@dataclass
class ExperimentConfig:
    """What to simulate. Fields left as ``None`` take the scenario's defaults."""

    scenario: str
    ratios: list | None = None
    sizes: list | None = None
    pq: dict | None = None
    k_policy: str = "true"
    replications: int | None = None
    seed: int = 0
    variant: str = "unnormalized"
    restarts: int = 10
    item_list: str = "hobbies"
    M: int = 3
    template: str = "canonical"
    p_vec: list | None = None
    alpha_n: float | None = None
    workers: int = 1

    def __post_init__(self):
        s = self.scenario
        if s not in SCENARIOS:
            raise ValueError(f"unknown scenario {s!r}; expected one of {SCENARIOS}")
        if s == "table1":
            self.ratios = _default(self.ratios, [list(r) for r in TABLE1_RATIOS])
            self.sizes = _default(self.sizes, list(TABLE1_SIZES))
            self.pq = _default(self.pq, {k: list(v) for k, v in TABLE1_ROWS[self.item_list].items()})
            self.replications = _default(self.replications, 10)
        elif s == "phase_sweep":
            self.ratios = _default(self.ratios, [[0.2, 0.3, 0.5]])
            self.sizes = _default(self.sizes, [50])
            self.pq = _default(self.pq, {f"p={p:.2f}": [round(p, 2), 0.05] for p in np.arange(0.15, 0.951, 0.1)})
            self.replications = _default(self.replications, 20)
        elif s == "rate_study":
            self.ratios = _default(self.ratios, [[1 / 3, 1 / 3, 1 / 3]])
            self.sizes = _default(self.sizes, [30, 60, 120, 240])
            self.pq = _default(self.pq, {"sbm": [0.9, 0.1]})
            self.replications = _default(self.replications, 50)
        elif s == "generative_study":
            self.p_vec = _default(self.p_vec, [0.2, 0.3, 0.5])
            self.sizes = _default(self.sizes, [500])
            self.pq = _default(self.pq, {"sbm": [0.9, 0.1]})
            self.replications = _default(self.replications, 300)
        else:
            self.p_vec = _default(self.p_vec, [0.2, 0.3, 0.5])
            self.sizes = _default(self.sizes, [100])
            self.pq = _default(self.pq, {})
            self.replications = _default(self.replications, 1000)

        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.k_policy not in ("true", "cv"):
            raise ValueError(f"K policy must be 'true' or 'cv', got {self.k_policy!r}")
        for label, (p, q) in self.pq.items():
            if not (0 <= p <= 1 and 0 <= q <= 1):
                raise ValueError(f"(p, q) for {label!r} must lie in [0, 1]^2, got {(p, q)}")
        if any(n < 2 for n in self.sizes):
            raise ValueError("every size must be at least 2")
        self.ratios = [list(map(float, r)) for r in self.ratios] if self.ratios else None
        self.sizes = [int(n) for n in self.sizes]
        self.pq = {str(k): [float(v[0]), float(v[1])] for k, v in self.pq.items()}
        self.p_vec = [float(x) for x in self.p_vec] if self.p_vec else None

    def cells(self) -> list[dict]:
        if self.scenario in ("generative_study", "concentration"):
            rows = self.pq.items() or [("-", [None, None])]
            return [
                {"row": label, "p": pq[0], "q": pq[1], "p_vec": self.p_vec, "n": n}
                for label, pq in rows
                for n in self.sizes
            ]
        return [
            {"row": label, "p": pq[0], "q": pq[1], "ratios": r, "n": n}
            for label, pq in self.pq.items()
            for r in self.ratios
            for n in self.sizes
        ]

    def spectral(self, seed) -> SpectralConfig:
        return SpectralConfig(variant=self.variant, restarts=self.restarts, seed=seed)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SimulationReport:
    scenario: str
    config: dict
    records: list
    aggregates: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def without_timing(self) -> "SimulationReport":
        """Copy with wall times dropped; what remains is a pure function of the config."""
        recs = [{k: v for k, v in r.items() if k != "wall_time"} for r in self.records]
        return SimulationReport(self.scenario, self.config, recs, self.aggregates, self.summary, self.format_version)

    def cell_means(self, field_name="gap") -> list[float]:
        return [a[f"{field_name}_mean"] for a in self.aggregates]


# -- one replication per scenario ---------------------------------------------


def _opt(x):
    return None if x is None else float(x)


def _pipeline_record(rep, cell_idx, cell, seed, cfg, report):
    return {
        "cell": cell_idx,
        "rep": rep,
        "seed": seed,
        "K": report.K,
        "e_bar": report.e_bar,
        "e_hat": report.e_hat,
        "gap": report.gap_bar_hat,
        "m_error": report.m_error,
        "m_error_rate": None if report.m_error is None else report.m_error / cell["n"],
        "p_hat": _opt(report.p_hat),
        "q_hat": _opt(report.q_hat),
        "lemma1_bound": report.bounds.get("lemma1"),
    }


def _k_arg(cfg):
    return "cv" if cfg.k_policy == "cv" else "true"


def _rep_table1(cfg, cell_idx, cell, rep, seed):
    items = builtin_lists()[cfg.item_list]
    coll = generate_collection(items, cfg.M, cell["ratios"], cell["n"], seed=seed, template=cfg.template)
    oracle = MockOracle(coll.truth, cell["p"], cell["q"], seed=seed)
    E = build_adjacency(coll.texts, oracle)
    report = run_pipeline(E=E, truth=coll.truth, k=_k_arg(cfg), seed=seed, config=cfg.spectral(seed), alpha_n=cfg.alpha_n)
    return _pipeline_record(rep, cell_idx, cell, seed, cfg, report)


def _rep_sbm(cfg, cell_idx, cell, rep, seed):
    sizes = allocate_counts(cell["ratios"], cell["n"])
    E, truth = sample_sbm(SbmParams(cell["p"], cell["q"], sizes), seed)
    report = run_pipeline(E=E, truth=truth, k=_k_arg(cfg), seed=seed, config=cfg.spectral(seed), alpha_n=cfg.alpha_n)
    rec = _pipeline_record(rep, cell_idx, cell, seed, cfg, report)
    rec["separation"] = cell["p"] - cell["q"]
    return rec


def _rep_generative(cfg, cell_idx, cell, rep, seed):
    p_vec = np.asarray(cell["p_vec"])
    K, n = p_vec.size, cell["n"]
    rng = np.random.default_rng([seed, 1])
    labels = np.sort(rng.choice(K, size=n, p=p_vec))
    truth = ClusterAssignment(labels, K)
    E = sample_sbm_from_labels(labels, cell["p"], cell["q"], seed)
    report = run_pipeline(E=E, truth=truth, k=K, seed=seed, config=cfg.spectral(seed), p_vec=p_vec)
    p_min = float(p_vec.min())
    thr = h(1 / p_min) * hoeffding_radius(n, K)
    bound = report.bounds.get("theorem4")
    return {
        "cell": cell_idx,
        "rep": rep,
        "seed": seed,
        "e_true": report.e_true,
        "e_bar": report.e_bar,
        "e_hat": report.e_hat,
        "gap": report.gap_bar_hat,
        "gap_true_hat": report.gap_true_hat,
        "gap_true_bar": report.gap_true_bar,
        "m_error": report.m_error,
        "theorem4_bound": bound,
        "exceeds_theorem4": None if bound is None else bool(report.gap_true_hat > bound),
        "hoeffding_threshold": thr,
        "exceeds_hoeffding": bool(report.gap_true_bar > thr),
    }


def _rep_concentration(cfg, cell_idx, cell, rep, seed):
    p_vec = np.asarray(cell["p_vec"])
    K, n = p_vec.size, cell["n"]
    counts = np.random.default_rng(seed).multinomial(n, p_vec)
    p_bar = counts / n
    p_min = float(p_vec.min())
    e_true, e_bar = entropy(p_vec), entropy(p_bar)
    radius = hoeffding_radius(n, K)
    try:
        c2 = chernoff_c2(n, K, p_min)
    except BoundConditionError:
        c2 = None
    return {
        "cell": cell_idx,
        "rep": rep,
        "seed": seed,
        "e_true": e_true,
        "e_bar": e_bar,
        "gap_true_bar": abs(e_true - e_bar),
        "l1_dev": float(np.abs(p_vec - p_bar).sum()),
        "n_min": int(counts.min()),
        "hoeffding_radius": radius,
        "exceeds_entropy": bool(abs(e_true - e_bar) > h(1 / p_min) * radius),
        "exceeds_l1": bool(np.abs(p_vec - p_bar).sum() > radius),
        "chernoff_c2": c2,
        "shortfall": None if c2 is None else bool(counts.min() < n * c2 / (2 * K)),
    }


_RUNNERS = {
    "table1": _rep_table1,
    "phase_sweep": _rep_sbm,
    "rate_study": _rep_sbm,
    "generative_study": _rep_generative,
    "concentration": _rep_concentration,
}

_AGG_FIELDS = {
    "table1": ("gap", "m_error", "m_error_rate", "p_hat", "q_hat", "e_bar", "e_hat"),
    "phase_sweep": ("gap", "m_error", "m_error_rate", "p_hat", "q_hat"),
    "rate_study": ("gap", "m_error", "m_error_rate", "p_hat", "q_hat"),
    "generative_study": (
        "gap",
        "gap_true_hat",
        "gap_true_bar",
        "m_error",
        "theorem4_bound",
        "exceeds_theorem4",
        "exceeds_hoeffding",
    ),
    "concentration": ("gap_true_bar", "l1_dev", "n_min", "exceeds_entropy", "exceeds_l1", "shortfall"),
}


# -- aggregation and summaries ------------------------------------------------


def aggregate(records: list, cells: list, scenario: str) -> list:
    """Per-cell mean, standard error and count of each numeric field."""
    out = []
    for idx, cell in enumerate(cells):
        rows = [r for r in records if r["cell"] == idx]
        agg = {"cell": idx, **cell, "count": len(rows)}
        for name in _AGG_FIELDS[scenario]:
            vals = np.array([float(r[name]) for r in rows if r.get(name) is not None])
            agg[f"{name}_count"] = int(vals.size)
            agg[f"{name}_mean"] = float(vals.mean()) if vals.size else None
            agg[f"{name}_se"] = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        if scenario == "generative_study":
            g = np.array([r["gap_true_hat"] for r in rows])
            for qname, qv in (("q50", 0.5), ("q90", 0.9), ("q99", 0.99)):
                agg[f"gap_true_hat_{qname}"] = float(np.quantile(g, qv))
            agg["gap_true_hat_max"] = float(g.max())
        out.append(agg)
    return out


def loglog_slope(ns, means) -> float | None:
    """Least-squares slope of log(mean) on log(n) over the positive means; None if fewer than two."""
    pts = [(math.log(n), math.log(m)) for n, m in zip(ns, means) if m is not None and m > 0]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def _inversions(means, ses):
    small = large = 0
    for i in range(len(means) - 1):
        rise = means[i + 1] - means[i]
        if rise > 0:
            if rise <= math.hypot(ses[i], ses[i + 1]):
                small += 1
            else:
                large += 1
    return small, large


def summarize(scenario: str, aggregates: list, config: dict) -> dict:
    reps = config["replications"]
    if scenario == "table1":
        rows = {}
        for a in aggregates:
            rows.setdefault(a["row"], []).append(a["gap_mean"])
        reported = TABLE1_REPORTED.get(config["item_list"], {})
        return {
            "grid_mean_gap": {k: float(np.mean(v)) for k, v in rows.items()},
            "max_cell_gap": {k: float(np.max(v)) for k, v in rows.items()},
            "reported_gaps": {k: list(reported[k]) for k in rows if k in reported},
        }
    if scenario == "phase_sweep":
        seps = [a["p"] - a["q"] for a in aggregates]
        means = [a["gap_mean"] for a in aggregates]
        order = np.argsort(seps)
        seps = [round(seps[i], 10) for i in order]
        means = [means[i] for i in order]
        rho = stats.spearmanr(seps, means).statistic if len(set(means)) > 1 else None
        low = [i for i, m in enumerate(means) if m <= 0.1]
        change = None
        for i in range(len(means)):
            if all(m <= 0.1 for m in means[i:]):
                change = seps[i]
                break
        return {
            "separations": seps,
            "mean_gaps": means,
            "spearman_rho": None if rho is None or np.isnan(rho) else float(rho),
            "change_point": change,
            "low_error_points": len(low),
        }
    if scenario == "rate_study":
        ns = [a["n"] for a in aggregates]
        means = [a["gap_mean"] for a in aggregates]
        ses = [a["gap_se"] for a in aggregates]
        small, large = _inversions(means, ses)
        return {
            "sizes": ns,
            "mean_gaps": means,
            "mean_m_error_rates": [a["m_error_rate_mean"] for a in aggregates],
            "slope": loglog_slope(ns, means),
            "inversions_within_se": small,
            "inversions_beyond_se": large,
            "all_zero": all(m == 0 for m in means),
        }
    if scenario == "generative_study":
        out = []
        for a in aggregates:
            n = a["n"]
            frac = a["exceeds_theorem4_mean"]
            h_frac = a["exceeds_hoeffding_mean"]
            out.append(
                {
                    "n": n,
                    "bound_vacuous": a["exceeds_theorem4_count"] == 0,
                    "theorem4_bound": a["theorem4_bound_mean"],
                    "exceed_fraction": frac,
                    "exceed_limit": 3 / n + mc_slack(3 / n, reps),
                    "hoeffding_exceed_fraction": h_frac,
                    "hoeffding_limit": 1 / n + mc_slack(1 / n, reps),
                }
            )
        return {"per_n": out}
    out = []
    for a in aggregates:
        n = a["n"]
        out.append(
            {
                "n": n,
                "entropy_exceed_fraction": a["exceeds_entropy_mean"],
                "l1_exceed_fraction": a["exceeds_l1_mean"],
                "shortfall_fraction": a["shortfall_mean"],
                "limit": 1 / n + mc_slack(1 / n, reps),
            }
        )
    return {"per_n": out}


# -- drivers ------------------------------------------------------------------


def run_experiment(config: ExperimentConfig) -> SimulationReport:
    runner = _RUNNERS[config.scenario]
    cells = config.cells()
    jobs = [(ci, cell, r, derive_seed(config.seed, ci, r)) for ci, cell in enumerate(cells) for r in range(config.replications)]

    def one(job):
        ci, cell, r, s = job
        t0 = time.perf_counter()
        rec = runner(config, ci, cell, r, s)
        rec["wall_time"] = time.perf_counter() - t0
        return rec

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(j) for j in jobs]
    cfg = config.to_dict()
    aggs = aggregate(records, cells, config.scenario)
    return SimulationReport(config.scenario, cfg, records, aggs, summarize(config.scenario, aggs, cfg))


def run_table1(config: ExperimentConfig | None = None, **kw) -> SimulationReport:
    return run_experiment(config or ExperimentConfig("table1", **kw))


def run_phase_sweep(config: ExperimentConfig | None = None, **kw) -> SimulationReport:
    return run_experiment(config or ExperimentConfig("phase_sweep", **kw))


def run_rate_study(config: ExperimentConfig | None = None, **kw) -> SimulationReport:
    return run_experiment(config or ExperimentConfig("rate_study", **kw))


def run_generative_study(config: ExperimentConfig | None = None, **kw) -> SimulationReport:
    return run_experiment(config or ExperimentConfig("generative_study", **kw))


def run_concentration(config: ExperimentConfig | None = None, **kw) -> SimulationReport:
    return run_experiment(config or ExperimentConfig("concentration", **kw))


# -- persistence --------------------------------------------------------------

RECORDS_FILE = "records.jsonl"
SUMMARY_FILE = "summary.json"
TABLE_FILE = "table1.csv"


def _ratio_label(r):
    return "/".join(f"{x:g}" for x in r)


def table1_rows(report: SimulationReport) -> list[list]:
    """Table layout: one row per judge, one column per (ratio, size) cell."""
    header = ["model"]
    rows: dict[str, list] = {}
    pq = {}
    for a in report.aggregates:
        col = f"{_ratio_label(a['ratios'])} n={a['n']}"
        if col not in header:
            header.append(col)
        rows.setdefault(a["row"], []).append(f"{a['gap_mean']:.6f}")
        pq[a["row"]] = (a["p"], a["q"])
    header += ["p-q", "p", "q"]
    body = [[label, *vals, f"{pq[label][0] - pq[label][1]:.2f}", f"{pq[label][0]:.2f}", f"{pq[label][1]:.2f}"] for label, vals in rows.items()]
    return [header, *body]


def persist_report(report: SimulationReport, path) -> None:
    """Write ``records.jsonl`` and ``summary.json`` (plus ``table1.csv`` for table1) into directory ``path``."""
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, RECORDS_FILE), "w", encoding="utf-8") as fh:
        for rec in report.records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    doc = {
        "format_version": report.format_version,
        "scenario": report.scenario,
        "config": report.config,
        "aggregates": report.aggregates,
        "summary": report.summary,
    }
    with open(os.path.join(path, SUMMARY_FILE), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if report.scenario == "table1":
        with open(os.path.join(path, TABLE_FILE), "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(table1_rows(report))


def load_report(path) -> SimulationReport:
    with open(os.path.join(path, SUMMARY_FILE), encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ReportVersionError(f"report format version {version!r} is not supported (expected {FORMAT_VERSION})")
    with open(os.path.join(path, RECORDS_FILE), encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    return SimulationReport(doc["scenario"], doc["config"], records, doc["aggregates"], doc["summary"], version)


def recompute_aggregates(report: SimulationReport) -> list:
    cfg = dict(report.config)
    cells = ExperimentConfig(**cfg).cells()
    return aggregate(report.records, cells, report.scenario)

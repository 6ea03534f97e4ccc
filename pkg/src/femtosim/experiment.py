"""Monte Carlo driver: seeded sweeps, aggregation, figure datasets, CSV output.

Grid points and replicates are independent work units; a bounded process
pool may execute points concurrently and the reduction is deterministic
regardless of completion order (rows are emitted in grid order, means use
compensated summation).
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .config import NetworkConfig
from .metrics import MetricsRecord
from .shared import evaluate_shared
from .split import allocate_split, evaluate_split
from .topology import sample_topology, split_allocation_rng, topology_rng

CI95_FACTOR = 1.959963984540054   # two-sided 95% normal quantile


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """A sweep grid over femtocell density and scheme parameters."""

    base: NetworkConfig
    n_f_values: tuple = ()
    gamma_values: tuple = ()      # split strategy axis
    epsilon_values: tuple = ()    # sic strategy axis
    strategies: tuple = ("split",)
    replicates: int = 1000
    figure_tag: str = ""

    def validate(self) -> "SweepSpec":
        if not self.n_f_values:
            raise SweepError("empty n_f axis")
        if self.replicates < 1:
            raise SweepError("replicates must be >= 1")
        bad = [s for s in self.strategies if s not in ("split", "pc", "sic")]
        if bad:
            raise SweepError(f"unknown strategies {bad}")
        if "split" in self.strategies and not self.gamma_values:
            raise SweepError("split sweep needs gamma_values")
        return self

    def points(self) -> list[NetworkConfig]:
        """Resolved configs in deterministic grid order, one per grid point."""
        out = []
        for strategy in self.strategies:
            gammas = self.gamma_values if strategy == "split" else (self.base.gamma,)
            epsilons = self.epsilon_values if strategy == "sic" else (self.base.epsilon,)
            if not epsilons:
                epsilons = (self.base.epsilon,)
            for n_f in self.n_f_values:
                for gamma in gammas:
                    for eps in epsilons:
                        out.append((strategy,
                                    self.base.replace(n_f_mean=float(n_f),
                                                      gamma=int(gamma),
                                                      epsilon=float(eps),
                                                      replicates=self.replicates)))
        return out


def run_replicate(config: NetworkConfig, strategy: str, replicate: int) -> MetricsRecord:
    """One seeded replicate: sample the topology, evaluate the scheme."""
    topo = sample_topology(config, topology_rng(config, replicate))
    if strategy == "split":
        alloc = allocate_split(config, topo, split_allocation_rng(config, replicate))
        return evaluate_split(config, topo, alloc)
    return evaluate_shared(topo, config, strategy)


def run_replicates(config: NetworkConfig, strategy: str,
                   replicates: int) -> list[MetricsRecord]:
    return [run_replicate(config, strategy, rep) for rep in range(replicates)]


# -- aggregation -------------------------------------------------------------

def _mean_se(values) -> tuple[float, float, int]:
    """NaN-skipping mean and standard error via compensated summation."""
    clean = [v for v in values if not (isinstance(v, float) and math.isnan(v))]
    count = len(clean)
    if count == 0:
        return math.nan, math.nan, 0
    mean = math.fsum(clean) / count
    if count == 1:
        return mean, math.nan, 1
    var = math.fsum((v - mean) ** 2 for v in clean) / (count - 1)
    return mean, math.sqrt(var / count), count


def aggregate(records: list[MetricsRecord], fields: list[str]) -> dict:
    out = {}
    for name in fields:
        mean, se, count = _mean_se([float(getattr(r, name)) for r in records])
        out[name] = mean
        out[name + "_se"] = se
        out[name + "_ci95"] = CI95_FACTOR * se if count > 1 else math.nan
    out["flagged_fraction"] = (
        sum(1 for r in records if not r.power_control_converged) / len(records))
    return out


_AGG_FIELDS = [
    "r_m", "r_f", "r_sum", "split_gain", "shared_gain",
    "r_max_mean", "r_max_realized",
    "mean_femto_sinr_db", "mean_femto_sinr_linear",
    "served_femto_count", "served_macro_count", "served_macro_fraction",
    "formed_pairs", "handover_count", "handover_success_count", "dissolved_pairs",
    "mean_macro_power_mw", "mean_femto_power_mw", "realized_femtocells",
]


def _run_point(args):
    index, strategy, config = args
    records = run_replicates(config, strategy, config.replicates)
    row = {"strategy": strategy, "n_f": config.n_f_mean, "gamma": config.gamma,
           "epsilon": config.epsilon, "replicates": config.replicates}
    row.update(aggregate(records, _AGG_FIELDS))
    return index, row


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[dict] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def flagged_fraction(self) -> float:
        if not self.rows:
            return 0.0
        return max(row["flagged_fraction"] for row in self.rows)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    spec.validate()
    tasks = [(i, strategy, cfg) for i, (strategy, cfg) in enumerate(spec.points())]
    start = time.perf_counter()
    if workers is None:
        workers = min(len(tasks), os.cpu_count() or 1)
    if workers <= 1 or len(tasks) <= 1:
        done = [_run_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_run_point, tasks))
    rows = [row for _, row in sorted(done, key=lambda item: item[0])]
    return SweepResult(spec=spec, rows=rows, elapsed_s=time.perf_counter() - start)


# -- paired power-savings evaluation (same topologies under pc and sic) ------

def savings_records(config: NetworkConfig, replicates: int):
    """Per-replicate power savings of sic relative to pc, per user class.

    savings = 1 - (mean power of the class under sic)/(same under pc),
    computed per topology; NaN when the class is empty (no femtocells).
    """
    rows = []
    for rep in range(replicates):
        topo = sample_topology(config, topology_rng(config, rep))
        rec_pc = evaluate_shared(topo, config, "pc")
        rec_sic = evaluate_shared(topo, config, "sic")
        macro = 1.0 - rec_sic.mean_macro_power_mw / rec_pc.mean_macro_power_mw
        if (rec_pc.mean_femto_power_mw and not math.isnan(rec_pc.mean_femto_power_mw)
                and rec_pc.mean_femto_power_mw > 0):
            femto = 1.0 - rec_sic.mean_femto_power_mw / rec_pc.mean_femto_power_mw
        else:
            femto = math.nan
        rows.append({"macro": macro, "femto": femto,
                     "pc": rec_pc, "sic": rec_sic})
    return rows


def _run_savings_point(args):
    index, config = args
    rows = savings_records(config, config.replicates)
    out = []
    for cls in ("macro", "femto"):
        mean, se, count = _mean_se([r[cls] for r in rows])
        out.append({"n_f": config.n_f_mean, "class": cls,
                    "savings_fraction": mean,
                    "ci95": CI95_FACTOR * se if count > 1 else math.nan,
                    "flagged_fraction": 0.0})
    return index, out


def _raw_point_task(args):
    index, strategy, config = args
    return index, run_replicates(config, strategy, config.replicates)


def raw_grid(config: NetworkConfig, strategy: str, n_f_values, epsilon_values,
             replicates: int, workers: int | None = None) -> dict:
    """Per-replicate records for every (n_f, epsilon) grid point."""
    points = [(nf, eps) for nf in n_f_values for eps in epsilon_values]
    tasks = [(i, strategy, config.replace(n_f_mean=float(nf), epsilon=float(eps),
                                          replicates=replicates))
             for i, (nf, eps) in enumerate(points)]
    if workers is None:
        workers = min(len(tasks), os.cpu_count() or 1)
    if workers <= 1 or len(tasks) <= 1:
        done = [_raw_point_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_raw_point_task, tasks))
    records = dict(zip(points, (recs for _, recs in sorted(done, key=lambda x: x[0]))))
    return records


def _paired_point_task(args):
    index, config = args
    rows = []
    for rep_row in savings_records(config, config.replicates):
        pc, sic = rep_row["pc"], rep_row["sic"]
        rows.append({
            "macro_savings": rep_row["macro"],
            "femto_savings": rep_row["femto"],
            "pc_served_femto": pc.served_femto_count,
            "sic_served_femto": sic.served_femto_count,
            "pc_gain": pc.shared_gain, "sic_gain": sic.shared_gain,
            "pc_r_max_realized": pc.r_max_realized,
            "sic_r_max_realized": sic.r_max_realized,
            "realized": sic.realized_femtocells,
            "sic_handovers": sic.handover_count,
        })
    return index, rows


def paired_grid(config: NetworkConfig, n_f_values, replicates: int,
                workers: int | None = None) -> dict:
    """Per-replicate pc/sic comparisons (same topologies) for every n_f."""
    tasks = [(i, config.replace(n_f_mean=float(nf), epsilon=0.0,
                                replicates=replicates))
             for i, nf in enumerate(n_f_values)]
    if workers is None:
        workers = min(len(tasks), os.cpu_count() or 1)
    if workers <= 1 or len(tasks) <= 1:
        done = [_paired_point_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_paired_point_task, tasks))
    return dict(zip(list(n_f_values),
                    (rows for _, rows in sorted(done, key=lambda x: x[0]))))


# -- figure datasets ----------------------------------------------------------

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")

_NF_FULL = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
_NF_NONZERO = (1.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
_NF_FINE = (1.0, 2.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
_GAMMAS = (5, 10, 15, 20, 25)
_EPSILONS = (0.0, 0.025, 0.05, 0.1, 0.125)

FIGURE_COLUMNS = {
    "fig2": ("n_f", "gamma", "mean_femto_sinr_db", "ci95"),
    "fig3": ("n_f", "gamma", "split_gain", "ci95"),
    "fig4": ("n_f", "epsilon", "handovers", "handover_fraction", "ci95"),
    "fig5": ("n_f", "epsilon", "served_macro_fraction", "ci95"),
    "fig6": ("n_f", "class", "savings_fraction", "ci95"),
    "fig7": ("n_f", "strategy", "served_femto_users", "ci95"),
    "fig8": ("n_f", "strategy", "shared_gain", "ci95", "r_max"),
}


@dataclass
class FigureResult:
    figure_id: str
    columns: tuple
    rows: list[dict]
    manifest: dict
    elapsed_s: float


def figure_dataset(figure_id: str, config: NetworkConfig,
                   replicates: int | None = None,
                   workers: int | None = None) -> FigureResult:
    """Run the canned sweep behind one figure and return its dataset."""
    if figure_id not in FIGURE_IDS:
        raise SweepError(f"unknown figure id {figure_id!r} (expected one of {FIGURE_IDS})")
    reps = replicates if replicates is not None else config.replicates
    start = time.perf_counter()

    if figure_id in ("fig2", "fig3"):
        nf_axis = _NF_NONZERO if figure_id == "fig2" else (0.0,) + _NF_NONZERO
        spec = SweepSpec(base=config, n_f_values=nf_axis, gamma_values=_GAMMAS,
                         strategies=("split",), replicates=reps, figure_tag=figure_id)
        result = run_sweep(spec, workers=workers)
        metric = "mean_femto_sinr_db" if figure_id == "fig2" else "split_gain"
        rows = [{"n_f": r["n_f"], "gamma": r["gamma"], metric: r[metric],
                 "ci95": r[metric + "_ci95"], "flagged_fraction": r["flagged_fraction"]}
                for r in result.rows]
    elif figure_id in ("fig4", "fig5"):
        spec = SweepSpec(base=config, n_f_values=_NF_FULL,
                         epsilon_values=_EPSILONS, strategies=("sic",),
                         replicates=reps, figure_tag=figure_id)
        result = run_sweep(spec, workers=workers)
        rows = []
        for r in result.rows:
            if figure_id == "fig4":
                rows.append({"n_f": r["n_f"], "epsilon": r["epsilon"],
                             "handovers": r["handover_success_count"],
                             "handover_fraction":
                                 r["handover_success_count"] / config.n_macro_users,
                             "ci95": (r["handover_success_count_ci95"]
                                      / config.n_macro_users),
                             "flagged_fraction": r["flagged_fraction"]})
            else:
                rows.append({"n_f": r["n_f"], "epsilon": r["epsilon"],
                             "served_macro_fraction": r["served_macro_fraction"],
                             "ci95": r["served_macro_fraction_ci95"],
                             "flagged_fraction": r["flagged_fraction"]})
    elif figure_id == "fig6":
        tasks = [(i, config.replace(n_f_mean=nf, epsilon=0.0, replicates=reps))
                 for i, nf in enumerate(_NF_FINE)]
        if workers is None:
            workers = min(len(tasks), os.cpu_count() or 1)
        if workers <= 1:
            done = [_run_savings_point(t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                done = list(pool.map(_run_savings_point, tasks))
        rows = [row for _, point_rows in sorted(done, key=lambda item: item[0])
                for row in point_rows]
    else:  # fig7 / fig8
        spec = SweepSpec(base=config.replace(epsilon=0.0), n_f_values=_NF_FULL,
                         strategies=("pc", "sic"), replicates=reps,
                         figure_tag=figure_id)
        result = run_sweep(spec, workers=workers)
        rows = []
        for r in result.rows:
            if figure_id == "fig7":
                rows.append({"n_f": r["n_f"], "strategy": r["strategy"],
                             "served_femto_users": r["served_femto_count"],
                             "ci95": r["served_femto_count_ci95"],
                             "flagged_fraction": r["flagged_fraction"]})
            else:
                rows.append({"n_f": r["n_f"], "strategy": r["strategy"],
                             "shared_gain": r["shared_gain"],
                             "ci95": r["shared_gain_ci95"],
                             "r_max": r["r_max_mean"],
                             "flagged_fraction": r["flagged_fraction"]})

    manifest = {
        "figure": figure_id,
        "columns": list(FIGURE_COLUMNS[figure_id]),
        "replicates": reps,
        "seed": config.seed,
        "config": config.as_dict(),
        "p_femto_const_dbm_resolved": config.p_femto_const_dbm_resolved,
        "package_version": __version__,
    }
    return FigureResult(figure_id=figure_id, columns=FIGURE_COLUMNS[figure_id],
                        rows=rows, manifest=manifest,
                        elapsed_s=time.perf_counter() - start)


# -- serialization ------------------------------------------------------------

def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".10g")
    return str(value)


def write_csv(path: str, columns, rows) -> None:
    """UTF-8 CSV, header row, '.' decimal separator, deterministic formatting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(row.get(c)) for c in columns) + "\n")


def write_manifest(path: str, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_figure(result: FigureResult, out_dir: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{result.figure_id}.csv")
    manifest_path = os.path.join(out_dir, f"{result.figure_id}.manifest.json")
    write_csv(csv_path, result.columns, result.rows)
    write_manifest(manifest_path, result.manifest)
    return csv_path, manifest_path


def run_all_figures(config: NetworkConfig, out_dir: str,
                    replicates: int | None = None,
                    workers: int | None = None) -> dict:
    """Produce every figure dataset; returns paths, timings, and flag status."""
    out = {"figures": {}, "elapsed_s": 0.0, "flagged_fraction": 0.0}
    for figure_id in FIGURE_IDS:
        result = figure_dataset(figure_id, config, replicates=replicates,
                                workers=workers)
        csv_path, manifest_path = write_figure(result, out_dir)
        flagged = max((row.get("flagged_fraction", 0.0) for row in result.rows),
                      default=0.0)
        out["figures"][figure_id] = {"csv": csv_path, "manifest": manifest_path,
                                     "elapsed_s": result.elapsed_s,
                                     "flagged_fraction": flagged}
        out["elapsed_s"] += result.elapsed_s
        out["flagged_fraction"] = max(out["flagged_fraction"], flagged)
    return out

import json
import math
import os

import pytest

from femtosim.config import NetworkConfig, load_config
from femtosim.experiment import (FIGURE_COLUMNS, SweepError, SweepSpec,
                                 aggregate, figure_dataset, paired_grid,
                                 raw_grid, run_replicates, run_sweep,
                                 savings_records, write_csv, write_figure)


@pytest.fixture
def small(config):
    return config.replace(replicates=20)


def test_spec_validation(small):
    with pytest.raises(SweepError, match="empty n_f axis"):
        SweepSpec(base=small, n_f_values=()).validate()
    with pytest.raises(SweepError, match="gamma_values"):
        SweepSpec(base=small, n_f_values=(5.0,), strategies=("split",)).validate()
    with pytest.raises(SweepError, match="unknown strategies"):
        SweepSpec(base=small, n_f_values=(5.0,), strategies=("bogus",)).validate()
    SweepSpec(base=small, n_f_values=(5.0,), strategies=("sic",),
              replicates=5000).validate()      # full-scale replicate count accepted


def test_records_r_sum_identity(small):
    for strategy in ("split", "pc", "sic"):
        for rec in run_replicates(small.replace(n_f_mean=10.0), strategy, 10):
            assert rec.r_sum == rec.r_m + rec.r_f


def test_sweep_deterministic(small):
    spec = SweepSpec(base=small, n_f_values=(5.0, 10.0), epsilon_values=(0.0,),
                     strategies=("sic",), replicates=15)
    rows_a = run_sweep(spec, workers=1).rows
    rows_b = run_sweep(spec, workers=2).rows
    assert repr(rows_a) == repr(rows_b)    # repr-compare: NaN-tolerant


def test_aggregate_single_replicate_marks_ci():
    recs = run_replicates(NetworkConfig(n_f_mean=5.0).validate(), "sic", 1)
    agg = aggregate(recs, ["shared_gain"])
    assert math.isnan(agg["shared_gain_ci95"])


def test_standard_error_scaling(small):
    """SE shrinks like 1/sqrt(replicates): quadrupling roughly halves it."""
    cfg = small.replace(n_f_mean=10.0)
    agg_100 = aggregate(run_replicates(cfg, "sic", 100), ["shared_gain"])
    agg_400 = aggregate(run_replicates(cfg, "sic", 400), ["shared_gain"])
    ratio = agg_400["shared_gain_se"] / agg_100["shared_gain_se"]
    assert 0.5 * 0.7 < ratio < 0.5 * 1.3


def test_csv_formatting(tmp_path):
    path = str(tmp_path / "t.csv")
    write_csv(path, ("a", "b"), [{"a": 1.5, "b": float("nan")},
                                 {"a": 2, "b": "x"}])
    content = open(path, encoding="utf-8").read()
    assert content == "a,b\n1.5,\n2,x\n"


@pytest.mark.parametrize("figure_id", ["fig2", "fig3", "fig4", "fig5",
                                       "fig6", "fig7", "fig8"])
def test_figure_schemas(figure_id, config, tmp_path):
    result = figure_dataset(figure_id, config.replace(n_f_mean=5.0),
                            replicates=3, workers=1)
    assert result.columns == FIGURE_COLUMNS[figure_id]
    for row in result.rows:
        for column in result.columns:
            assert column in row
    csv_path, manifest_path = write_figure(result, str(tmp_path))
    header = open(csv_path, encoding="utf-8").readline().strip()
    assert header == ",".join(result.columns)
    manifest = json.load(open(manifest_path, encoding="utf-8"))
    assert manifest["figure"] == figure_id
    assert manifest["config"]["seed"] == config.seed


def test_fig8_bound_is_affine_in_nf(config):
    result = figure_dataset("fig8", config, replicates=2, workers=1)
    by_nf = {}
    for row in result.rows:
        by_nf[row["n_f"]] = row["r_max"]
    nfs = sorted(by_nf)
    slopes = [(by_nf[b] - by_nf[a]) / (b - a) for a, b in zip(nfs, nfs[1:])]
    assert all(s == pytest.approx(slopes[0], rel=1e-9) for s in slopes)


def test_manifest_round_trip(config, tmp_path):
    """A manifest re-fed as the config reproduces the identical CSV."""
    cfg = config.replace(replicates=5)
    result = figure_dataset("fig3", cfg, replicates=5, workers=1)
    csv_path, manifest_path = write_figure(result, str(tmp_path / "a"))
    cfg2 = load_config(manifest_path)
    result2 = figure_dataset("fig3", cfg2, replicates=5, workers=1)
    csv_path2, _ = write_figure(result2, str(tmp_path / "b"))
    assert open(csv_path, "rb").read() == open(csv_path2, "rb").read()


def test_unknown_figure_rejected(config):
    with pytest.raises(SweepError, match="unknown figure id"):
        figure_dataset("fig9", config)


def test_savings_records_same_topology(config):
    cfg = config.replace(n_f_mean=10.0, femtocell_count_mode="fixed")
    rows = savings_records(cfg, 5)
    assert len(rows) == 5
    for row in rows:
        assert row["pc"].realized_femtocells == row["sic"].realized_femtocells
        assert row["macro"] >= -1e-12     # handover never raises macro power


def test_raw_and_paired_grids(config):
    cfg = config.replace(femtocell_count_mode="fixed")
    grid = raw_grid(cfg, "sic", (5.0,), (0.0, 0.1), replicates=4, workers=1)
    assert set(grid) == {(5.0, 0.0), (5.0, 0.1)}
    assert all(len(v) == 4 for v in grid.values())
    paired = paired_grid(cfg, (5.0,), replicates=3, workers=1)
    assert len(paired[5.0]) == 3

import math

import numpy as np
import pytest

from femtosim.split import allocate_split, evaluate_split, split_gain
from femtosim.topology import (Topology, build_distance_table, sample_topology,
                               split_allocation_rng, topology_rng)

REL = 1e-9


def test_gamma_equals_f_uses_identical_channels(fixed_config):
    cfg = fixed_config.replace(n_f_mean=6.0, gamma=5)
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, 0))
    for cell in alloc.per_cell_choice:
        assert set(cell.tolist()) == set(alloc.femto_channel_ids.tolist())


def test_per_cell_channels_distinct(fixed_config):
    cfg = fixed_config.replace(n_f_mean=15.0, gamma=25)
    for rep in range(50):
        topo = sample_topology(cfg, topology_rng(cfg, rep))
        alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, rep))
        for cell in alloc.per_cell_choice:
            assert len(set(cell.tolist())) == cfg.n_femto_users_per_cell
            assert set(cell.tolist()) <= set(alloc.femto_channel_ids.tolist())


def test_allocation_rejects_small_gamma(fixed_config):
    cfg = fixed_config.replace(n_f_mean=2.0, gamma=0)
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    with pytest.raises(ValueError, match="gamma"):
        allocate_split(cfg, topo, split_allocation_rng(cfg, 0))


def test_zero_femtocells_allocation(fixed_config):
    cfg = fixed_config.replace(n_f_mean=0.0, gamma=5)
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, 0))
    assert alloc.per_cell_choice.shape == (0, 5)
    assert alloc.macro_served_count == 20


def test_collision_probability_matches_combinatorics(fixed_config):
    """Two cells, gamma=25, F=5: P(channel used by both) = (F/gamma)^2."""
    cfg = fixed_config.replace(n_f_mean=2.0, gamma=25)
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    draws = 10_000
    shared_totals = np.empty(draws)
    for rep in range(draws):
        alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, rep))
        a, b = (set(c.tolist()) for c in alloc.per_cell_choice)
        shared_totals[rep] = len(a & b)
    # expected shared channels per draw: 25 * (5/25)^2 = 1.0
    expected = cfg.n_channels * (5 / 25) ** 2
    z = abs(shared_totals.mean() - expected) / (shared_totals.std(ddof=1) / math.sqrt(draws))
    assert z < 3.0


def test_macro_only_baseline_example(fixed_config):
    """0 femtocells, gamma = 0: R_sum = 25 log2(101)."""
    cfg = fixed_config.replace(n_f_mean=0.0, gamma=0)
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, 0))
    rec = evaluate_split(cfg, topo, alloc)
    assert rec.r_sum == pytest.approx(166.45528706879486, rel=REL)
    assert rec.split_gain == pytest.approx(0.0, abs=1e-12)


def test_single_cell_no_interference(fixed_config):
    """One femtocell, gamma=F: users served iff constant power meets beta_f."""
    cfg = fixed_config.replace(n_f_mean=1.0, gamma=5)
    topo = sample_topology(cfg, topology_rng(cfg, 3))
    alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, 3))
    rec = evaluate_split(cfg, topo, alloc)
    table = build_distance_table(topo, cfg)
    snr = cfg.p_femto_const_mw * table.d_fa_own[0] ** -cfg.alpha / cfg.noise_mw
    expected_served = int((snr >= cfg.beta_f * (1 - 1e-12)).sum())
    assert rec.served_femto_count == expected_served
    # derived default power serves the whole isolated cell
    assert expected_served == cfg.n_femto_users_per_cell


def test_gamma_full_means_no_macro_rate(fixed_config):
    cfg = fixed_config.replace(n_f_mean=5.0, gamma=25)
    topo = sample_topology(cfg, topology_rng(cfg, 1))
    alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, 1))
    rec = evaluate_split(cfg, topo, alloc)
    assert rec.r_m == 0.0
    assert rec.r_sum == rec.r_f


def test_split_gain_values(config):
    baseline = 25 * math.log2(101.0)
    assert split_gain(baseline, config) == pytest.approx(0.0, abs=1e-12)
    assert split_gain(2 * baseline, config) == pytest.approx(1.0, rel=REL)
    assert split_gain(3 * baseline, config) == pytest.approx(2.0, rel=REL)


def test_split_gain_floor(fixed_config):
    """split_gain >= -gamma/M always (zero femto rate floor)."""
    for gamma in (5, 15, 25):
        cfg = fixed_config.replace(n_f_mean=30.0, gamma=gamma)
        for rep in range(30):
            topo = sample_topology(cfg, topology_rng(cfg, rep))
            alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, rep))
            rec = evaluate_split(cfg, topo, alloc)
            assert rec.split_gain >= -gamma / cfg.n_macro_users - 1e-12


def _per_user_sinr(cfg, topo, alloc):
    """Test-local direct computation of every femto user's SINR."""
    table = build_distance_table(topo, cfg)
    n, f = topo.realized_femtocell_count, cfg.n_femto_users_per_cell
    p = cfg.p_femto_const_mw
    out = np.zeros((n, f))
    for a in range(n):
        for j in range(f):
            chan = alloc.per_cell_choice[a, j]
            interference = 0.0
            for b in range(n):
                if b == a:
                    continue
                for k in range(f):
                    if alloc.per_cell_choice[b, k] == chan:
                        interference += p * table.d_fa[b, k, a] ** -cfg.phi
            signal = p * table.d_fa_own[a, j] ** -cfg.alpha
            out[a, j] = signal / (interference + cfg.noise_mw)
    return out


def test_evaluate_matches_direct_computation(fixed_config):
    cfg = fixed_config.replace(n_f_mean=8.0, gamma=10)
    topo = sample_topology(cfg, topology_rng(cfg, 2))
    alloc = allocate_split(cfg, topo, split_allocation_rng(cfg, 2))
    rec = evaluate_split(cfg, topo, alloc)
    direct = _per_user_sinr(cfg, topo, alloc)
    assert rec.mean_femto_sinr_linear == pytest.approx(direct.mean(), rel=1e-9)
    served = int((direct >= cfg.beta_f * (1 - 1e-12)).sum())
    assert rec.served_femto_count == served


def test_adding_cells_never_raises_sinr(fixed_config):
    """More interferers never help: per-user SINR non-increasing on nested topologies."""
    cfg_small = fixed_config.replace(n_f_mean=4.0, gamma=10)
    topo_small = sample_topology(cfg_small, topology_rng(cfg_small, 5))
    alloc_small = allocate_split(cfg_small, topo_small, split_allocation_rng(cfg_small, 5))

    cfg_big = cfg_small.replace(n_f_mean=8.0)
    extra = sample_topology(cfg_big, topology_rng(cfg_big, 6))
    topo_big = Topology(
        bs_position=topo_small.bs_position,
        fap_positions=np.vstack([topo_small.fap_positions,
                                 extra.fap_positions[:4]]),
        femto_user_positions=np.vstack([topo_small.femto_user_positions,
                                        extra.femto_user_positions[:4]]),
        macro_user_positions=topo_small.macro_user_positions,
    )
    from femtosim.split import SplitAllocation
    # extra cells each reuse the first F femto channels; the original cells
    # keep their exact choices, so only interference can change for them
    extra_choice = np.tile(alloc_small.femto_channel_ids[:5], (4, 1))
    alloc_big = SplitAllocation(
        femto_channel_ids=alloc_small.femto_channel_ids,
        per_cell_choice=np.vstack([alloc_small.per_cell_choice, extra_choice]),
        macro_served_count=alloc_small.macro_served_count,
    )
    base = _per_user_sinr(cfg_small, topo_small, alloc_small)
    grown = _per_user_sinr(cfg_big, topo_big, alloc_big)[:4]
    assert np.all(grown <= base * (1 + 1e-12))

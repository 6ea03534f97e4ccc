import numpy as np
import pytest

from femtosim.topology import (build_distance_table, sample_topology,
                               split_allocation_rng, topology_rng)


def test_zero_femtocells_is_valid(config):
    cfg = config.replace(n_f_mean=0.0, femtocell_count_mode="fixed")
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    assert topo.realized_femtocell_count == 0
    assert topo.macro_user_positions.shape == (25, 2)


def test_containment_invariants(fixed_config):
    cfg = fixed_config.replace(n_f_mean=20.0)
    for rep in range(20):
        topo = sample_topology(cfg, topology_rng(cfg, rep))
        assert np.all(np.hypot(*topo.fap_positions.T) <= cfg.r_macro_m + 1e-9)
        assert np.all(np.hypot(*topo.macro_user_positions.T) <= cfg.r_macro_m + 1e-9)
        offsets = topo.femto_user_positions - topo.fap_positions[:, None, :]
        assert np.all(np.linalg.norm(offsets, axis=2) <= cfg.r_femto_m + 1e-9)


def test_triangle_property_fu_to_bs(fixed_config):
    """d_FB >= d_AB - r_f for every femto user (pre-clamp geometry)."""
    cfg = fixed_config.replace(n_f_mean=25.0)
    for rep in range(20):
        topo = sample_topology(cfg, topology_rng(cfg, rep))
        d_ab = np.hypot(*topo.fap_positions.T)
        d_fb = np.hypot(topo.femto_user_positions[..., 0],
                        topo.femto_user_positions[..., 1])
        assert np.all(d_fb >= d_ab[:, None] - cfg.r_femto_m - 1e-9)


def test_determinism_bit_identical(config):
    a = sample_topology(config, topology_rng(config, 7))
    b = sample_topology(config, topology_rng(config, 7))
    assert np.array_equal(a.fap_positions, b.fap_positions)
    assert np.array_equal(a.femto_user_positions, b.femto_user_positions)
    assert np.array_equal(a.macro_user_positions, b.macro_user_positions)
    c = sample_topology(config, topology_rng(config, 8))
    assert not np.array_equal(a.macro_user_positions, c.macro_user_positions)


def test_topology_stream_ignores_gamma_and_epsilon(config):
    """Same replicate index gives the same topology across scheme parameters."""
    a = sample_topology(config, topology_rng(config, 3))
    other = config.replace(gamma=25, epsilon=0.125)
    b = sample_topology(other, topology_rng(other, 3))
    assert np.array_equal(a.fap_positions, b.fap_positions)
    # the split allocation stream does depend on gamma
    assert (split_allocation_rng(config, 3).random()
            != split_allocation_rng(other, 3).random())


def test_poisson_count_mean(config):
    cfg = config.replace(n_f_mean=20.0)
    counts = [sample_topology(cfg, topology_rng(cfg, rep)).realized_femtocell_count
              for rep in range(10_000)]
    assert abs(np.mean(counts) - 20.0) < 0.5


def test_fixed_count_mode(fixed_config):
    cfg = fixed_config.replace(n_f_mean=12.4)
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    assert topo.realized_femtocell_count == 12


def test_uniform_disk_mean_squared_radius(fixed_config):
    """Uniform-disk property: E[r^2] = R^2/2 within 2% over >= 1e4 points."""
    cfg = fixed_config.replace(n_f_mean=20.0)
    sq = []
    for rep in range(500):
        topo = sample_topology(cfg, topology_rng(cfg, rep))
        sq.append(np.hypot(*topo.fap_positions.T) ** 2)
    mean_sq = np.mean(np.concatenate(sq))
    assert mean_sq == pytest.approx(cfg.r_macro_m ** 2 / 2, rel=0.02)


def test_distance_table(config, fixed_config):
    cfg = fixed_config.replace(n_f_mean=10.0)
    topo = sample_topology(cfg, topology_rng(cfg, 1))
    table = build_distance_table(topo, cfg)
    n, f = topo.realized_femtocell_count, cfg.n_femto_users_per_cell
    assert table.d_ma.shape == (cfg.n_macro_users, n)
    assert table.d_fa.shape == (n, f, n)
    assert np.all(table.d_mb >= cfg.min_distance_m)
    assert np.all(table.d_fa >= cfg.min_distance_m)
    # own-cell femto distances within the cell radius (clamp aside)
    assert np.all(table.d_fa_own <= max(cfg.r_femto_m, cfg.min_distance_m) + 1e-9)
    # spot-check one distance against plain geometry
    expect = np.linalg.norm(topo.macro_user_positions[3] - topo.fap_positions[0])
    assert table.d_ma[3, 0] == pytest.approx(max(expect, 1.0), rel=1e-12)


def test_distance_clamp_engages():
    import femtosim
    cfg = femtosim.NetworkConfig(n_f_mean=1.0, femtocell_count_mode="fixed").validate()
    topo = sample_topology(cfg, topology_rng(cfg, 0))
    # move one macro user onto the BS: clamped distance must be 1 m
    topo.macro_user_positions[0] = [0.0, 0.0]
    table = build_distance_table(topo, cfg)
    assert table.d_mb[0] == cfg.min_distance_m
    # 3-4-5 triangle
    topo.macro_user_positions[1] = [3.0, 4.0]
    table = build_distance_table(topo, cfg)
    assert table.d_mb[1] == pytest.approx(5.0, rel=1e-12)

"""Random network realizations and cached distance tables.

The base station sits at the origin.  Femtocell access points (FAPs) follow
a spatial Poisson process over the macrocell disk (realized either as a
Poisson draw or as a fixed count equal to the rounded mean); femto users are
uniform on their own cell disk, macro users uniform on the macrocell disk.

Randomness is organized as one master seed with per-replicate substreams
derived from (seed, purpose, n_f_mean, replicate), so replicates are
independent, order-free, and identical topologies are shared by runs that
differ only in gamma, epsilon, or strategy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig

_TOPOLOGY_TAG = 0x544F504F   # stream domain separators
_SPLIT_TAG = 0x53504C54


def _nf_key(n_f_mean: float) -> int:
    return int(round(n_f_mean * 1_000_000))


def topology_rng(config: NetworkConfig, replicate: int) -> np.random.Generator:
    """Substream used for sampling the topology of one replicate."""
    mode_flag = 0 if config.femtocell_count_mode == "poisson" else 1
    seq = np.random.SeedSequence(
        [config.seed, _TOPOLOGY_TAG, _nf_key(config.n_f_mean), mode_flag, replicate])
    return np.random.default_rng(seq)


def split_allocation_rng(config: NetworkConfig, replicate: int) -> np.random.Generator:
    """Substream used for the split scheme's random channel selection."""
    seq = np.random.SeedSequence(
        [config.seed, _SPLIT_TAG, _nf_key(config.n_f_mean), config.gamma, replicate])
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class Topology:
    """Sampled positions of one network realization (meters, BS at origin)."""

    bs_position: np.ndarray            # (2,)
    fap_positions: np.ndarray          # (n, 2)
    femto_user_positions: np.ndarray   # (n, F, 2)
    macro_user_positions: np.ndarray   # (M, 2)

    @property
    def realized_femtocell_count(self) -> int:
        return self.fap_positions.shape[0]


def _uniform_disk(rng: np.random.Generator, radius: float, size) -> np.ndarray:
    """Uniform points on a disk of given radius via polar inversion."""
    r = radius * np.sqrt(rng.random(size))
    theta = 2.0 * np.pi * rng.random(size)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def sample_topology(config: NetworkConfig, rng: np.random.Generator) -> Topology:
    """Draw one network realization.

    Draw order (count, FAPs, femto users, macro users) is fixed; equal
    (config, stream) gives a bit-identical topology.
    """
    if config.femtocell_count_mode == "poisson":
        n = int(rng.poisson(config.n_f_mean))
    else:
        n = int(round(config.n_f_mean))
    faps = _uniform_disk(rng, config.r_macro_m, n)
    offsets = _uniform_disk(rng, config.r_femto_m, (n, config.n_femto_users_per_cell))
    fus = faps[:, None, :] + offsets
    mus = _uniform_disk(rng, config.r_macro_m, config.n_macro_users)
    return Topology(
        bs_position=np.zeros(2),
        fap_positions=faps,
        femto_user_positions=fus,
        macro_user_positions=mus,
    )


@dataclass(frozen=True)
class DistanceTable:
    """All pairwise distances the link budgets need, clamped at min_distance_m.

    d_fa holds femto-user-to-every-FAP distances; d_fa_own is its diagonal
    (each user to its serving FAP).
    """

    d_mb: np.ndarray      # (M,)   macro user -> BS
    d_ab: np.ndarray      # (n,)   FAP -> BS
    d_fb: np.ndarray      # (n, F) femto user -> BS
    d_ma: np.ndarray      # (M, n) macro user -> FAP
    d_fa: np.ndarray      # (n, F, n) femto user -> FAP
    d_fa_own: np.ndarray  # (n, F)


def build_distance_table(topology: Topology, config: NetworkConfig) -> DistanceTable:
    clamp = config.min_distance_m
    mus = topology.macro_user_positions
    faps = topology.fap_positions
    fus = topology.femto_user_positions
    n = topology.realized_femtocell_count
    n_fu = config.n_femto_users_per_cell

    d_mb = np.maximum(np.hypot(mus[:, 0], mus[:, 1]), clamp)
    d_ab = np.maximum(np.hypot(faps[:, 0], faps[:, 1]), clamp)
    d_fb = np.maximum(np.hypot(fus[..., 0], fus[..., 1]), clamp)
    d_ma = np.maximum(np.linalg.norm(mus[:, None, :] - faps[None, :, :], axis=2), clamp)
    d_fa = np.maximum(
        np.linalg.norm(fus[:, :, None, :] - faps.reshape(1, 1, n, 2), axis=3), clamp)
    if n:
        cell = np.arange(n)
        d_fa_own = d_fa[cell[:, None], np.arange(n_fu)[None, :], cell[:, None]]
    else:
        d_fa_own = np.zeros((0, n_fu))
    return DistanceTable(d_mb=d_mb, d_ab=d_ab, d_fb=d_fb, d_ma=d_ma,
                         d_fa=d_fa, d_fa_own=d_fa_own)

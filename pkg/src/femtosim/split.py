"""Split-spectrum scheme: orthogonal bandwidth partition between the tiers.

The femto tier receives `gamma` of the `n_channels` channels; every femto
user transmits at a constant power; each FAP draws its per-cell channels
uniformly without replacement, so a given femto channel carries at most one
user per femtocell and the marginal selection probability is 1/gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import NetworkConfig
from .metrics import MetricsRecord, empty_record
from .radio import SERVE_GUARD
from .topology import DistanceTable, Topology, build_distance_table


@dataclass(frozen=True)
class SplitAllocation:
    """Channel plan of one split-scheme realization (global channel ids)."""

    femto_channel_ids: np.ndarray   # (gamma,)
    per_cell_choice: np.ndarray     # (n, F)
    macro_served_count: int


def allocate_split(config: NetworkConfig, topology: Topology,
                   rng: np.random.Generator) -> SplitAllocation:
    """Draw the femto tier's channels and each cell's per-user selection."""
    n = topology.realized_femtocell_count
    n_fu = config.n_femto_users_per_cell
    if n > 0 and config.gamma < n_fu:
        raise ValueError("gamma < n_femto_users_per_cell: split scheme cannot "
                         "serve the realized femtocells")
    femto_channels = np.sort(rng.choice(config.n_channels, size=config.gamma,
                                        replace=False))
    if n > 0:
        local = np.stack([rng.choice(config.gamma, size=n_fu, replace=False)
                          for _ in range(n)])
        per_cell = femto_channels[local]
    else:
        per_cell = np.zeros((0, n_fu), dtype=int)
    return SplitAllocation(
        femto_channel_ids=femto_channels,
        per_cell_choice=per_cell,
        macro_served_count=config.n_channels - config.gamma,
    )


def split_gain(r_sum: float, config: NetworkConfig) -> float:
    """Sum-rate gain relative to the macro-only network (all channels at beta_M)."""
    baseline = config.n_macro_users * math.log2(1.0 + config.beta_m)
    return (r_sum - baseline) / baseline


def evaluate_split(config: NetworkConfig, topology: Topology,
                   allocation: SplitAllocation,
                   distances: DistanceTable | None = None) -> MetricsRecord:
    """Compute rates and femto SINR statistics for one split realization.

    Each femto user's SINR uses its own-cell link at exponent alpha against
    co-channel femto users of other cells at exponent phi plus noise; rates
    follow the threshold model (log2(1+beta) when met, else zero).
    """
    n = topology.realized_femtocell_count
    n_fu = config.n_femto_users_per_cell
    sigma2 = config.noise_mw
    l_m = math.log2(1.0 + config.beta_m)
    l_f = math.log2(1.0 + config.beta_f)
    r_m = allocation.macro_served_count * l_m

    if n == 0:
        return replace(
            empty_record("split", config),
            r_m=r_m, r_sum=r_m, split_gain=split_gain(r_m, config),
            served_macro_count=allocation.macro_served_count,
            served_macro_fraction=allocation.macro_served_count / config.n_macro_users)

    if distances is None:
        distances = build_distance_table(topology, config)
    p_const = config.p_femto_const_mw
    g_cross = distances.d_fa ** -config.phi         # (n, F, n) femto -> any FAP
    g_own = distances.d_fa_own ** -config.alpha     # (n, F)

    # received interference per (femto channel, FAP); one user per cell/channel
    chan_index = {int(c): j for j, c in enumerate(allocation.femto_channel_ids)}
    slot = np.vectorize(chan_index.get)(allocation.per_cell_choice)    # (n, F)
    acc = np.zeros((config.gamma, n))
    np.add.at(acc, slot.reshape(-1), p_const * g_cross.reshape(n * n_fu, n))

    cells = np.repeat(np.arange(n), n_fu)
    ext = acc[slot.reshape(-1), cells] - p_const * g_cross.reshape(n * n_fu, n)[
        np.arange(n * n_fu), cells]
    sinr = (p_const * g_own.reshape(-1)) / (ext + sigma2)

    served = sinr >= config.beta_f * SERVE_GUARD
    r_f = int(served.sum()) * l_f
    r_sum = r_m + r_f
    return replace(
        empty_record("split", config, realized=n),
        r_m=r_m, r_f=r_f, r_sum=r_sum,
        split_gain=split_gain(r_sum, config),
        mean_femto_sinr_db=float(np.mean(10.0 * np.log10(sinr))),
        mean_femto_sinr_linear=float(np.mean(sinr)),
        served_femto_count=int(served.sum()),
        served_macro_count=allocation.macro_served_count,
        served_macro_fraction=allocation.macro_served_count / config.n_macro_users,
        mean_femto_power_mw=p_const)

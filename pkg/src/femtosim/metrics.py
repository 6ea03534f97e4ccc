"""Per-replicate outcome record shared by both spectrum schemes."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MetricsRecord:
    """Scalar outcomes of one evaluated replicate.

    Fields that do not apply to a scheme hold 0 or NaN (e.g. handover counts
    for the split scheme, split_gain for the shared scheme).  The identity
    r_sum == r_m + r_f holds exactly by construction.
    """

    strategy: str
    n_f_mean: float
    realized_femtocells: int
    gamma: int
    epsilon: float

    r_m: float
    r_f: float
    r_sum: float
    split_gain: float
    shared_gain: float
    r_max_mean: float
    r_max_realized: float

    mean_femto_sinr_db: float       # mean over users of 10*log10(SINR)
    mean_femto_sinr_linear: float

    served_femto_count: int
    served_macro_count: int
    served_macro_fraction: float

    formed_pairs: int
    handover_count: int
    handover_success_count: int
    dissolved_pairs: int

    mean_macro_power_mw: float
    mean_femto_power_mw: float

    power_control_converged: bool
    power_control_iterations: int

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def empty_record(strategy: str, config, realized: int = 0) -> MetricsRecord:
    """Record template with neutral values; schemes fill what they compute."""
    return MetricsRecord(
        strategy=strategy,
        n_f_mean=config.n_f_mean,
        realized_femtocells=realized,
        gamma=config.gamma,
        epsilon=config.epsilon,
        r_m=0.0, r_f=0.0, r_sum=0.0,
        split_gain=math.nan, shared_gain=math.nan,
        r_max_mean=math.nan, r_max_realized=math.nan,
        mean_femto_sinr_db=math.nan, mean_femto_sinr_linear=math.nan,
        served_femto_count=0, served_macro_count=0, served_macro_fraction=0.0,
        formed_pairs=0, handover_count=0, handover_success_count=0,
        dissolved_pairs=0,
        mean_macro_power_mw=math.nan, mean_femto_power_mw=math.nan,
        power_control_converged=True, power_control_iterations=0,
    )

"""Link-level math: pathloss, SINR, threshold rate, dB/dBm conversions.

Everything here is pure and unit-explicit (milliwatts, meters, linear
ratios).  These scalar forms are the reference semantics for the vectorized
evaluation code in the scheme modules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


# Relative guard for threshold comparisons at power-control fixed points:
# converged powers sit exactly at their targets, so the comparison must
# forgive float rounding without admitting any physical slack.  The guard is
# sized for the worst observed cancellation path in the interference sums
# (~1e-11 relative); 1e-9 is still 4e-9 dB, far below any physical scale.
SERVE_GUARD = 1.0 - 1e-9


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_mw(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0)


def mw_to_dbm(p_mw: float) -> float:
    return 10.0 * math.log10(p_mw)


def path_gain(distance_m: float, exponent: float, clamp_m: float = 1.0) -> float:
    """Distance-law channel gain max(d, clamp)^-exponent."""
    return max(distance_m, clamp_m) ** -exponent


@dataclass(frozen=True)
class LinkBudgetTerm:
    """One received-power term of an SINR budget: tx power times path gain."""

    tx_power_mw: float
    path_gain: float

    @property
    def received_mw(self) -> float:
        return self.tx_power_mw * self.path_gain


def sinr(signal: LinkBudgetTerm, interferers: Iterable[LinkBudgetTerm],
         noise_mw: float) -> float:
    """Linear SINR of a link against co-channel interferers plus noise."""
    total = math.fsum(term.received_mw for term in interferers) + noise_mw
    return signal.received_mw / total


def threshold_rate(sinr_linear: float, beta_linear: float) -> float:
    """Rate credited at the threshold: log2(1 + beta) if the link meets beta, else 0.

    The rate is evaluated at the threshold beta, not at the achieved SINR.
    """
    if sinr_linear >= beta_linear:
        return math.log2(1.0 + beta_linear)
    return 0.0

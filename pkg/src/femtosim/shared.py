"""Shared-spectrum scheme: power control, handover, SIC pairing, assignment.

Both tiers use all channels.  Macro users transmit the margin-scaled minimum
that reaches the base station; femto transmitters are power controlled under
per-cell caps that keep the aggregate femto interference at the BS inside
the margin budget.  The `sic` strategy additionally lets macro users join a
nearby femtocell and share their channel with a femto user through
successive interference cancellation; `pc` runs the same pipeline without
handovers.

Pipeline per realization:
    macro powers -> femto caps -> [sic: handover + pairing] ->
    channel assignment -> femto-tier power control -> final SINRs.

Design notes (see the package README for the full rationale):
  * Handover/pairing feasibility is planned against the noise floor: at the
    decision stage the femto tier has not transmitted yet, so the measured
    co-channel interference on a macro user's channel at a FAP is noise
    only.
  * Channel assignment sensing uses the pre-handover snapshot (all macro
    users at their BS powers), which every FAP can measure before the
    handover transient and which keeps the assignment identical between the
    pc and sic strategies on the same topology.
  * A paired macro user is power controlled so that its post-cancellation
    SINR meets beta_M, i.e. the cancellation residual (an epsilon fraction
    of the perfect-cancellation SINR) is part of its interference budget.
  * Pairs whose transmitters cannot reach their targets under the caps are
    dissolved (macro user back to the BS, femto user back to the assignment
    pool) and the assignment/power-control stage reruns; survivors meet
    their targets exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import NetworkConfig
from .metrics import MetricsRecord, empty_record
from .radio import SERVE_GUARD
from .topology import DistanceTable, Topology, build_distance_table

MAX_POWER_ITERATIONS = 100
POWER_TOLERANCE = 1e-6


# ---------------------------------------------------------------------------
# scalar operations (contract surface; the pipeline uses vectorized forms)

def macro_min_power(d_mb_m, config: NetworkConfig):
    """Minimum BS-uplink transmit power with margin: kappa*beta_M*sigma2*d^phi."""
    return config.kappa_m * config.beta_m * config.noise_mw * np.asarray(d_mb_m) ** config.phi


def interference_budget(config: NetworkConfig) -> float:
    """Per-channel aggregate femto interference allowed at the BS: sigma2*(kappa-1)."""
    if not config.kappa_m > 1.0:
        raise ValueError("interference budget requires kappa_m > 1")
    return config.noise_mw * (config.kappa_m - 1.0)


def femto_power_cap(d_ab_m, config: NetworkConfig):
    """Per-cell femto transmit cap: budget * (d_AB - r_f)^phi / N_f.

    The FAP-to-BS distance stands in for every served user (worst case at
    the cell edge toward the BS); the difference is clamped at the pathloss
    clamp distance.
    """
    if config.n_f_mean <= 0:
        raise ValueError("femto power cap undefined for n_f_mean <= 0")
    gap = np.maximum(np.asarray(d_ab_m) - config.r_femto_m, config.min_distance_m)
    return interference_budget(config) * gap ** config.phi / config.n_f_mean


def required_fap_power(d_ma_m, co_channel_interference_mw, config: NetworkConfig):
    """Macro transmit power needed to reach beta_M at a FAP over the given interference."""
    return (config.beta_m * (np.asarray(co_channel_interference_mw) + config.noise_mw)
            * np.asarray(d_ma_m) ** config.psi)


def handover_decision(d_mb_m, d_ma_m, co_channel_interference_mw,
                      config: NetworkConfig):
    """True when joining the FAP needs strictly less power than the BS uplink.

    Strict inequality: equality of the two power bounds keeps the user at
    the BS.
    """
    lhs = np.asarray(d_mb_m) ** config.phi * config.kappa_m * config.noise_mw
    rhs = ((np.asarray(co_channel_interference_mw) + config.noise_mw)
           * np.asarray(d_ma_m) ** config.psi)
    return lhs > rhs


def sic_residual_mw(external_interference_mw: float, epsilon: float,
                    noise_mw: float) -> float:
    """Residual power after imperfect cancellation.

    Defined so the post-cancellation SINR equals (1 - eps) times the
    perfect-cancellation SINR: residual = eps/(1-eps) * (I_ext + sigma2).
    Zero exactly when eps is zero.
    """
    return epsilon / (1.0 - epsilon) * (external_interference_mw + noise_mw)


@dataclass(frozen=True)
class SicPair:
    """A macro/femto user pair sharing the macro user's channel at one FAP."""

    cell_id: int
    macro_user_id: int
    femto_user_id: int
    channel_id: int
    grant_mu_mw: float          # formation-time power bounds (noise-floor plan)
    grant_fu_mw: float
    residual_mw: float = 0.0
    fu_decoded: bool = False
    mu_decoded: bool = False


def evaluate_sic_pair(pair: SicPair, p_mu_mw: float, p_fu_mw: float,
                      d_ma_m: float, d_fa_m: float,
                      external_interference_mw: float,
                      config: NetworkConfig) -> SicPair:
    """Fill the decode flags and residual of a pair from final powers.

    Stage 1 decodes the femto user against the macro user's signal plus
    external interference; stage 2 decodes the macro user after subtracting
    the femto signal, suffering the epsilon-fraction residual.
    """
    sigma2 = config.noise_mw
    eps = config.epsilon
    i_mu = p_mu_mw * d_ma_m ** -config.psi
    fu_sinr = (p_fu_mw * d_fa_m ** -config.alpha
               / (i_mu + external_interference_mw + sigma2))
    fu_ok = bool(fu_sinr >= config.beta_f * SERVE_GUARD)
    gamma_m = i_mu / (external_interference_mw + sigma2)
    mu_ok = fu_ok and bool(
        gamma_m >= config.beta_m / (1.0 - eps) * SERVE_GUARD)
    return replace(pair,
                   residual_mw=sic_residual_mw(external_interference_mw, eps, sigma2),
                   fu_decoded=fu_ok, mu_decoded=mu_ok)


def assign_channels_shared(measured_interference_mw, excluded_channels,
                           count: int) -> list[int]:
    """The `count` least-interfered channels outside `excluded_channels`.

    Ascending measured interference, ties broken by lowest channel id.
    """
    measured = np.asarray(measured_interference_mw)
    excluded = set(int(c) for c in excluded_channels)
    order = np.argsort(measured, kind="stable")
    picked = [int(c) for c in order if int(c) not in excluded]
    return picked[:count]


# ---------------------------------------------------------------------------
# handover phase

@dataclass(frozen=True)
class HandoverPlan:
    """Outcome of the handover/pairing phase (before power control)."""

    attachment: np.ndarray        # (M,) serving cell id, -1 for the BS
    pairs: tuple[SicPair, ...]
    rule_satisfied_count: int     # macro users with at least one admissible FAP


def run_handover_phase(topology: Topology, distances: DistanceTable,
                       config: NetworkConfig,
                       caps_mw: np.ndarray | None = None,
                       p_mu_bs_mw: np.ndarray | None = None) -> HandoverPlan:
    """Decide handovers, admissions, and SIC partners for one realization.

    Every macro user evaluates the decision rule against every FAP at the
    noise-floor interference estimate; rule-satisfying users attach to the
    FAP minimizing their required power.  Admissions per cell are capped at
    F, granted in ascending required power (ties by user id); each admitted
    user pairs with the unpaired femto user of smallest own-cell distance.
    Pairs whose planned powers do not fit under the cell cap (femto side) or
    under min(cell cap, BS power) (macro side) are rejected here.
    """
    m_users = config.n_macro_users
    n = topology.realized_femtocell_count
    attachment = np.full(m_users, -1, dtype=int)
    if n == 0:
        return HandoverPlan(attachment=attachment, pairs=(), rule_satisfied_count=0)

    if caps_mw is None:
        caps_mw = femto_power_cap(distances.d_ab, config)
    if p_mu_bs_mw is None:
        p_mu_bs_mw = macro_min_power(distances.d_mb, config)
    sigma2 = config.noise_mw
    eps = config.epsilon

    rule = handover_decision(distances.d_mb[:, None], distances.d_ma, 0.0, config)
    p_star = required_fap_power(distances.d_ma, 0.0, config)       # (M, n)

    candidate = np.where(rule.any(axis=1),
                         np.argmin(np.where(rule, p_star, np.inf), axis=1), -1)
    rule_count = int((candidate >= 0).sum())

    admitted: dict[int, list[int]] = {}
    order = sorted(range(m_users),
                   key=lambda m: (p_star[m, candidate[m]] if candidate[m] >= 0 else math.inf, m))
    cap_per_cell = config.n_femto_users_per_cell
    for m in order:
        a = int(candidate[m])
        if a < 0:
            continue
        cell = admitted.setdefault(a, [])
        if len(cell) < cap_per_cell:
            cell.append(m)

    pairs = []
    for a, members in sorted(admitted.items()):
        fu_order = np.lexsort((np.arange(config.n_femto_users_per_cell),
                               distances.d_fa_own[a]))
        for k, m in enumerate(members):
            f = int(fu_order[k])
            p_mu_req = (config.beta_m / (1.0 - eps) * sigma2
                        * distances.d_ma[m, a] ** config.psi)
            i_mu = p_mu_req * distances.d_ma[m, a] ** -config.psi
            p_fu_req = (config.beta_f * (i_mu + sigma2)
                        * distances.d_fa_own[a, f] ** config.alpha)
            if (p_mu_req <= min(caps_mw[a], p_mu_bs_mw[m])
                    and p_fu_req <= caps_mw[a]):
                attachment[m] = a
                pairs.append(SicPair(cell_id=a, macro_user_id=m, femto_user_id=f,
                                     channel_id=m, grant_mu_mw=float(p_mu_req),
                                     grant_fu_mw=float(p_fu_req)))
    return HandoverPlan(attachment=attachment, pairs=tuple(pairs),
                        rule_satisfied_count=rule_count)


# ---------------------------------------------------------------------------
# channel allocation + power control

@dataclass(frozen=True)
class ChannelAllocation:
    """Per-femto-user channel ids; pair channels equal the partner's channel."""

    fu_channel: np.ndarray        # (n, F)


@dataclass(frozen=True)
class PowerAllocation:
    """Final transmit powers of one realization."""

    macro_tx_mw: np.ndarray       # (M,)
    femto_tx_mw: np.ndarray       # (n, F)
    femto_cap_mw: np.ndarray      # (n,)
    attachment: np.ndarray        # (M,) -1 = BS


@dataclass(frozen=True)
class SharedEvaluation:
    """Full per-realization state kept alongside the metrics record."""

    record: MetricsRecord
    power: PowerAllocation
    channels: ChannelAllocation
    pairs: tuple[SicPair, ...]
    femto_sinr: np.ndarray        # (n, F) at the serving FAP
    macro_sinr_bs: np.ndarray     # (M,) NaN for paired users
    bs_femto_interference_mw: np.ndarray   # (N_C,) aggregate femto power at the BS
    plan: HandoverPlan


def _assign_channels(config: NetworkConfig, distances: DistanceTable,
                     p_mu_bs_mw: np.ndarray, pairs,
                     caps_mw: np.ndarray | None = None) -> ChannelAllocation:
    """Least-interfered assignment from the pre-handover interference snapshot.

    Every cell first receives the plain interference-ordered assignment
    (identical to the pc strategy's, since the snapshot predates the
    handover transient).  A pair then moves its femto user onto the
    partner's channel; a same-cell user whose assigned channel collides
    with that pair channel is displaced to the best remaining channel not
    held by any pair.  Keeping the baseline assignment independent of the
    pair set confines pair interactions to their own channels.
    """
    n = distances.d_ab.shape[0]
    n_fu = config.n_femto_users_per_cell
    g_mu_fap = distances.d_ma ** -config.psi                # (M, n)
    sensed = (p_mu_bs_mw[:, None] * g_mu_fap).T             # (n, N_C)
    fu_channel = np.full((n, n_fu), -1, dtype=int)
    for a in range(n):
        chans = assign_channels_shared(sensed[a], (), n_fu)
        fu_channel[a, :] = chans

    own_pairs: dict[int, list[SicPair]] = {}
    for pair in pairs:
        own_pairs.setdefault(pair.cell_id, []).append(pair)
    all_pair_channels = {p.channel_id for p in pairs}
    for a, cell_pairs in own_pairs.items():
        order = np.argsort(sensed[a], kind="stable")
        for pair in cell_pairs:
            vacated = int(fu_channel[a, pair.femto_user_id])
            fu_channel[a, pair.femto_user_id] = pair.channel_id
            clash = [f for f in range(n_fu)
                     if f != pair.femto_user_id
                     and fu_channel[a, f] == pair.channel_id]
            for f in clash:
                used = set(int(c) for c in fu_channel[a])
                spare = [int(c) for c in order
                         if int(c) not in used and int(c) not in all_pair_channels]
                # fall back to the vacated channel when everything is held
                fu_channel[a, f] = spare[0] if spare else vacated
    return ChannelAllocation(fu_channel=fu_channel)


@dataclass
class _PowerControlState:
    powers: np.ndarray
    served: np.ndarray
    sinr: np.ndarray
    interference_self_mw: np.ndarray
    iterations: int
    converged: bool
    fu_index: dict
    mu_index: dict


def _run_power_control(config: NetworkConfig, distances: DistanceTable,
                       p_mu_bs_mw: np.ndarray, caps_mw: np.ndarray,
                       pairs, alloc: ChannelAllocation) -> _PowerControlState:
    """Synchronous target-SINR iteration from the caps downward.

    Starting at the caps makes the power sequence monotone non-increasing,
    so every transmitter's SINR at any truncation sits at or above its
    target unless its cap binds; threshold checks then need no slack beyond
    float rounding.
    """
    n = distances.d_ab.shape[0]
    n_fu = config.n_femto_users_per_cell
    n_ch = config.n_channels
    sigma2 = config.noise_mw
    eps = config.epsilon

    g_mu_fap = distances.d_ma ** -config.psi
    g_fu_cross = distances.d_fa ** -config.phi
    g_fu_own = distances.d_fa_own ** -config.alpha

    n_tx = n * n_fu + len(pairs)
    rows = np.empty((n_tx, n))
    tx_ch = np.empty(n_tx, dtype=int)
    tx_cell = np.empty(n_tx, dtype=int)
    tx_cap = np.empty(n_tx)
    tx_target = np.empty(n_tx)
    tx_gain = np.empty(n_tx)

    fu_index = {}
    k = 0
    for a in range(n):
        for f in range(n_fu):
            fu_index[(a, f)] = k
            rows[k] = g_fu_cross[a, f]
            rows[k, a] = g_fu_own[a, f]
            tx_ch[k] = alloc.fu_channel[a, f]
            tx_cell[k] = a
            tx_cap[k] = caps_mw[a]
            tx_target[k] = config.beta_f
            tx_gain[k] = g_fu_own[a, f]
            k += 1
    mu_index = {}
    for pair in pairs:
        mu_index[pair.macro_user_id] = k
        rows[k] = g_mu_fap[pair.macro_user_id]
        tx_ch[k] = pair.channel_id
        tx_cell[k] = pair.cell_id
        tx_cap[k] = min(caps_mw[pair.cell_id], p_mu_bs_mw[pair.macro_user_id])
        tx_target[k] = config.beta_m / (1.0 - eps)
        tx_gain[k] = g_mu_fap[pair.macro_user_id, pair.cell_id]
        k += 1

    partner = np.full(n_tx, -1, dtype=int)
    for pair in pairs:
        partner[mu_index[pair.macro_user_id]] = fu_index[(pair.cell_id, pair.femto_user_id)]
    has_partner = partner >= 0

    paired_mus = {pair.macro_user_id for pair in pairs}
    bs_power = np.where([m in paired_mus for m in range(config.n_macro_users)],
                        0.0, p_mu_bs_mw)
    base = bs_power[:, None] * g_mu_fap                      # (N_C, n) fixed background

    own_gain = rows[np.arange(n_tx), tx_cell] if n_tx else np.zeros(0)

    def interference_at_receivers(powers):
        acc = base.copy()
        np.add.at(acc, tx_ch, powers[:, None] * rows)
        i_self = acc[tx_ch, tx_cell] - powers * own_gain
        i_self[has_partner] -= (powers[partner[has_partner]]
                                * own_gain[partner[has_partner]])
        return i_self

    powers = tx_cap.copy()
    converged = n_tx == 0
    iterations = 0
    for iterations in range(1, MAX_POWER_ITERATIONS + 1):
        if n_tx == 0:
            break
        i_self = interference_at_receivers(powers)
        updated = np.minimum(tx_target * (i_self + sigma2) / tx_gain, tx_cap)
        delta = float(np.max(np.abs(updated - powers) / np.maximum(powers, 1e-300)))
        powers = updated
        if delta < POWER_TOLERANCE:
            converged = True
            break

    i_self = interference_at_receivers(powers) if n_tx else np.zeros(0)
    sinr = powers * tx_gain / (i_self + sigma2) if n_tx else np.zeros(0)
    served = sinr >= tx_target * SERVE_GUARD
    return _PowerControlState(powers=powers, served=served, sinr=sinr,
                              interference_self_mw=i_self,
                              iterations=iterations, converged=converged,
                              fu_index=fu_index, mu_index=mu_index)


def femto_power_control(topology: Topology, config: NetworkConfig,
                        pairs=(), alloc: ChannelAllocation | None = None,
                        distances: DistanceTable | None = None) -> PowerAllocation:
    """Run the femto-tier power control once and return the power allocation."""
    if distances is None:
        distances = build_distance_table(topology, config)
    p_mu_bs = macro_min_power(distances.d_mb, config)
    caps = (femto_power_cap(distances.d_ab, config)
            if topology.realized_femtocell_count else np.zeros(0))
    if alloc is None:
        alloc = _assign_channels(config, distances, p_mu_bs, pairs, caps)
    state = _run_power_control(config, distances, p_mu_bs, caps, pairs, alloc)
    return _build_power_allocation(config, topology, p_mu_bs, caps, pairs, state)


def _build_power_allocation(config, topology, p_mu_bs, caps, pairs, state):
    n = topology.realized_femtocell_count
    n_fu = config.n_femto_users_per_cell
    femto_tx = np.zeros((n, n_fu))
    for (a, f), idx in state.fu_index.items():
        femto_tx[a, f] = state.powers[idx]
    macro_tx = p_mu_bs.copy()
    attachment = np.full(config.n_macro_users, -1, dtype=int)
    for pair in pairs:
        macro_tx[pair.macro_user_id] = state.powers[state.mu_index[pair.macro_user_id]]
        attachment[pair.macro_user_id] = pair.cell_id
    return PowerAllocation(macro_tx_mw=macro_tx, femto_tx_mw=femto_tx,
                           femto_cap_mw=caps, attachment=attachment)


# ---------------------------------------------------------------------------
# full pipeline

def evaluate_shared(topology: Topology, config: NetworkConfig, strategy: str,
                    distances: DistanceTable | None = None,
                    detail: bool = False):
    """Evaluate one realization under the shared-spectrum scheme.

    strategy 'pc': power control and channel assignment only;
    strategy 'sic': additionally macro-to-femtocell handover with SIC pairs.
    Returns a MetricsRecord, or (MetricsRecord, SharedEvaluation) when
    `detail` is true.
    """
    if strategy not in ("pc", "sic"):
        raise ValueError(f"unknown shared strategy {strategy!r}")
    if distances is None:
        distances = build_distance_table(topology, config)
    m_users = config.n_macro_users
    n = topology.realized_femtocell_count
    n_fu = config.n_femto_users_per_cell
    sigma2 = config.noise_mw
    l_m = math.log2(1.0 + config.beta_m)
    l_f = math.log2(1.0 + config.beta_f)

    p_mu_bs = macro_min_power(distances.d_mb, config)

    if n == 0:
        record = replace(
            empty_record(strategy, config),
            r_m=m_users * l_m, r_sum=m_users * l_m,
            shared_gain=0.0,
            r_max_mean=_r_max(config.n_f_mean, config),
            r_max_realized=0.0,
            served_macro_count=m_users, served_macro_fraction=1.0,
            mean_macro_power_mw=float(np.mean(p_mu_bs)))
        if not detail:
            return record
        return record, SharedEvaluation(
            record=record,
            power=PowerAllocation(macro_tx_mw=p_mu_bs,
                                  femto_tx_mw=np.zeros((0, n_fu)),
                                  femto_cap_mw=np.zeros(0),
                                  attachment=np.full(m_users, -1, dtype=int)),
            channels=ChannelAllocation(fu_channel=np.zeros((0, n_fu), dtype=int)),
            pairs=(), femto_sinr=np.zeros((0, n_fu)),
            macro_sinr_bs=np.full(m_users, config.kappa_m * config.beta_m),
            bs_femto_interference_mw=np.zeros(config.n_channels),
            plan=HandoverPlan(np.full(m_users, -1, dtype=int), (), 0))

    caps = femto_power_cap(distances.d_ab, config)
    if strategy == "sic":
        plan = run_handover_phase(topology, distances, config, caps, p_mu_bs)
    else:
        plan = HandoverPlan(np.full(m_users, -1, dtype=int), (), 0)

    # dissolution loop: drop pairs that cannot hold their targets, rerun
    pairs = list(plan.pairs)
    iterations = 0
    converged = True
    for _ in range(len(pairs) + 1):
        alloc = _assign_channels(config, distances, p_mu_bs, pairs, caps)
        state = _run_power_control(config, distances, p_mu_bs, caps, pairs, alloc)
        iterations = max(iterations, state.iterations)
        converged = converged and state.converged
        failed = [pair for pair in pairs
                  if not (state.served[state.fu_index[(pair.cell_id, pair.femto_user_id)]]
                          and state.served[state.mu_index[pair.macro_user_id]])]
        if not failed:
            break
        dropped = {(p.cell_id, p.macro_user_id) for p in failed}
        pairs = [p for p in pairs if (p.cell_id, p.macro_user_id) not in dropped]

    # final pair records with decode flags and residuals
    final_pairs = []
    for pair in pairs:
        idx_mu = state.mu_index[pair.macro_user_id]
        idx_fu = state.fu_index[(pair.cell_id, pair.femto_user_id)]
        final_pairs.append(evaluate_sic_pair(
            pair,
            p_mu_mw=float(state.powers[idx_mu]),
            p_fu_mw=float(state.powers[idx_fu]),
            d_ma_m=float(distances.d_ma[pair.macro_user_id, pair.cell_id]),
            d_fa_m=float(distances.d_fa_own[pair.cell_id, pair.femto_user_id]),
            external_interference_mw=float(state.interference_self_mw[idx_mu]),
            config=config))
    final_pairs = tuple(final_pairs)

    # BS-side interference and macro service
    n_fu_tx = n * n_fu
    g_fu_bs = distances.d_fb.reshape(-1) ** -config.phi
    fu_powers = state.powers[:n_fu_tx]
    fu_channels = alloc.fu_channel.reshape(-1)
    i_bs = np.zeros(config.n_channels)
    np.add.at(i_bs, fu_channels, fu_powers * g_fu_bs)

    paired_mu_ids = {p.macro_user_id for p in final_pairs}
    g_mu_bs = distances.d_mb ** -config.phi
    macro_sinr_bs = p_mu_bs * g_mu_bs / (i_bs[np.arange(m_users)] + sigma2)
    bs_attached = np.array([m not in paired_mu_ids for m in range(m_users)])
    macro_served_bs = bs_attached & (macro_sinr_bs >= config.beta_m * SERVE_GUARD)
    macro_sinr_bs = np.where(bs_attached, macro_sinr_bs, np.nan)

    served_mu = int(macro_served_bs.sum()) + sum(p.mu_decoded for p in final_pairs)
    served_fu = int(state.served[:n_fu_tx].sum())
    femto_sinr = state.sinr[:n_fu_tx].reshape(n, n_fu)

    power = _build_power_allocation(config, topology, p_mu_bs, caps, final_pairs, state)
    mean_macro_power = float(np.mean(power.macro_tx_mw))
    mean_femto_power = float(np.mean(power.femto_tx_mw)) if n_fu_tx else math.nan

    r_m = served_mu * l_m
    r_f = served_fu * l_f
    record = replace(
        empty_record(strategy, config, realized=n),
        r_m=r_m, r_f=r_f, r_sum=r_m + r_f,
        shared_gain=r_f / (m_users * l_m),
        r_max_mean=_r_max(config.n_f_mean, config),
        r_max_realized=_r_max(n, config),
        mean_femto_sinr_db=float(np.mean(10.0 * np.log10(femto_sinr))),
        mean_femto_sinr_linear=float(np.mean(femto_sinr)),
        served_femto_count=served_fu,
        served_macro_count=served_mu,
        served_macro_fraction=served_mu / m_users,
        formed_pairs=len(plan.pairs),
        handover_count=len(final_pairs),
        handover_success_count=sum(p.mu_decoded for p in final_pairs),
        dissolved_pairs=len(plan.pairs) - len(final_pairs),
        mean_macro_power_mw=mean_macro_power,
        mean_femto_power_mw=mean_femto_power,
        power_control_converged=converged,
        power_control_iterations=iterations)

    if not detail:
        return record
    return record, SharedEvaluation(
        record=record, power=power, channels=alloc, pairs=final_pairs,
        femto_sinr=femto_sinr, macro_sinr_bs=macro_sinr_bs,
        bs_femto_interference_mw=i_bs, plan=plan)


def _r_max(n_f: float, config: NetworkConfig) -> float:
    """Sum-rate-gain upper bound: all femto users served (affine in N_f)."""
    return (config.n_femto_users_per_cell * n_f * math.log2(1.0 + config.beta_f)
            / (config.n_macro_users * math.log2(1.0 + config.beta_m)))

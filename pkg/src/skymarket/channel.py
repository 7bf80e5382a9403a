"""Channel gains, static interference, per-link rates, and the satellite
rate-drift estimator.

Serving links use main-lobe/main-lobe antenna gains (perfect alignment);
interfering links use the uniform-boresight average gains. Access and
terrestrial backhaul rates are slot-invariant under the static interference
model; only the satellite backhaul rate varies with the slot index through
the satellite's along-x motion.

The RateTable built here is the single source of truth for link rates:
every solver consumes it verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import Scenario

LN2 = math.log(2.0)


@dataclass(frozen=True)
class LinkGain:
    gain: float       # linear power ratio, 0 iff NLoS
    los: bool
    distance: float   # meters


def antenna_gain(offset_angle: float, beamwidth: float, main: float, side: float) -> float:
    """Sectored antenna pattern: main-lobe gain inside the half beamwidth
    (boundary inclusive), side-lobe gain outside."""
    if offset_angle < 0:
        raise ValueError(f"offset angle must be non-negative, got {offset_angle}")
    if not (0.0 < beamwidth <= 2.0 * math.pi):
        raise ValueError(f"beamwidth must lie in (0, 2*pi], got {beamwidth}")
    if main <= 0 or side <= 0:
        raise ValueError("antenna gains must be strictly positive")
    return main if offset_angle <= beamwidth / 2.0 else side


def average_interferer_gain(beamwidth: float, main: float, side: float) -> float:
    """Expected gain of an interferer whose boresight is uniform on (0, 2*pi)."""
    if not (0.0 < beamwidth <= 2.0 * math.pi):
        raise ValueError(f"beamwidth must lie in (0, 2*pi], got {beamwidth}")
    frac = beamwidth / (2.0 * math.pi)
    return frac * main + (1.0 - frac) * side


def _pathloss_factor(distance, chi_db, radio):
    """10^(-L2/10) with L2 = intercept + alpha*log10(d) + chi."""
    l2 = (
        radio.pathloss_intercept_db
        + radio.pathloss_exponent * np.log10(distance)
        + chi_db
    )
    return 10.0 ** (-l2 / 10.0)


def link_gain(distance, chi_db, los, radio, tx_gain, rx_gain):
    """Channel gain: Rician coefficient times path loss times antenna gains
    on LoS links, zero on NLoS links."""
    base = radio.rician_coeff * _pathloss_factor(distance, chi_db, radio)
    return np.where(los, base * tx_gain * rx_gain, 0.0)


def _pair_distances(tx_pos, rx_pos):
    d = np.linalg.norm(tx_pos[:, None, :] - rx_pos[None, :, :], axis=-1)
    return d


_KIND_SAT = "satellite"


def channel_gain(tx, rx, scenario: Scenario, t: int = 0, serving: bool = True) -> LinkGain:
    """Gain of a single link. `tx` and `rx` are (kind, index) pairs with kind
    one of 'bs', 'mbs', 'user', 'satellite'; the satellite position is taken
    at slot `t`.

    Serving links use main-lobe gains on both ends; non-serving (interfering)
    links use the average interferer gains.
    """
    radio = scenario.radio
    tx_kind, tx_idx = tx
    rx_kind, rx_idx = rx
    if tx == rx:
        raise ValueError("transmitter and receiver must differ")

    def pos(kind, idx):
        if kind == "user":
            return scenario.user_pos[idx]
        if kind == "bs":
            return scenario.bs_pos[idx]
        if kind == "mbs":
            return scenario.mbs_pos[idx]
        if kind == _KIND_SAT:
            return scenario.satellite_position(t)
        raise ValueError(f"unknown node kind {kind!r}")

    p_tx, p_rx = pos(tx_kind, tx_idx), pos(rx_kind, rx_idx)
    d = float(np.linalg.norm(p_tx - p_rx))
    if d == 0.0:
        raise ValueError("coincident transmitter and receiver positions")

    if tx_kind == "bs" and rx_kind == "user":
        chi = scenario.chi_bs_user[tx_idx, rx_idx]
        los = bool(scenario.los_bs_user[tx_idx, rx_idx])
    elif tx_kind == "mbs" and rx_kind == "user":
        chi = scenario.chi_mbs_user[tx_idx, rx_idx]
        los = bool(scenario.los_mbs_user[tx_idx, rx_idx])
    elif tx_kind == "bs" and rx_kind == "bs":
        chi = scenario.chi_bs_bs[tx_idx, rx_idx]
        los = bool(scenario.los_bs_bs[tx_idx, rx_idx])
    elif tx_kind == "mbs" and rx_kind == "bs":
        chi = scenario.chi_mbs_bs[tx_idx, rx_idx]
        los = bool(scenario.los_mbs_bs[tx_idx, rx_idx])
    elif tx_kind == _KIND_SAT and rx_kind == "bs":
        chi = scenario.chi_sat_bs[rx_idx]
        los = True
    else:
        raise ValueError(f"unsupported link {tx_kind!r} -> {rx_kind!r}")

    if serving:
        g_tx, g_rx = radio.main_tx_gain, radio.main_rx_gain
    else:
        g_tx = average_interferer_gain(
            radio.tx_beamwidth_rad, radio.main_tx_gain, radio.side_tx_gain
        )
        g_rx = average_interferer_gain(
            radio.rx_beamwidth_rad, radio.main_rx_gain, radio.side_rx_gain
        )
    gain = float(link_gain(d, chi, los, radio, g_tx, g_rx))
    return LinkGain(gain=gain, los=los, distance=d)


@dataclass(frozen=True)
class InterferenceTerms:
    """Static (slot-invariant) interference powers, linear watts."""

    access: np.ndarray      # (N, U): at user u when served by BS n
    backhaul: np.ndarray    # (N, M): at BS n when served by MBS m
    satellite: np.ndarray   # (N,): at BS n on the satellite link


def _avg_gains(radio):
    g_tx = average_interferer_gain(
        radio.tx_beamwidth_rad, radio.main_tx_gain, radio.side_tx_gain
    )
    g_rx = average_interferer_gain(
        radio.rx_beamwidth_rad, radio.main_rx_gain, radio.side_rx_gain
    )
    return g_tx, g_rx


def interfering_gain_matrices(scenario: Scenario):
    """Average-antenna-gain channel matrices of all potential interferers.

    Returns (bs->user (N,U), mbs->user (M,U), bs->bs (N,N), mbs->bs (M,N));
    the bs->bs diagonal is zeroed (a BS does not interfere with itself).
    """
    radio = scenario.radio
    g_tx, g_rx = _avg_gains(radio)

    def mat(tx_pos, rx_pos, chi, los):
        d = _pair_distances(tx_pos, rx_pos)
        with np.errstate(divide="ignore"):
            g = link_gain(d, chi, los, radio, g_tx, g_rx)
        return g

    h_bu = mat(scenario.bs_pos, scenario.user_pos, scenario.chi_bs_user, scenario.los_bs_user)
    h_mu = mat(scenario.mbs_pos, scenario.user_pos, scenario.chi_mbs_user, scenario.los_mbs_user)
    h_bb = mat(scenario.bs_pos, scenario.bs_pos, scenario.chi_bs_bs, scenario.los_bs_bs)
    np.fill_diagonal(h_bb, 0.0)
    h_mb = mat(scenario.mbs_pos, scenario.bs_pos, scenario.chi_mbs_bs, scenario.los_mbs_bs)
    return h_bu, h_mu, h_bb, h_mb


def static_interference(scenario: Scenario) -> InterferenceTerms:
    """Slot-invariant interference under the every-transmitter-always-busy
    assumption: each sum ranges over all other BSs and the relevant MBSs."""
    radio = scenario.radio
    h_bu, h_mu, h_bb, h_mb = interfering_gain_matrices(scenario)
    p_n, p_m = radio.bs_power_w, radio.mbs_power_w

    # Interference at user u, excluding the serving BS n.
    bs_at_user = p_n * h_bu                      # (N, U)
    total_at_user = bs_at_user.sum(axis=0)       # (U,)
    mbs_at_user = p_m * h_mu.sum(axis=0)         # (U,)
    omega_access = (total_at_user - bs_at_user) + mbs_at_user   # (N, U)

    # Interference at BS n from other BSs, and from MBSs.
    bs_at_bs = p_n * h_bb.sum(axis=0)            # (N,) diagonal already zero
    mbs_at_bs = p_m * h_mb                       # (M, N)
    total_mbs_at_bs = mbs_at_bs.sum(axis=0)      # (N,)
    # Terrestrial backhaul: exclude the serving MBS m.
    omega_backhaul = (bs_at_bs[None, :] + (total_mbs_at_bs[None, :] - mbs_at_bs)).T  # (N, M)
    # Satellite backhaul: all BSs and all MBSs interfere.
    omega_sat = bs_at_bs + total_mbs_at_bs       # (N,)

    return InterferenceTerms(
        access=omega_access, backhaul=omega_backhaul, satellite=omega_sat
    )


def shannon_rate(power_w, gain, interference_w, noise_w, bandwidth_hz):
    """Shannon rate B*log2(1 + P*h / (Omega + sigma^2)), bit/s."""
    sinr = power_w * gain / (interference_w + noise_w)
    return bandwidth_hz * np.log2(1.0 + sinr)


@dataclass(frozen=True)
class RateTable:
    """Precomputed per-link achievable rates, bit/s.

    Access and terrestrial backhaul rates are slot-invariant; the satellite
    backhaul rate carries one column per slot.
    """

    access_rate: np.ndarray       # (N, U)
    backhaul_rate: np.ndarray     # (N, M)
    sat_rate: np.ndarray          # (N, T)
    interference: InterferenceTerms
    sat_distance: np.ndarray      # (N, T) meters
    serving_gain_bs_user: np.ndarray   # (N, U)
    serving_gain_mbs_bs: np.ndarray    # (M, N)

    def __post_init__(self):
        for name in ("access_rate", "backhaul_rate", "sat_rate", "sat_distance"):
            a = np.ascontiguousarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def _sat_serving_gain_factor(scenario, n):
    """P'_S of the drift derivation: everything in the satellite SINR except
    the distance-dependent path loss factor g(t)."""
    radio = scenario.radio
    omega = static_interference(scenario).satellite[n]
    chi = scenario.chi_sat_bs[n]
    return (
        radio.sat_power_w
        * radio.rician_coeff
        * radio.main_tx_gain
        * radio.main_rx_gain
        / (omega + radio.cochannel_w + radio.noise_w)
    ), chi, omega


def build_rate_table(scenario: Scenario) -> RateTable:
    """Compute every per-link per-slot achievable rate under static interference."""
    radio = scenario.radio
    interference = static_interference(scenario)
    gm = radio.main_tx_gain * radio.main_rx_gain

    d_bu = _pair_distances(scenario.bs_pos, scenario.user_pos)
    h_bu = link_gain(d_bu, scenario.chi_bs_user, scenario.los_bs_user, radio, 1.0, 1.0) * gm
    access = shannon_rate(
        radio.bs_power_w, h_bu, interference.access, radio.noise_w,
        radio.access_bandwidth_hz,
    )

    d_mb = _pair_distances(scenario.mbs_pos, scenario.bs_pos)
    h_mb = link_gain(d_mb, scenario.chi_mbs_bs, scenario.los_mbs_bs, radio, 1.0, 1.0) * gm
    backhaul = shannon_rate(
        radio.mbs_power_w, h_mb, interference.backhaul.T,
        radio.noise_w, radio.access_bandwidth_hz,
    ).T  # (N, M)

    N, T = scenario.num_bs, scenario.num_slots
    sat_rate = np.zeros((N, T))
    sat_distance = np.ones((N, T))
    if scenario.satellite_enabled:
        t_idx = np.arange(T, dtype=float)
        sat_pos = scenario.satellite_position(t_idx)          # (T, 3)
        diff = sat_pos[None, :, :] - scenario.bs_pos[:, None, :]
        sat_distance = np.linalg.norm(diff, axis=-1)          # (N, T)
        h_sn = link_gain(
            sat_distance, scenario.chi_sat_bs[:, None], True, radio, 1.0, 1.0
        ) * gm
        sat_rate = shannon_rate(
            radio.sat_power_w, h_sn,
            interference.satellite[:, None] + radio.cochannel_w,
            radio.noise_w, radio.sat_bandwidth_hz,
        )

    return RateTable(
        access_rate=access,
        backhaul_rate=backhaul,
        sat_rate=sat_rate,
        interference=interference,
        sat_distance=sat_distance,
        serving_gain_bs_user=h_bu,
        serving_gain_mbs_bs=h_mb,
    )


def satellite_rate_drift(n: int, t: int, rate_table: RateTable, scenario: Scenario) -> float:
    """First-order per-slot change of the satellite backhaul rate at BS n.

    Returns the analytic derivative of the exact rate with respect to the
    (continuous) slot index, evaluated at slot t, so that
    sat_rate[n, t-1] + drift approximates sat_rate[n, t]. Negative when the
    satellite is moving away from the BS.
    """
    if t <= 0:
        raise ValueError("drift needs a previous slot; t must be >= 1")
    if not scenario.satellite_enabled:
        raise ValueError("satellite disabled in this scenario")
    radio = scenario.radio
    p_eff, chi, _ = _sat_serving_gain_factor(scenario, n)

    d = float(rate_table.sat_distance[n, t])
    x_sat = scenario.sat_initial[0] + scenario.sat_speed * t * scenario.tau
    x_bs = scenario.bs_pos[n, 0]
    # d(d)/dt in meters per slot index.
    dd_dt = (x_sat - x_bs) * scenario.sat_speed * scenario.tau / d

    g = float(_pathloss_factor(d, chi, radio))
    dg_dt = -(radio.pathloss_exponent / 10.0) * g * dd_dt / d
    return float(
        radio.sat_bandwidth_hz / LN2 * p_eff * dg_dt / (1.0 + p_eff * g)
    )


def estimated_sat_rates(rate_table: RateTable, scenario: Scenario) -> np.ndarray:
    """(N, T) satellite rates as a BS would track them without recomputation:
    exact at slot 0, then recursively previous estimate plus drift."""
    N, T = rate_table.sat_rate.shape
    est = np.zeros((N, T))
    est[:, 0] = rate_table.sat_rate[:, 0]
    for t in range(1, T):
        for n in range(N):
            est[n, t] = est[n, t - 1] + satellite_rate_drift(n, t, rate_table, scenario)
    return est

"""Immutable problem instances: node geometry, time grid, budgets, radio
parameters, and the frozen per-link channel randomness.

A Scenario is constructed once from a config document (YAML) and never
mutated afterwards; every stochastic channel element (shadow fading, LoS
indicators) is drawn at construction time and stored, so all downstream
rate computations are deterministic functions of the Scenario.

Base stations are ordered small cells first, then drones.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
import yaml

from .units import db_to_linear, dbm_to_watt, dbw_to_watt


class ScenarioError(ValueError):
    """Config validation failure; the message carries the offending field path."""


@dataclass(frozen=True)
class RadioParams:
    """Radio-layer parameters, normalized to linear SI units."""

    bs_power_w: float
    mbs_power_w: float
    sat_power_w: float
    access_bandwidth_hz: float
    sat_bandwidth_hz: float
    noise_w: float
    cochannel_w: float
    rician_coeff: float
    pathloss_exponent: float
    pathloss_intercept_db: float
    shadow_sigma_db: float
    main_tx_gain: float
    side_tx_gain: float
    main_rx_gain: float
    side_rx_gain: float
    tx_beamwidth_rad: float
    rx_beamwidth_rad: float
    blockage_rate_per_m: float

    def __post_init__(self):
        positive = [
            ("radio.bs_power", self.bs_power_w),
            ("radio.mbs_power", self.mbs_power_w),
            ("radio.sat_power", self.sat_power_w),
            ("radio.access_bandwidth_hz", self.access_bandwidth_hz),
            ("radio.sat_bandwidth_hz", self.sat_bandwidth_hz),
            ("radio.noise", self.noise_w),
            ("radio.cochannel", self.cochannel_w),
            ("radio.rician_coeff", self.rician_coeff),
            ("radio.main_tx_gain", self.main_tx_gain),
            ("radio.side_tx_gain", self.side_tx_gain),
            ("radio.main_rx_gain", self.main_rx_gain),
            ("radio.side_rx_gain", self.side_rx_gain),
        ]
        for path, value in positive:
            if not value > 0:
                raise ScenarioError(f"{path}: must be strictly positive, got {value}")
        for path, bw in (
            ("radio.tx_beamwidth", self.tx_beamwidth_rad),
            ("radio.rx_beamwidth", self.rx_beamwidth_rad),
        ):
            if not (0.0 < bw <= 2.0 * np.pi):
                raise ScenarioError(f"{path}: must lie in (0, 2*pi], got {bw}")
        if self.main_tx_gain < self.side_tx_gain:
            raise ScenarioError("radio.main_tx_gain: main-lobe gain below side-lobe gain")
        if self.main_rx_gain < self.side_rx_gain:
            raise ScenarioError("radio.main_rx_gain: main-lobe gain below side-lobe gain")
        if self.blockage_rate_per_m > 0:
            raise ScenarioError(
                f"radio.blockage_rate_per_m: must be <= 0, got {self.blockage_rate_per_m}"
            )


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Scenario:
    """A fully validated, immutable network instance.

    Arrays are read-only; BS index order is small cells first, then drones.
    """

    user_pos: np.ndarray          # (U, 3) meters
    bs_pos: np.ndarray            # (N, 3) meters, SBS then DBS
    bs_is_drone: np.ndarray       # (N,) bool
    mbs_pos: np.ndarray           # (M, 3) meters
    satellite_enabled: bool
    sat_initial: np.ndarray       # (3,) meters
    sat_speed: float              # m/s along +x

    tau: float                    # slot length, s
    num_slots: int                # T
    effective_slots: np.ndarray   # (N,) int, T_n

    data_demand: np.ndarray       # (U,) bits
    user_rate_floor: np.ndarray   # (U,) bit/s
    bs_rate_floor: np.ndarray     # (N,) bit/s

    radio: RadioParams
    seed: int

    # Frozen stochastic channel draws, static over the whole duration.
    chi_bs_user: np.ndarray       # (N, U) dB
    chi_mbs_user: np.ndarray      # (M, U) dB
    chi_bs_bs: np.ndarray         # (N, N) dB
    chi_mbs_bs: np.ndarray        # (M, N) dB
    chi_sat_bs: np.ndarray        # (N,) dB
    los_bs_user: np.ndarray       # (N, U) bool
    los_mbs_user: np.ndarray      # (M, U) bool
    los_bs_bs: np.ndarray         # (N, N) bool
    los_mbs_bs: np.ndarray        # (M, N) bool

    # Sampling region for user placement, kept so instances can be re-sampled.
    user_region: tuple = (0.0, 0.0, 0.0, 0.0)
    user_height: float = 1.5

    @property
    def num_users(self) -> int:
        return self.user_pos.shape[0]

    @property
    def num_bs(self) -> int:
        return self.bs_pos.shape[0]

    @property
    def num_sbs(self) -> int:
        return int(np.sum(~self.bs_is_drone))

    @property
    def num_drones(self) -> int:
        return int(np.sum(self.bs_is_drone))

    @property
    def num_mbs(self) -> int:
        return self.mbs_pos.shape[0]

    @property
    def duration(self) -> float:
        return self.num_slots * self.tau

    def satellite_position(self, t) -> np.ndarray:
        """Satellite position at slot t: initial + (speed * t * tau) along x."""
        t = np.asarray(t, dtype=float)
        pos = np.zeros(np.shape(t) + (3,))
        pos[...] = self.sat_initial
        pos[..., 0] = self.sat_initial[0] + self.sat_speed * t * self.tau
        return pos

    def __post_init__(self):
        for name in (
            "user_pos", "bs_pos", "bs_is_drone", "mbs_pos", "sat_initial",
            "effective_slots", "data_demand", "user_rate_floor", "bs_rate_floor",
            "chi_bs_user", "chi_mbs_user", "chi_bs_bs", "chi_mbs_bs", "chi_sat_bs",
            "los_bs_user", "los_mbs_user", "los_bs_bs", "los_mbs_bs",
        ):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        self._validate()

    def _validate(self):
        if self.num_users < 1:
            raise ScenarioError("nodes.users: at least one user required")
        if self.num_bs < 1:
            raise ScenarioError("nodes: at least one BS (small cell or drone) required")
        if self.num_mbs < 1 and not self.satellite_enabled:
            raise ScenarioError(
                "nodes: at least one backhaul source required (macro cell or satellite)"
            )
        drones = self.bs_pos[self.bs_is_drone]
        if drones.size and np.any(drones[:, 2] <= 0):
            raise ScenarioError("nodes.drones.positions: drone altitude must be > 0")
        if self.num_slots < 1:
            raise ScenarioError("time.slots: T must be >= 1")
        if not self.tau > 0:
            raise ScenarioError("time.tau: must be strictly positive")
        eff = self.effective_slots
        if np.any(eff <= 0):
            raise ScenarioError("nodes.drones.hover_times: effective slots T_n must be > 0")
        if np.any(eff > self.num_slots):
            bad = int(np.argmax(eff > self.num_slots))
            raise ScenarioError(
                f"nodes: effective slots T_n={int(eff[bad])} exceeds T={self.num_slots} at BS {bad}"
            )
        for path, arr in (
            ("market.data_demand_bits", self.data_demand),
            ("market.user_rate_floor_bps", self.user_rate_floor),
            ("market.bs_rate_floor_bps", self.bs_rate_floor),
        ):
            if np.any(np.asarray(arr) <= 0):
                raise ScenarioError(f"{path}: must be strictly positive")
        if self.satellite_enabled and self.sat_initial[2] <= 0:
            raise ScenarioError("nodes.satellite.initial_position: altitude must be > 0")


def _get(doc: dict, path: str, default=None, required=False):
    node = doc
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            if required:
                raise ScenarioError(f"{path}: missing required key")
            return default
        node = node[key]
    return node


_RADIO_DEFAULTS = {
    # Paper-reported powers/bandwidth/noise plus representative 28 GHz fit
    # values and a 550 km LEO geometry for the remaining free parameters.
    "bs_power_dbm": 20.0,
    "mbs_power_dbm": 43.0,
    "sat_power_dbw": 9.23,
    "access_bandwidth_hz": 56e6,
    "sat_bandwidth_hz": 1e9,
    "noise_db": -104.0,
    "cochannel_db": -93.4646,   # 10.5354 dB above the noise floor
    "rician_coeff": 1.0,
    "pathloss_exponent": 2.0,
    "pathloss_intercept_db": 61.4,
    "shadow_sigma_db": 5.8,
    "main_tx_gain_db": 18.0,
    "side_tx_gain_db": -2.0,
    "main_rx_gain_db": 18.0,
    "side_rx_gain_db": -2.0,
    "tx_beamwidth_deg": 30.0,
    "rx_beamwidth_deg": 30.0,
    "blockage_rate_per_m": -0.005,
}

_MARKET_DEFAULTS = {
    "data_demand_bits": 50e6,
    "user_rate_floor_bps": 10e6,
    "bs_rate_floor_bps": 200e6,
}

_SAT_DEFAULTS = {
    "enabled": True,
    "initial_position": [0.0, 0.0, 550e3],
    "speed": 7500.0,
}


def _radio_from_doc(doc: dict) -> RadioParams:
    r = dict(_RADIO_DEFAULTS)
    r.update(_get(doc, "radio", {}) or {})
    return RadioParams(
        bs_power_w=float(dbm_to_watt(r["bs_power_dbm"])),
        mbs_power_w=float(dbm_to_watt(r["mbs_power_dbm"])),
        sat_power_w=float(dbw_to_watt(r["sat_power_dbw"])),
        access_bandwidth_hz=float(r["access_bandwidth_hz"]),
        sat_bandwidth_hz=float(r["sat_bandwidth_hz"]),
        noise_w=float(db_to_linear(r["noise_db"])),
        cochannel_w=float(db_to_linear(r["cochannel_db"])),
        rician_coeff=float(r["rician_coeff"]),
        pathloss_exponent=float(r["pathloss_exponent"]),
        pathloss_intercept_db=float(r["pathloss_intercept_db"]),
        shadow_sigma_db=float(r["shadow_sigma_db"]),
        main_tx_gain=float(db_to_linear(r["main_tx_gain_db"])),
        side_tx_gain=float(db_to_linear(r["side_tx_gain_db"])),
        main_rx_gain=float(db_to_linear(r["main_rx_gain_db"])),
        side_rx_gain=float(db_to_linear(r["side_rx_gain_db"])),
        tx_beamwidth_rad=float(np.deg2rad(r["tx_beamwidth_deg"])),
        rx_beamwidth_rad=float(np.deg2rad(r["rx_beamwidth_deg"])),
        blockage_rate_per_m=float(r["blockage_rate_per_m"]),
    )


def _time_from_doc(doc: dict):
    tau = float(_get(doc, "time.tau", 0.01))
    slots = _get(doc, "time.slots")
    duration = _get(doc, "time.duration")
    if slots is None and duration is None:
        slots = 100
    if slots is None:
        ratio = float(duration) / tau
        slots = int(round(ratio))
        if abs(slots * tau - float(duration)) > 1e-9 * max(1.0, float(duration)):
            raise ScenarioError(
                f"time.duration: {duration} is not an integer multiple of tau={tau}"
            )
    slots = int(slots)
    if duration is not None and abs(slots * tau - float(duration)) > 1e-9 * max(
        1.0, float(duration)
    ):
        raise ScenarioError("time: duration, tau, and slots are mutually inconsistent")
    return tau, slots


def _positions(doc, path, default=()):
    raw = _get(doc, path, list(default))
    arr = np.asarray(raw, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 3))
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ScenarioError(f"{path}: expected a list of 3D coordinates")
    return arr


def _draw_channel_state(rng, user_pos, bs_pos, bs_is_drone, mbs_pos, radio):
    """Draw frozen shadow fading and LoS indicators for every terrestrial link."""
    N, U, M = bs_pos.shape[0], user_pos.shape[0], mbs_pos.shape[0]
    s = radio.shadow_sigma_db
    chi = {
        "chi_bs_user": rng.normal(0.0, s, (N, U)),
        "chi_mbs_user": rng.normal(0.0, s, (M, U)),
        "chi_bs_bs": rng.normal(0.0, s, (N, N)),
        "chi_mbs_bs": rng.normal(0.0, s, (M, N)),
        "chi_sat_bs": rng.normal(0.0, s, (N,)),
    }

    def los(tx_pos, rx_pos, always_mask=None):
        d = np.linalg.norm(tx_pos[:, None, :] - rx_pos[None, :, :], axis=-1)
        prob = np.exp(radio.blockage_rate_per_m * d)
        draw = rng.random(d.shape) < prob
        if always_mask is not None:
            draw[always_mask] = True
        return draw

    # Drone transmitters always have LoS paths; satellite links likewise.
    chi["los_bs_user"] = los(bs_pos, user_pos, always_mask=bs_is_drone)
    chi["los_mbs_user"] = los(mbs_pos, user_pos)
    chi["los_bs_bs"] = los(bs_pos, bs_pos, always_mask=bs_is_drone)
    chi["los_mbs_bs"] = los(mbs_pos, bs_pos)
    return chi


def load_scenario(document) -> Scenario:
    """Build a validated Scenario from a config document.

    `document` may be a path to a YAML file, a YAML string, or an
    already-parsed mapping. Identical documents and seeds produce
    bit-identical scenarios.
    """
    if isinstance(document, dict):
        doc = document
    else:
        text = document
        try:
            with open(document, "r") as fh:
                text = fh.read()
        except (OSError, TypeError):
            pass
        doc = yaml.safe_load(text)
    if not isinstance(doc, dict):
        raise ScenarioError("config: document must be a mapping")

    seed = int(_get(doc, "seed", 0))
    rng = np.random.default_rng(seed)

    sbs_pos = _positions(doc, "nodes.small_cells.positions")
    drone_pos = _positions(doc, "nodes.drones.positions")
    hover = np.asarray(_get(doc, "nodes.drones.hover_times", []), dtype=float)
    if hover.shape[0] != drone_pos.shape[0]:
        raise ScenarioError("nodes.drones.hover_times: one hover time per drone required")
    if np.any(hover <= 0):
        raise ScenarioError("nodes.drones.hover_times: must be strictly positive")
    mbs_pos = _positions(doc, "nodes.macro_cells.positions")

    sat = dict(_SAT_DEFAULTS)
    sat.update(_get(doc, "nodes.satellite", {}) or {})
    sat_enabled = bool(sat["enabled"])
    sat_initial = np.asarray(sat["initial_position"], dtype=float)
    if sat_initial.shape != (3,):
        raise ScenarioError("nodes.satellite.initial_position: expected a 3D coordinate")
    sat_speed = float(sat["speed"])

    users = _get(doc, "nodes.users", None)
    if users is None:
        raise ScenarioError("nodes.users: missing required key")
    region = tuple(float(v) for v in users.get("region", (0.0, 0.0, 0.0, 0.0)))
    height = float(users.get("height", 1.5))
    if "positions" in users:
        user_pos = _positions(doc, "nodes.users.positions")
    else:
        count = users.get("count")
        if count is None:
            raise ScenarioError("nodes.users.count: missing required key")
        count = int(count)
        if len(region) != 4:
            raise ScenarioError("nodes.users.region: expected [x0, y0, x1, y1]")
        xy = rng.uniform(
            low=[region[0], region[1]], high=[region[2], region[3]], size=(count, 2)
        )
        user_pos = np.column_stack([xy, np.full(count, height)])

    tau, slots = _time_from_doc(doc)

    bs_pos = np.vstack([sbs_pos, drone_pos]) if (sbs_pos.size or drone_pos.size) else np.zeros((0, 3))
    bs_is_drone = np.concatenate(
        [np.zeros(sbs_pos.shape[0], bool), np.ones(drone_pos.shape[0], bool)]
    )
    eff = np.full(bs_pos.shape[0], slots, dtype=int)
    eff[bs_is_drone] = np.floor(hover / tau).astype(int)

    radio = _radio_from_doc(doc)

    m = dict(_MARKET_DEFAULTS)
    m.update(_get(doc, "market", {}) or {})
    U, N = user_pos.shape[0], bs_pos.shape[0]
    demand = np.broadcast_to(np.asarray(m["data_demand_bits"], float), (U,)).copy()
    ufloor = np.broadcast_to(np.asarray(m["user_rate_floor_bps"], float), (U,)).copy()
    nfloor = np.broadcast_to(np.asarray(m["bs_rate_floor_bps"], float), (N,)).copy()

    draws = _draw_channel_state(rng, user_pos, bs_pos, bs_is_drone, mbs_pos, radio)

    return Scenario(
        user_pos=user_pos,
        bs_pos=bs_pos,
        bs_is_drone=bs_is_drone,
        mbs_pos=mbs_pos,
        satellite_enabled=sat_enabled,
        sat_initial=sat_initial,
        sat_speed=sat_speed,
        tau=tau,
        num_slots=slots,
        effective_slots=eff,
        data_demand=demand,
        user_rate_floor=ufloor,
        bs_rate_floor=nfloor,
        radio=radio,
        seed=seed,
        user_region=region,
        user_height=height,
        **draws,
    )


def sample_scenario(template: Scenario, seed: int) -> Scenario:
    """Re-sample user positions and frozen channel draws from a new seed.

    User positions are uniform in the template's configured region; shadow
    fading and LoS indicators are redrawn and frozen. Reproducible: the same
    (template, seed) pair always yields the same Scenario.
    """
    rng = np.random.default_rng(int(seed))
    x0, y0, x1, y1 = template.user_region
    count = template.num_users
    xy = rng.uniform(low=[x0, y0], high=[x1, y1], size=(count, 2))
    user_pos = np.column_stack([xy, np.full(count, template.user_height)])
    draws = _draw_channel_state(
        rng, user_pos, template.bs_pos, template.bs_is_drone,
        template.mbs_pos, template.radio,
    )
    return dataclasses.replace(template, user_pos=user_pos, seed=int(seed), **draws)

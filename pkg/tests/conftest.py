"""Shared fixtures: the desk scenario, a deterministic micro scenario for
unit tests, and the frozen tiny-instance generator used by the oracle and
acceptance tests."""

from pathlib import Path

import numpy as np
import pytest
import yaml

from skymarket.channel import build_rate_table
from skymarket.market import PriceState
from skymarket.scenario import load_scenario

DESK_PATH = Path(__file__).resolve().parents[1] / "configs" / "desk.yaml"


def load_desk_doc() -> dict:
    with open(DESK_PATH, "r") as fh:
        return yaml.safe_load(fh)


@pytest.fixture()
def desk_doc():
    return load_desk_doc()


@pytest.fixture(scope="session")
def desk_scenario():
    return load_scenario(load_desk_doc())


@pytest.fixture(scope="session")
def desk_rate_table(desk_scenario):
    return build_rate_table(desk_scenario)


def micro_doc(seed: int = 0) -> dict:
    """Fixed small scenario for unit tests: 2 users, 1 small cell + 1 drone,
    1 MBS, satellite on, 3 slots."""
    return {
        "seed": seed,
        "nodes": {
            "users": {"count": 2, "region": [-80.0, -80.0, 80.0, 80.0], "height": 1.5},
            "small_cells": {"positions": [[-40.0, -40.0, 10.0]]},
            "drones": {"positions": [[40.0, 40.0, 80.0]], "hover_times": [0.03]},
            "macro_cells": {"positions": [[0.0, 0.0, 25.0]]},
            "satellite": {
                "enabled": True,
                "initial_position": [0.0, 0.0, 550000.0],
                "speed": 7500.0,
            },
        },
        "time": {"tau": 0.01, "slots": 3},
        "radio": {"bs_power_dbm": 30.0},
        "market": {
            "data_demand_bits": 1.0e4,
            "user_rate_floor_bps": 1.0e8,
            "bs_rate_floor_bps": 5.0e8,
        },
    }


@pytest.fixture(scope="session")
def micro_scenario():
    return load_scenario(micro_doc())


@pytest.fixture(scope="session")
def micro_rate_table(micro_scenario):
    return build_rate_table(micro_scenario)


def tiny_doc(seed: int) -> dict:
    """Frozen random tiny-instance generator: U <= 3, N <= 2 (mixed small
    cells and drones), M = 1, T <= 4, satellite on. Deterministic in `seed`."""
    rng = np.random.default_rng(10_000 + seed)
    U = int(rng.integers(1, 4))
    N = int(rng.integers(1, 3))
    T = int(rng.integers(2, 5))
    n_drone = int(rng.integers(0, N + 1))
    sbs, drones, hovers = [], [], []
    for _ in range(N - n_drone):
        sbs.append([float(rng.uniform(-60, 60)), float(rng.uniform(-60, 60)), 10.0])
    for _ in range(n_drone):
        drones.append([float(rng.uniform(-60, 60)), float(rng.uniform(-60, 60)), 80.0])
        hovers.append(float(T) * 0.01)
    return {
        "seed": int(rng.integers(0, 2 ** 31)),
        "nodes": {
            "users": {"count": U, "region": [-80.0, -80.0, 80.0, 80.0], "height": 1.5},
            "small_cells": {"positions": sbs},
            "drones": {"positions": drones, "hover_times": hovers},
            "macro_cells": {"positions": [[0.0, 0.0, 25.0]]},
            "satellite": {
                "enabled": True,
                "initial_position": [0.0, 0.0, 550000.0],
                "speed": 7500.0,
            },
        },
        "time": {"tau": 0.01, "slots": T},
        "radio": {"bs_power_dbm": 30.0},
        "market": {
            "data_demand_bits": 1.0e4,
            "user_rate_floor_bps": 1.0e8,
            "bs_rate_floor_bps": 5.0e8,
        },
    }


def random_prices(scenario, rng, scale: float = 1.0) -> PriceState:
    """Random nonnegative dual state for property tests."""
    prices = PriceState.zeros(scenario)
    prices.lam[:] = rng.uniform(0.0, scale, prices.lam.shape)
    prices.varsigma[:] = rng.uniform(0.0, scale, prices.varsigma.shape)
    prices.xi[:] = rng.uniform(0.0, scale, prices.xi.shape)
    return prices

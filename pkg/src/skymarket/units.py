"""dB/linear conversions. All dB values live at the config boundary only."""

import numpy as np


def db_to_linear(x_db):
    """Convert a dB value (power ratio) to linear scale."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    """Convert a linear power ratio to dB. Requires x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("linear_to_db requires strictly positive input")
    return 10.0 * np.log10(x)


def dbm_to_watt(x_dbm):
    """Convert dBm to watts."""
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


def dbw_to_watt(x_dbw):
    """Convert dBW to watts."""
    return 10.0 ** (np.asarray(x_dbw, dtype=float) / 10.0)

"""Channel model: antenna patterns, link gains, rate tables, and the
first-order satellite-rate tracking."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skymarket.channel import (
    antenna_gain,
    average_interferer_gain,
    build_rate_table,
    channel_gain,
    estimated_sat_rates,
    satellite_rate_drift,
    shannon_rate,
    static_interference,
)


class TestAntennaGain:
    def test_main_lobe_inside_half_beamwidth(self):
        assert antenna_gain(0.1, 0.5, 10.0, 0.5) == 10.0

    def test_boundary_is_main_lobe(self):
        assert antenna_gain(0.25, 0.5, 10.0, 0.5) == 10.0

    def test_side_lobe_outside(self):
        assert antenna_gain(0.2500001, 0.5, 10.0, 0.5) == 0.5

    def test_rejects_negative_angle(self):
        with pytest.raises(ValueError):
            antenna_gain(-0.1, 0.5, 10.0, 0.5)

    def test_rejects_bad_beamwidth(self):
        for bw in (0.0, -1.0, 2.0 * math.pi + 1e-6):
            with pytest.raises(ValueError):
                antenna_gain(0.1, bw, 10.0, 0.5)

    def test_rejects_nonpositive_gains(self):
        with pytest.raises(ValueError):
            antenna_gain(0.1, 0.5, 0.0, 0.5)

    @settings(max_examples=200, deadline=None)
    @given(
        angle=st.floats(0.0, 2.0 * math.pi),
        bw=st.floats(1e-6, 2.0 * math.pi),
    )
    def test_output_is_one_of_the_two_gains(self, angle, bw):
        g = antenna_gain(angle, bw, 7.0, 0.3)
        assert g == (7.0 if angle <= bw / 2.0 else 0.3)


class TestAverageInterfererGain:
    def test_frozen_value_for_default_pattern(self):
        # 30 degree beamwidth, 18 dB main lobe, -2 dB side lobe.
        got = average_interferer_gain(math.radians(30.0), 10.0 ** 1.8, 10.0 ** -0.2)
        assert got == pytest.approx(5.836355436441788, rel=1e-12)

    def test_full_circle_beam_gives_main(self):
        assert average_interferer_gain(2.0 * math.pi, 9.0, 0.1) == pytest.approx(9.0)

    @settings(max_examples=200, deadline=None)
    @given(bw=st.floats(1e-9, 2.0 * math.pi))
    def test_between_side_and_main(self, bw):
        g = average_interferer_gain(bw, 8.0, 0.2)
        assert 0.2 <= g <= 8.0

    def test_rejects_bad_beamwidth(self):
        with pytest.raises(ValueError):
            average_interferer_gain(0.0, 8.0, 0.2)


class TestShannonRate:
    def test_zero_gain_gives_zero_rate(self):
        assert shannon_rate(1.0, 0.0, 1e-6, 1e-9, 56e6) == 0.0

    def test_known_value(self):
        # SINR of exactly 1 gives one bit per second per hertz.
        assert shannon_rate(2.0, 0.5, 0.5, 0.5, 56e6) == pytest.approx(56e6)

    @settings(max_examples=300, deadline=None)
    @given(
        p=st.floats(1e-6, 1e3),
        g=st.floats(1e-12, 1.0),
        w=st.floats(1e-12, 1e-3),
    )
    def test_monotone_in_power_and_interference(self, p, g, w):
        base = shannon_rate(p, g, w, 1e-9, 56e6)
        assert shannon_rate(2.0 * p, g, w, 1e-9, 56e6) >= base
        assert shannon_rate(p, g, 2.0 * w, 1e-9, 56e6) <= base


class TestChannelGain:
    def test_nlos_gain_is_zero(self, desk_scenario):
        los = desk_scenario.los_bs_user
        nlos = np.argwhere(~los)
        assert nlos.size, "desk instance is expected to contain NLoS links"
        n, u = nlos[0]
        lk = channel_gain(("bs", int(n)), ("user", int(u)), desk_scenario)
        assert lk.gain == 0.0 and not lk.los

    def test_serving_exceeds_interfering(self, desk_scenario):
        los = np.argwhere(desk_scenario.los_bs_user)
        n, u = los[0]
        serving = channel_gain(("bs", int(n)), ("user", int(u)), desk_scenario, serving=True)
        other = channel_gain(("bs", int(n)), ("user", int(u)), desk_scenario, serving=False)
        assert serving.gain > other.gain > 0.0
        assert serving.distance == other.distance

    def test_satellite_distance_uses_slot(self, desk_scenario):
        a = channel_gain(("satellite", 0), ("bs", 0), desk_scenario, t=0)
        b = channel_gain(("satellite", 0), ("bs", 0), desk_scenario, t=10)
        assert b.distance > a.distance
        assert a.los and b.los

    def test_rejects_same_node(self, desk_scenario):
        with pytest.raises(ValueError):
            channel_gain(("bs", 0), ("bs", 0), desk_scenario)

    def test_rejects_unsupported_link(self, desk_scenario):
        with pytest.raises(ValueError):
            channel_gain(("user", 0), ("bs", 0), desk_scenario)

    def test_rejects_unknown_kind(self, desk_scenario):
        with pytest.raises(ValueError):
            channel_gain(("blimp", 0), ("bs", 0), desk_scenario)


class TestStaticInterference:
    def test_shapes(self, desk_scenario):
        terms = static_interference(desk_scenario)
        assert terms.access.shape == (4, 12)
        assert terms.backhaul.shape == (4, 1)
        assert terms.satellite.shape == (4,)

    def test_frozen_values(self, desk_scenario):
        terms = static_interference(desk_scenario)
        assert terms.access[0, 0] == pytest.approx(1.596507951898967e-05, rel=1e-12)
        np.testing.assert_allclose(
            terms.satellite,
            [
                1.1411728332755207e-04,
                3.894413765275135e-05,
                4.7849995463995715e-05,
                3.43579501959216e-06,
            ],
            rtol=1e-12,
        )

    def test_nonnegative(self, desk_scenario):
        terms = static_interference(desk_scenario)
        assert np.all(terms.access >= 0)
        assert np.all(terms.backhaul >= 0)
        assert np.all(terms.satellite >= 0)


class TestRateTable:
    def test_shapes_and_read_only(self, desk_rate_table):
        rt = desk_rate_table
        assert rt.access_rate.shape == (4, 12)
        assert rt.backhaul_rate.shape == (4, 1)
        assert rt.sat_rate.shape == (4, 20)
        with pytest.raises(ValueError):
            rt.access_rate[0, 0] = 1.0

    def test_frozen_access_values(self, desk_rate_table):
        # NLoS link carries zero rate; a LoS drone-to-user link is frozen.
        assert desk_rate_table.access_rate[0, 0] == 0.0
        assert desk_rate_table.access_rate[2, 5] == pytest.approx(
            278179658.69693786, rel=1e-12
        )

    def test_frozen_backhaul_values(self, desk_rate_table):
        np.testing.assert_allclose(
            desk_rate_table.backhaul_rate[:, 0],
            [506258232.8662805, 0.0, 0.0, 0.0],
            rtol=1e-12,
        )

    def test_frozen_satellite_values(self, desk_rate_table):
        assert desk_rate_table.sat_rate[0, 0] == pytest.approx(
            2508533954.4699874, rel=1e-12
        )
        assert desk_rate_table.sat_rate[0, 19] == pytest.approx(
            2508533044.1401067, rel=1e-12
        )

    def test_satellite_rate_decays_when_moving_away(self, desk_scenario, desk_rate_table):
        # The satellite moves along +x; BSs at x <= 0 only see it recede.
        receding = desk_scenario.bs_pos[:, 0] <= 0
        rates = desk_rate_table.sat_rate[receding]
        assert np.all(np.diff(rates, axis=1) < 0)

    def test_disabled_satellite_zeroes_rates(self):
        from skymarket.scenario import load_scenario
        from conftest import micro_doc

        doc = micro_doc()
        doc["nodes"]["satellite"]["enabled"] = False
        rt = build_rate_table(load_scenario(doc))
        assert np.all(rt.sat_rate == 0.0)

    def test_rebuild_is_bit_identical(self, desk_scenario, desk_rate_table):
        rt2 = build_rate_table(desk_scenario)
        np.testing.assert_array_equal(rt2.access_rate, desk_rate_table.access_rate)
        np.testing.assert_array_equal(rt2.sat_rate, desk_rate_table.sat_rate)


class TestSatelliteDrift:
    def test_frozen_value(self, desk_scenario, desk_rate_table):
        got = satellite_rate_drift(0, 1, desk_rate_table, desk_scenario)
        assert got == pytest.approx(-10.319568457840724, rel=1e-12)

    def test_matches_finite_difference(self):
        # With a very short slot the one-slot secant converges to the
        # derivative, so the analytic drift must match it tightly.
        from skymarket.scenario import load_scenario
        from conftest import load_desk_doc

        doc = load_desk_doc()
        doc["time"] = {"tau": 1.0e-4, "slots": 20}
        doc["nodes"]["drones"]["hover_times"] = [1.5e-3, 1.5e-3]
        scen = load_scenario(doc)
        rt = build_rate_table(scen)
        for n in range(scen.num_bs):
            for t in range(1, scen.num_slots):
                exact = rt.sat_rate[n, t] - rt.sat_rate[n, t - 1]
                drift = satellite_rate_drift(n, t, rt, scen)
                assert drift == pytest.approx(exact, rel=1e-2)

    def test_sign_matches_geometry(self, desk_scenario, desk_rate_table):
        # Receding satellite (BS at x <= 0) loses rate every slot.
        for n in np.flatnonzero(desk_scenario.bs_pos[:, 0] <= 0):
            assert satellite_rate_drift(int(n), 1, desk_rate_table, desk_scenario) < 0

    def test_rejects_slot_zero(self, desk_scenario, desk_rate_table):
        with pytest.raises(ValueError):
            satellite_rate_drift(0, 0, desk_rate_table, desk_scenario)

    def test_rejects_disabled_satellite(self):
        from skymarket.scenario import load_scenario
        from conftest import micro_doc

        doc = micro_doc()
        doc["nodes"]["satellite"]["enabled"] = False
        scen = load_scenario(doc)
        rt = build_rate_table(scen)
        with pytest.raises(ValueError):
            satellite_rate_drift(0, 1, rt, scen)


class TestEstimatedSatRates:
    def test_exact_at_slot_zero(self, desk_scenario, desk_rate_table):
        est = estimated_sat_rates(desk_rate_table, desk_scenario)
        np.testing.assert_array_equal(est[:, 0], desk_rate_table.sat_rate[:, 0])

    def test_tracks_exact_rates_closely(self, desk_scenario, desk_rate_table):
        est = estimated_sat_rates(desk_rate_table, desk_scenario)
        rel = np.abs(est - desk_rate_table.sat_rate) / desk_rate_table.sat_rate
        assert np.max(rel) < 1e-2

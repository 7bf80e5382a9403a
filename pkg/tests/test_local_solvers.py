"""Per-agent subproblem solvers: heuristics, exhaustive oracles, and the
persistence-banded exact best responses."""

import numpy as np
import pytest

from skymarket.local_solvers import (
    ENUMERATION_GUARD,
    PRICE_TOL,
    enumerate_agent,
    evaluate_schedule,
    solve_bs,
    solve_mbs,
    solve_satellite,
    solve_user,
    sticky_band,
    sticky_enumerate_agent,
)
from skymarket.market import PriceState, backhaul_prefix_bits, AllocationState
from skymarket.scenario import load_scenario

from conftest import micro_doc, random_prices


@pytest.fixture(scope="module")
def micro(micro_scenario, micro_rate_table):
    return micro_scenario, micro_rate_table


class TestSellers:
    def test_mbs_hand_oracle(self, micro):
        scen, _ = micro
        T = scen.num_slots
        p = PriceState.zeros(scen)
        # Slot 0: BS 1 pays well above cost; slot 1: both below cost.
        p.varsigma[1, 0, 0] = 1.0
        sol = solve_mbs(0, p, scen)
        want = np.zeros((scen.num_bs, T), np.int8)
        want[1, 0] = 1
        np.testing.assert_array_equal(sol.schedule, want)
        assert sol.objective == pytest.approx(1.0 - 1.0 / T)
        assert sol.feasible

    def test_satellite_disabled_sells_nothing(self):
        doc = micro_doc()
        doc["nodes"]["satellite"]["enabled"] = False
        scen = load_scenario(doc)
        p = PriceState.zeros(scen)
        p.xi[:] = 10.0
        sol = solve_satellite(p, scen)
        assert np.all(sol.schedule == 0) and sol.objective == 0.0

    def test_satellite_hand_oracle(self, micro):
        scen, _ = micro
        T = scen.num_slots
        p = PriceState.zeros(scen)
        p.xi[0, :] = 2.0
        sol = solve_satellite(p, scen)
        assert np.all(sol.schedule[0] == 1)
        assert sol.objective == pytest.approx(T * (2.0 - 1.0 / T))

    def test_heuristic_within_band_of_enumerated(self, micro):
        # The production sellers use a sticky argmax with an indifference
        # band, so per slot they give up at most the band width against the
        # exhaustive oracle and never beat it.
        scen, rt = micro
        rng = np.random.default_rng(123)
        T = scen.num_slots
        for _ in range(50):
            p = random_prices(scen, rng, scale=1.5)
            for kind, sol in (
                ("mbs", solve_mbs(0, p, scen)),
                ("satellite", solve_satellite(p, scen)),
            ):
                index = 0 if kind == "mbs" else None
                exact = enumerate_agent(kind, index, p, rt, scen)
                assert sol.objective <= exact.objective + 1e-9
                assert sol.objective >= exact.objective - T * PRICE_TOL - 1e-9


class TestUserSolver:
    def test_one_bs_per_slot(self, micro):
        scen, rt = micro
        rng = np.random.default_rng(7)
        for _ in range(25):
            sol = solve_user(0, random_prices(scen, rng), rt, scen)
            assert np.all(sol.schedule.sum(axis=0) <= 1)

    def test_feasible_at_zero_prices(self, micro):
        scen, rt = micro
        sol = solve_user(0, PriceState.zeros(scen), rt, scen)
        assert sol.feasible

    def test_enumerated_never_worse(self, micro):
        scen, rt = micro
        rng = np.random.default_rng(99)
        for _ in range(40):
            p = random_prices(scen, rng, scale=1.2)
            for u in range(scen.num_users):
                heur = solve_user(u, p, rt, scen)
                exact = enumerate_agent("user", u, p, rt, scen)
                if heur.feasible:
                    # The heuristic schedule lies in the feasible set the
                    # oracle maximizes over.
                    assert exact.feasible
                    assert exact.objective >= heur.objective - 1e-7

    def test_deterministic(self, micro):
        scen, rt = micro
        p = random_prices(scen, np.random.default_rng(3))
        a = solve_user(1, p, rt, scen)
        b = solve_user(1, p, rt, scen)
        np.testing.assert_array_equal(a.schedule, b.schedule)
        assert a.objective == b.objective


class TestBsSolver:
    def _check_structure(self, scen, rt, n, sol):
        rho_n, phi_n, eps_n = sol.schedule
        per_slot = rho_n.sum(axis=0) + phi_n.sum(axis=0) + eps_n
        assert np.all(per_slot <= 1)
        eff = int(scen.effective_slots[n])
        assert np.all(per_slot[eff:] == 0)
        alloc = AllocationState.zeros(scen)
        alloc.rho[n], alloc.phi[n], alloc.epsilon[n] = rho_n, phi_n, eps_n
        prefix = backhaul_prefix_bits(alloc, rt, scen)
        assert np.all(prefix[n] <= 1e-3 + 1e-9)

    def test_structure_on_random_prices(self, micro):
        scen, rt = micro
        rng = np.random.default_rng(11)
        for _ in range(25):
            p = random_prices(scen, rng, scale=1.5)
            for n in range(scen.num_bs):
                self._check_structure(scen, rt, n, solve_bs(n, p, rt, scen))

    def test_enumerated_structure(self, micro):
        scen, rt = micro
        rng = np.random.default_rng(13)
        for _ in range(15):
            p = random_prices(scen, rng, scale=1.5)
            for n in range(scen.num_bs):
                self._check_structure(scen, rt, n, enumerate_agent("bs", n, p, rt, scen))

    def test_enumerated_never_worse(self, micro):
        scen, rt = micro
        rng = np.random.default_rng(17)
        for _ in range(25):
            p = random_prices(scen, rng, scale=1.2)
            for n in range(scen.num_bs):
                heur = solve_bs(n, p, rt, scen)
                exact = enumerate_agent("bs", n, p, rt, scen)
                if heur.feasible:
                    assert exact.feasible
                    assert exact.objective >= heur.objective - 1e-7

    def test_no_satellite_slots_when_disabled(self):
        doc = micro_doc()
        doc["nodes"]["satellite"]["enabled"] = False
        scen = load_scenario(doc)
        from skymarket.channel import build_rate_table

        rt = build_rate_table(scen)
        p = PriceState.zeros(scen)
        for n in range(scen.num_bs):
            for sol in (solve_bs(n, p, rt, scen), enumerate_agent("bs", n, p, rt, scen)):
                _, _, eps_n = sol.schedule
                assert np.all(eps_n == 0)


class TestEnumerationOracle:
    def test_guard_rejects_large_spaces(self, desk_scenario, desk_rate_table):
        # Desk scale: (N+1)^T = 5^20 decision space, far past the guard.
        assert (desk_scenario.num_bs + 1) ** desk_scenario.num_slots > ENUMERATION_GUARD
        with pytest.raises(ValueError, match="enumeration guard"):
            enumerate_agent(
                "user", 0, PriceState.zeros(desk_scenario), desk_rate_table,
                desk_scenario,
            )

    def test_unknown_kind(self, micro):
        scen, rt = micro
        with pytest.raises(ValueError):
            enumerate_agent("relay", 0, PriceState.zeros(scen), rt, scen)

    def test_evaluate_schedule_agrees_with_oracle_value(self, micro):
        scen, rt = micro
        rng = np.random.default_rng(23)
        kinds = (
            [("user", u) for u in range(scen.num_users)]
            + [("bs", n) for n in range(scen.num_bs)]
            + [("mbs", 0), ("satellite", None)]
        )
        for _ in range(20):
            p = random_prices(scen, rng, scale=1.3)
            for kind, idx in kinds:
                exact = enumerate_agent(kind, idx, p, rt, scen)
                ev = evaluate_schedule(kind, idx, exact.schedule, p, rt, scen)
                assert ev.objective == pytest.approx(exact.objective, rel=1e-9, abs=1e-9)
                assert ev.feasible == exact.feasible


class TestPersistence:
    def test_band_ordering(self, micro):
        scen, _ = micro
        # Pecking order: users concede first, then BSs, then MBS, then the
        # satellite; bands widen with agent index within a class.
        assert (
            sticky_band("user", 0, scen)
            < sticky_band("bs", 0, scen)
            < sticky_band("mbs", 0, scen)
            < sticky_band("satellite", None, scen)
        )
        assert sticky_band("user", 0, scen) < sticky_band("user", 1, scen)
        assert sticky_band("bs", 0, scen) < sticky_band("bs", 1, scen)
        with pytest.raises(ValueError):
            sticky_band("relay", 0, scen)

    def test_no_previous_returns_optimum(self, micro):
        scen, rt = micro
        p = random_prices(scen, np.random.default_rng(1))
        pick, best = sticky_enumerate_agent("mbs", 0, p, rt, scen)
        assert pick is best

    def test_keeps_previous_inside_band(self, micro):
        # Margins below the persistence band: the empty previous schedule is
        # within the band of the (sell-everything) optimum, so it sticks.
        scen, _ = micro
        rt = None
        T = scen.num_slots
        p = PriceState.zeros(scen)
        p.varsigma[:, 0, :] = 1.0 / T + 0.01
        prev = np.zeros((scen.num_bs, T), np.int8)
        pick, best = sticky_enumerate_agent("mbs", 0, p, rt, scen, previous=prev)
        assert best.objective == pytest.approx(T * 0.01)
        assert pick.schedule is prev
        assert pick.objective == 0.0

    def test_abandons_previous_outside_band(self, micro):
        scen, _ = micro
        T = scen.num_slots
        p = PriceState.zeros(scen)
        p.varsigma[:, 0, :] = 1.0 / T + 1.0
        prev = np.zeros((scen.num_bs, T), np.int8)
        pick, best = sticky_enumerate_agent("mbs", 0, p, None, scen, previous=prev)
        assert pick is best
        assert pick.objective == pytest.approx(T * 1.0)

    def test_never_sticks_across_feasibility_classes(self, micro):
        scen, rt = micro
        # An infeasible (empty) previous user schedule must not displace a
        # feasible optimum even at zero prices where its objective ties.
        prev = np.zeros((scen.num_bs, scen.num_slots), np.int8)
        p = PriceState.zeros(scen)
        pick, best = sticky_enumerate_agent("user", 0, p, rt, scen, previous=prev)
        assert pick is best
        assert pick.feasible

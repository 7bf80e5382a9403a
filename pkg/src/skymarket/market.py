"""Market state and accounting: allocation/request vectors, dual-variable
(price) state, the five payoff families, the cleared total-payoff objective,
and validators for every constraint family of the allocation problem.

Duals are the canonical price representation; quoted unit prices are
T * dual and exist only for reporting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channel import RateTable
from .scenario import Scenario

# Absolute slack (bits) when checking the backhaul causality prefix sums;
# covers float accumulation only, never a genuine slot of traffic.
CAUSALITY_TOL_BITS = 1e-3


@dataclass
class AllocationState:
    """Binary sell-side schedules (rho, delta, beta) and buy-side requests
    (theta, phi, epsilon). Value semantics: copied between iterations."""

    rho: np.ndarray      # (N, U, T) BS n serves user u at slot t
    delta: np.ndarray    # (N, M, T) MBS m serves BS n at slot t
    beta: np.ndarray     # (N, T)    satellite serves BS n at slot t
    theta: np.ndarray    # (N, U, T) user u requests BS n at slot t
    phi: np.ndarray      # (N, M, T) BS n requests MBS m at slot t
    epsilon: np.ndarray  # (N, T)    BS n requests the satellite at slot t

    @classmethod
    def zeros(cls, scenario: Scenario) -> "AllocationState":
        N, U, M, T = (
            scenario.num_bs, scenario.num_users, scenario.num_mbs,
            scenario.num_slots,
        )
        return cls(
            rho=np.zeros((N, U, T), dtype=np.int8),
            delta=np.zeros((N, M, T), dtype=np.int8),
            beta=np.zeros((N, T), dtype=np.int8),
            theta=np.zeros((N, U, T), dtype=np.int8),
            phi=np.zeros((N, M, T), dtype=np.int8),
            epsilon=np.zeros((N, T), dtype=np.int8),
        )

    def copy(self) -> "AllocationState":
        return AllocationState(
            rho=self.rho.copy(), delta=self.delta.copy(), beta=self.beta.copy(),
            theta=self.theta.copy(), phi=self.phi.copy(), epsilon=self.epsilon.copy(),
        )

    def cleared(self) -> bool:
        return (
            np.array_equal(self.rho, self.theta)
            and np.array_equal(self.delta, self.phi)
            and np.array_equal(self.beta, self.epsilon)
        )


@dataclass
class PriceState:
    """Nonnegative dual variables with heavy-ball momentum memory."""

    lam: np.ndarray       # (N, U, T) access duals
    varsigma: np.ndarray  # (N, M, T) terrestrial backhaul duals
    xi: np.ndarray        # (N, T) satellite duals
    mu1: np.ndarray
    mu2: np.ndarray
    mu3: np.ndarray
    k: int = 0

    @classmethod
    def zeros(cls, scenario: Scenario) -> "PriceState":
        N, U, M, T = (
            scenario.num_bs, scenario.num_users, scenario.num_mbs,
            scenario.num_slots,
        )
        return cls(
            lam=np.zeros((N, U, T)),
            varsigma=np.zeros((N, M, T)),
            xi=np.zeros((N, T)),
            mu1=np.zeros((N, U, T)),
            mu2=np.zeros((N, M, T)),
            mu3=np.zeros((N, T)),
        )

    def copy(self) -> "PriceState":
        return PriceState(
            lam=self.lam.copy(), varsigma=self.varsigma.copy(), xi=self.xi.copy(),
            mu1=self.mu1.copy(), mu2=self.mu2.copy(), mu3=self.mu3.copy(),
            k=self.k,
        )

    def quoted_prices(self, scenario: Scenario):
        """Unit prices q = T * dual, for reporting only."""
        T = scenario.num_slots
        return T * self.lam, T * self.varsigma, T * self.xi


@dataclass(frozen=True)
class PayoffBreakdown:
    user_payoffs: np.ndarray       # (U,)
    bs_buyer_payoffs: np.ndarray   # (N,)
    bs_seller_payoffs: np.ndarray  # (N,)
    mbs_payoffs: np.ndarray        # (M,)
    satellite_payoff: float
    total: float

    def to_dict(self) -> dict:
        return {
            "user_payoffs": self.user_payoffs.tolist(),
            "bs_buyer_payoffs": self.bs_buyer_payoffs.tolist(),
            "bs_seller_payoffs": self.bs_seller_payoffs.tolist(),
            "mbs_payoffs": self.mbs_payoffs.tolist(),
            "satellite_payoff": self.satellite_payoff,
            "total": self.total,
        }


def user_payoff(u, theta, prices: PriceState, rate_table: RateTable,
                scenario: Scenario) -> float:
    """Buyer payoff of user u: normalized rate earned minus price paid."""
    T = scenario.num_slots
    th = theta[:, u, :]
    rate_term = float(np.sum(rate_table.access_rate[:, u, None] * th))
    price_term = float(np.sum(prices.lam[:, u, :] * th))
    return rate_term / (T * scenario.user_rate_floor[u]) - price_term


def bs_buyer_payoff(n, phi, epsilon, prices: PriceState, rate_table: RateTable,
                    scenario: Scenario) -> float:
    """Buyer payoff of BS n over its terrestrial and satellite backhaul requests."""
    T = scenario.num_slots
    ph, ep = phi[n], epsilon[n]
    rate_term = float(np.sum(rate_table.backhaul_rate[n][:, None] * ph))
    rate_term += float(np.sum(rate_table.sat_rate[n] * ep))
    price_term = float(np.sum(prices.varsigma[n] * ph) + np.sum(prices.xi[n] * ep))
    return rate_term / (T * scenario.bs_rate_floor[n]) - price_term


def seller_payoff(kind: str, index, schedule, prices: PriceState,
                  scenario: Scenario) -> float:
    """Seller payoff: revenue at the quoted prices minus the normalized
    energy cost of one unit per allocated slot.

    kind is 'bs', 'mbs', or 'satellite'; `schedule` is the full sell-side
    array of that family (rho, delta, or beta respectively).
    """
    T = scenario.num_slots
    if kind == "bs":
        x = schedule[index]                  # (U, T)
        dual = prices.lam[index]
    elif kind == "mbs":
        x = schedule[:, index, :]            # (N, T)
        dual = prices.varsigma[:, index, :]
    elif kind == "satellite":
        x = schedule                         # (N, T)
        dual = prices.xi
    else:
        raise ValueError(f"unknown seller kind {kind!r}")
    return float(np.sum(dual * x) - np.sum(x) / T)


def payoff_breakdown(alloc: AllocationState, prices: PriceState,
                     rate_table: RateTable, scenario: Scenario) -> PayoffBreakdown:
    U, N, M = scenario.num_users, scenario.num_bs, scenario.num_mbs
    users = np.array([
        user_payoff(u, alloc.theta, prices, rate_table, scenario) for u in range(U)
    ])
    buyers = np.array([
        bs_buyer_payoff(n, alloc.phi, alloc.epsilon, prices, rate_table, scenario)
        for n in range(N)
    ])
    sellers = np.array([
        seller_payoff("bs", n, alloc.rho, prices, scenario) for n in range(N)
    ])
    mbs = np.array([
        seller_payoff("mbs", m, alloc.delta, prices, scenario) for m in range(M)
    ])
    sat = seller_payoff("satellite", None, alloc.beta, prices, scenario)
    total = float(users.sum() + buyers.sum() + sellers.sum() + mbs.sum() + sat)
    return PayoffBreakdown(
        user_payoffs=users, bs_buyer_payoffs=buyers, bs_seller_payoffs=sellers,
        mbs_payoffs=mbs, satellite_payoff=sat, total=total,
    )


def total_payoff(alloc: AllocationState, rate_table: RateTable,
                 scenario: Scenario) -> float:
    """Price-free total payoff of a cleared allocation: rate terms normalized
    by T times the QoS floor, minus 1/T per allocated slot."""
    if not alloc.cleared():
        raise ValueError("total payoff is defined only on cleared allocations")
    T = scenario.num_slots
    ufloor = scenario.user_rate_floor
    nfloor = scenario.bs_rate_floor
    access = np.sum(
        rate_table.access_rate[:, :, None] * alloc.theta / ufloor[None, :, None]
    )
    backhaul = np.sum(
        rate_table.backhaul_rate[:, :, None] * alloc.phi / nfloor[:, None, None]
    )
    sat = np.sum(rate_table.sat_rate * alloc.epsilon / nfloor[:, None])
    slots = np.sum(alloc.rho) + np.sum(alloc.delta) + np.sum(alloc.beta)
    return float((access + backhaul + sat) / T - slots / T)


# --- constraint checking -----------------------------------------------------

_FAMILIES = tuple("abcdefghijklmnopqrs")


@dataclass
class ConstraintReport:
    """Per-family pass/fail with the first violating index (or None)."""

    results: dict = field(default_factory=dict)

    def ok(self, *families) -> bool:
        families = families or _FAMILIES
        return all(self.results[f][0] for f in families)

    def violated(self):
        return [f for f in _FAMILIES if not self.results[f][0]]

    def to_json(self) -> str:
        payload = {
            f: {"passed": bool(ok), "first_violation": detail}
            for f, (ok, detail) in self.results.items()
        }
        return json.dumps(payload, indent=2)


def _first_index(mask) -> tuple | None:
    idx = np.argwhere(mask)
    return tuple(int(v) for v in idx[0]) if idx.size else None


def backhaul_prefix_bits(alloc: AllocationState, rate_table: RateTable,
                         scenario: Scenario) -> np.ndarray:
    """(N, T) running balance of access bits sent minus backhaul bits
    received; causality requires every entry <= 0."""
    tau = scenario.tau
    out = np.sum(rate_table.access_rate[:, :, None] * alloc.rho, axis=1)   # (N, T)
    inc = np.sum(rate_table.backhaul_rate[:, :, None] * alloc.phi, axis=1)
    inc = inc + rate_table.sat_rate * alloc.epsilon
    return np.cumsum((out - inc) * tau, axis=1)


def check_constraints(alloc: AllocationState, rate_table: RateTable,
                      scenario: Scenario) -> ConstraintReport:
    """Evaluate every constraint family; violations are reported, not raised."""
    T = scenario.num_slots
    tau = scenario.tau
    eff = scenario.effective_slots
    t_idx = np.arange(T)
    r = {}

    # (a) per-user bit demand over the duration.
    user_bits = np.sum(rate_table.access_rate[:, :, None] * alloc.theta, axis=(0, 2)) * tau
    bad = user_bits < scenario.data_demand - 1e-9
    r["a"] = (not bad.any(), _first_index(bad))

    # (b) a BS slot is either one access transmission or one backhaul reception.
    per_slot = (
        alloc.rho.sum(axis=1) + alloc.phi.sum(axis=1) + alloc.epsilon
    )  # (N, T)
    bad = per_slot > 1
    r["b"] = (not bad.any(), _first_index(bad))

    # (c) causality: cumulative access output never exceeds backhaul input.
    prefix = backhaul_prefix_bits(alloc, rate_table, scenario)
    bad = prefix > CAUSALITY_TOL_BITS
    r["c"] = (not bad.any(), _first_index(bad))

    # (d)-(f) slot budgets.
    bad = alloc.rho.sum(axis=(1, 2)) > eff
    r["d"] = (not bad.any(), _first_index(bad))
    bad = alloc.delta.sum(axis=(0, 2)) > T
    r["e"] = (not bad.any(), _first_index(bad))
    r["f"] = (alloc.beta.sum() <= T, None if alloc.beta.sum() <= T else ())

    # (g)-(j) per-slot exclusivity.
    bad = alloc.theta.sum(axis=0) > 1          # (U, T)
    r["g"] = (not bad.any(), _first_index(bad))
    bad = alloc.phi.sum(axis=1) + alloc.epsilon > 1  # (N, T)
    r["h"] = (not bad.any(), _first_index(bad))
    bad = alloc.delta.sum(axis=0) > 1          # (M, T)
    r["i"] = (not bad.any(), _first_index(bad))
    bad = alloc.beta.sum(axis=0) > 1           # (T,)
    r["j"] = (not bad.any(), _first_index(bad))

    # (k)-(m) effective-time masks on the BS side.
    late = t_idx[None, :] >= eff[:, None]      # (N, T) slots beyond T_n
    bad = (alloc.rho.sum(axis=1) > 0) & late
    r["k"] = (not bad.any(), _first_index(bad))
    bad = (alloc.phi.sum(axis=1) > 0) & late
    r["l"] = (not bad.any(), _first_index(bad))
    bad = (alloc.epsilon > 0) & late
    r["m"] = (not bad.any(), _first_index(bad))

    # (n)-(o) average-rate QoS floors.
    user_rate = np.sum(rate_table.access_rate[:, :, None] * alloc.theta, axis=(0, 2)) / T
    bad = user_rate < scenario.user_rate_floor - 1e-9
    r["n"] = (not bad.any(), _first_index(bad))
    bs_rate = (
        np.sum(rate_table.backhaul_rate[:, :, None] * alloc.phi, axis=(1, 2))
        + np.sum(rate_table.sat_rate * alloc.epsilon, axis=1)
    ) / T
    bad = bs_rate < scenario.bs_rate_floor - 1e-9
    r["o"] = (not bad.any(), _first_index(bad))

    # (p)-(r) binary ranges.
    def binary(arrs):
        for a in arrs:
            m = (a != 0) & (a != 1)
            if m.any():
                return False, _first_index(m)
        return True, None

    r["p"] = binary([alloc.rho, alloc.theta])
    r["q"] = binary([alloc.delta, alloc.phi])
    r["r"] = binary([alloc.beta, alloc.epsilon])

    # (s) market clearance.
    r["s"] = (alloc.cleared(), None)

    return ConstraintReport(results=r)


def is_walrasian_equilibrium(alloc: AllocationState, prices: PriceState,
                             rate_table: RateTable, scenario: Scenario,
                             tol: float = 1e-9) -> bool:
    """True iff the allocation clears exactly and every buyer and seller slice
    is payoff-maximal at the given prices (checked against the per-agent
    solvers)."""
    from . import local_solvers

    if not alloc.cleared():
        return False

    def close(value, best):
        return value >= best - tol * max(1.0, abs(best))

    for u in range(scenario.num_users):
        best = local_solvers.solve_user(u, prices, rate_table, scenario)
        value = user_payoff(u, alloc.theta, prices, rate_table, scenario)
        if not close(value, best.objective):
            return False
    for n in range(scenario.num_bs):
        best = local_solvers.solve_bs(n, prices, rate_table, scenario)
        value = (
            bs_buyer_payoff(n, alloc.phi, alloc.epsilon, prices, rate_table, scenario)
            + seller_payoff("bs", n, alloc.rho, prices, scenario)
        )
        if not close(value, best.objective):
            return False
    for m in range(scenario.num_mbs):
        best = local_solvers.solve_mbs(m, prices, scenario)
        if not close(
            seller_payoff("mbs", m, alloc.delta, prices, scenario), best.objective
        ):
            return False
    if scenario.satellite_enabled:
        best = local_solvers.solve_satellite(prices, scenario)
        if not close(
            seller_payoff("satellite", None, alloc.beta, prices, scenario),
            best.objective,
        ):
            return False
    return True

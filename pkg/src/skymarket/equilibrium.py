"""Outer dual iteration and baselines.

Each iteration solves every agent subproblem at the current prices, measures
the market clearance violations, and updates the three dual families with a
normalized-direction heavy-ball step. Convergence is declared after a
configurable number of consecutive exactly-cleared iterations, and the
resulting allocation is re-verified as a Walrasian equilibrium.

Also provides the comparison baselines: plain subgradient (momentum forced
to zero), uniformly random cleared allocation, and exhaustive centralized
search at tiny scale.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import local_solvers, market
from .channel import RateTable, build_rate_table
from .market import AllocationState, PriceState
from .scenario import Scenario

_METHODS = ("heavy_ball", "subgradient", "random", "brute_force")


@dataclass(frozen=True)
class SolverConfig:
    method: str = "heavy_ball"
    step0: float = 0.1
    step_schedule: str = "sqrt"          # pi0/sqrt(k) ("sqrt") or pi0/k ("linear")
    momentum_coefficient: float = 1.5
    max_iters: int = 2000
    clearance_patience: int = 3
    satellite_rate_mode: str = "exact"
    # "heuristic" solves agent subproblems with the banded greedy solvers;
    # "enumerate" uses exhaustive per-agent best responses with persistence
    # bands (tiny instances only, see local_solvers.sticky_enumerate_agent)
    # and multi-start clearance search: each cleared fixed point is recorded,
    # the search restarts, and the best cleared allocation is returned. A
    # clearance whose schedules are all exact best responses is a certified
    # Walrasian equilibrium and stops the search immediately.
    local_mode: str = "heuristic"
    price_init: str = "cap"              # cap | midpoint | zeros
    # Stagnation restarts: every `restart_every` iterations, if the smallest
    # violation count seen in that stretch did not improve on the previous
    # stretch, prices are reset to their running average over the last
    # `restart_window` iterations, momentum is cleared, and the step schedule
    # restarts with step0 scaled by `restart_shrink`. A cycling price
    # trajectory orbits the clearing point, so its time average is a better
    # starting point than any single iterate. 0 disables restarts.
    restart_every: int = 400
    restart_window: int = 60
    restart_shrink: float = 0.5
    parallel: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.step0 > 0:
            raise ValueError("step0 must be > 0")
        if self.step_schedule not in ("sqrt", "linear"):
            raise ValueError(f"unknown step schedule {self.step_schedule!r}")
        if self.max_iters < 1 or self.clearance_patience < 1:
            raise ValueError("max_iters and clearance_patience must be >= 1")
        if self.price_init not in ("cap", "midpoint", "zeros"):
            raise ValueError(f"unknown price_init {self.price_init!r}")
        if self.local_mode not in ("heuristic", "enumerate"):
            raise ValueError(f"unknown local_mode {self.local_mode!r}")
        if self.restart_every < 0 or self.restart_window < 1:
            raise ValueError("restart_every must be >= 0 and restart_window >= 1")
        if not 0.0 < self.restart_shrink <= 1.0:
            raise ValueError("restart_shrink must be in (0, 1]")

    def step_size(self, k: int) -> float:
        if self.step_schedule == "sqrt":
            return self.step0 / np.sqrt(k)
        return self.step0 / k


@dataclass
class ViolationVectors:
    """Clearance violations: request minus offer, entries in {-1, 0, 1}."""

    s1: np.ndarray   # theta - rho
    s2: np.ndarray   # phi - delta
    s3: np.ndarray   # epsilon - beta

    @classmethod
    def from_alloc(cls, alloc: AllocationState) -> "ViolationVectors":
        return cls(
            s1=(alloc.theta - alloc.rho).astype(np.int64),
            s2=(alloc.phi - alloc.delta).astype(np.int64),
            s3=(alloc.epsilon - alloc.beta).astype(np.int64),
        )

    def norms(self):
        return (
            float(np.linalg.norm(self.s1)),
            float(np.linalg.norm(self.s2)),
            float(np.linalg.norm(self.s3)),
        )

    def cleared(self) -> bool:
        return not (self.s1.any() or self.s2.any() or self.s3.any())


@dataclass
class IterationRecord:
    k: int
    norm_s1: float
    norm_s2: float
    norm_s3: float
    dual_value: float
    step_size: float
    cleared: bool
    best_feasible_payoff: float


@dataclass
class EquilibriumReport:
    method: str
    converged: bool
    equilibrium: bool
    iterations: int
    trace: list
    allocation: AllocationState
    prices: PriceState
    payoffs: market.PayoffBreakdown | None
    dual_value: float
    best_feasible_payoff: float
    best_feasible_alloc: AllocationState | None
    access_rate_samples: np.ndarray      # achieved rate of each allocated access slot
    backhaul_rate_samples: np.ndarray    # achieved rate of each allocated backhaul slot
    agent_feasible: bool
    messages_per_iteration: int
    wall_time_s: float

    def trace_rows(self):
        for rec in self.trace:
            yield {
                "k": rec.k,
                "norm_s1": rec.norm_s1,
                "norm_s2": rec.norm_s2,
                "norm_s3": rec.norm_s3,
                "dual_value": rec.dual_value,
                "best_payoff": rec.best_feasible_payoff,
                "step": rec.step_size,
                "cleared": int(rec.cleared),
            }

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "converged": self.converged,
            "equilibrium": self.equilibrium,
            "iterations": self.iterations,
            "dual_value": self.dual_value,
            "best_feasible_payoff": self.best_feasible_payoff,
            "payoffs": self.payoffs.to_dict() if self.payoffs else None,
            "allocation": {
                "rho": self.allocation.rho.tolist(),
                "delta": self.allocation.delta.tolist(),
                "beta": self.allocation.beta.tolist(),
                "theta": self.allocation.theta.tolist(),
                "phi": self.allocation.phi.tolist(),
                "epsilon": self.allocation.epsilon.tolist(),
            },
            "prices": {
                "lambda": self.prices.lam.tolist(),
                "varsigma": self.prices.varsigma.tolist(),
                "xi": self.prices.xi.tolist(),
            },
            "access_rate_samples": self.access_rate_samples.tolist(),
            "backhaul_rate_samples": self.backhaul_rate_samples.tolist(),
            "agent_feasible": self.agent_feasible,
            "messages_per_iteration": self.messages_per_iteration,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _family_step(dual, mu_prev, s, step, coeff):
    """One heavy-ball update of a single dual family; no-op when ``s`` is zero."""
    s = s.astype(float).ravel()
    norm_s = np.linalg.norm(s)
    if norm_s == 0.0:
        return dual, mu_prev
    mu = s / norm_s
    norm_mu_prev = np.linalg.norm(mu_prev)
    if coeff > 0 and norm_mu_prev > 0:
        nu = max(0.0, -coeff * float(s @ mu_prev.ravel()) / (norm_s * norm_mu_prev))
        mu = mu + nu * mu_prev.ravel()
    new = np.maximum(dual + step * mu.reshape(dual.shape), 0.0)
    return new, mu.reshape(dual.shape)


def heavy_ball_step(prices: PriceState, violations: ViolationVectors,
                    config: SolverConfig) -> PriceState:
    """One momentum price update of all three dual families; duals are
    projected to be nonnegative and the iteration counter advances."""
    out = prices.copy()
    out.k = prices.k + 1
    step = config.step_size(out.k)
    coeff = config.momentum_coefficient if config.method == "heavy_ball" else 0.0
    out.lam, out.mu1 = _family_step(prices.lam, prices.mu1, violations.s1, step, coeff)
    out.varsigma, out.mu2 = _family_step(
        prices.varsigma, prices.mu2, violations.s2, step, coeff
    )
    out.xi, out.mu3 = _family_step(prices.xi, prices.mu3, violations.s3, step, coeff)
    return out


def initial_prices(scenario: Scenario, rate_table: RateTable,
                   config: SolverConfig) -> PriceState:
    """Initial duals: zeros, the midpoint between each link's buyer
    reservation value and the seller cost 1/T, or ("cap") just above the
    highest buyer value on each market.

    The cap start turns the dynamics into a descending auction: no buyer can
    be outbid from below, so prices mostly decay monotonically wherever a
    seller over-serves, which avoids the slow bidding-war climbs an
    ascending start needs when an inelastic buyer must displace a high-value
    incumbent.
    """
    prices = PriceState.zeros(scenario)
    if config.price_init == "zeros":
        return prices
    T = scenario.num_slots
    buyer_access = rate_table.access_rate / (T * scenario.user_rate_floor[None, :])
    buyer_bh = rate_table.backhaul_rate / (T * scenario.bs_rate_floor[:, None])
    buyer_sat = rate_table.sat_rate / (T * scenario.bs_rate_floor[:, None])
    if config.price_init == "cap":
        pad = 2.0 * local_solvers.PRICE_TOL
        prices.lam[:] = buyer_access.max(axis=1)[:, None, None] + pad
        prices.varsigma[:] = buyer_bh.max(initial=0.0) + pad
        prices.xi[:] = buyer_sat.max(initial=0.0) + pad
        return prices
    prices.lam[:] = np.maximum(buyer_access[:, :, None] + 1.0 / T, 0.0) / 2.0
    prices.varsigma[:] = np.maximum(buyer_bh[:, :, None] + 1.0 / T, 0.0) / 2.0
    prices.xi[:] = np.maximum(buyer_sat + 1.0 / T, 0.0) / 2.0
    return prices


def _solve_round(prices, rate_table, scenario, config):
    """All agent subproblems at the current prices. Agents are independent;
    results are assembled in agent order so the parallel and sequential
    modes are bit-identical."""
    U, N, M = scenario.num_users, scenario.num_bs, scenario.num_mbs
    alloc = AllocationState.zeros(scenario)

    user_jobs = [
        lambda u=u: local_solvers.solve_user(u, prices, rate_table, scenario)
        for u in range(U)
    ]
    bs_jobs = [
        lambda n=n: local_solvers.solve_bs(
            n, prices, rate_table, scenario,
            satellite_rate_mode=config.satellite_rate_mode,
        )
        for n in range(N)
    ]
    mbs_jobs = [
        lambda m=m: local_solvers.solve_mbs(m, prices, scenario) for m in range(M)
    ]
    jobs = user_jobs + bs_jobs + mbs_jobs
    if config.parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda job: job(), jobs))
    else:
        results = [job() for job in jobs]
    sat_sol = local_solvers.solve_satellite(prices, scenario)

    dual_value = sat_sol.objective
    feasible = sat_sol.feasible
    for u in range(U):
        sol = results[u]
        alloc.theta[:, u, :] = sol.schedule
        dual_value += sol.objective
        feasible &= sol.feasible
    for n in range(N):
        sol = results[U + n]
        rho_n, phi_n, eps_n = sol.schedule
        alloc.rho[n], alloc.phi[n], alloc.epsilon[n] = rho_n, phi_n, eps_n
        dual_value += sol.objective
        feasible &= sol.feasible
    for m in range(M):
        sol = results[U + N + m]
        alloc.delta[:, m, :] = sol.schedule
        dual_value += sol.objective
        feasible &= sol.feasible
    alloc.beta[:] = sat_sol.schedule
    return alloc, float(dual_value), feasible


# Multi-start budget in enumerate mode: stop after this many distinct
# clearances even if none certified as an exact-best-response equilibrium,
# returning the best cleared allocation found.
_ENUM_CLEARANCE_CAP = 6


def _solve_round_enum(prices, rate_table, scenario, previous):
    """All agent subproblems by exhaustive enumeration with persistence
    bands. `previous` maps agent keys to last-round schedules and is updated
    in place. Returns (alloc, dual_value, feasible, certified) where
    `certified` means every pick is an exact best response, so a cleared
    certified round is a Walrasian equilibrium."""
    U, N, M = scenario.num_users, scenario.num_bs, scenario.num_mbs
    alloc = AllocationState.zeros(scenario)
    dual_value = 0.0
    feasible = True
    certified = True

    def take(kind, index, key):
        nonlocal dual_value, feasible, certified
        pick, best = local_solvers.sticky_enumerate_agent(
            kind, index, prices, rate_table, scenario, previous.get(key)
        )
        dual_value += best.objective
        feasible &= pick.feasible
        if pick.objective < best.objective - 1e-9:
            certified = False
        previous[key] = pick.schedule
        return pick.schedule

    for u in range(U):
        alloc.theta[:, u, :] = take("user", u, ("user", u))
    for n in range(N):
        rho_n, phi_n, eps_n = take("bs", n, ("bs", n))
        alloc.rho[n], alloc.phi[n], alloc.epsilon[n] = rho_n, phi_n, eps_n
    for m in range(M):
        alloc.delta[:, m, :] = take("mbs", m, ("mbs", m))
    alloc.beta[:] = take("satellite", None, ("satellite",))
    return alloc, float(dual_value), feasible, certified


def repair_to_feasible(alloc: AllocationState, rate_table: RateTable,
                       scenario: Scenario) -> AllocationState:
    """Entrywise intersection of buy and sell schedules, with sells that the
    backhaul prefix cannot cover dropped; the result is cleared and satisfies
    all structural constraints (demand/QoS floors may still fail)."""
    out = AllocationState.zeros(scenario)
    out.rho[:] = alloc.rho * alloc.theta
    out.delta[:] = alloc.delta * alloc.phi
    out.beta[:] = alloc.beta * alloc.epsilon

    # Drop access sells that run ahead of the accumulated backhaul bits.
    tau = scenario.tau
    for n in range(scenario.num_bs):
        inc = (
            np.sum(rate_table.backhaul_rate[n][:, None] * out.delta[n], axis=0)
            + rate_table.sat_rate[n] * out.beta[n]
        ) * tau
        balance = 0.0
        for t in range(scenario.num_slots):
            balance += inc[t]
            sold = np.flatnonzero(out.rho[n, :, t])
            if sold.size:
                u = int(sold[0])
                bits = rate_table.access_rate[n, u] * tau
                if bits > balance + market.CAUSALITY_TOL_BITS:
                    out.rho[n, u, t] = 0
                else:
                    balance -= bits
    out.theta[:] = out.rho
    out.phi[:] = out.delta
    out.epsilon[:] = out.beta
    return out


def achieved_rate_samples(alloc: AllocationState, rate_table: RateTable):
    """Rates of every allocated access and backhaul slot (sell side)."""
    n_idx, u_idx, _ = np.nonzero(alloc.rho)
    access = rate_table.access_rate[n_idx, u_idx]
    n_idx, m_idx, _ = np.nonzero(alloc.delta)
    terrestrial = rate_table.backhaul_rate[n_idx, m_idx]
    n_idx, t_idx = np.nonzero(alloc.beta)
    satellite = rate_table.sat_rate[n_idx, t_idx]
    return access, np.concatenate([terrestrial, satellite])


def run(scenario: Scenario, config: SolverConfig,
        rate_table: RateTable | None = None) -> EquilibriumReport:
    """Run the configured solver on a scenario and return a full report."""
    if config.method == "random":
        return run_random_baseline(scenario, config.seed, rate_table=rate_table)
    if config.method == "brute_force":
        return run_brute_force(scenario, rate_table=rate_table)

    t0 = time.perf_counter()
    if rate_table is None:
        rate_table = build_rate_table(scenario)
    prices = initial_prices(scenario, rate_table, config)

    trace = []
    best_payoff = -np.inf
    best_alloc = None
    streak = 0
    converged = False
    equilibrium_ok = False
    alloc = AllocationState.zeros(scenario)
    dual_value = 0.0
    feasible = False

    live = config                       # step parameters after restarts
    window = deque(maxlen=config.restart_window)
    since_restart = 0
    stretch_min = np.inf                # best violation count this stretch
    prev_stretch_min = np.inf
    enumerate_mode = config.local_mode == "enumerate"
    enum_prev = {}                      # last-round schedules (enumerate mode)
    clear_payoff = -np.inf              # best cleared payoff (enumerate mode)
    clear_alloc = None
    clears_found = 0

    for k in range(1, config.max_iters + 1):
        if enumerate_mode:
            alloc, dual_value, feasible, certified = _solve_round_enum(
                prices, rate_table, scenario, enum_prev
            )
        else:
            alloc, dual_value, feasible = _solve_round(
                prices, rate_table, scenario, live
            )
            certified = False
        violations = ViolationVectors.from_alloc(alloc)
        n1, n2, n3 = violations.norms()
        cleared = violations.cleared()
        stretch_min = min(
            stretch_min,
            int(np.abs(violations.s1).sum())
            + int(np.abs(violations.s2).sum())
            + int(np.abs(violations.s3).sum()),
        )

        if not enumerate_mode:
            # Enumerate mode tracks cleared fixed points at clearance instead;
            # the per-iteration repair probe would dominate its runtime.
            candidate = (
                alloc if cleared else repair_to_feasible(alloc, rate_table, scenario)
            )
            if market.check_constraints(candidate, rate_table, scenario).ok():
                payoff = market.total_payoff(candidate, rate_table, scenario)
                if payoff > best_payoff:
                    best_payoff = payoff
                    best_alloc = candidate.copy()

        step = live.step_size(prices.k + 1)
        trace.append(IterationRecord(
            k=k, norm_s1=n1, norm_s2=n2, norm_s3=n3, dual_value=dual_value,
            step_size=step, cleared=cleared, best_feasible_payoff=best_payoff,
        ))

        restart_now = False
        streak = streak + 1 if cleared else 0
        if streak >= config.clearance_patience:
            if enumerate_mode:
                payoff = market.total_payoff(alloc, rate_table, scenario)
                if payoff > clear_payoff:
                    clear_payoff = payoff
                    clear_alloc = alloc.copy()
                if payoff > best_payoff:
                    best_payoff = payoff
                    best_alloc = alloc.copy()
                clears_found += 1
                if certified or clears_found >= _ENUM_CLEARANCE_CAP:
                    converged = True
                    equilibrium_ok = certified
                    alloc = clear_alloc
                    break
                # Keep searching from the ergodic average for a better
                # cleared fixed point.
                restart_now = True
                streak = 0
            else:
                converged = True
                equilibrium_ok = market.is_walrasian_equilibrium(
                    alloc, prices, rate_table, scenario
                )
                break

        window.append((prices.lam.copy(), prices.varsigma.copy(), prices.xi.copy()))
        since_restart += 1
        if restart_now or (
            config.restart_every
            and since_restart >= config.restart_every
            and k < config.max_iters
        ):
            # In enumerate mode every boundary restarts (multi-start search);
            # in heuristic mode only stagnant stretches do.
            if restart_now or enumerate_mode or stretch_min >= prev_stretch_min:
                prices.lam[:] = np.mean([w[0] for w in window], axis=0)
                prices.varsigma[:] = np.mean([w[1] for w in window], axis=0)
                prices.xi[:] = np.mean([w[2] for w in window], axis=0)
                prices.mu1[:] = 0.0
                prices.mu2[:] = 0.0
                prices.mu3[:] = 0.0
                prices.k = 0
                live = dataclasses.replace(
                    live,
                    step0=max(live.step0 * config.restart_shrink, 0.05 * config.step0),
                )
                enum_prev.clear()
            prev_stretch_min = stretch_min
            stretch_min = np.inf
            since_restart = 0
            window.clear()
        else:
            prices = heavy_ball_step(prices, violations, live)

    if enumerate_mode and not converged and clear_alloc is not None:
        # The search budget ran out but at least one cleared fixed point was
        # found; return the best of them.
        converged = True
        alloc = clear_alloc

    payoffs = market.payoff_breakdown(alloc, prices, rate_table, scenario)
    final_alloc = alloc if converged else (best_alloc or alloc)
    access_samples, backhaul_samples = achieved_rate_samples(final_alloc, rate_table)
    U, N, M = scenario.num_users, scenario.num_bs, scenario.num_mbs
    return EquilibriumReport(
        method=config.method,
        converged=converged,
        equilibrium=equilibrium_ok,
        iterations=len(trace),
        trace=trace,
        allocation=final_alloc,
        prices=prices,
        payoffs=payoffs,
        dual_value=dual_value,
        best_feasible_payoff=best_payoff,
        best_feasible_alloc=best_alloc,
        access_rate_samples=access_samples,
        backhaul_rate_samples=backhaul_samples,
        agent_feasible=feasible,
        messages_per_iteration=U + 2 * N + M + 1,
        wall_time_s=time.perf_counter() - t0,
    )


def run_random_baseline(scenario: Scenario, seed: int,
                        rate_table: RateTable | None = None) -> EquilibriumReport:
    """Uniformly random cleared allocation respecting the per-slot
    exclusivity and effective-time constraints."""
    t0 = time.perf_counter()
    if rate_table is None:
        rate_table = build_rate_table(scenario)
    rng = np.random.default_rng(int(seed))
    U, N, M, T = (
        scenario.num_users, scenario.num_bs, scenario.num_mbs, scenario.num_slots,
    )
    alloc = AllocationState.zeros(scenario)
    for t in range(T):
        users_taken = np.zeros(U, bool)
        mbs_taken = np.zeros(M, bool)
        sat_taken = False
        for n in rng.permutation(N):
            if t >= scenario.effective_slots[n]:
                continue
            actions = [("idle", None)]
            actions += [("sell", u) for u in np.flatnonzero(~users_taken)]
            actions += [("buy_mbs", m) for m in np.flatnonzero(~mbs_taken)]
            if scenario.satellite_enabled and not sat_taken:
                actions.append(("buy_sat", None))
            kind, idx = actions[rng.integers(len(actions))]
            if kind == "sell":
                alloc.rho[n, idx, t] = 1
                users_taken[idx] = True
            elif kind == "buy_mbs":
                alloc.delta[n, idx, t] = 1
                mbs_taken[idx] = True
            elif kind == "buy_sat":
                alloc.beta[n, t] = 1
                sat_taken = True
    alloc.theta[:] = alloc.rho
    alloc.phi[:] = alloc.delta
    alloc.epsilon[:] = alloc.beta

    payoff = market.total_payoff(alloc, rate_table, scenario)
    access_samples, backhaul_samples = achieved_rate_samples(alloc, rate_table)
    feasible = market.check_constraints(alloc, rate_table, scenario).ok()
    return EquilibriumReport(
        method="random",
        converged=True,
        equilibrium=False,
        iterations=1,
        trace=[],
        allocation=alloc,
        prices=PriceState.zeros(scenario),
        payoffs=None,
        dual_value=payoff,
        best_feasible_payoff=payoff,
        best_feasible_alloc=alloc,
        access_rate_samples=access_samples,
        backhaul_rate_samples=backhaul_samples,
        agent_feasible=feasible,
        messages_per_iteration=0,
        wall_time_s=time.perf_counter() - t0,
    )


BRUTE_FORCE_GUARD = 2 ** 24


def _slot_configs(scenario: Scenario, rate_table: RateTable, t: int):
    """All conflict-free joint actions of the BSs at slot t, with their
    payoff and rate contributions."""
    U, N, M = scenario.num_users, scenario.num_bs, scenario.num_mbs
    T = scenario.num_slots
    idle = U + M + 1
    per_bs = []
    for n in range(N):
        opts = [idle]
        if t < scenario.effective_slots[n]:
            opts = list(range(U + M + (1 if scenario.satellite_enabled else 0))) + [idle]
        per_bs.append(opts)

    configs = []
    for joint in itertools.product(*per_bs):
        sells = [a for a in joint if a < U]
        if len(sells) != len(set(sells)):
            continue
        buys_m = [a for a in joint if U <= a < U + M]
        if len(buys_m) != len(set(buys_m)):
            continue
        if sum(1 for a in joint if a == U + M) > 1:
            continue
        payoff = 0.0
        user_rate = np.zeros(U)
        net_bits = np.zeros(N)
        bh_rate = np.zeros(N)
        alloc_desc = []
        for n, a in enumerate(joint):
            if a == idle:
                continue
            alloc_desc.append((n, a))
            if a < U:
                rate = rate_table.access_rate[n, a]
                payoff += rate / (T * scenario.user_rate_floor[a]) - 1.0 / T
                user_rate[a] += rate
                net_bits[n] += rate * scenario.tau
            else:
                rate = (
                    rate_table.backhaul_rate[n, a - U]
                    if a < U + M else rate_table.sat_rate[n, t]
                )
                payoff += rate / (T * scenario.bs_rate_floor[n]) - 1.0 / T
                net_bits[n] -= rate * scenario.tau
                bh_rate[n] += rate
        configs.append((payoff, user_rate, net_bits, bh_rate, alloc_desc))
    return configs


def run_brute_force(scenario: Scenario,
                    rate_table: RateTable | None = None) -> EquilibriumReport:
    """Exhaustive maximization of the cleared total payoff over all feasible
    allocations; tiny instances only."""
    t0 = time.perf_counter()
    if rate_table is None:
        rate_table = build_rate_table(scenario)
    U, N, M, T = (
        scenario.num_users, scenario.num_bs, scenario.num_mbs, scenario.num_slots,
    )
    slot_configs = [_slot_configs(scenario, rate_table, t) for t in range(T)]
    space = 1
    for cfgs in slot_configs:
        space *= len(cfgs)
        if space > BRUTE_FORCE_GUARD:
            raise ValueError(
                f"decision space exceeds brute-force guard {BRUTE_FORCE_GUARD}"
            )

    # Frontier search over slots; prune on the causality prefix as we go.
    payoff = np.zeros(1)
    user_rate = np.zeros((1, U))
    net_bits = np.zeros((1, N))
    bh_rate = np.zeros((1, N))
    history = [()]  # tuple of config indices per row

    for t in range(T):
        cfgs = slot_configs[t]
        c_payoff = np.array([c[0] for c in cfgs])
        c_user = np.array([c[1] for c in cfgs])
        c_bits = np.array([c[2] for c in cfgs])
        c_bh = np.array([c[3] for c in cfgs])
        K, C = payoff.shape[0], len(cfgs)

        payoff = (payoff[:, None] + c_payoff[None, :]).ravel()
        user_rate = (user_rate[:, None, :] + c_user[None, :, :]).reshape(-1, U)
        net_bits = (net_bits[:, None, :] + c_bits[None, :, :]).reshape(-1, N)
        bh_rate = (bh_rate[:, None, :] + c_bh[None, :, :]).reshape(-1, N)
        history = [h + (ci,) for h in history for ci in range(C)]

        keep = np.all(net_bits <= market.CAUSALITY_TOL_BITS, axis=1)
        payoff, user_rate = payoff[keep], user_rate[keep]
        net_bits, bh_rate = net_bits[keep], bh_rate[keep]
        history = [h for h, k in zip(history, keep) if k]

    ok = np.all(
        user_rate * scenario.tau >= scenario.data_demand[None, :] * (1 - 1e-9) - 1e-12,
        axis=1,
    )
    ok &= np.all(
        user_rate / T >= scenario.user_rate_floor[None, :] * (1 - 1e-9) - 1e-12, axis=1
    )
    ok &= np.all(
        bh_rate / T >= scenario.bs_rate_floor[None, :] * (1 - 1e-9) - 1e-12, axis=1
    )
    if not ok.any():
        raise ValueError("no feasible cleared allocation exists for this instance")
    feasible_idx = np.flatnonzero(ok)
    best_row = feasible_idx[np.argmax(payoff[ok])]
    best_payoff = float(payoff[best_row])

    alloc = AllocationState.zeros(scenario)
    for t, ci in enumerate(history[best_row]):
        for n, a in slot_configs[t][ci][4]:
            if a < U:
                alloc.rho[n, a, t] = 1
            elif a < U + M:
                alloc.delta[n, a - U, t] = 1
            else:
                alloc.beta[n, t] = 1
    alloc.theta[:] = alloc.rho
    alloc.phi[:] = alloc.delta
    alloc.epsilon[:] = alloc.beta

    access_samples, backhaul_samples = achieved_rate_samples(alloc, rate_table)
    return EquilibriumReport(
        method="brute_force",
        converged=True,
        equilibrium=False,
        iterations=1,
        trace=[],
        allocation=alloc,
        prices=PriceState.zeros(scenario),
        payoffs=None,
        dual_value=best_payoff,
        best_feasible_payoff=best_payoff,
        best_feasible_alloc=alloc,
        access_rate_samples=access_samples,
        backhaul_rate_samples=backhaul_samples,
        agent_feasible=True,
        messages_per_iteration=(U + M + 1) * N,
        wall_time_s=time.perf_counter() - t0,
    )


def duality_gap(report: EquilibriumReport) -> float:
    """Final dual value minus the best feasible primal payoff; nonnegative up
    to tolerance by weak duality."""
    return float(report.dual_value - report.best_feasible_payoff)

"""Desk-scale incentives experiments around the solve mechanism.

Reports live on finite grids: an agent's possible misreports are a grid of
budget-aware preferences, the mechanism is the exact maxmin solve applied to
the report profile, and payoffs are evaluated under true preferences. The
experiments probe best responses, epsilon-equilibria of the report game,
convergence of equilibrium outcomes to the true envy-free set as epsilon
shrinks, and the guaranteed-gain bound for an envious agent misreporting a
quasi-linear preference.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .model import (
    AgentId,
    Allocation,
    Economy,
    Preference,
    RoomId,
    bundle_utility,
    eval_utility,
)
from .oracle import (
    OracleError,
    enumerate_ef_points,
    linf_distance_to_ef,
    theta_constant,
)
from .solver import solve

ZERO = Fraction(0)
ONE = Fraction(1)


class ExperimentError(ValueError):
    pass


def _arange(lo: Fraction, hi: Fraction, step: Fraction):
    out = []
    x = Fraction(lo)
    while x <= hi:
        out.append(x)
        x += step
    return out


@dataclass(frozen=True)
class ReportGrid:
    """Finite grid of reportable preferences for one agent.

    Values run per room over [lo, hi] in value_step increments; budgets
    likewise; rho ranges over the listed menu choices. A grid used to study
    truthful play should contain the truthful report (see contains()).
    """

    value_step: Fraction
    value_ranges: Mapping[RoomId, tuple]
    budget_step: Fraction = ONE
    budget_range: tuple = (ZERO, ZERO)
    rho_choices: Sequence[Fraction] = (ZERO,)

    def __post_init__(self):
        if self.value_step <= 0 or self.budget_step <= 0:
            raise ExperimentError("grid steps must be positive")
        if not self.rho_choices:
            raise ExperimentError("grid needs at least one rho choice")

    def axis(self, room: RoomId):
        lo, hi = self.value_ranges[room]
        return _arange(Fraction(lo), Fraction(hi), self.value_step)

    def budgets(self):
        lo, hi = self.budget_range
        return _arange(Fraction(lo), Fraction(hi), self.budget_step)

    def reports(self, rooms: Sequence[RoomId]):
        """All grid preferences, in deterministic lexicographic order."""
        axes = [self.axis(room) for room in rooms]
        for values in itertools.product(*axes):
            vmap = dict(zip(rooms, values))
            for budget in self.budgets():
                for rho in self.rho_choices:
                    yield Preference(values=vmap, budget=budget, rho=rho)

    def size(self, rooms: Sequence[RoomId]) -> int:
        count = 1
        for room in rooms:
            count *= len(self.axis(room))
        return count * len(self.budgets()) * len(self.rho_choices)

    def contains(self, pref: Preference, rooms: Sequence[RoomId]) -> bool:
        return (
            all(pref.values[room] in self.axis(room) for room in rooms)
            and pref.budget in self.budgets()
            and pref.rho in self.rho_choices
        )


@dataclass(frozen=True)
class ManipulationConstants:
    """Universal proportions in the guaranteed-gain bound for an envious
    agent: a rebate of omega1 * gap on her room, or taking the envied room
    at a surcharge of at most omega2 * gap."""

    theta: Fraction
    omega1: Fraction
    omega2: Fraction = Fraction(3, 4)

    @classmethod
    def for_economy(cls, e: Economy) -> "ManipulationConstants":
        theta = theta_constant(e.n, e.rho_bar)
        return cls(theta=theta, omega1=theta / 2)

    def __post_init__(self):
        if not (ZERO < self.omega1 < ONE and ZERO < self.omega2 < ONE):
            raise ExperimentError("omega constants must sit strictly inside (0, 1)")


def mechanism_outcome(e_true: Economy, reports: Mapping[AgentId, Preference]) -> Allocation:
    """Run the maxmin mechanism on a report profile of the true economy."""
    reported = e_true
    for agent, pref in reports.items():
        reported = reported.with_preference(agent, pref)
    return solve(reported).allocation


def true_utility(e_true: Economy, agent: AgentId, z: Allocation) -> Fraction:
    return bundle_utility(e_true, agent, z)


@dataclass(frozen=True)
class BestResponse:
    agent: AgentId
    report: Preference
    utility: Fraction
    outcome: Allocation


def best_response(e_true: Economy, agent: AgentId, grid: ReportGrid) -> BestResponse:
    """Exhaustive best response over the grid, others reporting truthfully.

    Ties break toward the earliest report in grid order, making the search
    deterministic.
    """
    best: Optional[BestResponse] = None
    for report in grid.reports(e_true.rooms):
        outcome = mechanism_outcome(e_true, {agent: report})
        utility = true_utility(e_true, agent, outcome)
        if best is None or utility > best.utility:
            best = BestResponse(agent, report, utility, outcome)
    if best is None:
        raise ExperimentError("empty report grid")
    return best


def is_epsilon_equilibrium(
    e_true: Economy,
    reports: Mapping[AgentId, Preference],
    eps: Fraction,
    grid: ReportGrid,
    outcome_cache: Optional[dict] = None,
) -> bool:
    """No unilateral grid deviation improves true utility by more than eps."""
    eps = Fraction(eps)
    base = _cached_outcome(e_true, reports, outcome_cache)
    for agent in e_true.agents:
        held = true_utility(e_true, agent, base)
        for deviation in grid.reports(e_true.rooms):
            trial = dict(reports)
            trial[agent] = deviation
            out = _cached_outcome(e_true, trial, outcome_cache)
            if true_utility(e_true, agent, out) > held + eps:
                return False
    return True


def _profile_key(reports: Mapping[AgentId, Preference]):
    return tuple(
        (agent, tuple(sorted(p.values.items())), p.budget, p.rho)
        for agent, p in sorted(reports.items())
    )


def _cached_outcome(e_true, reports, cache):
    if cache is None:
        return mechanism_outcome(e_true, reports)
    key = _profile_key(reports)
    if key not in cache:
        cache[key] = mechanism_outcome(e_true, reports)
    return cache[key]


@dataclass(frozen=True)
class EquilibriumRound:
    eps: Fraction
    equilibria: int
    max_distance: Optional[Fraction]  # None when no equilibrium exists


@dataclass(frozen=True)
class LimitEquilibriumReport:
    rounds: Sequence[EquilibriumRound]

    @property
    def distances_non_increasing(self) -> bool:
        seen = [r.max_distance for r in self.rounds if r.max_distance is not None]
        return all(b <= a for a, b in zip(seen, seen[1:]))

    def to_json_dict(self) -> dict:
        return {
            "rounds": [
                {
                    "eps": str(r.eps),
                    "equilibria": r.equilibria,
                    "max_distance": None if r.max_distance is None else str(r.max_distance),
                }
                for r in self.rounds
            ],
            "distances_non_increasing": self.distances_non_increasing,
        }


def limit_equilibrium_experiment(
    e_true: Economy,
    eps_schedule: Sequence[Fraction],
    grids: Sequence[ReportGrid],
    max_profiles: int = 20000,
) -> LimitEquilibriumReport:
    """Enumerate grid equilibria per epsilon and track their distance to the
    true envy-free set.

    For each (eps, grid) pair, every joint report profile on the grid is
    classified; the round records the largest exact L-infinity distance from
    an eps-equilibrium outcome's rents to the envy-free set of the true
    economy. As eps shrinks these distances should not grow.
    """
    if e_true.n > 3:
        raise ExperimentError("equilibrium enumeration supports n <= 3")
    if len(eps_schedule) != len(grids):
        raise ExperimentError("need one grid per epsilon")
    rounds = []
    for eps, grid in zip(eps_schedule, grids):
        total = grid.size(e_true.rooms) ** e_true.n
        if total > max_profiles:
            raise ExperimentError(f"profile space {total} exceeds cap {max_profiles}")
        cache: dict = {}
        all_reports = list(grid.reports(e_true.rooms))
        count = 0
        worst: Optional[Fraction] = None
        for combo in itertools.product(all_reports, repeat=e_true.n):
            profile = dict(zip(e_true.agents, combo))
            if not is_epsilon_equilibrium(e_true, profile, eps, grid, cache):
                continue
            count += 1
            outcome = _cached_outcome(e_true, profile, cache)
            dist = linf_distance_to_ef(e_true, outcome.rents)
            if worst is None or dist > worst:
                worst = dist
        rounds.append(EquilibriumRound(Fraction(eps), count, worst))
    return LimitEquilibriumReport(tuple(rounds))


def supporting_profile(e_true: Economy, z: Allocation, eps: Fraction) -> Mapping[AgentId, Preference]:
    """Quasi-linear reports under which z is (approximately) self-enforcing.

    Each agent claims her own room is worth its rent plus eps/(n-1) while
    every other room is worth its rent minus eps/(n-1)^2; any envy-free
    allocation for these reports keeps everyone in place at rents within eps
    of z, which makes the profile a grid epsilon-equilibrium supporting z.
    Needs n >= 2.
    """
    eps = Fraction(eps)
    n = e_true.n
    if n < 2:
        raise ExperimentError("the supporting profile needs at least two agents")
    if eps <= 0:
        raise ExperimentError("eps must be positive")
    reports = {}
    for agent in e_true.agents:
        own = z.assignment[agent]
        values = {}
        for room in e_true.rooms:
            if room == own:
                values[room] = z.rents[room] + eps / (n - 1)
            else:
                values[room] = z.rents[room] - eps / (n - 1) ** 2
        reports[agent] = Preference(values=values, budget=ZERO, rho=ZERO)
    return reports


@dataclass(frozen=True)
class ManipulationFinding:
    witness: Optional[Preference]
    bound: Fraction
    gap: Fraction
    checked_reports: int
    worst_utility_of_witness: Optional[Fraction]

    @property
    def achieved(self) -> bool:
        return self.witness is not None


def check_strong_manipulation(
    e_reports: Economy,
    z: Allocation,
    agent: AgentId,
    true_pref: Preference,
    grid: ReportGrid,
    envied: Optional[AgentId] = None,
) -> ManipulationFinding:
    """Search for a quasi-linear report guaranteeing the envious agent the
    promised floor at every envy-free allocation of the deviated profile.

    z must be envy-free for the report profile while `agent`, judged by her
    true preference, envies someone. With gap eta solving
    u(envied room rent + eta) = u(own bundle), a witness report must secure
    min{ u(own rent - omega1*eta, own room), u(envied rent + omega2*eta,
    envied room) } at every sampled envy-free point of the deviated economy.
    Sampling is exact for n <= 3: all regime-cell vertices are enumerated.
    """
    own_room = z.assignment[agent]
    own_utility = eval_utility(true_pref, z.rents[own_room], own_room)
    target = envied
    best_gap = None
    for j in e_reports.agents:
        if j == agent:
            continue
        room_j = z.assignment[j]
        gap = eval_utility(true_pref, z.rents[room_j], room_j) - own_utility
        if gap > 0 and (target is None or j == envied):
            if envied is None:
                if best_gap is None or gap > best_gap:
                    best_gap = gap
                    target = j
            else:
                best_gap = gap
    if target is None or best_gap is None or best_gap <= 0:
        raise ExperimentError("precondition failed: the agent envies nobody under her true preference")

    envied_room = z.assignment[target]
    # eta > 0 with u(rent_envied + eta) = u(own bundle): within the linear
    # regime above the envied room's rent the slope is lam in {1, 1+rho}.
    eta = _indifference_surcharge(true_pref, envied_room, z.rents[envied_room], own_utility)
    constants = ManipulationConstants.for_economy(e_reports)
    floor = min(
        eval_utility(true_pref, z.rents[own_room] - constants.omega1 * eta, own_room),
        eval_utility(true_pref, z.rents[envied_room] + constants.omega2 * eta, envied_room),
    )

    checked = 0
    for report in grid.reports(e_reports.rooms):
        if report.rho != 0 or report.budget != 0:
            continue  # the theorem witnesses live in the quasi-linear domain
        checked += 1
        deviated = e_reports.with_preference(agent, report)
        try:
            points = enumerate_ef_points(deviated)
        except OracleError as exc:
            raise ExperimentError(str(exc))
        worst = None
        for s in points:
            u = eval_utility(true_pref, s.rents[s.assignment[agent]], s.assignment[agent])
            if worst is None or u < worst:
                worst = u
        if worst is not None and worst >= floor:
            return ManipulationFinding(report, floor, eta, checked, worst)
    return ManipulationFinding(None, floor, eta, checked, None)


def _indifference_surcharge(pref: Preference, room: RoomId, rent: Fraction, level: Fraction) -> Fraction:
    """eta > 0 with u(rent + eta, room) = level, inverting the kinked line."""
    at_rent = eval_utility(pref, rent, room)
    if at_rent <= level:
        raise ExperimentError("no positive surcharge exists: the bundle is not preferred")
    # Try the piece below the budget first; fall through the kink if needed.
    if rent < pref.budget:
        eta = at_rent - level
        if rent + eta <= pref.budget:
            return eta
        at_budget = eval_utility(pref, pref.budget, room)
        return (pref.budget - rent) + (at_budget - level) / (ONE + pref.rho)
    return (at_rent - level) / (ONE + pref.rho)

"""Exact model of budget-aware rent division economies.

All money and utility quantities are `fractions.Fraction`; every comparison
in this package is exact. Floats never enter the primary computation path,
because indifference (tie) edges and the optimality certificate are defined
by exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

AgentId = str
RoomId = str

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """Invalid economy, preference, or allocation data."""


class AllocationMismatch(ModelError):
    """Allocation does not fit the economy it is evaluated against."""


def as_fraction(x) -> Fraction:
    """Coerce ints/strings/Fractions to Fraction; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ModelError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


@dataclass(frozen=True)
class Preference:
    """One agent's report: room values, budget, and budget violation index.

    Utility from paying ``p`` for room ``a`` is
    ``values[a] - p - rho * max(0, p - budget)``.
    """

    values: Mapping[RoomId, Fraction]
    budget: Fraction
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "values", {r: as_fraction(v) for r, v in self.values.items()})
        object.__setattr__(self, "budget", as_fraction(self.budget))
        object.__setattr__(self, "rho", as_fraction(self.rho))
        if self.budget < 0:
            raise ModelError(f"budget must be >= 0, got {self.budget}")
        if self.rho < 0:
            raise ModelError(f"rho must be >= 0, got {self.rho}")


def eval_utility(pref: Preference, rent: Fraction, room: RoomId) -> Fraction:
    """Utility of receiving `room` at `rent` under `pref`, exactly."""
    if room not in pref.values:
        raise ModelError(f"unknown room id {room!r}")
    rent = as_fraction(rent)
    overage = rent - pref.budget
    penalty = pref.rho * overage if overage > 0 else ZERO
    return pref.values[room] - rent - penalty


@dataclass(frozen=True)
class Economy:
    """A rent division instance: agents, rooms, preferences, total rent.

    Agent and room ids are opaque strings; their input order is the canonical
    order used for deterministic tie-breaking everywhere downstream.
    """

    agents: Sequence[AgentId]
    rooms: Sequence[RoomId]
    preferences: Mapping[AgentId, Preference]
    total_rent: Fraction
    rho_menu: Sequence[Fraction]
    rho_bar: Fraction

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "rooms", tuple(self.rooms))
        object.__setattr__(self, "preferences", dict(self.preferences))
        object.__setattr__(self, "total_rent", as_fraction(self.total_rent))
        object.__setattr__(self, "rho_menu", tuple(as_fraction(q) for q in self.rho_menu))
        object.__setattr__(self, "rho_bar", as_fraction(self.rho_bar))
        n = len(self.agents)
        if n < 1:
            raise ModelError("an economy needs at least one agent")
        if len(set(self.agents)) != n or len(set(self.rooms)) != len(self.rooms):
            raise ModelError("agent and room ids must be unique")
        if len(self.rooms) != n:
            raise ModelError(f"need as many rooms as agents, got {len(self.rooms)} vs {n}")
        if not self.rho_menu:
            raise ModelError("rho_menu must be non-empty")
        for q in self.rho_menu:
            if not (ZERO <= q <= self.rho_bar):
                raise ModelError(f"rho_menu entry {q} outside [0, {self.rho_bar}]")
        for i in self.agents:
            if i not in self.preferences:
                raise ModelError(f"missing preference for agent {i!r}")
            pref = self.preferences[i]
            if set(pref.values) != set(self.rooms):
                raise ModelError(f"agent {i!r} must value exactly the economy's rooms")
            if pref.rho not in self.rho_menu:
                raise ModelError(f"agent {i!r} rho {pref.rho} not in the rho menu")

    @property
    def n(self) -> int:
        return len(self.agents)

    def utility(self, agent: AgentId, rent: Fraction, room: RoomId) -> Fraction:
        return eval_utility(self.preferences[agent], rent, room)

    def with_total(self, total: Fraction) -> "Economy":
        """Same economy at a different total rent."""
        return Economy(self.agents, self.rooms, self.preferences, total, self.rho_menu, self.rho_bar)

    def with_preference(self, agent: AgentId, pref: Preference) -> "Economy":
        prefs = dict(self.preferences)
        prefs[agent] = pref
        return Economy(self.agents, self.rooms, prefs, self.total_rent, self.rho_menu, self.rho_bar)


@dataclass(frozen=True)
class Allocation:
    """A room assignment bijection together with per-room rents."""

    assignment: Mapping[AgentId, RoomId]
    rents: Mapping[RoomId, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))
        object.__setattr__(self, "rents", {r: as_fraction(v) for r, v in self.rents.items()})

    def total(self) -> Fraction:
        return sum(self.rents.values(), start=ZERO)

    def room_of(self, agent: AgentId) -> RoomId:
        return self.assignment[agent]

    def rent_of(self, agent: AgentId) -> Fraction:
        return self.rents[self.assignment[agent]]


def check_allocation(e: Economy, z: Allocation, total: Optional[Fraction] = None) -> None:
    """Validate that `z` is a well-formed allocation for `e` (exact rent sum)."""
    if set(z.assignment) != set(e.agents):
        raise AllocationMismatch("assignment does not cover exactly the economy's agents")
    if sorted(z.assignment.values()) != sorted(e.rooms):
        raise AllocationMismatch("assignment is not a bijection onto the economy's rooms")
    if set(z.rents) != set(e.rooms):
        raise AllocationMismatch("rents do not cover exactly the economy's rooms")
    want = e.total_rent if total is None else as_fraction(total)
    if z.total() != want:
        raise AllocationMismatch(f"rents sum to {z.total()}, expected {want}")


def bundle_utility(e: Economy, agent: AgentId, z: Allocation, other: Optional[AgentId] = None) -> Fraction:
    """Utility of `agent` for her own bundle at z, or for `other`'s bundle."""
    target = agent if other is None else other
    room = z.assignment[target]
    return e.utility(agent, z.rents[room], room)


@dataclass(frozen=True)
class EnvyWitness:
    envious: AgentId
    envied: AgentId
    gap: Fraction  # u_i(z_j) - u_i(z_i) > 0


def envy_witness(e: Economy, z: Allocation) -> Optional[EnvyWitness]:
    """Maximal-gap envy violation, or None when z is envy-free."""
    check_allocation(e, z, total=z.total())
    worst: Optional[EnvyWitness] = None
    for i in e.agents:
        own = bundle_utility(e, i, z)
        for j in e.agents:
            if i == j:
                continue
            gap = bundle_utility(e, i, z, j) - own
            if gap > 0 and (worst is None or gap > worst.gap):
                worst = EnvyWitness(i, j, gap)
    return worst


def is_envy_free(e: Economy, z: Allocation) -> bool:
    return envy_witness(e, z) is None


@dataclass(frozen=True)
class BudgetSets:
    """Strict/weak above-budget (agent, room) pairs at a rent vector."""

    strict: frozenset  # r_a > b_i
    weak: frozenset    # r_a >= b_i


def budget_sets(e: Economy, rents: Mapping[RoomId, Fraction]) -> BudgetSets:
    if set(rents) != set(e.rooms):
        raise ModelError("rents must cover exactly the economy's rooms")
    strict = set()
    weak = set()
    for i in e.agents:
        b = e.preferences[i].budget
        for a in e.rooms:
            r = as_fraction(rents[a])
            if r > b:
                strict.add((i, a))
            if r >= b:
                weak.add((i, a))
    return BudgetSets(frozenset(strict), frozenset(weak))


@dataclass(frozen=True)
class Linearization:
    """Local affine form of each utility just below the current rents.

    nu[(i, a)] - lam[(i, a)] * r_a equals the true utility at r_a, and the
    affine form is exact on a small interval below r_a. At r_a == b_i the
    below-budget branch applies, since rebates move downward.
    """

    nu: Mapping[tuple, Fraction]
    lam: Mapping[tuple, Fraction]


def linearize(e: Economy, rents: Mapping[RoomId, Fraction]) -> Linearization:
    if set(rents) != set(e.rooms):
        raise ModelError("rents must cover exactly the economy's rooms")
    nu = {}
    lam = {}
    for i in e.agents:
        pref = e.preferences[i]
        for a in e.rooms:
            r = as_fraction(rents[a])
            if r > pref.budget:
                lam[(i, a)] = ONE + pref.rho
                nu[(i, a)] = pref.values[a] + pref.rho * pref.budget
            else:
                lam[(i, a)] = ONE
                nu[(i, a)] = pref.values[a]
    return Linearization(nu, lam)


@dataclass(frozen=True)
class EnvyGraph:
    """Directed indifference graph between own and others' bundles.

    Edge (i, j) present iff u_i(z_i) == u_i(z_j), exactly. Every agent
    carries a self-loop.
    """

    nodes: Sequence[AgentId]
    edges: frozenset

    def successors(self, i: AgentId) -> list:
        return [j for j in self.nodes if (i, j) in self.edges and j != i]


def envy_graph(e: Economy, z: Allocation) -> EnvyGraph:
    check_allocation(e, z, total=z.total())
    edges = set()
    for i in e.agents:
        own = bundle_utility(e, i, z)
        for j in e.agents:
            if i == j or bundle_utility(e, i, z, j) == own:
                edges.add((i, j))
    return EnvyGraph(tuple(e.agents), frozenset(edges))


class NotEnvyFree(ModelError):
    """Raised when an operation requires an envy-free allocation."""


@dataclass(frozen=True)
class TieGraph:
    """Bipartite agent-room indifference graph at an envy-free allocation.

    Edge (i, a) present iff agent i is exactly indifferent between her own
    bundle and (r_a, a). Weights are the multiplicative slopes lambda_{ia}
    of the local linearization (kept as rational products, never logs).
    """

    agents: Sequence[AgentId]
    rooms: Sequence[RoomId]
    edges: frozenset
    weights: Mapping[tuple, Fraction]
    assignment: Mapping[AgentId, RoomId]  # the allocation's own assignment


def tie_graph(e: Economy, z: Allocation) -> TieGraph:
    witness = envy_witness(e, z)
    if witness is not None:
        raise NotEnvyFree(
            f"tie graph requires an envy-free allocation; {witness.envious} envies "
            f"{witness.envied} by {witness.gap}"
        )
    lin = linearize(e, z.rents)
    edges = set()
    weights = {}
    for i in e.agents:
        own = bundle_utility(e, i, z)
        for a in e.rooms:
            if e.utility(i, z.rents[a], a) == own:
                edges.add((i, a))
                weights[(i, a)] = lin.lam[(i, a)]
    return TieGraph(tuple(e.agents), tuple(e.rooms), frozenset(edges), weights, dict(z.assignment))


def paths_to_targets(graph: EnvyGraph, targets: Iterable[AgentId]):
    """BFS over reversed edges; returns per-agent path witness to the target set.

    paths[i] is a node sequence i -> ... -> t with t in targets, following
    forward edges of `graph`; agents in `targets` map to the trivial path.
    """
    targets = list(targets)
    next_hop = {t: None for t in targets}
    frontier = list(targets)
    while frontier:
        new_frontier = []
        for j in frontier:
            for i in graph.nodes:
                if i not in next_hop and (i, j) in graph.edges:
                    next_hop[i] = j
                    new_frontier.append(i)
        frontier = new_frontier
    paths = {}
    for i in graph.nodes:
        if i not in next_hop:
            continue
        path = [i]
        while next_hop[path[-1]] is not None:
            path.append(next_hop[path[-1]])
        paths[i] = tuple(path)
    return paths


def reachable_from(graph: EnvyGraph, sources: Iterable[AgentId]) -> frozenset:
    """Forward closure of `sources` under the graph's edges."""
    seen = set(sources)
    frontier = list(seen)
    while frontier:
        new_frontier = []
        for i in frontier:
            for j in graph.successors(i):
                if j not in seen:
                    seen.add(j)
                    new_frontier.append(j)
        frontier = new_frontier
    return frozenset(seen)


@dataclass(frozen=True)
class MaxminCertificate:
    """Checkable evidence for (or against) maxmin optimality at z's total.

    An envy-free allocation is a maxmin selection iff every agent has a
    directed path, in the indifference graph, to the set of minimum-utility
    agents. `paths` carries one witness path per agent when the check holds;
    otherwise `failing_agent` names an agent with no such path (or
    `envy_witness` explains why the allocation is not even envy-free).
    """

    is_maxmin: bool
    envy_free: bool
    envy_witness: Optional[EnvyWitness]
    argmin_agents: Sequence[AgentId]
    paths: Mapping[AgentId, Sequence[AgentId]]
    failing_agent: Optional[AgentId]

    def to_json_dict(self) -> dict:
        return {
            "is_maxmin": self.is_maxmin,
            "envy_free": self.envy_free,
            "envy_witness": None
            if self.envy_witness is None
            else {
                "envious": self.envy_witness.envious,
                "envied": self.envy_witness.envied,
                "gap": str(self.envy_witness.gap),
            },
            "argmin_agents": list(self.argmin_agents),
            "paths": {i: list(p) for i, p in self.paths.items()},
            "failing_agent": self.failing_agent,
        }


def maxmin_certificate(e: Economy, z: Allocation) -> MaxminCertificate:
    """Verify maxmin membership at total sum(z.rents) via graph reachability."""
    witness = envy_witness(e, z)
    if witness is not None:
        return MaxminCertificate(False, False, witness, (), {}, None)
    utilities = {i: bundle_utility(e, i, z) for i in e.agents}
    low = min(utilities.values())
    argmin = tuple(i for i in e.agents if utilities[i] == low)
    graph = envy_graph(e, z)
    paths = paths_to_targets(graph, argmin)
    for i in e.agents:
        if i not in paths:
            return MaxminCertificate(False, True, None, argmin, {}, i)
    return MaxminCertificate(True, True, None, argmin, paths, None)


def is_maxmin(e: Economy, z: Allocation) -> bool:
    return maxmin_certificate(e, z).is_maxmin

"""Two-phase exact computation of envy-free selections.

Phase one inflates the total rent until every budget is slack, where the
economy behaves quasi-linearly in the scaled values V = (v + rho*b)/(1+rho),
and solves the chosen selection there by a single assignment plus one LP.
Phase two walks the total back down to the target: at each step it
linearizes utilities just below the current rents, reshuffles along a
max-weight tie matching, rebates rent by LP inside the current budget
regime, and verifies the selection property by graph reachability. When the
rebate overshoots the selection, a correction LP lifts rents back up to the
last certified objective level. Progress is guaranteed because every
non-final step either releases a strict budget pair or increases the tie
matching weight.

All arithmetic is exact; every returned allocation carries a certificate
recomputed from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import lp as lplib
from .matching import max_sum_assignment, max_tie_matching
from .model import (
    AgentId,
    Allocation,
    Economy,
    EnvyWitness,
    RoomId,
    budget_sets,
    bundle_utility,
    envy_graph,
    envy_witness,
    linearize,
    paths_to_targets,
    reachable_from,
    tie_graph,
)

ZERO = Fraction(0)
ONE = Fraction(1)

MAXMIN_UTILITY = "maxmin-utility"
MAXMIN_RENT = "maxmin-rent"
MINMAX_UTILITY = "minmax-utility"
MINMAX_RENT = "minmax-rent"
OBJECTIVE_KINDS = (MAXMIN_UTILITY, MAXMIN_RENT, MINMAX_UTILITY, MINMAX_RENT)


class SolverError(ValueError):
    pass


class InternalInvariantError(SolverError):
    """A condition the correctness argument guarantees failed to hold."""


@dataclass(frozen=True)
class Objective:
    """Selection to compute: extremize utilities or affine-transformed rents.

    `transform` maps each room to (alpha, beta) with beta > 0 and is only
    meaningful for the rent-based kinds; omitted it defaults to the identity
    (alpha=0, beta=1), i.e. plain rents.
    """

    kind: str = MAXMIN_UTILITY
    transform: Optional[Mapping[RoomId, tuple]] = None

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise SolverError(f"unknown objective kind {self.kind!r}")
        if self.transform is not None:
            fixed = {}
            for room, (alpha, beta) in self.transform.items():
                alpha = Fraction(alpha)
                beta = Fraction(beta)
                if beta <= 0:
                    raise SolverError(f"transform for room {room!r} needs beta > 0")
                fixed[room] = (alpha, beta)
            object.__setattr__(self, "transform", fixed)

    @property
    def rent_based(self) -> bool:
        return self.kind in (MAXMIN_RENT, MINMAX_RENT)

    @property
    def maximizing(self) -> bool:
        return self.kind in (MAXMIN_UTILITY, MAXMIN_RENT)

    def resolved_transform(self, e: Economy) -> Mapping[RoomId, tuple]:
        if self.transform is None:
            return {a: (ZERO, ONE) for a in e.rooms}
        missing = set(e.rooms) - set(self.transform)
        if missing:
            raise SolverError(f"transform missing rooms: {sorted(missing)}")
        return self.transform


@dataclass(frozen=True)
class SelectionCertificate:
    """Reachability evidence that an allocation is the chosen selection.

    For each kind the improving money transfer is blocked exactly when the
    extremal agents are connected to the rest of the indifference graph the
    right way around:

    - maxmin utility: every agent has a path to a minimum-utility agent;
    - minmax utility: every agent is reachable from a maximum-utility agent;
    - maxmin rent: every agent is reachable from an occupant of a
      minimum-transformed-rent room;
    - minmax rent: every agent has a path to an occupant of a
      maximum-transformed-rent room.
    """

    kind: str
    ok: bool
    envy_free: bool
    envy_witness: Optional[EnvyWitness]
    extremal_agents: Sequence[AgentId]
    paths: Mapping[AgentId, Sequence[AgentId]]
    failing_agent: Optional[AgentId]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "ok": self.ok,
            "envy_free": self.envy_free,
            "envy_witness": None
            if self.envy_witness is None
            else {
                "envious": self.envy_witness.envious,
                "envied": self.envy_witness.envied,
                "gap": str(self.envy_witness.gap),
            },
            "extremal_agents": list(self.extremal_agents),
            "paths": {i: list(p) for i, p in self.paths.items()},
            "failing_agent": self.failing_agent,
        }


def selection_certificate(e: Economy, z: Allocation, objective: Objective) -> SelectionCertificate:
    """Certify that z is the chosen selection at total sum(z.rents)."""
    witness = envy_witness(e, z)
    if witness is not None:
        return SelectionCertificate(objective.kind, False, False, witness, (), {}, None)
    graph = envy_graph(e, z)
    if objective.rent_based:
        tr = objective.resolved_transform(e)
        score = {a: tr[a][0] + tr[a][1] * z.rents[a] for a in e.rooms}
        pick = min(score.values()) if objective.kind == MAXMIN_RENT else max(score.values())
        rooms = [a for a in e.rooms if score[a] == pick]
        owner = {room: agent for agent, room in z.assignment.items()}
        extremal = tuple(owner[a] for a in rooms)
    else:
        utils = {i: bundle_utility(e, i, z) for i in e.agents}
        pick = min(utils.values()) if objective.kind == MAXMIN_UTILITY else max(utils.values())
        extremal = tuple(i for i in e.agents if utils[i] == pick)

    if objective.kind in (MAXMIN_UTILITY, MINMAX_RENT):
        paths = paths_to_targets(graph, extremal)
        for i in e.agents:
            if i not in paths:
                return SelectionCertificate(objective.kind, False, True, None, extremal, {}, i)
        return SelectionCertificate(objective.kind, True, True, None, extremal, paths, None)
    reached = reachable_from(graph, extremal)
    for i in e.agents:
        if i not in reached:
            return SelectionCertificate(objective.kind, False, True, None, extremal, {}, i)
    paths = {i: (i,) for i in e.agents}
    return SelectionCertificate(objective.kind, True, True, None, extremal, paths, None)


# ---------------------------------------------------------------------------
# Phase one: inflate the total until budgets cannot bind.


def scaled_values(e: Economy) -> Mapping[AgentId, Mapping[RoomId, Fraction]]:
    """Values of the ordinally equivalent quasi-linear economy above budget."""
    out = {}
    for i in e.agents:
        p = e.preferences[i]
        out[i] = {a: (p.values[a] + p.rho * p.budget) / (ONE + p.rho) for a in e.rooms}
    return out


def inflation_total(e: Economy) -> Fraction:
    """A total rent high enough that every envy-free rent exceeds all budgets."""
    values = scaled_values(e)
    spread = max(
        max(values[i].values()) - min(values[i].values()) for i in e.agents
    )
    max_budget = max(e.preferences[i].budget for i in e.agents)
    return e.n * (spread + max_budget)


def initial_allocation(e: Economy, objective: Objective = Objective()):
    """Selection at the inflated total; returns (M, allocation, lp value)."""
    values = scaled_values(e)
    m_high = max(e.total_rent, inflation_total(e))
    sigma = max_sum_assignment(e.agents, e.rooms, values).assignment

    variables = [f"r_{a}" for a in e.rooms] + ["_obj"]
    constraints = [
        lplib.Constraint({f"r_{a}": ONE for a in e.rooms}, lplib.EQ, m_high, "total")
    ]
    for i in e.agents:
        for j in e.agents:
            if i == j:
                continue
            own, other = sigma[i], sigma[j]
            constraints.append(
                lplib.Constraint(
                    {f"r_{own}": ONE, f"r_{other}": -ONE},
                    lplib.LE,
                    values[i][own] - values[i][other],
                    f"ef_{i}_{j}",
                )
            )
    if objective.rent_based:
        tr = objective.resolved_transform(e)
        rel = lplib.LE if objective.kind == MAXMIN_RENT else lplib.GE
        for a in e.rooms:
            alpha, beta = tr[a]
            constraints.append(
                lplib.Constraint({"_obj": ONE, f"r_{a}": -beta}, rel, alpha, f"obj_{a}")
            )
    else:
        rel = lplib.LE if objective.kind == MAXMIN_UTILITY else lplib.GE
        for i in e.agents:
            lam = ONE + e.preferences[i].rho
            constraints.append(
                lplib.Constraint(
                    {"_obj": ONE, f"r_{sigma[i]}": lam},
                    rel,
                    lam * values[i][sigma[i]],
                    f"obj_{i}",
                )
            )
    sense = lplib.MAXIMIZE if objective.maximizing else lplib.MINIMIZE
    sol = lplib.solve_lp(lplib.LinearProgram(variables, sense, {"_obj": ONE}, constraints))
    if sol.status != lplib.OPTIMAL:
        raise InternalInvariantError(
            f"initial selection LP came back {sol.status}; it must be solvable"
        )
    rents = {a: sol.point[f"r_{a}"] for a in e.rooms}
    return m_high, Allocation(sigma, rents), sol.value


# ---------------------------------------------------------------------------
# Phase two: descend to the target total.


@dataclass(frozen=True)
class IterationRecord:
    index: int
    assignment: Mapping[AgentId, RoomId]
    sb_size: int
    matching_weight: Fraction
    lp_value: Fraction
    branch: str  # "accepted" | "corrected"
    descent_rents: Mapping[RoomId, Fraction]  # the rebate LP's point
    rents: Mapping[RoomId, Fraction]  # after the correction, if any
    total: Fraction

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "assignment": dict(self.assignment),
            "sb_size": self.sb_size,
            "matching_weight": str(self.matching_weight),
            "lp_value": str(self.lp_value),
            "branch": self.branch,
            "descent_rents": {a: str(q) for a, q in self.descent_rents.items()},
            "rents": {a: str(q) for a, q in self.rents.items()},
            "total": str(self.total),
        }


@dataclass(frozen=True)
class SolveTrace:
    objective_kind: str
    start_total: Fraction
    start_rents: Mapping[RoomId, Fraction]
    start_assignment: Mapping[AgentId, RoomId]
    iterations: Sequence[IterationRecord]
    # Present only for non-maxmin-utility objectives that needed a
    # fixed-total refinement after the descent.
    refinement: Optional[Mapping] = None

    def to_json_dict(self) -> dict:
        return {
            "objective_kind": self.objective_kind,
            "start_total": str(self.start_total),
            "start_rents": {a: str(q) for a, q in self.start_rents.items()},
            "start_assignment": dict(self.start_assignment),
            "iterations": [rec.to_json_dict() for rec in self.iterations],
            "refinement": None
            if self.refinement is None
            else {
                "assignment": dict(self.refinement["assignment"]),
                "rents": {a: str(q) for a, q in self.refinement["rents"].items()},
            },
        }


def _descent_constraints(e, rents_prev, sigma, lin, sb, floor_total):
    """Shared constraint block: stay under the previous rents, keep the
    linearized economy envy-free, honor strict budget floors, collect at
    least the target.

    Floors are only placed where the utility actually kinks: a rho = 0
    agent's budget never changes any slope, so her pairs cannot invalidate
    the linearization and must not block the rebate."""
    constraints = [
        lplib.Constraint({f"t_{a}": ONE for a in e.rooms}, lplib.GE, floor_total, "floor")
    ]
    for a in e.rooms:
        constraints.append(lplib.Constraint({f"t_{a}": ONE}, lplib.LE, rents_prev[a], f"cap_{a}"))
    for i in e.agents:
        own = sigma[i]
        for j in e.agents:
            if i == j:
                continue
            other = sigma[j]
            coeffs = {f"t_{other}": lin.lam[(i, other)]}
            coeffs[f"t_{own}"] = coeffs.get(f"t_{own}", ZERO) - lin.lam[(i, own)]
            constraints.append(
                lplib.Constraint(
                    coeffs, lplib.GE, lin.nu[(i, other)] - lin.nu[(i, own)], f"ef_{i}_{j}"
                )
            )
    for (i, a) in sorted(sb):
        if e.preferences[i].rho > 0:
            constraints.append(
                lplib.Constraint({f"t_{a}": ONE}, lplib.GE, e.preferences[i].budget, f"sb_{i}_{a}")
            )
    return constraints


def _objective_rows(e, sigma, lin, objective, bound_var, as_var=True, level=None, prefix="t"):
    """Rows tying the objective variable (or a fixed level) to the selection's
    score terms. Orientation follows the kind: the level sits at or below
    every score for maxmin kinds, at or above for minmax kinds."""
    rel = lplib.LE if objective.maximizing else lplib.GE
    if objective.rent_based:
        tr = objective.resolved_transform(e)
        items = [(f"obj_{a}", {f"{prefix}_{a}": -tr[a][1]}, tr[a][0]) for a in e.rooms]
    else:
        items = [
            (
                f"obj_{i}",
                {f"{prefix}_{sigma[i]}": lin.lam[(i, sigma[i])]},
                lin.nu[(i, sigma[i])],
            )
            for i in e.agents
        ]
    rows = []
    for name, coeffs, bound in items:
        if as_var:
            c = dict(coeffs)
            c[bound_var] = c.get(bound_var, ZERO) + ONE
            rows.append(lplib.Constraint(c, rel, bound, name))
        else:
            rows.append(lplib.Constraint(dict(coeffs), rel, bound - level, name))
    return rows


def slope_count(e: Economy) -> int:
    """Distinct local utility slopes: 1 plus each distinct 1 + rho.

    This is the menu size whenever the menu contains zero, and menu size
    plus one otherwise; it is what bounds the distinct tie-matching weights.
    """
    return len({ONE} | {ONE + q for q in e.rho_menu})


def iteration_bound(e: Economy) -> int:
    """Hard cap on descent iterations: strict-budget releases plus distinct
    matching-weight levels plus the terminal step."""
    n = e.n
    return n * n + (n + 1) ** (slope_count(e) - 1) + 1


def descend(e: Economy, m_high: Fraction, z0: Allocation):
    """Lower the total from m_high to the economy's rent, maxmin throughout.

    z0 must be a maxmin utility selection at total m_high (phase one output).
    Returns the final allocation and the per-iteration trace. Raises
    InternalInvariantError if any invariant of the correctness argument
    (monotone rents, strict total progress, the iteration bound) breaks.
    """
    objective = Objective(MAXMIN_UTILITY)
    target = e.total_rent
    n = e.n
    max_iters = iteration_bound(e)

    trace_iters = []
    z = z0
    s = 0
    while z.total() > target:
        s += 1
        if s > max_iters:
            raise InternalInvariantError(
                f"descent exceeded its iteration bound of {max_iters}"
            )
        rents_prev = dict(z.rents)
        lin = linearize(e, rents_prev)
        sb = budget_sets(e, rents_prev).strict
        matching = max_tie_matching(tie_graph(e, z))
        sigma = matching.assignment

        common = _descent_constraints(e, rents_prev, sigma, lin, sb, target)
        tvars = [f"t_{a}" for a in e.rooms]

        program = lplib.LinearProgram(
            tvars + ["_obj"],
            lplib.MAXIMIZE,
            {"_obj": ONE},
            common + _objective_rows(e, sigma, lin, objective, "_obj"),
        )
        sol = lplib.solve_lp(program)
        if sol.status != lplib.OPTIMAL:
            raise InternalInvariantError(f"descent LP {sol.status}")
        level = sol.value
        # Among the optima, rebate as much rent as possible.
        tighten = lplib.LinearProgram(
            tvars,
            lplib.MINIMIZE,
            {v: ONE for v in tvars},
            common + _objective_rows(e, sigma, lin, objective, None, as_var=False, level=level),
        )
        sol = lplib.solve_lp(tighten)
        if sol.status != lplib.OPTIMAL:
            raise InternalInvariantError(f"descent tightening LP {sol.status}")

        t_new = {a: sol.point[f"t_{a}"] for a in e.rooms}
        z_cand = Allocation(sigma, t_new)
        cert = selection_certificate(e, z_cand, objective)
        if cert.ok:
            branch = "accepted"
            z_next = z_cand
        else:
            # The rebate overshot the maxmin property. Lift rents back up to
            # the certified utility level; along the fixed matching this
            # lands exactly on the selection path again.
            branch = "corrected"
            lift_rows = []
            for a in e.rooms:
                lift_rows.append(
                    lplib.Constraint({f"t_{a}": ONE}, lplib.GE, t_new[a], f"lift_{a}")
                )
            for i in e.agents:
                own = sigma[i]
                for j in e.agents:
                    if i == j:
                        continue
                    other = sigma[j]
                    coeffs = {f"t_{other}": lin.lam[(i, other)]}
                    coeffs[f"t_{own}"] = coeffs.get(f"t_{own}", ZERO) - lin.lam[(i, own)]
                    lift_rows.append(
                        lplib.Constraint(
                            coeffs, lplib.GE, lin.nu[(i, other)] - lin.nu[(i, own)], f"ef_{i}_{j}"
                        )
                    )
            lift_rows += _objective_rows(
                e, sigma, lin, objective, None, as_var=False, level=level
            )
            lift = lplib.LinearProgram(
                tvars,
                lplib.MAXIMIZE,
                {v: ONE for v in tvars},
                lift_rows,
            )
            sol = lplib.solve_lp(lift)
            if sol.status != lplib.OPTIMAL:
                raise InternalInvariantError(f"correction LP {sol.status}")
            z_next = Allocation(sigma, {a: sol.point[f"t_{a}"] for a in e.rooms})

        if any(z_next.rents[a] > rents_prev[a] for a in e.rooms):
            raise InternalInvariantError("rents rose during a descent iteration")
        if z_next.total() >= z.total():
            raise InternalInvariantError("descent made no progress on the total")
        if z_next.total() < target:
            raise InternalInvariantError("descent undershot the target total")
        trace_iters.append(
            IterationRecord(
                index=s,
                assignment=dict(sigma),
                sb_size=len(sb),
                matching_weight=matching.weight,
                lp_value=level,
                branch=branch,
                descent_rents=dict(t_new),
                rents=dict(z_next.rents),
                total=z_next.total(),
            )
        )
        z = z_next

    trace = SolveTrace(
        MAXMIN_UTILITY,
        z0.total(),
        dict(z0.rents),
        dict(z0.assignment),
        tuple(trace_iters),
    )
    return z, trace


# The fixed-total sweep walks n! x (cells per room)^n exact LPs. Four agents
# stay comfortably interactive; five already runs for minutes.
MAX_REFINEMENT_AGENTS = 5


def _regime_cells(e: Economy, lo: Fraction, hi: Fraction):
    """Per-room interval products on which every utility is a single line."""
    import itertools

    cuts = sorted({e.preferences[i].budget for i in e.agents if e.preferences[i].rho > 0})
    cuts = [c for c in cuts if lo < c < hi]
    bounds = [lo] + cuts + [hi]
    intervals = list(zip(bounds, bounds[1:]))
    yield from itertools.product(intervals, repeat=len(e.rooms))


def _piece(e, i, room, lo, hi):
    """The exact linear form of u_i on [lo, hi]; requires no interior kink."""
    p = e.preferences[i]
    if p.rho == 0 or hi <= p.budget:
        return {room: -ONE}, p.values[room]
    if lo >= p.budget:
        return {room: -(ONE + p.rho)}, p.values[room] + p.rho * p.budget
    raise SolverError("regime cell straddles a budget kink")


def fixed_total_optimum(e: Economy, objective: Objective, total: Fraction) -> Allocation:
    """Exact optimum of a rent or minmax selection at a fixed total.

    Walks every assignment and budget-regime cell of the envy-free set and
    solves one exact LP per cell. Exponential in n by nature; guarded to the
    sizes the package targets for these objectives.
    """
    import itertools

    if e.n > MAX_REFINEMENT_AGENTS:
        raise SolverError(
            f"objective {objective.kind} is supported for n <= {MAX_REFINEMENT_AGENTS} "
            "when the inflated total exceeds the target"
        )
    # Envy-free rents sit within one agent value spread (plus the worst
    # budget penalty on the per-head average) of that average.
    spread = max(
        max(e.preferences[i].values.values()) - min(e.preferences[i].values.values())
        for i in e.agents
    )
    rho_max = max(e.preferences[i].rho for i in e.agents)
    per_head = total / e.n
    d_max = spread + rho_max * max(ZERO, per_head)
    lo, hi = per_head - d_max, per_head + d_max

    tvars = [f"t_{a}" for a in e.rooms]
    best = None
    better = (lambda x, y: x > y) if objective.maximizing else (lambda x, y: x < y)
    for perm in itertools.permutations(e.rooms):
        sigma = {i: a for i, a in zip(e.agents, perm)}
        for cell in _regime_cells(e, lo, hi):
            if sum(c[0] for c in cell) > total or sum(c[1] for c in cell) < total:
                continue
            boxes = {a: cell[k] for k, a in enumerate(e.rooms)}
            constraints = [
                lplib.Constraint({v: ONE for v in tvars}, lplib.EQ, total, "total")
            ]
            for a in e.rooms:
                constraints.append(lplib.Constraint({f"t_{a}": ONE}, lplib.GE, boxes[a][0], f"lo_{a}"))
                constraints.append(lplib.Constraint({f"t_{a}": ONE}, lplib.LE, boxes[a][1], f"hi_{a}"))
            for i in e.agents:
                own = sigma[i]
                oc, ocst = _piece(e, i, own, *boxes[own])
                for j in e.agents:
                    if i == j:
                        continue
                    other = sigma[j]
                    cc, ccst = _piece(e, i, other, *boxes[other])
                    coeffs = {}
                    for room, q in oc.items():
                        coeffs[f"t_{room}"] = coeffs.get(f"t_{room}", ZERO) + q
                    for room, q in cc.items():
                        coeffs[f"t_{room}"] = coeffs.get(f"t_{room}", ZERO) - q
                    constraints.append(
                        lplib.Constraint(coeffs, lplib.GE, ccst - ocst, f"ef_{i}_{j}")
                    )
            rel = lplib.LE if objective.maximizing else lplib.GE
            if objective.rent_based:
                tr = objective.resolved_transform(e)
                for a in e.rooms:
                    alpha, beta = tr[a]
                    constraints.append(
                        lplib.Constraint({"_obj": ONE, f"t_{a}": -beta}, rel, alpha, f"obj_{a}")
                    )
            else:
                for i in e.agents:
                    own = sigma[i]
                    oc, ocst = _piece(e, i, own, *boxes[own])
                    coeffs = {"_obj": ONE}
                    for room, q in oc.items():
                        coeffs[f"t_{room}"] = coeffs.get(f"t_{room}", ZERO) - q
                    constraints.append(lplib.Constraint(coeffs, rel, ocst, f"obj_{i}"))
            program = lplib.LinearProgram(
                tvars + ["_obj"],
                lplib.MAXIMIZE if objective.maximizing else lplib.MINIMIZE,
                {"_obj": ONE},
                constraints,
            )
            sol = lplib.solve_lp(program)
            if sol.status != lplib.OPTIMAL:
                continue
            if best is None or better(sol.value, best[0]):
                best = (sol.value, Allocation(sigma, {a: sol.point[f"t_{a}"] for a in e.rooms}))
    if best is None:
        raise InternalInvariantError("no envy-free cell found at the target total")
    return best[1]


@dataclass(frozen=True)
class SolveResult:
    allocation: Allocation
    value: Fraction
    trace: SolveTrace
    certificate: SelectionCertificate


def objective_value(e: Economy, z: Allocation, objective: Objective) -> Fraction:
    if objective.rent_based:
        tr = objective.resolved_transform(e)
        scores = [tr[a][0] + tr[a][1] * z.rents[a] for a in e.rooms]
    else:
        scores = [bundle_utility(e, i, z) for i in e.agents]
    return min(scores) if objective.maximizing else max(scores)


def solve(e: Economy, objective: Objective = Objective()) -> SolveResult:
    """Compute the chosen envy-free selection at the economy's total rent.

    The maxmin utility selection runs the two-phase descent end to end. The
    rent and minmax selections substitute their constraints into the phase
    one LP; when the inflated total already equals the target that LP is the
    whole computation, otherwise the maxmin descent reaches the target total
    and an exact fixed-total sweep of the envy-free regime cells finishes
    the job (substituting the same constraint block per cell).
    """
    if objective.kind == MAXMIN_UTILITY:
        m_high, z0, _val = initial_allocation(e, objective)
        z, trace = descend(e, m_high, z0)
    else:
        m_high = max(e.total_rent, inflation_total(e))
        if m_high == e.total_rent:
            _m, z, _val = initial_allocation(e, objective)
            trace = SolveTrace(objective.kind, m_high, dict(z.rents), dict(z.assignment), ())
        else:
            _m, z0, _val = initial_allocation(e, Objective(MAXMIN_UTILITY))
            z_mid, base = descend(e, m_high, z0)
            if selection_certificate(e, z_mid, objective).ok:
                z = z_mid
                refinement = None
            else:
                z = fixed_total_optimum(e, objective, e.total_rent)
                refinement = {"assignment": dict(z.assignment), "rents": dict(z.rents)}
            trace = SolveTrace(
                objective.kind,
                base.start_total,
                base.start_rents,
                base.start_assignment,
                base.iterations,
                refinement,
            )
    cert = selection_certificate(e, z, objective)
    if not cert.ok:
        raise InternalInvariantError("final allocation failed its own certificate")
    if z.total() != e.total_rent:
        raise InternalInvariantError("final allocation does not collect the rent")
    return SolveResult(z, objective_value(e, z, objective), trace, cert)


def has_noncompensation_ef(e: Economy):
    """Is there an envy-free allocation where nobody is paid to take a room?

    Maximizes the minimum rent over the envy-free set; the answer is yes
    exactly when that optimum is >= 0. Returns (answer, witness allocation).
    """
    result = solve(e, Objective(MAXMIN_RENT))
    witness = result.allocation
    return min(witness.rents.values()) >= 0, witness


def rebate_step(e: Economy, z: Allocation, eta: Fraction) -> Allocation:
    """One elementary rebate: lower rents by up to eta, reshuffling along the
    max-weight tie matching, preserving no-envy and the budget regime."""
    eta = Fraction(eta)
    if eta < 0:
        raise SolverError("eta must be >= 0")
    witness = envy_witness(e, z)
    if witness is not None:
        raise SolverError(f"rebate step requires an envy-free start: {witness}")
    if eta == 0:
        return z
    rents = dict(z.rents)
    lin = linearize(e, rents)
    sb = budget_sets(e, rents).strict
    sigma = max_tie_matching(tie_graph(e, z)).assignment
    constraints = _descent_constraints(e, rents, sigma, lin, sb, z.total() - eta)
    tvars = [f"t_{a}" for a in e.rooms]
    sol = lplib.solve_lp(
        lplib.LinearProgram(tvars, lplib.MINIMIZE, {v: ONE for v in tvars}, constraints)
    )
    if sol.status != lplib.OPTIMAL:
        raise InternalInvariantError(f"rebate LP {sol.status}; it is feasible by construction")
    out = Allocation(sigma, {a: sol.point[f"t_{a}"] for a in e.rooms})
    if envy_witness(e, out) is not None:
        raise InternalInvariantError("rebate step produced envy")
    return out

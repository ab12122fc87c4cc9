"""Independent brute-force oracles over the true envy-free set.

The solver package computes selections by descent; everything here instead
optimizes directly over the exact envy-free set, assignment by assignment,
and is used to validate the solver. Utilities are piecewise linear with a
kink at each budget, which makes the envy-free set a union of polytopes
(one per room-budget regime). A small exact branch-and-bound handles that:
each node relaxes the kinked side of every envy constraint by its chord on
the node's box, and branching splits a room interval at a budget. At leaf
nodes the chords coincide with the exact pieces, so the relaxation is tight
and the search terminates with the exact optimum.

Everything runs on Fractions through the same exact LP layer the solver
uses, but no code path below ever calls into the solver module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import lp as lplib
from .matching import max_tie_matching
from .model import (
    AgentId,
    Allocation,
    Economy,
    ModelError,
    RoomId,
    budget_sets,
    bundle_utility,
    envy_witness,
    is_envy_free,
    maxmin_certificate,
    tie_graph,
)

ZERO = Fraction(0)
ONE = Fraction(1)

MAX_ORACLE_AGENTS = 6


class OracleError(ValueError):
    pass


class PreconditionError(OracleError):
    """A checker was fed inputs outside its declared hypotheses."""


def theta_constant(n: int, rho_bar: Fraction) -> Fraction:
    """Lower bound on how fast a room's max envy-free rent grows in the total."""
    return ONE / (n * (ONE + rho_bar) ** (n * n))


def rent_box(e: Economy, total: Fraction) -> tuple:
    """A box certain to contain every envy-free rent vector at `total`.

    At an envy-free point the occupant of the dearest room weakly prefers it
    to the cheapest room, which caps the rent spread by her value spread
    plus the worst budget penalty on the cheapest rent; the cheapest rent
    never exceeds the per-head average. Everything then sits within one
    spread of that average.
    """
    spread = max(
        max(e.preferences[i].values.values()) - min(e.preferences[i].values.values())
        for i in e.agents
    )
    rho_max = max(e.preferences[i].rho for i in e.agents)
    per_head = total / e.n
    d_max = spread + rho_max * max(ZERO, per_head)
    return per_head - d_max, per_head + d_max


def _own_pieces(e: Economy, i: AgentId, room: RoomId, lo=None, hi=None):
    """Linear pieces of u_i(t, room) whose min is the exact utility.

    When a box [lo, hi] is given, a piece that the other one dominates
    throughout the box is dropped (lower-bounding a min only needs the
    pieces that can attain it)."""
    p = e.preferences[i]
    below = ({room: -ONE}, p.values[room])
    if p.rho == 0:
        return (below,)
    above = ({room: -(ONE + p.rho)}, p.values[room] + p.rho * p.budget)
    if lo is not None and lo >= p.budget:
        return (above,)
    if hi is not None and hi <= p.budget:
        return (below,)
    return below, above


def _chord(e: Economy, i: AgentId, room: RoomId, lo: Fraction, hi: Fraction):
    """Linear lower bound of u_i(t, room) on [lo, hi]; exact off the kink."""
    p = e.preferences[i]
    if p.rho == 0 or hi <= p.budget:
        return {room: -ONE}, p.values[room]
    if lo >= p.budget:
        return {room: -(ONE + p.rho)}, p.values[room] + p.rho * p.budget
    u_lo = e.utility(i, lo, room)
    u_hi = e.utility(i, hi, room)
    slope = (u_hi - u_lo) / (hi - lo)
    return ({room: slope}, u_lo - slope * lo)


def _linear(coeffs_const, sign=ONE):
    coeffs, const = coeffs_const
    return {v: sign * q for v, q in coeffs.items()}, sign * const


@dataclass(frozen=True)
class EfObjective:
    """What to optimize over the envy-free set at a fixed total."""

    kind: str  # maxmin_utility | minmax_utility | maxmin_rent | minmax_rent |
    #            max_room_rent | min_room_rent | min_linf
    transform: Optional[Mapping[RoomId, tuple]] = None
    room: Optional[RoomId] = None
    target: Optional[Mapping[RoomId, Fraction]] = None

    @property
    def maximizing(self) -> bool:
        return self.kind in ("maxmin_utility", "maxmin_rent", "max_room_rent")


def _true_value(e: Economy, obj: EfObjective, sigma: Mapping[AgentId, RoomId], rents) -> Fraction:
    if obj.kind in ("maxmin_utility", "minmax_utility"):
        utils = [e.utility(i, rents[sigma[i]], sigma[i]) for i in e.agents]
        return min(utils) if obj.kind == "maxmin_utility" else max(utils)
    if obj.kind in ("maxmin_rent", "minmax_rent"):
        vals = [obj.transform[a][0] + obj.transform[a][1] * rents[a] for a in e.rooms]
        return min(vals) if obj.kind == "maxmin_rent" else max(vals)
    if obj.kind == "max_room_rent" or obj.kind == "min_room_rent":
        return rents[obj.room]
    if obj.kind == "min_linf":
        return max(abs(rents[a] - obj.target[a]) for a in e.rooms)
    raise OracleError(f"unknown objective kind {obj.kind!r}")


def _node_lp(e, sigma, total, obj, box, floor):
    variables = list(e.rooms)
    constraints = [lplib.Constraint({a: ONE for a in e.rooms}, lplib.EQ, total, "total")]
    for a in e.rooms:
        lo, hi = box[a]
        constraints.append(lplib.Constraint({a: ONE}, lplib.GE, lo, f"lo_{a}"))
        constraints.append(lplib.Constraint({a: ONE}, lplib.LE, hi, f"hi_{a}"))
    # Envy-freeness, relaxed: every own piece dominates the other room's chord.
    for i in e.agents:
        own = sigma[i]
        for j in e.agents:
            if i == j:
                continue
            other = sigma[j]
            ch_coeffs, ch_const = _chord(e, i, other, *box[other])
            for piece in _own_pieces(e, i, own, *box[own]):
                p_coeffs, p_const = piece
                coeffs = dict(p_coeffs)
                for v, q in ch_coeffs.items():
                    coeffs[v] = coeffs.get(v, ZERO) - q
                constraints.append(
                    lplib.Constraint(coeffs, lplib.GE, ch_const - p_const, f"ef_{i}_{j}")
                )
    if floor is not None:
        for i in e.agents:
            for p_coeffs, p_const in _own_pieces(e, i, sigma[i], *box[sigma[i]]):
                constraints.append(
                    lplib.Constraint(dict(p_coeffs), lplib.GE, floor - p_const, f"floor_{i}")
                )

    sense = lplib.MAXIMIZE if obj.maximizing else lplib.MINIMIZE
    if obj.kind in ("maxmin_utility", "minmax_utility"):
        variables.append("_obj")
        objective = {"_obj": ONE}
        for i in e.agents:
            own = sigma[i]
            if obj.kind == "maxmin_utility":
                # _obj <= every own piece that can attain the min
                for p_coeffs, p_const in _own_pieces(e, i, own, *box[own]):
                    coeffs = {"_obj": ONE}
                    for v, q in p_coeffs.items():
                        coeffs[v] = coeffs.get(v, ZERO) - q
                    constraints.append(lplib.Constraint(coeffs, lplib.LE, p_const, f"obj_{i}"))
            else:
                # _obj >= chord of own utility (tight at leaves)
                ch_coeffs, ch_const = _chord(e, i, own, *box[own])
                coeffs = {"_obj": ONE}
                for v, q in ch_coeffs.items():
                    coeffs[v] = coeffs.get(v, ZERO) - q
                constraints.append(lplib.Constraint(coeffs, lplib.GE, ch_const, f"obj_{i}"))
    elif obj.kind in ("maxmin_rent", "minmax_rent"):
        variables.append("_obj")
        objective = {"_obj": ONE}
        rel = lplib.LE if obj.kind == "maxmin_rent" else lplib.GE
        for a in e.rooms:
            alpha, beta = obj.transform[a]
            constraints.append(
                lplib.Constraint({"_obj": ONE, a: -beta}, rel, alpha, f"obj_{a}")
            )
    elif obj.kind in ("max_room_rent", "min_room_rent"):
        objective = {obj.room: ONE}
    elif obj.kind == "min_linf":
        variables.append("_obj")
        objective = {"_obj": ONE}
        for a in e.rooms:
            constraints.append(
                lplib.Constraint({"_obj": ONE, a: -ONE}, lplib.GE, -obj.target[a], f"d1_{a}")
            )
            constraints.append(
                lplib.Constraint({"_obj": ONE, a: ONE}, lplib.GE, obj.target[a], f"d2_{a}")
            )
    else:
        raise OracleError(f"unknown objective kind {obj.kind!r}")
    return lplib.LinearProgram(variables, sense, objective, constraints)


def _kinks_inside(e: Economy, box) -> list:
    """(room, budget) pairs splittable inside the node box, canonical order."""
    cuts = sorted({e.preferences[i].budget for i in e.agents if e.preferences[i].rho > 0})
    out = []
    for a in e.rooms:
        lo, hi = box[a]
        for b in cuts:
            if lo < b < hi:
                out.append((a, b))
    return out


def _pick_kink(e: Economy, sigma, box, rents, kinks, obj):
    """Prefer a kink whose chord is actually slack at the node optimum.

    A chord is responsible for the relaxation gap only when the optimum sits
    on the far side of the budget from where the true utility is lower;
    splitting there tightens the node. Falls back to the first kink."""
    kinkset = set(kinks)
    for i in e.agents:
        p = e.preferences[i]
        if p.rho == 0:
            continue
        own = sigma[i]
        own_u = e.utility(i, rents[own], own)
        for j in e.agents:
            if i == j:
                continue
            other = sigma[j]
            if (other, p.budget) not in kinkset:
                continue
            ch_coeffs, ch_const = _chord(e, i, other, *box[other])
            chord_val = ch_coeffs.get(other, ZERO) * rents[other] + ch_const
            if own_u < e.utility(i, rents[other], other) or chord_val < e.utility(
                i, rents[other], other
            ):
                return other, p.budget
        if obj.kind == "minmax_utility" and (own, p.budget) in kinkset:
            return own, p.budget
    return kinks[0]


def _piecewise_max(e, i, j, room, lo, hi) -> Fraction:
    """Max of u_i(t, room) - u_j(t, room) for t in [lo, hi], exactly.

    The difference is piecewise linear with kinks only at the two budgets,
    so the maximum sits at an endpoint or an interior kink."""
    pts = [lo, hi]
    for agent in (i, j):
        b = e.preferences[agent].budget
        if lo < b < hi:
            pts.append(b)
    return max(e.utility(i, t, room) - e.utility(j, t, room) for t in pts)


def _cycle_swaps_possible(e, sigma, lo, hi) -> bool:
    """Necessary condition for envy-freeness within the box.

    For any cyclic reshuffle, summing the envy-free inequalities gives, per
    room, (owner's utility minus her predecessor's utility) at that room's
    rent; the sum of the per-room maxima of these one-dimensional kinked
    functions must be nonnegative. Kills most assignments with no LP work.
    """
    agents = list(e.agents)
    n = len(agents)
    # pair_max[x][y] = max over the box of u_x(t, room of x) - u_y(t, room of x)
    pair_max = {}
    for i in agents:
        for j in agents:
            if i != j:
                pair_max[(i, j)] = _piecewise_max(e, i, j, sigma[i], lo, hi)
    for size in range(2, n + 1):
        for subset in itertools.combinations(agents, size):
            first = subset[0]
            for rest in itertools.permutations(subset[1:]):
                cycle = (first,) + rest
                total = ZERO
                for k, owner in enumerate(cycle):
                    pred = cycle[k - 1]
                    total += pair_max[(owner, pred)]
                if total < 0:
                    return False
    return True


def ef_optimize(
    e: Economy,
    sigma: Mapping[AgentId, RoomId],
    total: Fraction,
    obj: EfObjective,
    floor: Optional[Fraction] = None,
) -> Optional[tuple]:
    """Exact optimum of `obj` over envy-free rents with this assignment.

    Returns (value, rents) or None when the assignment admits no envy-free
    allocation at this total (subject to the optional min-utility floor).
    """
    lo, hi = rent_box(e, total)
    if not _cycle_swaps_possible(e, sigma, lo, hi):
        return None
    root = {a: (lo, hi) for a in e.rooms}
    best: Optional[tuple] = None
    better = (lambda x, y: x > y) if obj.maximizing else (lambda x, y: x < y)

    stack = [root]
    while stack:
        box = stack.pop()
        sol = lplib.solve_lp(_node_lp(e, sigma, total, obj, box, floor))
        if sol.status == lplib.INFEASIBLE:
            continue
        if sol.status != lplib.OPTIMAL:
            raise OracleError("boxed node LP cannot be unbounded")
        if best is not None and not better(sol.value, best[0]):
            continue
        rents = {a: sol.point[a] for a in e.rooms}
        z = Allocation(dict(sigma), rents)
        truly_ok = is_envy_free(e, z) and (
            floor is None or all(bundle_utility(e, i, z) >= floor for i in e.agents)
        )
        if truly_ok:
            val = _true_value(e, obj, sigma, rents)
            if best is None or better(val, best[0]):
                best = (val, rents)
            if val == sol.value:
                continue  # node solved exactly
        kinks = _kinks_inside(e, box)
        if not kinks:
            # Leaf LPs are exact, so an optimal point here must be envy-free.
            assert truly_ok, "leaf relaxation disagreed with the exact check"
            continue
        room, cut = _pick_kink(e, sigma, box, rents, kinks, obj)
        lo_a, hi_a = box[room]
        upper = dict(box)
        upper[room] = (cut, hi_a)
        lower = dict(box)
        lower[room] = (lo_a, cut)
        stack.append(upper)
        stack.append(lower)
    return best


@dataclass(frozen=True)
class AssignmentOutcome:
    feasible: bool
    value: Optional[Fraction] = None
    rents: Optional[Mapping[RoomId, Fraction]] = None


@dataclass(frozen=True)
class OracleResult:
    optimum: Allocation
    value: Fraction
    table: Mapping[tuple, AssignmentOutcome]  # rooms in agent order -> outcome


def _assignments(e: Economy):
    for perm in itertools.permutations(e.rooms):
        yield {i: a for i, a in zip(e.agents, perm)}, perm


def _guard_size(e: Economy, limit: int = MAX_ORACLE_AGENTS):
    if e.n > limit:
        raise OracleError(f"oracle supports at most {limit} agents, got {e.n}")


def brute_force_optimize(
    e: Economy, obj: EfObjective, total: Optional[Fraction] = None
) -> Optional[tuple]:
    """Optimum of `obj` over the whole envy-free set (all assignments).

    Returns (value, rents, assignment) or None if F is empty at this total
    (which cannot happen for well-formed economies, but guards stay honest).
    """
    _guard_size(e)
    total = e.total_rent if total is None else total
    best = None
    better = (lambda x, y: x > y) if obj.maximizing else (lambda x, y: x < y)
    for sigma, _perm in _assignments(e):
        got = ef_optimize(e, sigma, total, obj)
        if got is None:
            continue
        val, rents = got
        if best is None or better(val, best[0]):
            best = (val, rents, sigma)
    return best


def brute_force_maxmin(e: Economy) -> OracleResult:
    """Enumerate all assignments and solve each exactly; global maxmin."""
    _guard_size(e)
    obj = EfObjective("maxmin_utility")
    table = {}
    best_perm = None
    best = None
    for sigma, perm in _assignments(e):
        got = ef_optimize(e, sigma, e.total_rent, obj)
        if got is None:
            table[perm] = AssignmentOutcome(False)
            continue
        val, rents = got
        table[perm] = AssignmentOutcome(True, val, rents)
        if best is None or val > best:
            best = val
            best_perm = perm
    if best is None:
        raise OracleError("no envy-free allocation found; this should be impossible")
    sigma = {i: a for i, a in zip(e.agents, best_perm)}
    optimum = Allocation(sigma, dict(table[best_perm].rents))
    return OracleResult(optimum, best, table)


def maxmin_rent_range(e: Economy, total: Fraction, value: Fraction) -> Mapping[RoomId, tuple]:
    """Per-room rent range across all maxmin allocations at `total`.

    `value` must be the maxmin value; the range is computed by optimizing
    each room's rent with the min-utility floor pinned to `value`.
    """
    _guard_size(e)
    ranges = {}
    for a in e.rooms:
        lo = None
        hi = None
        for sigma, _perm in _assignments(e):
            up = ef_optimize(e, sigma, total, EfObjective("max_room_rent", room=a), floor=value)
            dn = ef_optimize(e, sigma, total, EfObjective("min_room_rent", room=a), floor=value)
            if up is not None:
                hi = up[0] if hi is None else max(hi, up[0])
            if dn is not None:
                lo = dn[0] if lo is None else min(lo, dn[0])
        ranges[a] = (lo, hi)
    return ranges


def linf_distance_to_ef(e: Economy, rents: Mapping[RoomId, Fraction],
                        total: Optional[Fraction] = None) -> Fraction:
    """Exact L-infinity distance from a rent vector to the envy-free set."""
    got = brute_force_optimize(e, EfObjective("min_linf", target=dict(rents)), total)
    if got is None:
        raise OracleError("empty envy-free set")
    return got[0]


# ---------------------------------------------------------------------------
# Executable forms of the perturbation results used for acceptance testing.


@dataclass(frozen=True)
class PerturbationEntry:
    delta: Fraction
    rents: Mapping[RoomId, Fraction]
    rents_strictly_lower: bool
    utilities_strictly_higher: bool
    certified_maxmin: bool

    @property
    def ok(self) -> bool:
        return self.rents_strictly_lower and self.utilities_strictly_higher and self.certified_maxmin


@dataclass(frozen=True)
class PerturbationReport:
    entries: Sequence[PerturbationEntry]
    violations: Sequence[Fraction]  # deltas that failed


def check_h_maxmin_perturbation(e: Economy, z: Allocation, deltas: Sequence[Fraction]) -> PerturbationReport:
    """Rebates along the max-weight tie matching keep the maxmin property.

    For each delta > 0 in the grid, re-optimizes at total m - delta with the
    matching fixed, then checks strictly lower rents, strictly higher
    utilities, and the maxmin certificate. delta = 0 must reproduce z.
    """
    cert = maxmin_certificate(e, z)
    if not cert.is_maxmin:
        raise PreconditionError("perturbation check requires a maxmin input allocation")
    mu = max_tie_matching(tie_graph(e, z)).assignment
    entries = []
    violations = []
    for delta in deltas:
        delta = Fraction(delta)
        if delta == 0:
            same = ef_optimize(e, mu, e.total_rent, EfObjective("maxmin_utility"))
            identical = same is not None and all(
                same[1][a] == z.rents[a] for a in e.rooms
            )
            entries.append(PerturbationEntry(delta, z.rents, identical, identical, cert.is_maxmin))
            if not identical:
                violations.append(delta)
            continue
        if delta < 0:
            raise PreconditionError("deltas must be >= 0")
        got = ef_optimize(e, mu, e.total_rent - delta, EfObjective("maxmin_utility"))
        if got is None:
            violations.append(delta)
            entries.append(PerturbationEntry(delta, {}, False, False, False))
            continue
        _val, rents = got
        z_new = Allocation(mu, rents)
        lower = all(rents[a] < z.rents[a] for a in e.rooms)
        higher = all(
            bundle_utility(e, i, z_new) > bundle_utility(e, i, z) for i in e.agents
        )
        certified = maxmin_certificate(e.with_total(e.total_rent - delta), z_new).is_maxmin
        entry = PerturbationEntry(delta, rents, lower, higher, certified)
        entries.append(entry)
        if not entry.ok:
            violations.append(delta)
    return PerturbationReport(tuple(entries), tuple(violations))


def safe_perturbation_deltas(e: Economy, z: Allocation, count: int = 3) -> list:
    """A conservative shrinking delta grid for the perturbation check.

    Uses the slack to the nearest budget crossing and the smallest positive
    utility gap as a scale; heuristic, but keeps the grid inside the range
    where the perturbation result is guaranteed to apply.
    """
    slacks = [Fraction(1)]
    bs = budget_sets(e, z.rents).strict
    for (i, a) in bs:
        slacks.append(z.rents[a] - e.preferences[i].budget)
    gaps = []
    for i in e.agents:
        own = bundle_utility(e, i, z)
        for j in e.agents:
            if i != j:
                gap = own - bundle_utility(e, i, z, j)
                if gap > 0:
                    gaps.append(gap)
    rho_max = max(e.preferences[i].rho for i in e.agents)
    if gaps:
        slacks.append(min(gaps) / (2 * (ONE + rho_max)))
    base = min(slacks) / 2
    if base <= 0:
        base = Fraction(1, 1000)
    return [base / (2 ** k) for k in range(count)]


def check_converse_perturbation(e: Economy, z: Allocation, z_low: Allocation) -> bool:
    """If rents dropped componentwise with the same assignment, same weak
    budget sets, and no envy at either end, the shared assignment must be a
    max-weight tie matching at the higher point."""
    if z.assignment != z_low.assignment:
        raise PreconditionError("the two allocations must share their assignment")
    if envy_witness(e, z) is not None:
        raise PreconditionError("upper allocation is not envy-free")
    if envy_witness(e, z_low) is not None:
        raise PreconditionError("lower allocation is not envy-free")
    if z_low.total() >= z.total():
        raise PreconditionError("lower allocation must collect strictly less rent")
    if not all(z_low.rents[a] < z.rents[a] for a in e.rooms):
        raise PreconditionError("rents must drop strictly for every room")
    if budget_sets(e, z.rents).weak != budget_sets(e, z_low.rents).weak:
        raise PreconditionError("weak budget sets differ between the two points")
    return sigma_is_max_tie_matching(e, z)


def sigma_is_max_tie_matching(e: Economy, z: Allocation) -> bool:
    g = tie_graph(e, z)
    best = max_tie_matching(g).weight
    own = ONE
    for i in e.agents:
        own *= g.weights[(i, z.assignment[i])]
    return own == best


def check_theta_bound(e: Economy, room: RoomId, total: Fraction, eps: Fraction) -> bool:
    """Raising the total by eps raises the room's max envy-free rent by at
    least theta * eps, where theta = 1 / (n (1+rho_bar)^(n*n))."""
    if e.n > 4:
        raise PreconditionError("theta bound checker supports n <= 4")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    obj = EfObjective("max_room_rent", room=room)
    lo = brute_force_optimize(e, obj, total)
    hi = brute_force_optimize(e, obj, total + eps)
    if lo is None or hi is None:
        raise OracleError("empty envy-free set at one of the totals")
    theta = theta_constant(e.n, e.rho_bar)
    return hi[0] - lo[0] >= theta * eps


# ---------------------------------------------------------------------------
# Exact sampling of the envy-free set (used by the incentives experiments).


def _cells(e: Economy, lo: Fraction, hi: Fraction):
    cuts = sorted({e.preferences[i].budget for i in e.agents if e.preferences[i].rho > 0})
    cuts = [c for c in cuts if lo < c < hi]
    bounds = [lo] + cuts + [hi]
    per_room = [list(zip(bounds, bounds[1:]))] * len(e.rooms)
    yield from itertools.product(*per_room)


def _gauss(a, b):
    n = len(a)
    mat = [row[:] + [bi] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if piv is None:
            return None
        mat[col], mat[piv] = mat[piv], mat[col]
        mat[col] = [q / mat[col][col] for q in mat[col]]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    return [mat[r][n] for r in range(n)]


def enumerate_ef_points(e: Economy, total: Optional[Fraction] = None, midpoints: bool = True):
    """All vertices (and optional midpoints) of the envy-free polytopes.

    Returns a list of Allocations covering every assignment and budget
    regime; exact, and exhaustive in the sense that the worst value of any
    function linear on each regime cell is attained at a returned vertex.
    Guarded to n <= 3 where the cell count stays tiny.
    """
    if e.n > 3:
        raise OracleError("exact envy-free sampling supports n <= 3")
    total = e.total_rent if total is None else total
    lo, hi = rent_box(e, total)
    out = []
    seen = set()
    rooms = list(e.rooms)
    n = len(rooms)
    for sigma, _perm in _assignments(e):
        for cell in _cells(e, lo, hi):
            rows = []  # (coeff vector over rooms, bound) meaning coeff . t <= bound
            for k, a in enumerate(rooms):
                clo, chi = cell[k]
                vec_lo = [ZERO] * n
                vec_lo[k] = -ONE
                rows.append((vec_lo, -clo))
                vec_hi = [ZERO] * n
                vec_hi[k] = ONE
                rows.append((vec_hi, chi))
            cellbox = {a: cell[k] for k, a in enumerate(rooms)}
            for i in e.agents:
                own = sigma[i]
                oc, ocst = _chord(e, i, own, *cellbox[own])
                for j in e.agents:
                    if i == j:
                        continue
                    other = sigma[j]
                    cc, ccst = _chord(e, i, other, *cellbox[other])
                    vec = [ZERO] * n
                    for k, a in enumerate(rooms):
                        vec[k] = cc.get(a, ZERO) - oc.get(a, ZERO)
                    rows.append((vec, ocst - ccst))
            sum_row = [ONE] * n

            verts = []
            for combo in itertools.combinations(range(len(rows)), n - 1):
                a_mat = [sum_row] + [rows[k][0] for k in combo]
                b_vec = [total] + [rows[k][1] for k in combo]
                x = _gauss(a_mat, b_vec)
                if x is None:
                    continue
                if all(
                    sum(vec[k] * x[k] for k in range(n)) <= bound for vec, bound in rows
                ):
                    verts.append(x)
            pts = list(verts)
            if midpoints:
                for p, q in itertools.combinations(verts, 2):
                    pts.append([(pi + qi) / 2 for pi, qi in zip(p, q)])
            for x in pts:
                key = (tuple(sorted(sigma.items())), tuple(x))
                if key in seen:
                    continue
                seen.add(key)
                z = Allocation(dict(sigma), {a: x[k] for k, a in enumerate(rooms)})
                if is_envy_free(e, z):
                    out.append(z)
    return out


# ---------------------------------------------------------------------------
# Fixture files pairing economies with their oracle answers.


def fixture_entry(e: Economy, label: str = "") -> dict:
    """One reproducible (economy, oracle answer) pair, ready for JSON."""
    from .wire import format_rational, serialize_allocation, serialize_economy

    result = brute_force_maxmin(e)
    return {
        "label": label,
        "economy": serialize_economy(e),
        "maxmin_value": format_rational(result.value),
        "optimum": serialize_allocation(result.optimum),
    }


def check_fixture_entry(entry: dict) -> bool:
    """Recompute the oracle answer for a stored fixture entry."""
    from .wire import parse_economy, parse_rational

    e = parse_economy(entry["economy"])
    result = brute_force_maxmin(e)
    if result.value != parse_rational(entry["maxmin_value"]):
        return False
    stored = entry["optimum"]["rents"]
    return all(result.optimum.rents[a] == parse_rational(stored[a]) for a in e.rooms)


# ---------------------------------------------------------------------------
# Random economies for property and acceptance tests.

RHO_POOL = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


def random_economy(rng, n: int, k: int = 2, quasilinear: bool = False) -> Economy:
    """Random economy with integer values/budgets in [0, 100], total rent in
    [-50, 300], and rho drawn from a k-element menu."""
    from .model import Preference

    agents = tuple(f"a{i}" for i in range(n))
    rooms = tuple(f"r{j}" for j in range(n))
    if quasilinear:
        menu = (ZERO,)
    else:
        menu = tuple(sorted(rng.sample(RHO_POOL, k)))
    prefs = {}
    for i in agents:
        values = {r: Fraction(rng.randint(0, 100)) for r in rooms}
        budget = Fraction(rng.randint(0, 100))
        rho = menu[rng.randrange(len(menu))]
        prefs[i] = Preference(values=values, budget=budget, rho=rho)
    total = Fraction(rng.randint(-50, 300))
    return Economy(agents, rooms, prefs, total, menu, max(menu))

"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -v to see them live; the oracle-equivalence
sweep takes a few minutes because it brute-forces 200 economies)."""

import json
import random
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from rentdiv.incentives import (
    ReportGrid,
    best_response,
    is_epsilon_equilibrium,
    limit_equilibrium_experiment,
    mechanism_outcome,
    supporting_profile,
)
from rentdiv.model import Allocation, bundle_utility, is_envy_free
from rentdiv.oracle import (
    EfObjective,
    brute_force_maxmin,
    brute_force_optimize,
    check_h_maxmin_perturbation,
    check_theta_bound,
    random_economy,
    safe_perturbation_deltas,
)
from rentdiv.solver import (
    MAXMIN_RENT,
    Objective,
    has_noncompensation_ef,
    initial_allocation,
    iteration_bound,
    rebate_step,
    solve,
)
from tests.conftest import alloc

FIXTURES = Path(__file__).parent / "fixtures"


def report(name: str, ok: bool = True):
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok


def seeded_economy(seed: int):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    k = rng.randint(1, 3)
    return random_economy(rng, n, k)


def test_oracle_equivalence_200_economies():
    """solve == brute force on 200 seeded economies, exactly, under 10 min."""
    seeds = json.loads((FIXTURES / "oracle_seeds.json").read_text())["seeds"]
    assert len(seeds) >= 200
    start = time.monotonic()
    for seed in seeds:
        e = seeded_economy(seed)
        got = solve(e)
        want = brute_force_maxmin(e)
        assert got.value == want.value, f"seed {seed}: {got.value} != {want.value}"
    elapsed = time.monotonic() - start
    assert elapsed < 600, f"sweep took {elapsed:.0f}s"
    report(f"oracle equivalence on {len(seeds)} economies ({elapsed:.0f}s)")


def test_worked_trace_bit_exact(e2):
    """The two-iteration descent on the budget-kinked two-agent fixture."""
    m_high, z0, lp_value = initial_allocation(e2)
    assert m_high == F(160)
    assert z0.rents == {"a": F(85), "b": F(75)}
    assert lp_value == F(-10)
    result = solve(e2)
    its = result.trace.iterations
    assert len(its) == 2
    assert its[0].branch == "corrected"
    assert its[0].descent_rents == {"a": F(70), "b": F(60)}
    assert its[0].lp_value == F(10)
    assert its[0].rents == {"a": F(75), "b": F(60)}
    assert its[1].branch == "accepted"
    assert its[1].rents == {"a": F(190, 3), "b": F(110, 3)}
    utilities = {i: bundle_utility(e2, i, result.allocation) for i in e2.agents}
    assert utilities == {"1": F(100, 3), "2": F(100, 3)}
    report("worked trace reproduced bit-exact (160 / (85,75) / (70,60) / (75,60) / (190/3,110/3))")


def test_quasilinear_reduction():
    """rho == 0 economies match the quasi-linear maxmin oracle exactly."""
    rng = random.Random(777)
    for _ in range(30):
        e = random_economy(rng, rng.randint(2, 5), quasilinear=True)
        got = solve(e)
        want = brute_force_maxmin(e)
        assert got.value == want.value
    report("quasi-linear reduction (30 economies, exact)")


def test_progress_bound():
    """Non-terminal iterations strictly shrink the strict budget set or grow
    the matching weight; iteration counts respect the bound."""
    rng = random.Random(4242)
    traces = 0
    for _ in range(40):
        e = random_economy(rng, rng.randint(2, 4), k=rng.randint(1, 3))
        result = solve(e)
        its = result.trace.iterations
        assert len(its) <= iteration_bound(e)
        if F(0) in e.rho_menu:
            # the slope count equals the menu size here, so the spec formula
            # n^2 + (n+1)^(k-1) + 1 applies verbatim
            n, k = e.n, len(e.rho_menu)
            assert len(its) <= n * n + (n + 1) ** (k - 1) + 1
        for s in range(1, len(its)):
            prev, cur = its[s - 1], its[s]
            assert cur.sb_size <= prev.sb_size
            if cur.total > e.total_rent:
                assert cur.sb_size < prev.sb_size or cur.matching_weight > prev.matching_weight
        traces += 1
    assert traces == 40
    report("descent progress bound (40 traces)")


def test_perturbation_suite():
    """50 sampled maxmin allocations: small rebates keep rents strictly
    lower, utilities strictly higher, and the maxmin certificate green."""
    rng = random.Random(31337)
    sampled = 0
    while sampled < 50:
        e = random_economy(rng, rng.randint(2, 4), k=rng.randint(1, 3))
        z = solve(e).allocation
        deltas = safe_perturbation_deltas(e, z)
        rep = check_h_maxmin_perturbation(e, z, deltas)
        assert rep.violations == (), (e, deltas)
        sampled += 1
    report("perturbation suite (50 maxmin allocations, shrinking delta grids)")


def test_noncompensation_agrees_with_brute_force(e1, e2):
    """Existence of a nobody-pays-to-live allocation, vs brute force."""
    tr = lambda e: {room: (F(0), F(1)) for room in e.rooms}
    fixtures = [e1, e2, e1.with_total(F(-1000)), e2.with_total(F(250))]
    rng = random.Random(99)
    for _ in range(8):
        fixtures.append(random_economy(rng, rng.randint(2, 4), k=rng.randint(1, 2)))
    for e in fixtures:
        got, witness = has_noncompensation_ef(e)
        want = brute_force_optimize(e, EfObjective("maxmin_rent", transform=tr(e)))
        assert got == (want[0] >= 0), e
        assert min(witness.rents.values()) == want[0]
    sol = solve(e1, Objective(MAXMIN_RENT))
    assert sol.allocation.rents == {"a": F(55), "b": F(45)}
    report("non-compensation agrees with brute force (incl. the (55,45) fixture)")


def test_rebate_step_contract():
    """100 random (allocation, eta) pairs: output envy-free, total within
    [sum(r) - eta, sum(r)]."""
    rng = random.Random(2024)
    done = 0
    while done < 100:
        e = random_economy(rng, rng.randint(2, 4), k=rng.randint(1, 3))
        z = solve(e).allocation
        eta = F(rng.randint(0, 80), rng.choice([1, 2, 4]))
        out = rebate_step(e.with_total(z.total()), z, eta)
        assert is_envy_free(e, out)
        assert z.total() - eta <= out.total() <= z.total()
        done += 1
    report("rebate step contract (100 pairs)")


def test_incentives_suite(e1, e2):
    """Best response cap, limit-equilibrium convergence, and the supporting
    profile as a certified grid equilibrium."""
    step = F(5)
    grid = ReportGrid(
        value_step=step, value_ranges={"a": (F(100), F(100)), "b": (F(60), F(95))}
    )
    br = best_response(e1, "1", grid)
    assert br.utility >= F(45) - step

    def grids_for(e, widths):
        return [
            ReportGrid(
                value_step=w,
                value_ranges={
                    room: (
                        min(e.preferences[i].values[room] for i in e.agents) - w,
                        max(e.preferences[i].values[room] for i in e.agents) + w,
                    )
                    for room in e.rooms
                },
            )
            for w in widths
        ]

    schedule = [F(20), F(10), F(5)]
    for economy in (e1, e2):
        rep = limit_equilibrium_experiment(economy, schedule, grids_for(economy, schedule))
        assert all(r.equilibria > 0 for r in rep.rounds)
        assert rep.distances_non_increasing

    z = alloc({"1": "a", "2": "b"}, {"a": 60, "b": 40})
    eps = F(6)
    profile = supporting_profile(e1, z, eps)
    sgrid = ReportGrid(
        value_step=F(2), value_ranges={"a": (F(54), F(70)), "b": (F(34), F(50))}
    )
    assert mechanism_outcome(e1, profile).rents == z.rents
    assert is_epsilon_equilibrium(e1, profile, eps, sgrid)
    report("incentives: best response cap, shrinking equilibrium distances, supporting profile")


def test_theta_bound_fixtures(e1, e2):
    """Room-rent growth rate under total increases, including the equality
    case gain 5 = 10 * theta on the quasi-linear fixture."""
    assert check_theta_bound(e1, "a", F(100), F(10))
    lo = brute_force_optimize(e1, EfObjective("max_room_rent", room="a"), F(100))[0]
    hi = brute_force_optimize(e1, EfObjective("max_room_rent", room="a"), F(110))[0]
    assert (lo, hi) == (F(70), F(75))
    for eps in (F(5), F(10)):
        for room in e2.rooms:
            assert check_theta_bound(e2, room, F(100), eps)
    rng = random.Random(55)
    for _ in range(6):
        e = random_economy(rng, rng.randint(2, 3), k=rng.randint(1, 2))
        room = e.rooms[rng.randrange(e.n)]
        assert check_theta_bound(e, room, e.total_rent, F(rng.randint(1, 12)))
    report("theta bound (fixtures incl. the exact-equality case)")

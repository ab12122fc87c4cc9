from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rentdiv.lp import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    Constraint,
    LinearProgram,
    LpError,
    solve_lp,
)

coef = st.fractions(min_value=-6, max_value=6, max_denominator=4)


def lp(sense, objective, constraints, variables=None):
    if variables is None:
        variables = sorted({v for c in constraints for v in c[0]} | set(objective))
    return LinearProgram(
        variables=variables,
        sense=sense,
        objective=objective,
        constraints=[Constraint(c[0], c[1], c[2]) for c in constraints],
    )


def enumerate_vertices(program: LinearProgram):
    """Independent check for tiny programs: intersect every n-subset of
    constraint boundaries and keep the feasible points."""
    n = len(program.variables)
    rows = []
    for c in program.constraints:
        rows.append(([c.coeffs.get(v, F(0)) for v in program.variables], c.bound))
    vertices = []
    for combo in combinations(range(len(rows)), n):
        a = [list(rows[k][0]) for k in combo]
        b = [rows[k][1] for k in combo]
        x = _gauss_solve(a, b)
        if x is None:
            continue
        point = dict(zip(program.variables, x))
        if _feasible(program, point):
            vertices.append(point)
    return vertices


def _gauss_solve(a, b):
    n = len(a)
    m = len(a[0])
    if n != m:
        return None
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


def _feasible(program, point):
    for c in program.constraints:
        lhs = sum(c.coeffs.get(v, F(0)) * point[v] for v in program.variables)
        if c.relation == LE and lhs > c.bound:
            return False
        if c.relation == GE and lhs < c.bound:
            return False
        if c.relation == EQ and lhs != c.bound:
            return False
    return True


def objective_at(program, point):
    return sum(program.objective.get(v, F(0)) * point[v] for v in program.variables)


class TestBasics:
    def test_single_bound(self):
        sol = solve_lp(lp("max", {"x": F(1)}, [({"x": F(1)}, LE, F(3))]))
        assert sol.status == OPTIMAL
        assert sol["x"] == F(3) and sol.value == F(3)

    def test_infeasible(self):
        sol = solve_lp(
            lp("max", {"x": F(1)}, [({"x": F(1)}, LE, F(1)), ({"x": F(1)}, GE, F(2))])
        )
        assert sol.status == INFEASIBLE

    def test_unbounded(self):
        sol = solve_lp(lp("max", {"x": F(1)}, [({"x": F(1)}, GE, F(0))]))
        assert sol.status == UNBOUNDED

    def test_initializer_lp_for_e2(self):
        # max R s.t. R <= 2(80-ra), R <= 70-rb, 10 <= ra-rb <= 20, ra+rb = 160
        program = lp(
            "max",
            {"R": F(1)},
            [
                ({"R": F(1), "ra": F(2)}, LE, F(160)),
                ({"R": F(1), "rb": F(1)}, LE, F(70)),
                ({"ra": F(1), "rb": F(-1)}, GE, F(10)),
                ({"ra": F(1), "rb": F(-1)}, LE, F(20)),
                ({"ra": F(1), "rb": F(1)}, EQ, F(160)),
            ],
        )
        sol = solve_lp(program)
        assert sol.status == OPTIMAL
        assert (sol["ra"], sol["rb"], sol["R"]) == (F(85), F(75), F(-10))

    def test_undeclared_variable_rejected(self):
        with pytest.raises(LpError):
            LinearProgram(
                variables=("x",),
                sense="max",
                objective={"x": F(1)},
                constraints=(Constraint({"y": F(1)}, LE, F(0)),),
            )

    def test_dump_mentions_rationals(self):
        program = lp("max", {"x": F(3, 2)}, [({"x": F(1)}, LE, F(7, 3))])
        text = program.dump()
        assert "3/2 x" in text and "7/3" in text

    def test_determinism(self):
        program = lp(
            "max",
            {"x": F(1), "y": F(1)},
            [({"x": F(1), "y": F(1)}, LE, F(4)), ({"x": F(1)}, LE, F(2)), ({"y": F(1)}, LE, F(2))],
        )
        first = solve_lp(program)
        for _ in range(3):
            again = solve_lp(program)
            assert again.point == first.point and again.value == first.value


@settings(max_examples=120, deadline=None)
@given(data=st.data())
def test_matches_vertex_enumeration_on_small_programs(data):
    nvars = data.draw(st.integers(1, 3), label="nvars")
    variables = [f"x{k}" for k in range(nvars)]
    ncons = data.draw(st.integers(nvars, 5), label="ncons")
    constraints = []
    for _ in range(ncons):
        coeffs = {v: data.draw(coef) for v in variables}
        rel = data.draw(st.sampled_from([LE, GE]))
        bound = data.draw(coef)
        constraints.append((coeffs, rel, bound))
    # Box the region so unboundedness does not dominate the test.
    for v in variables:
        constraints.append(({v: F(1)}, LE, F(50)))
        constraints.append(({v: F(1)}, GE, F(-50)))
    objective = {v: data.draw(coef) for v in variables}
    program = lp("max", objective, constraints, variables)
    sol = solve_lp(program)
    vertices = enumerate_vertices(program)
    if sol.status == INFEASIBLE:
        assert vertices == []
    else:
        assert sol.status == OPTIMAL
        assert vertices, "solver found a point but enumeration found none"
        best = max(objective_at(program, p) for p in vertices)
        assert sol.value == best
        assert _feasible(program, sol.point)

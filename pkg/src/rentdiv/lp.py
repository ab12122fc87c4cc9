"""Exact-rational linear programming.

A small dense two-phase simplex over `fractions.Fraction` with Bland's rule,
which guarantees termination without any tolerances. Inputs are declared
through `LinearProgram`; solutions are exact vertex optima and the solver is
a pure function (identical program, identical answer).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .model import as_fraction

ZERO = Fraction(0)
ONE = Fraction(1)

try:  # gmpy2 rationals are exact and far faster inside the pivot loop
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover
    _q = Fraction

_Q0 = _q(0)
_Q1 = _q(1)

LE = "<="
GE = ">="
EQ = "="

MAXIMIZE = "max"
MINIMIZE = "min"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LpError(ValueError):
    """Malformed linear program."""


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, Fraction]
    relation: str
    bound: Fraction
    name: str = ""

    def __post_init__(self):
        if self.relation not in (LE, GE, EQ):
            raise LpError(f"bad relation {self.relation!r}")
        object.__setattr__(self, "coeffs", {v: as_fraction(c) for v, c in self.coeffs.items()})
        object.__setattr__(self, "bound", as_fraction(self.bound))


@dataclass(frozen=True)
class LinearProgram:
    variables: Sequence[str]
    sense: str
    objective: Mapping[str, Fraction]
    constraints: Sequence[Constraint]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objective", {v: as_fraction(c) for v, c in self.objective.items()})
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise LpError(f"bad sense {self.sense!r}")
        if len(set(self.variables)) != len(self.variables):
            raise LpError("duplicate variable names")
        declared = set(self.variables)
        for v in self.objective:
            if v not in declared:
                raise LpError(f"objective references undeclared variable {v!r}")
        for c in self.constraints:
            for v in c.coeffs:
                if v not in declared:
                    raise LpError(f"constraint {c.name!r} references undeclared variable {v!r}")

    def dump(self) -> str:
        """Textual form with exact rationals, for debugging."""

        def term(coeff, var):
            return f"{coeff} {var}"

        lines = [f"{self.sense}: " + " + ".join(term(c, v) for v, c in self.objective.items())]
        for k, c in enumerate(self.constraints):
            name = c.name or f"c{k}"
            lhs = " + ".join(term(q, v) for v, q in c.coeffs.items()) or "0"
            lines.append(f"{name}: {lhs} {c.relation} {c.bound}")
        return "\n".join(lines)


@dataclass(frozen=True)
class LpSolution:
    status: str
    point: Mapping[str, Fraction] = field(default_factory=dict)
    value: Optional[Fraction] = None

    def __getitem__(self, var: str) -> Fraction:
        return self.point[var]


def _check_feasible(lp: LinearProgram, point: Mapping[str, Fraction]) -> bool:
    for c in lp.constraints:
        lhs = sum((q * point[v] for v, q in c.coeffs.items()), start=ZERO)
        if c.relation == LE and not lhs <= c.bound:
            return False
        if c.relation == GE and not lhs >= c.bound:
            return False
        if c.relation == EQ and lhs != c.bound:
            return False
    return True


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Exact vertex optimum of `lp`, or Infeasible/Unbounded status.

    Variables with a single-variable lower-bound row are shifted to make
    them nonnegative; remaining free variables are split into nonnegative
    pairs. Rows become equalities with slacks, slacks of <=-rows seed the
    starting basis, and a two-phase simplex runs with Bland's anti-cycling
    pivot rule throughout.
    """
    nvars = len(lp.variables)
    vindex = {v: k for k, v in enumerate(lp.variables)}

    # Work in gmpy2 rationals internally; exact either way.
    cons = [
        ({vindex[v]: _q(q) for v, q in c.coeffs.items()}, c.relation, _q(c.bound))
        for c in lp.constraints
    ]

    # Pick up x >= c rows so x can be shifted instead of split. The rows
    # stay in the program (harmlessly redundant after shifting).
    shift = [None] * nvars
    for coeffs, relation, bnd in cons:
        if len(coeffs) != 1:
            continue
        (j, q), = coeffs.items()
        if q == 0:
            continue
        bound = bnd / q
        is_lower = (relation == GE and q > 0) or (relation == LE and q < 0)
        if relation == EQ:
            is_lower = True
        if is_lower and (shift[j] is None or bound > shift[j]):
            shift[j] = bound

    # Columns: one per shifted variable, a +/- pair per free variable, then
    # one slack per inequality.
    col_of = []  # per variable: (column, None) or (pos column, neg column)
    ncols = 0
    for j in range(nvars):
        if shift[j] is not None:
            col_of.append((ncols, None))
            ncols += 1
        else:
            col_of.append((ncols, ncols + 1))
            ncols += 2
    nslack = sum(1 for _c, relation, _b in cons if relation != EQ)
    first_slack = ncols
    ncols += nslack

    rows = []
    rhs = []
    slack_at = first_slack
    slack_sign = []
    for coeffs, relation, bnd in cons:
        row = [_Q0] * ncols
        b = bnd
        for j, q in coeffs.items():
            pos, neg = col_of[j]
            row[pos] += q
            if neg is None:
                b -= q * shift[j]
            else:
                row[neg] -= q
        if relation == LE:
            row[slack_at] = _Q1
            slack_sign.append(1)
            slack_at += 1
        elif relation == GE:
            row[slack_at] = -_Q1
            slack_sign.append(-1)
            slack_at += 1
        else:
            slack_sign.append(0)
        rows.append(row)
        rhs.append(b)

    # Objective over the transformed columns, as a minimization.
    obj = [_Q0] * ncols
    sign = -_Q1 if lp.sense == MAXIMIZE else _Q1
    for v, q in lp.objective.items():
        j = vindex[v]
        pos, neg = col_of[j]
        obj[pos] += sign * _q(q)
        if neg is not None:
            obj[neg] -= sign * _q(q)

    m = len(rows)
    # Normalize rhs >= 0 so the starting basis is feasible.
    for r in range(m):
        if rhs[r] < 0:
            rows[r] = [-q for q in rows[r]]
            rhs[r] = -rhs[r]
            slack_sign[r] = -slack_sign[r]

    # A +1 slack can start basic; everything else needs an artificial.
    needs_artificial = [r for r in range(m) if slack_sign[r] != 1]
    total_cols = ncols + len(needs_artificial)
    art_col = {}
    for k, r in enumerate(needs_artificial):
        art_col[r] = ncols + k
    tableau = []
    basis = []
    for r in range(m):
        row = rows[r] + [_Q0] * len(needs_artificial) + [rhs[r]]
        if r in art_col:
            row[art_col[r]] = _Q1
            basis.append(art_col[r])
        else:
            basis.append(rows[r].index(_Q1, first_slack))
        tableau.append(row)

    def pivot(tab, obj_row, basis, row, col):
        prow = tab[row]
        piv = prow[col]
        if piv != _Q1:
            prow = [q / piv for q in prow]
            tab[row] = prow
        for r in range(len(tab)):
            if r == row:
                continue
            f = tab[r][col]
            if f:
                trow = tab[r]
                tab[r] = [a - f * b for a, b in zip(trow, prow)]
        f = obj_row[col]
        if f:
            obj_row[:] = [a - f * b for a, b in zip(obj_row, prow)]
        basis[row] = col

    def simplex(tab, obj_row, basis, width):
        """Bland's rule on the maintained reduced-cost row; returns status."""
        while True:
            enter = -1
            for j in range(width):
                if obj_row[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best = None
            for r in range(len(tab)):
                a = tab[r][enter]
                if a > 0:
                    ratio = tab[r][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                        best = ratio
                        leave = r
            if leave < 0:
                return UNBOUNDED
            pivot(tab, obj_row, basis, leave, enter)

    # Phase 1: minimize the artificial sum. With artificials basic at cost
    # one, the starting reduced costs subtract exactly their rows.
    obj_row = [_Q0] * (total_cols + 1)
    for r in needs_artificial:
        trow = tableau[r]
        for j in range(ncols):
            if trow[j]:
                obj_row[j] -= trow[j]
        obj_row[total_cols] -= trow[total_cols]
    status = simplex(tableau, obj_row, basis, ncols)  # artificials never re-enter
    assert status == OPTIMAL, "phase one is bounded below by zero"
    if obj_row[total_cols] != 0:
        return LpSolution(INFEASIBLE)

    # Drive any residual artificial out of the basis, or drop its row.
    keep = []
    for r in range(m):
        if basis[r] >= ncols:
            piv_col = next((j for j in range(ncols) if tableau[r][j] != 0), None)
            if piv_col is None:
                continue  # redundant row
            pivot(tableau, obj_row, basis, r, piv_col)
        keep.append(r)
    tableau = [tableau[r][:ncols] + [tableau[r][total_cols]] for r in keep]
    basis = [basis[r] for r in keep]

    # Phase 2: rebuild the reduced-cost row for the real objective once.
    obj_row = [q for q in obj] + [_Q0]
    for r, bcol in enumerate(basis):
        cb = obj[bcol]
        if cb:
            trow = tableau[r]
            for j in range(ncols + 1):
                obj_row[j] -= cb * trow[j]
    status = simplex(tableau, obj_row, basis, ncols)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    x = [_Q0] * ncols
    for r, bcol in enumerate(basis):
        x[bcol] = tableau[r][ncols]
    point = {}
    for v, j in vindex.items():
        pos, neg = col_of[j]
        raw = x[pos] + shift[j] if neg is None else x[pos] - x[neg]
        point[v] = Fraction(int(raw.numerator), int(raw.denominator))
    value = sum((q * point[v] for v, q in lp.objective.items()), start=ZERO)
    solution = LpSolution(OPTIMAL, point, value)
    # Exactness means this can only fire on a genuine bug.
    assert _check_feasible(lp, point), "simplex returned an infeasible point"
    return solution

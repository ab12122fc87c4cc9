"""Exact assignment solvers.

Two problems live here: value-sum-maximizing assignment on a complete
rational matrix, and product-maximizing perfect matching restricted to the
tie graph. One Hungarian implementation serves both, parameterized by the
ordered abelian group it works in: (Q, +) for sums, (Q_{>0}, *) for products
of slopes. Running the product case multiplicatively keeps everything exact;
taking logs would not.

Ties between equally heavy matchings are broken toward the lexicographically
smallest assignment vector in canonical agent order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .model import AgentId, RoomId, TieGraph

ZERO = Fraction(0)
ONE = Fraction(1)


class MatchingError(ValueError):
    pass


class NoPerfectMatching(MatchingError):
    """The allowed edges admit no perfect matching."""


@dataclass(frozen=True)
class Matching:
    assignment: Mapping[AgentId, RoomId]
    weight: Fraction


@dataclass(frozen=True)
class _Group:
    combine: Callable  # group operation
    remove: Callable   # inverse operation
    identity: Fraction


_ADDITIVE = _Group(lambda a, b: a + b, lambda a, b: a - b, ZERO)
_MULTIPLICATIVE = _Group(lambda a, b: a * b, lambda a, b: a / b, ONE)


def _hungarian(n: int, weight: Sequence[Sequence[Optional[Fraction]]], g: _Group):
    """Max-weight perfect matching on an n x n grid, None marking missing edges.

    Returns (total weight, col-of-row list). Raises NoPerfectMatching when the
    allowed edges cannot be completed.
    """
    u = []
    for i in range(n):
        best = None
        for a in range(n):
            w = weight[i][a]
            if w is not None and (best is None or w > best):
                best = w
        if best is None:
            raise NoPerfectMatching(f"row {i} has no allowed edges")
        u.append(best)
    v = [g.identity] * n
    xy = [-1] * n  # col matched to row
    yx = [-1] * n  # row matched to col

    def slack_of(i, a):
        w = weight[i][a]
        if w is None:
            return None
        return g.remove(g.combine(u[i], v[a]), w)

    for root in range(n):
        if xy[root] != -1:
            continue
        in_s = [False] * n
        in_t = [False] * n
        prev = [-1] * n
        in_s[root] = True
        prev[root] = -2
        slack = [slack_of(root, a) for a in range(n)]
        slack_from = [root] * n

        aug = None
        while aug is None:
            # Scan for tight edges to columns outside T.
            progressed = False
            for a in range(n):
                if in_t[a] or slack[a] is None or slack[a] != g.identity:
                    continue
                if yx[a] == -1:
                    aug = (slack_from[a], a)
                    progressed = True
                    break
                x = yx[a]
                if not in_s[x]:
                    in_t[a] = True
                    in_s[x] = True
                    prev[x] = slack_from[a]
                    for b in range(n):
                        if not in_t[b]:
                            cand = slack_of(x, b)
                            if cand is not None and (slack[b] is None or cand < slack[b]):
                                slack[b] = cand
                                slack_from[b] = x
                    progressed = True
                    break
            if aug is not None:
                break
            if progressed:
                continue
            delta = None
            for a in range(n):
                if not in_t[a] and slack[a] is not None:
                    if delta is None or slack[a] < delta:
                        delta = slack[a]
            if delta is None:
                raise NoPerfectMatching("alternating tree exhausted the allowed edges")
            for i in range(n):
                if in_s[i]:
                    u[i] = g.remove(u[i], delta)
            for a in range(n):
                if in_t[a]:
                    v[a] = g.combine(v[a], delta)
                elif slack[a] is not None:
                    slack[a] = g.remove(slack[a], delta)

        x, y = aug
        while x != -2:
            yx[y] = x
            ty = xy[x]
            xy[x] = y
            x, y = prev[x], ty

    total = g.identity
    for i in range(n):
        total = g.combine(total, weight[i][xy[i]])
    return total, xy


def _lex_smallest_optimal(n, weight, g, best):
    """Lexicographically smallest assignment vector attaining weight `best`."""
    rows = list(range(n))
    cols = list(range(n))
    target = best
    chosen = [-1] * n
    for i in range(n):
        rest_rows = [r for r in rows if r > i]
        for a in cols:
            w = weight[i][a]
            if w is None:
                continue
            rest_cols = [c for c in cols if c != a]
            if rest_rows:
                sub = [[weight[r][c] for c in rest_cols] for r in rest_rows]
                try:
                    sub_best, _ = _hungarian(len(rest_rows), sub, g)
                except NoPerfectMatching:
                    continue
                cand = g.combine(w, sub_best)
            else:
                cand = w
            if cand == target:
                chosen[i] = a
                cols = rest_cols
                target = g.remove(target, w)
                break
        if chosen[i] == -1:
            raise MatchingError("internal: failed to reconstruct an optimal matching")
    return chosen


def _solve(agents, rooms, weight, g) -> Matching:
    n = len(agents)
    best, _ = _hungarian(n, weight, g)
    chosen = _lex_smallest_optimal(n, weight, g, best)
    return Matching({agents[i]: rooms[chosen[i]] for i in range(n)}, best)


def max_sum_assignment(
    agents: Sequence[AgentId],
    rooms: Sequence[RoomId],
    values: Mapping[AgentId, Mapping[RoomId, Fraction]],
) -> Matching:
    """Assignment maximizing the sum of values; complete square matrix."""
    if len(agents) != len(rooms):
        raise MatchingError(f"non-square input: {len(agents)} agents, {len(rooms)} rooms")
    weight = [[values[i][a] for a in rooms] for i in agents]
    return _solve(tuple(agents), tuple(rooms), weight, _ADDITIVE)


def max_tie_matching(graph: TieGraph) -> Matching:
    """Perfect matching within tie edges maximizing the product of slopes.

    The input graph always contains each agent's own-room edge, so a perfect
    matching exists whenever the graph came from an envy-free allocation; a
    NoPerfectMatching here signals a non-envy-free input slipped through.
    """
    agents = tuple(graph.agents)
    rooms = tuple(graph.rooms)
    weight = [
        [graph.weights[(i, a)] if (i, a) in graph.edges else None for a in rooms]
        for i in agents
    ]
    return _solve(agents, rooms, weight, _MULTIPLICATIVE)

"""Command line interface.

Subcommands: solve, verify, oracle, manipulate, equilibria, serve. Economy
and allocation files use the JSON wire schema; all numbers print as exact
rationals.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .incentives import ReportGrid, best_response, limit_equilibrium_experiment
from .model import envy_witness, maxmin_certificate
from .oracle import brute_force_maxmin
from .service import OBJECTIVE_NAMES, parse_objective, solve_response
from .wire import (
    format_rational,
    parse_allocation,
    parse_economy,
    parse_rational,
    serialize_allocation,
)


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _economy(path: str):
    return parse_economy(_load_json(path))


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_solve(args) -> int:
    e = _economy(args.economy)
    objective = parse_objective(args.objective)
    body = solve_response(e, objective, with_trace=args.trace is not None)
    if args.trace is not None:
        with open(args.trace, "w") as fh:
            json.dump(body["trace"], fh, indent=2)
        del body["trace"]
    _emit(body)
    return 0


def cmd_verify(args) -> int:
    e = _economy(args.economy)
    z = parse_allocation(_load_json(args.allocation))
    witness = envy_witness(e, z)
    cert = maxmin_certificate(e.with_total(z.total()), z)
    _emit(
        {
            "envy_free": witness is None,
            "witness": None
            if witness is None
            else {
                "envious": witness.envious,
                "envied": witness.envied,
                "gap": format_rational(witness.gap),
            },
            "certificate": cert.to_json_dict(),
        }
    )
    return 0 if cert.is_maxmin else 1


def cmd_oracle(args) -> int:
    e = _economy(args.economy)
    result = brute_force_maxmin(e)
    _emit(
        {
            "value": format_rational(result.value),
            "optimum": serialize_allocation(result.optimum),
            "table": [
                {
                    "assignment": {i: room for i, room in zip(e.agents, rooms)},
                    "feasible": outcome.feasible,
                    "value": None if outcome.value is None else format_rational(outcome.value),
                }
                for rooms, outcome in result.table.items()
            ],
        }
    )
    return 0


def _default_grid(e, step: Fraction) -> ReportGrid:
    return ReportGrid(
        value_step=step,
        value_ranges={
            room: (
                min(e.preferences[i].values[room] for i in e.agents) - step,
                max(e.preferences[i].values[room] for i in e.agents) + step,
            )
            for room in e.rooms
        },
    )


def cmd_manipulate(args) -> int:
    e = _economy(args.economy)
    if args.agent not in e.agents:
        print(f"unknown agent {args.agent!r}", file=sys.stderr)
        return 2
    step = parse_rational(args.grid_step)
    grid = _default_grid(e, step)
    br = best_response(e, args.agent, grid)
    truthful_value = None
    from .incentives import mechanism_outcome, true_utility

    truthful = mechanism_outcome(e, {})
    truthful_value = true_utility(e, args.agent, truthful)
    _emit(
        {
            "agent": args.agent,
            "grid_step": format_rational(step),
            "best_report": {
                "values": {r: format_rational(v) for r, v in br.report.values.items()},
                "budget": format_rational(br.report.budget),
                "rho": format_rational(br.report.rho),
            },
            "best_true_utility": format_rational(br.utility),
            "truthful_true_utility": format_rational(truthful_value),
            "gain": format_rational(br.utility - truthful_value),
            "outcome": serialize_allocation(br.outcome),
        }
    )
    return 0


def cmd_equilibria(args) -> int:
    e = _economy(args.economy)
    eps = parse_rational(args.epsilon)
    rounds = max(1, args.rounds)
    schedule = [eps / (2**k) for k in range(rounds)]
    grids = [_default_grid(e, max(q, Fraction(1, 4))) for q in schedule]
    report = limit_equilibrium_experiment(e, schedule, grids)
    _emit(report.to_json_dict())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import FileSessionStore, create_app

    store = FileSessionStore(args.store) if args.store else None
    uvicorn.run(create_app(store), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rentdiv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the chosen envy-free selection")
    p.add_argument("economy")
    p.add_argument("--objective", choices=sorted(OBJECTIVE_NAMES), default="maxmin-utility")
    p.add_argument("--trace", metavar="OUT_JSON", help="write the per-iteration trace")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check envy-freeness and maxmin optimality")
    p.add_argument("economy")
    p.add_argument("allocation")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force reference answer (small n)")
    p.add_argument("economy")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("manipulate", help="grid best-response search for one agent")
    p.add_argument("economy")
    p.add_argument("--agent", required=True)
    p.add_argument("--grid-step", default="5")
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("equilibria", help="grid equilibrium outcomes vs the envy-free set")
    p.add_argument("economy")
    p.add_argument("--epsilon", default="10")
    p.add_argument("--rounds", type=int, default=3)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", help="directory for file-backed sessions")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

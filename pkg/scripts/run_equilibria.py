#!/usr/bin/env python3
"""Desk experiment: grid equilibrium outcomes vs the true envy-free set.

For each configured economy, enumerates every joint report profile on a
sequence of refining grids, certifies the eps-equilibria, and reports the
largest exact distance from an equilibrium outcome to the envy-free set as
eps shrinks. Writes a JSON report.

Usage: python3 scripts/run_equilibria.py [--out report.json] [economy.json ...]
With no economy files, runs the two built-in study economies.
"""

import argparse
import json
import sys
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rentdiv.incentives import ReportGrid, limit_equilibrium_experiment
from rentdiv.model import Economy, Preference
from rentdiv.wire import parse_economy, serialize_economy


def study_economies():
    quasi = Economy(
        agents=("1", "2"),
        rooms=("a", "b"),
        preferences={
            "1": Preference(values={"a": F(100), "b": F(60)}, budget=F(0), rho=F(0)),
            "2": Preference(values={"a": F(80), "b": F(70)}, budget=F(0), rho=F(0)),
        },
        total_rent=F(100),
        rho_menu=(F(0),),
        rho_bar=F(0),
    )
    kinked = Economy(
        agents=("1", "2"),
        rooms=("a", "b"),
        preferences={
            "1": Preference(values={"a": F(100), "b": F(60)}, budget=F(60), rho=F(1)),
            "2": Preference(values={"a": F(80), "b": F(70)}, budget=F(0), rho=F(0)),
        },
        total_rent=F(100),
        rho_menu=(F(0), F(1)),
        rho_bar=F(1),
    )
    return [("quasi-linear-pair", quasi), ("budget-kinked-pair", kinked)]


def grid_for(e, width):
    return ReportGrid(
        value_step=width,
        value_ranges={
            room: (
                min(e.preferences[i].values[room] for i in e.agents) - width,
                max(e.preferences[i].values[room] for i in e.agents) + width,
            )
            for room in e.rooms
        },
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("economies", nargs="*", help="economy JSON files")
    parser.add_argument("--out", default="equilibria_report.json")
    parser.add_argument("--epsilon", default="20")
    parser.add_argument("--rounds", type=int, default=3)
    args = parser.parse_args(argv)

    if args.economies:
        cases = [
            (Path(p).stem, parse_economy(json.loads(Path(p).read_text())))
            for p in args.economies
        ]
    else:
        cases = study_economies()

    eps0 = F(args.epsilon)
    schedule = [eps0 / (2**k) for k in range(args.rounds)]
    results = []
    for name, e in cases:
        grids = [grid_for(e, max(q, F(1, 2))) for q in schedule]
        report = limit_equilibrium_experiment(e, schedule, grids)
        print(f"{name}:")
        for r in report.rounds:
            print(f"  eps={r.eps}  equilibria={r.equilibria}  max_distance={r.max_distance}")
        results.append(
            {
                "name": name,
                "economy": serialize_economy(e),
                "report": report.to_json_dict(),
            }
        )
    Path(args.out).write_text(json.dumps(results, indent=2))
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

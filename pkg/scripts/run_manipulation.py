#!/usr/bin/env python3
"""Desk experiment: best responses and the guaranteed-gain bound.

Part one runs grid best-response searches for every agent of each economy
and reports the gain over truthful play. Part two reproduces the
guaranteed-gain study: at an envy-free allocation for misreported values
where the true preference is budget-kinked and envious, a quasi-linear
counter-report must secure the floor min{own rent rebated by omega1*gap,
envied rent surcharged by omega2*gap} at every envy-free allocation of the
deviated profile.

Usage: python3 scripts/run_manipulation.py [--out report.json]
"""

import argparse
import json
import sys
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rentdiv.incentives import (
    ManipulationConstants,
    ReportGrid,
    best_response,
    check_strong_manipulation,
    mechanism_outcome,
    true_utility,
)
from rentdiv.model import Allocation, Economy, Preference
from rentdiv.wire import serialize_economy


def best_response_study():
    e = Economy(
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
    truthful = mechanism_outcome(e, {})
    rows = []
    for agent in e.agents:
        grid = ReportGrid(
            value_step=F(5),
            value_ranges={
                room: (
                    min(e.preferences[i].values[room] for i in e.agents) - F(5),
                    max(e.preferences[i].values[room] for i in e.agents) + F(5),
                )
                for room in e.rooms
            },
        )
        br = best_response(e, agent, grid)
        held = true_utility(e, agent, truthful)
        rows.append(
            {
                "agent": agent,
                "truthful_utility": str(held),
                "best_utility": str(br.utility),
                "gain": str(br.utility - held),
                "report_values": {r: str(v) for r, v in br.report.values.items()},
            }
        )
        print(f"agent {agent}: truthful {held}, best {br.utility} (gain {br.utility - held})")
    return {"economy": serialize_economy(e), "rows": rows}


def guaranteed_gain_study():
    e_rep = Economy(
        agents=("i", "j"),
        rooms=("a", "b"),
        preferences={
            "i": Preference(values={"a": F(500), "b": F(300)}, budget=F(0), rho=F(0)),
            "j": Preference(values={"a": F(650), "b": F(350)}, budget=F(0), rho=F(0)),
        },
        total_rent=F(600),
        rho_menu=(F(0), F(1)),
        rho_bar=F(1),
    )
    z = Allocation({"i": "b", "j": "a"}, {"a": F(400), "b": F(200)})
    true_i = Preference(values={"a": F(600), "b": F(300)}, budget=F(400), rho=F(1))
    constants = ManipulationConstants.for_economy(e_rep)
    grid = ReportGrid(value_step=F(5), value_ranges={"a": (F(250), F(300)), "b": (F(0), F(0))})
    finding = check_strong_manipulation(e_rep, z, "i", true_i, grid)
    print(
        f"guaranteed-gain: gap {finding.gap}, floor {finding.bound}, "
        f"witness found: {finding.achieved}"
    )
    return {
        "economy": serialize_economy(e_rep),
        "constants": {
            "theta": str(constants.theta),
            "omega1": str(constants.omega1),
            "omega2": str(constants.omega2),
        },
        "gap": str(finding.gap),
        "floor": str(finding.bound),
        "achieved": finding.achieved,
        "witness_values": None
        if finding.witness is None
        else {r: str(v) for r, v in finding.witness.values.items()},
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="manipulation_report.json")
    args = parser.parse_args(argv)
    report = {
        "best_response": best_response_study(),
        "guaranteed_gain": guaranteed_gain_study(),
    }
    Path(args.out).write_text(json.dumps(report, indent=2))
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

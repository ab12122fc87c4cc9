"""Interactive preference elicitation sessions.

Each household session walks every agent through the same script: report
indifference rents that sum to the total, report a budget, then answer at
most one follow-up fixed by the case her answers fall into:

  case 1: every reported rent is at most the budget. No follow-up; the
          budget violation index is unused (recorded at the menu minimum).
  case 2: rents differ and at least one exceeds the budget. The follow-up
          asks for the cash equivalent of a probe rebate on the dearest
          room; the answer is mapped back to an index on the menu.
  case 3: all rents equal and above budget. The follow-up asks the agent to
          rank her budget sensitivity against the population, mapped to a
          menu statistic.

The inverse map from a case-2 answer to the index is this package's own
convention (documented on infer_rho); the question only fixes the answer
options. Values are recovered so that every reported indifference rent sits
at utility zero: v = rent + rho * max(0, rent - budget).
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .model import Economy, Preference
from .wire import format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)

AWAIT_RENTS = "await-rents"
AWAIT_BUDGET = "await-budget"
AWAIT_RHO_EQUIVALENT = "await-rho-equivalent"
AWAIT_RHO_SELF_ASSESSMENT = "await-rho-self-assessment"
DONE = "done"

SELF_ASSESSMENT_OPTIONS = ("lower", "typical", "higher")


class ElicitationError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def classify_case(rents: Sequence[Fraction], budget: Fraction) -> int:
    """The three-way split driving the follow-up question.

    Total and mutually exclusive: equal rents make "some above budget" and
    "all above budget" coincide, so every report lands in exactly one case.
    """
    if all(r <= budget for r in rents):
        return 1
    if len(set(rents)) > 1:
        return 2
    return 3


def infer_rho(equivalent: Fraction, probe: Fraction, overage: Fraction,
              menu: Sequence[Fraction]) -> Fraction:
    """Map a case-2 answer back to a menu index.

    Convention: a rebate of `probe` on a room priced `overage` above budget
    is worth probe + rho * min(probe, overage) in cash. Solving for rho and
    snapping to the nearest menu element (ties toward the smaller index)
    turns the reported equivalent into a report on the menu.
    """
    equivalent = Fraction(equivalent)
    if probe <= 0 or overage <= 0:
        raise ElicitationError("invalid_probe", "probe and overage must be positive")
    if equivalent < probe:
        raise ElicitationError(
            "answer_out_of_range",
            f"an equivalent below the probe rebate {probe} is inconsistent",
        )
    raw = (equivalent - probe) / min(probe, overage)
    best = None
    for q in sorted(menu):
        distance = abs(q - raw)
        if best is None or distance < best[0]:
            best = (distance, q)
    return best[1]


@dataclass
class AgentState:
    stage: str = AWAIT_RENTS
    rents: Optional[Mapping[str, Fraction]] = None
    budget: Optional[Fraction] = None
    rho: Optional[Fraction] = None
    rho_source: Optional[str] = None  # "unused" | "equivalent" | "self-assessment"
    case: Optional[int] = None
    probe: Optional[Fraction] = None
    overage: Optional[Fraction] = None

    def to_json_dict(self) -> dict:
        return {
            "stage": self.stage,
            "rents": None if self.rents is None else {r: format_rational(v) for r, v in self.rents.items()},
            "budget": None if self.budget is None else format_rational(self.budget),
            "rho": None if self.rho is None else format_rational(self.rho),
            "rho_source": self.rho_source,
            "case": self.case,
            "probe": None if self.probe is None else format_rational(self.probe),
            "overage": None if self.overage is None else format_rational(self.overage),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "AgentState":
        frac = lambda x: None if x is None else Fraction(x)
        return cls(
            stage=doc["stage"],
            rents=None if doc["rents"] is None else {r: Fraction(v) for r, v in doc["rents"].items()},
            budget=frac(doc["budget"]),
            rho=frac(doc["rho"]),
            rho_source=doc["rho_source"],
            case=doc["case"],
            probe=frac(doc["probe"]),
            overage=frac(doc["overage"]),
        )


@dataclass(frozen=True)
class Question:
    agent: str
    kind: str
    prompt: str
    fields: dict

    def to_json_dict(self) -> dict:
        return {"agent": self.agent, "kind": self.kind, "prompt": self.prompt, "fields": self.fields}


@dataclass
class Session:
    session_id: str
    agents: Sequence[str]
    rooms: Sequence[str]
    total_rent: Fraction
    rho_menu: Sequence[Fraction]
    rho_bar: Fraction
    case3_statistic: Optional[Fraction] = None  # None: menu median
    states: Mapping[str, AgentState] = field(default_factory=dict)

    def __post_init__(self):
        self.agents = tuple(self.agents)
        self.rooms = tuple(self.rooms)
        self.total_rent = Fraction(self.total_rent)
        self.rho_menu = tuple(Fraction(q) for q in self.rho_menu)
        self.rho_bar = Fraction(self.rho_bar)
        if not self.agents or not self.rooms:
            raise ElicitationError("session_invalid", "sessions need agents and rooms")
        if len(self.agents) != len(self.rooms):
            raise ElicitationError("session_invalid", "need as many rooms as agents")
        if not self.rho_menu:
            raise ElicitationError("session_invalid", "rho menu must be non-empty")
        if not self.states:
            self.states = {i: AgentState() for i in self.agents}

    # -- question flow ------------------------------------------------------

    @property
    def done(self) -> bool:
        return all(s.stage == DONE for s in self.states.values())

    def _active_agent(self) -> str:
        for i in self.agents:
            if self.states[i].stage != DONE:
                return i
        raise ElicitationError("session_done", "all agents have finished")

    def population_statistic(self) -> Fraction:
        if self.case3_statistic is not None:
            return self.case3_statistic
        menu = sorted(self.rho_menu)
        return menu[(len(menu) - 1) // 2]

    def next_question(self) -> Question:
        agent = self._active_agent()
        state = self.states[agent]
        if state.stage == AWAIT_RENTS:
            return Question(
                agent,
                "rents",
                "Assign a rent to each room so the total is collected and you are "
                "indifferent between receiving each room at its rent.",
                {
                    "rooms": list(self.rooms),
                    "sum": format_rational(self.total_rent),
                },
            )
        if state.stage == AWAIT_BUDGET:
            return Question(agent, "budget", "What is your budget?", {"minimum": "0"})
        if state.stage == AWAIT_RHO_EQUIVALENT:
            options = self._equivalent_options(state)
            return Question(
                agent,
                "rho_equivalent",
                f"A rebate of {format_rational(state.probe)} on your dearest room: "
                "what rebate on your cheapest room would be worth the same to you?",
                {
                    "probe": format_rational(state.probe),
                    "overage": format_rational(state.overage),
                    "options": [format_rational(q) for q in options],
                    "range": [
                        format_rational(min(options)),
                        format_rational(max(options)),
                    ],
                },
            )
        if state.stage == AWAIT_RHO_SELF_ASSESSMENT:
            return Question(
                agent,
                "rho_self_assessment",
                "Compared to the population, how hard is it for you to pay above "
                "your budget?",
                {"options": list(SELF_ASSESSMENT_OPTIONS)},
            )
        raise ElicitationError("session_done", "all agents have finished")

    def _equivalent_options(self, state: AgentState) -> list:
        x = state.probe - 1  # probe = x + 1 by construction
        induced = sorted({state.probe + q * min(state.probe, state.overage) for q in self.rho_menu})
        window = [q for q in induced if x + 1 <= q <= x + self.rho_bar]
        return window or induced

    # -- answers ------------------------------------------------------------

    def submit_answer(self, payload: Mapping, agent: Optional[str] = None) -> Question | None:
        """Apply one answer for the active agent; returns the next question
        or None when the session is complete."""
        active = self._active_agent()
        if agent is not None and agent != active:
            raise ElicitationError("wrong_agent", f"waiting on agent {active!r}")
        state = self.states[active]
        if state.stage == AWAIT_RENTS:
            self._apply_rents(state, payload)
        elif state.stage == AWAIT_BUDGET:
            self._apply_budget(state, payload)
        elif state.stage == AWAIT_RHO_EQUIVALENT:
            self._apply_equivalent(state, payload)
        elif state.stage == AWAIT_RHO_SELF_ASSESSMENT:
            self._apply_self_assessment(state, payload)
        else:
            raise ElicitationError("session_done", "all agents have finished")
        return None if self.done else self.next_question()

    def _apply_rents(self, state: AgentState, payload):
        raw = payload.get("rents")
        if not isinstance(raw, Mapping) or set(raw) != set(self.rooms):
            raise ElicitationError("rents_invalid", "rents must cover exactly the rooms")
        rents = {room: parse_rational(v) for room, v in raw.items()}
        total = sum(rents.values(), start=ZERO)
        if total != self.total_rent:
            raise ElicitationError(
                "rent_sum_mismatch",
                f"rents sum to {format_rational(total)}, expected {format_rational(self.total_rent)}",
            )
        state.rents = rents
        state.stage = AWAIT_BUDGET

    def _apply_budget(self, state: AgentState, payload):
        budget = parse_rational(payload.get("budget"))
        if budget < 0:
            raise ElicitationError("budget_invalid", "budgets must be >= 0")
        state.budget = budget
        state.case = classify_case(list(state.rents.values()), budget)
        if state.case == 1:
            state.rho = min(self.rho_menu)
            state.rho_source = "unused"
            state.stage = DONE
        elif state.case == 2:
            violations = [r - budget for r in state.rents.values() if r > budget]
            x = min(violations)
            state.probe = x + 1
            top = max(state.rents.values())
            state.overage = top - budget
            state.stage = AWAIT_RHO_EQUIVALENT
        else:
            state.stage = AWAIT_RHO_SELF_ASSESSMENT

    def _apply_equivalent(self, state: AgentState, payload):
        equivalent = parse_rational(payload.get("equivalent"))
        options = self._equivalent_options(state)
        if equivalent not in options:
            raise ElicitationError(
                "answer_out_of_range",
                f"answer must be one of {[format_rational(q) for q in options]}",
            )
        state.rho = infer_rho(equivalent, state.probe, state.overage, self.rho_menu)
        state.rho_source = "equivalent"
        state.stage = DONE

    def _apply_self_assessment(self, state: AgentState, payload):
        choice = payload.get("assessment")
        if choice not in SELF_ASSESSMENT_OPTIONS:
            raise ElicitationError(
                "answer_out_of_range", f"answer must be one of {SELF_ASSESSMENT_OPTIONS}"
            )
        stat = self.population_statistic()
        menu = sorted(self.rho_menu)
        if choice == "typical":
            state.rho = stat
        elif choice == "lower":
            below = [q for q in menu if q < stat]
            state.rho = below[-1] if below else menu[0]
        else:
            above = [q for q in menu if q > stat]
            state.rho = above[0] if above else menu[-1]
        state.rho_source = "self-assessment"
        state.stage = DONE

    # -- output -------------------------------------------------------------

    def build_economy(self) -> Economy:
        """Recovered economy: utilities are zero at every reported rent."""
        if not self.done:
            raise ElicitationError("session_incomplete", "not all agents have finished")
        prefs = {}
        for i in self.agents:
            s = self.states[i]
            values = {
                room: rent + s.rho * max(ZERO, rent - s.budget)
                for room, rent in s.rents.items()
            }
            prefs[i] = Preference(values=values, budget=s.budget, rho=s.rho)
        return Economy(
            agents=self.agents,
            rooms=self.rooms,
            preferences=prefs,
            total_rent=self.total_rent,
            rho_menu=self.rho_menu,
            rho_bar=self.rho_bar,
        )

    # -- persistence --------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "agents": list(self.agents),
            "rooms": list(self.rooms),
            "total_rent": format_rational(self.total_rent),
            "rho_menu": [format_rational(q) for q in self.rho_menu],
            "rho_bar": format_rational(self.rho_bar),
            "case3_statistic": None
            if self.case3_statistic is None
            else format_rational(self.case3_statistic),
            "states": {i: s.to_json_dict() for i, s in self.states.items()},
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Session":
        return cls(
            session_id=doc["session_id"],
            agents=doc["agents"],
            rooms=doc["rooms"],
            total_rent=Fraction(doc["total_rent"]),
            rho_menu=[Fraction(q) for q in doc["rho_menu"]],
            rho_bar=Fraction(doc["rho_bar"]),
            case3_statistic=None
            if doc.get("case3_statistic") is None
            else Fraction(doc["case3_statistic"]),
            states={i: AgentState.from_json_dict(s) for i, s in doc["states"].items()},
        )


def new_session(
    agents: Sequence[str],
    rooms: Sequence[str],
    total_rent: Fraction,
    rho_menu: Sequence[Fraction],
    rho_bar: Fraction,
    case3_statistic: Optional[Fraction] = None,
) -> Session:
    return Session(
        session_id=uuid.uuid4().hex,
        agents=agents,
        rooms=rooms,
        total_rent=total_rent,
        rho_menu=rho_menu,
        rho_bar=rho_bar,
        case3_statistic=case3_statistic,
    )

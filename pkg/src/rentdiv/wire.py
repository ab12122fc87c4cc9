"""JSON wire formats with exact rationals.

Rationals travel as strings ("3", "-7/2", also accepted: "1.25"); floats are
rejected so nothing on the wire can silently lose exactness. Documents
round-trip bit-for-bit through parse/serialize.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .model import Allocation, Economy, Preference


class DocumentError(ValueError):
    """Malformed wire document; `code` is stable across releases."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def parse_rational(raw) -> Fraction:
    if isinstance(raw, bool) or isinstance(raw, float):
        raise DocumentError("invalid_rational", f"rationals must be strings or ints, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise DocumentError("invalid_rational", f"cannot parse rational from {raw!r}")
    raise DocumentError("invalid_rational", f"cannot parse rational from {raw!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _require(doc: Mapping, key: str, code: str = "economy_invalid"):
    if key not in doc:
        raise DocumentError(code, f"missing field {key!r}")
    return doc[key]


def parse_economy(doc: Mapping) -> Economy:
    if not isinstance(doc, Mapping):
        raise DocumentError("economy_invalid", "economy document must be an object")
    rooms = _require(doc, "rooms")
    agents_doc = _require(doc, "agents")
    if not isinstance(agents_doc, list) or not agents_doc:
        raise DocumentError("economy_invalid", "agents must be a non-empty list")
    if not isinstance(rooms, list):
        raise DocumentError("economy_invalid", "rooms must be a list")
    agents = []
    prefs = {}
    for entry in agents_doc:
        agent_id = _require(entry, "id")
        values = {room: parse_rational(v) for room, v in _require(entry, "values").items()}
        budget = parse_rational(_require(entry, "budget"))
        rho = parse_rational(_require(entry, "rho"))
        agents.append(agent_id)
        try:
            prefs[agent_id] = Preference(values=values, budget=budget, rho=rho)
        except ValueError as exc:
            raise DocumentError("economy_invalid", f"agent {agent_id!r}: {exc}")
    try:
        return Economy(
            agents=agents,
            rooms=rooms,
            preferences=prefs,
            total_rent=parse_rational(_require(doc, "total_rent")),
            rho_menu=[parse_rational(q) for q in _require(doc, "rho_menu")],
            rho_bar=parse_rational(_require(doc, "rho_bar")),
        )
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError("economy_invalid", str(exc))


def serialize_economy(e: Economy) -> dict:
    return {
        "agents": [
            {
                "id": i,
                "values": {room: format_rational(v) for room, v in e.preferences[i].values.items()},
                "budget": format_rational(e.preferences[i].budget),
                "rho": format_rational(e.preferences[i].rho),
            }
            for i in e.agents
        ],
        "rooms": list(e.rooms),
        "total_rent": format_rational(e.total_rent),
        "rho_menu": [format_rational(q) for q in e.rho_menu],
        "rho_bar": format_rational(e.rho_bar),
    }


def parse_allocation(doc: Mapping) -> Allocation:
    if not isinstance(doc, Mapping):
        raise DocumentError("allocation_invalid", "allocation document must be an object")
    assignment = _require(doc, "assignment", "allocation_invalid")
    rents = _require(doc, "rents", "allocation_invalid")
    return Allocation(
        assignment=dict(assignment),
        rents={room: parse_rational(v) for room, v in rents.items()},
    )


def serialize_allocation(z: Allocation) -> dict:
    return {
        "assignment": dict(z.assignment),
        "rents": {room: format_rational(v) for room, v in z.rents.items()},
    }

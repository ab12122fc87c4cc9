from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rentdiv.wire import (
    DocumentError,
    format_rational,
    parse_allocation,
    parse_economy,
    parse_rational,
    serialize_allocation,
    serialize_economy,
)
from tests.conftest import alloc

rationals = st.fractions(min_value=-10000, max_value=10000, max_denominator=997)


class TestRationals:
    @pytest.mark.parametrize(
        "raw,expected",
        [("1/3", F(1, 3)), ("-7/2", F(-7, 2)), ("42", F(42)), (3, F(3)), ("1.25", F(5, 4))],
    )
    def test_parse(self, raw, expected):
        assert parse_rational(raw) == expected

    @pytest.mark.parametrize("raw", [1.5, True, None, "x", "1/0", {}])
    def test_rejects(self, raw):
        with pytest.raises(DocumentError):
            parse_rational(raw)

    @given(q=rationals)
    def test_round_trip(self, q):
        assert parse_rational(format_rational(q)) == q


class TestEconomyDocuments:
    def doc(self):
        return {
            "agents": [
                {"id": "1", "values": {"a": "100", "b": "60"}, "budget": "60", "rho": "1"},
                {"id": "2", "values": {"a": "80", "b": "70"}, "budget": "0", "rho": "0"},
            ],
            "rooms": ["a", "b"],
            "total_rent": "100",
            "rho_menu": ["0", "1"],
            "rho_bar": "1",
        }

    def test_round_trip(self):
        e = parse_economy(self.doc())
        assert serialize_economy(e) == self.doc()
        assert e.preferences["1"].rho == F(1)

    def test_fractional_round_trip(self):
        doc = self.doc()
        doc["agents"][0]["rho"] = "1/3"
        doc["rho_menu"] = ["0", "1/3"]
        e = parse_economy(doc)
        assert serialize_economy(e)["agents"][0]["rho"] == "1/3"

    def test_empty_agents_rejected(self):
        doc = self.doc()
        doc["agents"] = []
        with pytest.raises(DocumentError) as exc:
            parse_economy(doc)
        assert exc.value.code == "economy_invalid"

    def test_missing_field_rejected(self):
        doc = self.doc()
        del doc["total_rent"]
        with pytest.raises(DocumentError):
            parse_economy(doc)

    def test_rho_off_menu_rejected(self):
        doc = self.doc()
        doc["agents"][0]["rho"] = "2"
        with pytest.raises(DocumentError):
            parse_economy(doc)

    @given(data=st.data())
    def test_economy_round_trips_random(self, data):
        import random

        from rentdiv.oracle import random_economy

        seed = data.draw(st.integers(0, 10**6))
        e = random_economy(random.Random(seed), data.draw(st.integers(1, 4)))
        assert parse_economy(serialize_economy(e)) == e


class TestAllocationDocuments:
    def test_round_trip(self):
        z = alloc({"1": "a", "2": "b"}, {"a": F(190, 3), "b": F(110, 3)})
        doc = serialize_allocation(z)
        assert doc["rents"]["a"] == "190/3"
        assert parse_allocation(doc) == z

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rentdiv.elicitation import (
    AWAIT_BUDGET,
    AWAIT_RHO_EQUIVALENT,
    DONE,
    ElicitationError,
    Session,
    classify_case,
    infer_rho,
    new_session,
)
from rentdiv.solver import solve

MENU = (F(0), F(1, 2), F(1), F(101, 100), F(2))


def session(agents=("alice", "bob"), rooms=("a", "b"), total=F(800), menu=MENU, rho_bar=F(110)):
    return new_session(agents=agents, rooms=rooms, total_rent=total, rho_menu=menu, rho_bar=rho_bar)


class TestCaseClassification:
    def test_all_below_is_case_1(self):
        assert classify_case([F(30), F(70)], F(100)) == 1

    def test_mixed_is_case_2(self):
        assert classify_case([F(500), F(300)], F(400)) == 2

    def test_equal_above_is_case_3(self):
        assert classify_case([F(400), F(400)], F(300)) == 3

    @given(
        rents=st.lists(st.fractions(min_value=0, max_value=100, max_denominator=8), min_size=1, max_size=4),
        budget=st.fractions(min_value=0, max_value=100, max_denominator=8),
    )
    def test_total_and_mutually_exclusive(self, rents, budget):
        case = classify_case(rents, budget)
        assert case in (1, 2, 3)
        in_1 = all(r <= budget for r in rents)
        in_2 = len(set(rents)) > 1 and any(r > budget for r in rents)
        in_3 = len(set(rents)) == 1 and all(r > budget for r in rents)
        assert [in_1, in_2, in_3].count(True) == 1
        assert [in_1, in_2, in_3][case - 1]


class TestInferRho:
    def test_spec_numbers(self):
        # equivalent 202 for probe 101 on overage 100: raw 101/100, on menu
        assert infer_rho(F(202), F(101), F(100), MENU) == F(101, 100)

    def test_equivalent_equal_to_probe_is_zero(self):
        assert infer_rho(F(101), F(101), F(100), MENU) == F(0)

    def test_boundary_maps_to_top_of_menu(self):
        probe, overage = F(10), F(30)
        top = max(MENU)
        assert infer_rho(probe + top * min(probe, overage), probe, overage, MENU) == top

    def test_snapping_prefers_smaller_on_ties(self):
        menu = (F(0), F(1))
        # raw rho = 1/2 sits exactly between; snap down
        assert infer_rho(F(15), F(10), F(30), menu) == F(0)

    def test_inconsistent_answer_rejected(self):
        with pytest.raises(ElicitationError) as exc:
            infer_rho(F(100), F(101), F(100), MENU)
        assert exc.value.code == "answer_out_of_range"


class TestSessionFlow:
    def test_case_2_script_matches_protocol(self):
        s = session()
        q = s.next_question()
        assert q.kind == "rents" and q.fields["sum"] == "800"
        s.submit_answer({"rents": {"a": "500", "b": "300"}})
        assert s.states["alice"].stage == AWAIT_BUDGET
        q = s.next_question()
        assert q.kind == "budget"
        nxt = s.submit_answer({"budget": "400"})
        assert s.states["alice"].case == 2
        assert s.states["alice"].stage == AWAIT_RHO_EQUIVALENT
        assert nxt.kind == "rho_equivalent"
        # minimal budget violation is 100, so the probe is 101 on overage 100
        assert nxt.fields["probe"] == "101"
        assert nxt.fields["overage"] == "100"
        assert "202" in nxt.fields["options"]
        s.submit_answer({"equivalent": "202"})
        state = s.states["alice"]
        assert state.stage == DONE
        assert state.rho == F(101, 100)
        assert state.rho_source == "equivalent"

    def test_case_1_skips_rho(self):
        s = session(total=F(100))
        s.submit_answer({"rents": {"a": "30", "b": "70"}})
        s.submit_answer({"budget": "100"})
        state = s.states["alice"]
        assert state.case == 1 and state.stage == DONE
        assert state.rho == min(MENU) and state.rho_source == "unused"

    def test_case_3_self_assessment(self):
        s = session()
        s.submit_answer({"rents": {"a": "400", "b": "400"}})
        q = s.submit_answer({"budget": "300"})
        assert q.kind == "rho_self_assessment"
        s.submit_answer({"assessment": "higher"})
        state = s.states["alice"]
        assert state.case == 3 and state.stage == DONE
        # statistic defaults to the menu median (1); "higher" picks the next one up
        assert state.rho == F(101, 100)

    def test_rent_sum_mismatch_rejected(self):
        s = session()
        with pytest.raises(ElicitationError) as exc:
            s.submit_answer({"rents": {"a": "500", "b": "200"}})
        assert exc.value.code == "rent_sum_mismatch"

    def test_out_of_range_equivalent_rejected(self):
        s = session()
        s.submit_answer({"rents": {"a": "500", "b": "300"}})
        s.submit_answer({"budget": "400"})
        with pytest.raises(ElicitationError) as exc:
            s.submit_answer({"equivalent": "150"})
        assert exc.value.code == "answer_out_of_range"

    def test_done_session_refuses_more(self):
        s = session(agents=("solo",), rooms=("r",), total=F(100))
        s.submit_answer({"rents": {"r": "100"}})
        s.submit_answer({"budget": "100"})
        assert s.done
        with pytest.raises(ElicitationError) as exc:
            s.next_question()
        assert exc.value.code == "session_done"

    def test_persistence_round_trip(self):
        s = session()
        s.submit_answer({"rents": {"a": "500", "b": "300"}})
        restored = Session.from_json_dict(s.to_json_dict())
        assert restored.states["alice"].stage == AWAIT_BUDGET
        assert restored.states["alice"].rents == {"a": F(500), "b": F(300)}


class TestBuildEconomy:
    def test_section3_recovery(self):
        # rents (500, 300), budget 400, index 1: values come back (600, 300)
        # so that both reported bundles sit at utility zero.
        s = session(menu=(F(0), F(1)), rho_bar=F(110))
        s.submit_answer({"rents": {"a": "500", "b": "300"}})
        s.submit_answer({"budget": "400"})
        q = s.next_question()
        assert "201" in q.fields["options"]  # rho = 1 answer
        s.submit_answer({"equivalent": "201"})
        s.submit_answer({"rents": {"a": "450", "b": "350"}}, agent="bob")
        s.submit_answer({"budget": "800"}, agent="bob")
        e = s.build_economy()
        pref = e.preferences["alice"]
        assert pref.values == {"a": F(600), "b": F(300)}
        assert pref.rho == F(1)
        assert e.utility("alice", F(500), "a") == F(0)
        assert e.utility("alice", F(300), "b") == F(0)

    def test_two_agent_round_trip_solves(self):
        # Indifference-rent reports for two quasi-linear agents; the solve
        # of the recovered economy equalizes the recovered utilities.
        s = new_session(
            agents=("1", "2"),
            rooms=("a", "b"),
            total_rent=F(100),
            rho_menu=(F(0),),
            rho_bar=F(0),
        )
        s.submit_answer({"rents": {"a": "70", "b": "30"}}, agent="1")
        s.submit_answer({"budget": "100"}, agent="1")
        s.submit_answer({"rents": {"a": "55", "b": "45"}}, agent="2")
        s.submit_answer({"budget": "100"}, agent="2")
        e = s.build_economy()
        assert e.preferences["1"].values == {"a": F(70), "b": F(30)}
        result = solve(e)
        # With utility-zero normalization the recovered maxmin splits the
        # envy-free interval r_a in [55, 70] at its midpoint.
        assert result.allocation.rents == {"a": F(125, 2), "b": F(75, 2)}
        assert result.certificate.ok

    def test_incomplete_session_refuses(self):
        s = session()
        with pytest.raises(ElicitationError) as exc:
            s.build_economy()
        assert exc.value.code == "session_incomplete"

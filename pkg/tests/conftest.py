from fractions import Fraction as F

import pytest

from rentdiv.model import Allocation, Economy, Preference


@pytest.fixture
def e1() -> Economy:
    """Two quasi-linear agents, total rent 100."""
    return Economy(
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


@pytest.fixture
def e2() -> Economy:
    """E1 with agent 1 budget-sensitive: b1=60, rho1=1; agent 2 stays quasi-linear."""
    return Economy(
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


def alloc(assignment, rents) -> Allocation:
    return Allocation(assignment=assignment, rents={r: F(v) for r, v in rents.items()})

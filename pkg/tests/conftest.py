import pytest

from cicert.groebner import IdealHandle
from cicert.ideals import intersect
from cicert.poly import GF, QQ, MonomialOrder, RingSpec

SKEW_GENS = ("x^2 - x", "x*y - y", "x*z", "y*z")


@pytest.fixture(scope="session")
def R3():
    return RingSpec(("x", "y", "z"), QQ)


@pytest.fixture(scope="session")
def R2():
    return RingSpec(("x", "y"), QQ)


@pytest.fixture(scope="session")
def R3_lex():
    return RingSpec(("x", "y", "z"), QQ, MonomialOrder("lex"))


@pytest.fixture(scope="session")
def F5_2():
    return RingSpec(("x", "y"), GF(5))


@pytest.fixture(scope="session")
def skew_lines(R3):
    """(x, y) intersect (x - 1, z): two disjoint lines in 3-space."""
    meet = intersect(IdealHandle(R3, ["x", "y"]),
                     IdealHandle(R3, ["x - 1", "z"]))
    handle = IdealHandle(R3, meet.groebner())
    assert tuple(str(g) for g in handle.gens) == SKEW_GENS
    return handle


@pytest.fixture(scope="session")
def skew_pair(R3):
    return (R3.parse("x^2 - x"), R3.parse("(1 - x)*y + x*z"))


@pytest.fixture(scope="session")
def twisted_cubic(R3):
    return IdealHandle(R3, ["y - x^2", "z - x^3"])


@pytest.fixture(scope="session")
def c345(R3):
    """The (t^3, t^4, t^5) monomial curve, not lci at the origin."""
    return IdealHandle(R3, ["x*z - y^2", "x^3 - y*z", "x^2*y - z^2"])


@pytest.fixture(scope="session")
def quotient_dim3():
    """A = QQ[x,y,z,w]/(w), a three-dimensional quotient ring."""
    bare = RingSpec(("x", "y", "z", "w"), QQ)
    return bare.quotient([bare.gen("w")])


@pytest.fixture(scope="session")
def skew_in_quotient(quotient_dim3):
    return IdealHandle(quotient_dim3, list(SKEW_GENS))


@pytest.fixture(scope="session")
def f5_cylinder():
    """Cylinder over the skew lines: a surface in 4-space over F5."""
    ring = RingSpec(("x", "y", "z", "w"), GF(5))
    return IdealHandle(ring, list(SKEW_GENS))

import random

from cicert.groebner import IdealHandle
from cicert.ideals import (
    RadicalEqualityCertificate,
    RadicalRefutation,
    dimension_height,
    eliminate,
    intersect,
    quotient,
    radical_equal,
    radical_member,
    saturate,
)
from cicert.poly import GF, QQ, RingSpec

from oracles import variety_points, eval_at


def H(ring, *gens):
    return IdealHandle(ring, list(gens))


# -- quotient


def test_quotient_examples(R3):
    assert quotient(H(R3, "x^2"), R3.gen("x")).equals(H(R3, "x"))
    assert quotient(H(R3, "x*y"), R3.gen("x")).equals(H(R3, "y"))


def test_quotient_in_quotient_ring():
    bare = RingSpec(("x", "y"), QQ)
    A = bare.quotient([bare.parse("x*y")])
    ann = quotient(H(A), A.gen("x"))
    assert ann.equals(H(A, "y"))


def test_quotient_by_zero_is_unit(R3):
    assert quotient(H(R3, "x"), R3.zero).is_unit()


def test_quotient_by_ideal(R3):
    got = quotient(H(R3, "x*y", "x*z"), H(R3, "y", "z"))
    assert got.equals(H(R3, "x"))


def test_quotient_contains_ideal(R3):
    I = H(R3, "x^2 - x", "x*y")
    col = quotient(I, R3.gen("x"))
    assert col.contains_ideal(I)


def test_nzd_iff_colon_stable(R3):
    I = H(R3, "x*y")
    assert not quotient(I, R3.gen("x")).equals(I)  # x is a zerodivisor mod (xy)
    J = H(R3, "y - x^2")
    assert quotient(J, R3.gen("x")).equals(J)  # x is a non-zerodivisor


# -- saturation


def test_saturate_examples(R3):
    assert saturate(H(R3, "x^2*y"), R3.gen("y")).equals(H(R3, "x^2"))
    assert saturate(H(R3, "x"), R3.gen("x")).is_unit()
    got = saturate(H(R3, "x^2 - x", "x*z"), R3.gen("x"))
    assert got.equals(H(R3, "x - 1", "z"))


def test_saturation_is_stable_colon_limit(R3):
    I = H(R3, "x^3*y^2", "x^2*z")
    f = R3.gen("x")
    chain = I
    for _ in range(6):
        nxt = quotient(chain, f)
        if nxt.equals(chain):
            break
        chain = nxt
    assert chain.equals(saturate(I, f))


# -- intersection


def test_intersect_examples(R3, skew_lines):
    assert intersect(H(R3, "x"), H(R3, "y")).equals(H(R3, "x*y"))
    assert intersect(H(R3, "x"), H(R3, "x")).equals(H(R3, "x"))
    meet = intersect(H(R3, "x", "y"), H(R3, "x - 1", "z"))
    assert meet.equals(skew_lines)
    # mutual membership: the intersection sits inside both
    for g in meet.gens:
        assert H(R3, "x", "y").contains(g)
        assert H(R3, "x - 1", "z").contains(g)


# -- elimination


def test_eliminate_parabola():
    R = RingSpec(("t", "x", "y"), QQ)
    got = eliminate(H(R, "t - x", "t^2 - y"), ["t"])
    assert got.equals(H(R, "x^2 - y"))
    assert all(m[0] == 0 for g in got.gens for m, _ in g.terms)


def test_eliminate_unused_variable(R3):
    assert eliminate(H(R3, "x"), ["y"]).equals(H(R3, "x"))


def test_eliminate_no_relation():
    R = RingSpec(("t", "x"), QQ)
    assert eliminate(H(R, "t*x - 1"), ["t"]).is_zero_ideal()


# -- radical membership


def test_radical_member_examples(R3):
    w = radical_member(R3.gen("x"), H(R3, "x^2"), want_exponent=True)
    assert w.member and w.exponent == 2
    assert not radical_member(R3.gen("y"), H(R3, "x")).member
    w3 = radical_member(R3.parse("x + y"), H(R3, "(x + y)^3"), want_exponent=True)
    assert w3.member and w3.exponent == 3


def test_radical_member_vs_points_over_f5():
    """For an ideal of rational points, radical membership must agree
    with vanishing at every point of the variety."""
    ring = RingSpec(("x", "y"), GF(5))
    rng = random.Random(3)
    for _ in range(6):
        pts = {(rng.randrange(5), rng.randrange(5)) for _ in range(rng.randint(1, 3))}
        handle = None
        for (a, b) in pts:
            m = H(ring, f"x - {a}", f"y - {b}")
            handle = m if handle is None else intersect(handle, m)
        assert set(variety_points(handle.gens, ring)) == pts
        for _ in range(8):
            f = ring.poly_from_dict({
                (rng.randrange(3), rng.randrange(3)): rng.randrange(5)
                for _ in range(2)})
            vanishes = all(eval_at(f, p) == 0 for p in pts)
            assert radical_member(f, handle).member == vanishes


# -- radical equality


def test_radical_equal_certificate(R3):
    cert = radical_equal(H(R3, "x^2"), H(R3, "x"))
    assert isinstance(cert, RadicalEqualityCertificate)
    assert cert.verify()


def test_radical_equal_refutation(R3):
    out = radical_equal(H(R3, "x"), H(R3, "y"))
    assert isinstance(out, RadicalRefutation)
    assert str(out.generator) == "x"


def test_radical_equal_skew_pair(R3, skew_lines, skew_pair):
    cert = radical_equal(H(R3, *[str(p) for p in skew_pair]), skew_lines)
    assert isinstance(cert, RadicalEqualityCertificate)
    assert cert.verify()


def test_radical_equal_is_equivalence_on_samples(R3):
    a = H(R3, "x^2")
    b = H(R3, "x")
    c = H(R3, "x^3")
    # reflexive, and transitive across the sampled triple
    assert isinstance(radical_equal(a, a), RadicalEqualityCertificate)
    ab = radical_equal(a, b)
    bc = radical_equal(b, c)
    ac = radical_equal(a, c)
    assert all(isinstance(t, RadicalEqualityCertificate) for t in (ab, bc, ac))


def test_tampered_radical_witness_fails_verify(R3):
    cert = radical_equal(H(R3, "x^2"), H(R3, "x"))
    cert.witnesses[0][1].aux_gb_hash = "sha256:0000"
    assert not cert.verify()


# -- dimension and height


def test_dimension_examples(R3):
    r1 = dimension_height(H(R3, "x"))
    assert (r1.dim_quotient, r1.height) == (2, 1)
    r2 = dimension_height(H(R3, "x", "y"))
    assert (r2.dim_quotient, r2.height) == (1, 2)


def test_dimension_skew_lines(R3, skew_lines):
    r = dimension_height(skew_lines)
    assert (r.dim_quotient, r.dim_ambient, r.height) == (1, 3, 2)
    assert r.height_definition == "coheight"


def test_dimension_independent_set_maximal(R3, skew_lines):
    r = dimension_height(skew_lines)
    lt_supports = [frozenset(i for i, e in enumerate(g.lead_monomial) if e)
                   for g in skew_lines.groebner()]
    u = {R3.variables.index(v) for v in r.independent_set}
    assert all(not s <= u for s in lt_supports)
    for extra in range(3):
        if extra in u:
            continue
        bigger = u | {extra}
        assert any(s <= bigger for s in lt_supports)


def test_dimension_invariant_under_generators_and_permutation(R3, skew_lines):
    regen = IdealHandle(R3, list(skew_lines.groebner()) + [
        skew_lines.gens[0] + skew_lines.gens[1]])
    a = dimension_height(skew_lines)
    b = dimension_height(regen)
    assert (a.dim_quotient, a.height) == (b.dim_quotient, b.height)
    perm = RingSpec(("z", "x", "y"), QQ)
    permuted = IdealHandle(perm, ["x^2 - x", "x*y - y", "x*z", "y*z"])
    c = dimension_height(permuted)
    assert (c.dim_quotient, c.height) == (a.dim_quotient, a.height)


def test_dimension_in_quotient_ring(quotient_dim3, skew_in_quotient):
    r = dimension_height(skew_in_quotient)
    assert (r.dim_ambient, r.dim_quotient, r.height) == (3, 1, 2)


def test_dimension_unit_ideal(R3):
    r = dimension_height(H(R3, "x", "x + 1"))
    assert r.unit_ideal and r.dim_quotient == -1 and r.height is None

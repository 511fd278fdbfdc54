import random

import pytest

from cicert.groebner import IdealHandle
from cicert.homology import koszul2_exactness
from cicert.ideals import quotient, saturate
from cicert.pipeline import (
    Budgets,
    CICertificate,
    Inconclusive,
    InputError,
    LCIProxyCertificate,
    LCIRefutation,
    RegSeqCertificate,
    RegSeqFailure,
    RegularizationResult,
    STCICertificate,
    STCIRefutation,
    ci_from_free_conormal,
    extend_scalars,
    is_nzd,
    is_regular_sequence,
    lci_certificate,
    mod_square_generation,
    regularize_generators,
    stci_search,
    stci_verify,
)
from cicert.poly import GF, QQ, RingSpec

from oracles import bounded_zerodivisor_witness


def H(ring, *gens):
    return IdealHandle(ring, list(gens))


# -- non-zerodivisor checks


def test_nzd_in_domain(R3):
    assert is_nzd(R3.gen("x"), H(R3)).nzd


def test_nzd_witness_xy(R3):
    r = is_nzd(R3.gen("x"), H(R3, "x*y"))
    assert not r.nzd
    assert (r.witness * R3.gen("x")).terms  # nonzero
    assert H(R3, "x*y").contains(r.witness * R3.gen("x"))
    assert not H(R3, "x*y").contains(r.witness)


def test_nzd_witness_xz(R3):
    r = is_nzd(R3.gen("z"), H(R3, "x*z"))
    assert not r.nzd and str(r.witness) == "x"


# -- regular sequences


def test_regseq_certificate_and_replay(R3):
    cert = is_regular_sequence((R3.gen("x"), R3.gen("y")), H(R3))
    assert isinstance(cert, RegSeqCertificate)
    assert cert.verify()


def test_regseq_failure_index(R3):
    out = is_regular_sequence((R3.gen("x"), R3.parse("x*y")), None)
    assert isinstance(out, RegSeqFailure) and out.index == 2


def test_regseq_skew_pair(R3, skew_pair):
    cert = is_regular_sequence(skew_pair, None)
    assert isinstance(cert, RegSeqCertificate) and cert.verify()


def test_regseq_tampered_hash_fails(R3):
    cert = is_regular_sequence((R3.gen("x"), R3.gen("y")), None)
    cert.steps[1].colon_hash = "sha256:bad"
    assert not cert.verify()


# -- coherence: exactness of the length-2 Koszul complex must agree with
# the regular-sequence test


def _random_poly(ring, rng, deg):
    acc = {}
    for _ in range(rng.randint(1, 3)):
        mono = [0] * ring.nvars
        for _ in range(rng.randint(0, deg)):
            mono[rng.randrange(ring.nvars)] += 1
        acc[tuple(mono)] = ring.field.coerce(rng.randint(-2, 2))
    return ring.poly_from_dict(acc)


def test_koszul2_matches_regular_sequence_on_random_pairs():
    bare = RingSpec(("x", "y"), QQ)
    quo = bare.quotient([bare.parse("x*y")])
    rng = random.Random(42)
    checked = 0
    for _ in range(40):
        ring = quo if rng.random() < 0.3 else bare
        x, y = _random_poly(ring, rng, 2), _random_poly(ring, rng, 2)
        if not x or not y:
            continue
        exact = koszul2_exactness(x, y).exact
        regular = isinstance(is_regular_sequence((x, y), None), RegSeqCertificate)
        assert exact == regular, f"disagreement on ({x}, {y}) in {ring.describe()}"
        checked += 1
    assert checked >= 30


def test_koszul2_matches_regular_sequence_on_fixtures(R3, skew_pair):
    fixtures = [
        (R3.gen("x"), R3.gen("y"), True),
        (R3.gen("x"), R3.parse("x*y"), False),
        (skew_pair[0], skew_pair[1], True),
        (R3.parse("y - x^2"), R3.parse("z - x^3"), True),
    ]
    for x, y, expected in fixtures:
        assert koszul2_exactness(x, y).exact is expected
        assert isinstance(is_regular_sequence((x, y), None),
                          RegSeqCertificate) is expected


# -- regularization


def test_regularize_already_regular(R3):
    I = H(R3, "x", "y")
    out = regularize_generators(I, (R3.gen("x"), R3.gen("y")), seed=1)
    assert isinstance(out, RegularizationResult)
    assert out.sequence == (R3.gen("x"), R3.gen("y"))
    assert not out.perturbations
    assert out.verify()


def test_regularize_swapped_order_is_regular(R3):
    I = H(R3, "x", "y")
    out = regularize_generators(I, (R3.gen("y"), R3.gen("x")), seed=1)
    assert isinstance(out, RegularizationResult)
    assert not out.perturbations


FIXTURE_BAD_ORDER = ("y*(1 - x)", "z*(1 - x)", "x")


def test_bad_order_fixture_validated_by_oracle(R3):
    """The fixture's middle element really is a zerodivisor (oracle
    witness), and a small shift by the trailing generator repairs it."""
    g1, g2, g3 = (R3.parse(t) for t in FIXTURE_BAD_ORDER)
    w = bounded_zerodivisor_witness(g2, [g1], R3, deg_h=2, cap=4)
    assert w is not None
    assert H(R3, str(g1)).contains(w * g2)
    # exhaustive small search over scalar multiples of the trailing gen
    repaired = []
    for c in (-2, -1, 1, 2):
        cand = g2 + g3.scale(c)
        if bounded_zerodivisor_witness(cand, [g1], R3, deg_h=2, cap=4) is None:
            repaired.append(cand)
    assert repaired, "no small regularizing shift exists"


def test_regularize_repairs_bad_order(R3):
    I = H(R3, "x", "y", "z")
    fs = tuple(R3.parse(t) for t in FIXTURE_BAD_ORDER)
    assert isinstance(is_regular_sequence(fs, None), RegSeqFailure)
    out = regularize_generators(I, fs, seed=5)
    assert isinstance(out, RegularizationResult)
    assert out.perturbations and all(p.verify() for p in out.perturbations)
    assert out.verify()
    assert IdealHandle(R3, out.sequence).equals(I)


def test_regularize_rejects_wrong_generators(R3):
    with pytest.raises(InputError):
        regularize_generators(H(R3, "x", "y"), (R3.gen("x"),), seed=0)


def test_regularize_deterministic(R3):
    I = H(R3, "x", "y", "z")
    fs = tuple(R3.parse(t) for t in FIXTURE_BAD_ORDER)
    a = regularize_generators(I, fs, seed=9)
    b = regularize_generators(I, fs, seed=9)
    assert [str(g) for g in a.sequence] == [str(g) for g in b.sequence]


# -- generation modulo the square


def test_mod_square_examples(R3):
    I = H(R3, "x", "y")
    assert mod_square_generation(I, (R3.gen("x"), R3.gen("y"))).holds
    out = mod_square_generation(I, (R3.gen("x"),))
    assert not out.holds and str(out.failing) == "y"


def test_mod_square_requires_membership(R3):
    with pytest.raises(InputError):
        mod_square_generation(H(R3, "x"), (R3.gen("y"),))


def test_mod_square_skew_pair(skew_lines, skew_pair):
    assert mod_square_generation(skew_lines, skew_pair).holds


def test_nakayama_dichotomy(R3):
    """(x + x^2, y) generates (x, y) modulo the square and after
    inverting 1 + x, but not globally: exactly the local-global gap."""
    I = H(R3, "x", "y")
    c, d = R3.parse("x + x^2"), R3.gen("y")
    assert mod_square_generation(I, (c, d)).holds
    pair_ideal = H(R3, str(c), str(d))
    assert not pair_ideal.equals(I)  # global equality legitimately fails
    s = R3.parse("1 + x")  # unit near V(I), kills the extra component
    # s avoids every sampled maximal ideal containing I ...
    for z0 in (0, 1, -1):
        maximal = H(R3, "x", "y", f"z - ({z0})")
        assert maximal.contains_ideal(I)
        assert not maximal.contains(s)
    # ... and inverting it recovers I from the pair
    for g in I.gens:
        assert pair_ideal.contains(s * g)
    assert saturate(pair_ideal, s).equals(I)


# -- lci certificates


def test_lci_plane_point(R3):
    out = lci_certificate(H(R3, "x", "y"))
    assert isinstance(out, LCIProxyCertificate) and out.height == 2
    assert out.verify()


def test_lci_skew_lines(skew_lines):
    out = lci_certificate(skew_lines)
    assert isinstance(out, LCIProxyCertificate) and out.height == 2


def test_lci_refutes_c345(c345):
    out = lci_certificate(c345)
    assert isinstance(out, LCIRefutation)
    assert "fitt" in out.reason


# -- complete intersection from a free conormal


def test_ci_immediate(R2):
    I = H(R2, "x", "y")
    out = ci_from_free_conormal(I, (R2.gen("x"), R2.gen("y")), seed=0)
    assert isinstance(out, CICertificate) and out.verify()


def test_ci_skew_lines(skew_lines, skew_pair):
    out = ci_from_free_conormal(skew_lines, skew_pair, seed=0)
    assert isinstance(out, CICertificate)
    assert out.verify()


def test_ci_x2_y(R2):
    I = H(R2, "x^2", "y")
    out = ci_from_free_conormal(I, (R2.parse("x^2"), R2.gen("y")), seed=0)
    assert isinstance(out, CICertificate)


def test_ci_precondition_checked(R3, c345):
    with pytest.raises(InputError):
        ci_from_free_conormal(c345, (c345.gens[0], c345.gens[1]), seed=0)


def test_ci_search_recovers_equality_from_shifted_basis(R2):
    """A conormal basis that misses exact equality by an element of I^2
    is repaired by the perturbation phase."""
    I = H(R2, "x", "y")
    c = R2.parse("x + x*y")  # = x mod I^2, but (c, y) = (x*(1+y), y) != I
    d = R2.gen("y")
    assert mod_square_generation(I, (c, d)).holds
    out = ci_from_free_conormal(I, (c, d), seed=3)
    assert isinstance(out, CICertificate)
    assert IdealHandle(R2, out.pair).equals(I)


# -- set-theoretic complete intersections


def test_stci_verify_plane_point(R2):
    out = stci_verify(H(R2, "x", "y"), (R2.gen("x"), R2.gen("y")))
    assert isinstance(out, STCICertificate) and out.verify()


def test_stci_verify_radical_trick(R3):
    # pair outside the ideal but with the same radical
    out = stci_verify(H(R3, "x^2", "y"), (R3.gen("x"), R3.gen("y")))
    assert isinstance(out, STCICertificate)


def test_stci_verify_refutes_nonregular_pair(R3):
    out = stci_verify(H(R3, "x", "y"), (R3.gen("x"), R3.parse("x*y")))
    assert isinstance(out, STCIRefutation) and out.stage == "regular-sequence"


def test_stci_verify_refutes_wrong_radical(R3):
    out = stci_verify(H(R3, "x", "y"), (R3.gen("x"), R3.gen("z")))
    assert isinstance(out, STCIRefutation) and out.stage == "radical-equality"


def test_stci_verify_height_precondition(R3):
    with pytest.raises(InputError):
        stci_verify(H(R3, "x"), (R3.gen("x"), R3.gen("y")))


def test_stci_search_skew_lines(skew_lines, skew_pair):
    res = stci_search(skew_lines, seed=0)
    assert res.certificate is not None
    assert res.via == "conormal-basis"
    assert res.certificate.verify()


def test_stci_search_supplied_pair(skew_lines, skew_pair):
    res = stci_search(skew_lines, seed=0, pair=skew_pair)
    assert res.certificate is not None


def test_stci_search_already_ci(R2):
    res = stci_search(H(R2, "x^2", "y^3"), seed=0)
    assert res.certificate is not None
    assert {str(p) for p in res.certificate.pair} == {"x^2", "y^3"}


def test_stci_search_random_pairs_stage(R2):
    """Fat point (x,y)^2 is not lci, so the conormal stage is skipped
    and the randomized stage must deliver."""
    I = H(R2, "x^2", "x*y", "y^2")
    assert isinstance(lci_certificate(I), LCIRefutation)
    res = stci_search(I, seed=1)
    assert res.certificate is not None
    assert res.via == "random-pairs"
    assert res.certificate.verify()


def test_stci_search_deterministic(skew_lines):
    a = stci_search(skew_lines, seed=0)
    b = stci_search(skew_lines, seed=0)
    assert [str(p) for p in a.certificate.pair] == \
        [str(p) for p in b.certificate.pair]


def test_stci_search_inconclusive_with_zero_trials(R2):
    I = H(R2, "x^2", "x*y", "y^2")
    res = stci_search(I, seed=0, budgets=Budgets(trials=0),
                      extension_degrees=())
    assert isinstance(res.outcome, Inconclusive)


# -- scalar extension


def test_extend_scalars_arithmetic():
    ring = RingSpec(("x", "y"), GF(2))
    ext, embed = extend_scalars(ring, 2)
    a = ext.gen(ext.variables[-1])
    zero_ideal = IdealHandle(ext, [])
    # the minimal polynomial of the new generator reduces to zero
    assert zero_ideal.normal_form(ext.base_ideal[-1]).is_zero
    nf = zero_ideal.normal_form(a * a)
    assert nf.total_degree() <= 1 and not nf.is_zero


def test_extend_scalars_preserves_dimension(f5_cylinder):
    from cicert.ideals import dimension_height

    ext, embed = extend_scalars(f5_cylinder.ring, 2)
    lifted = IdealHandle(ext, [embed(g) for g in f5_cylinder.gens])
    r0 = dimension_height(f5_cylinder)
    r1 = dimension_height(lifted)
    assert (r1.dim_ambient, r1.dim_quotient, r1.height) == \
        (r0.dim_ambient, r0.dim_quotient, r0.height)


def test_stci_search_works_over_extension(f5_cylinder):
    ext, embed = extend_scalars(f5_cylinder.ring, 2)
    lifted = IdealHandle(ext, [embed(g) for g in f5_cylinder.gens])
    res = stci_search(lifted, seed=0, extension_degrees=())
    assert res.certificate is not None


# -- unimodular change of generators keeps pairs regular


def test_unimodular_changes_stay_regular(R2):
    rng = random.Random(2024)
    base_pairs = [
        (R2.gen("x"), R2.gen("y")),
        (R2.parse("x^2"), R2.parse("y^3")),
        (R2.parse("x^2 + y^2"), R2.parse("x*y")),
    ]
    for _ in range(30):
        a, b = base_pairs[rng.randrange(len(base_pairs))]
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                u = _random_poly(R2, rng, 1)
                a, b = a + u * b, b
            else:
                u = _random_poly(R2, rng, 1)
                a, b = a, b + u * a
            if rng.random() < 0.3:
                a, b = b, a
            if rng.random() < 0.3:
                a = a.scale(rng.choice([1, -1, 2]))
        out = is_regular_sequence((a, b), None)
        assert isinstance(out, RegSeqCertificate)


# -- Krull-style chain sanity


def test_power_quotient_chain_stabilizes(R3, skew_pair):
    """The ascending chain ((0) : d^n) stabilizes and its limit is
    unchanged by saturating at d again."""
    for d in (skew_pair[1], R3.parse("x*y")):
        zero = H(R3)
        chain = []
        power = R3.one
        for _ in range(6):
            power = power * d
            chain.append(quotient(zero, power))
        assert chain[-1].equals(chain[-2])
        stable = chain[-1]
        assert quotient(stable, d).equals(stable)
        assert saturate(zero, d).equals(stable)


def test_principal_powers_strictly_decrease(R3, skew_pair):
    d = skew_pair[1]
    prev = H(R3, str(d))
    power = d
    for _ in range(3):
        power = power * d
        nxt = H(R3)
        nxt = IdealHandle(R3, [power])
        assert prev.contains_ideal(nxt)
        assert not nxt.contains_ideal(prev)
        prev = nxt

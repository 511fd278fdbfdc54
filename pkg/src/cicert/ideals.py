"""Ideal quotients, saturation, intersection, elimination, radicals,
dimension and height.

All constructions are carried out on free-ring representatives: an
ideal of A = k[x]/J0 is handled as its preimage I + J0, auxiliary
variables are prepended in an elimination block and removed again after
the Groebner computation.  Radical membership uses the extra-variable
trick: f lies in the radical of I exactly when I + (1 - t*f) is the
unit ideal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groebner import IdealHandle, gb_hash, groebner_basis
from .poly import (
    MonomialOrder,
    Polynomial,
    RingMismatchError,
    RingSpec,
    extend_ring,
    reduce as poly_reduce,
)

__all__ = [
    "quotient",
    "saturate",
    "intersect",
    "eliminate",
    "radical_member",
    "radical_equal",
    "dimension_height",
    "RadicalMembership",
    "RadicalEqualityCertificate",
    "RadicalRefutation",
    "DimensionReport",
    "exact_div",
    "fresh_name",
]


def fresh_name(ring: RingSpec, stem: str = "t") -> str:
    name = stem
    while name in ring.variables:
        name += "_"
    return name


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g when g divides f exactly; raises ValueError otherwise."""
    if f.is_zero:
        return f
    r, qs = poly_reduce(f, [g])
    if not r.is_zero:
        raise ValueError(f"{g} does not divide {f}")
    return qs[0]


def _tag_intersection(left_gens, right_gens, ring, budget=None):
    """Generators of (left) + (right) intersection in the free ring."""
    ext = extend_ring(ring.poly_ring(), (fresh_name(ring),))
    t = ext.ring.gen(ext.added[0])
    gens = [t * ext.embed(g) for g in left_gens if g]
    gens += [(ext.ring.one - t) * ext.embed(g) for g in right_gens if g]
    basis = groebner_basis(gens, ext.ring, budget)
    return tuple(ring.rehome(ext.contract(g)) for g in basis
                 if not ext.uses_added(g))


def intersect(I: IdealHandle, J: IdealHandle, budget=None) -> IdealHandle:
    """I intersect J as ideals of A, via the tag-variable trick."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals in different rings")
    gens = _tag_intersection(I.working_gens(), J.working_gens(), I.ring, budget)
    return IdealHandle(I.ring, gens)


def quotient(I: IdealHandle, divisor, budget=None) -> IdealHandle:
    """The colon ideal (I : f), or (I : J) when given an ideal.

    (I : 0) is the whole ring by convention.  Computed through
    intersection with the principal ideal followed by exact division.
    """
    ring = I.ring
    if isinstance(divisor, IdealHandle):
        result = None
        nonzero = [g for g in divisor.gens if g]
        if not nonzero:
            return IdealHandle(ring, [ring.one])
        for g in nonzero:
            step = quotient(I, g, budget)
            result = step if result is None else intersect(result, step, budget)
        return result
    f = divisor
    if f.ring != ring:
        raise RingMismatchError("element from a different ring")
    if f.is_zero:
        return IdealHandle(ring, [ring.one])
    if f.is_constant():
        return IdealHandle(ring, I.gens)
    meet = _tag_intersection(I.working_gens(), (f,), ring, budget)
    return IdealHandle(ring, tuple(exact_div(g, f) for g in meet))


def saturate(I: IdealHandle, f: Polynomial, budget=None) -> IdealHandle:
    """(I : f^infinity), computed with one inverted-variable extension."""
    ring = I.ring
    if f.ring != ring:
        raise RingMismatchError("element from a different ring")
    if f.is_zero:
        raise ValueError("cannot saturate by zero")
    ext = extend_ring(ring.poly_ring(), (fresh_name(ring),))
    t = ext.ring.gen(ext.added[0])
    gens = [ext.embed(g) for g in I.working_gens() if g]
    gens.append(ext.ring.one - t * ext.embed(f))
    basis = groebner_basis(gens, ext.ring, budget)
    kept = tuple(ring.rehome(ext.contract(g)) for g in basis
                 if not ext.uses_added(g))
    return IdealHandle(ring, kept)


def eliminate(I: IdealHandle, var_names, budget=None) -> IdealHandle:
    """I intersected with the subring avoiding `var_names`.

    The result is returned as an ideal of the same ring; its generators
    simply do not involve the eliminated variables.
    """
    ring = I.ring
    names = list(var_names)
    for v in names:
        if v not in ring.variables:
            raise KeyError(f"no variable {v!r}")
    if not names:
        return IdealHandle(ring, I.gens)
    idx = [ring.variables.index(v) for v in names]
    rest = [i for i in range(ring.nvars) if i not in idx]
    tail = ring.order.kind if ring.order.kind in ("lex", "grevlex") else "grevlex"
    order = MonomialOrder("block", block=len(idx), tail_kind=tail,
                          permutation=tuple(idx + rest))
    espec = RingSpec(ring.variables, ring.field, order)
    gens = [espec.rehome(g) for g in I.working_gens() if g]
    basis = groebner_basis(gens, espec, budget)
    kept = []
    for g in basis:
        if all(all(m[i] == 0 for i in idx) for m, _ in g.terms):
            kept.append(ring.rehome(g))
    return IdealHandle(ring, tuple(kept))


# ---------------------------------------------------------------------------
# radical membership / equality


@dataclass
class RadicalMembership:
    """Outcome of one radical membership test, with replay data."""

    ring: RingSpec
    element: Polynomial
    ideal_gens: tuple
    member: bool
    exponent: int | None
    aux_gb_hash: str

    def payload(self):
        return {
            "element": str(self.element),
            "member": self.member,
            "exponent": self.exponent,
            "aux_gb_hash": self.aux_gb_hash,
        }


def radical_member(f: Polynomial, I: IdealHandle, want_exponent=False,
                   e_max=30, budget=None) -> RadicalMembership:
    """Is f in the radical of I?  Exponent search is optional."""
    ring = I.ring
    if f.ring != ring:
        raise RingMismatchError("element from a different ring")
    ext = extend_ring(ring.poly_ring(), (fresh_name(ring),))
    t = ext.ring.gen(ext.added[0])
    gens = [ext.embed(g) for g in I.working_gens() if g]
    gens.append(ext.ring.one - t * ext.embed(f))
    basis = groebner_basis(gens, ext.ring, budget)
    member = len(basis) == 1 and basis[0].is_constant()
    exponent = None
    if member and want_exponent:
        power = ring.one
        for e in range(1, e_max + 1):
            power = power * f
            if I.contains(power, budget):
                exponent = e
                break
    return RadicalMembership(ring, f, I.gens, member, exponent,
                             gb_hash(ext.ring, basis))


@dataclass
class RadicalEqualityCertificate:
    """Radical equality sqrt(I) = sqrt(J), one witness per generator."""

    ring: RingSpec
    left_gens: tuple
    right_gens: tuple
    witnesses: tuple  # (direction, RadicalMembership)

    def payload(self):
        return {
            "left": [str(g) for g in self.left_gens],
            "right": [str(g) for g in self.right_gens],
            "witnesses": [
                {"direction": d, **w.payload()} for d, w in self.witnesses
            ],
        }

    def verify(self, budget=None) -> bool:
        left = IdealHandle(self.ring, self.left_gens)
        right = IdealHandle(self.ring, self.right_gens)
        for direction, w in self.witnesses:
            target = right if direction == "left_in_right" else left
            redo = radical_member(w.element, target,
                                  want_exponent=w.exponent is not None,
                                  budget=budget)
            if not redo.member or redo.aux_gb_hash != w.aux_gb_hash:
                return False
            if w.exponent is not None and redo.exponent != w.exponent:
                return False
        return True


@dataclass
class RadicalRefutation:
    direction: str
    generator: Polynomial
    aux_gb_hash: str

    def payload(self):
        return {
            "direction": self.direction,
            "generator": str(self.generator),
            "aux_gb_hash": self.aux_gb_hash,
        }


def radical_equal(I: IdealHandle, J: IdealHandle, want_exponents=True,
                  e_max=30, budget=None):
    """Certificate that sqrt(I) = sqrt(J), or a refutation naming the
    first generator that fails radical membership."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals in different rings")
    witnesses = []
    for direction, src, dst in (("left_in_right", I, J), ("right_in_left", J, I)):
        for g in src.gens:
            w = radical_member(g, dst, want_exponent=want_exponents,
                               e_max=e_max, budget=budget)
            if not w.member:
                return RadicalRefutation(direction, g, w.aux_gb_hash)
            witnesses.append((direction, w))
    return RadicalEqualityCertificate(I.ring, I.gens, J.gens, tuple(witnesses))


# ---------------------------------------------------------------------------
# dimension and height


@dataclass
class DimensionReport:
    """Krull dimension data read off the leading-term ideal.

    dim(A/I) is the size of a maximal set U of variables with
    in(I) intersect k[U] = 0; height is dim(A) - dim(A/I), the coheight
    convention (correct for the equidimensional catenary fixtures this
    library ships; flagged so mixed-height inputs are not misread).
    """

    ring: RingSpec
    ideal_gens: tuple
    lt_basis: tuple
    independent_set: tuple | None
    dim_quotient: int
    dim_ambient: int
    height: int | None
    unit_ideal: bool

    height_definition = "coheight"

    def payload(self):
        return {
            "lt_basis": list(self.lt_basis),
            "independent_set": list(self.independent_set)
            if self.independent_set is not None else None,
            "dim_quotient": self.dim_quotient,
            "dim_ambient": self.dim_ambient,
            "height": self.height,
            "height_definition": self.height_definition,
            "unit_ideal": self.unit_ideal,
        }


def _max_independent_set(nvars, supports):
    """Largest U with no leading-term support inside U."""
    if nvars > 16:
        raise ValueError("independent-set search limited to 16 variables")
    if frozenset() in supports:
        return None  # unit ideal: even the empty set is dependent
    for size in range(nvars, -1, -1):
        for combo in itertools.combinations(range(nvars), size):
            u = set(combo)
            if all(not s <= u for s in supports):
                return combo
    return None


def _dimension_of_basis(ring, basis):
    supports = [
        frozenset(i for i, e in enumerate(g.lead_monomial) if e) for g in basis
    ]
    combo = _max_independent_set(ring.nvars, supports)
    if combo is None:
        return -1, None
    return len(combo), combo


def dimension_height(I: IdealHandle, budget=None) -> DimensionReport:
    ring = I.ring
    basis = I.groebner(budget)
    dim_q, combo = _dimension_of_basis(ring, basis)
    ambient_basis = groebner_basis(ring.base_ideal, ring, budget)
    dim_a, _ = _dimension_of_basis(ring, ambient_basis)
    unit = dim_q == -1
    height = None if unit else dim_a - dim_q
    return DimensionReport(
        ring=ring,
        ideal_gens=I.gens,
        lt_basis=tuple(ring.format_monomial(g.lead_monomial) or "1" for g in basis),
        independent_set=tuple(ring.variables[i] for i in combo) if combo is not None else None,
        dim_quotient=dim_q,
        dim_ambient=dim_a,
        height=height,
        unit_ideal=unit,
    )

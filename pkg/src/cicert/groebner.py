"""Reduced Groebner bases for ideals and submodules of free modules.

One Buchberger core handles both cases: elements of R^m are held as
sparse dicts keyed by (position, monomial) and compared position over
term, position 0 strongest.  Scalar polynomials are rank-1 vectors.
Syzygies come out of the same machinery by augmenting each generator
with a unit-vector tail and keeping the basis elements whose leading
block vanishes.

Every computation runs against an explicit step budget (one step per
S-pair reduction); exhausting it raises BudgetExceededError with the
partial basis attached so callers can report "inconclusive" instead of
guessing.

Quotient rings A = k[x]/J0 are handled uniformly: ideal computations
append the J0 generators, module computations append J0 multiples of
the free-module basis vectors.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .poly import (
    Polynomial,
    RingMismatchError,
    RingSpec,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)

__all__ = [
    "Budget",
    "BudgetExceededError",
    "DEFAULT_GB_STEPS",
    "IdealHandle",
    "SyzygyMatrix",
    "ModuleBasis",
    "ExtendedGB",
    "buchberger_reduced",
    "normal_form",
    "ideal_member",
    "groebner_basis",
    "module_groebner",
    "module_gb",
    "module_normal_form",
    "module_syzygies",
    "syzygies",
    "extended_groebner",
    "gb_hash",
]

DEFAULT_GB_STEPS = 10_000


class BudgetExceededError(RuntimeError):
    """The step budget ran out; verdicts must become 'inconclusive'."""

    def __init__(self, limit, partial=None):
        super().__init__(f"Groebner step budget of {limit} exceeded")
        self.limit = limit
        self.partial = partial


@dataclass
class Budget:
    """Mutable step counter shared by one top-level computation."""

    limit: int = DEFAULT_GB_STEPS
    used: int = 0

    def charge(self, partial=None):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceededError(self.limit, partial)


def _budget(budget) -> Budget:
    return budget if budget is not None else Budget()


# ---------------------------------------------------------------------------
# vector plumbing: sparse dicts keyed by (position, monomial)


def _vec_from_polys(vec) -> dict:
    out = {}
    for pos, f in enumerate(vec):
        for m, c in f.terms:
            out[(pos, m)] = c
    return out


def _vec_to_polys(ring, rank, vec: dict):
    buckets = [dict() for _ in range(rank)]
    for (pos, m), c in vec.items():
        buckets[pos][m] = c
    return tuple(ring.poly_from_dict(b) for b in buckets)


class _BasisElt:
    __slots__ = ("pos", "mono", "vec", "tail")

    def __init__(self, pos, mono, vec):
        self.pos = pos
        self.mono = mono
        self.vec = vec
        self.tail = [(k, c) for k, c in vec.items() if k != (pos, mono)]


def _vec_lead(okey, vec: dict):
    return max(vec, key=lambda pm: (-pm[0], okey(pm[1])))


def _make_monic(field, vec: dict, lead_key) -> dict:
    inv = field.inv(vec[lead_key])
    if inv == field.one:
        return vec
    return {k: field.mul(c, inv) for k, c in vec.items()}


def _vec_reduce(work: dict, basis, ring) -> dict:
    """Full normal form of a vector dict against monic basis elements.

    Every term divisible by some basis lead (same position) is
    cancelled; irreducible terms migrate to the remainder.  The first
    dividing basis element in list order is used, which keeps the
    result deterministic.
    """
    fieldops = ring.field
    okey = ring.order.key
    zero = fieldops.zero
    remainder = {}
    while work:
        key = _vec_lead(okey, work)
        pos, mono = key
        coeff = work.pop(key)
        hit = None
        for b in basis:
            if b.pos == pos and mono_divides(b.mono, mono):
                hit = b
                break
        if hit is None:
            remainder[key] = coeff
            continue
        shift = mono_div(mono, hit.mono)
        for (p2, m2), c2 in hit.tail:
            k2 = (p2, mono_mul(m2, shift))
            val = fieldops.sub(work.get(k2, zero), fieldops.mul(c2, coeff))
            if val == zero:
                work.pop(k2, None)
            else:
                work[k2] = val
    return remainder


def _spair(b1: _BasisElt, b2: _BasisElt, field) -> dict:
    lcm = mono_lcm(b1.mono, b2.mono)
    s1 = mono_div(lcm, b1.mono)
    s2 = mono_div(lcm, b2.mono)
    out = {}
    zero = field.zero
    for (p, m), c in b1.vec.items():
        out[(p, mono_mul(m, s1))] = c
    for (p, m), c in b2.vec.items():
        k = (p, mono_mul(m, s2))
        val = field.sub(out.get(k, zero), c)
        if val == zero:
            out.pop(k, None)
        else:
            out[k] = val
    return out


# ---------------------------------------------------------------------------
# Buchberger core


def _module_buchberger_dicts(vecdicts, ring, budget) -> list[_BasisElt]:
    field = ring.field
    okey = ring.order.key
    scalar = all(pos == 0 for v in vecdicts for (pos, _m) in v)

    G: list[_BasisElt] = []
    P: dict[tuple[int, int], tuple] = {}

    def add_element(vec):
        lead = _vec_lead(okey, vec)
        vec = _make_monic(field, vec, lead)
        elt = _BasisElt(lead[0], lead[1], vec)
        t = len(G)
        G.append(elt)
        for i in range(t):
            if G[i].pos == elt.pos:
                lcm = mono_lcm(G[i].mono, elt.mono)
                P[(i, t)] = (okey(lcm), lcm)

    for v in vecdicts:
        if v:
            add_element(dict(v))

    def partial():
        return tuple(_vec_to_polys(ring, _rank_of(G), b.vec) for b in G)

    while P:
        (i, j) = min(P, key=lambda ij: (P[ij][0], ij))
        _, lcm = P.pop((i, j))
        bi, bj = G[i], G[j]
        # product criterion is only valid in the rank-1 (ideal) case
        if scalar and lcm == mono_mul(bi.mono, bj.mono):
            continue
        # chain criterion: some k with lt(k) | lcm whose pairs with i and j
        # were both handled already
        skip = False
        for k in range(len(G)):
            if k in (i, j) or G[k].pos != bi.pos:
                continue
            if mono_divides(G[k].mono, lcm):
                a = (min(i, k), max(i, k))
                b = (min(j, k), max(j, k))
                if a not in P and b not in P:
                    skip = True
                    break
        if skip:
            continue
        budget.charge(partial)
        s = _spair(bi, bj, field)
        r = _vec_reduce(s, G, ring)
        if r:
            add_element(r)
    return G


def _rank_of(G) -> int:
    rank = 0
    for b in G:
        for (pos, _m) in b.vec:
            rank = max(rank, pos + 1)
    return rank


def _reduced_basis(G: list[_BasisElt], ring) -> list[_BasisElt]:
    field = ring.field
    okey = ring.order.key
    # minimal: drop elements whose lead another kept lead divides
    order = sorted(range(len(G)), key=lambda i: (-G[i].pos, okey(G[i].mono)))
    kept: list[_BasisElt] = []
    for i in order:
        g = G[i]
        if any(h.pos == g.pos and mono_divides(h.mono, g.mono) for h in kept):
            continue
        kept.append(g)
    # interreduce tails until stable
    for _ in range(100):
        changed = False
        for i, g in enumerate(kept):
            others = kept[:i] + kept[i + 1:]
            r = _vec_reduce(dict(g.vec), others, ring)
            if r != g.vec:
                lead = _vec_lead(okey, r)
                kept[i] = _BasisElt(lead[0], lead[1], _make_monic(field, r, lead))
                changed = True
        if not changed:
            break
    kept.sort(key=lambda b: (-b.pos, okey(b.mono)), reverse=True)
    return kept


def module_groebner(vectors, ring, budget=None):
    """Reduced Groebner basis of the submodule generated by `vectors`.

    Vectors are tuples of polynomials of one fixed length; position over
    term order, position 0 strongest.  The base ideal is NOT appended
    here; use module_gb for quotient-ring module membership.
    """
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return ()
    rank = len(vectors[0])
    for v in vectors:
        if len(v) != rank:
            raise ValueError("module elements must share one length")
        for f in v:
            if f.ring != ring:
                raise RingMismatchError("module element from a different ring")
    budget = _budget(budget)
    G = _module_buchberger_dicts([_vec_from_polys(v) for v in vectors], ring, budget)
    G = _reduced_basis(G, ring)
    return tuple(_vec_to_polys(ring, rank, b.vec) for b in G)


def groebner_basis(polys, ring, budget=None):
    """Reduced Groebner basis of the ideal generated by `polys` (no base)."""
    vectors = [(f,) for f in polys if f]
    basis = module_groebner(vectors, ring, budget)
    return tuple(v[0] for v in basis)


def _entries(basis_vectors, ring):
    out = []
    okey = ring.order.key
    for v in basis_vectors:
        vec = _vec_from_polys(v)
        lead = _vec_lead(okey, vec)
        out.append(_BasisElt(lead[0], lead[1], vec))
    return out


def module_normal_form(vec, basis_vectors, ring):
    """Normal form of a module element against a (Groebner) basis."""
    rank = len(vec)
    entries = _entries(basis_vectors, ring)
    r = _vec_reduce(_vec_from_polys(tuple(vec)), entries, ring)
    return _vec_to_polys(ring, rank, r)


# ---------------------------------------------------------------------------
# ideal handles


class IdealHandle:
    """An ideal of A = k[x]/J0: generators plus a cached reduced basis.

    The cached basis is computed once per handle (the ring's order is
    fixed); concurrent readers are safe because the computation is
    deterministic and the single assignment is atomic, so a duplicated
    computation writes the identical value.
    """

    def __init__(self, ring: RingSpec, gens):
        self.ring = ring
        coerced = []
        for g in gens:
            if isinstance(g, str):
                g = ring.parse(g)
            if g.ring != ring:
                raise RingMismatchError("generator from a different ring")
            coerced.append(g)
        self.gens = tuple(coerced)
        self._gb = None
        self._ext = None

    def __repr__(self):
        return f"<Ideal ({', '.join(str(g) for g in self.gens)}) of {self.ring.describe()}>"

    def working_gens(self):
        return tuple(g for g in self.gens if g) + self.ring.base_ideal

    def groebner(self, budget=None):
        if self._gb is None:
            basis = groebner_basis(self.working_gens(), self.ring, budget)
            if basis:
                # self-check: every input generator must reduce to zero
                entries = _entries([(g,) for g in basis], self.ring)
                for g in self.working_gens():
                    r = _vec_reduce(_vec_from_polys((g,)), entries, self.ring)
                    if r:
                        raise AssertionError(
                            f"generator {g} does not reduce against its own basis")
            self._gb = basis
        return self._gb

    def extended(self, budget=None) -> "ExtendedGB":
        if self._ext is None:
            self._ext = extended_groebner(self.gens, self.ring, budget)
        return self._ext

    def normal_form(self, f: Polynomial, budget=None) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatchError("element from a different ring")
        basis = self.groebner(budget)
        if not basis:
            return f
        entries = _entries([(g,) for g in basis], self.ring)
        r = _vec_reduce(_vec_from_polys((f,)), entries, self.ring)
        return _vec_to_polys(self.ring, 1, r)[0]

    def contains(self, f: Polynomial, budget=None) -> bool:
        return self.normal_form(f, budget).is_zero

    def contains_ideal(self, other: "IdealHandle", budget=None) -> bool:
        return all(self.contains(g, budget) for g in other.gens)

    def equals(self, other: "IdealHandle", budget=None) -> bool:
        if self.ring != other.ring:
            raise RingMismatchError("ideals in different rings")
        return self.groebner(budget) == other.groebner(budget)

    def is_unit(self, budget=None) -> bool:
        basis = self.groebner(budget)
        return len(basis) == 1 and basis[0].is_constant()

    def is_zero_ideal(self, budget=None) -> bool:
        """True if the ideal of A is zero, i.e. every generator lies in J0."""
        live = [g for g in self.gens if g]
        if not live:
            return True
        base = IdealHandle(self.ring, [])
        return all(base.contains(g, budget) for g in live)

    def gb_hash(self, budget=None) -> str:
        return gb_hash(self.ring, self.groebner(budget))


def buchberger_reduced(ideal: IdealHandle, budget=None):
    return ideal.groebner(budget)


def normal_form(f: Polynomial, ideal: IdealHandle, budget=None) -> Polynomial:
    return ideal.normal_form(f, budget)


def ideal_member(f: Polynomial, ideal: IdealHandle, budget=None) -> bool:
    return ideal.contains(f, budget)


def gb_hash(ring: RingSpec, basis) -> str:
    text = ring.describe() + "\n" + "\n".join(str(g) for g in basis)
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# module membership over the quotient ring


@dataclass
class ModuleBasis:
    """Reduced basis of a submodule of A^rank, J0 multiples included."""

    ring: RingSpec
    rank: int
    vectors: tuple

    def reduce(self, vec):
        return module_normal_form(vec, self.vectors, self.ring) if self.vectors else tuple(vec)

    def contains(self, vec) -> bool:
        return all(f.is_zero for f in self.reduce(vec))


def module_gb(vectors, ring, budget=None) -> ModuleBasis:
    """Reduced basis of the A-submodule generated by `vectors`.

    Quotient structure enters by appending J0 multiples of the free
    basis vectors, so `contains` answers membership over A.
    """
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        raise ValueError("module_gb needs at least one generator to fix the rank")
    rank = len(vectors[0])
    work = list(vectors)
    for s in range(rank):
        for j0 in ring.base_ideal:
            work.append(tuple(j0 if t == s else ring.zero for t in range(rank)))
    basis = module_groebner(work, ring, budget)
    return ModuleBasis(ring, rank, basis)


# ---------------------------------------------------------------------------
# syzygies


def module_syzygies(rows, ring, budget=None):
    """Generators of {a : sum a_i * rows_i = 0 over A = k[x]/J0}.

    Each row is augmented with a unit tail; basis elements whose leading
    block vanishes are exactly the relations, read off the tail.
    """
    rows = [tuple(r) for r in rows]
    t = len(rows)
    if t == 0:
        return ()
    m = len(rows[0])
    zero = ring.zero
    augmented = []
    for i, row in enumerate(rows):
        if len(row) != m:
            raise ValueError("rows must share one length")
        tail = tuple(ring.one if j == i else zero for j in range(t))
        augmented.append(row + tail)
    for s in range(m):
        for j0 in ring.base_ideal:
            augmented.append(
                tuple(j0 if p == s else zero for p in range(m)) + (zero,) * t)
    basis = module_groebner(augmented, ring, budget)
    out = []
    for v in basis:
        if all(f.is_zero for f in v[:m]):
            out.append(v[m:])
    return tuple(out)


@dataclass
class SyzygyMatrix:
    """Rows generating all relations of a fixed polynomial tuple over A."""

    ring: RingSpec
    targets: tuple
    rows: tuple

    def verify(self, budget=None) -> bool:
        zero_mod = IdealHandle(self.ring, [])
        for row in self.rows:
            total = self.ring.zero
            for r, f in zip(row, self.targets):
                total = total + r * f
            if not zero_mod.normal_form(total, budget).is_zero:
                return False
        return True

    def payload(self):
        return [[str(f) for f in row] for row in self.rows]


def syzygies(targets, budget=None) -> SyzygyMatrix:
    """All A-relations of a tuple of ring elements, verified exactly."""
    targets = tuple(targets)
    if not targets:
        raise ValueError("syzygies of an empty tuple")
    ring = targets[0].ring
    rows = module_syzygies([(f,) for f in targets], ring, budget)
    matrix = SyzygyMatrix(ring, targets, rows)
    if not matrix.verify():
        raise AssertionError("computed syzygy fails exact multiplication check")
    return matrix


# ---------------------------------------------------------------------------
# extended basis: cofactors and exact membership witnesses


@dataclass
class ExtendedGB:
    """Reduced basis of (gens + J0) with exact cofactor bookkeeping.

    Every basis element b satisfies b = sum(cofactors * inputs) exactly
    in the free ring, where inputs = user generators followed by the
    base ideal generators.  express() writes any ring element as
    normal form plus such a combination.
    """

    ring: RingSpec
    inputs: tuple
    ngens: int
    basis: tuple
    cofactors: tuple
    full_syzygies: tuple
    _entries: list = field(default=None, repr=False)

    def syzygy_rows(self):
        """Relation rows restricted to the user generators (valid mod J0)."""
        return tuple(row[: self.ngens] for row in self.full_syzygies)

    def _augmented_entries(self):
        if self._entries is None:
            n = len(self.inputs)
            vecs = [
                (b,) + cof for b, cof in zip(self.basis, self.cofactors)
            ] + [
                (self.ring.zero,) + row for row in self.full_syzygies
            ]
            self._entries = _entries(vecs, self.ring)
        return self._entries

    def express(self, f: Polynomial):
        """Return (remainder, coeffs) with f = remainder + sum(coeffs*inputs)."""
        n = len(self.inputs)
        work = {(0, m): c for m, c in f.terms}
        r = _vec_reduce(work, self._augmented_entries(), self.ring)
        out = _vec_to_polys(self.ring, 1 + n, r)
        remainder = out[0]
        coeffs = tuple(-c for c in out[1:])
        check = remainder
        for c, g in zip(coeffs, self.inputs):
            check = check + c * g
        if check != f:
            raise AssertionError("cofactor identity failed")
        return remainder, coeffs


def extended_groebner(gens, ring, budget=None) -> ExtendedGB:
    inputs = tuple(gens) + ring.base_ideal
    n = len(inputs)
    zero = ring.zero
    vectors = []
    for i, g in enumerate(inputs):
        tail = tuple(ring.one if j == i else zero for j in range(n))
        vectors.append((g,) + tail)
    basis = module_groebner(vectors, ring, budget)
    scalar = []
    cofs = []
    syz = []
    for v in basis:
        if v[0].is_zero:
            syz.append(v[1:])
        else:
            scalar.append(v[0])
            cofs.append(v[1:])
    ext = ExtendedGB(ring, inputs, len(tuple(gens)), tuple(scalar),
                     tuple(cofs), tuple(syz))
    for b, cof in zip(scalar, cofs):
        total = zero
        for c, g in zip(cof, inputs):
            total = total + c * g
        if total != b:
            raise AssertionError("basis cofactor identity failed")
    return ext

"""Generalized elementary factors of a plant over a stable-causal ring.

A plant P (an n x m transfer matrix) is brought to a scalar-denominator
fraction P = N * d^-1 with N over the ring A and d in A outside the causality
ideal, stacked into T = [N; d*E_m].  For every selection I of m rows of T the
generalized elementary factor is the ideal of all lambda in A such that
lambda*T = K * (rows_I of T) for some K over A.  With delta_I = det(rows_I T)
nonzero and C = T * adj(rows_I T) this is the finite intersection of colon
ideals (delta_I A : c_rs) over the entries of C, computed in the ring's
quotient presentation; each reported generator is post-verified by
reconstructing its witness matrix K.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groebner import IdealHandle
from .matrixring import IndexSet, Mat, enumerate_index_sets
from .poly import NotDivisibleError, Polynomial, divide_exact
from .ring import (NotCausalError, Presentation, PolyFraction, RingModel,
                   causal, in_Z, membership, presentation, unit_multiplier)


class GefError(Exception):
    pass


class GefInternalError(GefError):
    """A computed generator failed its witness verification (engine bug)."""


class MembershipFailedError(GefError):
    """The given lambda is not in the generalized elementary factor."""


@dataclass
class PlantFraction:
    """Scalar-denominator fraction of a causal plant with its stacked matrix."""

    ring: RingModel
    m: int
    n: int
    P: Mat   # n x m over PolyFraction
    N: Mat   # n x m over the ring
    d: Polynomial
    T: Mat   # (m+n) x m over the ring

    @staticmethod
    def from_parts(ring: RingModel, N: Mat, d: Polynomial) -> "PlantFraction":
        """Build the plant directly from numerator matrix and scalar denominator."""
        if d.is_zero() or in_Z(d, ring):
            raise NotCausalError(f"denominator {d} lies in the causality ideal")
        for entry in N.entries:
            if not membership(entry, ring):
                raise NotCausalError(f"numerator entry {entry} is not in the ring")
        n, m = N.rows, N.cols
        P = N.map(lambda e: PolyFraction(e, d))
        T = N.vstack(Mat.scalar_matrix(m, d, Polynomial.zero(ring.variables)))
        return PlantFraction(ring, m, n, P, N, d, T)

    def denominator_rows(self) -> IndexSet:
        return IndexSet(tuple(range(self.n + 1, self.n + self.m + 1)))


def scalar_denominator(entries, ring: RingModel) -> PlantFraction:
    """Scalar-denominator form of a plant given as numerator/denominator pairs.

    `entries` is an n x m nested sequence whose items are (num, den)
    polynomial pairs or PolyFraction values; pairs are taken as written, so
    denominators supplied by the plant file are used directly when they
    already live in the ring.  In the univariate case d is their least common
    multiple, adjusted by a unit-constant multiplier search until d lies in
    A \\ Z and every numerator entry lies in A; in the multivariate case d is
    the product of the distinct denominators.
    """
    pairs: list[list[tuple[Polynomial, Polynomial]]] = []
    for row in (entries.to_rows() if isinstance(entries, Mat) else entries):
        out_row = []
        for item in row:
            if isinstance(item, PolyFraction):
                out_row.append((item.num, item.den))
            else:
                num, den = item
                out_row.append((num.with_variables(ring.variables),
                                den.with_variables(ring.variables)))
        pairs.append(out_row)
    n = len(pairs)
    m = len(pairs[0]) if n else 0
    if n < 1 or m < 1 or any(len(r) != m for r in pairs):
        raise GefError("plant entries must form a nonempty rectangular array")

    for i, row in enumerate(pairs):
        for j, (num, den) in enumerate(row):
            if den.is_zero():
                raise NotCausalError(f"entry ({i + 1},{j + 1}) has a zero denominator")
            if not causal(PolyFraction(num, den), ring):
                raise NotCausalError(f"entry ({i + 1},{j + 1}) is not causal")

    if len(ring.variables) <= 1:
        plant = _scalar_denominator_pairs(pairs, ring)
        if plant is None:
            # retry from the reduced fractions, which drop non-ring factors
            reduced = [[(fr.num, fr.den) for fr in
                        (PolyFraction(num, den) for num, den in row)]
                       for row in pairs]
            plant = _scalar_denominator_pairs(reduced, ring)
        if plant is None:
            raise NotCausalError("no scalar denominator found within the search bound")
        return plant

    dens: list[Polynomial] = []
    for row in pairs:
        for _, den in row:
            if all(den != seen for seen in dens):
                dens.append(den)
    d = Polynomial.one(ring.variables)
    for den in dens:
        d = d * den
    if in_Z(d, ring):
        raise NotCausalError(f"product denominator {d} lies in the causality ideal")
    N = Mat.build(n, m, lambda i, j: pairs[i][j][0] * divide_exact(d, pairs[i][j][1]))
    return PlantFraction.from_parts(ring, N, d)


def _scalar_denominator_pairs(pairs, ring: RingModel) -> PlantFraction | None:
    from .poly import gcd_univariate
    lcm = None
    for row in pairs:
        for _, den in row:
            if lcm is None:
                lcm = den
            else:
                g = gcd_univariate(lcm, den)
                lcm = lcm * divide_exact(den, g)
    base = [[num * divide_exact(lcm, den) for num, den in row] for row in pairs]
    targets = [lcm] + [e for row in base for e in row]
    s = _denominator_multiplier(targets, ring)
    if s is None:
        return None
    d = lcm * s
    if in_Z(d, ring) or not membership(d, ring):
        return None
    N = Mat.from_rows([[e * s for e in row] for row in base])
    if not all(membership(e, ring) for e in N.entries):
        return None
    return PlantFraction.from_parts(ring, N, d)


def _denominator_multiplier(targets, ring: RingModel) -> Polynomial | None:
    s = unit_multiplier(targets, ring)
    if s is not None or ring.z_mode != "zero_ideal":
        return s
    # without a causality constraint the multiplier may vanish at zero:
    # shift the candidate support upward one degree at a time
    z = Polynomial.var(ring.delay_var, ring.variables) if ring.kind == "monomial" else None
    if z is None:
        return None
    bound = ring.conductor + max((t.total_degree() for t in targets), default=0) + 1
    shifted = list(targets)
    for power in range(1, bound + 1):
        shifted = [t * z for t in shifted]
        s = unit_multiplier(shifted, ring)
        if s is not None:
            return s * z ** power
    return None


# ---------------------------------------------------------------------------
# the factors themselves
# ---------------------------------------------------------------------------


@dataclass
class GefEntry:
    index_set: IndexSet
    delta: Polynomial
    generators: list[Polynomial]   # pushed down to the ring, zero ideal -> []
    handle: IdealHandle            # lifted ideal in the presentation ring
    singular: bool

    def contains(self, lam: Polynomial, pres: Presentation) -> bool:
        if self.singular:
            return lam.is_zero()
        return self.handle.contains(pres.lift(lam))


@dataclass
class GefResult:
    plant: PlantFraction
    pres: Presentation
    entries: list[GefEntry]

    def entry_for(self, index_set: IndexSet) -> GefEntry:
        for e in self.entries:
            if e.index_set == index_set:
                return e
        raise KeyError(f"no entry for {index_set}")


def _cofactor_columns(pf: PlantFraction, index_set: IndexSet) -> tuple[Polynomial, Mat]:
    rows = index_set.zero_based()
    M = pf.T.take_rows(rows)
    delta = M.det()
    if delta.is_zero():
        return delta, None
    return delta, pf.T * M.adjugate()


def witness_matrix(pf: PlantFraction, index_set: IndexSet, lam: Polynomial) -> Mat:
    """The K with lam*T = K * (rows_I T); raises MembershipFailedError otherwise."""
    index_set.validate(pf.m, pf.n)
    delta, C = _cofactor_columns(pf, index_set)
    if delta.is_zero():
        raise MembershipFailedError(f"rows {index_set} of T are singular")
    entries = []
    for c in C.entries:
        try:
            k = divide_exact(lam * c, delta)
        except NotDivisibleError:
            raise MembershipFailedError(
                f"{lam} is not in the factor for {index_set}: division failed")
        if not membership(k, pf.ring):
            raise MembershipFailedError(
                f"{lam} is not in the factor for {index_set}: witness leaves the ring")
        entries.append(k)
    K = Mat(C.rows, C.cols, entries)
    M = pf.T.take_rows(index_set.zero_based())
    if K * M != pf.T.map(lambda e: e * lam):
        raise GefInternalError("witness identity lam*T = K*(rows_I T) failed")
    return K


@dataclass
class LocalFreenessWitness:
    """Exact factorization f^nu * T = K * V with V = rows_I T nonsingular."""

    f: Polynomial
    nu: int
    K: Mat
    V: Mat


def local_freeness_witness(pf: PlantFraction, index_set: IndexSet,
                           lam: Polynomial) -> LocalFreenessWitness:
    if lam.is_zero():
        raise MembershipFailedError("the witness needs a nonzero lambda")
    K = witness_matrix(pf, index_set, lam)
    V = pf.T.take_rows(index_set.zero_based())
    return LocalFreenessWitness(f=lam, nu=1, K=K, V=V)


def gef(pf: PlantFraction) -> GefResult:
    """All generalized elementary factors of the plant, verified."""
    pres = presentation(pf.ring)
    entries: list[GefEntry] = []
    for index_set in enumerate_index_sets(pf.m, pf.n):
        delta, C = _cofactor_columns(pf, index_set)
        if delta.is_zero():
            # a nonzero lambda would force rank(rows_I T) = rank(T) = m,
            # impossible over a domain when delta vanishes
            entries.append(GefEntry(index_set, delta, [],
                                    pres.ideal([Polynomial.zero(pres.variables)]),
                                    singular=True))
            continue
        delta_hat = pres.lift(delta)
        base = pres.ideal([delta_hat])
        targets: list[Polynomial] = []
        for c in C.entries:
            if c.is_zero() or c == delta:
                continue  # the colon ideal is the whole ring for these
            if all(c != seen for seen in targets):
                targets.append(c)
        handle = None
        for c in targets:
            colon = base.colon(pres.lift(c))
            handle = colon if handle is None else handle.intersect(colon)
        if handle is None:
            handle = pres.ideal([Polynomial.one(pres.variables)])
        generators = []
        for g in handle.reduced_basis():
            lam = pres.push(g)
            if lam.is_zero():
                continue
            if all(lam != seen for seen in generators):
                generators.append(lam)
        for lam in generators:
            witness_matrix(pf, index_set, lam)  # raises on failure
        entries.append(GefEntry(index_set, delta, generators, handle, singular=False))
    return GefResult(pf, pres, entries)

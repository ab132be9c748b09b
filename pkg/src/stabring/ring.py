"""Models of the ring of stable causal transfer functions.

Two computable integral domains are supported: full polynomial rings over Q,
and monomial subalgebras of a univariate delay ring Q[z] generated by powers
z^e1, ..., z^ek (a numerical-semigroup ring).  Each ring carries a causality
prime ideal Z in one of two modes:

  * zero_constant_term -- Z = elements with zero constant coefficient
    (finite impulse response with no instantaneous tap), and
  * zero_ideal -- Z = {0}, the no-causality-constraint setting.

The module also provides the quotient-ring presentation of a monomial
subalgebra (toric relation ideal plus lift/push maps), fractions over the
ring, elements of localizations A_f, and the causality decision procedures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import groebner
from .linsolve import solve_exact
from .matrixring import Mat
from .poly import (NotDivisibleError, Polynomial, divide_exact, gcd_univariate,
                   parse_poly)

ZERO_CONSTANT_TERM = "zero_constant_term"
ZERO_IDEAL = "zero_ideal"


class RingError(Exception):
    pass


class MembershipError(RingError):
    """An element was required to lie in the stable ring but does not."""


class NotCausalError(RingError):
    """A transfer function admits no causal representation."""


class CausalityUndecidableError(RingError):
    """Causality cannot be decided without multivariate fraction reduction."""


class RingModel:
    """A stable-causal ring: full polynomial ring or monomial subalgebra."""

    def __init__(self, kind: str, variables: tuple[str, ...],
                 generators: tuple[int, ...], z_mode: str):
        if kind not in ("polynomial", "monomial"):
            raise RingError(f"unknown ring kind {kind!r}")
        if z_mode not in (ZERO_CONSTANT_TERM, ZERO_IDEAL):
            raise RingError(f"unknown z_mode {z_mode!r}")
        if not variables:
            raise RingError("a ring needs at least one variable")
        self.kind = kind
        self.variables = tuple(variables)
        self.generators = tuple(generators)
        self.z_mode = z_mode
        self._presentation: Presentation | None = None
        if kind == "monomial":
            if len(self.variables) != 1:
                raise RingError("monomial subalgebras live in one delay variable")
            gens = self.generators
            if not gens or list(gens) != sorted(set(gens)):
                raise RingError("exponent generators must be strictly ascending")
            if gens != (1,):
                if any(g < 2 for g in gens):
                    raise RingError("exponent generators must be >= 2 (or exactly (1,))")
                g = 0
                for e in gens:
                    g = math.gcd(g, e)
                if g != 1:
                    raise RingError(f"exponent generators {gens!r} have gcd {g} != 1")
            self._reachable, self.conductor = _semigroup_table(gens)
        else:
            if generators:
                raise RingError("polynomial rings take no exponent generators")
            self._reachable, self.conductor = (True,), 0

    # -- constructors --------------------------------------------------------

    @staticmethod
    def polynomial(variables: Iterable[str], z_mode: str = ZERO_IDEAL) -> "RingModel":
        return RingModel("polynomial", tuple(variables), (), z_mode)

    @staticmethod
    def monomial_subalgebra(delay_var: str, generators: Iterable[int],
                            z_mode: str = ZERO_CONSTANT_TERM) -> "RingModel":
        return RingModel("monomial", (delay_var,), tuple(generators), z_mode)

    # -- identity ------------------------------------------------------------

    def _key(self):
        return (self.kind, self.variables, self.generators, self.z_mode)

    def __eq__(self, other):
        return isinstance(other, RingModel) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == "monomial":
            return (f"RingModel.monomial_subalgebra({self.variables[0]!r}, "
                    f"{self.generators!r}, z_mode={self.z_mode!r})")
        return f"RingModel.polynomial({self.variables!r}, z_mode={self.z_mode!r})"

    # -- numerical semigroup ---------------------------------------------------

    @property
    def delay_var(self) -> str:
        if self.kind != "monomial":
            raise RingError("delay_var is only defined for monomial subalgebras")
        return self.variables[0]

    def semigroup_contains(self, e: int) -> bool:
        if self.kind != "monomial":
            return True
        if e >= self.conductor:
            return True
        return self._reachable[e]

    def gaps(self) -> list[int]:
        """Exponents missing from the semigroup (all below the conductor)."""
        if self.kind != "monomial":
            return []
        return [e for e in range(self.conductor) if not self._reachable[e]]

    def parse(self, text: str) -> Polynomial:
        return parse_poly(text, self.variables)


def _semigroup_table(gens: tuple[int, ...]) -> tuple[tuple[bool, ...], int]:
    bound = gens[0] * gens[-1] + 1
    reachable = [False] * (bound + 1)
    reachable[0] = True
    for e in range(1, bound + 1):
        reachable[e] = any(e >= g and reachable[e - g] for g in gens)
    conductor = 0
    for e in range(bound, -1, -1):
        if not reachable[e]:
            conductor = e + 1
            break
    return tuple(reachable), conductor


# ---------------------------------------------------------------------------
# membership and the causality ideal
# ---------------------------------------------------------------------------


def membership(p: Polynomial, ring: RingModel) -> bool:
    """Whether the polynomial lies in the stable ring."""
    if any(v not in ring.variables for v in p.used_variables()):
        raise RingError(f"{p} uses variables outside {ring.variables!r}")
    if ring.kind == "polynomial":
        return True
    p = p.with_variables(ring.variables)
    return all(ring.semigroup_contains(exps[0]) for exps, _ in p.items())


@dataclass(frozen=True)
class StableElem:
    """A polynomial together with the ring it is checked to belong to."""

    poly: Polynomial
    ring: RingModel

    def __post_init__(self):
        if not membership(self.poly, self.ring):
            raise MembershipError(f"{self.poly} is not in {self.ring!r}")

    def __str__(self):
        return str(self.poly)


def in_Z(a: Polynomial, ring: RingModel) -> bool:
    """Membership in the causality prime ideal Z."""
    if ring.z_mode == ZERO_IDEAL:
        return a.is_zero()
    return a.constant_coeff() == 0


def z_nonsingular(mat: Mat, ring: RingModel) -> bool:
    """det(M) in A \\ Z for a square matrix over the ring."""
    return not in_Z(mat.det(), ring)


# ---------------------------------------------------------------------------
# quotient-ring presentation (toric relations, lift, push)
# ---------------------------------------------------------------------------


class Presentation:
    """Polynomial-ring presentation of the stable ring.

    For a monomial subalgebra Q[z^e1..z^ek] this is Q[u1..uk] modulo the
    toric relation ideal (the kernel of u_i -> z^e_i); a full polynomial
    ring is its own presentation with no relations.
    """

    def __init__(self, ring: RingModel, variables: tuple[str, ...],
                 relations: list[Polynomial],
                 lift_gb: groebner.GroebnerBasis | None,
                 power_map: dict[str, int]):
        self.ring = ring
        self.variables = variables
        self.relations = relations
        self._lift_gb = lift_gb
        self.power_map = power_map  # presentation var -> exponent of the delay var

    def lift(self, a: Polynomial) -> Polynomial:
        """Canonical preimage of a stable element in the presentation ring."""
        if self.ring.kind == "polynomial":
            return a.with_variables(self.variables)
        ext = self._lift_gb.variables  # (delay, u1, .., uk)
        nf = groebner.normal_form(a.with_variables(ext), self._lift_gb)
        if self.ring.delay_var in nf.used_variables():
            raise MembershipError(f"{a} is not in the monomial subalgebra")
        return nf.with_variables(self.variables)

    def push(self, q: Polynomial) -> Polynomial:
        """Substitute each presentation variable by its delay-power image."""
        if self.ring.kind == "polynomial":
            return q.with_variables(self.variables)
        z = self.ring.delay_var
        mapping = {
            u: Polynomial({(e,): Fraction(1)}, (z,)) for u, e in self.power_map.items()
        }
        return q.substitute(mapping).with_variables(self.ring.variables)

    def ideal(self, gens: Iterable[Polynomial]) -> groebner.IdealHandle:
        return groebner.IdealHandle(self.variables, gens, self.relations)


def _presentation_var_names(count: int, avoid: tuple[str, ...]) -> tuple[str, ...]:
    preferred = ("u", "v", "w")
    if count <= len(preferred) and not any(v in avoid for v in preferred[:count]):
        return preferred[:count]
    names = []
    i = 1
    while len(names) < count:
        cand = f"u{i}"
        if cand not in avoid:
            names.append(cand)
        i += 1
    return tuple(names)


def presentation(ring: RingModel) -> Presentation:
    """The (cached) quotient-ring presentation of the ring."""
    if ring._presentation is not None:
        return ring._presentation
    if ring.kind == "polynomial":
        pres = Presentation(ring, ring.variables, [], None, {})
    else:
        z = ring.delay_var
        names = _presentation_var_names(len(ring.generators), ring.variables)
        ext = (z,) + names
        gens = []
        for name, e in zip(names, ring.generators):
            gens.append(Polynomial.var(name, ext)
                        - Polynomial.var(z, ext) ** e)
        gb = groebner.buchberger(gens, ext, groebner.elimination_order(1))
        relations = [g.with_variables(names) for g in gb.basis
                     if z not in g.used_variables()]
        pres = Presentation(ring, names, relations, gb,
                            dict(zip(names, ring.generators)))
    ring._presentation = pres
    return pres


# ---------------------------------------------------------------------------
# fractions over the ring
# ---------------------------------------------------------------------------


class PolyFraction:
    """Quotient of two polynomials; reduced and monic-denominator when the
    ambient variable set is univariate, stored as given otherwise."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | int = 1):
        if isinstance(num, (int, Fraction)):
            num = Polynomial.const(num)
        if isinstance(den, (int, Fraction)):
            den = Polynomial.const(den, num.variables)
        if den.is_zero():
            raise ZeroDivisionError("fraction with zero denominator")
        merged = Polynomial.merge_variables(num, den)
        num = num.with_variables(merged)
        den = den.with_variables(merged)
        if num.is_zero():
            den = Polynomial.one(merged)
        elif len(merged) <= 1:
            g = gcd_univariate(num, den)
            if g.total_degree() > 0:
                num = divide_exact(num, g)
                den = divide_exact(den, g)
            lead = den.univar_coeffs()[-1]
            if lead != 1:
                scale = Fraction(1) / lead
                num = num.scale(scale)
                den = den.scale(scale)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("PolyFraction is immutable")

    @staticmethod
    def from_poly(p: Polynomial) -> "PolyFraction":
        return PolyFraction(p, Polynomial.one(p.variables))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            try:
                return divide_exact(self.num, self.den)
            except NotDivisibleError:
                raise RingError(f"{self} is not a polynomial")
        return self.num.scale(Fraction(1) / self.den.constant_coeff())

    def __add__(self, other):
        other = _as_fraction(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyFraction(self.num * other.den + other.num * self.den,
                            self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return PolyFraction(-self.num, self.den)

    def __sub__(self, other):
        other = _as_fraction(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_fraction(other) + (-self)

    def __mul__(self, other):
        other = _as_fraction(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_fraction(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def inverse(self) -> "PolyFraction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero transfer function")
        return PolyFraction(self.den, self.num)

    def __eq__(self, other):
        other = _as_fraction(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def zero_like(self) -> "PolyFraction":
        return PolyFraction(Polynomial.zero(self.num.variables))

    def one_like(self) -> "PolyFraction":
        return PolyFraction(Polynomial.one(self.num.variables))

    def __str__(self):
        if self.is_polynomial():
            return str(self.as_polynomial())
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"PolyFraction({self.num!r}, {self.den!r})"


def _as_fraction(value):
    if isinstance(value, PolyFraction):
        return value
    if isinstance(value, Polynomial):
        return PolyFraction.from_poly(value)
    if isinstance(value, (int, Fraction)):
        return PolyFraction(Polynomial.const(value))
    return NotImplemented


def fraction_in_ring(x: PolyFraction, ring: RingModel) -> bool:
    """Whether a transfer function is an element of the stable ring."""
    if len(ring.variables) <= 1:
        if not x.is_polynomial():
            return False
        return membership(x.as_polynomial().with_variables(ring.variables), ring)
    try:
        h = divide_exact(x.num, x.den)
    except NotDivisibleError:
        return False
    return membership(h.with_variables(ring.variables), ring)


# ---------------------------------------------------------------------------
# causality decisions
# ---------------------------------------------------------------------------


def unit_multiplier(targets: list[Polynomial], ring: RingModel,
                    degree_bound: int | None = None) -> Polynomial | None:
    """A multiplier s with nonzero constant term sending every target into A.

    Solves the gap-coefficient constraints (w*s)_g = 0 for every semigroup
    gap g as an exact linear system; the search degree is bounded by the
    semigroup conductor plus the maximal target degree, which is sufficient
    because gap positions all lie below the conductor.  Returns None when no
    such multiplier exists.
    """
    if ring.kind != "monomial":
        return Polynomial.one(ring.variables)
    gaps = ring.gaps()
    if degree_bound is None:
        degree_bound = ring.conductor + max((t.total_degree() for t in targets), default=0)
    coeff_lists = [t.with_variables(ring.variables).univar_coeffs() for t in targets]
    nunk = degree_bound + 1

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for w in coeff_lists:
        for g in gaps:
            # sum_j w_j * s_{g-j} = 0, with s_0 = 1 moved to the right side
            row = [Fraction(0)] * nunk
            for j, wj in enumerate(w):
                k = g - j
                if 0 <= k < nunk and wj:
                    row[k] = wj
            rows.append(row[1:])
            rhs.append(-row[0])
    if not rows:
        return Polynomial.one(ring.variables)
    sol = solve_exact(rows, rhs)
    if sol is None:
        return None
    coeffs = [Fraction(1)] + sol
    return Polynomial.from_univar_coeffs(coeffs, ring.delay_var, ring.variables)


def causal(x: PolyFraction, ring: RingModel) -> bool:
    """Whether x admits a representation n/d with n in A and d in A \\ Z."""
    if ring.z_mode == ZERO_IDEAL:
        return True  # any nonzero denominator will do; A is a domain
    if len(ring.variables) <= 1:
        q = x.den.with_variables(ring.variables)
        if q.constant_coeff() == 0:
            return False
        if ring.kind == "polynomial":
            return True
        p = x.num.with_variables(ring.variables)
        return unit_multiplier([p, q], ring) is not None
    # multivariate with a constant-term causality ideal
    if x.den.constant_coeff() != 0:
        return True
    try:
        divide_exact(x.num, x.den)
        return True
    except NotDivisibleError:
        raise CausalityUndecidableError(
            "causality over a multivariate ring needs fraction reduction, "
            "which is out of scope; rewrite the entry with an invertible "
            "constant term in its denominator")


def strictly_causal(x: PolyFraction, ring: RingModel) -> bool:
    """Causal with a numerator representation inside Z."""
    if ring.z_mode == ZERO_IDEAL:
        return x.is_zero()
    if not causal(x, ring):
        return False
    if len(ring.variables) <= 1:
        return x.num.with_variables(ring.variables).constant_coeff() == 0
    if x.den.constant_coeff() != 0:
        return x.num.constant_coeff() == 0
    return divide_exact(x.num, x.den).constant_coeff() == 0


def matrix_causal(P: Mat, ring: RingModel) -> bool:
    return all(causal(entry, ring) for entry in P.entries)


def matrix_strictly_causal(P: Mat, ring: RingModel) -> bool:
    return all(strictly_causal(entry, ring) for entry in P.entries)


# ---------------------------------------------------------------------------
# localization A_f
# ---------------------------------------------------------------------------


class LocalElem:
    """Element num / f^exp of the localization A_f, kept with minimal exp."""

    __slots__ = ("num", "exp", "f", "ring")

    def __init__(self, num: Polynomial, exp: int, f: Polynomial, ring: RingModel):
        if f.is_zero():
            raise RingError("localization at zero")
        if exp < 0:
            raise RingError("negative localization exponent")
        if not membership(num, ring):
            raise MembershipError(f"numerator {num} is not in the ring")
        if not membership(f, ring):
            raise MembershipError(f"localization element {f} is not in the ring")
        num = num.with_variables(ring.variables)
        f = f.with_variables(ring.variables)
        if num.is_zero():
            exp = 0
        else:
            while exp > 0 and not f.is_constant():
                try:
                    q = divide_exact(num, f)
                except NotDivisibleError:
                    break
                if not membership(q, ring):
                    break
                num = q
                exp -= 1
            if f.is_constant():
                num = num.scale(Fraction(1) / f.constant_coeff() ** exp)
                exp = 0
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "ring", ring)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("LocalElem is immutable")

    @staticmethod
    def from_poly(p: Polynomial, f: Polynomial, ring: RingModel) -> "LocalElem":
        return LocalElem(p, 0, f, ring)

    def _check_compatible(self, other: "LocalElem"):
        if self.f != other.f or self.ring != other.ring:
            raise RingError("localization elements over different A_f")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        if isinstance(other, LocalElem):
            self._check_compatible(other)
            k = max(self.exp, other.exp)
            num = (self.num * self.f ** (k - self.exp)
                   + other.num * self.f ** (k - other.exp))
            return LocalElem(num, k, self.f, self.ring)
        return NotImplemented

    def __neg__(self):
        return LocalElem(-self.num, self.exp, self.f, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LocalElem):
            self._check_compatible(other)
            return LocalElem(self.num * other.num, self.exp + other.exp,
                             self.f, self.ring)
        if isinstance(other, (int, Fraction)):
            return LocalElem(self.num.scale(Fraction(other)), self.exp,
                             self.f, self.ring)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LocalElem):
            return NotImplemented
        self._check_compatible(other)
        return self.exp == other.exp and self.num == other.num

    def __hash__(self):
        return hash((self.num, self.exp, self.f))

    def zero_like(self) -> "LocalElem":
        return LocalElem(Polynomial.zero(self.ring.variables), 0, self.f, self.ring)

    def one_like(self) -> "LocalElem":
        return LocalElem(Polynomial.one(self.ring.variables), 0, self.f, self.ring)

    def to_fraction(self) -> PolyFraction:
        return PolyFraction(self.num, self.f ** self.exp)

    def clear_denominator(self, omega: int) -> Polynomial:
        """num * f^(omega - exp), the image under multiplication by f^omega."""
        if omega < self.exp:
            raise RingError(f"exponent {omega} does not clear f^{self.exp}")
        return self.num * self.f ** (omega - self.exp)

    def inv_of_f_power(self) -> "LocalElem":
        """Inverse, defined when the value is a unit multiple of a power of f."""
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in the localization")
        n = self.num
        j = 0
        while not n.is_constant():
            try:
                n = divide_exact(n, self.f)
            except NotDivisibleError:
                raise RingError(f"{self.num} is not a constant multiple of a power of f")
            j += 1
        c = n.constant_coeff()
        num = (self.f ** self.exp).scale(Fraction(1) / c)
        return LocalElem(num, j, self.f, self.ring)

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"({self.num})/({self.f})^{self.exp}"

    def __repr__(self):
        return f"LocalElem({self.num!r}, {self.exp}, f={self.f!r})"


def loc_arith(kind: str, x: LocalElem, y: LocalElem | None = None) -> LocalElem:
    """Dispatch localization arithmetic by name."""
    if kind == "add":
        return x + y
    if kind == "mul":
        return x * y
    if kind == "inv-of-f-power":
        return x.inv_of_f_power()
    raise RingError(f"unknown localization arithmetic kind {kind!r}")

"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is stored as a dictionary mapping exponent tuples to nonzero
`Fraction` coefficients, relative to an ordered tuple of ambient variable
names.  The zero polynomial is the empty dictionary.  All arithmetic is
exact; no floating point is used anywhere.

The module also provides the text grammar for polynomial expressions:

    expr     := ['-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' nonneg-int)?
    base     := rational | var | '(' expr ')'
    rational := int ('/' posint)?

Whitespace is insignificant.  A leading '-' (also directly after '(') is
accepted so that every string produced by `format_canonical` parses back.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

Exponents = tuple[int, ...]

# Exact rational scalar used throughout; arbitrary precision, always reduced.
Rational = Fraction


class PolyError(Exception):
    """Base class for polynomial errors."""


class ParseError(PolyError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariableError(ParseError):
    pass


class NotDivisibleError(PolyError):
    """Raised by divide_exact when the division leaves a remainder."""


class NotUnivariateError(PolyError):
    """Raised when a univariate-only operation receives multivariate input."""


@dataclass(frozen=True)
class Monomial:
    """A power product, as a map from variable name to positive exponent."""

    exponents: tuple[tuple[str, int], ...]  # sorted by variable name, exp > 0

    @staticmethod
    def from_dict(exps: dict[str, int]) -> "Monomial":
        return Monomial(tuple(sorted((v, e) for v, e in exps.items() if e != 0)))

    def as_dict(self) -> dict[str, int]:
        return dict(self.exponents)

    def degree(self) -> int:
        return sum(e for _, e in self.exponents)


class Polynomial:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("variables", "_terms")

    def __init__(self, terms: dict[Exponents, Fraction] | None, variables: Iterable[str]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise PolyError(f"duplicate variable in {variables!r}")
        clean: dict[Exponents, Fraction] = {}
        if terms:
            nvars = len(variables)
            for exps, coeff in terms.items():
                c = Fraction(coeff)
                if c == 0:
                    continue
                exps = tuple(exps)
                if len(exps) != nvars or any(e < 0 for e in exps):
                    raise PolyError(f"bad exponent vector {exps!r} for variables {variables!r}")
                clean[exps] = c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(variables: Iterable[str] = ()) -> "Polynomial":
        return Polynomial({}, variables)

    @staticmethod
    def const(value, variables: Iterable[str] = ()) -> "Polynomial":
        variables = tuple(variables)
        return Polynomial({(0,) * len(variables): Fraction(value)}, variables)

    @staticmethod
    def one(variables: Iterable[str] = ()) -> "Polynomial":
        return Polynomial.const(1, variables)

    @staticmethod
    def var(name: str, variables: Iterable[str]) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise PolyError(f"variable {name!r} not among {variables!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return Polynomial({exps: Fraction(1)}, variables)

    # -- basic structure ---------------------------------------------------

    def items(self) -> Iterator[tuple[Exponents, Fraction]]:
        return iter(self._terms.items())

    def monomial_items(self) -> Iterator[tuple[Monomial, Fraction]]:
        for exps, coeff in self._terms.items():
            yield Monomial.from_dict(dict(zip(self.variables, exps))), coeff

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self._terms)

    def constant_coeff(self) -> Fraction:
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(exps) for exps in self._terms)

    def used_variables(self) -> tuple[str, ...]:
        used = set()
        for exps in self._terms:
            for v, e in zip(self.variables, exps):
                if e:
                    used.add(v)
        return tuple(v for v in self.variables if v in used)

    def coeff(self, exps: Exponents) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def _signature(self):
        return frozenset(
            (tuple((v, e) for v, e in zip(self.variables, exps) if e), coeff)
            for exps, coeff in self._terms.items()
        )

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.variables == other.variables:
            return self._terms == other._terms
        return self._signature() == other._signature()

    def __hash__(self):
        return hash(self._signature())

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"Polynomial({format_canonical(self)!r}, vars={self.variables!r})"

    def __str__(self):
        return format_canonical(self)

    # -- variable alignment ------------------------------------------------

    def with_variables(self, variables: Iterable[str]) -> "Polynomial":
        """Re-express over `variables` (a superset of the used variables)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        missing = [v for v in self.used_variables() if v not in pos]
        if missing:
            raise PolyError(f"cannot drop used variables {missing!r}")
        old_idx = [pos.get(v) for v in self.variables]
        terms: dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            new = [0] * len(variables)
            for i, e in enumerate(exps):
                if e:
                    new[old_idx[i]] = e
            terms[tuple(new)] = coeff
        return Polynomial(terms, variables)

    @staticmethod
    def merge_variables(a: "Polynomial", b: "Polynomial") -> tuple[str, ...]:
        merged = list(a.variables)
        for v in b.variables:
            if v not in merged:
                merged.append(v)
        return tuple(merged)

    def _aligned(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if self.variables == other.variables:
            return self, other
        merged = Polynomial.merge_variables(self, other)
        return self.with_variables(merged), other.with_variables(merged)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other, self.variables)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._aligned(other)
        terms = dict(a._terms)
        for exps, coeff in b._terms.items():
            s = terms.get(exps, Fraction(0)) + coeff
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return Polynomial(terms, a.variables)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self._terms.items()}, self.variables)

    def __sub__(self, other):
        other = _coerce(other, self.variables)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other, self.variables)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._aligned(other)
        if len(a._terms) < len(b._terms):
            a, b = b, a
        terms: dict[Exponents, Fraction] = {}
        for e1, c1 in a._terms.items():
            for e2, c2 in b._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial(terms, a.variables)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        return NotImplemented

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return Polynomial.zero(self.variables)
        return Polynomial({e: k * c for e, k in self._terms.items()}, self.variables)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            raise PolyError("negative polynomial exponent")
        result = Polynomial.one(self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # scalar protocol shared with the fraction/localized scalar kinds
    def zero_like(self) -> "Polynomial":
        return Polynomial.zero(self.variables)

    def one_like(self) -> "Polynomial":
        return Polynomial.one(self.variables)

    # -- substitution ------------------------------------------------------

    def evaluate(self, point: dict[str, Fraction]) -> Fraction:
        missing = [v for v in self.used_variables() if v not in point]
        if missing:
            raise PolyError(f"no value for {missing!r}")
        total = Fraction(0)
        for exps, coeff in self._terms.items():
            val = coeff
            for v, e in zip(self.variables, exps):
                if e:
                    val *= Fraction(point[v]) ** e
            total += val
        return total

    def substitute(self, mapping: dict[str, "Polynomial"]) -> "Polynomial":
        """Replace each mapped variable by a polynomial; others stay themselves."""
        target_vars: list[str] = []
        for v in self.variables:
            if v in mapping:
                for w in mapping[v].variables:
                    if w not in target_vars:
                        target_vars.append(w)
            elif v not in target_vars:
                target_vars.append(v)
        result = Polynomial.zero(tuple(target_vars))
        cache: dict[tuple[str, int], Polynomial] = {}
        for exps, coeff in self._terms.items():
            term = Polynomial.const(coeff, tuple(target_vars))
            for v, e in zip(self.variables, exps):
                if not e:
                    continue
                key = (v, e)
                if key not in cache:
                    base = mapping.get(v)
                    if base is None:
                        base = Polynomial.var(v, (v,))
                    cache[key] = base ** e
                term = term * cache[key]
            result = result + term
        return result

    # -- univariate views ----------------------------------------------------

    def univar_coeffs(self) -> list[Fraction]:
        """Dense ascending coefficient list; requires at most one used variable."""
        used = self.used_variables()
        if len(used) > 1:
            raise NotUnivariateError(f"polynomial uses {used!r}")
        if not self._terms:
            return []
        if not used:
            return [self.constant_coeff()]
        idx = self.variables.index(used[0])
        deg = max(exps[idx] for exps in self._terms)
        out = [Fraction(0)] * (deg + 1)
        for exps, coeff in self._terms.items():
            out[exps[idx]] = coeff
        return out

    @staticmethod
    def from_univar_coeffs(coeffs: list[Fraction], var: str,
                           variables: Iterable[str] | None = None) -> "Polynomial":
        variables = tuple(variables) if variables is not None else (var,)
        idx = variables.index(var)
        terms = {}
        for k, c in enumerate(coeffs):
            if c:
                exps = [0] * len(variables)
                exps[idx] = k
                terms[tuple(exps)] = Fraction(c)
        return Polynomial(terms, variables)


def _coerce(value, variables) -> "Polynomial":
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Polynomial.const(value, variables)
    return NotImplemented


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def arith(kind: str, p: Polynomial, q) -> Polynomial:
    """Dispatch basic arithmetic by name: add, sub, mul, neg, pow."""
    if kind == "add":
        return p + q
    if kind == "sub":
        return p - q
    if kind == "mul":
        return p * q
    if kind == "neg":
        return -p
    if kind == "pow":
        return p ** q
    raise PolyError(f"unknown arithmetic kind {kind!r}")


def _grevlex_key(exps: Exponents):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def divide_exact(p: Polynomial, q: Polynomial) -> Polynomial:
    """Return h with p = h*q, or raise NotDivisibleError.

    Single-divisor multivariate division: a singleton divisor set is a
    Groebner basis, so a zero remainder is equivalent to divisibility.
    """
    if q.is_zero():
        raise PolyError("division by the zero polynomial")
    if p.is_zero():
        return Polynomial.zero(p.variables)
    a, b = p._aligned(q)
    if b.is_constant():
        return a.scale(Fraction(1) / b.constant_coeff())
    lead_q = max(b._terms, key=_grevlex_key)
    cq = b._terms[lead_q]
    work = dict(a._terms)
    quot: dict[Exponents, Fraction] = {}
    while work:
        lead = max(work, key=_grevlex_key)
        diff = tuple(x - y for x, y in zip(lead, lead_q))
        if any(e < 0 for e in diff):
            # this term can never be cancelled later, so the remainder is nonzero
            raise NotDivisibleError(
                f"{format_canonical(p)} is not divisible by {format_canonical(q)}")
        c = work[lead] / cq
        quot[diff] = quot.get(diff, Fraction(0)) + c
        for e2, c2 in b._terms.items():
            e = tuple(x + y for x, y in zip(diff, e2))
            s = work.get(e, Fraction(0)) - c * c2
            if s:
                work[e] = s
            else:
                work.pop(e, None)
    return Polynomial(quot, a.variables)


def divides(q: Polynomial, p: Polynomial) -> bool:
    try:
        divide_exact(p, q)
        return True
    except NotDivisibleError:
        return False


def gcd_univariate(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic greatest common divisor of two univariate polynomials."""
    used = set(p.used_variables()) | set(q.used_variables())
    if len(used) > 1:
        raise NotUnivariateError(f"gcd_univariate over multiple variables {sorted(used)!r}")
    if p.is_zero() and q.is_zero():
        raise PolyError("gcd of two zero polynomials")
    var = next(iter(used)) if used else (p.variables[0] if p.variables else
                                         (q.variables[0] if q.variables else "x"))
    a = p.univar_coeffs()
    b = q.univar_coeffs()

    def strip(c):
        while c and c[-1] == 0:
            c.pop()
        return c

    def rem(u, v):
        u = list(u)
        dv = len(v) - 1
        lv = v[-1]
        while len(u) - 1 >= dv and u:
            factor = u[-1] / lv
            shift = len(u) - 1 - dv
            for i, cv in enumerate(v):
                u[shift + i] -= factor * cv
            strip(u)
            if not u:
                break
        return u

    a, b = strip(list(a)), strip(list(b))
    while b:
        a, b = b, rem(a, b)
    lead = a[-1]
    monic = [c / lead for c in a]
    ambient = p.variables if var in p.variables else q.variables
    if var not in ambient:
        ambient = (var,)
    return Polynomial.from_univar_coeffs(monic, var, ambient)


def lcm_univariate(p: Polynomial, q: Polynomial) -> Polynomial:
    """p*q/gcd, keeping the scaling of the given arguments."""
    g = gcd_univariate(p, q)
    return p * divide_exact(q, g)


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def _term_order_key(item: tuple[Exponents, Fraction]):
    exps, _ = item
    return (sum(exps), tuple(-e for e in exps))


def format_canonical(p: Polynomial) -> str:
    """Deterministic string form: ascending total degree, constant term first."""
    if p.is_zero():
        return "0"
    pieces = []
    for exps, coeff in sorted(p._terms.items(), key=_term_order_key):
        mono = "*".join(
            v if e == 1 else f"{v}^{e}"
            for v, e in zip(p.variables, exps) if e
        )
        mag = abs(coeff)
        if not mono:
            body = _fmt_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_rational(mag)}*{mono}"
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"{'+' if coeff > 0 else '-'} {body}")
    return " ".join(pieces)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.pos = 0
        self.variables = variables

    def error(self, message: str, cls=ParseError):
        raise cls(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str):
        if not self.take(ch):
            self.error(f"expected {ch!r}")

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def name(self) -> str:
        self.skip_ws()
        start = self.pos
        ch = self.text[self.pos]
        if not (ch.isalpha() or ch == "_"):
            self.error("expected a variable name")
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]

    def expr(self) -> Polynomial:
        negate = self.take("-")
        value = self.term()
        if negate:
            value = -value
        while True:
            if self.take("+"):
                value = value + self.term()
            elif self.take("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> Polynomial:
        value = self.factor()
        while self.take("*"):
            value = value * self.factor()
        return value

    def factor(self) -> Polynomial:
        value = self.base()
        if self.take("^"):
            value = value ** self.integer()
        return value

    def base(self) -> Polynomial:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            self.expect(")")
            return value
        if ch.isdigit():
            num = self.integer()
            save = self.pos
            if self.take("/"):
                nxt = self.peek()
                if nxt.isdigit():
                    den = self.integer()
                    if den == 0:
                        self.error("zero denominator in rational")
                    return Polynomial.const(Fraction(num, den), self.variables)
                self.pos = save
            return Polynomial.const(num, self.variables)
        if ch.isalpha() or ch == "_":
            start = self.pos
            var = self.name()
            if var not in self.variables:
                self.pos = start
                self.error(f"unknown variable {var!r}", UnknownVariableError)
            return Polynomial.var(var, self.variables)
        self.error("expected a number, variable, or '('")


def parse_poly(text: str, variables: Iterable[str]) -> Polynomial:
    """Parse an expression into expanded canonical form."""
    parser = _Parser(text, tuple(variables))
    value = parser.expr()
    parser.skip_ws()
    if parser.pos != len(parser.text):
        parser.error("unexpected trailing input")
    return value

"""
Concrete differential fields for kdvfactor

A FieldTower is a rational function field over QQ in a fixed list of symbols:
the differential generators of the tower followed by constant symbols. The
derivation is determined by the derivatives of the generators; constants
differentiate to zero. Quadratic relations ``w^2 = S`` (the Weierstrass
cubic, a second Weierstrass pair, or the spectral curve ``mu^2 = -R``) are
eliminated on every result so canonical forms have a denominator free of
every relation symbol and are at most linear in each of them.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property, reduce
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp
from sympy.polys.fields import FracElement, FracField
from sympy.polys.rings import PolyElement

from utils.exceptions import (BasisMismatchError, ConstantsMismatchError,
                              DivisionByZeroError, UnsupportedTowerError)
from utils.logger import LoggerMixin

from .algebra import (as_poly, evaluate_ratfun, format_ratfun, generator, rational_field,
                      split_by_symbols, to_qq)

TOWER_KINDS = ("rational", "exponential", "weierstrass")

Number = Union[int, Fraction]


def _as_expr(value) -> sp.Expr:
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        return sp.Symbol(value)
    return sp.sympify(value)


@dataclass(frozen=True)
class FieldTower(LoggerMixin):
    """
    Differential field Q(constants)(generators) with a derivation

    Attributes:
        kind: rational, exponential or weierstrass
        generators: Names of the differential generators
        derivatives: Derivative of each generator as a sympy expression
        constants: Names of constant symbols
        relations: Pairs (symbol, S) meaning symbol^2 = S
        rate: Exponential rate k of dt = k*t (1 for the other kinds)
        moduli: (g2, g3) of a Weierstrass tower
    """
    kind: str
    generators: Tuple[str, ...]
    derivatives: Tuple[sp.Expr, ...]
    constants: Tuple[str, ...] = ()
    relations: Tuple[Tuple[str, sp.Expr], ...] = ()
    rate: int = 1
    moduli: Tuple[sp.Expr, ...] = ()

    def __post_init__(self):
        if self.kind not in TOWER_KINDS:
            raise UnsupportedTowerError(f"unknown tower kind '{self.kind}'", tower_kind=self.kind)
        names = self.names
        if len(set(names)) != len(names):
            raise ConstantsMismatchError(f"duplicate symbols in {names}")
        relation_symbols = {name for name, _ in self.relations}
        for name, square in self.relations:
            if name not in names:
                raise ConstantsMismatchError(f"relation symbol '{name}' is not declared", symbol=name)
            stray = {str(s) for s in square.free_symbols} & relation_symbols
            if stray:
                raise ConstantsMismatchError(f"relation for '{name}' involves {sorted(stray)}", symbol=name)
        declared = set(names)
        for expr in self.derivatives + tuple(square for _, square in self.relations):
            unknown = {str(s) for s in expr.free_symbols} - declared
            if unknown:
                raise ConstantsMismatchError(f"undeclared symbols {sorted(unknown)}")

    @property
    def names(self) -> Tuple[str, ...]:
        return self.generators + self.constants

    @cached_property
    def field(self) -> FracField:
        return rational_field(self.names)

    @cached_property
    def _generator_derivatives(self) -> Tuple[Tuple[PolyElement, PolyElement], ...]:
        ring = self.field.ring
        result = []
        for name, expr in zip(self.generators, self.derivatives):
            image = self.field.from_expr(expr)
            result.append((generator(ring, name), as_poly(image)))
        return tuple(result)

    @cached_property
    def _relation_data(self) -> Tuple[Tuple[int, PolyElement], ...]:
        return tuple((self.names.index(name), as_poly(self.field.from_expr(square)))
                     for name, square in self.relations)

    # Extensions

    def with_constants(self, *names: str) -> "FieldTower":
        """Tower with extra constant symbols appended in order"""
        extra = tuple(n for n in names if n not in self.names)
        if not extra:
            return self
        return replace(self, constants=self.constants + extra)

    def with_relation(self, name: str, square) -> "FieldTower":
        """Tower where name^2 = square; name becomes a constant when undeclared"""
        tower = self.with_constants(name) if name not in self.names else self
        return replace(tower, relations=tower.relations + ((name, _as_expr(square)),))

    def squared(self) -> "FieldTower":
        """Exponential tower in w = t^2 (dw = 2k*w)"""
        if self.kind != "exponential":
            raise UnsupportedTowerError("only exponential towers can be squared", tower_kind=self.kind)
        w = sp.Symbol("w")
        rate = 2 * self.rate
        return replace(self, generators=("w",), derivatives=(rate * w,), rate=rate)

    def is_extension_of(self, other: "FieldTower") -> bool:
        return (self.kind == other.kind and self.generators == other.generators
                and set(other.names) <= set(self.names)
                and set(other.relations) <= set(self.relations))

    # Elements

    def normalize(self, value: FracElement) -> FracElement:
        """Eliminate every quadratic relation from value"""
        for index, square in self._relation_data:
            value = self._eliminate(value, index, square)
        return value

    def _reduce(self, p: PolyElement, index: int, square: PolyElement) -> PolyElement:
        if p.degree(index) < 2:
            return p
        ring = p.ring
        powers: Dict[int, PolyElement] = {0: ring.one}
        result = ring.zero
        for monom, coeff in p.terms():
            k = monom[index]
            half = k // 2
            if half not in powers:
                powers[half] = square ** half
            base = monom[:index] + (k % 2,) + monom[index + 1:]
            result += ring({base: coeff}) * powers[half]
        return result

    def _eliminate(self, value: FracElement, index: int, square: PolyElement) -> FracElement:
        ring = self.field.ring
        numer = self._reduce(value.numer, index, square)
        denom = self._reduce(value.denom, index, square)
        if numer is value.numer and denom is value.denom and denom.degree(index) < 1:
            return value
        if denom.degree(index) > 0:
            w = ring.gens[index]
            d1 = denom.coeff_wrt(index, 1)
            d0 = denom - d1 * w
            numer = self._reduce(numer * (d0 - d1 * w), index, square)
            denom = d0 * d0 - d1 * d1 * square
            if not denom:
                raise DivisionByZeroError("denominator vanishes modulo the quadratic relation")
        return self.field.new(numer, denom)

    def element(self, value) -> "FieldElem":
        """Canonical FieldElem from a FracElement, PolyElement or number"""
        if isinstance(value, FieldElem):
            return self.lift(value)
        if isinstance(value, FracElement):
            if value.field != self.field:
                value = value.set_field(self.field)
        elif isinstance(value, PolyElement):
            value = self.field.new(value.set_ring(self.field.ring), self.field.ring.one)
        else:
            value = self.field.ground_new(to_qq(value))
        return FieldElem(self, self.normalize(value))

    def lift(self, e: "FieldElem") -> "FieldElem":
        """Move an element of a subtower into this tower"""
        if e.tower == self:
            return e
        missing = set(e.tower.names) - set(self.names)
        if missing:
            raise ConstantsMismatchError(f"cannot lift: symbols {sorted(missing)} are not declared")
        return FieldElem(self, self.normalize(e.value.set_field(self.field)))

    def constant(self, value: Number) -> "FieldElem":
        return FieldElem(self, self.field.ground_new(to_qq(value)))

    def symbol(self, name: str) -> "FieldElem":
        return FieldElem(self, generator(self.field, name))

    def from_expr(self, expr) -> "FieldElem":
        return self.element(self.field.from_expr(_as_expr(expr)))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, self.field.zero)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, self.field.one)

    # Derivation

    def derive_poly(self, p: PolyElement) -> PolyElement:
        result = p.ring.zero
        for gen, image in self._generator_derivatives:
            partial = p.diff(gen)
            if partial:
                result += partial * image
        return result

    def derive_value(self, value: FracElement) -> FracElement:
        numer, denom = value.numer, value.denom
        d_numer = self.derive_poly(numer)
        if denom == 1:
            return self.normalize(self.field.new(d_numer, denom))
        d_denom = self.derive_poly(denom)
        return self.normalize(self.field.new(d_numer * denom - numer * d_denom, denom * denom))

    def __str__(self):
        extras = f", relations={[n for n, _ in self.relations]}" if self.relations else ""
        return f"{self.kind}({', '.join(self.generators)}; {', '.join(self.constants)}{extras})"


def rational_tower(constants: Sequence[str] = ()) -> FieldTower:
    return FieldTower("rational", ("x",), (sp.Integer(1),), tuple(constants))


def exponential_tower(constants: Sequence[str] = (), rate: int = 1) -> FieldTower:
    """Tower Q(eta) with eta = exp(rate*x); rate 2 uses the name w"""
    name = "eta" if rate == 1 else "w"
    return FieldTower("exponential", (name,), (rate * sp.Symbol(name),), tuple(constants), rate=rate)


def weierstrass_tower(g2: Optional[Number] = None, g3: Optional[Number] = None,
                      constants: Sequence[str] = ()) -> FieldTower:
    """
    Tower Q(g2, g3)(wp, dwp) with dwp^2 = 4 wp^3 - g2 wp - g3

    Args:
        g2: Numeric invariant, or None to keep g2 as a constant symbol
        g3: Numeric invariant, or None to keep g3 as a constant symbol
        constants: Further constant symbols
    """
    names = []
    g2_expr = sp.Symbol("g2") if g2 is None else _as_expr(g2)
    g3_expr = sp.Symbol("g3") if g3 is None else _as_expr(g3)
    if g2 is None:
        names.append("g2")
    if g3 is None:
        names.append("g3")
    names.extend(n for n in constants if n not in names)
    wp, dwp = sp.Symbol("wp"), sp.Symbol("dwp")
    return FieldTower(
        "weierstrass",
        ("wp", "dwp"),
        (dwp, 6 * wp ** 2 - g2_expr / 2),
        tuple(names),
        relations=(("dwp", 4 * wp ** 3 - g2_expr * wp - g3_expr),),
        moduli=(g2_expr, g3_expr),
    )


def make_tower(kind: str, constants: Sequence[str] = (), g2: Optional[Number] = None,
               g3: Optional[Number] = None) -> FieldTower:
    if kind == "rational":
        return rational_tower(constants)
    if kind == "exponential":
        return exponential_tower(constants)
    if kind == "weierstrass":
        return weierstrass_tower(g2, g3, constants)
    raise UnsupportedTowerError(f"unknown tower kind '{kind}'", tower_kind=kind)


@dataclass(frozen=True)
class FieldElem:
    """Canonical element of a FieldTower"""
    tower: FieldTower
    value: FracElement

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.tower == self.tower:
                return other
            if self.tower.is_extension_of(other.tower):
                return self.tower.lift(other)
            raise ConstantsMismatchError(f"elements of {self.tower} and {other.tower} do not mix")
        return self.tower.element(other)

    def _wrap(self, value: FracElement) -> "FieldElem":
        return type(self)(self.tower, self.tower.normalize(value))

    def __add__(self, other):
        return type(self)(self.tower, self.value + self._coerce(other).value)

    __radd__ = __add__

    def __sub__(self, other):
        return type(self)(self.tower, self.value - self._coerce(other).value)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return type(self)(self.tower, -self.value)

    def __mul__(self, other):
        return self._wrap(self.value * self._coerce(other).value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).invert()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.invert()

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = type(self)(self.tower, self.tower.field.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.value)

    def __eq__(self, other):
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.tower == other.tower and self.value == other.value

    def __hash__(self):
        return hash((self.tower, self.value))

    @property
    def is_zero(self) -> bool:
        return not self.value

    def invert(self) -> "FieldElem":
        """Multiplicative inverse, through the conjugate for relation symbols"""
        if not self.value:
            raise DivisionByZeroError("inverse of zero")
        return self._wrap(self.tower.field.new(self.value.denom, self.value.numer))

    def derive(self) -> "FieldElem":
        return type(self)(self.tower, self.tower.derive_value(self.value))

    def derive_n(self, n: int) -> "FieldElem":
        e = self
        for _ in range(n):
            e = e.derive()
        return e

    def uses(self, names: Iterable[str]) -> bool:
        indices = [self.tower.names.index(n) for n in names if n in self.tower.names]
        return any(m[i] for p in (self.value.numer, self.value.denom) for m in p.monoms() for i in indices)

    @property
    def is_constant(self) -> bool:
        """True when no differential generator occurs"""
        return not self.uses(self.tower.generators)

    def coordinates(self, denominator: Optional[PolyElement] = None) -> Dict[Tuple[int, ...], FracElement]:
        """
        Coordinates over the constants field

        The element is written as N/D with D the given denominator (or its
        own), and N is split by generator monomials. The generator-free
        content of D is divided into the coefficients, so they are rational
        functions of the constant symbols; what remains of D is shared by
        every element expressed over the same denominator and is dropped.
        Elements written over one D therefore combine linearly exactly when
        their coordinates do.

        Args:
            denominator: Polynomial denominator to express the element over

        Returns:
            Map from generator exponent tuples to constant coefficients

        Raises:
            BasisMismatchError: the element's denominator does not divide D
        """
        numer, denom = self.value.numer, self.value.denom
        generators = self.tower.generators
        if denominator is not None:
            quotient, remainder = denominator.div(denom)
            if remainder:
                raise BasisMismatchError(f"element does not fit over the denominator {denominator}")
            numer, denom = numer * quotient, denominator
        content = reduce(lambda a, b: a.gcd(b), split_by_symbols(denom, generators).values())
        field = self.tower.field
        scale = field.new(field.ring.one, content)
        return {key: scale * field.new(coeff, field.ring.one)
                for key, coeff in split_by_symbols(numer, generators).items()}

    def substitute(self, images: Mapping[str, object], target: Optional[FieldTower] = None) -> "FieldElem":
        """Substitute symbols by numbers or elements of the target tower"""
        target = target or self.tower
        converted = {}
        for name, value in images.items():
            if isinstance(value, FieldElem):
                value = target.lift(value).value
            converted[name] = value
        return target.element(evaluate_ratfun(self.value, target.field, converted))

    def to_text(self) -> str:
        return format_ratfun(self.value)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"FieldElem({self.to_text()!r} in {self.tower})"


def fe_derive(e: FieldElem) -> FieldElem:
    return e.derive()


def fe_invert(e: FieldElem) -> FieldElem:
    return e.invert()


def fe_coordinates(e: FieldElem, denominator: Optional[PolyElement] = None):
    return e.coordinates(denominator)


def fe_substitute(e: FieldElem, images: Mapping[str, object], target: Optional[FieldTower] = None) -> FieldElem:
    return e.substitute(images, target)


def common_denominator(elements: Iterable[FieldElem]) -> PolyElement:
    """Least common multiple of the denominators of elements"""
    result = None
    for e in elements:
        d = e.value.denom
        result = d if result is None else result.lcm(d)
    if result is None:
        raise BasisMismatchError("no elements to take a common denominator of")
    return result


def cosh_sinh(tower: FieldTower) -> Tuple[FieldElem, FieldElem]:
    """cosh(x) and sinh(x) in an exponential tower of rate 1"""
    if tower.kind != "exponential" or tower.rate != 1:
        raise UnsupportedTowerError("cosh and sinh need the exponential tower eta = exp(x)",
                                    tower_kind=tower.kind)
    eta = tower.symbol(tower.generators[0])
    half = Fraction(1, 2)
    return (eta + eta.invert()) * half, (eta - eta.invert()) * half


def is_even(e: FieldElem) -> bool:
    """True when e only involves even powers of the exponential generator"""
    if e.tower.kind != "exponential":
        return False
    return all(m[0] % 2 == 0 for p in (e.value.numer, e.value.denom) for m in p.monoms())


def to_squared(e: FieldElem, target: Optional[FieldTower] = None) -> FieldElem:
    """Rewrite an element even in t as an element of the tower in w = t^2"""
    target = target or e.tower.squared()
    if not is_even(e):
        raise UnsupportedTowerError("element is not even in the exponential generator",
                                    tower_kind=e.tower.kind)
    ring = target.field.ring

    def halve(p: PolyElement) -> PolyElement:
        return ring.from_dict({(m[0] // 2,) + tuple(m[1:]): c for m, c in p.terms()})

    return target.element(target.field.new(halve(e.value.numer), halve(e.value.denom)))

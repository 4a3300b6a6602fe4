"""
Differential polynomials in u for kdvfactor

A DiffPoly is a polynomial in the jet variables u, u1, u2, ... (u_k standing
for the k-th derivative of u) with coefficients polynomial in the constant
symbols lambda, mu and c1..c8. The jet ring is truncated at a fixed order;
derivatives that would leave it raise JetOrderExceededError.
"""

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, PolyRing

from utils.exceptions import JetOrderExceededError, NotTotalDerivativeError

from .algebra import evaluate_poly, format_poly, generator, polynomial_ring, symbol_names, to_qq
from .fields import FieldElem, FieldTower

JET_ORDER = 32
JET_CONSTANTS = ("lambda", "mu") + tuple(f"c{i}" for i in range(1, 9))


def jet_name(k: int) -> str:
    return "u" if k == 0 else f"u{k}"


@functools.lru_cache(maxsize=None)
def jet_ring(order: int = JET_ORDER) -> PolyRing:
    return polynomial_ring(tuple(jet_name(k) for k in range(order)) + JET_CONSTANTS)


@dataclass(frozen=True)
class DiffPoly:
    """Element of the free differential polynomial ring in u"""
    poly: PolyElement

    # Construction

    @classmethod
    def ring(cls) -> PolyRing:
        return jet_ring()

    @classmethod
    def zero(cls) -> "DiffPoly":
        return cls(jet_ring().zero)

    @classmethod
    def one(cls) -> "DiffPoly":
        return cls(jet_ring().one)

    @classmethod
    def constant(cls, value: Union[int, Fraction]) -> "DiffPoly":
        return cls(jet_ring().ground_new(to_qq(value)))

    @classmethod
    def jet(cls, k: int) -> "DiffPoly":
        if not 0 <= k < JET_ORDER:
            raise JetOrderExceededError(f"jet u{k} is outside the jet ring", order=k)
        return cls(jet_ring().gens[k])

    @classmethod
    def symbol(cls, name: str) -> "DiffPoly":
        return cls(generator(jet_ring(), name))

    # Arithmetic

    def _coerce(self, other) -> PolyElement:
        if isinstance(other, DiffPoly):
            return other.poly
        if isinstance(other, PolyElement):
            return other
        return jet_ring().ground_new(to_qq(other))

    def __add__(self, other):
        return DiffPoly(self.poly + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return DiffPoly(self.poly - self._coerce(other))

    def __rsub__(self, other):
        return DiffPoly(self._coerce(other) - self.poly)

    def __neg__(self):
        return DiffPoly(-self.poly)

    def __mul__(self, other):
        return DiffPoly(self.poly * self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return DiffPoly(self.poly ** n)

    def __bool__(self):
        return bool(self.poly)

    @property
    def is_zero(self) -> bool:
        return not self.poly

    # Structure

    @property
    def order(self) -> int:
        """Highest derivative order present, -1 when u does not occur"""
        top = -1
        for monom in self.poly.monoms():
            for k in range(JET_ORDER - 1, top, -1):
                if monom[k]:
                    top = k
                    break
        return top

    def weights(self) -> set:
        """Weights of the terms, u_k having weight k + 2"""
        return {sum(e * (k + 2) for k, e in enumerate(monom[:JET_ORDER])) for monom in self.poly.monoms()}

    def uses(self, name: str) -> bool:
        i = symbol_names(self.poly.ring).index(name)
        return any(m[i] for m in self.poly.monoms())

    # Derivation

    def derive(self) -> "DiffPoly":
        """Total derivative: u_k maps to u_(k+1)"""
        ring = self.poly.ring
        result = ring.zero
        for k in range(self.order + 1):
            partial = self.poly.diff(ring.gens[k])
            if not partial:
                continue
            if k + 1 >= JET_ORDER:
                raise JetOrderExceededError(f"derivative of u{k} exceeds the jet order {JET_ORDER}",
                                            order=k + 1)
            result += partial * ring.gens[k + 1]
        return DiffPoly(result)

    def derive_n(self, n: int) -> "DiffPoly":
        p = self
        for _ in range(n):
            p = p.derive()
        return p

    def integrate(self) -> "DiffPoly":
        """
        Antiderivative with zero u-free part

        The highest jet u_m must occur linearly; each term c*M*u_(m-1)^k*u_m
        contributes c*M*u_(m-1)^(k+1)/(k+1) and the derivative of the partial
        answer is subtracted before the next round.

        Returns:
            q with q.derive() == self

        Raises:
            NotTotalDerivativeError: self is not in the image of derive
        """
        ring = self.poly.ring
        remainder = self.poly
        result = ring.zero
        while remainder:
            m = DiffPoly(remainder).order
            if m <= 0:
                raise NotTotalDerivativeError("remainder is not a total derivative",
                                              remainder=format_poly(remainder))
            piece = ring.zero
            for monom, coeff in remainder.terms():
                e = monom[m]
                if e > 1:
                    raise NotTotalDerivativeError(f"u{m} occurs nonlinearly",
                                                  remainder=format_poly(remainder))
                if e == 1:
                    k = monom[m - 1]
                    lifted = list(monom)
                    lifted[m] = 0
                    lifted[m - 1] = k + 1
                    piece += ring({tuple(lifted): coeff * QQ(1, k + 1)})
            result += piece
            remainder = remainder - DiffPoly(piece).derive().poly
        return DiffPoly(result)

    # Substitution

    def substitute(self, pot: FieldElem, constants: Optional[Mapping[str, object]] = None,
                   target: Optional[FieldTower] = None) -> FieldElem:
        """
        Image under u -> pot, u_k -> k-th derivative of pot

        Args:
            pot: Concrete potential
            constants: Values for constant symbols (c_i, lambda, mu)
            target: Tower of the result; defaults to the potential's tower
                extended by any constant symbol left unassigned

        Returns:
            FieldElem in target
        """
        constants = dict(constants or {})
        used = [name for name in JET_CONSTANTS if self.uses(name) and name not in constants]
        target = target or pot.tower.with_constants(*used)
        pot = target.lift(pot)
        images = {}
        jet = pot
        for k in range(self.order + 1):
            images[jet_name(k)] = jet.value
            if k < self.order:
                jet = jet.derive()
        for name, value in constants.items():
            images[name] = target.lift(value).value if isinstance(value, FieldElem) else value
        return target.element(evaluate_poly(self.poly, target.field, images))

    # Text

    def to_text(self) -> str:
        return format_poly(self.poly)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"DiffPoly({self.to_text()!r})"


U = DiffPoly.jet


def dp_derive(p: DiffPoly) -> DiffPoly:
    return p.derive()


def dp_integrate(p: DiffPoly) -> DiffPoly:
    return p.integrate()


def dp_substitute(p: DiffPoly, pot: FieldElem, constants: Optional[Mapping[str, object]] = None,
                  target: Optional[FieldTower] = None) -> FieldElem:
    return p.substitute(pot, constants, target)

"""
Genus and global parametrizations of spectral curves

Genus-0 curves of the shape R = l*(lambda - r)*q(lambda)^2 are parametrized
by lambda = r - tau^2/l, mu = +-tau*q(lambda); the elliptic curve
R = lambda^3 - g2/4 lambda + g3/4 by (-wp(tau), wp'(tau)/2). The
parametrization carries the factor phi of L - lambda over to a factor of
L - chi1(tau) with coefficients in F = K(tau) or K(wp(tau), wp'(tau)).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

import sympy as sp

from utils.exceptions import UnsupportedShapeError
from utils.logger import LoggerMixin, log_performance

from .algebra import odd_part, squarefree_decomposition
from .fields import FieldElem, FieldTower, is_even, to_squared
from .operators import DiffOp, TowerDomain, op_mul, schrodinger
from .spectral import CurvePoly, Potential, lambda_coefficients, lambda_degree


NO_GLOBAL_PARAMETRIZATION = "No algorithm is known to compute a global parametrization of a curve of genus >= 2"


@dataclass(frozen=True)
class Parametrization:
    """lambda = chi1(tau), mu = chi2(tau) over the tower F"""
    kind: str
    tower: FieldTower
    chi1: FieldElem
    chi2: FieldElem
    sign: int

    def to_dict(self) -> Dict[str, str]:
        return {"kind": self.kind, "chi1": self.chi1.to_text(), "chi2": self.chi2.to_text(),
                "sign": str(self.sign)}


def _poly_elem(tower: FieldTower, p) -> FieldElem:
    return FieldElem(tower, tower.field.new(p, tower.field.ring.one))


def hyperelliptic_genus(curve: CurvePoly) -> int:
    """Genus of mu^2 = -R from the odd-multiplicity part of R"""
    d = odd_part(curve.R.value.numer, "lambda").degree(curve.R.tower.names.index("lambda"))
    return max(0, (d - 1) // 2)


def _evaluate_at(p: FieldElem, value: FieldElem, target: FieldTower) -> FieldElem:
    return p.substitute({"lambda": value}, target=target)


class CurveParametrizer(LoggerMixin):
    """Parametrizations and the one-parameter factorization"""

    def __init__(self, sign: int = -1):
        """
        Initialize the parametrizer

        Args:
            sign: Sheet of mu; -1 gives a leading term -tau^(2 deg q + 1)
        """
        if sign not in (1, -1):
            raise ValueError(f"sign must be 1 or -1, got {sign}")
        self.sign = sign

    def genus(self, curve: CurvePoly) -> int:
        return hyperelliptic_genus(curve)

    @log_performance
    def parametrize_curve(self, curve: CurvePoly, sign: Optional[int] = None) -> Parametrization:
        """
        Global parametrization of a genus-0 or elliptic spectral curve

        Raises:
            UnsupportedShapeError: genus >= 2, or a curve outside the
                supported genus-0 and elliptic shapes
        """
        sign = self.sign if sign is None else sign
        genus = self.genus(curve)
        if genus == 0:
            par = self._rational(curve, sign)
        elif genus == 1:
            par = self._elliptic(curve, sign)
        else:
            raise UnsupportedShapeError(NO_GLOBAL_PARAMETRIZATION, genus=genus, stage="parametrize")
        if not self.check_identity(curve, par):
            raise UnsupportedShapeError("parametrization does not satisfy the curve equation",
                                        genus=genus, stage="parametrize")
        self.logger.info(f"Parametrization ({par.chi1}, {par.chi2})")
        return par

    def _rational(self, curve: CurvePoly, sign: int) -> Parametrization:
        R = curve.R
        tower = R.tower
        numer = R.value.numer
        factors = squarefree_decomposition(numer, "lambda")
        odd = [(f, e) for f, e in factors if e % 2]
        if len(odd) != 1 or odd[0][0].degree(tower.names.index("lambda")) != 1:
            raise UnsupportedShapeError("genus-0 curve is not of the shape l*(lambda - r)*q^2",
                                        genus=0, stage="parametrize")
        linear = lambda_coefficients(_poly_elem(tower, odd[0][0]))
        r = -linear.get(0, tower.zero) / linear[1]
        q = tower.one
        for factor, multiplicity in factors:
            q = q * _poly_elem(tower, factor) ** (multiplicity // 2)
        q_coeffs = lambda_coefficients(q)
        q = q / q_coeffs[max(q_coeffs)]
        lam = tower.symbol("lambda")
        coeffs = lambda_coefficients(R)
        l = coeffs[max(coeffs)]
        if R != l * (lam - r) * q * q:
            raise UnsupportedShapeError("R does not split as l*(lambda - r)*q^2", genus=0, stage="parametrize")

        F = curve.base.with_constants("tau")
        tau = F.symbol("tau")
        chi1 = F.lift(r.substitute({}, target=curve.base)) - tau * tau / F.lift(l.substitute({}, target=curve.base))
        parity = -1 if lambda_degree(q) % 2 else 1
        chi2 = tau * _evaluate_at(q, chi1, F) * (sign * parity)
        return Parametrization("rational", F, chi1, chi2, sign)

    def _elliptic(self, curve: CurvePoly, sign: int) -> Parametrization:
        base = curve.base
        if base.kind != "weierstrass" or not base.moduli:
            raise UnsupportedShapeError("genus-1 curves are supported only over Weierstrass towers",
                                        genus=1, stage="parametrize")
        g2, g3 = base.moduli
        lam = sp.Symbol("lambda")
        expected = curve.R.tower.from_expr(lam ** 3 - g2 * lam / 4 + g3 / 4)
        if curve.R != expected:
            raise UnsupportedShapeError("elliptic curve is not in the normal form -mu^2 - lambda^3 + g2/4 lambda - g3/4",
                                        genus=1, stage="parametrize")
        wp_tau, dwp_tau = sp.Symbol("wp_tau"), sp.Symbol("dwp_tau")
        F = base.with_constants("wp_tau", "dwp_tau").with_relation(
            "dwp_tau", 4 * wp_tau ** 3 - g2 * wp_tau - g3)
        chi1 = -F.symbol("wp_tau")
        chi2 = F.symbol("dwp_tau") * Fraction(-sign, 2)
        return Parametrization("weierstrass", F, chi1, chi2, sign)

    def check_identity(self, curve: CurvePoly, par: Parametrization) -> bool:
        """f(chi1, chi2) == 0"""
        return curve.f.substitute({"lambda": par.chi1, "mu": par.chi2}, target=par.tower).is_zero

    def curve_point(self, par: Parametrization, tau0: Union[int, Fraction], base: FieldTower) -> Tuple[FieldElem, FieldElem]:
        """(chi1(tau0), chi2(tau0)) as constants of the base tower"""
        if par.kind != "rational":
            raise UnsupportedShapeError("points from elliptic parametrizations need numeric wp values",
                                        genus=1, stage="parametrize")
        images = {"tau": tau0}
        return (par.chi1.substitute(images, target=base), par.chi2.substitute(images, target=base))

    # One-parameter factorization

    def substitute_param(self, phi: FieldElem, par: Parametrization, pot: Optional[Potential] = None) -> FieldElem:
        """
        rho(phi): lambda -> chi1(tau), mu -> chi2(tau)

        Results in an exponential tower that are even in the generator are
        rewritten in w = t^2.
        """
        value = phi.substitute({"lambda": par.chi1, "mu": par.chi2}, target=par.tower)
        if is_even(value):
            return to_squared(value)
        return value

    def _in_tower(self, e: FieldElem, tower: FieldTower) -> FieldElem:
        if e.tower.generators == tower.generators:
            return tower.lift(e)
        return tower.lift(to_squared(e))

    def riccati_check_param(self, phi_t: FieldElem, pot: Potential, par: Parametrization) -> bool:
        """d(phi~) + phi~^2 - u + chi1(tau) == 0 in F"""
        tower = phi_t.tower
        u = self._in_tower(pot.u, tower)
        chi1 = self._in_tower(par.chi1, tower)
        return (phi_t.derive() + phi_t * phi_t - u + chi1).is_zero

    def factorization_check_param(self, phi_t: FieldElem, pot: Potential, par: Parametrization) -> bool:
        """(-d - phi~)(d - phi~) == L - chi1(tau)"""
        tower = phi_t.tower
        domain = TowerDomain(tower)
        u = self._in_tower(pot.u, tower)
        chi1 = self._in_tower(par.chi1, tower)
        left = DiffOp(domain, (-phi_t, domain.wrap(-1)))
        right = DiffOp(domain, (-phi_t, domain.one))
        return op_mul(left, right) == schrodinger(domain, u) - chi1


def parametrize_curve(curve: CurvePoly, sign: int = -1) -> Parametrization:
    return CurveParametrizer(sign).parametrize_curve(curve)


def substitute_param(phi: FieldElem, par: Parametrization, pot: Optional[Potential] = None) -> FieldElem:
    return CurveParametrizer(par.sign).substitute_param(phi, par, pot)


def riccati_check_param(phi_t: FieldElem, pot: Potential, par: Parametrization) -> bool:
    return CurveParametrizer(par.sign).riccati_check_param(phi_t, pot, par)


def curve_point(par: Parametrization, tau0: Union[int, Fraction], base: FieldTower) -> Tuple[FieldElem, FieldElem]:
    return CurveParametrizer(par.sign).curve_point(par, tau0, base)

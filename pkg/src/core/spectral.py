"""
Spectral data of a stationary KdV potential

Given a potential u in a tower K, SpectralEngine finds the KdV level s and
the constants c of KdV_s(u, c) = 0, builds A = P^_(2s+1)(u, c), computes the
spectral curve f = dRes(L - lambda, A - mu) = -mu^2 - R(lambda), factors
L - lambda = (-d - phi)(d - phi) over the curve and specializes the factor
at curve points.

Operator coefficients live in K(lambda, mu); elements of the function field
of the curve live in the same tower with the relation mu^2 = -R.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from utils.exceptions import (DegeneratePotentialError, IndexBelowLevelError,
                              LevelNotFoundError, NonConstantCoefficientError,
                              NotOnCurveError, ShapeMismatchError,
                              UnderdeterminedLevelError, VanishingPhi2Error,
                              ZeroOnCurveError, ZeroSubresultantError)
from utils.logger import LoggerMixin, log_performance

from .algebra import as_rational, solve_linear_system, split_by_symbols
from .diffpoly import U, DiffPoly
from .fields import FieldElem, FieldTower, common_denominator
from .hierarchy import KdvHierarchy, default_hierarchy
from .operators import (FORMAL, DiffOp, TowerDomain, diff_resultant, op_apply,
                        op_commutator, op_mul, op_right_divide, schrodinger,
                        subresultant_L1)

Value = Union[int, Fraction, FieldElem]


@dataclass(frozen=True)
class Potential:
    """Nonconstant potential u of a tower"""
    tower: FieldTower
    u: FieldElem
    label: str = ""

    def __post_init__(self):
        if self.u.tower != self.tower:
            object.__setattr__(self, "u", self.tower.lift(self.u))
        if self.u.derive().is_zero:
            raise DegeneratePotentialError(f"potential {self.u} is constant", stage="potential")

    @cached_property
    def op_tower(self) -> FieldTower:
        """K(lambda, mu)"""
        return self.tower.with_constants("lambda", "mu")

    @property
    def domain(self) -> TowerDomain:
        return TowerDomain(self.op_tower)

    @property
    def base_domain(self) -> TowerDomain:
        return TowerDomain(self.tower)

    def __str__(self):
        return self.label or self.u.to_text()


@dataclass(frozen=True)
class LevelResult:
    s: int
    cbar: Tuple[FieldElem, ...]
    k_values: Tuple[FieldElem, ...]

    def constants(self) -> Dict[str, FieldElem]:
        return {f"c{i}": c for i, c in enumerate(self.cbar, start=1)}


@dataclass(frozen=True)
class FlagSpaces:
    """Solutions of KdV_n(u, c) = 0 at an index n above the level"""
    n: int
    representative: Tuple[FieldElem, ...]
    basis: Tuple[Tuple[FieldElem, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


class CurveElem(FieldElem):
    """Element (a + b*mu)/Lambda of the function field of the spectral curve"""

    @property
    def parts(self) -> Tuple[FieldElem, FieldElem, FieldElem]:
        groups = split_by_symbols(self.value.numer, ("mu",))
        ring = self.value.numer.ring
        field = self.tower.field
        a = groups.get((0,), ring.zero)
        b = groups.get((1,), ring.zero)
        make = lambda p: FieldElem(self.tower, field.new(p, ring.one))
        return make(a), make(b), make(self.value.denom)


@dataclass(frozen=True)
class CurvePoly:
    """Spectral curve f = -mu^2 - R(lambda) with constant coefficients"""
    base: FieldTower
    f: FieldElem
    R: FieldElem
    s: int

    @cached_property
    def tower(self) -> FieldTower:
        """K(lambda, mu) with mu^2 = -R"""
        op_tower = self.base.with_constants("lambda", "mu")
        return op_tower.with_relation("mu", (-self.R.value).as_expr())

    @property
    def degree(self) -> int:
        return lambda_degree(self.R)

    def element(self, value) -> CurveElem:
        e = self.tower.element(value)
        return CurveElem(e.tower, e.value)

    def reduce(self, e: FieldElem) -> CurveElem:
        """Normal form on the curve: mu^2 replaced by -R"""
        return self.element(e)

    def invert(self, e: FieldElem) -> CurveElem:
        e = self.reduce(e)
        if e.is_zero:
            raise ZeroOnCurveError(stage="curve")
        return self.element(e.invert())

    def conjugate(self, e: FieldElem) -> CurveElem:
        """mu -> -mu"""
        mu = self.tower.symbol("mu")
        return self.element(self.reduce(e).substitute({"mu": -mu}))

    def evaluate(self, lambda0: Value, mu0: Value) -> FieldElem:
        return self.f.substitute({"lambda": lambda0, "mu": mu0}, target=self.base)

    def contains(self, lambda0: Value, mu0: Value) -> bool:
        return self.evaluate(lambda0, mu0).is_zero

    def rational_point(self, search: Sequence[int] = range(-6, 7)) -> Optional[Tuple[Fraction, Fraction]]:
        """First point (lambda0, mu0) with integer lambda0 and mu0 > 0, searching by |lambda0|"""
        for lam in sorted(search, key=abs):
            value = as_rational((-self.R).substitute({"lambda": lam}, target=self.base).value)
            if value is None or value <= 0:
                continue
            root = _rational_sqrt(value)
            if root is not None:
                return Fraction(lam), root
        return None

    def to_text(self) -> str:
        return self.f.to_text()


@dataclass(frozen=True)
class Factorization:
    """Right factor d - phi_plus of L - lambda over the curve"""
    phi_plus: CurveElem
    phi_minus: CurveElem
    alpha: FieldElem
    phi2: FieldElem
    det_s10: FieldElem
    det_s11: FieldElem


@dataclass(frozen=True)
class SpecializedFactor:
    lambda0: FieldElem
    mu0: FieldElem
    phi0: FieldElem
    singular: bool
    factorization_verified: bool
    common_factor_verified: bool


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    p, r = math.isqrt(q.numerator), math.isqrt(q.denominator)
    return Fraction(p, r) if p * p == q.numerator and r * r == q.denominator else None


def lambda_degree(e: FieldElem) -> int:
    names = e.tower.names
    index = names.index("lambda")
    numer = e.value.numer
    return numer.degree(index) if numer else -1


def lambda_coefficients(e: FieldElem) -> Dict[int, FieldElem]:
    """Coefficients of a polynomial in lambda"""
    field = e.tower.field
    denom = field.new(field.ring.one, e.value.denom)
    return {key[0]: FieldElem(e.tower, field.new(p, field.ring.one) * denom)
            for key, p in split_by_symbols(e.value.numer, ("lambda",)).items()}


def _as_value(tower: FieldTower, value: Value) -> FieldElem:
    return tower.element(value)


class SpectralEngine(LoggerMixin):
    """Level, curve and factorization pipeline for one hierarchy"""

    def __init__(self, hierarchy: Optional[KdvHierarchy] = None, s_max: int = 8,
                 determinant: str = "bareiss"):
        """
        Initialize the engine

        Args:
            hierarchy: Shared hierarchy cache (default: process-wide cache)
            s_max: Largest level tried by kdv_level
            determinant: bareiss or cofactor
        """
        self.hierarchy = hierarchy or default_hierarchy()
        self.s_max = s_max
        self.determinant = determinant

    # Levels

    def k_values(self, pot: Potential, n: int) -> List[FieldElem]:
        """k_l = kdv_l(u) for l = 0..n"""
        return [self.hierarchy.kdv(l).substitute(pot.u) for l in range(n + 1)]

    def _level_system(self, k: Sequence[FieldElem], n: int):
        tower = k[0].tower
        denominator = common_denominator(k[:n + 1])
        coords = [e.coordinates(denominator) for e in k[:n + 1]]
        keys = sorted(set().union(*(c.keys() for c in coords)))
        zero = tower.field.zero
        rows = [[coords[n - i].get(key, zero) for i in range(1, n + 1)] for key in keys]
        rhs = [-coords[n].get(key, zero) for key in keys]
        return rows, rhs

    @log_performance
    def kdv_level(self, pot: Potential, s_max: Optional[int] = None) -> LevelResult:
        """
        Least n with constants c solving KdV_n(u, c) = 0

        Raises:
            LevelNotFoundError: no n <= s_max works
            UnderdeterminedLevelError: the solution at the level is not unique
        """
        s_max = s_max or self.s_max
        k: List[FieldElem] = []
        for n in range(1, s_max + 1):
            while len(k) <= n:
                k.append(self.hierarchy.kdv(len(k)).substitute(pot.u))
            rows, rhs = self._level_system(k, n)
            solution = solve_linear_system(rows, rhs, pot.tower.field)
            if not solution.consistent:
                self.logger.debug(f"{pot}: no constants at n={n}")
                continue
            if solution.nullspace:
                raise UnderdeterminedLevelError(
                    f"KdV_{n} has a {len(solution.nullspace)}-dimensional family of constants",
                    stage="level")
            cbar = tuple(pot.tower.element(c) for c in solution.particular)
            self.logger.info(f"{pot}: KdV level {n}, constants ({', '.join(map(str, cbar))})")
            return LevelResult(n, cbar, tuple(k))
        raise LevelNotFoundError(f"{pot} has no KdV level up to {s_max}", s_max=s_max, stage="level")

    def flag_spaces(self, pot: Potential, level: LevelResult, n: int) -> FlagSpaces:
        """
        Affine solution space of KdV_n(u, c) = 0 for n > s

        Raises:
            IndexBelowLevelError: n <= s
        """
        if n <= level.s:
            raise IndexBelowLevelError(f"flag index {n} is not above the level {level.s}", stage="flag")
        k = self.k_values(pot, n)
        rows, rhs = self._level_system(k, n)
        solution = solve_linear_system(rows, rhs, pot.tower.field)
        if not solution.consistent:
            raise UnderdeterminedLevelError(f"KdV_{n} has no constants above the level", stage="flag")
        wrap = lambda vector: tuple(pot.tower.element(c) for c in vector)
        basis = tuple(wrap(v) for v in solution.nullspace)
        for vector in basis:
            form = sum((vector[i - 1] * k[n - i] for i in range(1, n + 1)), pot.tower.zero)
            if not form.is_zero:
                raise UnderdeterminedLevelError(f"flag vector fails KdV_{n}", stage="flag")
        return FlagSpaces(n, wrap(solution.particular), basis)

    # Operators

    def schrodinger(self, pot: Potential) -> DiffOp:
        return schrodinger(pot.domain, pot.u)

    def build_A(self, pot: Potential, level: LevelResult,
                constants: Optional[Sequence[Value]] = None) -> DiffOp:
        """A = P^_(2s+1) with u and the level constants substituted"""
        cbar = level.cbar if constants is None else constants
        assignment = {f"c{i}": c for i, c in enumerate(cbar, start=1)}
        phat = self.hierarchy.phat(level.s)
        tower = pot.op_tower
        return DiffOp(pot.domain, tuple(a.substitute(pot.u, assignment, target=tower) for a in phat.coeffs))

    def centralizer_check(self, pot: Potential, level: LevelResult,
                          constants: Optional[Sequence[Value]] = None) -> bool:
        A = self.build_A(pot, level, constants)
        return op_commutator(A, self.schrodinger(pot)).is_zero

    def _pair(self, pot: Potential, level: LevelResult) -> Tuple[DiffOp, DiffOp]:
        tower = pot.op_tower
        L = self.schrodinger(pot) - tower.symbol("lambda")
        A = self.build_A(pot, level) - tower.symbol("mu")
        return L, A

    # Curve

    @log_performance
    def spectral_curve(self, pot: Potential, level: LevelResult) -> CurvePoly:
        """
        f = dRes(L - lambda, A - mu) normalized to -mu^2 - R

        Raises:
            NonConstantCoefficientError: some coefficient of f is not constant
            ShapeMismatchError: f is not of the form c*mu^2 + R(lambda)
        """
        L, A = self._pair(pot, level)
        f = diff_resultant(L, A, self.determinant)
        if not f.derive().is_zero:
            raise NonConstantCoefficientError("resultant has non-constant coefficients", stage="curve")
        groups = split_by_symbols(f.value.numer, ("mu",))
        if set(groups) - {(0,), (1,), (2,)} or (2,) not in groups:
            raise ShapeMismatchError(f"resultant is not quadratic in mu: {f}", stage="curve")
        if (1,) in groups:
            raise ShapeMismatchError("resultant has a term linear in mu", stage="curve")
        tower = pot.op_tower
        lead = FieldElem(tower, tower.field.new(groups[(2,)], f.value.denom))
        if lambda_degree(lead) > 0:
            raise ShapeMismatchError("coefficient of mu^2 depends on lambda", stage="curve")
        f = f / (-lead)
        mu = tower.symbol("mu")
        R = -(f + mu * mu)
        if lambda_degree(R) != 2 * level.s + 1:
            raise ShapeMismatchError(f"R has degree {lambda_degree(R)} in lambda, expected {2 * level.s + 1}",
                                     stage="curve")
        self.logger.info(f"{pot}: spectral curve {f}")
        return CurvePoly(pot.tower, f, R, level.s)

    # Factorization

    @log_performance
    def factor_on_curve(self, pot: Potential, level: LevelResult, curve: CurvePoly) -> Factorization:
        """
        phi_plus = -det S_1^0 / det S_1^1 on the curve

        Raises:
            ZeroSubresultantError: det S_1^1 vanishes or phi_plus is zero
        """
        L, A = self._pair(pot, level)
        det0, det1 = subresultant_L1(L, A, self.determinant)
        if det1.is_zero:
            raise ZeroSubresultantError("det S_1^1 vanishes", stage="factor")
        mu = pot.op_tower.symbol("mu")
        alpha = -det0 - mu
        phi_plus = curve.reduce(-det0) * curve.invert(det1)
        if phi_plus.is_zero:
            raise ZeroSubresultantError("phi vanishes on the curve", stage="factor")
        phi_minus = curve.conjugate(phi_plus)
        self.logger.info(f"{pot}: phi = {phi_plus}")
        return Factorization(phi_plus, phi_minus, alpha, det1, det0, det1)

    def riccati_check(self, phi: FieldElem, pot: Potential, curve: CurvePoly) -> bool:
        """d(phi) + phi^2 - u + lambda == 0 on the curve"""
        phi = curve.reduce(phi)
        lam = curve.tower.symbol("lambda")
        residual = phi.derive() + phi * phi - pot.u + lam
        return residual.is_zero

    def solution_identities(self, factor: Factorization, curve: CurvePoly, pot: Potential) -> Dict[str, bool]:
        """Difference, product and fundamental-equation identities of the factor"""
        mu = curve.tower.symbol("mu")
        phi2 = curve.reduce(factor.phi2)
        difference = (factor.phi_plus - factor.phi_minus) == curve.element(mu * 2 / phi2)
        product = product_identity(factor, curve)
        return {
            "phi_difference": difference,
            "phi_sum": product,
            "phi2_fundamental_equation": self.fundamental_equation_holds(factor.phi2, pot),
        }

    def fundamental_equation_holds(self, phi2: FieldElem, pot: Potential) -> bool:
        """d^3 phi - 4(u - lambda) d phi - 2 u' phi == 0"""
        domain = pot.domain
        lam = pot.op_tower.symbol("lambda")
        u = pot.op_tower.lift(pot.u)
        op = DiffOp(domain, (u.derive() * (-2), (u - lam) * (-4), domain.zero, domain.one))
        return op_apply(op, phi2).is_zero

    # Specialization

    @log_performance
    def specialize_at_point(self, pot: Potential, level: LevelResult, curve: CurvePoly,
                            factor: Factorization, lambda0: Value, mu0: Value) -> SpecializedFactor:
        """
        phi0 = (mu0 + alpha(lambda0)) / phi2(lambda0) at a point of the curve

        Raises:
            NotOnCurveError: f(lambda0, mu0) != 0
            VanishingPhi2Error: phi2(lambda0) == 0
        """
        base = pot.tower
        lam0 = _as_value(base, lambda0)
        mu0 = _as_value(base, mu0)
        if not curve.contains(lam0, mu0):
            raise NotOnCurveError(f"({lam0}, {mu0}) is not on the curve", point=(str(lam0), str(mu0)),
                                  stage="specialize")
        phi2_0 = factor.phi2.substitute({"lambda": lam0}, target=base)
        if phi2_0.is_zero:
            raise VanishingPhi2Error(f"phi2 vanishes at lambda = {lam0}", stage="specialize")
        alpha_0 = factor.alpha.substitute({"lambda": lam0}, target=base)
        phi0 = (mu0 + alpha_0) / phi2_0

        domain = pot.base_domain
        L0 = schrodinger(domain, pot.u) - lam0
        right = DiffOp(domain, (-phi0, domain.one))
        left = DiffOp(domain, (-phi0, domain.wrap(-1)))
        factorization_verified = op_mul(left, right) == L0

        A = self.build_A(pot, level)
        A0 = DiffOp(domain, tuple(a.substitute({}, target=base) for a in A.coeffs)) - mu0
        common = all(op_right_divide(op, right)[1].is_zero for op in (L0, A0))
        singular = mu0.is_zero
        if singular:
            self.logger.info(f"({lam0}, {mu0}) is a point with mu = 0")
        return SpecializedFactor(lam0, mu0, phi0, singular, factorization_verified, common)

    # Formal checks

    def resultant_formal_checks(self, s: int) -> Dict[str, bool]:
        """
        Degree structure of the formal resultant and first subresultant

        dRes(L - lambda, P^_(2s+1) - mu) = -mu^2 + R with deg R = 2s + 1 and
        leading terms -lambda^(2s+1) - 2 c1 lambda^(2s); det S_1^1 monic of
        degree s with next coefficient u/2 + c1; det S_1^0 = -mu - alpha with
        deg alpha <= s - 1.
        """
        lam = DiffPoly.symbol("lambda")
        mu = DiffPoly.symbol("mu")
        L = schrodinger(FORMAL, U(0)) - lam
        A = self.hierarchy.phat(s) - mu
        checks: Dict[str, bool] = {}

        ring = lam.poly.ring
        li = ring.gens.index(lam.poly)
        res = diff_resultant(L, A, self.determinant)
        R = res + mu * mu
        checks["resultant_mu_square"] = not R.uses("mu")
        checks["resultant_degree"] = R.poly.degree(li) == 2 * s + 1
        top = split_by_symbols(R.poly, ("lambda",))
        c1 = DiffPoly.symbol("c1").poly
        checks["resultant_leading_terms"] = (top.get((2 * s + 1,)) == -ring.one
                                             and top.get((2 * s,)) == -2 * c1)

        if s >= 1:
            det0, det1 = subresultant_L1(L, A, self.determinant)
            groups = split_by_symbols(det1.poly, ("lambda",))
            expected = (U(0) * Fraction(1, 2) + DiffPoly.symbol("c1")).poly
            checks["phi2_monic"] = det1.poly.degree(li) == s and groups.get((s,)) == ring.one
            checks["phi2_subleading"] = s == 0 or groups.get((s - 1,)) == expected
            alpha = -det0 - mu
            checks["alpha_degree"] = not alpha.uses("mu") and alpha.poly.degree(li) <= s - 1
        return checks


def _engine(engine: Optional[SpectralEngine]) -> SpectralEngine:
    return engine or SpectralEngine()


def kdv_level(pot: Potential, s_max: int = 8, engine: Optional[SpectralEngine] = None) -> LevelResult:
    return _engine(engine).kdv_level(pot, s_max)


def flag_spaces(pot: Potential, level: LevelResult, n: int, engine: Optional[SpectralEngine] = None) -> FlagSpaces:
    return _engine(engine).flag_spaces(pot, level, n)


def build_A(pot: Potential, level: LevelResult, engine: Optional[SpectralEngine] = None) -> DiffOp:
    return _engine(engine).build_A(pot, level)


def centralizer_check(pot: Potential, level: LevelResult, engine: Optional[SpectralEngine] = None) -> bool:
    return _engine(engine).centralizer_check(pot, level)


def spectral_curve(pot: Potential, level: LevelResult, engine: Optional[SpectralEngine] = None) -> CurvePoly:
    return _engine(engine).spectral_curve(pot, level)


def curve_reduce(p: FieldElem, curve: CurvePoly) -> CurveElem:
    return curve.reduce(p)


def curve_invert(e: FieldElem, curve: CurvePoly) -> CurveElem:
    return curve.invert(e)


def factor_on_curve(pot: Potential, level: LevelResult, curve: CurvePoly,
                    engine: Optional[SpectralEngine] = None) -> Factorization:
    return _engine(engine).factor_on_curve(pot, level, curve)


def riccati_check(phi: FieldElem, pot: Potential, curve: CurvePoly) -> bool:
    return SpectralEngine().riccati_check(phi, pot, curve)


def solution_identities(factor: Factorization, curve: CurvePoly, pot: Potential) -> Dict[str, bool]:
    return SpectralEngine().solution_identities(factor, curve, pot)


def product_identity(factor: Factorization, curve: CurvePoly) -> bool:
    phi2 = curve.reduce(factor.phi2)
    return (factor.phi_plus + factor.phi_minus) == curve.element(phi2.derive() / phi2)


def specialize_at_point(pot: Potential, level: LevelResult, curve: CurvePoly, factor: Factorization,
                        lambda0: Value, mu0: Value, engine: Optional[SpectralEngine] = None) -> SpecializedFactor:
    return _engine(engine).specialize_at_point(pot, level, curve, factor, lambda0, mu0)

"""
Hyperexponential solutions of d(Y) = phi*Y

For phi rational in the generator t of a rational or exponential tower the
solver looks for

    Y = exp(a*x) * prod p_i^(n_i) * exp(B/E + integral of a polynomial)

with p_i the irreducible factors of the denominator of phi. Writing
g = phi (rational) or g = phi/(k*t) (exponential, dt = k*t), the ansatz

    g = P + sum n_i p_i'/p_i + (B/E)',   E = prod p_i^(e_i - 1),  deg B < deg E

is linear in the coefficients of P, B and the n_i and is solved exactly.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from utils.exceptions import NoHyperexponentialSolutionError, UnsupportedTowerError
from utils.logger import LoggerMixin, log_performance

from .algebra import as_rational, compact, normalize_content, solve_linear_system, split_by_symbols
from .fields import FieldElem, FieldTower, to_squared

INTEGER = "integer"
RATIONAL_RADICAL = "rational-radical"

TRIVIAL = "trivial"
ALGEBRAIC = "algebraic"
TRANSCENDENTAL = "transcendental"


@dataclass(frozen=True)
class HyperexpSolution:
    """
    Y = exp(exp_rate*x) * prod p^n * exp(residual)

    Attributes:
        tower: Tower of the input
        exp_rate: Constant a of the exp(a*x) factor
        factors: Irreducible polynomials in the generator with rational exponents
        residual: Rational function whose exponential is the last factor
        classification: integer or rational-radical
    """
    tower: FieldTower
    exp_rate: FieldElem
    factors: Tuple[Tuple[FieldElem, Fraction], ...]
    residual: FieldElem
    classification: str

    def log_derivative(self) -> FieldElem:
        total = self.exp_rate + self.residual.derive()
        for p, n in self.factors:
            total = total + p.derive() / p * n
        return total

    def rational_part(self) -> FieldElem:
        """prod p^n; only defined when every exponent is an integer"""
        if self.classification != INTEGER:
            raise NoHyperexponentialSolutionError("rational part needs integer exponents")
        result = self.tower.one
        for p, n in self.factors:
            result = result * p ** int(n)
        return result

    def assembled(self) -> str:
        pieces = []
        for p, n in self.factors:
            exponent = f"{n}" if n.denominator == 1 else f"({n})"
            pieces.append(f"({p.to_text()})^{exponent}")
        exponent = []
        if not self.exp_rate.is_zero:
            exponent.append(f"({self.exp_rate.to_text()})*x")
        if not self.residual.is_zero:
            exponent.append(f"({self.residual.to_text()})")
        if exponent:
            pieces.append(f"exp({' + '.join(exponent)})")
        return "*".join(pieces) or "1"

    def to_dict(self) -> Dict[str, object]:
        return {
            "exp_rate": self.exp_rate.to_text(),
            "factors": [[p.to_text(), str(n)] for p, n in self.factors],
            "residual": self.residual.to_text(),
            "classification": self.classification,
            "upsilon": self.assembled(),
        }


@dataclass(frozen=True)
class FundamentalSystem:
    plus: HyperexpSolution
    minus: HyperexpSolution
    verified: bool
    wronskian_nonzero: bool


@dataclass(frozen=True)
class SpecializedSolution:
    tau0: Fraction
    solution: HyperexpSolution
    verified: bool
    extension: str


def _tower_without(tower: FieldTower, name: str) -> FieldTower:
    return replace(tower, constants=tuple(c for c in tower.constants if c != name))


class HyperexponentialSolver(LoggerMixin):
    """Exact solver for first-order equations d(Y) = phi*Y"""

    @log_performance
    def solve(self, phi: FieldElem) -> HyperexpSolution:
        """
        Hyperexponential solution of d(Y) = phi*Y

        Raises:
            UnsupportedTowerError: phi lives in a Weierstrass tower
            NoHyperexponentialSolutionError: the ansatz has no solution or an
                exponent is not a rational number
        """
        tower = phi.tower
        if tower.kind == "weierstrass" or tower.relations:
            raise UnsupportedTowerError("hyperexponential solving needs a rational or exponential tower",
                                        tower_kind=tower.kind, stage="solve")
        ring = tower.field.ring
        t = ring.gens[0]
        t_name = tower.generators[0]
        exponential = tower.kind == "exponential"
        g = phi / (tower.symbol(t_name) * tower.rate) if exponential else phi
        numer, denom = g.value.numer, g.value.denom

        _, raw_factors = compact(denom).factor_list()
        factors: List[Tuple] = []
        for p, e in raw_factors:
            p = normalize_content(p.set_ring(ring))
            if p.degree(0) > 0:
                factors.append((p, e))
        if exponential and not any(p == t for p, _ in factors):
            factors.append((t, 1))
        self.logger.debug(f"Denominator factors: {[(str(p), e) for p, e in factors]}")

        square_free = ring.one
        hermite = ring.one
        for p, e in factors:
            square_free *= p
            hermite *= p ** (e - 1)
        full = square_free * hermite
        scaled = numer * full
        G, remainder = scaled.div(denom)
        if remainder:
            raise NoHyperexponentialSolutionError("denominator does not split into its factors", stage="solve")

        poly_degree = G.degree(0) - full.degree(0)
        hermite_degree = hermite.degree(0)
        columns: List = []
        for j in range(poly_degree + 1):
            columns.append(t ** j * full)
        for p, _ in factors:
            columns.append(p.diff(t) * full.quo(p))
        log_hermite = ring.zero
        for p, e in factors:
            if e > 1:
                log_hermite += (e - 1) * p.diff(t) * square_free.quo(p)
        for j in range(hermite_degree):
            b = t ** j
            columns.append(b.diff(t) * square_free - b * log_hermite)

        solution = self._solve_columns(columns, G, tower)
        if solution is None:
            raise NoHyperexponentialSolutionError(
                "no solution of the form exp(a x) * prod p^n * exp(R)",
                diagnostics=[str(p) for p, _ in factors], stage="solve")
        return self._assemble(tower, solution, factors, poly_degree, hermite, hermite_degree, exponential)

    def _solve_columns(self, columns, target, tower: FieldTower):
        field = tower.field
        t_name = tower.generators[0]
        split_columns = [split_by_symbols(c, (t_name,)) for c in columns]
        split_target = split_by_symbols(target, (t_name,))
        keys = sorted(set(split_target).union(*(c.keys() for c in split_columns)))
        one = field.ring.one
        rows = [[field.new(c.get(k, field.ring.zero), one) for c in split_columns] for k in keys]
        rhs = [field.new(split_target.get(k, field.ring.zero), one) for k in keys]
        solution = solve_linear_system(rows, rhs, field)
        return solution.particular

    def _assemble(self, tower, values, factors, poly_degree, hermite, hermite_degree, exponential) -> HyperexpSolution:
        ring = tower.field.ring
        t = ring.gens[0]
        index = 0
        poly_coeffs = [tower.element(values[index + j]) for j in range(poly_degree + 1)]
        index += max(poly_degree + 1, 0)
        exponents = [tower.element(values[index + i]) for i in range(len(factors))]
        index += len(factors)
        b_coeffs = [tower.element(values[index + j]) for j in range(hermite_degree)]

        t_elem = tower.symbol(tower.generators[0])
        residual = tower.zero
        for j, c in enumerate(b_coeffs):
            residual = residual + c * t_elem ** j
        if hermite_degree:
            residual = residual / tower.element(hermite)

        exp_rate = tower.zero
        for j, c in enumerate(poly_coeffs):
            if j == 0 and not exponential:
                exp_rate = c
            else:
                residual = residual + c * t_elem ** (j + 1) * Fraction(1, j + 1)

        kept: List[Tuple[FieldElem, Fraction]] = []
        classification = INTEGER
        for (p, _), n in zip(factors, exponents):
            if exponential and p == t:
                exp_rate = exp_rate + n * tower.rate
                continue
            if n.is_zero:
                continue
            value = as_rational(n.value)
            if value is None:
                raise NoHyperexponentialSolutionError(f"exponent {n} of {p} is not a rational number",
                                                      diagnostics=[str(p)], stage="solve")
            if value.denominator != 1:
                classification = RATIONAL_RADICAL
            kept.append((tower.element(p), value))
        solution = HyperexpSolution(tower, exp_rate, tuple(kept), residual, classification)
        self.logger.info(f"Solution {solution.assembled()} ({classification})")
        return solution

    def verify_solution(self, sol: HyperexpSolution, phi: FieldElem) -> bool:
        """Logarithmic derivative of the assembled solution equals phi"""
        return sol.log_derivative() == phi

    def fundamental_system(self, phi_plus: FieldElem, phi_minus: FieldElem) -> FundamentalSystem:
        """Solutions for both sheets and the nonvanishing of their Wronskian factor"""
        plus = self.solve(phi_plus)
        minus = self.solve(phi_minus)
        verified = self.verify_solution(plus, phi_plus) and self.verify_solution(minus, phi_minus)
        return FundamentalSystem(plus, minus, verified, not (phi_plus - phi_minus).is_zero)

    def specialize_solution(self, sol: HyperexpSolution, tau0: Union[int, Fraction],
                            phi0: Optional[FieldElem] = None) -> SpecializedSolution:
        """
        Solution at tau = tau0 and the kind of extension it generates over K

        Args:
            sol: Solution with tau among its constants
            tau0: Rational parameter value
            phi0: Specialized factor (checked against the log-derivative)
        """
        tau0 = Fraction(tau0)
        target = _tower_without(sol.tower, "tau")
        images = {"tau": tau0}
        exp_rate = sol.exp_rate.substitute(images, target)
        factors = []
        for p, n in sol.factors:
            p0 = p.substitute(images, target)
            if p0.is_zero:
                raise NoHyperexponentialSolutionError(f"factor {p} vanishes at tau = {tau0}", stage="specialize")
            factors.append((p0, n))
        residual = sol.residual.substitute(images, target)
        classification = INTEGER if all(n.denominator == 1 for _, n in factors) else RATIONAL_RADICAL
        specialized = HyperexpSolution(target, exp_rate, tuple(factors), residual, classification)

        verified = True
        if phi0 is not None:
            if phi0.tower.generators != target.generators:
                phi0 = to_squared(phi0)
            verified = specialized.log_derivative() == target.lift(phi0)
        return SpecializedSolution(tau0, specialized, verified, self._extension(specialized))

    def _extension(self, sol: HyperexpSolution) -> str:
        if not sol.residual.is_constant:
            return TRANSCENDENTAL
        rate = as_rational(sol.exp_rate.value)
        if rate is None:
            return TRANSCENDENTAL
        kind = TRIVIAL
        if sol.tower.kind == "rational":
            if rate != 0:
                return TRANSCENDENTAL
        elif rate.denominator != 1:
            kind = ALGEBRAIC
        if sol.classification == RATIONAL_RADICAL:
            kind = ALGEBRAIC
        return kind


def hyperexponential_solve(phi: FieldElem) -> HyperexpSolution:
    return HyperexponentialSolver().solve(phi)


def verify_solution(sol: HyperexpSolution, phi: FieldElem) -> bool:
    return HyperexponentialSolver().verify_solution(sol, phi)


def fundamental_system(phi_plus: FieldElem, phi_minus: FieldElem) -> FundamentalSystem:
    return HyperexponentialSolver().fundamental_system(phi_plus, phi_minus)


def specialize_solution(sol: HyperexpSolution, tau0: Union[int, Fraction],
                        phi0: Optional[FieldElem] = None) -> SpecializedSolution:
    return HyperexponentialSolver().specialize_solution(sol, tau0, phi0)

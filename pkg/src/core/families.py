"""
Built-in potential families and their reference tables

Each preset carries the potential u_s, the tower it lives in and the known
values of the pipeline stages as canonical text, so the test suite and the
verify command read the same fixtures. Table entries are parsed on demand in
the tower of the stage they belong to.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from utils.exceptions import ValidationError

from .expressions import parse_expression
from .fields import FieldElem, FieldTower, Number, exponential_tower, make_tower
from .spectral import Potential

RATIONAL = "rational"
ROSEN_MORSE = "rosen-morse"
ELLIPTIC = "elliptic"
CUSTOM = "custom"

FAMILY_NAMES = (RATIONAL, ROSEN_MORSE, ELLIPTIC)


@dataclass(frozen=True)
class FamilyPreset:
    """
    A family u_s of potentials with reference values

    Attributes:
        name: Family identifier used on the command line
        tower_kind: rational, exponential or weierstrass
        template: Potential text with {k} standing for s(s+1)
        levels: s -> constants c^s
        curves: s -> f_s in lambda, mu
        factors: s -> phi_plus in the potential tower extended by lambda, mu
        parametrizations: s -> (chi1, chi2) in tau
        one_parameter: s -> phi~ in the parametrized tower
        solutions: s -> (rational part of Upsilon, exponential rate)
        notes: s -> warning attached to results of that level
    """
    name: str
    tower_kind: str
    template: str
    levels: Mapping[int, Tuple[str, ...]]
    curves: Mapping[int, str]
    factors: Mapping[int, str] = field(default_factory=dict)
    parametrizations: Mapping[int, Tuple[str, str]] = field(default_factory=dict)
    one_parameter: Mapping[int, str] = field(default_factory=dict)
    solutions: Mapping[int, Tuple[str, str]] = field(default_factory=dict)
    notes: Mapping[int, str] = field(default_factory=dict)

    @property
    def max_s(self) -> int:
        return max(self.levels)

    def potential_text(self, s: int) -> str:
        if s < 1:
            raise ValidationError(f"family index s must be positive, got {s}", field_name="s", field_value=s)
        return self.template.format(k=s * (s + 1))

    def tower(self, g2: Optional[Number] = None, g3: Optional[Number] = None) -> FieldTower:
        return make_tower(self.tower_kind, g2=g2, g3=g3)

    def potential(self, s: int, g2: Optional[Number] = None, g3: Optional[Number] = None) -> Potential:
        tower = self.tower(g2, g3)
        text = self.potential_text(s)
        return Potential(tower, parse_expression(text, tower), label=f"{self.name} s={s}: u = {text}")

    # Reference values as elements

    def expected_levels(self, s: int, tower: FieldTower) -> Tuple[FieldElem, ...]:
        return tuple(parse_expression(c, tower) for c in self.levels[s])

    def expected_curve(self, s: int, op_tower: FieldTower) -> FieldElem:
        return parse_expression(self.curves[s], op_tower)

    def expected_factor(self, s: int, op_tower: FieldTower) -> FieldElem:
        return parse_expression(self.factors[s], op_tower)

    def expected_parametrization(self, s: int, tower: FieldTower) -> Tuple[FieldElem, FieldElem]:
        chi1, chi2 = self.parametrizations[s]
        return parse_expression(chi1, tower), parse_expression(chi2, tower)

    def expected_one_parameter(self, s: int, tower: FieldTower) -> FieldElem:
        return parse_expression(self.one_parameter[s], tower)

    def expected_solution(self, s: int, tower: FieldTower) -> Tuple[FieldElem, FieldElem]:
        rational_part, rate = self.solutions[s]
        return parse_expression(rational_part, tower), parse_expression(rate, tower)


def _w_polynomial(coefficients: Tuple[str, ...]) -> str:
    """Polynomial in w from coefficient texts, highest power first"""
    degree = len(coefficients) - 1
    return " + ".join(f"({c})*w^{degree - k}" for k, c in enumerate(coefficients))


def _w_quotient(numerator: Tuple[str, ...], denominator: Tuple[str, ...]) -> str:
    return f"({_w_polynomial(numerator)})/(({_w_polynomial(denominator)})*(w + 1))"


# Rosen-Morse phi~_s = (sum a_k w^k)/((sum b_k w^k)(w + 1)) in w = exp(2x), coefficients in tau
ROSEN_MORSE_ONE_PARAMETER_ROWS: Dict[int, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    2: (("-tau^3 - 3*tau^2 - 2*tau",
         "-3*tau^3 - 3*tau^2 + 18*tau + 24",
         "-3*tau^3 + 3*tau^2 + 18*tau - 24",
         "-tau^3 + 3*tau^2 - 2*tau"),
        ("tau^2 + 3*tau + 2",
         "2*tau^2 - 8",
         "tau^2 - 3*tau + 2")),
    3: (("tau^4 - 6*tau^3 + 11*tau^2 - 6*tau",
         "4*tau^4 - 12*tau^3 - 40*tau^2 + 168*tau - 144",
         "6*tau^4 - 102*tau^2 + 432",
         "4*tau^4 + 12*tau^3 - 40*tau^2 - 168*tau - 144",
         "tau^4 + 6*tau^3 + 11*tau^2 + 6*tau"),
        ("tau^3 - 6*tau^2 + 11*tau - 6",
         "3*tau^3 - 6*tau^2 - 27*tau + 54",
         "3*tau^3 + 6*tau^2 - 27*tau - 54",
         "tau^3 + 6*tau^2 + 11*tau + 6")),
}

RATIONAL_FAMILY = FamilyPreset(
    name=RATIONAL,
    tower_kind="rational",
    template="{k}/x^2",
    levels={s: ("0",) * s for s in range(1, 5)},
    curves={s: f"-mu^2 - lambda^{2 * s + 1}" for s in range(1, 5)},
    factors={
        1: "(mu*x^3 - 1)/(x*(lambda*x^2 + 1))",
        2: "-(-mu*x^5 + 3*lambda*x^2 + 18)/(x*(lambda^2*x^4 + 3*lambda*x^2 + 9))",
        3: "-(-mu*x^7 + 6*lambda^2*x^4 + 90*lambda*x^2 + 675)"
           "/(x*(lambda^3*x^6 + 6*lambda^2*x^4 + 45*lambda*x^2 + 225))",
        4: "-(-mu*x^9 + 10*lambda^3*x^6 + 270*lambda^2*x^4 + 4725*lambda*x^2 + 44100)"
           "/(x*(lambda^4*x^8 + 10*lambda^3*x^6 + 135*lambda^2*x^4 + 1575*lambda*x^2 + 11025))",
    },
    parametrizations={s: ("-tau^2", f"-tau^{2 * s + 1}") for s in range(1, 5)},
    one_parameter={
        1: "-(tau^3*x^3 + 1)/(x*(-tau^2*x^2 + 1))",
        2: "-(tau^5*x^5 - 3*tau^2*x^2 + 18)/(x*(tau^4*x^4 - 3*tau^2*x^2 + 9))",
        3: "-(tau^7*x^7 + 6*tau^4*x^4 - 90*tau^2*x^2 + 675)"
           "/(x*(-tau^6*x^6 + 6*tau^4*x^4 - 45*tau^2*x^2 + 225))",
        4: "-(tau^9*x^9 - 10*tau^6*x^6 + 270*tau^4*x^4 - 4725*tau^2*x^2 + 44100)"
           "/(x*(tau^8*x^8 - 10*tau^6*x^6 + 135*tau^4*x^4 - 1575*tau^2*x^2 + 11025))",
    },
    solutions={
        1: ("(x*tau - 1)/x", "tau"),
        2: ("(tau^2*x^2 + 3*x*tau + 3)/x^2", "-tau"),
        3: ("(tau^3*x^3 - 6*tau^2*x^2 + 15*x*tau - 15)/x^3", "tau"),
        4: ("(tau^4*x^4 + 10*tau^3*x^3 + 45*tau^2*x^2 + 105*x*tau + 105)/x^4", "-tau"),
    },
)

ROSEN_MORSE_FAMILY = FamilyPreset(
    name=ROSEN_MORSE,
    tower_kind="exponential",
    template="-{k}/cosh(x)^2",
    levels={1: ("1",), 2: ("5", "4"), 3: ("14", "49", "36")},
    curves={
        1: "-mu^2 - lambda*(lambda + 1)^2",
        2: "-mu^2 - lambda*(lambda + 1)^2*(lambda + 4)^2",
        3: "-mu^2 - lambda*(lambda + 1)^2*(lambda + 4)^2*(lambda + 9)^2",
    },
    factors={
        1: "(mu*cosh(x)^3 + sinh(x))/(cosh(x)*(lambda*cosh(x)^2 + cosh(x)^2 - 1))",
        2: "(mu*cosh(x)^5 + 3*cosh(x)^2*sinh(x)*lambda + 12*sinh(x)*cosh(x)^2 - 18*sinh(x))"
           "/((cosh(x)^4*lambda^2 + 5*cosh(x)^4*lambda + 4*cosh(x)^4 - 3*lambda*cosh(x)^2"
           " - 12*cosh(x)^2 + 9)*cosh(x))",
        3: "(mu*cosh(x)^7 + 6*(lambda + 4)*(lambda + 9)*sinh(x)*cosh(x)^4 - 90*(lambda + 9)*sinh(x)*cosh(x)^2"
           " + 675*sinh(x))/(cosh(x)*((lambda + 1)*(lambda + 4)*(lambda + 9)*cosh(x)^6"
           " - 6*(lambda + 4)*(lambda + 9)*cosh(x)^4 + 45*(lambda + 9)*cosh(x)^2 - 225))",
    },
    parametrizations={
        1: ("-tau^2", "-tau*(tau^2 - 1)"),
        2: ("-tau^2", "-tau*(tau^2 - 1)*(tau^2 - 4)"),
        3: ("-tau^2", "-tau*(tau^2 - 1)*(tau^2 - 4)*(tau^2 - 9)"),
    },
    one_parameter={
        1: "((tau^2 - tau)*w^2 + (2*tau^2 - 4)*w + tau^2 + tau)/(((tau - 1)*w + tau + 1)*(w + 1))",
        **{s: _w_quotient(*rows) for s, rows in ROSEN_MORSE_ONE_PARAMETER_ROWS.items()},
    },
    solutions={
        1: ("((tau - 1)*w + tau + 1)/(w + 1)", "tau"),
        2: ("((tau^2 + 3*tau + 2)*w^2 + (2*tau^2 - 8)*w + tau^2 - 3*tau + 2)/(w + 1)^2", "-tau"),
        3: ("((tau^3 - 6*tau^2 + 11*tau - 6)*w^3 + (3*tau^3 - 6*tau^2 - 27*tau + 54)*w^2"
            " + (3*tau^3 + 6*tau^2 - 27*tau - 54)*w + tau^3 + 6*tau^2 + 11*tau + 6)/(w + 1)^3", "tau"),
    },
)

ELLIPTIC_FAMILY = FamilyPreset(
    name=ELLIPTIC,
    tower_kind="weierstrass",
    template="{k}*wp",
    levels={1: ("0",), 2: ("0", "-21/8*g2"), 3: ("0", "-63/4*g2", "-297/4*g3")},
    curves={
        1: "-mu^2 - lambda^3 + 1/4*g2*lambda - 1/4*g3",
        2: "-mu^2 - 1/4*(-lambda^2 + 3*g2)*(-4*lambda^3 + 9*g2*lambda + 27*g3)",
        3: "-mu^2 + 1/16*lambda*(-16*lambda^6 + 504*g2*lambda^4 + 2376*g3*lambda^3"
           " - 4185*g2^2*lambda^2 + 3375*g2^3 - 36450*g2*g3*lambda - 91125*g3^2)",
    },
    factors={
        1: "(mu + 1/2*dwp)/(lambda + wp)",
        2: "(mu + 3/2*dwp*lambda + 9*wp*dwp)/(lambda^2 + 3*wp*lambda + 9*wp^2 - 9/4*g2)",
        3: "(mu + dwp*(3*lambda^2 + 45*wp*lambda + 675/2*wp^2 - 225/8*g2))"
           "/(lambda^3 + 6*wp*lambda^2 + (45*wp^2 - 15*g2)*lambda + 225/4*dwp^2)",
    },
    parametrizations={1: ("-wp_tau", "1/2*dwp_tau")},
    one_parameter={1: "1/2*(dwp + dwp_tau)/(wp - wp_tau)"},
    notes={2: "the constant c2 = -21/8*g2 solves KdV_2 = 0; a table printing +21/8*g2 has the wrong sign"},
)

FAMILIES: Dict[str, FamilyPreset] = {
    preset.name: preset for preset in (RATIONAL_FAMILY, ROSEN_MORSE_FAMILY, ELLIPTIC_FAMILY)
}

# Invariants whose s = 1 curve mu^2 = 1 - lambda^3 has the points (1, 0), (0, +-1), (-2, +-3)
NUMERIC_LATTICE = (Fraction(0), Fraction(-4))


def get_family(name: str) -> FamilyPreset:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown family '{name}', expected one of {', '.join(FAMILY_NAMES)}",
                              field_name="family", field_value=name) from None


def solution_tower(constants: Tuple[str, ...] = ("tau",)) -> FieldTower:
    """Tower w = exp(2x) of the Rosen-Morse one-parameter tables"""
    return exponential_tower(constants, rate=2)

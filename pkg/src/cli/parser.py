"""
Command-line arguments and job descriptions for kdvfactor
"""

import argparse
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence

from core.expressions import parse_expression
from core.families import CUSTOM, FAMILY_NAMES
from core.fields import FieldElem, FieldTower
from utils.config import Config
from utils.exceptions import ValidationError

COMMANDS = ("hierarchy", "level", "curve", "factor", "parametrize", "solve", "specialize", "verify")
TOWER_KINDS = ("rational", "exponential", "weierstrass")
FORMATS = ("text", "json")


def parse_potential(text: str, tower: FieldTower) -> FieldElem:
    """
    Read a potential in the canonical grammar

    Raises:
        ExpressionSyntaxError: malformed text, with the offending position
        UnknownSymbolError: a name that is not a symbol of the tower
    """
    return parse_expression(text, tower)


def parse_rational(text: str, name: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"--{name} expects a rational number such as -3/4, got '{text}'",
                              field_name=name, field_value=text) from None


@dataclass(frozen=True)
class JobSpec:
    """One command with its potential source, assignments and options"""
    command: str
    family: str = CUSTOM
    s: Optional[int] = None
    potential: Optional[str] = None
    tower: Optional[str] = None
    g2: Optional[Fraction] = None
    g3: Optional[Fraction] = None
    lambda0: Optional[Fraction] = None
    mu0: Optional[Fraction] = None
    tau0: Optional[Fraction] = None
    n: int = 2
    sign: int = -1
    s_max: int = 8
    determinant: str = "bareiss"
    output_format: str = "text"
    indent: int = 2
    parallel: bool = False
    max_workers: int = 4

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Check the job for consistency

        Raises:
            ValidationError: the first problem found
        """
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command '{self.command}'", field_name="command",
                                  field_value=self.command)
        if self.family != CUSTOM and self.family not in FAMILY_NAMES:
            raise ValidationError(f"unknown family '{self.family}'", field_name="family", field_value=self.family)
        if self.command == "hierarchy":
            if self.n < 0:
                raise ValidationError("--n must be non-negative", field_name="n", field_value=self.n)
            return
        has_family = self.family != CUSTOM
        has_expression = self.potential is not None
        if has_family == has_expression:
            raise ValidationError("give exactly one potential source: --family with --s, or --potential with --tower",
                                  field_name="potential")
        if has_family and (self.s is None or self.s < 1):
            raise ValidationError("--family needs a positive --s", field_name="s", field_value=self.s)
        if has_expression and self.tower not in TOWER_KINDS:
            raise ValidationError(f"--potential needs --tower in {', '.join(TOWER_KINDS)}",
                                  field_name="tower", field_value=self.tower)
        kind = self.tower_kind
        if (self.g2 is not None or self.g3 is not None) and kind != "weierstrass":
            raise ValidationError("--g2 and --g3 only apply to the weierstrass tower", field_name="g2")
        if (self.lambda0 is None) != (self.mu0 is None):
            raise ValidationError("--lambda0 and --mu0 go together", field_name="lambda0")
        if self.lambda0 is not None and self.command != "specialize":
            raise ValidationError("--lambda0/--mu0 only apply to specialize", field_name="lambda0")
        if self.tau0 is not None and self.command not in ("solve", "specialize"):
            raise ValidationError("--tau0 only applies to solve and specialize", field_name="tau0")
        if self.command == "specialize" and self.lambda0 is None and self.tau0 is None:
            raise ValidationError("specialize needs --lambda0/--mu0 or --tau0", field_name="lambda0")
        if self.sign not in (1, -1):
            raise ValidationError("sign must be 1 or -1", field_name="sign", field_value=self.sign)
        if self.output_format not in FORMATS:
            raise ValidationError(f"unknown format '{self.output_format}'", field_name="format",
                                  field_value=self.output_format)

    @property
    def tower_kind(self) -> Optional[str]:
        if self.family == "rational":
            return "rational"
        if self.family == "rosen-morse":
            return "exponential"
        if self.family == "elliptic":
            return "weierstrass"
        return self.tower

    def echo(self) -> Dict[str, Any]:
        """Input fields of the job, rationals as text"""
        fields = asdict(self)
        for key in ("output_format", "indent", "parallel", "max_workers"):
            fields.pop(key)
        return {key: str(value) if isinstance(value, Fraction) else value
                for key, value in fields.items() if value is not None}


def build_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvfactor",
        description="Spectral curves, factorizations and closed-form solutions for stationary KdV potentials")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILY_NAMES, help="built-in potential family")
    common.add_argument("--s", type=int, help="index of the family member")
    common.add_argument("--potential", help="potential expression, e.g. '-2/cosh(x)^2'")
    common.add_argument("--tower", choices=TOWER_KINDS, help="differential field of --potential")
    common.add_argument("--g2", help="numeric Weierstrass invariant g2 (symbolic when omitted)")
    common.add_argument("--g3", help="numeric Weierstrass invariant g3 (symbolic when omitted)")
    common.add_argument("--s-max", type=int, dest="s_max", help="largest KdV level searched")
    common.add_argument("--format", choices=FORMATS, dest="output_format", help="output format")
    common.add_argument("--config", help="configuration file (default ~/.kdvfactor/config.json)")
    common.add_argument("--log-level", dest="log_level",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"), help="logging level")

    commands = parser.add_subparsers(dest="command", required=True)
    hierarchy = commands.add_parser("hierarchy", parents=[common], help="kdv_n, v_n and P_(2n+1)")
    hierarchy.add_argument("--n", type=int, default=2, help="largest index printed")
    commands.add_parser("level", parents=[common], help="KdV level and constants")
    commands.add_parser("curve", parents=[common], help="spectral curve")
    commands.add_parser("factor", parents=[common], help="right factor of L - lambda on the curve")
    parametrize = commands.add_parser("parametrize", parents=[common], help="global parametrization")
    solve = commands.add_parser("solve", parents=[common], help="hyperexponential solutions")
    specialize = commands.add_parser("specialize", parents=[common], help="factor at a point of the curve")
    commands.add_parser("verify", parents=[common], help="run the invariant suite")
    for sub in (parametrize, solve, specialize):
        sub.add_argument("--opposite-sheet", action="store_true", dest="opposite_sheet",
                         help="use the parametrization with the other sign of mu")
    for sub in (solve, specialize):
        sub.add_argument("--tau0", help="rational parameter value")
    specialize.add_argument("--lambda0", help="lambda coordinate of the point")
    specialize.add_argument("--mu0", help="mu coordinate of the point")
    return parser


def job_from_args(args: argparse.Namespace, config: Config) -> JobSpec:
    """Merge parsed arguments over the configuration defaults"""
    def rational(name: str) -> Optional[Fraction]:
        value = getattr(args, name, None)
        return None if value is None else parse_rational(value, name)

    verify = config.get_verify_settings()
    sign = config.get_sign()
    if getattr(args, "opposite_sheet", False):
        sign = -sign
    return JobSpec(
        command=args.command,
        family=args.family or CUSTOM,
        s=args.s,
        potential=args.potential,
        tower=args.tower,
        g2=rational("g2"),
        g3=rational("g3"),
        lambda0=rational("lambda0"),
        mu0=rational("mu0"),
        tau0=rational("tau0"),
        n=getattr(args, "n", 2),
        sign=sign,
        s_max=args.s_max or config.get_s_max(),
        determinant=config.get("engine.determinant", "bareiss"),
        output_format=args.output_format or config.get("output.format", "text"),
        indent=config.get("output.indent", 2),
        parallel=bool(verify.get("parallel", False)),
        max_workers=int(verify.get("max_workers", 4)),
    )


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_argument_parser().parse_args(argv)

"""
Command execution for kdvfactor

A Pipeline computes the stages of one job (level, curve, factor,
parametrization, solutions) once and caches them. Commands are lists of
stage reporters; each reporter writes canonical text into the ResultDoc and
registers named checks, which are evaluated together at the end, optionally
on a thread pool, and reported sorted by name.
"""

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from core.families import FamilyPreset, get_family
from core.fields import FieldElem, FieldTower, make_tower
from core.hierarchy import KdvHierarchy, default_hierarchy
from core.hyperexp import FundamentalSystem, HyperexponentialSolver
from core.parametrize import CurveParametrizer, Parametrization
from core.spectral import CurvePoly, Factorization, LevelResult, Potential, SpectralEngine
from utils.exceptions import UnsupportedTowerError, ValidationError, handle_and_log_exception
from utils.logger import LoggerMixin

from .parser import JobSpec, parse_potential

# Parameter used by verify for specializations through the parametrization
VERIFY_TAU0 = Fraction(5)

Check = Callable[[], bool]


@dataclass
class ResultDoc:
    """Report of one job: {input, stages, checks, warnings, timings}"""
    input: Dict[str, Any]
    stages: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings.append(message)

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        result = {"input": self.input, "stages": self.stages, "checks": dict(sorted(self.checks.items())),
                  "warnings": list(self.warnings)}
        if include_timings:
            result["timings"] = self.timings
        return result

    def to_json(self, indent: Optional[int] = 2, include_timings: bool = True) -> str:
        return json.dumps(self.to_dict(include_timings), indent=indent, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ResultDoc":
        """Rebuild a document from the mapping to_dict produces"""
        if not isinstance(data, dict) or not isinstance(data.get("input"), dict):
            raise ValidationError("result document needs an 'input' mapping", field_name="input")
        unknown = set(data) - {"input", "stages", "checks", "warnings", "timings"}
        if unknown:
            raise ValidationError(f"unknown result keys: {', '.join(sorted(unknown))}",
                                  field_name="result", field_value=sorted(unknown))
        return cls(input=dict(data["input"]),
                   stages=dict(data.get("stages", {})),
                   checks={name: bool(ok) for name, ok in data.get("checks", {}).items()},
                   warnings=list(data.get("warnings", [])),
                   timings={name: float(t) for name, t in data.get("timings", {}).items()})

    @classmethod
    def from_json(cls, text: str) -> "ResultDoc":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"result document is not valid JSON: {e.msg}", field_name="result",
                                  original_error=e) from e
        return cls.from_dict(data)

    def to_text(self) -> str:
        lines = [f"{key}: {value}" for key, value in sorted(self.input.items())]
        for stage, values in self.stages.items():
            lines.append(f"[{stage}]")
            lines.extend(_text_lines(values, "  "))
        if self.checks:
            lines.append("[checks]")
            lines.extend(f"  {name}: {'PASS' if ok else 'FAIL'}" for name, ok in sorted(self.checks.items()))
        for warning in self.warnings:
            lines.append(f"warning: {warning}")
        return "\n".join(lines)


def _text_lines(value: Any, indent: str) -> List[str]:
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)):
                lines.append(f"{indent}{key}:")
                lines.extend(_text_lines(item, indent + "  "))
            else:
                lines.append(f"{indent}{key}: {item}")
        return lines
    if isinstance(value, list):
        return [line for item in value for line in _text_lines(item, indent)] \
            if any(isinstance(item, (dict, list)) for item in value) \
            else [f"{indent}{item}" for item in value]
    return [f"{indent}{value}"]


class Pipeline(LoggerMixin):
    """Cached stages of one job"""

    def __init__(self, job: JobSpec, hierarchy: Optional[KdvHierarchy] = None):
        self.job = job
        self.hierarchy = hierarchy or default_hierarchy()
        self.engine = SpectralEngine(self.hierarchy, s_max=job.s_max, determinant=job.determinant)
        self.parametrizer = CurveParametrizer(job.sign)
        self.solver = HyperexponentialSolver()
        self.timings: Dict[str, float] = {}
        self._cache: Dict[str, Any] = {}
        self._lock = threading.RLock()

    def _stage(self, name: str, compute: Callable[[], Any]) -> Any:
        with self._lock:
            if name not in self._cache:
                self.logger.debug(f"Computing stage {name}")
                start = time.perf_counter()
                self._cache[name] = compute()
                self.timings[name] = round(time.perf_counter() - start, 6)
            return self._cache[name]

    @property
    def preset(self) -> Optional[FamilyPreset]:
        return get_family(self.job.family) if self.job.family != "custom" else None

    @property
    def moduli(self) -> Dict[str, Fraction]:
        return {name: value for name, value in (("g2", self.job.g2), ("g3", self.job.g3)) if value is not None}

    def reference(self, parse: Callable[[FieldTower], Any], symbolic: FieldTower, target: FieldTower) -> Any:
        """Table value parsed with symbolic invariants, then moved into target"""
        value = parse(symbolic)
        if symbolic == target:
            return value
        move = lambda e: e.substitute(self.moduli, target=target)
        return tuple(move(e) for e in value) if isinstance(value, tuple) else move(value)

    def potential(self) -> Potential:
        def compute():
            job = self.job
            if self.preset is not None:
                return self.preset.potential(job.s, job.g2, job.g3)
            tower = make_tower(job.tower, g2=job.g2, g3=job.g3)
            return Potential(tower, parse_potential(job.potential, tower), label=job.potential)
        return self._stage("potential", compute)

    def level(self) -> LevelResult:
        return self._stage("level", lambda: self.engine.kdv_level(self.potential()))

    def curve(self) -> CurvePoly:
        return self._stage("curve", lambda: self.engine.spectral_curve(self.potential(), self.level()))

    def factor(self) -> Factorization:
        return self._stage("factor", lambda: self.engine.factor_on_curve(self.potential(), self.level(),
                                                                          self.curve()))

    def parametrization(self) -> Parametrization:
        return self._stage("parametrization", lambda: self.parametrizer.parametrize_curve(self.curve()))

    def one_parameter(self) -> Tuple[FieldElem, FieldElem]:
        def compute():
            par = self.parametrization()
            factor = self.factor()
            return (self.parametrizer.substitute_param(factor.phi_plus, par),
                    self.parametrizer.substitute_param(factor.phi_minus, par))
        return self._stage("one_parameter", compute)

    def solutions(self) -> FundamentalSystem:
        return self._stage("solutions", lambda: self.solver.fundamental_system(*self.one_parameter()))

    def point(self, tau0: Optional[Fraction] = None) -> Tuple[FieldElem, FieldElem]:
        """Point of the curve from --lambda0/--mu0 or from the parametrization at tau0"""
        job = self.job
        base = self.potential().tower
        if tau0 is None and job.lambda0 is not None:
            return base.element(job.lambda0), base.element(job.mu0)
        return self.parametrizer.curve_point(self.parametrization(), tau0 if tau0 is not None else job.tau0, base)


# Stage reporters

def _report_hierarchy(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    hierarchy = pipe.hierarchy
    n_max = pipe.job.n
    doc.stages["hierarchy"] = {
        "kdv": [hierarchy.kdv(n).to_text() for n in range(n_max + 1)],
        "v": [hierarchy.v(n).to_text() for n in range(n_max + 1)],
        "p": [hierarchy.p_odd(n).to_text() for n in range(n_max + 1)],
    }
    for n in range(n_max + 1):
        checks[f"lax_identity_{n}"] = lambda n=n: hierarchy.lax_check(n)
        checks[f"lax_identity_extended_{n}"] = lambda n=n: hierarchy.lax_check(n, extended=True)
        checks[f"weight_homogeneous_{n}"] = lambda n=n: hierarchy.is_weight_homogeneous(n)


def _report_level(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    pot, level = pipe.potential(), pipe.level()
    doc.stages["potential"] = {"tower": str(pot.tower), "u": pot.u.to_text()}
    doc.stages["level"] = {"s": level.s, "constants": [c.to_text() for c in level.cbar]}
    checks["centralizer"] = lambda: pipe.engine.centralizer_check(pot, level)
    preset = pipe.preset
    if preset is None:
        return
    checks["level_matches_family"] = lambda: level.s == pipe.job.s
    if level.s in preset.notes:
        doc.warn(preset.notes[level.s])
    if level.s in preset.levels:
        checks["level_matches_table"] = lambda: pipe.reference(
            lambda t: preset.expected_levels(level.s, t), preset.tower(), pot.tower) == level.cbar


def _report_curve(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    _report_level(pipe, doc, checks)
    pot, curve = pipe.potential(), pipe.curve()
    doc.stages["curve"] = {"f": curve.f.to_text(), "R": curve.R.to_text(),
                           "genus": pipe.parametrizer.genus(curve)}
    checks["curve_constant"] = lambda: curve.f.derive().is_zero
    preset = pipe.preset
    if preset is not None and curve.s in preset.curves:
        symbolic = preset.tower().with_constants("lambda", "mu")
        checks["curve_matches_table"] = lambda: pipe.reference(
            lambda t: preset.expected_curve(curve.s, t), symbolic, pot.op_tower) == curve.f


def _report_factor(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    _report_curve(pipe, doc, checks)
    pot, curve, factor = pipe.potential(), pipe.curve(), pipe.factor()
    doc.stages["factor"] = {
        "phi_plus": factor.phi_plus.to_text(),
        "phi_minus": factor.phi_minus.to_text(),
        "alpha": factor.alpha.to_text(),
        "phi2": factor.phi2.to_text(),
    }
    engine = pipe.engine
    checks["riccati_plus"] = lambda: engine.riccati_check(factor.phi_plus, pot, curve)
    checks["riccati_minus"] = lambda: engine.riccati_check(factor.phi_minus, pot, curve)
    for name in ("phi_difference", "phi_sum", "phi2_fundamental_equation"):
        checks[name] = lambda name=name: engine.solution_identities(factor, curve, pot)[name]
    preset = pipe.preset
    if preset is not None and curve.s in preset.factors:
        symbolic = preset.tower().with_constants("lambda", "mu")
        checks["factor_matches_table"] = lambda: curve.element(pipe.reference(
            lambda t: preset.expected_factor(curve.s, t), symbolic, pot.op_tower)) == factor.phi_plus


def _report_parametrization(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    _report_factor(pipe, doc, checks)
    pot, curve = pipe.potential(), pipe.curve()
    par = pipe.parametrization()
    phi_plus, phi_minus = pipe.one_parameter()
    doc.stages["parametrization"] = dict(par.to_dict(), phi_tilde_plus=phi_plus.to_text(),
                                         phi_tilde_minus=phi_minus.to_text())
    parametrizer = pipe.parametrizer
    checks["parametrization_identity"] = lambda: parametrizer.check_identity(curve, par)
    checks["riccati_param"] = lambda: parametrizer.riccati_check_param(phi_plus, pot, par)
    checks["factorization_param"] = lambda: parametrizer.factorization_check_param(phi_plus, pot, par)
    preset = pipe.preset
    if preset is None or pipe.moduli:
        return
    if curve.s in preset.parametrizations and par.sign == -1:
        checks["parametrization_matches_table"] = \
            lambda: preset.expected_parametrization(curve.s, par.tower) == (par.chi1, par.chi2)
    if curve.s in preset.one_parameter and par.sign == -1:
        checks["one_parameter_matches_table"] = \
            lambda: preset.expected_one_parameter(curve.s, phi_plus.tower) == phi_plus


def _report_solution(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    _report_parametrization(pipe, doc, checks)
    system = pipe.solutions()
    phi_plus, phi_minus = pipe.one_parameter()
    doc.stages["solution"] = {"plus": system.plus.to_dict(), "minus": system.minus.to_dict()}
    solver = pipe.solver
    checks["solution_plus_verified"] = lambda: solver.verify_solution(system.plus, phi_plus)
    checks["solution_minus_verified"] = lambda: solver.verify_solution(system.minus, phi_minus)
    checks["wronskian_nonzero"] = lambda: system.wronskian_nonzero
    preset = pipe.preset
    s = pipe.curve().s
    if preset is not None and s in preset.solutions and pipe.job.sign == -1:
        def matches() -> bool:
            rational_part, rate = preset.expected_solution(s, system.plus.tower)
            ratio = system.plus.rational_part() / rational_part
            return ratio.is_constant and system.plus.exp_rate == rate
        checks["solution_matches_table"] = matches
    if pipe.job.tau0 is not None and pipe.job.command == "solve":
        _report_specialized_solution(pipe, doc, checks, pipe.job.tau0)


def _report_specialized_solution(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check],
                                 tau0: Fraction) -> None:
    pot, level, curve, factor = pipe.potential(), pipe.level(), pipe.curve(), pipe.factor()
    lambda0, mu0 = pipe.point(tau0)
    point = pipe.engine.specialize_at_point(pot, level, curve, factor, lambda0, mu0)
    specialized = pipe.solver.specialize_solution(pipe.solutions().plus, tau0, point.phi0)
    doc.stages["specialized_solution"] = dict(specialized.solution.to_dict(), tau0=str(tau0),
                                              lambda0=lambda0.to_text(), mu0=mu0.to_text(),
                                              extension=specialized.extension)
    checks["specialized_solution_verified"] = lambda: specialized.verified
    if point.singular:
        doc.warn(f"tau0 = {tau0} gives a point with mu0 = 0")


def _report_specialization(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check],
                           point: Optional[Tuple[Any, Any]] = None, tag: str = "") -> None:
    pot, level, curve, factor = pipe.potential(), pipe.level(), pipe.curve(), pipe.factor()
    lambda0, mu0 = point if point is not None else pipe.point()
    result = pipe.engine.specialize_at_point(pot, level, curve, factor, lambda0, mu0)
    doc.stages[f"specialization{tag}"] = {
        "lambda0": result.lambda0.to_text(),
        "mu0": result.mu0.to_text(),
        "phi0": result.phi0.to_text(),
        "singular": result.singular,
    }
    checks[f"specialization{tag}_factorization"] = lambda: result.factorization_verified
    checks[f"specialization{tag}_common_factor"] = lambda: result.common_factor_verified
    if result.singular:
        doc.warn(f"({result.lambda0}, {result.mu0}) is a point with mu0 = 0")


def _command_specialize(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    _report_factor(pipe, doc, checks)
    _report_specialization(pipe, doc, checks)
    if pipe.job.tau0 is not None and pipe.potential().tower.kind != "weierstrass":
        _report_specialized_solution(pipe, doc, checks, pipe.job.tau0)


def _command_verify(pipe: Pipeline, doc: ResultDoc, checks: Dict[str, Check]) -> None:
    _report_factor(pipe, doc, checks)
    level, curve = pipe.level(), pipe.curve()
    hierarchy = pipe.hierarchy
    for n in range(level.s + 1):
        checks[f"lax_identity_{n}"] = lambda n=n: hierarchy.lax_check(n)
        checks[f"lax_identity_extended_{n}"] = lambda n=n: hierarchy.lax_check(n, extended=True)
    if level.s <= 2:
        for name, ok in pipe.engine.resultant_formal_checks(level.s).items():
            checks[f"formal_{name}"] = lambda ok=ok: ok
    for n in range(level.s + 1, level.s + 3):
        checks[f"flag_dimension_{n}"] = \
            lambda n=n: pipe.engine.flag_spaces(pipe.potential(), level, n).dimension == n - level.s

    point = curve.rational_point()
    if point is not None:
        _report_specialization(pipe, doc, checks, point, tag="_rational_point")

    genus = pipe.parametrizer.genus(curve)
    if genus > 1:
        doc.warn(f"genus {genus}: no global parametrization, stopping after the factorization")
        return
    if pipe.potential().tower.kind == "weierstrass" and pipe.moduli:
        return
    _report_parametrization(pipe, doc, checks)
    if pipe.potential().tower.kind == "weierstrass":
        def unsupported() -> bool:
            try:
                pipe.solutions()
            except UnsupportedTowerError:
                return True
            return False
        checks["solve_unsupported_tower"] = unsupported
        return
    _report_solution(pipe, doc, checks)
    _report_specialized_solution(pipe, doc, checks, VERIFY_TAU0)


COMMAND_STAGES: Dict[str, Callable[[Pipeline, ResultDoc, Dict[str, Check]], None]] = {
    "hierarchy": _report_hierarchy,
    "level": _report_level,
    "curve": _report_curve,
    "factor": _report_factor,
    "parametrize": _report_parametrization,
    "solve": _report_solution,
    "specialize": _command_specialize,
    "verify": _command_verify,
}


class CommandRunner(LoggerMixin):
    """Runs a JobSpec and evaluates its checks"""

    def __init__(self, hierarchy: Optional[KdvHierarchy] = None):
        self.hierarchy = hierarchy

    def run(self, job: JobSpec) -> ResultDoc:
        self.logger.info(f"Running {job.command} for {job.echo()}")
        pipe = Pipeline(job, self.hierarchy)
        doc = ResultDoc(input=job.echo())
        checks: Dict[str, Check] = {}
        COMMAND_STAGES[job.command](pipe, doc, checks)
        start = time.perf_counter()
        doc.checks = self.evaluate(checks, doc, job.parallel, job.max_workers)
        doc.timings = dict(pipe.timings, checks=round(time.perf_counter() - start, 6))
        failed = [name for name, ok in doc.checks.items() if not ok]
        if failed:
            self.logger.warning(f"Failed checks: {', '.join(failed)}")
        else:
            self.logger.info(f"All {len(doc.checks)} checks passed")
        return doc

    def evaluate(self, checks: Dict[str, Check], doc: ResultDoc, parallel: bool = False,
                 max_workers: int = 4) -> Dict[str, bool]:
        """Run every check; an exception counts as a failure and is reported as a warning"""
        names = sorted(checks)

        def run_one(name: str) -> Tuple[bool, Optional[str]]:
            try:
                return bool(checks[name]()), None
            except Exception as e:
                error = handle_and_log_exception(self.logger, e, f"check {name}")
                return False, f"check {name} raised {error}"

        if parallel and len(names) > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as executor:
                outcomes = list(executor.map(run_one, names))
        else:
            outcomes = [run_one(name) for name in names]
        results = {}
        for name, (ok, message) in zip(names, outcomes):
            results[name] = ok
            if message:
                doc.warn(message)
        return results


def run_command(job: JobSpec, hierarchy: Optional[KdvHierarchy] = None) -> ResultDoc:
    return CommandRunner(hierarchy).run(job)


def render(doc: ResultDoc, job: JobSpec) -> str:
    if job.output_format == "json":
        return doc.to_json(indent=job.indent)
    return doc.to_text()

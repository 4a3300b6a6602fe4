"""
Tests for the command-line surface
"""

import io
import json
import tempfile
import unittest
import sys
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path
from unittest import mock

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from cli.commands import CommandRunner, ResultDoc, run_command
from cli.parser import JobSpec, job_from_args, parse_arguments, parse_rational
from core.expressions import parse_expression
from core.families import ROSEN_MORSE_FAMILY
from core.fields import exponential_tower
from core.spectral import SpectralEngine
from main import main
from utils.config import Config
from utils.exceptions import (EXIT_INTERRUPTED, EXIT_INVALID_INPUT, EXIT_OK, EXIT_PARSE_ERROR, EXIT_UNSUPPORTED,
                              ValidationError)


class TestJobSpec(unittest.TestCase):
    """Validation of job descriptions"""

    def test_valid_jobs(self):
        JobSpec(command="curve", family="rational", s=2)
        JobSpec(command="curve", potential="2/x^2", tower="rational")
        JobSpec(command="specialize", family="rational", s=1, lambda0=Fraction(-1), mu0=Fraction(1))
        JobSpec(command="hierarchy", n=3)

    def test_invalid_jobs(self):
        cases = [
            dict(command="curve"),
            dict(command="curve", family="rational", s=1, potential="2/x^2", tower="rational"),
            dict(command="curve", family="rational"),
            dict(command="curve", potential="2/x^2"),
            dict(command="curve", family="rational", s=1, g2=Fraction(1)),
            dict(command="specialize", family="rational", s=1, lambda0=Fraction(1)),
            dict(command="curve", family="rational", s=1, lambda0=Fraction(-1), mu0=Fraction(1)),
            dict(command="level", family="rational", s=1, tau0=Fraction(2)),
            dict(command="specialize", family="rational", s=1),
            dict(command="curve", family="rational", s=1, output_format="xml"),
            dict(command="draw", family="rational", s=1),
            dict(command="hierarchy", n=-1),
        ]
        for fields in cases:
            with self.subTest(fields=fields):
                with self.assertRaises(ValidationError):
                    JobSpec(**fields)

    def test_tower_kind(self):
        self.assertEqual(JobSpec(command="curve", family="rosen-morse", s=1).tower_kind, "exponential")
        self.assertEqual(JobSpec(command="curve", family="elliptic", s=1).tower_kind, "weierstrass")

    def test_echo(self):
        job = JobSpec(command="curve", family="elliptic", s=1, g2=Fraction(0), g3=Fraction(-4))
        echo = job.echo()
        self.assertEqual(echo["g3"], "-4")
        self.assertNotIn("output_format", echo)
        self.assertNotIn("potential", echo)

    def test_parse_rational(self):
        self.assertEqual(parse_rational("-3/4", "g2"), Fraction(-3, 4))
        with self.assertRaises(ValidationError):
            parse_rational("three", "g2")


class TestArgumentParser(unittest.TestCase):
    """argparse surface and merging with the configuration"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = Config(Path(self.tmp.name) / "config.json")

    def tearDown(self):
        self.tmp.cleanup()

    def test_family_arguments(self):
        args = parse_arguments(["curve", "--family", "rational", "--s", "2", "--format", "json"])
        job = job_from_args(args, self.config)
        self.assertEqual((job.command, job.family, job.s, job.output_format), ("curve", "rational", 2, "json"))
        self.assertEqual(job.s_max, 8)
        self.assertEqual(job.sign, -1)

    def test_opposite_sheet(self):
        args = parse_arguments(["parametrize", "--family", "rational", "--s", "1", "--opposite-sheet"])
        self.assertEqual(job_from_args(args, self.config).sign, 1)

    def test_rational_options(self):
        args = parse_arguments(["specialize", "--family", "rational", "--s", "1",
                                "--lambda0", "-1", "--mu0", "1"])
        job = job_from_args(args, self.config)
        self.assertEqual((job.lambda0, job.mu0), (Fraction(-1), Fraction(1)))

    def test_unknown_command(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                parse_arguments(["draw"])


class TestRunCommand(unittest.TestCase):
    """Commands end to end through run_command"""

    def test_hierarchy(self):
        doc = run_command(JobSpec(command="hierarchy", n=2))
        self.assertTrue(doc.passed)
        self.assertEqual(doc.stages["hierarchy"]["kdv"][0], "u1")
        self.assertIn("lax_identity_extended_2", doc.checks)

    def test_curve_for_custom_potential(self):
        doc = run_command(JobSpec(command="curve", potential="-2/cosh(x)^2", tower="exponential"))
        self.assertTrue(doc.passed)
        self.assertEqual(doc.stages["level"], {"s": 1, "constants": ["1"]})
        tower = exponential_tower().with_constants("lambda", "mu")
        self.assertEqual(parse_expression(doc.stages["curve"]["f"], tower),
                         parse_expression("-mu^2 - lambda*(lambda + 1)^2", tower))
        self.assertEqual(doc.stages["curve"]["genus"], 0)

    def test_verify_families(self):
        for family in ("rational", "rosen-morse", "elliptic"):
            with self.subTest(family=family):
                doc = run_command(JobSpec(command="verify", family=family, s=1))
                failed = [name for name, ok in doc.checks.items() if not ok]
                self.assertEqual(failed, [])
                self.assertIn("centralizer", doc.checks)
                self.assertIn("factor_matches_table", doc.checks)

    def test_verify_rational_solution(self):
        doc = run_command(JobSpec(command="verify", family="rational", s=1))
        self.assertTrue(doc.checks["solution_matches_table"])
        self.assertTrue(doc.checks["specialized_solution_verified"])
        self.assertEqual(doc.stages["specialized_solution"]["tau0"], "5")
        self.assertTrue(doc.checks["flag_dimension_3"])

    def test_verify_numeric_lattice(self):
        doc = run_command(JobSpec(command="verify", family="elliptic", s=1, g2=Fraction(0), g3=Fraction(-4)))
        self.assertTrue(doc.passed)
        self.assertEqual(doc.stages["specialization_rational_point"]["lambda0"], "0")

    def test_specialize(self):
        doc = run_command(JobSpec(command="specialize", family="rational", s=1,
                                  lambda0=Fraction(-1), mu0=Fraction(1)))
        self.assertTrue(doc.passed)
        self.assertFalse(doc.stages["specialization"]["singular"])

    def test_specialize_through_parametrization(self):
        doc = run_command(JobSpec(command="specialize", family="rational", s=1, tau0=Fraction(2)))
        self.assertTrue(doc.passed)
        self.assertEqual(doc.stages["specialization"]["lambda0"], "-4")
        self.assertIn("specialized_solution", doc.stages)

    def test_singular_point_warns(self):
        doc = run_command(JobSpec(command="specialize", family="rational", s=1,
                                  lambda0=Fraction(0), mu0=Fraction(0)))
        self.assertTrue(doc.passed)
        self.assertTrue(any("mu0 = 0" in w for w in doc.warnings))

    def test_parallel_checks_match_serial(self):
        serial = run_command(JobSpec(command="factor", family="rosen-morse", s=1))
        parallel = run_command(JobSpec(command="factor", family="rosen-morse", s=1, parallel=True, max_workers=3))
        self.assertEqual(serial.checks, parallel.checks)

    def test_json_is_deterministic(self):
        job = JobSpec(command="solve", family="rational", s=2, output_format="json")
        first = run_command(job).to_json(include_timings=False)
        second = run_command(job).to_json(include_timings=False)
        self.assertEqual(first, second)
        data = json.loads(first)
        self.assertEqual(set(data), {"input", "stages", "checks", "warnings"})
        self.assertEqual(data["stages"]["solution"]["plus"]["classification"], "integer")

    def test_raising_check_counts_as_failure(self):
        doc = ResultDoc(input={})
        with self.assertLogs("CommandRunner", level="ERROR"):
            results = CommandRunner().evaluate({"boom": lambda: 1 // 0, "fine": lambda: True}, doc)
        self.assertEqual(results, {"boom": False, "fine": True})
        self.assertTrue(doc.warnings[0].startswith("check boom raised"))

    def test_failed_check_is_reported(self):
        doc = ResultDoc(input={})
        doc.checks = {"b": True, "a": False}
        self.assertFalse(doc.passed)
        self.assertIn("  a: FAIL", doc.to_text())

    def test_result_document_round_trip(self):
        jobs = (JobSpec(command="verify", family="rational", s=1),
                JobSpec(command="solve", family="rational", s=2),
                JobSpec(command="factor", family="rosen-morse", s=1),
                JobSpec(command="hierarchy", n=2))
        for job in jobs:
            with self.subTest(command=job.command, family=job.family):
                doc = run_command(job)
                restored = ResultDoc.from_json(doc.to_json())
                self.assertEqual(restored, doc)
                self.assertEqual(restored.to_json(), doc.to_json())
                self.assertEqual(restored.to_text(), doc.to_text())

    def test_stage_text_parses_back(self):
        doc = ResultDoc.from_json(run_command(JobSpec(command="factor", family="rosen-morse", s=1)).to_json())
        engine = SpectralEngine()
        pot = ROSEN_MORSE_FAMILY.potential(1)
        curve = engine.spectral_curve(pot, engine.kdv_level(pot))
        phi = curve.element(parse_expression(doc.stages["factor"]["phi_plus"], pot.op_tower))
        self.assertEqual(phi, curve.element(ROSEN_MORSE_FAMILY.expected_factor(1, pot.op_tower)))

    def test_malformed_result_document(self):
        for text in ("{", "[]", '{"stages": {}}', '{"input": {}, "extra": 1}'):
            with self.subTest(text=text):
                with self.assertRaises(ValidationError):
                    ResultDoc.from_json(text)


class TestMain(unittest.TestCase):
    """Process exit codes"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = str(Path(self.tmp.name) / "config.json")

    def tearDown(self):
        self.tmp.cleanup()

    def run_main(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv) + ["--config", self.config])
        return code, out.getvalue(), err.getvalue()

    def test_success(self):
        code, out, _ = self.run_main("curve", "--family", "rational", "--s", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("[curve]", out)

    def test_json_output(self):
        code, out, _ = self.run_main("level", "--family", "rosen-morse", "--s", "2", "--format", "json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["stages"]["level"]["constants"], ["5", "4"])

    def test_parse_error(self):
        code, _, err = self.run_main("curve", "--potential", "2/y^2", "--tower", "rational")
        self.assertEqual(code, EXIT_PARSE_ERROR)
        self.assertIn("position", err)

    def test_unsupported_tower(self):
        code, _, _ = self.run_main("solve", "--family", "elliptic", "--s", "1")
        self.assertEqual(code, EXIT_UNSUPPORTED)

    def test_invalid_request(self):
        code, _, err = self.run_main("curve", "--family", "rational")
        self.assertEqual(code, EXIT_INVALID_INPUT)
        self.assertIn("Invalid request", err)

    def test_point_off_curve(self):
        code, _, err = self.run_main("specialize", "--family", "rational", "--s", "1",
                                     "--lambda0", "1", "--mu0", "1")
        self.assertEqual(code, EXIT_INVALID_INPUT)
        self.assertIn("not on the curve", err)

    def test_keyboard_interrupt(self):
        with mock.patch("main.run_command", side_effect=KeyboardInterrupt):
            code, _, err = self.run_main("curve", "--family", "rational", "--s", "1")
        self.assertEqual(code, EXIT_INTERRUPTED)
        self.assertIn("Interrupted", err)

    def test_missing_config_is_not_created(self):
        code, _, _ = self.run_main("level", "--family", "rational", "--s", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertFalse(Path(self.config).exists())


if __name__ == '__main__':
    unittest.main()

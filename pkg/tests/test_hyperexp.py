"""
Tests for the hyperexponential solver
"""

import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from core.expressions import parse_expression
from core.families import RATIONAL_FAMILY, ROSEN_MORSE_FAMILY, solution_tower
from core.fields import exponential_tower, rational_tower, weierstrass_tower
from core.hyperexp import (ALGEBRAIC, INTEGER, RATIONAL_RADICAL, TRANSCENDENTAL, TRIVIAL,
                           HyperexponentialSolver, hyperexponential_solve, verify_solution)
from utils.exceptions import NoHyperexponentialSolutionError, UnsupportedTowerError


class TestHyperexponentialSolver(unittest.TestCase):
    """Solutions of d(Y) = phi*Y"""

    def setUp(self):
        self.solver = HyperexponentialSolver()
        self.tower = rational_tower(("tau",))

    def parse(self, text, tower=None):
        return parse_expression(text, tower or self.tower)

    def test_rational_family_tables(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                phi = RATIONAL_FAMILY.expected_one_parameter(s, self.tower)
                sol = self.solver.solve(phi)
                self.assertTrue(self.solver.verify_solution(sol, phi))
                self.assertEqual(sol.classification, INTEGER)
                rational_part, rate = RATIONAL_FAMILY.expected_solution(s, self.tower)
                self.assertTrue((sol.rational_part() / rational_part).is_constant)
                self.assertEqual(sol.exp_rate, rate)

    def test_rosen_morse_table(self):
        tower = solution_tower()
        phi = ROSEN_MORSE_FAMILY.expected_one_parameter(1, tower)
        sol = self.solver.solve(phi)
        self.assertTrue(self.solver.verify_solution(sol, phi))
        rational_part, rate = ROSEN_MORSE_FAMILY.expected_solution(1, tower)
        self.assertTrue((sol.rational_part() / rational_part).is_constant)
        self.assertEqual(sol.exp_rate, rate)

    def test_exponential(self):
        tower = exponential_tower()
        sol = self.solver.solve(tower.one)
        self.assertEqual(sol.exp_rate, tower.one)
        self.assertEqual(sol.factors, ())
        self.assertTrue(sol.residual.is_zero)

    def test_essential_singularity(self):
        phi = self.parse("1/x^2")
        sol = self.solver.solve(phi)
        self.assertEqual(sol.residual, self.parse("-1/x"))
        self.assertTrue(self.solver.verify_solution(sol, phi))
        specialized = self.solver.specialize_solution(sol, 1)
        self.assertEqual(specialized.extension, TRANSCENDENTAL)

    def test_radical(self):
        phi = self.parse("1/(2*x)")
        sol = self.solver.solve(phi)
        self.assertEqual(sol.classification, RATIONAL_RADICAL)
        self.assertEqual(sol.factors, ((self.parse("x"), Fraction(1, 2)),))
        self.assertEqual(self.solver.specialize_solution(sol, 1).extension, ALGEBRAIC)
        with self.assertRaises(NoHyperexponentialSolutionError):
            sol.rational_part()

    def test_trivial_extension(self):
        sol = self.solver.solve(self.parse("2/x"))
        self.assertEqual(sol.rational_part(), self.parse("x^2"))
        self.assertEqual(self.solver.specialize_solution(sol, 3).extension, TRIVIAL)

    def test_no_solution(self):
        with self.assertRaises(NoHyperexponentialSolutionError):
            self.solver.solve(self.parse("1/(x^2 + 1)"))

    def test_weierstrass_unsupported(self):
        tower = weierstrass_tower()
        with self.assertRaises(UnsupportedTowerError):
            self.solver.solve(tower.symbol("wp"))

    def test_fundamental_system(self):
        phi_plus = RATIONAL_FAMILY.expected_one_parameter(1, self.tower)
        phi_minus = self.parse("-(-tau^3*x^3 + 1)/(x*(-tau^2*x^2 + 1))")
        system = self.solver.fundamental_system(phi_plus, phi_minus)
        self.assertTrue(system.verified)
        self.assertTrue(system.wronskian_nonzero)
        self.assertEqual(system.minus.exp_rate, self.parse("-tau"))

    def test_specialize_at_tau(self):
        phi = RATIONAL_FAMILY.expected_one_parameter(1, self.tower)
        sol = self.solver.solve(phi)
        phi0 = phi.substitute({"tau": 5}, target=rational_tower())
        specialized = self.solver.specialize_solution(sol, 5, phi0)
        self.assertTrue(specialized.verified)
        self.assertEqual(specialized.solution.exp_rate, rational_tower().constant(5))
        self.assertEqual(specialized.extension, TRANSCENDENTAL)

    def test_module_functions(self):
        phi = self.parse("1 + 3/(x - 1)")
        sol = hyperexponential_solve(phi)
        self.assertTrue(verify_solution(sol, phi))
        self.assertEqual(sol.exp_rate, self.tower.one)
        self.assertEqual(sol.rational_part(), self.parse("(x - 1)^3"))

    def test_to_dict(self):
        sol = self.solver.solve(self.parse("2/x"))
        data = sol.to_dict()
        self.assertEqual(data["classification"], INTEGER)
        self.assertEqual(data["upsilon"], "(x)^2")


if __name__ == '__main__':
    unittest.main()

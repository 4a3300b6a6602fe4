"""
Randomized property tests with fixed seeds
"""

import random
import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from core.algebra import SymMatrix, det_cofactor, det_fraction_free, polynomial_ring, rational_field
from core.diffpoly import DiffPoly, dp_derive, dp_integrate, dp_substitute
from core.families import RATIONAL_FAMILY
from core.fields import (exponential_tower, fe_coordinates, fe_derive, fe_invert, fe_substitute,
                         rational_tower, weierstrass_tower)
from core.hyperexp import HyperexponentialSolver
from core.operators import DiffOp, TowerDomain, op_mul, op_right_divide
from core.spectral import SpectralEngine, curve_invert
from utils.config import Config

SEED = Config.DEFAULT_CONFIG["verify"]["seed"]
CASES = Config.DEFAULT_CONFIG["verify"]["property_cases"]


def random_int(rng, low=-3, high=3, nonzero=False):
    while True:
        value = rng.randint(low, high)
        if value or not nonzero:
            return value


def random_polynomial(rng, tower, names, degree=2, terms=3):
    """Small polynomial in the given symbols of tower"""
    result = tower.zero
    for _ in range(terms):
        term = tower.constant(random_int(rng))
        for name in names:
            term = term * tower.symbol(name) ** rng.randint(0, degree)
        result = result + term
    return result


def random_element(rng, tower, numerator_names=None):
    """Quotient of a small polynomial by g + c for the first generator g"""
    names = numerator_names or tower.generators
    numerator = random_polynomial(rng, tower, names)
    if rng.random() < 0.5:
        return numerator
    g = tower.symbol(tower.generators[0])
    return numerator / (g ** rng.randint(1, 2) + random_int(rng, 1, 3))


def random_diffpoly(rng, max_order=2, terms=3):
    """DiffPoly with no u-free term"""
    result = DiffPoly.zero()
    for _ in range(terms):
        exponents = [rng.randint(0, 2) for _ in range(max_order + 1)]
        if not any(exponents):
            exponents[rng.randint(0, max_order)] = 1
        term = DiffPoly.constant(random_int(rng, nonzero=True))
        for k, e in enumerate(exponents):
            term = term * DiffPoly.jet(k) ** e
        result = result + term
    return result


def towers():
    return {
        "rational": rational_tower(("lambda",)),
        "exponential": exponential_tower(),
        "weierstrass": weierstrass_tower(0, -4),
        "weierstrass_symbolic": weierstrass_tower(),
    }


class TestFieldProperties(unittest.TestCase):
    """Derivation and inversion in every tower"""

    def setUp(self):
        self.rng = random.Random(SEED)

    def test_leibniz_rule(self):
        for kind, tower in towers().items():
            with self.subTest(tower=kind):
                for _ in range(CASES):
                    a = random_element(self.rng, tower)
                    b = random_element(self.rng, tower)
                    self.assertEqual(fe_derive(a * b), fe_derive(a) * b + a * fe_derive(b))

    def test_constants_are_the_kernel(self):
        for kind, tower in towers().items():
            with self.subTest(tower=kind):
                for _ in range(CASES):
                    e = random_element(self.rng, tower)
                    self.assertEqual(fe_derive(e).is_zero, not e.uses(tower.generators))
                    if tower.constants:
                        c = random_polynomial(self.rng, tower, tower.constants)
                        self.assertTrue(fe_derive(c).is_zero)

    def test_inversion(self):
        for kind, tower in towers().items():
            with self.subTest(tower=kind):
                for _ in range(CASES):
                    e = random_element(self.rng, tower)
                    if e.is_zero:
                        continue
                    self.assertEqual(e * fe_invert(e), tower.one)

    def test_coordinates_rebuild_the_element(self):
        tower = rational_tower(("lambda",))
        x = tower.symbol("x")
        for _ in range(CASES):
            e = random_polynomial(self.rng, tower, ("x", "lambda"))
            rebuilt = tower.zero
            for monom, coefficient in fe_coordinates(e).items():
                rebuilt = rebuilt + tower.element(coefficient) * x ** monom[0]
            self.assertEqual(rebuilt, e)

    def test_substitution_commutes_with_derivation(self):
        tower = rational_tower(("lambda",))
        target = rational_tower()
        for _ in range(CASES):
            e = random_element(self.rng, tower, ("x", "lambda"))
            value = random_int(self.rng)
            self.assertEqual(fe_substitute(fe_derive(e), {"lambda": value}, target),
                             fe_derive(fe_substitute(e, {"lambda": value}, target)))


class TestDiffPolyProperties(unittest.TestCase):
    """Jet ring derivation and integration"""

    def setUp(self):
        self.rng = random.Random(SEED)

    def test_integrate_inverts_derive(self):
        for _ in range(CASES):
            p = random_diffpoly(self.rng)
            self.assertEqual(dp_integrate(dp_derive(p)), p)

    def test_substitute_commutes_with_derivation(self):
        for kind, tower in towers().items():
            if kind == "weierstrass_symbolic":
                continue
            with self.subTest(tower=kind):
                for _ in range(CASES):
                    p = random_diffpoly(self.rng, max_order=1, terms=2)
                    pot = random_element(self.rng, tower)
                    self.assertEqual(dp_substitute(dp_derive(p), pot), fe_derive(dp_substitute(p, pot)))


class TestOperatorProperties(unittest.TestCase):
    """Arithmetic in K[d] over the rational tower"""

    def setUp(self):
        self.rng = random.Random(SEED)
        self.tower = rational_tower()
        self.domain = TowerDomain(self.tower)

    def random_operator(self, min_order=0, max_order=2):
        order = self.rng.randint(min_order, max_order)
        coeffs = [random_element(self.rng, self.tower) for _ in range(order)]
        leading = random_element(self.rng, self.tower)
        while leading.is_zero:
            leading = random_element(self.rng, self.tower)
        return DiffOp(self.domain, tuple(coeffs) + (leading,))

    def test_associativity(self):
        for _ in range(CASES):
            a, b, c = self.random_operator(), self.random_operator(), self.random_operator()
            self.assertEqual(op_mul(op_mul(a, b), c), op_mul(a, op_mul(b, c)))

    def test_right_division(self):
        for _ in range(CASES):
            p = self.random_operator(0, 4)
            q = self.random_operator(1, 2)
            quotient, remainder = op_right_divide(p, q)
            self.assertLess(remainder.order, q.order)
            self.assertEqual(op_mul(quotient, q) + remainder, p)


class TestDeterminantProperties(unittest.TestCase):
    """Fraction-free elimination against cofactor expansion"""

    def random_entry(self, rng, field):
        """Quotient of polynomials of total degree <= 2 in x, y"""
        x, y = field.gens

        def polynomial():
            result = field.zero
            for i in range(3):
                for j in range(3 - i):
                    if rng.random() < 0.5:
                        result = result + random_int(rng) * x ** i * y ** j
            return result

        numerator = polynomial()
        if rng.random() < 0.3:
            return numerator
        denominator = polynomial()
        while not denominator:
            denominator = polynomial()
        return numerator / denominator

    def test_methods_agree(self):
        rng = random.Random(SEED)
        ring = polynomial_ring(("x", "y"))
        x, y = ring.gens
        for _ in range(CASES):
            n = rng.randint(1, 4)
            rows = [[random_int(rng) + random_int(rng) * x + random_int(rng) * y for _ in range(n)]
                    for _ in range(n)]
            m = SymMatrix.from_rows([[ring(entry) for entry in row] for row in rows])
            self.assertEqual(det_fraction_free(m), det_cofactor(m))

    def test_methods_agree_on_rational_functions(self):
        rng = random.Random(SEED)
        field = rational_field(("x", "y"))
        for _ in range(CASES):
            n = rng.randint(1, 4)
            m = SymMatrix.from_rows([[self.random_entry(rng, field) for _ in range(n)] for _ in range(n)])
            self.assertEqual(det_fraction_free(m), det_cofactor(m))


class TestCurveProperties(unittest.TestCase):
    """Inversion in the function field of mu^2 = -lambda^3"""

    @classmethod
    def setUpClass(cls):
        engine = SpectralEngine()
        pot = RATIONAL_FAMILY.potential(1)
        cls.curve = engine.spectral_curve(pot, engine.kdv_level(pot))

    def test_curve_invert(self):
        rng = random.Random(SEED)
        tower = self.curve.tower
        mu = tower.symbol("mu")
        checked = 0
        while checked < CASES:
            a = random_polynomial(rng, tower, ("x", "lambda"), degree=1, terms=2)
            b = random_polynomial(rng, tower, ("x", "lambda"), degree=1, terms=2)
            e = a + b * mu
            if e.is_zero:
                continue
            self.assertEqual(e * curve_invert(e, self.curve), tower.one)
            checked += 1


class TestSolverProperties(unittest.TestCase):
    """Every solution the solver returns has the requested log-derivative"""

    def setUp(self):
        self.rng = random.Random(SEED)
        self.solver = HyperexponentialSolver()

    def random_rational_phi(self, tower):
        x = tower.symbol("x")
        roots = self.rng.sample(range(-3, 4), self.rng.randint(1, 3))
        phi = tower.constant(random_int(self.rng))
        for a in roots:
            exponent = self.rng.choice((-2, -1, 1, 2, Fraction(1, 2)))
            phi = phi + tower.constant(exponent) / (x - a)
        residual = random_int(self.rng, 0, 2)
        if residual:
            phi = phi - tower.constant(residual) / (x - roots[0]) ** 2
        return phi

    def random_exponential_phi(self, tower):
        eta = tower.symbol("eta")
        roots = self.rng.sample([-3, -2, -1, 1, 2, 3], self.rng.randint(1, 2))
        phi = tower.constant(random_int(self.rng))
        for a in roots:
            phi = phi + tower.constant(random_int(self.rng, -2, 2, nonzero=True)) * eta / (eta - a)
        return phi

    def test_rational_soundness(self):
        tower = rational_tower(("tau",))
        for _ in range(CASES):
            phi = self.random_rational_phi(tower)
            self.assertTrue(self.solver.verify_solution(self.solver.solve(phi), phi))

    def test_exponential_soundness(self):
        tower = exponential_tower()
        for _ in range(CASES):
            phi = self.random_exponential_phi(tower)
            self.assertTrue(self.solver.verify_solution(self.solver.solve(phi), phi))


if __name__ == '__main__':
    unittest.main()

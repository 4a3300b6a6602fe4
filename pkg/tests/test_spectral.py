"""
Tests for levels, spectral curves and factorizations
"""

import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from core.expressions import parse_expression
from core.families import ELLIPTIC_FAMILY, NUMERIC_LATTICE, RATIONAL_FAMILY, ROSEN_MORSE_FAMILY
from core.fields import rational_tower
from core.spectral import (Potential, SpectralEngine, build_A, curve_reduce, factor_on_curve, kdv_level,
                           product_identity, spectral_curve)
from utils.exceptions import (DegeneratePotentialError, IndexBelowLevelError, LevelNotFoundError,
                              NotOnCurveError)


class SpectralTestCase(unittest.TestCase):
    """Shared pipeline helpers"""

    @classmethod
    def setUpClass(cls):
        cls.engine = SpectralEngine()

    def pipeline(self, preset, s):
        pot = preset.potential(s)
        level = self.engine.kdv_level(pot)
        curve = self.engine.spectral_curve(pot, level)
        return pot, level, curve

    def assert_factor(self, preset, s):
        pot, level, curve = self.pipeline(preset, s)
        factor = self.engine.factor_on_curve(pot, level, curve)
        expected = curve.element(preset.expected_factor(s, pot.op_tower))
        self.assertEqual(factor.phi_plus, expected)
        self.assertTrue(self.engine.riccati_check(factor.phi_plus, pot, curve))
        self.assertTrue(self.engine.riccati_check(factor.phi_minus, pot, curve))
        self.assertTrue(all(self.engine.solution_identities(factor, curve, pot).values()))
        return pot, level, curve, factor


class TestRationalFamily(SpectralTestCase):
    """u = s(s+1)/x^2"""

    def test_levels_and_curves(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                pot, level, curve = self.pipeline(RATIONAL_FAMILY, s)
                self.assertEqual(level.s, s)
                self.assertEqual(level.cbar, RATIONAL_FAMILY.expected_levels(s, pot.tower))
                self.assertEqual(curve.f, RATIONAL_FAMILY.expected_curve(s, pot.op_tower))
                self.assertTrue(self.engine.centralizer_check(pot, level))

    def test_factors(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                self.assert_factor(RATIONAL_FAMILY, s)

    def test_flag_spaces(self):
        pot, level, _ = self.pipeline(RATIONAL_FAMILY, 1)
        for n in (2, 3):
            with self.subTest(n=n):
                self.assertEqual(self.engine.flag_spaces(pot, level, n).dimension, n - level.s)
        with self.assertRaises(IndexBelowLevelError):
            self.engine.flag_spaces(pot, level, 1)

    def test_specialization(self):
        pot, level, curve, factor = self.assert_factor(RATIONAL_FAMILY, 1)
        self.assertEqual(curve.rational_point(), (Fraction(-1), Fraction(1)))
        result = self.engine.specialize_at_point(pot, level, curve, factor, -1, 1)
        self.assertFalse(result.singular)
        self.assertTrue(result.factorization_verified)
        self.assertTrue(result.common_factor_verified)

    def test_singular_point(self):
        pot, level, curve, factor = self.assert_factor(RATIONAL_FAMILY, 1)
        result = self.engine.specialize_at_point(pot, level, curve, factor, 0, 0)
        self.assertTrue(result.singular)
        self.assertTrue(result.factorization_verified)
        self.assertTrue(result.common_factor_verified)

    def test_module_functions(self):
        pot = RATIONAL_FAMILY.potential(1)
        level = kdv_level(pot, engine=self.engine)
        curve = spectral_curve(pot, level, engine=self.engine)
        self.assertEqual(build_A(pot, level, engine=self.engine).order, 3)
        factor = factor_on_curve(pot, level, curve, engine=self.engine)
        self.assertTrue(product_identity(factor, curve))
        mu = pot.op_tower.symbol("mu")
        lam = curve.tower.symbol("lambda")
        self.assertEqual(curve_reduce(mu ** 2, curve), curve.element(-lam ** 3))

    def test_point_off_curve(self):
        pot, level, curve, factor = self.assert_factor(RATIONAL_FAMILY, 1)
        with self.assertRaises(NotOnCurveError):
            self.engine.specialize_at_point(pot, level, curve, factor, 1, 1)


class TestRosenMorseFamily(SpectralTestCase):
    """u = -s(s+1)/cosh(x)^2"""

    def test_levels_and_curves(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                pot, level, curve = self.pipeline(ROSEN_MORSE_FAMILY, s)
                self.assertEqual(level.s, s)
                self.assertEqual(level.cbar, ROSEN_MORSE_FAMILY.expected_levels(s, pot.tower))
                self.assertEqual(curve.f, ROSEN_MORSE_FAMILY.expected_curve(s, pot.op_tower))

    def test_factors(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                self.assert_factor(ROSEN_MORSE_FAMILY, s)

    def test_rational_point(self):
        _, _, curve = self.pipeline(ROSEN_MORSE_FAMILY, 1)
        lambda0, mu0 = curve.rational_point()
        self.assertTrue(curve.contains(lambda0, mu0))
        self.assertGreater(mu0, 0)


class TestEllipticFamily(SpectralTestCase):
    """u = s(s+1) wp with symbolic invariants"""

    def test_levels_and_curves(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                pot, level, curve = self.pipeline(ELLIPTIC_FAMILY, s)
                self.assertEqual(level.s, s)
                self.assertEqual(level.cbar, ELLIPTIC_FAMILY.expected_levels(s, pot.tower))
                self.assertEqual(curve.f, ELLIPTIC_FAMILY.expected_curve(s, pot.op_tower))

    def test_factors(self):
        for s in (1, 2, 3):
            with self.subTest(s=s):
                self.assert_factor(ELLIPTIC_FAMILY, s)

    def test_level_two_constants(self):
        pot = ELLIPTIC_FAMILY.potential(2)
        level = self.engine.kdv_level(pot)
        self.assertEqual(level.s, 2)
        self.assertEqual(level.cbar, ELLIPTIC_FAMILY.expected_levels(2, pot.tower))


class TestLevelOverGeneratorDenominators(SpectralTestCase):
    """Levels whose coefficient system has generator denominators"""

    def test_inverse_square(self):
        tower = rational_tower()
        pot = Potential(tower, parse_expression("6/x^2", tower))
        level = self.engine.kdv_level(pot)
        self.assertEqual(level.s, 2)
        self.assertEqual(level.cbar, (tower.zero, tower.zero))

    def test_rosen_morse_two(self):
        pot = ROSEN_MORSE_FAMILY.potential(2)
        level = kdv_level(pot, engine=self.engine)
        self.assertEqual(level.s, 2)
        self.assertEqual(level.cbar, (pot.tower.constant(5), pot.tower.constant(4)))


class TestCurvePoints(SpectralTestCase):
    """Specialization at several points of each s = 1 curve, one of them with mu = 0"""

    def assert_points(self, pot, points):
        level = self.engine.kdv_level(pot)
        curve = self.engine.spectral_curve(pot, level)
        factor = self.engine.factor_on_curve(pot, level, curve)
        self.assertGreaterEqual(len(points), 5)
        self.assertTrue(any(mu0 == 0 for _, mu0 in points))
        for lambda0, mu0 in points:
            with self.subTest(point=(str(lambda0), str(mu0))):
                self.assertTrue(curve.contains(lambda0, mu0))
                result = self.engine.specialize_at_point(pot, level, curve, factor, lambda0, mu0)
                self.assertEqual(result.singular, mu0 == 0)
                self.assertTrue(result.factorization_verified)
                self.assertTrue(result.common_factor_verified)

    def test_rational(self):
        points = [(-1, 1), (-1, -1), (-4, 8), (-4, -8), (-9, 27), (0, 0)]
        self.assert_points(RATIONAL_FAMILY.potential(1), points)

    def test_rosen_morse(self):
        # lambda = -tau^2, mu = -tau*(tau^2 - 1)
        points = [(-4, -6), (-4, 6), (-9, -24), (Fraction(-1, 4), Fraction(3, 8)), (0, 0), (-1, 0)]
        self.assert_points(ROSEN_MORSE_FAMILY.potential(1), points)

    def test_elliptic_numeric_lattice(self):
        points = [(0, 1), (0, -1), (-2, 3), (-2, -3), (1, 0)]
        self.assert_points(ELLIPTIC_FAMILY.potential(1, *NUMERIC_LATTICE), points)


class TestEngineErrors(unittest.TestCase):
    """Inputs the engine rejects"""

    def test_constant_potential(self):
        tower = rational_tower()
        with self.assertRaises(DegeneratePotentialError):
            Potential(tower, tower.constant(3))

    def test_no_level(self):
        tower = rational_tower()
        pot = Potential(tower, parse_expression("x", tower))
        with self.assertRaises(LevelNotFoundError) as ctx:
            SpectralEngine(s_max=2).kdv_level(pot)
        self.assertEqual(ctx.exception.s_max, 2)


class TestFormalChecks(unittest.TestCase):
    """Degree structure of the formal resultant"""

    def test_formal_checks(self):
        engine = SpectralEngine()
        for s in (1, 2):
            with self.subTest(s=s):
                checks = engine.resultant_formal_checks(s)
                self.assertTrue(checks)
                for name, ok in checks.items():
                    self.assertTrue(ok, name)


if __name__ == '__main__':
    unittest.main()

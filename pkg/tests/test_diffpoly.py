"""
Tests for differential polynomials in u
"""

import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from core.diffpoly import JET_ORDER, U, DiffPoly
from core.expressions import parse_expression
from core.fields import rational_tower
from utils.exceptions import JetOrderExceededError, NotTotalDerivativeError


class TestDiffPoly(unittest.TestCase):
    """Total derivative, antiderivative and substitution"""

    def test_total_derivative(self):
        self.assertEqual(U(0).derive(), U(1))
        self.assertEqual((U(0) ** 2).derive(), 2 * U(0) * U(1))
        self.assertEqual(DiffPoly.symbol("c1").derive(), DiffPoly.zero())

    def test_order_and_weights(self):
        p = U(0) * U(3) + U(2) * U(1) * Fraction(1, 2)
        self.assertEqual(p.order, 3)
        self.assertEqual(p.weights(), {7})
        self.assertEqual(DiffPoly.constant(5).order, -1)

    def test_integrate(self):
        self.assertEqual(U(1).integrate(), U(0))
        self.assertEqual((U(0) * U(1)).integrate(), U(0) ** 2 * Fraction(1, 2))
        p = U(0) ** 2 * U(3) + U(1) ** 3 + 4 * U(0) * U(1) * U(2)
        self.assertEqual(p.integrate().derive(), p)

    def test_integrate_rejects_non_derivatives(self):
        with self.assertRaises(NotTotalDerivativeError):
            (U(0) * U(2)).integrate()
        with self.assertRaises(NotTotalDerivativeError):
            U(0).integrate()

    def test_jet_order(self):
        with self.assertRaises(JetOrderExceededError):
            DiffPoly.jet(JET_ORDER)
        with self.assertRaises(JetOrderExceededError):
            U(JET_ORDER - 1).derive()

    def test_uses(self):
        p = DiffPoly.symbol("lambda") * U(0)
        self.assertTrue(p.uses("lambda"))
        self.assertFalse(p.uses("mu"))

    def test_substitute(self):
        tower = rational_tower()
        pot = parse_expression("2/x^2", tower)
        # u''/3 = u^2 for u = 2/x^2
        p = U(2) * Fraction(1, 3) - U(0) ** 2
        self.assertTrue(p.substitute(pot).is_zero)
        self.assertEqual(U(1).substitute(pot), pot.derive())

    def test_substitute_extends_tower(self):
        tower = rational_tower()
        pot = parse_expression("2/x^2", tower)
        image = (DiffPoly.symbol("lambda") * U(0)).substitute(pot)
        self.assertIn("lambda", image.tower.names)
        fixed = (DiffPoly.symbol("c1") + U(0)).substitute(pot, {"c1": 3})
        self.assertEqual(fixed, pot + 3)

    def test_to_text(self):
        self.assertEqual((U(0) * U(1)).to_text(), "u*u1")
        self.assertEqual(DiffPoly.zero().to_text(), "0")


if __name__ == '__main__':
    unittest.main()

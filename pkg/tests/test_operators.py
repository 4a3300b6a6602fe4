"""
Tests for differential operators, resultants and subresultants
"""

import unittest
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from core.diffpoly import U
from core.expressions import parse_expression
from core.fields import rational_tower
from core.operators import (FORMAL, DiffOp, TowerDomain, diff_resultant, op_apply, op_commutator, op_mul,
                            op_right_divide, schrodinger, subresultant_L1, sylvester_matrix)
from utils.exceptions import (DivisionByZeroOperatorError, IndexOutOfRangeError, ModeMismatchError,
                              OrderTooLowError)


class TestOperatorRing(unittest.TestCase):
    """Multiplication, division and application in K[d]"""

    def setUp(self):
        self.tower = rational_tower()
        self.domain = TowerDomain(self.tower)
        self.x = self.tower.symbol("x")
        self.d = DiffOp.d(self.domain)

    def test_commutation_rule(self):
        x_op = DiffOp.scalar(self.domain, self.x)
        self.assertEqual(op_mul(self.d, x_op), DiffOp(self.domain, (self.tower.one, self.x)))
        self.assertEqual(op_commutator(self.d, x_op), DiffOp.scalar(self.domain, 1))

    def test_trailing_zeros_dropped(self):
        op = DiffOp(self.domain, (self.x, self.tower.zero))
        self.assertEqual(op.order, 0)
        self.assertEqual(DiffOp(self.domain, ()).order, -1)

    def test_schrodinger_factorization(self):
        u = parse_expression("2/x^2", self.tower)
        L = schrodinger(self.domain, u)
        phi = -1 / self.x
        right = DiffOp(self.domain, (-phi, self.tower.one))
        left = DiffOp(self.domain, (-phi, self.tower.constant(-1)))
        self.assertEqual(op_mul(left, right), L)
        quotient, remainder = op_right_divide(L, right)
        self.assertTrue(remainder.is_zero)
        self.assertEqual(quotient, left)

    def test_right_division_remainder(self):
        p = DiffOp.d(self.domain, 2) + self.x
        q = DiffOp.d(self.domain)
        quotient, remainder = op_right_divide(p, q)
        self.assertEqual(quotient * q + remainder, p)
        self.assertEqual(remainder, DiffOp.scalar(self.domain, self.x))

    def test_divide_by_zero(self):
        with self.assertRaises(DivisionByZeroOperatorError):
            op_right_divide(self.d, DiffOp(self.domain, ()))

    def test_apply(self):
        self.assertEqual(op_apply(self.d, self.x ** 2), 2 * self.x)
        L = schrodinger(self.domain, parse_expression("2/x^2", self.tower))
        self.assertTrue(op_apply(L, self.x ** 2).is_zero)

    def test_mode_mismatch(self):
        formal = DiffOp.d(FORMAL)
        with self.assertRaises(ModeMismatchError):
            op_mul(formal, self.d)
        with self.assertRaises(ModeMismatchError):
            op_right_divide(schrodinger(FORMAL, U(0)), formal)


class TestResultants(unittest.TestCase):
    """Sylvester matrices, resultants and the first subresultant"""

    def setUp(self):
        self.tower = rational_tower()
        self.domain = TowerDomain(self.tower)
        self.x = self.tower.symbol("x")
        self.d = DiffOp.d(self.domain)

    def test_first_order_resultant(self):
        p = self.d - self.x
        q = self.d - 1
        self.assertEqual(diff_resultant(p, q), self.x - 1)

    def test_methods_agree(self):
        L = schrodinger(self.domain, parse_expression("2/x^2", self.tower))
        A = DiffOp.d(self.domain, 3) + DiffOp.scalar(self.domain, self.x) * self.d
        self.assertEqual(diff_resultant(L, A, "bareiss"), diff_resultant(L, A, "cofactor"))

    def test_sylvester_shapes(self):
        L = schrodinger(self.domain, self.x)
        A = DiffOp.d(self.domain, 3)
        self.assertEqual((sylvester_matrix(L, A, 0).rows, sylvester_matrix(L, A, 0).cols), (5, 5))
        self.assertEqual((sylvester_matrix(L, A, 1).rows, sylvester_matrix(L, A, 1).cols), (3, 4))
        with self.assertRaises(IndexOutOfRangeError):
            sylvester_matrix(L, A, 2)

    def test_subresultant_needs_order_two(self):
        with self.assertRaises(OrderTooLowError):
            subresultant_L1(self.d, DiffOp.d(self.domain, 3))

    def test_common_right_factor(self):
        # L and A share exactly the right factor d - phi
        u = parse_expression("2/x^2", self.tower)
        phi = -1 / self.x
        right = DiffOp(self.domain, (-phi, self.tower.one))
        L = schrodinger(self.domain, u)
        A = op_mul(DiffOp.d(self.domain, 2) + self.x, right)
        det0, det1 = subresultant_L1(L, A)
        subresultant = DiffOp(self.domain, (det0, det1))
        self.assertFalse(det1.is_zero)
        self.assertTrue(op_right_divide(subresultant, right)[1].is_zero)
        self.assertTrue(diff_resultant(L, A).is_zero)


if __name__ == '__main__':
    unittest.main()

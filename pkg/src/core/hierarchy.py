"""
KdV hierarchy for kdvfactor

kdv_0 = u', kdv_n = -1/4 kdv_(n-1)'' + u kdv_(n-1) + u' v_n with
2 v_n' = kdv_(n-1), v_0 = 1, and the operators
P_1 = d, P_(2n+1) = v_n d - 1/2 v_n' + P_(2n-1) L where L = -d^2 + u.
"""

import functools
import threading
from fractions import Fraction
from typing import List

from utils.exceptions import ConstantsMismatchError
from utils.logger import LoggerMixin

from .diffpoly import JET_CONSTANTS, U, DiffPoly
from .operators import FORMAL, DiffOp, op_commutator, schrodinger

HALF = Fraction(1, 2)
MAX_CONSTANTS = sum(1 for name in JET_CONSTANTS if name.startswith("c"))


class KdvHierarchy(LoggerMixin):
    """Append-only cache of kdv_n, v_n and P_(2n+1)"""

    def __init__(self, max_n: int = 6):
        """
        Initialize the hierarchy cache

        Args:
            max_n: Number of levels computed by warm(); larger indices are
                computed on demand
        """
        self.max_n = max_n
        self._lock = threading.RLock()
        self._kdv: List[DiffPoly] = [U(1)]
        self._v: List[DiffPoly] = [DiffPoly.one()]
        self._p: List[DiffOp] = [DiffOp.d(FORMAL)]
        self.L = schrodinger(FORMAL, U(0))

    def warm(self) -> None:
        self.p_odd(self.max_n)

    def kdv(self, n: int) -> DiffPoly:
        """kdv_n"""
        with self._lock:
            while len(self._kdv) <= n:
                k = len(self._kdv)
                prev = self._kdv[k - 1]
                value = prev.derive_n(2) * Fraction(-1, 4) + U(0) * prev + U(1) * self.v(k)
                self._kdv.append(value)
                self.logger.debug(f"kdv_{k} has {len(value.poly)} terms")
            return self._kdv[n]

    def v(self, n: int) -> DiffPoly:
        """v_n = 1/2 of the antiderivative of kdv_(n-1)"""
        with self._lock:
            while len(self._v) <= n:
                k = len(self._v)
                self._v.append(self.kdv(k - 1).integrate() * HALF)
            return self._v[n]

    def p_odd(self, n: int) -> DiffOp:
        """P_(2n+1)"""
        with self._lock:
            while len(self._p) <= n:
                k = len(self._p)
                vk = self.v(k)
                step = DiffOp(FORMAL, (vk.derive() * (-HALF), vk))
                self._p.append(step + self._p[k - 1] * self.L)
            return self._p[n]

    def _constant(self, i: int) -> DiffPoly:
        if i > MAX_CONSTANTS:
            raise ConstantsMismatchError(f"constant c{i} is not declared in the jet ring", symbol=f"c{i}")
        return DiffPoly.symbol(f"c{i}")

    def kdv_ext(self, n: int) -> DiffPoly:
        """KdV_n = kdv_n + sum_(l<n) c_(n-l) kdv_l"""
        result = self.kdv(n)
        for l in range(n):
            result = result + self._constant(n - l) * self.kdv(l)
        return result

    def phat(self, n: int) -> DiffOp:
        """P^_(2n+1) = P_(2n+1) + sum_(l<n) c_(n-l) P_(2l+1)"""
        result = self.p_odd(n)
        for l in range(n):
            result = result + DiffOp.scalar(FORMAL, self._constant(n - l)) * self.p_odd(l)
        return result

    def kdv_ext_and_phat(self, n: int):
        return self.kdv_ext(n), self.phat(n)

    def lax_check(self, n: int, extended: bool = False) -> bool:
        """[P_(2n+1), L] == kdv_n, or [P^_(2n+1), L] == KdV_n when extended"""
        if extended:
            op, expected = self.phat(n), self.kdv_ext(n)
        else:
            op, expected = self.p_odd(n), self.kdv(n)
        ok = op_commutator(op, self.L) == DiffOp.scalar(FORMAL, expected)
        self.logger.debug(f"Lax identity n={n} extended={extended}: {ok}")
        return ok

    def is_weight_homogeneous(self, n: int) -> bool:
        return self.kdv(n).weights() == {2 * n + 3}


@functools.lru_cache(maxsize=None)
def default_hierarchy() -> KdvHierarchy:
    return KdvHierarchy()


def kdv_n(cache: KdvHierarchy, n: int) -> DiffPoly:
    return cache.kdv(n)


def v_n(cache: KdvHierarchy, n: int) -> DiffPoly:
    return cache.v(n)


def p_odd(cache: KdvHierarchy, n: int) -> DiffOp:
    return cache.p_odd(n)


def kdv_ext_and_phat(cache: KdvHierarchy, n: int):
    return cache.kdv_ext_and_phat(n)


def lax_check(cache: KdvHierarchy, n: int, extended: bool = False) -> bool:
    return cache.lax_check(n, extended)

"""
Differential operators for kdvfactor

DiffOp is an element of R[d] with d*a = a*d + a'. One operator kernel serves
two coefficient domains: the formal jet domain (DiffPoly coefficients, used
for the hierarchy and the Lax identities) and concrete towers (FieldElem
coefficients, used for the spectral computations).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import comb
from typing import Any, Callable, Dict, List, Sequence, Tuple

from utils.exceptions import (DivisionByZeroOperatorError, IndexOutOfRangeError,
                              ModeMismatchError, OrderTooLowError)
from utils.logger import get_logger, log_performance

from .algebra import SymMatrix, det_cofactor, det_fraction_free
from .diffpoly import DiffPoly, jet_ring
from .fields import FieldElem, FieldTower

logger = get_logger(__name__)

DETERMINANT_METHODS: Dict[str, Callable] = {
    "bareiss": det_fraction_free,
    "cofactor": det_cofactor,
}


class CoefficientDomain(ABC):
    """Arithmetic interface the operator kernel needs from its coefficients"""

    mode: str = ""

    @abstractmethod
    def wrap(self, value) -> Any:
        """Coefficient from a number or a raw ring element"""

    @abstractmethod
    def raw(self, a) -> Any:
        """Raw sympy element of a coefficient (for matrices)"""

    @abstractmethod
    def derive(self, a) -> Any:
        pass

    @property
    def zero(self):
        return self.wrap(0)

    @property
    def one(self):
        return self.wrap(1)

    def invert(self, a):
        raise ModeMismatchError(f"coefficients of the {self.mode} domain cannot be inverted")


@dataclass(frozen=True)
class JetDomain(CoefficientDomain):
    """Formal mode: coefficients in the differential polynomial ring"""
    mode = "formal"

    def wrap(self, value) -> DiffPoly:
        if isinstance(value, DiffPoly):
            return value
        if hasattr(value, "ring") and value.ring == jet_ring():
            return DiffPoly(value)
        return DiffPoly.constant(value)

    def raw(self, a: DiffPoly):
        return a.poly

    def derive(self, a: DiffPoly) -> DiffPoly:
        return a.derive()


@dataclass(frozen=True)
class TowerDomain(CoefficientDomain):
    """Concrete mode: coefficients in a differential field tower"""
    tower: FieldTower
    mode = "concrete"

    def wrap(self, value) -> FieldElem:
        return self.tower.element(value)

    def raw(self, a: FieldElem):
        return a.value

    def derive(self, a: FieldElem) -> FieldElem:
        return a.derive()

    def invert(self, a: FieldElem) -> FieldElem:
        return a.invert()


FORMAL = JetDomain()


@dataclass(frozen=True)
class DiffOp:
    """
    Operator a_0 + a_1 d + ... + a_n d^n

    The coefficient tuple never ends in a zero; the zero operator has an
    empty tuple and order -1.
    """
    domain: CoefficientDomain
    coeffs: Tuple[Any, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        end = len(coeffs)
        while end and not coeffs[end - 1]:
            end -= 1
        object.__setattr__(self, "coeffs", coeffs[:end])

    @classmethod
    def from_coeffs(cls, domain: CoefficientDomain, coeffs: Sequence[Any]) -> "DiffOp":
        return cls(domain, tuple(domain.wrap(c) for c in coeffs))

    @classmethod
    def d(cls, domain: CoefficientDomain, power: int = 1) -> "DiffOp":
        return cls(domain, tuple(domain.zero for _ in range(power)) + (domain.one,))

    @classmethod
    def scalar(cls, domain: CoefficientDomain, a) -> "DiffOp":
        return cls(domain, (domain.wrap(a),))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else self.domain.zero

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.domain.zero

    def _check(self, other: "DiffOp") -> None:
        if self.domain != other.domain:
            raise ModeMismatchError(f"{self.domain.mode} operator combined with {other.domain.mode} operator")

    def _coerce(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            self._check(other)
            return other
        return DiffOp.scalar(self.domain, other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.domain, tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(self.domain, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return op_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return op_mul(self._coerce(other), self)

    def map(self, func) -> "DiffOp":
        return DiffOp(self.domain, tuple(func(a) for a in self.coeffs))

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.order, -1, -1):
            a = self.coeffs[i]
            if not a:
                continue
            mono = "" if i == 0 else ("d" if i == 1 else f"d^{i}")
            parts.append(f"({a.to_text()})*{mono}" if mono else f"({a.to_text()})")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()


def op_mul(p: DiffOp, q: DiffOp) -> DiffOp:
    """
    Product in R[d] using d^i b = sum_k C(i,k) b^(k) d^(i-k)

    Raises:
        ModeMismatchError: p and q have different coefficient domains
    """
    p._check(q)
    domain = p.domain
    if not p.coeffs or not q.coeffs:
        return DiffOp(domain, ())
    size = p.order + q.order + 1
    result: List[Any] = [domain.zero] * size
    for j, b in enumerate(q.coeffs):
        if not b:
            continue
        derivatives = [b]
        for _ in range(p.order):
            derivatives.append(domain.derive(derivatives[-1]))
        for i, a in enumerate(p.coeffs):
            if not a:
                continue
            for k in range(i + 1):
                bk = derivatives[k]
                if bk:
                    result[i - k + j] = result[i - k + j] + a * bk * comb(i, k)
    return DiffOp(domain, tuple(result))


def op_commutator(p: DiffOp, q: DiffOp) -> DiffOp:
    return op_mul(p, q) - op_mul(q, p)


def op_right_divide(p: DiffOp, q: DiffOp) -> Tuple[DiffOp, DiffOp]:
    """
    Right Euclidean division p = quotient * q + remainder

    Raises:
        DivisionByZeroOperatorError: q is zero
        ModeMismatchError: coefficients do not form a field
    """
    p._check(q)
    if q.is_zero:
        raise DivisionByZeroOperatorError()
    domain = p.domain
    inverse_lead = domain.invert(q.leading)
    quotient = DiffOp(domain, ())
    remainder = p
    while remainder.order >= q.order:
        shift = remainder.order - q.order
        term = DiffOp(domain, tuple(domain.zero for _ in range(shift)) + (remainder.leading * inverse_lead,))
        quotient = quotient + term
        remainder = remainder - op_mul(term, q)
    return quotient, remainder


def op_apply(p: DiffOp, f) -> Any:
    """sum a_i * f^(i) for a coefficient f"""
    domain = p.domain
    f = domain.wrap(f)
    total = domain.zero
    jet = f
    for i, a in enumerate(p.coeffs):
        if i:
            jet = domain.derive(jet)
        if a:
            total = total + a * jet
    return total


def _shift(p: DiffOp) -> DiffOp:
    """d * p"""
    domain = p.domain
    coeffs = [domain.zero] * (len(p.coeffs) + 1)
    for i, a in enumerate(p.coeffs):
        coeffs[i] = coeffs[i] + domain.derive(a)
        coeffs[i + 1] = coeffs[i + 1] + a
    return DiffOp(domain, tuple(coeffs))


def sylvester_matrix(p: DiffOp, q: DiffOp, k: int = 0) -> SymMatrix:
    """
    Coefficient matrix of d^(m-1-k) p, ..., p, d^(n-1-k) q, ..., q

    Rows come highest shift first, p block then q block; columns are the
    coefficients of d^(n+m-1-k) down to d^0 (n = ord p, m = ord q).

    Raises:
        IndexOutOfRangeError: k outside 0..min(n, m)-1
    """
    p._check(q)
    n, m = p.order, q.order
    if k < 0 or (k > 0 and k > min(n, m) - 1) or n < 0 or m < 0:
        raise IndexOutOfRangeError(f"subresultant index {k} for orders ({n}, {m})", index=k)
    width = n + m - k
    domain = p.domain
    rows = []
    for op, shifts in ((p, m - k), (q, n - k)):
        shifted = [op]
        for _ in range(shifts - 1):
            shifted.append(_shift(shifted[-1]))
        for row_op in reversed(shifted):
            rows.append([domain.raw(row_op.coeff(j)) for j in range(width - 1, -1, -1)])
    return SymMatrix.from_rows(rows)


def determinant(matrix: SymMatrix, domain: CoefficientDomain, method: str = "bareiss"):
    try:
        kernel = DETERMINANT_METHODS[method]
    except KeyError:
        raise ValueError(f"unknown determinant method '{method}'")
    return domain.wrap(kernel(matrix))


@log_performance
def diff_resultant(p: DiffOp, q: DiffOp, method: str = "bareiss"):
    """det S_0(p, q)"""
    if p.is_zero or q.is_zero:
        raise DivisionByZeroOperatorError("resultant with the zero operator")
    matrix = sylvester_matrix(p, q, 0)
    logger.debug(f"Sylvester matrix S_0 of size {matrix.rows}x{matrix.cols}")
    return determinant(matrix, p.domain, method)


@log_performance
def subresultant_L1(p: DiffOp, q: DiffOp, method: str = "bareiss") -> Tuple[Any, Any]:
    """
    Coefficients (det S_1^0, det S_1^1) of the first subresultant

    S_1^0 drops the column of d and S_1^1 the column of 1, so the
    subresultant operator is det S_1^0 + det S_1^1 * d.

    Raises:
        OrderTooLowError: min(ord p, ord q) < 2
    """
    if min(p.order, q.order) < 2:
        raise OrderTooLowError(f"first subresultant needs orders >= 2, got ({p.order}, {q.order})")
    matrix = sylvester_matrix(p, q, 1)
    d_column = matrix.cols - 2
    one_column = matrix.cols - 1
    det0 = determinant(matrix.delete_column(d_column), p.domain, method)
    det1 = determinant(matrix.delete_column(one_column), p.domain, method)
    return det0, det1


def schrodinger(domain: CoefficientDomain, u) -> DiffOp:
    """L = -d^2 + u"""
    return DiffOp(domain, (domain.wrap(u), domain.zero, domain.wrap(-1)))

"""
Exact arithmetic substrate for kdvfactor

Polynomials are sympy sparse ``PolyElement`` values over QQ and rational
functions are ``FracElement`` values of the matching ``FracField``; both use
graded lexicographic order over the declared symbol order. A FracElement is
always stored cancelled with an integer, primitive, positive-leading
denominator, so equality of rational functions is structural equality.

This module adds what the rest of the engine needs on top of that:
canonical text encoding, symbolic matrices with a fraction-free determinant,
square-free splitting, exact linear solving and substitution.
"""

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from utils.exceptions import (ConstantsMismatchError, NonSquareError,
                              ZeroDenominatorError, ZeroPolynomialError)
from utils.logger import log_performance

Scalar = Union[int, Fraction]

MONOMIAL_ORDER = grlex


@functools.lru_cache(maxsize=None)
def polynomial_ring(names: Tuple[str, ...]) -> PolyRing:
    """Polynomial ring over QQ in the given symbols (declared order)"""
    return PolyRing(tuple(sp.Symbol(name) for name in names), QQ, MONOMIAL_ORDER)


@functools.lru_cache(maxsize=None)
def rational_field(names: Tuple[str, ...]) -> FracField:
    """Field of rational functions over QQ in the given symbols"""
    return FracField(tuple(sp.Symbol(name) for name in names), QQ, MONOMIAL_ORDER)


def symbol_names(ring_or_field) -> Tuple[str, ...]:
    return tuple(str(s) for s in ring_or_field.symbols)


def generator(ring_or_field, name: str):
    """Generator of a ring or field by symbol name"""
    names = symbol_names(ring_or_field)
    try:
        return ring_or_field.gens[names.index(name)]
    except ValueError:
        raise ConstantsMismatchError(f"symbol '{name}' is not declared in {names}", symbol=name)


def to_qq(value):
    """Convert int, Fraction or sympy Rational to a QQ element"""
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, sp.Rational):
        return QQ(int(value.p), int(value.q))
    return QQ.convert(value)


def qq_to_fraction(c) -> Fraction:
    return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))


def as_rational(e) -> Optional[Fraction]:
    """The rational number represented by e, or None when e involves symbols"""
    if isinstance(e, FracElement):
        if e.numer.is_ground and e.denom.is_ground:
            return qq_to_fraction(e.numer.LC) / qq_to_fraction(e.denom.LC)
        return None
    if isinstance(e, PolyElement):
        return qq_to_fraction(e.LC) if e.is_ground else None
    return Fraction(e)


def as_poly(f: FracElement) -> Optional[PolyElement]:
    """f as a polynomial with rational coefficients, or None if it has a proper denominator"""
    if not f.denom.is_ground:
        return None
    return f.numer.quo_ground(f.denom.LC)


def ratfun_normalize(num: PolyElement, den: PolyElement) -> FracElement:
    """
    Canonical rational function num/den

    Args:
        num: Numerator polynomial
        den: Denominator polynomial of the same ring

    Returns:
        Cancelled FracElement with normalized denominator
    """
    if not den:
        raise ZeroDenominatorError()
    return num.ring.to_field().new(num, den)


# Canonical text encoding

def format_rational(c) -> str:
    q = qq_to_fraction(c) if not isinstance(c, Fraction) else c
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_monomial(monom: Sequence[int], names: Sequence[str]) -> str:
    factors = []
    for name, exp in zip(names, monom):
        if exp == 1:
            factors.append(name)
        elif exp > 1:
            factors.append(f"{name}^{exp}")
    return "*".join(factors)


def format_poly(p: PolyElement, names: Optional[Sequence[str]] = None) -> str:
    """Sorted terms, explicit ^ exponents, * products, rationals as p/q"""
    if not p:
        return "0"
    names = names or symbol_names(p.ring)
    pieces = []
    for monom, coeff in p.terms():
        q = qq_to_fraction(coeff)
        mono = format_monomial(monom, names)
        magnitude = abs(q)
        if not mono:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{format_rational(magnitude)}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if q < 0 else body)
        else:
            pieces.append(f" - {body}" if q < 0 else f" + {body}")
    return "".join(pieces)


def _needs_parentheses(text: str) -> bool:
    body = text[1:] if text.startswith("-") else text
    return any(op in body for op in ("+", " - ", "*", "/"))


def format_ratfun(f: FracElement, names: Optional[Sequence[str]] = None) -> str:
    num = format_poly(f.numer, names)
    if f.denom == 1:
        return num
    den = format_poly(f.denom, names)
    if len(f.numer) > 1:
        num = f"({num})"
    if _needs_parentheses(den):
        den = f"({den})"
    return f"{num}/{den}"


# Matrices and determinants

@dataclass(frozen=True)
class SymMatrix:
    """Rectangular matrix of polynomials or rational functions, row-major"""
    rows: int
    cols: int
    entries: Tuple[Any, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> "SymMatrix":
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise ValueError("rows of different length")
        return cls(len(rows), width, tuple(e for r in rows for e in r))

    def __getitem__(self, index: Tuple[int, int]):
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Any, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List[Any]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def delete_column(self, j: int) -> "SymMatrix":
        return SymMatrix.from_rows([r[:j] + r[j + 1:] for r in self.to_rows()])

    def map(self, func) -> "SymMatrix":
        return SymMatrix(self.rows, self.cols, tuple(func(e) for e in self.entries))


def _zero_one(sample):
    if isinstance(sample, FracElement):
        return sample.field.zero, sample.field.one
    return sample.ring.zero, sample.ring.one


def _bareiss(rows: List[List[PolyElement]], zero, one):
    n = len(rows)
    a = [list(r) for r in rows]
    sign = 1
    previous = one
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return zero
        pivot = a[k][k]
        for i in range(k + 1, n):
            lead = a[i][k]
            for j in range(k + 1, n):
                value = pivot * a[i][j] - lead * a[k][j]
                if previous != one:
                    value = value.exquo(previous)
                a[i][j] = value
        previous = pivot
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


@log_performance
def det_fraction_free(m: SymMatrix):
    """
    Exact determinant by Bareiss elimination

    Rational entries are handled by clearing each row's denominator, running
    the elimination over the polynomial ring and dividing the cleared
    content back.

    Args:
        m: Square matrix of PolyElement or FracElement entries

    Returns:
        Determinant in the entries' ring or field
    """
    if not m.is_square or m.rows == 0:
        raise NonSquareError(f"determinant of a {m.rows}x{m.cols} matrix", shape=(m.rows, m.cols))
    sample = m.entries[0]
    zero, one = _zero_one(sample)
    if not isinstance(sample, FracElement):
        return _bareiss(m.to_rows(), zero, one)

    field = sample.field
    ring = field.ring
    scale = ring.one
    rows = []
    for i in range(m.rows):
        entries = m.row(i)
        common = ring.one
        for e in entries:
            if e.denom != 1:
                common = common.lcm(e.denom)
        scale *= common
        rows.append([e.numer * common.exquo(e.denom) for e in entries])
    det = _bareiss(rows, ring.zero, ring.one)
    return field.new(det, scale)


def det_cofactor(m: SymMatrix):
    """Laplace expansion along rows with memoized minors (cross-check mode)"""
    if not m.is_square or m.rows == 0:
        raise NonSquareError(f"determinant of a {m.rows}x{m.cols} matrix", shape=(m.rows, m.cols))
    n = m.rows
    zero, one = _zero_one(m.entries[0])
    memo: Dict[Tuple[int, Tuple[int, ...]], Any] = {}

    def minor(row: int, cols: Tuple[int, ...]):
        if row == n:
            return one
        key = (row, cols)
        if key not in memo:
            total = zero
            for idx, c in enumerate(cols):
                e = m[row, c]
                if not e:
                    continue
                term = e * minor(row + 1, cols[:idx] + cols[idx + 1:])
                total = total + term if idx % 2 == 0 else total - term
            memo[key] = total
        return memo[key]

    return minor(0, tuple(range(n)))


# Square-free splitting

def normalize_content(p: PolyElement) -> PolyElement:
    """Integer primitive associate of p with positive leading coefficient"""
    if not p:
        return p
    _, p = p.clear_denoms()
    _, p = p.primitive()
    return -p if p.LC < 0 else p


def compact(p: PolyElement) -> PolyElement:
    """Move p into the smallest polynomial ring holding the symbols it uses"""
    names = symbol_names(p.ring)
    used = [i for i in range(len(names)) if any(m[i] for m in p.monoms())]
    if not used:
        used = [0]
    return p.set_ring(polynomial_ring(tuple(names[i] for i in used)))


def _main_variable(p: PolyElement, var: Optional[str]):
    if var is not None:
        return generator(p.ring, var)
    names = symbol_names(p.ring)
    if "lambda" in names:
        return generator(p.ring, "lambda")
    for i, name in enumerate(names):
        if p.degree(i) > 0:
            return p.ring.gens[i]
    return p.ring.gens[0]


def squarefree_part(p: PolyElement, var: Optional[str] = None) -> PolyElement:
    """
    p / gcd(p, dp/dvar), content-normalized

    Args:
        p: Nonzero polynomial, univariate in var over the other symbols
        var: Main variable (defaults to lambda when declared)
    """
    if not p:
        raise ZeroPolynomialError("square-free part of the zero polynomial")
    x = _main_variable(p, var)
    derivative = p.diff(x)
    if not derivative:
        return normalize_content(p)
    return normalize_content(p.exquo(p.gcd(derivative)))


def squarefree_decomposition(p: PolyElement, var: Optional[str] = None) -> List[Tuple[PolyElement, int]]:
    """Factors of p depending on var with their multiplicities"""
    if not p:
        raise ZeroPolynomialError("square-free decomposition of the zero polynomial")
    x = _main_variable(p, var)
    index = p.ring.gens.index(x)
    small = compact(p)
    _, factors = small.sqf_list()
    result = []
    for factor, multiplicity in factors:
        factor = factor.set_ring(p.ring)
        if factor.degree(index) > 0:
            result.append((normalize_content(factor), multiplicity))
    return result


def odd_part(p: PolyElement, var: Optional[str] = None) -> PolyElement:
    """Product of the var-dependent square-free factors of odd multiplicity"""
    result = p.ring.one
    for factor, multiplicity in squarefree_decomposition(p, var):
        if multiplicity % 2:
            result *= factor
    return result


# Substitution

def _image(field: FracField, images: Mapping[str, Any], name: str) -> FracElement:
    if name in images:
        value = images[name]
        if isinstance(value, FracElement):
            return value if value.field == field else value.set_field(field)
        if isinstance(value, PolyElement):
            return field.new(value.set_ring(field.ring), field.ring.one)
        return field.ground_new(to_qq(value))
    return generator(field, name)


def evaluate_poly(p: PolyElement, field: FracField, images: Mapping[str, Any]) -> FracElement:
    """
    Substitute symbols of p by rational functions of field

    Symbols without an image map to the generator of the same name in field.
    The sum is formed over the common denominator of all images.
    """
    names = symbol_names(p.ring)
    if not p:
        return field.zero
    used = [i for i in range(len(names)) if any(m[i] for m in p.monoms())]
    top = {i: max(m[i] for m in p.monoms()) for i in used}
    numer = {}
    denom = {}
    for i in used:
        value = _image(field, images, names[i])
        numer[i] = value.numer
        denom[i] = value.denom if value.denom != 1 else None

    power_cache: Dict[Tuple[str, int, int], PolyElement] = {}

    def power(kind: str, i: int, e: int) -> PolyElement:
        key = (kind, i, e)
        if key not in power_cache:
            base = numer[i] if kind == "n" else denom[i]
            power_cache[key] = base ** e
        return power_cache[key]

    ring = field.ring
    total = ring.zero
    for monom, coeff in p.terms():
        term = ring.ground_new(coeff)
        for i in used:
            e = monom[i]
            if e:
                term *= power("n", i, e)
            if denom[i] is not None and top[i] - e:
                term *= power("d", i, top[i] - e)
        total += term
    common = ring.one
    for i in used:
        if denom[i] is not None:
            common *= power("d", i, top[i])
    return field.new(total, common)


def evaluate_ratfun(f: FracElement, field: FracField, images: Mapping[str, Any]) -> FracElement:
    num = evaluate_poly(f.numer, field, images)
    den = evaluate_poly(f.denom, field, images)
    if not den:
        raise ZeroDenominatorError("substitution annihilates the denominator")
    return num / den


def split_by_symbols(p: PolyElement, names: Sequence[str]) -> Dict[Tuple[int, ...], PolyElement]:
    """
    Group p by the exponents of the given symbols

    Returns a map from exponent tuples (in the order of names) to the
    polynomial coefficient, which is free of those symbols.
    """
    ring = p.ring
    all_names = symbol_names(ring)
    idx = [all_names.index(n) for n in names if n in all_names]
    groups: Dict[Tuple[int, ...], Dict[Tuple[int, ...], Any]] = {}
    for monom, coeff in p.terms():
        key = tuple(monom[i] for i in idx)
        rest = tuple(0 if i in idx else e for i, e in enumerate(monom))
        groups.setdefault(key, {})[rest] = coeff
    return {key: ring.from_dict(terms) for key, terms in groups.items()}


# Linear algebra over a rational function field

@dataclass(frozen=True)
class LinearSolution:
    """Particular solution (None when inconsistent), nullspace basis and rank"""
    particular: Optional[Tuple[FracElement, ...]]
    nullspace: Tuple[Tuple[FracElement, ...], ...]
    rank: int

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def unique(self) -> bool:
        return self.consistent and not self.nullspace


def solve_linear_system(matrix: Sequence[Sequence[FracElement]], rhs: Sequence[FracElement],
                        field: FracField) -> LinearSolution:
    """
    Gauss-Jordan elimination over field for matrix * x = rhs

    Args:
        matrix: Rows of coefficients
        rhs: Right-hand side, one entry per row
        field: Field holding every entry

    Returns:
        LinearSolution
    """
    n = len(matrix[0]) if matrix else 0
    zero, one = field.zero, field.one
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    m = len(aug)
    pivots: List[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c]), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        inverse = one / aug[r][c]
        aug[r] = [e * inverse if e else e for e in aug[r]]
        for i in range(m):
            factor = aug[i][c]
            if i != r and factor:
                aug[i] = [a - factor * b if b else a for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break

    consistent = all(not aug[i][n] for i in range(r, m))
    particular = None
    if consistent:
        values = [zero] * n
        for row_index, c in enumerate(pivots):
            values[c] = aug[row_index][n]
        particular = tuple(values)

    nullspace = []
    for free in (c for c in range(n) if c not in pivots):
        vector = [zero] * n
        vector[free] = one
        for row_index, c in enumerate(pivots):
            vector[c] = -aug[row_index][free]
        nullspace.append(tuple(vector))
    return LinearSolution(particular, tuple(nullspace), len(pivots))

"""Exact rational polynomial arithmetic and the equal-coefficients argument.

Everything here is exact (``fractions.Fraction`` coefficients, arbitrary
precision); no tolerances appear anywhere in this module.  The headline
result: a rational polynomial of degree < d that vanishes at ``w**n`` for
every proper divisor n of d has all coefficients equal.  The divisibility
route used to conclude this — successive exact division by the cyclotomic
polynomials ``Phi_{d/n}`` — is itself the checkable artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


def proper_divisors(d: int) -> list[int]:
    """Ascending divisors of d excluding d itself."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return [n for n in range(1, d) if d % n == 0]


@dataclass(frozen=True)
class RationalPolynomial:
    """Dense polynomial over the rationals, coefficients ascending in degree.

    Normalized so the leading coefficient is nonzero (the zero polynomial
    is the empty tuple, degree -1).
    """

    coefficients: tuple[Fraction, ...]

    @classmethod
    def from_list(cls, coeffs) -> RationalPolynomial:
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return cls(tuple(c))

    @classmethod
    def zero(cls) -> RationalPolynomial:
        return cls(())

    @classmethod
    def constant(cls, value) -> RationalPolynomial:
        return cls.from_list([value])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: RationalPolynomial) -> RationalPolynomial:
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return RationalPolynomial.from_list(
            [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
        )

    def __sub__(self, other: RationalPolynomial) -> RationalPolynomial:
        return self + other.scale(-1)

    def scale(self, factor) -> RationalPolynomial:
        f = Fraction(factor)
        return RationalPolynomial.from_list([c * f for c in self.coefficients])

    def __mul__(self, other: RationalPolynomial) -> RationalPolynomial:
        if self.is_zero() or other.is_zero():
            return RationalPolynomial.zero()
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return RationalPolynomial.from_list(out)

    def evaluate(self, x: complex) -> complex:
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * x + complex(c)
        return acc

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            term = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if i > 0 and abs(c) == 1:
                parts.append(term if c > 0 else f"-{term}")
            elif i == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*{term}")
        joined = " + ".join(parts)
        return joined.replace("+ -", "- ")


def poly_divmod(
    f: RationalPolynomial, g: RationalPolynomial
) -> tuple[RationalPolynomial, RationalPolynomial]:
    """Euclidean division: f = q*g + r exactly with deg r < deg g."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(f.coefficients)
    gc = g.coefficients
    dg = g.degree
    lead = gc[-1]
    if f.degree < dg:
        return RationalPolynomial.zero(), f
    quot = [Fraction(0)] * (f.degree - dg + 1)
    for i in range(f.degree - dg, -1, -1):
        c = rem[i + dg] / lead
        quot[i] = c
        if c != 0:
            for j, gj in enumerate(gc):
                rem[i + j] -= c * gj
    return RationalPolynomial.from_list(quot), RationalPolynomial.from_list(rem[:dg])


def _x_power_minus_one(n: int) -> RationalPolynomial:
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[0] = Fraction(-1)
    coeffs[n] = Fraction(1)
    return RationalPolynomial(tuple(coeffs))


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> RationalPolynomial:
    """The n-th cyclotomic polynomial Phi_n, by recursive exact division.

    Phi_n = (x^n - 1) / prod_{m | n, m < n} Phi_m; integer coefficients.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return RationalPolynomial.from_list([-1, 1])
    num = _x_power_minus_one(n)
    for m in range(1, n):
        if n % m == 0:
            q, r = poly_divmod(num, cyclotomic_poly(m))
            if not r.is_zero():
                raise ArithmeticError(f"inexact division while building Phi_{n}")
            num = q
    return num


def all_ones_poly(d: int) -> RationalPolynomial:
    """1 + x + ... + x^(d-1)."""
    return RationalPolynomial(tuple([Fraction(1)] * d))


def check_product_identity(d: int) -> bool:
    """prod_i Phi_{d/n_i} over proper divisors n_i equals 1 + x + ... + x^(d-1)."""
    prod = RationalPolynomial.constant(1)
    for n in proper_divisors(d):
        prod = prod * cyclotomic_poly(d // n)
    return prod == all_ones_poly(d)


@dataclass(frozen=True)
class EqualCoefficientsVerdict:
    """Outcome of the divisibility argument on a degree < d polynomial.

    ``equal`` is True iff successive division by Phi_{d/n} (n running over
    the proper divisors of d) leaves zero remainders and a constant final
    quotient; ``constant`` is then the common coefficient.  Otherwise
    ``failed_divisor`` names the first n whose cyclotomic division left the
    nonzero ``remainder``.
    """

    equal: bool
    constant: Fraction | None = None
    failed_divisor: int | None = None
    remainder: RationalPolynomial | None = None


def lemma2_conclude(w: RationalPolynomial, d: int) -> EqualCoefficientsVerdict:
    """Run the equal-coefficients argument on ``w`` (degree <= d-1).

    Divides by Phi_{d/n} for each proper divisor n in ascending order,
    requiring exact-zero remainders; accepts iff every remainder vanishes
    and the final quotient is a constant.
    """
    if w.degree > d - 1:
        raise ValueError(f"degree {w.degree} exceeds d-1 = {d - 1}")
    if w.is_zero():
        return EqualCoefficientsVerdict(equal=True, constant=Fraction(0))
    quotient = w
    for n in proper_divisors(d):
        quotient, rem = poly_divmod(quotient, cyclotomic_poly(d // n))
        if not rem.is_zero():
            return EqualCoefficientsVerdict(equal=False, failed_divisor=n, remainder=rem)
    if quotient.degree > 0:
        # Unreachable for inputs of degree <= d-1: the divisor product has
        # degree exactly d-1.
        return EqualCoefficientsVerdict(equal=False, failed_divisor=d, remainder=quotient)
    return EqualCoefficientsVerdict(equal=True, constant=quotient.coefficients[0])

"""Exact rational functions of one variable ``u`` with rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

u = sp.Symbol("u", positive=True)


def poly(expr) -> sp.Poly:
    return sp.Poly(expr, u, domain=sp.QQ)


def primitive(p: sp.Poly) -> sp.Poly:
    """Integer-coefficient multiple of ``p`` with unit content and positive
    leading coefficient."""
    _, q = p.clear_denoms(convert=True)
    q = q.primitive()[1]
    if q.LC() < 0:
        q = -q
    return poly(q.as_expr())


def strip_u_powers(p: sp.Poly) -> sp.Poly:
    """Divide out the largest power of ``u`` dividing ``p``."""
    coeffs = p.all_coeffs()
    k = 0
    while k < len(coeffs) - 1 and coeffs[-1 - k] == 0:
        k += 1
    return p.exquo(poly(u**k)) if k else p


class _FloatPoly:
    """Float copy of an exact polynomial, scaled for overflow-free Horner."""

    def __init__(self, p: sp.Poly):
        exact = [sp.Rational(c) for c in p.all_coeffs()]
        big = max(abs(c) for c in exact)
        self.log_scale = float(sp.log(big).evalf(30)) if big != 0 else 0.0
        self.coeffs = np.array([float(c / big) if big != 0 else 0.0 for c in exact])
        self.degree = len(exact) - 1

    def horner(self, v, reverse=False):
        c = self.coeffs[::-1] if reverse else self.coeffs
        return np.polyval(c, v)


@dataclass(frozen=True, eq=False)
class RationalFn:
    """``numerator(u) / denominator(u)`` kept in lowest terms.

    Floating-point evaluation goes through :meth:`eval_log`, which takes
    ``log(u)`` and switches to the reversed polynomials for ``u > 1`` so
    that ``u = exp(700)`` neither overflows nor loses relative accuracy.
    """

    numerator: sp.Poly
    denominator: sp.Poly

    def __post_init__(self):
        if self.denominator.is_zero:
            raise ZeroDivisionError("denominator is identically zero")
        g = self.numerator.gcd(self.denominator)
        num, den = self.numerator.quo(g), self.denominator.quo(g)
        lc = den.LC()
        object.__setattr__(self, "numerator", poly((num * (1 / lc)).as_expr()))
        object.__setattr__(self, "denominator", poly((den * (1 / lc)).as_expr()))
        object.__setattr__(self, "_fnum", _FloatPoly(self.numerator))
        object.__setattr__(self, "_fden", _FloatPoly(self.denominator))

    @classmethod
    def from_expr(cls, expr) -> "RationalFn":
        num, den = sp.fraction(sp.together(sp.sympify(expr).subs(sp.Symbol("u"), u)))
        return cls(poly(num), poly(den))

    def as_expr(self):
        return self.numerator.as_expr() / self.denominator.as_expr()

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            return NotImplemented
        return (self.numerator * other.denominator - other.numerator * self.denominator).is_zero

    __hash__ = None

    def __repr__(self):
        return f"RationalFn({sp.factor(self.as_expr())})"

    def derivative(self) -> "RationalFn":
        a, b = self.numerator, self.denominator
        return RationalFn(a.diff(u) * b - a * b.diff(u), b * b)

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return RationalFn(self.numerator * other.numerator, self.denominator * other.denominator)
        return RationalFn(self.numerator * poly(other), self.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.numerator * other.denominator, self.denominator * other.numerator)

    def __neg__(self):
        return RationalFn(-self.numerator, self.denominator)

    def exact(self, value) -> sp.Rational:
        value = sp.Rational(value)
        return self.numerator.eval(value) / self.denominator.eval(value)

    def eval_log(self, log_u):
        """Evaluate at ``u = exp(log_u)``; accepts scalars or arrays."""
        t = np.asarray(log_u, dtype=float)
        fn, fd = self._fnum, self._fden
        small = t <= 0
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            out_small = fn.horner(np.exp(np.where(small, t, 0.0))) / fd.horner(np.exp(np.where(small, t, 0.0)))
            v = np.exp(-np.where(small, 0.0, t))
            # p(u) = u^deg * p_rev(1/u)
            out_large = (fn.horner(v, reverse=True) / fd.horner(v, reverse=True)
                         * np.exp((fn.degree - fd.degree) * np.where(small, 0.0, t)))
        out = np.where(small, out_small, out_large) * np.exp(fn.log_scale - fd.log_scale)
        return out if out.ndim else float(out)

    def __call__(self, value):
        v = np.asarray(value, dtype=float)
        if np.any(v <= 0):
            raise ValueError("float evaluation is only supported for u > 0")
        return self.eval_log(np.log(v))


def positive_roots(p: sp.Poly, eps: float = 1e-15) -> list[float]:
    """Sorted positive real roots of ``p`` via exact isolation and refinement."""
    sqf = poly(sp.sqf_part(p.as_expr()))
    roots = []
    for (a, b), _ in sqf.intervals(eps=sp.Rational(eps), inf=0):
        mid = (sp.Rational(a) + sp.Rational(b)) / 2
        if mid > 0:
            roots.append(float(mid))
    return sorted(roots)

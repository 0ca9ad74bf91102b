"""Exact piecewise-polynomial densities over rational arithmetic.

A density is stored in an internal coordinate ``t`` where every knot and
every polynomial coefficient is a :class:`~fractions.Fraction`; the actual
variable is ``x = c (t - shift)`` with ``c = sqrt(scale_sq)`` and
``scale_sq`` rational.  Keeping the single irrational factor symbolic until
evaluation means convolution, moments, and standardization checks are exact,
which is what makes these objects usable as oracles.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DomainError
from .hermite import hermite_coefficients

__all__ = ["PiecewisePolyDensity"]

Poly = tuple[Fraction, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _trim(c: list[Fraction]) -> Poly:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else _ZERO)
                  + (b[i] if i < len(b) else _ZERO) for i in range(n)])


def _pmul(a: Poly, b: Poly) -> Poly:
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _pscale(a: Poly, k: Fraction) -> Poly:
    return _trim([c * k for c in a])


def _pantider(a: Poly) -> Poly:
    return (_ZERO,) + tuple(c / (i + 1) for i, c in enumerate(a))


def _peval(a: Poly, x: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pcompose_linear(a: Poly, c0: Fraction, c1: Fraction) -> Poly:
    """``a(c0 + c1 z)`` as a polynomial in ``z``."""
    acc: Poly = (a[-1],)
    lin: Poly = (c0, c1)
    for coeff in reversed(a[:-1]):
        acc = _padd(_pmul(acc, lin), (coeff,))
    return acc


def _definite_integral(a: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    anti = _pantider(a)
    return _peval(anti, hi) - _peval(anti, lo)


def _convolve_pieces(knots_f: tuple[Fraction, ...], pieces_f: tuple[Poly, ...],
                     knots_g: tuple[Fraction, ...], pieces_g: tuple[Poly, ...],
                     ) -> tuple[tuple[Fraction, ...], tuple[Poly, ...]]:
    """Exact convolution of two piecewise polynomials.

    Output knots are all pairwise knot sums; on each output interval the
    contribution of a piece pair is the ``u``-antiderivative of
    ``p(u) q(z - u)`` evaluated between the active overlap bounds, which on
    that interval are fixed linear functions of ``z``.
    """
    f_iv = list(zip(knots_f, knots_f[1:], pieces_f))
    g_iv = list(zip(knots_g, knots_g[1:], pieces_g))

    # u-antiderivative of p(u) q(z-u), cached per piece pair as a list of
    # z-polynomials indexed by the power of u
    anti_cache: dict[tuple[int, int], list[Poly]] = {}

    def antiderivative(fi: int, gi: int) -> list[Poly]:
        key = (fi, gi)
        if key not in anti_cache:
            p = f_iv[fi][2]
            q = g_iv[gi][2]
            # q(z - u) expanded over powers of u
            by_u: list[Poly] = [() for _ in range(len(q))]
            for l, ql in enumerate(q):
                if ql == 0:
                    continue
                for m_ in range(l + 1):
                    zpow = l - m_
                    coeff = ql * math.comb(l, m_) * (-1) ** m_
                    mono = (_ZERO,) * zpow + (coeff,)
                    by_u[m_] = _padd(by_u[m_], mono) if by_u[m_] else mono
            by_u = [piece if piece else (_ZERO,) for piece in by_u]
            prod: list[Poly] = [(_ZERO,)] * (len(p) + len(by_u) - 1)
            for k, pk in enumerate(p):
                if pk == 0:
                    continue
                for m_, zpoly in enumerate(by_u):
                    prod[k + m_] = _padd(prod[k + m_], _pscale(zpoly, pk))
            anti = [(_ZERO,)]
            anti.extend(_pscale(zpoly, Fraction(1, j + 1))
                        for j, zpoly in enumerate(prod))
            anti_cache[key] = anti
        return anti_cache[key]

    def substitute(anti: list[Poly], c0: Fraction, c1: Fraction) -> Poly:
        # anti as a polynomial in u, evaluated at u = c0 + c1 z
        acc = anti[-1]
        lin: Poly = (c0, c1)
        for zpoly in reversed(anti[:-1]):
            acc = _padd(_pmul(acc, lin), zpoly)
        return acc

    cand = sorted({a + b for a in knots_f for b in knots_g})
    out_polys: list[Poly] = []
    for z0, z1 in zip(cand, cand[1:]):
        zm = (z0 + z1) / 2
        acc: Poly = (_ZERO,)
        for fi, (aL, aR, _) in enumerate(f_iv):
            for gi, (bL, bR, _) in enumerate(g_iv):
                lo_const = aL >= zm - bR
                hi_const = aR <= zm - bL
                lo_at_mid = aL if lo_const else zm - bR
                hi_at_mid = aR if hi_const else zm - bL
                if lo_at_mid >= hi_at_mid:
                    continue
                anti = antiderivative(fi, gi)
                upper = substitute(anti, aR, _ZERO) if hi_const \
                    else substitute(anti, -bL, _ONE)
                lower = substitute(anti, aL, _ZERO) if lo_const \
                    else substitute(anti, -bR, _ONE)
                acc = _padd(acc, _padd(upper, _pscale(lower, Fraction(-1))))
        out_polys.append(acc)
    return tuple(cand), tuple(out_polys)


@dataclass(frozen=True)
class PiecewisePolyDensity:
    """Piecewise polynomial density with an exact symbolic scale.

    ``pieces[i]`` holds the coefficients (constant term first) valid on
    ``[knots[i], knots[i+1])`` in the internal coordinate.  The density of
    the actual variable ``x = sqrt(scale_sq) (t - shift)`` is
    ``f(t) / sqrt(scale_sq)``.
    """

    knots: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]
    scale_sq: Fraction
    shift: Fraction

    def __post_init__(self) -> None:
        if len(self.knots) < 2 or len(self.pieces) != len(self.knots) - 1:
            raise DomainError("knots and pieces lengths are inconsistent")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise DomainError("knots must be strictly increasing")
        if self.scale_sq <= 0:
            raise DomainError("scale_sq must be positive")

    # -- exact queries -------------------------------------------------

    def mass(self) -> Fraction:
        return sum((_definite_integral(p, a, b)
                    for a, b, p in zip(self.knots, self.knots[1:], self.pieces)),
                   _ZERO)

    def moment_t(self, k: int) -> Fraction:
        """Exact ``E[T^k]`` in the internal coordinate."""
        if k < 0:
            raise DomainError("moment order must be >= 0")
        acc = _ZERO
        for a, b, p in zip(self.knots, self.knots[1:], self.pieces):
            mono = (_ZERO,) * k + (_ONE,)
            acc += _definite_integral(_pmul(mono, p), a, b)
        return acc

    def central_moment(self, k: int) -> Fraction:
        """Exact ``E[(T - shift)^k]``; equals ``E[X^k] / scale^k``."""
        acc = _ZERO
        for i in range(k + 1):
            acc += (math.comb(k, i) * (-self.shift) ** (k - i)
                    * self.moment_t(i))
        return acc

    def moment_x(self, k: int) -> float:
        """``E[X^k]`` as a float (exact up to one square root)."""
        cm = self.central_moment(k)
        if k % 2 == 0:
            return float(self.scale_sq ** (k // 2) * cm)
        return float(self.scale_sq ** ((k - 1) // 2) * cm) * self.scale

    def hermite_moment(self, m: int) -> float:
        """``E[H_m(X)]`` for the probabilists' Hermite polynomial ``H_m``.

        Even and odd powers are accumulated as separate exact rationals so
        the only rounding is the final square root and one multiply-add.
        """
        coeffs = hermite_coefficients(m)
        even = _ZERO
        odd = _ZERO
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            cm = self.central_moment(k)
            if k % 2 == 0:
                even += c * self.scale_sq ** (k // 2) * cm
            else:
                odd += c * self.scale_sq ** ((k - 1) // 2) * cm
        return float(even) + self.scale * float(odd)

    def is_standardized(self) -> bool:
        return (self.mass() == 1 and self.moment_t(1) == self.shift
                and self.scale_sq * self.central_moment(2) == 1)

    def is_symmetric(self) -> bool:
        """Exact mirror symmetry about the shift point."""
        n = len(self.pieces)
        for i in range(len(self.knots)):
            if self.knots[i] + self.knots[-1 - i] != 2 * self.shift:
                return False
        for i in range(n):
            mirrored = _pcompose_linear(self.pieces[n - 1 - i],
                                        2 * self.shift, Fraction(-1))
            if _trim(list(self.pieces[i])) != _trim(list(mirrored)):
                return False
        return True

    # -- float-facing interface ---------------------------------------

    @cached_property
    def scale(self) -> float:
        return math.sqrt(float(self.scale_sq))

    @cached_property
    def _float_knots(self) -> np.ndarray:
        return np.array([float(k) for k in self.knots])

    @cached_property
    def _float_pieces(self) -> list[np.ndarray]:
        return [np.array([float(c) for c in p]) for p in self.pieces]

    def x_knots(self) -> list[float]:
        return [self.scale * (float(k) - float(self.shift)) for k in self.knots]

    def support(self) -> tuple[float, float]:
        xs = self.x_knots()
        return xs[0], xs[-1]

    def evaluate(self, x: float) -> float:
        t = x / self.scale + float(self.shift)
        kn = self._float_knots
        if t < kn[0] or t > kn[-1]:
            return 0.0
        idx = min(bisect_right(kn, t) - 1, len(self.pieces) - 1)
        idx = max(idx, 0)
        acc = 0.0
        for c in self._float_pieces[idx][::-1]:
            acc = acc * t + c
        return acc / self.scale

    # -- constructions -------------------------------------------------

    def convolve(self, other: "PiecewisePolyDensity") -> "PiecewisePolyDensity":
        """Density of the sum of independent variables, same scale required."""
        if self.scale_sq != other.scale_sq:
            raise DomainError("convolution requires matching scale_sq")
        knots, polys = _convolve_pieces(self.knots, self.pieces,
                                        other.knots, other.pieces)
        return PiecewisePolyDensity(knots, polys, self.scale_sq,
                                    self.shift + other.shift)

    def scaled(self, ratio_sq: Fraction) -> "PiecewisePolyDensity":
        """Density of ``X * sqrt(ratio_sq)``."""
        ratio_sq = Fraction(ratio_sq)
        if ratio_sq <= 0:
            raise DomainError("ratio_sq must be positive")
        return PiecewisePolyDensity(self.knots, self.pieces,
                                    self.scale_sq * ratio_sq, self.shift)

    def normalized_sum(self, n: int) -> "PiecewisePolyDensity":
        """Density of ``(X_1 + ... + X_n) / sqrt(n)`` for iid copies."""
        if n < 1:
            raise DomainError("n must be >= 1")
        acc = self
        for _ in range(n - 1):
            acc = acc.convolve(self)
        return acc.scaled(Fraction(1, n))

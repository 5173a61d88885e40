"""Elliptic curves over Q in long Weierstrass form.

Points carry exact Fraction coordinates. A translation P -> P + t of infinite
order plays the role of the automorphism sigma throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

Rational = Union[int, Fraction, str]


class CurveError(ValueError):
    """Bad curve data or a point that does not lie on the curve."""


class SingularCurveError(CurveError):
    pass


class NotOnCurveError(CurveError):
    pass


class DegenerateTranslationError(CurveError):
    """Translation by a torsion point (sigma would have finite order)."""


class UnsupportedAutomorphismError(CurveError):
    """Only translations are supported as sigma."""


def as_rational(value: Rational) -> Fraction:
    """Parse ints, Fractions and strings like "-3/8" into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


@dataclass(frozen=True)
class Curve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q."""

    a1: Fraction = Fraction(0)
    a2: Fraction = Fraction(0)
    a3: Fraction = Fraction(0)
    a4: Fraction = Fraction(0)
    a6: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.discriminant == 0:
            raise SingularCurveError(f"singular Weierstrass equation {self}")

    @property
    def coefficients(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def discriminant(self) -> Fraction:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def cubic(self, x: Fraction) -> Fraction:
        """x^3 + a2 x^2 + a4 x + a6."""
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def linear(self, x: Fraction) -> Fraction:
        """a1 x + a3, the coefficient of y on the left-hand side."""
        return self.a1 * x + self.a3

    def contains(self, x: Fraction, y: Fraction) -> bool:
        return y * y + self.linear(x) * y == self.cubic(x)

    @property
    def infinity(self) -> "CurvePoint":
        return CurvePoint(self, None, None, trusted=True)

    def point(self, x: Rational, y: Rational) -> "CurvePoint":
        x, y = as_rational(x), as_rational(y)
        if not self.contains(x, y):
            raise NotOnCurveError(f"({x}, {y}) is not on {self}")
        return CurvePoint(self, x, y, trusted=True)

    def points_with_x(self, x: Rational) -> list:
        """All rational points with the given x-coordinate (0, 1 or 2 of them)."""
        x = as_rational(x)
        # y^2 + l y - c = 0
        l, c = self.linear(x), self.cubic(x)
        disc = l * l + 4 * c
        if disc < 0:
            return []
        root = _rational_sqrt(disc)
        if root is None:
            return []
        ys = sorted({(-l + root) / 2, (-l - root) / 2})
        return [CurvePoint(self, x, y, trusted=True) for y in ys]

    def __str__(self) -> str:
        a1, a2, a3, a4, a6 = self.coefficients
        return f"[{a1}, {a2}, {a3}, {a4}, {a6}]"


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    from math import isqrt

    n, d = q.numerator, q.denominator
    if n < 0:
        return None
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


class CurvePoint:
    """A rational point, or the point at infinity when x is None."""

    __slots__ = ("curve", "x", "y", "_hash")

    def __init__(self, curve: Curve, x: Optional[Fraction], y: Optional[Fraction],
                 trusted: bool = False):
        if not trusted and x is not None and not curve.contains(x, y):
            raise NotOnCurveError(f"({x}, {y}) is not on {curve}")
        self.curve = curve
        self.x = x
        self.y = y
        self._hash = hash((x, y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.curve == other.curve

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"

    def sort_key(self):
        if self.is_infinity:
            return (0, 0, 0)
        return (1, self.x, self.y)

    def __add__(self, other: "CurvePoint") -> "CurvePoint":
        return add_points(self.curve, self, other)

    def __neg__(self) -> "CurvePoint":
        return negate(self.curve, self)

    def __sub__(self, other: "CurvePoint") -> "CurvePoint":
        return add_points(self.curve, self, negate(self.curve, other))

    def __rmul__(self, n: int) -> "CurvePoint":
        return multiple(self.curve, n, self)

    def is_two_torsion(self) -> bool:
        return not self.is_infinity and 2 * self.y + self.curve.linear(self.x) == 0


def _check(c: Curve, P: CurvePoint) -> None:
    # points are validated when constructed, so only the curve is compared here
    if P.curve is not c and P.curve != c:
        raise NotOnCurveError(f"{P} belongs to a different curve")


def negate(c: Curve, P: CurvePoint) -> CurvePoint:
    _check(c, P)
    if P.is_infinity:
        return P
    return CurvePoint(c, P.x, -P.y - c.linear(P.x), trusted=True)


def add_points(c: Curve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-tangent addition with all five Weierstrass coefficients."""
    _check(c, P)
    _check(c, Q)
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + c.linear(x2) == 0:
            return c.infinity
        den = 2 * y1 + c.linear(x1)
        lam = (3 * x1 * x1 + 2 * c.a2 * x1 + c.a4 - c.a1 * y1) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + c.a1 * lam - c.a2 - x1 - x2
    y3 = -(lam + c.a1) * x3 - nu - c.a3
    return CurvePoint(c, x3, y3, trusted=True)


def multiple(c: Curve, n: int, P: CurvePoint) -> CurvePoint:
    """n * P by double-and-add; n may be negative."""
    _check(c, P)
    if n < 0:
        return multiple(c, -n, negate(c, P))
    result = c.infinity
    addend = P
    while n:
        if n & 1:
            result = add_points(c, result, addend)
        n >>= 1
        if n:
            addend = add_points(c, addend, addend)
    return result


# Rational torsion orders allowed by Mazur's theorem.
TORSION_ORDERS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12)


def is_infinite_order(c: Curve, t: CurvePoint) -> bool:
    _check(c, t)
    return all(not multiple(c, n, t).is_infinity for n in TORSION_ORDERS)


@dataclass(frozen=True)
class Translation:
    """sigma(P) = P + t for a point t of infinite order."""

    curve: Curve
    t: CurvePoint

    def __post_init__(self):
        _check(self.curve, self.t)
        if not is_infinite_order(self.curve, self.t):
            raise DegenerateTranslationError(f"{self.t} has finite order")

    def __call__(self, P: CurvePoint) -> CurvePoint:
        return add_points(self.curve, P, self.t)

    def power(self, P: CurvePoint, k: int) -> CurvePoint:
        """sigma^k(P) = P + k t."""
        return add_points(self.curve, P, multiple(self.curve, k, self.t))


def make_automorphism(curve: Curve, kind: str, t: Optional[CurvePoint] = None) -> Translation:
    if kind.strip().lower() != "translation":
        raise UnsupportedAutomorphismError(
            f"sigma of kind {kind!r} is not supported; only translations are")
    if t is None:
        raise CurveError("a translation needs its point t")
    return Translation(curve, t)


def sigma_twist_point(c: Curve, T: Translation, p: CurvePoint, j: int) -> CurvePoint:
    """p^{sigma^j}, which is sigma^{-j}(p) = p - j t."""
    _check(c, p)
    if j == 0:
        return p
    return add_points(c, p, multiple(c, -j, T.t))


def orbit_points(T: Translation, p: CurvePoint, indices) -> Iterator[CurvePoint]:
    """Yield p^{sigma^j} for j in indices (any iterable of ints)."""
    for j in indices:
        yield sigma_twist_point(T.curve, T, p, j)


# ---------------------------------------------------------------------------
# Reduction modulo a prime, used to certify that two points lie on
# different sigma-orbits.


def is_good_prime(c: Curve, ell: int) -> bool:
    if ell < 5:
        return False
    for a in c.coefficients:
        if a.denominator % ell == 0:
            return False
    disc = c.discriminant
    return disc.numerator % ell != 0


def _mod(q: Fraction, ell: int) -> int:
    return q.numerator * pow(q.denominator, -1, ell) % ell


class _ReducedCurve:
    def __init__(self, c: Curve, ell: int):
        self.ell = ell
        self.a = [_mod(a, ell) for a in c.coefficients]

    def reduce(self, P: CurvePoint):
        if P.is_infinity or P.x.denominator % self.ell == 0:
            return None
        return (_mod(P.x, self.ell), _mod(P.y, self.ell))

    def neg(self, P):
        if P is None:
            return None
        a1, _, a3, _, _ = self.a
        x, y = P
        return (x, (-y - a1 * x - a3) % self.ell)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        ell = self.ell
        a1, a2, a3, a4, a6 = self.a
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if (y1 + y2 + a1 * x2 + a3) % ell == 0:
                return None
            inv = pow((2 * y1 + a1 * x1 + a3) % ell, -1, ell)
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * inv % ell
        else:
            lam = (y2 - y1) * pow((x2 - x1) % ell, -1, ell) % ell
        nu = (y1 - lam * x1) % ell
        x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % ell
        y3 = (-(lam + a1) * x3 - nu - a3) % ell
        return (x3, y3)

    def cyclic_subgroup(self, T) -> set:
        seen = {None}
        cur = T
        while cur not in seen:
            seen.add(cur)
            cur = self.add(cur, T)
        return seen


def separated_mod_prime(T: Translation, P: CurvePoint, Q: CurvePoint, ell: int) -> bool:
    """True when P - Q is provably not a multiple of t, seen modulo ell.

    Reduction at a good prime is a group homomorphism, so P - Q = j t forces
    the reductions to satisfy the same relation.
    """
    if not is_good_prime(T.curve, ell):
        return False
    red = _ReducedCurve(T.curve, ell)
    diff = red.add(red.reduce(P), red.neg(red.reduce(Q)))
    return diff not in red.cyclic_subgroup(red.reduce(T.t))


def small_primes(limit: int) -> list:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(limit + 1) if sieve[i]]

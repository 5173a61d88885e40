"""The function field Q(E) and local analysis at rational points.

Every element is kept in the canonical form u(x) + v(x) y where u and v are
reduced rational functions with monic denominators. Local orders at affine
points are read off from power series in the uniformizer x - x_P.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from flint import fmpq, fmpq_poly

from .curve_core import Curve, CurvePoint

X_POLY = fmpq_poly([0, 1])
ONE_POLY = fmpq_poly([1])
ZERO_POLY = fmpq_poly([])


class FunctionFieldError(ArithmeticError):
    pass


class UnsupportedPointError(FunctionFieldError):
    """Local analysis requested at infinity or at a 2-torsion point."""


class UndefinedOrderError(FunctionFieldError):
    """The order of the zero function."""


class PoleMarker:
    """Result of evaluating a function at one of its poles."""

    __slots__ = ("order",)

    def __init__(self, order: int):
        self.order = order

    def __repr__(self):
        return f"PoleMarker(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, PoleMarker) and other.order == self.order

    def __hash__(self):
        return hash(("pole", self.order))


def to_fmpq(q) -> fmpq:
    if isinstance(q, fmpq):
        return q
    q = Fraction(q)
    return fmpq(q.numerator, q.denominator)


def to_fraction(q: fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


@lru_cache(maxsize=1 << 16)
def point_fmpq(x: Fraction, y: Fraction) -> tuple:
    return to_fmpq(x), to_fmpq(y)


def _normalize(num: fmpq_poly, den: fmpq_poly) -> tuple:
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return ZERO_POLY, ONE_POLY
    if den.degree() > 0:
        g = num.gcd(den)
        if g.degree() > 0:
            num = num // g
            den = den // g
    lead = den.leading_coefficient()
    if lead != 1:
        num = num / lead
        den = den / lead
    return num, den


def _rf_add(n1, d1, n2, d2):
    if n1.is_zero():
        return n2, d2
    if n2.is_zero():
        return n1, d1
    if d1 == d2:
        return _normalize(n1 + n2, d1)
    return _normalize(n1 * d2 + n2 * d1, d1 * d2)


def _rf_mul(n1, d1, n2, d2):
    if n1.is_zero() or n2.is_zero():
        return ZERO_POLY, ONE_POLY
    return _normalize(n1 * n2, d1 * d2)


def _lcm(a: fmpq_poly, b: fmpq_poly) -> fmpq_poly:
    if a == b:
        return a
    g = a.gcd(b)
    return (a * b) // g


class FnElem:
    """u(x) + v(x) y in the function field of a fixed curve."""

    __slots__ = ("curve", "un", "ud", "vn", "vd", "_hash")

    def __init__(self, curve: Curve, un, ud=ONE_POLY, vn=ZERO_POLY, vd=ONE_POLY,
                 normalized: bool = False):
        self.curve = curve
        un, ud, vn, vd = (p if isinstance(p, fmpq_poly) else fmpq_poly(p)
                          for p in (un, ud, vn, vd))
        if not normalized:
            un, ud = _normalize(un, ud)
            vn, vd = _normalize(vn, vd)
        self.un, self.ud, self.vn, self.vd = un, ud, vn, vd
        self._hash = None

    # constructors
    @classmethod
    def const(cls, curve: Curve, c) -> "FnElem":
        return cls(curve, fmpq_poly([to_fmpq(c)]))

    @classmethod
    def xfun(cls, curve: Curve) -> "FnElem":
        return cls(curve, X_POLY, normalized=True)

    @classmethod
    def yfun(cls, curve: Curve) -> "FnElem":
        return cls(curve, ZERO_POLY, ONE_POLY, ONE_POLY, ONE_POLY, normalized=True)

    @classmethod
    def from_polys(cls, curve: Curve, a, b, c=ONE_POLY) -> "FnElem":
        """(a(x) + b(x) y) / c(x)."""
        c = c if isinstance(c, fmpq_poly) else fmpq_poly(c)
        return cls(curve, a, c, b, c)

    # structure
    def is_zero(self) -> bool:
        return self.un.is_zero() and self.vn.is_zero()

    def __eq__(self, other):
        if not isinstance(other, FnElem):
            return NotImplemented
        return (self.un == other.un and self.ud == other.ud
                and self.vn == other.vn and self.vd == other.vd)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(tuple(p.coeffs()) for p in
                                    (self.un, self.ud, self.vn, self.vd)))
        return self._hash

    def __repr__(self):
        def rf(n, d):
            if d.is_one():
                return f"({n})"
            return f"({n})/({d})"
        if self.vn.is_zero():
            return f"FnElem[{rf(self.un, self.ud)}]"
        return f"FnElem[{rf(self.un, self.ud)} + {rf(self.vn, self.vd)}*y]"

    def _same(self, other: "FnElem"):
        if other.curve is not self.curve and other.curve != self.curve:
            raise FunctionFieldError("elements of different function fields")

    def __add__(self, other):
        if not isinstance(other, FnElem):
            other = FnElem.const(self.curve, other)
        self._same(other)
        un, ud = _rf_add(self.un, self.ud, other.un, other.ud)
        vn, vd = _rf_add(self.vn, self.vd, other.vn, other.vd)
        return FnElem(self.curve, un, ud, vn, vd, normalized=True)

    __radd__ = __add__

    def __neg__(self):
        return FnElem(self.curve, -self.un, self.ud, -self.vn, self.vd, normalized=True)

    def __sub__(self, other):
        if not isinstance(other, FnElem):
            other = FnElem.const(self.curve, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FnElem":
        c = to_fmpq(c)
        if c == 0:
            return FnElem(self.curve, ZERO_POLY, normalized=True)
        return FnElem(self.curve, self.un * c, self.ud, self.vn * c, self.vd, normalized=True)

    def __mul__(self, other):
        if not isinstance(other, FnElem):
            return self.scale(other)
        self._same(other)
        c = self.curve
        f = fmpq_poly([to_fmpq(c.a6), to_fmpq(c.a4), to_fmpq(c.a2), 1])
        lin = fmpq_poly([to_fmpq(c.a3), to_fmpq(c.a1)])
        # (u1 + v1 y)(u2 + v2 y) with y^2 = f - lin*y
        uu = _rf_mul(self.un, self.ud, other.un, other.ud)
        vv = _rf_mul(self.vn, self.vd, other.vn, other.vd)
        uv = _rf_mul(self.un, self.ud, other.vn, other.vd)
        vu = _rf_mul(self.vn, self.vd, other.un, other.ud)
        un, ud = _rf_add(*uu, *_rf_mul(vv[0] * f, vv[1], ONE_POLY, ONE_POLY))
        vn, vd = _rf_add(*_rf_add(*uv, *vu), -vv[0] * lin, vv[1])
        return FnElem(c, un, ud, vn, vd, normalized=True)

    __rmul__ = __mul__

    def conjugate(self) -> "FnElem":
        """Image under y -> -y - a1 x - a3 (the negation map on E)."""
        c = self.curve
        lin = fmpq_poly([to_fmpq(c.a3), to_fmpq(c.a1)])
        un, ud = _rf_add(self.un, self.ud, -self.vn * lin, self.vd)
        return FnElem(c, un, ud, -self.vn, self.vd, normalized=True)

    def norm(self) -> tuple:
        """f * conjugate(f), a rational function of x, as (num, den)."""
        p = self * self.conjugate()
        return p.un, p.ud

    def inverse(self) -> "FnElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        nn, nd = self.norm()
        conj = self.conjugate()
        return conj * FnElem(self.curve, nd, nn)

    def __truediv__(self, other):
        if not isinstance(other, FnElem):
            return self.scale(1 / to_fmpq(other))
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = FnElem.const(self.curve, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def common_form(self) -> tuple:
        """(A, B, C) with self = (A + B y) / C, C monic."""
        C = _lcm(self.ud, self.vd)
        A = self.un * (C // self.ud)
        B = self.vn * (C // self.vd)
        return A, B, C


def ff_add(f: FnElem, g: FnElem) -> FnElem:
    return f + g


def ff_mul(f: FnElem, g: FnElem) -> FnElem:
    return f * g


def ff_inv(f: FnElem) -> FnElem:
    return f.inverse()


# ---------------------------------------------------------------------------
# local analysis


def _require_local(P: CurvePoint) -> None:
    if P.is_infinity:
        raise UnsupportedPointError("use ord_at_infinity for the point at infinity")
    if P.is_two_torsion():
        raise UnsupportedPointError(f"{P} is 2-torsion; x - x_P is not a uniformizer there")


class _YSeries:
    """Power series y(t) with t = x - x_P on the branch through P."""

    def __init__(self, P: CurvePoint):
        c = P.curve
        self.x0, self.y0 = point_fmpq(P.x, P.y)
        x0 = self.x0
        a1, a2, a3, a4, a6 = (to_fmpq(a) for a in c.coefficients)
        self.a1 = a1
        shift = fmpq_poly([x0, 1])
        cubic = fmpq_poly([a6, a4, a2, 1])(shift)
        # g(t) = cubic(x0+t) - y0^2 - (a1 (x0+t) + a3) y0
        g = cubic - fmpq_poly([self.y0 * self.y0 + (a1 * x0 + a3) * self.y0, a1 * self.y0])
        self.g = [g.coeffs()[k] if k <= g.degree() else fmpq(0) for k in range(4)]
        self.lead = 2 * self.y0 + a1 * x0 + a3
        self.w = [self.y0]

    def coeffs(self, n: int) -> list:
        w, a1, lead = self.w, self.a1, self.lead
        while len(w) < n:
            k = len(w)
            acc = self.g[k] if k < 4 else fmpq(0)
            acc -= a1 * w[k - 1]
            for i in range(1, k):
                acc -= w[i] * w[k - i]
            w.append(acc / lead)
        return w[:n]


@lru_cache(maxsize=4096)
def y_series(P: CurvePoint) -> _YSeries:
    _require_local(P)
    return _YSeries(P)


def _series_mul(a: list, b: list, n: int) -> list:
    out = [fmpq(0)] * n
    for i, ai in enumerate(a[:n]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: n - i]):
            out[i + j] += ai * bj
    return out


def _poly_series(p: fmpq_poly, x0: fmpq, n: int) -> list:
    q = p(fmpq_poly([x0, 1])) if p.degree() > 0 else p
    cs = q.coeffs()
    return [cs[k] if k < len(cs) else fmpq(0) for k in range(n)]


def _valuation(series: list):
    for k, c in enumerate(series):
        if c != 0:
            return k
    return None


def _x_multiplicity(C: fmpq_poly, x0: fmpq) -> int:
    m = 0
    lin = fmpq_poly([-x0, 1])
    while C.degree() > 0 and C(x0) == 0:
        C = C // lin
        m += 1
    return m


def laurent_expansion(f: FnElem, P: CurvePoint, count: int) -> tuple:
    """(v, coeffs): f = sum coeffs[k] t^(v+k) + O(t^(v+count)), t = x - x_P.

    v is the exact order of f at P.
    """
    _require_local(P)
    if f.is_zero():
        raise UndefinedOrderError("the zero function has no order")
    ys = y_series(P)
    x0 = ys.x0
    A, B, C = f.common_form()
    m = _x_multiplicity(C, x0)
    # the order of A + B y at P is at most the x-degree of its norm
    cap = max(2 * A.degree(), 2 * B.degree() + 3, 0) + 1
    n = cap + count
    num = _poly_series(A, x0, n)
    if not B.is_zero():
        yb = _series_mul(_poly_series(B, x0, n), ys.coeffs(n), n)
        num = [a + b for a, b in zip(num, yb)]
    v = _valuation(num)
    if v is None:
        raise FunctionFieldError("numerator series vanished past its degree bound")
    Cred = C // (fmpq_poly([-x0, 1]) ** m) if m else C
    cser = _poly_series(Cred, x0, count)
    # divide num[v:] by cser
    top = num[v: v + count]
    top += [fmpq(0)] * (count - len(top))
    inv0 = 1 / cser[0]
    quot = []
    for k in range(count):
        acc = top[k]
        for i in range(1, k + 1):
            acc -= cser[i] * quot[k - i]
        quot.append(acc * inv0)
    return v - m, quot


def ord_at(f: FnElem, P: CurvePoint) -> int:
    if P.is_infinity:
        return ord_at_infinity(f)
    if f.is_zero():
        raise UndefinedOrderError("the zero function has no order")
    x0 = point_fmpq(P.x, P.y)[0]
    A, B, C = f.common_form()
    if C(x0) != 0 and A(x0) + B(x0) * point_fmpq(P.x, P.y)[1] != 0:
        return 0
    return laurent_expansion(f, P, 1)[0]


def ord_at_infinity(f: FnElem) -> int:
    if f.is_zero():
        raise UndefinedOrderError("the zero function has no order")
    orders = []
    if not f.un.is_zero():
        orders.append(-2 * (f.un.degree() - f.ud.degree()))
    if not f.vn.is_zero():
        orders.append(-2 * (f.vn.degree() - f.vd.degree()) - 3)
    # the two parities differ, so no cancellation can happen
    return min(orders)


def local_expansion(f: FnElem, P: CurvePoint, order: int) -> list:
    """Coefficients of t^0 .. t^(order-1) of f at P, with t = x - x_P."""
    if order < 1:
        raise ValueError("order must be at least 1")
    _require_local(P)
    if f.is_zero():
        return [Fraction(0)] * order
    v, cs = laurent_expansion(f, P, order)
    if v < 0:
        raise FunctionFieldError(f"f has a pole of order {-v} at {P}")
    out = [fmpq(0)] * v + cs
    return [to_fraction(c) for c in out[:order]]


def value_fmpq(f: FnElem, P: CurvePoint):
    """f(P) as fmpq, or a PoleMarker. Fast path when no denominator vanishes."""
    if P.is_infinity:
        raise UnsupportedPointError("evaluate at infinity is undefined; use ord_at_infinity")
    x0, y0 = point_fmpq(P.x, P.y)
    du = f.ud(x0)
    dv = f.vd(x0)
    if du != 0 and dv != 0:
        val = f.un(x0) / du
        if not f.vn.is_zero():
            val += f.vn(x0) / dv * y0
        return val
    v, cs = laurent_expansion(f, P, 1)
    if v < 0:
        return PoleMarker(-v)
    return cs[0] if v == 0 else fmpq(0)


def evaluate(f: FnElem, P: CurvePoint):
    """f(P) as a Fraction, or a PoleMarker when f has a pole at P."""
    val = value_fmpq(f, P)
    if isinstance(val, PoleMarker):
        return val
    return to_fraction(val)

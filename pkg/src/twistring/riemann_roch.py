"""Bases of Riemann-Roch spaces L(D) for divisors with rational support.

L(D) is reduced to polynomials: with s = prod (x - c)^e over the x-values c
of the support, f lies in L(D) iff h = f s is a polynomial in x, y with
bounded pole order at infinity that vanishes to prescribed orders at the
affine points above each c.

Evaluation at sample points is exact as an injectivity test: a function in
L(D) that vanishes at more than deg D points outside supp D is zero. Every
sample count below is chosen from that bound.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq, fmpq_mat, fmpq_poly

from . import linalg
from .curve_core import Curve, CurvePoint
from .divisor_calc import Divisor
from .function_field import (FnElem, PoleMarker, UnsupportedPointError,
                             ord_at, ord_at_infinity, point_fmpq, to_fmpq, value_fmpq,
                             y_series, _series_mul)

SAMPLE_MARGIN = 4
MAX_RESAMPLES = 5


class SamplingError(RuntimeError):
    pass


class SampleSchedule:
    """Candidate sample points j*G + H for j = 1, 2, ..."""

    def __init__(self, generator: CurvePoint, offset: Optional[CurvePoint] = None,
                 margin: int = SAMPLE_MARGIN):
        self.curve = generator.curve
        self.generator = generator
        self.offset = offset if offset is not None else self.curve.infinity
        self.margin = margin
        self._cands: List[CurvePoint] = []
        self._translates: Dict[Tuple[CurvePoint, CurvePoint], CurvePoint] = {}

    def candidate(self, j: int) -> CurvePoint:
        """The j-th candidate, j >= 1."""
        while len(self._cands) < j:
            prev = self._cands[-1] if self._cands else self.offset
            self._cands.append(prev + self.generator)
        return self._cands[j - 1]

    def translate(self, s: CurvePoint, shift: CurvePoint) -> CurvePoint:
        key = (s, shift)
        q = self._translates.get(key)
        if q is None:
            q = s + shift
            self._translates[key] = q
        return q

    def choose(self, count: int, constraints: Sequence[Tuple[CurvePoint, frozenset]],
               skip: int = 0) -> List[CurvePoint]:
        """First `count` candidates s (after `skip` valid ones) such that, for each
        (shift, xs) constraint, s + shift is affine with x-coordinate outside xs."""
        out: List[CurvePoint] = []
        valid = 0
        j = 0
        while len(out) < count:
            j += 1
            if j > 100000:  # pragma: no cover
                raise SamplingError("ran out of candidate sample points")
            s = self.candidate(j)
            ok = True
            for shift, xs in constraints:
                q = self.translate(s, shift)
                if q.is_infinity or q.x in xs:
                    ok = False
                    break
            if not ok:
                continue
            valid += 1
            if valid > skip:
                out.append(s)
        return out


def support_x(D: Divisor) -> frozenset:
    return frozenset(P.x for P, _ in D.items() if not P.is_infinity)


class SectionSpace:
    """A finite-dimensional space of functions inside L(bound).

    The basis is either given explicitly, or as rows of coordinates over the
    full Riemann-Roch basis `ref` of the same bound; in the second case the
    functions themselves are only assembled when `basis` is read.
    """

    def __init__(self, bound: Divisor, basis: Optional[List[FnElem]] = None,
                 degree: Optional[int] = None, full: bool = False,
                 ref: Optional["SectionSpace"] = None, coords: Optional[fmpq_mat] = None):
        self.bound = bound
        self.degree = degree
        # True when the basis spans all of L(bound)
        self.full = full
        self.ref = ref
        self.coords = coords
        self._basis = list(basis) if basis is not None else None
        self._values: Dict[CurvePoint, List[fmpq]] = {}
        if self._basis is None and (ref is None or coords is None):
            raise ValueError("a section space needs a basis or reference coordinates")

    @property
    def dim(self) -> int:
        if self._basis is not None:
            return len(self._basis)
        return self.coords.nrows()

    @property
    def basis(self) -> List[FnElem]:
        if self._basis is None:
            refb = self.ref.basis
            self._basis = [combine(self.curve, [self.coords[i, k] for k in range(len(refb))], refb)
                           for i in range(self.coords.nrows())]
        return self._basis

    @property
    def curve(self) -> Curve:
        return self.bound.curve

    def own_coords(self) -> Optional[fmpq_mat]:
        """Coordinates over rr_basis(bound), when known without solving."""
        if self.full:
            n = self.dim
            return fmpq_mat(n, n, [fmpq(1) if i == j else fmpq(0)
                                   for i in range(n) for j in range(n)])
        if self.coords is not None and self.ref is not None and self.ref.bound == self.bound:
            return self.coords
        return None

    def with_degree(self, degree: Optional[int]) -> "SectionSpace":
        out = SectionSpace(self.bound, self._basis, degree, self.full, self.ref, self.coords)
        out._values = self._values
        return out

    def values_at(self, P: CurvePoint) -> List[fmpq]:
        vals = self._values.get(P)
        if vals is None:
            if self._basis is None:
                rv = self.ref.values_at(P)
                C = self.coords
                vals = [sum((C[i, k] * rv[k] for k in range(len(rv)) if C[i, k] != 0), fmpq(0))
                        for i in range(C.nrows())]
            else:
                vals = []
                for f in self._basis:
                    v = value_fmpq(f, P)
                    if isinstance(v, PoleMarker):
                        raise SamplingError(f"sample {P} hits a pole of a basis function")
                    vals.append(v)
            self._values[P] = vals
        return vals

    def value_matrix(self, points: Sequence[CurvePoint]) -> fmpq_mat:
        return linalg.matrix([self.values_at(P) for P in points], self.dim)

    def __repr__(self):
        deg = "" if self.degree is None else f", degree={self.degree}"
        return f"SectionSpace(dim={self.dim}{deg}, bound={self.bound!r})"


def sample_count(bound: Divisor, margin: int = SAMPLE_MARGIN) -> int:
    """Enough samples for evaluation to be injective on L(bound)."""
    return max(bound.degree, 0) + 1 + margin


def _admissible(D: Divisor) -> None:
    for P, _ in D.items():
        if not P.is_infinity and P.is_two_torsion():
            raise UnsupportedPointError(f"2-torsion point {P} in the support of {D}")


def _monomials(N: int) -> List[Tuple[int, int]]:
    """(i, j) with 2i + 3j <= N, j in {0, 1}: a basis of L(N O)."""
    if N < 0:
        return []
    mons = [(i, 0) for i in range(N // 2 + 1)]
    if N >= 3:
        mons += [(i, 1) for i in range((N - 3) // 2 + 1)]
    return mons


def _monomial_series(Q: CurvePoint, mons: List[Tuple[int, int]], n: int) -> List[List[fmpq]]:
    """First n coefficients in t = x - x_Q of each monomial x^i y^j."""
    x0 = point_fmpq(Q.x, Q.y)[0]
    ys = y_series(Q).coeffs(n)
    maxi = max(i for i, _ in mons)
    xpows = []
    cur = [fmpq(1)] + [fmpq(0)] * (n - 1)
    base = [x0, fmpq(1)] + [fmpq(0)] * max(n - 2, 0)
    base = base[:n]
    for _ in range(maxi + 1):
        xpows.append(cur)
        cur = _series_mul(cur, base, n)
    out = []
    for i, j in mons:
        out.append(xpows[i] if j == 0 else _series_mul(xpows[i], ys, n))
    return out


_RR_CACHE: Dict[Divisor, SectionSpace] = {}


def rr_basis(D: Divisor) -> SectionSpace:
    """A basis of L(D) = {f : div f + D >= 0}."""
    cached = _RR_CACHE.get(D)
    if cached is not None:
        return cached
    _admissible(D)
    curve = D.curve
    if D.degree < 0:
        space = SectionSpace(D, [], full=True)
        _RR_CACHE[D] = space
        return space
    # exponents e_c of s = prod (x - c)^{e_c}
    by_x: Dict[Fraction, List[CurvePoint]] = {}
    for P, _ in D.items():
        if not P.is_infinity:
            by_x.setdefault(P.x, []).append(P)
    s = fmpq_poly([1])
    conditions: List[Tuple[CurvePoint, int]] = []
    N = D.coeff(curve.infinity)
    for c, pts in sorted(by_x.items()):
        e = max(0, max(D.coeff(P) for P in pts))
        if e:
            s *= fmpq_poly([-to_fmpq(c), 1]) ** e
            N += 2 * e
        P = pts[0]
        for Q in {P, -P}:
            need = e - D.coeff(Q)  # ord_Q(h) >= need
            if need > 0:
                conditions.append((Q, need))
    mons = _monomials(N)
    if not mons:
        space = SectionSpace(D, [], full=True)
        _RR_CACHE[D] = space
        return space
    rows: List[List[fmpq]] = []
    for Q, need in conditions:
        series = _monomial_series(Q, mons, need)
        for k in range(need):
            rows.append([ser[k] for ser in series])
    if rows:
        kernel = linalg.nullspace(linalg.matrix(rows, len(mons)))
    else:
        kernel = [[fmpq(1) if a == b else fmpq(0) for a in range(len(mons))]
                  for b in range(len(mons))]
    basis = []
    for vec in kernel:
        A = [fmpq(0)] * (N // 2 + 1)
        B = [fmpq(0)] * (N // 2 + 1)
        for (i, j), cf in zip(mons, vec):
            (A if j == 0 else B)[i] += cf
        basis.append(FnElem.from_polys(curve, fmpq_poly(A), fmpq_poly(B), s))
    space = SectionSpace(D, basis, full=True)
    _RR_CACHE[D] = space
    return space


def clear_cache() -> None:
    _RR_CACHE.clear()


def in_bound(f: FnElem, D: Divisor) -> bool:
    """Symbolic test of div f + D >= 0."""
    if f.is_zero():
        return True
    curve = D.curve
    A, B, C = f.common_form()
    rest = C
    xs = set()
    for P, _ in D.items():
        if not P.is_infinity:
            xs.add(P.x)
    for c in xs:
        lin = fmpq_poly([-to_fmpq(c), 1])
        while rest.degree() > 0 and rest(to_fmpq(c)) == 0:
            rest = rest // lin
    if rest.degree() > 0:
        return False  # a pole above an x-value outside the support
    if ord_at_infinity(f) < -D.coeff(curve.infinity):
        return False
    for c in xs:
        for Q in curve.points_with_x(c):
            if ord_at(f, Q) < -D.coeff(Q):
                return False
    return True


def coordinates(f: FnElem, S: SectionSpace, schedule: SampleSchedule) -> Optional[List[fmpq]]:
    """Coordinates of f in the basis of S, or None when f is not in S."""
    if f.is_zero():
        return [fmpq(0)] * S.dim
    if not in_bound(f, S.bound):
        return None
    if S.dim == 0:
        return None
    xs = support_x(S.bound)
    pts = schedule.choose(sample_count(S.bound, schedule.margin), [(S.curve.infinity, xs)])
    M = S.value_matrix(pts)
    b = []
    for P in pts:
        v = value_fmpq(f, P)
        if isinstance(v, PoleMarker):  # pragma: no cover - excluded by in_bound
            return None
        b.append(v)
    return linalg.solve(M, b)


def space_membership(f: FnElem, S: SectionSpace, schedule: SampleSchedule) -> bool:
    return coordinates(f, S, schedule) is not None


def check_independent(S: SectionSpace, schedule: SampleSchedule) -> bool:
    """Full column rank of the evaluation matrix of the basis."""
    if S.dim == 0:
        return True
    xs = support_x(S.bound)
    for attempt in range(MAX_RESAMPLES):
        pts = schedule.choose(sample_count(S.bound, schedule.margin) + attempt * schedule.margin,
                              [(S.curve.infinity, xs)])
        if linalg.rank(S.value_matrix(pts)) == S.dim:
            return True
    return False


def combine(curve: Curve, coeffs: Sequence, elems: Sequence[FnElem]) -> FnElem:
    """sum coeffs[i] * elems[i]."""
    acc = FnElem(curve, fmpq_poly([]))
    for c, f in zip(coeffs, elems):
        if c != 0:
            acc = acc + f.scale(c)
    return acc

"""Graded pieces and twisted products in B(E, L, sigma) = sum_n H^0(E, L_n).

With L = O(D_L) the degree-n piece is L([D_L]_n). The product of f in degree
m with g is f * (g o sigma^m); it is computed in the evaluation model, where
its value at a sample s is f(s) g(s + m t). Every space records a divisor
bound, and every comparison evaluates at more points than the degree of a
bound containing all functions involved, so all answers are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq, fmpq_mat

from . import linalg
from .curve_core import Curve, CurvePoint, Translation
from .divisor_calc import Divisor, _shift, cumulative, twist
from .function_field import FnElem, value_fmpq
from .riemann_roch import (SampleSchedule, SectionSpace, combine, in_bound, rr_basis,
                           sample_count, support_x)


class EngineError(ValueError):
    pass


class IncompatibleSpacesError(EngineError):
    pass


class ConsistencyError(RuntimeError):
    """A product did not land in the space its bound predicts."""


@dataclass
class SheafData:
    """L = O(base_divisor) twisted by the translation sigma."""

    translation: Translation
    base_divisor: Divisor
    schedule: Optional[SampleSchedule] = None
    _pieces: Dict[Tuple[int, Divisor], SectionSpace] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.base_divisor.degree < 1:
            raise EngineError("the base divisor must have positive degree")
        if self.schedule is None:
            self.schedule = SampleSchedule(self.translation.t)

    @property
    def curve(self) -> Curve:
        return self.translation.curve

    @property
    def t(self) -> CurvePoint:
        return self.translation.t

    def cumulative(self, n: int) -> Divisor:
        return cumulative(self.base_divisor, n, self.translation)

    def shift(self, m: int) -> CurvePoint:
        """The point m t, so that sigma^m(s) = s + m t."""
        return _shift(self.translation, m)


def graded_piece(sh: SheafData, n: int, subtract: Optional[Divisor] = None) -> SectionSpace:
    """H^0(E, L_n(-subtract)) = L([D_L]_n - subtract), tagged with degree n."""
    if n < 0:
        raise EngineError("graded pieces have degree >= 0")
    subtract = subtract if subtract is not None else Divisor.zero(sh.curve)
    key = (n, subtract)
    piece = sh._pieces.get(key)
    if piece is None:
        piece = rr_basis(sh.cumulative(n) - subtract).with_degree(n)
        sh._pieces[key] = piece
    return piece


def _require_degree(S: SectionSpace) -> int:
    if S.degree is None:
        raise IncompatibleSpacesError("space has no degree attached")
    return S.degree


def _from_values(sh: SheafData, bound: Divisor, pts: Sequence[CurvePoint], vals: fmpq_mat,
                 degree: Optional[int]) -> SectionSpace:
    """The span of the value columns, as a subspace of L(bound).

    vals has one row per sample and one column per function; each column must
    be the value vector of a function in L(bound).
    """
    ref = rr_basis(bound)
    if ref.dim == 0:
        if any(vals[i, j] != 0 for i in range(vals.nrows()) for j in range(vals.ncols())):
            raise ConsistencyError(f"nonzero functions predicted inside L({bound}) = 0")
        return SectionSpace(bound, [], degree=degree)
    M = ref.value_matrix(pts)
    rowsel = linalg.row_space_basis(M)
    if len(rowsel) != ref.dim:
        raise ConsistencyError("evaluation is not injective on the reference space")
    Mi = linalg.matrix([[M[i, k] for k in range(ref.dim)] for i in rowsel], ref.dim)
    Vi = linalg.matrix([[vals[i, j] for j in range(vals.ncols())] for i in rowsel], vals.ncols())
    X = Mi.inv() * Vi
    if M * X != vals:
        raise ConsistencyError(f"products escape their predicted bound {bound}")
    return _subspace(ref, X.transpose(), degree, bound)


def _subspace(ref: SectionSpace, rows: fmpq_mat, degree, bound=None) -> SectionSpace:
    """Row span of coordinate rows over ref, canonicalised by rref."""
    R, piv = linalg.rref(rows)
    r = len(piv)
    coords = fmpq_mat(r, ref.dim, [R[i, j] for i in range(r) for j in range(ref.dim)])
    full = r == ref.dim
    if full:
        return ref.with_degree(degree)
    return SectionSpace(bound if bound is not None else ref.bound, None, degree=degree,
                        ref=ref, coords=coords)


def _samples(sh: SheafData, bound: Divisor, constraints) -> List[CurvePoint]:
    cons = list(constraints) + [(sh.curve.infinity, support_x(bound))]
    return sh.schedule.choose(sample_count(bound, sh.schedule.margin), cons)


def twisted_multiply(sh: SheafData, f: FnElem, m: int, g: FnElem, n: int) -> FnElem:
    """f * (g o sigma^m) as an element of the degree m+n piece."""
    Dm, Dn, Dmn = sh.cumulative(m), sh.cumulative(n), sh.cumulative(m + n)
    if Dm + twist(Dn, m, sh.translation) != Dmn:
        raise ConsistencyError("cumulative divisors are not additive; twist bookkeeping is off")
    if not in_bound(f, Dm) or not in_bound(g, Dn):
        raise EngineError("factors are not in their graded pieces")
    target = graded_piece(sh, m + n)
    pts = _samples(sh, Dmn, [(sh.curve.infinity, support_x(Dm)),
                             (sh.shift(m), support_x(Dn))])
    b = [value_fmpq(f, s) * value_fmpq(g, sh.schedule.translate(s, sh.shift(m))) for s in pts]
    M = target.value_matrix(pts)
    x = linalg.solve(M, b)
    if x is None:
        raise ConsistencyError("product is not in the target piece")
    return combine(sh.curve, x, target.basis)


def product_bound(sh: SheafData, U: SectionSpace, V: SectionSpace) -> Divisor:
    m = _require_degree(U)
    return U.bound + twist(V.bound, m, sh.translation)


def space_product(sh: SheafData, U: SectionSpace, V: SectionSpace) -> SectionSpace:
    """span{u * v}, of degree deg U + deg V."""
    m, n = _require_degree(U), _require_degree(V)
    bound = product_bound(sh, U, V)
    if U.dim == 0 or V.dim == 0:
        return SectionSpace(bound, [], degree=m + n)
    shift = sh.shift(m)
    pts = _samples(sh, bound, [(sh.curve.infinity, support_x(U.bound)),
                               (shift, support_x(V.bound))])
    rows = []
    for s in pts:
        uv = U.values_at(s)
        vv = V.values_at(sh.schedule.translate(s, shift))
        rows.append([a * b for a in uv for b in vv])
    vals = linalg.matrix(rows, U.dim * V.dim)
    keep = linalg.column_space_basis(vals)
    vals = linalg.matrix([[r[j] for j in keep] for r in rows], len(keep))
    return _from_values(sh, bound, pts, vals, m + n)


def _same_degree(U: SectionSpace, V: SectionSpace) -> Optional[int]:
    if U.degree is not None and V.degree is not None and U.degree != V.degree:
        raise IncompatibleSpacesError(f"degrees {U.degree} and {V.degree} differ")
    return U.degree if U.degree is not None else V.degree


def _joint_values(sh: SheafData, U: SectionSpace, V: SectionSpace):
    J = U.bound.join(V.bound)
    pts = _samples(sh, J, [])
    return J, pts, U.value_matrix(pts), V.value_matrix(pts)


def space_sum(sh: SheafData, U: SectionSpace, V: SectionSpace) -> SectionSpace:
    deg = _same_degree(U, V)
    J, pts, MU, MV = _joint_values(sh, U, V)
    rows = [[MU[i, j] for j in range(U.dim)] + [MV[i, j] for j in range(V.dim)]
            for i in range(len(pts))]
    vals = linalg.matrix(rows, U.dim + V.dim)
    keep = linalg.column_space_basis(vals)
    vals = linalg.matrix([[r[j] for j in keep] for r in rows], len(keep))
    return _from_values(sh, J, pts, vals, deg)


def space_sum_many(sh: SheafData, spaces: Sequence[SectionSpace]) -> SectionSpace:
    acc = spaces[0]
    for S in spaces[1:]:
        acc = space_sum(sh, acc, S)
    return acc


def space_intersect(sh: SheafData, U: SectionSpace, V: SectionSpace) -> SectionSpace:
    deg = _same_degree(U, V)
    meet = U.bound.meet(V.bound)
    if U.dim == 0 or V.dim == 0:
        return SectionSpace(meet, [], degree=deg)
    J, pts, MU, MV = _joint_values(sh, U, V)
    stacked = linalg.matrix([[MU[i, j] for j in range(U.dim)] + [-MV[i, j] for j in range(V.dim)]
                             for i in range(len(pts))], U.dim + V.dim)
    kernel = linalg.nullspace(stacked)
    if not kernel:
        return SectionSpace(meet, [], degree=deg)
    A = linalg.matrix([k[: U.dim] for k in kernel], U.dim)
    vals = MU * A.transpose()
    return _from_values(sh, meet, pts, vals, deg)


def space_equal(sh: SheafData, U: SectionSpace, V: SectionSpace) -> bool:
    _same_degree(U, V)
    if U.dim != V.dim:
        return False
    if U.dim == 0:
        return True
    if U.bound == V.bound:
        cu, cv = U.own_coords(), V.own_coords()
        if cu is not None and cv is not None:
            return linalg.rref(cu)[0] == linalg.rref(cv)[0]
    J, pts, MU, MV = _joint_values(sh, U, V)
    both = linalg.matrix([[MU[i, j] for j in range(U.dim)] + [MV[i, j] for j in range(V.dim)]
                          for i in range(len(pts))], 2 * U.dim)
    return linalg.rank(both) == U.dim


def space_contains(sh: SheafData, big: SectionSpace, small: SectionSpace) -> bool:
    """small is a subspace of big."""
    if small.dim == 0:
        return True
    J, pts, MB, MS = _joint_values(sh, big, small)
    both = linalg.matrix([[MB[i, j] for j in range(big.dim)] + [MS[i, j] for j in range(small.dim)]
                          for i in range(len(pts))], big.dim + small.dim)
    return linalg.rank(both) == linalg.rank(MB)


def left_transporter(sh: SheafData, W: SectionSpace, Y: SectionSpace) -> SectionSpace:
    """{s in B_1 : W * s is contained in Y}."""
    a = _require_degree(W)
    if Y.degree is not None and Y.degree != a + 1:
        raise IncompatibleSpacesError("Y must sit one degree above W")
    B1 = graded_piece(sh, 1)
    if W.dim == 0:
        return B1
    Z = W.bound + twist(B1.bound, a, sh.translation)
    J = Z.join(Y.bound)
    shift = sh.shift(a)
    pts = _samples(sh, J, [(sh.curve.infinity, support_x(W.bound)),
                           (shift, support_x(B1.bound))])
    MY = Y.value_matrix(pts)
    annihilators = linalg.left_nullspace(MY) if Y.dim else [
        [fmpq(1) if i == j else fmpq(0) for j in range(len(pts))] for i in range(len(pts))]
    if not annihilators:
        return B1
    MW = W.value_matrix(pts)
    MB = linalg.matrix([B1.values_at(sh.schedule.translate(s, shift)) for s in pts], B1.dim)
    rows = []
    for i in range(W.dim):
        # column k: values of w_i * b_k
        P = linalg.matrix([[MW[r, i] * MB[r, k] for k in range(B1.dim)] for r in range(len(pts))],
                          B1.dim)
        for w in annihilators:
            Wrow = linalg.matrix([w], len(pts))
            rows.append([(Wrow * P)[0, k] for k in range(B1.dim)])
    kernel = linalg.nullspace(linalg.matrix(rows, B1.dim))
    if not kernel:
        return SectionSpace(B1.bound, [], degree=1)
    return _subspace(B1, linalg.matrix(kernel, B1.dim), 1)


def zero_space(sh: SheafData, n: int) -> SectionSpace:
    return SectionSpace(sh.cumulative(n), [], degree=n)

"""Acceptance suite: one test per criterion, exact comparisons only.

Default setting: y^2 + y = x^3 - x, t = G = (0, 0), D_L = 3 O. On this curve
E(Q) = Z G, so every rational point sits on one sigma-orbit; inputs that need
two orbits use the same curve with t = 2G, where odd and even multiples of G
are certified apart by reduction modulo a prime.

Every space_equal decision made while checking criteria 4, 5, 7 and 8 is
recorded and re-decided in criterion 10 by testing each basis vector of one
side for membership in the other.
"""
import random
from contextlib import contextmanager
from functools import lru_cache

from flint import fmpq_mat

from twistring import blowup_lab, linalg
from twistring.blowup_lab import (blowup_report, generate_graded, hilbert_of, lift_by_g,
                                  run_virtual_blowup, seeds_for_S_blowup, seeds_for_T_blowup,
                                  veronese_view)
from twistring.cli import expected_rr_dim
from twistring.curve_core import Curve, Translation
from twistring.divisor_calc import (Divisor, cumulative, decompose_virtually_effective,
                                    is_effective, is_virtually_effective, same_orbit, twist,
                                    twist_point)
from twistring.riemann_roch import in_bound, rr_basis, space_membership
from twistring.sklyanin_free import (SklyaninAlgebra, SklyaninParams, central_cubics,
                                     graded_dim, quotient_dims, screen)
from twistring.thcr_engine import SheafData, graded_piece, space_contains, space_product

CURVE = Curve(0, 0, 1, -1, 0)
G = CURVE.point(0, 0)
O = CURVE.infinity


@lru_cache(maxsize=None)
def sheaf(step=1):
    """D_L = 3 O with sigma = translation by step * G."""
    return SheafData(Translation(CURVE, step * G), Divisor.point(O, 3))


# ---------------------------------------------------------------------------
# recording of space equality decisions for criterion 10

RECORDED = {}


@contextmanager
def recording(criterion):
    log = RECORDED.setdefault(criterion, [])
    original = blowup_lab.space_equal

    def wrapped(sh, A, B):
        decision = original(sh, A, B)
        log.append((sh, A, B, decision))
        return decision

    blowup_lab.space_equal = wrapped
    try:
        yield wrapped
    finally:
        blowup_lab.space_equal = original


def _lift_expected(num, N):
    """Coefficients of num(t) / ((1-t)^2 (1-t^3)) by direct convolution."""
    quad = [n + 1 for n in range(N + 1)]  # 1/(1-t)^2
    bar = [sum(num[k] * quad[n - k] for k in range(len(num)) if k <= n) for n in range(N + 1)]
    return [sum(bar[n - 3 * k] for k in range(n // 3 + 1)) for n in range(N + 1)]


def _report(n, ok):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}")


# ---------------------------------------------------------------------------
# 1. Riemann-Roch dimensions


def test_criterion_01_riemann_roch():
    rng = random.Random(101)
    ok = True
    for _ in range(60):
        ks = [rng.randint(-8, 8) for _ in range(rng.randint(1, 8))]
        D = Divisor.from_terms(CURVE, [(O if k == 0 else k * G, 1) for k in ks])
        ok &= rr_basis(D).dim == D.degree
    for D in (Divisor.point(G, -1), Divisor.from_terms(CURVE, [(G, 2), (3 * G, -3)]),
              Divisor.point(O, -4)):
        ok &= rr_basis(D).dim == 0
    ok &= rr_basis(Divisor.zero(CURVE)).dim == 1
    # degree 0: dimension 1 exactly when the divisor is principal
    principal = Divisor.from_terms(CURVE, [(G, 1), (-G, 1), (O, -2)])
    ok &= rr_basis(principal).dim == expected_rr_dim(principal) == 1
    _report(1, ok)
    assert ok


# ---------------------------------------------------------------------------
# 2. ambient dimensions


def ambient_dims(N=8):
    return [graded_piece(sheaf(), n).dim for n in range(1, N + 1)]


def test_criterion_02_ambient_dims():
    ok = ambient_dims() == [3 * n for n in range(1, 9)]
    _report(2, ok)
    assert ok


# ---------------------------------------------------------------------------
# 3. one-point blowup


def test_criterion_03_one_point_blowup():
    sh = sheaf()
    view = generate_graded(sh, seeds_for_S_blowup(sh, Divisor.point(2 * G)), 10)
    bar = view.dims()
    ok = bar[1:9] == [2 * n for n in range(1, 9)]
    ok &= lift_by_g(hilbert_of(view)).coeffs == _lift_expected([1, 0, 1], 10)
    _report(3, ok)
    assert ok


# ---------------------------------------------------------------------------
# 4. two-point blowup


def two_point_pairs():
    rng = random.Random(404)
    ks = [k for k in range(-6, 7) if k]
    pairs = []
    for _ in range(3):  # t = G: p and q always share an orbit
        pairs.append((1, rng.choice(ks), rng.choice(ks)))
    # t = 2G: an even and an odd multiple lie on different orbits
    pairs.append((2, 2 * rng.randint(1, 3), 2 * rng.randint(-3, 2) + 1))
    return pairs


@lru_cache(maxsize=None)
def two_point_results():
    out = []
    with recording(4):
        for step, i, j in two_point_pairs():
            sh = sheaf(step)
            p, q = i * G, j * G
            d = Divisor.from_terms(CURVE, [(p, 1), (q, 1)])
            rep = blowup_report(sh, d, 10, veronese=False)
            orbit = same_orbit(sh.translation, p, q)
            out.append((step, i, j, orbit, rep))
    return out


def test_criterion_04_two_point_blowup():
    ok = True
    results = two_point_results()
    lifted_expect = _lift_expected([1, -1, 1], 10)
    for step, i, j, orbit, rep in results:
        rows = rep.rows
        seeds = [r.computed for r in rows if r.object == "seed bar dim"]
        bar = [r.computed for r in rows if r.object == "generated bar dim"]
        lifted = [r.computed for r in rows if r.object == "lifted dim"]
        ok &= seeds == [1, 2, 3]
        ok &= bar == [1] + list(range(1, 11))
        ok &= lifted == lifted_expect
        ok &= rep.passed
    orbits = [orbit for *_, orbit, _ in results]
    ok &= any(o is not None for o in orbits) and any(o is None for o in orbits)
    ok &= len(results) >= 3
    _report(4, ok)
    assert ok


# ---------------------------------------------------------------------------
# 5. product dichotomies


def _S1(sh, p):
    return graded_piece(sh, 1, Divisor.point(p))


@lru_cache(maxsize=None)
def dichotomy_results():
    rng = random.Random(505)
    qs = rng.sample([k for k in range(-7, 8) if k], 5)
    rows = []
    with recording(5) as equal:
        for k in qs:
            for step, offsets in ((1, range(-5, 6)), (2, [None])):
                sh = sheaf(step)
                T = sh.translation
                q = k * G
                for j in offsets:
                    r = twist_point(T, q, j) if j is not None else q + G  # q + G: off the orbit
                    if j is None and same_orbit(T, r, q) is not None:
                        raise AssertionError("off-orbit point is on the orbit")
                    left = space_product(sh, _S1(sh, q), _S1(sh, r))
                    right = space_product(sh, _S1(sh, twist_point(T, r, 1)),
                                          _S1(sh, twist_point(T, q, -1)))
                    eq = equal(sh, left, right)
                    strict = (not eq) and space_contains(sh, right, left)
                    rows.append((k, step, j, left.dim, eq, strict))
    return rows


def test_criterion_05_product_dichotomies():
    ok = True
    rows = dichotomy_results()
    for k, step, j, dim, eq, strict in rows:
        ok &= dim == (3 if j == 2 else 4)
        ok &= eq == (j not in (2, -4))
        if j == 2:
            ok &= strict
    ok &= len({k for k, *_ in rows}) >= 5
    ok &= sum(1 for r in rows if r[2] is None) >= 1
    _report(5, ok)
    assert ok


# ---------------------------------------------------------------------------
# 6. divisor calculus


def _window_oracle(x, T, limit=30):
    eff = [is_effective(cumulative(x, n, T)) for n in range(limit + 1)]
    verdict = all(eff[limit // 2:])
    if not verdict:
        return False, None, None
    n0 = limit
    while n0 > 0 and eff[n0 - 1]:
        n0 -= 1
    return True, n0, next(n for n in range(1, limit + 1) if eff[n])


def test_criterion_06_divisor_calculus():
    ok = True
    T = sheaf().translation
    p = 2 * G
    pts = {j: twist_point(T, p, j) for j in range(0, 12)}
    x = Divisor.from_terms(CURVE, [(pts[0], 1), (pts[1], -1), (pts[2], 1)])
    for n in range(2, 11):
        stated = Divisor.from_terms(CURVE, [(pts[j], 1) for j in [0, *range(2, n), n + 1]])
        ok &= cumulative(x, n, T) == stated

    rng = random.Random(606)
    count = ve_count = 0
    for trial in range(240):
        step = 2 if trial % 2 else 1  # t = 2G gives two orbits, t = G one
        T = sheaf(step).translation
        terms = []
        for _ in range(rng.randint(1, 5)):
            k = rng.randint(-7, 7)
            terms.append((O if k == 0 else k * G, rng.randint(-2, 2)))
        y = Divisor.from_terms(CURVE, terms)
        cert = is_virtually_effective(y, T)
        verdict, n0, least = _window_oracle(y, T)
        ok &= cert.verdict == verdict
        count += 1
        if cert.verdict:
            ve_count += 1
            ok &= (cert.n0, cert.least_witness) == (n0, least)
            u, v, k = decompose_virtually_effective(y, T)
            ok &= is_effective(u) and is_effective(v)
            ok &= u - v + twist(v, 1, T) == y
            ok &= v <= cumulative(u, k, T)
    ok &= count >= 200 and ve_count > 0
    _report(6, ok)
    assert ok


# ---------------------------------------------------------------------------
# 7. Veronese identity


@lru_cache(maxsize=None)
def veronese_results():
    sh = sheaf()
    d = Divisor.from_terms(CURVE, [(2 * G, 1), (CURVE.point(2, 2), 1)])
    S = generate_graded(sh, seeds_for_S_blowup(sh, d), 12)
    Tb = generate_graded(sh, seeds_for_T_blowup(sh, cumulative(d, 3, sh.translation)), 12)
    sv, tv = veronese_view(S, 3), veronese_view(Tb, 3)
    with recording(7) as equal:
        return [(3 * n, equal(sh, sv.piece(n), tv.piece(n))) for n in range(1, 5)]


def test_criterion_07_veronese():
    res = veronese_results()
    ok = [deg for deg, _ in res] == [3, 6, 9, 12] and all(eq for _, eq in res)
    _report(7, ok)
    assert ok


# ---------------------------------------------------------------------------
# 8. the virtual blowup example


@lru_cache(maxsize=None)
def virtual_blowup_report():
    with recording(8):
        return run_virtual_blowup(sheaf(), 2 * G, N=8)


def test_criterion_08_virtual_blowup():
    rep = virtual_blowup_report()
    rows = {}
    for r in rep.rows:
        rows[(r.object, r.degree)] = r
    val = lambda name, deg: rows[(name, deg)].computed  # noqa: E731
    ok = rep.passed
    ok &= [val("dim U", n) for n in range(6)] == [1, 1, 3, 6, 8, 10]
    ok &= all(val("U_n = B(L(-x))_n", n) for n in range(3, 9))
    ok &= (val("dim X2", 2), val("dim B(L(-x))_2", 2)) == (3, 4)
    ok &= val("X3 = S(p)_1 S(p_1)_1 S(p_2)_1", 3)
    ok &= val("X2 X2 = B(L(-x))_4", 4) and val("X2 X3 = B(L(-x))_5", 5)
    ok &= val("dim X2' = dim H^0(L_2(-p-p_3))", 2) == 4
    ok &= val("dim Z", 1) == 1 and val("Z = H^0(L(-p_-2-p_3))", 1)
    ok &= val("dim S(p_3)_1 Y", 3) == 6
    _report(8, ok)
    assert ok


# ---------------------------------------------------------------------------
# 9. free algebra


def test_criterion_09_free_algebra():
    ok = True
    ambient = ambient_dims(6)
    for abc in [(1, 2, 3), (2, 3, 5), (3, -1, 2)]:
        params = SklyaninParams(*abc)
        ok &= screen(params) is None
        alg = SklyaninAlgebra(params)
        ok &= [graded_dim(params, n, alg).dim for n in range(7)] == \
            [(n + 1) * (n + 2) // 2 for n in range(7)]
        cubics = central_cubics(params, alg)
        ok &= len(cubics) == 1
        if len(cubics) == 1:
            q = [quotient_dims(params, cubics[0], n, alg) for n in range(1, 7)]
            ok &= q == [3 * n for n in range(1, 7)] and q == ambient
    _report(9, ok)
    assert ok


# ---------------------------------------------------------------------------
# 10. independent re-check of every equality decision


def _symbolic_span_contains(basis, f):
    """f in span(basis), decided on (A + B y)/C forms over a common denominator."""
    forms = [g.common_form() for g in basis] + [f.common_form()]
    den = forms[0][2]
    for _, _, C in forms[1:]:
        den = den * C // den.gcd(C)
    vecs = []
    for A, B, C in forms:
        k = den // C
        a, b = (A * k).coeffs(), (B * k).coeffs()
        vecs.append((a, b))
    la = max(len(a) for a, _ in vecs)
    lb = max(len(b) for _, b in vecs)
    rows = [list(a) + [0] * (la - len(a)) + list(b) + [0] * (lb - len(b)) for a, b in vecs]
    width = la + lb
    if width == 0:
        return True
    M = linalg.matrix(rows[:-1], width) if rows[:-1] else fmpq_mat(0, width)
    return linalg.rank(M) == linalg.rank(linalg.matrix(rows, width))


def _brute_equal(sh, A, B):
    if A.dim != B.dim:
        return False
    sched = sh.schedule
    for X, Y in ((A, B), (B, A)):
        for f in X.basis:
            by_samples = space_membership(f, Y, sched)
            by_symbols = _symbolic_span_contains(Y.basis, f) and in_bound(f, Y.bound)
            if by_samples != by_symbols:
                raise AssertionError("membership routes disagree")
            if not by_samples:
                return False
    return True


def test_criterion_10_oracle_equivalence():
    two_point_results()
    dichotomy_results()
    veronese_results()
    virtual_blowup_report()
    ok = True
    checked = 0
    for crit in (4, 5, 7, 8):
        for sh, A, B, decision in RECORDED.get(crit, []):
            ok &= _brute_equal(sh, A, B) == decision
            checked += 1
    ok &= all(RECORDED.get(c) for c in (4, 5, 7, 8))
    print(f"re-checked {checked} equality decisions")
    _report(10, ok)
    assert ok

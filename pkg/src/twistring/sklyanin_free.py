"""Graded pieces of the three-generator Sklyanin algebra from its relations.

S = Q<x, y, z> / (a zy + b yz + c x^2, a xz + b zx + c y^2, a yx + b xy + c z^2).

With R the span of the relations, the ideal in degree k is
V I_{k-1} + R V^{k-2}, so S_k is the quotient of V (x) S_{k-1} by the image of
R (x) S_{k-2}. Each S_k is kept as a quotient with an echelon basis of the
relation image, which gives normal forms for words of any length.
"""
from __future__ import annotations

import itertools
from math import gcd
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq, fmpz_mat

from . import linalg
from .curve_core import as_rational

GENERATORS = ("x", "y", "z")
Word = Tuple[int, ...]


class DegenerateParametersError(ValueError):
    pass


class NotCentralError(ValueError):
    pass


@dataclass(frozen=True)
class SklyaninParams:
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    def relations(self) -> List[Dict[Word, Fraction]]:
        X, Y, Z = 0, 1, 2
        a, b, c = self.a, self.b, self.c
        rels = [
            {(Z, Y): a, (Y, Z): b, (X, X): c},
            {(X, Z): a, (Z, X): b, (Y, Y): c},
            {(Y, X): a, (X, Y): b, (Z, Z): c},
        ]
        return [{w: v for w, v in r.items() if v != 0} for r in rels]


class _Level:
    """S_k as a quotient of V (x) S_{k-1}; coordinates (generator, index in S_{k-1})."""

    def __init__(self, ambient: int, pivots: List[int], rows: List[List[fmpq]]):
        self.ambient = ambient
        self.pivots = pivots
        self.rows = rows
        pivset = set(pivots)
        self.free = [j for j in range(ambient) if j not in pivset]
        self.position = {j: i for i, j in enumerate(self.free)}

    @property
    def dim(self) -> int:
        return len(self.free)

    def reduce(self, vec: List[fmpq]) -> List[fmpq]:
        """Normal form of an ambient vector, as coordinates on S_k."""
        vec = list(vec)
        for pc, row in zip(self.pivots, self.rows):
            cf = vec[pc]
            if cf != 0:
                for j in range(self.ambient):
                    if row[j] != 0:
                        vec[j] -= cf * row[j]
        return [vec[j] for j in self.free]


class SklyaninAlgebra:
    """Exact graded pieces, products and normal forms of S for fixed parameters."""

    def __init__(self, params: SklyaninParams):
        self.params = params
        self.rels = params.relations()
        # level k stores S_k; S_0 = Q, S_1 = V
        self._levels: Dict[int, _Level] = {}
        self._words: Dict[int, List[Word]] = {0: [()], 1: [(0,), (1,), (2,)]}
        self._nf_cache: Dict[Word, List[fmpq]] = {}

    # dimensions and bases
    def dim(self, n: int) -> int:
        if n < 0:
            raise ValueError("degree must be >= 0")
        if n <= 1:
            return 3 ** n
        return self._level(n).dim

    def basis_words(self, n: int) -> List[Word]:
        """A list of words whose classes form a basis of S_n."""
        if n not in self._words:
            lev = self._level(n)
            prev = self.basis_words(n - 1)
            m = len(prev)
            self._words[n] = [(j // m,) + prev[j % m] for j in lev.free]
        return self._words[n]

    def _level(self, k: int) -> _Level:
        if k in self._levels:
            return self._levels[k]
        if k < 2:
            raise ValueError("levels start at degree 2")
        m = self.dim(k - 1)
        ambient = 3 * m
        prev2 = self.basis_words(k - 2)
        image = []
        for rel in self.rels:
            for w in prev2:
                vec = [fmpq(0)] * ambient
                for (g1, g2), cf in rel.items():
                    tail = self.normal_form((g2,) + w)
                    for i, v in enumerate(tail):
                        if v != 0:
                            vec[g1 * m + i] += fmpq(cf.numerator, cf.denominator) * v
                image.append(vec)
        R, pivots = linalg.rref(linalg.matrix(image, ambient))
        rows = [[R[i, j] for j in range(ambient)] for i in range(len(pivots))]
        lev = _Level(ambient, pivots, rows)
        self._levels[k] = lev
        return lev

    def normal_form(self, word: Sequence[int]) -> List[fmpq]:
        """Coordinates of a word in the basis of S_len(word)."""
        word = tuple(word)
        hit = self._nf_cache.get(word)
        if hit is not None:
            return hit
        n = len(word)
        if n == 0:
            out = [fmpq(1)]
        elif n == 1:
            out = [fmpq(0)] * 3
            out[word[0]] = fmpq(1)
        else:
            tail = self.normal_form(word[1:])
            m = len(tail)
            lev = self._level(n)
            vec = [fmpq(0)] * lev.ambient
            for i, v in enumerate(tail):
                vec[word[0] * m + i] = v
            out = lev.reduce(vec)
        self._nf_cache[word] = out
        return out

    def multiply(self, u: Sequence, i: int, v: Sequence, j: int) -> List[fmpq]:
        """Product of u in S_i and v in S_j, all in basis coordinates."""
        out = [fmpq(0)] * self.dim(i + j)
        wu, wv = self.basis_words(i), self.basis_words(j)
        for cu, a in zip(u, wu):
            if cu == 0:
                continue
            for cv, b in zip(v, wv):
                if cv == 0:
                    continue
                nf = self.normal_form(a + b)
                for k, val in enumerate(nf):
                    if val != 0:
                        out[k] += cu * cv * val
        return out

    def generator(self, g: int) -> List[fmpq]:
        v = [fmpq(0)] * 3
        v[g] = fmpq(1)
        return v


def screen(params: SklyaninParams) -> Optional[str]:
    """None when dim S_2 = 6 and dim S_3 = 10, otherwise a description of the deviation."""
    alg = SklyaninAlgebra(params)
    d2, d3 = alg.dim(2), alg.dim(3)
    if (d2, d3) == (6, 10):
        return None
    return f"dim S_2 = {d2}, dim S_3 = {d3} (expected 6, 10)"


@dataclass
class GradedDim:
    degree: int
    dim: int
    warning: Optional[str] = None


def graded_dim(params: SklyaninParams, n: int, algebra: Optional[SklyaninAlgebra] = None) -> GradedDim:
    alg = algebra or SklyaninAlgebra(params)
    warning = None
    if n >= 2:
        d2, d3 = alg.dim(2), alg.dim(3)
        if (d2, d3) != (6, 10):
            warning = f"degenerate parameters: dim S_2 = {d2}, dim S_3 = {d3}"
    return GradedDim(n, alg.dim(n), warning)


def graded_dim_bruteforce(params: SklyaninParams, n: int) -> int:
    """3^n minus the rank of the span of all words * relation * words of length n."""
    if n < 2:
        return 3 ** n
    words = list(itertools.product(range(3), repeat=n))
    index = {w: i for i, w in enumerate(words)}
    rels = params.relations()
    den = 1
    for r in rels:
        for v in r.values():
            den = den * v.denominator // gcd(den, v.denominator)
    rows = []
    for k in range(n - 1):
        for left in itertools.product(range(3), repeat=k):
            for right in itertools.product(range(3), repeat=n - 2 - k):
                for r in rels:
                    row = [0] * len(words)
                    for w, v in r.items():
                        row[index[left + w + right]] += int(v * den)
                    rows.append(row)
    return len(words) - fmpz_mat(rows).rank()


def central_cubics(params: SklyaninParams, algebra: Optional[SklyaninAlgebra] = None,
                   require_nondegenerate: bool = True) -> List[List[fmpq]]:
    """Basis of {g in S_3 : g w = w g for w = x, y, z}, in basis_words(3) coordinates."""
    alg = algebra or SklyaninAlgebra(params)
    if require_nondegenerate and alg.dim(2) != 6:
        raise DegenerateParametersError(f"dim S_2 = {alg.dim(2)}, expected 6")
    d3 = alg.dim(3)
    cols = []
    for k in range(d3):
        e = [fmpq(0)] * d3
        e[k] = fmpq(1)
        col = []
        for g in range(3):
            gen = alg.generator(g)
            left = alg.multiply(e, 3, gen, 1)
            right = alg.multiply(gen, 1, e, 3)
            col.extend(l - r for l, r in zip(left, right))
        cols.append(col)
    M = linalg.matrix([[cols[k][i] for k in range(d3)] for i in range(len(cols[0]))], d3)
    return linalg.nullspace(M)


def is_central(alg: SklyaninAlgebra, g: Sequence, degree: int = 3) -> bool:
    for w in range(3):
        gen = alg.generator(w)
        if alg.multiply(g, degree, gen, 1) != alg.multiply(gen, 1, g, degree):
            return False
    return True


def multiple_dim(alg: SklyaninAlgebra, g: Sequence, n: int) -> int:
    """dim of g S_{n-3} inside S_n."""
    if n < 3:
        return 0
    m = alg.dim(n - 3)
    rows = []
    for k in range(m):
        e = [fmpq(0)] * m
        e[k] = fmpq(1)
        rows.append(alg.multiply(g, 3, e, n - 3))
    return linalg.rank(linalg.matrix(rows, alg.dim(n)))


def quotient_dims(params: SklyaninParams, g: Sequence, n: int,
                  algebra: Optional[SklyaninAlgebra] = None) -> int:
    """dim S_n - dim g S_{n-3}."""
    alg = algebra or SklyaninAlgebra(params)
    g = [x if isinstance(x, fmpq) else fmpq(Fraction(x).numerator, Fraction(x).denominator)
         for x in g]
    if not is_central(alg, g):
        raise NotCentralError("g does not commute with x, y and z")
    return alg.dim(n) - multiple_dim(alg, g, n)


def element_str(alg: SklyaninAlgebra, v: Sequence, n: int) -> str:
    terms = []
    for cf, w in zip(v, alg.basis_words(n)):
        if cf != 0:
            terms.append(f"{cf}*{''.join(GENERATORS[i] for i in w)}")
    return " + ".join(terms) if terms else "0"

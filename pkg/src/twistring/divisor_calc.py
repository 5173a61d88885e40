"""Divisors on the curve and their calculus along sigma-orbits.

Conventions: x^{sigma^j} is the twist of x by sigma^{-j}, so a point p twists
to p - j t, and [x]_n = x + x^sigma + ... + x^{sigma^{n-1}}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .curve_core import (Curve, CurvePoint, Translation, as_rational, multiple,
                         separated_mod_prime, small_primes)

DEFAULT_ORBIT_CAP = 16


class DivisorError(ValueError):
    pass


class IndeterminateOrbitError(DivisorError):
    """Two points whose orbit relation could not be decided."""


class NotVirtuallyEffectiveError(DivisorError):
    pass


class Divisor:
    """A finitely supported integer combination of points of one curve."""

    __slots__ = ("curve", "_coeffs", "_hash")

    def __init__(self, curve: Curve, coeffs: Optional[Mapping[CurvePoint, int]] = None):
        self.curve = curve
        data: Dict[CurvePoint, int] = {}
        for P, n in (coeffs or {}).items():
            if P.curve != curve:
                raise DivisorError(f"{P} is not on {curve}")
            n = int(n)
            if n:
                data[P] = data.get(P, 0) + n
                if data[P] == 0:
                    del data[P]
        self._coeffs = data
        self._hash = None

    @classmethod
    def zero(cls, curve: Curve) -> "Divisor":
        return cls(curve)

    @classmethod
    def point(cls, P: CurvePoint, n: int = 1) -> "Divisor":
        return cls(P.curve, {P: n})

    @classmethod
    def from_terms(cls, curve: Curve, terms: Iterable[Tuple[CurvePoint, int]]) -> "Divisor":
        acc: Dict[CurvePoint, int] = {}
        for P, n in terms:
            acc[P] = acc.get(P, 0) + int(n)
        return cls(curve, acc)

    def items(self):
        return self._coeffs.items()

    def support(self) -> List[CurvePoint]:
        return sorted(self._coeffs, key=lambda P: P.sort_key())

    def coeff(self, P: CurvePoint) -> int:
        return self._coeffs.get(P, 0)

    def __getitem__(self, P: CurvePoint) -> int:
        return self.coeff(P)

    def __len__(self):
        return len(self._coeffs)

    def __bool__(self):
        return bool(self._coeffs)

    @property
    def degree(self) -> int:
        return sum(self._coeffs.values())

    def __eq__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        return self.curve == other.curve and self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __add__(self, other: "Divisor") -> "Divisor":
        acc = dict(self._coeffs)
        for P, n in other.items():
            acc[P] = acc.get(P, 0) + n
        return Divisor(self.curve, acc)

    def __neg__(self) -> "Divisor":
        return Divisor(self.curve, {P: -n for P, n in self.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor(self.curve, {P: k * n for P, n in self.items()})

    __rmul__ = __mul__

    def __le__(self, other: "Divisor") -> bool:
        return is_effective(other - self)

    def __ge__(self, other: "Divisor") -> bool:
        return is_effective(self - other)

    def meet(self, other: "Divisor") -> "Divisor":
        """Coefficientwise minimum."""
        pts = set(self._coeffs) | set(other._coeffs)
        return Divisor(self.curve, {P: min(self.coeff(P), other.coeff(P)) for P in pts})

    def join(self, other: "Divisor") -> "Divisor":
        """Coefficientwise maximum."""
        pts = set(self._coeffs) | set(other._coeffs)
        return Divisor(self.curve, {P: max(self.coeff(P), other.coeff(P)) for P in pts})

    def positive_part(self) -> "Divisor":
        return Divisor(self.curve, {P: n for P, n in self.items() if n > 0})

    def __repr__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for P in self.support():
            n = self._coeffs[P]
            parts.append(f"{n}*{P!r}" if n != 1 else repr(P))
        return " + ".join(parts)


def degree(x: Divisor) -> int:
    return x.degree


def is_effective(x: Divisor) -> bool:
    return all(n >= 0 for _, n in x.items())


@lru_cache(maxsize=1 << 14)
def _shift(T: Translation, j: int) -> CurvePoint:
    return multiple(T.curve, j, T.t)


def twist_point(T: Translation, p: CurvePoint, j: int) -> CurvePoint:
    """p^{sigma^j} = p - j t."""
    if j == 0:
        return p
    return p + _shift(T, -j)


def twist(x: Divisor, j: int, T: Translation) -> Divisor:
    if j == 0:
        return x
    return Divisor(x.curve, {twist_point(T, P, j): n for P, n in x.items()})


def cumulative(x: Divisor, n: int, T: Translation) -> Divisor:
    """[x]_n, with [x]_0 = 0."""
    if n < 0:
        raise DivisorError("cumulative sums need n >= 0")
    acc: Dict[CurvePoint, int] = {}
    for i in range(n):
        for P, c in twist(x, i, T).items():
            acc[P] = acc.get(P, 0) + c
    return Divisor(x.curve, acc)


# ---------------------------------------------------------------------------
# orbits


@dataclass
class OrbitProfile:
    """Coefficients of x along one orbit: coeffs[i] sits at representative^{sigma^i}."""

    representative: CurvePoint
    coeffs: Dict[int, int]

    @property
    def length(self) -> int:
        return max(self.coeffs) + 1 if self.coeffs else 0

    def sequence(self) -> List[int]:
        return [self.coeffs.get(i, 0) for i in range(self.length)]

    def point(self, i: int, T: Translation) -> CurvePoint:
        return twist_point(T, self.representative, i)

    @property
    def total(self) -> int:
        return sum(self.coeffs.values())


def _relation(T: Translation, P: CurvePoint, Q: CurvePoint, cap: int) -> Optional[int]:
    """j with P = Q^{sigma^j} and |j| <= cap, or None."""
    diff = Q - P  # P = Q - j t  <=>  Q - P = j t
    for j in range(0, cap + 1):
        if diff == _shift(T, j):
            return j
        if j and diff == _shift(T, -j):
            return -j
    return None


def _apart(T: Translation, P: CurvePoint, Q: CurvePoint, primes: Optional[List[int]] = None) -> bool:
    """Certify P - Q is not a multiple of t by reducing modulo small good primes."""
    return any(separated_mod_prime(T, P, Q, ell) for ell in primes or small_primes(400))


def same_orbit(T: Translation, P: CurvePoint, Q: CurvePoint,
               cap: int = DEFAULT_ORBIT_CAP, primes: Optional[List[int]] = None) -> Optional[int]:
    """Index j with P = Q^{sigma^j}, or None if provably on different orbits.

    Raises IndeterminateOrbitError when neither can be established.
    """
    j = _relation(T, P, Q, cap)
    if j is not None:
        return j
    if _apart(T, P, Q, primes):
        return None
    raise IndeterminateOrbitError(
        f"cannot decide whether {P} and {Q} share an orbit within index cap {cap}")


def orbit_profiles(x: Divisor, T: Translation, cap: int = DEFAULT_ORBIT_CAP) -> List[OrbitProfile]:
    """Split the support of x into sigma-orbits, indexed from the lowest point."""
    groups: List[Dict[CurvePoint, int]] = []  # point -> relative index
    for P in x.support():
        home = None
        for g in groups:
            for Q, iq in g.items():
                j = _relation(T, P, Q, cap)
                if j is not None:
                    home = (g, iq + j)
                    break
            if home:
                break
        if home:
            home[0][P] = home[1]
            continue
        for g in groups:
            anchor = next(iter(g))
            if not _apart(T, P, anchor):
                raise IndeterminateOrbitError(
                    f"cannot decide whether {P} and {anchor} share an orbit within index cap {cap}")
        groups.append({P: 0})
    profiles = []
    for g in groups:
        lo = min(g.values())
        rep = next(P for P, i in g.items() if i == lo)
        profiles.append(OrbitProfile(rep, {i - lo: x.coeff(P) for P, i in g.items()}))
    profiles.sort(key=lambda pr: pr.representative.sort_key())
    return profiles


# ---------------------------------------------------------------------------
# virtual effectiveness


@dataclass
class NegativeSchedule:
    """From n >= start on, [x]_n has coefficient value < 0 at a predictable point."""

    profile: OrbitProfile
    kind: str  # "prefix": fixed index; "suffix": index moves with n
    index: int
    start: int
    value: int

    def position(self, n: int) -> int:
        if n < self.start:
            raise ValueError(f"schedule only applies from n = {self.start}")
        return self.index if self.kind == "prefix" else self.index + n - 1


@dataclass
class VirtualEffectivity:
    verdict: bool
    n0: Optional[int] = None
    least_witness: Optional[int] = None
    failure: Optional[NegativeSchedule] = None
    profiles: List[OrbitProfile] = field(default_factory=list)

    def witness(self, n: int, T: Translation) -> Tuple[CurvePoint, int]:
        """A point where [x]_n has a negative coefficient, for n past the schedule start."""
        if self.failure is None:
            raise ValueError("divisor is virtually effective; there is no witness")
        f = self.failure
        return f.profile.point(f.position(n), T), f.value


def _window_sums(a: List[int], n: int) -> List[int]:
    """Coefficients of [x]_n along one orbit with sequence a."""
    k = len(a)
    out = [0] * (k + n - 1) if n else []
    for i, ai in enumerate(a):
        for s in range(n):
            out[i + s] += ai
    return out


def is_virtually_effective(x: Divisor, T: Translation,
                           cap: int = DEFAULT_ORBIT_CAP) -> VirtualEffectivity:
    profiles = orbit_profiles(x, T, cap)
    worst_bad = 0
    failure = None
    for pr in profiles:
        a = pr.sequence()
        k = len(a) - 1
        prefix = 0
        for m, am in enumerate(a):
            prefix += am
            if prefix < 0:
                cand = NegativeSchedule(pr, "prefix", m, m + 1, prefix)
                if failure is None or cand.start < failure.start:
                    failure = cand
                break
        suffix = 0
        for m in range(k, -1, -1):
            suffix += a[m]
            if suffix < 0:
                cand = NegativeSchedule(pr, "suffix", m, k - m + 1, suffix)
                if failure is None or cand.start < failure.start:
                    failure = cand
                break
        if failure is None:
            for n in range(k, 0, -1):
                if min(_window_sums(a, n)) < 0:
                    worst_bad = max(worst_bad, n)
                    break
    if failure is not None:
        return VirtualEffectivity(False, failure=failure, profiles=profiles)
    n0 = worst_bad + 1 if worst_bad else 0
    witness = 1
    while not all(min(_window_sums(pr.sequence(), witness) or [0]) >= 0 for pr in profiles):
        witness += 1
    return VirtualEffectivity(True, n0=n0, least_witness=witness, profiles=profiles)


def decompose_virtually_effective(x: Divisor, T: Translation,
                                  cap: int = DEFAULT_ORBIT_CAP) -> Tuple[Divisor, Divisor, int]:
    """Effective u, v with x = u - v + v^sigma and v <= [u]_k, k least such."""
    cert = is_virtually_effective(x, T, cap)
    if not cert.verdict:
        raise NotVirtuallyEffectiveError(f"{x} is not virtually effective")
    u_terms, v_terms = [], []
    for pr in cert.profiles:
        v_prev = 0
        for j, aj in enumerate(pr.sequence()):
            uj = max(0, aj - v_prev)
            vj = uj + v_prev - aj
            if uj:
                u_terms.append((pr.point(j, T), uj))
            if vj:
                v_terms.append((pr.point(j, T), vj))
            v_prev = vj
        if v_prev != 0:  # pragma: no cover - excluded by the suffix condition
            raise AssertionError("greedy decomposition left a tail")
    u = Divisor.from_terms(x.curve, u_terms)
    v = Divisor.from_terms(x.curve, v_terms)
    span = max((pr.length for pr in cert.profiles), default=0)
    for k in range(0, span + 2):
        if v <= cumulative(u, k, T):
            return u, v, k
    raise AssertionError("no k with v <= [u]_k")  # pragma: no cover


def normalized_divisor(x: Divisor, T: Translation, cap: int = DEFAULT_ORBIT_CAP) -> Divisor:
    """One point per orbit (its lowest member) carrying the orbit's coefficient sum."""
    terms = []
    for pr in orbit_profiles(x, T, cap):
        if pr.total < 0:
            raise DivisorError(f"orbit of {pr.representative} has negative sum {pr.total}")
        terms.append((pr.representative, pr.total))
    return Divisor.from_terms(x.curve, terms)


# ---------------------------------------------------------------------------
# serialization


def divisor_to_json(x: Divisor) -> list:
    out = []
    for P in x.support():
        pt = "infinity" if P.is_infinity else [str(P.x), str(P.y)]
        out.append({"point": pt, "coeff": x.coeff(P)})
    return out


def divisor_from_json(curve: Curve, data: list, named: Optional[Mapping[str, CurvePoint]] = None,
                      T: Optional[Translation] = None) -> Divisor:
    """Read [{point: [x, y] | "infinity" | name, coeff: n, twist: j?}, ...]."""
    terms = []
    for entry in data:
        spec = entry["point"]
        if spec == "infinity":
            P = curve.infinity
        elif isinstance(spec, str):
            if not named or spec not in named:
                raise DivisorError(f"unknown point name {spec!r}")
            P = named[spec]
        else:
            P = curve.point(as_rational(spec[0]), as_rational(spec[1]))
        j = int(entry.get("twist", 0))
        if j:
            if T is None:
                raise DivisorError("twisted points need a translation")
            P = twist_point(T, P, j)
        terms.append((P, int(entry.get("coeff", 1))))
    return Divisor.from_terms(curve, terms)

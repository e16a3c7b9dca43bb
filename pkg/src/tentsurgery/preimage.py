"""Preimage trees of c_t, first-hit counts and the insertion-length schedule.

Counting uses the threshold recursion

    P_n(y) = P_{n-1}(f y)                                    y <= c
    P_n(y) = 2 P_{n-1}(c1) + E_{n-1}(c1) - P_{n-1}(f y) - E_{n-1}(f y)   y > c

with ``P_n(y) = #{x < y : f^n x = c_t}`` and ``E_n(y) = [f^n y = c_t]``.
First-hit counts follow from ``N_n = P_n - P_{n-m}``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebraic import AlgebraicParameter, AlgebraicPoint
from .errors import CapExceeded, DomainError
from .tent import (CriticalOrbitData, ItineraryWord, Symbol, as_point, critical_orbit,
                   half, in_unit, symbol_of, tent_apply)

TREE_CAP = 18


def preimages_one_step(beta: AlgebraicParameter, z) -> list[AlgebraicPoint]:
    """Points x in [0, 1] with f(x) = z, sorted, without duplicates."""
    z = as_point(beta, z)
    if not in_unit(z):
        raise DomainError(f"{z!r} is outside [0, 1]")
    left = z * beta.inv_beta
    if left.compare(half(beta)) > 0:
        return []
    right = 1 - left
    if right == left:
        return [left]
    return [left, right]


@dataclass(frozen=True)
class PreimageNode:
    point: AlgebraicPoint
    level: int
    word: ItineraryWord
    on_orbit: bool = False

    @property
    def side(self) -> str:
        s = self.word.symbols[0]
        return {Symbol.ZERO: "L", Symbol.ONE: "R", Symbol.STAR: "C"}[s]


def orbit_levels(orbit: CriticalOrbitData) -> list[int]:
    """First-hit level of each orbit point c_i."""
    t, m = orbit.preperiod, orbit.period
    out = []
    for i in range(len(orbit.points)):
        out.append(t - i if i <= t else t + m - i)
    return out


def enumerate_tree(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None,
                   depth: int = 6, cap: int = TREE_CAP) -> list[list[PreimageNode]]:
    """All first-hit preimages of c_t by level, each level sorted increasingly."""
    if depth < 0:
        raise DomainError("depth must be >= 0")
    if depth > cap:
        raise CapExceeded(f"depth {depth} exceeds tree cap {cap}")
    if orbit is None:
        orbit = critical_orbit(beta)
    ct = orbit.c_t
    orbit_set = set(orbit.points)
    root = PreimageNode(ct, 0, ItineraryWord((symbol_of(beta, ct),)), True)
    levels = [[root]]
    for n in range(1, depth + 1):
        nxt = []
        for node in levels[-1]:
            for x in preimages_one_step(beta, node.point):
                if x == ct:
                    continue
                word = ItineraryWord((symbol_of(beta, x),) + node.word.symbols)
                nxt.append(PreimageNode(x, n, word, x in orbit_set))
        nxt.sort(key=lambda nd: _Key(nd.point))
        levels.append(nxt)
    return levels


class _Key:
    __slots__ = ("x", "f")

    def __init__(self, x):
        self.x = x
        self.f = float(x)

    def __lt__(self, other):
        if abs(self.f - other.f) > 1e-9:
            return self.f < other.f
        return self.x.compare(other.x) < 0


class LengthSchedule:
    """Insertion lengths ``a(n) = 2 / (beta**n n (n+1))``; orbit points get 1."""

    def __init__(self, beta: AlgebraicParameter):
        self.beta = beta
        self.bf = float(beta)

    def a(self, n: int) -> float:
        if n < 1:
            raise DomainError("a(n) is defined for n >= 1")
        return 2.0 / (self.bf ** n * n * (n + 1))

    def a_exact(self, n: int) -> AlgebraicPoint:
        if n < 1:
            raise DomainError("a(n) is defined for n >= 1")
        return (self.beta.inv_beta ** n).scale(Fraction(2, n * (n + 1)))

    def ratio(self, n: int) -> float:
        """a(n-1)/a(n) = beta (n+1)/(n-1)."""
        return self.bf * (n + 1) / (n - 1)

    def lam(self, n: int) -> float:
        if n == 1:
            return 1.0 / self.bf
        return (n - 1) / (self.bf * (n + 1))

    def b(self, n: int, m: int) -> float:
        return self.a(n) - self.a(n + m)


class CutSystem:
    """Counts at the finite threshold set S = orb(c) with 0 and 1 added.

    S is forward invariant, so the state ``(P_k(s), E_k(s))_{s in S}``
    evolves by an integer matrix.
    """

    def __init__(self, beta: AlgebraicParameter, orbit: CriticalOrbitData):
        self.beta = beta
        self.orbit = orbit
        pts = list(orbit.points)
        for extra in (beta.point(0), beta.point(1)):
            if extra not in pts:
                pts.append(extra)
        self.points = pts
        self.index = {p: i for i, p in enumerate(pts)}
        c = half(beta)
        self.image = [self.index[tent_apply(beta, p, check=False)] for p in pts]
        self.right = [p.compare(c) > 0 for p in pts]
        self.i_c1 = self.index[orbit.points[1]] if len(orbit.points) > 1 else self.index[orbit.points[0]]
        ct = orbit.c_t
        self.i_ct = self.index[ct]
        self.i_one = self.index[beta.point(1)]
        r = len(pts)
        self.r = r
        p0 = [1 if ct.compare(p) < 0 else 0 for p in pts]
        e0 = [1 if p == ct else 0 for p in pts]
        self._P = [p0]
        self._E = [e0]

    def _grow(self, k: int) -> None:
        while len(self._P) <= k:
            P, E = self._P[-1], self._E[-1]
            kk = 2 * P[self.i_c1] + E[self.i_c1]
            newP = []
            for i in range(self.r):
                j = self.image[i]
                if self.right[i]:
                    newP.append(kk - P[j] - E[j])
                else:
                    newP.append(P[j])
            self._P.append(newP)
            self._E.append([E[self.image[i]] for i in range(self.r)])

    def P(self, k: int, i: int) -> int:
        self._grow(k)
        return self._P[k][i]

    def E(self, k: int, i: int) -> int:
        self._grow(k)
        return self._E[k][i]

    def K(self, k: int) -> int:
        """2 P_k(c1) + E_k(c1): all level-k preimages of c_t with x <= c, doubled."""
        self._grow(k)
        return 2 * self._P[k][self.i_c1] + self._E[k][self.i_c1]

    def total(self, k: int) -> int:
        """#{x in [0, 1] : f^k x = c_t}."""
        return self.P(k, self.i_one) + self.E(k, self.i_one)

    def matrix(self) -> list[list[int]]:
        """Integer matrix A with W_k = A W_{k-1}, W = (P, E)."""
        r = self.r
        A = [[0] * (2 * r) for _ in range(2 * r)]
        for i in range(r):
            j = self.image[i]
            if self.right[i]:
                A[i][self.i_c1] += 2
                A[i][r + self.i_c1] += 1
                A[i][j] -= 1
                A[i][r + j] -= 1
            else:
                A[i][j] += 1
            A[r + i][r + j] += 1
        return A

    def initial(self) -> list[int]:
        return list(self._P[0]) + list(self._E[0])


_cut_cache: dict = {}


def cut_system(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None) -> CutSystem:
    if orbit is None:
        orbit = critical_orbit(beta)
    key = beta.key()
    cs = _cut_cache.get(key)
    if cs is None:
        cs = CutSystem(beta, orbit)
        _cut_cache[key] = cs
    return cs


@dataclass
class Chain:
    """Exact forward orbit of a threshold, cut short once it enters S."""

    thetas: list
    right: list            # sigma_j = -1  <=>  right[j]
    s_index: int | None     # index into S of the last theta, if it is in S

    @property
    def length(self) -> int:
        return len(self.thetas) - 1


def exact_chain(cs: CutSystem, y: AlgebraicPoint, n: int) -> Chain:
    beta = cs.beta
    c = half(beta)
    thetas = [y]
    right = []
    s_index = None
    x = y
    for j in range(n + 1):
        if j >= 1 and x in cs.index:
            s_index = cs.index[x]
            break
        right.append(x.compare(c) > 0)
        if j == n:
            break
        x = tent_apply(beta, x, check=False)
        thetas.append(x)
    return Chain(thetas, right, s_index)


def _P_from_chain(cs: CutSystem, ch: Chain, n: int) -> int:
    """P_n(y) by the unrolled recursion along the chain."""
    J = min(n, ch.length)
    ct = cs.orbit.c_t
    total = 0
    eps = 1
    for j in range(J):
        if ch.right[j]:
            total += eps * cs.K(n - j - 1)
            eps = -eps
    # remaining correction terms: -[theta_n = c_t] * sum of eps_j over right turns
    if J == n:
        theta_n = ch.thetas[n]
        last = 1 if ct.compare(theta_n) < 0 else 0
        hit = 1 if theta_n == ct else 0
    else:
        i = ch.s_index
        last = cs.P(n - J, i)
        hit = cs.E(n - J, i)
    if hit:
        s = 0
        e = 1
        for j in range(J):
            if ch.right[j]:
                s += e
                e = -e
        total -= s
    return total + eps * last


def count_P(beta, orbit, y, n: int, inclusive: bool = False) -> int:
    """#{x < y : f^n x = c_t} (or x <= y when inclusive)."""
    if orbit is None:
        orbit = critical_orbit(beta)
    y = as_point(beta, y)
    if not in_unit(y):
        raise DomainError(f"{y!r} is outside [0, 1]")
    if n < 0:
        raise DomainError("n must be >= 0")
    cs = cut_system(beta, orbit)
    ch = exact_chain(cs, y, n)
    val = _P_from_chain(cs, ch, n)
    if inclusive:
        val += _E_from_chain(cs, ch, n)
    return val


def _E_from_chain(cs: CutSystem, ch: Chain, n: int) -> int:
    if n <= ch.length:
        return 1 if ch.thetas[n] == cs.orbit.c_t else 0
    return cs.E(n - ch.length, ch.s_index)


def count_below(beta: AlgebraicParameter, orbit: CriticalOrbitData | None, y, n: int,
                inclusive: bool = False) -> tuple[int, int]:
    """Return ``(T_n, N_n)``: all and first-hit level-n preimages of c_t below y."""
    if orbit is None:
        orbit = critical_orbit(beta)
    m = orbit.period
    T = count_P(beta, orbit, y, n, inclusive)
    if n >= m:
        N = T - count_P(beta, orbit, y, n - m, inclusive)
    else:
        N = T
    return T, N


def level_count(beta: AlgebraicParameter, orbit: CriticalOrbitData | None, n: int) -> int:
    """F(n): number of first-hit level-n preimages in [0, 1]."""
    if orbit is None:
        orbit = critical_orbit(beta)
    if n < 0:
        raise DomainError("n must be >= 0")
    cs = cut_system(beta, orbit)
    m = orbit.period
    F = cs.total(n)
    if n >= m:
        F -= cs.total(n - m)
    return F


def level_counts(beta, orbit, n_max: int) -> list[int]:
    return [level_count(beta, orbit, n) for n in range(n_max + 1)]


@dataclass
class CountTable:
    beta: AlgebraicParameter
    F_recursion: list
    F_tree: list = field(default_factory=list)

    @classmethod
    def build(cls, beta, orbit=None, n_max: int = 20, tree_depth: int | None = None):
        if orbit is None:
            orbit = critical_orbit(beta)
        rec = level_counts(beta, orbit, n_max)
        tree = []
        if tree_depth is None:
            tree_depth = min(n_max, 14)
        if tree_depth > 0:
            tree = [len(lv) for lv in enumerate_tree(beta, orbit, min(tree_depth, n_max))]
        return cls(beta, rec, tree)

    def rows(self) -> list[dict]:
        sched = LengthSchedule(self.beta)
        cum = 0.0
        out = []
        for n, F in enumerate(self.F_recursion):
            a = sched.a(n) if n >= 1 else None
            if a is not None:
                cum += F * a
            # float rounding of a(n) and the running sum, a few ulps per term
            slack = cum * 4e-16 * (n + 4)
            out.append({
                "n": n,
                "F_tree": self.F_tree[n] if n < len(self.F_tree) else "",
                "F_recursion": F,
                "a_n": "" if a is None else repr(a),
                "cum_Fa": repr(cum),
                "cum_Fa_lo": repr(cum - slack),
                "cum_Fa_hi": repr(cum + slack),
            })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["n", "F_tree", "F_recursion", "a_n", "cum_Fa",
                                                "cum_Fa_lo", "cum_Fa_hi"],
                           lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow(row)
        return buf.getvalue()


def tree_count_below(levels: list[list[PreimageNode]], y: AlgebraicPoint, n: int) -> int:
    """Brute-force oracle: level-n tree points strictly below y."""
    return sum(1 for nd in levels[n] if nd.point.compare(y) < 0)


def iter_nodes(levels: Iterable[list[PreimageNode]]):
    for lv in levels:
        yield from lv

"""Markov partition by the critical orbit, transition matrix and growth data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import sympy

from .algebraic import AlgebraicParameter, AlgebraicPoint
from .errors import NonConvergence, NotMarkov
from .tent import CriticalOrbitData, critical_orbit, half, tent_apply


@dataclass
class MarkovPartition:
    beta: AlgebraicParameter
    cuts: list  # sorted AlgebraicPoints

    @property
    def size(self) -> int:
        return len(self.cuts) - 1

    def intervals(self):
        return [(self.cuts[i], self.cuts[i + 1]) for i in range(self.size)]

    def locate(self, x: AlgebraicPoint) -> int:
        """Index of the cut equal to x (raises if x is not a cut)."""
        for i, p in enumerate(self.cuts):
            if p == x:
                return i
        raise NotMarkov(f"{x!r} is not a cut point")


def build_partition(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None) -> MarkovPartition:
    if orbit is None:
        orbit = critical_orbit(beta)
    pts = set(orbit.points) | {beta.point(0), beta.point(1), half(beta)}
    cuts = sorted(pts, key=lambda p: _K(p))
    part = MarkovPartition(beta, cuts)
    # certify: every image endpoint is a cut, so images are unions of intervals
    for lo, hi in part.intervals():
        for e in (lo, hi):
            img = tent_apply(beta, e, check=False)
            if img not in pts:
                raise NotMarkov(f"f({e!r}) is not a cut point")
    return part


class _K:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return self.x.compare(other.x) < 0


@dataclass
class TransitionMatrix:
    partition: MarkovPartition
    entries: list
    spectral_radius: tuple = (0.0, 0.0)
    perron_right: list = field(default_factory=list)
    perron_left: list = field(default_factory=list)
    charpoly_divisible: bool | None = None
    charpoly: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.entries)

    def power(self, n: int) -> list[list[int]]:
        return mat_pow(self.entries, n)

    def to_dict(self) -> dict:
        return {
            "cuts": [float(c) for c in self.partition.cuts],
            "matrix": self.entries,
            "spectral_radius": [float(self.spectral_radius[0]), float(self.spectral_radius[1])],
            "perron_right": self.perron_right,
            "perron_left": self.perron_left,
            "charpoly": self.charpoly,
            "min_poly_divides_charpoly": self.charpoly_divisible,
        }


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_pow(A, n):
    size = len(A)
    R = [[int(i == j) for j in range(size)] for i in range(size)]
    P = A
    while n:
        if n & 1:
            R = mat_mul(R, P)
        P = mat_mul(P, P)
        n >>= 1
    return R


def build_matrix(partition: MarkovPartition) -> TransitionMatrix:
    beta = partition.beta
    ivs = partition.intervals()
    s = len(ivs)
    B = [[0] * s for _ in range(s)]
    for i, (lo, hi) in enumerate(ivs):
        a, b = tent_apply(beta, lo, check=False), tent_apply(beta, hi, check=False)
        if a.compare(b) > 0:
            a, b = b, a
        ia, ib = partition.locate(a), partition.locate(b)
        for j in range(ia, ib):
            B[i][j] = 1
    tm = TransitionMatrix(partition, B)
    lo, hi, v, w = spectral_radius(B)
    tm.spectral_radius = (lo, hi)
    tm.perron_right, tm.perron_left = v, w
    x = sympy.Symbol("x")
    cp = sympy.Matrix(B).charpoly(x)
    tm.charpoly = [int(c) for c in cp.all_coeffs()]
    tm.charpoly_divisible = sympy.rem(sympy.Poly(tm.charpoly, x),
                                      sympy.Poly(list(beta.min_poly), x)).is_zero
    return tm


def _sccs(B):
    """Strongly connected components (Tarjan), as lists of indices."""
    n = len(B)
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in range(n):
            if B[v][w]:
                if w not in index:
                    visit(w)
                    low[v] = min(low[v], low[w])
                elif w in on:
                    low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in range(n):
        if v not in index:
            visit(v)
    return out


def _component_radius(B, comp, tol, max_iter, dps):
    """Collatz-Wielandt enclosure of rho for an irreducible block, via B + I."""
    k = len(comp)
    sub = [[B[i][j] for j in comp] for i in comp]
    if k == 1 and sub[0][0] == 0:
        return mpmath.mpf(0), mpmath.mpf(0), [mpmath.mpf(1)]
    with mpmath.workdps(dps):
        v = [mpmath.mpf(1)] * k
        for it in range(max_iter):
            w = [v[i] + sum(sub[i][j] * v[j] for j in range(k)) for i in range(k)]
            ratios = [w[i] / v[i] for i in range(k)]
            lo, hi = min(ratios) - 1, max(ratios) - 1
            norm = max(w)
            v = [x / norm for x in w]
            if hi - lo <= tol:
                return lo, hi, v
    raise NonConvergence("power iteration did not reach the requested width")


def spectral_radius(B, tol: float = 1e-12, max_iter: int = 20000, dps: int = 40):
    """Enclosure ``(lo, hi)`` of the spectral radius with Perron vectors."""
    comps = _sccs(B)
    best = None
    try:
        for comp in comps:
            lo, hi, v = _component_radius(B, comp, mpmath.mpf(tol) / 4, max_iter, dps)
            if best is None or hi > best[1]:
                best = (lo, hi, comp, v)
    except NonConvergence:
        x = sympy.Symbol("x")
        roots = sympy.Poly(sympy.Matrix(B).charpoly(x).as_expr(), x).intervals(eps=sympy.Rational(1, 10**14))
        (a, b), _ = roots[-1]
        return float(a), float(b), [], []
    lo, hi, comp, v = best
    n = len(B)
    rho = float((lo + hi) / 2)
    right = _extend(B, comp, [float(x) for x in v], rho)
    Bt = [[B[j][i] for j in range(n)] for i in range(n)]
    _, _, vl = _component_radius(Bt, comp, mpmath.mpf(tol) / 4, max_iter, dps)
    left = _extend(Bt, comp, [float(x) for x in vl], rho)
    s = sum(a * b for a, b in zip(left, right))
    if s > 0:
        left = [x / s for x in left]
    return lo, hi, right, left


def _extend(B, comp, vc, rho):
    """Eigenvector of the whole matrix from the dominant block's one.

    Off the block, solve (rho I - B_oo) v_o = B_oc v_c; when rho is shared
    with another block the system is singular and the padded vector is kept.
    """
    n = len(B)
    out = [0.0] * n
    for idx, val in zip(comp, vc):
        out[idx] = val
    others = [i for i in range(n) if i not in set(comp)]
    if not others:
        return out
    A = np.array([[(rho if i == j else 0.0) - B[i][j] for j in others] for i in others])
    rhs = np.array([sum(B[i][j] * out[j] for j in comp) for i in others])
    try:
        vo = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return out
    for i, val in zip(others, vo):
        out[i] = max(float(val), 0.0)
    return out


def adjacent_blocks(partition: MarkovPartition, point: AlgebraicPoint) -> list[int]:
    i = partition.locate(point)
    return [j for j in (i - 1, i) if 0 <= j < partition.size]


def growth_constant(beta: AlgebraicParameter, B: TransitionMatrix, orbit: CriticalOrbitData | None = None,
                    n_max: int = 64, safety: float = 2.0) -> float:
    """M with F(n) <= M beta**n, from column sums of B**n into the blocks beside c_t."""
    if orbit is None:
        orbit = critical_orbit(beta)
    if n_max < 10:
        raise ValueError("n_max must be >= 10")
    cols = adjacent_blocks(B.partition, orbit.c_t)
    bf = float(beta)
    P = [[int(i == j) for j in range(B.size)] for i in range(B.size)]
    best = 0.0
    for n in range(1, n_max + 1):
        P = mat_mul(P, B.entries)
        total = sum(P[i][j] for i in range(B.size) for j in cols)
        best = max(best, math.exp(math.log(total) - n * math.log(bf)) if total else 0.0)
    return safety * best


def lap_counts(beta: AlgebraicParameter, orbit: CriticalOrbitData | None, n_max: int) -> list[int]:
    """Exact number of monotone laps of f**n on [0, 1], n = 0..n_max.

    Memoised on image intervals, whose endpoints stay in the forward
    invariant set orb(c) with 0 and 1.
    """
    if orbit is None:
        orbit = critical_orbit(beta)
    c = half(beta)
    pts = list(set(orbit.points) | {beta.point(0), beta.point(1)})
    idx = {p: i for i, p in enumerate(pts)}
    img = [idx[tent_apply(beta, p, check=False)] for p in pts]
    ic1 = idx[tent_apply(beta, c, check=False)]
    r = len(pts)
    cmp_c = [p.compare(c) for p in pts]
    order = {}
    for i in range(r):
        for j in range(r):
            order[i, j] = pts[i].compare(pts[j])
    # children of interval (i, j) with i < j: list of image intervals
    kids = {}
    for i in range(r):
        for j in range(r):
            if order[i, j] >= 0:
                continue
            if cmp_c[i] < 0 < cmp_c[j]:
                kids[i, j] = [_norm(img[i], ic1, order), _norm(ic1, img[j], order)]
            else:
                kids[i, j] = [_norm(img[i], img[j], order)]
    cur = {key: 1 for key in kids}
    cur[None] = 0
    i0, i1 = idx[beta.point(0)], idx[beta.point(1)]
    out = [1]
    for _ in range(n_max):
        nxt = {None: 0}
        for key, ch in kids.items():
            nxt[key] = sum(cur[k] if k is not None else 0 for k in ch)
        cur = nxt
        out.append(cur[i0, i1])
    return out


def _norm(a, b, order):
    if a == b:
        return None  # degenerate image: constant piece, cannot happen for tent maps
    return (a, b) if order[a, b] < 0 else (b, a)


def entropy_estimates(laps: list[int]) -> tuple[float, float]:
    """(1/n) log lap_n and the two-step ratio estimate at the last index."""
    n = len(laps) - 1
    direct = math.log(laps[n]) / n
    ratio = (math.log(laps[n]) - math.log(laps[n - 2])) / 2
    return direct, ratio


def analyze(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None):
    part = build_partition(beta, orbit)
    return build_matrix(part)

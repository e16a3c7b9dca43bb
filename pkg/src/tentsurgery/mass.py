"""Left mass Λ(y): total inserted length attached to points below y.

Writing ``b(k) = a(k) - a(k+m)`` the non-orbit part of Λ is
``sum_k b(k) P_k(y)``.  Unrolling the counting recursion along the orbit
``theta_j = f^j(y)`` turns this into a signed sum of

    G(j) = sum_i b(i+j+1) K_i,     K_i = 2 P_i(c1) + E_i(c1),

and these are resummed through the rational generating function of K,
``a(n) = 2 beta**-n * int_0^1 s**(n-1) (1-s) ds`` and Gauss-Legendre moments.
Everything past the point where the orbit of y is resolved is enclosed by a
rigorous tail term, so each query returns a value and a radius.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from .algebraic import AlgebraicParameter, AlgebraicPoint
from .errors import DomainError, NonConvergence, TailBoundUnavailable
from .preimage import LengthSchedule, cut_system, exact_chain, level_count, orbit_levels
from .tent import CriticalOrbitData, as_point, critical_orbit, half, in_unit, tent_apply

_Z = sympy.Symbol("z")

# absolute floor of the float resummation; requests below it are not honoured
NOISE_FLOOR = 1e-13


def _conv(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


class Resummed:
    """``G(j) = sum_i b(i+j+1) ell_i`` for a linear functional ``ell`` of the cut state."""

    def __init__(self, model: "MassModel", ell: list[int]):
        self.model = model
        self.ell = list(ell)
        cs = model.cs
        D = len(ell)
        cs._grow(2 * D + 2)
        seq = []
        for i in range(2 * D + 2):
            st = cs._P[i] + cs._E[i]
            seq.append(sum(e * s for e, s in zip(ell, st)))
        self.seq = seq
        Q = model.Q_low
        if not any(seq):
            self.zero = True
            self.values = np.zeros(model.jmax + 1)
            self.errors = np.zeros(model.jmax + 1)
            return
        self.zero = False
        num = _conv(Q, seq, len(Q) - 1) if len(Q) > 1 else []
        pn = sympy.Poly(list(reversed(num)) or [0], _Z, domain="QQ")
        pq = sympy.Poly(list(reversed(Q)), _Z, domain="QQ")
        g = sympy.gcd(pn, pq)
        pn = sympy.div(pn, g)[0]
        pq = sympy.div(pq, g)[0]
        lead = pq.all_coeffs()[-1]  # constant term, nonzero since Q(0) = 1 before scaling
        pn, pq = pn * (1 / lead), pq * (1 / lead)
        self.num_low = [Fraction(int(c.p), int(c.q)) for c in reversed(pn.all_coeffs())]
        self.den_low = [Fraction(int(c.p), int(c.q)) for c in reversed(pq.all_coeffs())]
        # does the denominator vanish at z = 1/beta?
        mp_poly = sympy.Poly(list(model.beta.min_poly), _Z, domain="QQ")
        rev = sympy.Poly(list(reversed(pq.all_coeffs())), _Z, domain="QQ")
        self.pole = sympy.rem(rev, mp_poly).is_zero
        self._moments()

    def _moments(self) -> None:
        model = self.model
        with mpmath.workdps(50):
            b = model.beta_mp
            ns = [mpmath.mpf(c.numerator) / c.denominator / b ** i for i, c in enumerate(self.num_low)]
            qs = [mpmath.mpf(c.numerator) / c.denominator / b ** i for i, c in enumerate(self.den_low)]
            if self.pole:
                # synthetic division of qs(s) by (s - 1), high-first
                hi = list(reversed(qs))
                out = [hi[0]]
                for c in hi[1:]:
                    out.append(c + out[-1])
                rem = out.pop()
                scale = max(abs(c) for c in qs)
                if abs(rem) > scale * mpmath.mpf(10) ** -30:
                    raise NonConvergence("pole at s=1 did not divide out")
                h_high = [-c for c in out]  # (1-s)/qs(s) = 1/h(s)
                num_high = [float(c) for c in reversed(ns)]
                den_high = [float(c) for c in h_high]
                self._num = np.array(num_high or [0.0])
                self._den = np.array(den_high)
                self._extra = False
            else:
                self._num = np.array([float(c) for c in reversed(ns)] or [0.0])
                self._den = np.array([float(c) for c in reversed(qs)])
                self._extra = True
        if len(self._den) > 1:
            roots = np.roots(self._den)
            for r in roots:
                if abs(r.imag) < 1e-7 and -1e-7 <= r.real <= 1 + 1e-7:
                    raise NonConvergence("generating function has a pole on [0, 1]")
        mu1 = self._quad(model.gl_lo)
        mu2 = self._quad(model.gl_hi)
        err = np.abs(mu2 - mu1) + 1e-15 * np.abs(mu2)
        jmax, m, bf = model.jmax, model.m, model.bf
        j = np.arange(jmax + 1)
        pw = bf ** -(j + 1.0)
        bm = bf ** -float(m)
        self.values = 2.0 * pw * (mu2[: jmax + 1] - bm * mu2[m: jmax + 1 + m])
        self.errors = 2.0 * pw * (err[: jmax + 1] + bm * err[m: jmax + 1 + m]) + 1e-16 * np.abs(self.values)

    def _quad(self, rule):
        x, w = rule
        r = np.polyval(self._num, x) / np.polyval(self._den, x)
        if self._extra:
            r = r * (1.0 - x)
        v = w * r
        n = self.model.jmax + self.model.m + 1
        out = np.empty(n)
        p = v.copy()
        for k in range(n):
            out[k] = p.sum()
            p *= x
        return out

    def G(self, j: int) -> float:
        if self.zero:
            return 0.0
        if j <= self.model.jmax:
            return float(self.values[j])
        return float(self.values[-1]) * self.model.bf ** -(j - self.model.jmax)

    def err(self, j: int) -> float:
        if self.zero:
            return 0.0
        if j <= self.model.jmax:
            return float(self.errors[j])
        return float(self.errors[-1] + self.values[-1])

    def direct(self, j: int, terms: int = 3000) -> float:
        """Plain truncated sum of ``b(i+j+1) ell_i``, used as an oracle in tests."""
        m, lb = self.model.m, math.log(self.model.bf)
        total = 0.0
        for i in range(terms):
            li = self.ell_at(i)
            if li <= 0:
                continue
            k = i + j + 1
            lg = math.log(li) - k * lb + math.log(2.0)
            term = math.exp(lg - math.log(k * (k + 1.0))) - math.exp(lg - m * lb - math.log((k + m) * (k + m + 1.0)))
            total += term
            if term < 1e-30 * max(total, 1e-300):
                break
        return total

    def ell_at(self, i: int) -> int:
        cs = self.model.cs
        cs._grow(i)
        st = cs._P[i] + cs._E[i]
        return sum(e * s for e, s in zip(self.ell, st))


class MassModel:
    """All per-slope data needed to evaluate Λ quickly."""

    def __init__(self, beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None):
        if orbit is None:
            orbit = critical_orbit(beta)
        self.beta = beta
        self.orbit = orbit
        self.cs = cut_system(beta, orbit)
        self.sched = LengthSchedule(beta)
        self.bf = float(beta)
        self.m = orbit.period
        self.t = orbit.preperiod
        with mpmath.workdps(50):
            self.beta_mp = beta.mpf(200)
        self.jmax = min(4000, int(math.ceil(40 * math.log(10) / math.log(self.bf))) + 8)
        n_lo = max(160, self.jmax // 2 + 40)
        n_hi = 2 * n_lo
        self.gl_lo = self._rule(n_lo)
        self.gl_hi = self._rule(n_hi)
        A = sympy.Matrix(self.cs.matrix())
        cp = A.charpoly(sympy.Symbol("x")).all_coeffs()
        self.Q_low = [int(c) for c in cp]  # det(I - zA), low-first
        r = self.cs.r
        D = 2 * r
        ell_K = [0] * D
        ell_K[self.cs.i_c1] += 2
        ell_K[r + self.cs.i_c1] += 1
        ell_T = [0] * D
        ell_T[self.cs.i_one] += 1
        ell_T[r + self.cs.i_one] += 1
        self.GK = Resummed(self, ell_K)
        self.GT = Resummed(self, ell_T)
        self._GP: dict[int, Resummed] = {}
        self._lock = threading.Lock()
        # orbit bookkeeping
        c = half(beta)
        self.c_f = 0.5
        self.ct = orbit.c_t
        self.ct_f = float(orbit.c_t)
        levels = orbit_levels(orbit)
        self.orbit_level = {p: lv for p, lv in zip(orbit.points, levels)}
        self.level_of_s = {}
        for p, i in self.cs.index.items():
            self.level_of_s[i] = self.orbit_level.get(p)
        order = sorted(range(len(orbit.points)), key=lambda i: float(orbit.points[i]))
        self.orbit_sorted = [orbit.points[i] for i in order]
        self.orbit_sorted_f = [float(orbit.points[i]) for i in order]
        self.orbit_sorted_a = [self.a(levels[i]) if levels[i] >= 1 else 0.0 for i in order]
        self._c = c

    @staticmethod
    def _rule(n):
        x, w = np.polynomial.legendre.leggauss(n)
        return (x + 1.0) / 2.0, w / 2.0

    def a(self, n: int) -> float:
        if n > 1000:
            return math.exp(math.log(2.0) - n * math.log(self.bf) - math.log(n * (n + 1.0)))
        return self.sched.a(n)

    def b(self, n: int) -> float:
        return self.a(n) - self.a(n + self.m)

    def GP(self, i: int) -> Resummed:
        got = self._GP.get(i)
        if got is None:
            r = self.cs.r
            ell = [0] * (2 * r)
            ell[i] = 1
            got = Resummed(self, ell)
            with self._lock:
                self._GP[i] = got
        return got

    def hit_sum(self, i: int, J: int) -> float:
        """sum_{k >= 0} b(J+k) E_k(s_i): hits of c_t along the orbit of s_i."""
        lv = self.level_of_s.get(i)
        if lv is None:
            return 0.0
        total = 0.0
        k = lv
        while True:
            term = self.b(J + k)
            total += term
            if term < 1e-30:
                break
            k += self.m
        return total

    def _tail_bounds(self, J: int, S: int) -> tuple[float, float]:
        W = self.GT.G(J - 1) + self.GT.err(J - 1)
        X = self.b(J) / (1.0 - self.bf ** -self.m)
        return W, abs(S) * X

    # -- the core sum ----------------------------------------------------------------

    def _orbit_terms(self, y_lt) -> float:
        """#{orbit < y} - a(m)[c_t < y] - sum a(level) over orbit points below y."""
        total = 0.0
        for p, pf, pa in zip(self.orbit_sorted, self.orbit_sorted_f, self.orbit_sorted_a):
            if y_lt(p, pf):
                total += 1.0 - pa
        if y_lt(self.ct, self.ct_f):
            total -= self.a(self.m)
        return total

    def _sum_exact(self, y: AlgebraicPoint, tail_tol: float) -> tuple[float, float]:
        beta, cs = self.beta, self.cs
        c, ct = self._c, self.ct
        acc = 0.0
        err = 0.0
        eps = 1
        S = 0
        x = y
        j = 0
        while True:
            if j >= 1:
                i = cs.index.get(x)
                if i is not None:
                    gp = self.GP(i)
                    acc += eps * gp.G(j - 1)
                    err += gp.err(j - 1)
                    if S:
                        acc -= S * self.hit_sum(i, j)
                    break
                W, X = self._tail_bounds(j, S)
                if W + X <= tail_tol:
                    lo = min(0.0, eps * W) + (-X if S > 0 else 0.0)
                    hi = max(0.0, eps * W) + (X if S < 0 else 0.0)
                    acc += (lo + hi) / 2
                    err += (hi - lo) / 2
                    break
                if ct.compare(x) < 0:
                    acc += eps * self.b(j)
            if x.compare(c) > 0:
                acc += eps * self.GK.G(j)
                err += self.GK.err(j)
                S += eps
                eps = -eps
            x = tent_apply(beta, x, check=False)
            j += 1
        return acc, err + 1e-15 * (abs(acc) + 1.0)

    def _sum_float(self, y: float, tail_tol: float):
        """Float chain with a running error radius; None if y itself is undecidable."""
        bf = self.bf
        ct = self.ct_f
        gk, gke = self.GK.values, self.GK.errors
        jmax = self.jmax
        acc = 0.0
        err = 0.0
        eps = 1
        S = 0
        x = y
        d = 0.0
        j = 0
        grow = bf + 1e-15
        while True:
            if j >= 1:
                ambiguous = abs(x - ct) <= d + 1e-15 or abs(x - 0.5) <= d + 1e-15
                W, X = self._tail_bounds(j, S)
                if ambiguous or W + X <= tail_tol:
                    lo = min(0.0, eps * W) + (-X if S > 0 else 0.0)
                    hi = max(0.0, eps * W) + (X if S < 0 else 0.0)
                    acc += (lo + hi) / 2
                    err += (hi - lo) / 2
                    break
                if x > ct:
                    acc += eps * self.b(j)
            elif abs(x - 0.5) <= 1e-15 or abs(x - ct) <= 1e-15:
                return None
            if x > 0.5:
                if j <= jmax:
                    acc += eps * gk[j]
                    err += gke[j]
                else:
                    acc += eps * self.GK.G(j)
                    err += self.GK.err(j)
                S += eps
                eps = -eps
                x = bf * (1.0 - x)
            else:
                x = bf * x
            d = grow * d + 9e-16
            j += 1
        return acc, err + 1e-15 * (abs(acc) + 1.0)

    FIXED_BITS = 192

    def _fixed_consts(self):
        fc = getattr(self, "_fc", None)
        if fc is None:
            P = self.FIXED_BITS
            lo, hi = self.beta.interval(P + 8)
            B = (lo.numerator << P) // lo.denominator
            pb = self.beta.power_bounds(P)
            ct_lo = ct_hi = 0
            for q, (a, b) in zip(self.ct.coeffs, pb):
                u, v = q * a, q * b
                ct_lo += math.floor(min(u, v))
                ct_hi += math.ceil(max(u, v))
            fc = self._fc = (P, B, (ct_lo + ct_hi) // 2, (ct_hi - ct_lo) // 2 + 2)
        return fc

    def _sum_fixed(self, y: float, tail_tol: float):
        """The float chain redone in P-bit fixed point; stays decisive far deeper."""
        P, B, CT, cte = self._fixed_consts()
        one, H = 1 << P, 1 << (P - 1)
        gk, gke = self.GK.values, self.GK.errors
        jmax = self.jmax
        fy = Fraction(y)
        X = (fy.numerator << P) // fy.denominator
        acc = 0.0
        err = 0.0
        eps = 1
        S = 0
        d = 1
        j = 0
        while True:
            if j >= 1:
                ambiguous = abs(X - CT) <= d + cte or abs(X - H) <= d
                W, Xb = self._tail_bounds(j, S)
                if ambiguous or W + Xb <= tail_tol:
                    lo = min(0.0, eps * W) + (-Xb if S > 0 else 0.0)
                    hi = max(0.0, eps * W) + (Xb if S < 0 else 0.0)
                    acc += (lo + hi) / 2
                    err += (hi - lo) / 2
                    break
                if X > CT:
                    acc += eps * self.b(j)
            elif abs(X - H) <= d or abs(X - CT) <= d + cte:
                return None
            if X > H:
                if j <= jmax:
                    acc += eps * gk[j]
                    err += gke[j]
                else:
                    acc += eps * self.GK.G(j)
                    err += self.GK.err(j)
                S += eps
                eps = -eps
                X = (B * (one - X)) >> P
            else:
                X = (B * X) >> P
            d = 2 * d + 3
            j += 1
        return acc, err + 1e-15 * (abs(acc) + 1.0)

    # -- public --------------------------------------------------------------------

    def left_mass(self, y, eps: float = 1e-12, allow_wide: bool = False) -> tuple[float, float]:
        """Enclosure of Λ(y) (strict: insertions at points < y).

        With ``allow_wide`` a float query returns the fast enclosure even when
        it is wider than eps; callers use that to settle easy comparisons.
        """
        tail_tol = max(eps, NOISE_FLOOR) / 8
        if isinstance(y, float):
            if not 0.0 <= y <= 1.0:
                raise DomainError(f"{y} is outside [0, 1]")
            res = None
            if 1e-15 < y < 1 - 1e-15 and all(abs(y - pf) > 1e-15 for pf in self.orbit_sorted_f):
                res = self._sum_float(y, tail_tol)
            if res is not None and not allow_wide and 2 * res[1] > max(eps, NOISE_FLOOR):
                res = self._sum_fixed(y, tail_tol) or res
            if res is not None:
                val, rad = res
                if allow_wide or 2 * rad <= max(eps, NOISE_FLOOR):
                    base = self._orbit_terms(lambda p, pf: pf < y)
                    v = base + val
                    return float(v - rad), float(v + rad)
            y = Fraction(y)
        yp = as_point(self.beta, y)
        if not in_unit(yp):
            raise DomainError(f"{yp!r} is outside [0, 1]")
        val, rad = self._sum_exact(yp, tail_tol)
        base = self._orbit_terms(lambda p, pf: p.compare(yp) < 0)
        v = base + val
        return float(v - rad), float(v + rad)

    def level_of(self, y, max_steps: int = 400) -> int | None:
        """First-hit level of y if y is a preimage of c_t, else None."""
        yp = as_point(self.beta, Fraction(y) if isinstance(y, float) else y)
        cs = self.cs
        x = yp
        for n in range(max_steps + 1):
            if x == self.ct:
                return n
            i = cs.index.get(x)
            if i is not None:
                lv = self.level_of_s.get(i)
                return None if lv is None else n + lv
            x = tent_apply(self.beta, x, check=False)
        return None

    def length_at(self, y) -> float:
        """Inserted length at y: 1 on the orbit, a(level) on other preimages, else 0."""
        yp = as_point(self.beta, Fraction(y) if isinstance(y, float) else y)
        if yp in self.orbit_level:
            return 1.0
        lv = self.level_of(yp)
        return 0.0 if lv is None else self.a(lv)

    def total_length(self, eps: float = 1e-12) -> tuple[float, float]:
        lo, hi = self.left_mass(self.beta.point(1), eps)
        ln = self.length_at(self.beta.point(1))
        return lo + ln, hi + ln

    def sum_Fa(self, n0: int = 1, eps: float = 1e-12) -> tuple[float, float]:
        """Enclosure of sum_{n >= n0} F(n) a(n) (orbit points included)."""
        lo, hi = self.total_length(eps)
        fix = -len(self.orbit.points) + sum(self.a(lv) for lv in self.orbit_level.values() if lv >= 1)
        for n in range(1, n0):
            fix -= level_count(self.beta, self.orbit, n) * self.a(n)
        slack = 1e-15 * (abs(lo) + 1)
        return lo + fix - slack, hi + fix + slack


_models: dict = {}
_models_lock = threading.Lock()


def mass_model(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None) -> MassModel:
    key = beta.key()
    model = _models.get(key)
    if model is None:
        model = MassModel(beta, orbit)
        with _models_lock:
            _models.setdefault(key, model)
            model = _models[key]
    return model


def left_mass(beta: AlgebraicParameter, orbit: CriticalOrbitData | None, y, eps: float = 1e-9):
    return mass_model(beta, orbit).left_mass(y, eps)


def total_length(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None, eps: float = 1e-9):
    return mass_model(beta, orbit).total_length(eps)


def left_mass_truncated(beta: AlgebraicParameter, orbit: CriticalOrbitData | None, y, eps: float,
                        M: float | None, inclusive: bool = False) -> tuple[float, float]:
    """Direct level-by-level sum to depth N with the tail bound 2M/(N+1) <= eps/2.

    Independent of the resummation; practical only for coarse eps.
    """
    if M is None:
        raise TailBoundUnavailable("a certified growth constant M is required")
    if orbit is None:
        orbit = critical_orbit(beta)
    N = max(1, math.ceil(4 * M / eps) - 1)
    yp = as_point(beta, Fraction(y) if isinstance(y, float) else y)
    if yp.sign() == 0 and not inclusive:
        return 0.0, 0.0
    cs = cut_system(beta, orbit)
    ch = exact_chain(cs, yp, N)
    ct = orbit.c_t
    bf = float(beta)
    logb = math.log(bf)
    m = orbit.period
    # P_n(y) for n <= N along the chain
    P = []
    rights = ch.right
    L = ch.length
    for n in range(N + 1):
        J = min(n, L)
        total = 0
        e = 1
        s = 0
        for j in range(J):
            if rights[j]:
                total += e * cs.K(n - j - 1)
                s += e
                e = -e
        if J == n:
            th = ch.thetas[n]
            last = 1 if ct.compare(th) < 0 else 0
            hit = 1 if th == ct else 0
        else:
            last = cs.P(n - J, ch.s_index)
            hit = cs.E(n - J, ch.s_index)
        val = total - s * hit + e * last
        if inclusive:
            val += hit
        P.append(val)
    sched_levels = orbit_levels(orbit)
    orbit_below = [(p, lv) for p, lv in zip(orbit.points, sched_levels)
                   if p.compare(yp) < 0 or (inclusive and p == yp)]
    total = float(len(orbit_below))
    excl = {}
    for _, lv in orbit_below:
        excl[lv] = excl.get(lv, 0) + 1
    for n in range(1, N + 1):
        Nn = P[n] - (P[n - m] if n >= m else 0)
        Nn -= excl.get(n, 0)
        if Nn:
            total += math.exp(math.log(Nn) - n * logb + math.log(2.0 / (n * (n + 1))))
    slack = 1e-12 * (total + 1)
    return total - slack, total + eps / 2 + slack

"""Exact arithmetic in the real number field Q(beta).

A slope is given by an integer polynomial and a rational interval isolating
one real root.  Points are reduced coefficient vectors ``sum q_i beta**i``
with ``deg < d``; equality is coefficient equality and order is decided by
refining the root interval until an interval evaluation excludes zero.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import sympy

from .errors import InvalidParameter, PrecisionExhausted

Rational = int | Fraction

_X = sympy.Symbol("x")

DEFAULT_BIT_BUDGET = 1 << 14


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"cannot interpret {value!r} as a rational")


def _horner(coeffs_low: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs_low):
        acc = acc * x + c
    return acc


class AlgebraicParameter:
    """A real algebraic slope ``beta`` with ``1 < beta <= 2``.

    ``min_poly`` lists integer coefficients from the highest degree down,
    e.g. ``[1, -1, -1]`` for ``x**2 - x - 1``.  ``isolate`` is an open
    rational interval containing exactly one root of ``min_poly``.
    """

    def __init__(self, min_poly: Sequence[int], isolate: tuple, name: str | None = None,
                 bit_budget: int = DEFAULT_BIT_BUDGET):
        coeffs = [int(c) for c in min_poly]
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        if len(coeffs) < 2:
            raise InvalidParameter("min_poly must have degree >= 1")
        self.min_poly = tuple(coeffs)
        self.isolate = (_as_fraction(isolate[0]), _as_fraction(isolate[1]))
        self.name = name
        self.bit_budget = bit_budget
        self._low = tuple(reversed(coeffs))  # low-first
        self.degree = len(coeffs) - 1
        self._lock = threading.Lock()
        self._intervals: list[tuple[Fraction, Fraction]] = []
        self._powers: dict[int, tuple[tuple[int, int], ...]] = {}
        self._validate()
        self._beta = None
        self._inv_beta = None
        self._consts: dict = {}

    # -- validation and refinement -------------------------------------------------

    def _validate(self) -> None:
        lo, hi = self.isolate
        if not lo < hi:
            raise InvalidParameter("isolating interval must satisfy lo < hi")
        poly = sympy.Poly(list(self.min_poly), _X, domain="QQ")
        if sympy.degree(sympy.gcd(poly, poly.diff(_X))) > 0:
            raise InvalidParameter("min_poly is not square-free")
        on_lo = _horner(self._low, lo) == 0
        on_hi = _horner(self._low, hi) == 0
        inside = poly.count_roots(lo, hi) - int(on_lo) - int(on_hi)
        if inside != 1:
            raise InvalidParameter(f"interval ({lo}, {hi}) holds {inside} roots, expected 1")
        # Root must be in (1, 2]: count in the intersection with that range.
        a, b = max(lo, Fraction(1)), min(hi, Fraction(2))
        count = 0
        if a < b or (a == b and a == 2):
            count = poly.count_roots(a, b)
            if _horner(self._low, a) == 0 and (a == lo or a == 1):
                count -= 1
            if _horner(self._low, b) == 0 and b == hi:
                count -= 1
        if count != 1:
            raise InvalidParameter("isolated root does not satisfy 1 < beta <= 2")
        # Shrink to an interval with a strict sign change (or an exact rational root).
        while True:
            mid = (lo + hi) / 2
            pm = _horner(self._low, mid)
            if pm == 0:
                self._intervals.append((mid, mid))
                return
            left = poly.count_roots(lo, mid) - int(_horner(self._low, lo) == 0)
            if left >= 1:
                hi = mid
            else:
                lo = mid
            plo, phi = _horner(self._low, lo), _horner(self._low, hi)
            if plo != 0 and phi != 0 and (plo > 0) != (phi > 0):
                self._intervals.append((lo, hi))
                return

    @property
    def exact_rational(self) -> Fraction | None:
        lo, hi = self._intervals[0]
        return lo if lo == hi else None

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational enclosure of beta with width at most ``2**-bits``."""
        if bits > self.bit_budget:
            raise PrecisionExhausted(f"refinement beyond {self.bit_budget} bits")
        target = Fraction(1, 1 << bits)
        with self._lock:
            for lo, hi in self._intervals:
                if hi - lo <= target:
                    return lo, hi
            lo, hi = self._intervals[-1]
            s_lo = _horner(self._low, lo) > 0
            while hi - lo > target:
                mid = (lo + hi) / 2
                pm = _horner(self._low, mid)
                if pm == 0:
                    lo = hi = mid
                    break
                if (pm > 0) == s_lo:
                    lo = mid
                else:
                    hi = mid
                # coarse checkpoints keep the cache short
                if (hi - lo) * (1 << 32) <= self._intervals[-1][1] - self._intervals[-1][0]:
                    self._intervals.append((lo, hi))
            self._intervals.append((lo, hi))
            return lo, hi

    def power_bounds(self, prec: int) -> tuple[tuple[int, int], ...]:
        """Integer bounds ``lo_i <= beta**i * 2**prec <= hi_i`` for i < degree."""
        got = self._powers.get(prec)
        if got is not None:
            return got
        lo, hi = self.interval(prec + 8 * self.degree + 8)
        scale = 1 << prec
        out = []
        plo, phi = Fraction(1), Fraction(1)
        for _ in range(self.degree):
            a, b = plo * scale, phi * scale
            out.append((a.numerator // a.denominator, -((-b.numerator) // b.denominator)))
            plo, phi = plo * lo, phi * hi
        bounds = tuple(out)
        with self._lock:
            self._powers[prec] = bounds
        return bounds

    # -- values -------------------------------------------------------------------

    def __float__(self) -> float:
        lo, hi = self.interval(64)
        return float((lo + hi) / 2)

    def mpf(self, prec: int = 200):
        import mpmath

        lo, hi = self.interval(prec + 8)
        mid = (lo + hi) / 2
        with mpmath.workprec(prec + 16):
            return mpmath.mpf(mid.numerator) / mid.denominator

    @property
    def beta(self) -> "AlgebraicPoint":
        if self._beta is None:
            if self.degree == 1:
                self._beta = self.point(self.exact_rational)
            else:
                self._beta = AlgebraicPoint(self, (0, 1) + (0,) * (self.degree - 2), 1)
        return self._beta

    @property
    def inv_beta(self) -> "AlgebraicPoint":
        if self._inv_beta is None:
            self._inv_beta = self.point(1) / self.beta
        return self._inv_beta

    def point(self, value) -> "AlgebraicPoint":
        """Embed a rational number or a low-first rational coefficient list."""
        if isinstance(value, AlgebraicPoint):
            return value
        if isinstance(value, (list, tuple)):
            fr = [_as_fraction(v) for v in value]
            if len(fr) > self.degree:
                return _from_poly(self, fr)
            fr += [Fraction(0)] * (self.degree - len(fr))
            return AlgebraicPoint.from_fractions(self, fr)
        fr = _as_fraction(value)
        got = self._consts.get(fr)
        if got is None:
            got = AlgebraicPoint.from_fractions(self, [fr] + [Fraction(0)] * (self.degree - 1))
            if len(self._consts) < 64:
                self._consts[fr] = got
        return got

    # -- identity / serialization ------------------------------------------------

    def key(self) -> tuple:
        return (self.min_poly, self._intervals[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraicParameter) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        label = f"{self.name}, " if self.name else ""
        return f"AlgebraicParameter({label}{list(self.min_poly)}, ~{float(self):.12g})"

    def to_dict(self) -> dict:
        d = {"min_poly": list(self.min_poly),
             "isolate": [str(self.isolate[0]), str(self.isolate[1])]}
        if self.name:
            d["name"] = self.name
        return d

    def catalog_name(self) -> str | None:
        """Catalog entry with the same minimal polynomial and root, if any."""
        for key, (poly, iso) in CATALOG_SPECS.items():
            if list(poly) == list(self.min_poly):
                lo, hi = Fraction(iso[0]), Fraction(iso[1])
                if lo < self.interval(32)[1] and self.interval(32)[0] < hi:
                    return key
        return None

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraicParameter":
        return cls(data["min_poly"], tuple(data["isolate"]), name=data.get("name"))


CATALOG_SPECS = {
    "full": ([1, -2], ("3/2", "5/2")),
    "golden": ([1, -1, -1], ("1", "2")),
    "sqrt2": ([1, 0, -2], ("1", "2")),
}
CATALOG_ALIASES = {"2": "full", "two": "full", "phi": "golden", "root2": "sqrt2"}

_catalog_cache: dict[str, AlgebraicParameter] = {}


def catalog(name: str) -> AlgebraicParameter:
    """Built-in slopes: ``full`` (beta=2), ``golden`` and ``sqrt2``."""
    key = CATALOG_ALIASES.get(name, name)
    if key not in CATALOG_SPECS:
        raise KeyError(f"unknown catalog slope {name!r}; choose from {sorted(CATALOG_SPECS)}")
    if key not in _catalog_cache:
        poly, iso = CATALOG_SPECS[key]
        _catalog_cache[key] = AlgebraicParameter(poly, iso, name=key)
    return _catalog_cache[key]


def _normalize(nums: Iterable[int], den: int) -> tuple[tuple[int, ...], int]:
    nums = tuple(nums)
    if den < 0:
        nums = tuple(-n for n in nums)
        den = -den
    g = den
    for n in nums:
        g = gcd(g, n)
        if g == 1:
            break
    if g > 1:
        nums = tuple(n // g for n in nums)
        den //= g
    if not any(nums):
        den = 1
    return nums, den


def _from_poly(param: AlgebraicParameter, coeffs: list[Fraction]) -> "AlgebraicPoint":
    """Reduce an arbitrary-degree rational polynomial in beta modulo min_poly."""
    c = list(coeffs)
    d = param.degree
    p = param._low
    lead = p[d]
    for k in range(len(c) - 1, d - 1, -1):
        q = c[k]
        if q:
            c[k] = Fraction(0)
            for i in range(d):
                c[k - d + i] -= q * p[i] / lead
    return AlgebraicPoint.from_fractions(param, c[:d] + [Fraction(0)] * (d - len(c[:d])))


class AlgebraicPoint:
    """An element of Q(beta) in canonical reduced form.

    Stored as integer numerators over a common positive denominator; two
    points are equal iff their (numerators, denominator) agree.
    """

    __slots__ = ("param", "nums", "den", "_float")

    def __init__(self, param: AlgebraicParameter, nums: Sequence[int], den: int = 1):
        self.param = param
        self.nums, self.den = _normalize(nums, den)
        self._float = None

    @classmethod
    def from_fractions(cls, param: AlgebraicParameter, coeffs: Sequence[Fraction]) -> "AlgebraicPoint":
        den = 1
        for q in coeffs:
            den = den * q.denominator // gcd(den, q.denominator)
        return cls(param, [int(q * den) for q in coeffs], den)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.nums)

    # -- arithmetic -----------------------------------------------------------------

    def _coerce(self, other) -> "AlgebraicPoint":
        if isinstance(other, AlgebraicPoint):
            return other
        return self.param.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        d1, d2 = self.den, o.den
        return AlgebraicPoint(self.param, [a * d2 + b * d1 for a, b in zip(self.nums, o.nums)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicPoint(self.param, [-a for a in self.nums], self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, q: Rational) -> "AlgebraicPoint":
        q = Fraction(q)
        return AlgebraicPoint(self.param, [a * q.numerator for a in self.nums], self.den * q.denominator)

    def mul_beta(self) -> "AlgebraicPoint":
        """Multiply by beta (one shift plus one reduction step)."""
        p = self.param
        if p.degree == 1:
            r = p.exact_rational
            return AlgebraicPoint(p, [self.nums[0] * r.numerator], self.den * r.denominator)
        nums = self.nums
        top = nums[-1]
        low = p._low
        lead = low[-1]
        shifted = (0,) + nums[:-1]
        if top == 0:
            return AlgebraicPoint(p, shifted, self.den)
        if lead == 1:
            return AlgebraicPoint(p, [s - top * low[i] for i, s in enumerate(shifted)], self.den)
        return AlgebraicPoint(p, [s * lead - top * low[i] for i, s in enumerate(shifted)], self.den * lead)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        d = self.param.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.nums):
            if a:
                for j, b in enumerate(o.nums):
                    if b:
                        prod[i + j] += a * b
        den = self.den * o.den
        return _from_poly(self.param, [Fraction(c, den) for c in prod])

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicPoint":
        if not any(self.nums):
            raise ZeroDivisionError("inverse of zero in Q(beta)")
        poly = sympy.Poly(list(reversed(self.coeffs)), _X, domain="QQ")
        mod = sympy.Poly(list(self.param.min_poly), _X, domain="QQ")
        inv = sympy.invert(poly, mod)
        coeffs = [_as_fraction(c) for c in reversed(sympy.Poly(inv, _X, domain="QQ").all_coeffs())]
        return self.param.point(coeffs)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        result = self.param.point(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order ----------------------------------------------------------------------

    def sign(self) -> int:
        nums = self.nums
        if not any(nums):
            return 0
        if len(nums) == 1:
            return 1 if nums[0] > 0 else -1
        p = self.param
        prec = max(64, max(abs(n).bit_length() for n in nums) + 24)
        while True:
            if prec > p.bit_budget:
                raise PrecisionExhausted("sign undecided within bit budget")
            bounds = p.power_bounds(prec)
            s_lo = s_hi = 0
            for a, (lo, hi) in zip(nums, bounds):
                if a >= 0:
                    s_lo += a * lo
                    s_hi += a * hi
                else:
                    s_lo += a * hi
                    s_hi += a * lo
            if s_lo > 0:
                return 1
            if s_hi < 0:
                return -1
            prec *= 2

    def compare(self, other) -> int:
        """Return -1, 0 or 1 as ``self`` is below, equal to or above ``other``."""
        o = self._coerce(other)
        if self.den == o.den and self.nums == o.nums:
            return 0
        return (self - o).sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __eq__(self, other):
        if isinstance(other, AlgebraicPoint):
            return self.den == other.den and self.nums == other.nums
        if isinstance(other, (int, Fraction)):
            return self == self.param.point(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nums, self.den))

    def __float__(self) -> float:
        if self._float is None:
            nums = self.nums
            if len(nums) == 1:
                self._float = float(Fraction(nums[0], self.den))
            else:
                prec = max(64, max(abs(n).bit_length() for n in nums) + 64)
                bounds = self.param.power_bounds(prec)
                s = sum(a * (lo + hi) for a, (lo, hi) in zip(nums, bounds))
                self._float = float(Fraction(s, 2 * self.den << prec))
        return self._float

    def to_strings(self) -> list[str]:
        return [str(q) for q in self.coeffs]

    def __repr__(self) -> str:
        terms = []
        for i, q in enumerate(self.coeffs):
            if q:
                terms.append(f"{q}" if i == 0 else (f"{q}*b" if i == 1 else f"{q}*b^{i}"))
        return f"<{' + '.join(terms) or '0'} ~ {float(self):.12g}>"

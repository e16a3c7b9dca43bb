"""The symmetric tent map on ℚ(beta), its critical orbit, and kneading words."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .algebraic import AlgebraicParameter, AlgebraicPoint
from .errors import DomainError, LengthMismatch, NotRenormalizable

LT, EQ, GT = -1, 0, 1

DEFAULT_MAX_ITER = 4096


class Symbol(str, Enum):
    ZERO = "0"
    STAR = "*"
    ONE = "1"


_SYMBOL_RANK = {Symbol.ZERO: 0, Symbol.STAR: 1, Symbol.ONE: 2}


def half(beta: AlgebraicParameter) -> AlgebraicPoint:
    return beta.point(Fraction(1, 2))


def as_point(beta: AlgebraicParameter, x) -> AlgebraicPoint:
    if isinstance(x, AlgebraicPoint):
        if x.param is not beta and x.param != beta:
            raise DomainError("point belongs to a different field")
        return x
    return beta.point(x)


def compare(x: AlgebraicPoint, y) -> int:
    """Exact order: LT, EQ or GT."""
    return x.compare(y)


def in_unit(x: AlgebraicPoint) -> bool:
    return x.sign() >= 0 and (x - 1).sign() <= 0


def tent_apply(beta: AlgebraicParameter, x, check: bool = True) -> AlgebraicPoint:
    """``beta*x`` on [0, 1/2] and ``beta*(1-x)`` on (1/2, 1]."""
    x = as_point(beta, x)
    if check and not in_unit(x):
        raise DomainError(f"{x!r} is outside [0, 1]")
    if x.compare(half(beta)) <= 0:
        return x.mul_beta()
    return (1 - x).mul_beta()


def tent_iterate(beta: AlgebraicParameter, x, n: int) -> AlgebraicPoint:
    x = as_point(beta, x)
    for _ in range(n):
        x = tent_apply(beta, x, check=False)
    return x


def tent_float(beta: float, x: float) -> float:
    return beta * x if x <= 0.5 else beta * (1.0 - x)


class NotFinite:
    """Returned when no repeat shows up within ``max_iter`` steps."""

    def __init__(self, max_iter: int):
        self.max_iter = max_iter

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"NotFinite(max_iter={self.max_iter})"


@dataclass(frozen=True)
class CriticalOrbitData:
    points: tuple
    preperiod: int
    period: int

    @property
    def t(self) -> int:
        return self.preperiod

    @property
    def m(self) -> int:
        return self.period

    @property
    def c_t(self) -> AlgebraicPoint:
        return self.points[self.preperiod]

    def index(self, x: AlgebraicPoint) -> int | None:
        for i, p in enumerate(self.points):
            if p == x:
                return i
        return None

    def successor(self, i: int) -> int:
        return i + 1 if i + 1 < len(self.points) else self.preperiod

    def sorted_points(self) -> list[AlgebraicPoint]:
        return sorted(self.points, key=_cmp_key)

    def to_dict(self) -> dict:
        return {"points": [p.to_strings() for p in self.points],
                "approx": [float(p) for p in self.points],
                "preperiod": self.preperiod, "period": self.period}


class _cmp_key:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return self.x.compare(other.x) < 0


_orbit_cache: dict = {}


def critical_orbit(beta: AlgebraicParameter, max_iter: int = DEFAULT_MAX_ITER):
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    key = (beta.key(), max_iter)
    if key in _orbit_cache:
        return _orbit_cache[key]
    x = half(beta)
    seen = {x: 0}
    points = [x]
    result = NotFinite(max_iter)
    for step in range(1, max_iter + 1):
        x = tent_apply(beta, x, check=False)
        if x in seen:
            t = seen[x]
            result = CriticalOrbitData(tuple(points), t, step - t)
            break
        seen[x] = step
        points.append(x)
    _orbit_cache[key] = result
    return result


@dataclass(frozen=True)
class ItineraryWord:
    symbols: tuple

    def __str__(self) -> str:
        return "".join(s.value for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ItineraryWord(self.symbols[i])
        return self.symbols[i]

    @classmethod
    def parse(cls, text: str) -> "ItineraryWord":
        return cls(tuple(Symbol(ch) for ch in text))


def symbol_of(beta: AlgebraicParameter, x: AlgebraicPoint) -> Symbol:
    s = x.compare(half(beta))
    return Symbol.ZERO if s < 0 else (Symbol.STAR if s == 0 else Symbol.ONE)


def itinerary(beta: AlgebraicParameter, x, n: int) -> ItineraryWord:
    if n < 1:
        raise DomainError("itinerary length must be >= 1")
    x = as_point(beta, x)
    if not in_unit(x):
        raise DomainError(f"{x!r} is outside [0, 1]")
    out = []
    for i in range(n):
        out.append(symbol_of(beta, x))
        if i + 1 < n:
            x = tent_apply(beta, x, check=False)
    return ItineraryWord(tuple(out))


def parity_lex_compare(u, v) -> int:
    """Order words by 0 < * < 1, reversed after an odd number of ones."""
    if isinstance(u, str):
        u = ItineraryWord.parse(u)
    if isinstance(v, str):
        v = ItineraryWord.parse(v)
    if len(u) != len(v):
        raise LengthMismatch(f"words of length {len(u)} and {len(v)}")
    ones = 0
    for a, b in zip(u.symbols, v.symbols):
        if a != b:
            r = LT if _SYMBOL_RANK[a] < _SYMBOL_RANK[b] else GT
            return -r if ones % 2 else r
        if a == Symbol.ONE:
            ones += 1
    return EQ


def renorm_depth(beta: AlgebraicParameter) -> int:
    """The k >= 0 with sqrt2 < beta**(2**k) <= 2."""
    p = beta.beta
    k = 0
    # p > sqrt2 iff p*p > 2, since p > 0
    while (p * p).compare(2) <= 0:
        p = p * p
        k += 1
    return k


def core_interval(beta: AlgebraicParameter) -> tuple[AlgebraicPoint, AlgebraicPoint]:
    b = beta.beta
    return b * (1 - b.scale(Fraction(1, 2))), b.scale(Fraction(1, 2))


@dataclass(frozen=True)
class RestrictiveInterval:
    lo: AlgebraicPoint
    hi: AlgebraicPoint
    k: int
    period: int
    image: tuple  # exact hull of f^period(J)

    def contains(self, x: AlgebraicPoint) -> bool:
        return x.compare(self.lo) >= 0 and x.compare(self.hi) <= 0


def _image_hull(beta, lo, hi, steps):
    """Exact hull of f^steps([lo, hi])."""
    c = half(beta)
    a, b = lo, hi
    for _ in range(steps):
        fa, fb = tent_apply(beta, a, check=False), tent_apply(beta, b, check=False)
        if a.compare(c) < 0 < b.compare(c):
            top = tent_apply(beta, c, check=False)
            bot = fa if fa.compare(fb) <= 0 else fb
            a, b = bot, top
        else:
            a, b = (fa, fb) if fa.compare(fb) <= 0 else (fb, fa)
    return a, b


def _branch_fixed_points(beta, period):
    """Fixed points of f^period on each monotone lap: (point, orientation)."""
    b = beta.beta
    out = []
    for word in range(1 << period):
        # f^n(x) = s*beta^n x + r on the lap coded by word
        s, r = 1, beta.point(0)
        for i in range(period):
            left = not (word >> i) & 1
            # apply x -> beta x or beta - beta x to (s*B^i x + r)
            if left:
                r = r * b
            else:
                s, r = -s, b - r * b
        slope = b ** period
        denom = 1 - slope if s > 0 else 1 + slope
        x = r / denom
        if not in_unit(x):
            continue
        y, ok = x, True
        for i in range(period):
            left = not (word >> i) & 1
            if left != (y.compare(half(beta)) <= 0) and y != half(beta):
                ok = False
                break
            y = tent_apply(beta, y, check=False)
        if ok and y == x:
            out.append((x, s))
    return out


def restrictive_interval(beta: AlgebraicParameter, k: int = 1) -> RestrictiveInterval:
    depth = renorm_depth(beta)
    if k < 1 or k > depth:
        raise NotRenormalizable(f"k={k} exceeds renormalization depth {depth}")
    c = half(beta)
    period = 1 << k
    half_period = period >> 1
    if k == 1:
        b = beta.beta
        p = b / (1 + b)
        candidates = [p]
    else:
        # orientation reversing periodic points of the return map one level up
        candidates = sorted({x for x, s in _branch_fixed_points(beta, half_period) if s < 0},
                            key=_cmp_key)
    best = None
    for p in candidates:
        if p.compare(c) <= 0:
            continue
        q = 1 - p  # the symmetric partner has the same image under f
        lo, hi = q, p
        img = _image_hull(beta, lo, hi, period)
        if img[0].compare(lo) >= 0 and img[1].compare(hi) <= 0:
            if best is None or (hi - lo).compare(best.hi - best.lo) < 0:
                best = RestrictiveInterval(lo, hi, k, period, img)
    if best is None:
        raise NotRenormalizable(f"no invariant interval of period {period} certified")
    return best

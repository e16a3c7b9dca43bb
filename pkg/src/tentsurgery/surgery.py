"""Layout of the fattened interval, the collapse map and the surgered map g.

Every first-hit preimage x of c_t is blown up into an interval
``[iota-(x), iota+(x)]`` with ``iota-(x) = x + Λ(x)``.  Orbit points get
length 1, other level-n preimages get a(n).  Between insertions the map
is ``iota o f o pi``; on an insertion it is a cubic branch onto the interval
of f(x).
"""

from __future__ import annotations

import bisect
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .algebraic import AlgebraicParameter, AlgebraicPoint
from .branches import CubicBranch, critical_pair, make_branch
from .errors import DomainError, SchemaError
from .mass import MassModel, mass_model
from .preimage import LengthSchedule, enumerate_tree, orbit_levels, TREE_CAP
from .tent import (CriticalOrbitData, as_point, critical_orbit, half, itinerary, tent_apply,
                   tent_float)

SCHEMA_VERSION = 1

INSERTED = "INSERTED"
CANTOR = "CANTOR"


@dataclass
class InsertedIntervalRecord:
    point: AlgebraicPoint
    level: int
    word: str
    side: str                 # "L", "R", "CRITICAL" or "ORBIT(i)"
    length: float
    iota_minus: tuple         # enclosure (lo, hi)
    orbit_index: int | None = None
    x: float = 0.0

    @property
    def u(self) -> float:
        return (self.iota_minus[0] + self.iota_minus[1]) / 2

    @property
    def v(self) -> float:
        return self.u + self.length

    @property
    def target(self) -> str:
        return self.word[1:] if len(self.word) > 1 else self.word

    @property
    def increasing(self) -> bool:
        return self.word[0] == "0"

    def to_dict(self) -> dict:
        return {"word": self.word, "level": self.level, "side": self.side,
                "length": self.length, "iota_minus": [self.iota_minus[0], self.iota_minus[1]],
                "point": self.point.to_strings(), "orbit_index": self.orbit_index}


@dataclass
class Classification:
    kind: str
    record: InsertedIntervalRecord | None = None
    local: float | None = None
    x: float | None = None
    x_lo: float | None = None
    x_hi: float | None = None
    y_lo: float | None = None
    y_hi: float | None = None
    endpoint: str | None = None   # "minus"/"plus" when y is an insertion endpoint


class SurgeredMapDescriptor:
    """Immutable layout of I_beta = [0, 1 + L] with materialised insertions."""

    def __init__(self, beta: AlgebraicParameter, orbit: CriticalOrbitData, N: int, eps: float,
                 L: tuple, records: list[InsertedIntervalRecord], lipschitz: float):
        self.beta = beta
        self.orbit = orbit
        self.N = N
        self.eps = eps
        self.L = (float(L[0]), float(L[1]))
        self.records = records
        self.lipschitz = lipschitz
        self.bf = float(beta)
        self.schedule = LengthSchedule(beta)
        self._by_point = {r.point: r for r in records}
        self._lo = [r.u for r in records]
        self._hi = [r.v for r in records]
        self._xs = [r.x for r in records]
        self._virtual: dict = {}
        self._lock = threading.Lock()
        self._mm: MassModel | None = None
        self._c = half(beta)

    # -- basic geometry ---------------------------------------------------------

    @property
    def mass(self) -> MassModel:
        if self._mm is None:
            self._mm = mass_model(self.beta, self.orbit)
        return self._mm

    @property
    def a_beta(self) -> float:
        return 0.0

    @property
    def b_beta(self) -> float:
        return 1.0 + (self.L[0] + self.L[1]) / 2

    @property
    def total_length(self) -> float:
        return (self.L[0] + self.L[1]) / 2

    @property
    def cantor_fraction(self) -> float:
        return 1.0 / self.b_beta

    def record_for(self, point: AlgebraicPoint) -> InsertedIntervalRecord:
        """Materialised record, or a virtual one built on demand for deep hosts."""
        rec = self._by_point.get(point)
        if rec is not None:
            return rec
        rec = self._virtual.get(point)
        if rec is not None:
            return rec
        rec = _make_record(self.beta, self.orbit, self.mass, point, None)
        if rec is None:
            raise DomainError(f"{point!r} is not a preimage of c_t")
        with self._lock:
            self._virtual[point] = rec
        return rec

    def image_record(self, rec: InsertedIntervalRecord) -> InsertedIntervalRecord:
        return self.record_for(tent_apply(self.beta, rec.point, check=False))

    def branches(self, rec: InsertedIntervalRecord) -> tuple[CubicBranch, ...]:
        img = self.image_record(rec)
        if rec.side == "CRITICAL":
            return critical_pair(rec.u, img.u, self.bf)
        unit = rec.orbit_index is not None
        return (make_branch(rec.increasing, unit, rec.u, rec.v, img.u, img.v, self.bf),)

    def branch_at(self, rec: InsertedIntervalRecord, local: float) -> CubicBranch:
        br = self.branches(rec)
        if len(br) == 2 and local > 0.5:
            return br[1]
        return br[0]

    # -- embedding and collapse ---------------------------------------------------

    def embed(self, x, side: str = "minus") -> float:
        """iota-(x) or iota+(x) = iota-(x) + length."""
        if isinstance(x, float):
            if not 0.0 <= x <= 1.0:
                raise DomainError(f"{x} outside [0, 1]")
            lo, hi = self.mass.left_mass(x, self.eps / 4)
            base = x + (lo + hi) / 2
            if side == "plus":
                base += self.mass.length_at(x)
            return base
        xp = as_point(self.beta, x)
        rec = self._by_point.get(xp) or self._virtual.get(xp)
        if rec is None and self.mass.level_of(xp) is not None:
            rec = self.record_for(xp)
        if rec is not None:
            return rec.v if side == "plus" else rec.u
        lo, hi = self.mass.left_mass(xp, self.eps / 4)
        return float(xp) + (lo + hi) / 2

    def collapse(self, y: float, eps: float | None = None) -> float:
        cl = self.classify(y, eps)
        if cl.kind == INSERTED:
            return cl.record.x
        return cl.x

    def _F(self, x: float, tol: float, precise: bool = False) -> tuple[float, float]:
        """Enclosure of iota-(x) = x + Λ(x); wide unless ``precise``."""
        lo, hi = self.mass.left_mass(x, tol, allow_wide=not precise)
        return x + lo, x + hi

    def classify(self, y: float, eps: float | None = None) -> Classification:
        eps = self.eps if eps is None else eps
        top = self.b_beta
        if y < -1e-12 or y > top + 1e-12:
            raise DomainError(f"{y} outside [0, {top}]")
        y = min(max(y, 0.0), top)
        k = bisect.bisect_right(self._lo, y) - 1
        if k >= 0 and y <= self._hi[k]:
            rec = self.records[k]
            if y == self._hi[k] and not rec.point == 1:
                return Classification(CANTOR, record=rec, x=rec.x, x_lo=rec.x, x_hi=rec.x,
                                      y_lo=y, y_hi=y, endpoint="plus")
            if y == self._lo[k] and rec.point.sign() != 0:
                return Classification(CANTOR, record=rec, x=rec.x, x_lo=rec.x, x_hi=rec.x,
                                      y_lo=y, y_hi=y, endpoint="minus")
            return Classification(INSERTED, record=rec, local=min(max(y - rec.u, 0.0), rec.length))
        # bracket between materialised records
        if k >= 0:
            lo, Flo = math.nextafter(self._xs[k], 2.0), (self._hi[k], self._hi[k])
        else:
            lo, Flo = 0.0, (0.0, 0.0)
        if k + 1 < len(self.records):
            hi, Fhi = math.nextafter(self._xs[k + 1], -1.0), (self._lo[k + 1], self._lo[k + 1])
        else:
            hi = 1.0
            Fhi = self._F(1.0, 1e-13, precise=True)
        tau = eps / (2.0 * self.lipschitz)
        tol = max(tau / 4, 1e-13)
        while True:
            if Fhi[1] - Flo[0] <= tau:
                a, b = (Flo[0] + Flo[1]) / 2, (Fhi[0] + Fhi[1]) / 2
                x = lo if b <= a else lo + (hi - lo) * (y - a) / (b - a)
                x = min(max(x, lo), hi)
                return Classification(CANTOR, x=x, x_lo=lo, x_hi=hi, y_lo=Flo[0], y_hi=Fhi[1])
            if Fhi[0] - Flo[1] <= tau:
                # only the enclosure widths keep the bracket open
                if Flo[1] - Flo[0] > tol:
                    Flo = self._F(lo, tol, precise=True)
                if Fhi[1] - Fhi[0] > tol:
                    Fhi = self._F(hi, tol, precise=True)
                if Fhi[1] - Flo[0] <= tau:
                    continue
            mid = (lo + hi) / 2
            if not lo < mid < hi:
                found = self._identify(lo, hi, y)
                if found is not None:
                    return found
                x = lo
                return Classification(CANTOR, x=x, x_lo=lo, x_hi=hi, y_lo=Flo[0], y_hi=Fhi[1])
            Fm = self._F(mid, tol)
            if Fm[0] <= y <= Fm[1]:
                Fm = self._F(mid, tol, precise=True)
            if (Fm[0] + Fm[1]) / 2 <= y:
                lo, Flo = mid, Fm
            else:
                hi, Fhi = mid, Fm

    def _identify(self, lo: float, hi: float, y: float) -> Classification | None:
        """Pull c_t back along the orbit of x ~ lo to find the host of a jump."""
        bf = self.bf
        ct = float(self.orbit.c_t)
        x = (lo + hi) / 2
        d = hi - lo
        thetas = []
        for n in range(0, 200):
            thetas.append(x)
            if n >= 1 and abs(x - ct) <= d + 1e-12:
                host = self._pull_back(thetas[:-1])
                if host is not None:
                    fl, fh = Fraction(lo), Fraction(hi)
                    if fl <= _to_fraction_bound(host, fl, fh):
                        rec = self.record_for(host)
                        if rec.u <= y <= rec.v:
                            return Classification(INSERTED, record=rec, local=y - rec.u)
            if self.mass.a(n + 1) < 1e-300:
                break
            x = tent_float(bf, x)
            d = bf * d + 2e-16
            if d > 0.25:
                break
        return None

    def _pull_back(self, thetas: list[float]) -> AlgebraicPoint | None:
        beta = self.beta
        z = self.orbit.c_t
        for th in reversed(thetas):
            pre = z * beta.inv_beta
            z = pre if th <= 0.5 else 1 - pre
        if self.mass.level_of(z) != len(thetas):
            return None
        return z

    # -- the map ------------------------------------------------------------------

    def eval(self, y: float, eps: float | None = None) -> tuple[float, float]:
        """g(y) and an error radius."""
        eps = self.eps if eps is None else eps
        cl = self.classify(y, eps)
        return self.eval_classified(cl, eps)

    def eval_classified(self, cl: Classification, eps: float) -> tuple[float, float]:
        if cl.kind == INSERTED:
            rec = cl.record
            br = self.branch_at(rec, cl.local)
            if br.v1 - br.u1 <= 1e-14 * max(1.0, abs(br.u1)):
                # below float resolution: the image interval is the answer
                return (br.u2 + br.v2) / 2, (br.v2 - br.u2) / 2 + 1e-13
            return br.eval_local(rec.u + cl.local - br.u1), 1e-13
        if cl.endpoint is not None:
            img = self.image_record(cl.record)
            inc = cl.record.increasing
            if cl.record.side == "CRITICAL":
                return img.u, 1e-13
            if (cl.endpoint == "minus") == inc:
                return img.u, 1e-13
            return img.v, 1e-13
        fx = tent_float(self.bf, cl.x)
        fx = min(max(fx, 0.0), 1.0)
        lo, hi = self.mass.left_mass(fx, max(eps / 8, 1e-13))
        val = fx + (lo + hi) / 2
        rad = self.lipschitz * (cl.y_hi - cl.y_lo) + (hi - lo) / 2 + 1e-15
        return val, rad

    def deriv(self, y: float) -> float | None:
        cl = self.classify(y)
        if cl.kind == INSERTED:
            rec = cl.record
            br = self.branch_at(rec, cl.local)
            return br.deriv_local(rec.u + cl.local - br.u1)
        return None

    def eval_endpoint(self, point, side: str):
        """Symbolic image of iota-(x) ("minus") or iota+(x) ("plus").

        Returns ``(image point, image side, derivative)`` with the derivative
        an exact element of Q(beta), always +beta or -beta.
        """
        xp = as_point(self.beta, point)
        fx = tent_apply(self.beta, xp, check=False)
        b = self.beta.beta
        s = xp.compare(self._c)
        if s == 0:
            return fx, "minus", (b if side == "minus" else -b)
        if s < 0:
            return fx, side, b
        return fx, ("plus" if side == "minus" else "minus"), -b

    def symbolic_orbit(self, point, side: str, j: int):
        """j-step symbolic orbit of an endpoint and its derivative product."""
        prod = self.beta.point(1)
        xp, sd = as_point(self.beta, point), side
        path = [(xp, sd)]
        for _ in range(j):
            xp, sd, d = self.eval_endpoint(xp, sd)
            prod = prod * d
            path.append((xp, sd))
        return path, prod

    # -- unit interval conjugate --------------------------------------------------

    def to_unit(self, y: float) -> float:
        return (y - self.a_beta) / (self.b_beta - self.a_beta)

    def from_unit(self, x: float) -> float:
        return self.a_beta + x * (self.b_beta - self.a_beta)

    def eval_unit(self, x: float, eps: float | None = None) -> tuple[float, float]:
        if not -1e-15 <= x <= 1 + 1e-15:
            raise DomainError(f"{x} outside [0, 1]")
        val, rad = self.eval(self.from_unit(x), eps)
        w = self.b_beta - self.a_beta
        return self.to_unit(val), rad / w

    # -- persistence --------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "beta": self.beta.to_dict(),
            "orbit": [p.to_strings() for p in self.orbit.points],
            "t": self.orbit.preperiod,
            "m": self.orbit.period,
            "N": self.N,
            "eps": self.eps,
            "L": [self.L[0], self.L[1]],
            "lipschitz": self.lipschitz,
            "records": [r.to_dict() for r in self.records],
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, data: dict) -> "SurgeredMapDescriptor":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"schema_version {data.get('schema_version')!r} != {SCHEMA_VERSION}")
        try:
            beta = AlgebraicParameter.from_dict(data["beta"])
            pts = tuple(beta.point([Fraction(s) for s in p]) for p in data["orbit"])
            orbit = CriticalOrbitData(pts, int(data["t"]), int(data["m"]))
            records = []
            for r in data["records"]:
                point = beta.point([Fraction(s) for s in r["point"]])
                records.append(InsertedIntervalRecord(
                    point, int(r["level"]), r["word"], r["side"], float(r["length"]),
                    (float(r["iota_minus"][0]), float(r["iota_minus"][1])),
                    r.get("orbit_index"), float(point)))
            return cls(beta, orbit, int(data["N"]), float(data["eps"]), tuple(data["L"]),
                       records, float(data["lipschitz"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed descriptor: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SurgeredMapDescriptor":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _to_fraction_bound(host: AlgebraicPoint, lo: Fraction, hi: Fraction):
    """Return lo when host lies in [lo, hi), else something larger than lo."""
    if host.compare(lo) >= 0 and host.compare(hi) < 0:
        return lo
    return lo + 1


def _make_record(beta, orbit, mm: MassModel, point: AlgebraicPoint, level: int | None,
                 word: str | None = None) -> InsertedIntervalRecord | None:
    orbit_index = orbit.index(point)
    if level is None:
        level = mm.level_of(point)
        if level is None:
            return None
    if word is None:
        word = str(itinerary(beta, point, level + 1))
    if orbit_index is not None:
        length = 1.0
        side = "CRITICAL" if orbit_index == 0 else f"ORBIT({orbit_index})"
    else:
        length = mm.a(level)
        side = "L" if word[0] == "0" else "R"
    lo, hi = mm.left_mass(point, 1e-13)
    xf = float(point)
    return InsertedIntervalRecord(point, level, word, side, length, (xf + lo, xf + hi), orbit_index, xf)


def lipschitz_bound(beta: AlgebraicParameter, orbit: CriticalOrbitData) -> float:
    """sup |g'| over every branch kind that occurs, including deep levels."""
    bf = float(beta)
    sched = LengthSchedule(beta)
    levels = orbit_levels(orbit)
    best = bf * 4.0  # non-orbit image, level 2: beta + 3 beta/(n-1)
    # hosts whose image is an orbit point: ratio 1/a(n)
    top = max(levels) + 1
    tree = enumerate_tree(beta, orbit, min(top, TREE_CAP))
    orbit_set = set(orbit.points)
    for lv in tree[1:]:
        for nd in lv:
            if nd.on_orbit:
                continue
            img = tent_apply(beta, nd.point, check=False)
            if img in orbit_set:
                ratio = 1.0 / sched.a(nd.level)
                best = max(best, bf + 1.5 * (ratio - bf))
    f1, f2 = critical_pair(0.0, 0.0, bf)
    best = max(best, f1.deriv_extrema()[1], -f2.deriv_extrema()[0], bf)
    return best


def layout(beta: AlgebraicParameter, orbit: CriticalOrbitData | None = None, N: int = 8,
           eps: float = 1e-9, cap: int = TREE_CAP) -> SurgeredMapDescriptor:
    if orbit is None:
        orbit = critical_orbit(beta)
    mm = mass_model(beta, orbit)
    L = mm.total_length(min(eps, 1e-12))
    tree = enumerate_tree(beta, orbit, N, cap=cap)
    nodes = {}
    for lv in tree:
        for nd in lv:
            nodes[nd.point] = (nd.level, str(nd.word))
    for p, lv in zip(orbit.points, orbit_levels(orbit)):
        if p not in nodes:
            nodes[p] = (lv, None)
    records = []
    for p, (lv, word) in nodes.items():
        records.append(_make_record(beta, orbit, mm, p, lv, word))
    records.sort(key=lambda r: _RK(r))
    return SurgeredMapDescriptor(beta, orbit, N, eps, L, records, lipschitz_bound(beta, orbit))


class _RK:
    __slots__ = ("r",)

    def __init__(self, r):
        self.r = r

    def __lt__(self, other):
        if abs(self.r.x - other.r.x) > 1e-9:
            return self.r.x < other.r.x
        return self.r.point.compare(other.r.point) < 0


def symbolic_step(label, orbit: CriticalOrbitData | None = None):
    """Shift a host label one step forward.

    A word ``s_n ... s_0`` loses its leading symbol; a one-letter word is
    the orbit interval at c_t.  Orbit intervals are labelled ``("orbit", i)``
    and advance to the successor index, wrapping from t+m-1 back to t.
    """
    if isinstance(label, tuple) and label and label[0] == "orbit":
        if orbit is None:
            raise DomainError("orbit data needed to step an orbit label")
        return ("orbit", orbit.successor(label[1]))
    word = str(label)
    if not word:
        raise DomainError("empty word")
    if len(word) == 1:
        if orbit is None:
            raise DomainError("orbit data needed to step past c_t")
        return ("orbit", orbit.successor(orbit.preperiod))
    return word[1:]


def steps_to_cycle(label) -> int:
    """Number of shifts until a word reaches the orbit cycle at c_t."""
    return len(str(label)) - 1

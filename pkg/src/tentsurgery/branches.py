"""Cubic diffeomorphisms gluing inserted intervals together.

All branches are written in the local coordinate ``s = x - u1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainError


class BranchKind(str, Enum):
    H_INC = "H_INC"
    R_DEC = "R_DEC"
    UNIT_G = "UNIT_G"
    UNIT_W = "UNIT_W"
    CRIT_F1 = "CRIT_F1"
    CRIT_F2 = "CRIT_F2"


@dataclass(frozen=True)
class CubicBranch:
    """One cubic piece ``[u1, v1] -> [u2, v2]`` with endpoint slopes of modulus beta.

    Increasing kinds send u1 to u2; decreasing kinds send u1 to v2.  The
    turning pair CRIT_F1/CRIT_F2 covers the two halves of a unit interval,
    each half sending its outer end to u2 and the midpoint to v2.
    """

    kind: BranchKind
    u1: float
    v1: float
    u2: float
    v2: float
    beta: float

    @property
    def length(self) -> float:
        return self.v1 - self.u1

    @property
    def ratio(self) -> float:
        return (self.v2 - self.u2) / (self.v1 - self.u1)

    @property
    def k(self) -> float:
        L = self.v1 - self.u1
        return 6.0 * ((self.v2 - self.u2) - self.beta * L) / L ** 3

    def _local(self, x: float, strict: bool) -> float:
        s = x - self.u1
        if strict:
            tol = 1e-12 * max(1.0, abs(self.u1), abs(self.v1))
            if s < -tol or x > self.v1 + tol:
                raise DomainError(f"{x} outside [{self.u1}, {self.v1}]")
        return s

    def eval_local(self, s: float) -> float:
        b = self.beta
        kind = self.kind
        if kind is BranchKind.H_INC:
            L = self.v1 - self.u1
            return self.u2 + b * s + self.k * (L * s * s / 2 - s ** 3 / 3)
        if kind is BranchKind.R_DEC:
            L = self.v1 - self.u1
            return self.v2 - b * s + self.k * (s ** 3 / 3 - L * s * s / 2)
        if kind is BranchKind.UNIT_G:
            return self.u2 + b * s + 6 * (b - 1) * (s ** 3 / 3 - s * s / 2)
        if kind is BranchKind.UNIT_W:
            return self.v2 - b * s + 6 * (1 - b) * (s ** 3 / 3 - s * s / 2)
        if kind is BranchKind.CRIT_F1:
            return (-16 + 4 * b) * s ** 3 + (12 - 4 * b) * s * s + b * s + self.u2
        # CRIT_F2: the domain is the right half, measured from the midpoint
        return (16 - 4 * b) * s ** 3 + (2 * b - 12) * s * s + self.v2

    def deriv_local(self, s: float) -> float:
        b = self.beta
        kind = self.kind
        if kind is BranchKind.H_INC:
            L = self.v1 - self.u1
            return b + self.k * (L - s) * s
        if kind is BranchKind.R_DEC:
            L = self.v1 - self.u1
            return -b + self.k * (s - L) * s
        if kind is BranchKind.UNIT_G:
            return b + 6 * (b - 1) * s * (s - 1)
        if kind is BranchKind.UNIT_W:
            return -b + 6 * (1 - b) * s * (s - 1)
        if kind is BranchKind.CRIT_F1:
            return (1 - 2 * s) * ((24 - 6 * b) * s + b)
        return 3 * (16 - 4 * b) * s * s + 2 * (2 * b - 12) * s

    def __call__(self, x: float, strict: bool = True) -> float:
        return self.eval_local(self._local(x, strict))

    def deriv(self, x: float, strict: bool = True) -> float:
        return self.deriv_local(self._local(x, strict))

    def endpoint_derivs(self) -> tuple[float, float]:
        L = self.v1 - self.u1
        return self.deriv_local(0.0), self.deriv_local(L)

    def deriv_extrema(self) -> tuple[float, float]:
        """Exact min and max of the quadratic derivative over the domain."""
        L = self.v1 - self.u1
        cands = [0.0, L]
        kind = self.kind
        if kind in (BranchKind.H_INC, BranchKind.R_DEC):
            cands.append(L / 2)
        elif kind in (BranchKind.UNIT_G, BranchKind.UNIT_W):
            cands.append(0.5)
        elif kind is BranchKind.CRIT_F1:
            # (1-2s)((24-6b)s+b) = -2(24-6b)s^2 + (24-6b-2b)s + b
            a2 = -2 * (24 - 6 * self.beta)
            a1 = 24 - 8 * self.beta
            if a2:
                cands.append(min(max(-a1 / (2 * a2), 0.0), L))
        else:
            a2 = 3 * (16 - 4 * self.beta)
            a1 = 2 * (2 * self.beta - 12)
            if a2:
                cands.append(min(max(-a1 / (2 * a2), 0.0), L))
        vals = [self.deriv_local(s) for s in cands]
        return min(vals), max(vals)

    def inverse(self, z: float, tol: float = 1e-15) -> float:
        """Preimage of z under this (monotone) branch, by safeguarded Newton."""
        lo, hi = 0.0, self.v1 - self.u1
        flo = self.eval_local(lo) - z
        if flo == 0:
            return self.u1
        if self.eval_local(hi) == z:
            return self.v1
        s = hi / 2
        for _ in range(200):
            fs = self.eval_local(s) - z
            if (fs > 0) == (flo > 0):
                lo, flo = s, fs
            else:
                hi = s
            d = self.deriv_local(s)
            step = s - fs / d if d else (lo + hi) / 2
            s = step if lo < step < hi else (lo + hi) / 2
            if hi - lo < tol:
                break
        return self.u1 + s

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "u1": self.u1, "v1": self.v1,
                "u2": self.u2, "v2": self.v2, "beta": self.beta}

    @classmethod
    def from_dict(cls, d: dict) -> "CubicBranch":
        return cls(BranchKind(d["kind"]), d["u1"], d["v1"], d["u2"], d["v2"], d["beta"])


def critical_pair(u1: float, u2: float, beta: float) -> tuple[CubicBranch, CubicBranch]:
    """Turning branches on the unit interval [u1, u1+1] onto [u2, u2+1]."""
    mid = u1 + 0.5
    f1 = CubicBranch(BranchKind.CRIT_F1, u1, mid, u2, u2 + 1.0, beta)
    f2 = CubicBranch(BranchKind.CRIT_F2, mid, u1 + 1.0, u2, u2 + 1.0, beta)
    return f1, f2


def make_branch(increasing: bool, unit: bool, u1, v1, u2, v2, beta) -> CubicBranch:
    if unit:
        kind = BranchKind.UNIT_G if increasing else BranchKind.UNIT_W
    else:
        kind = BranchKind.H_INC if increasing else BranchKind.R_DEC
    return CubicBranch(kind, u1, v1, u2, v2, beta)

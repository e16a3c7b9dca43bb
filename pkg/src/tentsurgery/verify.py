"""Numerical certification of the surgered map.

Each check returns plain data; :func:`run_suite` turns them into
``{check_name, status, measured, bound, tolerance}`` rows.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

from .algebraic import AlgebraicParameter
from .branches import BranchKind
from .errors import InsufficientDepth
from .markov import analyze, entropy_estimates, growth_constant, lap_counts
from .preimage import CountTable, enumerate_tree, level_counts
from .surgery import CANTOR, INSERTED, SurgeredMapDescriptor, steps_to_cycle, symbolic_step
from .tent import (core_interval, critical_orbit, renorm_depth, restrictive_interval, tent_apply)

PASS, FAIL = "PASS", "FAIL"


@dataclass
class CheckResult:
    check_name: str
    status: str
    measured: Any
    bound: Any
    tolerance: Any
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _label(beta: AlgebraicParameter) -> str:
    return beta.name or beta.catalog_name() or f"beta={float(beta):.6g}"


# -- difference quotients -------------------------------------------------------------

@dataclass
class QuotientSample:
    word: str
    depth: int
    base: float
    partner: float
    quotient: float
    bound: float
    tol: float
    kind: str  # "interior" or "gap"
    lower: float = 0.0

    @property
    def ok(self) -> bool:
        return self.lower - self.tol <= abs(self.quotient) <= self.bound + self.tol


def check_quotients(desc: SurgeredMapDescriptor, depths, samples_per_depth: int = 100,
                    seed: int = 0, eps: float = 1e-12) -> list[QuotientSample]:
    """Difference quotients of g between a depth-n endpoint and a nearby point.

    Half of the partners lie inside the same inserted interval and half in
    the gap beside it, closer than any other materialised insertion.
    """
    rng = random.Random(seed)
    bf = desc.bf
    out = []
    by_level: dict[int, list[int]] = {}
    for i, r in enumerate(desc.records):
        if r.orbit_index is None:
            by_level.setdefault(r.level, []).append(i)
    for n in depths:
        if n > desc.N or n not in by_level:
            raise InsufficientDepth(f"no materialised insertions at depth {n}")
        idx = by_level[n]
        bound = bf + 6.0 / (n - 1) if n > 1 else bf
        for k in range(samples_per_depth):
            i = rng.choice(idx)
            rec = desc.records[i]
            plus = rng.random() < 0.5
            e = rec.v if plus else rec.u
            if k % 2 == 0:
                frac = rng.uniform(0.05, 0.95)
                z = rec.u + frac * rec.length
                kind = "interior"
            else:
                if plus:
                    gap = (desc._lo[i + 1] - rec.v) if i + 1 < len(desc.records) else desc.b_beta - rec.v
                else:
                    gap = (rec.u - desc._hi[i - 1]) if i > 0 else rec.u
                delta = min(0.05 * rec.length, 0.5 * gap) * rng.uniform(0.5, 1.0)
                z = e + delta if plus else e - delta
                kind = "gap"
            ge, re_ = desc.eval(e, eps)
            gz, rz = desc.eval(z, eps)
            q = (gz - ge) / (z - e)
            tol = (re_ + rz) / abs(z - e) + 1e-9
            out.append(QuotientSample(rec.word, n, e, z, q, bound, tol, kind, lower=bf))
    return out


# -- lengths ------------------------------------------------------------------------

def check_lengths(desc: SurgeredMapDescriptor, eps: float = 1e-9) -> list[CheckResult]:
    mm = desc.mass
    cat = desc.beta.catalog_name()
    name = _label(desc.beta)
    res = []
    L = desc.L
    res.append(CheckResult(f"{name}:total_length", _status(L[1] - L[0] <= eps and L[0] > 0),
                           [L[0], L[1]], "finite", eps))
    frac = desc.cantor_fraction
    res.append(CheckResult(f"{name}:cantor_fraction", _status(frac > 0), frac, "> 0", 0.0))
    if cat == "full":
        s3 = mm.sum_Fa(3, eps)
        res.append(CheckResult("full:sum_n>=3_Fa", _status(s3[0] <= 1 / 6 <= s3[1] and s3[1] - s3[0] <= 1e-6),
                               list(s3), 1 / 6, 1e-6))
        res.append(CheckResult("full:total_19/6", _status(L[0] - 1e-12 <= 19 / 6 <= L[1] + 1e-12),
                               list(L), 19 / 6, 1e-6))
        res.append(CheckResult("full:cantor_6/25", _status(abs(frac - 6 / 25) <= 1e-6), frac, 6 / 25, 1e-6))
    if cat == "golden":
        s = mm.sum_Fa(1, eps)
        res.append(CheckResult("golden:sum_Fa<4", _status(s[1] < 4), list(s), 4, 0.0))
    return res


# -- basin simulation ------------------------------------------------------------

@dataclass
class BasinReport:
    classification: str   # PERIODIC_CYCLE, ABSORBED, CANTOR, EXCEPTIONAL or UNDECIDED
    iterations: int
    entered_cycle_at: int | None = None
    period: int | None = None
    multiplier: float | None = None
    cycle: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _in_cycle(desc, cl) -> bool:
    return (cl.kind == INSERTED and cl.record.orbit_index is not None
            and cl.record.orbit_index >= desc.orbit.preperiod)


def _deriv(desc, cl) -> float:
    rec = cl.record
    br = desc.branch_at(rec, cl.local)
    return br.deriv_local(rec.u + cl.local - br.u1)


def simulate_basin(desc: SurgeredMapDescriptor, y0, max_iter: int = 4096,
                   tol: float = 1e-11, eps: float = 1e-10) -> BasinReport:
    """Iterate g from y0 and report where the orbit ends up.

    ``y0`` may be a float or an exact endpoint ``(point, "minus"|"plus")``;
    exact endpoints are followed symbolically.
    """
    if isinstance(y0, tuple):
        point, side = y0
        for it in range(max_iter):
            point, side, _ = desc.eval_endpoint(point, side)
        return BasinReport(CANTOR, max_iter)
    m = desc.orbit.period
    y = float(y0)
    entered = None
    hist: list = []
    for it in range(max_iter):
        cl = desc.classify(y, eps)
        if cl.kind == INSERTED and cl.record.side == "CRITICAL" and abs(cl.local - 0.5) < tol:
            return BasinReport("EXCEPTIONAL", it, entered)
        if entered is None and _in_cycle(desc, cl):
            entered = it
        if entered is not None:
            if not _in_cycle(desc, cl):
                return BasinReport("UNDECIDED", it, entered)
            hist.append((y, cl))
            for p in range(m, 8 * m + 1, m):
                if len(hist) > 2 * p and all(abs(hist[-1 - k][0] - hist[-1 - k - p][0]) < tol for k in range(p)):
                    # a negative multiplier converges faster in p than in p/2; take the minimal period
                    for q in range(m, p, m):
                        if p % q == 0 and all(abs(hist[-1 - k][0] - hist[-1 - k - q][0]) < 1e3 * tol
                                              for k in range(q)):
                            p = q
                            break
                    pts = hist[-p:]
                    mult = 1.0
                    for _, c in pts:
                        mult *= _deriv(desc, c)
                    if abs(mult) < 1:
                        return BasinReport("PERIODIC_CYCLE", it, entered, p, mult, [q for q, _ in pts])
        y, _ = desc.eval_classified(cl, eps)
    if entered is not None:
        return BasinReport("ABSORBED", max_iter, entered)
    return BasinReport("UNDECIDED", max_iter, entered)


def find_cycle(desc: SurgeredMapDescriptor, seeds: int = 16, max_iter: int = 2000) -> BasinReport | None:
    """Attracting cycle inside the orbit intervals, if any."""
    ct_rec = desc.record_for(desc.orbit.c_t)
    best = None
    for k in range(seeds):
        y = ct_rec.u + (k + 0.5) / seeds * ct_rec.length
        rep = simulate_basin(desc, y, max_iter)
        if rep.classification == "PERIODIC_CYCLE":
            if best is None or abs(rep.multiplier) < abs(best.multiplier):
                best = rep
    return best


def distinct_cycles(desc: SurgeredMapDescriptor, seeds: int = 64, max_iter: int = 2000,
                    tol: float = 1e-8) -> list[BasinReport]:
    """All attracting cycles reached from a seed grid on J_{c_t}, up to rotation.

    Uniqueness is reported, not proved: a cycle missed by every seed is invisible here.
    """
    ct_rec = desc.record_for(desc.orbit.c_t)
    found: list[BasinReport] = []
    for k in range(seeds):
        rep = simulate_basin(desc, ct_rec.u + (k + 0.5) / seeds * ct_rec.length, max_iter)
        if rep.classification != "PERIODIC_CYCLE":
            continue
        if not any(any(abs(rep.cycle[0] - q) < tol for q in f.cycle) for f in found):
            found.append(rep)
    return found


def lyapunov_in_cycle(desc: SurgeredMapDescriptor, n: int = 3000, seed: float = 0.3711) -> float:
    """Mean log|g'| along an orbit inside the orbit intervals."""
    ct_rec = desc.record_for(desc.orbit.c_t)
    y = ct_rec.u + seed * ct_rec.length
    total = 0.0
    count = 0
    for _ in range(n):
        cl = desc.classify(y, 1e-10)
        if not _in_cycle(desc, cl):
            break
        d = abs(_deriv(desc, cl))
        if d == 0:
            break
        total += math.log(d)
        count += 1
        y, _ = desc.eval_classified(cl, 1e-10)
    return total / max(count, 1)


# -- symbolic checks ------------------------------------------------------------

def hyperbolicity(desc: SurgeredMapDescriptor, seeds: int = 200, j_max: int = 8, seed: int = 0) -> dict:
    """|D g^j| at exact endpoints equals beta**j exactly for j <= j_max."""
    rng = random.Random(seed)
    pool = [r for r in desc.records if r.orbit_index is None] or desc.records
    b = desc.beta.beta
    powers = [desc.beta.point(1)]
    for _ in range(j_max):
        powers.append(powers[-1] * b)
    bad = 0
    for _ in range(seeds):
        rec = rng.choice(pool)
        side = rng.choice(["minus", "plus"])
        point, sd = rec.point, side
        prod = desc.beta.point(1)
        for j in range(1, j_max + 1):
            point, sd, d = desc.eval_endpoint(point, sd)
            prod = prod * d
            if not (prod == powers[j] or -prod == powers[j]):
                bad += 1
                break
    return {"seeds": seeds, "j_max": j_max, "mismatches": bad}


def absorption_words(beta: AlgebraicParameter, max_len: int = 12) -> dict:
    """Every word of length <= max_len needs exactly len-1 shifts to reach c_t."""
    orbit = critical_orbit(beta)
    tree = enumerate_tree(beta, orbit, max_len - 1)
    bad = 0
    total = 0
    for lv in tree:
        for nd in lv:
            total += 1
            w = str(nd.word)
            steps = 0
            lab = w
            while isinstance(lab, str) and len(lab) > 1:
                lab = symbolic_step(lab)
                steps += 1
            x = nd.point
            for _ in range(steps):
                x = tent_apply(beta, x, check=False)
            if steps != steps_to_cycle(w) or steps != len(w) - 1 or x != orbit.c_t:
                bad += 1
    return {"words": total, "mismatches": bad}


def numeric_absorption(desc: SurgeredMapDescriptor, seeds: int = 100, within: int = 200, seed: int = 0) -> dict:
    """Random interior points of insertions reach the orbit-interval cycle."""
    rng = random.Random(seed)
    pool = [r for r in desc.records if r.orbit_index is None]
    worst = 0
    failures = 0
    for _ in range(seeds):
        rec = rng.choice(pool)
        y = rec.u + rng.uniform(0.01, 0.99) * rec.length
        reached = None
        for it in range(within + 1):
            cl = desc.classify(y, 1e-10)
            if _in_cycle(desc, cl):
                reached = it
                break
            y, _ = desc.eval_classified(cl, 1e-10)
        if reached is None:
            failures += 1
        else:
            worst = max(worst, reached)
    return {"seeds": seeds, "failures": failures, "max_steps": worst}


# -- attractor and entropy --------------------------------------------------------

def attractor_location(desc: SurgeredMapDescriptor, samples: int = 200, seed: int = 0) -> dict:
    beta = desc.beta
    k = renorm_depth(beta)
    lo, hi = core_interval(beta)
    rng = random.Random(seed)
    if k == 0:
        pieces = [(lo, hi)]
    else:
        R = restrictive_interval(beta, k)
        pieces = [(R.lo, R.hi)]
        a, b = R.lo, R.hi
        for _ in range(R.period - 1):
            from .tent import _image_hull

            a, b = _image_hull(beta, a, b, 1)
            pieces.append((a, b))
    inside = [r for r in desc.records if lo.compare(r.point) <= 0 and r.point.compare(hi) <= 0]
    bad = 0
    for _ in range(min(samples, len(inside))):
        rec = rng.choice(inside)
        x = rec.point
        for _ in range(8):
            x = tent_apply(beta, x, check=False)
            if not any(a.compare(x) <= 0 and x.compare(b) <= 0 for a, b in pieces):
                bad += 1
                break
    tm = analyze(beta, desc.orbit)
    embedded = [(desc.embed(a, "minus"), desc.embed(b, "plus")) for a, b in pieces]
    return {
        "renorm_depth": k,
        "pieces": [[float(a), float(b)] for a, b in pieces],
        "embedded": [[u, v] for u, v in embedded],
        "invariance_violations": bad,
        "entropy": math.log(float(tm.spectral_radius[1])),
        "log_beta": math.log(desc.bf),
    }


def entropy_check(beta: AlgebraicParameter, n_max: int = 4096) -> dict:
    if n_max < 8:
        raise ValueError("n_max must be >= 8")
    tm = analyze(beta)
    laps = lap_counts(beta, None, n_max)
    direct, ratio = entropy_estimates(laps)
    rho = tm.spectral_radius
    return {
        "log_beta": math.log(float(beta)),
        "spectral": [math.log(float(rho[0])), math.log(float(rho[1]))],
        "lap_direct": direct,
        "lap_ratio": ratio,
        "n_max": n_max,
    }


def golden_closed_form(n: int) -> float:
    """k1 mu**n + k2 phi**n with k1 = (5 - sqrt5)/5, k2 = (5 + sqrt5)/5."""
    r5 = math.sqrt(5.0)
    phi, mu = (1 + r5) / 2, (1 - r5) / 2
    k1, k2 = (5 - r5) / 5, (5 + r5) / 5
    return k1 * mu ** n + k2 * phi ** n


# -- suite runner -----------------------------------------------------------------

def _suite_counts(beta, desc):
    out = []
    orbit = critical_orbit(beta)
    ct = CountTable.build(beta, orbit, 20, 14)
    agree = all(ct.F_tree[n] == ct.F_recursion[n] for n in range(len(ct.F_tree)))
    out.append(CheckResult(f"{_label(beta)}:tree_vs_recursion", _status(agree), ct.F_recursion[:15], ct.F_tree, 0))
    F = ct.F_recursion
    cat = beta.catalog_name()
    if cat == "full":
        ok = all(F[n] == 2 ** (n - 2) for n in range(2, 21))
        out.append(CheckResult("full:F=2^(n-2)", _status(ok), F[2:21], "2^(n-2)", 0))
    if cat == "golden":
        ok = F[1:4] == [2, 4, 6] and all(F[n] == F[n - 1] + F[n - 2] for n in range(3, 21))
        out.append(CheckResult("golden:fibonacci", _status(ok), F[1:21], "F(n)=F(n-1)+F(n-2)", 0))
        ok = all(round(golden_closed_form(n)) == F[n] for n in range(1, 21))
        out.append(CheckResult("golden:closed_form", _status(ok), [golden_closed_form(n) for n in (1, 2, 20)],
                               [F[1], F[2], F[20]], 0.5))
    return out


def _suite_spectral(beta, desc):
    tm = analyze(beta)
    lo, hi = (float(tm.spectral_radius[0]), float(tm.spectral_radius[1]))
    bf = float(beta)
    ok = lo - 1e-15 <= bf <= hi + 1e-15 and hi - lo <= 1e-8 and tm.charpoly_divisible
    return [CheckResult(f"{_label(beta)}:spectral_radius", _status(ok), [lo, hi], bf, 1e-8)]


def _suite_growth(beta, desc):
    tm = analyze(beta)
    M = growth_constant(beta, tm)
    F = level_counts(beta, None, 20)
    bf = float(beta)
    worst = max(F[n] / bf ** n for n in range(21))
    return [CheckResult(f"{_label(beta)}:growth", _status(worst <= M), worst, M, 0)]


def _suite_lengths(beta, desc):
    return check_lengths(desc)


def _suite_branches(beta, desc):
    worst_end = 0.0
    mono = True
    for rec in desc.records:
        for br in desc.branches(rec):
            d0, d1 = br.endpoint_derivs()
            if br.kind is BranchKind.CRIT_F1:
                ends = [abs(d0) - desc.bf]
            elif br.kind is BranchKind.CRIT_F2:
                ends = [abs(d1) - desc.bf]
            else:
                ends = [abs(d0) - desc.bf, abs(d1) - desc.bf]
            worst_end = max(worst_end, max(abs(e) for e in ends))
            lo, hi = br.deriv_extrema()
            if br.kind is BranchKind.H_INC and lo < desc.bf - 1e-12:
                mono = False
            if br.kind is BranchKind.R_DEC and hi > -desc.bf + 1e-12:
                mono = False
    return [CheckResult(f"{_label(beta)}:branch_endpoints", _status(worst_end <= 1e-12), worst_end, 0.0, 1e-12),
            CheckResult(f"{_label(beta)}:branch_monotone", _status(mono), mono, True, 1e-12)]


def _suite_quotients(beta, desc):
    depths = [n for n in range(5, min(desc.N, 12) + 1)]
    if not depths:
        return [CheckResult(f"{_label(beta)}:quotients", FAIL, None, None, 1e-3, "descriptor depth < 5")]
    qs = check_quotients(desc, depths, 20)
    bad = [q for q in qs if not (q.lower - 1e-3 <= abs(q.quotient) <= q.bound + 1e-3)]
    worst = max(abs(q.quotient) - q.bound for q in qs)
    return [CheckResult(f"{_label(beta)}:quotients", _status(not bad), worst, "beta+6/(n-1)", 1e-3,
                        f"{len(bad)} of {len(qs)} outside")]


def _suite_hyperbolicity(beta, desc):
    h = hyperbolicity(desc, 50)
    return [CheckResult(f"{_label(beta)}:hyperbolicity", _status(h["mismatches"] == 0), h["mismatches"], 0, 0)]


def _suite_absorption(beta, desc):
    w = absorption_words(beta, min(12, desc.N + 1))
    na = numeric_absorption(desc, 20)
    cyc = find_cycle(desc)
    mult = None if cyc is None else cyc.multiplier
    n_cyc = len(distinct_cycles(desc, 32))
    detail = f"{n_cyc} distinct cycle(s) from a 32-seed grid" if cyc else "no attracting cycle in the orbit intervals"
    return [
        CheckResult(f"{_label(beta)}:word_absorption", _status(w["mismatches"] == 0), w["mismatches"], 0, 0),
        CheckResult(f"{_label(beta)}:numeric_absorption", _status(na["failures"] == 0), na["max_steps"], 200, 0),
        CheckResult(f"{_label(beta)}:attracting_cycle", _status(mult is not None and abs(mult) < 1),
                    mult, "< 1", 0, detail),
    ]


def _suite_renorm(beta, desc):
    k = renorm_depth(beta)
    out = [CheckResult(f"{_label(beta)}:renorm_depth", PASS, k, None, 0)]
    if k >= 1:
        R = restrictive_interval(beta, 1)
        ok = R.image[0].compare(R.lo) >= 0 and R.image[1].compare(R.hi) <= 0
        out.append(CheckResult(f"{_label(beta)}:restrictive_interval", _status(ok),
                               [float(R.lo), float(R.hi)], [float(R.image[0]), float(R.image[1])], 0))
        at = attractor_location(desc)
        out.append(CheckResult(f"{_label(beta)}:attractor_in_cycle", _status(at["invariance_violations"] == 0),
                               at["invariance_violations"], 0, 0))
    return out


def _suite_conjugacy(beta, desc, n: int = 50, seed: int = 0):
    rng = random.Random(seed)
    worst_semi = 0.0
    worst_conj = 0.0
    for _ in range(n):
        y = rng.uniform(0, desc.b_beta)
        cl = desc.classify(y, 1e-10)
        gy, r = desc.eval_classified(cl, 1e-10)
        if cl.kind == CANTOR and cl.endpoint is None:
            fx = tent_apply_float(desc.bf, cl.x)
            px = desc.collapse(min(max(gy, 0.0), desc.b_beta), 1e-10)
            worst_semi = max(worst_semi, abs(px - fx))
        u = desc.to_unit(y)
        gu, _ = desc.eval_unit(u, 1e-10)
        worst_conj = max(worst_conj, abs(gu - desc.to_unit(gy)))
    return [CheckResult(f"{_label(beta)}:semiconjugacy", _status(worst_semi <= 1e-6), worst_semi, 0, 1e-6),
            CheckResult(f"{_label(beta)}:unit_conjugacy", _status(worst_conj <= 1e-9), worst_conj, 0, 1e-9)]


def tent_apply_float(bf: float, x: float) -> float:
    return bf * x if x <= 0.5 else bf * (1 - x)


def _suite_entropy(beta, desc):
    e = entropy_check(beta)
    tol = 1e-3
    ok = (abs(e["spectral"][1] - e["log_beta"]) <= 1e-8 and abs(e["lap_direct"] - e["log_beta"]) <= tol
          and abs(e["lap_ratio"] - e["log_beta"]) <= tol)
    return [CheckResult(f"{_label(beta)}:entropy", _status(ok), [e["lap_direct"], e["lap_ratio"]], e["log_beta"], tol)]


SUITES: dict[str, Callable] = {
    "counts": _suite_counts,
    "lengths": _suite_lengths,
    "branches": _suite_branches,
    "quotients": _suite_quotients,
    "hyperbolicity": _suite_hyperbolicity,
    "spectral": _suite_spectral,
    "growth": _suite_growth,
    "absorption": _suite_absorption,
    "renorm": _suite_renorm,
    "conjugacy": _suite_conjugacy,
    "entropy": _suite_entropy,
}


def run_suite(desc: SurgeredMapDescriptor, names=("all",)) -> list[CheckResult]:
    if isinstance(names, str):
        names = [names]
    if "all" in names:
        names = list(SUITES)
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
        out.extend(SUITES[name](desc.beta, desc))
    return out

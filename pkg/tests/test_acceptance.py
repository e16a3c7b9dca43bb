"""Acceptance criteria 1-13, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are
printed straight to the terminal so they survive output capture.
"""

import random
import time
from fractions import Fraction

import pytest

from tentsurgery import (CountTable, SurgeredMapDescriptor, analyze, attractor_location, catalog,
                         check_quotients, count_below, critical_orbit, enumerate_tree, find_cycle,
                         growth_constant, hyperbolicity, layout, level_counts, mass_model, renorm_depth,
                         restrictive_interval)
from tentsurgery.branches import BranchKind, critical_pair, make_branch
from tentsurgery.preimage import tree_count_below
from tentsurgery.surgery import INSERTED
from tentsurgery.tent import tent_float
from tentsurgery.verify import absorption_words, golden_closed_form, numeric_absorption

CATALOG = ("full", "golden", "sqrt2")

_desc_cache = {}


def desc(name, N=12):
    key = (name, N)
    if key not in _desc_cache:
        _desc_cache[key] = layout(catalog(name), N=N)
    return _desc_cache[key]


def report(capsys, num, ok, detail):
    line = f"CRITERION {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_01_full_counts(capsys):
    t0 = time.perf_counter()
    b = catalog("full")
    table = CountTable.build(b, None, 20, 14)
    ok_rec = all(table.F_recursion[n] == 2 ** (n - 2) for n in range(2, 21))
    ok_tree = all(table.F_tree[n] == 2 ** (n - 2) for n in range(2, 15))
    dt = time.perf_counter() - t0
    report(capsys, 1, ok_rec and ok_tree and dt < 5,
           f"F(n)=2^(n-2): recursion n<=20 {ok_rec}, tree n<=14 {ok_tree}, {dt:.2f}s")


def test_criterion_02_full_lengths(capsys):
    b = catalog("full")
    mm = mass_model(b)
    lo, hi = mm.sum_Fa(3, 1e-9)
    Llo, Lhi = mm.total_length(1e-9)
    frac = 1.0 / (1.0 + (Llo + Lhi) / 2)
    ok = (lo <= 1 / 6 <= hi and hi - lo <= 1e-6 and Llo <= 19 / 6 <= Lhi and abs(frac - 6 / 25) <= 1e-6)
    report(capsys, 2, ok, f"sum_(n>=3) F a in [{lo:.15f}, {hi:.15f}], L in [{Llo:.14f}, {Lhi:.14f}], "
                          f"Cantor fraction {frac:.12f}")


def test_criterion_03_golden_counts(capsys):
    F = level_counts(catalog("golden"), None, 20)
    ok1 = F[1:4] == [2, 4, 6]
    ok2 = all(F[n] == F[n - 1] + F[n - 2] for n in range(3, 21))
    ok3 = all(round(golden_closed_form(n)) == F[n] for n in range(1, 21))
    report(capsys, 3, ok1 and ok2 and ok3, f"F(1..3)={F[1:4]}, Fibonacci {ok2}, closed form {ok3}, F(20)={F[20]}")


def test_criterion_04_golden_lengths(capsys):
    lo, hi = mass_model(catalog("golden")).sum_Fa(1, 1e-9)
    report(capsys, 4, hi < 4, f"sum F a in [{lo:.12f}, {hi:.12f}] < 4")


def test_criterion_05_cubic_branches(capsys):
    rng = random.Random(2024)
    worst = 0.0
    mono_ok = True
    for i in range(1000):
        b = rng.uniform(1.0001, 2.0)
        kind = i % 4
        if kind < 2:
            n = rng.randint(2, 40)
            L = 10 ** rng.uniform(-8, 0)
            u1, u2 = rng.uniform(0, 4), rng.uniform(0, 4)
            L2 = b * (n + 1) / (n - 1) * L
            br = make_branch(kind == 0, False, u1, u1 + L, u2, u2 + L2, b)
            d0, d1 = br.endpoint_derivs()
            s = 1 if kind == 0 else -1
            worst = max(worst, abs(d0 - s * b), abs(d1 - s * b))
            lo, hi = br.deriv_extrema()
            if br.kind is BranchKind.H_INC and lo < b:
                mono_ok = False
            if br.kind is BranchKind.R_DEC and hi > -b:
                mono_ok = False
        elif kind == 2:
            br = make_branch(rng.random() < 0.5, True, 0.0, 1.0, rng.uniform(0, 4), 0.0, b)
            br = make_branch(br.kind is BranchKind.UNIT_G, True, 0.0, 1.0, br.u2, br.u2 + 1.0, b)
            d0, d1 = br.endpoint_derivs()
            s = 1 if br.kind is BranchKind.UNIT_G else -1
            worst = max(worst, abs(d0 - s * b), abs(d1 - s * b))
        else:
            f1, f2 = critical_pair(rng.uniform(0, 4), rng.uniform(0, 4), b)
            worst = max(worst, abs(f1.deriv_local(0.0) - b), abs(f2.deriv_local(0.5) + b))
    report(capsys, 5, worst <= 1e-12 and mono_ok,
           f"max endpoint |Dg| - beta error {worst:.2e}, H_INC >= beta and R_DEC <= -beta: {mono_ok}")


def test_criterion_06_quotients(capsys):
    parts = []
    ok = True
    for name in CATALOG:
        d = desc(name)
        qs = check_quotients(d, range(5, 13), 100, seed=6)
        bad = [q for q in qs if not (d.bf - 1e-3 <= abs(q.quotient) <= q.bound + 1e-3)]
        worst = max(abs(q.quotient) - q.bound for q in qs)
        ok &= not bad and len(qs) == 800
        parts.append(f"{name}: {len(bad)}/{len(qs)} outside, max excess {worst:+.3g}")
    report(capsys, 6, ok, "; ".join(parts))


def test_criterion_07_hyperbolicity(capsys):
    parts = []
    ok = True
    for name in CATALOG:
        h = hyperbolicity(desc(name), 200, 8, seed=7)
        ok &= h["mismatches"] == 0
        parts.append(f"{name}: {h['mismatches']} mismatches")
    report(capsys, 7, ok, "|D g^j| = beta^j exactly, j<=8, 200 seeds; " + "; ".join(parts))


def test_criterion_08_spectral(capsys):
    parts = []
    ok = True
    for name in CATALOG:
        b = catalog(name)
        tm = analyze(b)
        lo, hi = map(float, tm.spectral_radius)
        good = lo <= float(b) <= hi and hi - lo <= 1e-8 and tm.charpoly_divisible
        ok &= good
        parts.append(f"{name}: rho in [{lo:.13f}, {hi:.13f}] width {hi - lo:.1e}, divides {tm.charpoly_divisible}")
    report(capsys, 8, ok, "; ".join(parts))


def test_criterion_09_growth(capsys):
    parts = []
    ok = True
    for name in CATALOG:
        b = catalog(name)
        M = growth_constant(b, analyze(b))
        F = level_counts(b, None, 20)
        worst = max(F[n] / float(b) ** n for n in range(21))
        ok &= worst <= M
        parts.append(f"{name}: max F/beta^n {worst:.4g} <= M {M:.4g}")
    report(capsys, 9, ok, "; ".join(parts))


def test_criterion_10_absorption(capsys):
    parts = []
    ok = True
    for name in CATALOG:
        b = catalog(name)
        d = desc(name)
        w = absorption_words(b, 12)
        na = numeric_absorption(d, 100, 200, seed=10)
        cyc = find_cycle(d)
        mult = None if cyc is None else cyc.multiplier
        good = w["mismatches"] == 0 and na["failures"] == 0 and mult is not None and abs(mult) < 1
        ok &= good
        ms = "none found" if mult is None else f"{mult:+.6f}"
        parts.append(f"{name}: words {w['words']} ok={w['mismatches'] == 0}, numeric max steps "
                     f"{na['max_steps']} failures {na['failures']}, multiplier {ms}")
    report(capsys, 10, ok, "; ".join(parts))


def test_criterion_11_case_b(capsys):
    b = catalog("sqrt2")
    k = renorm_depth(b)
    R = restrictive_interval(b, 1)
    certified = R.image[0].compare(R.lo) >= 0 and R.image[1].compare(R.hi) <= 0
    d = desc("sqrt2")
    at = attractor_location(d)
    cyc = find_cycle(d)
    inside = cyc is not None and all(any(u - 1e-9 <= y <= v + 1e-9 for u, v in at["embedded"]) for y in cyc.cycle)
    ok = k == 1 and certified and at["invariance_violations"] == 0 and len(at["pieces"]) == 2 and inside
    report(capsys, 11, ok, f"k={k}, f^2(J) in J certified {certified}, J=[{float(R.lo):.6f}, {float(R.hi):.6f}], "
                           f"cycle inside embedded J u f(J): {inside}")


def test_criterion_12_conjugacy_roundtrip(capsys, tmp_path):
    parts = []
    ok = True
    for name in CATALOG:
        d = desc(name, 10)
        rng = random.Random(12)
        semi = conj = 0.0
        for _ in range(1000):
            y = rng.uniform(0, d.b_beta)
            cl = d.classify(y, 1e-10)
            g, r = d.eval_classified(cl, 1e-10)
            x = cl.record.x if cl.kind == INSERTED else cl.x
            px = d.collapse(min(max(g, 0.0), d.b_beta), 1e-10)
            semi = max(semi, abs(px - tent_float(d.bf, x)))
            gu, ru = d.eval_unit(d.to_unit(y), 1e-10)
            conj = max(conj, abs(gu - d.to_unit(g)) - ru - r / d.b_beta)
        p = tmp_path / f"{name}.json"
        d.save(p)
        e = SurgeredMapDescriptor.load(p)
        lossless = e.to_dict() == d.to_dict() and all(
            e.eval(y, 1e-9) == d.eval(y, 1e-9) for y in (0.1, 0.77, 1.5, d.b_beta * 0.9))
        good = semi <= 1e-9 and conj <= 1e-12 and lossless
        ok &= good
        parts.append(f"{name}: |pi g - f pi| {semi:.1e}, unit {max(conj, 0.0):.1e}, lossless {lossless}")
    report(capsys, 12, ok, "; ".join(parts))


def test_criterion_13_count_oracle(capsys):
    parts = []
    ok = True
    for name in CATALOG:
        b = catalog(name)
        orb = critical_orbit(b)
        levels = enumerate_tree(b, orb, 14)
        rng = random.Random(13)
        bad = 0
        checks = 0
        for _ in range(100):
            if rng.random() < 0.5:
                y = b.point(Fraction(rng.randint(0, 10 ** 9), 10 ** 9))
            else:
                # thresholds on tree points exercise the ties
                lv = levels[rng.randint(0, 14)]
                y = lv[rng.randrange(len(lv))].point if lv else b.point(Fraction(1, 3))
            for n in range(15):
                _, N = count_below(b, orb, y, n)
                checks += 1
                bad += N != tree_count_below(levels, y, n)
        ok &= bad == 0
        parts.append(f"{name}: {bad} mismatches in {checks}")
    report(capsys, 13, ok, "; ".join(parts))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

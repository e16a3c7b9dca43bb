import math

import pytest

from tentsurgery import (attractor_location, catalog, check_lengths, check_quotients, entropy_check, find_cycle,
                         hyperbolicity, run_suite, simulate_basin)
from tentsurgery.errors import InsufficientDepth
from tentsurgery.tent import half
from tentsurgery.verify import absorption_words, golden_closed_form, lyapunov_in_cycle, numeric_absorption


def test_basin_full_cycle(descriptors):
    d = descriptors("full")
    host1 = d.record_for(d.beta.point(1))
    rep = simulate_basin(d, host1.u + 0.3)
    assert rep.classification == "PERIODIC_CYCLE"
    assert rep.period == 1
    assert rep.multiplier == pytest.approx(0.5, abs=1e-9)
    host0 = d.record_for(d.beta.point(0))
    assert host0.u < rep.cycle[0] < host0.v


def test_basin_sqrt2_cycle(descriptors):
    rep = find_cycle(descriptors("sqrt2"))
    b = math.sqrt(2)
    assert rep.period == 1
    assert rep.multiplier == pytest.approx(0.5 * b - 1.5, abs=1e-9)


def test_basin_endpoint_seed_is_cantor(descriptors):
    d = descriptors("golden")
    rec = next(r for r in d.records if len(r.word) == 8)
    rep = simulate_basin(d, (rec.point, "plus"), max_iter=50)
    assert rep.classification == "CANTOR"


def test_basin_critical_seed_is_exceptional(descriptors):
    d = descriptors("golden")
    crit = d.record_for(half(d.beta))
    rep = simulate_basin(d, crit.u + 0.5)
    assert rep.classification == "EXCEPTIONAL"


def test_golden_has_no_attracting_cycle(descriptors):
    d = descriptors("golden")
    assert find_cycle(d) is None
    # the return map on the orbit intervals is expanding on average
    assert lyapunov_in_cycle(d) > 0


def test_lengths_checks(descriptors):
    rows = check_lengths(descriptors("full"))
    assert all(r.status == "PASS" for r in rows)
    assert {r.check_name for r in rows} >= {"full:sum_n>=3_Fa", "full:total_19/6", "full:cantor_6/25"}


def test_quotients_within_band(descriptors):
    d = descriptors("golden", 12)
    qs = check_quotients(d, range(5, 13), 10)
    assert qs and all(q.ok or (q.lower - 1e-3 <= abs(q.quotient) <= q.bound + 1e-3) for q in qs)
    with pytest.raises(InsufficientDepth):
        check_quotients(descriptors("golden", 6), [9], 1)


def test_hyperbolicity_exact(descriptors):
    assert hyperbolicity(descriptors("sqrt2"), 30, 8)["mismatches"] == 0


def test_absorption(descriptors):
    assert absorption_words(catalog("golden"), 10)["mismatches"] == 0
    na = numeric_absorption(descriptors("full"), 20)
    assert na["failures"] == 0 and na["max_steps"] <= 200


def test_attractor_sqrt2(descriptors):
    at = attractor_location(descriptors("sqrt2"))
    assert at["renorm_depth"] == 1
    assert len(at["pieces"]) == 2
    assert at["invariance_violations"] == 0


def test_entropy(beta):
    e = entropy_check(beta, 1024)
    assert e["spectral"][0] - 1e-8 <= e["log_beta"] <= e["spectral"][1] + 1e-8
    assert abs(e["lap_ratio"] - e["log_beta"]) < 1e-6
    with pytest.raises(ValueError):
        entropy_check(beta, 4)


def test_closed_form():
    vals = [round(golden_closed_form(n)) for n in range(1, 8)]
    assert vals == [2, 4, 6, 10, 16, 26, 42]


def test_suite_rows_shape(descriptors):
    rows = run_suite(descriptors("full"), ["spectral", "growth"])
    for r in rows:
        d = r.to_dict()
        assert set(d) >= {"check_name", "status", "measured", "bound", "tolerance"}
        assert d["status"] == "PASS"
    with pytest.raises(KeyError):
        run_suite(descriptors("full"), "nope")


def test_golden_seed_is_absorbed_without_cycle(descriptors):
    d = descriptors("golden")
    ct = d.record_for(d.orbit.c_t)
    rep = simulate_basin(d, ct.u + 0.3137, max_iter=300)
    assert rep.classification == "ABSORBED" and rep.entered_cycle_at == 0

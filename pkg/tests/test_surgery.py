import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from tentsurgery import SurgeredMapDescriptor, catalog, layout, lipschitz_bound, critical_orbit
from tentsurgery.errors import DomainError, SchemaError
from tentsurgery.surgery import INSERTED, symbolic_step, steps_to_cycle
from tentsurgery.tent import half, tent_float


@pytest.mark.parametrize("name", ["full", "golden", "sqrt2"])
def test_layout_is_ordered_and_disjoint(name, descriptors):
    d = descriptors(name)
    recs = d.records
    for a, b in zip(recs, recs[1:]):
        assert a.x < b.x
        assert a.v <= b.u + 1e-12
    assert recs[0].u >= -1e-12 and recs[-1].v <= d.b_beta + 1e-9
    # every orbit point is materialised with unit length
    orb = critical_orbit(d.beta)
    for p in orb.points:
        assert d.record_for(p).length == 1.0


def test_layout_lengths_are_schedule(descriptors):
    d = descriptors("golden")
    for r in d.records:
        if r.orbit_index is None:
            assert r.length == pytest.approx(d.schedule.a(r.level), rel=1e-15)


def test_total_length_full(descriptors):
    d = descriptors("full")
    assert d.total_length == pytest.approx(19 / 6, abs=1e-12)
    assert d.cantor_fraction == pytest.approx(6 / 25, abs=1e-12)


@pytest.mark.parametrize("name", ["full", "golden", "sqrt2"])
def test_eval_enclosure_width(name, descriptors):
    d = descriptors(name)
    rng = random.Random(7)
    for _ in range(40):
        y = rng.uniform(0, d.b_beta)
        g, r = d.eval(y, 1e-9)
        assert 0 <= r <= 1e-9
        assert -1e-9 <= g <= d.b_beta + 1e-9


@pytest.mark.parametrize("name", ["full", "golden", "sqrt2"])
def test_semiconjugacy(name, descriptors):
    d = descriptors(name)
    rng = random.Random(11)
    for _ in range(40):
        y = rng.uniform(0, d.b_beta)
        cl = d.classify(y, 1e-10)
        g, _ = d.eval_classified(cl, 1e-10)
        x = cl.record.x if cl.kind == INSERTED else cl.x
        px = d.collapse(min(g, d.b_beta), 1e-10)
        assert abs(px - tent_float(d.bf, x)) < 1e-6


def test_insertions_map_onto_image(descriptors):
    d = descriptors("golden")
    for rec in d.records[:60]:
        img = d.image_record(rec)
        lo = d.eval(rec.u + 1e-3 * rec.length)[0]
        hi = d.eval(rec.v - 1e-3 * rec.length)[0]
        assert img.u - 1e-9 <= min(lo, hi) and max(lo, hi) <= img.v + 1e-9


def test_critical_interval_folds(descriptors):
    d = descriptors("full")
    rec = d.record_for(half(d.beta))
    top = d.image_record(rec).v
    assert d.eval(rec.u + 0.5)[0] == pytest.approx(top, abs=1e-12)
    assert d.deriv(rec.u + 0.5) == pytest.approx(0.0, abs=1e-12)


def test_endpoint_symbolic_derivative(descriptors):
    d = descriptors("sqrt2")
    rec = next(r for r in d.records if r.orbit_index is None and r.level >= 4)
    for side in ("minus", "plus"):
        path, prod = d.symbolic_orbit(rec.point, side, 6)
        assert prod == d.beta.beta ** 6 or -prod == d.beta.beta ** 6


def test_symbolic_step_words():
    orb = critical_orbit(catalog("golden"))
    assert symbolic_step("0110", orb) == "110"
    assert steps_to_cycle("0110") == 3


def test_save_load_roundtrip(tmp_path, descriptors):
    d = descriptors("sqrt2", 8)
    path = tmp_path / "d.json"
    d.save(path)
    e = SurgeredMapDescriptor.load(path)
    assert e.to_dict() == d.to_dict()
    rng = random.Random(2)
    for _ in range(20):
        y = rng.uniform(0, d.b_beta)
        assert e.eval(y, 1e-9) == d.eval(y, 1e-9)


def test_schema_mismatch(tmp_path, descriptors):
    d = descriptors("full", 6)
    data = d.to_dict()
    data["schema_version"] = 999
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        SurgeredMapDescriptor.load(p)


def test_domain(descriptors):
    d = descriptors("full")
    with pytest.raises(DomainError):
        d.eval(-0.5)
    with pytest.raises(DomainError):
        d.embed(1.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_unit_conjugacy(u):
    d = layout(catalog("golden"), N=8)
    gu, _ = d.eval_unit(u, 1e-10)
    g, _ = d.eval(d.from_unit(u), 1e-10)
    assert abs(gu - d.to_unit(g)) < 1e-12


def test_lipschitz_exceeds_naive_bound():
    # the tight insertions near the orbit cycle force a larger constant than 4 beta
    for name in ("full", "sqrt2"):
        b = catalog(name)
        assert lipschitz_bound(b, critical_orbit(b)) > 4 * float(b)


def test_map_polyline_respects_lipschitz(descriptors):
    d = descriptors("golden")
    n = 400
    ys = [d.b_beta * i / (n - 1) for i in range(n)]
    gs = [d.eval(y, 1e-10) for y in ys]
    for (y0, (g0, r0)), (y1, (g1, r1)) in zip(zip(ys, gs), zip(ys[1:], gs[1:])):
        assert abs(g1 - g0) <= d.lipschitz * (y1 - y0) + r0 + r1 + 1e-12

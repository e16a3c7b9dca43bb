import random

import pytest
from hypothesis import given, settings, strategies as st

from tentsurgery import CountTable, LengthSchedule, catalog, count_below, critical_orbit, enumerate_tree
from tentsurgery.errors import CapExceeded, DomainError
from tentsurgery.preimage import level_counts, preimages_one_step, tree_count_below
from tentsurgery.tent import tent_apply


def test_tree_levels_are_first_hit(beta):
    orb = critical_orbit(beta)
    levels = enumerate_tree(beta, orb, 8)
    for n, lv in enumerate(levels):
        for nd in lv:
            x = nd.point
            for _ in range(n):
                assert x != orb.c_t
                x = tent_apply(beta, x)
            assert x == orb.c_t


def test_tree_matches_recursion(beta):
    ct = CountTable.build(beta, None, 14, 14)
    assert ct.F_tree == ct.F_recursion


def test_known_sequences():
    assert level_counts(catalog("full"), None, 20)[2:] == [2 ** (n - 2) for n in range(2, 21)]
    F = level_counts(catalog("golden"), None, 20)
    assert F[1:4] == [2, 4, 6]
    assert all(F[n] == F[n - 1] + F[n - 2] for n in range(3, 21))


def test_cap_and_domain():
    with pytest.raises(CapExceeded):
        enumerate_tree(catalog("full"), None, 19)
    with pytest.raises(DomainError):
        preimages_one_step(catalog("full"), catalog("full").point(2))


def test_count_below_oracle(beta):
    orb = critical_orbit(beta)
    levels = enumerate_tree(beta, orb, 12)
    rng = random.Random(5)
    for _ in range(40):
        y = beta.point(f"{rng.randint(0, 10**6)}/1000000")
        n = rng.randint(0, 12)
        _, N = count_below(beta, orb, y, n)
        assert N == tree_count_below(levels, y, n)


def test_count_below_at_tree_points():
    # thresholds sitting exactly on preimages exercise the strict/inclusive split
    b = catalog("golden")
    orb = critical_orbit(b)
    levels = enumerate_tree(b, orb, 9)
    for nd in levels[7][::5]:
        _, N = count_below(b, orb, nd.point, 7)
        assert N == tree_count_below(levels, nd.point, 7)
        _, Ni = count_below(b, orb, nd.point, 7, inclusive=True)
        assert Ni == N + 1


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=60))
def test_length_schedule_identities(n):
    s = LengthSchedule(catalog("sqrt2"))
    assert s.a(n - 1) / s.a(n) == pytest.approx(s.ratio(n), rel=1e-12)
    assert s.lam(n) * s.ratio(n) == pytest.approx(1.0, rel=1e-12)
    assert float(s.a_exact(n)) == pytest.approx(s.a(n), rel=1e-12)


def test_count_csv_columns():
    text = CountTable.build(catalog("full"), None, 5, 5).to_csv()
    assert text.splitlines()[0] == "n,F_tree,F_recursion,a_n,cum_Fa,cum_Fa_lo,cum_Fa_hi"

import math

import pytest

from tentsurgery import analyze, catalog, growth_constant, lap_counts, level_counts, spectral_radius
from tentsurgery.markov import entropy_estimates, mat_pow


@pytest.mark.parametrize("name, cp", [
    ("full", [1, -2, 0]),
    ("golden", [1, -2, 0, 1, 0]),
    ("sqrt2", [1, -1, -2, 2, 0, 0]),
])
def test_charpoly_and_radius(name, cp):
    b = catalog(name)
    tm = analyze(b)
    assert tm.charpoly == cp
    assert tm.charpoly_divisible
    lo, hi = map(float, tm.spectral_radius)
    assert lo <= float(b) <= hi and hi - lo <= 1e-8


def test_perron_vectors(beta):
    tm = analyze(beta)
    B, v = tm.entries, tm.perron_right
    bf = float(beta)
    Bv = [sum(B[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]
    assert max(abs(Bv[i] - bf * v[i]) for i in range(len(v))) < 1e-9
    assert all(x >= 0 for x in v)


def test_growth_bound(beta):
    tm = analyze(beta)
    M = growth_constant(beta, tm)
    F = level_counts(beta, None, 20)
    assert all(F[n] <= M * float(beta) ** n for n in range(21))
    with pytest.raises(ValueError):
        growth_constant(beta, tm, n_max=5)


def test_spectral_radius_reducible():
    # block diagonal: radius of the larger block, Perron vector supported there
    B = [[1, 1, 0], [1, 0, 0], [0, 0, 1]]
    lo, hi, v, w = spectral_radius(B)
    phi = (1 + 5 ** 0.5) / 2
    assert float(lo) <= phi <= float(hi)
    assert v[2] == 0


def test_lap_counts_match_matrix_powers():
    # f^n has 2^n laps for the full tent map
    laps = lap_counts(catalog("full"), None, 12)
    assert laps == [2 ** n for n in range(13)]


def test_lap_entropy(beta):
    laps = lap_counts(beta, None, 4096)
    direct, ratio = entropy_estimates(laps)
    lb = math.log(float(beta))
    assert abs(direct - lb) < 1e-3
    assert abs(ratio - lb) < 1e-9


def test_mat_pow():
    A = [[1, 1], [1, 0]]
    assert mat_pow(A, 10)[0][1] == 55

import csv
import math
from fractions import Fraction as F

import numpy as np
import pytest

from shepwm.harmonics import (
    _match, fourier_b, grid, max_trajectory_jump, numeric_b, sweep, synthesize_waveform,
    trajectory_jumps, verify, waveform_level,
)

G1 = (21.218, 26.939, 36.526, 46.817, 53.842)
G2 = (10.055, 21.255, 33.889, 66.911, 74.966)
WORKED = (50.06528, 62.26686, 71.12892)


def rad(angles):
    return [math.radians(a) for a in angles]


def test_fourier_b_examples():
    assert abs(fourier_b(rad(G1), 5)) < 5e-4
    assert fourier_b([0.0], 1) == pytest.approx(4 / math.pi)
    assert fourier_b(rad(WORKED), 1) == pytest.approx(4 / math.pi * 0.5, abs=1e-6)
    with pytest.raises(ValueError):
        fourier_b([0.1], 2)
    with pytest.raises(ValueError):
        fourier_b([0.1], -3)


def test_waveform_single_angle():
    th = np.radians(np.array([10, 29, 31, 90, 149, 151, 209, 211, 270, 329, 331, 359.0]))
    u = waveform_level(th, rad([30]))
    assert list(u) == [0, 0, 1, 1, 1, 0, 0, -1, -1, -1, 0, 0]


def test_waveform_mean_zero_and_even_harmonics():
    theta, u = synthesize_waveform(rad(G2), 2**14)
    assert abs(np.mean(u)) < 1e-12
    h = 2 * np.pi / len(u)
    for k in (2, 4):
        assert abs(np.sum(u * np.sin(k * theta)) * h / np.pi) < 1e-9


def test_numeric_matches_analytic():
    theta, u = synthesize_waveform(rad(G1), 2**16)
    for k in range(1, 26, 2):
        assert abs(numeric_b(theta, u, k) - fourier_b(rad(G1), k)) < 1e-6


def test_point_sampling_is_coarser():
    # plain point samples are limited by where the switching instants fall in the grid
    theta, u = synthesize_waveform(rad(G1), 2**16, cell_average=False)
    err = max(abs(numeric_b(theta, u, k) - fourier_b(rad(G1), k)) for k in range(1, 26, 2))
    assert err < 1e-3


def test_verify_examples():
    assert verify(G2, [5, 7, 11, 13], F(3, 4)).passed
    rep = verify([10, 20, 30], [5, 7])
    assert not rep.passed and rep.failures
    assert verify(WORKED, [5, 7], F(1, 2), tol=1e-4).passed
    assert rep.lines()[-1].startswith("FAIL")
    with pytest.raises(ValueError):
        verify([20, 10], [5])
    with pytest.raises(ValueError):
        verify([95], [5])


def test_grid():
    g = grid(F(3, 10), F(92, 100), F(1, 500))
    assert g[0] == F(3, 10) and g[-1] == F(92, 100) and len(g) == 311
    with pytest.raises(ValueError):
        grid(F(1, 2), F(1, 3), F(1, 100))


def test_match_labels():
    prev = [(0, (10.0, 20.0)), (1, (30.0, 40.0))]
    assert _match(prev, [(30.5, 40.2), (10.1, 20.3)]) == [1, 0]
    assert _match(prev, [(31.0, 41.0)]) == [1]
    assert _match(prev, [(10.0, 20.0), (50.0, 60.0), (30.0, 40.0)]) == [0, 2, 1]
    assert _match([], [(1.0, 2.0), (3.0, 4.0)]) == [0, 1]


def test_sweep_n3(build, tmp_path):
    p3 = build(3)[0]
    res = sweep(p3, F(9, 20), F(11, 20), F(1, 500))
    assert res.counts[F(1, 2)] == 1 and len(res.groups_at(F(1, 2))) == 1
    assert res.skipped == {}
    assert max_trajectory_jump(res) < 2
    assert all(j >= 0 for _, _, j in trajectory_jumps(res))
    res.write_csv(tmp_path / "s.csv")
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0] == ["m", "group_index", "alpha_1", "alpha_2", "alpha_3"]
    assert len(rows) == 1 + len(res.rows)
    assert rows[1][2].count(".") == 1 and len(rows[1][2].split(".")[1]) == 5
    res.write_svg(tmp_path / "s.svg")
    assert (tmp_path / "s.svg").read_text().lstrip().startswith("<?xml")

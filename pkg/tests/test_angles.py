import numpy as np
import pytest

from conftest import random_source
from sadce.angles import (
    build_anti_diagonal,
    dft2,
    find_peak,
    initial_angles,
    refine_angles,
    rotated_value,
    rotation_deltas,
    signed_frequency,
)
from sadce.baselines import dft2_naive
from sadce.geometry import SourceTruth, synthesize_channel

LAM = 0.03


def make_anti_diagonal(geom, src, model="fresnel"):
    return build_anti_diagonal(synthesize_channel(geom, src, model), geom)


def test_anti_diagonal_center_entry(paper_geom):
    src = SourceTruth(u=0.23, v=-0.41, r=6.0, gain=1.3 - 0.7j)
    r_a = make_anti_diagonal(paper_geom, src)
    center = r_a[paper_geom.half_y, paper_geom.half_z]
    assert center == pytest.approx(abs(src.gain) ** 2, abs=1e-12)


def test_anti_diagonal_range_invariance(paper_geom):
    near = make_anti_diagonal(paper_geom, SourceTruth(u=0.3, v=0.2, r=5.0, gain=0.9 + 0.1j))
    far = make_anti_diagonal(paper_geom, SourceTruth(u=0.3, v=0.2, r=50.0, gain=0.9 + 0.1j))
    assert np.abs(near - far).max() < 1e-12


def test_anti_diagonal_closed_form(paper_geom):
    rng = np.random.default_rng(4)
    m_y, m_z = paper_geom.offsets()
    for _ in range(5):
        src = random_source(rng)
        r_a = make_anti_diagonal(paper_geom, src)
        phase = -4.0 * np.pi / LAM * paper_geom.spacing * (m_z * src.u - m_y * src.v)
        expected = (abs(src.gain) ** 2 * np.exp(1j * phase)).reshape(
            paper_geom.m_z_count, paper_geom.m_y_count
        ).T
        assert np.abs(r_a - expected).max() < 1e-10


def test_dft2_constant_input():
    g = dft2(np.ones((9, 11), dtype=complex))
    assert g[0, 0] == pytest.approx(1.0, abs=1e-12)
    g[0, 0] = 0.0
    assert np.abs(g).max() < 1e-12


def test_dft2_matches_double_sum_oracle():
    rng = np.random.default_rng(5)
    data = rng.standard_normal((41, 41)) + 1j * rng.standard_normal((41, 41))
    assert np.abs(dft2(data) - dft2_naive(data)).max() < 1e-9


def test_dft2_linearity():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    y = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    alpha = 0.7 - 1.2j
    assert np.abs(dft2(alpha * x + y) - (alpha * dft2(x) + dft2(y))).max() < 1e-12


def test_signed_relabeling():
    assert [signed_frequency(i, 5) for i in range(5)] == [0, 1, 2, -2, -1]


def test_peak_and_initial_angles_boresight(paper_geom):
    r_a = make_anti_diagonal(paper_geom, SourceTruth(u=0.0, v=0.0, r=5.0))
    peak = find_peak(dft2(r_a))
    assert peak == (0, 0)
    assert initial_angles(peak, paper_geom) == (0.0, 0.0)


def test_peak_on_grid_source(paper_geom):
    # u = 8/41 sits exactly on a DFT bin at quarter-wave spacing: i_z = -4.
    src = SourceTruth(u=8.0 / 41.0, v=0.0, r=5.0, gain=0.5 + 0.5j)
    r_a = make_anti_diagonal(paper_geom, src)
    peak = find_peak(dft2(r_a))
    assert peak == (0, -4)
    u0, v0 = initial_angles(peak, paper_geom)
    assert u0 == pytest.approx(8.0 / 41.0, abs=1e-15)
    assert v0 == 0.0
    # a single bin holds all the energy
    g = np.abs(dft2(r_a))
    assert g[0, -4 % 41] == pytest.approx(abs(src.gain) ** 2, rel=1e-12)


def test_initial_angles_off_grid_within_half_bin(paper_geom):
    rng = np.random.default_rng(7)
    for _ in range(100):
        src = random_source(rng)
        peak = find_peak(dft2(make_anti_diagonal(paper_geom, src)))
        u0, v0 = initial_angles(peak, paper_geom)
        assert abs(u0 - src.u) <= 1.0 / paper_geom.m_z_count + 1e-12
        assert abs(v0 - src.v) <= 1.0 / paper_geom.m_y_count + 1e-12


def test_peak_gain_invariance(paper_geom):
    base = SourceTruth(u=0.37, v=-0.11, r=7.0, gain=1.0)
    scaled = SourceTruth(u=0.37, v=-0.11, r=7.0, gain=-2.4j)
    ra1 = make_anti_diagonal(paper_geom, base)
    ra2 = make_anti_diagonal(paper_geom, scaled)
    p1, p2 = find_peak(dft2(ra1)), find_peak(dft2(ra2))
    assert p1 == p2
    e1 = refine_angles(ra1, p1, paper_geom)
    e2 = refine_angles(ra2, p2, paper_geom)
    assert (e1.delta_u, e1.delta_v) == (e2.delta_u, e2.delta_v)


def test_rotation_deltas_structure(paper_geom):
    du, dv = rotation_deltas(paper_geom, 64, 64)
    # grids are symmetric, include 0, subdivide one DFT bin into G steps,
    # and span the full two-bin ambiguity range at quarter-wave spacing
    for grid, count in ((du, paper_geom.m_z_count), (dv, paper_geom.m_y_count)):
        assert grid[0] == -grid[-1]
        assert 0.0 in grid
        step = grid[1] - grid[0]
        assert step == pytest.approx(2.0 * np.pi / (count * 64), rel=1e-12)
        span = LAM * np.pi / (paper_geom.spacing * count)
        assert grid[-1] == pytest.approx(span, rel=1e-9)
        assert len(grid) == 4 * 64 + 1
    with pytest.raises(ValueError):
        rotation_deltas(paper_geom, 1, 64)


def test_rotated_value_at_zero_matches_dft(paper_geom):
    rng = np.random.default_rng(8)
    src = random_source(rng)
    r_a = make_anti_diagonal(paper_geom, src)
    g = dft2(r_a)
    peak = find_peak(g)
    value = rotated_value(r_a, peak, 0.0, 0.0)
    assert value == pytest.approx(
        complex(g[peak[0] % 41, peak[1] % 41]), abs=1e-12
    )


def test_rotated_value_bounded_by_max_entry(paper_geom):
    rng = np.random.default_rng(9)
    r_a = rng.standard_normal((41, 41)) + 1j * rng.standard_normal((41, 41))
    bound = np.abs(r_a).max()
    for _ in range(20):
        val = rotated_value(r_a, (3, -5), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
        assert abs(val) <= bound + 1e-12


def test_on_grid_rotation_peaks_at_zero(paper_geom):
    src = SourceTruth(u=8.0 / 41.0, v=-6.0 / 41.0, r=5.0)
    r_a = make_anti_diagonal(paper_geom, src)
    peak = find_peak(dft2(r_a))
    du, dv = rotation_deltas(paper_geom, 8, 8)
    best = max(
        (abs(rotated_value(r_a, peak, float(a), float(b))), float(a), float(b))
        for a in du
        for b in dv
    )
    assert best[1] == 0.0 and best[2] == 0.0


def test_refine_on_grid_keeps_initial(paper_geom):
    src = SourceTruth(u=8.0 / 41.0, v=2.0 / 41.0, r=5.0)
    r_a = make_anti_diagonal(paper_geom, src)
    peak = find_peak(dft2(r_a))
    est = refine_angles(r_a, peak, paper_geom)
    assert (est.delta_u, est.delta_v) == (0.0, 0.0)
    assert est.u == pytest.approx(src.u, abs=1e-15)
    assert est.v == pytest.approx(src.v, abs=1e-15)


def test_refine_objective_at_least_unrotated(paper_geom):
    rng = np.random.default_rng(10)
    for _ in range(10):
        src = random_source(rng)
        r_a = make_anti_diagonal(paper_geom, src)
        peak = find_peak(dft2(r_a))
        est = refine_angles(r_a, peak, paper_geom, g_y=16, g_z=16)
        refined = abs(rotated_value(r_a, peak, est.delta_u, est.delta_v))
        assert refined >= abs(rotated_value(r_a, peak, 0.0, 0.0)) - 1e-12


def test_refine_off_grid_resolution_bound(paper_geom):
    rng = np.random.default_rng(11)
    g = 64
    bound_u = 2.0 / (paper_geom.m_z_count * g)
    bound_v = 2.0 / (paper_geom.m_y_count * g)
    for _ in range(100):
        src = random_source(rng)
        r_a = make_anti_diagonal(paper_geom, src)
        est = refine_angles(r_a, find_peak(dft2(r_a)), paper_geom, g_y=g, g_z=g)
        assert abs(est.u - src.u) <= bound_u
        assert abs(est.v - src.v) <= bound_v
        # refined rotations stay inside the documented ranges
        assert abs(est.delta_u) <= LAM * np.pi / (paper_geom.spacing * paper_geom.m_z_count) + 1e-12
        assert abs(est.delta_v) <= LAM * np.pi / (paper_geom.spacing * paper_geom.m_y_count) + 1e-12


def test_angle_stage_range_invariant(paper_geom):
    kwargs = dict(u=0.123, v=0.456, gain=0.7 - 0.2j)
    out = []
    for r in (5.0, 50.0):
        r_a = make_anti_diagonal(paper_geom, SourceTruth(r=r, **kwargs))
        est = refine_angles(r_a, find_peak(dft2(r_a)), paper_geom)
        out.append((est.peak_iy, est.peak_iz, est.delta_u, est.delta_v))
    assert out[0] == out[1]


def test_rotation_search_cost_scales_with_g(paper_geom):
    # evaluation count is Theta(G_Y * G_Z): 4G+1 points per axis
    for g in (8, 16, 32):
        du, dv = rotation_deltas(paper_geom, g, g)
        assert len(du) * len(dv) == (4 * g + 1) ** 2

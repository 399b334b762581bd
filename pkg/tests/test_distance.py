import numpy as np
import pytest

from conftest import random_source
from sadce.distance import (
    estimate_gain,
    f_vector,
    fit_distance,
    reconstruct,
    solve_t_analytic,
    solve_t_dense,
)
from sadce.errors import ConditioningError, DegenerateInputError, FitFailureError
from sadce.geometry import ArrayGeometry, SourceTruth, synthesize_channel
from sadce.signals import generate_pilots, ls_channel_estimate, transmit
from sadce.util import nmse, wrap_phase

LAM = 0.03


def true_t(geom, src):
    """Reference range vector from the curvature phase directly."""
    m_y, m_z = geom.offsets()
    d = geom.spacing
    p = d * (m_z * src.u - m_y * src.v)
    q = (d * d * (m_y**2 + m_z**2) - p * p) / (2.0 * src.r)
    return np.exp(-1j * 2.0 * np.pi / LAM * q)


def noiseless_ls(geom, src):
    block = transmit(synthesize_channel(geom, src), generate_pilots(1), 0.0)
    return ls_channel_estimate(block), block


def test_analytic_solver_recovers_true_t(paper_geom):
    src = SourceTruth(u=0.31, v=-0.17, r=6.0, gain=1.4 * np.exp(0.9j))
    h_ls, _ = noiseless_ls(paper_geom, src)
    t_hat = solve_t_analytic(h_ls, src.u, src.v, paper_geom)
    # the gain phase cancels in the center-normalized ratio
    assert np.abs(t_hat - true_t(paper_geom, src)).max() < 1e-12
    assert t_hat[paper_geom.center_index] == 1.0 + 0.0j


def test_analytic_solver_guards(paper_geom):
    with pytest.raises(DegenerateInputError):
        solve_t_analytic(np.zeros(paper_geom.element_count, complex), 0.1, 0.1, paper_geom)
    h = np.ones(paper_geom.element_count, complex)
    h[paper_geom.center_index] = 0.0
    with pytest.raises(ConditioningError):
        solve_t_analytic(h, 0.0, 0.0, paper_geom)


def test_dense_solver_small_geometry_matches_true_t():
    # ridge 1e-6 perturbs amplitudes by ~ridge*M, so the tight absolute check
    # needs a tiny array; phases are untouched at any size.
    geom = ArrayGeometry.quarter_wave(3, 3, LAM)
    src = SourceTruth(u=0.2, v=0.1, r=1.0, gain=1.0 - 0.3j)
    h_ls, _ = noiseless_ls(geom, src)
    t_hat = solve_t_dense(h_ls, src.u, src.v, geom, ridge=1e-6)
    assert np.abs(t_hat - true_t(geom, src)).max() < 1e-5


def test_dense_solver_constraint_and_gate(small_geom, paper_geom):
    rng = np.random.default_rng(12)
    h = rng.standard_normal(81) + 1j * rng.standard_normal(81)
    t_hat = solve_t_dense(h, 0.15, -0.3, small_geom, ridge=1e-4)
    assert t_hat[small_geom.center_index] == pytest.approx(1.0 + 0.0j, abs=1e-9)
    with pytest.raises(ValueError):
        solve_t_dense(np.ones(paper_geom.element_count, complex), 0.0, 0.0, paper_geom)
    with pytest.raises(ValueError):
        solve_t_dense(h, 0.0, 0.0, small_geom, ridge=0.0)


def test_dense_matches_analytic_and_limit_shrinks(small_geom):
    rng = np.random.default_rng(13)
    h = rng.standard_normal(81) + 1j * rng.standard_normal(81)
    analytic = solve_t_analytic(h, 0.22, -0.05, small_geom)
    gaps = []
    for ridge in (1e-2, 1e-4, 1e-6):
        dense = solve_t_dense(h, 0.22, -0.05, small_geom, ridge=ridge)
        gaps.append(np.linalg.norm(dense - analytic) / np.linalg.norm(analytic))
        # element phases agree exactly at any ridge: the perturbation is a
        # positive real rescaling of the off-center entries
        assert np.abs(np.angle(dense * np.conj(analytic))).max() < 1e-9
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] ** 2 < 1e-6  # squared-relative agreement at ridge 1e-6


def test_f_vector_properties(paper_geom):
    f0 = f_vector(paper_geom, 0.0, 0.0)
    m_y, m_z = paper_geom.offsets()
    d = paper_geom.spacing
    assert np.abs(f0 + np.pi * d * d / LAM * (m_y**2 + m_z**2)).max() < 1e-15
    assert f_vector(paper_geom, 0.37, -0.56)[paper_geom.center_index] == 0.0


def test_f_vector_matches_t_phase(paper_geom):
    rng = np.random.default_rng(14)
    for _ in range(5):
        src = random_source(rng)
        gap = wrap_phase(np.angle(true_t(paper_geom, src)) - f_vector(paper_geom, src.u, src.v) / src.r)
        assert np.abs(gap).max() < 1e-10


def test_fit_distance_exact_and_affine(paper_geom):
    f = f_vector(paper_geom, 0.1, 0.2)
    fit = fit_distance(np.exp(1j * f / 5.0), f)
    assert fit.r_hat == pytest.approx(5.0, rel=1e-12)
    assert fit.sigma_r == pytest.approx(0.0, abs=1e-12)
    fit = fit_distance(np.exp(1j * (f / 5.0 + 0.3)), f)
    assert fit.r_hat == pytest.approx(5.0, rel=1e-12)
    assert fit.sigma_r == pytest.approx(0.3, abs=1e-12)


def test_fit_distance_failures():
    geom = ArrayGeometry.quarter_wave(1, 1, LAM)
    with pytest.raises(ValueError):
        fit_distance(np.array([1.0 + 0j]), f_vector(geom, 0.0, 0.0))
    geom = ArrayGeometry.quarter_wave(9, 9, LAM)
    f = f_vector(geom, 0.0, 0.0)
    with pytest.raises(FitFailureError):
        fit_distance(np.exp(-1j * f / 5.0), f)  # negative slope


def test_fit_recovers_inverse_range_to_1e9(paper_geom):
    rng = np.random.default_rng(15)
    for _ in range(5):
        src = random_source(rng, r_range=(3.0, 25.0))
        h_ls, _ = noiseless_ls(paper_geom, src)
        t_hat = solve_t_analytic(h_ls, src.u, src.v, paper_geom)
        fit = fit_distance(t_hat, f_vector(paper_geom, src.u, src.v))
        assert abs(fit.inv_range - 1.0 / src.r) * src.r < 1e-9


def test_phase_reference_invariance(paper_geom):
    src = SourceTruth(u=0.28, v=0.33, r=7.5, gain=0.6 + 0.8j)
    h_ls, block = noiseless_ls(paper_geom, src)
    rotated = np.exp(1.234j) * h_ls
    t_a = solve_t_analytic(h_ls, src.u, src.v, paper_geom)
    t_b = solve_t_analytic(rotated, src.u, src.v, paper_geom)
    assert np.abs(t_a - t_b).max() < 1e-12
    f = f_vector(paper_geom, src.u, src.v)
    assert fit_distance(t_a, f).r_hat == pytest.approx(fit_distance(t_b, f).r_hat, rel=1e-12)
    beta_a = estimate_gain(block, src.u, src.v, src.r, paper_geom, h_ls=h_ls)
    beta_b = estimate_gain(block, src.u, src.v, src.r, paper_geom, h_ls=rotated)
    assert abs(abs(beta_a) - abs(beta_b)) < 1e-12
    assert np.angle(beta_b / beta_a) == pytest.approx(1.234, abs=1e-12)


def test_estimate_gain_noiseless_exact(paper_geom):
    src = SourceTruth(u=0.12, v=-0.34, r=5.5, gain=1.7 * np.exp(-2.1j))
    _, block = noiseless_ls(paper_geom, src)
    beta = estimate_gain(block, src.u, src.v, src.r, paper_geom)
    assert abs(beta - src.gain) < 1e-12


def test_estimate_gain_cauchy_schwarz_bound(paper_geom):
    rng = np.random.default_rng(16)
    h = rng.standard_normal(paper_geom.element_count) + 1j * rng.standard_normal(paper_geom.element_count)
    block = transmit(h, generate_pilots(2), 0.1, rng)
    h_ls = ls_channel_estimate(block)
    beta = estimate_gain(block, 0.4, 0.1, 6.0, paper_geom, h_ls=h_ls)
    assert abs(beta) <= np.linalg.norm(h_ls) / np.sqrt(paper_geom.element_count) + 1e-12


def test_estimate_gain_variance(small_geom):
    # var(beta_hat) ~= sigma^2 / (L * P * M) for a fixed channel.
    rng = np.random.default_rng(17)
    src = SourceTruth(u=0.2, v=0.1, r=5.0, gain=0.9 - 0.4j)
    h = synthesize_channel(small_geom, src)
    sigma_sq, length, power = 0.16, 2, 2.0
    pilots = generate_pilots(length, power)
    draws = [
        estimate_gain(
            transmit(h, pilots, sigma_sq, rng), src.u, src.v, src.r, small_geom
        )
        for _ in range(10_000)
    ]
    measured = float(np.var(draws))
    expected = sigma_sq / (length * power * small_geom.element_count)
    assert abs(measured - expected) / expected < 0.10


def test_reconstruct(paper_geom):
    est = reconstruct(paper_geom, 0.1, 0.2, 6.0, beta=0.0)
    assert not est.h_hat.any()
    src = SourceTruth(u=0.1, v=0.2, r=6.0, gain=1.1 + 0.3j)
    est = reconstruct(paper_geom, src.u, src.v, src.r, src.gain)
    assert nmse(est.h_hat, synthesize_channel(paper_geom, src)) < 1e-28

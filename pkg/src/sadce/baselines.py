"""Desk-scale reference estimators and brute-force oracles for cross-validation.

Everything here trades speed for independence from the production path: the
3-D spectral search evaluates the subspace objective on an exhaustive grid,
the distance oracle grids 1/r directly, and the direct DFT evaluates the
normalized double sum without an FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .geometry import ArrayGeometry, steering_fresnel
from .util import wrap_phase

TWO_PI = 2.0 * np.pi

SEARCH_SIZE_LIMIT = 441
MAX_GRID_POINTS = 10_000_000


@dataclass(frozen=True)
class GridSpec:
    """Search grid over (u, v, r) for the exhaustive 3-D spectral search."""

    u_count: int = 201
    v_count: int = 201
    r_count: int = 191
    u_range: tuple[float, float] = (-1.0, 1.0)
    v_range: tuple[float, float] = (-1.0, 1.0)
    r_range: tuple[float, float] = (3.0, 22.0)
    r_spacing: str = "linear"

    def __post_init__(self) -> None:
        for name in ("u_count", "v_count", "r_count"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be at least 2")
        for name in ("u_range", "v_range", "r_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must be a non-empty interval, got ({lo}, {hi})")
        if self.r_range[0] <= 0.0:
            raise ValueError("range grid must be strictly positive")
        if self.r_spacing not in ("linear", "log"):
            raise ValueError(f"r_spacing must be 'linear' or 'log', got {self.r_spacing!r}")

    @property
    def point_count(self) -> int:
        return self.u_count * self.v_count * self.r_count

    def u_values(self) -> np.ndarray:
        return np.linspace(*self.u_range, self.u_count)

    def v_values(self) -> np.ndarray:
        return np.linspace(*self.v_range, self.v_count)

    def r_values(self) -> np.ndarray:
        if self.r_spacing == "log":
            return np.geomspace(*self.r_range, self.r_count)
        return np.linspace(*self.r_range, self.r_count)


def music3d_objective(h_hat: np.ndarray, u: float, v: float, r: float, geom: ArrayGeometry) -> float:
    """Noise-subspace power ||b||^2 - |b^H h_hat|^2 / ||h_hat||^2 at one grid point.

    This equals b^H (I - h h^H/||h||^2) b for the rank-1 signal subspace,
    evaluated in O(M) without materializing the projector.  It is minimized
    (never inverted), so the exact solution where it hits zero needs no
    special casing; roundoff is clipped at zero.
    """
    h = np.asarray(h_hat)
    norm_sq = float(np.real(np.vdot(h, h)))
    if norm_sq == 0.0:
        raise DegenerateInputError("channel estimate is identically zero")
    b = steering_fresnel(geom, u, v, r)
    val = float(np.real(np.vdot(b, b))) - float(np.abs(np.vdot(b, h)) ** 2) / norm_sq
    return max(val, 0.0)


def music3d_search(
    h_hat: np.ndarray, grid: GridSpec, geom: ArrayGeometry
) -> tuple[float, float, float]:
    """Exhaustive argmin of the 3-D spectral objective over the grid.

    Deterministic: exact value ties resolve to the lexicographically smallest
    (i_u, i_v, i_r) index triple.  Gated to desk-scale arrays and bounded
    grids; the per-point cost is O(M).
    """
    if geom.element_count > SEARCH_SIZE_LIMIT:
        raise ValueError(f"3-D search is gated to M <= {SEARCH_SIZE_LIMIT}")
    if grid.point_count > MAX_GRID_POINTS:
        raise ValueError(f"grid has {grid.point_count} points, above the {MAX_GRID_POINTS} gate")
    h = np.asarray(h_hat, dtype=complex)
    norm_sq = float(np.real(np.vdot(h, h)))
    if norm_sq == 0.0:
        raise DegenerateInputError("channel estimate is identically zero")

    m_y, m_z = geom.offsets()
    d, lam = geom.spacing, geom.wavelength
    u_vals = grid.u_values()
    v_vals = grid.v_values()
    r_vals = grid.r_values()
    inv_r = 1.0 / r_vals
    rho_sq = (m_y * m_y + m_z * m_z).astype(float)
    m_total = float(geom.element_count)

    # The curvature phase c * (1/r) is small over any valid grid, so
    # exp(1j*c/r) is evaluated as a short power series in 1/r.  That makes
    # the r axis separable (a handful of moments per (u, v) column instead of
    # a trig call per grid point) and keeps full double precision, which
    # matters because the objective is extremely flat along r.
    curv_scale = np.pi * d * d / lam
    phi_max = curv_scale * float(rho_sq.max() + rho_sq.max()) * float(inv_r.max())
    order = _series_order(phi_max)
    x_pow = inv_r[None, :] ** np.arange(order + 1)[:, None]  # (K+1, n_r)
    coeffs = (1j ** np.arange(order + 1)) / _factorials(order)
    basis = coeffs[:, None] * x_pow  # (K+1, n_r)

    best_val = np.inf
    best_idx = (0, 0, 0)
    n_r = len(r_vals)
    for iu, u in enumerate(u_vals):
        s = u * m_z[:, None] - np.outer(m_y, v_vals)  # (M, n_v)
        lead = (TWO_PI / lam) * d * s
        curv = curv_scale * (rho_sq[:, None] - s * s)
        work = h[:, None] * np.exp(1j * lead)  # (M, n_v)
        moments = np.empty((order + 1, len(v_vals)), dtype=complex)
        moments[0] = work.sum(axis=0)
        for k in range(1, order + 1):
            work = work * curv
            moments[k] = work.sum(axis=0)
        corr = np.einsum("kv,kr->vr", moments, basis, optimize=False)
        objective = m_total - (corr.real**2 + corr.imag**2) / norm_sq
        flat = int(np.argmin(objective))
        val = float(objective.ravel()[flat])
        if val < best_val:
            best_val = val
            best_idx = (iu, flat // n_r, flat % n_r)
    iu, iv, ir = best_idx
    return float(u_vals[iu]), float(v_vals[iv]), float(r_vals[ir])


def _series_order(phi_max: float) -> int:
    """Smallest truncation order with remainder phi^(K+1)/(K+1)! below 1e-14."""
    order = 4
    term = phi_max**5 / 120.0
    while term > 1e-14 and order < 60:
        order += 1
        term *= phi_max / (order + 1)
    return order


def _factorials(order: int) -> np.ndarray:
    out = np.ones(order + 1)
    for k in range(2, order + 1):
        out[k] = out[k - 1] * k
    return out


def oracle_distance_grid(
    t_hat: np.ndarray,
    f: np.ndarray,
    r_range: tuple[float, float] = (1.0, 20.0),
    step: float = 1e-3,
) -> float:
    """Brute-force range estimate: grid 1/r and score wrapped phase residuals.

    For each candidate r the common phase offset of t_hat is profiled out
    (the same role the intercept plays in the closed-form fit) and the score
    is the sum of squared principal-value residuals wrap(angle(t_m) - c - f_m/r).
    Ties take the smallest r.
    """
    lo, hi = r_range
    if lo <= 0.0 or hi <= lo:
        raise ValueError(f"range window must be positive and ordered, got {r_range}")
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    phases = np.angle(np.asarray(t_hat))
    f = np.asarray(f, dtype=float)
    r_vals = np.arange(lo, hi + step / 2.0, step)

    best_val = np.inf
    best_r = r_vals[0]
    chunk = 2048
    for start in range(0, len(r_vals), chunk):
        r_chunk = r_vals[start : start + chunk]
        resid = wrap_phase(phases[None, :] - np.outer(1.0 / r_chunk, f))
        resid = wrap_phase(resid - resid.mean(axis=1, keepdims=True))
        scores = np.einsum("ij,ij->i", resid, resid)
        k = int(np.argmin(scores))
        if scores[k] < best_val:
            best_val = float(scores[k])
            best_r = float(r_chunk[k])
    return best_r


def dft2_naive(r_a: np.ndarray) -> np.ndarray:
    """Normalized 2-D DFT evaluated as the literal double sum (no FFT)."""
    r_a = np.asarray(r_a)
    m_y_count, m_z_count = r_a.shape
    ky = np.exp(-2j * np.pi * np.outer(np.arange(m_y_count), np.arange(m_y_count)) / m_y_count)
    kz = np.exp(-2j * np.pi * np.outer(np.arange(m_z_count), np.arange(m_z_count)) / m_z_count)
    return ky @ r_a @ kz / r_a.size

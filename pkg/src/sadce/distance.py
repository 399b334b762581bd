"""Range recovery from the curvature phase, plus gain estimation and reconstruction.

With the angle estimates in hand, the steering vector factors into a known
diagonal angle phase Q(u, v) and a range-bearing vector t(u, v, r) whose
entries are exp(-1j * 2*pi/lambda * q_m).  Constraining the center entry to 1
and minimizing the noise-subspace quadratic form t^H (I - g g^H) t, with
g = Q^H h_hat / ||h_hat||, gives the estimate of t.  Because the rank-1
projector makes the quadratic form exactly singular, the literal matrix
inverse does not exist; a Tikhonov ridge yields a dense reference solve and
its closed-form zero-ridge limit t = g / g[center] is the default O(M) path.
The element phases of t are an affine function of 1/r, so a two-parameter
least-squares fit recovers the range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DegenerateInputError, FitFailureError
from .geometry import ArrayGeometry, steering_fresnel
from .signals import ReceivedBlock, ls_channel_estimate

TWO_PI = 2.0 * np.pi

# Dense solves materialize an M x M matrix; anything larger must use the
# analytic path.
DENSE_SIZE_LIMIT = 441


@dataclass(frozen=True, eq=False)
class DistanceFit:
    """Affine phase fit: phases ~= sigma_r + f_m / r."""

    sigma_r: float
    inv_range: float
    r_hat: float
    phases: np.ndarray


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    """Final parameter estimates, the reconstructed channel, and diagnostics."""

    u_hat: float
    v_hat: float
    r_hat: float
    beta_hat: complex
    h_hat: np.ndarray
    peak_iy: int
    peak_iz: int
    delta_u: float
    delta_v: float
    sigma_r: float


def _angle_reference(h_hat: np.ndarray, u: float, v: float, geom: ArrayGeometry) -> np.ndarray:
    """g = Q(u, v)^H h_hat / ||h_hat||: the channel with the angle phase removed."""
    h = np.asarray(h_hat, dtype=complex)
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise DegenerateInputError("channel estimate is identically zero")
    m_y, m_z = geom.offsets()
    angle_phase = (TWO_PI / geom.wavelength) * geom.spacing * (m_z * u - m_y * v)
    return np.exp(1j * angle_phase) * h / norm


def solve_t_analytic(
    h_hat: np.ndarray, u: float, v: float, geom: ArrayGeometry, center_tol: float = 1e-9
) -> np.ndarray:
    """Zero-ridge limit of the constrained minimizer: t = g / g[center], O(M).

    Exact for the rank-1 noise projector: the quadratic form I - g g^H has a
    null direction along g, so the constrained minimizer aligns with g and the
    center entry sets the scale.  The center element is the phase reference;
    if it carries no energy the solve is refused.
    """
    g = _angle_reference(h_hat, u, v, geom)
    g_center = g[geom.center_index]
    if np.abs(g_center) < center_tol:
        raise ConditioningError(
            "center element of the channel estimate is too small to anchor the phase reference"
        )
    return g / g_center


def solve_t_dense(
    h_hat: np.ndarray, u: float, v: float, geom: ArrayGeometry, ridge: float = 1e-6
) -> np.ndarray:
    """Ridge-regularized dense solve of the constrained minimizer.

    Solves (I - g g^H + ridge I) x = c for the center selector c and
    normalizes to c^H x = 1.  Kept as the desk-scale reference for the
    analytic path; the ridge perturbs the solution by a factor
    ridge / (ridge + |g_center|^2) along (c - t), which leaves every element
    phase untouched.
    """
    if ridge <= 0.0:
        raise ValueError(f"ridge must be positive, got {ridge}")
    if geom.element_count > DENSE_SIZE_LIMIT:
        raise ValueError(
            f"dense solve is gated to M <= {DENSE_SIZE_LIMIT}; use solve_t_analytic"
        )
    g = _angle_reference(h_hat, u, v, geom)
    m = geom.element_count
    t_mat = (1.0 + ridge) * np.eye(m, dtype=complex) - np.outer(g, np.conj(g))
    selector = np.zeros(m, dtype=complex)
    selector[geom.center_index] = 1.0
    x = np.linalg.solve(t_mat, selector)
    return x / x[geom.center_index]


def f_vector(geom: ArrayGeometry, u: float, v: float) -> np.ndarray:
    """Range regressor: [f]_m = -(pi d^2/lambda) (m_z^2 + m_y^2 - (m_z u - m_y v)^2).

    The phase of the true t satisfies angle(t_m) = f_m / r (mod 2pi); the
    center entry is exactly 0.
    """
    m_y, m_z = geom.offsets()
    d = geom.spacing
    s = m_z * u - m_y * v
    return -(np.pi * d * d / geom.wavelength) * (m_z * m_z + m_y * m_y - s * s)


def fit_distance(t_hat: np.ndarray, f: np.ndarray) -> DistanceFit:
    """Two-parameter affine LS fit of the element phases against f.

    The intercept absorbs the arbitrary common phase of t_hat; the slope is
    1/r.  Valid while every |f_m|/r stays below pi (no phase wrapping), which
    the experiment configuration enforces through its range floor.
    """
    phases = np.angle(np.asarray(t_hat))
    f = np.asarray(f, dtype=float)
    f_centered = f - f.mean()
    gram = float(f_centered @ f_centered)
    if gram <= 1e-30:
        raise ValueError("range regressor is constant; the affine fit is degenerate")
    slope = float(f_centered @ phases) / gram
    sigma_r = float(phases.mean() - slope * f.mean())
    if slope <= 0.0:
        raise FitFailureError(f"fitted inverse range {slope:.3e} is not positive")
    return DistanceFit(sigma_r=sigma_r, inv_range=slope, r_hat=1.0 / slope, phases=phases)


def estimate_gain(
    block: ReceivedBlock,
    u: float,
    v: float,
    r: float,
    geom: ArrayGeometry,
    h_ls: np.ndarray | None = None,
) -> complex:
    """Matched-filter gain estimate beta = b^H h_ls / (b^H b) at the fitted parameters.

    For all-ones pilots this equals averaging b^H y_l / (b^H b) over the
    block; the LS form extends it to any pilot sequence.
    """
    b = steering_fresnel(geom, u, v, r)
    if h_ls is None:
        h_ls = ls_channel_estimate(block)
    return complex(np.vdot(b, h_ls) / np.real(np.vdot(b, b)))


def reconstruct(
    geom: ArrayGeometry,
    u: float,
    v: float,
    r: float,
    beta: complex,
    peak: tuple[int, int] = (0, 0),
    delta_u: float = 0.0,
    delta_v: float = 0.0,
    sigma_r: float = 0.0,
) -> ChannelEstimate:
    """Assemble the channel estimate h = beta * b(u, v, r) with its diagnostics."""
    h = beta * steering_fresnel(geom, u, v, r)
    return ChannelEstimate(
        u_hat=float(u),
        v_hat=float(v),
        r_hat=float(r),
        beta_hat=complex(beta),
        h_hat=h,
        peak_iy=int(peak[0]),
        peak_iz=int(peak[1]),
        delta_u=float(delta_u),
        delta_v=float(delta_v),
        sigma_r=float(sigma_r),
    )

"""Angle estimation: anti-diagonal decoupling, 2D-DFT peak search, and rotation refinement.

Products of mirror-symmetric channel entries cancel the range-dependent
curvature phase, so the matrix R_a built from h_hat[m] * conj(h_hat[M-1-m])
depends only on the direction cosines.  In the noiseless case

    R_a[a, b] = |gain|^2 * exp(-1j * 4*pi/lambda * (m_z*u - m_y*v) * d)

with m_y = a - (M_Y-1)/2 and m_z = b - (M_Z-1)/2, i.e. a 2-D complex
exponential whose frequency encodes (u, v).  A 2-D DFT locates the coarse
bin; a progressive phase ramp ("rotation") scanned over a fine grid centers
the bin on the true frequency and removes the leakage bias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry

TWO_PI = 2.0 * np.pi

# Tie windows are relative so that scaling the data (e.g. the channel gain)
# cannot change which grid point wins.
PEAK_TIE_REL = 1e-12


@dataclass(frozen=True)
class AngleEstimate:
    """Refined direction-cosine estimates plus the diagnostics that produced them."""

    u: float
    v: float
    delta_u: float
    delta_v: float
    peak_iy: int
    peak_iz: int


def build_anti_diagonal(h_hat: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    """Anti-diagonal products of the implicit rank-1 covariance, as an M_Y x M_Z matrix.

    Entry [a, b] is h_hat[m] * conj(h_hat[M-1-m]) at m = antenna_index(a - half_y,
    b - half_z); the mirror index M-1-m is the element at (-m_y, -m_z).
    """
    h = np.asarray(h_hat)
    if h.shape != (geom.element_count,):
        raise ValueError(f"expected a length-{geom.element_count} channel estimate")
    fwd = h.reshape(geom.m_z_count, geom.m_y_count).T
    rev = h[::-1].reshape(geom.m_z_count, geom.m_y_count).T
    return fwd * np.conj(rev)


def dft2(r_a: np.ndarray) -> np.ndarray:
    """Normalized 2-D DFT: G[i_y, i_z] = sum over (a, b) of R_a[a,b] e^{-j2pi(a i_y/M_Y + b i_z/M_Z)} / (M_Y M_Z)."""
    r_a = np.asarray(r_a)
    return np.fft.fft2(r_a) / r_a.size


def signed_frequency(index: int, n: int) -> int:
    """Relabel a raw DFT index 0..n-1 (n odd) into the signed range [-(n-1)/2, (n-1)/2]."""
    return index - n if index > (n - 1) // 2 else index


def find_peak(dft_grid: np.ndarray, tie_rel: float = PEAK_TIE_REL) -> tuple[int, int]:
    """Signed indices (i_y, i_z) of the largest-magnitude DFT bin.

    Bins tying within a relative window take the lexicographically smallest
    signed pair, so the peak is deterministic on noisy data.
    """
    m_y_count, m_z_count = dft_grid.shape
    mag = np.abs(dft_grid)
    peak = mag.max()
    cand = np.argwhere(mag >= peak * (1.0 - tie_rel)) if peak > 0.0 else np.argwhere(mag >= -1.0)
    pairs = [
        (signed_frequency(int(a), m_y_count), signed_frequency(int(b), m_z_count))
        for a, b in cand
    ]
    return min(pairs)


def initial_angles(peak: tuple[int, int], geom: ArrayGeometry) -> tuple[float, float]:
    """Coarse estimates from the peak bin: u = -lambda*i_z/(2 d M_Z), v = lambda*i_y/(2 d M_Y)."""
    i_y, i_z = peak
    lam, d = geom.wavelength, geom.spacing
    u = -lam * i_z / (2.0 * d * geom.m_z_count)
    v = lam * i_y / (2.0 * d * geom.m_y_count)
    return u, v


def rotation_deltas(geom: ArrayGeometry, g_y: int, g_z: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform rotation-search grids for (delta_u, delta_v), both containing 0.

    The step subdivides one DFT bin into g points, so the refined angle
    resolution is lambda/(2 d M G) per axis, a G-fold improvement on the
    coarse bin.  The span covers the full ambiguity range
    [-lambda*pi/(d M), lambda*pi/(d M)] (two bins on either side at
    d = lambda/4), which lets the refinement recover from an off-by-a-bin
    coarse peak on noisy data.
    """
    if g_y < 2 or g_z < 2:
        raise ValueError("rotation grids need at least 2 points per axis")
    lam, d = geom.wavelength, geom.spacing

    def axis(count: int, g: int) -> np.ndarray:
        step = TWO_PI / (count * g)
        half_span = lam * np.pi / (d * count)
        n = int(np.floor(half_span / step + 1e-9))
        return step * np.arange(-n, n + 1)

    return axis(geom.m_z_count, g_z), axis(geom.m_y_count, g_y)


def rotated_value(r_a: np.ndarray, peak: tuple[int, int], delta_u: float, delta_v: float) -> complex:
    """Rotated DFT bin value at (delta_u, delta_v), evaluated in O(M_Y * M_Z).

    Multiplying row a by e^{j a delta_v} and column b by e^{j b delta_u}
    shifts the bin center; the value returned is the (i_y, i_z) DFT entry of
    the rotated matrix.
    """
    i_y, i_z = peak
    m_y_count, m_z_count = r_a.shape
    a = np.arange(m_y_count)
    b = np.arange(m_z_count)
    row = np.exp(1j * a * (delta_v - TWO_PI * i_y / m_y_count))
    col = np.exp(1j * b * (delta_u - TWO_PI * i_z / m_z_count))
    return complex(row @ r_a @ col / r_a.size)


def refine_angles(
    r_a: np.ndarray,
    peak: tuple[int, int],
    geom: ArrayGeometry,
    g_y: int = 64,
    g_z: int = 64,
    tie_rel: float = PEAK_TIE_REL,
) -> AngleEstimate:
    """Maximize |rotated bin value| over the delta grid and map the winner to (u, v).

    Ties within the relative window break toward the smallest rotation (in
    grid steps), so an on-grid source keeps its coarse estimate exactly.
    """
    i_y, i_z = peak
    du, dv = rotation_deltas(geom, g_y, g_z)
    a = np.arange(geom.m_y_count)
    b = np.arange(geom.m_z_count)
    rows = np.exp(1j * np.outer(a, dv - TWO_PI * i_y / geom.m_y_count))  # (M_Y, n_v)
    cols = np.exp(1j * np.outer(b, du - TWO_PI * i_z / geom.m_z_count))  # (M_Z, n_u)
    values = rows.T @ np.asarray(r_a) @ cols / r_a.size  # (n_v, n_u)

    mag = np.abs(values)
    best = mag.max()
    cand = np.argwhere(mag >= best * (1.0 - tie_rel)) if best > 0.0 else np.argwhere(mag >= -1.0)
    center_v = (len(dv) - 1) // 2
    center_u = (len(du) - 1) // 2

    def tie_key(pair):
        iv, iu = int(pair[0]), int(pair[1])
        kv, ku = iv - center_v, iu - center_u
        return (ku * ku + kv * kv, abs(kv), abs(ku), kv, ku)

    iv, iu = min(cand, key=tie_key)
    delta_v = float(dv[int(iv)])
    delta_u = float(du[int(iu)])

    lam, d = geom.wavelength, geom.spacing
    u = (lam / (2.0 * d)) * (delta_u / TWO_PI - i_z / geom.m_z_count)
    v = (lam / (2.0 * d)) * (i_y / geom.m_y_count - delta_v / TWO_PI)
    return AngleEstimate(
        u=float(u), v=float(v), delta_u=delta_u, delta_v=delta_v, peak_iy=i_y, peak_iz=i_z
    )


def estimate_angles(
    h_hat: np.ndarray, geom: ArrayGeometry, g_y: int = 64, g_z: int = 64
) -> AngleEstimate:
    """Full angle stage: anti-diagonal matrix, DFT peak, rotation refinement."""
    r_a = build_anti_diagonal(h_hat, geom)
    peak = find_peak(dft2(r_a))
    return refine_angles(r_a, peak, geom, g_y=g_y, g_z=g_z)

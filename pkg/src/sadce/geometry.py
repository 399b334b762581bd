"""Uniform planar array geometry, antenna indexing, and near-field steering vectors.

Conventions used throughout the package:

* The array lies in the YOZ plane of its own frame.  Element ``(m_y, m_z)``
  sits at ``(0, m_y * d, -m_z * d)`` and a point source at direction cosines
  ``(u, v)`` and range ``r`` sits at ``r * (w, v, u)`` with
  ``w = sqrt(1 - u**2 - v**2)``.
* A steering entry is ``exp(-1j * 2*pi/lambda * delta_m)`` where ``delta_m``
  is the excess propagation path of element ``m`` relative to the center
  element.  The quadratic (Fresnel) expansion of ``delta_m`` splits into a
  linear angle term ``p_m = (m_z*u - m_y*v) * d`` and a curvature term
  ``q_m = (d^2*(m_y^2 + m_z^2) - p_m^2) / (2*r)``; the exact form uses the
  true spherical distance.  No ``1/sqrt(M)`` normalization is applied; the
  complex gain absorbs constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ArrayGeometry:
    """UPA dimensions and carrier.

    Element counts must be odd so the array has a center element whose
    steering entry is exactly 1.
    """

    m_y_count: int
    m_z_count: int
    spacing: float
    wavelength: float

    def __post_init__(self) -> None:
        for name in ("m_y_count", "m_z_count"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or n < 1 or n % 2 == 0:
                raise ValueError(f"{name} must be a positive odd integer, got {n!r}")
        if self.spacing <= 0.0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if self.wavelength <= 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @classmethod
    def quarter_wave(cls, m_y_count: int, m_z_count: int, wavelength: float) -> "ArrayGeometry":
        """Geometry with the default unambiguous spacing d = wavelength / 4."""
        return cls(m_y_count, m_z_count, wavelength / 4.0, wavelength)

    @property
    def element_count(self) -> int:
        return self.m_y_count * self.m_z_count

    @property
    def center_index(self) -> int:
        """Linear index of the (0, 0) element."""
        return (self.element_count - 1) // 2

    @property
    def half_y(self) -> int:
        return (self.m_y_count - 1) // 2

    @property
    def half_z(self) -> int:
        return (self.m_z_count - 1) // 2

    @property
    def max_aperture(self) -> float:
        """Longest physical side of the array in meters."""
        return self.spacing * max(self.m_y_count - 1, self.m_z_count - 1)

    def offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """Signed element offsets (m_y, m_z) for every linear index 0..M-1."""
        m = np.arange(self.element_count)
        m_y = m % self.m_y_count - self.half_y
        m_z = m // self.m_y_count - self.half_z
        return m_y, m_z


@dataclass(frozen=True)
class SourceTruth:
    """Ground-truth point source: direction cosines, range, and complex gain.

    ``u`` and ``v`` both derive from a physical direction, so u^2 + v^2 <= 1.
    The Fresnel validity floor on ``r`` is geometry-dependent and enforced
    where a geometry is in scope (see :func:`fresnel_floor` and the harness).
    """

    u: float
    v: float
    r: float
    gain: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if self.u * self.u + self.v * self.v > 1.0 + 1e-12:
            raise ValueError(f"u^2 + v^2 must not exceed 1, got u={self.u}, v={self.v}")
        if self.r <= 0.0:
            raise ValueError(f"range must be positive, got {self.r}")


def antenna_index(m_y, m_z, geom: ArrayGeometry):
    """Map signed element offsets to the linear index M_Y*m_z + m_y + (M-1)/2.

    The center element (0, 0) maps to (M-1)/2 and the mapping is a bijection
    from the offset grid onto [0, M).  Accepts scalars or arrays.
    """
    m_y = np.asarray(m_y)
    m_z = np.asarray(m_z)
    if np.any(np.abs(m_y) > geom.half_y) or np.any(np.abs(m_z) > geom.half_z):
        raise ValueError(
            f"antenna offsets out of range: |m_y| <= {geom.half_y}, |m_z| <= {geom.half_z}"
        )
    idx = geom.m_y_count * m_z + m_y + (geom.element_count - 1) // 2
    if idx.ndim == 0:
        return int(idx)
    return idx


def antenna_coords(m, geom: ArrayGeometry):
    """Inverse of :func:`antenna_index`: linear index -> (m_y, m_z)."""
    m = np.asarray(m)
    if np.any(m < 0) or np.any(m >= geom.element_count):
        raise ValueError(f"linear index out of range [0, {geom.element_count})")
    m_y = m % geom.m_y_count - geom.half_y
    m_z = m // geom.m_y_count - geom.half_z
    if m_y.ndim == 0:
        return int(m_y), int(m_z)
    return m_y, m_z


def steering_fresnel(geom: ArrayGeometry, u: float, v: float, r: float) -> np.ndarray:
    """Fresnel (second-order) near-field steering vector, length M, unit modulus."""
    if r <= 0.0:
        raise ValueError(f"range must be positive, got {r}")
    m_y, m_z = geom.offsets()
    d = geom.spacing
    p = d * (m_z * u - m_y * v)
    q = (d * d * (m_y * m_y + m_z * m_z) - p * p) / (2.0 * r)
    return np.exp(-1j * (TWO_PI / geom.wavelength) * (p + q))


def element_distances(geom: ArrayGeometry, u: float, v: float, r: float) -> np.ndarray:
    """Exact element-to-source distances r_m = sqrt(r^2 + 2*r*p_m + d^2*(m_y^2 + m_z^2))."""
    if r <= 0.0:
        raise ValueError(f"range must be positive, got {r}")
    m_y, m_z = geom.offsets()
    d = geom.spacing
    p = d * (m_z * u - m_y * v)
    return np.sqrt(r * r + 2.0 * r * p + d * d * (m_y * m_y + m_z * m_z))


def steering_exact(geom: ArrayGeometry, u: float, v: float, r: float) -> np.ndarray:
    """Exact spherical-wavefront steering vector, length M, unit modulus."""
    if r <= 0.0:
        raise ValueError(f"range must be positive, got {r}")
    m_y, m_z = geom.offsets()
    d = geom.spacing
    p = d * (m_z * u - m_y * v)
    rm = np.sqrt(r * r + 2.0 * r * p + d * d * (m_y * m_y + m_z * m_z))
    # r_m - r evaluated without cancellation for r much larger than the aperture
    excess = (2.0 * r * p + d * d * (m_y * m_y + m_z * m_z)) / (rm + r)
    return np.exp(-1j * (TWO_PI / geom.wavelength) * excess)


def synthesize_channel(geom: ArrayGeometry, src: SourceTruth, model: str = "fresnel") -> np.ndarray:
    """Single-path channel h = gain * steering(u, v, r) under the chosen wavefront model."""
    if model == "fresnel":
        steer = steering_fresnel(geom, src.u, src.v, src.r)
    elif model == "exact":
        steer = steering_exact(geom, src.u, src.v, src.r)
    else:
        raise ValueError(f"model must be 'fresnel' or 'exact', got {model!r}")
    return src.gain * steer


def rayleigh_distance(aperture: float, wavelength: float) -> float:
    """Near/far-field boundary 2*D^2/lambda for aperture D."""
    if wavelength <= 0.0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    if aperture < 0.0:
        raise ValueError(f"aperture must be non-negative, got {aperture}")
    return 2.0 * aperture * aperture / wavelength


def fresnel_floor(geom: ArrayGeometry, factor: float = 10.0) -> float:
    """Minimum range at which the Fresnel model is trusted (factor * longest side)."""
    return factor * geom.max_aperture

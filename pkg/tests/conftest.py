import numpy as np
import pytest

from sadce.geometry import ArrayGeometry, SourceTruth


@pytest.fixture
def paper_geom() -> ArrayGeometry:
    return ArrayGeometry.quarter_wave(41, 41, 0.03)


@pytest.fixture
def small_geom() -> ArrayGeometry:
    return ArrayGeometry.quarter_wave(9, 9, 0.03)


def random_source(rng: np.random.Generator, r_range=(3.0, 30.0), disk=0.98) -> SourceTruth:
    """Uniform direction cosines inside the unit disk, uniform range, random gain."""
    while True:
        u, v = rng.uniform(-1.0, 1.0, size=2)
        if u * u + v * v <= disk:
            break
    gain = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
    return SourceTruth(u=float(u), v=float(v), r=float(rng.uniform(*r_range)), gain=complex(gain))

"""Small shared numeric helpers."""

from __future__ import annotations

import numpy as np


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator or an integer seed; ambient RNG state is never used."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        raise ValueError("an integer seed or numpy Generator is required")
    return np.random.default_rng(rng)


def wrap_phase(x):
    """Principal value of a phase (radians), in (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x), 2.0 * np.pi)


def nmse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Normalized squared error ||est - truth||^2 / ||truth||^2."""
    num = np.linalg.norm(np.asarray(estimate) - np.asarray(truth)) ** 2
    den = np.linalg.norm(truth) ** 2
    return float(num / den)

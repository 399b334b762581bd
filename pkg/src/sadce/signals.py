"""Pilot generation, the AWGN observation model, and least-squares channel estimation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .util import as_generator

PILOT_KINDS = ("all_ones", "qpsk")


@dataclass(frozen=True, eq=False)
class PilotSequence:
    """Pilot symbols s_1..s_L with per-symbol power |s_l|^2 = power."""

    symbols: np.ndarray
    power: float

    def __post_init__(self) -> None:
        if self.symbols.ndim != 1 or len(self.symbols) < 1:
            raise ValueError("pilot sequence must hold at least one symbol")
        if self.power <= 0.0:
            raise ValueError(f"pilot power must be positive, got {self.power}")
        mean_sq = float(np.mean(np.abs(self.symbols) ** 2))
        if abs(mean_sq - self.power) > 1e-12 * max(1.0, self.power):
            raise ValueError("mean squared pilot modulus does not match the stated power")

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def energy(self) -> float:
        """Total pilot energy s^H s."""
        return float(np.real(np.vdot(self.symbols, self.symbols)))


@dataclass(frozen=True, eq=False)
class ReceivedBlock:
    """Received pilot block: observations Y (M x L), the pilots, and the noise power."""

    observations: np.ndarray
    noise_power: float
    pilots: PilotSequence

    def __post_init__(self) -> None:
        if self.observations.ndim != 2 or self.observations.shape[1] != len(self.pilots):
            raise ValueError("observation matrix must have one column per pilot symbol")
        if self.noise_power < 0.0:
            raise ValueError(f"noise power must be non-negative, got {self.noise_power}")


def generate_pilots(length: int, power: float = 1.0, kind: str = "all_ones", rng=None) -> PilotSequence:
    """Unit-modulus pilot sequence scaled by sqrt(power), deterministic given the rng."""
    if length < 1:
        raise ValueError(f"pilot length must be at least 1, got {length}")
    if power <= 0.0:
        raise ValueError(f"pilot power must be positive, got {power}")
    amp = np.sqrt(power)
    if kind == "all_ones":
        symbols = amp * np.ones(length, dtype=complex)
    elif kind == "qpsk":
        gen = as_generator(rng)
        quadrant = gen.integers(0, 4, size=length)
        symbols = amp * np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * quadrant))
    else:
        raise ValueError(f"pilot kind must be one of {PILOT_KINDS}, got {kind!r}")
    return PilotSequence(symbols=symbols, power=power)


def noise_power_from_snr_db(snr_db: float, pilot_power: float = 1.0) -> float:
    """Noise power sigma^2 = P * 10^(-SNR/10); SNR is defined as 10*log10(P / sigma^2)."""
    return pilot_power * 10.0 ** (-snr_db / 10.0)


def transmit(h: np.ndarray, pilots: PilotSequence, noise_power: float, rng=None) -> ReceivedBlock:
    """Observe y_l = h * s_l + z_l with z_l circular complex Gaussian, CN(0, noise_power I)."""
    if noise_power < 0.0:
        raise ValueError(f"noise power must be non-negative, got {noise_power}")
    h = np.asarray(h, dtype=complex)
    y = np.outer(h, pilots.symbols)
    if noise_power > 0.0:
        gen = as_generator(rng)
        scale = np.sqrt(noise_power / 2.0)
        y = y + scale * (
            gen.standard_normal(y.shape) + 1j * gen.standard_normal(y.shape)
        )
    return ReceivedBlock(observations=y, noise_power=noise_power, pilots=pilots)


def ls_channel_estimate(block: ReceivedBlock) -> np.ndarray:
    """Least-squares channel estimate h_hat = Y s* (s^H s)^-1.

    The implied rank-1 covariance h_hat h_hat^H is never materialized; callers
    work with h_hat directly.
    """
    energy = block.pilots.energy
    if energy <= 0.0:
        raise ValueError("pilot energy must be positive for the LS estimate")
    return block.observations @ np.conj(block.pilots.symbols) / energy

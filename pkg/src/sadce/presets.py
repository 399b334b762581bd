"""Experiment presets reproducing the headline accuracy sweeps.

Scene: a 41 x 41 quarter-wave UPA at 10 GHz (lambda = 3 cm) mounted on a wall
at (1.3, 0, 6) m, serving users drawn uniformly from a 5 m x 5 m square on
the floor whose center sits 5 m out from the wall at (1.3, 5, 0) m.  The
boresight points at the square's centroid, which puts users 6.5-9.9 m from
the array, inside the near field (Rayleigh distance ~12 m for the 0.42 m
diagonal) and above the wavefront-model validity floor.
"""

from __future__ import annotations

from .geometry import ArrayGeometry
from .harness import ExperimentConfig

PAPER_WAVELENGTH = 0.03
BS_POSITION = (1.3, 0.0, 6.0)
USER_BOX_CORNER_A = (-1.2, 2.5, 0.0)
USER_BOX_CORNER_B = (3.8, 7.5, 0.0)

FIG2_SNR_GRID_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
FIG3_PILOT_GRID = (1, 2, 4, 8, 16)
FIG3_SNR_DB = 10.0


def paper_geometry(side: int = 41) -> ArrayGeometry:
    """Square quarter-wave UPA at the 10 GHz carrier."""
    return ArrayGeometry.quarter_wave(side, side, PAPER_WAVELENGTH)


def paper_fig2_config(
    trials: int = 200,
    seed: int = 20240101,
    methods: tuple[str, ...] = ("sadce", "ls"),
    synthesis_model: str = "fresnel",
    pilot_length: int = 1,
) -> ExperimentConfig:
    """Accuracy versus SNR on the 41 x 41 array, 200 trials per SNR point."""
    return ExperimentConfig(
        geometry=paper_geometry(),
        bs_position=BS_POSITION,
        user_box_corner_a=USER_BOX_CORNER_A,
        user_box_corner_b=USER_BOX_CORNER_B,
        snr_grid_db=FIG2_SNR_GRID_DB,
        pilot_length=pilot_length,
        trials=trials,
        rng_seed=seed,
        synthesis_model=synthesis_model,
        methods=methods,
    )


def paper_fig3_config(
    trials: int = 200,
    seed: int = 20240102,
    methods: tuple[str, ...] = ("sadce", "ls"),
    synthesis_model: str = "fresnel",
) -> ExperimentConfig:
    """Channel NMSE versus pilot length at 10 dB SNR."""
    return ExperimentConfig(
        geometry=paper_geometry(),
        bs_position=BS_POSITION,
        user_box_corner_a=USER_BOX_CORNER_A,
        user_box_corner_b=USER_BOX_CORNER_B,
        snr_grid_db=(FIG3_SNR_DB,),
        pilot_length_grid=FIG3_PILOT_GRID,
        trials=trials,
        rng_seed=seed,
        synthesis_model=synthesis_model,
        methods=methods,
    )

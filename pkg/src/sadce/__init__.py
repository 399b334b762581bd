"""Near-field XL-MIMO channel estimation for uniform planar arrays.

Library + CLI implementing a sequential angle-distance channel estimator
(anti-diagonal decoupling, 2D-DFT angle search with rotation refinement,
closed-form range recovery), desk-scale spectral-search baselines, and a
deterministic Monte Carlo harness.
"""

from .angles import (
    AngleEstimate,
    build_anti_diagonal,
    dft2,
    estimate_angles,
    find_peak,
    initial_angles,
    refine_angles,
    rotated_value,
    rotation_deltas,
)
from .baselines import GridSpec, dft2_naive, music3d_objective, music3d_search, oracle_distance_grid
from .config import config_from_dict, config_to_dict, load_config
from .distance import (
    ChannelEstimate,
    DistanceFit,
    estimate_gain,
    f_vector,
    fit_distance,
    reconstruct,
    solve_t_analytic,
    solve_t_dense,
)
from .errors import (
    ConditioningError,
    ConfigError,
    DegenerateInputError,
    EstimationError,
    FitFailureError,
)
from .geometry import (
    ArrayGeometry,
    SourceTruth,
    antenna_coords,
    antenna_index,
    element_distances,
    fresnel_floor,
    rayleigh_distance,
    steering_exact,
    steering_fresnel,
    synthesize_channel,
)
from .harness import ExperimentConfig, MethodResult, SweepResult, TrialRecord, run_trial, sample_source, sweep, write_csv
from .pipeline import estimate_channel
from .presets import paper_fig2_config, paper_fig3_config
from .signals import (
    PilotSequence,
    ReceivedBlock,
    generate_pilots,
    ls_channel_estimate,
    noise_power_from_snr_db,
    transmit,
)

__version__ = "0.1.0"

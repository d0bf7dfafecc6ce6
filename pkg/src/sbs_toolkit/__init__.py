"""Sensing base station (SBS) simulation toolkit.

Circular-array beamforming for a free detection beam plus directional
communication beams, an OFDM symbol-domain radar estimator with closed-form
accuracy theory, Rician link budgets with a Marcum-Q core, a beam-scanning
scheduler, and a TDD/TSF-DMA resource planner, all driven by the `sbs` CLI.
"""

__version__ = "0.1.0"

from .array_geometry import (
    ArrayConfig,
    Direction,
    angular_distance_deg,
    element_position,
    phase_term,
    steering_matrix,
    steering_vector,
    validate_spacing,
)
from .beamforming import (
    BeamPattern,
    BeamSpec,
    CombinerSolution,
    beam_pattern,
    build_weight_matrix,
    compare_with_superposition,
    desired_response,
    measure_beamwidth,
    single_beam_weights,
    solve_joint_combiner,
    superposition_weights,
)
from .config import ToolkitConfig, default_config, load_config
from .errors import ConfigError, NumericalError
from .frame_scheduler import (
    FrameConfig,
    ResourceGrid,
    UserRequest,
    allocate,
    build_frame,
    check_interference_free,
)
from .link_budget import (
    RadioParams,
    inv_marcum_q,
    marcum_q,
    max_comm_range,
    max_sensing_range,
    outage_capacity,
    outage_probability,
    range_crossover,
    rician_snr_pdf,
    success_probability,
)
from .ofdm_isac import (
    EchoModel,
    OfdmConfig,
    divide,
    estimate,
    estimate_range,
    estimate_velocity,
    generate_symbols,
    p_correct_bin,
    p_wrong_bin,
    rmse_range_theory,
    rmse_velocity_theory,
    synthesize_echo,
)
from .radar_mc import McPoint, run_point, run_sweep
from .scanning import Footprint, SceneGeometry, footprint, in_road_region, scanning_period

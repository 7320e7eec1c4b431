"""Simulation and optimisation of RIS-assisted links with 3D BS beamforming."""

__version__ = "0.1.0"

from .antenna import (AntennaPattern, attenuation_horizontal_db, attenuation_vertical_db,
                      gain_linear)
from .channel import ChannelModel, ChannelSet, derive_stream, draw
from .link import SteeringAngles, effective_channel, link_gains, mrt, snr
from .optimizer import (AngleGrid, PhaseStrategy, baseline_phases, grid_search,
                        optimize_phases, quantized_phase_oracle)
from .ris import RisConfig, beta, reflection_matrix
from .scenario import Scenario, reference_scenario, validate

__all__ = [
    "AngleGrid", "AntennaPattern", "ChannelModel", "ChannelSet", "PhaseStrategy",
    "RisConfig", "Scenario", "SteeringAngles", "attenuation_horizontal_db",
    "attenuation_vertical_db", "baseline_phases", "beta", "derive_stream", "draw",
    "effective_channel", "gain_linear", "grid_search", "link_gains", "mrt",
    "optimize_phases", "quantized_phase_oracle", "reference_scenario",
    "reflection_matrix", "snr", "validate",
]

"""Spatial-wideband uplink channel toolkit for mmWave cell-free massive MIMO.

Builds frequency-selective, beam-squint-affected channel responses for
distributed multi-antenna receivers, quantifies the squint in the
virtual-angle domain, derives and validates the minimum OFDM cyclic prefix
against the inter-AP delay spread, and estimates micro/macro spatial
correlation structure by Monte-Carlo simulation.
"""

__version__ = "0.1.0"

from .beamsquint import (SquintReport, VirtualAngleSpectrum, dft_matrix,
                         macro_virtual_transform, squint_report,
                         virtual_angle_transform)
from .channel import (ChannelTensor, OfdmGrid, assemble_channel,
                      macro_steering, phase_shift_matrix, response_at,
                      spatial_frequency_response, spatial_time_tap_gains)
from .correlation import (BAND_AVERAGE, CorrelationReport,
                          correlation_coefficient_map, estimate_correlation,
                          macro_aggregate, micro_blocks_of)
from .errors import ConfigError, DegenerateChannelError, GeometryError
from .ofdm import CpReport, DelayBudget, delay_budget, min_cp, phase_shift, simulate_isi
from .scenario import (ArrayConfig, PathSet, Scenario, build_scenario,
                       compute_delay, exponential_power_profile,
                       generate_paths, pathloss, read_config,
                       uniform_power_profile)
from .util import SPEED_OF_LIGHT

__all__ = [
    "__version__",
    "SPEED_OF_LIGHT",
    "ArrayConfig", "Scenario", "PathSet",
    "build_scenario", "read_config", "generate_paths", "compute_delay",
    "pathloss", "uniform_power_profile", "exponential_power_profile",
    "OfdmGrid", "ChannelTensor",
    "spatial_time_tap_gains", "spatial_frequency_response", "macro_steering",
    "phase_shift_matrix", "response_at", "assemble_channel",
    "VirtualAngleSpectrum", "SquintReport", "dft_matrix",
    "virtual_angle_transform", "macro_virtual_transform", "squint_report",
    "DelayBudget", "CpReport", "phase_shift", "delay_budget", "min_cp",
    "simulate_isi",
    "CorrelationReport", "BAND_AVERAGE", "estimate_correlation",
    "macro_aggregate", "micro_blocks_of", "correlation_coefficient_map",
    "ConfigError", "GeometryError", "DegenerateChannelError",
]

"""Virtual-angle (beamspace) transforms and beam-squint metrics.

The normalized DFT maps on-grid plane waves to single bins, so the drift of
the per-subcarrier peak bin across the band is a direct, discrete measure of
how far the apparent direction squints with frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import ChannelTensor, OfdmGrid, macro_steering
from .scenario import Scenario


def dft_matrix(size: int) -> np.ndarray:
    """Unitary DFT matrix with (a, b) entry exp(-2j*pi*a*b/size)/sqrt(size).

    The negative sign matches the steering-vector phase convention, so a
    steering vector whose normalized spatial frequency sits on the bin grid
    transforms to a single nonzero bin.
    """
    if int(size) != size or size < 1:
        raise ValueError("DFT size must be a positive integer")
    size = int(size)
    grid = np.arange(size)
    return np.exp(-2j * np.pi * np.outer(grid, grid) / size) / np.sqrt(size)


@dataclass(frozen=True)
class VirtualAngleSpectrum:
    """Magnitude spectra over virtual-angle bins, one row per subcarrier."""

    magnitudes: np.ndarray          # (P, bins), nonnegative
    frequencies_hz: np.ndarray      # (P,) baseband offsets

    def __post_init__(self):
        if self.magnitudes.ndim != 2 or self.magnitudes.shape[0] != self.frequencies_hz.shape[0]:
            raise ValueError("spectrum must be (num_subcarriers, num_bins)")
        if np.any(self.magnitudes < 0):
            raise ValueError("spectrum magnitudes must be nonnegative")

    @property
    def num_bins(self) -> int:
        return self.magnitudes.shape[1]


@dataclass(frozen=True)
class SquintReport:
    """Peak bin per subcarrier and the circular bin excursion between the two
    band edges. ``doas_rad`` optionally carries the true path directions for
    reference alongside the measured drift."""

    peak_per_subcarrier: np.ndarray  # (P,) int
    excursion_bins: int
    num_bins: int
    doas_rad: Optional[np.ndarray] = None


def virtual_angle_transform(tensor: ChannelTensor, ap_index: int) -> VirtualAngleSpectrum:
    """Per-subcarrier antenna-domain spectrum of one AP: size-M unitary DFT
    applied along the antenna axis. Energy per subcarrier equals the energy of
    the corresponding antenna slice (Parseval)."""
    num_aps = tensor.scenario.num_aps
    if not 0 <= ap_index < num_aps:
        raise IndexError(f"AP index {ap_index} out of range")
    dft = dft_matrix(tensor.scenario.array.num_antennas)
    # One matrix-vector product per subcarrier keeps each column's result
    # independent of its neighbors (batched GEMM rounds per column position).
    mags = np.empty((tensor.grid.num_subcarriers, dft.shape[0]))
    for p in range(tensor.grid.num_subcarriers):
        mags[p] = np.abs(dft @ tensor.entries[ap_index, :, p])
    return VirtualAngleSpectrum(
        magnitudes=mags,
        frequencies_hz=tensor.grid.subcarrier_frequencies_hz,
    )


def macro_virtual_transform(scenario: Scenario, grid: OfdmGrid, k: int) -> VirtualAngleSpectrum:
    """Per-subcarrier AP-domain spectrum: size-L unitary DFT of the inter-AP
    delay phase vector, normalized by sqrt(L) so each subcarrier carries unit
    energy regardless of the AP count."""
    num_aps = scenario.num_aps
    dft = dft_matrix(num_aps)
    mags = np.empty((grid.num_subcarriers, num_aps))
    for p, f in enumerate(grid.subcarrier_frequencies_hz):
        steer = macro_steering(scenario, k, f) / np.sqrt(num_aps)
        mags[p] = np.abs(dft @ steer)
    return VirtualAngleSpectrum(magnitudes=mags, frequencies_hz=grid.subcarrier_frequencies_hz)


def circular_bin_distance(a: int, b: int, size: int) -> int:
    """Shortest distance between two bin indices on a circle of ``size`` bins."""
    raw = abs(int(a) - int(b)) % size
    return min(raw, size - raw)


def squint_report(spectrum: VirtualAngleSpectrum,
                  doas_rad: Optional[np.ndarray] = None) -> SquintReport:
    """Locate the peak bin on every subcarrier and report the circular distance
    between the peaks at the lowest- and highest-frequency subcarriers."""
    if spectrum.magnitudes.size == 0:
        raise ValueError("spectrum is empty")
    peaks = np.argmax(spectrum.magnitudes, axis=1)
    bottom = int(np.argmin(spectrum.frequencies_hz))
    top = int(np.argmax(spectrum.frequencies_hz))
    excursion = circular_bin_distance(peaks[top], peaks[bottom], spectrum.num_bins)
    return SquintReport(
        peak_per_subcarrier=peaks.astype(int),
        excursion_bins=excursion,
        num_bins=spectrum.num_bins,
        doas_rad=None if doas_rad is None else np.asarray(doas_rad, dtype=float),
    )

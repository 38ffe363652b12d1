"""Spatial-time and spatial-frequency uplink channel responses.

Two independent routes produce the same numbers and are tested against each
other:

* :func:`spatial_frequency_response` evaluates the per-entry closed form
  directly (narrowband steering phase times the two frequency-dependent
  phase factors), one (AP, antenna, subcarrier) index at a time.
* :func:`assemble_channel` builds whole subcarrier slices from the structured
  pieces: the per-AP delay phasor vector (:func:`macro_steering`) scales the
  rows of the frequency-dependent array phase matrix
  (:func:`phase_shift_matrix`), summed over paths.

Both degenerate to the classical ULA steering response at zero frequency
offset; the frequency-dependent factors are what make the wide band squint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .scenario import ArrayConfig, PathSet, Scenario
from .util import SPEED_OF_LIGHT, unit_phasor

GRID_LAYOUTS = ("centered", "onesided")


@dataclass(frozen=True)
class OfdmGrid:
    """OFDM numerology: bandwidth, subcarrier count, and baseband offsets.

    ``centered`` places subcarrier p at (p - P/2) * spacing, ``onesided`` at
    p * spacing. Zero bandwidth is allowed and collapses every offset to 0
    (the narrowband reference grid).
    """

    bandwidth_hz: float
    num_subcarriers: int
    layout: str = "centered"
    subcarrier_spacing_hz: float = field(init=False)
    subcarrier_frequencies_hz: np.ndarray = field(init=False)

    def __post_init__(self):
        if int(self.num_subcarriers) != self.num_subcarriers or self.num_subcarriers < 1:
            raise ConfigError("ofdm.num_subcarriers must be a positive integer")
        if not (self.bandwidth_hz >= 0) or not np.isfinite(self.bandwidth_hz):
            raise ConfigError("ofdm.bandwidth_hz must be nonnegative and finite")
        if self.layout not in GRID_LAYOUTS:
            raise ConfigError(f"ofdm.grid must be one of {GRID_LAYOUTS}")
        p = int(self.num_subcarriers)
        eta = self.bandwidth_hz / p
        idx = np.arange(p, dtype=float)
        if self.layout == "centered":
            freqs = (idx - p / 2.0) * eta
        else:
            freqs = idx * eta
        object.__setattr__(self, "num_subcarriers", p)
        object.__setattr__(self, "subcarrier_spacing_hz", eta)
        object.__setattr__(self, "subcarrier_frequencies_hz", freqs)


@dataclass(frozen=True)
class ChannelTensor:
    """Complex frequency responses of one UE, indexed (AP, antenna, subcarrier)."""

    entries: np.ndarray  # (L, M, P) complex128
    grid: OfdmGrid
    scenario: Scenario
    ue: int

    def __post_init__(self):
        expected = (self.scenario.num_aps, self.scenario.array.num_antennas,
                    self.grid.num_subcarriers)
        if self.entries.shape != expected:
            raise ValueError(f"channel tensor must have shape {expected}, "
                             f"got {self.entries.shape}")
        if not np.all(np.isfinite(self.entries.view(float))):
            raise ValueError("channel tensor entries must be finite")

    def vectorized(self, subcarrier: int) -> np.ndarray:
        """AP-major flattening (index l*M + m) of one subcarrier slice."""
        return self.entries[:, :, subcarrier].reshape(-1)


def spatial_time_tap_gains(paths: PathSet, k: int, l: int, m: int):
    """Impulse-response taps seen by antenna m of AP l from UE k.

    Returns N (delay_seconds, complex_gain) pairs; the gain is the
    distance-rotated path gain times the narrowband per-element steering
    phasor. Equivalently, raw gain times exp(-2j*pi*carrier*delay).
    """
    sc = paths.scenario
    _check_indices(sc, k=k, l=l, m=m)
    arr = sc.array
    d = sc.distances_m[k, l]
    taps = []
    for n in range(sc.num_paths):
        theta = paths.doas_rad[k, l, n]
        delay = d / SPEED_OF_LIGHT + m * arr.antenna_spacing_m * np.sin(theta) / SPEED_OF_LIGHT
        gain = paths.gains[k, l, n] * unit_phasor(
            m * arr.antenna_spacing_m * np.sin(theta) / arr.wavelength_m
        )
        taps.append((float(delay), complex(gain)))
    return taps


def spatial_frequency_response(paths: PathSet, grid: OfdmGrid,
                               k: int, l: int, m: int, p: int) -> complex:
    """Frequency response at one (AP, antenna, subcarrier) index, as the direct
    sum over paths of steering phase x inter-AP delay phase x aperture delay
    phase."""
    sc = paths.scenario
    _check_indices(sc, k=k, l=l, m=m)
    if not 0 <= p < grid.num_subcarriers:
        raise IndexError(f"subcarrier index {p} out of range")
    arr = sc.array
    f = grid.subcarrier_frequencies_hz[p]
    d = sc.distances_m[k, l]
    aperture = m * arr.antenna_spacing_m * np.sin(paths.doas_rad[k, l])  # (N,)
    terms = (paths.gains[k, l]
             * unit_phasor(aperture / arr.wavelength_m)
             * unit_phasor(f * d / SPEED_OF_LIGHT)
             * unit_phasor(f * aperture / SPEED_OF_LIGHT))
    return complex(terms.sum())


def macro_steering(scenario: Scenario, k: int, frequency_hz: float) -> np.ndarray:
    """Inter-AP delay phase vector at one frequency offset: entry l is
    exp(-2j*pi*f*d_kl/c). Length L, every entry unit modulus."""
    if not np.isfinite(frequency_hz):
        raise ValueError("frequency must be finite")
    _check_indices(scenario, k=k)
    return unit_phasor(frequency_hz * scenario.distances_m[k] / SPEED_OF_LIGHT)


def phase_shift_matrix(paths: PathSet, array: ArrayConfig, k: int, n: int,
                       frequency_hz: float) -> np.ndarray:
    """Frequency-dependent array phase matrix for one path index.

    (l, m) entry: exp(-2j*pi*(carrier + f)*m*spacing*sin(doa_kl)/c). At f=0
    this is the classical narrowband steering phase; away from f=0 the
    effective wavelength shifts with the subcarrier, which is the squint.
    Shape (L, M), every entry unit modulus.
    """
    sc = paths.scenario
    _check_indices(sc, k=k)
    if not 0 <= n < sc.num_paths:
        raise IndexError(f"path index {n} out of range")
    m_idx = np.arange(array.num_antennas)
    sin_doa = np.sin(paths.doas_rad[k, :, n])  # (L,)
    cycles = ((array.carrier_frequency_hz + frequency_hz) / SPEED_OF_LIGHT
              * array.antenna_spacing_m * np.outer(sin_doa, m_idx))
    return unit_phasor(cycles)


def response_at(paths: PathSet, k: int, frequency_hz: float) -> np.ndarray:
    """(L, M) response slice at one frequency offset, built from the structured
    pieces: sum over paths of diag(gains * macro_steering) @ phase_shift_matrix."""
    sc = paths.scenario
    steer = macro_steering(sc, k, frequency_hz)
    out = np.zeros((sc.num_aps, sc.array.num_antennas), dtype=np.complex128)
    for n in range(sc.num_paths):
        theta_n = phase_shift_matrix(paths, sc.array, k, n, frequency_hz)
        out += (paths.gains[k, :, n] * steer)[:, None] * theta_n
    return out


def assemble_channel(paths: PathSet, grid: OfdmGrid, k: int) -> ChannelTensor:
    """Build the full (L, M, P) channel tensor of UE k, one subcarrier slice at
    a time via :func:`response_at`. Entrywise equal to
    :func:`spatial_frequency_response` by construction of the algebra, which
    the test suite checks at 1e-10 relative tolerance."""
    sc = paths.scenario
    _check_indices(sc, k=k)
    entries = np.empty(
        (sc.num_aps, sc.array.num_antennas, grid.num_subcarriers), dtype=np.complex128
    )
    for p, f in enumerate(grid.subcarrier_frequencies_hz):
        entries[:, :, p] = response_at(paths, k, f)
    return ChannelTensor(entries=entries, grid=grid, scenario=sc, ue=k)


def _check_indices(scenario: Scenario, k=None, l=None, m=None):
    if k is not None and not 0 <= k < scenario.num_ues:
        raise IndexError(f"UE index {k} out of range")
    if l is not None and not 0 <= l < scenario.num_aps:
        raise IndexError(f"AP index {l} out of range")
    if m is not None and not 0 <= m < scenario.array.num_antennas:
        raise IndexError(f"antenna index {m} out of range")

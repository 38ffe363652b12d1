"""Deployment geometry, array configuration, and stochastic path generation.

All randomness in the package flows through :func:`generate_paths`, which
derives one counter-based substream per (UE, AP) pair from a single master
seed (see :func:`cfsquint.util.substream`). Within a pair the draw order is
fixed: first the 2N Gaussian components of the path gains, then the N uniform
directions of arrival.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, GeometryError
from .util import PATH_STREAM, SPEED_OF_LIGHT, substream, unit_phasor

# Log-distance pathloss defaults; the exponent is the UMi street-canyon NLOS
# value. Both are overridable per call and per config file.
DEFAULT_PATHLOSS_EXPONENT = 3.19
DEFAULT_PATHLOSS_REF_M = 1.0


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array: element count, spacing, and carrier."""

    num_antennas: int
    antenna_spacing_m: float
    carrier_frequency_hz: float
    wavelength_m: float = field(init=False)

    def __post_init__(self):
        if int(self.num_antennas) != self.num_antennas or self.num_antennas < 1:
            raise ConfigError("array.num_antennas must be a positive integer")
        if not (self.antenna_spacing_m > 0) or not np.isfinite(self.antenna_spacing_m):
            raise ConfigError("array.antenna_spacing_m must be positive and finite")
        if not (self.carrier_frequency_hz > 0) or not np.isfinite(self.carrier_frequency_hz):
            raise ConfigError("array.carrier_frequency_hz must be positive and finite")
        object.__setattr__(self, "num_antennas", int(self.num_antennas))
        object.__setattr__(self, "wavelength_m", SPEED_OF_LIGHT / self.carrier_frequency_hz)

    @classmethod
    def from_spacing_in_wavelengths(cls, num_antennas, carrier_frequency_hz,
                                    spacing_wavelengths=0.5) -> "ArrayConfig":
        if not (spacing_wavelengths > 0):
            raise ConfigError("array.spacing_wavelengths must be positive")
        wavelength = SPEED_OF_LIGHT / carrier_frequency_hz
        return cls(num_antennas, spacing_wavelengths * wavelength, carrier_frequency_hz)


@dataclass(frozen=True)
class Scenario:
    """Static deployment: AP/UE planar positions plus the shared array config."""

    ap_positions: np.ndarray  # (L, 2) meters
    ue_positions: np.ndarray  # (K, 2) meters
    array: ArrayConfig
    num_paths: int
    distances_m: np.ndarray = field(init=False)  # (K, L)

    def __post_init__(self):
        aps = np.atleast_2d(np.asarray(self.ap_positions, dtype=float))
        ues = np.atleast_2d(np.asarray(self.ue_positions, dtype=float))
        if aps.ndim != 2 or aps.shape[1] != 2 or aps.shape[0] < 1:
            raise ConfigError("aps.positions must be a non-empty list of [x, y] pairs")
        if ues.ndim != 2 or ues.shape[1] != 2 or ues.shape[0] < 1:
            raise ConfigError("ues.positions must be a non-empty list of [x, y] pairs")
        if not np.all(np.isfinite(aps)):
            raise ConfigError("aps.positions must be finite")
        if not np.all(np.isfinite(ues)):
            raise ConfigError("ues.positions must be finite")
        if int(self.num_paths) != self.num_paths or self.num_paths < 1:
            raise ConfigError("paths.count must be a positive integer")
        d = np.linalg.norm(ues[:, None, :] - aps[None, :, :], axis=2)
        if np.any(d <= 0.0):
            k, l = map(int, np.argwhere(d <= 0.0)[0])
            raise GeometryError(f"UE {k} is coincident with AP {l}; distances must be positive")
        object.__setattr__(self, "ap_positions", aps)
        object.__setattr__(self, "ue_positions", ues)
        object.__setattr__(self, "num_paths", int(self.num_paths))
        object.__setattr__(self, "distances_m", d)

    @property
    def num_aps(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def num_ues(self) -> int:
        return self.ue_positions.shape[0]


@dataclass(frozen=True)
class PathSet:
    """Per (UE, AP) multipath state: raw gains, DoAs, and distance-rotated gains.

    ``gains`` carries the raw gain rotated by the carrier phase of the UE-AP
    distance, exp(-2j*pi*d/wavelength); the rotation is unit modulus, so
    ``abs(gains) == abs(raw_gains)`` entry for entry.
    """

    scenario: Scenario
    raw_gains: np.ndarray  # (K, L, N) complex
    doas_rad: np.ndarray   # (K, L, N) in [-pi/2, pi/2]
    gains: np.ndarray      # (K, L, N) complex, distance-rotated

    def __post_init__(self):
        shape = (self.scenario.num_ues, self.scenario.num_aps, self.scenario.num_paths)
        for name in ("raw_gains", "doas_rad", "gains"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"PathSet.{name} must have shape {shape}, got {arr.shape}")
        if np.any(np.abs(self.doas_rad) > np.pi / 2):
            raise ValueError("DoAs must lie in [-pi/2, pi/2]")
        if not np.allclose(np.abs(self.gains), np.abs(self.raw_gains), rtol=1e-12, atol=0):
            raise ValueError("distance rotation must preserve gain magnitudes")


def pathloss(distance_m, exponent: float = DEFAULT_PATHLOSS_EXPONENT,
             reference_m: float = DEFAULT_PATHLOSS_REF_M):
    """Log-distance power pathloss (d/d_ref)^(-exponent)."""
    return (np.asarray(distance_m, dtype=float) / reference_m) ** (-exponent)


def compute_delay(distance_m: float, antenna_index: int, spacing_m: float, doa_rad: float):
    """Arrival delay at one array element: distance term plus the per-element
    aperture term, d/c + m*spacing*sin(doa)/c."""
    if not np.all(np.asarray(distance_m) > 0):
        raise ValueError("distance must be positive")
    if np.any(np.asarray(antenna_index) < 0):
        raise ValueError("antenna index must be nonnegative")
    return distance_m / SPEED_OF_LIGHT + (
        antenna_index * spacing_m * np.sin(doa_rad) / SPEED_OF_LIGHT
    )


def generate_paths(scenario: Scenario, seed: int, power_profile: Sequence[float],
                   pathloss_exponent: float = DEFAULT_PATHLOSS_EXPONENT,
                   pathloss_ref_m: float = DEFAULT_PATHLOSS_REF_M) -> PathSet:
    """Draw a PathSet: Rayleigh gains with per-path variance
    pathloss(d) * power_profile[n], and DoAs uniform on [-pi/2, pi/2).

    The same (scenario, seed, power_profile) always yields the bit-identical
    PathSet regardless of how many pairs exist or in what order they are
    visited; each (k, l) pair owns Philox counter block k*L + l.
    """
    profile = np.asarray(power_profile, dtype=float)
    if profile.ndim != 1 or profile.size != scenario.num_paths:
        raise ConfigError(
            f"paths.power_profile must have paths.count={scenario.num_paths} entries"
        )
    if np.any(profile < 0) or not np.all(np.isfinite(profile)):
        raise ConfigError("paths.power_profile entries must be nonnegative and finite")
    if not (profile.sum() > 0):
        raise ConfigError("paths.power_profile must sum to a positive value")

    num_ues, num_aps, n = scenario.num_ues, scenario.num_aps, scenario.num_paths
    raw = np.empty((num_ues, num_aps, n), dtype=np.complex128)
    doas = np.empty((num_ues, num_aps, n), dtype=float)
    for k in range(num_ues):
        for l in range(num_aps):
            rng = substream(seed, PATH_STREAM, k * num_aps + l)
            var = pathloss(scenario.distances_m[k, l], pathloss_exponent, pathloss_ref_m) * profile
            re_im = rng.standard_normal((n, 2))
            raw[k, l] = np.sqrt(var / 2.0) * (re_im[:, 0] + 1j * re_im[:, 1])
            doas[k, l] = rng.uniform(-np.pi / 2, np.pi / 2, n)

    rotation = unit_phasor(scenario.distances_m / scenario.array.wavelength_m)
    gains = raw * rotation[:, :, None]
    return PathSet(scenario=scenario, raw_gains=raw, doas_rad=doas, gains=gains)


def uniform_power_profile(num_paths: int) -> np.ndarray:
    """Equal weights summing to one; the default when a config omits the profile."""
    return np.full(num_paths, 1.0 / num_paths)


def exponential_power_profile(num_paths: int, decay: float) -> np.ndarray:
    """Exponentially decaying weights exp(-decay*n), normalized to sum to one."""
    if decay < 0:
        raise ConfigError("paths.profile_decay must be nonnegative")
    w = np.exp(-decay * np.arange(num_paths))
    return w / w.sum()


def _require(config: Mapping, section: str, key: str):
    try:
        sec = config[section]
    except (KeyError, TypeError):
        raise ConfigError(f"missing config section [{section}]") from None
    try:
        return sec[key]
    except (KeyError, TypeError):
        raise ConfigError(f"missing config key {section}.{key}") from None


def build_scenario(config: Mapping) -> Scenario:
    """Validate a parsed config mapping and construct the Scenario.

    Expected keys: aps.positions, ues.positions, array.num_antennas,
    array.spacing_wavelengths, array.carrier_frequency_hz, paths.count.
    Deterministic; raises ConfigError naming the offending field, or
    GeometryError for coincident UE/AP positions.
    """
    ap_positions = _require(config, "aps", "positions")
    ue_positions = _require(config, "ues", "positions")
    num_antennas = _require(config, "array", "num_antennas")
    spacing_wl = _require(config, "array", "spacing_wavelengths")
    carrier_hz = _require(config, "array", "carrier_frequency_hz")
    num_paths = _require(config, "paths", "count")

    for field_name, positions in (("aps.positions", ap_positions),
                                  ("ues.positions", ue_positions)):
        try:
            arr = np.asarray(positions, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(f"{field_name} must be a list of [x, y] pairs") from None
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise ConfigError(f"{field_name} must be a non-empty list of [x, y] pairs")

    array = ArrayConfig.from_spacing_in_wavelengths(num_antennas, carrier_hz, spacing_wl)
    return Scenario(
        ap_positions=np.asarray(ap_positions, dtype=float),
        ue_positions=np.asarray(ue_positions, dtype=float),
        array=array,
        num_paths=num_paths,
    )


def read_config(path) -> dict:
    """Parse a TOML scenario file into a plain dict (no validation here)."""
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"scenario file is not valid TOML: {exc}") from None


def power_profile_from_config(config: Mapping) -> np.ndarray:
    """paths.power_profile if present, else the uniform default."""
    paths = config.get("paths", {})
    count = int(_require(config, "paths", "count"))
    profile = paths.get("power_profile")
    if profile is None:
        return uniform_power_profile(count)
    arr = np.asarray(profile, dtype=float)
    if arr.ndim != 1:
        raise ConfigError("paths.power_profile must be a flat list of numbers")
    return arr

"""Shared fixture builders for the test suite."""

import numpy as np
import pytest

from cfsquint import ArrayConfig, PathSet, Scenario


def make_scenario(ap_positions, ue_positions, num_antennas=4, num_paths=1,
                  carrier_hz=28e9, spacing_wavelengths=0.5):
    array = ArrayConfig.from_spacing_in_wavelengths(num_antennas, carrier_hz,
                                                    spacing_wavelengths)
    return Scenario(np.asarray(ap_positions, float), np.asarray(ue_positions, float),
                    array, num_paths)


def fixed_path_set(scenario, doas, raw_gains=None):
    """PathSet with hand-picked DoAs/gains instead of random draws.

    doas: array broadcastable to (K, L, N). raw_gains defaults to all ones.
    """
    shape = (scenario.num_ues, scenario.num_aps, scenario.num_paths)
    doas = np.broadcast_to(np.asarray(doas, float), shape).copy()
    if raw_gains is None:
        raw = np.ones(shape, dtype=complex)
    else:
        raw = np.broadcast_to(np.asarray(raw_gains, complex), shape).copy()
    cycles = scenario.distances_m / scenario.array.wavelength_m
    rotation = np.exp(-2j * np.pi * np.mod(cycles, 1.0))
    return PathSet(scenario=scenario, raw_gains=raw, doas_rad=doas,
                   gains=raw * rotation[:, :, None])


def random_scenario(rng, max_aps=4, max_antennas=8, max_paths=4, area_m=200.0,
                    num_ues=1, carrier_hz=28e9):
    """Random deployment for property loops; rejects coincident draws."""
    from cfsquint import GeometryError
    while True:
        num_aps = int(rng.integers(1, max_aps + 1))
        num_ant = int(rng.integers(1, max_antennas + 1))
        num_paths = int(rng.integers(1, max_paths + 1))
        aps = rng.uniform(0.0, area_m, (num_aps, 2))
        ues = rng.uniform(0.0, area_m, (num_ues, 2))
        try:
            return make_scenario(aps, ues, num_antennas=num_ant, num_paths=num_paths,
                                 carrier_hz=carrier_hz)
        except GeometryError:
            continue


@pytest.fixture
def two_ap_scenario():
    return make_scenario([[0.0, 0.0], [100.0, 0.0]], [[40.0, 10.0]],
                         num_antennas=4, num_paths=2)

"""Monte-Carlo estimation of the spatial correlation matrix and its
decomposition into per-AP (micro) blocks and an aggregated inter-AP (macro)
matrix.

The stacked channel vector is AP-major: entry l*M + m is antenna m of AP l,
so the L diagonal M x M blocks of the full matrix are exactly the
within-one-AP correlations and everything off those blocks is cross-AP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .channel import OfdmGrid, response_at
from .errors import ConfigError, DegenerateChannelError
from .scenario import (Scenario, generate_paths, uniform_power_profile,
                       DEFAULT_PATHLOSS_EXPONENT, DEFAULT_PATHLOSS_REF_M)
from .util import TRIAL_STREAM, substream

FrequencySelector = Union[int, str]
BAND_AVERAGE = "band-average"


@dataclass(frozen=True)
class CorrelationReport:
    """Sample correlation of the stacked channel vector plus its micro/macro
    decomposition. The full matrix is Hermitian-symmetrized and positive
    semidefinite up to sampling roundoff."""

    matrix: np.ndarray        # (L*M, L*M) complex
    micro_blocks: np.ndarray  # (L, M, M), the diagonal blocks
    macro_matrix: np.ndarray  # (L, L), normalized block traces
    num_trials: int
    frequency_selector: FrequencySelector
    seed: int
    redraw_doas: bool

    def __post_init__(self):
        lm = self.matrix.shape[0]
        num_aps, m = self.micro_blocks.shape[0], self.micro_blocks.shape[1]
        if self.matrix.shape != (lm, lm) or num_aps * m != lm:
            raise ValueError("correlation matrix and micro blocks disagree on dimensions")
        herm_gap = np.max(np.abs(self.matrix - self.matrix.conj().T))
        scale = max(np.max(np.abs(self.matrix)), np.finfo(float).tiny)
        if herm_gap > 1e-10 * scale:
            raise ValueError("correlation matrix is not Hermitian")
        trace = float(np.trace(self.matrix).real)
        min_eig = float(np.linalg.eigvalsh(self.matrix)[0])
        if min_eig < -1e-8 * trace / lm:
            raise ValueError("correlation matrix is not positive semidefinite")


def macro_aggregate(matrix: np.ndarray, num_antennas: int) -> np.ndarray:
    """Collapse an (L*M, L*M) matrix to (L, L): each entry is the trace of the
    corresponding M x M block divided by M."""
    lm = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape != (lm, lm) or lm % num_antennas != 0:
        raise ValueError(f"matrix must be square with side a multiple of {num_antennas}")
    num_aps = lm // num_antennas
    blocks = matrix.reshape(num_aps, num_antennas, num_aps, num_antennas)
    return np.einsum("lmtm->lt", blocks) / num_antennas


def micro_blocks_of(matrix: np.ndarray, num_antennas: int) -> np.ndarray:
    """The L diagonal M x M blocks of an (L*M, L*M) matrix, stacked (L, M, M)."""
    lm = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape != (lm, lm) or lm % num_antennas != 0:
        raise ValueError(f"matrix must be square with side a multiple of {num_antennas}")
    num_aps = lm // num_antennas
    blocks = matrix.reshape(num_aps, num_antennas, num_aps, num_antennas)
    return np.ascontiguousarray(np.einsum("lmln->lmn", blocks))


def estimate_correlation(scenario: Scenario, grid: OfdmGrid, k: int,
                         num_trials: int, seed: int,
                         frequency_selector: FrequencySelector = BAND_AVERAGE,
                         power_profile: Optional[Sequence[float]] = None,
                         redraw_doas: bool = True,
                         pathloss_exponent: float = DEFAULT_PATHLOSS_EXPONENT,
                         pathloss_ref_m: float = DEFAULT_PATHLOSS_REF_M) -> CorrelationReport:
    """Sample mean of h h^H over independent path-set redraws for UE k.

    ``frequency_selector`` is either a subcarrier index (the correlation at
    that single frequency) or "band-average" (mean over all subcarriers).
    Gains are redrawn every trial; directions of arrival are redrawn too
    unless ``redraw_doas`` is False, in which case the trial-0 directions are
    held fixed so only the gain statistics vary. The result is bit-identical
    for identical arguments: trial seeds are drawn in one batch from a
    counter-based substream of ``seed``.
    """
    if num_trials < 2:
        raise ConfigError("correlation.num_trials must be at least 2")
    if isinstance(frequency_selector, str):
        if frequency_selector != BAND_AVERAGE:
            raise ConfigError(
                f"frequency selector must be a subcarrier index or '{BAND_AVERAGE}'"
            )
    elif not 0 <= int(frequency_selector) < grid.num_subcarriers:
        raise ConfigError(f"frequency selector {frequency_selector} out of range")
    if power_profile is None:
        power_profile = uniform_power_profile(scenario.num_paths)

    if isinstance(frequency_selector, str):
        freqs = grid.subcarrier_frequencies_hz
    else:
        freqs = grid.subcarrier_frequencies_hz[[int(frequency_selector)]]

    trial_seeds = substream(seed, TRIAL_STREAM, 0).integers(
        0, 2 ** 63, size=num_trials, dtype=np.uint64
    )
    base_doas = None
    lm = scenario.num_aps * scenario.array.num_antennas
    accum = np.zeros((lm, lm), dtype=np.complex128)
    for t in range(num_trials):
        draw = generate_paths(scenario, int(trial_seeds[t]), power_profile,
                              pathloss_exponent, pathloss_ref_m)
        if not redraw_doas:
            if base_doas is None:
                base_doas = draw.doas_rad
            else:
                draw = type(draw)(scenario=scenario, raw_gains=draw.raw_gains,
                                  doas_rad=base_doas, gains=draw.gains)
        for f in freqs:
            h = response_at(draw, k, f).reshape(-1)
            accum += np.outer(h, h.conj())
    accum /= num_trials * len(freqs)
    matrix = (accum + accum.conj().T) / 2.0

    m = scenario.array.num_antennas
    return CorrelationReport(
        matrix=matrix,
        micro_blocks=micro_blocks_of(matrix, m),
        macro_matrix=macro_aggregate(matrix, m),
        num_trials=int(num_trials),
        frequency_selector=frequency_selector,
        seed=int(seed),
        redraw_doas=bool(redraw_doas),
    )


def correlation_coefficient_map(report: CorrelationReport) -> np.ndarray:
    """Normalized correlation magnitudes |R_ab| / sqrt(R_aa * R_bb); the
    diagonal is exactly one. Raises if any channel entry carries no power."""
    diag = np.real(np.diag(report.matrix))
    if np.any(diag <= 0):
        raise DegenerateChannelError("correlation matrix has a nonpositive diagonal entry")
    scale = np.sqrt(diag)
    coeff = np.abs(report.matrix) / np.outer(scale, scale)
    np.fill_diagonal(coeff, 1.0)
    return coeff

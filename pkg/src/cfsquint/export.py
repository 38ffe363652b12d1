"""Artifact writers: CSV, JSON-style records, and the packed binary tensor.

Every float is serialized with 17 significant digits so artifacts round-trip
exactly and reruns are byte-comparable. Files are written with '\\n' newlines
regardless of platform for the same reason.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Iterable, Sequence

import numpy as np

from .beamsquint import SquintReport, VirtualAngleSpectrum
from .channel import ChannelTensor
from .correlation import CorrelationReport
from .ofdm import CpReport

BINARY_MAGIC = b"CFW"
BINARY_VERSION = 1
# Header layout: 3-byte magic, u8 version, then L, M, P as little-endian u32.
_HEADER = struct.Struct("<3sBIII")


def fmt(value) -> str:
    """17-significant-digit decimal form of a float (round-trip exact)."""
    return format(float(value), ".17g")


def _open_text(path):
    return open(path, "w", encoding="utf-8", newline="\n")


def write_channel_csv(path, tensors: Sequence[ChannelTensor]) -> None:
    """Rows (ue, ap, antenna, subcarrier, freq_offset_hz, re, im) for one or
    more per-UE channel tensors."""
    with _open_text(path) as fh:
        fh.write("ue,ap,antenna,subcarrier,freq_offset_hz,re,im\n")
        for tensor in tensors:
            freqs = tensor.grid.subcarrier_frequencies_hz
            num_aps, num_ant, num_sub = tensor.entries.shape
            for l in range(num_aps):
                for m in range(num_ant):
                    for p in range(num_sub):
                        value = tensor.entries[l, m, p]
                        fh.write(f"{tensor.ue},{l},{m},{p},{fmt(freqs[p])},"
                                 f"{fmt(value.real)},{fmt(value.imag)}\n")


def write_channel_binary(path, tensor: ChannelTensor) -> None:
    """Packed per-UE tensor: 16-byte header (magic, version, L, M, P) then
    little-endian float64 re/im pairs in (ap, antenna, subcarrier) C order."""
    num_aps, num_ant, num_sub = tensor.entries.shape
    payload = np.empty((num_aps * num_ant * num_sub, 2), dtype="<f8")
    flat = tensor.entries.reshape(-1)
    payload[:, 0] = flat.real
    payload[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, BINARY_VERSION, num_aps, num_ant, num_sub))
        fh.write(payload.tobytes())


def read_channel_binary(path):
    """Inverse of :func:`write_channel_binary`; returns the (L, M, P) array."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, version, num_aps, num_ant, num_sub = _HEADER.unpack(header)
        if magic != BINARY_MAGIC:
            raise ValueError(f"bad magic {magic!r} in {path}")
        if version != BINARY_VERSION:
            raise ValueError(f"unsupported binary version {version}")
        payload = np.frombuffer(fh.read(), dtype="<f8").reshape(-1, 2)
    entries = payload[:, 0] + 1j * payload[:, 1]
    return entries.reshape(num_aps, num_ant, num_sub)


def write_spectrum_csv(path, spectrum: VirtualAngleSpectrum) -> None:
    """Rows (subcarrier, bin, magnitude)."""
    with _open_text(path) as fh:
        fh.write("subcarrier,bin,magnitude\n")
        for p in range(spectrum.magnitudes.shape[0]):
            for b in range(spectrum.num_bins):
                fh.write(f"{p},{b},{fmt(spectrum.magnitudes[p, b])}\n")


def write_squint_json(path, report: SquintReport) -> None:
    peaks = ",".join(str(int(v)) for v in report.peak_per_subcarrier)
    text = ('{"peak_per_subcarrier": [' + peaks + '], '
            f'"excursion_bins": {int(report.excursion_bins)}}}')
    with _open_text(path) as fh:
        fh.write(text + "\n")


def write_cp_json(path, report: CpReport) -> None:
    rows = ", ".join(
        f'{{"ap": {int(ap)}, "distance_m": {fmt(d)}, "tau_p_samples": {fmt(tau)}}}'
        for ap, d, tau in zip(report.ap_order, report.distances_m, report.tau_p_samples)
    )
    text = (f'{{"cp_min_approx_samples": {fmt(report.cp_min_samples)}, '
            f'"cp_min_exact_samples": {fmt(report.cp_min_exact_samples)}, '
            f'"w_hz": {fmt(report.bandwidth_hz)}, '
            f'"per_ap": [{rows}]}}')
    with _open_text(path) as fh:
        fh.write(text + "\n")


def write_isi_csv(path, rows: Iterable[tuple]) -> None:
    """Rows (cp_len, evm) of a CP sweep."""
    with _open_text(path) as fh:
        fh.write("cp_len,evm\n")
        for cp_len, evm in rows:
            fh.write(f"{int(cp_len)},{fmt(evm)}\n")


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    """Rows (row, col, re, im) of a complex (or real) matrix."""
    matrix = np.asarray(matrix)
    with _open_text(path) as fh:
        fh.write("row,col,re,im\n")
        for r in range(matrix.shape[0]):
            for c in range(matrix.shape[1]):
                value = complex(matrix[r, c])
                fh.write(f"{r},{c},{fmt(value.real)},{fmt(value.imag)}\n")


def write_correlation_sidecar(path, report: CorrelationReport) -> None:
    selector = report.frequency_selector
    selector_text = f'"{selector}"' if isinstance(selector, str) else str(int(selector))
    text = (f'{{"trials": {report.num_trials}, "seed": {report.seed}, '
            f'"frequency_selector": {selector_text}}}')
    with _open_text(path) as fh:
        fh.write(text + "\n")


def sha256_of_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()

"""Artifact writers: formats, round trips, and byte-level layout."""

import hashlib
import json
import struct

import numpy as np
import pytest

import cfsquint as cf
from cfsquint import export
from conftest import fixed_path_set, make_scenario


@pytest.fixture
def small_tensor():
    sc = make_scenario([[0.0, 0.0], [50.0, 0.0]], [[20.0, 10.0]],
                       num_antennas=2, num_paths=1)
    ps = fixed_path_set(sc, 0.4, raw_gains=0.5 + 0.25j)
    return cf.assemble_channel(ps, cf.OfdmGrid(400e6, 4), 0)


class TestFloatFormat:
    def test_seventeen_digit_round_trip(self):
        for value in (1 / 3, 1e-300, 12345.6789, 2.0 ** -52, 299792458.0):
            assert float(export.fmt(value)) == value

    def test_integral_values_stay_compact(self):
        assert export.fmt(400e6) == "400000000"


class TestChannelCsv:
    def test_layout_and_round_trip(self, tmp_path, small_tensor):
        path = tmp_path / "channel.csv"
        export.write_channel_csv(path, [small_tensor])
        lines = path.read_text().splitlines()
        assert lines[0] == "ue,ap,antenna,subcarrier,freq_offset_hz,re,im"
        assert len(lines) == 1 + 2 * 2 * 4
        ue, ap, ant, sub, freq, re, im = lines[1].split(",")
        assert (ue, ap, ant, sub) == ("0", "0", "0", "0")
        assert float(freq) == small_tensor.grid.subcarrier_frequencies_hz[0]
        assert complex(float(re), float(im)) == small_tensor.entries[0, 0, 0]

    def test_multiple_ues_share_one_file(self, tmp_path, small_tensor):
        path = tmp_path / "channel.csv"
        other = cf.ChannelTensor(entries=small_tensor.entries,
                                 grid=small_tensor.grid,
                                 scenario=small_tensor.scenario, ue=1)
        export.write_channel_csv(path, [small_tensor, other])
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 2 * (2 * 2 * 4)
        assert lines[1 + 16].startswith("1,0,0,0,")


class TestChannelBinary:
    def test_header_is_sixteen_bytes(self, tmp_path, small_tensor):
        path = tmp_path / "channel.bin"
        export.write_channel_binary(path, small_tensor)
        blob = path.read_bytes()
        magic, version, num_aps, num_ant, num_sub = struct.unpack("<3sBIII", blob[:16])
        assert magic == b"CFW" and version == 1
        assert (num_aps, num_ant, num_sub) == (2, 2, 4)
        assert len(blob) == 16 + 2 * 2 * 4 * 16  # 16 bytes per complex entry

    def test_round_trip_is_exact(self, tmp_path, small_tensor):
        path = tmp_path / "channel.bin"
        export.write_channel_binary(path, small_tensor)
        got = export.read_channel_binary(path)
        assert np.array_equal(got, small_tensor.entries)

    def test_rejects_foreign_files(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"XYZ" + bytes(13))
        with pytest.raises(ValueError, match="magic"):
            export.read_channel_binary(path)


class TestRecordWriters:
    def test_spectrum_csv(self, tmp_path):
        spectrum = cf.VirtualAngleSpectrum(
            magnitudes=np.array([[0.5, 1.5], [2.5, 0.25]]),
            frequencies_hz=np.array([-1e6, 1e6]))
        path = tmp_path / "spec.csv"
        export.write_spectrum_csv(path, spectrum)
        lines = path.read_text().splitlines()
        assert lines[0] == "subcarrier,bin,magnitude"
        assert lines[1] == "0,0,0.5"
        assert lines[4] == "1,1,0.25"

    def test_squint_json(self, tmp_path):
        report = cf.SquintReport(peak_per_subcarrier=np.array([3, 3, 5]),
                                 excursion_bins=2, num_bins=8)
        path = tmp_path / "squint.json"
        export.write_squint_json(path, report)
        record = json.loads(path.read_text())
        assert record == {"peak_per_subcarrier": [3, 3, 5], "excursion_bins": 2}

    def test_cp_json(self, tmp_path):
        sc = make_scenario([[0.0, 0.0], [330.0, 0.0]], [[150.0, 0.0]], num_paths=1)
        ps = fixed_path_set(sc, 0.0)
        report = cf.min_cp(sc, ps, cf.OfdmGrid(400e6, 64), 0)
        path = tmp_path / "cp.json"
        export.write_cp_json(path, report)
        record = json.loads(path.read_text())
        assert record["cp_min_approx_samples"] == report.cp_min_samples
        assert record["cp_min_exact_samples"] == report.cp_min_exact_samples
        assert record["w_hz"] == 400e6
        assert [row["ap"] for row in record["per_ap"]] == [0, 1]
        assert record["per_ap"][0]["distance_m"] == 150.0

    def test_isi_csv(self, tmp_path):
        path = tmp_path / "isi.csv"
        export.write_isi_csv(path, [(0, 0.25), (16, 1e-15)])
        lines = path.read_text().splitlines()
        assert lines == ["cp_len,evm", "0,0.25", "16,1.0000000000000001e-15"]
        assert float(lines[2].split(",")[1]) == 1e-15

    def test_matrix_csv(self, tmp_path):
        matrix = np.array([[1.0 + 2.0j, 0.0], [0.5 - 1.0j, 3.0]])
        path = tmp_path / "matrix.csv"
        export.write_matrix_csv(path, matrix)
        lines = path.read_text().splitlines()
        assert lines[0] == "row,col,re,im"
        assert lines[1] == "0,0,1,2"
        assert lines[3] == "1,0,0.5,-1"

    def test_correlation_sidecar(self, tmp_path):
        sc = make_scenario([[0.0, 0.0]], [[40.0, 0.0]], num_antennas=1, num_paths=1)
        report = cf.estimate_correlation(sc, cf.OfdmGrid(400e6, 4), 0, 10, 5,
                                         frequency_selector=cf.BAND_AVERAGE)
        path = tmp_path / "sidecar.json"
        export.write_correlation_sidecar(path, report)
        record = json.loads(path.read_text())
        assert record == {"trials": 10, "seed": 5,
                          "frequency_selector": "band-average"}


class TestChecksums:
    def test_sha256_matches_hashlib(self, tmp_path):
        path = tmp_path / "blob.bin"
        path.write_bytes(b"squint" * 1000)
        assert export.sha256_of_file(path) == hashlib.sha256(b"squint" * 1000).hexdigest()

"""Monte-Carlo correlation estimates and the micro/macro decomposition."""

import numpy as np
import pytest

import cfsquint as cf
from cfsquint import ConfigError, DegenerateChannelError
from conftest import make_scenario

C = 299792458.0


def report_from_matrix(matrix, num_antennas=1):
    matrix = np.asarray(matrix, dtype=complex)
    return cf.CorrelationReport(
        matrix=matrix,
        micro_blocks=cf.micro_blocks_of(matrix, num_antennas),
        macro_matrix=cf.macro_aggregate(matrix, num_antennas),
        num_trials=2, frequency_selector=0, seed=0, redraw_doas=True)


class TestEstimateCorrelation:
    def test_scalar_channel_converges_to_pathloss(self):
        sc = make_scenario([[0.0, 0.0]], [[300.0, 0.0]], num_antennas=1, num_paths=1)
        grid = cf.OfdmGrid(400e6, 4)
        trials = 4000
        report = cf.estimate_correlation(sc, grid, 0, trials, 123,
                                         frequency_selector=2)
        expected = cf.pathloss(300.0)
        got = float(report.matrix[0, 0].real)
        assert got == pytest.approx(expected, rel=3 / np.sqrt(trials))

    def test_independent_aps_have_vanishing_macro_cross_terms(self):
        sc = make_scenario([[0.0, 0.0], [10.0, 0.0]], [[5.0, 40.0]],
                           num_antennas=1, num_paths=1)
        grid = cf.OfdmGrid(400e6, 4)
        trials = 2500
        report = cf.estimate_correlation(sc, grid, 0, trials, 7,
                                         frequency_selector=0)
        coeff = np.abs(report.matrix[0, 1]) / np.sqrt(
            report.matrix[0, 0].real * report.matrix[1, 1].real)
        assert coeff < 5 / np.sqrt(trials)

    def test_trace_matches_power_accounting(self):
        profile = np.array([0.5, 0.3])
        sc = make_scenario([[0.0, 0.0], [60.0, 10.0]], [[30.0, 30.0]],
                           num_antennas=3, num_paths=2)
        grid = cf.OfdmGrid(400e6, 8)
        trials = 3000
        report = cf.estimate_correlation(sc, grid, 0, trials, 99,
                                         frequency_selector=4,
                                         power_profile=profile)
        expected = float(np.sum(cf.pathloss(sc.distances_m[0]))
                         * sc.array.num_antennas * profile.sum())
        got = float(np.trace(report.matrix).real)
        assert got == pytest.approx(expected, rel=3 / np.sqrt(trials))

    def test_hermitian_and_psd(self, two_ap_scenario):
        grid = cf.OfdmGrid(400e6, 4)
        report = cf.estimate_correlation(two_ap_scenario, grid, 0, 200, 1,
                                         frequency_selector=cf.BAND_AVERAGE)
        np.testing.assert_allclose(report.matrix, report.matrix.conj().T, atol=0)
        eigs = np.linalg.eigvalsh(report.matrix)
        lm = report.matrix.shape[0]
        assert eigs[0] >= -1e-8 * np.trace(report.matrix).real / lm

    def test_micro_blocks_are_diagonal_blocks(self, two_ap_scenario):
        grid = cf.OfdmGrid(400e6, 4)
        report = cf.estimate_correlation(two_ap_scenario, grid, 0, 100, 3,
                                         frequency_selector=0)
        m = two_ap_scenario.array.num_antennas
        for l in range(2):
            block = report.matrix[l * m:(l + 1) * m, l * m:(l + 1) * m]
            np.testing.assert_array_equal(report.micro_blocks[l], block)

    def test_macro_diagonal_matches_per_ap_power(self):
        # diag(macro)[l] is the mean per-antenna power of AP l, which for this
        # model is pathloss(d_l) * sum(profile) in expectation.
        profile = np.array([0.7, 0.3])
        sc = make_scenario([[0.0, 0.0], [40.0, 0.0]], [[20.0, 15.0]],
                           num_antennas=2, num_paths=2)
        grid = cf.OfdmGrid(400e6, 4)
        trials = 3000
        report = cf.estimate_correlation(sc, grid, 0, trials, 13,
                                         frequency_selector=1,
                                         power_profile=profile)
        expected = cf.pathloss(sc.distances_m[0]) * profile.sum()
        np.testing.assert_allclose(np.diag(report.macro_matrix).real, expected,
                                   rtol=4 / np.sqrt(trials))

    def test_bit_identical_for_same_arguments(self, two_ap_scenario):
        grid = cf.OfdmGrid(400e6, 4)
        a = cf.estimate_correlation(two_ap_scenario, grid, 0, 50, 77,
                                    frequency_selector=cf.BAND_AVERAGE)
        b = cf.estimate_correlation(two_ap_scenario, grid, 0, 50, 77,
                                    frequency_selector=cf.BAND_AVERAGE)
        assert np.array_equal(a.matrix, b.matrix)

    def test_band_edges_differ_under_fixed_doas(self):
        sc = make_scenario([[0.0, 0.0], [80.0, 0.0]], [[30.0, 30.0]],
                           num_antennas=4, num_paths=2)
        grid = cf.OfdmGrid(400e6, 8)
        kwargs = dict(num_trials=300, seed=5, redraw_doas=False)
        bottom = cf.estimate_correlation(sc, grid, 0, frequency_selector=0, **kwargs)
        top = cf.estimate_correlation(sc, grid, 0, frequency_selector=7, **kwargs)
        dist = (np.linalg.norm(bottom.matrix - top.matrix)
                / np.linalg.norm(bottom.matrix))
        assert dist > 1e-4

    def test_band_edges_agree_at_zero_bandwidth(self):
        sc = make_scenario([[0.0, 0.0], [80.0, 0.0]], [[30.0, 30.0]],
                           num_antennas=4, num_paths=2)
        grid = cf.OfdmGrid(0.0, 8)
        kwargs = dict(num_trials=300, seed=5, redraw_doas=False)
        bottom = cf.estimate_correlation(sc, grid, 0, frequency_selector=0, **kwargs)
        top = cf.estimate_correlation(sc, grid, 0, frequency_selector=7, **kwargs)
        dist = (np.linalg.norm(bottom.matrix - top.matrix)
                / np.linalg.norm(bottom.matrix))
        assert dist < 1e-10

    def test_zero_bandwidth_band_average_equals_single_subcarrier(self, two_ap_scenario):
        grid = cf.OfdmGrid(0.0, 4)
        avg = cf.estimate_correlation(two_ap_scenario, grid, 0, 60, 2,
                                      frequency_selector=cf.BAND_AVERAGE)
        one = cf.estimate_correlation(two_ap_scenario, grid, 0, 60, 2,
                                      frequency_selector=0)
        np.testing.assert_allclose(avg.matrix, one.matrix, rtol=1e-12, atol=1e-300)

    def test_rejects_bad_arguments(self, two_ap_scenario):
        grid = cf.OfdmGrid(400e6, 4)
        with pytest.raises(ConfigError):
            cf.estimate_correlation(two_ap_scenario, grid, 0, 1, 0)
        with pytest.raises(ConfigError):
            cf.estimate_correlation(two_ap_scenario, grid, 0, 10, 0,
                                    frequency_selector="median")
        with pytest.raises(ConfigError):
            cf.estimate_correlation(two_ap_scenario, grid, 0, 10, 0,
                                    frequency_selector=4)


class TestMacroAggregate:
    def test_identity_maps_to_identity(self):
        got = cf.macro_aggregate(np.eye(6, dtype=complex), 3)
        np.testing.assert_allclose(got, np.eye(2))

    def test_block_diagonal_maps_to_diagonal(self):
        matrix = np.zeros((4, 4), dtype=complex)
        matrix[:2, :2] = [[2.0, 1.0j], [-1.0j, 4.0]]
        matrix[2:, 2:] = [[1.0, 0.0], [0.0, 3.0]]
        got = cf.macro_aggregate(matrix, 2)
        np.testing.assert_allclose(got, np.diag([3.0, 2.0]))

    def test_matches_block_trace_oracle(self):
        rng = np.random.default_rng(71)
        num_aps, num_ant = 3, 4
        lm = num_aps * num_ant
        half = rng.standard_normal((lm, lm)) + 1j * rng.standard_normal((lm, lm))
        matrix = half @ half.conj().T  # Hermitian PSD
        got = cf.macro_aggregate(matrix, num_ant)
        for l in range(num_aps):
            for t in range(num_aps):
                block = matrix[l * num_ant:(l + 1) * num_ant,
                               t * num_ant:(t + 1) * num_ant]
                assert got[l, t] == pytest.approx(np.trace(block) / num_ant, rel=1e-12)
        np.testing.assert_allclose(got, got.conj().T, atol=1e-12)
        assert np.all(np.diag(got).real >= 0)

    def test_rejects_mismatched_dimensions(self):
        with pytest.raises(ValueError):
            cf.macro_aggregate(np.eye(5, dtype=complex), 2)
        with pytest.raises(ValueError):
            cf.micro_blocks_of(np.eye(5, dtype=complex), 2)


class TestCoefficientMap:
    def test_diagonal_is_exactly_one(self, two_ap_scenario):
        grid = cf.OfdmGrid(400e6, 4)
        report = cf.estimate_correlation(two_ap_scenario, grid, 0, 100, 21,
                                         frequency_selector=0)
        coeff = cf.correlation_coefficient_map(report)
        np.testing.assert_array_equal(np.diag(coeff), 1.0)
        assert np.all(coeff <= 1.0 + 1e-9)

    def test_fully_coherent_pair(self):
        report = report_from_matrix([[1.0, 1.0], [1.0, 1.0]])
        coeff = cf.correlation_coefficient_map(report)
        np.testing.assert_allclose(coeff, 1.0)

    def test_independent_entries_decay_with_trials(self):
        sc = make_scenario([[0.0, 0.0], [10.0, 0.0]], [[5.0, 40.0]],
                           num_antennas=1, num_paths=1)
        grid = cf.OfdmGrid(400e6, 4)
        trials = 2500
        report = cf.estimate_correlation(sc, grid, 0, trials, 3,
                                         frequency_selector=0)
        coeff = cf.correlation_coefficient_map(report)
        assert coeff[0, 1] < 5 / np.sqrt(trials)

    def test_degenerate_channel_rejected(self):
        report = report_from_matrix([[0.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DegenerateChannelError):
            cf.correlation_coefficient_map(report)

"""Batch front end: run named experiments from a scenario file and write CSV,
JSON, and binary artifacts plus a manifest with checksums.

Exit status: 0 on success, 2 for a missing or invalid configuration (the
diagnostic names the offending field), 3 for an I/O failure while writing
artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

from . import __version__
from .beamsquint import macro_virtual_transform, squint_report, virtual_angle_transform
from .channel import OfdmGrid, assemble_channel
from .correlation import BAND_AVERAGE, estimate_correlation, correlation_coefficient_map
from .errors import ConfigError, GeometryError
from .export import (sha256_of_file, write_channel_binary, write_channel_csv,
                     write_correlation_sidecar, write_cp_json, write_isi_csv,
                     write_matrix_csv, write_spectrum_csv, write_squint_json)
from .ofdm import min_cp, simulate_isi
from .scenario import (DEFAULT_PATHLOSS_EXPONENT, DEFAULT_PATHLOSS_REF_M,
                       ArrayConfig, Scenario, build_scenario, generate_paths,
                       power_profile_from_config, read_config)

EXPERIMENTS = ("channel", "squint", "cp", "isi-sweep", "correlation")
SWEEP_PARAMS = ("bandwidth_hz", "num_antennas", "num_aps")

DEFAULT_BANDWIDTH_HZ = 400e6
DEFAULT_NUM_SUBCARRIERS = 256
DEFAULT_CP_LENGTHS = (0, 8, 16, 32, 48)
DEFAULT_ISI_SYMBOLS = 4
DEFAULT_CORRELATION_TRIALS = 2000


@dataclass(frozen=True)
class ExperimentSpec:
    """One CLI invocation: which experiment, on which scenario, where to."""

    experiment: str
    scenario_path: Path
    out_dir: Path
    seed_override: Optional[int] = None
    sweep: Optional[Tuple[str, Tuple[float, ...]]] = None
    frequency_selector: Union[int, str] = BAND_AVERAGE

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"choose one of {', '.join(EXPERIMENTS)}")
        if self.sweep is not None:
            param, values = self.sweep
            if param not in SWEEP_PARAMS:
                raise ConfigError(f"sweep parameter must be one of {', '.join(SWEEP_PARAMS)}")
            if len(values) == 0:
                raise ConfigError("sweep needs at least one value")
            if any(v <= 0 for v in values):
                raise ConfigError("sweep values must be positive")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError("sweep values must be strictly increasing")


def _parse_sweep(text: str) -> Tuple[str, Tuple[float, ...]]:
    if "=" not in text:
        raise ConfigError("--sweep expects <param>=<v1,v2,...>")
    param, _, rest = text.partition("=")
    try:
        values = tuple(float(v) for v in rest.split(","))
    except ValueError:
        raise ConfigError(f"sweep values for {param} must be numbers") from None
    return param, values


def _parse_frequency(text: str):
    if text == "avg":
        return BAND_AVERAGE
    try:
        return int(text)
    except ValueError:
        raise ConfigError("--frequency expects a subcarrier index or 'avg'") from None


def _grid_from_config(config, bandwidth_override=None) -> OfdmGrid:
    section = config.get("ofdm", {})
    bandwidth = section.get("bandwidth_hz", DEFAULT_BANDWIDTH_HZ)
    if bandwidth_override is not None:
        bandwidth = bandwidth_override
    return OfdmGrid(
        bandwidth_hz=float(bandwidth),
        num_subcarriers=int(section.get("num_subcarriers", DEFAULT_NUM_SUBCARRIERS)),
        layout=section.get("grid", "centered"),
    )


def _apply_sweep_value(config, scenario: Scenario, param: str, value: float) -> Scenario:
    if param == "num_antennas":
        if value != int(value):
            raise ConfigError("sweep values for num_antennas must be integers")
        spacing_wl = config["array"]["spacing_wavelengths"]
        array = ArrayConfig.from_spacing_in_wavelengths(
            int(value), scenario.array.carrier_frequency_hz, spacing_wl)
        return Scenario(scenario.ap_positions, scenario.ue_positions, array,
                        scenario.num_paths)
    if param == "num_aps":
        if value != int(value):
            raise ConfigError("sweep values for num_aps must be integers")
        count = int(value)
        if count > scenario.num_aps:
            raise ConfigError(f"sweep value num_aps={count} exceeds the "
                              f"{scenario.num_aps} configured AP positions")
        return Scenario(scenario.ap_positions[:count], scenario.ue_positions,
                        scenario.array, scenario.num_paths)
    return scenario  # bandwidth_hz is applied to the grid, not the scenario


def _point_label(param: str, value: float) -> str:
    text = str(int(value)) if value == int(value) else format(value, ".17g")
    return f"sweep_{param}_{text}"


def _run_point(spec: ExperimentSpec, config, scenario, grid, seed, out_dir: Path):
    """Run one experiment instance into out_dir; returns relative artifact paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    profile = power_profile_from_config(config)
    paths_cfg = config.get("paths", {})
    pl_exp = paths_cfg.get("pathloss_exponent", DEFAULT_PATHLOSS_EXPONENT)
    pl_ref = paths_cfg.get("pathloss_ref_m", DEFAULT_PATHLOSS_REF_M)
    paths = generate_paths(scenario, seed, profile, pl_exp, pl_ref)
    artifacts = []

    def emit(name, writer, *args):
        writer(out_dir / name, *args)
        artifacts.append(out_dir / name)

    if spec.experiment == "channel":
        tensors = [assemble_channel(paths, grid, k) for k in range(scenario.num_ues)]
        emit("channel.csv", write_channel_csv, tensors)
        for k, tensor in enumerate(tensors):
            emit(f"channel_ue{k}.bin", write_channel_binary, tensor)

    elif spec.experiment == "squint":
        for k in range(scenario.num_ues):
            tensor = assemble_channel(paths, grid, k)
            for l in range(scenario.num_aps):
                spectrum = virtual_angle_transform(tensor, l)
                report = squint_report(spectrum, doas_rad=paths.doas_rad[k, l])
                emit(f"squint_ue{k}_ap{l}.csv", write_spectrum_csv, spectrum)
                emit(f"squint_ue{k}_ap{l}.json", write_squint_json, report)
            macro = macro_virtual_transform(scenario, grid, k)
            emit(f"squint_macro_ue{k}.csv", write_spectrum_csv, macro)
            emit(f"squint_macro_ue{k}.json", write_squint_json, squint_report(macro))

    elif spec.experiment == "cp":
        for k in range(scenario.num_ues):
            emit(f"cp_ue{k}.json", write_cp_json, min_cp(scenario, paths, grid, k))

    elif spec.experiment == "isi-sweep":
        isi_cfg = config.get("isi", {})
        cp_lengths = [int(v) for v in isi_cfg.get("cp_lengths", DEFAULT_CP_LENGTHS)]
        num_symbols = int(isi_cfg.get("num_symbols", DEFAULT_ISI_SYMBOLS))
        for k in range(scenario.num_ues):
            rows = [(cp, simulate_isi(paths, grid, k, cp, num_symbols, seed))
                    for cp in cp_lengths]
            emit(f"isi_sweep_ue{k}.csv", write_isi_csv, rows)

    elif spec.experiment == "correlation":
        corr_cfg = config.get("correlation", {})
        num_trials = int(corr_cfg.get("num_trials", DEFAULT_CORRELATION_TRIALS))
        redraw = bool(corr_cfg.get("redraw_doas", True))
        for k in range(scenario.num_ues):
            report = estimate_correlation(
                scenario, grid, k, num_trials, seed, spec.frequency_selector,
                power_profile=profile, redraw_doas=redraw,
                pathloss_exponent=pl_exp, pathloss_ref_m=pl_ref)
            emit(f"correlation_ue{k}.csv", write_matrix_csv, report.matrix)
            emit(f"correlation_macro_ue{k}.csv", write_matrix_csv, report.macro_matrix)
            emit(f"correlation_coeff_ue{k}.csv", write_matrix_csv,
                 correlation_coefficient_map(report))
            emit(f"correlation_ue{k}.json", write_correlation_sidecar, report)

    return artifacts


def run_experiment(spec: ExperimentSpec) -> int:
    """Execute one experiment spec end to end, manifest included."""
    try:
        config = read_config(spec.scenario_path)
        scenario = build_scenario(config)
        seed = spec.seed_override
        if seed is None:
            seed = int(config.get("paths", {}).get("seed", 0))
        points = [(None, None)] if spec.sweep is None else [
            (spec.sweep[0], v) for v in spec.sweep[1]
        ]
        plan = []
        for param, value in points:
            point_scenario = scenario
            bandwidth_override = None
            point_dir = spec.out_dir
            if param is not None:
                if param == "bandwidth_hz":
                    bandwidth_override = value
                else:
                    point_scenario = _apply_sweep_value(config, scenario, param, value)
                point_dir = spec.out_dir / _point_label(param, value)
            grid = _grid_from_config(config, bandwidth_override)
            plan.append((point_scenario, grid, point_dir))
    except (ConfigError, GeometryError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        artifacts = []
        for point_scenario, grid, point_dir in plan:
            artifacts.extend(_run_point(spec, config, point_scenario, grid, seed, point_dir))
        manifest = {
            "tool_version": __version__,
            "scenario_checksum": sha256_of_file(spec.scenario_path),
            "seed": seed,
            "experiment": spec.experiment,
            "artifacts": [
                {"path": path.relative_to(spec.out_dir).as_posix(),
                 "sha256": sha256_of_file(path)}
                for path in artifacts
            ],
        }
        spec.out_dir.mkdir(parents=True, exist_ok=True)
        with open(spec.out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfsquint",
        description="Wideband cell-free channel experiments: build channels, "
                    "measure beam squint, bound the cyclic prefix, and "
                    "estimate spatial correlation.",
    )
    parser.add_argument("--scenario", required=True, type=Path,
                        help="scenario TOML file")
    parser.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    parser.add_argument("--out", required=True, type=Path, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario's paths.seed")
    parser.add_argument("--sweep", type=str, default=None,
                        metavar="PARAM=V1,V2,...",
                        help=f"sweep one of {', '.join(SWEEP_PARAMS)}")
    parser.add_argument("--frequency", type=str, default="avg",
                        metavar="SUBCARRIER|avg",
                        help="correlation frequency selector")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = ExperimentSpec(
            experiment=args.experiment,
            scenario_path=args.scenario,
            out_dir=args.out,
            seed_override=args.seed,
            sweep=None if args.sweep is None else _parse_sweep(args.sweep),
            frequency_selector=_parse_frequency(args.frequency),
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run_experiment(spec)


if __name__ == "__main__":
    sys.exit(main())

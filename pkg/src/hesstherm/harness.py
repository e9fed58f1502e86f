"""Scenario orchestration: single runs, parameter sweeps, calibration.

A scenario couples a scene file with an operating point (battery C-rate
and, when the scene contains a fuel cell, the PEM terminal voltage) and
simulation controls.  Reports carry per-entity temperature series in
degrees C plus the hotspot and the energy audit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import export
from .electrochem import (BatterySourceParams, PemSourceParams,
                          battery_heat_rate, c_rate_to_current,
                          pem_heat_rate, pem_operating_point)
from .scene import AIR_ID, SceneSpec, VoxelGrid, parse_scene, tag_boundaries, voxelize
from .solver import (SimConfig, SolverError, SourceField, TransientResult,
                     run_transient)

KELVIN_OFFSET = 273.15


class ConfigError(ValueError):
    """Inconsistent scenario configuration."""


class CalibrationError(RuntimeError):
    """Calibration target unreachable or response not monotone."""


@dataclass
class ScenarioConfig:
    scene: Path
    label: str
    c_rate: float = 0.0
    pem_voltage: float | None = None
    sim: SimConfig = None
    spacing: float | None = None
    battery_params: BatterySourceParams = None
    pem_params: PemSourceParams = None

    def __post_init__(self):
        self.scene = Path(self.scene)
        if self.sim is None:
            self.sim = SimConfig()
        if self.battery_params is None:
            self.battery_params = BatterySourceParams()
        if self.pem_params is None:
            self.pem_params = PemSourceParams()
        if self.c_rate < 0:
            raise ConfigError("c_rate must be >= 0")


@dataclass
class ScenarioReport:
    label: str
    entities: list[str]
    times: np.ndarray          # s
    mean_c: np.ndarray         # (n_samples, n_entities), degrees C
    max_c: np.ndarray
    min_c: np.ndarray
    hotspot_entity: str
    hotspot_voxel: tuple[int, int, int]
    hotspot_c: float
    audit: object
    c_rate: float
    pem_voltage: float | None
    duration: float
    spacing: float
    battery_params: BatterySourceParams

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("report time series must be strictly increasing")
        if np.any(self.min_c - 1e-12 > self.mean_c) or np.any(self.mean_c > self.max_c + 1e-12):
            raise ConfigError("report requires min <= mean <= max at every sample")

    def entity_index(self, label: str) -> int:
        return self.entities.index(label)

    def final_mean_c(self, label: str) -> float:
        return float(self.mean_c[-1, self.entity_index(label)])

    def series(self, label: str) -> np.ndarray:
        return self.mean_c[:, self.entity_index(label)]


@dataclass
class DeltaReport:
    """Per-cell temperature differences (K) between a paired and solo run."""

    c_rate: float
    at_time: float
    deltas: dict[str, float]


class ElectrochemSources:
    """Per-step power model: entity mean temperatures -> entity powers."""

    def __init__(self, spec: SceneSpec, battery_params: BatterySourceParams,
                 pem_params: PemSourceParams, c_rate: float,
                 pem_voltage: float | None):
        self.battery = [i for i, s in enumerate(spec.shapes) if s.source == "battery"]
        self.pem = [i for i, s in enumerate(spec.shapes) if s.source == "pem"]
        self.bp = battery_params
        self.pp = pem_params
        self.current = c_rate_to_current(c_rate, battery_params.nominal_capacity)
        self.pem_voltage = pem_voltage
        self.n_entities = len(spec.shapes)

    def __call__(self, means_k: np.ndarray) -> np.ndarray:
        powers = np.zeros(self.n_entities)
        for e in self.battery:
            powers[e] = battery_heat_rate(self.current, float(means_k[e]), self.bp)
        for e in self.pem:
            i = pem_operating_point(self.pem_voltage, float(means_k[e]), self.pp)
            powers[e] = pem_heat_rate(self.pem_voltage, i, self.pp)
        return powers


def build_sources(grid: VoxelGrid, spec: SceneSpec,
                  pem_params: PemSourceParams) -> SourceField:
    """Uniform per-entity weights, except the PEM split.

    The stack's cathode side is the positive half along its shortest box
    extent; it receives pem_params.cathode_fraction of the stack power,
    the anode side the rest (each side uniform).
    """
    sf = SourceField.uniform(grid)
    for eid, shape in enumerate(spec.shapes):
        if shape.source != "pem" or shape.kind != "box":
            continue
        axis = int(np.argmin(shape.extents))
        center = shape.min_corner[axis] + shape.extents[axis] / 2.0
        nx = grid.dims[axis]
        coords1d = grid.origin[axis] + (np.arange(nx) + 0.5) * grid.spacing
        shape_nd = [1, 1, 1]
        shape_nd[axis] = nx
        coord = np.broadcast_to(coords1d.reshape(shape_nd), grid.dims)
        mask = grid.entity_id == eid
        cath = mask & (coord >= center)
        anod = mask & ~cath
        n_c, n_a = int(np.count_nonzero(cath)), int(np.count_nonzero(anod))
        if n_c == 0 or n_a == 0:
            continue
        frac = pem_params.cathode_fraction
        sf.weights[cath] = frac / n_c
        sf.weights[anod] = (1.0 - frac) / n_a
    return sf


def _prepare(cfg: ScenarioConfig):
    spec = parse_scene(cfg.scene.read_text())
    has_pem = any(s.source == "pem" for s in spec.shapes)
    if has_pem and cfg.pem_voltage is None:
        raise ConfigError(f"scene {cfg.scene.name} contains a fuel cell; "
                          "pem_voltage is required")
    if not has_pem and cfg.pem_voltage is not None:
        raise ConfigError(f"scene {cfg.scene.name} has no fuel cell; "
                          "pem_voltage must be absent")
    spacing = cfg.spacing if cfg.spacing is not None else spec.spacing
    grid = voxelize(spec, spacing)
    grid.temperature[:] = cfg.sim.ambient_temperature
    boundaries = tag_boundaries(spec, grid, cfg.sim.convective_h,
                                cfg.sim.ambient_temperature)
    sources = build_sources(grid, spec, cfg.pem_params)
    model = ElectrochemSources(spec, cfg.battery_params, cfg.pem_params,
                               cfg.c_rate, cfg.pem_voltage)
    return spec, grid, boundaries, sources, model


def _to_report(cfg: ScenarioConfig, grid: VoxelGrid,
               result: TransientResult) -> ScenarioReport:
    return ScenarioReport(
        label=cfg.label,
        entities=result.entity_labels,
        times=result.times,
        mean_c=result.mean_k - KELVIN_OFFSET,
        max_c=result.max_k - KELVIN_OFFSET,
        min_c=result.min_k - KELVIN_OFFSET,
        hotspot_entity=result.hotspot_entity,
        hotspot_voxel=result.hotspot_voxel,
        hotspot_c=result.hotspot_k - KELVIN_OFFSET,
        audit=result.audit,
        c_rate=cfg.c_rate,
        pem_voltage=cfg.pem_voltage,
        duration=cfg.sim.duration,
        spacing=grid.spacing,
        battery_params=cfg.battery_params,
    )


def run_scenario(cfg: ScenarioConfig, out_dir: Path | None = None,
                 dump_fields: bool = False) -> ScenarioReport:
    """Full pipeline: parse, voxelize, tag, run, report (and write files)."""
    spec, grid, boundaries, sources, model = _prepare(cfg)

    on_record = None
    if out_dir is not None and dump_fields:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        counter = {"i": 0}

        def on_record(t_now, g):
            path = out_dir / f"{cfg.label}_rec{counter['i']:04d}.vtk"
            export.write_field_dump(g, path)
            counter["i"] += 1

    result = run_transient(grid, boundaries, sources, cfg.sim,
                           power_model=model, on_record=on_record)
    report = _to_report(cfg, grid, result)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        export.write_cell_csv(report, out_dir / f"{cfg.label}.csv")
    return report


def sweep(scene: Path, c_rates: list[float], voltages: list[float | None],
          sim: SimConfig, out_dir: Path | None = None,
          battery_params: BatterySourceParams | None = None,
          pem_params: PemSourceParams | None = None,
          spacing: float | None = None) -> list[ScenarioReport]:
    """Cartesian grid of runs over voltages (outer) and C-rates (inner).

    Per-run CSVs and the combined CSV grow as runs complete, so a failed
    run leaves the finished results on disk before the error propagates.
    """
    if not c_rates or not voltages:
        raise ConfigError("sweep needs non-empty c_rates and voltages")
    scene = Path(scene)
    base = scene.stem
    reports = []
    combined = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        combined = (out_dir / f"{base}_sweep.csv").open("w", encoding="utf-8", newline="\n")
        combined.write("pem_voltage_v,c_rate,entity,mean_c,max_c,min_c\n")
    try:
        for v in voltages:
            for c in c_rates:
                label = f"{base}_{c:g}C" + (f"_{v:g}V" if v is not None else "")
                cfg = ScenarioConfig(
                    scene=scene, label=label, c_rate=c, pem_voltage=v,
                    sim=sim, spacing=spacing,
                    battery_params=battery_params, pem_params=pem_params)
                report = run_scenario(cfg, out_dir=out_dir)
                reports.append(report)
                if combined is not None:
                    for ent in sorted(report.entities):
                        j = report.entity_index(ent)
                        v_str = f"{v:g}" if v is not None else ""
                        combined.write(
                            f"{v_str},{c:g},{ent},{report.mean_c[-1, j]:.6f},"
                            f"{report.max_c[-1, j]:.6f},{report.min_c[-1, j]:.6f}\n")
                    combined.flush()
    finally:
        if combined is not None:
            combined.close()
    return reports


class _RiseExceeded(Exception):
    pass


def calibrate_resistance(target_delta_t: float, c_rate: float, at_time: float,
                         scene: Path, sim: SimConfig,
                         battery_params: BatterySourceParams | None = None,
                         bracket: tuple[float, float] = (1e-4, 1.0),
                         tolerance: float = 0.05,
                         max_iter: int = 60) -> float:
    """Bisect the reference resistance until the center cell's rise above
    ambient at at_time matches the target within the tolerance.

    The center cell is the battery entity nearest the scene's bounding-box
    center.  Each probe run stops early once the rise already exceeds
    target + tolerance (the rise grows monotonically in time for a heating
    run, so the sign of the comparison at at_time is decided).
    """
    if not target_delta_t > 0:
        raise ValueError("target_delta_t must be > 0")
    scene = Path(scene)
    spec = parse_scene(scene.read_text())
    bbox_center = np.mean(spec.bounding_box(), axis=0)
    battery_ids = [i for i, s in enumerate(spec.shapes) if s.source == "battery"]
    if not battery_ids:
        raise ConfigError(f"scene {scene.name} has no battery cells to calibrate")
    center_eid = min(
        battery_ids,
        key=lambda i: (float(np.sum((np.mean(spec.shapes[i].bounding_box(), axis=0)
                                     - bbox_center) ** 2)), i))
    center_label = spec.shapes[center_eid].id
    if battery_params is None:
        battery_params = BatterySourceParams()
    sim = replace(sim, duration=at_time)
    ambient_c = sim.ambient_temperature - KELVIN_OFFSET
    abort_above = target_delta_t + tolerance

    def rise_for(r_ref: float) -> float:
        bp = replace(battery_params, reference_resistance=r_ref)
        cfg = ScenarioConfig(scene=scene, label="calibrate", c_rate=c_rate,
                             sim=sim, battery_params=bp)
        spec_i, grid, boundaries, sources, model = _prepare(cfg)
        mask = grid.entity_id == center_eid

        def watch(t_now, g):
            if t_now > 0 and float(g.temperature[mask].mean()) - sim.ambient_temperature > abort_above:
                raise _RiseExceeded()

        try:
            result = run_transient(grid, boundaries, sources, sim,
                                   power_model=model, on_record=watch)
        except (_RiseExceeded, SolverError):
            return math.inf
        j = result.entity_labels.index(center_label)
        return float(result.mean_k[-1, j]) - sim.ambient_temperature

    lo, hi = bracket
    rise_lo = rise_for(lo)
    if abs(rise_lo - target_delta_t) <= tolerance:
        return lo
    if rise_lo > target_delta_t:
        raise CalibrationError(
            f"target {target_delta_t} K unreachable: rise at the lower bracket "
            f"{lo} ohm is already {rise_lo:.3f} K")
    rise_hi = rise_for(hi)
    if rise_hi < target_delta_t:
        raise CalibrationError(
            f"target {target_delta_t} K unreachable: rise at the upper bracket "
            f"{hi} ohm is only {rise_hi:.3f} K")

    for _ in range(max_iter):
        mid = (lo + hi) / 2.0
        rise_mid = rise_for(mid)
        if abs(rise_mid - target_delta_t) <= tolerance:
            return mid
        if rise_mid > target_delta_t:
            hi = mid
        else:
            lo = mid
    raise CalibrationError(
        f"calibration did not converge to +-{tolerance} K in {max_iter} "
        f"iterations (bracket [{lo:.6g}, {hi:.6g}] ohm)")


def delta_report(paired: ScenarioReport, solo: ScenarioReport) -> DeltaReport:
    """Per-cell final-time differences between a paired (device + pack) run
    and the matching solo-pack run."""
    if paired.c_rate != solo.c_rate:
        raise ConfigError(f"c_rate mismatch: {paired.c_rate} vs {solo.c_rate}")
    if paired.duration != solo.duration:
        raise ConfigError(f"duration mismatch: {paired.duration} vs {solo.duration}")
    if paired.spacing != solo.spacing:
        raise ConfigError(f"spacing mismatch: {paired.spacing} vs {solo.spacing}")
    if paired.battery_params != solo.battery_params:
        raise ConfigError("battery parameter mismatch")
    common = [e for e in paired.entities if e in solo.entities]
    if not common:
        raise ConfigError("no common entities between the two reports")
    deltas = {e: paired.final_mean_c(e) - solo.final_mean_c(e) for e in common}
    return DeltaReport(c_rate=paired.c_rate, at_time=float(paired.times[-1]),
                       deltas=deltas)


# --------------------------------------------------------------------------
# scenario files

def load_scenario(path: Path, label: str | None = None) -> ScenarioConfig:
    """Read a scenario JSON file (keys: scene, duration_s, record_interval_s,
    c_rate, pem_voltage_v, spacing_m, h_w_m2k, ambient_c, battery_params,
    pem_params)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario syntax error in {path} at line "
                          f"{exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    scene = Path(doc["scene"])
    if not scene.is_absolute():
        scene = path.parent / scene

    scene_doc = {}
    if scene.exists():
        try:
            scene_doc = json.loads(scene.read_text())
        except json.JSONDecodeError:
            pass
    ambient_c = doc.get("ambient_c", scene_doc.get("ambient_c", 25.0))

    sim = SimConfig(
        duration=float(doc.get("duration_s", 360.0)),
        record_interval=float(doc.get("record_interval_s", 30.0)),
        ambient_temperature=float(ambient_c) + KELVIN_OFFSET,
        convective_h=float(doc.get("h_w_m2k", 50.0)),
    )
    bp = BatterySourceParams(**doc.get("battery_params", {}))
    pp = PemSourceParams(**doc.get("pem_params", {}))
    return ScenarioConfig(
        scene=scene,
        label=label or path.stem,
        c_rate=float(doc.get("c_rate", 0.0)),
        pem_voltage=(float(doc["pem_voltage_v"])
                     if doc.get("pem_voltage_v") is not None else None),
        sim=sim,
        spacing=float(doc["spacing_m"]) if "spacing_m" in doc else None,
        battery_params=bp,
        pem_params=pp,
    )

import json

import numpy as np
import pytest

from conftest import box_shape, make_scene_text
from hesstherm.electrochem import (BatterySourceParams, OperatingPointError,
                                   PemSourceParams)
from hesstherm.harness import (CalibrationError, ConfigError, DeltaReport,
                               ElectrochemSources, ScenarioConfig,
                               build_sources, calibrate_resistance,
                               delta_report, load_scenario, run_scenario,
                               sweep)
from hesstherm.scene import parse_scene, voxelize
from hesstherm.solver import SimConfig

MATERIALS = {
    "cell": {"density": 2700.0, "specific_heat": 900.0, "conductivity": 3.0},
    "pem": {"density": 2000.0, "specific_heat": 1000.0, "conductivity": 20.0},
    "air": {"density": 1.2, "specific_heat": 1005.0, "conductivity": 0.026},
}


def small_pack_scene(with_pem: bool) -> str:
    shapes = [
        box_shape("cell1", (-0.024, -0.008, -0.008), (0.016, 0.016, 0.016),
                  material="cell", tag="convective", source="battery"),
        box_shape("cell2", (0.008, -0.008, -0.008), (0.016, 0.016, 0.016),
                  material="cell", tag="convective", source="battery"),
    ]
    if with_pem:
        shapes.append(box_shape("pem", (-0.02, 0.02, -0.012),
                                (0.04, 0.016, 0.024),
                                material="pem", tag="convective", source="pem"))
    return make_scene_text(shapes, materials=MATERIALS, margin_m=0.012,
                           spacing_m=0.004)


@pytest.fixture
def pack_scene(tmp_path):
    p = tmp_path / "pack.scene"
    p.write_text(small_pack_scene(with_pem=False))
    return p


@pytest.fixture
def pem_scene(tmp_path):
    p = tmp_path / "pair.scene"
    p.write_text(small_pack_scene(with_pem=True))
    return p


def short_sim(duration=4.0):
    return SimConfig(duration=duration, record_interval=2.0)


class TestRunScenario:
    def test_end_to_end(self, pack_scene, tmp_path):
        cfg = ScenarioConfig(scene=pack_scene, label="tiny", c_rate=4.0,
                             sim=short_sim())
        report = run_scenario(cfg, out_dir=tmp_path / "out")
        assert report.entities == ["cell1", "cell2"]
        assert (tmp_path / "out" / "tiny.csv").exists()
        assert report.final_mean_c("cell1") > 25.0
        assert report.audit.relative_residual < 1e-6

    def test_pem_voltage_required_with_pem(self, pem_scene):
        cfg = ScenarioConfig(scene=pem_scene, label="x", c_rate=4.0,
                             sim=short_sim())
        with pytest.raises(ConfigError, match="required"):
            run_scenario(cfg)

    def test_pem_voltage_forbidden_without_pem(self, pack_scene):
        cfg = ScenarioConfig(scene=pack_scene, label="x", c_rate=4.0,
                             pem_voltage=0.8, sim=short_sim())
        with pytest.raises(ConfigError, match="absent"):
            run_scenario(cfg)

    def test_zero_rate_no_pem_stays_at_ambient(self, pack_scene):
        cfg = ScenarioConfig(scene=pack_scene, label="flat", c_rate=0.0,
                             sim=short_sim())
        report = run_scenario(cfg)
        assert np.all(np.abs(report.mean_c - 25.0) < 1e-9)

    def test_dump_fields_leaves_results_unchanged(self, pem_scene, tmp_path):
        def cfg():
            return ScenarioConfig(scene=pem_scene, label="dmp", c_rate=2.0,
                                  pem_voltage=0.8, sim=short_sim())
        plain = run_scenario(cfg())
        dumped = run_scenario(cfg(), out_dir=tmp_path / "d", dump_fields=True)
        assert np.array_equal(plain.mean_c, dumped.mean_c)
        vtks = sorted((tmp_path / "d").glob("dmp_rec*.vtk"))
        assert len(vtks) == len(dumped.times)

    def test_paired_run_heats_cells_beyond_solo(self, pack_scene, pem_scene):
        bp = BatterySourceParams(reference_resistance=0.002)
        solo = run_scenario(ScenarioConfig(
            scene=pack_scene, label="solo", c_rate=4.0, sim=short_sim(8.0),
            battery_params=bp))
        paired = run_scenario(ScenarioConfig(
            scene=pem_scene, label="paired", c_rate=4.0, pem_voltage=0.4,
            sim=short_sim(8.0), battery_params=bp))
        for cell in ("cell1", "cell2"):
            assert paired.final_mean_c(cell) >= solo.final_mean_c(cell)


class TestSources:
    def test_pem_split_fractions(self, pem_scene):
        spec = parse_scene(pem_scene.read_text())
        grid = voxelize(spec, 0.004)
        pp = PemSourceParams()
        sf = build_sources(grid, spec, pp)
        pem_eid = [i for i, s in enumerate(spec.shapes) if s.id == "pem"][0]
        shape = spec.shapes[pem_eid]
        axis = int(np.argmin(shape.extents))
        assert axis == 1  # 16 mm is the shortest extent
        center = shape.min_corner[axis] + shape.extents[axis] / 2.0
        coords = grid.origin[1] + (np.arange(grid.dims[1]) + 0.5) * grid.spacing
        coord = np.broadcast_to(coords[None, :, None], grid.dims)
        mask = grid.entity_id == pem_eid
        cath = mask & (coord >= center)
        assert sf.weights[cath].sum() == pytest.approx(0.7, rel=1e-9)
        assert sf.weights[mask & ~cath].sum() == pytest.approx(0.3, rel=1e-9)

    def test_power_model_routes_entities(self, pem_scene):
        spec = parse_scene(pem_scene.read_text())
        bp = BatterySourceParams(reference_resistance=0.01)
        pp = PemSourceParams()
        model = ElectrochemSources(spec, bp, pp, c_rate=4.0, pem_voltage=0.8)
        powers = model(np.full(3, 298.15))
        assert powers[0] == powers[1] == pytest.approx(16.0 ** 2 * 0.01)
        assert powers[2] > 0

    def test_zero_c_rate_zero_battery_power(self, pem_scene):
        spec = parse_scene(pem_scene.read_text())
        model = ElectrochemSources(spec, BatterySourceParams(),
                                   PemSourceParams(), 0.0, 1.0)
        powers = model(np.full(3, 298.15))
        assert powers[0] == powers[1] == 0.0


class TestSweep:
    def test_grid_of_reports(self, pem_scene, tmp_path):
        reports = sweep(pem_scene, [2.0, 4.0], [1.0, 0.8], short_sim(),
                        out_dir=tmp_path)
        assert len(reports) == 4
        combined = tmp_path / "pair_sweep.csv"
        lines = combined.read_text().splitlines()
        assert lines[0] == "pem_voltage_v,c_rate,entity,mean_c,max_c,min_c"
        assert len(lines) == 1 + 4 * 3  # three entities per run

    def test_singleton_matches_run_scenario(self, pack_scene):
        reports = sweep(pack_scene, [4.0], [None], short_sim())
        direct = run_scenario(ScenarioConfig(
            scene=pack_scene, label="pack_4C", c_rate=4.0, sim=short_sim()))
        assert np.array_equal(reports[0].mean_c, direct.mean_c)

    def test_empty_lists_rejected(self, pack_scene):
        with pytest.raises(ConfigError):
            sweep(pack_scene, [], [None], short_sim())

    def test_failure_preserves_partial_results(self, pem_scene, tmp_path):
        # the second voltage sits above the equilibrium potential
        with pytest.raises(OperatingPointError):
            sweep(pem_scene, [4.0], [0.8, 1.5], short_sim(),
                  out_dir=tmp_path / "p")
        assert (tmp_path / "p" / "pair_4C_0.8V.csv").exists()
        assert not (tmp_path / "p" / "pair_4C_1.5V.csv").exists()


class TestDeltaReport:
    def _report(self, pack_scene, **overrides):
        kwargs = dict(scene=pack_scene, label="r", c_rate=4.0, sim=short_sim())
        kwargs.update(overrides)
        return run_scenario(ScenarioConfig(**kwargs))

    def test_identical_runs_zero_deltas(self, pack_scene):
        a = self._report(pack_scene)
        b = self._report(pack_scene)
        dr = delta_report(a, b)
        assert set(dr.deltas) == {"cell1", "cell2"}
        assert all(v == 0.0 for v in dr.deltas.values())

    def test_c_rate_mismatch_rejected(self, pack_scene):
        a = self._report(pack_scene)
        b = self._report(pack_scene, c_rate=6.0)
        with pytest.raises(ConfigError, match="c_rate"):
            delta_report(a, b)

    def test_duration_mismatch_rejected(self, pack_scene):
        a = self._report(pack_scene)
        b = self._report(pack_scene, sim=short_sim(duration=6.0))
        with pytest.raises(ConfigError, match="duration"):
            delta_report(a, b)

    def test_battery_params_mismatch_rejected(self, pack_scene):
        a = self._report(pack_scene)
        b = self._report(pack_scene,
                         battery_params=BatterySourceParams(
                             reference_resistance=0.05))
        with pytest.raises(ConfigError, match="battery"):
            delta_report(a, b)

    def test_positive_deltas_for_added_heat(self, pack_scene, pem_scene):
        solo = self._report(pack_scene, sim=short_sim(8.0))
        paired = run_scenario(ScenarioConfig(
            scene=pem_scene, label="p", c_rate=4.0, pem_voltage=0.4,
            sim=short_sim(8.0)))
        dr = delta_report(paired, solo)
        assert all(v > 0 for v in dr.deltas.values())


class TestCalibration:
    def test_target_must_be_positive(self, pack_scene):
        with pytest.raises(ValueError):
            calibrate_resistance(0.0, 4.0, 4.0, pack_scene, short_sim())

    def test_unreachable_target(self, pack_scene):
        with pytest.raises(CalibrationError, match="unreachable"):
            calibrate_resistance(50.0, 4.0, 4.0, pack_scene, short_sim(),
                                 bracket=(1e-4, 2e-4))

    def test_small_scene_calibration_converges(self, pack_scene):
        target = 0.5
        r_star = calibrate_resistance(target, 4.0, 6.0, pack_scene,
                                      short_sim(6.0), tolerance=0.02)
        bp = BatterySourceParams(reference_resistance=r_star)
        rep = run_scenario(ScenarioConfig(
            scene=pack_scene, label="check", c_rate=4.0, sim=short_sim(6.0),
            battery_params=bp))
        hottest = max(rep.final_mean_c(e) for e in rep.entities)
        assert hottest - 25.0 == pytest.approx(target, abs=0.02)

    def test_doubled_target_roughly_doubles_resistance(self, pack_scene):
        r1 = calibrate_resistance(0.3, 4.0, 6.0, pack_scene, short_sim(6.0),
                                  tolerance=0.01)
        r2 = calibrate_resistance(0.6, 4.0, 6.0, pack_scene, short_sim(6.0),
                                  tolerance=0.01)
        assert r2 / r1 == pytest.approx(2.0, rel=0.15)


class TestLoadScenario:
    def test_round_trip(self, pem_scene, tmp_path):
        doc = {
            "scene": pem_scene.name,
            "duration_s": 12.0,
            "record_interval_s": 3.0,
            "c_rate": 6.0,
            "pem_voltage_v": 0.8,
            "spacing_m": 0.004,
            "h_w_m2k": 25.0,
            "ambient_c": 20.0,
            "battery_params": {"reference_resistance": 0.005},
            "pem_params": {"exchange_current_density": 7.5},
        }
        p = tmp_path / "case.scenario"
        p.write_text(json.dumps(doc))
        cfg = load_scenario(p)
        assert cfg.scene == pem_scene
        assert cfg.sim.duration == 12.0
        assert cfg.sim.convective_h == 25.0
        assert cfg.sim.ambient_temperature == pytest.approx(293.15)
        assert cfg.c_rate == 6.0
        assert cfg.pem_voltage == 0.8
        assert cfg.spacing == 0.004
        assert cfg.battery_params.reference_resistance == 0.005
        assert cfg.pem_params.exchange_current_density == 7.5

    def test_defaults(self, pack_scene, tmp_path):
        p = tmp_path / "d.scenario"
        p.write_text(json.dumps({"scene": pack_scene.name}))
        cfg = load_scenario(p)
        assert cfg.sim.duration == 360.0
        assert cfg.pem_voltage is None
        assert cfg.battery_params == BatterySourceParams()

    def test_ambient_falls_back_to_scene(self, tmp_path):
        scene = tmp_path / "warm.scene"
        scene.write_text(make_scene_text([], ambient_c=31.0))
        p = tmp_path / "w.scenario"
        p.write_text(json.dumps({"scene": "warm.scene"}))
        cfg = load_scenario(p)
        assert cfg.sim.ambient_temperature == pytest.approx(304.15)

    def test_bad_json_position(self, tmp_path):
        p = tmp_path / "bad.scenario"
        p.write_text("{broken")
        with pytest.raises(ConfigError, match="line"):
            load_scenario(p)

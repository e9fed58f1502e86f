import json

import pytest

from conftest import box_shape, make_scene_text
from hesstherm import presets
from hesstherm.cli import _resolve_scenario, main


@pytest.fixture
def tiny_scenario(tmp_path):
    scene = tmp_path / "tiny.scene"
    scene.write_text(make_scene_text(
        [box_shape("cell1", (-0.008, -0.008, -0.008), (0.016, 0.016, 0.016),
                   material="solid", tag="convective", source="battery")],
        margin_m=0.012, spacing_m=0.004))
    scenario = tmp_path / "tiny.scenario"
    scenario.write_text(json.dumps({
        "scene": "tiny.scene",
        "duration_s": 2.0,
        "record_interval_s": 1.0,
        "c_rate": 4.0,
        "battery_params": {"reference_resistance": 0.002},
    }))
    return scenario


class TestRun:
    def test_happy_path(self, tiny_scenario, tmp_path, capsys):
        rc = main(["run", "--scenario", str(tiny_scenario),
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        assert (tmp_path / "out" / "tiny.csv").exists()
        out = capsys.readouterr().out
        assert "cell1=" in out and "hotspot=" in out

    def test_dump_fields(self, tiny_scenario, tmp_path):
        rc = main(["run", "--scenario", str(tiny_scenario),
                   "--out", str(tmp_path / "out"), "--dump-fields"])
        assert rc == 0
        assert len(list((tmp_path / "out").glob("tiny_rec*.vtk"))) == 3

    def test_missing_scenario_exits_1(self, capsys):
        rc = main(["run", "--scenario", "/nonexistent/case.scenario"])
        assert rc == 1
        assert "/nonexistent/case.scenario" in capsys.readouterr().err

    def test_unknown_flag_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--scenario", "x", "--bogus"])
        assert exc.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_preset_name_resolves(self):
        cfg = _resolve_scenario("pack3_4c")
        assert cfg.scene.exists()
        assert cfg.c_rate == 4.0
        assert cfg.battery_params.reference_resistance == presets.CALIBRATED_R_REF


class TestSweepCommand:
    def test_small_sweep(self, tiny_scenario, tmp_path, capsys):
        rc = main(["sweep", "--scenario", str(tiny_scenario),
                   "--c-rates", "2,4", "--out", str(tmp_path / "sw")])
        assert rc == 0
        assert (tmp_path / "sw" / "tiny_sweep.csv").exists()
        assert "2 runs" in capsys.readouterr().out

    def test_bad_rate_list(self, tiny_scenario, capsys):
        rc = main(["sweep", "--scenario", str(tiny_scenario),
                   "--c-rates", "2,oops"])
        assert rc == 1


class TestCalibrateCommand:
    def test_nonpositive_target_exits_1(self, tiny_scenario, capsys):
        rc = main(["calibrate", "--scenario", str(tiny_scenario),
                   "--target-dt", "-1"])
        assert rc == 1

    def test_calibrates_small_case(self, tiny_scenario, capsys):
        rc = main(["calibrate", "--scenario", str(tiny_scenario),
                   "--target-dt", "0.4"])
        assert rc == 0
        assert "calibrated reference resistance" in capsys.readouterr().out


class TestPresetsCommand:
    def test_writes_all_files(self, tmp_path, capsys):
        rc = main(["presets", "--out", str(tmp_path)])
        assert rc == 0
        for name in ("pack6", "pack3", "pem", "hess"):
            assert (tmp_path / f"{name}.scene").exists()
        for name in presets.PRESET_SCENARIOS:
            assert (tmp_path / f"{name}.scenario").exists()

    def test_preset_scenes_parse(self, tmp_path):
        from hesstherm.scene import parse_scene
        main(["presets", "--out", str(tmp_path)])
        for name in ("pack6", "pack3", "pem", "hess"):
            spec = parse_scene((tmp_path / f"{name}.scene").read_text())
            assert spec.ambient_temperature == pytest.approx(298.15)

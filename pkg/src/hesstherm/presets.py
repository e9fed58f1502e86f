"""Shipped scene and scenario presets.

Geometry notes:
- 21700 cells: 21 mm diameter, 70 mm height, 2 mm edge-to-edge spacing
  (23 mm center pitch).
- The fuel cell is a 100 x 20 mm stack, 10 mm thick, standing 18 mm from
  the nearest cell surface in the combined layout, vertically centered on
  the cells.  Its cathode cover plate and the end cells of the pack are
  convective flux surfaces, as is the outer boundary of the air block.
- Coordinates are symmetric literals about the origin wherever the layout
  is mirror symmetric, so the voxelizer reproduces the symmetry exactly.

The battery reference resistance shipped here was fixed once by
calibrating the six-cell pack's center-cell rise (0.94 K at 4C after
0.1 h from 25 C ambient) and is reused unchanged by every preset.
"""

from __future__ import annotations

import json
from pathlib import Path

# Calibrated against the 4C center-cell rise; see module docstring.
CALIBRATED_R_REF = 7.10291e-4

BATTERY_PARAMS = {
    "nominal_capacity": 4.0,
    "activation_energy": 20000.0,
    "reference_resistance": CALIBRATED_R_REF,
    "reference_temperature": 298.15,
    "entropic_coefficient": 0.0,
}

# Tuned so the stack heat spans roughly 0.25 W at 1.0 V to 4 W at 0.4 V:
# mixed kinetic/ohmic control, solo-stack rise of order 10 K at 0.4 V.
PEM_PARAMS = {
    "equilibrium_potential": 1.23,
    "thermoneutral_potential": 1.48,
    "exchange_current_density": 15.0,
    "anodic_coefficient": 0.5,
    "cathodic_coefficient": 0.5,
    "area_specific_resistance": 3.0e-4,
    "active_area": 0.002,
    "cathode_fraction": 0.7,
}

# The enclosure air is an effective medium: conductivity is raised to the
# level buoyant mixing and surface radiation provide in a cavity this size
# (Nu ~ 7 over still air), with the heat capacity scaled to keep the
# diffusivity, and hence the transient response and the stable explicit
# step, equal to real air's.
_MATERIALS_CELLS = {
    "cell": {"density": 2700.0, "specific_heat": 900.0, "conductivity": 3.0},
    "air": {"density": 1.2, "specific_heat": 6960.0, "conductivity": 0.18},
}

_MATERIALS_HESS = dict(_MATERIALS_CELLS)
_MATERIALS_HESS["pem"] = {
    "density": 2000.0, "specific_heat": 1000.0, "conductivity": 20.0}

_CELL_R = 0.0105
_CELL_H = 0.07
_PITCH = 0.023          # center-to-center, 2 mm edge gap


def _cell(name: str, x: float, y: float, tagged: bool) -> dict:
    return {
        "id": name,
        "kind": "cylinder",
        "geometry": {"center": [x, y, 0.0], "radius": _CELL_R,
                     "height": _CELL_H, "axis": "z"},
        "material": "cell",
        "boundary_tag": "convective" if tagged else "none",
        "source": "battery",
    }


def _pem_shape(y_near: float) -> dict:
    # 10 mm thick along y; the cathode side is the +y half of the stack
    return {
        "id": "pem",
        "kind": "box",
        "geometry": {"min_corner": [-0.05, y_near, -0.01],
                     "extents": [0.1, 0.01, 0.02]},
        "material": "pem",
        "boundary_tag": "convective",
        "source": "pem",
    }


def _scene(materials: dict, shapes: list[dict]) -> dict:
    return {
        "ambient_c": 25.0,
        "margin_m": 0.03,
        "spacing_m": 0.002,
        "materials": materials,
        "shapes": shapes,
    }


PRESET_SCENES: dict[str, dict] = {
    # six cells, 3 x 2; outer columns are flux surfaces
    "pack6": _scene(_MATERIALS_CELLS, [
        _cell("cell1", -_PITCH, -_PITCH / 2, True),
        _cell("cell2", 0.0, -_PITCH / 2, False),
        _cell("cell3", _PITCH, -_PITCH / 2, True),
        _cell("cell4", -_PITCH, _PITCH / 2, True),
        _cell("cell5", 0.0, _PITCH / 2, False),
        _cell("cell6", _PITCH, _PITCH / 2, True),
    ]),
    # the three-cell row on its own: solo baseline for proximity deltas
    "pack3": _scene(_MATERIALS_CELLS, [
        _cell("cell1", -_PITCH, 0.0, True),
        _cell("cell2", 0.0, 0.0, False),
        _cell("cell3", _PITCH, 0.0, True),
    ]),
    # fuel cell alone
    "pem": _scene(_MATERIALS_HESS, [_pem_shape(-0.005)]),
    # three-cell row facing the fuel cell across an 18 mm gap
    "hess": _scene(_MATERIALS_HESS, [
        _cell("cell1", -_PITCH, 0.0, True),
        _cell("cell2", 0.0, 0.0, False),
        _cell("cell3", _PITCH, 0.0, True),
        _pem_shape(_CELL_R + 0.018),
    ]),
}


def _scenario(scene: str, c_rate: float, pem_voltage: float | None) -> dict:
    doc = {
        "scene": f"{scene}.scene",
        "duration_s": 360.0,
        "record_interval_s": 30.0,
        "spacing_m": 0.002,
        "h_w_m2k": 50.0,
        "ambient_c": 25.0,
        "c_rate": c_rate,
        "battery_params": dict(BATTERY_PARAMS),
        "pem_params": dict(PEM_PARAMS),
    }
    if pem_voltage is not None:
        doc["pem_voltage_v"] = pem_voltage
    return doc


PRESET_SCENARIOS: dict[str, dict] = {
    "pack6_4c": _scenario("pack6", 4.0, None),
    "pack6_6c": _scenario("pack6", 6.0, None),
    "pack6_8c": _scenario("pack6", 8.0, None),
    "pack3_4c": _scenario("pack3", 4.0, None),
    "pem_1v": _scenario("pem", 0.0, 1.0),
    "pem_0v4": _scenario("pem", 0.0, 0.4),
    "hess_4c_1v": _scenario("hess", 4.0, 1.0),
    "hess_4c_0v8": _scenario("hess", 4.0, 0.8),
    "hess_4c_0v4": _scenario("hess", 4.0, 0.4),
}


def write_presets(directory: Path) -> list[Path]:
    """Write every preset scene and scenario file into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in PRESET_SCENES.items():
        p = directory / f"{name}.scene"
        p.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        written.append(p)
    for name, doc in PRESET_SCENARIOS.items():
        p = directory / f"{name}.scenario"
        p.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        written.append(p)
    return written


def scene_path(name: str, directory: Path) -> Path:
    """Materialize one preset scene into a directory and return its path."""
    if name not in PRESET_SCENES:
        raise KeyError(name)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    p = directory / f"{name}.scene"
    p.write_text(json.dumps(PRESET_SCENES[name], indent=2) + "\n", encoding="utf-8")
    return p


def scenario_path(name: str, directory: Path) -> Path:
    """Materialize one preset scenario (plus its scene) and return its path."""
    if name not in PRESET_SCENARIOS:
        raise KeyError(name)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    doc = PRESET_SCENARIOS[name]
    scene_name = Path(doc["scene"]).stem
    scene_path(scene_name, directory)
    p = directory / f"{name}.scenario"
    p.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return p

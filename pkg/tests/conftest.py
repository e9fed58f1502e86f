import json

import numpy as np
import pytest

from hesstherm.scene import parse_scene, voxelize


def make_scene_text(shapes, materials=None, ambient_c=25.0, margin_m=0.012,
                    spacing_m=0.002):
    doc = {
        "ambient_c": ambient_c,
        "margin_m": margin_m,
        "spacing_m": spacing_m,
        "materials": materials or {
            "solid": {"density": 2700.0, "specific_heat": 900.0,
                      "conductivity": 3.0},
            "air": {"density": 1.2, "specific_heat": 1005.0,
                    "conductivity": 0.026},
        },
        "shapes": shapes,
    }
    return json.dumps(doc)


def box_shape(sid, min_corner, extents, material="solid", tag="none",
              source="none"):
    return {"id": sid, "kind": "box",
            "geometry": {"min_corner": list(min_corner),
                         "extents": list(extents)},
            "material": material, "boundary_tag": tag, "source": source}


def cylinder_shape(sid, center, radius, height, material="solid", tag="none",
                   source="none", axis="z"):
    return {"id": sid, "kind": "cylinder",
            "geometry": {"center": list(center), "radius": radius,
                         "height": height, "axis": axis},
            "material": material, "boundary_tag": tag, "source": source}


@pytest.fixture
def single_box_grid():
    """A 16 mm solid cube in air, 2 mm spacing."""
    text = make_scene_text(
        [box_shape("blk", (-0.008, -0.008, -0.008), (0.016, 0.016, 0.016))])
    spec = parse_scene(text)
    return spec, voxelize(spec, 0.002)


def assert_monotone_decreasing(values, label=""):
    arr = np.asarray(values)
    assert np.all(np.diff(arr) < 0), f"{label} not strictly decreasing: {arr}"

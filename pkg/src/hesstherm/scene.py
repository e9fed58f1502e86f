"""Scene description, voxelization and boundary tagging.

A scene is a set of primitive shapes (axis-aligned cylinders and boxes)
with materials, placed in a block of still air.  Scenes are written as
JSON files (lengths in meters, temperatures in degrees C at the file
boundary) and rasterized onto a uniform structured grid by voxel-center
containment.

Voxel coordinates are built relative to the scene bounding-box center so
that a geometrically mirror-symmetric scene voxelizes to an exactly
mirror-symmetric grid (bit-for-bit), which the solver's symmetry
guarantees rely on.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

AIR_ID = -1

# Used when a scene file does not declare an "air" material.
DEFAULT_AIR = ("air", 1.2, 1005.0, 0.026)

# Outer-boundary face directions: -x, +x, -y, +y, -z, +z
FACE_DIRS = ((-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1))


class SceneError(ValueError):
    """Invalid scene file or scene geometry."""


@dataclass(frozen=True)
class Material:
    name: str
    density: float          # kg/m^3
    specific_heat: float    # J/(kg K)
    conductivity: float     # W/(m K)

    def __post_init__(self):
        for attr in ("density", "specific_heat", "conductivity"):
            if not getattr(self, attr) > 0:
                raise SceneError(f"material {self.name!r}: {attr} must be > 0")

    @property
    def volumetric_heat_capacity(self) -> float:
        return self.density * self.specific_heat


@dataclass(frozen=True)
class Shape:
    """One solid primitive.

    kind is "cylinder" (axis-aligned, default axis z) or "box".
    boundary_tag "convective" marks every air-exposed face of the shape
    as a convective flux surface; source attaches a heat-source model.
    """

    id: str
    kind: str                       # "cylinder" | "box"
    material: str
    boundary_tag: str = "none"      # "none" | "convective"
    source: str = "none"            # "none" | "battery" | "pem"
    # cylinder
    center: tuple[float, float, float] | None = None
    radius: float = 0.0
    height: float = 0.0
    axis: str = "z"
    # box
    min_corner: tuple[float, float, float] | None = None
    extents: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.kind == "cylinder":
            if self.center is None:
                raise SceneError(f"shape {self.id!r}: cylinder needs a center")
            if not (self.radius > 0 and self.height > 0):
                raise SceneError(f"shape {self.id!r}: radius and height must be > 0")
            if self.axis not in ("x", "y", "z"):
                raise SceneError(f"shape {self.id!r}: axis must be x, y or z")
        elif self.kind == "box":
            if self.min_corner is None or self.extents is None:
                raise SceneError(f"shape {self.id!r}: box needs min_corner and extents")
            if not all(e > 0 for e in self.extents):
                raise SceneError(f"shape {self.id!r}: extents must be > 0 componentwise")
        else:
            raise SceneError(f"shape {self.id!r}: unknown kind {self.kind!r}")
        if self.boundary_tag not in ("none", "convective"):
            raise SceneError(f"shape {self.id!r}: unknown boundary_tag {self.boundary_tag!r}")
        if self.source not in ("none", "battery", "pem"):
            raise SceneError(f"shape {self.id!r}: unknown source {self.source!r}")

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "box":
            lo = np.asarray(self.min_corner, dtype=float)
            return lo, lo + np.asarray(self.extents, dtype=float)
        c = np.asarray(self.center, dtype=float)
        half = {"x": 0, "y": 1, "z": 2}[self.axis]
        lo, hi = c.copy(), c.copy()
        for d in range(3):
            r = self.height / 2 if d == half else self.radius
            lo[d] -= r
            hi[d] += r
        return lo, hi

    def min_dimension(self) -> float:
        if self.kind == "box":
            return min(self.extents)
        return min(2.0 * self.radius, self.height)

    def contains(self, x: float, y: float, z: float) -> bool:
        """Containment test; coordinates in the same frame as the shape."""
        if self.kind == "box":
            lo = self.min_corner
            ex = self.extents
            return (lo[0] <= x <= lo[0] + ex[0]
                    and lo[1] <= y <= lo[1] + ex[1]
                    and lo[2] <= z <= lo[2] + ex[2])
        c = self.center
        d = (x - c[0], y - c[1], z - c[2])
        ax = {"x": 0, "y": 1, "z": 2}[self.axis]
        if abs(d[ax]) > self.height / 2:
            return False
        p, q = [d[i] for i in range(3) if i != ax]
        return p * p + q * q <= self.radius * self.radius

    def analytic_volume(self) -> float:
        if self.kind == "box":
            return float(np.prod(self.extents))
        return math.pi * self.radius ** 2 * self.height


@dataclass
class SceneSpec:
    shapes: list[Shape]
    materials: dict[str, Material]
    ambient_temperature: float      # K
    domain_margin: float            # m of air padding around the shape bbox
    spacing: float | None = None    # default voxel spacing from the file, m

    def __post_init__(self):
        if not self.ambient_temperature > 0:
            raise SceneError("ambient_temperature must be > 0 K")
        if self.domain_margin < 0:
            raise SceneError("domain_margin must be >= 0")
        seen = set()
        for s in self.shapes:
            if s.id in seen:
                raise SceneError(f"duplicate shape id {s.id!r}")
            seen.add(s.id)
            if s.material not in self.materials:
                raise SceneError(f"shape {s.id!r}: unknown material {s.material!r}")
        if "air" not in self.materials:
            name, rho, cp, k = DEFAULT_AIR
            self.materials = dict(self.materials)
            self.materials[name] = Material(name, rho, cp, k)
        _check_no_overlap(self.shapes)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.shapes:
            half = np.zeros(3)
            return -half, half
        los, his = zip(*(s.bounding_box() for s in self.shapes))
        return np.min(los, axis=0), np.max(his, axis=0)


def _check_no_overlap(shapes: list[Shape]) -> None:
    """Reject pairwise-overlapping shapes.

    Exact primitive-pair intersection is awkward for cylinder/box mixes, so
    overlap is detected by sampling the intersection of the two bounding
    boxes on a grid finer than any shape feature.  This matches the
    voxel-level tolerance the rasterizer itself works at.
    """
    for a_idx in range(len(shapes)):
        for b_idx in range(a_idx + 1, len(shapes)):
            a, b = shapes[a_idx], shapes[b_idx]
            lo_a, hi_a = a.bounding_box()
            lo_b, hi_b = b.bounding_box()
            lo = np.maximum(lo_a, lo_b)
            hi = np.minimum(hi_a, hi_b)
            if np.any(lo >= hi):
                continue
            step = min(a.min_dimension(), b.min_dimension()) / 8.0
            for x in _sample_axis(lo[0], hi[0], step):
                for y in _sample_axis(lo[1], hi[1], step):
                    for z in _sample_axis(lo[2], hi[2], step):
                        if a.contains(x, y, z) and b.contains(x, y, z):
                            raise SceneError(
                                f"shapes {a.id!r} and {b.id!r} overlap near "
                                f"({x:.4g}, {y:.4g}, {z:.4g})")


def _sample_axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    return np.linspace(lo, hi, n)


def parse_scene(text: str) -> SceneSpec:
    """Parse scene-file contents (JSON) into a validated SceneSpec."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(
            f"scene syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SceneError("scene file must be a JSON object")

    materials = {}
    for name, props in doc.get("materials", {}).items():
        try:
            materials[name] = Material(
                name=name,
                density=float(props["density"]),
                specific_heat=float(props["specific_heat"]),
                conductivity=float(props["conductivity"]),
            )
        except KeyError as exc:
            raise SceneError(f"material {name!r}: missing property {exc}") from exc

    shapes = []
    for entry in doc.get("shapes", []):
        shapes.append(_parse_shape(entry))

    ambient_c = float(doc.get("ambient_c", 25.0))
    spec = SceneSpec(
        shapes=shapes,
        materials=materials,
        ambient_temperature=ambient_c + 273.15,
        domain_margin=float(doc.get("margin_m", 0.03)),
        spacing=float(doc["spacing_m"]) if "spacing_m" in doc else None,
    )
    return spec


def _parse_shape(entry: dict) -> Shape:
    try:
        sid = entry["id"]
        kind = entry["kind"]
        geom = entry["geometry"]
        material = entry["material"]
    except KeyError as exc:
        raise SceneError(f"shape entry missing key {exc}") from exc
    common = dict(
        id=sid,
        kind=kind,
        material=material,
        boundary_tag=entry.get("boundary_tag", "none"),
        source=entry.get("source", "none"),
    )
    if kind == "cylinder":
        return Shape(center=tuple(float(v) for v in geom["center"]),
                     radius=float(geom["radius"]),
                     height=float(geom["height"]),
                     axis=geom.get("axis", "z"),
                     **common)
    if kind == "box":
        return Shape(min_corner=tuple(float(v) for v in geom["min_corner"]),
                     extents=tuple(float(v) for v in geom["extents"]),
                     **common)
    raise SceneError(f"shape {sid!r}: unknown kind {kind!r}")


@dataclass
class VoxelGrid:
    """Uniform structured grid holding the solver state.

    material_id / entity_id are per-voxel int32 arrays; entity_id holds the
    index of the owning shape in the scene's shape list, or AIR_ID.  The
    material/entity tables travel with the grid so it is self-contained.
    """

    dims: tuple[int, int, int]
    spacing: float
    origin: np.ndarray                      # m, corner of voxel (0,0,0)
    material_id: np.ndarray                 # int32 (nx,ny,nz)
    entity_id: np.ndarray                   # int32 (nx,ny,nz)
    temperature: np.ndarray                 # K, float64 (nx,ny,nz)
    materials: list[Material]               # indexed by material_id; [0] is air
    entity_labels: list[str]                # indexed by entity_id

    def __post_init__(self):
        if min(self.dims) < 3:
            raise SceneError(f"grid dims {self.dims} must be >= 3 componentwise")
        if not np.all(np.isfinite(self.temperature)) or not np.all(self.temperature > 0):
            raise SceneError("temperature field must be finite and > 0 K")
        if self.material_id.max(initial=0) >= len(self.materials):
            raise SceneError("material_id refers past the material table")

    @property
    def voxel_volume(self) -> float:
        return self.spacing ** 3

    def entity_voxel_count(self, entity: int) -> int:
        return int(np.count_nonzero(self.entity_id == entity))

    def entity_volume(self, entity: int) -> float:
        return self.entity_voxel_count(entity) * self.voxel_volume

    def property_field(self, attr: str) -> np.ndarray:
        """Per-voxel material property lookup (e.g. 'conductivity')."""
        table = np.array([getattr(m, attr) for m in self.materials])
        return table[self.material_id]


def voxelize(spec: SceneSpec, spacing: float | None = None,
             voxel_cap: int = 20_000_000) -> VoxelGrid:
    """Rasterize a scene onto a uniform grid by voxel-center containment.

    The grid covers the shape bounding box plus the scene's air margin and
    is centered on the bounding-box center.  Voxel centers are computed as
    center + (i - (n-1)/2) * spacing, which makes mirrored voxel pairs
    exact floating-point negations of each other; a symmetric scene then
    voxelizes identically on both sides.
    """
    if spacing is None:
        spacing = spec.spacing
    if spacing is None or not spacing > 0:
        raise SceneError("spacing must be > 0")
    for s in spec.shapes:
        if spacing > s.min_dimension() / 4.0:
            raise SceneError(
                f"spacing {spacing} m too coarse for shape {s.id!r} "
                f"(min dimension {s.min_dimension()} m requires <= "
                f"{s.min_dimension() / 4.0:.4g} m)")

    lo, hi = spec.bounding_box()
    center = (lo + hi) / 2.0
    span = (hi - lo) + 2.0 * spec.domain_margin
    dims = tuple(max(3, int(math.ceil(s / spacing - 1e-9))) for s in span)
    n_total = dims[0] * dims[1] * dims[2]
    if n_total > voxel_cap:
        raise SceneError(f"grid of {n_total} voxels exceeds cap {voxel_cap}")

    # center-relative voxel center coordinates along each axis
    rel = [(np.arange(n) - (n - 1) / 2.0) * spacing for n in dims]
    material_id = np.zeros(dims, dtype=np.int32)
    entity_id = np.full(dims, AIR_ID, dtype=np.int32)

    mat_names = ["air"] + sorted({s.material for s in spec.shapes} - {"air"})
    materials = [spec.materials[n] for n in mat_names]
    mat_index = {n: i for i, n in enumerate(mat_names)}

    X = rel[0][:, None, None]
    Y = rel[1][None, :, None]
    Z = rel[2][None, None, :]
    for eid, shape in enumerate(spec.shapes):
        inside = _containment_mask(shape, center, X, Y, Z)
        if np.any(inside & (entity_id != AIR_ID)):
            raise SceneError(f"shape {shape.id!r} overlaps an earlier shape on the grid")
        entity_id[inside] = eid
        material_id[inside] = mat_index[shape.material]

    origin = center - np.array(dims) * spacing / 2.0
    temperature = np.full(dims, spec.ambient_temperature, dtype=np.float64)
    return VoxelGrid(
        dims=dims,
        spacing=spacing,
        origin=origin,
        material_id=material_id,
        entity_id=entity_id,
        temperature=temperature,
        materials=materials,
        entity_labels=[s.id for s in spec.shapes],
    )


def _containment_mask(shape: Shape, center: np.ndarray,
                      X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Vectorized shape containment in center-relative coordinates."""
    if shape.kind == "box":
        lo = np.asarray(shape.min_corner) - center
        hi = lo + np.asarray(shape.extents)
        return ((X >= lo[0]) & (X <= hi[0])
                & (Y >= lo[1]) & (Y <= hi[1])
                & (Z >= lo[2]) & (Z <= hi[2]))
    c = np.asarray(shape.center) - center
    dx, dy, dz = X - c[0], Y - c[1], Z - c[2]
    ax = {"x": (dx, dy, dz), "y": (dy, dx, dz), "z": (dz, dx, dy)}[shape.axis]
    along, p, q = ax
    return (np.abs(along) <= shape.height / 2) & (p * p + q * q <= shape.radius ** 2)


def voxelized_volume(grid: VoxelGrid, entity: int) -> float:
    return grid.entity_volume(entity)


@dataclass
class BoundaryMap:
    """Flux faces of the grid.

    Arrays are parallel: face i sits on voxel (ix,iy,iz)[i] pointing in
    direction[i] (index into FACE_DIRS).  kind 1 = convective with
    coefficient h[i] and sink temperature t_ambient[i]; kind 0 = adiabatic.
    """

    voxel: np.ndarray        # (n, 3) int32
    direction: np.ndarray    # (n,) int8, index into FACE_DIRS
    kind: np.ndarray         # (n,) int8: 0 adiabatic, 1 convective
    h: np.ndarray            # (n,) W/(m^2 K)
    t_ambient: np.ndarray    # (n,) K

    def __post_init__(self):
        if np.any(self.h < 0):
            raise SceneError("convective coefficient h must be >= 0")

    @property
    def n_faces(self) -> int:
        return len(self.direction)

    @classmethod
    def from_lists(cls, voxels, directions, kinds, hs, t_ambs) -> "BoundaryMap":
        return cls(
            voxel=np.asarray(voxels, dtype=np.int32).reshape(-1, 3),
            direction=np.asarray(directions, dtype=np.int8),
            kind=np.asarray(kinds, dtype=np.int8),
            h=np.asarray(hs, dtype=np.float64),
            t_ambient=np.asarray(t_ambs, dtype=np.float64),
        )


def tag_boundaries(spec: SceneSpec, grid: VoxelGrid, h: float,
                   t_ambient: float) -> BoundaryMap:
    """Build the flux-face map for a voxelized scene.

    Convective faces: every outer grid face backed by air (the enclosure
    surface) or by a shape tagged convective, plus every interior
    shape/air interface face of tagged shapes.  Remaining outer faces are
    listed adiabatic.  A tagged shape with no air-exposed face is reported
    with a warning, not an error.
    """
    if h < 0:
        raise SceneError("h must be >= 0")
    nx, ny, nz = grid.dims
    eid = grid.entity_id
    tagged = np.array(
        [s.boundary_tag == "convective" for s in spec.shapes], dtype=bool)

    voxels, dirs, kinds, hs, tambs = [], [], [], [], []

    def emit(ii, jj, kk, d, convective):
        n = len(ii)
        voxels.append(np.stack([ii, jj, kk], axis=1))
        dirs.append(np.full(n, d, dtype=np.int8))
        kinds.append(np.full(n, 1 if convective else 0, dtype=np.int8))
        hs.append(np.full(n, h if convective else 0.0))
        tambs.append(np.full(n, t_ambient))

    def boundary_plane(axis, last, d):
        shape2d = tuple(grid.dims[a] for a in range(3) if a != axis)
        idx = [None, None, None]
        fixed = grid.dims[axis] - 1 if last else 0
        grids = np.meshgrid(*[np.arange(s) for s in shape2d], indexing="ij")
        g_iter = iter(grids)
        coords = [np.full(shape2d, fixed) if a == axis else next(g_iter)
                  for a in range(3)]
        ii, jj, kk = (c.ravel() for c in coords)
        ent = eid[ii, jj, kk]
        conv = ent == AIR_ID
        if len(tagged):
            conv = conv | ((ent >= 0) & tagged[np.maximum(ent, 0)])
        emit(ii[conv], jj[conv], kk[conv], d, True)
        emit(ii[~conv], jj[~conv], kk[~conv], d, False)

    boundary_plane(0, False, 0)
    boundary_plane(0, True, 1)
    boundary_plane(1, False, 2)
    boundary_plane(1, True, 3)
    boundary_plane(2, False, 4)
    boundary_plane(2, True, 5)

    # interior shape/air interfaces of tagged shapes
    exposed_any = np.zeros(len(spec.shapes), dtype=bool)
    for d, (ox, oy, oz) in enumerate(FACE_DIRS):
        here = _shifted_interior(eid, ox, oy, oz)
        if here is None:
            continue
        own, nbr, (ii, jj, kk) = here
        is_iface = (own >= 0) & (nbr == AIR_ID)
        if not np.any(is_iface):
            continue
        ent = own[is_iface]
        np.logical_or.at(exposed_any, ent, True)
        conv = tagged[ent]
        emit(ii[is_iface][conv], jj[is_iface][conv], kk[is_iface][conv], d, True)

    for sidx, s in enumerate(spec.shapes):
        if tagged[sidx] and not exposed_any[sidx] and not _touches_boundary(eid, sidx):
            warnings.warn(
                f"shape {s.id!r} tagged convective but has no exposed face",
                stacklevel=2)

    return BoundaryMap.from_lists(
        np.concatenate(voxels) if voxels else np.empty((0, 3)),
        np.concatenate(dirs) if dirs else [],
        np.concatenate(kinds) if kinds else [],
        np.concatenate(hs) if hs else [],
        np.concatenate(tambs) if tambs else [],
    )


def _shifted_interior(eid: np.ndarray, ox: int, oy: int, oz: int):
    """Pairs (voxel entity, neighbor entity) for interior faces along one offset."""
    nx, ny, nz = eid.shape
    sl_own = [slice(None)] * 3
    sl_nbr = [slice(None)] * 3
    for axis, o in enumerate((ox, oy, oz)):
        if o == -1:
            sl_own[axis] = slice(1, None)
            sl_nbr[axis] = slice(None, -1)
        elif o == 1:
            sl_own[axis] = slice(None, -1)
            sl_nbr[axis] = slice(1, None)
    own = eid[tuple(sl_own)]
    nbr = eid[tuple(sl_nbr)]
    base = np.meshgrid(*[np.arange(s) for s in own.shape], indexing="ij")
    offset = [sl.start or 0 for sl in sl_own]
    coords = tuple(b.ravel() + off for b, off in zip(base, offset))
    return own.ravel(), nbr.ravel(), coords


def _touches_boundary(eid: np.ndarray, entity: int) -> bool:
    return bool(
        np.any(eid[0] == entity) or np.any(eid[-1] == entity)
        or np.any(eid[:, 0] == entity) or np.any(eid[:, -1] == entity)
        or np.any(eid[:, :, 0] == entity) or np.any(eid[:, :, -1] == entity))

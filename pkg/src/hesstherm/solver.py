"""Explicit finite-volume conduction solver on a voxel grid.

Forward-time, central-space update with harmonic-mean face conductivities,
Robin (convective) boundary faces and per-entity heat sources.  The grid
update is a gather: each voxel's new temperature depends only on the old
field, so the kernel parallelizes over voxels with no write races and the
result is bitwise independent of the worker count.

Flux sums inside the kernel are grouped per axis (left + right as one
commutative pair), so a mirror-symmetric grid with symmetric sources stays
mirror-symmetric to the last bit.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Allow more workers than detected cores before numba fixes its pool size;
# worker counts are a reproducibility knob here, not a throughput one.
if "numba" not in sys.modules:
    os.environ.setdefault("NUMBA_NUM_THREADS", str(max(8, os.cpu_count() or 1)))

import numba
from numba import njit, prange

from .scene import AIR_ID, FACE_DIRS, BoundaryMap, VoxelGrid


class SolverError(RuntimeError):
    """Unstable step, non-finite field, or energy-audit violation."""


@dataclass
class SimConfig:
    duration: float = 360.0             # s
    dt: float | None = None             # s; None selects the stable step
    ambient_temperature: float = 298.15  # K
    convective_h: float = 50.0          # W/(m^2 K)
    record_interval: float = 30.0       # s
    safety_factor: float = 0.9
    workers: int = 1

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("duration must be > 0")
        if not self.record_interval > 0:
            raise ValueError("record_interval must be > 0")
        if not 0 < self.safety_factor <= 1:
            raise ValueError("safety_factor must be in (0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SourceField:
    """Per-entity source power distributed over that entity's voxels.

    weights[v] is voxel v's share of its entity's power; they sum to 1
    within each entity, so the injected total equals the sum of the
    per-entity model outputs exactly (one multiply per voxel).
    entity_power[0] is the air slot and stays 0.
    """

    weights: np.ndarray          # float64 (nx,ny,nz)
    entity_power: np.ndarray     # float64 (n_entities + 1,), W; slot 0 = air

    @classmethod
    def uniform(cls, grid: VoxelGrid) -> "SourceField":
        n_ent = len(grid.entity_labels)
        weights = np.zeros(grid.dims, dtype=np.float64)
        for e in range(n_ent):
            mask = grid.entity_id == e
            count = int(np.count_nonzero(mask))
            if count:
                weights[mask] = 1.0 / count
        return cls(weights=weights, entity_power=np.zeros(n_ent + 1))

    def set_power(self, entity: int, watts: float) -> None:
        self.entity_power[entity + 1] = watts

    @property
    def total_power(self) -> float:
        return float(self.entity_power.sum())


@dataclass
class EnergyAudit:
    initial_energy: float    # J
    injected: float          # J
    lost_through_boundaries: float  # J (negative means net gain from ambient)
    final_energy: float      # J
    residual: float          # J

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / max(1.0, abs(self.injected))


@dataclass
class TransientResult:
    """Raw transient output in kelvin; labeling happens upstream."""

    times: np.ndarray                 # s, recorded sample times
    entity_labels: list[str]
    mean_k: np.ndarray                # (n_samples, n_entities)
    max_k: np.ndarray
    min_k: np.ndarray
    hotspot_voxel: tuple[int, int, int]
    hotspot_entity: str               # shape id or "air"
    hotspot_k: float
    audit: EnergyAudit
    n_steps: int


# --------------------------------------------------------------------------
# kernels

@njit(parallel=True, fastmath=False, cache=True)
def _step_kernel(T, Tn, Gx, Gy, Gz, S, inv_c, rg, rgt, eidp, w, Qe, dt):
    # Conduction and sources advance explicitly; the Robin exchange term is
    # taken at the new time (backward Euler), so boundary conductance does
    # not enter the stability bound.  Flux sums are grouped per axis so a
    # mirrored voxel pair computes bitwise-identical updates.
    nx, ny, nz = T.shape
    for ix in prange(nx):
        for iy in range(ny):
            for iz in range(nz):
                t = T[ix, iy, iz]
                p = rgt[ix, iy, iz] + Qe[eidp[ix, iy, iz]] * w[ix, iy, iz] \
                    - S[ix, iy, iz] * t
                px = 0.0
                if ix > 0:
                    px = Gx[ix - 1, iy, iz] * T[ix - 1, iy, iz]
                if ix < nx - 1:
                    px += Gx[ix, iy, iz] * T[ix + 1, iy, iz]
                py = 0.0
                if iy > 0:
                    py = Gy[ix, iy - 1, iz] * T[ix, iy - 1, iz]
                if iy < ny - 1:
                    py += Gy[ix, iy, iz] * T[ix, iy + 1, iz]
                pz = 0.0
                if iz > 0:
                    pz = Gz[ix, iy, iz - 1] * T[ix, iy, iz - 1]
                if iz < nz - 1:
                    pz += Gz[ix, iy, iz] * T[ix, iy, iz + 1]
                p = ((p + px) + py) + pz
                dti = dt * inv_c[ix, iy, iz]
                g = rg[ix, iy, iz]
                if g != 0.0:
                    Tn[ix, iy, iz] = (t + dti * p) / (1.0 + dti * g)
                else:
                    Tn[ix, iy, iz] = t + dti * p


@njit(cache=True)
def _entity_sums(t_flat, ent_idx, ent_offsets, out):
    for e in range(len(ent_offsets) - 1):
        s = 0.0
        for k in range(ent_offsets[e], ent_offsets[e + 1]):
            s += t_flat[ent_idx[k]]
        out[e] = s


@njit(cache=True)
def _entity_minmax(t_flat, ent_idx, ent_offsets, out_min, out_max):
    for e in range(len(ent_offsets) - 1):
        lo = ent_offsets[e]
        hi = ent_offsets[e + 1]
        if hi == lo:
            continue
        mn = t_flat[ent_idx[lo]]
        mx = mn
        for k in range(lo + 1, hi):
            v = t_flat[ent_idx[k]]
            if v < mn:
                mn = v
            if v > mx:
                mx = v
        out_min[e] = mn
        out_max[e] = mx


@njit(cache=True)
def _robin_loss_rate(t_flat, robin_idx, robin_g, robin_gt):
    # power leaving the domain through convective faces, W, at the given field
    s = 0.0
    for k in range(len(robin_idx)):
        s += robin_g[k] * t_flat[robin_idx[k]] - robin_gt[k]
    return s


# --------------------------------------------------------------------------
# assembly

@dataclass
class _System:
    """Precomputed arrays for one grid + boundary map."""

    Gx: np.ndarray
    Gy: np.ndarray
    Gz: np.ndarray
    S: np.ndarray            # total face conductance per voxel, W/K
    inv_c: np.ndarray        # 1 / (rho cp V) per voxel
    rgt: np.ndarray          # sum of h A T_amb per voxel, W
    rg: np.ndarray           # sum of h A per voxel, W/K
    eidp: np.ndarray         # entity_id + 1, int32
    robin_idx: np.ndarray    # linear indices of voxels with robin faces
    robin_g: np.ndarray
    robin_gt: np.ndarray
    ent_idx: np.ndarray      # concatenated linear voxel indices per entity
    ent_offsets: np.ndarray
    ent_counts: np.ndarray
    heat_capacity: np.ndarray  # rho cp V per voxel, J/K
    raw_dt_limit: float


def _harmonic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 2.0 * a * b / (a + b)


def assemble(grid: VoxelGrid, boundaries: BoundaryMap | None) -> _System:
    dx = grid.spacing
    k = grid.property_field("conductivity")
    rho_cp = grid.property_field("density") * grid.property_field("specific_heat")

    Gx = _harmonic(k[:-1], k[1:]) * dx
    Gy = _harmonic(k[:, :-1], k[:, 1:]) * dx
    Gz = _harmonic(k[:, :, :-1], k[:, :, 1:]) * dx

    # robin conductances accumulated per voxel
    rg = np.zeros(grid.dims)
    rgt = np.zeros(grid.dims)
    if boundaries is not None and boundaries.n_faces:
        conv = boundaries.kind == 1
        vox = boundaries.voxel[conv]
        hA = boundaries.h[conv] * dx * dx
        lin = np.ravel_multi_index((vox[:, 0], vox[:, 1], vox[:, 2]), grid.dims)
        np.add.at(rg.ravel(), lin, hA)
        np.add.at(rgt.ravel(), lin, hA * boundaries.t_ambient[conv])

    # axis-paired conductance sums keep mirrored voxels bitwise identical
    def paired(G, axis):
        left = np.zeros(grid.dims)
        right = np.zeros(grid.dims)
        sl_l = [slice(None)] * 3
        sl_r = [slice(None)] * 3
        sl_l[axis] = slice(1, None)
        sl_r[axis] = slice(None, -1)
        left[tuple(sl_l)] = G
        right[tuple(sl_r)] = G
        return left + right

    S = (paired(Gx, 0) + paired(Gy, 1)) + paired(Gz, 2)

    heat_capacity = rho_cp * grid.voxel_volume
    inv_c = 1.0 / heat_capacity

    robin_lin = np.nonzero(rg.ravel())[0].astype(np.int64)
    n_ent = len(grid.entity_labels)
    eflat = grid.entity_id.ravel()
    idx_lists = [np.nonzero(eflat == e)[0] for e in range(n_ent)]
    ent_counts = np.array([len(ix) for ix in idx_lists], dtype=np.int64)
    ent_idx = (np.concatenate(idx_lists) if idx_lists else np.empty(0)).astype(np.int64)
    ent_offsets = np.zeros(n_ent + 1, dtype=np.int64)
    np.cumsum(ent_counts, out=ent_offsets[1:])

    with np.errstate(divide="ignore"):
        limits = heat_capacity / S
    raw_dt_limit = float(np.min(limits[S > 0])) if np.any(S > 0) else np.inf

    return _System(
        Gx=Gx, Gy=Gy, Gz=Gz, S=S, inv_c=inv_c, rgt=rgt, rg=rg,
        eidp=(grid.entity_id + 1).astype(np.int32),
        robin_idx=robin_lin,
        robin_g=rg.ravel()[robin_lin].copy(),
        robin_gt=rgt.ravel()[robin_lin].copy(),
        ent_idx=ent_idx, ent_offsets=ent_offsets, ent_counts=ent_counts,
        heat_capacity=heat_capacity,
        raw_dt_limit=raw_dt_limit,
    )


def stable_dt(grid: VoxelGrid, safety_factor: float = 0.9) -> float:
    """Largest safe explicit time step, scaled by the safety factor.

    The bound is evaluated per voxel from the assembled face conductances,
    dt <= rho cp V / sum(G).  For a uniform material this reduces to
    dx^2 rho cp / (6 k); at high-contrast interfaces the harmonic-mean
    face conductance can exceed the uniform-material estimate, which the
    per-voxel bound accounts for.  Convective faces do not tighten the
    bound because the boundary-exchange term is integrated implicitly.
    """
    return safety_factor * assemble(grid, None).raw_dt_limit


def total_energy(grid: VoxelGrid) -> float:
    """Thermal energy content sum(rho cp T V), J."""
    rho_cp = grid.property_field("density") * grid.property_field("specific_heat")
    return float(np.sum(rho_cp * grid.temperature) * grid.voxel_volume)


def _set_workers(n: int) -> None:
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def step(grid: VoxelGrid, sources: SourceField | None,
         boundaries: BoundaryMap | None, dt: float,
         _system: _System | None = None) -> VoxelGrid:
    """Advance the temperature field by one explicit step (in place).

    Intended for small studies and tests; transient runs go through
    run_transient, which assembles the system once.
    """
    system = _system if _system is not None else assemble(grid, boundaries)
    if dt > system.raw_dt_limit * (1.0 + 1e-12):
        raise SolverError(
            f"dt {dt:.6g} s above the stability limit {system.raw_dt_limit:.6g} s")
    if sources is None:
        sources = SourceField.uniform(grid)
    t_new = np.empty_like(grid.temperature)
    _step_kernel(grid.temperature, t_new, system.Gx, system.Gy, system.Gz,
                 system.S, system.inv_c, system.rg, system.rgt, system.eidp,
                 sources.weights, sources.entity_power, dt)
    if not np.all(np.isfinite(t_new)):
        bad = np.argwhere(~np.isfinite(t_new))[0]
        print(f"solver abort: non-finite temperature at voxel {tuple(bad)}",
              file=sys.stderr)
        raise SolverError(f"non-finite temperature at voxel {tuple(bad)}")
    grid.temperature = t_new
    return grid


PowerModel = Callable[[np.ndarray], np.ndarray]
"""Maps per-entity mean temperatures (K) to per-entity powers (W)."""


def run_transient(grid: VoxelGrid, boundaries: BoundaryMap | None,
                  sources: SourceField, sim: SimConfig,
                  power_model: PowerModel | None = None,
                  instability_band: float = 500.0,
                  on_record: Callable[[float, VoxelGrid], None] | None = None,
                  ) -> TransientResult:
    """Advance to sim.duration, re-resolving source powers every step.

    Powers come from power_model evaluated at each entity's current mean
    temperature (lumped coupling); recordings happen at multiples of
    sim.record_interval plus the final time.  Aborts if any voxel leaves
    ambient +- instability_band (checked at recording times) or the field
    turns non-finite.
    """
    _set_workers(sim.workers)
    system = assemble(grid, boundaries)
    dt_base = sim.dt if sim.dt is not None else sim.safety_factor * system.raw_dt_limit
    if dt_base > system.raw_dt_limit * (1.0 + 1e-12):
        raise SolverError(
            f"dt {dt_base:.6g} s above the stability limit "
            f"{system.raw_dt_limit:.6g} s")

    n_ent = len(grid.entity_labels)
    t_cur = grid.temperature
    t_next = np.empty_like(t_cur)
    means = np.empty(n_ent)
    sums = np.empty(n_ent)
    mins = np.full(n_ent, np.nan)
    maxs = np.full(n_ent, np.nan)
    counts = np.maximum(system.ent_counts, 1)

    initial_energy = total_energy(grid)
    injected = 0.0
    lost = 0.0

    times: list[float] = []
    rec_mean: list[np.ndarray] = []
    rec_max: list[np.ndarray] = []
    rec_min: list[np.ndarray] = []

    def record(t_now: float, field: np.ndarray) -> None:
        flat = field.ravel()
        _entity_sums(flat, system.ent_idx, system.ent_offsets, sums)
        _entity_minmax(flat, system.ent_idx, system.ent_offsets, mins, maxs)
        times.append(t_now)
        # the exact mean lies in [min, max]; clamp away summation rounding
        rec_mean.append(np.clip(sums / counts, mins, maxs))
        rec_max.append(maxs.copy())
        rec_min.append(mins.copy())
        grid.temperature = field
        if on_record is not None:
            on_record(t_now, grid)

    def check_field(t_now: float, step_no: int, field: np.ndarray) -> None:
        if not np.all(np.isfinite(field)):
            bad = np.argwhere(~np.isfinite(field))[0]
            print(f"solver abort at step {step_no} (t={t_now:.3f} s): "
                  f"non-finite temperature at voxel {tuple(bad)}", file=sys.stderr)
            raise SolverError(f"non-finite temperature at voxel {tuple(bad)}")
        dev = np.abs(field - sim.ambient_temperature)
        worst = np.unravel_index(int(np.argmax(dev)), field.shape)
        if dev[worst] > instability_band:
            print(f"solver abort at step {step_no} (t={t_now:.3f} s): "
                  f"|T - T_amb| = {dev[worst]:.1f} K at voxel {worst}",
                  file=sys.stderr)
            raise SolverError(
                f"temperature excursion {dev[worst]:.1f} K beyond "
                f"{instability_band} K at voxel {worst}")

    record(0.0, t_cur)
    t_now = 0.0
    step_no = 0
    next_record = min(sim.record_interval, sim.duration)
    eps = 1e-9 * sim.duration

    while t_now < sim.duration - eps:
        dt = min(dt_base, next_record - t_now)
        flat = t_cur.ravel()
        _entity_sums(flat, system.ent_idx, system.ent_offsets, sums)
        np.divide(sums, counts, out=means)
        if power_model is not None:
            sources.entity_power[1:] = power_model(means)
        injected += float(sources.entity_power.sum()) * dt
        _step_kernel(t_cur, t_next, system.Gx, system.Gy, system.Gz,
                     system.S, system.inv_c, system.rg, system.rgt,
                     system.eidp, sources.weights, sources.entity_power, dt)
        t_cur, t_next = t_next, t_cur
        # the boundary term is integrated at the new time, so the energy
        # it removed this step is evaluated on the updated field
        lost += _robin_loss_rate(t_cur.ravel(), system.robin_idx,
                                 system.robin_g, system.robin_gt) * dt
        t_now += dt
        step_no += 1
        if t_now >= next_record - eps:
            check_field(t_now, step_no, t_cur)
            record(t_now, t_cur)
            next_record = min(next_record + sim.record_interval, sim.duration)

    grid.temperature = t_cur
    final_energy = total_energy(grid)
    residual = final_energy - (initial_energy + injected - lost)
    audit = EnergyAudit(initial_energy=initial_energy, injected=injected,
                        lost_through_boundaries=lost, final_energy=final_energy,
                        residual=residual)
    if audit.relative_residual >= 1e-6:
        raise SolverError(
            f"energy audit violation: relative residual "
            f"{audit.relative_residual:.3e} >= 1e-6")

    hot_lin = int(np.argmax(t_cur))
    hot_vox = tuple(int(v) for v in np.unravel_index(hot_lin, grid.dims))
    hot_eid = int(grid.entity_id[hot_vox])
    hot_entity = grid.entity_labels[hot_eid] if hot_eid != AIR_ID else "air"

    return TransientResult(
        times=np.asarray(times),
        entity_labels=list(grid.entity_labels),
        mean_k=np.asarray(rec_mean),
        max_k=np.asarray(rec_max),
        min_k=np.asarray(rec_min),
        hotspot_voxel=hot_vox,
        hotspot_entity=hot_entity,
        hotspot_k=float(t_cur[hot_vox]),
        audit=audit,
        n_steps=step_no,
    )

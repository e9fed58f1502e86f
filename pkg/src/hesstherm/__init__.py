"""Config-driven transient thermal simulation of hybrid energy-storage
layouts: a cylindrical-cell battery pack and a PEM fuel cell sharing a
confined block of still air."""

from .electrochem import (BatterySourceParams, PemSourceParams,
                          arrhenius_factor, battery_heat_rate,
                          butler_volmer_current, c_rate_to_current,
                          overpotential, pem_heat_rate, pem_operating_point)
from .harness import (DeltaReport, ScenarioConfig, ScenarioReport,
                      calibrate_resistance, delta_report, load_scenario,
                      run_scenario, sweep)
from .scene import (BoundaryMap, Material, SceneError, SceneSpec, Shape,
                    VoxelGrid, parse_scene, tag_boundaries, voxelize)
from .solver import (EnergyAudit, SimConfig, SolverError, SourceField,
                     run_transient, stable_dt, step, total_energy)

__version__ = "0.1.0"

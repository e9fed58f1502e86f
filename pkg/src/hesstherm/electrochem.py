"""Heat-source models for battery cells and the PEM fuel cell.

Battery heating is Joule dissipation through a temperature-dependent
internal resistance whose rate constant follows an Arrhenius law; the PEM
operating point comes from Butler-Volmer electrode kinetics plus an ohmic
(area-specific resistance) term, and its heat rate is the gap between the
thermoneutral potential and the terminal voltage times the stack current.

All functions are pure and safe to call from parallel solver workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

FARADAY = 96485.0        # C/mol
GAS_CONSTANT = 8.314     # J/(mol K)

# Beyond this dimensionless overpotential the reverse branch is dropped and
# the forward exponential saturates (single-exponential Tafel limit); keeps
# exp() overflow-free while leaving the operating range untouched.
BV_EXPONENT_CLAMP = 60.0


class OperatingPointError(RuntimeError):
    """No admissible electrochemical operating point."""


@dataclass(frozen=True)
class BatterySourceParams:
    """Lumped cell heat-source parameters.

    The Arrhenius pre-exponential factor is folded into
    reference_resistance: only the relative rate k(T)/k(T_ref) enters the
    resistance law, so no separate prefactor is kept.
    """

    nominal_capacity: float = 4.0           # A h
    activation_energy: float = 20_000.0     # J/mol
    reference_resistance: float = 0.02      # ohm at reference_temperature
    reference_temperature: float = 298.15   # K
    entropic_coefficient: float = 0.0       # dU/dT, V/K

    def __post_init__(self):
        if not self.nominal_capacity > 0:
            raise ValueError("nominal_capacity must be > 0")
        if not self.reference_resistance > 0:
            raise ValueError("reference_resistance must be > 0")
        if not self.reference_temperature > 0:
            raise ValueError("reference_temperature must be > 0")
        if self.activation_energy < 0:
            raise ValueError("activation_energy must be >= 0")


@dataclass(frozen=True)
class PemSourceParams:
    """Single-cell PEM parameters; active_area is the electrode footprint."""

    equilibrium_potential: float = 1.23         # V
    thermoneutral_potential: float = 1.48       # V
    exchange_current_density: float = 1.0       # A/m^2
    anodic_coefficient: float = 0.5             # beta
    cathodic_coefficient: float = 0.5           # alpha
    area_specific_resistance: float = 1.5e-5    # ohm m^2
    active_area: float = 0.002                  # m^2
    cathode_fraction: float = 0.7               # share of heat on the cathode side

    def __post_init__(self):
        if not (0 < self.anodic_coefficient <= 1 and 0 < self.cathodic_coefficient <= 1):
            raise ValueError("transfer coefficients must be in (0, 1]")
        if not self.exchange_current_density > 0:
            raise ValueError("exchange_current_density must be > 0")
        if not 0 < self.equilibrium_potential <= self.thermoneutral_potential:
            raise ValueError("need 0 < equilibrium <= thermoneutral potential")
        if not self.active_area > 0:
            raise ValueError("active_area must be > 0")
        if not 0 <= self.cathode_fraction <= 1:
            raise ValueError("cathode_fraction must be in [0, 1]")


def c_rate_to_current(c_rate: float, capacity_ah: float) -> float:
    """Discharge current in A for a C-rate on a pack of given capacity."""
    if c_rate < 0:
        raise ValueError("c_rate must be >= 0")
    return c_rate * capacity_ah


def arrhenius_factor(temperature: float, params: BatterySourceParams) -> float:
    """Relative rate constant k(T)/k(T_ref); 1 at the reference temperature."""
    if not temperature > 0:
        raise ValueError("temperature must be > 0 K")
    ea_over_r = params.activation_energy / GAS_CONSTANT
    return math.exp(-ea_over_r * (1.0 / temperature - 1.0 / params.reference_temperature))


def battery_heat_rate(current: float, temperature: float,
                      params: BatterySourceParams) -> float:
    """Heat generated by one cell, W.

    Resistance falls as temperature rises (Arrhenius-activated transport):
    R(T) = R_ref / (k(T)/k(T_ref)).  The reversible term I*T*dU/dT is kept
    configurable and defaults to zero.
    """
    resistance = params.reference_resistance / arrhenius_factor(temperature, params)
    return current * current * resistance + current * temperature * params.entropic_coefficient


def overpotential(electrode_potential: float, equilibrium_potential: float) -> float:
    """Activation overpotential, V."""
    return electrode_potential - equilibrium_potential


def butler_volmer_current(eta: float, temperature: float,
                          params: PemSourceParams) -> float:
    """Faradaic current density for an overpotential, A/m^2.

    i = i0 (exp(beta f eta) - exp(-alpha f eta)) with f = F/(R T).  The
    sign of the result matches the sign of eta.
    """
    if not temperature > 0:
        raise ValueError("temperature must be > 0 K")
    f = FARADAY / (GAS_CONSTANT * temperature)
    x = f * eta
    i0 = params.exchange_current_density
    if x > BV_EXPONENT_CLAMP:
        return i0 * math.exp(params.anodic_coefficient * BV_EXPONENT_CLAMP)
    if x < -BV_EXPONENT_CLAMP:
        return -i0 * math.exp(params.cathodic_coefficient * BV_EXPONENT_CLAMP)
    return i0 * (math.exp(params.anodic_coefficient * x)
                 - math.exp(-params.cathodic_coefficient * x))


def pem_operating_point(v_cell: float, temperature: float,
                        params: PemSourceParams,
                        residual_tol: float = 1e-10) -> float:
    """Current density (A/m^2, >= 0) at which the cell delivers v_cell.

    Solves E_eq - eta - i(eta) * ASR = v_cell for the activation
    overpotential magnitude eta >= 0 by bracketed root finding, then
    returns i(eta).  Kinetics are lumped at one electrode, so the solve is
    one-dimensional; the result is strictly decreasing in v_cell.
    """
    if not temperature > 0:
        raise ValueError("temperature must be > 0 K")
    if not v_cell > 0:
        raise ValueError("v_cell must be > 0")
    e_eq = params.equilibrium_potential
    if v_cell > e_eq:
        raise OperatingPointError(
            f"v_cell {v_cell} V above the equilibrium potential {e_eq} V: "
            "no operating point with positive current")
    if v_cell == e_eq:
        return 0.0
    asr = params.area_specific_resistance

    def residual(eta: float) -> float:
        return e_eq - eta - butler_volmer_current(eta, temperature, params) * asr - v_cell

    eta_hi = e_eq - v_cell
    # residual(0) = e_eq - v_cell > 0 and residual(eta_hi) <= 0
    try:
        eta = brentq(residual, 0.0, eta_hi, xtol=1e-16, rtol=1e-15, maxiter=200)
    except RuntimeError as exc:
        raise OperatingPointError(f"operating-point solve failed: {exc}") from exc
    if abs(residual(eta)) > residual_tol:
        raise OperatingPointError(
            f"operating-point residual {abs(residual(eta)):.3e} V above "
            f"{residual_tol:.1e} V at v_cell={v_cell}")
    return butler_volmer_current(eta, temperature, params)


def pem_heat_rate(v_cell: float, current_density: float,
                  params: PemSourceParams) -> float:
    """Stack heat rate in W at an operating point.

    Q = (E_tn - v_cell) * i * A.  The split of this power between the
    cathode and anode halves of the stack is applied where the source is
    distributed over voxels, using params.cathode_fraction.
    """
    if current_density < 0:
        raise ValueError("current density must be >= 0")
    return (params.thermoneutral_potential - v_cell) * current_density * params.active_area

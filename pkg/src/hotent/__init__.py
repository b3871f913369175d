"""Gaussian-state dynamics of parametrically driven oscillators in hot baths.

Modules
-------
model
    Parameters, drive protocol, covariance container, initial states.
dynamics
    RK4 covariance evolution and the first-moment propagator.
stability
    Floquet multipliers, classification, phase-diagram scans.
entanglement
    Partial transpose, symplectic spectrum, logarithmic negativity,
    effective squeeze/temperature.
squeezed
    Two-mode squeezed thermal covariances.
amplifier
    Coupled amplifying oscillators with cutoff-regulated quantum noise.
energetics
    Internal energy and power decomposition.
cl_analysis
    Noise power of single damped / inverted oscillators versus the
    white-noise limit.
cli
    Config-driven command-line runner.
"""
__version__ = "0.1.0"

from .model import (CovarianceMatrix, DriveProtocol, SystemParams, ThermalProduct,  # noqa: E402
                    TwoModeSqueezedThermal, build_initial_covariance, drive_value)
from .dynamics import Trajectory, evolve, propagate_fundamental  # noqa: E402
from .entanglement import (criterion_diagnostics, effective_params, log_negativity,  # noqa: E402
                           partial_transpose, symplectic_spectrum)
from .stability import classify, scan_phase_diagram  # noqa: E402

__all__ = [
    "CovarianceMatrix", "DriveProtocol", "SystemParams", "ThermalProduct",
    "TwoModeSqueezedThermal", "build_initial_covariance", "drive_value",
    "Trajectory", "evolve", "propagate_fundamental",
    "criterion_diagnostics", "effective_params", "log_negativity",
    "partial_transpose", "symplectic_spectrum",
    "classify", "scan_phase_diagram",
]

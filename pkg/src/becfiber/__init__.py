"""Collection efficiency of Raman-scattered photons from a Bose-Einstein
condensate into a fiber-coupled Gaussian mode."""

from .geometry_factors import Xi0Breakdown, XiBreakdown, xi, xi0, xi0_forward_closed, xi_brute_3d
from .numerics import Tolerances, erfcx, find_root, integrate_adaptive, maximize_1d
from .optics import BecCloud, GaussianBeam, ScatterGeometry
from .pulses import AmplitudeTrace, PulseEnvelope, epsilon_amplitude
from .rates import channel_rates, critical_angle, n_sweep, optimal_waist, theta_scan
from .tables import ScanTable

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTrace",
    "BecCloud",
    "GaussianBeam",
    "PulseEnvelope",
    "ScanTable",
    "ScatterGeometry",
    "Tolerances",
    "Xi0Breakdown",
    "XiBreakdown",
    "channel_rates",
    "critical_angle",
    "epsilon_amplitude",
    "erfcx",
    "find_root",
    "integrate_adaptive",
    "maximize_1d",
    "n_sweep",
    "optimal_waist",
    "theta_scan",
    "xi",
    "xi0",
    "xi0_forward_closed",
    "xi_brute_3d",
]

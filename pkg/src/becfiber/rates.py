"""Photon-rate prefactors for the two scattering channels, the critical
angle between them, waist optimization and parameter scans.

Rates are reported with the common factor Gamma |epsilon(t)|^2 removed:

    side     I  / (Gamma |eps|^2) = N   (sigma_A/A) xi
    forward  I0 / (Gamma |eps|^2) = N^2 (sigma_A/A) |xi0(theta)|^2
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry_factors import xi, xi0
from .numerics import Maximum, Tolerances, find_root, maximize_1d
from .optics import BecCloud, GaussianBeam, ScatterGeometry
from .tables import ScanTable

__all__ = [
    "ChannelRates",
    "CriticalAngleResult",
    "cross_section_ratio",
    "channel_rates",
    "critical_angle",
    "optimal_waist",
    "theta_scan",
    "n_sweep",
]

log = logging.getLogger(__name__)

DEFAULT_THETA_MAX = 0.1
CRITICAL_SCAN_POINTS = 256


@dataclass(frozen=True)
class ChannelRates:
    side_prefactor: float
    forward_prefactor: float
    cross_section_ratio: float
    xi: float
    xi0_sq: float


@dataclass(frozen=True)
class CriticalAngleResult:
    theta_star: float | None
    dominated_everywhere: bool
    bracket: tuple[float, float]


def cross_section_ratio(beam: GaussianBeam) -> float:
    """sigma_A / A with sigma_A = 6 pi / k^2 and A = pi w0^2 / 4, i.e. 24/(k w0)^2."""
    return 24.0 / (beam.k_bar * beam.w0_bar) ** 2


def channel_rates(geometry: ScatterGeometry, tol: Tolerances | None = None) -> ChannelRates:
    x = xi(geometry, tol).exact
    x0 = xi0(geometry, tol).magnitude_sq
    ratio = cross_section_ratio(geometry.beam)
    n = geometry.n_atoms
    return ChannelRates(
        side_prefactor=n * ratio * x,
        forward_prefactor=n * n * ratio * x0,
        cross_section_ratio=ratio,
        xi=x,
        xi0_sq=x0,
    )


def critical_angle(
    geometry: ScatterGeometry,
    theta_max: float = DEFAULT_THETA_MAX,
    tol: Tolerances | None = None,
    *,
    scan_points: int = CRITICAL_SCAN_POINTS,
) -> CriticalAngleResult:
    """First angle in (0, theta_max] where N |xi0(theta)|^2 drops to xi.

    A uniform scan of ``scan_points`` angles locates the first sign change
    of N |xi0|^2 - xi, which Brent's method then refines. If the forward
    channel does not win at theta=0 the result is ``dominated_everywhere``.
    If it wins over the whole window, ``theta_star`` is None and the bracket
    is the full window.
    """
    if not 0.0 < theta_max <= math.pi / 2:
        raise ValueError(f"theta_max must lie in (0, pi/2], got {theta_max}")
    x = xi(geometry, tol).exact
    n = geometry.n_atoms

    def excess(theta: float) -> float:
        return n * xi0(geometry.with_(theta=theta), tol).magnitude_sq - x

    thetas = np.linspace(0.0, theta_max, max(int(scan_points), 2))
    if excess(0.0) <= 0.0:
        return CriticalAngleResult(None, True, (0.0, float(theta_max)))
    for lo, hi in zip(thetas[:-1], thetas[1:]):
        if excess(hi) <= 0.0:
            theta_star = find_root(excess, float(lo), float(hi), tol)
            return CriticalAngleResult(theta_star, False, (float(lo), float(hi)))
    return CriticalAngleResult(None, False, (0.0, float(theta_max)))


@dataclass(frozen=True)
class WaistOptimum:
    w0_bar: float
    forward_prefactor: float
    at_boundary: bool


def optimal_waist(
    cloud: BecCloud,
    n_atoms: int = 1,
    theta: float = 0.0,
    w_range: tuple[float, float] | None = None,
    tol: Tolerances | None = None,
    *,
    objective_scale: float = 1.0,
) -> WaistOptimum:
    """Waist maximizing the forward prefactor at angle ``theta``.

    The default search range is [0.1, 10] * sigma_bar. ``objective_scale``
    multiplies the objective (it cannot move the argmax) and exists for
    testing that property.
    """
    if w_range is None:
        w_range = (0.1 * cloud.sigma_bar, 10.0 * cloud.sigma_bar)
    lo, hi = w_range
    if not 0.0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got {w_range}")

    def forward(w0: float) -> float:
        geom = ScatterGeometry(GaussianBeam(w0), cloud, theta, n_atoms)
        ratio = cross_section_ratio(geom.beam)
        return objective_scale * n_atoms**2 * ratio * xi0(geom, tol).magnitude_sq

    m: Maximum = maximize_1d(forward, lo, hi, tol)
    return WaistOptimum(m.argmax, m.value / objective_scale, m.at_boundary)


def _map_rows(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def theta_scan(
    geometry: ScatterGeometry,
    thetas: Sequence[float],
    tol: Tolerances | None = None,
    *,
    workers: int = 1,
) -> ScanTable:
    """Rows (theta, |xi0(theta)|^2, xi/N); a failing row is recorded and skipped."""
    if len(thetas) == 0:
        raise ValueError("thetas must be non-empty")
    for t in thetas:
        if not 0.0 <= t <= math.pi:
            raise ValueError(f"theta {t} outside [0, pi]")
    xi_val = xi(geometry, tol)
    xi_over_n = xi_val.exact / geometry.n_atoms

    def row(theta):
        try:
            r = xi0(geometry.with_(theta=float(theta)), tol)
        except ArithmeticError as exc:
            return float(theta), exc, 0.0
        return float(theta), r.magnitude_sq, r.quad_error

    table = ScanTable(["theta", "xi0_sq", "xi_over_n"])
    max_err = xi_val.quad_error
    for theta, val, err in _map_rows(row, list(thetas), workers):
        if isinstance(val, Exception):
            log.warning("theta=%g failed: %s", theta, val)
            table.add_error(theta, str(val))
            continue
        table.add_row(theta, val, xi_over_n)
        max_err = max(max_err, err)
    table.metadata["max_quad_error"] = max_err
    table.metadata["xi"] = xi_val.exact
    return table


def n_sweep(
    geometry_base: ScatterGeometry,
    n_values: Sequence[int],
    theta_max: float = DEFAULT_THETA_MAX,
    tol: Tolerances | None = None,
    *,
    workers: int = 1,
) -> ScanTable:
    """Rows (N, theta_star, found). ``found`` is 0 and theta_star NaN when no
    crossing exists in the window."""
    if len(n_values) == 0:
        raise ValueError("n_values must be non-empty")
    for n in n_values:
        if int(n) != n or n < 1:
            raise ValueError(f"atom numbers must be integers >= 1, got {n}")

    def row(n):
        try:
            res = critical_angle(geometry_base.with_(n_atoms=int(n)), theta_max, tol)
        except ArithmeticError as exc:
            return int(n), exc
        return int(n), res

    table = ScanTable(["n_atoms", "theta_star", "found"])
    for n, res in _map_rows(row, list(n_values), workers):
        if isinstance(res, Exception):
            log.warning("N=%d failed: %s", n, res)
            table.add_error(n, str(res))
            continue
        if res.theta_star is None:
            table.add_row(n, math.nan, 0)
            table.notes.append(
                f"N={n}: " + ("isotropic channel dominates everywhere" if res.dominated_everywhere
                              else "forward channel dominates the whole window")
            )
        else:
            table.add_row(n, res.theta_star, 1)
    return table

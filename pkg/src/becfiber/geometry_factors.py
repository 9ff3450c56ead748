"""Overlap factors between the condensate and the fiber-coupled mode.

``xi`` is the side-scattering factor (atoms left with a recoil
excitation). It depends only on the beam and cloud, not on the drive
angle. ``xi0`` is the forward factor (condensate returns to its initial
state). It is a complex function of the angle between drive and fiber axis.

Both are 1D integrals along the fiber axis, after the transverse Gaussian
integrals have been done analytically. Each comes with an independent
check: a closed form at theta=0 for ``xi0`` and a 3D tensor-grid sum for
``xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import Tolerances, erfcx, integrate_adaptive
from .optics import BecCloud, GaussianBeam, ScatterGeometry, bec_wavefunction, mode_envelope

__all__ = [
    "XiBreakdown",
    "Xi0Breakdown",
    "xi",
    "xi0",
    "xi0_integrand",
    "xi0_forward_closed",
    "xi_brute_3d",
    "xi_mode_overlap",
]

SUPPORT_SIGMAS = 8.0
# Below this the longitudinal Gaussian is treated as a delta function.
SIGMA_Z_COLLAPSE = 1e-6


@dataclass(frozen=True)
class XiBreakdown:
    exact: float
    approx: float
    quad_error: float
    brute: float | None = None


@dataclass(frozen=True)
class Xi0Breakdown:
    value: complex
    quad_error: float
    closed_form: complex | None = None
    approx_magnitude: float | None = None

    @property
    def magnitude_sq(self) -> float:
        return abs(self.value) ** 2


def _xi_approx(beam: GaussianBeam, cloud: BecCloud) -> float:
    w2 = beam.w0_bar**2
    return w2 / (cloud.sigma_bar**2 + w2)


def xi(geometry: ScatterGeometry, tol: Tolerances | None = None) -> XiBreakdown:
    """Side-scattering factor.

    exact = w0^2/(sqrt(2 pi) sigma_z) * int exp(-z^2/2 sigma_z^2)/(sigma^2 + w(z)^2) dz
    approx = w0^2/(sigma^2 + w0^2), valid for sigma_z << z_R.

    Only ``geometry.beam`` and ``geometry.cloud`` are read.
    """
    return _xi(geometry.beam, geometry.cloud, tol)


def _xi(beam: GaussianBeam, cloud: BecCloud, tol: Tolerances | None) -> XiBreakdown:
    approx = _xi_approx(beam, cloud)
    s2, sz = cloud.sigma_bar**2, cloud.sigma_z_bar
    if sz < SIGMA_Z_COLLAPSE:
        return XiBreakdown(exact=approx, approx=approx, quad_error=0.0)

    zr = beam.rayleigh_range
    w02 = beam.w0_bar**2

    def f(z):
        w2 = w02 * (1.0 + (z / zr) ** 2)
        return np.exp(-0.5 * (z / sz) ** 2) / (s2 + w2)

    half = SUPPORT_SIGMAS * sz
    res = integrate_adaptive(f, -half, half, tol, min_panels=8)
    scale = w02 / (math.sqrt(2.0 * math.pi) * sz)
    return XiBreakdown(exact=scale * res.value, approx=approx, quad_error=scale * res.abs_error)


def xi_mode_overlap(geometry: ScatterGeometry, tol: Tolerances | None = None) -> float:
    """Overlap of |phi_BEC|^2 with the intensity |f_k|^2 of the mode function.

    Same reduction as ``xi`` but with the transverse exponent of
    |f_k|^2 = (w0/w)^2 exp(-2 rho^2/w^2), which gives a 4 sigma^2 in the
    denominator instead of sigma^2. Limit for sigma_z << z_R:
    w0^2/(4 sigma^2 + w0^2).
    """
    beam, cloud = geometry.beam, geometry.cloud
    s2, sz = cloud.sigma_bar**2, cloud.sigma_z_bar
    zr, w02 = beam.rayleigh_range, beam.w0_bar**2

    def f(z):
        w2 = w02 * (1.0 + (z / zr) ** 2)
        return np.exp(-0.5 * (z / sz) ** 2) / (4.0 * s2 + w2)

    half = SUPPORT_SIGMAS * sz
    res = integrate_adaptive(f, -half, half, tol, min_panels=8)
    return w02 / (math.sqrt(2.0 * math.pi) * sz) * res.value


def xi0_integrand(geometry: ScatterGeometry):
    """Vectorized z-integrand of ``xi0`` without the z_R/(sqrt(2 pi) sigma_z) prefactor."""
    beam, cloud = geometry.beam, geometry.cloud
    k = beam.k_bar
    zr = beam.rayleigh_range
    s2, sz = cloud.sigma_bar**2, cloud.sigma_z_bar
    sin2 = math.sin(geometry.theta) ** 2
    # Drive wavenumber is 1; k is the emitted (mode) wavenumber.
    dk = math.cos(geometry.theta) - k
    iks2 = 1j * k * s2

    def f(z):
        q = z + 1j * zr
        denom = q + iks2
        expo = -s2 * q * sin2 / (2.0 * denom) + 1j * dk * z - 0.5 * (z / sz) ** 2
        return np.exp(expo) / denom

    return f


def _xi0_omega(geometry: ScatterGeometry) -> float:
    beam, cloud = geometry.beam, geometry.cloud
    k = beam.k_bar
    c = k * cloud.sigma_bar**2
    # Plane-wave mismatch, the sin^2 term's phase drift, and the 1/(q + i k sigma^2) phase.
    return (abs(math.cos(geometry.theta) - k)
            + 0.5 * math.sin(geometry.theta) ** 2
            + 1.0 / (beam.rayleigh_range + c))


def xi0(geometry: ScatterGeometry, tol: Tolerances | None = None) -> Xi0Breakdown:
    """Forward (superradiant) factor.

    xi0(theta) = z_R/(sqrt(2 pi) sigma_z) * int dz 1/(q + i k sigma^2)
        * exp[-k^2 sigma^2 q sin^2(theta)/(2 (q + i k sigma^2))
              + i (cos(theta) - k) z - z^2/(2 sigma_z^2)]

    with q = z + i z_R and the drive wavenumber equal to 1. At theta=0 the
    closed form and its sigma_z << z_R limit are filled in as well.
    """
    beam, cloud = geometry.beam, geometry.cloud
    forward = geometry.theta == 0.0
    closed = approx = None
    if forward:
        w2 = beam.w0_bar**2
        approx = w2 / (2.0 * cloud.sigma_bar**2 + w2)
        if beam.k_bar == 1.0:
            closed = xi0_forward_closed(beam, cloud)

    sz = cloud.sigma_z_bar
    if sz < SIGMA_Z_COLLAPSE:
        value = complex(beam.rayleigh_range * xi0_integrand(geometry)(np.zeros(1))[0])
        return Xi0Breakdown(value, 0.0, closed, approx)

    half = SUPPORT_SIGMAS * sz
    res = integrate_adaptive(xi0_integrand(geometry), -half, half, tol,
                             min_panels=8, omega=_xi0_omega(geometry))
    scale = beam.rayleigh_range / (math.sqrt(2.0 * math.pi) * sz)
    return Xi0Breakdown(complex(scale * res.value), scale * res.abs_error, closed, approx)


def xi0_forward_closed(beam: GaussianBeam, cloud: BecCloud) -> complex:
    """Closed form of xi0 at theta=0 for equal drive and mode wavenumbers.

    -i sqrt(pi/2) (z_R/sigma_z) erfcx((z_R + sigma^2)/(sqrt(2) sigma_z)); the
    scaled erfc absorbs the exp(+arg^2) factor, which overflows otherwise.
    """
    zr = beam.rayleigh_range
    sz = cloud.sigma_z_bar
    arg = (zr + beam.k_bar * cloud.sigma_bar**2) / (math.sqrt(2.0) * sz)
    return -1j * math.sqrt(math.pi / 2.0) * (zr / sz) * erfcx(arg)


def _midpoints(half: float, n: int) -> tuple[np.ndarray, float]:
    h = 2.0 * half / n
    return -half + h * (np.arange(n) + 0.5), h


def xi_brute_3d(geometry: ScatterGeometry, points_per_axis: int = 256, *,
                profile: str = "reduced") -> float:
    """Midpoint tensor-grid integral of |phi_BEC|^2 times a mode intensity.

    The box is [-8 sigma, 8 sigma]^2 x [-8 sigma_z, 8 sigma_z]. The sum runs
    one z-slab at a time, and each slab is reduced with numpy's pairwise
    summation, so the result does not depend on any parallel split.

    ``profile="reduced"`` uses the intensity (w0/w)^2 exp(-rho^2/(2 w^2)),
    which is what the reduced 1D form of ``xi`` integrates.
    ``profile="mode"`` uses |mode_envelope|^2 evaluated directly and
    should be compared with ``xi_mode_overlap``.
    """
    if points_per_axis < 32:
        raise ValueError("points_per_axis must be >= 32")
    if profile not in ("reduced", "mode"):
        raise ValueError(f"unknown profile {profile!r}")
    beam, cloud = geometry.beam, geometry.cloud
    n = int(points_per_axis)
    xs, hx = _midpoints(SUPPORT_SIGMAS * cloud.sigma_bar, n)
    zs, hz = _midpoints(SUPPORT_SIGMAS * cloud.sigma_z_bar, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    rho2 = X**2 + Y**2
    w0 = beam.w0_bar

    slabs = np.empty(n)
    for i, z in enumerate(zs):
        density = bec_wavefunction(cloud, X, Y, z) ** 2
        if profile == "reduced":
            w2 = float(beam.width(z)) ** 2
            intensity = (w0 * w0 / w2) * np.exp(-rho2 / (2.0 * w2))
        else:
            intensity = np.abs(mode_envelope(beam, X, Y, z)) ** 2
        slabs[i] = np.sum(density * intensity)
    return float(np.sum(slabs) * hx * hx * hz)

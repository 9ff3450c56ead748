"""Gaussian fiber mode and Gaussian condensate wavefunctions.

Lengths are dimensionless, measured in units of ``1/k_d`` where ``k_d`` is
the drive wavenumber; a barred symbol such as ``sigma_bar`` means
``k_d * sigma``.

Evaluators accept scalars or numpy arrays for the coordinates and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "GaussianBeam",
    "BecCloud",
    "ScatterGeometry",
    "mode_function",
    "mode_envelope",
    "bec_wavefunction",
    "bec_momentum_wavefunction",
]


@dataclass(frozen=True)
class GaussianBeam:
    """Fiber-coupled Gaussian mode with waist ``w0_bar`` and wavenumber ``k_bar``."""

    w0_bar: float
    k_bar: float = 1.0

    def __post_init__(self):
        if not self.w0_bar > 0:
            raise ValueError(f"waist must be positive, got {self.w0_bar}")
        if not self.k_bar > 0:
            raise ValueError(f"wavenumber must be positive, got {self.k_bar}")

    @property
    def rayleigh_range(self) -> float:
        return 0.5 * self.k_bar * self.w0_bar**2

    def width(self, z):
        """Transverse beam radius w(z)."""
        zr = self.rayleigh_range
        return self.w0_bar * np.sqrt(1.0 + (np.asarray(z) / zr) ** 2)

    def curvature_radius(self, z):
        """Wavefront radius R(z) = z + z_R^2/z (infinite at the waist)."""
        z = np.asarray(z, dtype=float)
        zr = self.rayleigh_range
        with np.errstate(divide="ignore"):
            return z + np.where(z == 0.0, np.inf, zr**2 / np.where(z == 0.0, 1.0, z))

    def gouy_phase(self, z):
        return np.arctan(np.asarray(z) / self.rayleigh_range)

    def q(self, z):
        """Complex beam parameter q(z) = z + i z_R."""
        return np.asarray(z) + 1j * self.rayleigh_range


@dataclass(frozen=True)
class BecCloud:
    """Cylindrically symmetric Gaussian condensate.

    ``sigma_bar`` and ``sigma_z_bar`` are the transverse and longitudinal
    oscillator lengths.
    """

    sigma_bar: float
    sigma_z_bar: float

    def __post_init__(self):
        if not (self.sigma_bar > 0 and self.sigma_z_bar > 0):
            raise ValueError(
                f"oscillator lengths must be positive, got {self.sigma_bar}, {self.sigma_z_bar}"
            )


@dataclass(frozen=True)
class ScatterGeometry:
    """Beam, cloud, drive angle ``theta`` (rad) and atom number.

    ``k_ge_over_kd`` is the emitted-to-drive wavenumber ratio; it is the
    wavenumber of the collecting mode, so it must agree with ``beam.k_bar``.
    Leaving it unset takes it from the beam.
    """

    beam: GaussianBeam
    cloud: BecCloud
    theta: float = 0.0
    n_atoms: int = 1
    k_ge_over_kd: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise TypeError(f"n_atoms must be an integer count, got {self.n_atoms!r}")
        if self.n_atoms < 1:
            raise ValueError(f"n_atoms must be >= 1, got {self.n_atoms}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        if self.k_ge_over_kd is None:
            object.__setattr__(self, "k_ge_over_kd", self.beam.k_bar)
        elif not self.k_ge_over_kd > 0:
            raise ValueError("k_ge_over_kd must be positive")
        elif not math.isclose(self.k_ge_over_kd, self.beam.k_bar, rel_tol=1e-15):
            raise ValueError(
                f"k_ge_over_kd={self.k_ge_over_kd} disagrees with beam.k_bar={self.beam.k_bar}"
            )

    @classmethod
    def symmetric(cls, sigma_bar: float, sigma_z_bar: float, w0_bar: float | None = None,
                  theta: float = 0.0, n_atoms: int = 1, k_ge_over_kd: float = 1.0):
        """Build a geometry, defaulting the waist to sqrt(2)*sigma_bar."""
        if w0_bar is None:
            w0_bar = math.sqrt(2.0) * sigma_bar
        return cls(GaussianBeam(w0_bar, k_ge_over_kd), BecCloud(sigma_bar, sigma_z_bar),
                   theta, n_atoms)

    def with_(self, **changes) -> "ScatterGeometry":
        return replace(self, **changes)


def mode_function(beam: GaussianBeam, x, y, z):
    """Gaussian mode f_k(r) = (z_R/q*(z)) exp(ik[z + rho^2/(2 q*(z))])."""
    k = beam.k_bar
    qc = np.conj(beam.q(z))
    rho2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return (beam.rayleigh_range / qc) * np.exp(1j * k * (np.asarray(z) + rho2 / (2.0 * qc)))


def mode_envelope(beam: GaussianBeam, x, y, z):
    """Slowly varying envelope phi_G = f_k exp(-ikz)."""
    k = beam.k_bar
    qc = np.conj(beam.q(z))
    rho2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return (beam.rayleigh_range / qc) * np.exp(1j * k * rho2 / (2.0 * qc))


def bec_wavefunction(cloud: BecCloud, x, y, z):
    """L2-normalized Gaussian ground state."""
    s, sz = cloud.sigma_bar, cloud.sigma_z_bar
    norm = (2.0 * math.pi) ** -0.75 / (s * math.sqrt(sz))
    rho2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return norm * np.exp(-rho2 / (4.0 * s * s) - np.asarray(z) ** 2 / (4.0 * sz * sz))


def bec_momentum_wavefunction(cloud: BecCloud, px, py, pz):
    """Fourier transform with kernel exp(-i p.r) and no 2*pi prefactor."""
    s, sz = cloud.sigma_bar, cloud.sigma_z_bar
    norm = (8.0 * math.pi) ** 0.75 * s * math.sqrt(sz)
    p2 = np.asarray(px) ** 2 + np.asarray(py) ** 2
    return norm * np.exp(-s * s * p2 - sz * sz * np.asarray(pz) ** 2)

"""Built-in verification suites run by ``becfiber selfcheck``.

Each suite compares a library result against a limit value, a closed form
or an independent oracle and reports pass/fail with a one-line detail.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry_factors import xi, xi0, xi0_forward_closed, xi_brute_3d
from .numerics import Tolerances
from .optics import BecCloud, ScatterGeometry
from .pulses import PulseEnvelope, epsilon_amplitude
from .rates import channel_rates, critical_angle, optimal_waist

# Reference geometry: sigma=50, sigma_z=100, w0=sqrt(2)*50 (sigma_z/z_R = 0.04).
SIGMA, SIGMA_Z = 50.0, 100.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(name: str, fn: Callable[[], tuple[bool, str]], budget: float | None = None) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing suite is a failing suite
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        ok = False
        detail += f"; exceeded {budget:g} s budget"
    return CheckResult(name, ok, detail, dt)


def check_limits(tol: Tolerances | None = None) -> tuple[bool, str]:
    g = ScatterGeometry.symmetric(SIGMA, SIGMA_Z)
    x = xi(g, tol).exact
    x0 = xi0(g, tol).magnitude_sq
    dx = abs(x / (2 / 3) - 1)
    d0 = abs(x0 / 0.25 - 1)
    return dx <= 5e-3 and d0 <= 1e-2, f"xi={x:.6f} (rel {dx:.2e}), |xi0|^2={x0:.6f} (rel {d0:.2e})"


def closed_form_grid():
    sigmas = np.linspace(10.0, 200.0, 5)
    sigma_zs = np.geomspace(10.0, 5000.0, 5)
    return [(s, sz) for s in sigmas for sz in sigma_zs]


def check_closed_form(tol: Tolerances | None = None) -> tuple[bool, str]:
    worst = 0.0
    for s, sz in closed_form_grid():
        g = ScatterGeometry.symmetric(s, sz)
        q = abs(xi0(g, tol).value)
        c = abs(xi0_forward_closed(g.beam, g.cloud))
        worst = max(worst, abs(c - q) / q)
    return worst <= 1e-8, f"max relative deviation {worst:.2e} over 25 geometries"


BRUTE_GEOMETRIES = ((50.0, 100.0), (50.0, 1250.0), (50.0, 5000.0))


def check_brute_force(tol: Tolerances | None = None, points: int = 256) -> tuple[bool, str]:
    worst = 0.0
    for s, sz in BRUTE_GEOMETRIES:
        g = ScatterGeometry.symmetric(s, sz)
        exact = xi(g, tol).exact
        worst = max(worst, abs(xi_brute_3d(g, points) / exact - 1))
    return worst <= 1e-4, f"max relative deviation {worst:.2e} at {points}^3 points"


def check_optimal_waist(tol: Tolerances | None = None) -> tuple[bool, str]:
    opt = optimal_waist(BecCloud(SIGMA, SIGMA_Z), 1, 0.0, None, tol)
    ratio = opt.w0_bar / (math.sqrt(2) * SIGMA)
    return abs(ratio - 1) <= 5e-3, f"w0/(sqrt2 sigma) = {ratio:.6f}"


def check_critical_angle(tol: Tolerances | None = None) -> tuple[bool, str]:
    g = ScatterGeometry.symmetric(SIGMA, SIGMA_Z)
    stars = [critical_angle(g.with_(n_atoms=n), 0.1, tol).theta_star for n in (10, 100, 1000, 10000)]
    n2 = critical_angle(g.with_(n_atoms=2), 0.1, tol)
    exists = all(t is not None for t in stars)
    increasing = exists and all(b > a for a, b in zip(stars, stars[1:]))
    ok = exists and increasing and n2.dominated_everywhere and n2.theta_star is None
    shown = ", ".join("none" if t is None else f"{t:.5f}" for t in stars)
    return ok, f"theta* = [{shown}]; N=2 dominated everywhere: {n2.dominated_everywhere}"


def dense_argmax(sigma: float, sigma_z: float, points: int = 512, theta_max: float = 0.1,
                 tol: Tolerances | None = None) -> tuple[float, float]:
    g = ScatterGeometry.symmetric(sigma, sigma_z)
    thetas = np.linspace(0.0, theta_max, points)
    vals = np.array([xi0(g.with_(theta=float(t)), tol).magnitude_sq for t in thetas])
    i = int(np.argmax(vals))
    return float(thetas[i]), float(vals[i])


def check_displaced_maximum(tol: Tolerances | None = None) -> tuple[bool, str]:
    compact, _ = dense_argmax(SIGMA, SIGMA_Z, tol=tol)
    # sigma_z = 2 z_R for w0 = sqrt(2)*50.
    elongated, _ = dense_argmax(SIGMA, 5000.0, tol=tol)
    return compact == 0.0 and elongated > 0.0, (
        f"argmax theta: compact {compact:.5f}, elongated (sigma_z=2 z_R) {elongated:.5f}"
    )


def check_scaling(tol: Tolerances | None = None) -> tuple[bool, str]:
    g = ScatterGeometry.symmetric(SIGMA, SIGMA_Z, theta=0.02, n_atoms=7)
    r1 = channel_rates(g, tol)
    r2 = channel_rates(g.with_(n_atoms=14), tol)
    side = abs(r2.side_prefactor / (2 * r1.side_prefactor) - 1)
    fwd = abs(r2.forward_prefactor / (4 * r1.forward_prefactor) - 1)
    sides = {channel_rates(g.with_(theta=t), tol).side_prefactor for t in (0.0, 0.3, 1.0)}
    ok = side <= 1e-12 and fwd <= 1e-12 and len(sides) == 1
    return ok, f"side x2 dev {side:.1e}, forward x4 dev {fwd:.1e}, theta-independent: {len(sides) == 1}"


def check_pulses() -> tuple[bool, str]:
    omega0, eta0 = 1.7, 0.6
    t = np.linspace(0.0, 4.0, 401)
    trace = epsilon_amplitude(PulseEnvelope.constant(omega0), PulseEnvelope.constant(eta0), t)
    worst = 0.0
    for tt in (1.0, 2.0, 4.0):
        i = int(np.argmin(np.abs(t - tt)))
        worst = max(worst, abs(trace.epsilon[i] - (-omega0 * eta0 * tt**2 / 2)))

    drive = PulseEnvelope.gaussian(3.0, 0.7, 1.3)
    readout = PulseEnvelope.gaussian(2.0, 0.5, 0.8)
    finals = [epsilon_amplitude(drive, readout, np.linspace(0.0, 6.0, n + 1)).epsilon[-1]
              for n in (50, 100, 200)]
    d1, d2 = abs(finals[1] - finals[0]), abs(finals[2] - finals[1])
    order = math.log2(d1 / d2)
    return worst <= 1e-10 and order >= 2.0, f"constant-envelope error {worst:.1e}, observed order {order:.4f}"


def run_all(tol: Tolerances | None = None, *, brute_points: int = 256) -> list[CheckResult]:
    return [
        _timed("1 limit values", lambda: check_limits(tol), budget=1.0),
        _timed("2 closed form vs quadrature", lambda: check_closed_form(tol), budget=10.0),
        _timed("3 brute-force 3D oracle", lambda: check_brute_force(tol, brute_points), budget=60.0),
        _timed("4 optimal waist", lambda: check_optimal_waist(tol)),
        _timed("5 critical angle vs N", lambda: check_critical_angle(tol)),
        _timed("6 displaced forward maximum", lambda: check_displaced_maximum(tol)),
        _timed("7 atom-number scaling", lambda: check_scaling(tol)),
        _timed("8 pulse amplitude", check_pulses),
    ]

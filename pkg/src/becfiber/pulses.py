"""Perturbative readout amplitude.

    eps(t) = - int_0^t dt' Omega_d(t') int_0^t' dt'' eta(t'')

for a drive Rabi envelope Omega_d and an effective microwave drive eta.
Multiplying |eps(t)|^2 by Gamma gives the single-atom scattering rate that
scales the geometric prefactors in :mod:`becfiber.rates`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "PulseEnvelope",
    "AmplitudeTrace",
    "epsilon_amplitude",
    "perturbative_population",
    "cumulative_trapezoid",
    "load_sampled_envelope",
    "parse_envelope",
]

POINTS_PER_FEATURE = 8
PERTURBATIVE_LIMIT = 0.1


@dataclass(frozen=True)
class PulseEnvelope:
    """Real pulse envelope.

    ``shape`` is one of ``constant``, ``rectangular``, ``gaussian`` or
    ``sampled``. Rectangular pulses take the value 1/2 exactly on their
    edges so that a grid point at the edge integrates without bias; a pulse
    switched on at or before t=0 is fully on at t=0, where the amplitude
    integrals start. Sampled
    envelopes are linearly interpolated and vanish outside their grid.
    """

    shape: str = "constant"
    amplitude_scale: float = 1.0
    t_on: float = 0.0
    t_off: float = 0.0
    t0: float = 0.0
    width: float = 1.0
    sample_times: tuple[float, ...] = ()
    sample_values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.shape == "rectangular":
            if not self.t_on < self.t_off:
                raise ValueError(f"rectangular pulse needs t_on < t_off, got {self.t_on}, {self.t_off}")
        elif self.shape == "gaussian":
            if not self.width > 0:
                raise ValueError("gaussian pulse width must be positive")
        elif self.shape == "sampled":
            t = np.asarray(self.sample_times, dtype=float)
            if t.size < 2 or t.size != len(self.sample_values):
                raise ValueError("sampled envelope needs >= 2 (time, value) pairs")
            if np.any(np.diff(t) <= 0):
                raise ValueError("sampled envelope times must be strictly increasing")
        elif self.shape != "constant":
            raise ValueError(f"unknown envelope shape {self.shape!r}")

    @classmethod
    def constant(cls, amplitude: float = 1.0) -> "PulseEnvelope":
        return cls("constant", amplitude)

    @classmethod
    def rectangular(cls, t_on: float, t_off: float, amplitude: float = 1.0) -> "PulseEnvelope":
        return cls("rectangular", amplitude, t_on=t_on, t_off=t_off)

    @classmethod
    def gaussian(cls, t0: float, width: float, amplitude: float = 1.0) -> "PulseEnvelope":
        return cls("gaussian", amplitude, t0=t0, width=width)

    @classmethod
    def sampled(cls, times, values, amplitude: float = 1.0) -> "PulseEnvelope":
        return cls("sampled", amplitude,
                   sample_times=tuple(float(t) for t in times),
                   sample_values=tuple(float(v) for v in values))

    def scaled(self, factor: float) -> "PulseEnvelope":
        return replace(self, amplitude_scale=self.amplitude_scale * factor)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a = self.amplitude_scale
        if self.shape == "constant":
            return np.full_like(t, a)
        if self.shape == "rectangular":
            if self.t_on <= 0.0:
                inside = (t >= self.t_on) & (t < self.t_off)
                edge = t == self.t_off
            else:
                inside = (t > self.t_on) & (t < self.t_off)
                edge = (t == self.t_on) | (t == self.t_off)
            return a * (inside + 0.5 * edge)
        if self.shape == "gaussian":
            return a * np.exp(-0.5 * ((t - self.t0) / self.width) ** 2)
        return a * np.interp(t, self.sample_times, self.sample_values, left=0.0, right=0.0)

    def feature_width(self) -> float | None:
        """Shortest time scale of the envelope, or None if it has none."""
        if self.shape == "rectangular":
            return self.t_off - self.t_on
        if self.shape == "gaussian":
            return self.width
        return None


@dataclass
class AmplitudeTrace:
    times: np.ndarray
    epsilon: np.ndarray
    n_atoms: int = 1
    warnings: list[str] = field(default_factory=list)

    def population(self) -> np.ndarray:
        return perturbative_population(self)

    def perturbative_violations(self, n_atoms: int | None = None) -> np.ndarray:
        """Mask of times where N |eps|^2 exceeds the perturbative limit."""
        n = self.n_atoms if n_atoms is None else n_atoms
        return n * self.population() > PERTURBATIVE_LIMIT


def cumulative_trapezoid(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Running trapezoid integral starting at 0."""
    out = np.zeros(np.broadcast(y, t).shape, dtype=np.result_type(y, float))
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def epsilon_amplitude(drive: PulseEnvelope, readout: PulseEnvelope, times,
                      n_atoms: int = 1) -> AmplitudeTrace:
    """Nested cumulative trapezoid of the two envelopes on ``times``.

    ``drive`` is the optical Rabi envelope Omega_d(t) and ``readout`` the
    microwave drive eta(t). ``times`` must start at 0 and increase strictly.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("times must be a 1D grid with at least 2 points")
    if t[0] != 0.0:
        raise ValueError("times must start at 0")
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise ValueError("times must be strictly increasing")

    inner = cumulative_trapezoid(readout(t), t)
    eps = -cumulative_trapezoid(drive(t) * inner, t)

    warnings = []
    for name, env in (("drive", drive), ("readout", readout)):
        width = env.feature_width()
        if width is not None and width / dt.max() < POINTS_PER_FEATURE:
            warnings.append(
                f"{name} envelope under-resolved: {width / dt.max():.2g} points per feature "
                f"(want >= {POINTS_PER_FEATURE})"
            )
    trace = AmplitudeTrace(t, eps.astype(complex), n_atoms, warnings)
    if trace.perturbative_violations().any():
        trace.warnings.append(
            f"N |eps|^2 exceeds {PERTURBATIVE_LIMIT}; the perturbative amplitude is unreliable"
        )
    return trace


def perturbative_population(trace: AmplitudeTrace) -> np.ndarray:
    return np.abs(trace.epsilon) ** 2


def load_sampled_envelope(path: str | Path, amplitude: float = 1.0) -> PulseEnvelope:
    """Read a sampled envelope.

    Plain text: two whitespace- or comma-separated columns (time, amplitude)
    with ``#`` comments. JSON: a table as written by ScanTable, whose first
    two columns are used.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        rows = json.loads(path.read_text(encoding="utf-8"))["rows"]
        data = np.array([[r[0], r[1]] for r in rows], dtype=float)
    else:
        text = path.read_text(encoding="utf-8").replace(",", " ")
        data = np.loadtxt(text.splitlines(), comments="#", ndmin=2)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: need two columns (time, amplitude)")
    return PulseEnvelope.sampled(data[:, 0], data[:, 1], amplitude)


def parse_envelope(spec: str) -> PulseEnvelope:
    """Parse an envelope spec.

    ``const:A``, ``rect:T_ON:T_OFF[:A]``, ``gauss:T0:WIDTH[:A]`` or
    ``file:PATH[:A]``.
    """
    kind, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "const":
            return PulseEnvelope.constant(float(parts[0]) if parts else 1.0)
        if kind == "rect":
            amp = float(parts[2]) if len(parts) > 2 else 1.0
            return PulseEnvelope.rectangular(float(parts[0]), float(parts[1]), amp)
        if kind == "gauss":
            amp = float(parts[2]) if len(parts) > 2 else 1.0
            return PulseEnvelope.gaussian(float(parts[0]), float(parts[1]), amp)
        if kind == "file":
            amp = 1.0
            path = rest
            head, sep, tail = rest.rpartition(":")
            if sep:
                try:
                    amp = float(tail)
                    path = head
                except ValueError:
                    pass
            return load_sampled_envelope(path, amp)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad envelope spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown envelope kind in {spec!r}")

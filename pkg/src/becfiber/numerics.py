"""Numerical substrate: scaled complementary error function, adaptive
Gauss-Kronrod quadrature, bracketed root finding and 1D maximization.

All routines are pure functions of their arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "Tolerances",
    "QuadratureResult",
    "Maximum",
    "QuadratureError",
    "BracketError",
    "erfcx",
    "integrate_adaptive",
    "find_root",
    "maximize_1d",
]

_SQRT_PI = math.sqrt(math.pi)
# Below this 2*exp(x^2) overflows a double.
_ERFCX_NEG_LIMIT = -26.628
# Switch from exp(x^2)*erfc(x) to the continued fraction.
_ERFCX_CF_START = 3.0


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_evaluations: int = 1_000_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_evaluations < _GK_POINTS:
            raise ValueError(f"max_evaluations must allow one panel ({_GK_POINTS} points)")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float
    abs_error: float
    evaluations: int


class Maximum(NamedTuple):
    argmax: float
    value: float
    at_boundary: bool


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of evaluations above tolerance.

    The best available estimate is kept in ``result``.
    """

    def __init__(self, message: str, result: QuadratureResult):
        super().__init__(message)
        self.result = result


class BracketError(ValueError):
    pass


# ---------------------------------------------------------------------------
# erfcx


def _erfcx_cf(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    # evaluated with the modified Lentz algorithm.
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    n = 1
    while True:
        a = 0.5 * n
        d = x + a * d
        d = 1.0 / (d if d != 0.0 else tiny)
        c = x + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16 or n > 5000:
            break
        n += 1
    return 1.0 / (_SQRT_PI * f)


def erfcx(x: float) -> float:
    """Scaled complementary error function ``exp(x**2) * erfc(x)``.

    Accurate to about 1e-15 relative for ``x >= 0``. Negative arguments use
    the reflection ``2 exp(x**2) - erfcx(-x)``.

    Raises
    ------
    ValueError
        If ``x`` is NaN.
    OverflowError
        If ``x`` is so negative that the result is not representable.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("erfcx: NaN argument")
    if x < 0.0:
        if x < _ERFCX_NEG_LIMIT:
            raise OverflowError(f"erfcx({x}) overflows")
        return 2.0 * math.exp(x * x) - erfcx(-x)
    if math.isinf(x):
        return 0.0
    if x < _ERFCX_CF_START:
        return math.exp(x * x) * math.erfc(x)
    if x > 1e8:
        # Continued fraction has converged to its first term long before this.
        return 1.0 / (_SQRT_PI * x)
    return _erfcx_cf(x)


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for the nodes _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node set on [-1, 1] and matching weights.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _G_WEIGHTS[_i] = _w
    _G_WEIGHTS[14 - _i] = _w
_G_WEIGHTS[7] = _WG[3]
_GK_POINTS = 15


def _gk_panels(f, lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel())).reshape(x.shape)
    kronrod = half * (y @ _K_WEIGHTS)
    gauss = half * (y @ _G_WEIGHTS)
    return kronrod, np.abs(kronrod - gauss)


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: Tolerances | None = None,
    *,
    min_panels: int = 1,
    omega: float = 0.0,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` with adaptive Gauss-Kronrod 7/15.

    ``f`` must be vectorized: it receives a 1D array of abscissae and
    returns an array of the same length (real or complex).

    ``omega`` is the largest angular frequency of any oscillating factor in
    the integrand. The interval is first cut uniformly so that every
    oscillation period spans at least four panels, then panels whose
    Kronrod-Gauss difference exceeds their share of the tolerance are
    bisected until the total error estimate satisfies
    ``err <= max(abs_tol, rel_tol * |value|)``.
    """
    tol = tol or Tolerances()
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")

    n0 = max(int(min_panels), 1)
    if omega > 0.0:
        n0 = max(n0, math.ceil(4.0 * (b - a) * abs(omega) / (2.0 * math.pi)))
    # Leave room for at least one round of refinement.
    n0 = min(n0, max(tol.max_evaluations // (2 * _GK_POINTS), 1))

    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk_panels(f, lo, hi)
    evaluations = _GK_POINTS * n0
    width = b - a

    while True:
        total = vals.sum()
        err = float(errs.sum())
        target = max(tol.abs_tol, tol.rel_tol * abs(total))
        if err <= target:
            return QuadratureResult(_as_scalar(total), err, evaluations)

        # Local criterion: each panel gets a share of the budget
        # proportional to its width; always split the worst one.
        share = target * (hi - lo) / width
        bad = errs > share
        bad[np.argmax(errs)] = True
        n_bad = int(bad.sum())
        if evaluations + 2 * _GK_POINTS * n_bad > tol.max_evaluations:
            raise QuadratureError(
                f"integrate_adaptive did not converge on [{a}, {b}]: "
                f"error estimate {err:.3g} > {target:.3g} after {evaluations} evaluations",
                QuadratureResult(_as_scalar(total), err, evaluations),
            )
        blo, bhi = lo[bad], hi[bad]
        bmid = 0.5 * (blo + bhi)
        new_lo = np.concatenate([blo, bmid])
        new_hi = np.concatenate([bmid, bhi])
        nv, ne = _gk_panels(f, new_lo, new_hi)
        evaluations += 2 * _GK_POINTS * n_bad
        keep = ~bad
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])


def _as_scalar(v):
    v = complex(v) if np.iscomplexobj(v) else float(v)
    return v


# ---------------------------------------------------------------------------
# root finding and maximization


def find_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerances | None = None,
) -> float:
    """Brent's method on a sign-changing bracket ``[lo, hi]``.

    Every iterate stays inside the current bracket; the interpolation step
    falls back to bisection whenever it would not shrink the bracket fast
    enough.
    """
    tol = tol or Tolerances()
    a, b = float(lo), float(hi)
    fa, fb = g(a), g(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: g={fa:.3g}, {fb:.3g}")

    c, fc = a, fa
    d = e = b - a
    eps = np.finfo(float).eps
    for _ in range(500):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        xtol = 2.0 * eps * abs(b) + 0.5 * tol.rel_tol * abs(b)
        m = 0.5 * (c - b)
        if abs(fb) <= tol.abs_tol or abs(m) <= xtol:
            return b
        if abs(e) >= xtol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(xtol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > xtol else math.copysign(xtol, m)
        fb = g(b)
    return b


_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


def _brent_max(g, a: float, b: float, xtol: float):
    """Brent's parabolic/golden-section maximizer on [a, b]."""
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = g(x)
    d = e = 0.0
    eps = math.sqrt(np.finfo(float).eps)
    for _ in range(500):
        m = 0.5 * (a + b)
        tol1 = eps * abs(x) + xtol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fv - fx)
            q = (x - v) * (fw - fx)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = math.copysign(tol1, m - x)
                use_golden = False
        if use_golden:
            e = (b - x) if x < m else (a - x)
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = g(u)
        if fu >= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu >= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu >= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def maximize_1d(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerances | None = None,
    *,
    scan_points: int = 64,
) -> Maximum:
    """Maximize ``g`` on ``[lo, hi]``.

    A uniform pre-scan of ``scan_points`` (at least 64) locates the best
    sample; Brent's method then refines inside the neighbouring cells.
    ``at_boundary`` is set when the maximizer sits on ``lo`` or ``hi``.
    """
    tol = tol or Tolerances()
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    n = max(int(scan_points), 64)
    xs = np.linspace(lo, hi, n)
    ys = np.array([g(x) for x in xs])
    i = int(np.argmax(ys))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, n - 1)]
    xtol = tol.rel_tol * (hi - lo)
    x, fx = _brent_max(g, a, b, xtol)

    best_x, best_f = x, fx
    for edge in (lo, hi):
        if edge in (a, b):
            fe = ys[0] if edge == lo else ys[-1]
            if fe >= best_f:
                best_x, best_f = edge, fe
    if ys[i] > best_f:
        best_x, best_f = xs[i], ys[i]
    edge_tol = max(xtol, 1e-12 * abs(hi - lo))
    at_boundary = abs(best_x - lo) <= edge_tol or abs(best_x - hi) <= edge_tol
    if at_boundary:
        best_x = lo if abs(best_x - lo) <= abs(best_x - hi) else hi
    return Maximum(float(best_x), float(best_f), bool(at_boundary))

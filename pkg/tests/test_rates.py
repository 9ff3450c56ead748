import math

import numpy as np
import pytest

from becfiber.geometry_factors import xi, xi0
from becfiber.optics import BecCloud, GaussianBeam, ScatterGeometry
from becfiber.rates import (
    channel_rates,
    critical_angle,
    cross_section_ratio,
    n_sweep,
    optimal_waist,
    theta_scan,
)

REF = ScatterGeometry.symmetric(50.0, 100.0)


def test_cross_section_ratio():
    # sigma_A = 6 pi/k^2 over A = pi w0^2/4.
    w = 50 * math.sqrt(2)
    assert cross_section_ratio(GaussianBeam(w)) == pytest.approx((6 * math.pi) / (math.pi * w * w / 4), rel=1e-15)
    assert cross_section_ratio(GaussianBeam(w)) == pytest.approx(4.8e-3, rel=1e-12)


def test_forward_to_side_ratio_at_n10():
    r = channel_rates(REF.with_(n_atoms=10))
    assert r.forward_prefactor / r.side_prefactor == pytest.approx(10 * 0.25 / (2 / 3), rel=2e-2)


def test_forward_to_side_ratio_single_atom():
    r = channel_rates(REF)
    assert r.forward_prefactor / r.side_prefactor == pytest.approx(3 / 8, rel=2e-2)


def test_atom_number_scaling():
    g = REF.with_(theta=0.02, n_atoms=7)
    r1, r2 = channel_rates(g), channel_rates(g.with_(n_atoms=14))
    assert r2.side_prefactor / r1.side_prefactor == pytest.approx(2.0, rel=1e-12)
    assert r2.forward_prefactor / r1.forward_prefactor == pytest.approx(4.0, rel=1e-12)


def test_side_prefactor_bitwise_theta_independent():
    sides = {channel_rates(REF.with_(theta=t, n_atoms=3)).side_prefactor for t in (0.0, 0.01, 0.3, 1.0, math.pi)}
    assert len(sides) == 1


# -- critical angle -----------------------------------------------------------


def test_n2_dominated_everywhere():
    res = critical_angle(REF.with_(n_atoms=2))
    assert res.dominated_everywhere and res.theta_star is None


def test_n3_crossing_against_dense_scan():
    g = REF.with_(n_atoms=3)
    res = critical_angle(g)
    x = xi(g).exact
    thetas = np.linspace(0.0, 0.1, 2001)
    excess = np.array([3 * xi0(g.with_(theta=float(t))).magnitude_sq - x for t in thetas])
    first = int(np.argmax(excess <= 0))
    assert excess[first] <= 0 < excess[first - 1]
    assert thetas[first - 1] <= res.theta_star <= thetas[first]


def test_crossing_property():
    g = REF.with_(n_atoms=100)
    t = critical_angle(g).theta_star
    assert 100 * xi0(g.with_(theta=t)).magnitude_sq == pytest.approx(xi(g).exact, rel=1e-8)


def test_theta_star_increases_with_n():
    stars = [critical_angle(REF.with_(n_atoms=n)).theta_star for n in (10, 100, 1000, 10_000)]
    assert all(s is not None for s in stars)
    assert all(b > a for a, b in zip(stars, stars[1:]))


def test_no_crossing_in_window():
    res = critical_angle(REF.with_(n_atoms=10_000), theta_max=0.01)
    assert res.theta_star is None and not res.dominated_everywhere


def test_critical_angle_rejects_window():
    with pytest.raises(ValueError):
        critical_angle(REF, theta_max=0.0)


# -- waist --------------------------------------------------------------------


def test_optimal_waist():
    opt = optimal_waist(BecCloud(50.0, 100.0))
    assert opt.w0_bar / (math.sqrt(2) * 50) == pytest.approx(1.0, abs=5e-3)
    assert not opt.at_boundary


def test_optimal_waist_boundary():
    opt = optimal_waist(BecCloud(50.0, 100.0), w_range=(150.0, 500.0))
    assert opt.at_boundary and opt.w0_bar == 150.0


def test_optimal_waist_scale_invariant():
    a = optimal_waist(BecCloud(50.0, 100.0))
    b = optimal_waist(BecCloud(50.0, 100.0), objective_scale=7.3)
    assert b.w0_bar == pytest.approx(a.w0_bar, abs=1e-6)
    assert b.forward_prefactor == pytest.approx(a.forward_prefactor, rel=1e-10)


def test_optimal_waist_bad_range():
    with pytest.raises(ValueError):
        optimal_waist(BecCloud(1.0, 1.0), w_range=(2.0, 1.0))


# -- scans --------------------------------------------------------------------


def test_theta_scan_rows():
    thetas = np.linspace(0.0, 0.1, 11)
    t = theta_scan(REF.with_(n_atoms=4), thetas)
    assert t.columns == ["theta", "xi0_sq", "xi_over_n"]
    assert len(t) == 11
    assert t.column("theta") == pytest.approx(list(thetas))
    assert t.column("xi0_sq")[3] == xi0(REF.with_(theta=float(thetas[3]))).magnitude_sq
    assert set(t.column("xi_over_n")) == {xi(REF).exact / 4}
    assert t.metadata["xi"] == xi(REF).exact
    assert 0 <= t.metadata["max_quad_error"] < 1e-8


def test_theta_scan_workers_preserve_order():
    thetas = list(np.linspace(0.0, 0.1, 24))
    serial = theta_scan(REF, thetas)
    threaded = theta_scan(REF, thetas, workers=4)
    assert serial.rows == threaded.rows


def test_theta_scan_validation():
    with pytest.raises(ValueError):
        theta_scan(REF, [])
    with pytest.raises(ValueError):
        theta_scan(REF, [-0.1])


def test_n_sweep():
    t = n_sweep(REF, [1, 10, 100])
    assert t.rows[0][0] == 1 and math.isnan(t.rows[0][1]) and t.rows[0][2] == 0
    assert t.rows[1][2] == 1 and t.rows[2][2] == 1
    assert t.rows[2][1] > t.rows[1][1]
    assert any("N=1" in note for note in t.notes)


def test_n_sweep_deterministic():
    a = n_sweep(REF, [10, 100, 1000], workers=3)
    b = n_sweep(REF, [10, 100, 1000])
    assert a.rows == b.rows
    assert a.to_csv() == b.to_csv()


def test_n_sweep_validation():
    with pytest.raises(ValueError):
        n_sweep(REF, [0])
    with pytest.raises(ValueError):
        n_sweep(REF, [2.5])

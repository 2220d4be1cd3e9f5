"""Mass models: inertia closed forms, the inertia solver, densities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cslrot.geometry import (HalfCylinder, HomogeneousDisk,
                             InvalidGeometryError, PeriodicAnnulus,
                             SectorRing, TwoAnnuli, density_at,
                             moment_of_inertia, solve_inner_radius)

RHO, DRHO = 1.2e3, 19.3e3


def table1_row1_annulus():
    r = solve_inner_radius(9e-6, RHO, DRHO, 100, 5e-3, 2.0, 1e-3)
    return PeriodicAnnulus(rho=RHO, delta_rho=DRHO, r_inner=r, r_outer=2 * r,
                           n_sectors=100, alpha=5e-3, height=1e-3)


def mc_inertia(model, extent, n_samples, seed=7):
    """Monte Carlo moment of inertia from the pointwise density."""
    rng = np.random.default_rng(seed)
    xy = rng.uniform(-extent, extent, size=(2, n_samples))
    r = np.hypot(xy[0], xy[1])
    theta = np.mod(np.arctan2(xy[1], xy[0]), 2 * np.pi)
    rho = density_at(model, r, theta)
    area = (2 * extent) ** 2
    return float(np.mean(rho * r ** 2) * area * model.height)


class TestMomentOfInertia:
    def test_homogeneous_disk_closed_form(self):
        disk = HomogeneousDisk(rho=1.0, r_outer=1.0, height=1.0)
        assert moment_of_inertia(disk) == pytest.approx(math.pi / 2, rel=1e-15)

    def test_bare_half_cylinder(self):
        hc = HalfCylinder(rho=0.0, delta_rho=1.0, radius=1.0, height=1.0)
        assert moment_of_inertia(hc) == pytest.approx(math.pi / 4, rel=1e-15)

    def test_annulus_against_monte_carlo(self):
        model = table1_row1_annulus()
        exact = moment_of_inertia(model)
        approx = mc_inertia(model, model.r_outer, 10_000_000)
        assert approx == pytest.approx(exact, rel=1e-3)
        assert exact == pytest.approx(9e-6, rel=1e-12)

    def test_two_annuli_against_monte_carlo(self):
        model = TwoAnnuli(rho=RHO, delta_rho=DRHO, r_core=1.05e-2,
                          r_outer_total=2.70e-2,
                          ring_inner=SectorRing(1.30e-2, 2.30e-2, 120),
                          ring_outer=SectorRing(2.35e-2, 2.60e-2, 18),
                          height=5.4e-5)
        exact = moment_of_inertia(model)
        approx = mc_inertia(model, model.r_outer_total, 10_000_000)
        assert approx == pytest.approx(exact, rel=2e-3)

    def test_additive_over_rings(self):
        model = TwoAnnuli(rho=0.0, delta_rho=DRHO, r_core=0.0,
                          r_outer_total=3.0e-2,
                          ring_inner=SectorRing(1.0e-2, 1.5e-2, 6),
                          ring_outer=SectorRing(2.0e-2, 2.5e-2, 10),
                          height=1e-3)
        ring1 = PeriodicAnnulus(rho=0.0, delta_rho=DRHO, r_inner=1.0e-2,
                                r_outer=1.5e-2, n_sectors=6,
                                alpha=math.pi / 6, height=1e-3)
        ring2 = PeriodicAnnulus(rho=0.0, delta_rho=DRHO, r_inner=2.0e-2,
                                r_outer=2.5e-2, n_sectors=10,
                                alpha=math.pi / 10, height=1e-3)
        # zero base: rings are disjoint density components
        split = (moment_of_inertia(ring1)
                 - 0.5 * math.pi * 0.0 * 1e-3 * (1.5e-2) ** 4
                 + moment_of_inertia(ring2))
        assert moment_of_inertia(model) == pytest.approx(split, rel=1e-12)

    def test_invariant_rejection(self):
        with pytest.raises(InvalidGeometryError):
            PeriodicAnnulus(rho=1.0, delta_rho=1.0, r_inner=2.0, r_outer=1.0,
                            n_sectors=4, alpha=0.1, height=1.0)
        with pytest.raises(InvalidGeometryError):
            PeriodicAnnulus(rho=1.0, delta_rho=1.0, r_inner=0.5, r_outer=1.0,
                            n_sectors=4, alpha=3.0, height=1.0)
        with pytest.raises(InvalidGeometryError):
            TwoAnnuli(rho=1.0, delta_rho=1.0, r_core=0.1, r_outer_total=1.0,
                      ring_inner=SectorRing(0.5, 0.9, 4),
                      ring_outer=SectorRing(0.6, 0.95, 6), height=1.0)


class TestSolveInnerRadius:
    def test_homogeneous_limit(self):
        r = solve_inner_radius(1e-5, RHO, 0.0, 10, 0.1, 3.0, 1e-3)
        expect = (2 * 1e-5 / (math.pi * RHO * 1e-3 * 3.0 ** 4)) ** 0.25
        assert r == pytest.approx(expect, rel=1e-14)

    def test_table_row_matches_bisection(self):
        args = dict(rho=RHO, delta_rho=DRHO, n=100, alpha=5e-3, h=1e-3)
        target = 9e-6
        r = solve_inner_radius(target, args["rho"], args["delta_rho"],
                               args["n"], args["alpha"], 2.0, args["h"])

        def inertia_of(rr):
            m = PeriodicAnnulus(rho=RHO, delta_rho=DRHO, r_inner=rr,
                                r_outer=2 * rr, n_sectors=100, alpha=5e-3,
                                height=1e-3)
            return moment_of_inertia(m)

        lo, hi = 1e-4, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if inertia_of(mid) < target:
                lo = mid
            else:
                hi = mid
        assert r == pytest.approx(0.5 * (lo + hi), rel=1e-10)

    def test_quarter_power_scaling(self):
        r1 = solve_inner_radius(1e-6, RHO, DRHO, 8, 0.3, 2.0, 1e-3)
        r2 = solve_inner_radius(2e-6, RHO, DRHO, 8, 0.3, 2.0, 1e-3)
        assert r2 / r1 == pytest.approx(2 ** 0.25, rel=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(i_target=st.floats(min_value=1e-9, max_value=1e-2),
           eps=st.floats(min_value=1.05, max_value=30.0),
           n=st.integers(min_value=1, max_value=300),
           frac=st.floats(min_value=1e-3, max_value=1.0),
           h=st.floats(min_value=1e-5, max_value=1e-1))
    def test_roundtrip(self, i_target, eps, n, frac, h):
        alpha = frac * 2 * math.pi / n
        r = solve_inner_radius(i_target, RHO, DRHO, n, alpha, eps, h)
        model = PeriodicAnnulus(rho=RHO, delta_rho=DRHO, r_inner=r,
                                r_outer=eps * r, n_sectors=n, alpha=alpha,
                                height=h)
        assert moment_of_inertia(model) == pytest.approx(i_target, rel=1e-12)

    def test_rejects_epsilon_at_most_one(self):
        with pytest.raises(InvalidGeometryError):
            solve_inner_radius(1e-6, RHO, DRHO, 4, 0.1, 1.0, 1e-3)


class TestDensityAt:
    def test_annulus_sector_and_gap(self):
        m = PeriodicAnnulus(rho=RHO, delta_rho=DRHO, r_inner=1.0,
                            r_outer=2.0, n_sectors=8, alpha=0.3, height=1.0)
        assert density_at(m, 1.5, 0.1) == RHO + DRHO
        assert density_at(m, 1.5, 0.3 + 1e-9) == RHO
        assert density_at(m, 2.5, 0.1) == 0.0
        assert density_at(m, 0.5, 0.1) == RHO      # light inner disk

    def test_half_cylinder(self):
        m = HalfCylinder(rho=0.5, delta_rho=2.0, radius=1.0, height=1.0)
        assert density_at(m, 0.4, 1.0) == 2.5
        assert density_at(m, 0.4, 4.0) == 0.5
        assert density_at(m, 1.1, 1.0) == 0.0

    def test_mass_against_analytic(self, rng):
        m = PeriodicAnnulus(rho=RHO, delta_rho=DRHO, r_inner=0.6,
                            r_outer=1.0, n_sectors=12, alpha=0.2, height=1.0)
        xy = rng.uniform(-1.0, 1.0, size=(2, 4_000_000))
        r = np.hypot(xy[0], xy[1])
        th = np.mod(np.arctan2(xy[1], xy[0]), 2 * np.pi)
        mass_mc = density_at(m, r, th).mean() * 4.0 * m.height
        mass_exact = (RHO * math.pi * 1.0 ** 2
                      + DRHO * 12 * 0.2 / 2 * (1.0 ** 2 - 0.6 ** 2)) * m.height
        assert mass_mc == pytest.approx(mass_exact, rel=2e-3)

    def test_two_annuli_hole(self):
        m = TwoAnnuli(rho=RHO, delta_rho=DRHO, r_core=1.05e-2,
                      r_outer_total=2.70e-2,
                      ring_inner=SectorRing(1.30e-2, 2.30e-2, 120),
                      ring_outer=SectorRing(2.35e-2, 2.60e-2, 18),
                      height=5.4e-5)
        assert density_at(m, 0.5e-2, 0.1) == 0.0
        assert density_at(m, 1.1e-2, 0.1) == RHO
        assert density_at(m, 1.5e-2, 1e-4) == RHO + DRHO
        assert density_at(m, 2.5e-2, 1e-4) == RHO + DRHO

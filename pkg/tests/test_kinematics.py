import math

import numpy as np
import pytest
from scipy.optimize import brentq

from wigner_drift.errors import HorizonError, InvalidInputError
from wigner_drift.kinematics import (
    CircularOrbit,
    Trajectory,
    chi_generator,
    circular_lambda,
    circular_lambda_closed_form,
    circular_trajectory,
    four_acceleration,
    inertial_line,
    lambda_generator,
    local_vectors,
    orbit_state,
)
from wigner_drift.spacetime import ETA, Schwarzschild

V_SET = (0.0, 0.3, 0.8, 0.99)


def random_orbits(rng, n, rmin=1.01, rmax=100.0):
    rs = rng.uniform(rmin, rmax, n)
    vs = rng.uniform(0.0, 0.99, n)
    return [CircularOrbit(r, v) for r, v in zip(rs, vs)]


class TestOrbitState:
    def test_static_observer(self):
        point, u = orbit_state(CircularOrbit(2.0, 0.0))
        assert np.allclose(u, [math.sqrt(2.0), 0.0, 0.0, 0.0], rtol=1e-15)

    def test_v08(self):
        r = 3.0
        point, u = orbit_state(CircularOrbit(r, 0.8))
        sf = math.sqrt(1 - 1 / r)
        assert u[0] == pytest.approx(5 / (3 * sf), rel=1e-14)
        assert u[3] == pytest.approx(4 / (3 * r), rel=1e-14)

    def test_normalisation(self, rng):
        st = Schwarzschild()
        for orb in random_orbits(rng, 200):
            point, u = orbit_state(orb, rng.uniform(0, 50))
            assert u @ st.metric(point) @ u == pytest.approx(-1.0, abs=1e-12)

    def test_advances_along_phi(self):
        orb = CircularOrbit(4.0, 0.5, phi0=0.1)
        point, u = orbit_state(orb, 2.0)
        assert point.phi == pytest.approx(0.1 + 2.0 * u[3])
        assert point.t == pytest.approx(2.0 * u[0])

    def test_invalid(self):
        with pytest.raises(HorizonError):
            CircularOrbit(1.0, 0.5)
        with pytest.raises(InvalidInputError):
            CircularOrbit(2.0, 1.0)
        with pytest.raises(InvalidInputError):
            CircularOrbit(2.0, 0.5, direction=0)


class TestAcceleration:
    def test_geodesic_radius_root(self):
        # oracle: root-find a^r(v) = 0, then compare with tanh^2 xi = r_s / (2 r f)
        for r in (2.0, 3.0, 7.5, 40.0):
            def ar(v):
                point, u = orbit_state(CircularOrbit(r, v))
                return four_acceleration(point, u)[1]

            v0 = brentq(ar, 1e-6, 0.999, xtol=1e-15)
            f = 1 - 1 / r
            assert v0 ** 2 == pytest.approx(1 / (2 * r * f), rel=1e-10)

    def test_only_radial_component(self, rng):
        for orb in random_orbits(rng, 50):
            point, u = orbit_state(orb)
            a = four_acceleration(point, u)
            # theta picks up cos(pi/2) rounding, nothing more
            assert np.max(np.abs(a[[0, 2, 3]])) < 1e-15 * max(1.0, abs(a[1]))

    def test_static_observer_weight(self):
        # oracle: the static observer's local acceleration is d/d(proper radial
        # distance) of ln(redshift factor), by finite differences
        for r in (1.2, 2.0, 10.0):
            point, u = orbit_state(CircularOrbit(r, 0.0))
            a1 = local_vectors(point, u).a[1]
            h = 1e-6 * r
            dln = (math.log(math.sqrt(1 - 1 / (r + h))) - math.log(math.sqrt(1 - 1 / (r - h)))) / (2 * h)
            assert a1 == pytest.approx(math.sqrt(1 - 1 / r) * dln, rel=1e-8)
            fp = 1 / r ** 2
            assert a1 == pytest.approx(fp / (2 * math.sqrt(1 - 1 / r)), rel=1e-14)

    def test_flat_centripetal(self):
        for r, v in ((1.0, 0.5), (3.0, 0.8)):
            orb = CircularOrbit(r, v, r_s=0.0)
            point, u = orbit_state(orb)
            a1 = local_vectors(point, u, spacetime=0.0).a[1]
            # special relativity: gamma^2 v^2 / r directed inward
            gamma = 1 / math.sqrt(1 - v * v)
            assert a1 == pytest.approx(-(gamma * v) ** 2 / r, rel=1e-13)


class TestLocalVectors:
    def test_centroid_momentum(self, rng):
        for orb in random_orbits(rng, 50):
            point, u = orbit_state(orb)
            q = local_vectors(point, u).q
            xi = orb.rapidity
            assert np.allclose(q, [math.cosh(xi), 0, 0, math.sinh(xi)], rtol=1e-13, atol=1e-15)

    def test_rest(self):
        point, u = orbit_state(CircularOrbit(5.0, 0.0))
        assert np.allclose(local_vectors(point, u).q, [1, 0, 0, 0], atol=1e-15)

    def test_mass_shell_and_orthogonality(self, rng):
        for orb in random_orbits(rng, 200):
            point, u = orbit_state(orb)
            lv = local_vectors(point, u, m=2.0)
            assert lv.q @ ETA @ lv.q == pytest.approx(-4.0, abs=1e-10)
            assert abs(lv.a @ ETA @ lv.q) < 1e-10


class TestChi:
    def test_antisymmetric(self, rng):
        for orb in random_orbits(rng, 200):
            point, u = orbit_state(orb)
            chi = ETA @ chi_generator(point, u)
            assert np.max(np.abs(chi + chi.T)) < 1e-12

    def test_chi13(self, rng):
        for orb in random_orbits(rng, 20):
            point, u = orbit_state(orb)
            chi = chi_generator(point, u)
            sf = math.sqrt(1 - 1 / orb.radius)
            assert chi[1, 3] == pytest.approx(sf * math.sinh(orb.rapidity) / orb.radius, rel=1e-12, abs=1e-15)

    def test_chi_from_fd_oracle(self, rng):
        # numeric covariant derivative of the coframe, contracted by hand
        from wigner_drift.spacetime import covariant_derivative_coframe

        for orb in random_orbits(rng, 10):
            point, u = orbit_state(orb)
            D = covariant_derivative_coframe(point, method="fd")
            frame = Schwarzschild().tetrad(point).frame
            chi_fd = np.einsum("m,bn,amn->ab", u, frame, D)
            assert np.allclose(chi_generator(point, u), chi_fd, rtol=1e-8, atol=1e-10)

    def test_static_chi(self):
        for r in (1.3, 2.0, 6.0):
            point, u = orbit_state(CircularOrbit(r, 0.0))
            chi = chi_generator(point, u)
            fp = 1 / r ** 2
            assert chi[1, 0] == pytest.approx(-fp / (2 * math.sqrt(1 - 1 / r)), rel=1e-13)
            mask = np.ones((4, 4), bool)
            mask[1, 0] = mask[0, 1] = False
            assert np.all(chi[mask] == 0)


class TestLambda:
    def test_antisymmetry_random(self, rng):
        for orb in random_orbits(rng, 1000):
            lam = circular_lambda(orb).lowered()
            assert np.max(np.abs(lam + lam.T)) < 1e-12

    @pytest.mark.parametrize("v", V_SET)
    def test_cancellation_radius(self, v):
        lam = circular_lambda(CircularOrbit(1.5, v))
        assert np.max(np.abs(lam.components)) < 1e-12

    def test_geodesic_boost_part_vanishes(self):
        r = 6.0
        v = math.sqrt(1 / (2 * r * (1 - 1 / r)))
        lam = circular_lambda(CircularOrbit(r, v))
        assert np.max(np.abs(lam.boost_part)) < 1e-15
        assert np.max(np.abs(lam.chi_part)) > 1e-3

    def test_closed_forms(self, rng):
        # numeric composition of chi + local vectors against the closed forms
        for orb in random_orbits(rng, 20):
            lam = circular_lambda(orb).components
            ref = circular_lambda_closed_form(orb)
            assert np.max(np.abs(lam - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))

    def test_centroid_fixed_point(self, rng):
        for orb in random_orbits(rng, 200):
            point, u = orbit_state(orb)
            lam = circular_lambda(orb).components
            q = local_vectors(point, u).q
            assert np.max(np.abs(lam @ q)) < 1e-10

    def test_direction_independent_magnitude(self, rng):
        for orb in random_orbits(rng, 20):
            rev = CircularOrbit(orb.radius, orb.v_over_c, direction=-1)
            assert np.allclose(np.abs(circular_lambda(orb).components),
                               np.abs(circular_lambda(rev).components), rtol=1e-13, atol=1e-15)

    def test_flat_inertial_zero(self):
        tr = inertial_line(0.8)
        lam = tr.generator(1.3)
        assert np.array_equal(lam.chi_part, np.zeros((4, 4)))
        assert np.array_equal(lam.boost_part, np.zeros((4, 4)))

    def test_flat_radial_line_in_spherical_chart(self):
        # straight radial line in flat spherical coordinates: the static frame
        # does not turn along it, so every piece vanishes
        xi = 0.5
        u = np.array([math.cosh(xi), math.sinh(xi), 0.0, 0.0])
        tr = Trajectory(lambda t: (np.array([t * u[0], 2.0 + t * u[1], 1.0, 0.4]), u), 0.0)
        lam = tr.generator(0.7)
        assert np.max(np.abs(lam.components)) < 1e-12

    def test_trajectory_matches_circular(self, fig2_orbit):
        tr = circular_trajectory(fig2_orbit)
        for tau in (0.0, 3.3):
            lam = tr.generator(tau).components
            assert np.allclose(lam, circular_lambda(fig2_orbit).components, rtol=1e-8, atol=1e-9)

    def test_general_lambda_generator_reuses_spacetime(self):
        orb = CircularOrbit(3.0, 0.4)
        point, u = orbit_state(orb)
        assert np.allclose(lambda_generator(point, u, 1.0, Schwarzschild(1.0)).components,
                           circular_lambda(orb).components)

"""Trajectories, local-frame momentum/acceleration and the Lorentz generator.

Everything is in geometric units (c = 1).  The generator ``lam[a, b]`` is
the mixed-index array lambda^a_b; lowering the first index with eta gives
an antisymmetric matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import HorizonError, InvalidInputError
from .spacetime import ETA, Schwarzschild, SpacetimePoint, as_spacetime, _as_coords


@dataclass(frozen=True)
class CircularOrbit:
    """Equatorial circular orbit with constant speed ``r dphi/dt = v sqrt(f)``.

    ``radius`` is in units of r_s (or in arbitrary units when ``r_s = 0``).
    """

    radius: float
    v_over_c: float
    direction: int = 1
    r_s: float = 1.0
    phi0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.radius) and math.isfinite(self.v_over_c)):
            raise InvalidInputError("orbit parameters must be finite")
        if not 0.0 <= abs(self.v_over_c) < 1.0:
            raise InvalidInputError(f"|v/c| must be < 1, got {self.v_over_c}")
        if self.direction not in (1, -1):
            raise InvalidInputError("direction must be +1 or -1")
        if self.radius <= self.r_s or self.radius <= 0:
            raise HorizonError(f"orbit radius {self.radius} must exceed r_s={self.r_s}")

    @property
    def rapidity(self) -> float:
        return math.atanh(abs(self.v_over_c))

    @property
    def spacetime(self) -> Schwarzschild:
        return Schwarzschild(self.r_s)


@dataclass(frozen=True)
class LocalVectors:
    q: np.ndarray
    a: np.ndarray


@dataclass(frozen=True)
class LorentzGenerator:
    components: np.ndarray
    chi_part: np.ndarray
    boost_part: np.ndarray

    def lowered(self) -> np.ndarray:
        return ETA @ self.components


def orbit_state(orbit: CircularOrbit, tau: float = 0.0):
    """Point and coordinate four-velocity on the orbit at proper time ``tau``."""
    r = orbit.radius
    xi = orbit.rapidity
    sf = math.sqrt(1.0 - orbit.r_s / r)
    ut = math.cosh(xi) / sf
    uphi = orbit.direction * math.sinh(xi) / r
    point = SpacetimePoint(ut * tau, r, math.pi / 2, orbit.phi0 + uphi * tau)
    return point, np.array([ut, 0.0, 0.0, uphi])


def four_acceleration(point, u, spacetime=1.0, dudtau=None) -> np.ndarray:
    """Coordinate acceleration a^mu = du^mu/dtau + Gamma^mu_{nl} u^n u^l."""
    st = as_spacetime(spacetime)
    x = _as_coords(point)
    u = np.asarray(u, dtype=float)
    acc = np.einsum("mnl,n,l->m", st.christoffel(x), u, u)
    if dudtau is not None:
        acc = acc + np.asarray(dudtau, dtype=float)
    return acc


def local_vectors(point, u, m: float = 1.0, spacetime=1.0, dudtau=None) -> LocalVectors:
    st = as_spacetime(spacetime)
    x = _as_coords(point)
    cof = st.coframe(x)
    acc = four_acceleration(x, u, st, dudtau)
    return LocalVectors(q=m * cof @ np.asarray(u, dtype=float), a=cof @ acc)


def chi_generator(point, u, spacetime=1.0) -> np.ndarray:
    """chi^a_b = u^m e_b^n (nabla_m e^a)_n."""
    st = as_spacetime(spacetime)
    x = _as_coords(point)
    frame = st.tetrad(x).frame
    return np.einsum("m,bn,amn->ab", np.asarray(u, dtype=float), frame, st.coframe_derivative(x))


def lambda_generator(point, u, m: float = 1.0, spacetime=1.0, dudtau=None) -> LorentzGenerator:
    """lambda^a_b = chi^a_b - (a^a q_b - q^a a_b) / m."""
    st = as_spacetime(spacetime)
    x = _as_coords(point)
    u = np.asarray(u, dtype=float)
    tet = st.tetrad(x)
    gamma = st.christoffel(x)
    dcof = st.coframe_partials(x) - np.einsum("lmn,al->amn", gamma, tet.coframe)
    chi = np.einsum("m,bn,amn->ab", u, tet.frame, dcof)
    acc = np.einsum("mnl,n,l->m", gamma, u, u)
    if dudtau is not None:
        acc = acc + np.asarray(dudtau, dtype=float)
    lv = LocalVectors(q=m * tet.coframe @ u, a=tet.coframe @ acc)
    boost = -(np.outer(lv.a, ETA @ lv.q) - np.outer(lv.q, ETA @ lv.a)) / m
    return LorentzGenerator(chi + boost, chi, boost)


def circular_lambda(orbit: CircularOrbit, m: float = 1.0) -> LorentzGenerator:
    """Generator on a circular orbit; constant in tau by symmetry."""
    point, u = orbit_state(orbit, 0.0)
    return lambda_generator(point, u, m, orbit.spacetime)


def circular_lambda_closed_form(orbit: CircularOrbit) -> np.ndarray:
    """Closed-form generator for ``direction=+1`` (used as a test reference)."""
    r = orbit.radius
    xi = orbit.rapidity
    f = 1.0 - orbit.r_s / r
    k = math.sqrt(f) / r * (1.0 - orbit.r_s / (2 * r * f))
    ch, sh = math.cosh(xi), math.sinh(xi)
    lam = np.zeros((4, 4))
    lam[1, 3] = k * sh * ch * ch
    lam[3, 1] = -lam[1, 3]
    lam[1, 0] = -k * ch * sh * sh
    lam[0, 1] = lam[1, 0]
    return lam


class Trajectory:
    """User-supplied worldline ``tau -> (coords, u)`` in a given spacetime.

    The acceleration picks up ``du/dtau`` from central differences of the
    supplied velocity with step ``h``.  ``stationary=True`` declares the
    generator constant along the worldline (e.g. orbits of a Killing
    vector), so the simulator evaluates it once.
    """

    def __init__(self, fn: Callable, spacetime, h: float = 1e-5, stationary: bool = False):
        self.fn = fn
        self.spacetime = as_spacetime(spacetime)
        self.h = h
        self.stationary = stationary

    def state(self, tau: float):
        x, u = self.fn(tau)
        return _as_coords(x), np.asarray(u, dtype=float)

    def dudtau(self, tau: float) -> np.ndarray:
        _, up = self.state(tau + self.h)
        _, um = self.state(tau - self.h)
        return (up - um) / (2 * self.h)

    def generator(self, tau: float, m: float = 1.0) -> LorentzGenerator:
        x, u = self.state(tau)
        return lambda_generator(x, u, m, self.spacetime, self.dudtau(tau))


def circular_trajectory(orbit: CircularOrbit) -> Trajectory:
    return Trajectory(lambda tau: orbit_state(orbit, tau), orbit.spacetime, stationary=True)


def inertial_line(v_over_c: float, offset=(1.0, 0.0, 0.0)) -> Trajectory:
    """Straight unaccelerated worldline along z in Cartesian Minkowski space."""
    from .spacetime import minkowski_cartesian

    xi = math.atanh(v_over_c)
    u = np.array([math.cosh(xi), 0.0, 0.0, math.sinh(xi)])
    x0 = np.array([0.0, *offset])
    return Trajectory(lambda tau: (x0 + u * tau, u), minkowski_cartesian(), stationary=True)

"""Metric, Christoffel symbols and static orthonormal tetrads.

Units are geometric: c = 1, and lengths are measured in units of the
Schwarzschild radius whenever ``r_s > 0``.  Coordinates are ordered
``(t, r, theta, phi)``.

Array conventions
-----------------
``frame[a, mu]``    = e_a^mu   (frame vectors, one per row)
``coframe[a, mu]``  = e^a_mu   (dual one-forms, one per row)
``christoffel[l, m, n]`` = Gamma^l_{mn}
``dcoframe[a, m, n]``    = (nabla_m e^a)_n
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateMetricError, HorizonError, InvalidInputError

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class SpacetimePoint:
    """Chart coordinates of a point in Schwarzschild spherical coordinates."""

    t: float
    r: float
    theta: float = math.pi / 2
    phi: float = 0.0

    def __post_init__(self):
        vals = (self.t, self.r, self.theta, self.phi)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInputError(f"non-finite coordinates {vals}")
        if not 0.0 < self.theta < math.pi:
            raise InvalidInputError(f"theta={self.theta} outside (0, pi)")

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.t, self.r, self.theta, self.phi], dtype=float)

    @classmethod
    def from_coords(cls, x) -> "SpacetimePoint":
        t, r, theta, phi = (float(v) for v in x)
        return cls(t, r, theta, phi)


@dataclass(frozen=True)
class Metric:
    components: np.ndarray
    schwarzschild_radius: float = 1.0

    @property
    def inverse(self) -> np.ndarray:
        return _invert(self.components)


@dataclass(frozen=True)
class Christoffel:
    components: np.ndarray


@dataclass(frozen=True)
class Tetrad:
    frame: np.ndarray
    coframe: np.ndarray
    point: object = field(default=None)

    def orthonormality_residual(self, g: np.ndarray) -> tuple[float, float]:
        """Max deviations of e_a.e_b g from eta and of e^a e_b from delta."""
        r1 = np.max(np.abs(self.frame @ g @ self.frame.T - ETA))
        r2 = np.max(np.abs(self.coframe @ self.frame.T - np.eye(4)))
        return float(r1), float(r2)


def _as_coords(point) -> np.ndarray:
    if isinstance(point, SpacetimePoint):
        return point.coords
    x = np.asarray(point, dtype=float)
    if x.shape != (4,):
        raise InvalidInputError(f"expected 4 coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"non-finite coordinates {x}")
    return x


def _invert(g: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(g)):
        raise DegenerateMetricError("metric has non-finite components")
    try:
        cond = np.linalg.cond(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetricError(str(exc)) from exc
    if not np.isfinite(cond) or cond > 1e14:
        raise DegenerateMetricError(f"metric is singular (cond={cond:.3g})")
    return np.linalg.inv(g)


def _check_rs(r_s: float) -> float:
    r_s = float(r_s)
    if not math.isfinite(r_s) or r_s < 0:
        raise InvalidInputError(f"r_s must be finite and >= 0, got {r_s}")
    return r_s


# ---------------------------------------------------------------------------
# finite-difference backend (any metric callable)
# ---------------------------------------------------------------------------

def fd_steps(x: np.ndarray, rel_step: float = FD_REL_STEP) -> np.ndarray:
    return rel_step * np.maximum(np.abs(x), 1.0)


def partial_derivatives(fn: Callable, x, rel_step: float = FD_REL_STEP) -> np.ndarray:
    """Central differences of an array-valued ``fn`` in each coordinate.

    One Richardson level (steps h and h/2) cancels the O(h^2) term, which
    keeps the error small near the horizon where the metric varies fast.
    Returns an array with a new leading axis: ``out[mu] = d fn / d x^mu``.
    """
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, rel_step)

    def central(mu, step):
        xp = x.copy()
        xm = x.copy()
        xp[mu] += step
        xm[mu] -= step
        return (np.asarray(fn(xp)) - np.asarray(fn(xm))) / (2.0 * step)

    out = []
    for mu in range(x.size):
        coarse = central(mu, h[mu])
        fine = central(mu, 0.5 * h[mu])
        out.append((4.0 * fine - coarse) / 3.0)
    return np.stack(out)


def christoffel_from_metric(metric_fn: Callable, x, rel_step: float = FD_REL_STEP) -> np.ndarray:
    """Gamma^l_{mn} of a metric callable ``x -> g_{mn}`` by central differences."""
    x = _as_coords(x)
    ginv = _invert(np.asarray(metric_fn(x), dtype=float))
    dg = partial_derivatives(metric_fn, x, rel_step)  # dg[r, m, n] = d_r g_mn
    lowered = 0.5 * (np.einsum("mrn->rmn", dg) + np.einsum("nrm->rmn", dg) - dg)
    gamma = np.einsum("lr,rmn->lmn", ginv, lowered)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


# ---------------------------------------------------------------------------
# spacetimes
# ---------------------------------------------------------------------------

class Schwarzschild:
    """Schwarzschild geometry with closed-form connection and static tetrad.

    ``r_s = 0`` gives flat spacetime in spherical coordinates.
    """

    def __init__(self, r_s: float = 1.0):
        self.r_s = _check_rs(r_s)

    def __repr__(self):
        return f"Schwarzschild(r_s={self.r_s})"

    def f(self, r):
        return 1.0 - self.r_s / r

    def metric(self, x) -> np.ndarray:
        t, r, th, ph = _as_coords(x)
        if r <= 0:
            raise InvalidInputError(f"r must be positive, got {r}")
        f = self.f(r)
        s = math.sin(th)
        return np.diag([-f, 1.0 / f if f != 0 else math.inf, r * r, r * r * s * s])

    def christoffel(self, x) -> np.ndarray:
        t, r, th, ph = _as_coords(x)
        if r <= 0:
            raise InvalidInputError(f"r must be positive, got {r}")
        f = self.f(r)
        if f == 0.0:
            raise DegenerateMetricError("metric is singular at r = r_s")
        fp = self.r_s / (r * r)
        s, c = math.sin(th), math.cos(th)
        G = np.zeros((4, 4, 4))
        G[0, 0, 1] = G[0, 1, 0] = fp / (2 * f)
        G[1, 0, 0] = 0.5 * f * fp
        G[1, 1, 1] = -fp / (2 * f)
        G[1, 2, 2] = -r * f
        G[1, 3, 3] = -r * f * s * s
        G[2, 1, 2] = G[2, 2, 1] = 1.0 / r
        G[2, 3, 3] = -s * c
        G[3, 1, 3] = G[3, 3, 1] = 1.0 / r
        G[3, 2, 3] = G[3, 3, 2] = c / s
        return G

    def _check_static(self, r):
        if r <= self.r_s:
            raise HorizonError(f"static frame undefined at r={r} <= r_s={self.r_s}")

    def coframe(self, x) -> np.ndarray:
        t, r, th, ph = _as_coords(x)
        self._check_static(r)
        sf = math.sqrt(self.f(r))
        return np.diag([sf, 1.0 / sf, r, r * math.sin(th)])

    def tetrad(self, x) -> Tetrad:
        t, r, th, ph = _as_coords(x)
        self._check_static(r)
        sf = math.sqrt(self.f(r))
        frame = np.diag([1.0 / sf, sf, 1.0 / r, 1.0 / (r * math.sin(th))])
        return Tetrad(frame, self.coframe(x), point=x)

    def coframe_partials(self, x) -> np.ndarray:
        """``out[a, m, n] = d_m e^a_n`` in closed form."""
        t, r, th, ph = _as_coords(x)
        self._check_static(r)
        f = self.f(r)
        fp = self.r_s / (r * r)
        sf = math.sqrt(f)
        dE = np.zeros((4, 4, 4))
        dE[0, 1, 0] = fp / (2 * sf)
        dE[1, 1, 1] = -fp / (2 * f * sf)
        dE[2, 1, 2] = 1.0
        dE[3, 1, 3] = math.sin(th)
        dE[3, 2, 3] = r * math.cos(th)
        return dE

    def coframe_derivative(self, x) -> np.ndarray:
        """``(nabla_m e^a)_n = d_m e^a_n - Gamma^l_{mn} e^a_l``."""
        dE = self.coframe_partials(x)
        return dE - np.einsum("lmn,al->amn", self.christoffel(x), self.coframe(x))


class DiagonalMetric:
    """User-supplied diagonal metric; all derivatives by finite differences.

    ``components`` maps coordinates to the four diagonal entries g_mumu
    with signature (-,+,+,+).  The tetrad is the static one aligned with
    the coordinate axes, ``e_a^mu = delta_a^mu / sqrt|g_mumu|``.
    """

    def __init__(self, components: Callable, rel_step: float = FD_REL_STEP):
        self._components = components
        self.rel_step = rel_step

    def _diag(self, x) -> np.ndarray:
        d = np.asarray(self._components(_as_coords(x)), dtype=float)
        if d.shape == (4, 4):
            d = np.diag(d)
        return d

    def metric(self, x) -> np.ndarray:
        return np.diag(self._diag(x))

    def christoffel(self, x) -> np.ndarray:
        return christoffel_from_metric(self.metric, x, self.rel_step)

    def coframe(self, x) -> np.ndarray:
        d = self._diag(x)
        if not (d[0] < 0 and np.all(d[1:] > 0)):
            raise HorizonError(f"static frame needs signature (-,+,+,+), got {d}")
        return np.diag(np.sqrt(np.abs(d)))

    def tetrad(self, x) -> Tetrad:
        cof = self.coframe(x)
        return Tetrad(np.diag(1.0 / np.diag(cof)), cof, point=x)

    def coframe_partials(self, x) -> np.ndarray:
        """``out[a, m, n] = d_m e^a_n`` by central differences."""
        return np.einsum("man->amn", partial_derivatives(self.coframe, _as_coords(x), self.rel_step))

    def coframe_derivative(self, x) -> np.ndarray:
        x = _as_coords(x)
        dE = self.coframe_partials(x)
        return dE - np.einsum("lmn,al->amn", self.christoffel(x), self.coframe(x))


def minkowski_cartesian() -> DiagonalMetric:
    """Flat spacetime in Cartesian coordinates (t, x, y, z)."""
    return DiagonalMetric(lambda x: np.array([-1.0, 1.0, 1.0, 1.0]))


def as_spacetime(source):
    """Accept a Schwarzschild radius, a metric object, or a diagonal-metric callable."""
    if isinstance(source, (Schwarzschild, DiagonalMetric)):
        return source
    if callable(source):
        return DiagonalMetric(source)
    return Schwarzschild(source)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def metric_at(point, r_s: float = 1.0) -> Metric:
    return Metric(Schwarzschild(r_s).metric(point), schwarzschild_radius=float(r_s))


def christoffel_at(point, metric_source=1.0, method: str = "auto") -> Christoffel:
    """Christoffel symbols at ``point``.

    ``metric_source`` is a Schwarzschild radius, a spacetime object, or a
    callable returning the 4x4 metric.  ``method='fd'`` forces central
    differences even for Schwarzschild.
    """
    x = _as_coords(point)
    if callable(metric_source) and not isinstance(metric_source, (Schwarzschild, DiagonalMetric)):
        return Christoffel(christoffel_from_metric(metric_source, x))
    st = as_spacetime(metric_source)
    if method == "fd":
        return Christoffel(christoffel_from_metric(st.metric, x))
    if method not in ("auto", "analytic"):
        raise InvalidInputError(f"unknown method {method!r}")
    return Christoffel(st.christoffel(x))


def static_tetrad_at(point, r_s: float = 1.0) -> Tetrad:
    return Schwarzschild(r_s).tetrad(point)


def covariant_derivative_coframe(point, r_s: float = 1.0, method: str = "analytic") -> np.ndarray:
    """``out[a, m, n] = (nabla_m e^a)_n`` for the static Schwarzschild tetrad."""
    st = Schwarzschild(r_s)
    x = _as_coords(point)
    if method == "analytic":
        return st.coframe_derivative(x)
    if method == "fd":
        dE = np.einsum("man->amn", partial_derivatives(st.coframe, x))
        gamma = christoffel_from_metric(st.metric, x)
        return dE - np.einsum("lmn,al->amn", gamma, st.coframe(x))
    raise InvalidInputError(f"unknown method {method!r}")

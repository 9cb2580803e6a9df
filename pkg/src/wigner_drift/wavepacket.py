"""Discretised initial packet: Gaussian in p^3, sharp in p^1 and p^2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

from .errors import InvalidInputError
from .wigner import SpinRotor, check_shell

MIN_NODES = 4
MAX_NODES = 4096
DEFAULT_NODES = 128

SPIN_UP = np.array([1.0 + 0j, 0.0 + 0j])


@dataclass(frozen=True)
class PacketSpec:
    """Initial packet with density proportional to exp(-(p3 - q3)^2 / w^2).

    Momenta are in units of mc.  ``width=0`` collapses the packet to a
    single node at the centroid (a momentum eigenstate).
    """

    centroid_momentum: float
    width: float
    initial_spin: np.ndarray = field(default_factory=lambda: SPIN_UP.copy())
    quadrature_nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if not (math.isfinite(self.centroid_momentum) and math.isfinite(self.width)):
            raise InvalidInputError("packet parameters must be finite")
        if self.width < 0:
            raise InvalidInputError(f"width must be positive, got {self.width}")
        if self.width > 0 and not MIN_NODES <= self.quadrature_nodes <= MAX_NODES:
            raise InvalidInputError(
                f"quadrature_nodes must lie in [{MIN_NODES}, {MAX_NODES}], got {self.quadrature_nodes}")
        spin = np.asarray(self.initial_spin, dtype=complex)
        if spin.shape != (2,) or not np.isclose(np.linalg.norm(spin), 1.0, atol=1e-12):
            raise InvalidInputError("initial spin must be a normalised 2-spinor")
        object.__setattr__(self, "initial_spin", spin)


@dataclass(frozen=True)
class MomentumSample:
    p: np.ndarray
    weight: float
    rotor: SpinRotor = field(default_factory=SpinRotor.identity)


def invariant_measure(p, m: float = 1.0) -> float:
    """N(p) = m / p^0 for an on-shell momentum."""
    p = check_shell(p, m)
    return m / p[0]


def hermite_rule(n: int):
    """Gauss-Hermite nodes and probability weights for exp(-x^2).

    scipy switches to an asymptotic rule for large n, where the numpy
    recurrence overflows (n above about 350).
    """
    x, w = roots_hermite(n)
    return x, w / w.sum()


def discretize_packet(spec: PacketSpec, m: float = 1.0) -> list[MomentumSample]:
    """Quadrature samples of the packet in the variable (p3 - q3) / w.

    The 1/N(p) in the packet density cancels the invariant measure, so
    the weights are the plain Hermite weights, renormalised to sum to one.
    """
    if spec.width == 0:
        p3 = np.array([spec.centroid_momentum])
        weights = np.array([1.0])
    else:
        x, weights = hermite_rule(spec.quadrature_nodes)
        p3 = spec.centroid_momentum + spec.width * x
    samples = []
    for pz, wt in zip(p3, weights):
        p = np.array([math.sqrt(pz * pz + m * m), 0.0, 0.0, pz])
        samples.append(MomentumSample(p, float(wt)))
    return samples


def packet_arrays(samples):
    """Stack samples into (momenta, quaternions, weights) arrays for the kernels."""
    p = np.array([s.p for s in samples], dtype=float)
    q = np.array([s.rotor.quat for s in samples], dtype=float)
    w = np.array([s.weight for s in samples], dtype=float)
    return p, q, w

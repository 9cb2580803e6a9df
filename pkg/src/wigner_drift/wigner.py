"""Momentum transport and infinitesimal Wigner rotations.

Spin rotors are stored as unit quaternions ``(w, x, y, z)`` which map to
SU(2) as ``U = w*I - i*(x*sx + y*sy + z*sz)``; a rotation by angle ``a``
about unit axis ``n`` is ``(cos(a/2), sin(a/2)*n)``, i.e.
``U = exp(-i a n.sigma / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, MassShellError, StepSizeError

MAX_STEP_ANGLE = 0.1
SHELL_TOL = 1e-9

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


@dataclass(frozen=True)
class WignerStep:
    """Rotation generator with W^i_k = delta^i_k + generator[i, k] * dtau."""

    generator: np.ndarray
    axis: np.ndarray
    rate: float

    @property
    def angular_velocity(self) -> np.ndarray:
        return self.rate * self.axis


def rotation_vector(gen: np.ndarray) -> np.ndarray:
    """Omega such that gen @ v == cross(Omega, v) for antisymmetric ``gen``."""
    return np.array([gen[2, 1], gen[0, 2], gen[1, 0]])


def on_shell_energy(p3vec, m: float = 1.0) -> float:
    return math.sqrt(float(np.dot(p3vec, p3vec)) + m * m)


def check_shell(p, m: float = 1.0, tol: float = SHELL_TOL):
    p = np.asarray(p, dtype=float)
    e = on_shell_energy(p[1:], m)
    if abs(p[0] - e) > tol * max(1.0, e):
        raise MassShellError(f"p0={p[0]!r} but sqrt(|p|^2+m^2)={e!r}")
    return p


def wigner_rate(lam, p, m: float = 1.0) -> WignerStep:
    """Infinitesimal Wigner rotation generator for a sample with momentum ``p``.

    theta^i_k = lam^i_k + (lam^i_0 p_k - lam_k0 p^i) / (p^0 + m)
    """
    lam = np.asarray(getattr(lam, "components", lam), dtype=float)
    p = check_shell(p, m)
    l0 = lam[1:, 0]
    ps = p[1:]
    gen = lam[1:, 1:] + (np.outer(l0, ps) - np.outer(ps, l0)) / (p[0] + m)
    omega = rotation_vector(gen)
    rate = float(np.linalg.norm(omega))
    axis = omega / rate if rate > 0 else np.array([0.0, 0.0, 1.0])
    return WignerStep(gen, axis, rate)


def transport_momentum(lam, p, dtau: float, m: float = 1.0) -> np.ndarray:
    """One first-order step p -> p + lam p dtau, projected back onto the mass shell."""
    lam = np.asarray(getattr(lam, "components", lam), dtype=float)
    p = check_shell(p, m)
    out = p + lam @ p * dtau
    out[0] = on_shell_energy(out[1:], m)
    return out


def shell_violation(p, m: float = 1.0) -> float:
    """|p.p + m^2| / m^2 with signature (-,+,+,+)."""
    p = np.asarray(p, dtype=float)
    return abs(-p[0] * p[0] + float(np.dot(p[1:], p[1:])) + m * m) / (m * m)


# ---------------------------------------------------------------------------
# quaternion rotors
# ---------------------------------------------------------------------------

def qmul(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def qconj(q) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def axis_angle_quat(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    half = 0.5 * angle
    return np.concatenate([[math.cos(half)], math.sin(half) * axis])


def quat_to_su2(q) -> np.ndarray:
    return q[0] * np.eye(2) - 1j * np.einsum("i,ijk->jk", np.asarray(q[1:]), PAULI)


def quat_to_so3(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


@dataclass(frozen=True)
class SpinRotor:
    """Accumulated spin-1/2 rotation D(W) as a unit quaternion."""

    quat: np.ndarray = None

    def __post_init__(self):
        q = np.array([1.0, 0.0, 0.0, 0.0]) if self.quat is None else np.asarray(self.quat, dtype=float)
        object.__setattr__(self, "quat", q / np.linalg.norm(q))

    @classmethod
    def identity(cls) -> "SpinRotor":
        return cls()

    @property
    def matrix(self) -> np.ndarray:
        return quat_to_su2(self.quat)

    @property
    def rotation(self) -> np.ndarray:
        return quat_to_so3(self.quat)

    @property
    def angle(self) -> float:
        """Rotation angle in [0, 2*pi]."""
        return 2.0 * math.atan2(float(np.linalg.norm(self.quat[1:])), float(self.quat[0]))

    def unitarity_error(self) -> float:
        U = self.matrix
        return float(max(np.max(np.abs(U @ U.conj().T - np.eye(2))),
                         abs(np.linalg.det(U) - 1.0)))

    def __matmul__(self, other: "SpinRotor") -> "SpinRotor":
        return SpinRotor(qmul(self.quat, other.quat))


def rotor_step(rotor: SpinRotor, step: WignerStep, dtau: float) -> SpinRotor:
    """Left-compose the exact rotation exp(-i (rate dtau / 2) axis.sigma)."""
    angle = step.rate * dtau
    if not math.isfinite(angle):
        raise InvalidInputError("non-finite rotation angle")
    if abs(angle) >= MAX_STEP_ANGLE:
        raise StepSizeError(f"rotation per step {abs(angle):.3g} rad exceeds {MAX_STEP_ANGLE}")
    return SpinRotor(qmul(axis_angle_quat(step.axis, angle), rotor.quat))

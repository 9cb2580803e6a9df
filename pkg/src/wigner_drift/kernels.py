"""Inner loop: RK4 evolution of every sample's (momentum, spin rotor).

Two interchangeable implementations with the same signature:

* ``evolve_numba``  - scalar loops compiled with numba
* ``evolve_numpy``  - a Python loop over steps, vectorised over samples

``evolve`` dispatches on the ``backend`` argument (default from
``WIGNER_DRIFT_NUMBA``).  Both return

    bloch[n_out, 3], angle[n_out], shell_max, drift_max, fail_step

where ``fail_step`` is -1 unless a step exceeded ``max_angle`` radians of
rotation, in which case integration stopped at that step.

``lams`` holds the generator either once (constant) or on the half-step
grid ``tau_0 + j*dtau/2`` for ``j = 0..2*nsteps``.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import HAVE_NUMBA, default_backend, njit


@njit(cache=True, inline="always")
def _deriv(lams, li, p0, p1, p2, p3, q0, q1, q2, q3, m, transport):
    # d(p, q)/dtau for one sample; Omega = (theta^3_2, theta^1_3, theta^2_1) of
    # theta^i_k = lam^i_k + (lam^i_0 p_k - lam^k_0 p^i) / (p0 + m)
    if transport:
        d0 = lams[li, 0, 0] * p0 + lams[li, 0, 1] * p1 + lams[li, 0, 2] * p2 + lams[li, 0, 3] * p3
        d1 = lams[li, 1, 0] * p0 + lams[li, 1, 1] * p1 + lams[li, 1, 2] * p2 + lams[li, 1, 3] * p3
        d2 = lams[li, 2, 0] * p0 + lams[li, 2, 1] * p1 + lams[li, 2, 2] * p2 + lams[li, 2, 3] * p3
        d3 = lams[li, 3, 0] * p0 + lams[li, 3, 1] * p1 + lams[li, 3, 2] * p2 + lams[li, 3, 3] * p3
    else:
        d0 = 0.0
        d1 = 0.0
        d2 = 0.0
        d3 = 0.0
    den = p0 + m
    l1 = lams[li, 1, 0]
    l2 = lams[li, 2, 0]
    l3 = lams[li, 3, 0]
    ox = lams[li, 3, 2] + (l3 * p2 - l2 * p3) / den
    oy = lams[li, 1, 3] + (l1 * p3 - l3 * p1) / den
    oz = lams[li, 2, 1] + (l2 * p1 - l1 * p2) / den
    # dq = 0.5 * (0, Omega) * q  (Hamilton product)
    e0 = 0.5 * (-ox * q1 - oy * q2 - oz * q3)
    e1 = 0.5 * (ox * q0 + oy * q3 - oz * q2)
    e2 = 0.5 * (-ox * q3 + oy * q0 + oz * q1)
    e3 = 0.5 * (ox * q2 - oy * q1 + oz * q0)
    return d0, d1, d2, d3, e0, e1, e2, e3, math.sqrt(ox * ox + oy * oy + oz * oz)


@njit(cache=True, inline="always")
def _rotate(q0, q1, q2, q3, b):
    w, x, y, z = q0, q1, q2, q3
    r0 = (1 - 2 * (y * y + z * z)) * b[0] + 2 * (x * y - w * z) * b[1] + 2 * (x * z + w * y) * b[2]
    r1 = 2 * (x * y + w * z) * b[0] + (1 - 2 * (x * x + z * z)) * b[1] + 2 * (y * z - w * x) * b[2]
    r2 = 2 * (x * z - w * y) * b[0] + 2 * (y * z + w * x) * b[1] + (1 - 2 * (x * x + y * y)) * b[2]
    return r0, r1, r2


@njit(cache=True)
def _accumulate_bloch(q, weights, bloch0, bloch, row):
    for k in range(q.shape[0]):
        r0, r1, r2 = _rotate(q[k, 0], q[k, 1], q[k, 2], q[k, 3], bloch0)
        bloch[row, 0] += weights[k] * r0
        bloch[row, 1] += weights[k] * r1
        bloch[row, 2] += weights[k] * r2


@njit(cache=True)
def evolve_numba(lams, p_init, q_init, weights, bloch0, m, dtau, nsteps, stride,
                 transport, centroid, max_angle):
    n = p_init.shape[0]
    p = p_init.copy()
    q = q_init.copy()
    n_out = nsteps // stride + 1
    bloch = np.zeros((n_out, 3))
    angle = np.zeros(n_out)
    const = lams.shape[0] == 1
    shell_max = 0.0
    drift_max = 0.0
    fail = -1
    acc_angle = 0.0
    h = dtau
    hh = 0.5 * h
    h6 = h / 6.0

    _accumulate_bloch(q, weights, bloch0, bloch, 0)
    out = 1

    for i in range(nsteps):
        if const:
            la = 0; lb = 0; lc = 0
        else:
            la = 2 * i; lb = 2 * i + 1; lc = 2 * i + 2
        for k in range(n):
            p0 = p[k, 0]; p1 = p[k, 1]; p2 = p[k, 2]; p3 = p[k, 3]
            q0 = q[k, 0]; q1 = q[k, 1]; q2 = q[k, 2]; q3 = q[k, 3]
            a0, a1, a2, a3, b0, b1, b2, b3, rate = _deriv(
                lams, la, p0, p1, p2, p3, q0, q1, q2, q3, m, transport)
            if rate * h >= max_angle:
                fail = i
                break
            c0, c1, c2, c3, d0, d1, d2, d3, _ = _deriv(
                lams, lb, p0 + hh * a0, p1 + hh * a1, p2 + hh * a2, p3 + hh * a3,
                q0 + hh * b0, q1 + hh * b1, q2 + hh * b2, q3 + hh * b3, m, transport)
            e0, e1, e2, e3, f0, f1, f2, f3, _ = _deriv(
                lams, lb, p0 + hh * c0, p1 + hh * c1, p2 + hh * c2, p3 + hh * c3,
                q0 + hh * d0, q1 + hh * d1, q2 + hh * d2, q3 + hh * d3, m, transport)
            g0, g1, g2, g3, s0, s1, s2, s3, _ = _deriv(
                lams, lc, p0 + h * e0, p1 + h * e1, p2 + h * e2, p3 + h * e3,
                q0 + h * f0, q1 + h * f1, q2 + h * f2, q3 + h * f3, m, transport)

            n1 = p1 + h6 * (a1 + 2.0 * c1 + 2.0 * e1 + g1)
            n2 = p2 + h6 * (a2 + 2.0 * c2 + 2.0 * e2 + g2)
            n3 = p3 + h6 * (a3 + 2.0 * c3 + 2.0 * e3 + g3)
            if transport:
                n0 = math.sqrt(n1 * n1 + n2 * n2 + n3 * n3 + m * m)
                sv = abs(-n0 * n0 + n1 * n1 + n2 * n2 + n3 * n3 + m * m) / (m * m)
                if sv > shell_max:
                    shell_max = sv
            else:
                n0 = p0 + h6 * (a0 + 2.0 * c0 + 2.0 * e0 + g0)
            p[k, 0] = n0; p[k, 1] = n1; p[k, 2] = n2; p[k, 3] = n3

            w0 = q0 + h6 * (b0 + 2.0 * d0 + 2.0 * f0 + s0)
            w1 = q1 + h6 * (b1 + 2.0 * d1 + 2.0 * f1 + s1)
            w2 = q2 + h6 * (b2 + 2.0 * d2 + 2.0 * f2 + s2)
            w3 = q3 + h6 * (b3 + 2.0 * d3 + 2.0 * f3 + s3)
            nrm = math.sqrt(w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3)
            w0 /= nrm; w1 /= nrm; w2 /= nrm; w3 /= nrm
            q[k, 0] = w0; q[k, 1] = w1; q[k, 2] = w2; q[k, 3] = w3
            dr = abs(math.sqrt(w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3) - 1.0)
            if dr > drift_max:
                drift_max = dr

            if k == centroid:
                # step rotation d = q_new * conj(q_old), signed about the 2-axis
                dw = w0 * q0 + w1 * q1 + w2 * q2 + w3 * q3
                dx = -w0 * q1 + w1 * q0 - w2 * q3 + w3 * q2
                dy = -w0 * q2 + w1 * q3 + w2 * q0 - w3 * q1
                dz = -w0 * q3 - w1 * q2 + w2 * q1 + w3 * q0
                da = 2.0 * math.atan2(math.sqrt(dx * dx + dy * dy + dz * dz), abs(dw))
                if dy < 0.0:
                    da = -da
                acc_angle += da
        if fail >= 0:
            break

        if (i + 1) % stride == 0:
            _accumulate_bloch(q, weights, bloch0, bloch, out)
            angle[out] = acc_angle
            out += 1

    return bloch, angle, shell_max, drift_max, fail


def _omega_np(lam, p, m):
    den = p[:, 0] + m
    l1, l2, l3 = lam[1, 0], lam[2, 0], lam[3, 0]
    p1, p2, p3 = p[:, 1], p[:, 2], p[:, 3]
    ox = lam[3, 2] + (l3 * p2 - l2 * p3) / den
    oy = lam[1, 3] + (l1 * p3 - l3 * p1) / den
    oz = lam[2, 1] + (l2 * p1 - l1 * p2) / den
    return ox, oy, oz


def _deriv_np(lam, p, q, m, transport):
    dp = p @ lam.T if transport else np.zeros_like(p)
    ox, oy, oz = _omega_np(lam, p, m)
    dq = np.empty_like(q)
    dq[:, 0] = 0.5 * (-ox * q[:, 1] - oy * q[:, 2] - oz * q[:, 3])
    dq[:, 1] = 0.5 * (ox * q[:, 0] + oy * q[:, 3] - oz * q[:, 2])
    dq[:, 2] = 0.5 * (-ox * q[:, 3] + oy * q[:, 0] + oz * q[:, 1])
    dq[:, 3] = 0.5 * (ox * q[:, 2] - oy * q[:, 1] + oz * q[:, 0])
    return dp, dq, np.sqrt(ox * ox + oy * oy + oz * oz)


def _bloch_np(q, weights, b):
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    r0 = (1 - 2 * (y * y + z * z)) * b[0] + 2 * (x * y - w * z) * b[1] + 2 * (x * z + w * y) * b[2]
    r1 = 2 * (x * y + w * z) * b[0] + (1 - 2 * (x * x + z * z)) * b[1] + 2 * (y * z - w * x) * b[2]
    r2 = 2 * (x * z - w * y) * b[0] + 2 * (y * z + w * x) * b[1] + (1 - 2 * (x * x + y * y)) * b[2]
    out = np.zeros(3)
    # sequential sums keep the reduction order identical to the compiled path
    for k in range(q.shape[0]):
        out[0] += weights[k] * r0[k]
        out[1] += weights[k] * r1[k]
        out[2] += weights[k] * r2[k]
    return out


def evolve_numpy(lams, p_init, q_init, weights, bloch0, m, dtau, nsteps, stride,
                 transport, centroid, max_angle):
    p = p_init.copy()
    q = q_init.copy()
    n_out = nsteps // stride + 1
    bloch = np.zeros((n_out, 3))
    angle = np.zeros(n_out)
    const = lams.shape[0] == 1
    shell_max = 0.0
    drift_max = 0.0
    fail = -1
    acc_angle = 0.0
    h = dtau
    bloch[0] = _bloch_np(q, weights, bloch0)
    out = 1
    for i in range(nsteps):
        if const:
            la = lb = lc = lams[0]
        else:
            la, lb, lc = lams[2 * i], lams[2 * i + 1], lams[2 * i + 2]
        k1p, k1q, rate = _deriv_np(la, p, q, m, transport)
        if np.any(rate * h >= max_angle):
            fail = i
            break
        k2p, k2q, _ = _deriv_np(lb, p + 0.5 * h * k1p, q + 0.5 * h * k1q, m, transport)
        k3p, k3q, _ = _deriv_np(lb, p + 0.5 * h * k2p, q + 0.5 * h * k2q, m, transport)
        k4p, k4q, _ = _deriv_np(lc, p + h * k3p, q + h * k3q, m, transport)
        old = q[centroid].copy()
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        q = q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        if transport:
            p[:, 0] = np.sqrt(np.sum(p[:, 1:] ** 2, axis=1) + m * m)
            sv = np.abs(-p[:, 0] ** 2 + np.sum(p[:, 1:] ** 2, axis=1) + m * m) / (m * m)
            shell_max = max(shell_max, float(sv.max()))
        q = q / np.sqrt(np.sum(q * q, axis=1))[:, None]
        drift_max = max(drift_max, float(np.max(np.abs(np.sqrt(np.sum(q * q, axis=1)) - 1.0))))

        c = q[centroid]
        dw = c[0] * old[0] + c[1] * old[1] + c[2] * old[2] + c[3] * old[3]
        dx = -c[0] * old[1] + c[1] * old[0] - c[2] * old[3] + c[3] * old[2]
        dy = -c[0] * old[2] + c[1] * old[3] + c[2] * old[0] - c[3] * old[1]
        dz = -c[0] * old[3] - c[1] * old[2] + c[2] * old[1] + c[3] * old[0]
        da = 2.0 * np.arctan2(np.sqrt(dx * dx + dy * dy + dz * dz), abs(dw))
        acc_angle += -da if dy < 0.0 else da

        if (i + 1) % stride == 0:
            bloch[out] = _bloch_np(q, weights, bloch0)
            angle[out] = acc_angle
            out += 1
    return bloch, angle, shell_max, drift_max, fail


def evolve(lams, p_init, q_init, weights, bloch0, m, dtau, nsteps, stride,
           transport=False, centroid=0, max_angle=0.1, backend=None):
    backend = backend or default_backend()
    args = (np.ascontiguousarray(lams, dtype=float),
            np.ascontiguousarray(p_init, dtype=float),
            np.ascontiguousarray(q_init, dtype=float),
            np.ascontiguousarray(weights, dtype=float),
            np.ascontiguousarray(bloch0, dtype=float),
            float(m), float(dtau), int(nsteps), int(stride),
            bool(transport), int(centroid), float(max_angle))
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return evolve_numba(*args)
    if backend == "numpy":
        return evolve_numpy(*args)
    raise ValueError(f"unknown backend {backend!r}")

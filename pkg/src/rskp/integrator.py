"""Adaptive integration of the hierarchy flows.

An embedded Dormand-Prince 5(4) pair with FSAL drives every flow.  Runs are
short (|t_k| <= O(1)) and acceptance thresholds are tolerance based, so a
symplectic scheme is not required; drift is kept below the acceptance bars
by the local error control alone.

The collision guard runs on every stage and every trial step: as soon as a
state violates a gap invariant the integration aborts with CollisionError,
and the partial trajectory accumulated so far rides along on the exception.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    PhasePoint,
    build_matrices,
    lax_m_matrix,
    vector_field,
    velocity_from_rapidity,
)
from .errors import CollisionError, StepSizeUnderflow
from .times import TimeVector

# Dormand-Prince 5(4) tableau.  Row 7 of _A is the 5th-order weight vector;
# _E holds the difference between the 5th- and 4th-order weights.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

H_FLOOR = 1e-14
MAX_STEPS = 200_000


@dataclass(frozen=True)
class Trajectory:
    """Samples of one flow: ordered (t_k value, PhasePoint) pairs plus step stats."""

    flow_index: int
    samples: tuple
    step_stats: dict

    @property
    def final(self) -> PhasePoint:
        return self.samples[-1][1]


def _rhs(state, n, k, t0, eps):
    """Vector field on the flat state [x, y]; validates gaps via PhasePoint."""
    p = PhasePoint(state[:n], state[n:], t0, eps)
    xdot, ydot = vector_field(p, k)
    return np.concatenate([xdot, ydot])


def integrate_flow(p0: PhasePoint, k: int, duration: float, tol: float = 1e-10) -> Trajectory:
    """Advance p0 along the flow t_k by the given (signed) duration.

    Local error per step is controlled at tol (taken as both the absolute
    and the relative weight).  Every sample's TimeVector carries the
    advanced t_k entry.  Raises CollisionError (with .trajectory holding
    the partial result) or StepSizeUnderflow.
    """
    if k < 1:
        raise ValueError("flow index must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = p0.n_particles
    eps = p0.eps_collision
    t0 = p0.t

    samples = [(0.0, p0)]
    stats = {"accepted": 0, "rejected": 0, "max_local_error": 0.0}
    if duration == 0.0:
        return Trajectory(k, tuple(samples), stats)

    sign = 1.0 if duration > 0 else -1.0
    state = np.concatenate([p0.x, p0.y])
    s = 0.0

    def guarded_rhs(st):
        try:
            return _rhs(st, n, k, t0, eps)
        except CollisionError as err:
            err.trajectory = Trajectory(k, tuple(samples), stats)
            raise

    f = guarded_rhs(state)
    h = sign * min(abs(duration), max(abs(duration) / 100.0, 1e-6))

    done = False
    while not done:
        if abs(h) < H_FLOOR:
            raise StepSizeUnderflow(f"step size {h!r} below floor at t_{k} = {s!r}")
        if stats["accepted"] + stats["rejected"] > MAX_STEPS:
            raise RuntimeError("step budget exhausted")
        final_step = (s + h - duration) * sign >= 0.0
        if final_step:
            h = duration - s

        ks = [f]
        for row in _A[1:]:
            st = state + h * sum(a * kk for a, kk in zip(row, ks))
            ks.append(guarded_rhs(st))
        # stage 7 sits at the trial endpoint, so ks[6] doubles as the FSAL slope
        y1 = state + h * sum(a * kk for a, kk in zip(_A[6], ks[:6]))
        err_vec = h * sum(e * kk for e, kk in zip(_E, ks))
        scale = tol + tol * np.maximum(np.abs(state), np.abs(y1))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            s = duration if final_step else s + h
            done = final_step
            state = y1
            f = ks[6]
            stats["accepted"] += 1
            stats["max_local_error"] = max(stats["max_local_error"], err * tol)
            p = PhasePoint(state[:n], state[n:], t0.added(k, s), eps)
            samples.append((s, p))
        else:
            stats["rejected"] += 1
        factor = 0.9 * err ** -0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
    return Trajectory(k, tuple(samples), stats)


def integrate_multi(p0: PhasePoint, target: TimeVector, tol: float = 1e-10) -> PhasePoint:
    """Move p0 to the absolute multi-time `target`, one flow at a time.

    Flows are composed in ascending k; commutativity (verified in the test
    suite) makes the order a convention.
    """
    p = p0
    ks = sorted(set(k for k, _ in target.entries) | set(k for k, _ in p0.t.entries))
    for k in ks:
        duration = target.get(k) - p.t.get(k)
        if duration != 0.0:
            p = integrate_flow(p, k, duration, tol).final
    return p


def commutativity_defect(p0: PhasePoint, k: int, m: int, h: float, tol: float = 1e-10) -> float:
    """Max-norm of (Phi_k^h Phi_m^h - Phi_m^h Phi_k^h)(p0)."""
    if k == m:
        raise ValueError("flow indices must differ")

    def compose(first, second):
        q = integrate_flow(p0, first, h, tol).final
        q = integrate_flow(q, second, h, tol).final
        return np.concatenate([q.x, q.y])

    return float(np.abs(compose(m, k) - compose(k, m)).max())


def acceleration_residual(p: PhasePoint, h: float, tol: float = 1e-12) -> float:
    """Residual of the second-order equation of motion along t_1.

    x_i'' = -2 x_i' sum_{j != i} x_j' / ((x_i-x_j)(x_i-x_j+1)(x_i-x_j-1)),
    with x'' estimated by a central second difference of integrated
    positions.  Expected O(h^2).
    """
    plus = integrate_flow(p, 1, h, tol).final
    minus = integrate_flow(p, 1, -h, tol).final
    xdd = (plus.x - 2.0 * p.x + minus.x) / h**2

    x = p.x
    xdot = velocity_from_rapidity(x, p.y)
    n = x.size
    rhs = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if j == i:
                continue
            d = x[i] - x[j]
            acc += xdot[j] / (d * (d + 1.0) * (d - 1.0))
        rhs[i] = -2.0 * xdot[i] * acc
    return float(np.abs(xdd - rhs).max())


def y_lax_residual(p: PhasePoint, h: float, tol: float = 1e-12) -> float:
    """Residual of dY/dt_1 = [Y, M] with the derivative by central FD."""
    plus = integrate_flow(p, 1, h, tol).final
    minus = integrate_flow(p, 1, -h, tol).final
    dy = (build_matrices(plus).Y - build_matrices(minus).Y) / (2.0 * h)
    yy = build_matrices(p).Y
    m = lax_m_matrix(p)
    return float(np.abs(dy - (yy @ m - m @ yy)).max())

"""Tau-function side of the correspondence.

A frozen pair (X0, Y0) determines the polynomial

    tau(n;t) = det(nI - A(t)),
    A(t)     = X0 - sum_{j>=1} j t_j (I - Y0) (-Y0)^{j-1},

whose roots move with the hierarchy flows of the particle model.  Roots are
always computed as eigenvalues of A(t); no polynomial coefficient extraction
is involved anywhere.

The Miwa-shifted values tau(n; t -+ [1/z]) with [z] = (z, z^2/2, z^3/3, ...)
are evaluated in closed form through the resummation

    sum_{j>=1} z^{-j} (-Y0)^{j-1} = (zI + Y0)^{-1}     for |z| > rho(Y0),

which turns the shifted determinant into det(nI - A(t) -+ (I-Y0)(zI+Y0)^{-1}).
The truncated-sum oracle for this identity lives in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PhasePoint, build_matrices, rapidity_from_velocity, structure_checks
from .errors import (
    ComplexRootsEncountered,
    DegenerateEigenvalue,
    SingularShiftMatrix,
    SpectralRadiusViolation,
)
from .times import TimeVector

_IMAG_TOL = 1e-9
_EIG_COND_MAX = 1e8


@dataclass(frozen=True)
class TauData:
    """Frozen initial matrices X0 (diagonal, stored as the vector x0) and Y0."""

    x0: np.ndarray
    y0_matrix: np.ndarray

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float)).copy()
        yy = np.asarray(self.y0_matrix, dtype=float).copy()
        if yy.shape != (x0.size, x0.size):
            raise ValueError("Y0 must be N x N for N = len(x0)")
        if abs(np.linalg.det(np.eye(x0.size) - yy)) == 0.0:
            raise ValueError("det(I - Y0) must be nonzero")
        x0.flags.writeable = False
        yy.flags.writeable = False
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "y0_matrix", yy)

    @property
    def n(self) -> int:
        return self.x0.size

    @classmethod
    def from_phase(cls, p: PhasePoint) -> "TauData":
        """Freeze the state's matrices, treating its time as the origin."""
        mats = build_matrices(p)
        return cls(p.x.copy(), mats.Y)

    def spectral_radius(self) -> float:
        return float(np.abs(np.linalg.eigvals(self.y0_matrix)).max())


def a_matrix(td: TauData, t: TimeVector) -> np.ndarray:
    """A(t) = X0 - sum over nonzero t_j of j t_j (I-Y0)(-Y0)^{j-1}."""
    n = td.n
    a = np.diag(td.x0).astype(float)
    if t.entries:
        eye = np.eye(n)
        i_minus_y = eye - td.y0_matrix
        for j, tj in t.entries:
            a = a - j * tj * i_minus_y @ np.linalg.matrix_power(-td.y0_matrix, j - 1)
    return a


def tau_det(td: TauData, n: float, t: TimeVector) -> float:
    """tau(n;t) = det(nI - A(t)); monic of degree N in n."""
    return float(np.linalg.det(n * np.eye(td.n) - a_matrix(td, t)))


def tau_product(p: PhasePoint, n: float) -> float:
    """prod_i (n - x_i) evaluated at the particle state."""
    return float(np.prod(n - p.x))


def tau_roots(td: TauData, t: TimeVector, match_to=None, allow_complex: bool = False):
    """Roots of tau(.;t), i.e. the eigenvalues of A(t).

    Real roots come back sorted, or matched greedily to `match_to` (the
    previous call's output) when tracking along a path.  A nonreal spectrum
    raises ComplexRootsEncountered unless allow_complex is set, in which
    case the complex eigenvalues are returned as given.
    """
    vals = np.linalg.eigvals(a_matrix(td, t))
    scale = 1.0 + np.abs(vals).max()
    if np.abs(vals.imag).max() > _IMAG_TOL * scale:
        if allow_complex:
            return vals
        raise ComplexRootsEncountered(vals)
    roots = vals.real.copy()
    if match_to is None:
        roots.sort()
        return roots
    match_to = np.asarray(match_to, dtype=float)
    out = np.empty_like(roots)
    remaining = list(range(roots.size))
    for slot in range(match_to.size):
        best = min(remaining, key=lambda idx: abs(roots[idx] - match_to[slot]))
        out[slot] = roots[best]
        remaining.remove(best)
    return out


def tau_shifted(td: TauData, n: float, t: TimeVector, z: float, sign: int) -> float:
    """tau(n; t - sign*[1/z]) via the closed-form resummation.

    sign=+1 gives tau(n; t - [1/z]) (the wave-function numerator), sign=-1
    gives tau(n; t + [1/z]) (the adjoint one).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    rho = td.spectral_radius()
    if abs(z) <= rho * (1.0 + 1e-6):
        raise SpectralRadiusViolation(f"|z| = {abs(z)} inside spectral radius {rho}")
    eye = np.eye(td.n)
    shift_mat = z * eye + td.y0_matrix
    det_shift = np.linalg.det(shift_mat)
    if det_shift == 0.0 or abs(det_shift) < 1e-300:
        raise SingularShiftMatrix(f"z I + Y0 singular at z = {z}")
    try:
        resolvent = np.linalg.solve(shift_mat, eye)
    except np.linalg.LinAlgError as exc:
        raise SingularShiftMatrix(str(exc)) from exc
    correction = (eye - td.y0_matrix) @ resolvent
    mat = n * eye - a_matrix(td, t) - sign * correction
    return float(np.linalg.det(mat))


def phase_from_tau(td: TauData, t: TimeVector, eps_collision: float | None = None) -> PhasePoint:
    """Recover the particle state at multi-time t from the tau data.

    Positions are the eigenvalues of A(t).  Velocities are analytic
    eigenvalue derivatives lambda_i' = (v_i . A' u_i)/(v_i . u_i) with
    A' = dA/dt_1 = -(I - Y0) and u_i, v_i right/left eigenvectors;
    rapidities then follow from the velocity relation.
    """
    a = a_matrix(td, t)
    vals, vecs = np.linalg.eig(a)
    scale = 1.0 + np.abs(vals).max()
    if np.abs(vals.imag).max() > _IMAG_TOL * scale:
        raise ComplexRootsEncountered(vals)

    lvals, lvecs = np.linalg.eig(a.T)
    # pair each right eigenvalue with its closest left partner
    used = set()
    order = np.empty(td.n, dtype=int)
    for i in range(td.n):
        cands = [j for j in range(td.n) if j not in used]
        j = min(cands, key=lambda jj: abs(lvals[jj] - vals[i]))
        if abs(lvals[j] - vals[i]) > 1e-6 * scale:
            raise DegenerateEigenvalue(
                f"left/right eigenvalue mismatch {lvals[j]} vs {vals[i]}"
            )
        order[i] = j
        used.add(j)

    adot = -(np.eye(td.n) - td.y0_matrix)
    xdot = np.empty(td.n)
    for i in range(td.n):
        u = vecs[:, i].real
        v = lvecs[:, order[i]].real
        denom = float(v @ u)
        norm = float(np.linalg.norm(u) * np.linalg.norm(v))
        if norm == 0.0 or abs(denom) * _EIG_COND_MAX < norm:
            raise DegenerateEigenvalue(f"eigenvalue {vals[i].real} too ill-conditioned")
        xdot[i] = float(v @ adot @ u) / denom

    x = vals.real
    idx = np.argsort(x)
    x = x[idx]
    xdot = xdot[idx]
    eps = eps_collision if eps_collision is not None else 1e-6
    y = rapidity_from_velocity(x, xdot, eps)
    return PhasePoint(x, y, t, eps)


def first_order_tau_check(p: PhasePoint, t1: float, n_values) -> float:
    """Max residual of tau(n; t1) against prod_j (n - x_j + t1*e^{-y_j} prod ...).

    The product form is the first-order expansion in t1; the residual is
    expected to scale like t1^2.
    """
    td = TauData.from_phase(p)
    t = TimeVector(((1, t1),))
    worst = 0.0
    x, y = p.x, p.y
    n_particles = p.n_particles
    for n in n_values:
        lhs = tau_det(td, float(n), t)
        prod = 1.0
        for j in range(n_particles):
            factor = 1.0
            for s in range(n_particles):
                if s != j:
                    factor *= (x[j] - x[s] + 1.0) / (x[j] - x[s])
            prod *= n - x[j] + t1 * math.exp(-y[j]) * factor
        worst = max(worst, abs(lhs - prod))
    return worst


def miwa_diagnostic(td: TauData, n: float, t: TimeVector, depth: int = 40) -> float:
    """Truncated check of tau(n;t) = tau(0; t1+n, t2-n/2, t3+n/3, ...).

    Only valid for rho(Y0) < 1; the truncation error decays like rho^depth.
    Returns |tau(n;t) - shifted tau(0;.)|.
    """
    rho = td.spectral_radius()
    if rho >= 1.0 - 1e-9:
        raise SpectralRadiusViolation(
            f"diagnostic needs rho(Y0) < 1, got {rho}"
        )
    shifted = t
    for j in range(1, depth + 1):
        shifted = shifted.added(j, ((-1) ** (j - 1)) * n / j)
    return abs(tau_det(td, n, t) - tau_det(td, 0.0, shifted))

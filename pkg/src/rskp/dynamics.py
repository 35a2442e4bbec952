"""Particle-side machinery: the X, Y, M matrices and the hierarchy vector fields.

The state of the system is a PhasePoint (positions x_i, rapidities y_i).
From it we build

    X = diag(x_1, ..., x_N)
    Y_ij = delta_ij + e^{-y_i}/(x_i - x_j - 1) * prod_{s != i} (x_i - x_s + 1)/(x_i - x_s)

and the Hamiltonians H_k = tr(Y^k).  The k-th flow moves the state by

    dx_i/dt_k = (-1)^k dH_k/dy_i,    dy_i/dt_k = -(-1)^k dH_k/dx_i.

A useful identity used throughout: with xdot_i = -e^{-y_i} prod_{s != i}
(x_i - x_s + 1)/(x_i - x_s) (the t_1 velocity), the matrix Y collapses to

    Y_ij = delta_ij - xdot_i / (x_i - x_j - 1),

so Y is rational in (x, xdot).  All exact-arithmetic layers build on that
form.

dH_k/dy_i has the closed form k * [(I-Y) Y^{k-1}]_ii since dY/dy_i = I_i - I_i Y.
dH_k/dx_m is assembled from logarithmic derivatives of the Y entries; the
expression is certified against finite differences in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CollisionError, NonpositiveRapidityArgument
from .times import TimeVector

EPS_COLLISION_DEFAULT = 1e-6


def check_gaps(x, eps=EPS_COLLISION_DEFAULT):
    """Validate |x_i - x_j| > eps and |x_i - x_j - 1| > eps for all i != j.

    Raises CollisionError naming the first offending pair.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            gap = x[i] - x[j]
            if abs(gap) <= eps:
                raise CollisionError((i, j), gap)
            if abs(gap - 1.0) <= eps:
                raise CollisionError((i, j), gap,
                                     f"particles {i} and {j}: gap {gap!r} too close to 1")


@dataclass(frozen=True)
class PhasePoint:
    """Positions and rapidities of N particles at a fixed multi-time.

    Construction validates the gap invariants; the derived t_1 velocity is
    automatically nonzero for real rapidities once the gaps are valid, so no
    separate check is needed for it.
    """

    x: np.ndarray
    y: np.ndarray
    t: TimeVector = field(default_factory=TimeVector.zero)
    eps_collision: float = EPS_COLLISION_DEFAULT

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).copy()
        y = np.atleast_1d(np.asarray(self.y, dtype=float)).copy()
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        check_gaps(x, self.eps_collision)
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_particles(self) -> int:
        return self.x.size

    def with_t(self, t: TimeVector) -> "PhasePoint":
        return PhasePoint(self.x, self.y, t, self.eps_collision)


@dataclass(frozen=True)
class RsMatrices:
    X: np.ndarray
    Y: np.ndarray
    M: np.ndarray | None = None


def _gap_matrix(x):
    """D_ij = x_i - x_j with safe diagonal handling left to callers."""
    return x[:, None] - x[None, :]


def velocity_from_rapidity(x, y):
    """t_1 velocities: xdot_i = -e^{-y_i} prod_{s != i} (x_i-x_s+1)/(x_i-x_s)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = _gap_matrix(x)
    np.fill_diagonal(d, 1.0)  # neutral element for the row products
    ratio = (d + 1.0) / d
    np.fill_diagonal(ratio, 1.0)
    prod = ratio.prod(axis=1)
    return -np.exp(-y) * prod


def build_matrices(p: PhasePoint, with_m: bool = False) -> RsMatrices:
    """Construct X = diag(x) and the Y matrix (optionally M as well)."""
    x, y = p.x, p.y
    xdot = velocity_from_rapidity(x, y)
    a = 1.0 / (_gap_matrix(x) - 1.0)  # diagonal entries are 1/(-1), well defined
    yy = np.eye(x.size) - xdot[:, None] * a
    m = lax_m_matrix(p) if with_m else None
    return RsMatrices(X=np.diag(x), Y=yy, M=m)


def hamiltonian(p: PhasePoint, k: int) -> float:
    """H_k = tr(Y^k)."""
    if k < 1:
        raise ValueError("flow index must be >= 1")
    yy = build_matrices(p).Y
    return float(np.trace(np.linalg.matrix_power(yy, k)))


def _log_derivative_pieces(x):
    """Shared ingredients of dY/dx_m.

    Returns (A, B, L) with
        A_ij = 1/(x_i - x_j - 1)                   (defined for all i, j)
        B_im = 1/(x_i - x_m) - 1/(x_i - x_m + 1)   for i != m, else 0
        L_i  = sum_{s != i} (1/(x_i - x_s + 1) - 1/(x_i - x_s)) = -sum_s B_is
    """
    d = _gap_matrix(x)
    a = 1.0 / (d - 1.0)
    dsafe = d.copy()
    np.fill_diagonal(dsafe, 1.0)
    b = 1.0 / dsafe - 1.0 / (dsafe + 1.0)
    np.fill_diagonal(b, 0.0)
    ell = -b.sum(axis=1)
    return a, b, ell


def grad_hamiltonian(p: PhasePoint, k: int):
    """Analytic gradients (dH_k/dx, dH_k/dy).

    dH/dy_i = k [(I - Y) Y^{k-1}]_ii.  dH/dx_m uses the logarithmic
    derivatives of the off-diagonal structure of G = Y - I:

        dG_ij/dx_m = G_ij * (B_im + delta_jm A_ij)        for m != i
        dG_ij/dx_i = G_ij * (L_i - A_ij)                  for j != i
        dG_ii/dx_i = G_ii * L_i        (diagonal denominator is constant)

    with A, B, L from _log_derivative_pieces.
    """
    if k < 1:
        raise ValueError("flow index must be >= 1")
    x = p.x
    n = x.size
    yy = build_matrices(p).Y
    yk1 = np.linalg.matrix_power(yy, k - 1)
    dh_dy = k * np.diag(yk1 - yy @ yk1).copy()

    g = yy - np.eye(n)
    a, b, ell = _log_derivative_pieces(x)
    # d(tr Y^k)/dx_m = k * sum_ij T[m]_ij (Y^{k-1})_ji with
    #   T[m]_ij = G_ij B_im + delta_jm G_im A_im          (i != m)
    #   T[m]_mj = G_mj (L_m - A_mj), T[m]_mm = G_mm L_m   (row m)
    # contracted without forming T[m]: row sums R_i of G.P plus column/row
    # sums of S = G.A.P (entrywise products, P = (Y^{k-1})^T).
    pt = yk1.T
    r = (g * pt).sum(axis=1)
    s = g * a * pt
    dh_dx = k * (b.T @ r + ell * r + s.sum(axis=0) - s.sum(axis=1))
    return dh_dx, dh_dy


def vector_field(p: PhasePoint, k: int):
    """Right-hand side of the k-th flow: ((-1)^k dH/dy, -(-1)^k dH/dx)."""
    dh_dx, dh_dy = grad_hamiltonian(p, k)
    sign = (-1.0) ** k
    return sign * dh_dy, -sign * dh_dx


def rapidity_from_velocity(x, xdot, eps=EPS_COLLISION_DEFAULT):
    """Invert the velocity relation: y_i with e^{-y_i} = -xdot_i prod_{s != i} (x_i-x_s)/(x_i-x_s+1).

    Raises NonpositiveRapidityArgument when the exponential would have to be
    nonpositive (state outside the real regime).
    """
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    check_gaps(x, eps)
    d = _gap_matrix(x)
    np.fill_diagonal(d, 1.0)
    ratio = d / (d + 1.0)
    np.fill_diagonal(ratio, 1.0)
    prod = ratio.prod(axis=1)
    arg = -xdot * prod
    for i, v in enumerate(arg):
        if not v > 0.0:
            raise NonpositiveRapidityArgument(i, float(v))
    return -np.log(arg)


def lax_m_matrix(p: PhasePoint) -> np.ndarray:
    """The M matrix of the t_1 Lax pair dY/dt_1 = [Y, M].

    M_ij = -xdot_i/(x_i - x_j) off the diagonal;
    M_ii = sum_k xdot_k/(x_i - x_k + 1) - sum_{k != i} xdot_k/(x_i - x_k),
    where the first sum includes k = i (contributing xdot_i).
    """
    x = p.x
    xdot = velocity_from_rapidity(x, p.y)
    d = _gap_matrix(x)
    dsafe = d.copy()
    np.fill_diagonal(dsafe, 1.0)
    m = -xdot[:, None] / dsafe
    inv_shift = 1.0 / (d + 1.0)   # includes k = i via 1/1
    off = 1.0 / dsafe
    np.fill_diagonal(off, 0.0)
    diag = inv_shift @ xdot - off @ xdot
    m[np.arange(x.size), np.arange(x.size)] = diag
    return m


def structure_checks(p: PhasePoint) -> dict:
    """Residuals of the algebraic fingerprints of a valid state.

    rank_one_residual      sigma_2/sigma_1 of R = XY - YX + I - Y
    rank_one_entrywise     max |XY - YX - Y + I + diag(xdot) e e^t|
    cauchy_residual        |det(I-Y) - e^{-sum y}| / e^{-sum y}
    """
    mats = build_matrices(p)
    x, yy = mats.X, mats.Y
    n = p.n_particles
    r = x @ yy - yy @ x + np.eye(n) - yy
    if n == 1:
        rank_one = 0.0
    else:
        s = np.linalg.svd(r, compute_uv=False)
        rank_one = float(s[1] / s[0]) if s[0] > 0 else 0.0
    xdot = velocity_from_rapidity(p.x, p.y)
    entrywise = float(np.abs(r + np.outer(xdot, np.ones(n))).max())
    target = math.exp(-float(p.y.sum()))
    cauchy = abs(float(np.linalg.det(np.eye(n) - yy)) - target) / target
    return {
        "rank_one_residual": rank_one,
        "rank_one_entrywise": entrywise,
        "cauchy_residual": cauchy,
    }


# ---------------------------------------------------------------------------
# Exact-rational layer.  Positions and the factors c_i = e^{-y_i} are taken
# as Fractions; everything downstream (velocities, Y) is then exact.

def exact_velocity(x, c):
    """Exact xdot_i = -c_i prod_{s != i} (x_i - x_s + 1)/(x_i - x_s)."""
    x = [Fraction(v) for v in x]
    c = [Fraction(v) for v in c]
    n = len(x)
    out = []
    for i in range(n):
        prod = Fraction(1)
        for s in range(n):
            if s == i:
                continue
            d = x[i] - x[s]
            if d == 0 or d + 1 == 0 or d - 1 == 0:
                raise CollisionError((i, s), float(d))
            prod *= (d + 1) / d
        out.append(-c[i] * prod)
    return out


def exact_y_matrix(x, xdot):
    """Exact Y_ij = delta_ij - xdot_i/(x_i - x_j - 1) as nested Fraction lists."""
    x = [Fraction(v) for v in x]
    xdot = [Fraction(v) for v in xdot]
    n = len(x)
    yy = []
    for i in range(n):
        row = []
        for j in range(n):
            d = x[i] - x[j] - 1
            if d == 0:
                raise CollisionError((i, j), float(x[i] - x[j]))
            row.append((Fraction(1) if i == j else Fraction(0)) - xdot[i] / d)
        yy.append(row)
    return yy


def exact_state_from_phase(p: PhasePoint):
    """Exact (x, xdot, Y) snapshot of a float state.

    Binary floats are rationals, so Fraction(v) is lossless; the rational
    velocity is recomputed exactly from the rational x and c = e^{-y}
    (the latter rounded once to float, then taken exactly).
    """
    x = [Fraction(float(v)) for v in p.x]
    c = [Fraction(math.exp(-float(v))) for v in p.y]
    xdot = exact_velocity(x, c)
    return x, xdot, exact_y_matrix(x, xdot)

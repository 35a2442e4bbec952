"""Wave functions as tau-quotients and their consistency checks.

The wave function and its adjoint are built from shifted tau values,

    w(n;t,z)  = tau(n; t - [1/z]) / tau(n;t) * Exp(n;t,z),
    w*(n;t,z) = tau(n; t + [1/z]) / tau(n;t) / Exp(n;t,z),

with Exp(n;t,z) = (1+z)^n exp(Sigma_i t_i z^i).  Three independent facts
about them are checkable numerically:

  * their z^{-k} expansion coefficients equal the partial-fraction residue
    functions w_k(n) that also feed the dressing operator;
  * w is an eigenfunction of the dressed operator L with eigenvalue z, up
    to the truncation tail of L;
  * the first flow acts on w as Delta + a_0(n) and on w* as
    nabla - a_0(n-1).

The expansion coefficients come from two separate routes.  The primary
route is exact in structure: the quotient of shifted tau over tau is a
ratio of two degree-N polynomials in u = 1/z,

    det(I + u C) / det(I + u Y0),   C = Y0 - sign (nI - A)^{-1}(I - Y0),

whose coefficients follow from Newton's identities on the traces of matrix
powers, after which plain long division yields the series.  The secondary
route samples the quotient at several z values beyond the spectral radius
and solves a Vandermonde system; it is the one that can degrade, so it
carries a conditioning guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PhasePoint
from .errors import (
    IllConditionedExtraction,
    RskpError,
    SpectralRadiusViolation,
    TauZeroDenominator,
)
from .pdo import a0_closed_form, gen_binom, lax_operator
from .tau import TauData, a_matrix, phase_from_tau, tau_det, tau_shifted
from .times import TimeVector

_KINDS = ("wave", "adjoint")


def _sign_for(kind: str) -> int:
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    return 1 if kind == "wave" else -1       # +1 shifts times by -[1/z]


def _tau_guard(td: TauData, n) -> float:
    # dimension-scaled zero test for the tau denominator
    return 1e-12 * max(1.0, float(abs(n))) ** td.n


@dataclass(frozen=True)
class WaveSample:
    n: int
    z: float
    t: TimeVector
    value: float
    kind: str


def exp_factor(n, t: TimeVector, z: float) -> float:
    """Exp(n;t,z) = (1+z)^n exp(Sigma_i t_i z^i)."""
    return (1.0 + z) ** n * math.exp(sum(v * z ** k for k, v in t.to_dict().items()))


def wave_value(td: TauData, n: int, t: TimeVector, z: float, kind: str = "wave") -> WaveSample:
    """Wave (or adjoint wave) value at integer site n and spectral point z."""
    sign = _sign_for(kind)
    if 1.0 + z == 0.0:
        raise ValueError("z = -1 makes the exponential prefactor vanish identically")
    den = tau_det(td, n, t)
    if abs(den) <= _tau_guard(td, n):
        raise TauZeroDenominator(f"tau({n}; t) = {den:.3e} vanishes at the sample")
    num = tau_shifted(td, n, t, z, sign)
    ef = exp_factor(n, t, z)
    value = (num / den) * (ef if kind == "wave" else 1.0 / ef)
    return WaveSample(n=n, z=z, t=t, value=value, kind=kind)


def _elem_symmetric(mat: np.ndarray, depth: int):
    """Coefficients e_0..e_depth of det(I + u M) via Newton's identities."""
    nn = mat.shape[0]
    kmax = min(nn, depth)
    powers = np.eye(nn)
    traces = [0.0]
    for _ in range(kmax):
        powers = powers @ mat
        traces.append(float(np.trace(powers)))
    e = [1.0] + [0.0] * depth
    for k in range(1, kmax + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1.0) ** (i - 1) * e[k - i] * traces[i]
        e[k] = acc / k
    return e                                  # e_k = 0 for k > N already


def wave_series_coeffs(td: TauData, n: int, t: TimeVector, depth: int,
                       kind: str = "wave", method: str = "series"):
    """Coefficients [w_0, w_1, ..., w_depth] of the z^{-k} expansion of the
    tau-quotient (w_0 = 1).

    method="series" converts the quotient to a ratio of polynomials in
    u = 1/z and long-divides; method="vandermonde" samples the quotient at
    depth+2 geometrically spaced z beyond the spectral radius and solves
    the linear system, raising IllConditionedExtraction past cond 1e10.
    """
    sign = _sign_for(kind)
    if depth < 0:
        raise ValueError("depth must be >= 0")

    if method == "series":
        a = a_matrix(td, t)
        d = float(n) * np.eye(td.n) - a
        if abs(np.linalg.det(d)) <= _tau_guard(td, n):
            raise TauZeroDenominator(f"tau({n}; t) vanishes; series quotient undefined")
        core = np.linalg.solve(d, np.eye(td.n) - td.y0_matrix)
        c = td.y0_matrix - sign * core
        num = _elem_symmetric(c, depth)
        den = _elem_symmetric(td.y0_matrix, depth)
        q = [1.0] + [0.0] * depth
        for k in range(1, depth + 1):
            q[k] = num[k] - sum(den[i] * q[k - i] for i in range(1, k + 1))
        return q

    if method == "vandermonde":
        rho_eff = max(td.spectral_radius(), 1.0)
        m = depth + 2
        zs = np.geomspace(2.0 * rho_eff, 8.0 * rho_eff, m)
        v = np.vander(1.0 / zs, m, increasing=True)
        cond = np.linalg.cond(v)
        if cond > 1e10:
            raise IllConditionedExtraction(
                f"Vandermonde condition {cond:.3e} exceeds 1e10; raise the z samples"
            )
        den_v = tau_det(td, n, t)
        if abs(den_v) <= _tau_guard(td, n):
            raise TauZeroDenominator(f"tau({n}; t) vanishes at extraction site")
        rhs = np.empty(m)
        for s, z in enumerate(zs):
            rhs[s] = tau_shifted(td, n, t, float(z), sign) / den_v
        coef = np.linalg.solve(v, rhs)
        return [float(c) for c in coef[: depth + 1]]

    raise ValueError(f"unknown extraction method {method!r}")


def _apply_delta_power(j: int, n: int, value_at) -> float:
    """(Delta^j f)(n) from point values, for any integer j.

    Negative powers expand as Delta^{-m} = Sigma_{i>=0} binom(m+i-1, i)
    E^{-m-i}, a backward sum that converges when the values decay
    geometrically to the left (|1+z| > 1 for wave values); it is cut when
    a term drops below 1e-18 of the partial sum.
    """
    if j == 0:
        return value_at(n)
    if j > 0:
        out = 0.0
        for s in range(j + 1):
            w = float(gen_binom(j, s))
            out += (w if (j - s) % 2 == 0 else -w) * value_at(n + s)
        return out
    m = -j
    total = 0.0
    i = 0
    while True:
        term = float(gen_binom(m + i - 1, i)) * value_at(n - m - i)
        total += term
        if i >= 4 and abs(term) <= 1e-18 * max(abs(total), 1e-300):
            return total
        i += 1
        if i > 2000:
            raise RskpError("backward shift sum failed to converge after 2000 terms")


def eigen_residual(p: PhasePoint, td: TauData, z: float, K: int, n_window) -> float:
    """max_n |(L w)(n) - z w(n)| / |z w(n)| over the window (inclusive pair).

    L's negative orders act as truncated backward sums on cached wave
    values; the residual is dominated by the truncation tail of L and
    shrinks roughly like |z|^{-K}.
    """
    if abs(1.0 + z) <= 1.0:
        raise SpectralRadiusViolation(
            f"|1+z| = {abs(1.0 + z):.3f} <= 1: backward shift sums diverge"
        )
    lax = lax_operator(p, K)
    t0 = TimeVector.zero()
    cache: dict[int, float] = {}

    def value_at(m: int) -> float:
        if m not in cache:
            cache[m] = wave_value(td, m, t0, z, "wave").value
        return cache[m]

    lo, hi = n_window
    worst = 0.0
    for n in range(int(lo), int(hi) + 1):
        acc = 0.0
        for j in sorted(lax.coeffs, reverse=True):
            cj = float(lax.coeff(j)(n))
            if cj != 0.0:
                acc += cj * _apply_delta_power(j, n, value_at)
        ref = z * value_at(n)
        worst = max(worst, abs(acc - ref) / abs(ref))
    return worst


def t1_flow_residual(td: TauData, n: int, z: float, h: float, kind: str = "wave") -> float:
    """Relative defect of the first-flow action on the wave functions:

        d w/d t_1  = (Delta + a_0(n)) w         (kind="wave")
        d w*/d t_1 = (nabla - a_0(n-1)) w*      (kind="adjoint")

    The left side is a central difference of wave_value along t_1; the
    right side uses shifts in n at t = 0 and the exact partial-fraction
    a_0 of the state recovered from the tau data.
    """
    _sign_for(kind)
    t0 = TimeVector.zero()
    vp = wave_value(td, n, t0.with_entry(1, +h), z, kind).value
    vm = wave_value(td, n, t0.with_entry(1, -h), z, kind).value
    fd = (vp - vm) / (2.0 * h)

    a0 = a0_closed_form(phase_from_tau(td, t0))
    if kind == "wave":
        w0 = wave_value(td, n, t0, z, kind).value
        w1 = wave_value(td, n + 1, t0, z, kind).value
        rhs = (w1 - w0) + float(a0(n)) * w0
    else:
        w0 = wave_value(td, n, t0, z, kind).value
        wb = wave_value(td, n - 1, t0, z, kind).value
        rhs = (w0 - wb) - float(a0(n - 1)) * w0
    return abs(fd - rhs) / max(abs(fd), abs(rhs), 1e-300)

"""Truncated algebra of formal pseudo-difference operators.

Elements are finite sums  Sigma_j a_j(n) Delta^j  with RationalFn
coefficients, where Delta is the forward difference (Delta f)(n) =
f(n+1) - f(n).  Multiplication moves coefficients across powers of Delta
with the generalized-binomial rule

    Delta^j . f(n) = sum_{i>=0} binom(j, i) (Delta^i f)(n + j - i) Delta^{j-i},

which terminates for j >= 0 (binomials vanish) and for polynomial f
(iterated differences vanish), and otherwise runs forever.  Since the ring
of interest allows infinitely many negative orders, every computed operator
carries a trust marker:

    trust_min = None   the stored orders are the whole operator (exact);
    trust_min = t      orders >= t are correct, orders < t are unknown.

Reading a coefficient below the trust floor raises TruncationExhausted
instead of returning garbage.  Multiplication propagates trust: unknown
tails of the factors pollute the product up to (tail order + partner's top
order), and any forcibly cut infinite sum caps trust at -K.  Products whose
expansions all terminate keep every order and stay exact; the K argument
only controls forced cuts.

The formal adjoint (f* = f, Delta* = -nabla, (ab)* = b*a*) is only
computable order-by-order for exact operators: an unknown tail at very
negative orders would feed every adjoint order <= 0, so adjoints of
truncated operators are refused outright.  Because nabla = 1 - E^{-1} is
exact in the shift basis, a small exact ring ShiftOp (finite sums
f_m(n) E^m) is provided alongside; its product and adjoint involve no
truncation at all and serve as the reference implementation in tests.

Beyond the generic algebra, this module builds the concrete operators of
the particle model: the dressing operator W from the residue vectors, its
Neumann-series inverse, the dressed operator L = W Delta W^{-1}, and the
finite-difference residuals of the evolution identities that L satisfies
along the integrated flows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .dynamics import PhasePoint, exact_state_from_phase
from .errors import TruncationExhausted
from .integrator import integrate_flow
from .ratfun import Polynomial, RationalFn

DEFAULT_TRUNCATION = 8

_ZERO = RationalFn.zero()


def gen_binom(j: int, i: int) -> Fraction:
    """binom(j, i) for any integer j, i >= 0, by the falling factorial."""
    if i < 0:
        return Fraction(0)
    num = 1
    for s in range(i):
        num *= j - s
    return Fraction(num, math.factorial(i))


def _as_ratfn(v) -> RationalFn:
    if isinstance(v, RationalFn):
        return v
    if isinstance(v, Polynomial):
        return RationalFn(v)
    if isinstance(v, (int, Fraction, float)):
        return RationalFn.const(v)
    raise TypeError(f"cannot use {type(v).__name__} as an operator coefficient")


class PseudoDiffOp:
    """Sigma_j coeffs[j](n) Delta^j, with a truncation trust marker.

    coeffs maps order -> RationalFn; zero coefficients are not stored, so a
    missing key at or above trust_min means an exactly zero coefficient.
    """

    __slots__ = ("coeffs", "trust_min")

    def __init__(self, coeffs=None, trust_min=None):
        clean = {}
        if coeffs:
            for j, c in coeffs.items():
                j = int(j)
                if trust_min is not None and j < trust_min:
                    raise ValueError(
                        f"coefficient at order {j} below its own trust floor {trust_min}"
                    )
                c = _as_ratfn(c)
                if not c.is_zero():
                    clean[j] = c
        self.coeffs = clean
        self.trust_min = trust_min

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls) -> "PseudoDiffOp":
        return cls({0: 1})

    @classmethod
    def delta_power(cls, j: int) -> "PseudoDiffOp":
        return cls({j: 1})

    @classmethod
    def mult(cls, f) -> "PseudoDiffOp":
        """Multiplication operator by the function f(n)."""
        return cls({0: _as_ratfn(f)})

    # -- inspection ---------------------------------------------------

    @property
    def order_max(self):
        """Largest stored order, or None for an operator with no known terms."""
        return max(self.coeffs) if self.coeffs else None

    @property
    def order_min(self):
        """Truncation floor: trust_min if truncated, else the lowest stored order."""
        if self.trust_min is not None:
            return self.trust_min
        return min(self.coeffs) if self.coeffs else 0

    def is_exact(self) -> bool:
        return self.trust_min is None

    def coeff(self, j: int) -> RationalFn:
        """Coefficient at order j; raises below the trust floor."""
        if self.trust_min is not None and j < self.trust_min:
            raise TruncationExhausted(
                f"order {j} is below the truncation floor {self.trust_min}"
            )
        return self.coeffs.get(j, _ZERO)

    def known_orders(self):
        return sorted(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PseudoDiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs and self.trust_min == other.trust_min

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.trust_min))

    def __repr__(self) -> str:
        inner = ", ".join(f"{j}: {c!r}" for j, c in sorted(self.coeffs.items(), reverse=True))
        tag = "exact" if self.trust_min is None else f"trust>={self.trust_min}"
        return f"PseudoDiffOp({{{inner}}}, {tag})"

    # -- linear structure ----------------------------------------------

    def __neg__(self) -> "PseudoDiffOp":
        return PseudoDiffOp({j: -c for j, c in self.coeffs.items()}, self.trust_min)

    def __add__(self, other) -> "PseudoDiffOp":
        if not isinstance(other, PseudoDiffOp):
            return NotImplemented
        trusts = [t for t in (self.trust_min, other.trust_min) if t is not None]
        trust = max(trusts) if trusts else None
        out = {}
        for src in (self.coeffs, other.coeffs):
            for j, c in src.items():
                if trust is not None and j < trust:
                    continue    # known in one term only: unknowable in the sum
                out[j] = out[j] + c if j in out else c
        return PseudoDiffOp(out, trust)

    def __sub__(self, other) -> "PseudoDiffOp":
        return self + (-other)

    def scale(self, f) -> "PseudoDiffOp":
        """Left multiplication by a function or constant (no Delta crossing)."""
        f = _as_ratfn(f)
        if f.is_zero():
            return PseudoDiffOp({}, self.trust_min)
        return PseudoDiffOp({j: f * c for j, c in self.coeffs.items()}, self.trust_min)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, float, RationalFn, Polynomial)):
            return self.scale(other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, PseudoDiffOp):
            raise TypeError("operator products need a truncation depth; use pdo_mul(a, b, K)")
        return NotImplemented


def pdo_mul(a: PseudoDiffOp, b: PseudoDiffOp, K: int = DEFAULT_TRUNCATION) -> PseudoDiffOp:
    """Product in the Delta basis with trust propagation.

    Where the commutation sums terminate the result is exact; any sum that
    would run past order -K is cut there and the result's trust floor says
    so.  Unknown tails of the inputs pollute the product below
    (tail + partner's top order), whichever is higher.
    """
    if K < 0:
        raise ValueError("truncation depth K must be >= 0")

    bounds = []
    if a.trust_min is not None:
        if b.coeffs:
            bounds.append(a.trust_min - 1 + max(b.coeffs))
        if b.trust_min is not None:
            bounds.append(a.trust_min + b.trust_min - 2)
    if b.trust_min is not None and a.coeffs:
        bounds.append(b.trust_min - 1 + max(a.coeffs))
    trust_in = max(bounds) + 1 if bounds else None

    has_cut = any(
        j < 0 and not bl.is_polynomial()
        for j in a.coeffs
        for bl in b.coeffs.values()
    )
    if trust_in is None and not has_cut:
        floor = None
    else:
        cands = [v for v in (trust_in, -K if has_cut else None) if v is not None]
        floor = max(cands)

    out: dict[int, RationalFn] = {}
    for j, aj in a.coeffs.items():
        for l, bl in b.coeffs.items():
            if j >= 0:
                i_top = min(j, max(bl.num.degree, 0)) if bl.is_polynomial() else j
            elif bl.is_polynomial():
                i_top = max(bl.num.degree, 0)
            else:
                i_top = j + l - floor
                if i_top < 0:
                    continue
            db = bl
            for i in range(i_top + 1):
                m = j + l - i
                if floor is not None and m < floor:
                    break
                w = gen_binom(j, i)
                if w != 0:
                    term = aj * db.shift(m - l) * w
                    out[m] = out[m] + term if m in out else term
                db = db.delta()
    if floor is not None:
        out = {m: c for m, c in out.items() if m >= floor}
    return PseudoDiffOp(out, floor)


def pdo_pow(a: PseudoDiffOp, k: int, K: int = DEFAULT_TRUNCATION) -> PseudoDiffOp:
    if k < 0:
        raise ValueError("negative operator powers are not defined here")
    out = PseudoDiffOp.identity()
    for _ in range(k):
        out = pdo_mul(out, a, K)
    return out


def pdo_split(a: PseudoDiffOp):
    """(plus, minus): orders >= 0 and orders <= -1, summing back to a.

    The plus part is exact whenever all nonnegative orders are known (trust
    floor <= 0); otherwise the split is refused.
    """
    if a.trust_min is not None and a.trust_min > 0:
        raise TruncationExhausted(
            f"nonnegative orders below {a.trust_min} are unknown; cannot split"
        )
    plus = {j: c for j, c in a.coeffs.items() if j >= 0}
    minus = {j: c for j, c in a.coeffs.items() if j < 0}
    return PseudoDiffOp(plus, None), PseudoDiffOp(minus, a.trust_min)


def neg_nabla_power(j: int, K: int = DEFAULT_TRUNCATION) -> PseudoDiffOp:
    """(-nabla)^j in the Delta basis.

    nabla^j = (1 + Delta^{-1})^{-j}, a terminating binomial for j <= 0 and
    an infinite constant-coefficient series (cut at -K) for j > 0.
    """
    sign = 1 if j % 2 == 0 else -1
    if j <= 0:
        coeffs = {-i: sign * gen_binom(-j, i) for i in range(-j + 1)}
        return PseudoDiffOp(coeffs, None)
    coeffs = {-i: sign * gen_binom(-j, i) for i in range(K + 1)}
    return PseudoDiffOp(coeffs, -K)


def pdo_adjoint(a: PseudoDiffOp, K: int = DEFAULT_TRUNCATION) -> PseudoDiffOp:
    """Formal adjoint Sigma_j (-nabla)^j o a_j(n) of an exact operator.

    A truncated input is refused: each unknown order j < 0 of the input
    would contribute to every adjoint order in [j, 0], so no order <= 0 of
    the result could be trusted.  The result itself is exact precisely when
    the input has no positive orders and polynomial coefficients; otherwise
    it carries a -K trust floor from the forced cuts.
    """
    if a.trust_min is not None:
        raise TruncationExhausted(
            "adjoint of a truncated operator has no trustworthy orders <= 0"
        )
    out = PseudoDiffOp({})
    for j, c in sorted(a.coeffs.items()):
        out = out + pdo_mul(neg_nabla_power(j, K), PseudoDiffOp.mult(c), K)
    return out


class ShiftOp:
    """Finite sum Sigma_m f_m(n) E^m in the shift (E f)(n) = f(n+1).

    An exact ring: products and adjoints of finite shift polynomials are
    finite shift polynomials, with no truncation anywhere.  Conversion to
    the Delta basis is exact for m >= 0 and geometric (cut at -K) for
    m < 0.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for m, f in terms.items():
                f = _as_ratfn(f)
                if not f.is_zero():
                    clean[int(m)] = f
        self.terms = clean

    @classmethod
    def identity(cls) -> "ShiftOp":
        return cls({0: 1})

    @classmethod
    def e_power(cls, m: int) -> "ShiftOp":
        return cls({m: 1})

    @classmethod
    def mult(cls, f) -> "ShiftOp":
        return cls({0: f})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShiftOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self) -> "ShiftOp":
        return ShiftOp({m: -f for m, f in self.terms.items()})

    def __add__(self, other) -> "ShiftOp":
        out = dict(self.terms)
        for m, f in other.terms.items():
            out[m] = out[m] + f if m in out else f
        return ShiftOp(out)

    def __sub__(self, other) -> "ShiftOp":
        return self + (-other)

    def __mul__(self, other) -> "ShiftOp":
        """(f E^a)(g E^b) = f(n) g(n+a) E^{a+b}; exact."""
        if not isinstance(other, ShiftOp):
            return NotImplemented
        out: dict[int, RationalFn] = {}
        for ma, fa in self.terms.items():
            for mb, fb in other.terms.items():
                m = ma + mb
                term = fa * fb.shift(ma)
                out[m] = out[m] + term if m in out else term
        return ShiftOp(out)

    def adjoint(self) -> "ShiftOp":
        """(f E^m)* = f(n-m) E^{-m}; an exact involution."""
        return ShiftOp({-m: f.shift(-m) for m, f in self.terms.items()})

    def to_pdo(self, K: int = DEFAULT_TRUNCATION) -> PseudoDiffOp:
        """Delta-basis form via E^m = Sigma_i binom(m,i) Delta^{m-i}."""
        out: dict[int, RationalFn] = {}
        truncated = False
        for m, f in self.terms.items():
            i_top = m if m >= 0 else K + m
            if m < 0:
                truncated = True
                if i_top < 0:
                    continue
            for i in range(i_top + 1):
                w = gen_binom(m, i)
                if w == 0:
                    continue
                j = m - i
                term = f * w
                out[j] = out[j] + term if j in out else term
        floor = -K if truncated else None
        if floor is not None:
            out = {j: c for j, c in out.items() if j >= floor}
        return PseudoDiffOp(out, floor)

    @classmethod
    def from_pdo(cls, a: PseudoDiffOp) -> "ShiftOp":
        """Exact conversion; defined only for exact operators with orders >= 0."""
        if a.trust_min is not None:
            raise TruncationExhausted("only exact operators convert to the shift basis")
        if a.coeffs and min(a.coeffs) < 0:
            raise ValueError("negative Delta orders have no finite shift-basis form")
        out = cls({})
        for j, c in a.coeffs.items():
            terms = {
                i: c * (gen_binom(j, i) * (1 if (j - i) % 2 == 0 else -1))
                for i in range(j + 1)
            }
            out = out + cls(terms)
        return out

    def __repr__(self) -> str:
        inner = ", ".join(f"E^{m}: {f!r}" for m, f in sorted(self.terms.items(), reverse=True))
        return f"ShiftOp({{{inner}}})"


# ---------------------------------------------------------------------------
# Concrete operators of the particle model.

def wave_vectors(p: PhasePoint, K: int):
    """Exact residue vectors: w_1 = xdot, w_{k+1} = (-Y) w_k, for k <= K.

    Returns (x, vectors) with x the exact positions and vectors a list of K
    Fraction vectors.
    """
    x, xdot, yy = exact_state_from_phase(p)
    n = len(x)
    vecs = [list(xdot)]
    for _ in range(K - 1):
        prev = vecs[-1]
        vecs.append([-sum(yy[i][j] * prev[j] for j in range(n)) for i in range(n)])
    return x, vecs


def _partial_fractions(residues, poles) -> RationalFn:
    return RationalFn.from_poles(residues, poles)


def wave_operator(p: PhasePoint, K: int) -> PseudoDiffOp:
    """W = 1 + Sigma_{k=1..K} w_k(n) Delta^{-k}, w_k(n) = Sigma_i w_{k,i}/(n - x_i).

    The full dressing series is infinite; the returned operator knows
    orders 0 down to -K and carries that trust floor.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    x, vecs = wave_vectors(p, K)
    coeffs = {0: RationalFn.const(1)}
    for k, vec in enumerate(vecs, start=1):
        coeffs[-k] = _partial_fractions(vec, x)
    return PseudoDiffOp(coeffs, -K)


@dataclass(frozen=True)
class AdjointWaveCoeffs:
    """Residue vectors and partial-fraction forms of the adjoint expansion."""

    vectors: tuple
    functions: tuple

    def __getitem__(self, k: int) -> RationalFn:
        """1-based access: self[k] is w*_k(n)."""
        return self.functions[k - 1]


def adjoint_wave_operator(p: PhasePoint, K: int) -> AdjointWaveCoeffs:
    """w*_k data: w*_k = -diag(xdot) (-Y^t)^{k-1} e, as vectors and RationalFns."""
    if K < 1:
        raise ValueError("K must be >= 1")
    x, xdot, yy = exact_state_from_phase(p)
    n = len(x)
    v = [Fraction(1)] * n
    vectors = []
    functions = []
    for k in range(1, K + 1):
        wk = [-xdot[i] * v[i] for i in range(n)]
        vectors.append(tuple(wk))
        functions.append(_partial_fractions(wk, x))
        v = [-sum(yy[i][j] * v[i] for i in range(n)) for j in range(n)]
    return AdjointWaveCoeffs(tuple(vectors), tuple(functions))


def wave_inverse(w: PseudoDiffOp, K: int) -> PseudoDiffOp:
    """W^{-1} = Sigma_m (1 - W)^m; terminates because 1 - W has order <= -1."""
    one = PseudoDiffOp.identity()
    r = one - w
    out = one
    term = one
    for _ in range(K):
        term = pdo_mul(term, r, K)
        if not term.coeffs:
            break
        out = out + term
    return out


def lax_operator(p: PhasePoint, K: int) -> PseudoDiffOp:
    """L = W Delta W^{-1}: order_max 1, unit leading coefficient.

    With the dressing series known to depth K, the coefficients of
    Delta^0 ... Delta^{-(K-1)} are clean; the trust floor is -K+1.
    """
    if K < 2:
        raise ValueError("K must be >= 2 for a usable dressed operator")
    w = wave_operator(p, K)
    winv = wave_inverse(w, K)
    wd = pdo_mul(w, PseudoDiffOp.delta_power(1), K)
    lax = pdo_mul(wd, winv, K)
    top = lax.coeff(1)
    if top != RationalFn.const(1):
        raise TruncationExhausted(f"dressed operator leading coefficient {top!r} is not 1")
    return lax


def a0_closed_form(p: PhasePoint) -> RationalFn:
    """a_0(n) = Sigma_i xdot_i/((n - x_i)(n + 1 - x_i)), exactly."""
    x, xdot, _ = exact_state_from_phase(p)
    out = RationalFn.zero()
    for xi, vi in zip(x, xdot):
        out = out + RationalFn(Polynomial.const(vi), Polynomial.from_roots([xi, xi - 1]))
    return out


# ---------------------------------------------------------------------------
# Finite-difference residuals of the evolution identities.

_SAMPLE_RANGE = (-6, 6)
_POLE_DISTANCE = 0.1
_VALUE_CAP = 1e6


def integer_samples(pole_values, lo=_SAMPLE_RANGE[0], hi=_SAMPLE_RANGE[1],
                    min_dist=_POLE_DISTANCE, need=3):
    """Integers in [lo, hi] at distance >= min_dist from every listed pole."""
    pts = [n for n in range(lo, hi + 1)
           if all(abs(n - q) >= min_dist for q in pole_values)]
    if len(pts) < need:
        raise ValueError(
            f"only {len(pts)} usable sample points in [{lo}, {hi}]; state too pole-dense"
        )
    return pts


def _state_poles(states, max_shift):
    """Candidate pole locations x_i - s, s = 0..max_shift, over several states."""
    out = []
    for st in states:
        for xi in st.x:
            for s in range(max_shift + 1):
                out.append(float(xi) - s)
    return out


def _coeff_values(op: PseudoDiffOp, orders, samples):
    """Evaluate stored coefficients at integer samples; None marks a blown-up point.

    Values above _VALUE_CAP in magnitude sit too close to a pole for a
    finite-difference comparison and are masked rather than compared.
    """
    table = {}
    for j in orders:
        col = []
        f = op.coeff(j)
        for n in samples:
            try:
                v = float(f(n))
            except ZeroDivisionError:
                v = None
            if v is not None and abs(v) > _VALUE_CAP:
                v = None
            col.append(v)
        table[j] = col
    return table


def _fd_states(p: PhasePoint, flow: int, h: float, tol: float):
    plus = integrate_flow(p, flow, h, tol).final
    minus = integrate_flow(p, flow, -h, tol).final
    return plus, minus


def lax_residual(p: PhasePoint, i: int, K: int = DEFAULT_TRUNCATION,
                 h: float = 1e-4, tol: float = 1e-12) -> float:
    """Max-norm residual of d L/d t_i = [(L^i)_+, L] with a central-FD left side.

    The state is moved by +-h along flow i, L is rebuilt at each end, every
    commonly trusted coefficient is central-differenced at integer samples,
    and the bracket is evaluated at the base state.  O(h^2) in exact
    arithmetic of the ends.
    """
    base = lax_operator(p, K)
    li = pdo_pow(base, i, K)
    plus_part, _ = pdo_split(li)
    bracket = pdo_mul(plus_part, base, K) - pdo_mul(base, plus_part, K)

    p_plus, p_minus = _fd_states(p, i, h, tol)
    l_plus = lax_operator(p_plus, K)
    l_minus = lax_operator(p_minus, K)

    floor = max(op.order_min for op in (bracket, base, l_plus, l_minus))
    top = max((op.order_max for op in (bracket, base, l_plus, l_minus)
               if op.order_max is not None), default=1)
    orders = range(floor, top + 1)
    samples = integer_samples(_state_poles([p, p_plus, p_minus], K))

    vb = _coeff_values(bracket, orders, samples)
    vp = _coeff_values(l_plus, orders, samples)
    vm = _coeff_values(l_minus, orders, samples)
    worst = 0.0
    for j in orders:
        for s in range(len(samples)):
            if None in (vb[j][s], vp[j][s], vm[j][s]):
                continue
            fd = (vp[j][s] - vm[j][s]) / (2.0 * h)
            worst = max(worst, abs(fd - vb[j][s]))
    return worst


def zs_residual(p: PhasePoint, k: int, m: int, K: int = DEFAULT_TRUNCATION,
                h: float = 1e-4, tol: float = 1e-12) -> float:
    """Zero-curvature residual d(L^k)_+/dt_m - d(L^m)_+/dt_k - [(L^m)_+, (L^k)_+].

    Time derivatives are central FD along integrated flows; the bracket is
    exact (products of nonnegative-order operators terminate).
    """
    def plus_power(state: PhasePoint, power: int) -> PseudoDiffOp:
        lax = lax_operator(state, K)
        return pdo_split(pdo_pow(lax, power, K))[0]

    base = lax_operator(p, K)
    plus_k, _ = pdo_split(pdo_pow(base, k, K))
    plus_m, _ = pdo_split(pdo_pow(base, m, K))
    bracket = pdo_mul(plus_m, plus_k, K) - pdo_mul(plus_k, plus_m, K)

    pm_plus, pm_minus = _fd_states(p, m, h, tol)     # move along t_m for d(L^k)_+
    pk_plus, pk_minus = _fd_states(p, k, h, tol)     # move along t_k for d(L^m)_+
    k_at_mp = plus_power(pm_plus, k)
    k_at_mm = plus_power(pm_minus, k)
    m_at_kp = plus_power(pk_plus, m)
    m_at_km = plus_power(pk_minus, m)

    top = max(k, m, bracket.order_max if bracket.order_max is not None else 0)
    orders = range(0, top + 1)
    states = [p, pm_plus, pm_minus, pk_plus, pk_minus]
    samples = integer_samples(_state_poles(states, K))

    vb = _coeff_values(bracket, orders, samples)
    vkp = _coeff_values(k_at_mp, orders, samples)
    vkm = _coeff_values(k_at_mm, orders, samples)
    vmp = _coeff_values(m_at_kp, orders, samples)
    vmm = _coeff_values(m_at_km, orders, samples)
    worst = 0.0
    for j in orders:
        for s in range(len(samples)):
            cols = (vb[j][s], vkp[j][s], vkm[j][s], vmp[j][s], vmm[j][s])
            if None in cols:
                continue
            fd_k = (vkp[j][s] - vkm[j][s]) / (2.0 * h)
            fd_m = (vmp[j][s] - vmm[j][s]) / (2.0 * h)
            worst = max(worst, abs(fd_k - fd_m - vb[j][s]))
    return worst


def eq27_residual(p: PhasePoint, h: float = 1e-3, tol: float = 1e-12) -> float:
    """Residual of the scalar evolution law satisfied by a_0 alone:

        d/dt_2 (Delta a_0)
            = d/dt_1 (Delta a_0^2 - 2 Delta a_0)
            + d^2/dt_1^2 (Delta a_0 + 2 a_0),

    with all time derivatives as central finite differences along the
    integrated first and second flows and Delta acting on the n argument.
    """
    def f_d2(state: PhasePoint) -> RationalFn:
        return a0_closed_form(state).delta()

    def g_d1(state: PhasePoint) -> RationalFn:
        a0 = a0_closed_form(state)
        return (a0 * a0).delta() - RationalFn.const(2) * a0.delta()

    def g_d11(state: PhasePoint) -> RationalFn:
        a0 = a0_closed_form(state)
        return a0.delta() + RationalFn.const(2) * a0

    p2_plus, p2_minus = _fd_states(p, 2, h, tol)
    p1_plus, p1_minus = _fd_states(p, 1, h, tol)
    states = [p, p2_plus, p2_minus, p1_plus, p1_minus]
    samples = integer_samples(_state_poles(states, 2))

    f2p, f2m = f_d2(p2_plus), f_d2(p2_minus)
    g1p, g1m = g_d1(p1_plus), g_d1(p1_minus)
    q1p, q10, q1m = g_d11(p1_plus), g_d11(p), g_d11(p1_minus)

    worst = 0.0
    for n in samples:
        try:
            lhs = (float(f2p(n)) - float(f2m(n))) / (2.0 * h)
            first = (float(g1p(n)) - float(g1m(n))) / (2.0 * h)
            second = (float(q1p(n)) - 2.0 * float(q10(n)) + float(q1m(n))) / (h * h)
        except ZeroDivisionError:
            continue
        worst = max(worst, abs(lhs - first - second))
    return worst

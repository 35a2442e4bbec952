"""Rational particle flows, polynomial tau functions, and the truncated
difference-operator algebra that ties them together.

The package exposes three layers:

  * dynamics / integrator: the N-particle Hamiltonian flows, their
    conserved traces, and an adaptive embedded Runge-Kutta driver;
  * tau / waves: the determinant form tau(n;t) = det(nI - A(t)), root
    tracking back to particle trajectories, and the wave functions built
    from shifted tau quotients;
  * ratfun / pdo: exact rational-function arithmetic and the truncated
    ring of formal difference operators, giving the dressed operator
    L = W Delta W^{-1} and the residuals of its evolution identities.
"""

from .dynamics import (
    PhasePoint,
    RsMatrices,
    build_matrices,
    grad_hamiltonian,
    hamiltonian,
    lax_m_matrix,
    rapidity_from_velocity,
    structure_checks,
    vector_field,
    velocity_from_rapidity,
)
from .errors import (
    CollisionError,
    ComplexRootsEncountered,
    DegenerateEigenvalue,
    IllConditionedExtraction,
    NonpositiveRapidityArgument,
    RskpError,
    SingularShiftMatrix,
    SpectralRadiusViolation,
    StepSizeUnderflow,
    TauZeroDenominator,
    TruncationExhausted,
)
from .integrator import (
    Trajectory,
    acceleration_residual,
    commutativity_defect,
    integrate_flow,
    integrate_multi,
    y_lax_residual,
)
from .pdo import (
    DEFAULT_TRUNCATION,
    PseudoDiffOp,
    ShiftOp,
    a0_closed_form,
    adjoint_wave_operator,
    eq27_residual,
    gen_binom,
    lax_operator,
    lax_residual,
    pdo_adjoint,
    pdo_mul,
    pdo_pow,
    pdo_split,
    wave_operator,
    wave_vectors,
    zs_residual,
)
from .ratfun import Polynomial, RationalFn
from .tau import (
    TauData,
    a_matrix,
    first_order_tau_check,
    miwa_diagnostic,
    phase_from_tau,
    tau_det,
    tau_product,
    tau_roots,
    tau_shifted,
)
from .times import TimeVector
from .verify import CheckRecord, VerifyConfig, VerifyReport, run_suite
from .waves import (
    WaveSample,
    eigen_residual,
    t1_flow_residual,
    wave_series_coeffs,
    wave_value,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""Dynamical and Aharonov-Anandan geometric phases for the QES Bose oscillator.

With the gauge ``f(t) = lambda t`` the single-valued state is
``|psi~(t)> = exp(-i lambda t) |psi(t)>`` and over one period
``T = 2 pi / lambda``

    gamma = -T <psi0|H|psi0>
    beta  = int_0^T <psi~| i d/dt |psi~> dt = 2 pi + T <psi0|H|psi0>

The closed form evaluates ``<psi0|H|psi0>`` as explicit Fock-space sums; the
quadrature route never uses that algebra. It differentiates sampled
``psi~(t)`` numerically and integrates with composite Simpson.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate, stats

from .errors import DimensionError, NumericalError
from .evolution import SpectralDecomposition, decompose, evolve, sample_trajectory
from .fock import FockState, expectation
from .hamiltonian import (
    TWO_PI,
    BandedHermitianOperator,
    GaugeSchedule,
    QESParams,
    build_hamiltonian,
    lambda_and_period,
)
from .statistics import (
    Coherent,
    StatisticsSpec,
    amplitudes,
    mandel_q,
    mean_photon,
    poisson_logpmf,
    support_size,
)

#: Threshold on the imaginary residue of the closed-form off-diagonal sums.
CLOSED_RESIDUE_TOL = 1e-10
#: Threshold on the imaginary residue of the quadrature integral.
QUADRATURE_RESIDUE_TOL = 1e-8
#: Identity gamma + beta_closed = 2 pi must hold to this accuracy.
IDENTITY_TOL = 1e-10
#: Finite-difference half-width as a fraction of the quadrature grid spacing.
DIFF_STEP_RATIO = 1e-3
#: Below this overlap magnitude the total phase arg<psi0|psiT> is undefined.
OVERLAP_FLOOR = 1e-12
MIN_QUADRATURE_STEPS = 16


def _check_normalized(psi: FockState, what: str = "psi0") -> None:
    if not psi.is_normalized():
        raise ValueError(f"{what} must be normalized (norm = {psi.norm!r})")


def dynamical_phase(h: BandedHermitianOperator, psi0: FockState, schedule: GaugeSchedule) -> float:
    """``gamma = -T <psi0|H|psi0>`` (the integrand is constant for static H)."""
    _check_normalized(psi0)
    return -schedule.period * expectation(h, psi0)


def simpson(values: np.ndarray, dx: float) -> complex:
    values = np.asarray(values)
    re = integrate.simpson(values.real, dx=dx)
    im = integrate.simpson(values.imag, dx=dx) if np.iscomplexobj(values) else 0.0
    return complex(re, im)


def dynamical_phase_quadrature(
    h: BandedHermitianOperator,
    sd: SpectralDecomposition,
    psi0: FockState,
    schedule: GaugeSchedule,
    steps: int,
) -> float:
    """Cross-check of ``dynamical_phase``: Simpson over ``<H>`` along the trajectory."""
    samples = sample_trajectory(sd, psi0, schedule, steps)
    energies = np.array([expectation(h, s.state) for s in samples])
    return -simpson(energies, schedule.period / steps).real


def geometric_phase_closed(
    params: QESParams, psi0: FockState, residue_tol: float = CLOSED_RESIDUE_TOL
) -> float:
    """``beta = 2 pi + T [diag + lower + upper]`` as explicit Fock-space sums.

    ``diag  = sum_n |C_n|^2 sum_p eps_p n^p``
    ``lower = sum_n C*_{n-2} C_n sum_s A_s (n-2)^s sqrt(n(n-1))``
    ``upper = sum_n C*_{n+2} C_n sum_s A_s n^s sqrt((n+1)(n+2))``

    ``lower`` and ``upper`` are complex conjugates of each other; their sum
    must be real up to ``residue_tol`` (relative to the size of the terms).
    """
    schedule = lambda_and_period(params)
    _check_normalized(psi0)
    c = psi0.amplitudes
    top = psi0.dim - 1
    if psi0.support_top() > top - 2:
        raise ValueError(
            f"psi0 support reaches |{psi0.support_top()}>; it must end at least two "
            f"levels below the truncation |{top}>"
        )

    n = np.arange(psi0.dim, dtype=float)
    diag_poly = np.zeros_like(n)
    for p, eps in enumerate(params.epsilon, start=1):
        diag_poly += eps * n**p
    diag = float(np.dot(np.abs(c) ** 2, diag_poly))

    lower = 0j
    upper = 0j
    for s, a_s in enumerate(params.a_coeff):
        m = n[2:]
        lower += a_s * np.sum(np.conj(c[:-2]) * c[2:] * np.power(m - 2.0, s) * np.sqrt(m * (m - 1.0)))
        k = n[:-2]
        upper += a_s * np.sum(np.conj(c[2:]) * c[:-2] * np.power(k, s) * np.sqrt((k + 1.0) * (k + 2.0)))

    scale = 1.0 + abs(lower) + abs(upper)
    if abs(lower - np.conj(upper)) > residue_tol * scale:
        raise NumericalError(f"off-diagonal sums are not conjugate: {lower!r} vs {upper!r}")
    off = lower + upper
    if abs(off.imag) > residue_tol * scale:
        raise NumericalError(f"closed-form beta has imaginary residue {off.imag:.3e}")
    return float(TWO_PI + schedule.period * (diag + off.real))


def geometric_phase_coherent(
    params: QESParams, alpha_mag: float, theta: float, tail_tol: float = 1e-12
) -> float:
    """Closed form specialised to a coherent input ``alpha = |alpha| e^{i theta}``.

    ``beta = 2 pi + T sum_n P(n) [sum_p eps_p n^p + 2 |alpha|^2 cos(2 theta) sum_s A_s n^s]``
    with ``P`` the Poisson distribution of mean ``|alpha|^2``, summed until the
    remaining Poisson tail is below ``tail_tol``.
    """
    schedule = lambda_and_period(params)
    mean = alpha_mag**2
    dim = support_size(stats.poisson(mean), tail_tol, max_dim=1 << 20)
    n = np.arange(dim, dtype=float)
    weights = np.exp(poisson_logpmf(n, mean))
    bracket = np.zeros_like(n)
    for p, eps in enumerate(params.epsilon, start=1):
        bracket += eps * n**p
    cos2 = math.cos(2.0 * theta)
    for s, a_s in enumerate(params.a_coeff):
        bracket += 2.0 * mean * a_s * np.power(n, s) * cos2
    return TWO_PI + schedule.period * float(np.dot(weights, bracket))


def _gauged_states(sd: SpectralDecomposition, psi0: FockState, lam: float, times: np.ndarray) -> np.ndarray:
    return sd.propagate(psi0, times) * np.exp(-1j * lam * times)[None, :]


def geometric_phase_quadrature(
    sd: SpectralDecomposition,
    psi0: FockState,
    schedule: GaugeSchedule,
    steps: int,
    diff_ratio: float = DIFF_STEP_RATIO,
    residue_tol: float = QUADRATURE_RESIDUE_TOL,
) -> float:
    """Brute-force ``beta = int_0^T <psi~| i d/dt |psi~> dt``.

    ``psi~`` is sampled on the Simpson grid ``t_k = k T / steps`` and at
    ``t_k +- delta`` with ``delta = diff_ratio * T / steps``. The derivative is
    a second-order central difference in the interior and a second-order
    one-sided stencil at ``t = 0`` and ``t = T``; the error is therefore
    ``O(dt^2)`` for a fixed ``diff_ratio``. ``diff_ratio = 1`` puts the stencil
    points on the grid itself.
    """
    if steps < MIN_QUADRATURE_STEPS or steps % 2:
        raise ValueError(f"quadrature needs an even step count >= {MIN_QUADRATURE_STEPS}, got {steps!r}")
    if not 0.0 < diff_ratio <= 1.0:
        raise ValueError(f"diff_ratio must lie in (0, 1], got {diff_ratio!r}")
    _check_normalized(psi0)

    period = schedule.period
    dt = period / steps
    delta = diff_ratio * dt
    grid = np.arange(steps + 1) * dt
    grid[-1] = period
    inner_t = grid[1:-1]

    centre = _gauged_states(sd, psi0, schedule.lam, grid)
    plus = _gauged_states(sd, psi0, schedule.lam, inner_t + delta)
    minus = _gauged_states(sd, psi0, schedule.lam, inner_t - delta)
    head = _gauged_states(sd, psi0, schedule.lam, np.array([delta, 2.0 * delta]))
    tail = _gauged_states(sd, psi0, schedule.lam, np.array([period - delta, period - 2.0 * delta]))

    deriv = np.empty_like(centre)
    deriv[:, 1:-1] = (plus - minus) / (2.0 * delta)
    deriv[:, 0] = (-3.0 * centre[:, 0] + 4.0 * head[:, 0] - head[:, 1]) / (2.0 * delta)
    deriv[:, -1] = (3.0 * centre[:, -1] - 4.0 * tail[:, 0] + tail[:, 1]) / (2.0 * delta)

    integrand = np.einsum("ik,ik->k", np.conj(centre), 1j * deriv)
    beta = simpson(integrand, dt)
    if abs(beta.imag) > residue_tol * (1.0 + abs(beta.real)):
        raise NumericalError(f"quadrature beta has imaginary residue {beta.imag:.3e}")
    return beta.real


class Cyclicity(NamedTuple):
    phi: float
    defect: float
    phase_defined: bool


def total_phase_and_cyclicity(psi0: FockState, psi_t: FockState, overlap_floor: float = OVERLAP_FLOOR) -> Cyclicity:
    """Measured total phase ``arg<psi0|psiT>`` in (-pi, pi] and the defect
    ``||psiT - exp(i phi) psi0||``, which vanishes iff the evolution is cyclic.

    If the overlap is below ``overlap_floor`` the phase is undefined:
    ``phi`` is reported as 0 with ``phase_defined=False``.
    """
    if psi0.dim != psi_t.dim:
        raise DimensionError(f"dim {psi0.dim} vs {psi_t.dim}")
    _check_normalized(psi0)
    _check_normalized(psi_t, "psiT")
    overlap = complex(np.vdot(psi0.amplitudes, psi_t.amplitudes))
    if abs(overlap) < overlap_floor:
        return Cyclicity(0.0, math.sqrt(2.0), False)
    phi = math.atan2(overlap.imag, overlap.real)
    if phi <= -math.pi:
        phi = math.pi
    defect = float(np.linalg.norm(psi_t.amplitudes - np.exp(1j * phi) * psi0.amplitudes))
    return Cyclicity(phi, defect, True)


@dataclass(frozen=True)
class PhaseReport:
    lam: float
    period_T: float
    gamma_dynamical: float
    gamma_quadrature: float
    beta_closed: float
    beta_closed_mod_2pi: float
    beta_quadrature: float
    beta_coherent: Optional[float]
    phi_gauge_identity: float
    phi_measured: float
    phase_defined: bool
    cyclicity_defect: float
    quadrature_steps: int
    dim: int
    tail_mass: float
    mean_photon: float
    mandel_q: Optional[float]

    def to_dict(self) -> dict:
        return asdict(self)


def full_report(
    params: QESParams,
    spec: StatisticsSpec,
    steps: int = 1024,
    tail_tol: float = 1e-12,
    *,
    dim: int | None = None,
    diff_ratio: float = DIFF_STEP_RATIO,
) -> PhaseReport:
    """Run every phase route on one (Hamiltonian, initial state) pair.

    The initial state is built from ``spec`` and padded with ``params.margin``
    empty levels so that H never pushes its support past the truncation.
    """
    schedule = lambda_and_period(params)
    psi0, tail = amplitudes(spec, tail_tol, dim=dim, margin=params.margin)
    h = build_hamiltonian(params, psi0.dim)
    sd = decompose(h)
    return report_for_state(params, psi0, h, sd, schedule, steps, spec=spec, tail_tol=tail_tol, diff_ratio=diff_ratio)


def report_for_state(
    params: QESParams,
    psi0: FockState,
    h: BandedHermitianOperator,
    sd: SpectralDecomposition,
    schedule: GaugeSchedule,
    steps: int,
    *,
    spec: StatisticsSpec | None = None,
    tail_tol: float = 1e-12,
    diff_ratio: float = DIFF_STEP_RATIO,
    closed_form=geometric_phase_closed,
) -> PhaseReport:
    gamma = dynamical_phase(h, psi0, schedule)
    gamma_q = dynamical_phase_quadrature(h, sd, psi0, schedule, steps)
    beta_closed = closed_form(params, psi0)
    beta_quad = geometric_phase_quadrature(sd, psi0, schedule, steps, diff_ratio=diff_ratio)
    beta_coh = None
    if isinstance(spec, Coherent):
        beta_coh = geometric_phase_coherent(params, spec.alpha_mag, spec.theta, tail_tol)

    identity_gap = gamma + beta_closed - TWO_PI
    if abs(identity_gap) > IDENTITY_TOL:
        raise NumericalError(f"gamma + beta_closed - 2 pi = {identity_gap:.3e} exceeds {IDENTITY_TOL:g}")

    cyc = total_phase_and_cyclicity(psi0, evolve(sd, psi0, schedule.period))
    mean = mean_photon(psi0)
    return PhaseReport(
        lam=schedule.lam,
        period_T=schedule.period,
        gamma_dynamical=gamma,
        gamma_quadrature=gamma_q,
        beta_closed=beta_closed,
        beta_closed_mod_2pi=math.fmod(beta_closed, TWO_PI) % TWO_PI,
        beta_quadrature=beta_quad,
        beta_coherent=beta_coh,
        phi_gauge_identity=gamma + beta_closed,
        phi_measured=cyc.phi,
        phase_defined=cyc.phase_defined,
        cyclicity_defect=cyc.defect,
        quadrature_steps=steps,
        dim=psi0.dim,
        tail_mass=psi0.tail_mass,
        mean_photon=mean,
        mandel_q=mandel_q(psi0) if mean > 0.0 else None,
    )

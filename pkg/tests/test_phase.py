import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import composed_hamiltonian
from qesphase import (
    Binomial,
    Coherent,
    Custom,
    FockState,
    GaugeUndefinedError,
    QESParams,
    amplitudes,
    build_hamiltonian,
    decompose,
    dynamical_phase,
    dynamical_phase_quadrature,
    full_report,
    geometric_phase_closed,
    geometric_phase_coherent,
    geometric_phase_quadrature,
    lambda_and_period,
    total_phase_and_cyclicity,
)

TWO_PI = 2 * math.pi
SQ2 = math.sqrt(2.0)

# (epsilon, A, amplitudes padded to dim 8) -> (gamma, beta)
SPOT_CASES = [
    ([1.0], [1.0], [1], 0.0, TWO_PI),
    ([1.0], [1.0], [0, 1], -TWO_PI, 2 * TWO_PI),
    ([0.0], [1.0], [1, 0, 1], -TWO_PI * SQ2, TWO_PI * (1 + SQ2)),
]


def setup(eps, a, amps, dim=8):
    params = QESParams(eps, a)
    psi0 = FockState.from_amplitudes(np.r_[np.asarray(amps, dtype=complex), np.zeros(dim - len(amps))])
    h = build_hamiltonian(params, dim)
    return params, psi0, h, decompose(h), lambda_and_period(params)


def dense_oracle_beta(params, psi0):
    """beta = 2 pi + T <psi0|H|psi0> with H from composed ladder matrices."""
    mat = composed_hamiltonian(params.epsilon, params.a_coeff, psi0.dim, pad=8)
    energy = np.vdot(psi0.amplitudes, mat @ psi0.amplitudes)
    return TWO_PI + lambda_and_period(params).period * energy.real


@pytest.mark.parametrize("eps, a, amps, gamma, beta", SPOT_CASES)
def test_dynamical_phase_examples(eps, a, amps, gamma, beta):
    params, psi0, h, sd, sched = setup(eps, a, amps)
    assert dynamical_phase(h, psi0, sched) == pytest.approx(gamma, abs=1e-12)
    assert dynamical_phase_quadrature(h, sd, psi0, sched, 64) == pytest.approx(gamma, abs=1e-9)


@pytest.mark.parametrize("eps, a, amps, gamma, beta", SPOT_CASES)
def test_closed_form_examples(eps, a, amps, gamma, beta):
    params, psi0, *_ = setup(eps, a, amps)
    assert geometric_phase_closed(params, psi0) == pytest.approx(beta, abs=1e-12)
    assert dense_oracle_beta(params, psi0) == pytest.approx(beta, abs=1e-12)


@pytest.mark.parametrize("eps, a, amps, gamma, beta", SPOT_CASES)
def test_quadrature_agrees_with_closed_form(eps, a, amps, gamma, beta):
    params, psi0, h, sd, sched = setup(eps, a, amps)
    quad = geometric_phase_quadrature(sd, psi0, sched, 1024)
    assert abs(quad - beta) <= 1e-6 * (1 + abs(beta))


def test_a_only_vacuum_at_256_steps():
    params, psi0, h, sd, sched = setup([], [1.0], [1])
    assert abs(geometric_phase_quadrature(sd, psi0, sched, 256) - TWO_PI) <= 1e-8


def _ladder_errors(steps_list, diff_ratio, case=SPOT_CASES[2]):
    eps, a, amps, _, beta = case
    params, psi0, h, sd, sched = setup(eps, a, amps, dim=12)
    return [abs(geometric_phase_quadrature(sd, psi0, sched, n, diff_ratio=diff_ratio) - beta) for n in steps_list]


@pytest.mark.parametrize(
    "diff_ratio, ladder",
    [(1e-3, [16, 32, 64, 128]), (1.0, [64, 128, 256, 512])],  # on-grid stencil is pre-asymptotic below 64
)
def test_halving_dt_quarters_the_error(diff_ratio, ladder):
    errs = _ladder_errors(ladder, diff_ratio)
    ratios = [errs[i] / errs[i + 1] for i in range(3)]
    orders = [math.log2(r) for r in ratios]
    assert all(3.4 < r < 4.6 for r in ratios), ratios
    assert all(1.8 <= o <= 2.2 for o in orders), orders


def test_on_grid_stencil_misses_the_tolerance():
    # documents why the stencil half-width is decoupled from dt
    params, psi0, h, sd, sched = setup([], [1.0], [1])
    on_grid = geometric_phase_quadrature(sd, psi0, sched, 2048, diff_ratio=1.0)
    assert abs(on_grid - TWO_PI) > 1e-6 * (1 + TWO_PI)


@pytest.mark.parametrize("steps", [8, 15, 17])
def test_quadrature_step_validation(steps):
    params, psi0, h, sd, sched = setup([1.0], [1.0], [1])
    with pytest.raises(ValueError):
        geometric_phase_quadrature(sd, psi0, sched, steps)


def test_closed_form_requires_margin():
    params = QESParams([1.0], [1.0])
    with pytest.raises(ValueError, match="below the truncation"):
        geometric_phase_closed(params, FockState.from_amplitudes([1, 0, 1]))


def test_closed_form_requires_positive_lambda():
    with pytest.raises(GaugeUndefinedError):
        geometric_phase_closed(QESParams([1.0], [0.0]), FockState.basis(0, 4))


def test_closed_form_requires_normalized():
    with pytest.raises(ValueError, match="normalized"):
        geometric_phase_closed(QESParams([1.0], [1.0]), FockState(np.array([2.0, 0, 0, 0])))


complex_amps = st.integers(1, 30).flatmap(
    lambda n: st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=n, max_size=n)
).map(lambda pairs: np.array([complex(x, y) for x, y in pairs])).filter(lambda v: np.linalg.norm(v) > 1e-3)


@given(complex_amps, st.lists(st.floats(-2, 2), max_size=3), st.lists(st.floats(-2, 2), min_size=1, max_size=3))
def test_conjugate_pair_reality(raw, eps, a):
    a = [abs(a[0]) + sum(abs(x) for x in a[1:]) + 0.1] + a[1:]
    psi0 = FockState.from_amplitudes(np.r_[raw, 0, 0])
    params = QESParams(eps, a)
    c = psi0.amplitudes
    n = np.arange(psi0.dim, dtype=float)
    lower = sum(ak * np.sum(np.conj(c[:-2]) * c[2:] * (n[2:] - 2) ** s * np.sqrt(n[2:] * (n[2:] - 1)))
                for s, ak in enumerate(a))
    upper = sum(ak * np.sum(np.conj(c[2:]) * c[:-2] * n[:-2] ** s * np.sqrt((n[:-2] + 1) * (n[:-2] + 2)))
                for s, ak in enumerate(a))
    assert abs((lower + upper).imag) <= 1e-12 * (1 + abs(lower) + abs(upper))
    beta = geometric_phase_closed(params, psi0)
    assert beta == pytest.approx(dense_oracle_beta(params, psi0), rel=1e-12, abs=1e-10)


def test_coherent_formula_examples():
    assert geometric_phase_coherent(QESParams([1.0], [0.1]), 0.0, 0.3) == TWO_PI
    beta = geometric_phase_coherent(QESParams([1.0], [0.1]), 1.0, math.pi / 4)
    assert beta == pytest.approx(22 * math.pi, abs=1e-8)


@pytest.mark.parametrize("alpha_sq", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("theta", np.linspace(0, 2 * math.pi, 7))
def test_coherent_formula_equals_closed_form(alpha_sq, theta):
    params = QESParams([0.7, -0.05], [0.3, 0.02])
    psi0, _ = amplitudes(Coherent(math.sqrt(alpha_sq), theta), margin=params.margin)
    closed = geometric_phase_closed(params, psi0)
    coherent = geometric_phase_coherent(params, math.sqrt(alpha_sq), theta)
    assert abs(closed - coherent) <= 1e-8


def test_total_phase_constructed_cyclic():
    psi0 = FockState.from_amplitudes([1, 1j, 0.5])
    res = total_phase_and_cyclicity(psi0, psi0.scaled(np.exp(0.3j)))
    assert res.phi == pytest.approx(0.3, abs=1e-14)
    assert res.defect <= 1e-14 and res.phase_defined


def test_total_phase_orthogonal():
    res = total_phase_and_cyclicity(FockState.basis(0, 3), FockState.basis(1, 3))
    assert not res.phase_defined
    assert res.defect == pytest.approx(math.sqrt(2.0))


def test_total_phase_range_includes_pi():
    psi0 = FockState.basis(0, 2)
    res = total_phase_and_cyclicity(psi0, psi0.scaled(-1.0))
    assert res.phi == pytest.approx(math.pi)
    assert -math.pi < res.phi <= math.pi


def test_generic_instance_is_not_cyclic(rng):
    report = full_report(QESParams([0.4, 0.03], [0.8]), Custom(rng.normal(size=6) + 1j * rng.normal(size=6)))
    assert report.cyclicity_defect > 1e-3
    assert report.phi_gauge_identity == pytest.approx(TWO_PI, abs=1e-10)


def test_full_report_coherent_cross_check():
    r = full_report(QESParams([1.0], [0.1]), Coherent(1.0, 0.0))
    assert r.beta_coherent is not None
    assert abs(r.beta_coherent - r.beta_closed) <= 1e-8
    assert abs(r.beta_quadrature - r.beta_closed) <= 1e-6 * (1 + abs(r.beta_closed))


def test_full_report_vacuum():
    r = full_report(QESParams([1.0], [1.0]), Custom([1.0]))
    assert r.gamma_dynamical == 0.0
    assert r.beta_closed == pytest.approx(TWO_PI, abs=1e-15)
    assert r.phi_gauge_identity == pytest.approx(TWO_PI, abs=1e-15)
    assert r.beta_coherent is None and r.mandel_q is None


def test_full_report_binomial_routes_agree():
    r = full_report(QESParams([1.0], [1.0]), Binomial(4, 0.5, 0.0))
    scale = 1 + abs(r.beta_closed)
    assert abs(r.beta_quadrature - r.beta_closed) <= 1e-6 * scale
    assert abs(r.gamma_dynamical + r.beta_closed - TWO_PI) <= 1e-10
    assert abs(r.gamma_quadrature - r.gamma_dynamical) <= 1e-9 * (1 + abs(r.gamma_dynamical))
    assert r.mandel_q == pytest.approx(-0.5)


@given(st.floats(0, 2 * math.pi))
def test_report_global_phase_invariance(chi):
    amps = np.array([0.3, -0.2j, 0.9, 0.1 + 0.4j])
    params = QESParams([0.5, 0.02], [0.6, -0.03])
    a = full_report(params, Custom(amps), steps=256).to_dict()
    b = full_report(params, Custom(np.exp(1j * chi) * amps), steps=256).to_dict()
    for key, value in a.items():
        if isinstance(value, float):
            if key == "phi_measured":
                assert abs(math.remainder(value - b[key], TWO_PI)) <= 1e-10
            else:
                assert abs(value - b[key]) <= 1e-10, key
        else:
            assert value == b[key], key

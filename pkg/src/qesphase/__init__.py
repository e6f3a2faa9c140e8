"""Aharonov-Anandan geometric phase of quasi-exactly-solvable Bose oscillators."""

__version__ = "0.1.0"

from .errors import ConfigError, DimensionError, GaugeUndefinedError, NumericalError, QESError
from .evolution import SpectralDecomposition, TrajectorySample, decompose, evolve, gauge_transform, sample_trajectory
from .fock import FockState, expectation, inner, lowering_action, raising_action
from .hamiltonian import (
    BandedHermitianOperator,
    GaugeSchedule,
    QESParams,
    build_hamiltonian,
    dense_form,
    lambda_and_period,
)
from .phase import (
    PhaseReport,
    dynamical_phase,
    dynamical_phase_quadrature,
    full_report,
    geometric_phase_closed,
    geometric_phase_coherent,
    geometric_phase_quadrature,
    total_phase_and_cyclicity,
)
from .statistics import Binomial, Coherent, Custom, NegativeBinomial, TailReport, amplitudes, mandel_q, mean_photon

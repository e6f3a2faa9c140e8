"""Initial-state factories for the photon-statistics families, plus diagnostics.

Families (photon-number distributions ``|C_n|^2``):

* ``Binomial``         sub-Poissonian,  C(N, n) p^n (1-p)^(N-n)
* ``Coherent``         Poissonian,      C_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)
* ``NegativeBinomial`` super-Poissonian, C(n+W-1, n) q^n (1-q)^W

For the binomial families only ``|C_n|^2`` is physical input; the amplitudes
are taken as ``sqrt(pmf(n)) * exp(i n theta)`` so that the same phase knob as
in the coherent case (``alpha = |alpha| e^{i theta}``) exists for every
family. For those two families ``theta`` is an extension, not a physical
parameter of the distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats
from scipy.special import gammaln, xlog1py, xlogy

from .errors import NumericalError
from .fock import FockState

DEFAULT_TAIL_TOL = 1e-12
DEFAULT_MAX_DIM = 4096


@dataclass(frozen=True)
class Custom:
    amplitudes: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(complex(c) for c in self.amplitudes))
        if not self.amplitudes:
            raise ValueError("custom amplitudes must be non-empty")


@dataclass(frozen=True)
class Coherent:
    alpha_mag: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha_mag) and self.alpha_mag >= 0.0):
            raise ValueError(f"alpha_mag must be a finite real >= 0, got {self.alpha_mag!r}")


@dataclass(frozen=True)
class Binomial:
    n_trials: int
    prob: float
    theta: float = 0.0

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 0:
            raise ValueError(f"n_trials must be a non-negative integer, got {self.n_trials!r}")
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"prob must lie in [0, 1], got {self.prob!r}")


@dataclass(frozen=True)
class NegativeBinomial:
    w: int
    q: float
    theta: float = 0.0

    def __post_init__(self):
        if int(self.w) != self.w or self.w < 1:
            raise ValueError(f"W must be an integer >= 1, got {self.w!r}")
        if not 0.0 <= self.q < 1.0:
            raise ValueError(f"q must lie in [0, 1), got {self.q!r}")


StatisticsSpec = Union[Custom, Coherent, Binomial, NegativeBinomial]


@dataclass(frozen=True)
class TailReport:
    tail_mass: float
    dim_used: int


def family_name(spec: StatisticsSpec) -> str:
    return {
        Custom: "custom",
        Coherent: "coherent",
        Binomial: "binomial",
        NegativeBinomial: "negative_binomial",
    }[type(spec)]


def poisson_logpmf(n: np.ndarray, mean: float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return xlogy(n, mean) - mean - gammaln(n + 1.0)


def binomial_logpmf(n: np.ndarray, n_trials: int, prob: float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    log_choose = gammaln(n_trials + 1.0) - gammaln(n + 1.0) - gammaln(n_trials - n + 1.0)
    return log_choose + xlogy(n, prob) + xlog1py(n_trials - n, -prob)


def negative_binomial_logpmf(n: np.ndarray, w: int, q: float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    log_choose = gammaln(n + w) - gammaln(w) - gammaln(n + 1.0)
    return log_choose + xlogy(n, q) + w * math.log1p(-q)


def _tail_dist(spec: StatisticsSpec):
    if isinstance(spec, Coherent):
        return stats.poisson(spec.alpha_mag**2)
    return stats.nbinom(spec.w, 1.0 - spec.q)


def support_size(dist, tail_tol: float, max_dim: int) -> int:
    """Smallest ``dim`` such that ``P(n >= dim) <= tail_tol``."""
    guess = dist.isf(tail_tol)
    n = int(guess) if np.isfinite(guess) else 0
    n = max(n, 0)
    while dist.sf(n) > tail_tol:
        n += 1
        if n + 1 > max_dim:
            raise NumericalError(
                f"tail tolerance {tail_tol:g} unreachable within max dimension {max_dim}"
            )
    while n > 0 and dist.sf(n - 1) <= tail_tol:
        n -= 1
    if n + 1 > max_dim:
        raise NumericalError(f"tail tolerance {tail_tol:g} unreachable within max dimension {max_dim}")
    return n + 1


def amplitudes(
    spec: StatisticsSpec,
    tail_tol: float = DEFAULT_TAIL_TOL,
    *,
    dim: int | None = None,
    margin: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> tuple[FockState, TailReport]:
    """Build the normalized initial state for ``spec``.

    Unless ``dim`` is given, infinite-support families are cut at the smallest
    dimension whose discarded probability is ``<= tail_tol``; the binomial
    family always uses its exact support ``N + 1``. The state is renormalized
    after truncation and then zero-padded by ``margin`` empty slots.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")
    if margin < 0:
        raise ValueError("margin must be >= 0")

    if isinstance(spec, Custom):
        amps = np.asarray(spec.amplitudes, dtype=complex)
        tail = 0.0
        if dim is not None:
            if dim < amps.size:
                raise ValueError(f"dim={dim} smaller than the {amps.size} custom amplitudes")
            amps = np.concatenate([amps, np.zeros(dim - amps.size, dtype=complex)])
    else:
        if isinstance(spec, Binomial):
            n_dim = spec.n_trials + 1 if dim is None else dim
            n = np.arange(n_dim)
            logp = np.where(n <= spec.n_trials, binomial_logpmf(np.minimum(n, spec.n_trials), spec.n_trials, spec.prob), -np.inf)
            tail = 0.0
        else:
            dist = _tail_dist(spec)
            n_dim = support_size(dist, tail_tol, max_dim) if dim is None else dim
            n = np.arange(n_dim)
            if isinstance(spec, Coherent):
                logp = poisson_logpmf(n, spec.alpha_mag**2)
            else:
                logp = negative_binomial_logpmf(n, spec.w, spec.q)
            tail = float(dist.sf(n_dim - 1))
        amps = np.exp(0.5 * logp) * np.exp(1j * spec.theta * n)

    if amps.size + margin > max_dim:
        raise NumericalError(f"state needs dim {amps.size + margin} > max dimension {max_dim}")
    state = FockState.from_amplitudes(amps, normalize=True, tail_mass=tail)
    if margin:
        state = state.padded(state.dim + margin)
    return state, TailReport(tail, state.dim)


def mean_photon(psi: FockState) -> float:
    return float(np.dot(np.arange(psi.dim), psi.probabilities))


def mandel_q(psi: FockState) -> float:
    """``Q = (<n^2> - <n>^2 - <n>) / <n>``; negative means sub-Poissonian."""
    n = np.arange(psi.dim, dtype=float)
    prob = psi.probabilities
    mean = float(np.dot(n, prob))
    if mean <= 0.0:
        raise ValueError("Mandel Q is undefined for zero mean photon number")
    var = float(np.dot((n - mean) ** 2, prob))
    return (var - mean) / mean

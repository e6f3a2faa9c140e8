"""Exact propagation under a time-independent Hamiltonian via its eigenbasis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericalError
from .fock import FockState
from .hamiltonian import BandedHermitianOperator, GaugeSchedule, dense_form

RECONSTRUCTION_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``H = U diag(E) U^dag`` with ascending ``eigenvalues`` and unitary ``eigenvectors``.

    Each eigenvector is rephased so its largest-magnitude component is real
    and positive, which makes the decomposition reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def coefficients(self, psi0: FockState) -> np.ndarray:
        if psi0.dim != self.dim:
            raise DimensionError(f"state dim {psi0.dim} vs decomposition dim {self.dim}")
        return self.eigenvectors.conj().T @ psi0.amplitudes

    def propagate(self, psi0: FockState, times) -> np.ndarray:
        """Columns are ``exp(-i H t) psi0`` for each entry of ``times``."""
        coeffs = self.coefficients(psi0)
        times = np.atleast_1d(np.asarray(times, dtype=float))
        phases = np.exp(-1j * np.outer(self.eigenvalues, times))
        return self.eigenvectors @ (phases * coeffs[:, None])


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    time: float
    state: FockState
    gauged_state: FockState


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    rows = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[rows, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)[None, :]


def decompose(h: BandedHermitianOperator) -> SpectralDecomposition:
    mat = dense_form(h)
    try:
        evals, evecs = scipy.linalg.eigh(mat)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Hermitian eigensolver failed for dim={h.dim}: {exc}") from exc
    evecs = _fix_phases(evecs)

    scale = 1.0 + float(np.max(np.abs(evals), initial=0.0))
    recon = np.max(np.abs((evecs * evals) @ evecs.conj().T - mat), initial=0.0)
    ortho = np.max(np.abs(evecs.conj().T @ evecs - np.eye(h.dim)), initial=0.0)
    if recon > RECONSTRUCTION_TOL * scale or ortho > ORTHONORMALITY_TOL:
        raise NumericalError(
            f"eigendecomposition check failed (dim={h.dim}): "
            f"reconstruction residual {recon:.3e}, orthonormality defect {ortho:.3e}"
        )
    return SpectralDecomposition(evals, evecs)


def evolve(sd: SpectralDecomposition, psi0: FockState, t: float) -> FockState:
    return FockState(sd.propagate(psi0, t)[:, 0])


def gauge_transform(psi_t: FockState, lam: float, t: float) -> FockState:
    """``exp(-i lambda t) |psi(t)>``."""
    return psi_t.scaled(np.exp(-1j * lam * t))


def sample_trajectory(
    sd: SpectralDecomposition, psi0: FockState, schedule: GaugeSchedule, steps: int
) -> list[TrajectorySample]:
    """``steps + 1`` samples on the uniform grid ``t_k = k T / steps``."""
    if steps < 2 or steps % 2:
        raise ValueError(f"steps must be an even integer >= 2, got {steps!r}")
    times = np.arange(steps + 1) * (schedule.period / steps)
    times[-1] = schedule.period
    cols = sd.propagate(psi0, times)
    gauge = np.exp(-1j * schedule.lam * times)
    return [
        TrajectorySample(float(t), FockState(cols[:, k]), FockState(gauge[k] * cols[:, k]))
        for k, t in enumerate(times)
    ]

"""Truncated single-mode Fock space: states, ladder actions, inner products.

States are dense complex vectors over the number basis ``|0>, ..., |N>``.
The truncation is a hard cutoff: nothing ever grows the space, and amplitude
pushed above ``|N>`` by the raising operator is measured and reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NumericalError

#: Normalization tolerance enforced by the factories.
NORM_TOL = 1e-12
#: Imaginary residue above which an expectation value is rejected.
HERMITIAN_RESIDUE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FockState:
    """Complex amplitudes ``C_0 .. C_N`` over number states.

    Instances are immutable; the amplitude array is a private read-only copy.
    ``tail_mass`` records probability that was discarded when the state was
    truncated (zero for states built directly from amplitudes).
    """

    amplitudes: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1:
            raise DimensionError("a Fock state needs dim >= 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True, tail_mass: float = 0.0) -> "FockState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0.0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / nrm
        return cls(amps, tail_mass)

    @classmethod
    def basis(cls, n: int, dim: int) -> "FockState":
        """Number state ``|n>`` in a space of dimension ``dim``."""
        if not 0 <= n < dim:
            raise DimensionError(f"|{n}> does not fit in dim={dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[n] = 1.0
        return cls(amps)

    @classmethod
    def zeros(cls, dim: int) -> "FockState":
        return cls(np.zeros(dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def normalized(self) -> "FockState":
        return FockState.from_amplitudes(self.amplitudes, normalize=True, tail_mass=self.tail_mass)

    def padded(self, dim: int) -> "FockState":
        """Embed into a larger truncation by appending zero amplitudes."""
        if dim < self.dim:
            raise DimensionError(f"cannot pad a dim={self.dim} state down to {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[: self.dim] = self.amplitudes
        return FockState(amps, self.tail_mass)

    def support_top(self) -> int:
        """Largest index carrying a nonzero amplitude (-1 for the zero vector)."""
        nz = np.flatnonzero(self.amplitudes)
        return int(nz[-1]) if nz.size else -1

    def scaled(self, factor: complex) -> "FockState":
        return FockState(factor * self.amplitudes, self.tail_mass)


class RaisingResult(NamedTuple):
    state: FockState
    leakage: float


def _check_dims(u: FockState, v: FockState) -> None:
    if u.dim != v.dim:
        raise DimensionError(f"incompatible Fock spaces: dim {u.dim} vs {v.dim}")


def inner(u: FockState, v: FockState) -> complex:
    """``<u|v> = sum(conj(u_n) v_n)``."""
    _check_dims(u, v)
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def lowering_action(psi: FockState) -> FockState:
    """Apply ``a``: output amplitude at n is ``sqrt(n+1) C_{n+1}``."""
    c = psi.amplitudes
    out = np.zeros_like(c)
    out[:-1] = np.sqrt(np.arange(1, psi.dim)) * c[1:]
    return FockState(out)


def raising_action(psi: FockState) -> RaisingResult:
    """Apply ``a^dagger`` within the truncation.

    The component ``C_N |N>`` would be pushed onto ``|N+1>`` and is dropped;
    ``leakage`` is the input weight ``|C_N|^2`` lost this way, so raising the
    top state of a normalized truncation reports a leakage of 1.
    """
    c = psi.amplitudes
    out = np.zeros_like(c)
    out[1:] = np.sqrt(np.arange(1, psi.dim)) * c[:-1]
    leakage = float(abs(c[-1]) ** 2)
    return RaisingResult(FockState(out), leakage)


def number_expectation(psi: FockState) -> float:
    return float(np.dot(np.arange(psi.dim), psi.probabilities))


def expectation(op, psi: FockState, residue_tol: float = HERMITIAN_RESIDUE_TOL) -> float:
    """Real expectation ``<psi|op|psi>`` of a banded Hermitian operator.

    The imaginary part of the sesquilinear form must vanish up to roundoff;
    it is checked against ``residue_tol`` (scaled by the magnitude of the
    summed terms) and then dropped.
    """
    if op.dim != psi.dim:
        raise DimensionError(f"operator dim {op.dim} vs state dim {psi.dim}")
    c = psi.amplitudes
    hc = op.matvec(c)
    terms = np.conj(c) * hc
    value = terms.sum()
    scale = 1.0 + float(np.abs(terms).sum())
    if abs(value.imag) > residue_tol * scale:
        raise NumericalError(
            f"expectation has imaginary part {value.imag:.3e}; operator is not Hermitian"
        )
    return float(value.real)

"""Quasi-exactly-solvable anharmonic Bose Hamiltonian in a truncated Fock basis.

    H = sum_{p=1}^{p0} eps_p (a^dag a)^p
        + sum_{s=0}^{s0} A_s [ (a^dag a)^s a^2 + (a^dag)^2 (a^dag a)^s ]

in units hbar = m = omega = 1. The operator only couples ``|n>`` with
``|n>`` and ``|n +- 2>``, so it is stored as a main diagonal plus one complex
band at offset 2. Both bands are evaluated from closed formulas, never by
multiplying truncated ladder matrices, so the truncated operator is exactly
Hermitian including the boundary rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, GaugeUndefinedError

TWO_PI = 2.0 * math.pi


def _as_real_tuple(values, name: str) -> tuple[float, ...]:
    out = []
    for v in values:
        if isinstance(v, complex) or np.iscomplexobj(v):
            raise ValueError(f"{name} coefficients must be real, got {v!r}")
        f = float(v)
        if not math.isfinite(f):
            raise ValueError(f"{name} coefficients must be finite, got {v!r}")
        out.append(f)
    return tuple(out)


@dataclass(frozen=True)
class QESParams:
    """Coefficients ``epsilon = (eps_1, ..., eps_p0)`` and ``a_coeff = (A_0, ..., A_s0)``.

    ``epsilon[0]`` multiplies ``(a^dag a)^1``; there is no constant offset.
    """

    epsilon: tuple[float, ...] = ()
    a_coeff: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _as_real_tuple(self.epsilon, "epsilon"))
        object.__setattr__(self, "a_coeff", _as_real_tuple(self.a_coeff, "A_s"))

    @property
    def lam(self) -> float:
        """Gauge rate ``lambda = sum_s A_s``."""
        return math.fsum(self.a_coeff)

    @property
    def s0(self) -> int:
        return len(self.a_coeff) - 1

    @property
    def margin(self) -> int:
        """Empty slots kept above a state's support before applying H."""
        return 2 * (max(self.s0, 0) + 1)

    def with_epsilon(self, p: int, value: float) -> "QESParams":
        """Copy with ``eps_p`` (1-based) replaced, zero-extending as needed."""
        if p < 1:
            raise ValueError("epsilon index p starts at 1")
        eps = list(self.epsilon) + [0.0] * max(0, p - len(self.epsilon))
        eps[p - 1] = value
        return QESParams(tuple(eps), self.a_coeff)

    def with_a(self, s: int, value: float) -> "QESParams":
        """Copy with ``A_s`` (0-based) replaced, zero-extending as needed."""
        if s < 0:
            raise ValueError("A_s index s starts at 0")
        a = list(self.a_coeff) + [0.0] * max(0, s + 1 - len(self.a_coeff))
        a[s] = value
        return QESParams(self.epsilon, tuple(a))


@dataclass(frozen=True, eq=False)
class BandedHermitianOperator:
    """Hermitian matrix with nonzero entries only at offsets 0 and +-2.

    ``H[n, n] = diag[n]``, ``H[n+2, n] = band2[n]``,
    ``H[n, n+2] = conj(band2[n])``.
    """

    diag: np.ndarray
    band2: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        b = np.array(self.band2, dtype=complex).reshape(-1)
        if b.size != max(d.size - 2, 0):
            raise DimensionError(f"band2 must have length dim-2 = {d.size - 2}, got {b.size}")
        d.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "band2", b)

    @property
    def dim(self) -> int:
        return self.diag.size

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=complex)
        if vec.shape[0] != self.dim:
            raise DimensionError(f"vector length {vec.shape[0]} vs operator dim {self.dim}")
        out = self.diag * vec if vec.ndim == 1 else self.diag[:, None] * vec
        if self.dim > 2:
            b = self.band2 if vec.ndim == 1 else self.band2[:, None]
            out[2:] += b * vec[:-2]
            out[:-2] += np.conj(b) * vec[2:]
        return out


@dataclass(frozen=True)
class GaugeSchedule:
    """Linear gauge ``f(t) = lambda * t`` with period ``T = 2 pi / lambda``."""

    lam: float
    period: float

    def f(self, t):
        return self.lam * t


def diagonal_entries(epsilon, n: np.ndarray) -> np.ndarray:
    """``sum_p eps_p n^p`` for p = 1..p0."""
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    for p, eps in enumerate(epsilon, start=1):
        out = out + eps * n**p
    return out


def band_entries(a_coeff, n: np.ndarray) -> np.ndarray:
    """``sum_s A_s n^s sqrt((n+1)(n+2))``, i.e. ``<n+2|V|n>``, with 0^0 = 1."""
    n = np.asarray(n, dtype=float)
    poly = np.zeros_like(n)
    for s, a in enumerate(a_coeff):
        poly = poly + a * np.power(n, s)
    return poly * np.sqrt((n + 1.0) * (n + 2.0))


def build_hamiltonian(params: QESParams, dim: int) -> BandedHermitianOperator:
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    if dim < 3 and any(a != 0.0 for a in params.a_coeff):
        raise DimensionError(f"dim={dim} too small for the offset-2 band (need dim >= 3)")
    diag = diagonal_entries(params.epsilon, np.arange(dim))
    band2 = band_entries(params.a_coeff, np.arange(max(dim - 2, 0)))
    return BandedHermitianOperator(diag, band2.astype(complex))


def lambda_and_period(params: QESParams) -> GaugeSchedule:
    lam = params.lam
    if not lam > 0.0:
        raise GaugeUndefinedError(
            f"lambda = sum(A_s) = {lam!r} must be > 0; the gauge f(t) = lambda t "
            "and the period T = 2 pi / lambda are undefined otherwise"
        )
    return GaugeSchedule(lam, TWO_PI / lam)


def dense_form(op: BandedHermitianOperator) -> np.ndarray:
    n = op.dim
    mat = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    mat[idx, idx] = op.diag
    if n > 2:
        k = np.arange(n - 2)
        mat[k + 2, k] = op.band2
        mat[k, k + 2] = np.conj(op.band2)
    return mat

"""Truncated Fock-space states, operators and stable special functions.

All heavy coefficients (factorials, powers of large amplitudes) are handled
in log space via lgamma so that photon numbers up to a few hundred never
overflow double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

DEFAULT_N_MAX = 256

# tail window used by the truncation-adequacy check
TAIL_WINDOW = 8
TAIL_TOL = 1e-10


class TruncationError(ValueError):
    """Raised when a state's support spills into the guard band at the top
    of the truncated basis."""


class DimensionMismatch(ValueError):
    """Raised when two states live in different truncated bases."""


@dataclass(frozen=True)
class OpticalState:
    """Single-mode optical state as complex amplitudes over |0..n_max>.

    Treat instances as immutable; operations return new states.
    """

    amps: np.ndarray
    n_max: int
    normalized: bool = True

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (self.n_max + 1,):
            raise DimensionMismatch(
                f"amps shape {amps.shape} does not match n_max={self.n_max}"
            )
        object.__setattr__(self, "amps", amps)
        amps.setflags(write=False)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tail_mass(self, window: int = TAIL_WINDOW) -> float:
        return float(np.sum(np.abs(self.amps[self.n_max + 1 - window:]) ** 2))

    def check_converged(self, tol: float = TAIL_TOL):
        scale = max(self.norm ** 2, 1e-300)
        if self.tail_mass() / scale >= tol:
            raise TruncationError(
                f"tail mass {self.tail_mass() / scale:.3e} exceeds {tol:.1e}; "
                f"increase n_max beyond {self.n_max}"
            )

    def normalize(self) -> tuple["OpticalState", float]:
        """Return (normalized state, norm). The norm is the pre-normalization
        L2 norm, which carries the success probability bookkeeping."""
        nrm = self.norm
        if nrm == 0.0:
            return OpticalState(self.amps.copy(), self.n_max, False), 0.0
        return OpticalState(self.amps / nrm, self.n_max, True), nrm

    def mean_photon(self) -> float:
        n = np.arange(self.n_max + 1)
        return float(np.real(np.sum(n * np.abs(self.amps) ** 2)))

    def mean_a(self) -> complex:
        """Expectation value <a>."""
        n = np.arange(1, self.n_max + 1)
        return complex(np.sum(np.conj(self.amps[:-1]) * np.sqrt(n) * self.amps[1:]))

    def mean_a2(self) -> complex:
        """Expectation value <a^2>."""
        n = np.arange(2, self.n_max + 1)
        fac = np.sqrt(n * (n - 1))
        return complex(np.sum(np.conj(self.amps[:-2]) * fac * self.amps[2:]))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian density operator over the truncated photon-number basis."""

    rho: np.ndarray
    n_max: int

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (self.n_max + 1, self.n_max + 1):
            raise DimensionMismatch(
                f"rho shape {rho.shape} does not match n_max={self.n_max}"
            )
        object.__setattr__(self, "rho", rho)
        rho.setflags(write=False)

    @classmethod
    def from_pure(cls, state: OpticalState) -> "DensityMatrix":
        return cls(np.outer(state.amps, np.conj(state.amps)), state.n_max)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def mean_a(self) -> complex:
        n = np.arange(1, self.n_max + 1)
        # Tr(rho a) = sum_n sqrt(n) rho[n, n-1]
        return complex(np.sum(np.sqrt(n) * np.diagonal(self.rho, -1)))

    def validate(self, herm_tol: float = 1e-12, trace_tol: float = 1e-10,
                 eig_floor: float = -1e-10):
        if self.hermiticity_defect() > herm_tol:
            raise ValueError("density matrix not Hermitian within tolerance")
        if abs(self.trace - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace} deviates from 1")
        w = np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2)
        if w.min() < eig_floor:
            raise ValueError(f"negative eigenvalue {w.min():.3e}")


def vacuum(n_max: int = DEFAULT_N_MAX) -> OpticalState:
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[0] = 1.0
    return OpticalState(amps, n_max)


def fock_state(n: int, n_max: int = DEFAULT_N_MAX) -> OpticalState:
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = 1.0
    return OpticalState(amps, n_max)


def coherent_state(alpha: complex, n_max: int = DEFAULT_N_MAX) -> OpticalState:
    """Coherent state |alpha> with amplitudes e^{-|a|^2/2} a^n / sqrt(n!).

    Magnitudes are built in log space; the phase e^{i n arg(alpha)} is applied
    separately so large |alpha| never overflows.
    """
    mag = abs(alpha)
    if mag ** 2 + 10.0 * mag + 20.0 > n_max:
        raise TruncationError(
            f"n_max={n_max} too small for |alpha|={mag:.3f} "
            f"(need >= |alpha|^2 + 10|alpha| + 20)"
        )
    n = np.arange(n_max + 1)
    if mag == 0.0:
        return vacuum(n_max)
    log_mag = -0.5 * mag ** 2 + n * np.log(mag) - 0.5 * gammaln(n + 1)
    phase = np.exp(1j * n * np.angle(alpha)) if alpha != mag else np.ones(n_max + 1)
    state = OpticalState(np.exp(log_mag) * phase, n_max)
    state.check_converged()
    return state


def apply_creation(state: OpticalState, j: int = 1) -> OpticalState:
    """(a^dagger)^j applied to state; result is unnormalized."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return OpticalState(state.amps.copy(), state.n_max, False)
    n_max = state.n_max
    support = np.nonzero(np.abs(state.amps) > 0)[0]
    if support.size and support[-1] + j > n_max - TAIL_WINDOW:
        # tolerate spill of negligible amplitude only
        spill = np.sum(np.abs(state.amps[max(0, n_max - TAIL_WINDOW - j + 1):]) ** 2)
        if spill / max(state.norm ** 2, 1e-300) >= TAIL_TOL:
            raise TruncationError(
                f"(a^+)^{j} pushes support past n_max - {TAIL_WINDOW}"
            )
    amps = np.zeros(n_max + 1, dtype=complex)
    n = np.arange(n_max + 1 - j)
    # sqrt((n+j)!/n!) in log space
    fac = np.exp(0.5 * (gammaln(n + j + 1) - gammaln(n + 1)))
    amps[j:] = fac * state.amps[: n_max + 1 - j]
    return OpticalState(amps, n_max, False)


def apply_annihilation(state: OpticalState, j: int = 1) -> OpticalState:
    """a^j applied to state; result is unnormalized."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return OpticalState(state.amps.copy(), state.n_max, False)
    n_max = state.n_max
    amps = np.zeros(n_max + 1, dtype=complex)
    n = np.arange(j, n_max + 1)
    fac = np.exp(0.5 * (gammaln(n + 1) - gammaln(n - j + 1)))
    amps[: n_max + 1 - j] = fac * state.amps[j:]
    return OpticalState(amps, n_max, False)


def inner(u: OpticalState, v: OpticalState) -> complex:
    """<u|v> over the shared truncated basis."""
    if u.n_max != v.n_max:
        raise DimensionMismatch(f"n_max {u.n_max} != {v.n_max}")
    return complex(np.vdot(u.amps, v.amps))


def laguerre_assoc(n: int, k: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^(k)(x) by upward recurrence in n.

    Stable for the x >= 0 regime used throughout (x = |g|^2); also exact for
    negative x where every recurrence term is positive.
    """
    if n < 0 or k < -n:
        raise ValueError("require n >= 0 and k >= -n")
    return float(laguerre_assoc_all(n, k, np.asarray(x, dtype=float))[n])


def laguerre_assoc_all(n_top: int, k: int, x: np.ndarray) -> np.ndarray:
    """L_n^(k)(x) for all n = 0..n_top, vectorized over x.

    Returns an array of shape (n_top + 1,) + x.shape.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_top + 1,) + x.shape)
    out[0] = 1.0
    if n_top == 0:
        return out
    out[1] = 1.0 + k - x
    for n in range(1, n_top):
        out[n + 1] = ((2 * n + k + 1 - x) * out[n] - (n + k) * out[n - 1]) / (n + 1)
    return out


def log_creation_norm_sq(j: int, alpha_sq: float) -> float:
    """ln ||(a^+)^j |alpha>||^2 = ln( j! * L_j(-|alpha|^2) ).

    Evaluated as an all-positive series in log space, valid for arbitrarily
    large alpha_sq.
    """
    if j == 0:
        return 0.0
    i = np.arange(j + 1)
    # j! * L_j(-a) = sum_i [j!/( (j-i)! i! )] * a^i * j!/i!  ... assembled below
    terms = (2 * gammaln(j + 1) - gammaln(j - i + 1) - 2 * gammaln(i + 1)
             + i * np.log(alpha_sq))
    return float(logsumexp(terms))


def quadrature_mean_var(state: OpticalState, theta: float = 0.0) -> tuple[float, float]:
    """Mean and variance of X_theta = (a e^{-i theta} + a^+ e^{i theta})/sqrt(2)."""
    ea = state.mean_a()
    ea2 = state.mean_a2()
    nbar = state.mean_photon()
    ph = np.exp(-1j * theta)
    mean = np.sqrt(2.0) * np.real(ph * ea)
    x2 = np.real(ph * ph * ea2) + nbar + 0.5
    return float(mean), float(x2 - mean ** 2)

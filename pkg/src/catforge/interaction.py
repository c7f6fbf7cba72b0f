"""Electron-photon scattering: conditional optical states, quantum-channel
decomposition and post-selection probabilities.

The scattering matrix exp(g a^+ b - g* a b^+) acting on |alpha>|0>_e leaves,
after projecting the electron on ladder index k, an optical state

    |psi^(k)> ~ sum_{j >= max(0,-k)} c_j (a^+)^j |alpha>,
    c_j = e^{-|g|^2/2} g^j (-g* alpha)^{k+j} / (j! (k+j)!),

whose squared norm is the post-selection probability Pr(k).  Two independent
routes are provided: the direct operator series (`conditional_state_series`)
and the Fock-basis closed form with associated Laguerre polynomials
(`conditional_state_closed`); they must agree to 1e-10 and serve as each
other's oracle.

Everything is computed for real alpha, |g| >= 0; complex phases of alpha are
restored afterwards by `phase_rotate` (the physics is covariant under
a -> a e^{-i phi}).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .fock import (
    DEFAULT_N_MAX,
    OpticalState,
    TruncationError,
    apply_creation,
    coherent_state,
    laguerre_assoc_all,
    log_creation_norm_sq,
)

CHANNEL_CUTOFF = 1e-12
CHANNEL_J_CAP = 200


@dataclass(frozen=True)
class CouplingConfig:
    """Physical inputs of a single interaction run."""

    g: complex
    alpha: complex
    n_max: int = DEFAULT_N_MAX
    k_range: tuple[int, int] = (-64, 64)

    def __post_init__(self):
        lo, hi = self.k_range
        if not lo <= 0 <= hi:
            raise ValueError("k_range must contain 0")

    @property
    def g_mag(self) -> float:
        return abs(self.g)

    @property
    def alpha_mag(self) -> float:
        return abs(self.alpha)


@dataclass(frozen=True)
class Channel:
    j: int
    coeff: float           # C_j^(k) up to the common positive prefactor
    weighted_mag: float    # |C~_j^(k)|, norm-weighted magnitude
    weight: float          # P_j^(k)


@dataclass(frozen=True)
class ChannelDecomposition:
    k: int
    channels: list[Channel]
    s_even: float
    s_odd: float


@dataclass(frozen=True)
class JointAmplitudes:
    """Entangled state as a map electron-ladder-index -> optical sector."""

    sectors: dict[int, OpticalState]    # unnormalized, norm^2 = Pr(k)
    probabilities: dict[int, float]

    @property
    def total_probability(self) -> float:
        return float(sum(self.probabilities.values()))


def phase_rotate(state: OpticalState, phi: float) -> OpticalState:
    """Multiply amps[n] by e^{i n phi} (phase-space rotation by phi)."""
    n = np.arange(state.n_max + 1)
    return OpticalState(state.amps * np.exp(1j * n * phi), state.n_max,
                        state.normalized)


def _series_sum_mp(g: float, alpha: float, k: int, n_max: int,
                   j_cap: int) -> OpticalState:
    """Term-by-term series summation in 40-digit arithmetic.

    Used when the alternating channel series cancels too strongly for double
    precision (strong coupling); the returned amplitudes are O(1) so the
    final downcast to float is lossless.
    """
    import mpmath

    with mpmath.workdps(40):
        gg = mpmath.mpf(g)
        aa = mpmath.mpf(alpha)
        pref = mpmath.e ** (-(aa * aa + gg * gg) / 2)
        fact = [mpmath.factorial(i) for i in range(n_max + 1)]
        j0 = max(0, -k)
        cj = []
        for j in range(j0, j_cap + 1):
            c = ((-1) ** ((k + j) % 2) * gg ** (2 * j + k) * aa ** (k + j)
                 / (fact[j] * fact[k + j]))
            cj.append(c)
        amps = np.zeros(n_max + 1, dtype=complex)
        sqf = [mpmath.sqrt(f) for f in fact]
        for m in range(n_max + 1):
            s = mpmath.mpf(0)
            for idx, j in enumerate(range(j0, min(m, j_cap) + 1)):
                s += cj[idx] * aa ** (m - j) * sqf[m] / fact[m - j]
            amps[m] = float(pref * s)
    return OpticalState(amps, n_max, False)


def _series_sum(g: float, alpha: float, k: int, n_max: int,
                j_max: int | None) -> OpticalState:
    """Unnormalized conditional state via the operator series, for real
    g, alpha >= 0.  Norm^2 of the result equals Pr(k)."""
    j0 = max(0, -k)
    base = coherent_state(alpha, n_max)
    total = np.zeros(n_max + 1, dtype=complex)
    # running (a^+)^j |alpha>, renormalized each step; log norm tracked
    w = base.amps.copy()
    log_w = 0.0
    peak = -np.inf
    j = 0
    hard_cap = j_max if j_max is not None else CHANNEL_J_CAP
    while j <= hard_cap:
        if j >= j0:
            # c_j = e^{-g^2/2} g^{2j+k} alpha^{k+j} (-1)^{k+j} / (j! (k+j)!)
            if g == 0.0:
                if j == 0 and k == 0:
                    total += w
                break
            log_c = (-0.5 * g * g + (2 * j + k) * np.log(g)
                     - gammaln(j + 1) - gammaln(k + j + 1))
            if alpha > 0.0:
                log_c += (k + j) * np.log(alpha)
            elif k + j != 0:
                log_c = -np.inf
            sign = (-1.0) ** ((k + j) % 2)
            log_term = log_c + log_w
            if np.isfinite(log_term):
                peak = max(peak, log_term)
                total += sign * np.exp(log_term) * w
                if j_max is None and j > j0 + 2 and log_term < peak - 37.0:
                    # relative coefficient below 1e-16: series converged
                    break
        nxt = apply_creation(OpticalState(w, n_max, False), 1)
        nrm = nxt.norm
        w = nxt.amps / nrm
        log_w += np.log(nrm)
        j += 1
    result = OpticalState(total, n_max, False)
    # alternating series: when the largest term towers over the result the
    # double-precision sum loses digits; redo in extended precision
    res_norm = result.norm
    if np.isfinite(peak) and res_norm > 0.0 and peak - np.log(res_norm) > 6.0:
        result = _series_sum_mp(g, alpha, k, n_max, j)
    return result


def conditional_state_series(cfg: CouplingConfig, k: int,
                             j_max: int | None = None
                             ) -> tuple[OpticalState, float]:
    """Conditional optical state by direct summation of the channel series.

    Returns (normalized state, norm) where norm^2 = Pr(k).
    """
    raw = _series_sum(cfg.g_mag, cfg.alpha_mag, k, cfg.n_max, j_max)
    raw.check_converged()
    state, norm = raw.normalize()
    phi = np.angle(cfg.alpha) if cfg.alpha != 0 else 0.0
    if phi != 0.0 and norm > 0.0:
        state = phase_rotate(state, phi)
    return state, norm


def _closed_amps(g: float, alpha: float, k: int, n_max: int) -> np.ndarray:
    """Fock amplitudes of the unnormalized conditional state (real alpha, g)."""
    if g == 0.0:
        if k == 0:
            return coherent_state(alpha, n_max).amps.copy()
        return np.zeros(n_max + 1, dtype=complex)
    n = np.arange(n_max + 1)
    pref = -0.5 * (alpha * alpha + g * g)
    log_alpha = np.log(alpha) if alpha > 0 else -np.inf
    if k >= 0:
        lag = laguerre_assoc_all(n_max, k, np.array(g * g))
        with np.errstate(divide="ignore"):
            log_mag = (pref + (k + n) * log_alpha + k * np.log(g)
                       + 0.5 * gammaln(n + 1) - gammaln(k + n + 1)
                       + np.log(np.abs(lag)))
        sign = (-1.0) ** (k % 2) * np.sign(lag)
        amps = np.where(np.isfinite(log_mag), sign * np.exp(log_mag), 0.0)
    else:
        m = -k
        lag_all = laguerre_assoc_all(n_max + k if n_max + k >= 0 else 0, m,
                                     np.array(g * g))
        amps = np.zeros(n_max + 1)
        nn = np.arange(m, n_max + 1)
        lag = lag_all[nn + k]
        with np.errstate(divide="ignore"):
            log_mag = (pref + (k + nn) * log_alpha + m * np.log(g)
                       - 0.5 * gammaln(nn + 1) + np.log(np.abs(lag)))
        amps[m:] = np.where(np.isfinite(log_mag), np.sign(lag) * np.exp(log_mag),
                            0.0)
    return amps.astype(complex)


def conditional_state_closed(cfg: CouplingConfig, k: int
                             ) -> tuple[OpticalState, float]:
    """Conditional optical state from the Laguerre closed form.

    Identical (up to global phase) to `conditional_state_series`; the pair is
    the module's built-in oracle cross-check.
    """
    raw = OpticalState(_closed_amps(cfg.g_mag, cfg.alpha_mag, k, cfg.n_max),
                       cfg.n_max, False)
    raw.check_converged()
    state, norm = raw.normalize()
    phi = np.angle(cfg.alpha) if cfg.alpha != 0 else 0.0
    if phi != 0.0 and norm > 0.0:
        state = phase_rotate(state, phi)
    return state, norm


def success_probability(cfg: CouplingConfig, k: int) -> float:
    """Pr(k) from the closed-form sum over Fock terms, independent of any
    state construction."""
    g = cfg.g_mag
    a2 = cfg.alpha_mag ** 2
    if g == 0.0:
        return 1.0 if k == 0 else 0.0
    n_max = cfg.n_max
    if a2 + 10.0 * np.sqrt(a2) + 20.0 > n_max:
        raise TruncationError(
            f"n_max={n_max} too small for |alpha|^2={a2:.3f}; the Fock sum "
            "would be cut before its tail decays"
        )
    pref = -(a2 + g * g)
    with np.errstate(divide="ignore"):
        log_a2 = np.log(a2) if a2 > 0 else -np.inf
        if k >= 0:
            n = np.arange(n_max + 1)
            lag = laguerre_assoc_all(n_max, k, np.array(g * g))
            terms = (pref + (k + n) * log_a2 + 2 * k * np.log(g)
                     + gammaln(n + 1) - 2 * gammaln(k + n + 1)
                     + 2 * np.log(np.abs(lag)))
        else:
            m = -k
            n = np.arange(m, n_max + 1)
            lag = laguerre_assoc_all(n_max + k, m, np.array(g * g))[n + k]
            terms = (pref + (k + n) * log_a2 + 2 * m * np.log(g)
                     - gammaln(n + 1) + 2 * np.log(np.abs(lag)))
    terms = terms[np.isfinite(terms)]
    if terms.size == 0:
        return 0.0
    return float(np.exp(logsumexp(terms)))


def entangled_state(cfg: CouplingConfig) -> JointAmplitudes:
    """Post-interaction entangled state, sector by electron ladder index."""
    sectors: dict[int, OpticalState] = {}
    probs: dict[int, float] = {}
    for k in range(cfg.k_range[0], cfg.k_range[1] + 1):
        state, norm = conditional_state_closed(cfg, k)
        pr = norm * norm
        sectors[k] = OpticalState(state.amps * norm, cfg.n_max, False)
        probs[k] = pr
    total = sum(probs.values())
    if total < 1.0 - 1e-10:
        raise ValueError(
            f"k_range {cfg.k_range} retains only probability {total:.12f}; "
            "widen the range"
        )
    return JointAmplitudes(sectors, probs)


def channel_decomposition(cfg: CouplingConfig, k: int,
                          mode: str = "exact") -> ChannelDecomposition:
    """Per-channel coefficients and weights P_j^(k).

    mode="exact" weighs each channel by the true norm of (a^+)^j |alpha>;
    mode="large-alpha" uses the |alpha|^2 >> 1 approximation |alpha|^j.
    """
    if mode not in ("exact", "large-alpha"):
        raise ValueError(f"unknown mode {mode!r}")
    g = cfg.g_mag
    alpha = cfg.alpha_mag
    a2 = alpha * alpha
    j0 = max(0, -k)
    raw: list[tuple[int, float, float, float]] = []  # (j, log|C_j|, log|C~_j|, sign)
    best = -np.inf
    for j in range(j0, CHANNEL_J_CAP + 1):
        if g == 0.0:
            if j == j0:
                raw.append((j, 0.0, 0.0, 1.0))
            break
        log_c = ((2 * j + k) * np.log(g) - gammaln(j + 1) - gammaln(k + j + 1))
        if alpha > 0:
            log_c += (k + j) * np.log(alpha)
        elif k + j != 0:
            continue
        if mode == "exact":
            log_ct = log_c + 0.5 * log_creation_norm_sq(j, a2)
        else:
            log_ct = log_c + (j * np.log(alpha) if alpha > 0
                              else (-np.inf if j else 0.0))
        sign = (-1.0) ** (j % 2)
        raw.append((j, log_c, log_ct, sign))
        best = max(best, log_ct)
        if j > j0 + 2 and log_ct < best + np.log(CHANNEL_CUTOFF):
            break
    logs = np.array([r[2] for r in raw])
    weights = np.exp(logs - logsumexp(logs))
    weights /= weights.sum()
    channels = []
    s_even = 0.0
    s_odd = 0.0
    for (j, log_c, log_ct, sign), w in zip(raw, weights):
        channels.append(Channel(j=j, coeff=sign * float(np.exp(log_c)),
                                weighted_mag=float(np.exp(log_ct)),
                                weight=float(w)))
        if j % 2 == 0:
            s_even += float(w)
        else:
            s_odd += float(w)
    return ChannelDecomposition(k=k, channels=channels,
                                s_even=s_even, s_odd=s_odd)

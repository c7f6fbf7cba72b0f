"""Photon-loss evolution and ensemble averaging over coupling fluctuations.

The loss model is the pure-decay master equation
rho' = kappa (2 a rho a^+ - a^+ a rho - rho a^+ a), whose exact solution is
the Kraus map K_l = sqrt((1-eta)^l / l!) eta^{n/2} a^l with survival
probability eta = e^{-2 kappa t}.  kappa defaults to 1 MHz and times are in
microseconds, matching the quoted cat lifetimes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, roots_hermite

from .cat import CatParams, cat_state, fit_cat
from .fock import DensityMatrix, OpticalState
from .interaction import CouplingConfig, conditional_state_closed
from .phasespace import negativity, state_negativity, wigner_auto


@dataclass(frozen=True)
class LossSpec:
    """Decay rate kappa (1/us by default, i.e. 1 MHz) and evaluation times (us)."""

    kappa: float = 1.0
    times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if any(t < 0 for t in self.times):
            raise ValueError("times must be nonnegative")
        if list(self.times) != sorted(self.times):
            raise ValueError("times must be sorted ascending")


@dataclass(frozen=True)
class FluctuationSpec:
    """Gaussian coupling-strength fluctuation: |g| ~ N(g0, delta_g), truncated
    at |g| >= 0 and renormalized."""

    g0: float
    delta_g: float
    samples: int = 21

    def __post_init__(self):
        if self.g0 < 0 or self.delta_g < 0:
            raise ValueError("g0 and delta_g must be nonnegative")
        if self.samples < 9:
            raise ValueError("need at least 9 quadrature nodes")


def _kraus_weights_log(eta: float, l: int) -> float:
    # log of sqrt((1-eta)^l / l!)
    if l == 0:
        return 0.0
    return 0.5 * (l * np.log1p(-eta) - gammaln(l + 1))


def loss_map_pure(state: OpticalState, eta: float,
                  weight_tol: float = 1e-16) -> DensityMatrix:
    """Apply the pure-loss channel with survival eta to a pure state."""
    n_max = state.n_max
    n = np.arange(n_max + 1)
    if eta >= 1.0:
        return DensityMatrix.from_pure(state)
    log_eta_half = 0.5 * n * np.log(eta) if eta > 0 else np.where(n == 0, 0.0, -np.inf)
    cols = []
    for l in range(n_max + 1):
        # (K_l psi)_n = sqrt((1-eta)^l/l!) eta^{n/2} sqrt((n+l)!/n!) psi_{n+l}
        src = state.amps[l:]
        nn = n[: n_max + 1 - l]
        log_fac = (_kraus_weights_log(eta, l) + log_eta_half[: n_max + 1 - l]
                   + 0.5 * (gammaln(nn + l + 1) - gammaln(nn + 1)))
        v = np.zeros(n_max + 1, dtype=complex)
        v[: n_max + 1 - l] = np.exp(log_fac) * src
        w = float(np.vdot(v, v).real)
        cols.append(v)
        if l > 0 and w < weight_tol and all(
                float(np.vdot(c, c).real) < weight_tol for c in cols[-3:]):
            break
    V = np.array(cols).T
    rho = V @ V.conj().T
    return DensityMatrix(rho, n_max)


def loss_map_rho(rho: DensityMatrix, eta: float,
                 weight_tol: float = 1e-16) -> DensityMatrix:
    """Apply the pure-loss channel to a density matrix."""
    n_max = rho.n_max
    n = np.arange(n_max + 1)
    if eta >= 1.0:
        return rho
    log_eta_half = 0.5 * n * np.log(eta) if eta > 0 else np.where(n == 0, 0.0, -np.inf)
    out = np.zeros_like(np.asarray(rho.rho))
    for l in range(n_max + 1):
        nn = n[: n_max + 1 - l]
        log_fac = (_kraus_weights_log(eta, l) + log_eta_half[: n_max + 1 - l]
                   + 0.5 * (gammaln(nn + l + 1) - gammaln(nn + 1)))
        fac = np.exp(log_fac)
        block = rho.rho[l:, l:] * np.outer(fac, fac)
        out[: n_max + 1 - l, : n_max + 1 - l] += block
        if l > 0 and float(np.max(np.abs(block))) < weight_tol:
            break
    return DensityMatrix(out, n_max)


def loss_evolve(state: OpticalState, spec: LossSpec
                ) -> list[tuple[float, DensityMatrix]]:
    """Exact pure-loss evolution: list of (t, rho(t)) with eta = e^{-2 kappa t}."""
    out = []
    for t in spec.times:
        eta = float(np.exp(-2.0 * spec.kappa * t))
        out.append((float(t), loss_map_pure(state, eta)))
    return out


def euler_master_equation(rho0: DensityMatrix, kappa: float, t: float,
                          steps: int) -> DensityMatrix:
    """First-order integration of rho' = kappa(2 a rho a^+ - a^+a rho - rho a^+a).

    Cross-method oracle for the Kraus map; use small states and many steps.
    """
    n_max = rho0.n_max
    sq = np.sqrt(np.arange(1, n_max + 1))
    a = np.diag(sq, 1)
    num = np.diag(np.arange(n_max + 1, dtype=float))
    rho = np.asarray(rho0.rho).copy()
    dt = t / steps
    for _ in range(steps):
        rho = rho + dt * kappa * (2.0 * a @ rho @ a.conj().T
                                  - num @ rho - rho @ num)
    return DensityMatrix(rho, n_max)


def trace_distance(r1: DensityMatrix, r2: DensityMatrix) -> float:
    w = np.linalg.eigvalsh(np.asarray(r1.rho) - np.asarray(r2.rho))
    return float(0.5 * np.sum(np.abs(w)))


def loss_metrics(evolution: list[tuple[float, DensityMatrix]],
                 reference_cat: OpticalState | None = None,
                 points: int = 301, half_width: float = 6.0
                 ) -> list[tuple[float, float, float]]:
    """Per-time Wigner negativity and fidelity against a reference cat.

    The reference defaults to the best-fit cat of the t=0 state.
    """
    if not evolution:
        return []
    if reference_cat is None:
        t0, rho0 = evolution[0]
        w0, v0 = np.linalg.eigh(np.asarray(rho0.rho))
        psi0 = OpticalState(v0[:, -1], rho0.n_max)
        params = fit_cat(psi0)
        reference_cat = cat_state(CatParams(params.beta_mag, params.phi),
                                  rho0.n_max)
    out = []
    cat_amps = reference_cat.amps
    for t, rho in evolution:
        delta = negativity(wigner_auto(rho, points=points, half_width=half_width))
        f = float(np.real(np.vdot(cat_amps, np.asarray(rho.rho) @ cat_amps)))
        out.append((t, delta, f))
    return out


def extinction_time(state: OpticalState, kappa: float = 1.0,
                    threshold: float = 2e-3, t_max: float = 1.0,
                    coarse: int = 11, refine_iters: int = 12,
                    points: int = 301) -> float:
    """Time at which the Wigner negativity of the loss-evolved state first
    drops below threshold (bisection after a coarse bracketing scan)."""

    def delta_at(t: float) -> float:
        eta = float(np.exp(-2.0 * kappa * t))
        rho = loss_map_pure(state, eta)
        return negativity(wigner_auto(rho, points=points))

    ts = np.linspace(0.0, t_max, coarse)
    lo, hi = None, None
    prev_t, prev_d = 0.0, delta_at(0.0)
    if prev_d <= threshold:
        return 0.0
    for t in ts[1:]:
        d = delta_at(float(t))
        if d <= threshold:
            lo, hi = prev_t, float(t)
            break
        prev_t, prev_d = float(t), d
    if lo is None:
        raise ValueError(f"negativity still above {threshold} at t={t_max}")
    for _ in range(refine_iters):
        mid = 0.5 * (lo + hi)
        if delta_at(mid) <= threshold:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def gaussian_nodes(spec: FluctuationSpec) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes/weights for |g| ~ N(g0, delta_g), truncated at
    |g| >= 0 and renormalized."""
    if spec.delta_g == 0.0:
        return np.array([spec.g0]), np.array([1.0])
    x, w = roots_hermite(spec.samples)
    g = spec.g0 + np.sqrt(2.0) * spec.delta_g * x
    w = w / np.sqrt(np.pi)
    keep = g >= 0.0
    g, w = g[keep], w[keep]
    return g, w / w.sum()


def fluctuation_average(spec: FluctuationSpec, k: int, alpha: complex,
                        n_max: int = 256, average_rho: bool = False,
                        points: int = 301) -> tuple[float, float]:
    """(mean delta, mean F) under Gaussian coupling-strength fluctuations.

    F is the fidelity against the cat fitted to the nominal-g0 state.  The
    default averages the metrics node by node; average_rho=True instead
    averages the conditional density matrix first and evaluates the metrics
    of the mixture.
    """
    nodes, weights = gaussian_nodes(spec)
    nominal, _ = conditional_state_closed(
        CouplingConfig(g=spec.g0, alpha=alpha, n_max=n_max), k)
    params = fit_cat(nominal)
    ref = cat_state(CatParams(params.beta_mag, params.phi), n_max)
    states = []
    errors = 0
    for g in nodes:
        try:
            st, _ = conditional_state_closed(
                CouplingConfig(g=float(g), alpha=alpha, n_max=n_max), k)
            states.append(st)
        except Exception:
            states.append(None)
            errors += 1
    if errors == len(states):
        raise RuntimeError("all quadrature nodes failed")
    if average_rho:
        rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        wtot = 0.0
        for st, w in zip(states, weights):
            if st is None:
                continue
            rho += w * np.outer(st.amps, np.conj(st.amps))
            wtot += w
        dm = DensityMatrix(rho / wtot, n_max)
        delta = negativity(wigner_auto(dm, points=points))
        f = float(np.real(np.vdot(ref.amps, np.asarray(dm.rho) @ ref.amps)))
        return delta, f
    mean_d = 0.0
    mean_f = 0.0
    wtot = 0.0
    for st, w in zip(states, weights):
        if st is None:
            continue
        mean_d += w * state_negativity(st, points=points)
        mean_f += w * float(abs(np.vdot(ref.amps, st.amps)) ** 2)
        wtot += w
    return mean_d / wtot, mean_f / wtot

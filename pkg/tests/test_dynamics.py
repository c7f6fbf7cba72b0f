"""Photon loss (exact Kraus map vs Euler oracle) and coupling fluctuations."""

import numpy as np
import pytest

from catforge.cat import CatParams, cat_state
from catforge.dynamics import (
    FluctuationSpec,
    LossSpec,
    euler_master_equation,
    extinction_time,
    fluctuation_average,
    gaussian_nodes,
    loss_evolve,
    loss_map_pure,
    loss_map_rho,
    loss_metrics,
    trace_distance,
)
from catforge.fock import DensityMatrix, OpticalState, coherent_state, fock_state
from catforge.interaction import CouplingConfig, conditional_state_closed


def three_photon_state(n_max=24):
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[0], amps[1], amps[3] = 0.6, 0.48j, 0.64
    return OpticalState(amps, n_max)


def test_loss_zero_time_is_projector():
    state = three_photon_state()
    (t0, rho0), = loss_evolve(state, LossSpec(times=(0.0,)))
    assert t0 == 0.0
    assert np.max(np.abs(np.asarray(rho0.rho)
                         - np.outer(state.amps, state.amps.conj()))) < 1e-12


def test_loss_coherent_to_coherent():
    # pure loss keeps coherent states pure: alpha -> alpha e^{-kappa t}
    alpha, t = 2.0, 0.4
    rho = loss_map_pure(coherent_state(alpha, 64), np.exp(-2.0 * t))
    rho.validate()
    target = coherent_state(alpha * np.exp(-t), 64).amps
    fid = np.real(np.vdot(target, np.asarray(rho.rho) @ target))
    assert fid == pytest.approx(1.0, abs=1e-9)


def test_loss_trace_and_psd_along_evolution():
    evo = loss_evolve(three_photon_state(), LossSpec(times=(0.0, 0.1, 0.5, 2.0)))
    for _, rho in evo:
        rho.validate()
    # long-time limit approaches vacuum
    final = np.asarray(evo[-1][1].rho)
    assert np.real(final[0, 0]) > 0.95


def test_loss_semigroup():
    state = three_photon_state()
    eta1, eta2 = np.exp(-2.0 * 0.07), np.exp(-2.0 * 0.13)
    once = loss_map_pure(state, eta1 * eta2)
    twice = loss_map_rho(loss_map_pure(state, eta1), eta2)
    assert trace_distance(once, twice) < 1e-9


def test_kraus_vs_euler_oracle():
    # independent integrator: first-order Euler steps of the master equation
    state = three_photon_state(16)
    kappa, t = 1.0, 0.25
    exact = loss_map_pure(state, np.exp(-2.0 * kappa * t))
    rho0 = DensityMatrix.from_pure(state)
    approx = euler_master_equation(rho0, kappa, t, steps=200_000)
    assert trace_distance(exact, approx) < 1e-6


def test_loss_metrics_t0_consistency():
    state, _ = conditional_state_closed(
        CouplingConfig(g=0.17, alpha=np.sqrt(50.0)), 0)
    evo = loss_evolve(state, LossSpec(times=(0.0, 0.05, 0.1)))
    metrics = loss_metrics(evo, points=201)
    from catforge.phasespace import state_negativity

    assert metrics[0][1] == pytest.approx(state_negativity(state, points=201),
                                          abs=1e-6)
    # decoherence is monotone for this state
    deltas = [m[1] for m in metrics]
    fids = [m[2] for m in metrics]
    assert deltas == sorted(deltas, reverse=True)
    assert fids == sorted(fids, reverse=True)


def test_extinction_time_cat():
    # a small odd cat loses its negativity on the 1/(2 kappa |beta|^2) scale
    cat = cat_state(CatParams(2.0, 0.5 * np.pi), 64)
    tau = extinction_time(cat, kappa=1.0, points=201)
    assert 0.05 < tau < 1.0


def test_gaussian_nodes_moments():
    spec = FluctuationSpec(g0=0.5, delta_g=0.05, samples=21)
    g, w = gaussian_nodes(spec)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert float(g @ w) == pytest.approx(0.5, abs=1e-10)
    assert float((g - 0.5) ** 2 @ w) == pytest.approx(0.05 ** 2, rel=1e-8)


def test_gaussian_nodes_truncated_at_zero():
    g, w = gaussian_nodes(FluctuationSpec(g0=0.05, delta_g=0.1, samples=31))
    assert np.all(g >= 0.0)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_fluctuation_zero_width_matches_single_point():
    from catforge.cat import fit_cat
    from catforge.phasespace import state_negativity

    state, _ = conditional_state_closed(
        CouplingConfig(g=0.17, alpha=np.sqrt(50.0)), 0)
    d, f = fluctuation_average(FluctuationSpec(0.17, 0.0), 0, np.sqrt(50.0),
                               points=201)
    assert d == pytest.approx(state_negativity(state, points=201), abs=1e-9)
    assert f == pytest.approx(fit_cat(state).fidelity, abs=1e-6)


def test_fluctuation_node_count_stability():
    kw = dict(k=0, alpha=np.sqrt(50.0), points=161)
    d21, f21 = fluctuation_average(FluctuationSpec(0.17, 0.005, samples=21), **kw)
    d11, f11 = fluctuation_average(FluctuationSpec(0.17, 0.005, samples=11), **kw)
    assert abs(d21 - d11) < 1e-3
    assert abs(f21 - f11) < 1e-3


def test_fluctuation_rho_averaging_mode():
    # F is linear in rho, so both averaging conventions agree on F
    kw = dict(k=0, alpha=np.sqrt(50.0), points=161)
    spec = FluctuationSpec(0.17, 0.01, samples=11)
    d_metric, f_metric = fluctuation_average(spec, **kw)
    d_rho, f_rho = fluctuation_average(spec, average_rho=True, **kw)
    assert f_rho == pytest.approx(f_metric, abs=1e-9)
    # the mixture washes out negativity faster than the per-shot average
    assert d_rho < d_metric


def test_spec_validation():
    with pytest.raises(ValueError):
        LossSpec(kappa=-1.0)
    with pytest.raises(ValueError):
        LossSpec(times=(0.3, 0.1))
    with pytest.raises(ValueError):
        FluctuationSpec(g0=0.2, delta_g=0.1, samples=5)

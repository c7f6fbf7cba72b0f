"""Conditional states, channel weights and post-selection probabilities.

The central cross-check: the operator-series construction and the Laguerre
closed form are fully independent code paths and must agree to 1e-10; the
probability sum is a third route that never touches state amplitudes.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catforge.fock import coherent_state, inner
from catforge.interaction import (
    Channel,
    CouplingConfig,
    channel_decomposition,
    conditional_state_closed,
    conditional_state_series,
    entangled_state,
    phase_rotate,
    success_probability,
)

ALPHA50 = np.sqrt(50.0)

G_VALUES = [0.05, 0.17, 0.5, 0.95, 2.0]
K_VALUES = [-2, -1, 0, 1, 2]


@pytest.mark.parametrize("g", G_VALUES)
@pytest.mark.parametrize("k", K_VALUES)
def test_series_vs_closed_oracle_matrix(g, k):
    cfg = CouplingConfig(g=g, alpha=ALPHA50)
    s1, n1 = conditional_state_series(cfg, k)
    s2, n2 = conditional_state_closed(cfg, k)
    assert abs(abs(inner(s1, s2)) - 1.0) < 1e-10
    assert n1 == pytest.approx(n2, rel=1e-10)


@pytest.mark.parametrize("g", G_VALUES)
@pytest.mark.parametrize("k", K_VALUES)
def test_probability_vs_state_norm(g, k):
    cfg = CouplingConfig(g=g, alpha=ALPHA50)
    _, norm = conditional_state_closed(cfg, k)
    assert success_probability(cfg, k) == pytest.approx(norm * norm,
                                                        rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("g", [0.17, 0.95, 2.0])
def test_probability_sums_to_one(g):
    cfg = CouplingConfig(g=g, alpha=ALPHA50)
    total = sum(success_probability(cfg, k)
                for k in range(cfg.k_range[0], cfg.k_range[1] + 1))
    assert abs(total - 1.0) < 1e-10


def test_zero_coupling_passes_input_through():
    cfg = CouplingConfig(g=0.0, alpha=ALPHA50)
    state, norm = conditional_state_closed(cfg, 0)
    assert norm == pytest.approx(1.0, abs=1e-12)
    assert abs(abs(inner(state, coherent_state(ALPHA50, cfg.n_max))) - 1.0) < 1e-12
    assert success_probability(cfg, 0) == 1.0
    assert success_probability(cfg, 3) == 0.0


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_phase_rotation_covariance(k):
    # a complex input phase only rotates the conditional state in phase space
    phi = 0.83
    cfg_real = CouplingConfig(g=0.3, alpha=3.0)
    cfg_rot = CouplingConfig(g=0.3, alpha=3.0 * np.exp(1j * phi))
    s_real, n_real = conditional_state_closed(cfg_real, k)
    s_rot, n_rot = conditional_state_closed(cfg_rot, k)
    assert n_rot == pytest.approx(n_real, rel=1e-12)
    ov = inner(phase_rotate(s_real, phi), s_rot)
    assert abs(abs(ov) - 1.0) < 1e-10


def test_entangled_state_total_probability():
    joint = entangled_state(CouplingConfig(g=0.17, alpha=ALPHA50))
    assert abs(joint.total_probability - 1.0) < 1e-10
    # sector norms double as the probabilities
    for k in (-1, 0, 2):
        assert joint.sectors[k].norm ** 2 == pytest.approx(
            joint.probabilities[k], rel=1e-10)


def test_entangled_state_narrow_range_raises():
    cfg = CouplingConfig(g=2.0, alpha=ALPHA50, k_range=(-3, 3))
    with pytest.raises(ValueError, match="widen"):
        entangled_state(cfg)


def test_channel_weights_sum_to_one():
    cd = channel_decomposition(CouplingConfig(g=0.391, alpha=ALPHA50), 0)
    assert sum(c.weight for c in cd.channels) == pytest.approx(1.0, abs=1e-12)
    assert cd.s_even + cd.s_odd == pytest.approx(1.0, abs=1e-12)


def test_channel_balance_at_interference_peak():
    # the even and odd channel families carry equal weight at a negativity peak
    cd = channel_decomposition(CouplingConfig(g=0.391, alpha=ALPHA50), 0)
    assert cd.s_even / cd.s_odd == pytest.approx(1.0, abs=5e-3)


def test_channel_weak_coupling_single_channel():
    cd = channel_decomposition(CouplingConfig(g=0.01, alpha=ALPHA50), 0)
    assert cd.channels[0].j == 0
    assert cd.channels[0].weight > 0.99


def test_channel_modes_agree_at_large_alpha():
    cfg = CouplingConfig(g=0.5, alpha=ALPHA50)
    exact = channel_decomposition(cfg, 1, mode="exact")
    approx = channel_decomposition(cfg, 1, mode="large-alpha")
    w_exact = {c.j: c.weight for c in exact.channels}
    w_approx = {c.j: c.weight for c in approx.channels}
    # the approximation carries O(j^2/alpha^2) weight error, ~1e-2 here
    for j in range(5):
        assert w_exact[j] == pytest.approx(w_approx[j], abs=2e-2)


def test_channel_lowest_index_respects_k():
    cd = channel_decomposition(CouplingConfig(g=0.5, alpha=ALPHA50), -2)
    assert cd.channels[0].j == 2


def test_channel_unknown_mode():
    with pytest.raises(ValueError):
        channel_decomposition(CouplingConfig(g=0.1, alpha=1.0), 0, mode="bad")


def test_k_range_must_contain_zero():
    with pytest.raises(ValueError):
        CouplingConfig(g=0.1, alpha=1.0, k_range=(1, 5))


@given(st.floats(min_value=0.01, max_value=1.2),
       st.integers(min_value=-3, max_value=3))
@settings(max_examples=25, deadline=None)
def test_conditional_state_properties(g, k):
    cfg = CouplingConfig(g=g, alpha=ALPHA50)
    state, norm = conditional_state_closed(cfg, k)
    assert 0.0 < norm < 1.0 or (norm == 0.0 and k != 0)
    if norm > 0.0:
        assert abs(state.norm - 1.0) < 1e-12
        assert state.tail_mass() < 1e-10

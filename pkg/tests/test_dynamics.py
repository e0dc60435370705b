import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinctl.dynamics import (
    max_probability_scan,
    probability_trace,
    propagator,
    spectral_decompose,
    transfer_probability,
    write_trace_csv,
)
from spinctl.errors import InvalidGrid, NodeOutOfRange
from spinctl.network import build_network, effective_hamiltonian


def spectrum_of(topology, n, j=1.0, eps=0.0):
    return spectral_decompose(effective_hamiltonian(build_network(topology, n, j, eps)))


spec_args = st.tuples(
    st.sampled_from(["chain", "ring"]),
    st.integers(min_value=3, max_value=8),
    st.floats(min_value=0.1, max_value=3.0),
    st.sampled_from([0.0, 1.0]),
)


@pytest.mark.parametrize(
    "topology,n,expected,mult",
    [
        ("ring", 3, [-1.0, 2.0], [2, 1]),
        ("chain", 2, [-1.0, 1.0], [1, 1]),
        ("ring", 4, [-2.0, 0.0, 2.0], [1, 2, 1]),
    ],
)
def test_spectra_examples(topology, n, expected, mult):
    spec = spectrum_of(topology, n)
    assert np.allclose(spec.eigenvalues, expected, atol=1e-10)
    assert list(spec.multiplicity) == mult


@given(spec_args)
def test_projector_identities(args):
    spec = spectrum_of(*args)
    n = spec.dim
    total = sum(spec.projectors)
    assert np.abs(total - np.eye(n)).max() <= 1e-10
    for k, pk in enumerate(spec.projectors):
        assert np.abs(pk - pk.T).max() <= 1e-12
        for l, pl in enumerate(spec.projectors):
            expected = pk if k == l else np.zeros((n, n))
            assert np.abs(pk @ pl - expected).max() <= 1e-10


@given(spec_args)
def test_reconstruction(args):
    h = effective_hamiltonian(build_network(*args))
    spec = spectral_decompose(h)
    rebuilt = sum(lam * p for lam, p in zip(spec.eigenvalues, spec.projectors))
    scale = max(np.abs(h.matrix).max(), 1.0)
    assert np.abs(rebuilt - h.matrix).max() <= 1e-9 * scale


def test_propagator_identity_at_zero():
    spec = spectrum_of("ring", 5)
    assert np.abs(propagator(spec, 0.0) - np.eye(5)).max() <= 1e-14


def test_propagator_full_swap():
    spec = spectrum_of("chain", 2)
    u = propagator(spec, math.pi / 2)
    assert abs(abs(u[1, 0]) - 1.0) <= 1e-12


@given(spec_args, st.floats(min_value=-20, max_value=20))
def test_unitarity(args, t):
    spec = spectrum_of(*args)
    u = propagator(spec, t)
    assert np.abs(u.conj().T @ u - np.eye(spec.dim)).max() <= 1e-10


@given(spec_args, st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
def test_composition(args, t1, t2):
    spec = spectrum_of(*args)
    u = propagator(spec, t1 + t2)
    assert np.abs(u - propagator(spec, t1) @ propagator(spec, t2)).max() <= 1e-9


def test_transfer_probability_chain2_closed_form():
    spec = spectrum_of("chain", 2)
    for t in np.linspace(0, 4, 17):
        assert transfer_probability(spec, 1, 2, t) == pytest.approx(math.sin(t) ** 2, abs=1e-12)


def test_transfer_probability_ring3_closed_form():
    spec = spectrum_of("ring", 3)
    for t in np.linspace(0, 4, 17):
        assert transfer_probability(spec, 1, 1, t) == pytest.approx((5 + 4 * math.cos(3 * t)) / 9, abs=1e-12)
    assert transfer_probability(spec, 1, 1, math.pi / 3) == pytest.approx(1 / 9, abs=1e-12)


def test_self_probability_at_zero():
    for topology, n in [("chain", 4), ("ring", 7)]:
        spec = spectrum_of(topology, n, 0.8, 1.0)
        for node in range(1, n + 1):
            assert transfer_probability(spec, node, node, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_node_range_checked():
    spec = spectrum_of("chain", 3)
    with pytest.raises(NodeOutOfRange):
        transfer_probability(spec, 0, 2, 1.0)
    with pytest.raises(NodeOutOfRange):
        probability_trace(spec, 1, 4, [0.0, 1.0])


def test_trace_matches_pointwise():
    spec = spectrum_of("ring", 6, 0.7, 1.0)
    times = np.linspace(0, 10, 101)
    trace = probability_trace(spec, 2, 5, times)
    for t, p in zip(times, trace):
        assert abs(p - transfer_probability(spec, 2, 5, t)) <= 1e-14


def test_trace_at_zero_is_kronecker():
    spec = spectrum_of("ring", 5)
    assert probability_trace(spec, 2, 2, [0.0])[0] == pytest.approx(1.0, abs=1e-14)
    assert probability_trace(spec, 1, 2, [0.0])[0] == pytest.approx(0.0, abs=1e-14)


def test_ring4_quarter_period_null():
    spec = spectrum_of("ring", 4)
    assert probability_trace(spec, 1, 1, [math.pi / 2])[0] == pytest.approx(0.0, abs=1e-12)


@given(spec_args, st.floats(min_value=0, max_value=10))
def test_probability_conservation(args, t):
    spec = spectrum_of(*args)
    total = sum(transfer_probability(spec, m, 1, t) for m in range(1, spec.dim + 1))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_scan_two_spin():
    spec = spectrum_of("chain", 2)
    t_peak, p_peak = max_probability_scan(spec, 1, 2, horizon=2.0, dt=0.01)
    assert abs(t_peak - math.pi / 2) <= 1e-6
    assert abs(p_peak - 1.0) <= 1e-9


def test_scan_ring3_attains_capacity():
    spec = spectrum_of("ring", 3)
    t_peak, p_peak = max_probability_scan(spec, 1, 2, horizon=5.0, dt=0.001)
    assert p_peak == pytest.approx(4 / 9, abs=1e-9)
    assert t_peak == pytest.approx(math.pi / 3, abs=1e-5)


def test_scan_grid_validation():
    spec = spectrum_of("chain", 2)
    with pytest.raises(InvalidGrid):
        max_probability_scan(spec, 1, 2, horizon=1.0, dt=2.0)
    with pytest.raises(InvalidGrid):
        max_probability_scan(spec, 1, 2, horizon=1.0, dt=0.0)


@pytest.mark.parametrize("n", range(3, 10))
def test_ring_epsilon_invariance(n):
    times = np.linspace(0, 15, 301)
    s0 = spectrum_of("ring", n, 1.0, 0.0)
    s1 = spectrum_of("ring", n, 1.0, 1.0)
    for target in (1, 2, 1 + n // 2):
        d = np.abs(probability_trace(s0, 1, target, times) - probability_trace(s1, 1, target, times))
        assert d.max() <= 1e-10


@pytest.mark.parametrize("topology,n,eps", [("chain", 3, 0.0), ("chain", 4, 1.0), ("ring", 4, 1.0), ("ring", 5, 0.0)])
def test_full_space_oracle_probabilities(topology, n, eps):
    # full 2^N evolution at t/2 reproduces the effective probabilities at t
    from spinctl.network import full_space_hamiltonian, single_excitation_indices

    spec = build_network(topology, n, 1.0, eps)
    eff = spectral_decompose(effective_hamiltonian(spec))
    w, v = np.linalg.eigh(full_space_hamiltonian(spec))
    idx = single_excitation_indices(n)
    rng = np.random.default_rng(7)
    for t in rng.uniform(0, 8, 20):
        uf = (v * np.exp(-1j * w * (t / 2))) @ v.conj().T
        block = np.abs(uf[np.ix_(idx, idx)]) ** 2
        for a in range(n):
            for b in range(n):
                assert abs(block[a, b] - transfer_probability(eff, a + 1, b + 1, t)) <= 1e-8


def test_degenerate_levels_merge():
    # exact ring degeneracies must not split into separate projectors
    spec = spectrum_of("ring", 8)
    assert len(spec.eigenvalues) == 5
    assert list(spec.multiplicity) == [1, 2, 2, 2, 1]


def test_write_trace_csv():
    buf = io.StringIO()
    write_trace_csv(np.array([0.0, 0.5]), np.array([1.0, 0.25]), buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "t,p"
    assert lines[1] == "0,1"
    assert lines[2] == "0.5,0.25"

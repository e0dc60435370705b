import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinctl.errors import InvalidAnisotropy, InvalidCoupling, InvalidSize, TooLarge
from spinctl.network import (
    NetworkSpec,
    Topology,
    build_network,
    effective_hamiltonian,
    full_space_hamiltonian,
    single_excitation_indices,
)

specs = st.builds(
    build_network,
    st.sampled_from(["chain", "ring"]),
    st.integers(min_value=3, max_value=8),
    st.floats(min_value=0.05, max_value=5.0, allow_nan=False),
    st.floats(min_value=0.0, max_value=3.0, allow_nan=False),
)


def test_build_network_examples():
    assert build_network("ring", 6, 0.666, 0.0).size == 6
    assert build_network(Topology.CHAIN, 2, 1.0).topology is Topology.CHAIN
    with pytest.raises(InvalidSize):
        build_network("ring", 2, 1.0)


@pytest.mark.parametrize(
    "kwargs,exc",
    [
        (dict(topology="chain", size=1, coupling=1.0), InvalidSize),
        (dict(topology="chain", size=3, coupling=0.0), InvalidCoupling),
        (dict(topology="chain", size=3, coupling=-2.0), InvalidCoupling),
        (dict(topology="chain", size=3, coupling=math.inf), InvalidCoupling),
        (dict(topology="chain", size=3, coupling=1.0, anisotropy=-0.1), InvalidAnisotropy),
        (dict(topology="chain", size=3, coupling=1.0, anisotropy=math.nan), InvalidAnisotropy),
    ],
)
def test_build_network_rejects(kwargs, exc):
    with pytest.raises(exc):
        build_network(**kwargs)


def test_effective_hamiltonian_examples():
    h2 = effective_hamiltonian(build_network("chain", 2, 1.0)).matrix
    assert np.array_equal(h2, [[0.0, 1.0], [1.0, 0.0]])

    h3 = effective_hamiltonian(build_network("ring", 3, 1.0)).matrix
    assert np.array_equal(h3, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])

    h3h = effective_hamiltonian(build_network("chain", 3, 1.0, 1.0)).matrix
    assert np.array_equal(np.diag(h3h), [-1.0, -2.0, -1.0])


@given(specs)
def test_effective_hamiltonian_structure(spec):
    h = effective_hamiltonian(spec).matrix
    n, j, eps = spec.size, spec.coupling, spec.anisotropy
    assert np.allclose(h, h.T, rtol=1e-12)
    wrap = spec.topology is Topology.RING
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            d = abs(a - b)
            expected = j if d == 1 or (wrap and d == n - 1) else 0.0
            assert h[a, b] == expected
    incident = np.array([sum(j for e in spec.edges if (a + 1) in e) for a in range(n)])
    assert np.allclose(np.diag(h), -eps * incident, atol=1e-12)


def test_full_space_chain2_xx():
    h = full_space_hamiltonian(build_network("chain", 2, 1.0))
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 2] = expected[2, 1] = 2.0
    assert np.allclose(h, expected)


def test_full_space_chain2_heisenberg_adds_zz():
    h0 = full_space_hamiltonian(build_network("chain", 2, 1.0, 0.0))
    h1 = full_space_hamiltonian(build_network("chain", 2, 1.0, 1.0))
    assert np.allclose(h1 - h0, np.diag([1.0, -1.0, -1.0, 1.0]))


@given(specs)
def test_full_space_hermitian(spec):
    h = full_space_hamiltonian(spec)
    assert np.allclose(h, h.conj().T, atol=1e-12)


def test_full_space_size_guard():
    with pytest.raises(TooLarge):
        full_space_hamiltonian(build_network("chain", 13, 1.0))


@pytest.mark.parametrize("topology,n", [("chain", 2), ("chain", 4), ("chain", 6), ("ring", 3), ("ring", 5), ("ring", 6)])
@pytest.mark.parametrize("eps", [0.0, 1.0, 0.7])
def test_single_excitation_block_matches_effective(topology, n, eps):
    # projected full-space block equals 2*H_eff + eps*(total edge coupling)*I
    spec = build_network(topology, n, 1.3, eps)
    full = full_space_hamiltonian(spec)
    idx = single_excitation_indices(n)
    block = full[np.ix_(idx, idx)]
    c = eps * spec.coupling * len(spec.edges)
    target = 2.0 * effective_hamiltonian(spec).matrix + c * np.eye(n)
    assert np.abs(block - target).max() <= 1e-10
    assert np.abs(block.imag).max() <= 1e-12


def test_json_round_trip():
    spec = build_network("ring", 6, 0.666, 1.0)
    data = json.loads(json.dumps(spec.to_dict()))
    assert data == {"topology": "ring", "n": 6, "j": 0.666, "epsilon": 1.0}
    assert NetworkSpec.from_dict(data) == spec


def test_matrix_is_read_only():
    h = effective_hamiltonian(build_network("chain", 3, 1.0))
    with pytest.raises(ValueError):
        h.matrix[0, 0] = 5.0

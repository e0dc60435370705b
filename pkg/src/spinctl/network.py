"""Spin-network models: uniformly coupled chains and rings.

The working representation is the effective single-excitation Hamiltonian,
an N x N real symmetric matrix with hop amplitude J on every edge and
diagonal entries -epsilon * (coupling incident to the node).  A full
2^N-dimensional Pauli construction is kept alongside as a validation
oracle; on the single-excitation block it equals 2*H_eff + c*I with
c = epsilon * (total edge coupling), so all transfer probabilities agree
after rescaling time by 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidAnisotropy, InvalidCoupling, InvalidSize, TooLarge

FULL_SPACE_MAX_SPINS = 12

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_ID = np.eye(2, dtype=complex)


class Topology(str, Enum):
    CHAIN = "chain"
    RING = "ring"


@dataclass(frozen=True)
class NetworkSpec:
    """Uniformly coupled nearest-neighbour network of spin-1/2 particles.

    epsilon selects the coupling type: 0 for XX, 1 for Heisenberg.
    """

    topology: Topology
    size: int
    coupling: float
    anisotropy: float = 0.0

    def __post_init__(self) -> None:
        min_size = 3 if self.topology is Topology.RING else 2
        if self.size < min_size:
            raise InvalidSize(
                f"{self.topology.value} needs at least {min_size} spins, got {self.size}"
            )
        if not math.isfinite(self.coupling) or self.coupling <= 0:
            raise InvalidCoupling(f"coupling must be finite and > 0, got {self.coupling}")
        if not math.isfinite(self.anisotropy) or self.anisotropy < 0:
            raise InvalidAnisotropy(
                f"anisotropy must be finite and >= 0, got {self.anisotropy}"
            )

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as 1-based node pairs."""
        es = [(i, i + 1) for i in range(1, self.size)]
        if self.topology is Topology.RING:
            es.append((self.size, 1))
        return tuple(es)

    def to_dict(self) -> dict:
        return {
            "topology": self.topology.value,
            "n": self.size,
            "j": self.coupling,
            "epsilon": self.anisotropy,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkSpec":
        return build_network(data["topology"], data["n"], data["j"], data["epsilon"])


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Single-excitation Hamiltonian of a network, with the spec it came from."""

    matrix: np.ndarray
    spec: NetworkSpec

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def build_network(
    topology: Topology | str, size: int, coupling: float, anisotropy: float = 0.0
) -> NetworkSpec:
    """Validate parameters and construct a NetworkSpec."""
    topo = Topology(topology) if not isinstance(topology, Topology) else topology
    return NetworkSpec(topo, int(size), float(coupling), float(anisotropy))


def effective_hamiltonian(spec: NetworkSpec) -> EffectiveHamiltonian:
    """Single-excitation N x N Hamiltonian of the network."""
    n, j, eps = spec.size, spec.coupling, spec.anisotropy
    h = np.zeros((n, n))
    incident = np.zeros(n)
    for a, b in spec.edges:
        h[a - 1, b - 1] = h[b - 1, a - 1] = j
        incident[a - 1] += j
        incident[b - 1] += j
    h[np.diag_indices(n)] = -eps * incident
    return EffectiveHamiltonian(h, spec)


def excitation_index(node: int, n_spins: int) -> int:
    """Basis index of the state with the single down-spin at `node`.

    Ordering is lexicographic over spin bitstrings with spin 1 as the
    leftmost (most significant) tensor factor.
    """
    return 1 << (n_spins - node)


def single_excitation_indices(n_spins: int) -> np.ndarray:
    """Full-space basis indices of |1>, ..., |N>."""
    return np.array([excitation_index(k, n_spins) for k in range(1, n_spins + 1)])


def _pauli_pair(op: np.ndarray, m: int, n: int, n_spins: int) -> np.ndarray:
    """Kronecker product with `op` at positions m and n (1-based), identity elsewhere."""
    out = np.array([[1.0 + 0.0j]])
    for pos in range(1, n_spins + 1):
        out = np.kron(out, op if pos in (m, n) else _ID)
    return out


def full_space_hamiltonian(spec: NetworkSpec) -> np.ndarray:
    """Exact 2^N x 2^N Pauli Hamiltonian; validation oracle for small N."""
    n = spec.size
    if n > FULL_SPACE_MAX_SPINS:
        raise TooLarge(f"full-space construction capped at {FULL_SPACE_MAX_SPINS} spins")
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    for a, b in spec.edges:
        h += spec.coupling * (
            _pauli_pair(_SX, a, b, n)
            + _pauli_pair(_SY, a, b, n)
            + spec.anisotropy * _pauli_pair(_SZ, a, b, n)
        )
    return h

"""Dynamical Lie algebra closure for switched spin-network controls.

The dimension of the real Lie algebra generated by i*H0 and i*H_C
certifies controllability (dimension N^2 - 1 on the traceless sector) or
exposes symmetry obstructions (much smaller closures).  The closure is
computed numerically: commutate, orthogonalize against the running basis
under the real trace inner product, keep what sticks out beyond the rank
tolerance, repeat to a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .control import projected_sigma_z
from .errors import DimensionOverflow
from .network import NetworkSpec, effective_hamiltonian

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class LieBasis:
    """Trace-orthonormal anti-Hermitian basis of the generated algebra."""

    basis: tuple[np.ndarray, ...]
    dimension: int
    rank_tol: float

    def __post_init__(self) -> None:
        for b in self.basis:
            b.setflags(write=False)


def _real_inner(a: np.ndarray, b: np.ndarray) -> float:
    # real part of tr(a^dag b); the algebra is a real vector space
    return float(np.real(np.vdot(a, b)))


def _orthogonalize(m: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    r = m.copy()
    for _ in range(2):  # twice is enough for modified Gram-Schmidt stability
        for b in basis:
            r -= _real_inner(b, r) * b
    return r


def lie_closure_dimension(
    generators: Sequence[np.ndarray],
    rank_tol: float = DEFAULT_RANK_TOL,
    max_dim: int | None = None,
) -> LieBasis:
    """Closure of {i*G : G in generators} under commutators.

    rank_tol is relative to the largest singular value seen among
    processed matrices.  Raises DimensionOverflow past max_dim
    (default N^2), which signals a rank tolerance set too small.
    """
    if not generators:
        raise ValueError("need at least one generator")
    size = generators[0].shape[0]
    if max_dim is None:
        max_dim = size * size
    basis: list[np.ndarray] = []
    queue: list[np.ndarray] = [1j * np.asarray(g, dtype=complex) for g in generators]
    largest_sv = 0.0
    while queue:
        cand = queue.pop(0)
        sv = np.linalg.norm(cand, 2)
        largest_sv = max(largest_sv, sv)
        resid = _orthogonalize(cand, basis)
        norm = np.linalg.norm(resid)
        if norm <= rank_tol * largest_sv:
            continue
        resid /= norm
        queue.extend(resid @ b - b @ resid for b in basis)
        basis.append(resid)
        if len(basis) > max_dim:
            raise DimensionOverflow(
                f"closure exceeded {max_dim} dimensions; rank_tol={rank_tol} too small?"
            )
    return LieBasis(basis=tuple(basis), dimension=len(basis), rank_tol=rank_tol)


def _traceless(m: np.ndarray) -> np.ndarray:
    return m - (np.trace(m) / m.shape[0]) * np.eye(m.shape[0])


def lie_dimension_report(
    spec: NetworkSpec,
    control_site: int = 1,
    rank_tol: float = DEFAULT_RANK_TOL,
    max_dim: int | None = None,
) -> dict:
    """Closure dimensions for {H0, projected sigma_z at control_site}.

    Reported under both trace conventions: `dimension` removes the
    identity component from each generator (traceless dynamics),
    `dimension_with_identity` keeps the literal projected operators.
    """
    h0 = effective_hamiltonian(spec).matrix
    hc = projected_sigma_z(spec.size, control_site)
    traceless = lie_closure_dimension(
        [_traceless(h0), _traceless(hc)], rank_tol=rank_tol, max_dim=max_dim
    )
    literal = lie_closure_dimension([h0, hc], rank_tol=rank_tol, max_dim=max_dim)
    return {
        "dimension": traceless.dimension,
        "dimension_with_identity": literal.dimension,
        "generators": f"H0({spec.topology.value},N={spec.size},eps={spec.anisotropy}), "
        f"sigma_z(site {control_site}) projected",
        "rank_tol": rank_tol,
    }

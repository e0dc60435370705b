"""Spectral decomposition, unitary propagation and transfer probabilities.

Everything downstream (capacity bounds, controls, identification
cross-checks) works from one eigendecomposition, stored as distinct
eigenvalues with orthogonal spectral projectors.  Degenerate levels are
merged into a single projector so that exactly degenerate ring spectra do
not split under numerical jitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import DecompositionFailure, InvalidGrid, NodeOutOfRange
from .network import EffectiveHamiltonian

DEFAULT_DEGENERACY_REL_TOL = 1e-9

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues (ascending) and their spectral projectors."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]
    multiplicity: tuple[int, ...]
    degeneracy_tol: float

    def __post_init__(self) -> None:
        ev = np.array(self.eigenvalues, dtype=float)
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        for p in self.projectors:
            p.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def overlaps(self, m: int, n: int) -> np.ndarray:
        """<m|Pi_k|n> for every distinct eigenvalue, as a real vector."""
        _check_node(m, self.dim)
        _check_node(n, self.dim)
        return np.array([p[m - 1, n - 1] for p in self.projectors])


def _check_node(node: int, n: int) -> None:
    if not 1 <= node <= n:
        raise NodeOutOfRange(f"node {node} outside 1..{n}")


def _as_matrix(h: EffectiveHamiltonian | np.ndarray) -> np.ndarray:
    return h.matrix if isinstance(h, EffectiveHamiltonian) else np.asarray(h, dtype=float)


def spectral_decompose(
    h: EffectiveHamiltonian | np.ndarray, degeneracy_tol: float | None = None
) -> Spectrum:
    """Eigendecompose a real symmetric matrix into distinct-level projectors.

    degeneracy_tol defaults to 1e-9 times the spectral range; eigenvalues
    closer than that are treated as one level.
    """
    mat = _as_matrix(h)
    try:
        w, v = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    if degeneracy_tol is None:
        spread = float(w[-1] - w[0])
        degeneracy_tol = DEFAULT_DEGENERACY_REL_TOL * max(spread, np.abs(w).max(), 1.0)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[groups[-1][-1]] <= degeneracy_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = np.array([w[g].mean() for g in groups])
    projectors = []
    for g in groups:
        block = v[:, g]
        p = block @ block.T
        projectors.append((p + p.T) / 2.0)  # exact symmetry of each projector
    return Spectrum(
        eigenvalues=eigenvalues,
        projectors=tuple(projectors),
        multiplicity=tuple(len(g) for g in groups),
        degeneracy_tol=float(degeneracy_tol),
    )


def propagator(spec: Spectrum, t: float) -> np.ndarray:
    """U(t) = sum_k exp(-i lambda_k t) Pi_k."""
    phases = np.exp(-1j * spec.eigenvalues * t)
    u = np.zeros((spec.dim, spec.dim), dtype=complex)
    for ph, p in zip(phases, spec.projectors):
        u += ph * p
    return u


def _amplitudes(spec: Spectrum, m: int, n: int, times: np.ndarray) -> np.ndarray:
    ov = spec.overlaps(m, n)
    return np.exp(-1j * np.outer(times, spec.eigenvalues)) @ ov


def transfer_probability(spec: Spectrum, m: int, n: int, t: float) -> float:
    """p_mn(t) = |<m| exp(-iHt) |n>|^2."""
    amp = _amplitudes(spec, m, n, np.array([float(t)]))[0]
    return float(min(max(abs(amp) ** 2, 0.0), 1.0))


def probability_trace(
    spec: Spectrum, m: int, n: int, times: Iterable[float]
) -> np.ndarray:
    """Vectorized transfer probability over a time array."""
    ts = np.asarray(list(times) if not isinstance(times, np.ndarray) else times, dtype=float)
    p = np.abs(_amplitudes(spec, m, n, ts)) ** 2
    return np.clip(p, 0.0, 1.0)


def _golden_section_max(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    """Maximize f on [a, b] by golden-section search."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    x = (a + b) / 2.0
    return x, f(x)


def max_probability_scan(
    spec: Spectrum, m: int, n: int, horizon: float, dt: float
) -> tuple[float, float]:
    """Peak transfer probability on [0, horizon].

    Grid scan at step dt followed by golden-section refinement of the best
    bracketing interval (time tolerance 1e-10).
    """
    if not (0 < dt < horizon):
        raise InvalidGrid(f"need 0 < dt < horizon, got dt={dt}, horizon={horizon}")
    ts = np.arange(0.0, horizon + dt / 2, dt)
    ts[-1] = min(ts[-1], horizon)
    probs = probability_trace(spec, m, n, ts)
    i = int(np.argmax(probs))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    t_peak, p_peak = _golden_section_max(
        lambda t: transfer_probability(spec, m, n, t), lo, hi, xtol=1e-10
    )
    if probs[i] > p_peak:  # refinement never loses the grid best
        t_peak, p_peak = float(ts[i]), float(probs[i])
    return float(t_peak), float(p_peak)


def write_trace_csv(
    times: np.ndarray, probs: np.ndarray, out: TextIO, precision: int = 17
) -> None:
    """Serialize a probability trace as CSV with header 't,p'."""
    out.write("t,p\n")
    for t, p in zip(times, probs):
        out.write(f"{t:.{precision}g},{p:.{precision}g}\n")

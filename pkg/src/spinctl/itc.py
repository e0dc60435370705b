"""Information transfer capacity: bounds, sign patterns, attainability.

The capacity p* = (sum_k |<m|Pi_k|n>|)^2 caps the transfer probability at
all times.  It is reached when every active eigenphase can be aligned up
to the sign of its overlap, i.e. when all pairwise phase conditions
(lambda_k - lambda_l) t = 2 pi (n_k - n_l) + pi (s_k - s_l) / 2 admit a
common t.  Attainability is reported numerically: a dense finite-horizon
scan plus the residuals of those pairwise conditions at the scan peak.
Rational dependence of the transition frequencies, which would obstruct
attainability, is flagged heuristically (floating-point eigenvalues admit
no exact certificate).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import Spectrum, max_probability_scan
from .errors import InvalidHorizon

DEFAULT_ZERO_TOL = 1e-10
DEFAULT_RATIONAL_TOL = 1e-9
RATIONAL_MAX_DENOMINATOR = 64
DEFAULT_SCAN_SAMPLES = 100_000


@dataclass(frozen=True)
class SignPattern:
    """Signs of the projector overlaps <m|Pi_k|n> and the active index set."""

    signs: tuple[int, ...]
    active_set: tuple[int, ...]
    overlaps: np.ndarray

    def __post_init__(self) -> None:
        ov = np.array(self.overlaps, dtype=float)
        ov.setflags(write=False)
        object.__setattr__(self, "overlaps", ov)


def sign_pattern(
    spec: Spectrum, m: int, n: int, zero_tol: float = DEFAULT_ZERO_TOL
) -> SignPattern:
    """Overlap signs s_k in {-1, 0, +1}; zero when |overlap| <= zero_tol."""
    ov = spec.overlaps(m, n)
    signs = tuple(0 if abs(o) <= zero_tol else (1 if o > 0 else -1) for o in ov)
    active = tuple(k for k, s in enumerate(signs) if s != 0)
    return SignPattern(signs=signs, active_set=active, overlaps=ov)


def itc_bound(spec: Spectrum, m: int, n: int) -> float:
    """Upper bound p* on p_mn(t) over all times."""
    return float(np.sum(np.abs(spec.overlaps(m, n))) ** 2)


@dataclass(frozen=True)
class AttainabilityReport:
    p_star: float
    p_max_scan: float
    t_peak: float
    gap: float
    max_residual_eq9: float
    rational_flags: tuple[dict, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "p_star": self.p_star,
            "p_max_scan": self.p_max_scan,
            "t_peak": self.t_peak,
            "gap": self.gap,
            "max_residual_eq9": self.max_residual_eq9,
            "rational_flags": list(self.rational_flags),
        }


def _wrap_to_pi(x: np.ndarray) -> np.ndarray:
    """Reduce modulo 2*pi into (-pi, pi]."""
    return np.pi - np.mod(np.pi - x, 2.0 * np.pi)


def _rational_flags(freqs: np.ndarray, rational_tol: float) -> list[dict]:
    """Pairs of transition frequencies whose ratio is near a small fraction."""
    flags = []
    for i in range(len(freqs)):
        for j in range(i + 1, len(freqs)):
            if abs(freqs[j]) < rational_tol:
                continue
            ratio = freqs[i] / freqs[j]
            frac = Fraction(ratio).limit_denominator(RATIONAL_MAX_DENOMINATOR)
            if abs(ratio - float(frac)) <= rational_tol:
                flags.append(
                    {
                        "pair": [i, j],
                        "ratio": float(ratio),
                        "fraction": f"{frac.numerator}/{frac.denominator}",
                    }
                )
    return flags


def attainability_report(
    spec: Spectrum,
    m: int,
    n: int,
    horizon: float,
    rational_tol: float = DEFAULT_RATIONAL_TOL,
    zero_tol: float = DEFAULT_ZERO_TOL,
    samples: int = DEFAULT_SCAN_SAMPLES,
) -> AttainabilityReport:
    """Finite-horizon gap to the capacity bound plus phase-condition residuals.

    The residual check evaluates, for every active pair (k, l), how far
    (lambda_k - lambda_l) * t_peak - pi (s_k - s_l) / 2 is from a multiple
    of 2*pi; a vanishing maximum residual certifies the bound is met at
    t_peak to numerical precision.
    """
    if horizon <= 0:
        raise InvalidHorizon(f"horizon must be > 0, got {horizon}")
    p_star = itc_bound(spec, m, n)
    pattern = sign_pattern(spec, m, n, zero_tol=zero_tol)
    t_peak, p_max = max_probability_scan(spec, m, n, horizon, horizon / samples)

    active = list(pattern.active_set)
    residual = 0.0
    if len(active) >= 2:
        lam = spec.eigenvalues[active]
        sgn = np.array([pattern.signs[k] for k in active], dtype=float)
        dl = lam[:, None] - lam[None, :]
        ds = sgn[:, None] - sgn[None, :]
        res = _wrap_to_pi(dl * t_peak - np.pi * ds / 2.0)
        residual = float(np.max(np.abs(res)))

    # transition frequencies relative to the lowest active level
    freqs = (
        spec.eigenvalues[active[1:]] - spec.eigenvalues[active[0]]
        if len(active) >= 3
        else np.array([])
    )
    flags = _rational_flags(freqs, rational_tol) if len(freqs) >= 2 else []

    return AttainabilityReport(
        p_star=p_star,
        p_max_scan=float(p_max),
        t_peak=float(t_peak),
        gap=float(p_star - p_max),
        max_residual_eq9=residual,
        rational_flags=tuple(flags),
    )

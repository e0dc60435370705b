"""Simultaneous ring-size and coupling estimation from binary measurements.

The device model: prepare the excitation at spin 1, wait t, measure spin 1
(outcome 0 or 1).  The 1-outcome probability of an N-ring with uniform
coupling J follows from the circulant spectrum,

    theta(N, J, t) = |(1/N) sum_k exp(-i 2 J cos(2 pi k / N) t)|^2,

deliberately coded without the generic eigensolver so the dynamics module
can cross-check it.  Measurement times extend a base-2 radical-inverse
(van der Corput) sequence over [0, T); the classical Hammersley set is not
extensible in its equispaced coordinate, this component is.  Candidate
(N, J) pairs carry binomial log-likelihoods; per ring size, coupling
samples are resampled towards high-likelihood regions (gap-weighted,
max-shifted exponential weights), and the final coupling estimate is
polished by deterministic hill climbing on the full dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence, TextIO

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidCoupling, InvalidHorizon, InvalidSize

THETA_CLAMP_FLOOR = 1e-12
HILL_CLIMB_MIN_STEP = 1e-7
DEFAULT_EARLY_STOP_NATS = 25.0


def default_horizon(n_max: int, j_min: float) -> float:
    """Covers several periods of the slowest mode anywhere in the domain."""
    return 4.0 * math.pi * n_max / j_min


def vdc_times(start_index: int, count: int, horizon: float) -> np.ndarray:
    """Base-2 radical-inverse sequence entries start_index.., scaled to [0, T)."""
    if horizon <= 0:
        raise InvalidHorizon(f"horizon must be > 0, got {horizon}")
    if count < 1:
        raise ValueError("count must be >= 1")
    out = np.empty(count)
    for i, idx in enumerate(range(start_index, start_index + count)):
        x, f, k = 0.0, 0.5, idx
        while k:
            x += f * (k & 1)
            k >>= 1
            f *= 0.5
        out[i] = x
    return out * horizon


def theta(n: int, j: float, t: float | np.ndarray) -> float | np.ndarray:
    """Probability of measuring 1 at spin 1 of an N-ring after time t."""
    if n < 3:
        raise InvalidSize(f"ring size must be >= 3, got {n}")
    if not (j > 0 and math.isfinite(j)):
        raise InvalidCoupling(f"coupling must be finite and > 0, got {j}")
    lam = 2.0 * j * np.cos(2.0 * np.pi * np.arange(n) / n)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    amp = np.exp(-1j * np.outer(ts, lam)).mean(axis=1)
    p = np.clip(np.abs(amp) ** 2, 0.0, 1.0)
    return float(p[0]) if np.isscalar(t) or np.ndim(t) == 0 else p


@dataclass(frozen=True)
class MeasurementRecord:
    """One dataset row: at time t, out of `repetitions` shots, `ones` gave 1."""

    time: float
    repetitions: int
    ones: int

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if not 0 <= self.ones <= self.repetitions:
            raise ValueError(f"ones={self.ones} outside 0..{self.repetitions}")


def log_likelihood(n: int, j: float, data: Sequence[MeasurementRecord]) -> float:
    """Binomial log-likelihood of (n, j) given the records; larger is better.

    theta is clamped away from {0, 1} so the result stays finite.
    """
    if not data:
        return 0.0
    ts = np.array([r.time for r in data])
    reps = np.array([r.repetitions for r in data], dtype=float)
    ones = np.array([r.ones for r in data], dtype=float)
    th = np.clip(theta(n, j, ts), THETA_CLAMP_FLOOR, 1.0 - THETA_CLAMP_FLOOR)
    terms = (
        gammaln(reps + 1.0)
        - gammaln(ones + 1.0)
        - gammaln(reps - ones + 1.0)
        + ones * np.log(th)
        + (reps - ones) * np.log1p(-th)
    )
    return float(terms.sum())


@dataclass(frozen=True)
class ParamSamples:
    """Coupling sample positions and their log-likelihoods for one ring size."""

    ring_size: int
    positions: np.ndarray
    log_likelihoods: np.ndarray
    j_min: float
    j_max: float

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float)
        ll = np.array(self.log_likelihoods, dtype=float)
        if pos.size < 2:
            raise DomainError("need at least 2 sample points per ring size")
        if np.any(np.diff(pos) < 0):
            raise DomainError("sample positions must be sorted ascending")
        if pos[0] < self.j_min or pos[-1] > self.j_max:
            raise DomainError("sample positions outside the coupling interval")
        pos.setflags(write=False)
        ll.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "log_likelihoods", ll)

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.log_likelihoods))


def resample(
    samples: ParamSamples, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw k new sample positions concentrated where the likelihood is high.

    Each current sample owns the interval cell nearest to it; the cell mass
    is (gap / 2) * exp(L - max L).  k - 1 points come from stratified
    inverse-CDF sampling of that piecewise-constant density; the current
    argmax position is always kept.  If every mass underflows to zero the
    draw falls back to uniform.
    """
    if k < 2:
        raise DomainError("need k >= 2")
    p = samples.positions
    ll = samples.log_likelihoods
    j_min, j_max = samples.j_min, samples.j_max
    ext = np.concatenate([[j_min], p, [j_max]])
    shift = ll.max()
    if np.isfinite(shift):
        masses = 0.5 * (ext[2:] - ext[:-2]) * np.exp(ll - shift)
    else:
        masses = np.zeros(ll.size)  # nothing informative: degenerate density
    edges = np.concatenate([[j_min], 0.5 * (p[1:] + p[:-1]), [j_max]])
    widths = np.diff(edges)
    best = p[samples.best_index]
    if not np.any(masses > 0):
        draws = rng.uniform(j_min, j_max, k - 1)
    else:
        cdf = np.concatenate([[0.0], np.cumsum(masses)])
        u = (np.arange(k - 1) + rng.uniform(size=k - 1)) / (k - 1) * cdf[-1]
        cell = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, len(masses) - 1)
        frac = (u - cdf[cell]) / np.where(masses[cell] > 0, masses[cell], 1.0)
        draws = edges[cell] + frac * widths[cell]
    return np.clip(np.sort(np.concatenate([draws, [best]])), j_min, j_max)


class Experiment(Protocol):
    """Hardware abstraction: binary measurements at spin 1, times in [0, horizon]."""

    horizon: float

    def query(self, t: float, repetitions: int) -> int:
        """Number of 1 outcomes among `repetitions` prepare-wait-measure shots."""
        ...


class SimulatedRingExperiment:
    """Binomial sampling from the exact theta of a hidden (N, J) ring.

    Draws come from one seeded stream consumed in query order, so a fixed
    query sequence reproduces the same data.
    """

    def __init__(self, n_true: int, j_true: float, horizon: float, seed: int):
        if horizon <= 0:
            raise InvalidHorizon(f"horizon must be > 0, got {horizon}")
        self.n_true = n_true
        self.j_true = j_true
        self.horizon = horizon
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def query(self, t: float, repetitions: int) -> int:
        return int(self._rng.binomial(repetitions, theta(self.n_true, self.j_true, t)))


class NoiselessRingExperiment:
    """Idealized device returning round(R * theta); no sampling noise."""

    def __init__(self, n_true: int, j_true: float, horizon: float):
        if horizon <= 0:
            raise InvalidHorizon(f"horizon must be > 0, got {horizon}")
        self.n_true = n_true
        self.j_true = j_true
        self.horizon = horizon

    def query(self, t: float, repetitions: int) -> int:
        return int(round(repetitions * theta(self.n_true, self.j_true, t)))


def simulate_experiment(
    n_true: int, j_true: float, horizon: float, seed: int
) -> SimulatedRingExperiment:
    """Seeded simulated device for a ring with hidden (n_true, j_true)."""
    return SimulatedRingExperiment(n_true, j_true, horizon, seed)


@dataclass(frozen=True)
class IdentifyConfig:
    n_min: int
    n_max: int
    j_min: float
    j_max: float
    k_samples: int = 50
    times_per_iteration: int = 10
    repetitions: int = 10
    iterations: int = 10
    seed: int = 0
    early_stop_nats: float | None = None

    def __post_init__(self) -> None:
        if self.n_min < 3 or self.n_max < self.n_min:
            raise DomainError(f"invalid ring-size domain {self.n_min}..{self.n_max}")
        if not (0 < self.j_min < self.j_max):
            raise DomainError(f"invalid coupling interval [{self.j_min}, {self.j_max}]")
        if self.k_samples < 2:
            raise DomainError("need at least 2 coupling samples per ring size")
        if min(self.times_per_iteration, self.repetitions, self.iterations) < 1:
            raise DomainError("times, repetitions and iterations must be >= 1")

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "j_min": self.j_min,
            "j_max": self.j_max,
            "k_samples": self.k_samples,
            "times_per_iteration": self.times_per_iteration,
            "repetitions": self.repetitions,
            "iterations": self.iterations,
            "seed": self.seed,
            "early_stop_nats": self.early_stop_nats,
        }


@dataclass
class IdentResult:
    n_hat: int
    j_hat: float
    log_likelihood: float
    total_measurements: int
    iterations_run: int
    samples: dict[int, ParamSamples]
    records: list[MeasurementRecord]
    seed: int
    flags: list[str]
    config: IdentifyConfig

    def to_dict(self) -> dict:
        return {
            "n_hat": self.n_hat,
            "j_hat": self.j_hat,
            "log_likelihood": self.log_likelihood,
            "total_measurements": self.total_measurements,
            "iterations_run": self.iterations_run,
            "samples": {
                str(n): {
                    "positions": s.positions.tolist(),
                    "log_likelihoods": s.log_likelihoods.tolist(),
                }
                for n, s in self.samples.items()
            },
            "records": [[r.time, r.repetitions, r.ones] for r in self.records],
            "seed": self.seed,
            "flags": self.flags,
            "config": self.config.to_dict(),
        }


def _hill_climb(
    objective: Callable[[float], float],
    x0: float,
    step: float,
    lo: float,
    hi: float,
) -> tuple[float, float]:
    """Greedy 1-D ascent with halving step; never moves downhill."""
    x, fx = x0, objective(x0)
    while step > HILL_CLIMB_MIN_STEP:
        for cand in (x + step, x - step):
            cand = min(max(cand, lo), hi)
            fc = objective(cand)
            if fc > fx:
                x, fx = cand, fc
                break
        else:
            step /= 2.0
    return x, fx


def identify(experiment: Experiment, config: IdentifyConfig) -> IdentResult:
    """Estimate ring size and coupling from adaptively collected measurements.

    Per iteration: extend the low-discrepancy time sequence by M points,
    query the experiment R times at each, recompute every sample's
    log-likelihood from the full dataset, then resample the coupling
    cloud of each candidate ring size.  Afterwards the best sample picks
    the ring size and hill climbing polishes the coupling.
    """
    cfg = config
    horizon = experiment.horizon
    rng = np.random.default_rng(cfg.seed)
    sizes = range(cfg.n_min, cfg.n_max + 1)
    positions = {n: np.linspace(cfg.j_min, cfg.j_max, cfg.k_samples) for n in sizes}
    records: list[MeasurementRecord] = []
    next_index = 1
    iterations_run = 0

    def evaluate(n: int, pos: np.ndarray) -> ParamSamples:
        ll = np.array([log_likelihood(n, p, records) for p in pos])
        return ParamSamples(n, pos, ll, cfg.j_min, cfg.j_max)

    samples: dict[int, ParamSamples] = {}
    for _ in range(cfg.iterations):
        for t in vdc_times(next_index, cfg.times_per_iteration, horizon):
            ones = experiment.query(float(t), cfg.repetitions)
            records.append(MeasurementRecord(float(t), cfg.repetitions, ones))
        next_index += cfg.times_per_iteration
        iterations_run += 1
        samples = {n: evaluate(n, positions[n]) for n in sizes}
        all_ll = np.concatenate([s.log_likelihoods for s in samples.values()])
        if (
            cfg.early_stop_nats is not None
            and all_ll.max() - np.median(all_ll) > cfg.early_stop_nats
        ):
            break
        for n in sizes:
            positions[n] = resample(samples[n], cfg.k_samples, rng)

    samples = {n: evaluate(n, positions[n]) for n in sizes}
    n_hat = max(sizes, key=lambda n: samples[n].log_likelihoods.max())
    best = samples[n_hat]
    j_start = float(best.positions[best.best_index])
    j_hat, ll_hat = _hill_climb(
        lambda j: log_likelihood(n_hat, j, records),
        j_start,
        (cfg.j_max - cfg.j_min) / cfg.k_samples,
        cfg.j_min,
        cfg.j_max,
    )

    flags = []
    if n_hat in (cfg.n_min, cfg.n_max):
        flags.append("n_hat_at_domain_edge")
    if j_hat in (cfg.j_min, cfg.j_max):
        flags.append("j_hat_at_domain_boundary")

    return IdentResult(
        n_hat=int(n_hat),
        j_hat=float(j_hat),
        log_likelihood=float(ll_hat),
        total_measurements=sum(r.repetitions for r in records),
        iterations_run=iterations_run,
        samples=samples,
        records=records,
        seed=cfg.seed,
        flags=flags,
        config=cfg,
    )


def write_records_csv(records: Iterable[MeasurementRecord], out: TextIO) -> None:
    out.write("t,R,A\n")
    for r in records:
        out.write(f"{r.time:.17g},{r.repetitions},{r.ones}\n")


def read_records_csv(inp: TextIO) -> list[MeasurementRecord]:
    header = inp.readline().strip()
    if header != "t,R,A":
        raise ValueError(f"unexpected header {header!r}")
    out = []
    for line in inp:
        if not line.strip():
            continue
        t, r, a = line.split(",")
        out.append(MeasurementRecord(float(t), int(r), int(a)))
    return out

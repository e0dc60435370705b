"""Spin chain and ring toolkit: single-excitation dynamics, transfer
capacity, switching and bias controls, Lie controllability, and ring
identification from binary measurements."""

from .network import (
    EffectiveHamiltonian,
    NetworkSpec,
    Topology,
    build_network,
    effective_hamiltonian,
    full_space_hamiltonian,
)
from .dynamics import (
    Spectrum,
    max_probability_scan,
    probability_trace,
    propagator,
    spectral_decompose,
    transfer_probability,
)
from .itc import AttainabilityReport, SignPattern, attainability_report, itc_bound, sign_pattern
from .control import (
    BiasVector,
    ControlResult,
    SwitchSchedule,
    bias_objective,
    optimize_bias,
    optimize_switching,
    piecewise_evolve,
    switching_objective,
)
from .lie import LieBasis, lie_closure_dimension, lie_dimension_report
from .ident import (
    Experiment,
    IdentResult,
    IdentifyConfig,
    MeasurementRecord,
    ParamSamples,
    default_horizon,
    identify,
    log_likelihood,
    resample,
    simulate_experiment,
    theta,
    vdc_times,
)

__version__ = "0.1.0"

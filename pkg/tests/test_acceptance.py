"""Acceptance gate: one test per headline criterion, at pinned tolerances.

Each test prints a single [criterion-k] PASS/FAIL line (visible with -s or
on failure); the heavy optimizations reuse the scenario runners shared
with `spinctl reproduce`.
"""

import math
import time

import numpy as np

from spinctl import scenarios
from spinctl.dynamics import (
    max_probability_scan,
    probability_trace,
    spectral_decompose,
)
from spinctl.itc import itc_bound
from spinctl.network import build_network, effective_hamiltonian


def spectrum_of(topology, n, j=1.0, eps=0.0):
    return spectral_decompose(effective_hamiltonian(build_network(topology, n, j, eps)))


def report(k, passed, detail):
    print(f"[criterion-{k}] {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, detail


def test_criterion_1_two_spin_closed_form():
    t0 = time.time()
    spec = spectrum_of("chain", 2)
    t_peak, p_peak = max_probability_scan(spec, 1, 2, horizon=2.0, dt=0.01)
    elapsed = time.time() - t0
    ok = abs(p_peak - 1.0) <= 1e-9 and abs(t_peak - math.pi / 2) <= 1e-6 and elapsed < 1.0
    report(1, ok, f"p_peak={p_peak:.12f}, t_peak={t_peak:.9f}, {elapsed:.2f}s")


def test_criterion_2_ring3_capacity_attained():
    spec = spectrum_of("ring", 3)
    bound = itc_bound(spec, 1, 2)
    _, p_peak = max_probability_scan(spec, 1, 2, horizon=math.pi / 3, dt=1e-4)
    ok = abs(bound - 4 / 9) <= 1e-10 and bound - p_peak <= 1e-6
    report(2, ok, f"bound={bound:.12f}, attained gap={bound - p_peak:.2e}")


def test_criterion_3_chain5_heisenberg_finite_horizon():
    t0 = time.time()
    spec = spectrum_of("chain", 5, eps=1.0)
    bound = itc_bound(spec, 1, 5)
    _, p_peak = max_probability_scan(spec, 1, 5, horizon=1000.0, dt=0.01)
    elapsed = time.time() - t0
    ok = abs(bound - 1.0) <= 1e-6 and abs(p_peak - 0.90) <= 0.05 and elapsed < 30.0
    report(3, ok, f"bound={bound:.9f}, peak_1000={p_peak:.4f}, {elapsed:.1f}s")


def test_criterion_4_ring7_capacity_strictly_below_one():
    spec = spectrum_of("ring", 7, eps=1.0)
    bound = itc_bound(spec, 1, 4)
    probs = probability_trace(spec, 1, 4, np.linspace(0.0, 1000.0, 100_000))
    ok = bound < 1 - 1e-3 and float(probs.max()) <= bound + 1e-9
    report(4, ok, f"bound={bound:.6f}, scan_max={probs.max():.6f}")


def test_criterion_5_lie_dimensions():
    t0 = time.time()
    result = scenarios.lie_dimensions()
    elapsed = time.time() - t0
    ring, chain = result["ring"], result["chain"]
    ok = (
        17 in (ring["dimension"], ring["dimension_with_identity"])
        and max(chain["dimension"], chain["dimension_with_identity"]) >= 48
        and elapsed < 10.0
    )
    report(5, ok, f"ring={ring['dimension']}/{ring['dimension_with_identity']}, "
                  f"chain={chain['dimension']}/{chain['dimension_with_identity']}, {elapsed:.1f}s")


def test_criterion_6_ring7_bias_control():
    t0 = time.time()
    result = scenarios.ring7_bias_fidelity()
    elapsed = time.time() - t0
    f14, f15 = result["fidelity_1_4"], result["fidelity_1_5"]
    ok = f14 >= 0.999 and f15 >= 0.999 and elapsed < 300.0
    report(6, ok, f"f(1->4)={f14:.6f}, f(1->5)={f15:.6f}, {elapsed:.0f}s")


def test_criterion_7_chain7_switching_control():
    t0 = time.time()
    result = scenarios.chain7_switching_fidelity()
    elapsed = time.time() - t0
    ok = result["fidelity"] >= 0.99 and elapsed < 300.0
    report(7, ok, f"fidelity={result['fidelity']:.6f}, {elapsed:.0f}s")


def test_criterion_8_identification_statistics():
    t0 = time.time()
    result = scenarios.ring6_identification()
    elapsed = time.time() - t0
    ok = (
        result["n_correct"] >= 18
        and result["median_j_error"] <= 1e-2
        and result["noiseless_n_hat"] == 6
        and result["noiseless_j_error"] <= 1e-4
        and elapsed < 600.0
    )
    report(8, ok, f"N correct {result['n_correct']}/20, median |J err|={result['median_j_error']:.2e}, "
                  f"noiseless |J err|={result['noiseless_j_error']:.2e}, {elapsed:.0f}s")


def test_criterion_9_numerical_property_suite():
    t0 = time.time()
    result = scenarios.property_suite()
    elapsed = time.time() - t0
    ok = (
        result["unitarity_max_dev"] <= 1e-10
        and result["switch_grad_rel_err"] <= 1e-5
        and result["bias_grad_rel_err"] <= 1e-5
        and result["oracle_max_dev"] <= 1e-8
        and result["theta_max_dev"] <= 1e-12
        and elapsed < 120.0
    )
    report(9, ok, f"unitarity={result['unitarity_max_dev']:.1e}, "
                  f"grads={result['switch_grad_rel_err']:.1e}/{result['bias_grad_rel_err']:.1e}, "
                  f"oracle={result['oracle_max_dev']:.1e}, theta={result['theta_max_dev']:.1e}, {elapsed:.0f}s")


def test_criterion_10_ring_epsilon_invariance():
    result = scenarios.ring_epsilon_invariance()
    report(10, result["max_trace_dev"] <= 1e-10, f"max trace deviation={result['max_trace_dev']:.2e}")

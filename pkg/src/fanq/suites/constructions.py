"""
Named constructions for build, simulate and bench
"""

from typing import Dict, List

import numpy as np

from ..bits import bitstring
from ..gates import (
    CountingParams, build_counting, build_exact_approx, build_or_approx, build_threshold_approx,
    constant_addition, counting_threshold, increment_diagonal,
)
from ..parallelize import (
    fanout_from_parity, mod_q_builder, parallelize_commuting, parity_from_fanout,
    random_commuting_set, rotate_state, rotation_by_hamming_weight, rotation_by_value,
)
from ..qft import (
    CountingPhaseOracle, QftParams, fourier_copies, phase_estimation, qfp, qfp_q_copy, qfs, qfs_q,
    qft_pow2, qft_q, qft_q_ideal,
)
from ..reduction import (
    blocked_or_reduction, exact_logstar, exact_reduce_shifted, iterated_or, iterated_or_exact,
    linear_size_or, or_exact_logstar, or_reduce,
)
from . import iterated_scale, n_log_n, registry


def _n_squared_log_n(n: int, d: int = 1) -> float:
    return n * n_log_n(n)


def _linear(n: int, d: int = 1) -> float:
    return n


# Gates

@registry.construction("or-approx", scale=_n_squared_log_n, n=8)
def _or_approx(n):
    return build_or_approx(n)


@registry.construction("exact-approx", n=4, t=2)
def _exact_approx(n, t):
    return build_exact_approx(n, t)


@registry.construction("threshold-approx", n=3, t=2, mode="approx")
def _threshold_approx(n, t, mode):
    return build_threshold_approx(n, t, mode)


@registry.construction("counting", scale=n_log_n, n=6, qft_mode="exact_small", copies=8)
def _counting(n, qft_mode, copies):
    return build_counting(CountingParams(n, qft_mode, copies))


@registry.construction("counting-threshold", scale=n_log_n, n=5, t=3)
def _counting_threshold(n, t):
    return counting_threshold(n, t)


@registry.construction("increment", m=4)
def _increment(m):
    return increment_diagonal(m)[1]


@registry.construction("constant-addition", m=4, b=3)
def _constant_addition(m, b):
    return constant_addition(m, b)


# Reductions

@registry.construction("or-reduce", scale=n_log_n, n=8)
def _or_reduce(n):
    return or_reduce(n)


@registry.construction("exact-reduce", n=6, t=3)
def _exact_reduce(n, t):
    return exact_reduce_shifted(n, t)


@registry.construction("or-logstar", scale=n_log_n, n=10)
def _or_logstar(n):
    return or_exact_logstar(n)


@registry.construction("exact-logstar", scale=n_log_n, n=6, t=3)
def _exact_logstar(n, t):
    return exact_logstar(n, t)


@registry.construction("blocked-or", scale=iterated_scale, n=16, tail="approx", runs=2)
def _blocked_or(n, tail, runs):
    return blocked_or_reduction(n, tail, runs)


@registry.construction("iterated-or", scale=iterated_scale, n=64, d=2, tail="approx")
def _iterated_or(n, d, tail):
    return iterated_or(n, d, tail)


@registry.construction("iterated-or-exact", scale=iterated_scale, n=64, d=2)
def _iterated_or_exact(n, d):
    return iterated_or_exact(n, d)


@registry.construction("linear-size-or", scale=_linear, n=64)
def _linear_size_or(n):
    return linear_size_or(n)


# Parallelisation

@registry.construction("parity-from-fanout", n=4)
def _parity_from_fanout(n):
    return parity_from_fanout(n)


@registry.construction("fanout-from-parity", n=4)
def _fanout_from_parity(n):
    return fanout_from_parity(n)


@registry.construction("parallelize", n=3, k=1, seed=0)
def _parallelize(n, k, seed):
    return parallelize_commuting(random_commuting_set(n, k, seed))


@registry.construction("mod-q", scale=_linear, n=3, q=3)
def _mod_q(n, q):
    return mod_q_builder(n, q)


@registry.construction("rotation-weight", n=4, phi=0.5)
def _rotation_weight(n, phi):
    return rotation_by_hamming_weight(n, phi)


@registry.construction("rotation-value", n=4, phi=0.5)
def _rotation_value(n, phi):
    return rotation_by_value(n, phi)


@registry.construction("rotate-state", n=4, phi=0.5)
def _rotate_state(n, phi):
    return rotate_state(n, phi)


# Fourier

@registry.construction("qfs", n=3)
def _qfs(n):
    return qfs(n)


@registry.construction("copy", n=3, m=3)
def _copy(n, m):
    return fourier_copies(n, m)


@registry.construction("qft-pow2", n=3, m=4, qfp_mode="coherent")
def _qft_pow2(n, m, qfp_mode):
    return qft_pow2(n, m, qfp_mode)


@registry.construction("qfs-q", q=5)
def _qfs_q(q):
    return qfs_q(QftParams(q))


@registry.construction("qfp-q", q=5)
def _qfp_q(q):
    return qfp_q_copy(QftParams(q))


@registry.construction("qft-q", q=3, copies=3)
def _qft_q(q, copies):
    return qft_q(QftParams(q), copies)


@registry.construction("qft-q-ideal", q=5, copies=2)
def _qft_q_ideal(q, copies):
    return qft_q_ideal(QftParams(q), copies)


# Sampling procedures

def _rate_rows(n: int, hits: Dict[int, int], trials: Dict[int, int], extra=None) -> List[Dict]:
    rows = []
    for x in sorted(trials):
        row = {"x": bitstring(x, n), "trials": trials[x], "successes": hits[x],
               "rate": round(hits[x] / trials[x], 6)}
        rows.append({**row, **(extra or {})})
    total = sum(trials.values())
    rows.append({"x": "all", "trials": total, "successes": sum(hits.values()),
                 "rate": round(sum(hits.values()) / total, 6), **(extra or {})})
    return rows


@registry.procedure("qfp", n=3, m=8, mode="collapse")
def _qfp(seed, shots, simulator, n, m, mode):
    """Seeded QFP trials cycling over every x"""
    procedure = qfp(n, m, mode)
    rng = np.random.default_rng(seed)
    register = procedure.circuit.register("out")
    hits, trials = {}, {}
    states = {}
    for trial in range(shots):
        x = trial % (1 << n)
        if x not in states:
            states[x] = simulator.run(procedure.circuit, {"x": x})
        outcome = procedure.run(states[x], register, rng)
        trials[x] = trials.get(x, 0) + 1
        hits[x] = hits.get(x, 0) + int(outcome.estimate == x and not outcome.flagged)
    return _rate_rows(n, hits, trials)


@registry.procedure("phase-estimation", n=3, m=8)
def _phase_estimation(seed, shots, simulator, n, m):
    rng = np.random.default_rng(seed)
    hits, trials = {}, {}
    calls = 0
    for trial in range(shots):
        x = trial % (1 << n)
        oracle = CountingPhaseOracle(x, n)
        result = phase_estimation(oracle, n, m=m, rng=rng, simulator=simulator)
        calls = max(calls, result.calls)
        trials[x] = trials.get(x, 0) + 1
        hits[x] = hits.get(x, 0) + int(result.estimate == x and not result.flagged)
    return _rate_rows(n, hits, trials, {"queries": calls})

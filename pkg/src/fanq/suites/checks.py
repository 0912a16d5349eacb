"""
Verification suites
Each suite rebuilds the constructions it covers, simulates them at the sizes the simulator
affords and compares against analytic values; stats audits run at larger sizes without simulation
"""

import itertools
import math
from typing import Callable, Dict, List, Sequence

import numpy as np
from scipy.stats import unitary_group

from ..bits import popcount, read_register
from ..circuit import CircuitBuilder, ControlledOneQubit, QubitRole, Unitary2, stats
from ..classical import (
    And2, ClassicalBuilder, anf, anf_from_truth_table, degree_bound_check, evaluate, or_tree,
    per_repetition_failure, random_circuit, randomized_or, randomized_or_failure,
)
from ..gates import (
    CountingParams, analytic_or_failure, build_counting, build_exact_approx, build_or_approx,
    build_threshold_approx, constant_addition, counting_exact, counting_threshold,
    increment_diagonal, max_or_failure, threshold_error_bound,
)
from ..oracles import permutation
from ..parallelize import (
    approx_rotation_fixed_basis, controlled_u_circuit, direct_fanout, direct_parity,
    expected_parallel_stats, fanout_from_parity, mod_q_builder, parallelize_commuting,
    parity_from_fanout, random_commuting_set, rotate_state, rotation_by_hamming_weight,
    rotation_by_value, sequential_product,
)
from ..qft import (
    BIT_BASIS, PARITY_BASIS, CountingPhaseOracle, QfpSymbol, QftParams, estimate_distribution,
    fourier_copies, fourier_state, phase_estimation, pipeline_fidelity, qfp_decode,
    qfp_success_rate, qfs, qft_pow2, qft_pow2_fidelity, qft_q_fidelity, qft_q_ideal, qft_q_joint_fidelity,
    w_norm,
)
from ..qft.decode import symbol_phase
from ..reduction import (
    blocked_or_failures, blocked_or_reduction, dyadic_decompose, exact_logstar,
    exact_reduce_shifted, iterated_or, linear_size_or, log_star, or_exact_logstar, or_reduce,
)
from ..simulator import (
    Simulator, basis_probability, fidelity, marginal_probability, outcome_distribution, product_state,
    register_distribution,
    register_fidelity, unitary_distance,
)
from ..simulator.reversible import inputs_for, read, run_reversible
from . import Check, check, iterated_scale, n_log_n, registry

EXACT = 1e-9


def _worst(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


def _ratios(build: Callable[[int], object], ns: Sequence[int], scale: Callable[[int], float]) -> List[float]:
    return [stats(build(n)).size / scale(n) for n in ns]


def _bounded_ratio(check_id: str, ratios: Sequence[float], factor: float = 2.0) -> Check:
    """size / scale never exceeds factor times its value at the smallest size"""
    return check(check_id, max(ratios), factor * ratios[0], tolerance=0.0, relation="le")


# Fan-out and parity

@registry.suite("fanout-parity", "parity and fan-out are Hadamard conjugates of each other")
def fanout_parity(seed: int) -> List[Check]:
    checks = []
    for n in range(1, 5):
        checks.append(check(f"parity_from_fanout/n={n}",
                            unitary_distance(parity_from_fanout(n), direct_parity(n)), 0.0, EXACT))
        checks.append(check(f"fanout_from_parity/n={n}",
                            unitary_distance(fanout_from_parity(n), direct_fanout(n)), 0.0, EXACT))
    return checks


# Parallelisation

def _controlled_reference(u: Unitary2):
    b = CircuitBuilder()
    (c,) = b.register("control", 1, QubitRole.INPUT)
    (t,) = b.register("target", 1, QubitRole.INPUT)
    b.append(ControlledOneQubit(u, c, t))
    return b.build()


@registry.suite("parallelize", "commuting gates parallelize exactly, with the predicted stats")
def parallelize(seed: int) -> List[Check]:
    checks = []
    rng = np.random.default_rng(seed)
    for trial in range(5):
        u = Unitary2.from_matrix(unitary_group.rvs(2, random_state=rng))
        distance = unitary_distance(controlled_u_circuit(u), _controlled_reference(u))
        checks.append(check(f"controlled_u/{trial}", distance, 0.0, EXACT))

    for trial in range(6):
        n, k = 2 + trial % 3, 1 + trial % 2
        gate_set = random_commuting_set(n, k, seed + trial)
        circuit = parallelize_commuting(gate_set)
        tag = f"commuting/{trial}/n={n},k={k}"
        checks.append(check(f"{tag}/unitary", unitary_distance(circuit, sequential_product(gate_set)), 0.0, EXACT))
        measured, expected = stats(circuit), expected_parallel_stats(gate_set)
        for key, value in measured.as_dict().items():
            checks.append(check(f"{tag}/{key}", value, expected.as_dict()[key], relation="eq"))

    sim = Simulator()
    for n, q in ((3, 3), (4, 3), (3, 5)):
        circuit = mod_q_builder(n, q)
        target = circuit.register("target")
        worst = 0.0
        for x in range(1 << n):
            state = sim.run(circuit, {"x": x})
            worst = max(worst, 1 - register_distribution(state, target)[bin(x).count("1") % q])
        checks.append(check(f"mod_q/n={n},q={q}", worst, 0.0, EXACT))
    return checks


# Rotations

def _diagonal_error(circuit, phases: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
    u = Simulator().unitary(circuit)
    n = circuit.qubit_count
    idx = np.arange(1 << n, dtype=np.int64)
    x = read_register(idx, circuit.register("x"), n)
    t = read_register(idx, circuit.register("target"), n)
    return float(np.max(np.abs(u - np.diag(np.exp(1j * phases(x, t))))))


@registry.suite("rotations", "rotations by Hamming weight and by value act as specified in constant depth")
def rotations(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    angles = [2 * math.pi * (j + 1) / 9 for j in range(8)]
    for n in range(1, 9):
        worst = 0.0
        for phi in angles:
            circuit = rotate_state(n, phi)
            result = sim.sweep(circuit, "x")
            (target,) = circuit.register("target")
            for x in range(1 << n):
                expected = (1 - math.cos(phi * bin(x).count("1"))) / 2
                worst = max(worst, abs(marginal_probability(result.state(x), target, 1) - expected))
        checks.append(check(f"rotate_state/n={n}", worst, 0.0, EXACT))
    depths = {stats(rotate_state(n, 1.0)).depth for n in range(1, 17)}
    checks.append(check("rotate_state/constant_depth", len(depths), 1, relation="eq"))

    phi = angles[2]
    checks.append(check("rotation_by_hamming_weight/diagonal", _diagonal_error(
        rotation_by_hamming_weight(3, phi), lambda x, t: phi * popcount(x) * t), 0.0, EXACT))
    checks.append(check("rotation_by_value/diagonal", _diagonal_error(
        rotation_by_value(3, phi), lambda x, t: phi * x * t), 0.0, EXACT))

    for target in (0.3, 1.0, 2.5):
        found = approx_rotation_fixed_basis(target, 1e-2)
        error = abs((found.angle - target + math.pi) % (2 * math.pi) - math.pi)
        checks.append(check(f"fixed_basis/phi={target}", error, 1e-2, tolerance=EXACT, relation="le"))
    return checks


# Approximate Or, exact[t] and threshold[t]

@registry.suite("or-approx", "one-sided approximate Or matches the Poisson-binomial law")
def or_approx(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for n in range(2, 6):
        circuit = build_or_approx(n)
        result = sim.sweep(circuit, "x")
        (out,) = circuit.register("out")
        p0 = [marginal_probability(result.state(x), out, 0) for x in range(1 << n)]
        checks.append(check(f"n={n}/zero_input", p0[0], 1.0, EXACT))
        worst = _worst(abs(p0[x] - analytic_or_failure(n, bin(x).count("1"))) for x in range(1, 1 << n))
        checks.append(check(f"n={n}/analytic", worst, 0.0, EXACT))
    bound = 4 * max_or_failure(4)
    for n in (4, 8, 16, 32, 64):
        checks.append(check(f"failure_trend/n={n}", max_or_failure(n), bound / n, tolerance=EXACT, relation="le"))
    return checks


@registry.suite("exact", "exact[t] fires surely at weight t and falsely with the analytic probability")
def exact(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    n = 4
    for t in range(n + 1):
        circuit = build_exact_approx(n, t)
        result = sim.sweep(circuit, "x")
        (out,) = circuit.register("out")
        worst = 0.0
        for x in range(1 << n):
            w = bin(x).count("1")
            expected = 1.0 if w == t else analytic_or_failure(n, w - t)
            worst = max(worst, abs(marginal_probability(result.state(x), out, 1) - expected))
        checks.append(check(f"n={n},t={t}", worst, 0.0, EXACT))
    return checks


def _sample_outcomes(state, qubits, shots: int, rng) -> Dict[str, int]:
    """Shot counts per outcome bitstring of the given qubits"""
    distribution = outcome_distribution(state, qubits)
    outcomes = sorted(distribution.probabilities)
    p = np.array([distribution[o] for o in outcomes])
    counts = rng.multinomial(shots, p / p.sum())
    return {o: int(c) for o, c in zip(outcomes, counts)}


@registry.suite("threshold", "threshold[t] is exact with ideal sub-circuits and within its bound otherwise")
def threshold(seed: int) -> List[Check]:
    checks = []
    for n in range(1, 7):
        for t in range(n + 1):
            circuit = build_threshold_approx(n, t, "ideal")
            inputs = inputs_for(circuit, "x", range(1 << n))
            outputs = run_reversible(circuit, inputs)
            x = read(outputs, circuit, "x")
            expected = inputs.copy()
            (out,) = circuit.register("out")
            expected |= (popcount(x) >= t).astype(np.int64) << (circuit.qubit_count - 1 - out)
            wrong = int(np.count_nonzero(outputs != expected))
            checks.append(check(f"ideal/n={n},t={t}", wrong, 0, relation="eq"))

    n, t = 3, 2
    circuit = build_threshold_approx(n, t, "approx")
    result = Simulator().sweep(circuit, "x")
    (out,) = circuit.register("out")
    bounds = [threshold_error_bound(n, t, bin(x).count("1")) for x in range(1 << n)]
    wrong = [marginal_probability(result.state(x), out, int(bin(x).count("1") < t)) for x in range(1 << n)]
    checks.append(check(f"approx/n={n},t={t}/union_bound",
                        _worst(w - b for w, b in zip(wrong, bounds)), 0.0, tolerance=EXACT, relation="le"))
    rng = np.random.default_rng(seed)
    shots = 10_000
    per_input = shots // (1 << n)
    errors = 0
    for x in range(1 << n):
        counts = _sample_outcomes(result.state(x), [out], per_input, rng)
        errors += counts.get(str(int(bin(x).count("1") < t)), 0)
    empirical = errors / (per_input * (1 << n))
    checks.append(check(f"approx/n={n},t={t}/sampled", empirical, 3 * float(np.mean(bounds)),
                        tolerance=0.0, relation="le"))
    return checks


# Exact reductions

@registry.suite("or-reduction", "Or-reduction outputs zero exactly on x = 0 and flags qubit a otherwise")
def or_reduction(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    cases = [(n, 0) for n in range(1, 11)] + [(6, 3), (5, 1)]
    for n, t in cases:
        circuit = exact_reduce_shifted(n, t) if t else or_reduce(n)
        result = sim.sweep(circuit, "x")
        y = circuit.register("y")
        worst = 0.0
        for x in range(1 << n):
            state = result.state(x)
            shift = bin(x).count("1") - t
            if shift == 0:
                worst = max(worst, 1 - register_distribution(state, y)[0])
            else:
                a = dyadic_decompose(abs(shift)).a
                worst = max(worst, register_distribution(state, y)[0], 1 - marginal_probability(state, y[a], 1))
        checks.append(check(f"n={n},t={t}", worst, 0.0, EXACT))
    return checks


def _clean_output_error(circuit, expected: Callable[[int], int], sim: Simulator) -> float:
    """1 - P[out holds expected(x) and every ancilla is back to 0], worst over x"""
    result = sim.sweep(circuit, "x")
    watched = circuit.register("out") + circuit.ancillas
    worst = 0.0
    for x in range(len(result)):
        worst = max(worst, 1 - register_distribution(result.state(x), watched)[expected(x)])
    return worst


@registry.suite("logstar", "exact Or in log-star rounds, clean ancillas and n log n size")
def logstar(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for n in (1, 2, 3, 4, 7, 10):
        circuit = or_exact_logstar(n)
        checks.append(check(f"or/n={n}", _clean_output_error(circuit, lambda x: int(x != 0), sim), 0.0, EXACT))
        stages = sum(1 for name, _ in circuit.registers if name.startswith("r") and name.endswith("_y"))
        checks.append(check(f"rounds/n={n}", stages, log_star(n), relation="eq"))
    for t in range(6):
        circuit = exact_logstar(5, t)
        error = _clean_output_error(circuit, lambda x: int(bin(x).count("1") == t), sim)
        checks.append(check(f"exact/n=5,t={t}", error, 0.0, EXACT))
    ratios = _ratios(or_exact_logstar, [1 << k for k in range(4, 15, 2)], n_log_n)
    checks.append(_bounded_ratio("size_over_n_log_n", ratios))
    return checks


@registry.suite("size-reduced", "blocked, iterated and linear-size Or circuits: error and size audits")
def size_reduced(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    circuit = blocked_or_reduction(4, runs=1)
    result = sim.sweep(circuit, "x")
    (out,) = circuit.register("out")
    failures = blocked_or_failures(4, runs=1, simulator=sim)
    worst = _worst(abs(marginal_probability(result.state(x), out, 0) - failures[x]) for x in range(16))
    checks.append(check("blocked/n=4/factorized", worst, 0.0, EXACT))

    failures = blocked_or_failures(9, simulator=sim)
    checks.append(check("blocked/n=9/zero_input", float(failures[0]), 1.0, EXACT))
    checks.append(check("blocked/n=9/one_sided", float(np.max(failures[1:])), 1 / 9, tolerance=EXACT, relation="le"))

    ns = [1 << k for k in range(4, 17, 2)]
    for d in (1, 2, 3):
        ratios = _ratios(lambda n, d=d: iterated_or(n, d), ns, lambda n, d=d: iterated_scale(n, d))
        checks.append(_bounded_ratio(f"iterated/d={d}/size_ratio", ratios))
    ratios = _ratios(linear_size_or, ns, lambda n: n)
    checks.append(_bounded_ratio("linear/size_over_n", ratios))
    for n in (1, 3, 5, 9):
        error = _clean_output_error(linear_size_or(n), lambda x: int(x != 0), sim)
        checks.append(check(f"linear/n={n}/exact", error, 0.0, EXACT))
    return checks


# Increment and counting

@registry.suite("increment", "the increment is a constant-depth diagonal between QFTs")
def increment(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for m in range(1, 7):
        diagonal, circuit = increment_diagonal(m)
        checks.append(check(f"m={m}/diagonal_depth", stats(diagonal).depth, 1, relation="eq"))
        r = circuit.register("r")
        worst = _worst(1 - register_distribution(sim.run(circuit, {"r": x}), r)[(x + 1) % (1 << m)]
                       for x in range(1 << m))
        checks.append(check(f"m={m}/increment", worst, 0.0, EXACT))
    rng = np.random.default_rng(seed)
    for trial in range(10):
        m = int(rng.integers(2, 7))
        b, x = int(rng.integers(1 << m)), int(rng.integers(1 << m))
        circuit = constant_addition(m, b)
        p = register_distribution(sim.run(circuit, {"r": x}), circuit.register("r"))[(x + b) % (1 << m)]
        checks.append(check(f"addition/{trial}/m={m},b={b},x={x}", p, 1.0, EXACT))
    return checks


@registry.suite("counting", "counting writes |x|; threshold and exact read-outs; n log n size")
def counting(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for n in range(1, 7):
        circuit = build_counting(CountingParams(n))
        result = sim.sweep(circuit, "x")
        counter = circuit.register("counter")
        worst = _worst(1 - register_distribution(result.state(x), counter)[bin(x).count("1")]
                       for x in range(1 << n))
        checks.append(check(f"exact_small/n={n}", worst, 0.0, EXACT))
    for n in range(1, 6):
        for t in range(n + 1):
            error = _clean_output_error(counting_threshold(n, t), lambda x: int(bin(x).count("1") >= t), sim)
            checks.append(check(f"threshold/n={n},t={t}", error, 0.0, EXACT))
            error = _clean_output_error(counting_exact(n, t), lambda x: int(bin(x).count("1") == t), sim)
            checks.append(check(f"exact/n={n},t={t}", error, 0.0, EXACT))

    params = CountingParams(3, "constant_depth_approx", copies=8)
    circuit = build_counting(params)
    result = sim.sweep(circuit, "x")
    count = circuit.register("count")
    for x in range(8):
        w = bin(x).count("1")
        p = register_distribution(result.state(x), count)[w]
        floor = qft_pow2_fidelity(params.m, params.copies, w) ** 2
        checks.append(check(f"constant_depth_approx/x={x}", p, floor, tolerance=EXACT, relation="ge"))

    ratios = _ratios(lambda n: build_counting(CountingParams(n)), [1 << k for k in range(4, 15, 2)], n_log_n)
    checks.append(_bounded_ratio("size_over_n_log_n", ratios))
    return checks


# Fourier states

@registry.suite("qfs", "QFS prepares Phi_x exactly")
def qfs_suite(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for n in range(1, 7):
        circuit = qfs(n)
        result = sim.sweep(circuit, "x")
        out = circuit.register("out")
        worst = _worst(1 - register_fidelity(result.state(x), out, fourier_state(x, 1 << n, n))
                       for x in range(1 << n))
        checks.append(check(f"n={n}", worst, 0.0, EXACT))
    return checks


def _inverse_adder(n: int):
    b = CircuitBuilder()
    a = b.register("a", n, QubitRole.INPUT)
    t = b.register("b", n, QubitRole.INPUT)
    b.append(permutation("add_mod", (a, t), q=1 << n).adjoint())
    return b.build()


@registry.suite("copy", "inverse addition maps Phi_x, Phi_y to Phi_{x+y}, Phi_y and copies Fourier states")
def copy(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for n in range(1, 4):
        q = 1 << n
        circuit = _inverse_adder(n)
        worst = 0.0
        for x, y in itertools.product(range(q), repeat=2):
            start = product_state(circuit, {"a": fourier_state(x, q, n), "b": fourier_state(y, q, n)})
            expected = product_state(circuit, {"a": fourier_state((x + y) % q, q, n), "b": fourier_state(y, q, n)})
            worst = max(worst, 1 - fidelity(sim.run(circuit, start), expected))
        checks.append(check(f"identity/n={n}", worst, 0.0, EXACT))

    n, m = 2, 3
    circuit = fourier_copies(n, m)
    result = sim.sweep(circuit, "x")
    names = ["out"] + [f"copy{c}" for c in range(1, m)]
    worst = _worst(1 - register_fidelity(result.state(x), circuit.register(name), fourier_state(x, 1 << n, n))
                   for x in range(1 << n) for name in names)
    checks.append(check(f"copies/n={n},m={m}", worst, 0.0, EXACT))
    return checks


def _reference_decode(symbols: Sequence[QfpSymbol]) -> str:
    bits = []
    previous = 0
    for symbol in reversed(symbols):
        if symbol is QfpSymbol.ZERO:
            bit = 0
        elif symbol is QfpSymbol.ONE:
            bit = 1
        elif symbol is QfpSymbol.P:
            bit = previous
        else:
            bit = 1 - previous
        bits.append(bit)
        previous = bit
    return "".join(str(b) for b in reversed(bits))


@registry.suite("qfp", "decoder agrees with bit-by-bit decoding; QFP succeeds with high probability")
def qfp_suite(seed: int) -> List[Check]:
    checks = []
    alphabet = (QfpSymbol.ZERO, QfpSymbol.ONE, QfpSymbol.P, QfpSymbol.N)
    for n in range(1, 7):
        mismatches = sum(qfp_decode(s) != _reference_decode(s) for s in itertools.product(alphabet, repeat=n))
        checks.append(check(f"decoder/n={n}", mismatches, 0, relation="eq"))

    sim = Simulator()
    for n in range(1, 5):
        circuit = qfs(n)
        result = sim.sweep(circuit, "x")
        out = circuit.register("out")
        best, model = 1.0, 0.0
        for x in range(1 << n):
            state = result.state(x)
            for i in range(n):
                qubit = out[n - 1 - i]
                p_bit = basis_probability(state, qubit, BIT_BASIS, 0)
                p_parity = basis_probability(state, qubit, PARITY_BASIS, 0)
                best = min(best, max(p_bit, 1 - p_bit, p_parity, 1 - p_parity))
                model = max(model, abs(p_bit - (1 + math.sin(symbol_phase(x, n, i))) / 2))
        checks.append(check(f"per_measurement/n={n}", best, 0.75, tolerance=EXACT, relation="ge"))
        checks.append(check(f"bit_basis_model/n={n}", model, 0.0, EXACT))

    rate = qfp_success_rate(3, 8, trials=2000, seed=seed)
    checks.append(check("success/n=3,m=8", rate, 0.9, tolerance=0.0, relation="ge"))
    return checks


@registry.suite("qft-pow2", "constant-depth QFT: exact with ideal estimation, high fidelity otherwise")
def qft_pow2_suite(seed: int) -> List[Check]:
    checks = []
    sim = Simulator()
    for n in range(1, 5):
        circuit = qft_pow2(n, 2, "ideal")
        out, x_reg = circuit.register("out"), circuit.register("x")
        worst = 0.0
        for x in range(1 << n):
            state = sim.run(circuit, {"x": x})
            worst = max(worst, 1 - register_fidelity(state, out, fourier_state(x, 1 << n, n)),
                        1 - register_distribution(state, x_reg)[0])
        checks.append(check(f"ideal/n={n}", worst, 0.0, EXACT))

    average = float(np.mean([qft_pow2_fidelity(3, 8, x) for x in range(8)]))
    checks.append(check("coherent/n=3,m=8/average", average, 0.9, tolerance=0.0, relation="ge"))

    n, m = 2, 2
    circuit = qft_pow2(n, m, "coherent")
    worst = 0.0
    for x in range(1 << n):
        state = sim.run(circuit, {"x": x})
        target = product_state(circuit, {"out": fourier_state(x, 1 << n, n)})
        worst = max(worst, abs(fidelity(state, target) - qft_pow2_fidelity(n, m, x)))
    checks.append(check(f"coherent/n={n},m={m}/simulated", worst, 0.0, EXACT))
    return checks


@registry.suite("modular", "QFT modulo q: neglected branch, per-copy estimates and the pipeline")
def modular(seed: int) -> List[Check]:
    checks = []
    for q in (3, 5, 6, 7):
        params = QftParams(q)
        measured = w_norm(params)
        checks.append(check(f"w_norm/q={q}", measured, params.neglected_norm, EXACT))
        checks.append(check(f"w_norm_bound/q={q}", measured, 2.0 ** -params.n, tolerance=EXACT, relation="le"))

    table = estimate_distribution(QftParams(5))
    checks.append(check("per_copy/q=5", float(min(table[x, x] for x in range(5))), 0.5,
                        tolerance=0.0, relation="ge"))

    for q in (3, 5):
        params = QftParams(q)
        worst = min(qft_q_fidelity(params, x) for x in range(q))
        checks.append(check(f"pipeline/q={q}", worst, 0.85, tolerance=0.0, relation="ge"))
        circuit = qft_q_ideal(params)
        ideal = min(pipeline_fidelity(circuit, x, q) for x in range(q))
        checks.append(check(f"idealized/q={q}", ideal, 1.0, EXACT))

    for m in (1, 3):
        params = QftParams(2, copies=m)
        worst = max(abs(qft_q_joint_fidelity(params, x) - qft_q_fidelity(params, x)) for x in range(2))
        checks.append(check(f"composed/q=2,copies={m}", worst, 0.0, EXACT))
    return checks


@registry.suite("phase-estimation", "phase estimation recovers x from m n oracle queries")
def phase_estimation_suite(seed: int) -> List[Check]:
    n, m, trials = 3, 8, 500
    rng = np.random.default_rng(seed)
    sim = Simulator()
    hits = 0
    calls = set()
    for trial in range(trials):
        x = trial % (1 << n)
        result = phase_estimation(CountingPhaseOracle(x, n), n, m=m, rng=rng, simulator=sim)
        hits += result.estimate == x and not result.flagged
        calls.add(result.calls)
    return [
        check("success/n=3,m=8", hits / trials, 0.9, tolerance=0.0, relation="ge"),
        check("queries", sorted(calls), [m * n], relation="eq"),
    ]


# Classical baselines

def _symmetric_degree(values: Sequence[int], n: int) -> int:
    """ANF degree of a symmetric function from its value on each weight: the coefficient of a
    degree-d monomial is sum_j C(d, j) f(j) mod 2"""
    return max([-1] + [d for d in range(n + 1) if sum(math.comb(d, j) * values[j] for j in range(d + 1)) % 2])


@registry.suite("appendix", "classical ANF degree bounds and the randomized Or")
def appendix(seed: int) -> List[Check]:
    checks = []
    rng = np.random.default_rng(seed)
    mismatches = 0
    for trial in range(24):
        n = 4 + trial % 9
        circuit = random_circuit(n, 3, rng)
        mismatches += int(np.any(anf(circuit).truth_table(n) != evaluate(circuit)))
    checks.append(check("anf/truth_table", mismatches, 0, relation="eq"))

    violations = 0
    for trial in range(1000):
        circuit = random_circuit(1 + trial % 6, 1 + trial % 6, rng)
        violations += not degree_bound_check(circuit)
    checks.append(check("anf/degree_bound", violations, 0, relation="eq"))

    for n in range(1, 13):
        table = evaluate(or_tree(n))
        checks.append(check(f"or_degree/n={n}", anf_from_truth_table(table, n).degree, n, relation="eq"))
    for n in (6, 12):
        weights = popcount(np.arange(1 << n))
        for t in range(n + 1):
            for name, values in (("exact", [int(j == t) for j in range(n + 1)]),
                                 ("threshold", [int(j >= t) for j in range(n + 1)])):
                table = np.asarray(values, dtype=np.int64)[weights]
                checks.append(check(f"{name}_degree/n={n},t={t}", anf_from_truth_table(table, n).degree,
                                    _symmetric_degree(values, n), relation="eq"))

    b = ClassicalBuilder(2)
    b.layer([And2(0, 1)])
    checks.append(check("and/degree", anf(b.build()).degree, 2, relation="eq"))

    for n in (1, 4, 8, 12):
        rates = sorted({float(per_repetition_failure(n, x)) for x in range(1, 1 << n)})
        checks.append(check(f"randomized/n={n}/per_repetition", rates, [0.5], relation="eq"))
        r = max(1, math.ceil(math.log2(n)))
        failure = randomized_or_failure(n, r)
        checks.append(check(f"randomized/n={n}/exact_failure", float(failure), 2.0 ** -r, relation="eq"))
        checks.append(check(f"randomized/n={n}/amplified", float(failure), 1 / n, tolerance=EXACT, relation="le"))
        sampled = randomized_or(n, r, rng)
        checks.append(check(f"randomized/n={n}/zero_input", int(evaluate(sampled.circuit, 0)[0]), 0, relation="eq"))
    return checks


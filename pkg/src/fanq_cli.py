#!/usr/bin/env python3
"""
fanq CLI
Build, simulate, verify and benchmark constant-depth fan-out circuits
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from fanq import __version__
from fanq.bits import bitstring, parse_bitstring
from fanq.circuit import Circuit, QubitRole, expand_macros, stats
from fanq.circuit.codec import deserialize, serialize
from fanq.config import get_settings
from fanq.errors import FanqError
from fanq.simulator import Simulator, outcome_distribution, register_distribution
from fanq.suites import (
    bench_rows, build_construction, coerce_params, parse_params, registry, run_suite,
)

LOG_FORMAT = "[%(name)s] %(levelname)s: %(message)s"

logger = logging.getLogger("fanq.cli")


def fail(message: str, usage: str = None):
    print(f"Error: {message}", file=sys.stderr)
    if usage:
        print(f"Usage: {usage}", file=sys.stderr)
    sys.exit(1)


def write_rows(rows: List[Dict[str, Any]], fmt: str, stream=None):
    """Rows as CSV (one header, union of keys in first-seen order) or as a JSON list"""
    stream = stream or sys.stdout
    if fmt == "json":
        json.dump(rows, stream, indent=2)
        stream.write("\n")
        return
    fields: List[str] = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    writer = csv.DictWriter(stream, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def parse_range(text: str, geometric: bool) -> List[int]:
    """'a..b' (doubling when geometric, else step 1) or a comma list"""
    if ".." in text:
        low, _, high = text.partition("..")
        low, high = int(low), int(high)
        if low < 1 or high < low:
            raise ValueError(f"bad range {text!r}")
        values = []
        value = low
        while value <= high:
            values.append(value)
            value = value * 2 if geometric else value + 1
        return values
    return [int(part) for part in text.split(",") if part.strip()]


def load_circuit(target: str, params: Dict[str, str]) -> Circuit:
    """A registered construction, or a circuit document when target names a file"""
    path = Path(target)
    if path.suffix == ".json" or path.is_file():
        if params:
            raise ValueError("parameters apply to named constructions, not circuit files")
        try:
            return deserialize(path.read_text())
        except FileNotFoundError:
            fail(f"File not found: {target}")
    return build_construction(target, params)


def make_simulator(args) -> Simulator:
    settings = get_settings()
    if args.qubit_budget is not None:
        settings = settings.replace(qubit_budget=args.qubit_budget)
    return Simulator(settings)


def input_register(circuit: Circuit) -> str:
    """The register named x, else the first register made of input qubits"""
    names = [name for name, _ in circuit.registers]
    if "x" in names:
        return "x"
    for name, qubits in circuit.registers:
        if qubits and all(circuit.roles[q] is QubitRole.INPUT for q in qubits):
            return name
    raise ValueError("circuit has no input register")


def output_registers(circuit: Circuit) -> List[str]:
    outputs = [name for name, qubits in circuit.registers
               if qubits and all(circuit.roles[q] is QubitRole.OUTPUT for q in qubits)]
    if outputs:
        return outputs
    # in-place circuits report their input register
    return [input_register(circuit)]


def build_command(args, params: Dict[str, str]):
    circuit = build_construction(args.target, params)
    if args.expand:
        circuit = expand_macros(circuit)
    if args.out:
        Path(args.out).write_text(serialize(circuit, indent=2))
        logger.info("wrote %s to %s", args.target, args.out)
    else:
        logger.info("no --out given, circuit not written")
    row = {"construction": args.target, "qubits": circuit.qubit_count, **stats(circuit).as_dict()}
    write_rows([row], args.format)


def simulate_command(args, params: Dict[str, str]):
    simulator = make_simulator(args)
    registry.load_builtins()
    if args.target in registry.procedures:
        procedure = registry.procedures[args.target]
        values = coerce_params(procedure.defaults, params)
        shots = args.shots or 1000
        logger.info("running %s with %s, %d shots", args.target, values, shots)
        write_rows(procedure.run(args.seed, shots, simulator, **values), args.format)
        return

    circuit = load_circuit(args.target, params)
    if args.expand:
        circuit = expand_macros(circuit)
    name = input_register(circuit)
    width = len(circuit.register(name))
    if args.input == "all":
        values = list(range(1 << width))
    else:
        text = args.input if args.input is not None else "0" * width
        if len(text) != width:
            raise ValueError(f"input {text!r} has {len(text)} bits, register {name} has {width}")
        values = [parse_bitstring(text)]

    outputs = output_registers(circuit)
    rng = np.random.default_rng(args.seed)
    rows = []
    for value in values:
        state = simulator.run(circuit, {name: value})
        label = bitstring(value, width)
        if args.shots:
            qubits = [q for reg in outputs for q in circuit.register(reg)]
            distribution = outcome_distribution(state, qubits)
            outcomes = sorted(distribution.probabilities)
            p = np.array([distribution[o] for o in outcomes])
            counts = rng.multinomial(args.shots, p / p.sum())
            for outcome, count in zip(outcomes, counts):
                if count:
                    rows.append({"input": label, "outcome": outcome, "count": int(count)})
            continue
        for reg in outputs:
            qubits = circuit.register(reg)
            for v, p in enumerate(register_distribution(state, qubits)):
                if p > simulator.settings.tolerance:
                    rows.append({"input": label, "register": reg, "value": bitstring(v, len(qubits)),
                                 "probability": round(float(p), 12)})
    write_rows(rows, args.format)


def verify_command(args):
    names = registry.suite_names() if args.target == "all" else [args.target]
    rows = []
    passed = True
    for name in names:
        report = run_suite(name, args.seed)
        rows.extend(report.rows())
        passed = passed and report.passed
    write_rows(rows, args.format)
    if not passed:
        failed = [row["check"] for row in rows if not row["passed"]]
        print(f"FAILED: {len(failed)} check(s), first {failed[0]}", file=sys.stderr)
        sys.exit(1)


def bench_command(args, params: Dict[str, str]):
    ns = parse_range(args.n, geometric=True)
    ds = parse_range(args.d, geometric=False)
    write_rows(bench_rows(args.target, ns, ds, params), args.format)


def show_help():
    """Show help information"""
    help_text = """
fanq - constant-depth quantum circuits with fan-out

USAGE:
    fanq <command> [target] [key=value ...] [options]

COMMANDS:
    build <construction>        Build a circuit, print its stats, write it with --out
    simulate <target>           Output distributions of a construction or circuit file,
                                or seeded trials of a procedure (qfp, phase-estimation)
    verify <suite|all>          Run verification suites, exit 1 on any failed check
    bench <construction>        Depth, size and ancilla table over --n and --d
    list                        Known constructions, procedures and suites
    help                        Show this help message
    version                     Show version information

OPTIONS:
    --seed N                    Seed for sampling and random instances (default 0)
    --shots N                   Sample N outcomes instead of exact distributions
    --qubit-budget N            Largest statevector to simulate
    --out FILE                  Write the built circuit document here
    --input BITS|all            Value of the input register, character j is bit j
    --expand                    Expand oracle macros into primitive gates
    --n RANGE, --d RANGE        Bench ranges, e.g. 16..65536 (doubling) or 4,8,12
    --format csv|json           Table format (default csv)
    --verbose                   Debug logging on stderr

EXAMPLES:
    fanq build or-approx n=5 --out or5.json
    fanq simulate or5.json --input all
    fanq simulate qfp n=3 --shots 2000 --seed 1
    fanq verify all
    fanq bench iterated-or --n 16..65536 --d 1..3
"""
    print(help_text)


def show_version():
    """Show version information"""
    print("fanq")
    print(f"Version {__version__}")


def show_list():
    registry.load_builtins()
    print("constructions:")
    for name in registry.construction_names():
        defaults = " ".join(f"{k}={v}" for k, v in registry.constructions[name].defaults.items())
        print(f"    {name:<22}{defaults}")
    print("procedures:")
    for name, procedure in registry.procedures.items():
        defaults = " ".join(f"{k}={v}" for k, v in procedure.defaults.items())
        print(f"    {name:<22}{defaults}")
    print("suites:")
    for name in registry.suite_names():
        print(f"    {name:<22}{registry.suites[name].criterion}")


def main(argv: Sequence[str] = None):
    """Main CLI entry point"""
    parser = argparse.ArgumentParser(description="fanq CLI", add_help=False)

    parser.add_argument("command", nargs="?", help="Command to execute")
    parser.add_argument("target", nargs="?", help="Construction, circuit file, procedure or suite")
    parser.add_argument("params", nargs="*", help="key=value construction parameters")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shots", type=int, default=0)
    parser.add_argument("--qubit-budget", type=int, default=None)
    parser.add_argument("--out", "-o")
    parser.add_argument("--input")
    parser.add_argument("--expand", action="store_true")
    parser.add_argument("--n", default="16..1024")
    parser.add_argument("--d", default="1")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--verbose", action="store_true")

    args = parser.parse_args(argv)

    level = "DEBUG" if args.verbose else get_settings().log_level
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)

    if not args.command:
        show_help()
        return

    command = args.command.lower()

    if command in ("help", "--help", "-h"):
        show_help()
        return
    if command in ("version", "--version", "-v"):
        show_version()
        return
    if command == "list":
        show_list()
        return
    if command not in ("build", "simulate", "verify", "bench"):
        print(f"Error: Unknown command '{command}'", file=sys.stderr)
        print("Run 'fanq help' for usage information", file=sys.stderr)
        sys.exit(1)

    if not args.target:
        fail(f"No target specified for {command}", f"fanq {command} <target> [key=value ...]")

    try:
        params = parse_params(args.params)
        if command == "build":
            build_command(args, params)
        elif command == "simulate":
            simulate_command(args, params)
        elif command == "verify":
            if params:
                raise ValueError("verify takes no parameters")
            verify_command(args)
        else:
            bench_command(args, params)
    except (FanqError, ValueError) as e:
        fail(str(e))
    except KeyError as e:
        fail(e.args[0] if e.args else "missing key")


if __name__ == "__main__":
    main()

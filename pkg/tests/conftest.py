"""Shared test helpers: reference simulator and random circuit generators."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from tscsynth.netlist import (
    Circuit,
    Fault,
    FaultSite,
    Gate,
    SignalRef,
    TruthTable2,
    TT_NOT_A,
)

BENCH_DIR = Path(__file__).resolve().parent.parent / "benchmarks"


def scalar_simulate(circuit: Circuit, fault: Fault | None = None) -> dict:
    """Word-by-word reference simulator with scalar gate evaluation.

    Returns {"outputs": [list of per-word bits], "rails": ... or None},
    packed the same way as the bit-parallel simulator for easy comparison.
    """
    outputs = [0] * circuit.q
    rails = [0, 0] if circuit.error_rails is not None else None
    for w in range(1 << circuit.r):
        values: list[int] = []
        for i, gate in enumerate(circuit.gates):
            def src(ref: SignalRef) -> int:
                if ref.is_input:
                    return (w >> ref.index) & 1
                return values[ref.index]

            a, b = src(gate.a), src(gate.b)
            if fault is not None and fault.gate == i:
                if fault.site is FaultSite.INPUT_A:
                    a = fault.stuck
                elif fault.site is FaultSite.INPUT_B:
                    b = fault.stuck
            out = gate.tt.eval(a, b)
            if fault is not None and fault.gate == i and fault.site is FaultSite.OUTPUT:
                out = fault.stuck
            values.append(out)

        def resolve(ref: SignalRef) -> int:
            return (w >> ref.index) & 1 if ref.is_input else values[ref.index]

        for j, ref in enumerate(circuit.func_outputs):
            outputs[j] |= resolve(ref) << w
        if rails is not None:
            rails[0] |= resolve(circuit.error_rails[0]) << w
            rails[1] |= resolve(circuit.error_rails[1]) << w
    return {
        "outputs": tuple(outputs),
        "rails": tuple(rails) if rails is not None else None,
    }


def random_ref(rng: random.Random, r: int, n_gates: int) -> SignalRef:
    k = rng.randrange(r + n_gates)
    return SignalRef.x(k) if k < r else SignalRef.g(k - r)


def random_circuit(
    rng: random.Random,
    r: int,
    n_gates: int,
    q: int,
    rails: str = "none",
) -> Circuit:
    """Random feed-forward circuit.

    rails: "none", "random" (two random refs), or "complement" (z_1 random,
    z_0 = explicit inverter gate on z_1, so fault-free rails never collide).
    """
    gates = []
    for i in range(n_gates):
        gates.append(
            Gate(TruthTable2(rng.randrange(16)), random_ref(rng, r, i), random_ref(rng, r, i))
        )
    error_rails = None
    if rails == "random":
        error_rails = (random_ref(rng, r, n_gates), random_ref(rng, r, n_gates))
    elif rails == "complement":
        z1 = random_ref(rng, r, n_gates)
        gates.append(Gate(TT_NOT_A, z1, z1))
        error_rails = (SignalRef.g(len(gates) - 1), z1)
    func = tuple(random_ref(rng, r, n_gates) for _ in range(q))
    return Circuit(r, tuple(gates), func, error_rails)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)

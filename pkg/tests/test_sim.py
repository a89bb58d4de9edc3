import pytest

from tscsynth.netlist import (
    Circuit,
    Fault,
    FaultSite,
    Gate,
    SignalRef,
    TT_AND,
    TT_OR,
    TT_XOR,
)
from tscsynth.sim import (
    FaultScope,
    enumerate_faults,
    full_mask,
    input_patterns,
    simulate,
)

from conftest import random_circuit, scalar_simulate

X = SignalRef.x
G = SignalRef.g


def _xor_circuit():
    return Circuit(2, (Gate(TT_XOR, X(0), X(1)),), (G(0),))


def test_input_patterns_bit_convention():
    # Bit j of word w is the value of x_j; x_0 is the least significant.
    x0, x1 = input_patterns(2)
    assert x0 == 0b1010
    assert x1 == 0b1100


def test_fault_free_xor():
    resp = simulate(_xor_circuit())
    assert resp.outputs[0] == 0b0110
    assert resp.n_words == 4


def test_output_stuck_at_zero():
    resp = simulate(_xor_circuit(), Fault(FaultSite.OUTPUT, 0, 0))
    assert resp.outputs[0] == 0


def test_input_a_stuck_one_on_and_gate():
    # AND with its first input stuck at 1 passes the second input through.
    c = Circuit(2, (Gate(TT_AND, X(0), X(1)),), (G(0),))
    resp = simulate(c, Fault(FaultSite.INPUT_A, 0, 1))
    assert resp.outputs[0] == input_patterns(2)[1]


def test_fault_on_pruned_gate_rejected():
    c = Circuit(
        2, (Gate(TT_AND, X(0), X(1)), Gate(TT_OR, X(0), X(1))), (G(0),)
    )
    with pytest.raises(ValueError):
        simulate(c, Fault(FaultSite.OUTPUT, 1, 0))


def test_simulate_is_deterministic(rng):
    c = random_circuit(rng, r=4, n_gates=10, q=3, rails="random")
    assert simulate(c) == simulate(c)


class TestBitParallelEquivalence:
    def test_matches_scalar_reference(self, rng):
        for _ in range(60):
            r = rng.randrange(1, 5)
            c = random_circuit(rng, r=r, n_gates=rng.randrange(0, 10), q=2, rails="random")
            packed = simulate(c)
            ref = scalar_simulate(c)
            assert packed.outputs == ref["outputs"]
            assert packed.rails == ref["rails"]

    def test_matches_scalar_reference_r6(self, rng):
        c = random_circuit(rng, r=6, n_gates=12, q=3, rails="random")
        ref = scalar_simulate(c)
        packed = simulate(c)
        assert packed.outputs == ref["outputs"]
        assert packed.rails == ref["rails"]

    def test_matches_scalar_under_faults(self, rng):
        for _ in range(25):
            c = random_circuit(rng, r=3, n_gates=6, q=2, rails="complement")
            for fault in enumerate_faults(c, FaultScope.ALL):
                packed = simulate(c, fault)
                ref = scalar_simulate(c, fault)
                assert packed.outputs == ref["outputs"]
                assert packed.rails == ref["rails"]


class TestEnumerateFaults:
    def test_outputs_only_counts(self):
        c = _xor_circuit()
        assert len(enumerate_faults(c, FaultScope.OUTPUTS_ONLY)) == 2

    def test_all_counts(self, rng):
        c = random_circuit(rng, r=3, n_gates=3, q=3, rails="none")
        live = {ref.index for ref in c.func_outputs if not ref.is_input}
        # walk sources too
        from tscsynth.netlist import live_set

        assert len(enumerate_faults(c, FaultScope.ALL)) == 6 * len(live_set(c))

    def test_deterministic_order(self):
        c = Circuit(
            2,
            (Gate(TT_AND, X(0), X(1)), Gate(TT_OR, G(0), X(1))),
            (G(1),),
        )
        faults = enumerate_faults(c, FaultScope.ALL)
        assert faults[:4] == [
            Fault(FaultSite.OUTPUT, 0, 0),
            Fault(FaultSite.OUTPUT, 0, 1),
            Fault(FaultSite.INPUT_A, 0, 0),
            Fault(FaultSite.INPUT_A, 0, 1),
        ]
        assert [f.gate for f in faults] == [0] * 6 + [1] * 6


def test_input_fault_flips_or_leaves_gate_output(rng):
    # Premise behind scoring input faults from output-fault responses: at any
    # word an input stuck-at either leaves the faulted gate's output alone or
    # makes it equal the matching output stuck-at value.
    from tscsynth.netlist import live_set

    for _ in range(40):
        c = random_circuit(rng, r=3, n_gates=6, q=2, rails="complement")
        full = full_mask(c.r)
        free = simulate(c)
        for gate in sorted(live_set(c)):
            for site in (FaultSite.INPUT_A, FaultSite.INPUT_B):
                for stuck in (0, 1):
                    faulty = simulate(c, Fault(site, gate, stuck))
                    out0 = simulate(c, Fault(FaultSite.OUTPUT, gate, 0))
                    out1 = simulate(c, Fault(FaultSite.OUTPUT, gate, 1))
                    for j in range(c.q):
                        same = ~(faulty.outputs[j] ^ free.outputs[j]) & full
                        as0 = ~(faulty.outputs[j] ^ out0.outputs[j]) & full
                        as1 = ~(faulty.outputs[j] ^ out1.outputs[j]) & full
                        assert (same | as0 | as1) == full

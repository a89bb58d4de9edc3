"""Four-objective fitness (f_f, f_ST, f_FS, f_p) and its lexicographic order.

Checking quality is scored from gate-output fault simulations only.  Input
faults never get their own simulation: an input stuck-at either leaves the
gate output unchanged at a word or flips it, in which case the circuit
behaves exactly as under the matching output stuck-at at that word.  The
fast path records, per output fault, the words where the rails collide, and
credits an input fault as detected when one of its flip words carries an
error signal under the manifested output fault.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .netlist import Circuit, live_set
from .sim import ResponseMatrix, full_mask, input_patterns

K_ST = 25
K_FS = 200


@dataclass(frozen=True)
class FitnessVector:
    """Objectives in priority order plus the raw counts behind them.

    u_f and u_i are None when the fault-free rails already collide (the
    checking scores are then zero by definition and no faults are simulated).
    """

    f_f: float
    f_st: float
    f_fs: float
    f_p: float
    u_f: int | None = None
    u_i: int | None = None
    live_gates: int = 0

    def key(self) -> tuple[float, float, float, float]:
        return (self.f_f, self.f_st, self.f_fs, self.f_p)

    @property
    def perfect_checking(self) -> bool:
        return self.f_f == 1.0 and self.f_st == 1.0 and self.f_fs == 1.0


def compare_lex(a: FitnessVector, b: FitnessVector) -> int:
    """Dictionary order on (f_f, f_ST, f_FS, f_p); later entries break ties."""
    ka, kb = a.key(), b.key()
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def st_score(u_f: int) -> float:
    return 1.0 / (1 + K_ST * u_f)


def fs_score(u_i: int) -> float:
    return 1.0 / (1 + K_FS * u_i)


def _abs_corr(x: int, y: int, n: int) -> float:
    """|Pearson correlation| of two packed binary sequences of length n.

    Zero-variance sequences carry no function information and score 0.
    """
    n1x = x.bit_count()
    n1y = y.bit_count()
    den_x = n1x * (n - n1x)
    den_y = n1y * (n - n1y)
    if den_x == 0 or den_y == 0:
        return 0.0
    num = n * (x & y).bit_count() - n1x * n1y
    if num * num == den_x * den_y:
        return 1.0
    return abs(num) / math.sqrt(den_x * den_y)


def f_function(
    resp: ResponseMatrix, target: Sequence[int], word_mask: int | None = None
) -> float:
    """Mean |correlation| between each function output and its target column."""
    if len(resp.outputs) != len(target):
        raise ValueError("target column count does not match circuit outputs")
    full = (1 << resp.n_words) - 1
    mask = full if word_mask is None else word_mask & full
    n = mask.bit_count()
    total = 0.0
    for got, want in zip(resp.outputs, target):
        total += _abs_corr(got & mask, want & mask, n)
    return total / len(target)


def f_parsimony(circuit: Circuit, max_gates: int) -> float:
    """(M - s) / M where s counts gates with a path to an output."""
    s = len(live_set(circuit))
    return (max_gates - s) / max_gates


def _eval_gate(ttv: int, a: int, b: int, full: int) -> int:
    na = a ^ full
    nb = b ^ full
    out = 0
    if ttv & 1:
        out |= na & nb
    if ttv & 2:
        out |= na & b
    if ttv & 4:
        out |= a & nb
    if ttv & 8:
        out |= a & b
    return out


def _pin_a(ttv: int, d: int, b: int, full: int) -> int:
    # Gate output with the first input held at d.
    out = 0
    if (ttv >> (2 * d)) & 1:
        out |= b ^ full
    if (ttv >> (2 * d + 1)) & 1:
        out |= b
    return out


def _pin_b(ttv: int, d: int, a: int, full: int) -> int:
    out = 0
    if (ttv >> d) & 1:
        out |= a ^ full
    if (ttv >> (2 + d)) & 1:
        out |= a
    return out


def _gate_values(circuit: Circuit) -> list[int]:
    full = full_mask(circuit.r)
    xs = input_patterns(circuit.r)
    gv: list[int] = []
    for gate in circuit.gates:
        a = xs[gate.a.index] if gate.a.is_input else gv[gate.a.index]
        b = xs[gate.b.index] if gate.b.is_input else gv[gate.b.index]
        gv.append(_eval_gate(gate.tt.value, a, b, full))
    return gv


def fault_free_response(circuit: Circuit) -> ResponseMatrix:
    """Fault-free response computed by the fitness-side evaluator."""
    gv = _gate_values(circuit)
    xs = input_patterns(circuit.r)

    def value(ref):
        return xs[ref.index] if ref.is_input else gv[ref.index]

    rails = None
    if circuit.error_rails is not None:
        rails = (value(circuit.error_rails[0]), value(circuit.error_rails[1]))
    return ResponseMatrix(
        1 << circuit.r, tuple(value(ref) for ref in circuit.func_outputs), rails
    )


def _fanout_cones(circuit: Circuit, live: list[int]) -> dict[int, list[int]]:
    """Per live gate, the ascending list of live gates its output can reach
    (itself included)."""
    live_here = set(live)
    consumers: dict[int, list[int]] = {g: [] for g in live}
    for g in live:
        gate = circuit.gates[g]
        for src in (gate.a, gate.b):
            if not src.is_input and src.index in live_here:
                consumers[src.index].append(g)
    cone_sets: dict[int, set[int]] = {}
    for g in reversed(live):
        cone = {g}
        for c in consumers[g]:
            cone |= cone_sets[c]
        cone_sets[g] = cone
    return {g: sorted(cone_sets[g]) for g in live}


def _checking_counts(
    circuit: Circuit, gv: list[int], word_mask: int | None
) -> tuple[int, int] | None:
    """(u_f, u_i) over live gates, or None when fault-free rails collide."""
    full = full_mask(circuit.r)
    applied = full if word_mask is None else word_mask & full
    xs = input_patterns(circuit.r)

    def value(ref):
        return xs[ref.index] if ref.is_input else gv[ref.index]

    z0ref, z1ref = circuit.error_rails
    if ((value(z0ref) ^ value(z1ref)) ^ full) & applied:
        return None

    live = sorted(live_set(circuit))
    cones = _fanout_cones(circuit, live)
    out_gate_drivers = [
        (j, ref.index) for j, ref in enumerate(circuit.func_outputs) if not ref.is_input
    ]

    u_f = 0
    u_i = 0
    err_masks: dict[tuple[int, int], int] = {}
    for g in live:
        cone = cones[g]
        cone_set = set(cone)
        affected_outputs = [gi for (_, gi) in out_gate_drivers if gi in cone_set]
        for d in (0, 1):
            w = gv.copy()
            w[g] = full if d else 0
            for j in cone[1:]:
                gate = circuit.gates[j]
                a = xs[gate.a.index] if gate.a.is_input else w[gate.a.index]
                b = xs[gate.b.index] if gate.b.is_input else w[gate.b.index]
                w[j] = _eval_gate(gate.tt.value, a, b, full)
            z0 = xs[z0ref.index] if z0ref.is_input else w[z0ref.index]
            z1 = xs[z1ref.index] if z1ref.is_input else w[z1ref.index]
            err = ((z0 ^ z1) ^ full) & applied
            err_masks[(g, d)] = err
            if err == 0:
                u_f += 1
            bad = 0
            for gi in affected_outputs:
                bad |= w[gi] ^ gv[gi]
            u_i += (bad & applied & (err ^ full)).bit_count()

    # Input faults via manifestation: flipping a source at word w reproduces
    # the output stuck-at NOT o(w); the fault is detected iff such a word is
    # error-signalled under that output fault.
    for g in live:
        gate = circuit.gates[g]
        a = value(gate.a)
        b = value(gate.b)
        o = gv[g]
        detect_base = (o & err_masks[(g, 0)]) | ((o ^ full) & err_masks[(g, 1)])
        for d in (0, 1):
            changed = (_pin_a(gate.tt.value, d, b, full) ^ o) & applied
            if changed & detect_base == 0:
                u_f += 1
        for d in (0, 1):
            changed = (_pin_b(gate.tt.value, d, a, full) ^ o) & applied
            if changed & detect_base == 0:
                u_f += 1

    return u_f, u_i


def evaluate_checking(
    circuit: Circuit,
    resp_free: ResponseMatrix,
    word_mask: int | None = None,
) -> tuple[int | None, int | None, float, float]:
    """(u_f, u_i, f_ST, f_FS) for a circuit with error rails.

    An error signalled during fault-free operation (z_0 == z_1 at any applied
    word) zeroes both scores immediately.
    """
    if circuit.error_rails is None:
        raise ValueError("circuit has no error rails")
    full = full_mask(circuit.r)
    applied = full if word_mask is None else word_mask & full
    z0, z1 = resp_free.rails
    if ((z0 ^ z1) ^ full) & applied:
        return (None, None, 0.0, 0.0)
    counts = _checking_counts(circuit, _gate_values(circuit), word_mask)
    assert counts is not None
    u_f, u_i = counts
    return (u_f, u_i, st_score(u_f), fs_score(u_i))


def evaluate_circuit(
    circuit: Circuit,
    target: Sequence[int],
    max_gates: int,
    word_mask: int | None = None,
) -> FitnessVector:
    """All four metrics; none is short-circuited when an earlier one is low."""
    gv = _gate_values(circuit)
    xs = input_patterns(circuit.r)

    def value(ref):
        return xs[ref.index] if ref.is_input else gv[ref.index]

    resp = ResponseMatrix(
        1 << circuit.r,
        tuple(value(ref) for ref in circuit.func_outputs),
        (value(circuit.error_rails[0]), value(circuit.error_rails[1]))
        if circuit.error_rails is not None
        else None,
    )
    ff = f_function(resp, target, word_mask)
    live_count = len(live_set(circuit))

    if circuit.error_rails is None:
        return FitnessVector(ff, 0.0, 0.0, (max_gates - live_count) / max_gates,
                             None, None, live_count)

    full = full_mask(circuit.r)
    applied = full if word_mask is None else word_mask & full
    z0, z1 = resp.rails
    if ((z0 ^ z1) ^ full) & applied:
        u_f: int | None = None
        u_i: int | None = None
        fst = ffs = 0.0
    else:
        u_f, u_i = _checking_counts(circuit, gv, word_mask)
        fst = st_score(u_f)
        ffs = fs_score(u_i)
    return FitnessVector(
        ff, fst, ffs, (max_gates - live_count) / max_gates, u_f, u_i, live_count
    )

import pytest

from tscsynth.fitness import evaluate_checking, fault_free_response
from tscsynth.netlist import (
    Circuit,
    Gate,
    SignalRef,
    TruthTable2,
    TT_AND,
    TT_BUF_A,
    TT_NAND,
    TT_NOT_A,
    TT_ONE,
    TT_XNOR,
    TT_XOR,
    TT_ZERO,
    build_duplication_baseline,
    two_rail_checker_circuit,
)
from tscsynth.sim import FaultScope
from tscsynth.verify import (
    check_theorem2,
    codespace_report,
    verify_fs,
    verify_st,
    verify_tsc,
)

from conftest import random_circuit

X = SignalRef.x
G = SignalRef.g


def identity_seed() -> Circuit:
    # Outputs wired straight to the inputs; the duplication baseline is then
    # nothing but one checker cell fed by a full dual-rail codespace.
    return Circuit(2, (), (X(0), X(1)))


class TestVerifySt:
    def test_constant_rails_not_self_testing(self):
        # Rail gates stuck at their constant value can never be noticed.
        c = Circuit(
            1,
            (Gate(TT_ZERO, X(0), X(0)), Gate(TT_ONE, X(0), X(0))),
            (X(0),),
            (G(0), G(1)),
        )
        result = verify_st(c)
        assert not result.is_st
        assert result.undetected

    def test_identity_duplication_baseline_is_self_testing(self):
        # A 2-in/2-out identity exercises the full output codespace.
        baseline = build_duplication_baseline(identity_seed())
        result = verify_st(baseline)
        assert result.is_st, [str(f) for f in result.undetected]

    def test_no_live_gates_vacuously_self_testing(self):
        c = Circuit(2, (), (X(0),), (X(0), X(1)))
        assert verify_st(c).is_st

    def test_requires_rails(self):
        with pytest.raises(ValueError):
            verify_st(identity_seed())


class TestVerifyFs:
    def test_fault_feeding_only_rail_never_violates(self):
        # Faults on the XNOR rail cannot corrupt the function output.
        c = Circuit(
            2,
            (Gate(TT_XOR, X(0), X(1)), Gate(TT_XNOR, X(0), X(1))),
            (G(0),),
            (G(1), G(0)),
        )
        result = verify_fs(c, FaultScope.ALL)
        assert result.is_fs
        assert not result.false_alarm

    def test_unchecked_output_violates(self):
        # y = x0 through a buffer, rails from separate logic that never sees
        # the fault: stuck-0 output is silently wrong at x0 = 1.
        c = Circuit(
            1,
            (
                Gate(TT_BUF_A, X(0), X(0)),
                Gate(TT_BUF_A, X(0), X(0)),
                Gate(TT_NOT_A, X(0), X(0)),
            ),
            (G(0),),
            (G(2), G(1)),
        )
        result = verify_fs(c, FaultScope.OUTPUTS_ONLY)
        assert not result.is_fs
        from tscsynth.netlist import Fault, FaultSite

        assert (Fault(FaultSite.OUTPUT, 0, 0), 1) in result.violations

    def test_duplication_baselines_always_fault_secure(self, rng):
        for _ in range(15):
            seed = random_circuit(rng, r=3, n_gates=5, q=rng.randrange(1, 4))
            baseline = build_duplication_baseline(seed)
            result = verify_fs(baseline, FaultScope.ALL)
            assert result.is_fs, [str(v[0]) for v in result.violations]

    def test_false_alarm_reported_distinctly(self):
        c = Circuit(2, (Gate(TT_AND, X(0), X(1)),), (G(0),), (G(0), G(0)))
        result = verify_fs(c)
        assert not result.is_fs
        assert result.false_alarm
        assert result.violations == []


class TestVerifyTsc:
    def test_xor_pair_is_tsc(self):
        c = Circuit(
            2,
            (Gate(TT_XOR, X(0), X(1)), Gate(TT_XNOR, X(0), X(1))),
            (G(0),),
            (G(1), G(0)),
        )
        report = verify_tsc(c)
        assert report.is_tsc

    def test_false_alarm_word_fails_tsc(self):
        c = Circuit(2, (Gate(TT_AND, X(0), X(1)),), (G(0),), (G(0), G(0)))
        assert not verify_tsc(c).is_tsc

    def test_seed_without_checking_not_tsc(self):
        # Rails bolted onto an unchecked function are not self-testing.
        c = Circuit(
            2,
            (Gate(TT_AND, X(0), X(1)), Gate(TT_XOR, X(0), X(1)), Gate(TT_XNOR, X(0), X(1))),
            (G(0),),
            (G(2), G(1)),
        )
        report = verify_tsc(c)
        assert not report.is_tsc
        assert not report.is_st or not report.is_fs

    def test_perfect_fitness_implies_verified_tsc(self, rng):
        # Executable closure: whenever the fast path scores (1, 1, 1) the
        # brute-force verifier must agree the circuit is TSC.
        found = 0
        trials = 0
        while found < 5 and trials < 4000:
            trials += 1
            c = random_circuit(rng, r=2, n_gates=rng.randrange(2, 7), q=1, rails="random")
            resp = fault_free_response(c)
            u_f, u_i, f_st, f_fs = evaluate_checking(c, resp)
            if f_st == 1.0 and f_fs == 1.0:
                found += 1
                assert verify_tsc(c).is_tsc
        assert found > 0


class TestTheorem2:
    def test_holds_on_random_circuits(self, rng):
        for _ in range(120):
            c = random_circuit(
                rng, r=rng.randrange(1, 5), n_gates=rng.randrange(0, 9), q=2,
                rails="random",
            )
            assert check_theorem2(c)

    def test_holds_on_baselines(self, rng):
        for _ in range(10):
            seed = random_circuit(rng, r=3, n_gates=4, q=2)
            assert check_theorem2(build_duplication_baseline(seed))

    def test_vacuous_when_not_fs_over_output_faults(self):
        c = Circuit(
            1,
            (
                Gate(TT_BUF_A, X(0), X(0)),
                Gate(TT_BUF_A, X(0), X(0)),
                Gate(TT_NOT_A, X(0), X(0)),
            ),
            (G(0),),
            (G(2), G(1)),
        )
        assert not verify_fs(c, FaultScope.OUTPUTS_ONLY).is_fs
        assert check_theorem2(c)


class TestCodespace:
    def test_full_codespace_has_no_undetectable_checker_faults(self):
        report = codespace_report(identity_seed())
        assert report.realized_patterns == 4
        assert report.baseline_is_st
        assert report.undetectable_checker_faults == []

    def test_constant_output_starves_the_tree(self):
        # One output never moves, so checker faults needing its other value
        # can never be exercised.
        seed = Circuit(
            2,
            (Gate(TT_BUF_A, X(0), X(0)), Gate(TT_ZERO, X(0), X(1))),
            (G(0), G(1)),
        )
        report = codespace_report(seed)
        assert not report.baseline_is_st
        assert report.undetectable_checker_faults

    def test_checker_cell_tsc_over_valid_codespace(self):
        # The 6-gate two-rail checker, fed every valid dual-rail word, is
        # totally self-checking by exhaustive enumeration.
        cell = two_rail_checker_circuit()
        mask = 0
        for w in range(16):
            a_valid = ((w >> 0) & 1) != ((w >> 1) & 1)
            b_valid = ((w >> 2) & 1) != ((w >> 3) & 1)
            if a_valid and b_valid:
                mask |= 1 << w
        report = verify_tsc(cell, word_mask=mask)
        assert report.is_tsc

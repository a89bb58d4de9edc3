import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tscsynth.formats import (
    ParseError,
    TargetSpec,
    export_dot,
    parse_blif,
    parse_pla,
    read_native,
    render_blif,
    render_pla,
    write_native,
)
from tscsynth.netlist import Circuit, Gate, SignalRef, TT_XOR
from tscsynth.sim import simulate

from conftest import random_circuit

X = SignalRef.x
G = SignalRef.g


class TestPla:
    def test_single_and_cube(self):
        target = parse_pla(".i 2\n.o 1\n11 1\n.e\n")
        assert target.columns == (0b1000,)

    def test_dont_care_input_column(self):
        # "1-" asserts whenever x_0 is 1, i.e. words 1 and 3.
        target = parse_pla(".i 2\n.o 1\n1- 1\n.e\n")
        assert target.columns == (0b1010,)

    def test_no_cubes_means_all_zero(self):
        target = parse_pla(".i 2\n.o 2\n.e\n")
        assert target.columns == (0, 0)

    def test_cubes_accumulate(self):
        target = parse_pla(".i 2\n.o 1\n00 1\n11 1\n.e\n")
        assert target.columns == (0b1001,)

    def test_tilde_output_not_asserted(self):
        target = parse_pla(".i 1\n.o 2\n1 1~\n.e\n")
        assert target.columns == (0b10, 0)

    def test_missing_header_rejected(self):
        with pytest.raises(ParseError):
            parse_pla("11 1\n.e\n")

    def test_inconsistent_width_rejected(self):
        with pytest.raises(ParseError):
            parse_pla(".i 2\n.o 1\n111 1\n.e\n")

    def test_bad_character_rejected(self):
        with pytest.raises(ParseError):
            parse_pla(".i 2\n.o 1\n1x 1\n.e\n")

    def test_output_dont_care_rejected(self):
        with pytest.raises(ParseError):
            parse_pla(".i 2\n.o 1\n11 -\n.e\n")

    @settings(max_examples=60, deadline=None)
    @given(data=st.data(), r=st.integers(1, 6), q=st.integers(1, 4))
    def test_render_parse_roundtrip(self, data, r, q):
        full = (1 << (1 << r)) - 1
        cols = tuple(data.draw(st.integers(0, full)) for _ in range(q))
        target = TargetSpec(r, q, cols)
        assert parse_pla(render_pla(target)).columns == cols


class TestBlif:
    def test_and_gate(self):
        c = parse_blif(
            ".model t\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n"
        )
        assert len(c.gates) == 1
        assert simulate(c).outputs == (0b1000,)

    def test_unary_not_embeds_as_two_input(self):
        c = parse_blif(".model t\n.inputs a\n.outputs y\n.names a y\n0 1\n.end\n")
        assert len(c.gates) == 1
        assert c.gates[0].tt.bits == (1, 1, 0, 0)
        assert simulate(c).outputs == (0b01,)

    def test_constant_one(self):
        c = parse_blif(".model t\n.inputs a\n.outputs y\n.names y\n1\n.end\n")
        assert simulate(c).outputs == (0b11,)

    def test_off_set_cover(self):
        # All-zero cover rows define the complement.
        c = parse_blif(
            ".model t\n.inputs a b\n.outputs y\n.names a b y\n11 0\n.end\n"
        )
        assert simulate(c).outputs == (0b0111,)

    def test_out_of_order_blocks_sorted(self):
        c = parse_blif(
            ".model t\n.inputs a b\n.outputs y\n"
            ".names m y\n1 1\n.names a b m\n11 1\n.end\n"
        )
        assert simulate(c).outputs == (0b1000,)

    def test_undeclared_net_rejected(self):
        with pytest.raises(ParseError):
            parse_blif(".model t\n.inputs a\n.outputs y\n.names ghost y\n1 1\n.end\n")

    def test_fanin_three_rejected(self):
        with pytest.raises(ParseError):
            parse_blif(
                ".model t\n.inputs a b c\n.outputs y\n.names a b c y\n111 1\n.end\n"
            )

    def test_cycle_rejected(self):
        with pytest.raises(ParseError):
            parse_blif(
                ".model t\n.inputs a\n.outputs y\n"
                ".names y m\n1 1\n.names m y\n1 1\n.end\n"
            )

    def test_render_parse_simulates_identically(self, rng):
        for _ in range(25):
            c = random_circuit(rng, r=3, n_gates=6, q=2, rails="none")
            back = parse_blif(render_blif(c))
            assert simulate(back).outputs == simulate(c).outputs


class TestNative:
    def test_example_shape(self):
        c = Circuit(2, (Gate(TT_XOR, X(0), X(1)),), (G(0),))
        obj = json.loads(write_native(c))
        assert obj == {
            "r": 2,
            "gates": [{"tt": "0110", "a": "x0", "b": "x1"}],
            "y": ["g0"],
            "z": [],
        }

    def test_roundtrip_random(self, rng):
        for _ in range(25):
            c = random_circuit(rng, r=3, n_gates=5, q=2, rails="random")
            assert read_native(write_native(c)) == c

    def test_single_rail_rejected(self):
        text = json.dumps(
            {"r": 2, "gates": [{"tt": "0110", "a": "x0", "b": "x1"}], "y": ["g0"], "z": ["g0"]}
        )
        with pytest.raises(ParseError):
            read_native(text)

    def test_dangling_ref_rejected(self):
        text = json.dumps({"r": 2, "gates": [], "y": ["g0"], "z": []})
        with pytest.raises(ParseError):
            read_native(text)

    def test_forward_ref_rejected(self):
        text = json.dumps(
            {
                "r": 2,
                "gates": [
                    {"tt": "0110", "a": "g1", "b": "x1"},
                    {"tt": "1000", "a": "x0", "b": "x1"},
                ],
                "y": ["g0"],
                "z": [],
            }
        )
        with pytest.raises(ParseError):
            read_native(text)


class TestDot:
    def test_xor_graph(self):
        c = Circuit(2, (Gate(TT_XOR, X(0), X(1)),), (G(0),))
        dot = export_dot(c)
        assert "digraph" in dot
        assert 'g0 [shape=box, label="0:XOR"]' in dot
        assert "x0 -> g0" in dot
        assert "g0 -> y0" in dot

    def test_empty_circuit(self):
        c = Circuit(1, (), (X(0),))
        dot = export_dot(c)
        assert "x0" in dot and "y0" in dot

    def test_rails_use_distinct_shape(self):
        c = Circuit(
            2,
            (Gate(TT_XOR, X(0), X(1)),),
            (G(0),),
            (X(0), G(0)),
        )
        dot = export_dot(c)
        assert "z0 [shape=diamond]" in dot

    def test_deterministic(self, rng):
        c = random_circuit(rng, r=3, n_gates=4, q=2, rails="random")
        assert export_dot(c) == export_dot(c)

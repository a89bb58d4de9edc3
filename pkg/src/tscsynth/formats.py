"""Netlist and target-function text formats: PLA, BLIF, native JSON, DOT."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .netlist import Circuit, Gate, SignalRef, TruthTable2
from .sim import full_mask, input_patterns


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class TargetSpec:
    """Expected responses for q outputs over all 2**r input words.

    Columns are packed integers (bit w = desired value at word w, x_0 least
    significant input).  word_mask optionally restricts the applied words.
    """

    r: int
    q: int
    columns: tuple[int, ...]
    word_mask: int | None = None

    def __post_init__(self) -> None:
        if len(self.columns) != self.q:
            raise ValueError("column count does not match q")
        full = full_mask(self.r)
        for col in self.columns:
            if not 0 <= col <= full:
                raise ValueError("target column does not fit 2**r words")


def _logical_lines(text: str) -> list[str]:
    """Comment-stripped, backslash-continued, non-empty lines."""
    lines: list[str] = []
    pending = ""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.endswith("\\"):
            pending += line[:-1] + " "
            continue
        lines.append(pending + line)
        pending = ""
    if pending.strip():
        lines.append(pending.strip())
    return lines


def parse_pla(text: str) -> TargetSpec:
    """Espresso-style PLA subset: .i/.o, optional .ilb/.ob/.p/.type, cubes, .e.

    Output columns OR together the input predicates of every cube asserting
    them with '1'; '0' and '~' leave a cube's contribution out, and words not
    covered by any cube are 0.  Output don't-cares are rejected.
    """
    r = q = None
    cubes: list[tuple[str, str]] = []
    ignorable = {"p", "ilb", "ob", "type", "e", "end"}
    for line in _logical_lines(text):
        if line.startswith("."):
            parts = line[1:].split()
            key = parts[0] if parts else ""
            if key == "i":
                r = int(parts[1])
            elif key == "o":
                q = int(parts[1])
            elif key in ignorable:
                if key in ("e", "end"):
                    break
            else:
                raise ParseError(f"unsupported PLA directive: .{key}")
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"bad cube line: {line!r}")
        cubes.append((fields[0], fields[1]))

    if r is None or q is None:
        raise ParseError("PLA is missing .i or .o")
    if r < 1 or q < 1:
        raise ParseError("PLA needs at least one input and one output")

    xs = input_patterns(r)
    full = full_mask(r)
    columns = [0] * q
    for in_part, out_part in cubes:
        if len(in_part) != r or len(out_part) != q:
            raise ParseError(f"cube width does not match .i/.o: {in_part} {out_part}")
        mask = full
        for j, ch in enumerate(in_part):
            if ch == "1":
                mask &= xs[j]
            elif ch == "0":
                mask &= xs[j] ^ full
            elif ch != "-":
                raise ParseError(f"bad input character {ch!r} in cube")
        for j, ch in enumerate(out_part):
            if ch == "1":
                columns[j] |= mask
            elif ch == "-":
                raise ParseError("output don't-cares are unsupported")
            elif ch not in ("0", "~"):
                raise ParseError(f"bad output character {ch!r} in cube")
    return TargetSpec(r=r, q=q, columns=tuple(columns))


def render_pla(target: TargetSpec) -> str:
    """Completely specified PLA with one cube per word carrying any 1."""
    lines = [f".i {target.r}", f".o {target.q}"]
    for w in range(1 << target.r):
        outs = "".join(str((col >> w) & 1) for col in target.columns)
        if "1" not in outs:
            continue
        bits = "".join(str((w >> j) & 1) for j in range(target.r))
        lines.append(f"{bits} {outs}")
    lines.append(".e")
    return "\n".join(lines) + "\n"


def _cover_function(rows: list[str], n_in: int, line_ctx: str) -> list[int]:
    """Evaluate a single-output cover on every input combination."""
    on_rows: list[str] = []
    polarity = None
    for row in rows:
        fields = row.split()
        if n_in == 0:
            if len(fields) != 1 or fields[0] not in ("0", "1"):
                raise ParseError(f"bad constant cover row {row!r} in {line_ctx}")
            pattern, bit = "", fields[0]
        else:
            if len(fields) != 2 or len(fields[0]) != n_in:
                raise ParseError(f"bad cover row {row!r} in {line_ctx}")
            pattern, bit = fields
        if any(ch not in "01-" for ch in pattern):
            raise ParseError(f"bad cover pattern {pattern!r} in {line_ctx}")
        if bit not in ("0", "1"):
            raise ParseError(f"bad cover output {bit!r} in {line_ctx}")
        if polarity is None:
            polarity = bit
        elif polarity != bit:
            raise ParseError(f"mixed cover polarity in {line_ctx}")
        on_rows.append(pattern)

    def matches(values: tuple[int, ...]) -> bool:
        return any(
            all(p == "-" or int(p) == v for p, v in zip(pat, values))
            for pat in on_rows
        )

    table = []
    for combo in range(1 << n_in):
        values = tuple((combo >> j) & 1 for j in range(n_in))
        hit = matches(values)
        if polarity == "0":
            hit = not hit
        elif polarity is None:
            hit = False
        table.append(int(hit))
    return table


def parse_blif(text: str) -> Circuit:
    """BLIF subset: .model/.inputs/.outputs/.names (fan-in <= 2)/.end.

    Each .names block becomes one two-input gate; one-input and constant
    blocks embed as degenerate two-input gates with unused sources tied to
    x_0.  Fan-in above two, undefined nets, redefinitions and cyclic
    definitions are errors.
    """
    inputs: list[str] = []
    outputs: list[str] = []
    blocks: list[tuple[list[str], str, list[str]]] = []
    lines = _logical_lines(text)
    i = 0
    current: tuple[list[str], str, list[str]] | None = None
    while i < len(lines):
        line = lines[i]
        i += 1
        if line.startswith("."):
            parts = line[1:].split()
            key = parts[0] if parts else ""
            if current is not None and key != "":
                blocks.append(current)
                current = None
            if key == "model":
                continue
            if key == "inputs":
                inputs.extend(parts[1:])
            elif key == "outputs":
                outputs.extend(parts[1:])
            elif key == "names":
                if len(parts) < 2:
                    raise ParseError("empty .names line")
                sources = parts[1:-1]
                if len(sources) > 2:
                    raise ParseError(
                        f"gate {parts[-1]!r} has fan-in {len(sources)}; "
                        "seed must be in two-input form"
                    )
                current = (sources, parts[-1], [])
            elif key == "end":
                break
            else:
                raise ParseError(f"unsupported BLIF directive: .{key}")
        else:
            if current is None:
                raise ParseError(f"cover row outside a .names block: {line!r}")
            current[2].append(line)
    if current is not None:
        blocks.append(current)

    if not inputs:
        raise ParseError("BLIF has no .inputs")
    if not outputs:
        raise ParseError("BLIF has no .outputs")

    defined = {name: k for k, (_, name, _) in enumerate(blocks)}
    if len(defined) != len(blocks):
        raise ParseError("a net is defined by more than one .names block")
    for name in inputs:
        if name in defined:
            raise ParseError(f"primary input {name!r} redefined by .names")

    input_index = {name: j for j, name in enumerate(inputs)}

    # Topological order of blocks; DFS also catches undefined nets and cycles.
    order: list[int] = []
    state = [0] * len(blocks)  # 0 new, 1 visiting, 2 done

    def visit(k: int) -> None:
        if state[k] == 2:
            return
        if state[k] == 1:
            raise ParseError(f"cyclic definition through net {blocks[k][1]!r}")
        state[k] = 1
        for src in blocks[k][0]:
            if src in input_index:
                continue
            if src not in defined:
                raise ParseError(f"undefined net {src!r}")
            visit(defined[src])
        state[k] = 2
        order.append(k)

    for k in range(len(blocks)):
        visit(k)
    for name in outputs:
        if name not in input_index and name not in defined:
            raise ParseError(f"undefined output net {name!r}")

    gate_pos = {blocks[k][1]: i for i, k in enumerate(order)}

    def net_ref(name: str) -> SignalRef:
        if name in input_index:
            return SignalRef.x(input_index[name])
        return SignalRef.g(gate_pos[name])

    gates = []
    for k in order:
        sources, name, rows = blocks[k]
        table = _cover_function(rows, len(sources), f".names block for {name!r}")
        x0 = SignalRef.x(0)
        if len(sources) == 2:
            tt = TruthTable2.from_bits(
                [table[a | (b_ << 1)] for a in (0, 1) for b_ in (0, 1)]
            )
            gates.append(Gate(tt, net_ref(sources[0]), net_ref(sources[1])))
        elif len(sources) == 1:
            tt = TruthTable2.from_bits([table[a] for a in (0, 1) for _ in (0, 1)])
            gates.append(Gate(tt, net_ref(sources[0]), x0))
        else:
            tt = TruthTable2(0b1111 if table[0] else 0)
            gates.append(Gate(tt, x0, x0))

    return Circuit(
        r=len(inputs),
        gates=tuple(gates),
        func_outputs=tuple(net_ref(name) for name in outputs),
        error_rails=None,
    )


def render_blif(circuit: Circuit, model: str = "circuit") -> str:
    """Two-input .names netlist with minterm covers.

    Gates driving a function output take that output's net name directly, so
    parsing the result back yields the same gate count (no buffer blocks).
    """
    gate_name = {}
    for j, ref in enumerate(circuit.func_outputs):
        if not ref.is_input and ref.index not in gate_name:
            gate_name[ref.index] = f"y{j}"
    for i in range(len(circuit.gates)):
        gate_name.setdefault(i, f"n{i}")

    def name_of(ref: SignalRef) -> str:
        return f"x{ref.index}" if ref.is_input else gate_name[ref.index]

    lines = [f".model {model}"]
    lines.append(".inputs " + " ".join(f"x{j}" for j in range(circuit.r)))
    lines.append(".outputs " + " ".join(name_of(ref) for ref in circuit.func_outputs))
    for i, gate in enumerate(circuit.gates):
        lines.append(f".names {name_of(gate.a)} {name_of(gate.b)} {gate_name[i]}")
        for a in (0, 1):
            for b in (0, 1):
                if gate.tt.eval(a, b):
                    lines.append(f"{a}{b} 1")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def circuit_to_json(circuit: Circuit) -> dict:
    return {
        "r": circuit.r,
        "gates": [
            {
                "tt": "".join(str(t) for t in gate.tt.bits),
                "a": str(gate.a),
                "b": str(gate.b),
            }
            for gate in circuit.gates
        ],
        "y": [str(ref) for ref in circuit.func_outputs],
        "z": [str(ref) for ref in circuit.error_rails]
        if circuit.error_rails is not None
        else [],
    }


def write_native(circuit: Circuit) -> str:
    return json.dumps(circuit_to_json(circuit), indent=2) + "\n"


def read_native(text: str) -> Circuit:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}") from exc
    try:
        r = int(obj["r"])
        raw_gates = obj["gates"]
        raw_y = obj["y"]
        raw_z = obj.get("z", [])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing circuit field: {exc}") from exc
    if len(raw_z) not in (0, 2):
        raise ParseError("error rails come in pairs")
    try:
        gates = tuple(
            Gate(
                TruthTable2.from_bits([int(ch) for ch in g["tt"]]),
                SignalRef.parse(g["a"]),
                SignalRef.parse(g["b"]),
            )
            for g in raw_gates
        )
        func = tuple(SignalRef.parse(s) for s in raw_y)
        rails = tuple(SignalRef.parse(s) for s in raw_z) if raw_z else None
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad circuit field: {exc}") from exc
    try:
        return Circuit(r=r, gates=gates, func_outputs=func, error_rails=rails)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def export_dot(circuit: Circuit) -> str:
    """Directed graph with gates labelled by their function name."""
    lines = ["digraph circuit {", "  rankdir=LR;"]
    for j in range(circuit.r):
        lines.append(f'  x{j} [shape=circle];')
    for i, gate in enumerate(circuit.gates):
        lines.append(f'  g{i} [shape=box, label="{i}:{gate.tt.name}"];')
        lines.append(f"  {gate.a} -> g{i} [label=a];")
        lines.append(f"  {gate.b} -> g{i} [label=b];")
    for j, ref in enumerate(circuit.func_outputs):
        lines.append(f"  y{j} [shape=plaintext];")
        lines.append(f"  {ref} -> y{j};")
    if circuit.error_rails is not None:
        for j, ref in enumerate(circuit.error_rails):
            lines.append(f"  z{j} [shape=diamond];")
            lines.append(f"  {ref} -> z{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"

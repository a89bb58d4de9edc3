"""Fixed-length bit-string genotypes: circuit encoding and genetic operators.

Layout of a genotype with m routed outputs and M = 2**b - r gene slots:

  [m output address fields of b bits] [M genes of 4 + 2b bits]

A gene holds the four truth-table bits t0..t3 followed by two b-bit source
address fields.  Address values 0..M-1 name gene slots; the r largest values
(2**b - r .. 2**b - 1) name primary inputs x_0..x_{r-1} in ascending order.
All multi-bit fields read most-significant-bit first in genotype order, and
genotype bit 0 is the first bit of the first output field.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .netlist import Circuit, Gate, SignalRef, TruthTable2

# Reverse the bit order of a 4-bit value: genotype stores t0 first (most
# significant in the field), TruthTable2 stores t0 in bit 0.
_REV4 = tuple(
    ((v >> 3) & 1) | (((v >> 2) & 1) << 1) | (((v >> 1) & 1) << 2) | ((v & 1) << 3)
    for v in range(16)
)


@dataclass(frozen=True)
class GenomeLayout:
    """Genotype geometry for circuits with r inputs and q function outputs.

    With rails=True two extra routed outputs (z_0, z_1) follow the function
    outputs, giving m = q + 2 routed outputs in total.
    """

    r: int
    q: int
    b: int
    rails: bool = True

    def __post_init__(self) -> None:
        if self.r < 1 or self.q < 0 or self.b < 1:
            raise ValueError("bad layout dimensions")
        if (1 << self.b) <= self.r:
            raise ValueError("2**b must exceed r (no gene slot encodable)")

    @property
    def m(self) -> int:
        return self.q + (2 if self.rails else 0)

    @property
    def max_gates(self) -> int:
        return (1 << self.b) - self.r

    @property
    def gene_len(self) -> int:
        return 4 + 2 * self.b

    @property
    def total_len(self) -> int:
        return self.m * self.b + self.max_gates * self.gene_len

    def gene_offset(self, k: int) -> int:
        return self.m * self.b + k * self.gene_len

    def ref_to_address(self, ref: SignalRef) -> int:
        if ref.is_input:
            return self.max_gates + ref.index
        return ref.index


def default_address_width(r: int, seed_gates: int, q: int) -> int:
    """Smallest b whose gene space holds a duplication-style circuit.

    That needs the seed, a copy and a checker tree: 2*g + 6*(q - 1) slots.
    """
    need = max(1, 2 * seed_gates + 6 * max(q - 1, 0))
    b = 1
    while (1 << b) - r < need or (1 << b) <= r:
        b += 1
    return b


@dataclass(frozen=True)
class Genotype:
    """Bit string of layout.total_len bits; genotype bit 0 is the MSB of value."""

    value: int
    layout: GenomeLayout

    def __post_init__(self) -> None:
        if not 0 <= self.value < (1 << self.layout.total_len):
            raise ValueError("genotype value does not fit the layout")

    def __len__(self) -> int:
        return self.layout.total_len

    def bit(self, pos: int) -> int:
        return (self.value >> (self.layout.total_len - 1 - pos)) & 1

    def field(self, offset: int, width: int) -> int:
        shift = self.layout.total_len - offset - width
        return (self.value >> shift) & ((1 << width) - 1)

    def with_field(self, offset: int, width: int, value: int) -> "Genotype":
        shift = self.layout.total_len - offset - width
        mask = ((1 << width) - 1) << shift
        return Genotype((self.value & ~mask) | (value << shift), self.layout)

    def to_hex(self) -> str:
        """Bits packed 8 per byte, bit 8k+i at byte k position 7-i, as hex."""
        nbytes = (self.layout.total_len + 7) // 8
        padded = self.value << (nbytes * 8 - self.layout.total_len)
        return padded.to_bytes(nbytes, "big").hex()

    @classmethod
    def from_hex(cls, text: str, layout: GenomeLayout) -> "Genotype":
        nbytes = (layout.total_len + 7) // 8
        raw = bytes.fromhex(text)
        if len(raw) != nbytes:
            raise ValueError(
                f"hex genotype is {len(raw)} bytes, layout needs {nbytes}"
            )
        padded = int.from_bytes(raw, "big")
        pad_bits = nbytes * 8 - layout.total_len
        if padded & ((1 << pad_bits) - 1):
            raise ValueError("nonzero padding bits in serialized genotype")
        return cls(padded >> pad_bits, layout)


@dataclass(frozen=True)
class LockMask:
    """Genotype positions no genetic operator may write."""

    locked: frozenset[int]

    @classmethod
    def empty(cls) -> "LockMask":
        return cls(frozenset())

    def covers_any(self, offset: int, width: int) -> bool:
        return any(p in self.locked for p in range(offset, offset + width))


@lru_cache(maxsize=64)
def _unlocked_positions(layout: GenomeLayout, lock: LockMask) -> tuple[int, ...]:
    return tuple(p for p in range(layout.total_len) if p not in lock.locked)


@lru_cache(maxsize=64)
def _unlocked_address_fields(layout: GenomeLayout, lock: LockMask) -> tuple[int, ...]:
    offsets = [i * layout.b for i in range(layout.m)]
    for k in range(layout.max_gates):
        base = layout.gene_offset(k)
        offsets.append(base + 4)
        offsets.append(base + 4 + layout.b)
    return tuple(o for o in offsets if not lock.covers_any(o, layout.b))


@lru_cache(maxsize=64)
def _unlocked_genes(layout: GenomeLayout, lock: LockMask) -> tuple[int, ...]:
    return tuple(
        k
        for k in range(layout.max_gates)
        if not lock.covers_any(layout.gene_offset(k), layout.gene_len)
    )


def decode_with_slots(
    genotype: Genotype, rng: random.Random
) -> tuple[Circuit, tuple[int, ...]]:
    """Decode to a feed-forward circuit, also returning each gate's gene slot.

    Outputs are routed first (y_0..y_{q-1}, then z_0, z_1 when present).  A
    depth-first search from each output, source a before source b, breaks any
    cycle by rerouting the offending edge to a primary input drawn from rng.
    Repair changes the decoded circuit only, never the genotype.  Gates with
    no path to an output are dropped.
    """
    lay = genotype.layout
    b = lay.b
    M = lay.max_gates
    L = lay.total_len
    v = genotype.value
    bmask = (1 << b) - 1

    out_addrs = [
        (v >> (L - (i + 1) * b)) & bmask for i in range(lay.m)
    ]
    tts: list[int] = []
    srcs: list[list[int]] = []
    off = lay.m * b
    for _ in range(M):
        shift = L - off - 4
        tts.append(_REV4[(v >> shift) & 0xF])
        a_addr = (v >> (shift - b)) & bmask
        b_addr = (v >> (shift - 2 * b)) & bmask
        srcs.append([a_addr, b_addr])
        off += lay.gene_len

    # Iterative DFS; status 1 marks gates on the current search path.
    status = [0] * M
    order: list[int] = []

    def visit(root: int) -> None:
        status[root] = 1
        stack: list[list[int]] = [[root, 0]]
        while stack:
            top = stack[-1]
            g, si = top
            if si == 2:
                status[g] = 2
                order.append(g)
                stack.pop()
                continue
            top[1] = si + 1
            addr = srcs[g][si]
            if addr >= M:
                continue
            st = status[addr]
            if st == 1:
                # Edge back onto the current path: break the loop here.
                srcs[g][si] = M + rng.randrange(lay.r)
            elif st == 0:
                status[addr] = 1
                stack.append([addr, 0])

    for addr in out_addrs:
        if addr < M and status[addr] == 0:
            visit(addr)

    position = {slot: i for i, slot in enumerate(order)}

    def addr_ref(addr: int) -> SignalRef:
        if addr >= M:
            return SignalRef.x(addr - M)
        return SignalRef.g(position[addr])

    gates = tuple(
        Gate(TruthTable2(tts[slot]), addr_ref(srcs[slot][0]), addr_ref(srcs[slot][1]))
        for slot in order
    )
    func = tuple(addr_ref(a) for a in out_addrs[: lay.q])
    rails = None
    if lay.rails:
        rails = (addr_ref(out_addrs[lay.q]), addr_ref(out_addrs[lay.q + 1]))
    return Circuit(lay.r, gates, func, rails), tuple(order)


def decode(genotype: Genotype, rng: random.Random) -> Circuit:
    return decode_with_slots(genotype, rng)[0]


def seed_lock_mask(circuit: Circuit, layout: GenomeLayout) -> LockMask:
    """Positions covering the seed's genes and function-output routing fields."""
    locked: set[int] = set()
    for i in range(len(circuit.func_outputs)):
        locked.update(range(i * layout.b, (i + 1) * layout.b))
    for k in range(len(circuit.gates)):
        base = layout.gene_offset(k)
        locked.update(range(base, base + layout.gene_len))
    return LockMask(frozenset(locked))


def encode_seed(
    circuit: Circuit,
    layout: GenomeLayout,
    rng: random.Random,
    lock_seed: bool = False,
) -> tuple[Genotype, LockMask]:
    """Embed a circuit into gene slots 0..gates-1 and randomize the rest.

    Function-output routing (and rail routing, when the seed carries rails)
    is set to the seed's drivers; every remaining bit is drawn uniformly from
    rng.  With lock_seed=True the returned mask covers the seed genes and the
    function-output routing fields.
    """
    if len(circuit.gates) > layout.max_gates:
        raise ValueError(
            f"seed has {len(circuit.gates)} gates, layout holds {layout.max_gates}"
        )
    if circuit.r != layout.r or circuit.q != layout.q:
        raise ValueError("seed shape does not match layout")

    g = Genotype(rng.getrandbits(layout.total_len), layout)
    for i, ref in enumerate(circuit.func_outputs):
        g = g.with_field(i * layout.b, layout.b, layout.ref_to_address(ref))
    if circuit.error_rails is not None and layout.rails:
        for j, ref in enumerate(circuit.error_rails):
            g = g.with_field(
                (layout.q + j) * layout.b, layout.b, layout.ref_to_address(ref)
            )
    for k, gate in enumerate(circuit.gates):
        base = layout.gene_offset(k)
        g = g.with_field(base, 4, _REV4[gate.tt.value])
        g = g.with_field(base + 4, layout.b, layout.ref_to_address(gate.a))
        g = g.with_field(base + 4 + layout.b, layout.b, layout.ref_to_address(gate.b))

    lock = seed_lock_mask(circuit, layout) if lock_seed else LockMask.empty()
    return g, lock


def mutate_bit(g: Genotype, lock: LockMask, rng: random.Random) -> Genotype:
    """Flip exactly one uniformly chosen unlocked bit."""
    positions = _unlocked_positions(g.layout, lock)
    if not positions:
        raise ValueError("every genotype position is locked")
    pos = positions[rng.randrange(len(positions))]
    return Genotype(g.value ^ (1 << (g.layout.total_len - 1 - pos)), g.layout)


def mutate_routing(g: Genotype, lock: LockMask, rng: random.Random) -> Genotype:
    """Replace one unlocked b-bit address field with a uniform random value.

    Gate source fields and output routing fields are both eligible; the new
    value may equal the old one.
    """
    fields = _unlocked_address_fields(g.layout, lock)
    if not fields:
        raise ValueError("no unlocked address field")
    offset = fields[rng.randrange(len(fields))]
    return g.with_field(offset, g.layout.b, rng.getrandbits(g.layout.b))


def mutate_translocate(g: Genotype, lock: LockMask, rng: random.Random) -> Genotype:
    """Copy one whole gene (gate plus routing) over another.

    The destination gene j is drawn uniformly from the fully unlocked genes,
    then the source i uniformly from all other genes.
    """
    lay = g.layout
    if lay.max_gates < 2:
        raise ValueError("need at least two genes to translocate")
    dests = _unlocked_genes(lay, lock)
    if not dests:
        raise ValueError("no unlocked destination gene")
    j = dests[rng.randrange(len(dests))]
    i = rng.randrange(lay.max_gates - 1)
    if i >= j:
        i += 1
    content = g.field(lay.gene_offset(i), lay.gene_len)
    return g.with_field(lay.gene_offset(j), lay.gene_len, content)


def crossover_single_point(
    a: Genotype, b: Genotype, rng: random.Random
) -> Genotype:
    """Offspring takes a's bits before point p and b's bits from p onward."""
    if a.layout != b.layout:
        raise ValueError("parents have different layouts")
    L = a.layout.total_len
    p = rng.randrange(1, L)
    high = ((1 << p) - 1) << (L - p)
    low = (1 << L) - 1 - high
    return Genotype((a.value & high) | (b.value & low), a.layout)

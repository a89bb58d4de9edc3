"""Evolutionary synthesis of totally self-checking combinational circuits."""

from .netlist import (
    Circuit,
    Fault,
    FaultSite,
    Gate,
    SignalRef,
    TruthTable2,
    build_duplication_baseline,
    build_two_rail_checker_pair,
    duplication_overhead,
    live_set,
    two_rail_checker_circuit,
)
from .sim import FaultScope, ResponseMatrix, enumerate_faults, simulate
from .fitness import FitnessVector, compare_lex, evaluate_checking, evaluate_circuit, f_function, f_parsimony
from .genome import (
    GenomeLayout,
    Genotype,
    LockMask,
    crossover_single_point,
    decode,
    default_address_width,
    encode_seed,
    mutate_bit,
    mutate_routing,
    mutate_translocate,
)
from .verify import check_theorem2, codespace_report, verify_fs, verify_st, verify_tsc
from .formats import (
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
from .evolve import IslandConfig, MigrantMsg, OffspringMix, RunResult, run, run_distributed

__all__ = [name for name in dir() if not name.startswith("_")]

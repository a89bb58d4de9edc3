"""Command-line interface: evolve, verify, baseline, export, report."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import evolve as evolve_mod
from .evolve import IslandConfig, RunResult
from .formats import (
    ParseError,
    TargetSpec,
    circuit_to_json,
    export_dot,
    parse_blif,
    parse_pla,
    read_native,
    write_native,
)
from .genome import GenomeLayout, default_address_width
from .netlist import Circuit, build_duplication_baseline, duplication_overhead, live_set
from .verify import codespace_report, verify_tsc

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunReport:
    """Champion summary in the style of an overhead-comparison table row."""

    benchmark: str
    seed_gates: int
    champion_live_gates: int
    overhead: int
    dup_overhead: int
    ratio: float | None  # only present for verified-TSC champions
    verdict: str
    shrunk_function_logic: bool
    fitness: list[float]
    trajectory: list[dict]


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_target(path: str) -> TargetSpec:
    return parse_pla(_read(path))


def _load_seed(path: str) -> Circuit:
    return parse_blif(_read(path))


def _load_circuit(path: str) -> Circuit:
    return read_native(_read(path))


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in _read(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"bad config line (want key=value): {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_EVOLVE_DEFAULTS = {
    "mode": "unconstrained",
    "b": None,
    "islands": 8,
    "budget_evals": 1_000_000,
    "budget_seconds": None,
    "seed_rng": 0,
    "migration_rate": 0.1,
    "goal_overhead": None,
    "checkpoint_every": 50,
    "applied_words": None,
    "parallel": False,
    "no_stop_on_goal": False,
}

_CASTS = {
    "b": int,
    "islands": int,
    "budget_evals": int,
    "budget_seconds": float,
    "seed_rng": int,
    "migration_rate": float,
    "goal_overhead": int,
    "checkpoint_every": int,
    "parallel": lambda s: str(s).lower() in ("1", "true", "yes"),
    "no_stop_on_goal": lambda s: str(s).lower() in ("1", "true", "yes"),
}


def _merge_option(name: str, cli_value, config_values: dict[str, str]):
    if cli_value is not None:
        return cli_value
    if name in config_values:
        cast = _CASTS.get(name, str)
        return cast(config_values[name])
    return _EVOLVE_DEFAULTS[name]


def _cmd_evolve(args: argparse.Namespace) -> int:
    config_values = _parse_config_file(args.config) if args.config else {}

    def opt(name: str):
        return _merge_option(name, getattr(args, name), config_values)

    target = _load_target(args.target)
    seed = _load_seed(args.seed)
    if (seed.r, seed.q) != (target.r, target.q):
        print(
            f"error: seed is {seed.r} in/{seed.q} out but target is "
            f"{target.r} in/{target.q} out",
            file=sys.stderr,
        )
        return EXIT_USAGE

    g = len(seed.gates)
    b = opt("b")
    if b is None:
        b = default_address_width(seed.r, g, seed.q)
    layout = GenomeLayout(r=seed.r, q=seed.q, b=b)
    if len(seed.gates) > layout.max_gates:
        print(f"error: seed needs {len(seed.gates)} gene slots, layout has "
              f"{layout.max_gates}; raise --b", file=sys.stderr)
        return EXIT_USAGE

    dup = duplication_overhead(g, seed.q)
    goal_overhead = opt("goal_overhead")
    if goal_overhead is None:
        goal_overhead = dup - 1
    mode = {"unconstrained": "unconstrained", "nonintrusive": "non_intrusive"}.get(
        opt("mode")
    )
    if mode is None:
        print(f"error: unknown mode {opt('mode')!r}", file=sys.stderr)
        return EXIT_USAGE

    applied = opt("applied_words")
    word_mask = int(applied, 16) if applied is not None else None

    config = IslandConfig(
        layout=layout,
        migration_rate=opt("migration_rate"),
        rng_seed=opt("seed_rng"),
        mode=mode,
        n_islands=opt("islands"),
        max_evals=opt("budget_evals"),
        max_seconds=opt("budget_seconds"),
        goal_size=g + goal_overhead,
        stop_on_goal=not opt("no_stop_on_goal"),
        word_mask=word_mask,
        checkpoint_every=opt("checkpoint_every"),
    )

    out_dir = Path(args.out) if args.out else None
    runner = evolve_mod.run_distributed if opt("parallel") else evolve_mod.run
    result = runner(config, target, seed, out_dir=out_dir)

    champion = result.champion
    report = verify_tsc(champion.circuit, word_mask)
    name = Path(args.target).stem
    s = champion.fitness.live_gates
    overhead = s - g
    run_record = {
        "benchmark": name,
        "target": args.target,
        "seed": args.seed,
        "mode": mode,
        "layout": {"r": layout.r, "q": layout.q, "b": layout.b},
        "seed_gates": g,
        "dup_overhead": dup,
        "evals": result.evals,
        "elapsed_s": round(result.elapsed, 3),
        "goal_reached": result.goal_reached,
        "champion": {
            "genotype": champion.genotype.to_hex(),
            "fitness": list(champion.fitness.key()),
            "live_gates": s,
            "overhead": overhead,
        },
        "verification": {
            "is_tsc": report.is_tsc,
            "is_st": report.is_st,
            "is_fs": report.is_fs,
            "false_alarm": report.false_alarm,
            "undetected_faults": len(report.undetected),
            "unsignalled_incorrect": len(report.violations),
        },
        "history": result.history,
    }
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "champion.json").write_text(
            write_native(champion.circuit), encoding="utf-8"
        )
        (out_dir / "champion.hex").write_text(
            champion.genotype.to_hex() + "\n", encoding="utf-8"
        )
        (out_dir / "run.json").write_text(
            json.dumps(run_record, indent=2) + "\n", encoding="utf-8"
        )
    print(
        f"{name}: fitness={champion.fitness.key()} live_gates={s} "
        f"overhead={overhead} (duplication {dup}) evals={result.evals}"
    )
    print(f"verification: {report.summary()}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    word_mask = int(args.applied_words, 16) if args.applied_words else None
    report = verify_tsc(circuit, word_mask)
    print(report.summary())
    for fault in report.undetected[:10]:
        print(f"  undetected: {fault}")
    for fault, word in report.violations[:10]:
        print(f"  unsignalled incorrect output: fault {fault} at word {word}")
    return EXIT_OK if report.is_tsc else EXIT_VERIFY_FAILED


def _cmd_baseline(args: argparse.Namespace) -> int:
    seed = _load_seed(args.seed)
    g = len(seed.gates)
    dup = duplication_overhead(g, seed.q)
    baseline = build_duplication_baseline(seed)
    print(f"seed: {g} gates, {seed.q} outputs")
    print(f"duplication overhead: {dup}")
    print(f"baseline size: {len(live_set(baseline))} live gates")
    report = codespace_report(seed, baseline)
    print(report.summary())
    for fault in report.undetectable_checker_faults[:10]:
        print(f"  undetectable checker fault: {fault}")
    if args.out:
        Path(args.out).write_text(write_native(baseline), encoding="utf-8")
    return EXIT_OK


def _cmd_export(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    Path(args.dot).write_text(export_dot(circuit), encoding="utf-8")
    print(f"wrote {args.dot}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    run_path = Path(args.run) / "run.json"
    if not run_path.exists():
        print(f"error: {run_path} not found", file=sys.stderr)
        return EXIT_USAGE
    record = json.loads(run_path.read_text(encoding="utf-8"))
    g = record["seed_gates"]
    s = record["champion"]["live_gates"]
    overhead = s - g
    dup = record["dup_overhead"]
    if args.function_core is not None:
        dup = duplication_overhead(args.function_core, record["layout"]["q"])
    is_tsc = record["verification"]["is_tsc"]
    report = RunReport(
        benchmark=record["benchmark"],
        seed_gates=g,
        champion_live_gates=s,
        overhead=overhead,
        dup_overhead=dup,
        ratio=(overhead / dup) if is_tsc and dup > 0 else None,
        verdict="TSC" if is_tsc else "not TSC",
        shrunk_function_logic=s < g,
        fitness=record["champion"]["fitness"],
        trajectory=record["history"],
    )
    print(json.dumps(asdict(report), indent=2))
    ratio = f"{report.ratio:.2f}" if report.ratio is not None else "-"
    print()
    print(f"{'Benchmark':<12}{'Gates':>7}{'Oh.':>6}{'Dup.':>6}{'Oh./Dup.':>10}  Verdict")
    print(
        f"{report.benchmark:<12}{g:>7}{overhead:>6}{dup:>6}{ratio:>10}  {report.verdict}"
    )
    if report.shrunk_function_logic:
        print(
            "note: champion uses fewer live gates than the seed's function "
            "logic; pass --function-core N to compare against the smaller core"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tscsynth",
        description="Evolve and verify totally self-checking combinational circuits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve a self-checking circuit from a seed")
    p.add_argument("--target", required=True, help="PLA file with the output function")
    p.add_argument("--seed", required=True, help="BLIF seed netlist (two-input gates)")
    p.add_argument("--mode", choices=["unconstrained", "nonintrusive"], default=None)
    p.add_argument("--b", type=int, default=None, help="address width in bits")
    p.add_argument("--islands", type=int, default=None)
    p.add_argument("--budget-evals", dest="budget_evals", type=int, default=None)
    p.add_argument("--budget-seconds", dest="budget_seconds", type=float, default=None)
    p.add_argument("--seed-rng", dest="seed_rng", type=int, default=None)
    p.add_argument("--migration-rate", dest="migration_rate", type=float, default=None)
    p.add_argument("--goal-overhead", dest="goal_overhead", type=int, default=None)
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int, default=None)
    p.add_argument("--applied-words", dest="applied_words", default=None,
                   help="hex mask of applied input words (default: all)")
    p.add_argument("--parallel", action="store_const", const=True, default=None,
                   help="one process per island with socket migration")
    p.add_argument("--no-stop-on-goal", dest="no_stop_on_goal",
                   action="store_const", const=True, default=None)
    p.add_argument("--config", default=None, help="key=value file; CLI flags win")
    p.add_argument("--out", default=None, help="directory for run artifacts")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("verify", help="prove or refute the TSC property")
    p.add_argument("--circuit", required=True, help="native JSON circuit")
    p.add_argument("--applied-words", dest="applied_words", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("baseline", help="build the duplication baseline for a seed")
    p.add_argument("--seed", required=True, help="BLIF seed netlist")
    p.add_argument("--out", default=None, help="write the baseline circuit JSON here")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("export", help="render a circuit as graphviz")
    p.add_argument("--circuit", required=True)
    p.add_argument("--dot", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("report", help="summarize a finished run directory")
    p.add_argument("--run", required=True)
    p.add_argument("--function-core", dest="function_core", type=int, default=None,
                   help="gate count of the function core for overhead comparison")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

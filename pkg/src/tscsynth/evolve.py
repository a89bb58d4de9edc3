"""Generational GA per island, spiral-grid topology, migration, run control.

Each island owns a population of 32 genotypes.  A generation keeps the top
two individuals as elites and refills the rest with single-point crossover
offspring, single-bit mutants, whole-gene translocation mutants and routing
mutants, parents drawn by linear rank selection in which the best individual
is twice as likely to be picked as the median.  Islands sit on a square grid
filled in spiral order and occasionally emigrate individuals to islands
chosen with probability inverse to grid distance.
"""

from __future__ import annotations

import hashlib
import json
import math
import multiprocessing
import queue
import random
import socket
import threading
import time
from collections import deque
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import accumulate
from pathlib import Path

from .fitness import FitnessVector, evaluate_circuit
from .formats import TargetSpec, circuit_to_json
from .genome import (
    Genotype,
    GenomeLayout,
    LockMask,
    crossover_single_point,
    decode,
    encode_seed,
    mutate_bit,
    mutate_routing,
    mutate_translocate,
    seed_lock_mask,
)
from .netlist import Circuit


@dataclass(frozen=True)
class OffspringMix:
    elites: int = 2
    crossover: int = 6
    bit_mutants: int = 16
    translocations: int = 2
    routing_mutants: int = 6

    @property
    def total(self) -> int:
        return (
            self.elites
            + self.crossover
            + self.bit_mutants
            + self.translocations
            + self.routing_mutants
        )


@dataclass(frozen=True)
class IslandConfig:
    layout: GenomeLayout
    population_size: int = 32
    mix: OffspringMix = OffspringMix()
    migration_rate: float = 0.1
    rng_seed: int = 0
    mode: str = "unconstrained"  # or "non_intrusive"
    n_islands: int = 1
    max_evals: int | None = None
    max_seconds: float | None = None
    goal_size: int | None = None
    stop_on_goal: bool = True
    word_mask: int | None = None
    checkpoint_every: int = 50

    def __post_init__(self) -> None:
        if self.mix.total != self.population_size:
            raise ValueError("offspring mix does not sum to the population size")
        if self.mode not in ("unconstrained", "non_intrusive"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n_islands < 1:
            raise ValueError("need at least one island")


@dataclass(frozen=True)
class MigrantMsg:
    genotype: str  # hex serialization
    fitness: tuple[float, float, float, float]
    source: tuple[int, int]
    generation: int
    layout: tuple[int, int, int]  # (r, q, b)

    def to_json(self) -> str:
        return json.dumps(
            {
                "genotype": self.genotype,
                "fitness": list(self.fitness),
                "source": list(self.source),
                "generation": self.generation,
                "layout": {"r": self.layout[0], "q": self.layout[1], "b": self.layout[2]},
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "MigrantMsg":
        obj = json.loads(line)
        lay = obj["layout"]
        return cls(
            genotype=str(obj["genotype"]),
            fitness=tuple(float(v) for v in obj["fitness"]),
            source=tuple(int(v) for v in obj["source"]),
            generation=int(obj["generation"]),
            layout=(int(lay["r"]), int(lay["q"]), int(lay["b"])),
        )


@dataclass
class Individual:
    genotype: Genotype
    circuit: Circuit
    fitness: FitnessVector


def _fitness_key(ind: Individual):
    return ind.fitness.key()


@lru_cache(maxsize=None)
def _rank_cum_weights(n: int) -> tuple[int, ...]:
    # Weight (n-1) - i for rank i makes the best twice as likely as the
    # median for even n; the worst rank gets weight zero.
    return tuple(accumulate(n - 1 - i for i in range(n)))


def select_parent(sorted_population: list, rng: random.Random):
    """Linear rank selection over a population sorted best-first."""
    n = len(sorted_population)
    if n == 0:
        raise ValueError("empty population")
    if n == 1:
        return sorted_population[0]
    return rng.choices(
        sorted_population, cum_weights=_rank_cum_weights(n), k=1
    )[0]


def spiral_coords(index: int) -> tuple[int, int]:
    """Grid position of the index-th island on the outward square spiral."""
    if index < 0:
        raise ValueError("negative island index")
    x = y = 0
    remaining = index
    run = 1
    leg = 0
    dirs = ((1, 0), (0, 1), (-1, 0), (0, -1))
    while remaining > 0:
        dx, dy = dirs[leg % 4]
        step = min(run, remaining)
        x += dx * step
        y += dy * step
        remaining -= step
        if step < run:
            break
        leg += 1
        if leg % 2 == 0:
            run += 1
    return (x, y)


def migration_weights(
    source: tuple[int, int], islands: list[tuple[int, int]]
) -> list[float]:
    """Inverse-Euclidean-distance weight per island; the source gets zero."""
    weights = []
    for coords in islands:
        if coords == source:
            weights.append(0.0)
        else:
            weights.append(
                1.0 / math.hypot(coords[0] - source[0], coords[1] - source[1])
            )
    return weights


def pick_migration_target(
    source: tuple[int, int],
    islands: list[tuple[int, int]],
    rng: random.Random,
) -> tuple[int, int]:
    """Destination drawn with probability inverse to distance from the source."""
    weights = migration_weights(source, islands)
    if sum(weights) == 0.0:
        raise ValueError("no island other than the source to migrate to")
    return rng.choices(islands, weights=weights, k=1)[0]


def _island_rng_seed(master_seed: int, island_index: int) -> int:
    # Stable derivation so adding islands never perturbs existing streams.
    digest = hashlib.sha256(f"{master_seed}:{island_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class Budget:
    def __init__(self, max_evals: int | None, max_seconds: float | None):
        self.max_evals = max_evals
        self.max_seconds = max_seconds
        self.evals = 0
        self.started = time.monotonic()

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def exhausted(self) -> bool:
        if self.max_evals is not None and self.evals >= self.max_evals:
            return True
        if self.max_seconds is not None and self.elapsed >= self.max_seconds:
            return True
        return False


class Island:
    """One population plus its private random stream and immigrant inbox."""

    def __init__(
        self,
        index: int,
        config: IslandConfig,
        target: TargetSpec,
        seed_circuit: Circuit,
        lock: LockMask,
        budget: Budget,
    ):
        self.index = index
        self.coords = spiral_coords(index)
        self.config = config
        self.target = target
        self.seed_circuit = seed_circuit
        self.lock = lock
        self.budget = budget
        self.rng = random.Random(_island_rng_seed(config.rng_seed, index))
        self.generation = 0
        self.inbox: deque[MigrantMsg] = deque()
        self.population: list[Individual] = []

    def populate(self) -> None:
        layout = self.config.layout
        lock_seed = self.config.mode == "non_intrusive"
        individuals = []
        for _ in range(self.config.population_size):
            genotype, _ = encode_seed(self.seed_circuit, layout, self.rng, lock_seed)
            individuals.append(self._evaluate(genotype))
        individuals.sort(key=_fitness_key, reverse=True)
        self.population = individuals

    def _evaluate(self, genotype: Genotype) -> Individual:
        circuit = decode(genotype, self.rng)
        fv = evaluate_circuit(
            circuit,
            self.target.columns,
            self.config.layout.max_gates,
            self.config.word_mask,
        )
        self.budget.evals += 1
        return Individual(genotype, circuit, fv)

    def _integrate_immigrants(self) -> None:
        layout = self.config.layout
        dims = (layout.r, layout.q, layout.b)
        while self.inbox:
            msg = self.inbox.popleft()
            if msg.layout != dims:
                continue  # drop mismatched layouts
            try:
                genotype = Genotype.from_hex(msg.genotype, layout)
            except ValueError:
                continue
            # Immigrants are re-evaluated locally and replace the current
            # worst individual (always non-elite for populations above two).
            self.population[-1] = self._evaluate(genotype)
            self.population.sort(key=_fitness_key, reverse=True)

    def step(self) -> None:
        """One generation: elites carried with their cached evaluation, every
        other slot refilled and evaluated."""
        self._integrate_immigrants()
        pop = self.population
        mix = self.config.mix
        rng = self.rng
        lock = self.lock

        offspring: list[Individual] = list(pop[: mix.elites])
        for _ in range(mix.crossover):
            pa = select_parent(pop, rng)
            pb = select_parent(pop, rng)
            child = crossover_single_point(pa.genotype, pb.genotype, rng)
            offspring.append(self._evaluate(child))
        for _ in range(mix.bit_mutants):
            parent = select_parent(pop, rng)
            offspring.append(self._evaluate(mutate_bit(parent.genotype, lock, rng)))
        for _ in range(mix.translocations):
            parent = select_parent(pop, rng)
            offspring.append(
                self._evaluate(mutate_translocate(parent.genotype, lock, rng))
            )
        for _ in range(mix.routing_mutants):
            parent = select_parent(pop, rng)
            offspring.append(
                self._evaluate(mutate_routing(parent.genotype, lock, rng))
            )
        offspring.sort(key=_fitness_key, reverse=True)
        self.population = offspring
        self.generation += 1

    def make_migrant(self) -> MigrantMsg:
        chosen = select_parent(self.population, self.rng)
        layout = self.config.layout
        return MigrantMsg(
            genotype=chosen.genotype.to_hex(),
            fitness=chosen.fitness.key(),
            source=self.coords,
            generation=self.generation,
            layout=(layout.r, layout.q, layout.b),
        )


@dataclass
class RunResult:
    champion: Individual
    layout: GenomeLayout
    history: list[dict]
    evals: int
    elapsed: float
    goal_reached: bool
    perfect_champions: list[tuple[str, Circuit]] = field(default_factory=list)


class Engine:
    """Serial multi-island driver; deterministic for a fixed configuration.

    Islands are stepped round-robin.  With a transport attached (one-island
    worker mode) emigrants go out through it and immigrants arrive from it;
    otherwise migrants move between this engine's own islands.  Islands can
    be added or removed between generations.
    """

    def __init__(
        self,
        config: IslandConfig,
        target: TargetSpec,
        seed_circuit: Circuit,
        out_dir: str | Path | None = None,
        transport=None,
        island_indices: list[int] | None = None,
        stop_flag=None,
    ):
        if seed_circuit.r != config.layout.r or seed_circuit.q != config.layout.q:
            raise ValueError("seed circuit shape does not match layout")
        if target.r != config.layout.r or target.q != config.layout.q:
            raise ValueError("target shape does not match layout")
        self.config = config
        self.target = target
        self.seed_circuit = seed_circuit
        self.transport = transport
        self.stop_flag = stop_flag
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.budget = Budget(config.max_evals, config.max_seconds)
        self.lock = (
            seed_lock_mask(seed_circuit, config.layout)
            if config.mode == "non_intrusive"
            else LockMask.empty()
        )
        if config.word_mask is None and target.word_mask is not None:
            self.config = replace(config, word_mask=target.word_mask)
        indices = island_indices if island_indices is not None else list(
            range(config.n_islands)
        )
        self._next_index = max(indices) + 1 if indices else 0
        self.islands = [self._new_island(i) for i in indices]
        self.generation = 0
        self.champion: Individual | None = None
        self.history: list[dict] = []
        self.perfect_champions: list[tuple[str, Circuit]] = []
        self._perfect_seen: set[str] = set()
        for island in self.islands:
            island.populate()
            self._note_champion(island)

    def _new_island(self, index: int) -> Island:
        return Island(
            index,
            self.config,
            self.target,
            self.seed_circuit,
            self.lock,
            self.budget,
        )

    def add_island(self) -> Island:
        island = self._new_island(self._next_index)
        self._next_index += 1
        island.populate()
        self.islands.append(island)
        self._note_champion(island)
        return island

    def remove_island(self, index: int) -> None:
        self.islands = [isl for isl in self.islands if isl.index != index]

    def _note_champion(self, island: Island) -> None:
        best = island.population[0]
        if self.champion is None or _fitness_key(best) > _fitness_key(self.champion):
            self.champion = best
            self.history.append(
                {
                    "evals": self.budget.evals,
                    "generation": self.generation,
                    "island": island.index,
                    "fitness": list(best.fitness.key()),
                    "live_gates": best.fitness.live_gates,
                }
            )
            if best.fitness.perfect_checking:
                hex_form = best.genotype.to_hex()
                if hex_form not in self._perfect_seen:
                    self._perfect_seen.add(hex_form)
                    self.perfect_champions.append((hex_form, best.circuit))

    def goal_met(self) -> bool:
        if not self.config.stop_on_goal or self.champion is None:
            return False
        fv = self.champion.fitness
        if not fv.perfect_checking:
            return False
        return self.config.goal_size is None or fv.live_gates <= self.config.goal_size

    def _emit_migration(self, island: Island) -> None:
        rate = self.config.migration_rate
        if rate <= 0.0:
            return
        if self.transport is not None:
            if island.rng.random() < rate:
                self.transport.send(island.make_migrant())
            return
        if len(self.islands) < 2:
            return
        if island.rng.random() < rate:
            msg = island.make_migrant()
            coords = [isl.coords for isl in self.islands]
            dest = pick_migration_target(island.coords, coords, island.rng)
            for isl in self.islands:
                if isl.coords == dest:
                    isl.inbox.append(msg)
                    break

    def step_generation(self) -> None:
        """One global generation across all islands."""
        for island in self.islands:
            if self.budget.exhausted() or self._externally_stopped():
                return
            if self.transport is not None:
                island.inbox.extend(self.transport.poll())
            island.step()
            self._note_champion(island)
            self._emit_migration(island)
            if self.goal_met():
                return
        self.generation += 1
        if (
            self.out_dir is not None
            and self.config.checkpoint_every > 0
            and self.generation % self.config.checkpoint_every == 0
        ):
            self._write_checkpoint()

    def _externally_stopped(self) -> bool:
        return self.stop_flag is not None and self.stop_flag()

    def _write_checkpoint(self) -> None:
        if self.champion is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        layout = self.config.layout
        record = json.loads(
            MigrantMsg(
                genotype=self.champion.genotype.to_hex(),
                fitness=self.champion.fitness.key(),
                source=(0, 0),
                generation=self.generation,
                layout=(layout.r, layout.q, layout.b),
            ).to_json()
        )
        record["evals"] = self.budget.evals
        record["elapsed_s"] = round(self.budget.elapsed, 3)
        with (self.out_dir / "checkpoints.ndjson").open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    def run(self) -> RunResult:
        while not (
            self.budget.exhausted() or self.goal_met() or self._externally_stopped()
        ):
            self.step_generation()
        assert self.champion is not None
        return RunResult(
            champion=self.champion,
            layout=self.config.layout,
            history=self.history,
            evals=self.budget.evals,
            elapsed=self.budget.elapsed,
            goal_reached=self.goal_met(),
            perfect_champions=list(self.perfect_champions),
        )


def run(
    config: IslandConfig,
    target: TargetSpec,
    seed_circuit: Circuit,
    out_dir: str | Path | None = None,
) -> RunResult:
    """Seed every island, evolve until budget or goal, return the champion."""
    return Engine(config, target, seed_circuit, out_dir=out_dir).run()


# ---------------------------------------------------------------------------
# Optional process-per-island mode.  Each worker owns one island and talks
# newline-delimited MigrantMsg JSON over a TCP stream to a relay, which picks
# destinations by the same inverse-distance rule.  The first line on each
# connection is a one-off handshake naming the worker's island; everything
# after it is plain MigrantMsg lines in both directions.  Messages with a
# mismatched layout are dropped by the receiving island.
# ---------------------------------------------------------------------------


class SocketTransport:
    def __init__(self, sock: socket.socket):
        self.sock = sock
        self._file = sock.makefile("r", encoding="utf-8")
        self._queue: "queue.Queue[MigrantMsg]" = queue.Queue()
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()

    def _drain(self) -> None:
        try:
            for line in self._file:
                try:
                    self._queue.put(MigrantMsg.from_json(line))
                except (ValueError, KeyError):
                    continue
        except OSError:
            pass

    def send(self, msg: MigrantMsg) -> None:
        try:
            self.sock.sendall((msg.to_json() + "\n").encode("utf-8"))
        except OSError:
            pass  # relay gone; migrant dropped

    def poll(self) -> list[MigrantMsg]:
        out = []
        while True:
            try:
                out.append(self._queue.get_nowait())
            except queue.Empty:
                return out

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


class MigrationRelay:
    """Accepts one connection per island and forwards migrants between them."""

    def __init__(self, n_islands: int, rng_seed: int):
        self.n_islands = n_islands
        self.coords = [spiral_coords(i) for i in range(n_islands)]
        self.rng = random.Random(_island_rng_seed(rng_seed, 1 << 30))
        self._server = socket.create_server(("127.0.0.1", 0))
        self.port = self._server.getsockname()[1]
        self._conns: dict[int, socket.socket] = {}
        self._lock = threading.Lock()
        self._closing = False
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def _accept_loop(self) -> None:
        while not self._closing:
            try:
                conn, _ = self._server.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: socket.socket) -> None:
        fh = conn.makefile("r", encoding="utf-8")
        try:
            handshake = json.loads(fh.readline())
            island = int(handshake["island"])
        except (ValueError, KeyError, TypeError):
            conn.close()
            return
        with self._lock:
            self._conns[island] = conn
        source = self.coords[island]
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                dest = pick_migration_target(source, self.coords, self.rng)
            except ValueError:
                continue
            dest_index = self.coords.index(dest)
            with self._lock:
                target = self._conns.get(dest_index)
            if target is None:
                continue  # destination not up; migrant dropped
            try:
                target.sendall((line + "\n").encode("utf-8"))
            except OSError:
                continue
        with self._lock:
            self._conns.pop(island, None)

    def close(self) -> None:
        self._closing = True
        try:
            self._server.close()
        except OSError:
            pass


def _island_worker(
    config: IslandConfig,
    target: TargetSpec,
    seed_circuit: Circuit,
    island_index: int,
    port: int,
    result_queue,
    stop_event,
) -> None:
    sock = socket.create_connection(("127.0.0.1", port))
    sock.sendall((json.dumps({"island": island_index}) + "\n").encode("utf-8"))
    transport = SocketTransport(sock)
    engine = Engine(
        config,
        target,
        seed_circuit,
        transport=transport,
        island_indices=[island_index],
        stop_flag=stop_event.is_set,
    )
    result = engine.run()
    result_queue.put(
        {
            "island": island_index,
            "champion_hex": result.champion.genotype.to_hex(),
            "champion_circuit": circuit_to_json(result.champion.circuit),
            "fitness": list(result.champion.fitness.key()),
            "u_f": result.champion.fitness.u_f,
            "u_i": result.champion.fitness.u_i,
            "live_gates": result.champion.fitness.live_gates,
            "history": result.history,
            "evals": result.evals,
            "elapsed": result.elapsed,
            "goal_reached": result.goal_reached,
            "perfect": [
                (hex_form, circuit_to_json(circ))
                for hex_form, circ in result.perfect_champions
            ],
        }
    )
    transport.close()


def run_distributed(
    config: IslandConfig,
    target: TargetSpec,
    seed_circuit: Circuit,
    out_dir: str | Path | None = None,
) -> RunResult:
    """One process per island, migrants relayed over a local TCP stream.

    Budgets are split evenly across islands.  Not bit-reproducible across
    runs (worker timing affects migration interleaving); use the serial
    engine when determinism matters.
    """
    from .formats import read_native  # local import to avoid cycle at module load

    n = config.n_islands
    per_island = replace(
        config,
        max_evals=None if config.max_evals is None else config.max_evals // n,
    )
    relay = MigrationRelay(n, config.rng_seed)
    ctx = multiprocessing.get_context()
    result_queue: multiprocessing.Queue = ctx.Queue()
    stop_event = ctx.Event()
    workers = [
        ctx.Process(
            target=_island_worker,
            args=(per_island, target, seed_circuit, i, relay.port, result_queue, stop_event),
        )
        for i in range(n)
    ]
    for w in workers:
        w.start()

    results = []
    deadline = (
        None
        if config.max_seconds is None
        else time.monotonic() + config.max_seconds + 60.0
    )
    try:
        while len(results) < n:
            timeout = None if deadline is None else max(deadline - time.monotonic(), 0.1)
            try:
                payload = result_queue.get(timeout=timeout)
            except queue.Empty:
                stop_event.set()
                break
            results.append(payload)
            if payload["goal_reached"]:
                stop_event.set()
    finally:
        stop_event.set()
        for w in workers:
            w.join(timeout=30)
            if w.is_alive():
                w.terminate()
        relay.close()

    if not results:
        raise RuntimeError("no island returned a result")

    best = max(results, key=lambda p: tuple(p["fitness"]))
    champion_geno = Genotype.from_hex(best["champion_hex"], config.layout)
    champion_circuit = read_native(json.dumps(best["champion_circuit"]))
    fv = FitnessVector(
        *best["fitness"],
        u_f=best["u_f"],
        u_i=best["u_i"],
        live_gates=best["live_gates"],
    )
    perfect: list[tuple[str, Circuit]] = []
    seen: set[str] = set()
    for payload in results:
        for hex_form, circ_json in payload["perfect"]:
            if hex_form not in seen:
                seen.add(hex_form)
                perfect.append((hex_form, read_native(json.dumps(circ_json))))
    return RunResult(
        champion=Individual(champion_geno, champion_circuit, fv),
        layout=config.layout,
        history=best["history"],
        evals=sum(p["evals"] for p in results),
        elapsed=max(p["elapsed"] for p in results),
        goal_reached=any(p["goal_reached"] for p in results),
        perfect_champions=perfect,
    )

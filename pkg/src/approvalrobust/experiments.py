"""Randomized-perturbation experiments: a resampling-culture election
sampler, uniform Add/Remove perturbation at a given level, and the
Monte-Carlo harness aggregating how often (and by how much) committees
change.

Reproducibility contract: all randomness comes from numpy's PCG64.  The
harness derives one stream per (cell, election, purpose) from the master
seed via SeedSequence spawn keys

    key = (rule#, op#, round(p*1e6), round(phi*1e6), round(level*1e6))
    election i sampling stream: SeedSequence(master, spawn_key=key + (i, 0))
    election i perturbation:    SeedSequence(master, spawn_key=key + (i, 1))

with rule# the rule's index in alphabetical order of rule names and op#
0 for add, 1 for remove.  Every cell is therefore reproducible in
isolation and results do not depend on worker count or config ordering.
"""

from __future__ import annotations

import csv
import math
import multiprocessing
from dataclasses import dataclass

import numpy as np

from .elections import EditKind, Election, VoterGroup, committee_difference
from .errors import ParseError, PreconditionError
from .rules import Rule, compute_committee

CSV_FIELDS = (
    "rule", "op", "p", "phi", "level", "num_elections",
    "frac_changed", "avg_replaced", "std_replaced", "seed",
)


def _floor_fraction(x: float) -> int:
    """Floor that forgives float representation error (0.3*10 is slightly
    below 3 in binary; the intended value is the decimal product)."""
    return math.floor(round(x, 9))


@dataclass(frozen=True)
class ResamplingParams:
    """Culture parameters: central-set density p, resampling noise phi."""

    p: float
    phi: float
    m: int
    n: int

    def __post_init__(self):
        if not 0 <= self.p <= 1 or not 0 <= self.phi <= 1:
            raise ValueError("p and phi must lie in [0, 1]")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")


@dataclass(frozen=True)
class PerturbationSpec:
    op_kind: EditKind
    level: float
    seed: int

    def __post_init__(self):
        if not 0 <= self.level <= 1:
            raise ValueError("perturbation level must lie in [0, 1]")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sample_resampling(params: ResamplingParams, seed: int) -> Election:
    """Draw one unit-weight election from the resampling culture.

    A central approval set of floor(p*m) candidates is drawn uniformly;
    every voter starts from it, then each (voter, candidate) pair is
    independently resampled with probability phi, in which case the voter
    approves the candidate with probability p.
    """
    rng = _rng(seed)
    m, n = params.m, params.n
    central_size = _floor_fraction(params.p * m)
    central = rng.choice(m, size=central_size, replace=False)
    central_mask = np.zeros(m, dtype=bool)
    central_mask[central] = True
    resampled = rng.random((n, m)) < params.phi
    fresh = rng.random((n, m)) < params.p
    approve = np.where(resampled, fresh, central_mask[np.newaxis, :])
    groups = [VoterGroup(1, np.flatnonzero(approve[i]).tolist()) for i in range(n)]
    return Election(m, groups)


def perturb(e: Election, spec: PerturbationSpec) -> Election:
    """Flip floor(level * pool) approval slots chosen uniformly without
    replacement, where the pool is the absent (voter, candidate) pairs for
    Add and the present ones for Remove.  Unit-weight elections only."""
    if any(g.weight != 1 for g in e.groups):
        raise PreconditionError("perturbation expects a unit-weight election")
    m, n = e.num_candidates, len(e.groups)
    approve = np.zeros((n, m), dtype=bool)
    for i, g in enumerate(e.groups):
        if g.approvals:
            approve[i, sorted(g.approvals)] = True
    if spec.op_kind is EditKind.ADD:
        pool = np.argwhere(~approve)
    else:
        pool = np.argwhere(approve)
    count = min(_floor_fraction(spec.level * len(pool)), len(pool))
    if count > 0:
        rng = _rng(spec.seed)
        picked = rng.choice(len(pool), size=count, replace=False)
        rows = pool[picked, 0]
        cols = pool[picked, 1]
        approve[rows, cols] = ~approve[rows, cols]
    groups = [VoterGroup(1, np.flatnonzero(approve[i]).tolist()) for i in range(n)]
    return Election(m, groups, e.tie_order)


def default_level_grid() -> tuple[float, ...]:
    """0 to 0.95 in steps of 0.05, plus the extra 0.01 point."""
    return (0.0, 0.01) + tuple(round(0.05 * i, 2) for i in range(1, 20))


@dataclass(frozen=True)
class ExperimentConfig:
    rules: tuple[Rule, ...]
    ops: tuple[EditKind, ...]
    p_values: tuple[float, ...]
    phi_values: tuple[float, ...]
    levels: tuple[float, ...]
    elections_per_cell: int
    m: int
    n: int
    k: int
    seed: int

    def __post_init__(self):
        for name in ("rules", "ops", "p_values", "phi_values", "levels"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        for x in self.p_values + self.phi_values + self.levels:
            if not 0 <= x <= 1:
                raise ValueError("p, phi and level values must lie in [0, 1]")
        if self.elections_per_cell < 1:
            raise ValueError("elections_per_cell must be >= 1")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if not 1 <= self.k <= self.m:
            raise ValueError("k must be in [1, m]")


@dataclass(frozen=True)
class ExperimentRecord:
    """One aggregated cell: fraction of elections whose committee changed
    and the average/stddev of replaced members."""

    rule: Rule
    op: EditKind
    p: float
    phi: float
    level: float
    num_elections: int
    frac_changed: float
    avg_replaced: float
    std_replaced: float
    seed: int


_RULE_INDEX = {r: i for i, r in enumerate(sorted(Rule, key=lambda r: r.value))}


def _cell_key(rule: Rule, op: EditKind, p: float, phi: float, level: float) -> tuple[int, ...]:
    return (
        _RULE_INDEX[rule],
        0 if op is EditKind.ADD else 1,
        round(p * 10**6),
        round(phi * 10**6),
        round(level * 10**6),
    )


def _derive_seed(master: int, spawn_key: tuple[int, ...]) -> int:
    seq = np.random.SeedSequence(master, spawn_key=spawn_key)
    return int(seq.generate_state(1, np.uint64)[0])


def _run_cell(args) -> ExperimentRecord:
    cfg, rule, op, p, phi, level = args
    key = _cell_key(rule, op, p, phi, level)
    params = ResamplingParams(p=p, phi=phi, m=cfg.m, n=cfg.n)
    diffs = []
    for i in range(cfg.elections_per_cell):
        e = sample_resampling(params, _derive_seed(cfg.seed, key + (i, 0)))
        before = compute_committee(e, rule, cfg.k)
        spec = PerturbationSpec(op, level, _derive_seed(cfg.seed, key + (i, 1)))
        after = compute_committee(perturb(e, spec), rule, cfg.k)
        diffs.append(committee_difference(before, after))
    arr = np.asarray(diffs, dtype=float)
    return ExperimentRecord(
        rule=rule,
        op=op,
        p=p,
        phi=phi,
        level=level,
        num_elections=cfg.elections_per_cell,
        frac_changed=round(float(np.mean(arr > 0)), 6),
        avg_replaced=round(float(arr.mean()), 6),
        std_replaced=round(float(arr.std()), 6),
        seed=_derive_seed(cfg.seed, key),
    )


def _record_sort_key(r: ExperimentRecord):
    return (r.rule.value, r.op.value, r.p, r.phi, r.level)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[ExperimentRecord]:
    """One record per (rule, op, p, phi, level) cell, in sorted order.

    Worker count affects throughput only: cells are independent and carry
    pre-assigned seed streams.
    """
    tasks = [
        (cfg, rule, op, p, phi, level)
        for rule in sorted(set(cfg.rules), key=lambda r: r.value)
        for op in sorted(set(cfg.ops), key=lambda o: o.value)
        for p in sorted(set(cfg.p_values))
        for phi in sorted(set(cfg.phi_values))
        for level in sorted(set(cfg.levels))
    ]
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(workers) as pool:
            records = pool.map(_run_cell, tasks)
    else:
        records = [_run_cell(t) for t in tasks]
    return sorted(records, key=_record_sort_key)


def write_records_csv(records, path) -> None:
    rows = sorted(records, key=_record_sort_key)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in rows:
            writer.writerow(
                [
                    r.rule.value,
                    r.op.value,
                    f"{r.p:.6f}",
                    f"{r.phi:.6f}",
                    f"{r.level:.6f}",
                    r.num_elections,
                    f"{r.frac_changed:.6f}",
                    f"{r.avg_replaced:.6f}",
                    f"{r.std_replaced:.6f}",
                    r.seed,
                ]
            )


def read_records_csv(path) -> list[ExperimentRecord]:
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_FIELDS):
            raise ParseError(1, f"bad CSV header: {header}")
        for rowno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_FIELDS):
                raise ParseError(rowno, f"expected {len(CSV_FIELDS)} columns, got {len(row)}")
            try:
                records.append(
                    ExperimentRecord(
                        rule=Rule.parse(row[0]),
                        op=EditKind.parse(row[1]),
                        p=round(float(row[2]), 6),
                        phi=round(float(row[3]), 6),
                        level=round(float(row[4]), 6),
                        num_elections=int(row[5]),
                        frac_changed=round(float(row[6]), 6),
                        avg_replaced=round(float(row[7]), 6),
                        std_replaced=round(float(row[8]), 6),
                        seed=int(row[9]),
                    )
                )
            except ValueError as exc:
                raise ParseError(rowno, str(exc)) from None
    return records


_CONFIG_KEYS = {
    "rules", "ops", "p", "phi", "levels", "elections_per_cell", "m", "n", "k", "seed",
}


def parse_experiment_config(text: str, seed_override: int | None = None) -> ExperimentConfig:
    """Flat `key = value` config; list values are comma-separated.

    Keys: rules, ops, p, phi, levels (optional, defaults to the standard
    grid), elections_per_cell, m, n, k, seed (optional if overridden).
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ParseError(lineno, f"duplicate key {key!r}")
        values[key] = val.strip()

    def require(key: str) -> str:
        if key not in values:
            raise ParseError(1, f"missing required key {key!r}")
        return values[key]

    def floats(raw: str) -> tuple[float, ...]:
        return tuple(float(tok.strip()) for tok in raw.split(",") if tok.strip())

    if seed_override is not None:
        seed = seed_override
    elif "seed" in values:
        seed = int(values["seed"])
    else:
        raise ParseError(1, "no seed: provide a 'seed' key or pass one explicitly")
    levels = floats(values["levels"]) if "levels" in values else default_level_grid()
    return ExperimentConfig(
        rules=tuple(Rule.parse(tok.strip()) for tok in require("rules").split(",") if tok.strip()),
        ops=tuple(EditKind.parse(tok.strip()) for tok in require("ops").split(",") if tok.strip()),
        p_values=floats(require("p")),
        phi_values=floats(require("phi")),
        levels=levels,
        elections_per_cell=int(require("elections_per_cell")),
        m=int(require("m")),
        n=int(require("n")),
        k=int(require("k")),
        seed=seed,
    )

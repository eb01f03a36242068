"""Restricted exact-cover instances and their compilation into elections
whose robustness radius encodes cover existence.

An RX3C instance has a 3n-element universe and 3n three-element sets with
every element in exactly three sets; asking for n sets covering the
universe is NP-complete.  The builders turn such an instance into an
election over the set candidates plus two distinguished candidates p and
d, sized so that the first n committee seats go to set candidates, the
next seat goes to p exactly when those n sets form a cover (which a
briber within the budget can arrange if and only if a cover exists), and
the remaining seats go to the leftover set candidates.

The default weight constants follow the closed forms the analysis uses
for large n; they are *checked* at build time, because for small n they
can order the scores wrongly (at n=2 the coverage/harmonic forms make d
outscore every set candidate, which silently breaks the encoding).  Tests
and the CLI pass explicitly validated constants for small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .elections import Committee, EditKind, Election, TieOrder, VoterGroup, approval_score
from .errors import CapExceeded, ParseError, PreconditionError
from .robustness import RadiusQuery, solve_radius
from .rules import Rule, compute_committee


@dataclass(frozen=True)
class Rx3cInstance:
    """Universe 0..3n-1 plus an ordered family of 3n candidate sets."""

    n: int
    sets: tuple[frozenset[int], ...]

    def __init__(self, n: int, sets):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in sets))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.sets) != 3 * self.n:
            raise ValueError(f"expected {3 * self.n} sets, got {len(self.sets)}")
        for i, s in enumerate(self.sets):
            for u in s:
                if not 0 <= u < 3 * self.n:
                    raise ValueError(f"set S{i + 1} contains element {u} outside the universe")

    @property
    def universe_size(self) -> int:
        return 3 * self.n


@dataclass(frozen=True)
class Rx3cValidation:
    ok: bool
    violations: tuple[str, ...]


def validate_rx3c(inst: Rx3cInstance) -> Rx3cValidation:
    """Regularity check: every set has three elements and every universe
    element lies in exactly three sets."""
    violations: list[str] = []
    for i, s in enumerate(inst.sets):
        if len(s) != 3:
            violations.append(f"set S{i + 1} has {len(s)} elements, expected 3")
    occurrences = [0] * inst.universe_size
    for s in inst.sets:
        for u in s:
            occurrences[u] += 1
    for u, occ in enumerate(occurrences):
        if occ != 3:
            violations.append(f"element {u} occurs in {occ} sets, expected 3")
    return Rx3cValidation(not violations, tuple(violations))


def exact_cover_oracle(inst: Rx3cInstance, cap: int = 10**6) -> tuple[int, ...] | None:
    """Brute-force search for n set indices whose union is the universe.

    Returns the lexicographically least cover, or None.  Refuses above
    `cap` candidate index subsets (C(3n, n); fine through n = 8)."""
    report = validate_rx3c(inst)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.violations))
    count = math.comb(3 * inst.n, inst.n)
    if count > cap:
        raise CapExceeded(count, cap, "cover enumeration")
    universe = frozenset(range(inst.universe_size))
    for indices in combinations(range(3 * inst.n), inst.n):
        union: set[int] = set()
        for i in indices:
            union |= inst.sets[i]
        if union == universe:
            return indices
    return None


@dataclass(frozen=True)
class ReductionInstance:
    """Election compiled from an RX3C instance, together with the query
    parameters under which its radius answer encodes cover existence."""

    rule: Rule
    op_kind: EditKind
    n: int
    election: Election
    k: int
    budget: int
    candidate_names: tuple[str, ...]
    major_weight: int  # sidecar key T
    minor_weight: int  # sidecar key t
    unbribed_committee: Committee
    cover_found_unbribed: bool
    constants_ok: bool
    constant_violations: tuple[str, ...]


def _require_valid(inst: Rx3cInstance) -> None:
    report = validate_rx3c(inst)
    if not report.ok:
        raise ValueError("invalid RX3C instance: " + "; ".join(report.violations))


def _sets_containing(inst: Rx3cInstance, element: int) -> list[int]:
    return [i for i, s in enumerate(inst.sets) if element in s]


def _greedy_cc_constant_checks(n: int, big: int, small: int) -> list[str]:
    """Score-ordering conditions under which the coverage-greedy analysis
    goes through: set candidates dominate the first n rounds, p/d dominate
    round n+1, and a missed cover costs d strictly more than any bribery
    noise."""
    bad = []
    if big <= 7 * n * small + n:
        bad.append(f"need T > 7nt + n, got T={big}, 7nt+n={7 * n * small + n}")
    if small * (4 * n - 3) <= 2 * n:
        bad.append(f"need t(4n-3) > 2n, got {small * (4 * n - 3)} <= {2 * n}")
    if small <= 2 * n:
        bad.append(f"need t > 2n, got t={small}")
    return bad


def _greedy_pav_constant_checks(n: int, big: int, small: int) -> list[str]:
    bad = []
    if (n * big) % 2 != 0:
        bad.append("nT must be even (half-weight voter group)")
    if (3 * n * small) % 2 != 0:
        bad.append("3nt must be even (half-weight voter group)")
    if small <= 6 * n:
        bad.append(f"need t > 6n, got t={small}")
    if n * big <= 14 * n * small - 6 * small:
        bad.append("need nT/2 > 7nt - 3t")
    if big <= 14 * n * small - 3 * small + 2 * n:
        bad.append("need T/2 > 7nt - 1.5t + n")
    if 5 * big <= 14 * small + 4:
        bad.append("need 5nT/4 > 7nt/2 + n")
    if 11 * n * small <= 6 * small + 4 * n:
        bad.append("need 11nt/2 > 3t + 2n")
    return bad


def _phragmen_constant_checks(n: int, big: int, small: int) -> list[str]:
    bad = []
    if small % (6 * n) != 0:
        bad.append(f"t must be divisible by 6n={6 * n}, got t={small}")
    if small <= 6 * n:
        bad.append(f"need t > 6n, got t={small}")
    if small <= 4:
        bad.append(f"need t > 4, got t={small}")
    tl = _timeline_values(n, big, small)
    bad.extend(tl.violations())
    return bad


def _finish_reduction(
    rule: Rule,
    op_kind: EditKind,
    inst: Rx3cInstance,
    election: Election,
    big: int,
    small: int,
    violations: list[str],
) -> ReductionInstance:
    n = inst.n
    k = 3 * n + 1
    budget = n if op_kind is EditKind.ADD else 2 * n
    p_index = 3 * n
    committee = compute_committee(election, rule, k)
    names = tuple(f"S{i + 1}" for i in range(3 * n)) + ("p", "d")
    return ReductionInstance(
        rule=rule,
        op_kind=op_kind,
        n=n,
        election=election,
        k=k,
        budget=budget,
        candidate_names=names,
        major_weight=big,
        minor_weight=small,
        unbribed_committee=committee,
        cover_found_unbribed=p_index in committee,
        constants_ok=not violations,
        constant_violations=tuple(violations),
    )


def _op_tail_groups(inst: Rx3cInstance, op_kind: EditKind) -> list[VoterGroup]:
    """The budget-spending voters: n empty ones for Add, one single-set
    voter per set candidate for Remove."""
    if op_kind is EditKind.ADD:
        return [VoterGroup(1, ()) for _ in range(inst.n)]
    return [VoterGroup(1, {i}) for i in range(3 * inst.n)]


def build_greedycc_reduction(
    inst: Rx3cInstance,
    op_kind: EditKind,
    constants: tuple[int, int] | None = None,
) -> ReductionInstance:
    """Coverage-greedy hardness election: singleton and pairwise heavy
    groups make the set candidates interchangeable front-runners, a huge
    p/d block decides seat n+1, and per-element light groups reward an
    exact cover by starving d."""
    _require_valid(inst)
    n = inst.n
    if constants is None:
        if n < 2:
            raise ValueError("default constants need n >= 2")
        big, small = 10 * n**5, 10 * n**3
    else:
        big, small = constants
        if big < 1 or small < 1:
            raise ValueError("constants must be positive")
    p, d = 3 * n, 3 * n + 1
    groups: list[VoterGroup] = []
    groups += [VoterGroup(big, {i}) for i in range(3 * n)]
    groups += [VoterGroup(big, {i, j}) for i, j in combinations(range(3 * n), 2)]
    groups.append(VoterGroup(2 * n * big + 4 * n * small, {p, d}))
    groups += [
        VoterGroup(small, {d, *_sets_containing(inst, u)}) for u in range(3 * n)
    ]
    groups += _op_tail_groups(inst, op_kind)
    election = Election(3 * n + 2, groups, TieOrder.default(3 * n + 2))
    extra = 1 if op_kind is EditKind.REMOVE else 0
    assert approval_score(election, 0) == 3 * n * big + 3 * small + extra
    assert approval_score(election, p) == 2 * n * big + 4 * n * small
    assert approval_score(election, d) == 2 * n * big + 7 * n * small
    return _finish_reduction(
        Rule.GREEDY_CC, op_kind, inst, election, big, small,
        _greedy_cc_constant_checks(n, big, small),
    )


def build_greedypav_reduction(
    inst: Rx3cInstance,
    op_kind: EditKind,
    constants: tuple[int, int] | None = None,
) -> ReductionInstance:
    """Harmonic-greedy variant: the p/d block gains an extra half-share
    and p gets its own light group, compensating for voters never being
    fully removed from consideration."""
    _require_valid(inst)
    n = inst.n
    if constants is None:
        if n < 2:
            raise ValueError("default constants need n >= 2")
        big, small = 10 * n**5, 10 * n**3
    else:
        big, small = constants
        if big < 1 or small < 1:
            raise ValueError("constants must be positive")
    violations = _greedy_pav_constant_checks(n, big, small)
    if (n * big) % 2 != 0 or (3 * n * small) % 2 != 0:
        raise ValueError("constants give non-integral group weights: " + "; ".join(violations))
    p, d = 3 * n, 3 * n + 1
    groups: list[VoterGroup] = []
    groups += [VoterGroup(big, {i}) for i in range(3 * n)]
    groups += [VoterGroup(big, {i, j}) for i, j in combinations(range(3 * n), 2)]
    groups.append(VoterGroup(2 * n * big + n * big // 2 + 4 * n * small, {p, d}))
    groups += [
        VoterGroup(small, {d, *_sets_containing(inst, u)}) for u in range(3 * n)
    ]
    groups.append(VoterGroup(3 * n * small // 2, {p}))
    groups += _op_tail_groups(inst, op_kind)
    election = Election(3 * n + 2, groups, TieOrder.default(3 * n + 2))
    extra = 1 if op_kind is EditKind.REMOVE else 0
    assert approval_score(election, 0) == 3 * n * big + 3 * small + extra
    assert approval_score(election, p) == 5 * n * big // 2 + 11 * n * small // 2
    assert approval_score(election, d) == 5 * n * big // 2 + 7 * n * small
    return _finish_reduction(
        Rule.GREEDY_PAV, op_kind, inst, election, big, small, violations
    )


def build_phragmen_reduction(
    inst: Rx3cInstance,
    op_kind: EditKind,
    constants: tuple[int, int] | None = None,
) -> ReductionInstance:
    """Sequential-purchase variant: per-element universe groups (a slice
    of which also backs d) meter out money so that the second seat wave
    starts strictly after the p/d pool matures; d wins that pool unless
    the first wave bought an exact cover.  Note the inverted tail of the
    tie-breaking order (d beats p on ties)."""
    _require_valid(inst)
    n = inst.n
    if constants is None:
        big, small = 900 * n**12, 30 * n**5
    else:
        big, small = constants
        if big < 1 or small < 1:
            raise ValueError("constants must be positive")
    violations = _phragmen_constant_checks(n, big, small)
    if small % (6 * n) != 0:
        raise ValueError("constants give non-integral group weights: " + "; ".join(violations))
    p, d = 3 * n, 3 * n + 1
    d_slice = small // (3 * n)
    groups: list[VoterGroup] = []
    groups += [VoterGroup(big, {i}) for i in range(3 * n)]
    for u in range(3 * n):
        owners = _sets_containing(inst, u)
        groups.append(VoterGroup(small * small - d_slice, owners))
        groups.append(VoterGroup(d_slice, {d, *owners}))
    groups.append(VoterGroup(big + 3 * small * small - 2 * small, {p, d}))
    groups.append(VoterGroup(small // (6 * n), {p}))
    groups += _op_tail_groups(inst, op_kind)
    order = TieOrder(tuple(range(3 * n)) + (d, p))
    election = Election(3 * n + 2, groups, order)
    extra = 1 if op_kind is EditKind.REMOVE else 0
    assert approval_score(election, 0) == big + 3 * small * small + extra
    assert approval_score(election, d) == big + 3 * small * small - small
    assert approval_score(election, p) == big + 3 * small * small - 2 * small + small // (6 * n)
    return _finish_reduction(
        Rule.PHRAGMEN, op_kind, inst, election, big, small, violations
    )


_BUILDERS = {
    Rule.GREEDY_CC: build_greedycc_reduction,
    Rule.GREEDY_PAV: build_greedypav_reduction,
    Rule.PHRAGMEN: build_phragmen_reduction,
}


def build_reduction(
    inst: Rx3cInstance,
    rule: Rule,
    op_kind: EditKind,
    constants: tuple[int, int] | None = None,
) -> ReductionInstance:
    if rule not in _BUILDERS:
        raise ValueError(f"no hardness reduction for rule {rule.value}")
    return _BUILDERS[rule](inst, op_kind, constants)


@dataclass(frozen=True)
class PhragmenTimeline:
    """Exact purchase-time landmarks of a sequential-purchase reduction.

    The encoding is sound when the first wave of set purchases strictly
    precedes the maturing of the p/d pool, which strictly precedes the
    second wave of set purchases, which strictly precedes the fallback
    time at which heavy set groups pay alone; additionally d's natural
    purchase time must beat p's, and when a cover is bought in the first
    wave, the money d's supporters hold at p's purchase time must stay
    below one unit."""

    first_wave_time: Fraction
    pd_pool_time: Fraction
    p_buy_time: Fraction
    d_buy_time: Fraction
    second_wave_time: Fraction
    heavy_alone_time: Fraction
    d_money_at_p_time: Fraction

    def violations(self) -> tuple[str, ...]:
        bad = []
        if not self.first_wave_time < self.pd_pool_time:
            bad.append("first wave must precede the p/d pool time")
        if not self.pd_pool_time < self.second_wave_time:
            bad.append("p/d pool time must precede the second wave")
        if not self.second_wave_time < self.heavy_alone_time:
            bad.append("second wave must precede the heavy-groups-alone time")
        if not self.d_buy_time < self.p_buy_time:
            bad.append("d's buy time must precede p's")
        if not self.d_money_at_p_time < 1:
            bad.append("d's supporters must hold under one unit at p's buy time")
        return tuple(bad)

    @property
    def ok(self) -> bool:
        return not self.violations()


def _timeline_values(n: int, big: int, small: int) -> PhragmenTimeline:
    pool = big + 3 * small * small
    first = Fraction(1, pool)
    pd_pool = Fraction(1, pool - 2 * small)
    p_buy = Fraction(1, pool - 2 * small + Fraction(small, 6 * n))
    d_buy = Fraction(1, pool - 2 * small + Fraction(small, 3 * n))
    second = first + first * first * small * small
    heavy = Fraction(1, big)
    d_money = (pool - 2 * small) * p_buy + small * (p_buy - first)
    return PhragmenTimeline(
        first_wave_time=first,
        pd_pool_time=pd_pool,
        p_buy_time=p_buy,
        d_buy_time=d_buy,
        second_wave_time=second,
        heavy_alone_time=heavy,
        d_money_at_p_time=d_money,
    )


def phragmen_timeline(red: ReductionInstance) -> PhragmenTimeline:
    """Exact rational landmarks for a sequential-purchase reduction."""
    if red.rule is not Rule.PHRAGMEN:
        raise ValueError("timeline diagnostics apply to Phragmen reductions only")
    return _timeline_values(red.n, red.major_weight, red.minor_weight)


def check_reduction_correctness(
    inst: Rx3cInstance,
    rule: Rule,
    op_kind: EditKind,
    constants: tuple[int, int] | None = None,
    cap: int = 10**7,
) -> bool:
    """Equivalence test: does the exhaustive radius answer on the compiled
    election match cover existence decided by the independent brute-force
    oracle?

    Requires constants that pass the ordering checks; with failing
    constants the encoding is meaningless and this raises instead of
    reporting a coincidence."""
    red = build_reduction(inst, rule, op_kind, constants)
    if not red.constants_ok:
        raise PreconditionError(
            "reduction constants violate ordering conditions: "
            + "; ".join(red.constant_violations)
        )
    cover_exists = exact_cover_oracle(inst) is not None
    if red.cover_found_unbribed:
        reduction_says = True
    else:
        query = RadiusQuery(red.election, rule, red.k, op_kind, red.budget)
        reduction_says = solve_radius(query, cap=cap).changed
    return reduction_says == cover_exists


def parse_rx3c(text: str) -> Rx3cInstance:
    """Parse the `.rx3c` format: `n <int>` then 3n lines `S<i>: a b c`."""
    n: int | None = None
    sets: list[frozenset[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n":
                raise ParseError(lineno, f"expected 'n <int>' header, got {raw!r}")
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(lineno, f"bad size {parts[1]!r}") from None
            if n < 1:
                raise ParseError(lineno, "n must be >= 1")
            continue
        expected = f"S{len(sets) + 1}:"
        parts = line.split()
        if not parts or parts[0] != expected:
            raise ParseError(lineno, f"expected line starting {expected!r}, got {raw!r}")
        try:
            elems = [int(p) for p in parts[1:]]
        except ValueError:
            raise ParseError(lineno, "set elements must be integers") from None
        for u in elems:
            if not 0 <= u < 3 * n:
                raise ParseError(lineno, f"element {u} outside universe [0, {3 * n - 1}]")
        sets.append(frozenset(elems))
    if n is None:
        raise ParseError(1, "missing 'n <int>' header")
    if len(sets) != 3 * n:
        raise ParseError(1, f"expected {3 * n} sets, found {len(sets)}")
    return Rx3cInstance(n, sets)


def serialize_rx3c(inst: Rx3cInstance) -> str:
    lines = [f"n {inst.n}"]
    for i, s in enumerate(inst.sets):
        lines.append(f"S{i + 1}: " + " ".join(str(u) for u in sorted(s)))
    return "\n".join(lines) + "\n"


def load_rx3c(path) -> Rx3cInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rx3c(fh.read())


def save_reduction(red: ReductionInstance, out_dir) -> None:
    """Write election.appel plus a sidecar naming the query parameters."""
    import os

    from .elections import save_election

    os.makedirs(out_dir, exist_ok=True)
    save_election(red.election, os.path.join(out_dir, "election.appel"))
    lines = [
        f"rule {red.rule.value}",
        f"op {red.op_kind.value}",
        f"n {red.n}",
        f"k {red.k}",
        f"budget {red.budget}",
        f"T {red.major_weight}",
        f"t {red.minor_weight}",
        f"cover_found_unbribed {'true' if red.cover_found_unbribed else 'false'}",
        f"constants_ok {'true' if red.constants_ok else 'false'}",
        "candidates " + " ".join(red.candidate_names),
        "unbribed_committee " + " ".join(str(c) for c in red.unbribed_committee),
    ]
    with open(os.path.join(out_dir, "reduction.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

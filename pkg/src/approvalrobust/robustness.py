"""Worst-case robustness: full-replacement witness elections, robustness
measurement for single edits, and an exact exhaustive solver for the
minimum number of Add/Remove operations that changes a rule's committee.

The solver enumerates *plans*: multisets of per-voter edit sets.  Voters
inside a weight-w group are interchangeable, so a plan assigns each
edited voter the set of candidates it gains (Add) or loses (Remove); at
most w voters of a group can be edited and the same edit applied to two
voters of one group counts as one plan, not two.  This is the coarsest
representation that still reaches every election obtainable with b
operations, and it is what makes exhaustive search feasible on the
hardness instances.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .elections import (
    ApprovalEdit,
    Committee,
    EditKind,
    Election,
    TieOrder,
    VoterGroup,
    apply_edit,
    committee_difference,
    inverse_edit,
)
from .errors import CapExceeded
from .rules import Rule, _check_k, _Compiled, _compile, _members_for_rule, compute_committee

_WITNESS_RULES = (Rule.GREEDY_CC, Rule.GREEDY_PAV, Rule.PHRAGMEN)


@dataclass(frozen=True)
class WitnessPair:
    """Two elections one Add apart whose committees are disjoint."""

    rule: Rule
    k: int
    e_before: Election
    e_after: Election
    edit: ApprovalEdit
    expected_before: Committee
    expected_after: Committee


def build_flip_witness(rule: Rule, k: int) -> WitnessPair:
    """Build the election pair showing that one added approval can replace
    the whole size-k committee under GreedyCC, GreedyPAV, or Phragmen.

    Candidates 0..k-1 form the block winning before the edit, k..2k-1 the
    block winning after; the edit gives the lone empty voter an approval
    for candidate k.  Requires k >= 2 (one voter multiplicity in the
    construction is 2k-3).  The pair is verified by running the rule.
    """
    if rule not in _WITNESS_RULES:
        raise ValueError(f"no full-replacement witness for rule {rule.value}")
    if k < 2:
        raise ValueError("witness construction needs committee size k >= 2")
    a = list(range(k))
    b = list(range(k, 2 * k))
    groups = [VoterGroup(k - 1, {a[0], b[0]})]
    groups += [VoterGroup(1, {a[0], b[i]}) for i in range(1, k)]
    groups += [VoterGroup(1, {a[i], b[0]}) for i in range(1, k)]
    groups += [VoterGroup(2 * k - 3, {a[i], b[i]}) for i in range(1, k)]
    groups.append(VoterGroup(1, ()))
    order = TieOrder.default(2 * k)
    e_before = Election(2 * k, groups, order)
    edit = ApprovalEdit(EditKind.ADD, len(groups) - 1, b[0])
    e_after = apply_edit(e_before, edit)
    expected_before = Committee(a)
    expected_after = Committee(b)
    got_before = compute_committee(e_before, rule, k)
    got_after = compute_committee(e_after, rule, k)
    if got_before != expected_before or got_after != expected_after:
        raise RuntimeError(
            f"witness self-check failed for {rule.value}, k={k}: "
            f"{got_before.members} / {got_after.members}"
        )
    return WitnessPair(rule, k, e_before, e_after, edit, expected_before, expected_after)


def measure_robustness(e: Election, edit: ApprovalEdit, rule: Rule, k: int) -> int:
    """Number of committee members replaced by applying `edit`."""
    before = compute_committee(e, rule, k)
    after = compute_committee(apply_edit(e, edit), rule, k)
    return committee_difference(before, after)


def check_direction_symmetry(e: Election, edit: ApprovalEdit, rule: Rule, k: int) -> bool:
    """Adding an approval and then removing it again must replace the same
    number of committee members in both directions (resolute rules)."""
    forward = measure_robustness(e, edit, rule, k)
    e2 = apply_edit(e, edit)
    backward = measure_robustness(e2, inverse_edit(edit), rule, k)
    return forward == backward


@dataclass(frozen=True)
class RadiusQuery:
    election: Election
    rule: Rule
    k: int
    op_kind: EditKind
    budget: int


@dataclass(frozen=True)
class RadiusAnswer:
    changed: bool
    witness_edits: tuple[ApprovalEdit, ...] | None
    minimal_radius: int | None


def _edit_pool(e: Election, kind: EditKind, group: VoterGroup) -> tuple[int, ...]:
    if kind is EditKind.ADD:
        return tuple(c for c in range(e.num_candidates) if c not in group.approvals)
    return tuple(sorted(group.approvals))


def _group_plan_counts(pool_size: int, weight: int, budget: int) -> list[int]:
    """counts[s] = number of multisets of nonempty candidate subsets with
    total size s, at most `weight` parts, drawn from a pool of pool_size."""
    wcap = min(weight, budget)
    states: dict[tuple[int, int], int] = {(0, 0): 1}
    for size in range(1, min(pool_size, budget) + 1):
        n_subsets = math.comb(pool_size, size)
        nxt: dict[tuple[int, int], int] = defaultdict(int)
        for (spent, parts), ways in states.items():
            reps = 0
            while spent + size * reps <= budget and parts + reps <= wcap:
                nxt[(spent + size * reps, parts + reps)] += ways * math.comb(
                    n_subsets + reps - 1, reps
                )
                reps += 1
        states = dict(nxt)
    counts = [0] * (budget + 1)
    for (spent, _parts), ways in states.items():
        counts[spent] += ways
    return counts


def count_edit_plans(e: Election, kind: EditKind, budget: int) -> int:
    """Exact number of distinct edit plans of size 1..budget; this is the
    number of rule evaluations an exhaustive radius search performs."""
    total = [0] * (budget + 1)
    total[0] = 1
    for g in e.groups:
        pool = _edit_pool(e, kind, g)
        if not pool:
            continue
        counts = _group_plan_counts(len(pool), g.weight, budget)
        counts[0] = 1
        merged = [0] * (budget + 1)
        for s1, v1 in enumerate(total):
            if not v1:
                continue
            for s2 in range(budget + 1 - s1):
                if counts[s2]:
                    merged[s1 + s2] += v1 * counts[s2]
        total = merged
    return sum(total[1:])


def _iter_group_multisets(
    subsets: list[tuple[int, ...]], weight: int, budget: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Nondecreasing tuples of subsets, total size in 1..budget, at most
    `weight` parts; repeats of a subset mean several voters of the group
    receive the identical edit."""

    def rec(start: int, budget_left: int, slots_left: int):
        for i in range(start, len(subsets)):
            d = subsets[i]
            cost = len(d)
            if cost > budget_left:
                continue
            head = (d,)
            yield head
            if slots_left > 1 and budget_left - cost >= 1:
                for rest in rec(i, budget_left - cost, slots_left - 1):
                    yield head + rest

    yield from rec(0, budget, min(weight, budget))


def _iter_plans(
    group_data: list[tuple[int, list[tuple[int, ...]], int]], budget: int
) -> Iterator[tuple[tuple[int, tuple[int, ...]], ...]]:
    """All plans of total size exactly `budget`, in a fixed canonical
    order: groups ascending, untouched-group branches first, local
    multisets in the _iter_group_multisets order."""
    n = len(group_data)

    def rec(gi: int, remaining: int):
        if remaining == 0:
            yield ()
            return
        if gi == n:
            return
        yield from rec(gi + 1, remaining)
        g, subsets, weight = group_data[gi]
        for local in _iter_group_multisets(subsets, weight, remaining):
            spent = sum(len(d) for d in local)
            atoms = tuple((g, d) for d in local)
            if spent == remaining:
                yield atoms
            else:
                for rest in rec(gi + 1, remaining - spent):
                    yield atoms + rest

    yield from rec(0, budget)


def _apply_plan(
    comp: _Compiled, kind: EditKind, plan: tuple[tuple[int, tuple[int, ...]], ...]
) -> _Compiled:
    by_group: dict[int, list[tuple[int, ...]]] = {}
    for g, d in plan:
        by_group.setdefault(g, []).append(d)
    weights = list(comp.weights)
    approvals = list(comp.approvals)
    # patch descending so earlier indices stay valid while splicing
    for gi in sorted(by_group, reverse=True):
        edits = by_group[gi]
        w = weights[gi]
        aps = approvals[gi]
        base = set(aps)
        new_w: list[int] = []
        new_a: list[tuple[int, ...]] = []
        for d in edits:
            if kind is EditKind.ADD:
                edited = base | set(d)
            else:
                edited = base - set(d)
            new_w.append(1)
            new_a.append(tuple(sorted(edited)))
        if w > len(edits):
            new_w.append(w - len(edits))
            new_a.append(aps)
        weights[gi : gi + 1] = new_w
        approvals[gi : gi + 1] = new_a
    return _Compiled(comp.m, weights, approvals)


def _plan_to_edits(
    plan: tuple[tuple[int, tuple[int, ...]], ...], kind: EditKind
) -> tuple[ApprovalEdit, ...]:
    """Sequential apply_edit replay of a plan.

    Groups are processed in descending index order so earlier splits never
    shift a still-pending group; the j-th edited voter of group g sits at
    index g + j once the previous voters have been split off."""
    by_group: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for g, d in plan:
        by_group[g].append(d)
    edits: list[ApprovalEdit] = []
    for g in sorted(by_group, reverse=True):
        for j, d in enumerate(by_group[g]):
            for c in d:
                edits.append(ApprovalEdit(kind, g + j, c))
    return tuple(edits)


def solve_radius(
    query: RadiusQuery, mode: str = "decide", cap: int = 10**7
) -> RadiusAnswer:
    """Exhaustive iterative-deepening search for an edit set that changes
    the committee.

    decide: stop at the first flipping plan within the budget.
    minimize: additionally report its size, which is minimal because plans
    are visited in order of increasing size.

    Refuses with CapExceeded when the exact plan count (one rule
    evaluation each) exceeds `cap`.
    """
    if mode not in ("decide", "minimize"):
        raise ValueError(f"mode must be 'decide' or 'minimize', got {mode!r}")
    if query.budget < 0:
        raise ValueError("budget must be nonnegative")
    e = query.election
    _check_k(e.num_candidates, query.k)
    order = e.effective_order()
    comp = _compile(e)
    baseline = _members_for_rule(comp, query.rule, query.k, order)
    if query.budget == 0:
        return RadiusAnswer(False, None, None)
    estimate = count_edit_plans(e, query.op_kind, query.budget)
    if estimate > cap:
        raise CapExceeded(estimate, cap, "radius search")
    group_data = []
    for gi, g in enumerate(e.groups):
        pool = _edit_pool(e, query.op_kind, g)
        if pool:
            subsets: list[tuple[int, ...]] = []
            for r in range(1, min(len(pool), query.budget) + 1):
                subsets.extend(combinations(pool, r))
            subsets.sort()
            group_data.append((gi, subsets, g.weight))
    for b in range(1, query.budget + 1):
        for plan in _iter_plans(group_data, b):
            edited = _apply_plan(comp, query.op_kind, plan)
            members = _members_for_rule(edited, query.rule, query.k, order)
            if members != baseline:
                return RadiusAnswer(
                    True,
                    _plan_to_edits(plan, query.op_kind),
                    b if mode == "minimize" else None,
                )
    return RadiusAnswer(False, None, None)


def save_witness(pair: WitnessPair, out_dir) -> None:
    """Write before/after `.appel` files plus a header naming the edit and
    the expected committees."""
    import os

    from .elections import save_election

    os.makedirs(out_dir, exist_ok=True)
    save_election(pair.e_before, os.path.join(out_dir, "before.appel"))
    save_election(pair.e_after, os.path.join(out_dir, "after.appel"))
    lines = [
        f"rule {pair.rule.value}",
        f"k {pair.k}",
        f"edit {pair.edit.kind.value} {pair.edit.group_index} {pair.edit.candidate}",
        "committee_before " + " ".join(str(c) for c in pair.expected_before),
        "committee_after " + " ".join(str(c) for c in pair.expected_after),
    ]
    with open(os.path.join(out_dir, "witness.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

"""Weighted approval elections, tie-breaking orders, committees, and
single-approval edits.

A weight-w voter group stands for w identical voters; the hardness
constructions need voter counts in the millions, so groups are the
canonical representation and every rule treats a weight-w group exactly
like w unit voters (checked by the weight-expansion property tests).

All types are immutable values; edits are functional and return new
elections.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import ParseError, PreconditionError


@dataclass(frozen=True)
class VoterGroup:
    """weight identical voters sharing one approval set (may be empty)."""

    weight: int
    approvals: frozenset[int]

    def __init__(self, weight: int, approvals: Iterable[int]):
        object.__setattr__(self, "weight", int(weight))
        object.__setattr__(self, "approvals", frozenset(approvals))
        if self.weight < 1:
            raise ValueError(f"group weight must be >= 1, got {weight}")


@dataclass(frozen=True)
class TieOrder:
    """Candidate priority: earlier position in `order` wins every tie."""

    order: tuple[int, ...]

    def __post_init__(self):
        m = len(self.order)
        if sorted(self.order) != list(range(m)):
            raise ValueError(f"tie order must be a permutation of 0..{m - 1}")
        pos = [0] * m
        for rank, c in enumerate(self.order):
            pos[c] = rank
        object.__setattr__(self, "_pos", tuple(pos))

    @staticmethod
    def default(m: int) -> TieOrder:
        """Ascending candidate index."""
        return TieOrder(tuple(range(m)))

    def position(self, candidate: int) -> int:
        return self._pos[candidate]


@dataclass(frozen=True)
class Election:
    """num_candidates candidates indexed 0..m-1 plus an ordered list of
    voter groups.  `tie_order` is optional; rules fall back to ascending
    index when it is absent."""

    num_candidates: int
    groups: tuple[VoterGroup, ...]
    tie_order: TieOrder | None = None

    def __init__(
        self,
        num_candidates: int,
        groups: Iterable[VoterGroup],
        tie_order: TieOrder | None = None,
    ):
        object.__setattr__(self, "num_candidates", int(num_candidates))
        object.__setattr__(self, "groups", tuple(groups))
        object.__setattr__(self, "tie_order", tie_order)
        m = self.num_candidates
        if m < 1:
            raise ValueError("need at least one candidate")
        if not self.groups:
            raise ValueError("need at least one voter")
        for g in self.groups:
            for c in g.approvals:
                if not 0 <= c < m:
                    raise ValueError(f"approval index {c} out of range [0, {m - 1}]")
        if tie_order is not None and len(tie_order.order) != m:
            raise ValueError("tie order length differs from candidate count")

    @property
    def num_voters(self) -> int:
        return sum(g.weight for g in self.groups)

    def effective_order(self) -> TieOrder:
        return self.tie_order if self.tie_order is not None else TieOrder.default(self.num_candidates)


@dataclass(frozen=True)
class Committee:
    """Size-k candidate set, stored sorted ascending."""

    members: tuple[int, ...]

    def __init__(self, members: Iterable[int]):
        ms = tuple(sorted(members))
        if len(set(ms)) != len(ms):
            raise ValueError("duplicate committee member")
        object.__setattr__(self, "members", ms)

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, candidate: int) -> bool:
        return candidate in self.members

    def __iter__(self):
        return iter(self.members)


class EditKind(Enum):
    ADD = "add"
    REMOVE = "remove"

    @staticmethod
    def parse(name: str) -> "EditKind":
        try:
            return EditKind(name.lower())
        except ValueError:
            raise ValueError(f"unknown operation {name!r}; expected add or remove") from None

    def inverse(self) -> "EditKind":
        return EditKind.REMOVE if self is EditKind.ADD else EditKind.ADD


@dataclass(frozen=True)
class ApprovalEdit:
    """Add or remove one approval for one voter of one group."""

    kind: EditKind
    group_index: int
    candidate: int


def approval_score(e: Election, candidate: int) -> int:
    """Number of voters approving `candidate` (weights counted)."""
    if not 0 <= candidate < e.num_candidates:
        raise ValueError(f"candidate {candidate} out of range [0, {e.num_candidates - 1}]")
    return sum(g.weight for g in e.groups if candidate in g.approvals)


def apply_edit(e: Election, edit: ApprovalEdit) -> Election:
    """Apply a single-approval edit to one voter.

    A group of weight w > 1 is split: the edited weight-1 group is
    inserted at the original index, the untouched weight-(w-1) remainder
    follows it.  Consequently the edit with the opposite kind at the same
    (group_index, candidate) coordinates undoes the change (up to group
    splitting, i.e. as a voter multiset).
    """
    if not 0 <= edit.group_index < len(e.groups):
        raise PreconditionError(f"group index {edit.group_index} out of range")
    if not 0 <= edit.candidate < e.num_candidates:
        raise PreconditionError(f"candidate {edit.candidate} out of range")
    group = e.groups[edit.group_index]
    present = edit.candidate in group.approvals
    if edit.kind is EditKind.ADD:
        if present:
            raise PreconditionError(
                f"group {edit.group_index} already approves candidate {edit.candidate}"
            )
        new_set = group.approvals | {edit.candidate}
    else:
        if not present:
            raise PreconditionError(
                f"group {edit.group_index} does not approve candidate {edit.candidate}"
            )
        new_set = group.approvals - {edit.candidate}

    edited = VoterGroup(1, new_set)
    before = e.groups[: edit.group_index]
    after = e.groups[edit.group_index + 1 :]
    if group.weight == 1:
        new_groups = before + (edited,) + after
    else:
        remainder = VoterGroup(group.weight - 1, group.approvals)
        new_groups = before + (edited, remainder) + after
    return Election(e.num_candidates, new_groups, e.tie_order)


def inverse_edit(edit: ApprovalEdit) -> ApprovalEdit:
    """The edit that undoes `edit` on the election apply_edit produced."""
    return ApprovalEdit(edit.kind.inverse(), edit.group_index, edit.candidate)


def committee_difference(w1: Committee, w2: Committee) -> int:
    """k minus the overlap: 0 iff equal, k iff disjoint."""
    if w1.size != w2.size:
        raise ValueError(f"committee sizes differ: {w1.size} vs {w2.size}")
    return w1.size - len(set(w1.members) & set(w2.members))


def voter_multiset(e: Election) -> Counter:
    """Multiset of approval sets, weights expanded; the equality notion
    under which inverse edits cancel."""
    c: Counter = Counter()
    for g in e.groups:
        c[g.approvals] += g.weight
    return c


def expand_to_units(e: Election) -> Election:
    """Replace every weight-w group by w identical weight-1 groups."""
    units = []
    for g in e.groups:
        units.extend(VoterGroup(1, g.approvals) for _ in range(g.weight))
    return Election(e.num_candidates, units, e.tie_order)


_GROUP_LINE = re.compile(r"^(\d+)\s*:\s*(.*)$")


def parse_election(text: str) -> Election:
    """Parse the `.appel` text format.

    Format: `#` comment lines anywhere; first real line `m <int>`;
    optional `order <m indices>`; then one `<weight>: <indices>` line per
    group (an empty index list is a voter approving nobody).
    """
    m: int | None = None
    tie_order: TieOrder | None = None
    groups: list[VoterGroup] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if m is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "m":
                raise ParseError(lineno, f"expected 'm <count>' header, got {raw!r}")
            try:
                m = int(parts[1])
            except ValueError:
                raise ParseError(lineno, f"bad candidate count {parts[1]!r}") from None
            if m < 1:
                raise ParseError(lineno, "candidate count must be >= 1")
            continue
        if line.split()[0] == "order" and tie_order is None and not groups:
            parts = line.split()
            try:
                perm = tuple(int(p) for p in parts[1:])
                tie_order = TieOrder(perm)
            except ValueError as exc:
                raise ParseError(lineno, f"bad tie order: {exc}") from None
            if len(perm) != m:
                raise ParseError(lineno, f"tie order has {len(perm)} entries, expected {m}")
            continue
        match = _GROUP_LINE.match(line)
        if not match:
            raise ParseError(lineno, f"expected '<weight>: <indices>', got {raw!r}")
        weight = int(match.group(1))
        if weight < 1:
            raise ParseError(lineno, f"group weight must be >= 1, got {weight}")
        indices: list[int] = []
        for tok in match.group(2).split():
            try:
                c = int(tok)
            except ValueError:
                raise ParseError(lineno, f"bad candidate index {tok!r}") from None
            if not 0 <= c < m:
                raise ParseError(lineno, f"candidate index {c} out of range [0, {m - 1}]")
            if c in indices:
                raise ParseError(lineno, f"duplicate candidate index {c}")
            indices.append(c)
        groups.append(VoterGroup(weight, indices))
    if m is None:
        raise ParseError(1, "missing 'm <count>' header")
    if not groups:
        raise ParseError(1, "election has no voters")
    return Election(m, groups, tie_order)


def serialize_election(e: Election) -> str:
    """Canonical `.appel` text; round-trips through parse_election."""
    lines = [f"m {e.num_candidates}"]
    if e.tie_order is not None:
        lines.append("order " + " ".join(str(c) for c in e.tie_order.order))
    for g in e.groups:
        approvals = " ".join(str(c) for c in sorted(g.approvals))
        lines.append(f"{g.weight}: {approvals}".rstrip())
    return "\n".join(lines) + "\n"


def load_election(path) -> Election:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_election(fh.read())


def save_election(e: Election, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_election(e))

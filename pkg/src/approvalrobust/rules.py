"""The four committee rules: AV, GreedyCC, GreedyPAV, and Phragmen's
sequential rule, plus brute-force Thiele optima for small-instance testing.

Everything is evaluated in exact arithmetic.  Greedy marginals are kept as
integers scaled by a common denominator (lcm of 1..k+1), Phragmen purchase
times as exact rationals (gmpy2.mpq when available, fractions.Fraction
otherwise).  No floats are used anywhere: the hardness instances decide
the winner on razor-thin score gaps that rounding would destroy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .elections import Committee, Election, TieOrder
from .errors import CapExceeded

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _Q = Fraction


class Rule(Enum):
    AV = "av"
    GREEDY_CC = "greedycc"
    GREEDY_PAV = "greedypav"
    PHRAGMEN = "phragmen"

    @staticmethod
    def parse(name: str) -> "Rule":
        try:
            return Rule(name.lower())
        except ValueError:
            names = ", ".join(r.value for r in Rule)
            raise ValueError(f"unknown rule {name!r}; expected one of {names}") from None


class Owa(Enum):
    """Thiele scoring families: constant, coverage, and harmonic weights."""

    AV = "av"
    CC = "cc"
    PAV = "pav"

    def weight(self, i: int) -> Fraction:
        if i < 1:
            raise ValueError("OWA weights are indexed from 1")
        if self is Owa.AV:
            return Fraction(1)
        if self is Owa.CC:
            return Fraction(1) if i == 1 else Fraction(0)
        return Fraction(1, i)


@dataclass(frozen=True)
class GreedyStep:
    """One greedy iteration: the pick, its exact marginal, and the
    marginals of every candidate still outside the committee."""

    chosen: int
    marginal: Fraction
    scores: Mapping[int, Fraction]


@dataclass(frozen=True)
class GreedyTrace:
    steps: tuple[GreedyStep, ...]


@dataclass(frozen=True)
class PhragmenEvent:
    """A purchase: at `time` the groups in `payers` jointly hold exactly
    one unit of money and spend it on `candidate`."""

    time: Fraction
    candidate: int
    payers: tuple[tuple[int, int], ...]  # (group index, weight)


@dataclass(frozen=True)
class PhragmenTrace:
    events: tuple[PhragmenEvent, ...]
    filled_by_tiebreak: tuple[int, ...]


class _Compiled:
    """Flat per-candidate/per-group view used by the rule evaluators; the
    radius solver builds these directly to skip Election validation."""

    __slots__ = ("m", "weights", "approvals", "approvers")

    def __init__(self, m: int, weights: list[int], approvals: list[tuple[int, ...]]):
        self.m = m
        self.weights = weights
        self.approvals = approvals
        self.approvers: list[list[int]] = [[] for _ in range(m)]
        for gi, aps in enumerate(approvals):
            for c in aps:
                self.approvers[c].append(gi)


def _compile(e: Election) -> _Compiled:
    return _Compiled(
        e.num_candidates,
        [g.weight for g in e.groups],
        [tuple(sorted(g.approvals)) for g in e.groups],
    )


def _check_k(m: int, k: int) -> None:
    if k > m:
        raise ValueError(f"committee size {k} exceeds m = {m}")
    if k < 1:
        raise ValueError("committee size must be >= 1")


def _scores(comp: _Compiled) -> list[int]:
    scores = [0] * comp.m
    for w, aps in zip(comp.weights, comp.approvals):
        for c in aps:
            scores[c] += w
    return scores


def lambda_score(e: Election, candidate_set, owa: Owa) -> Fraction:
    """Exact Thiele score of a candidate set: each voter contributes the
    OWA prefix sum at their overlap with the set."""
    s = frozenset(candidate_set)
    for c in s:
        if not 0 <= c < e.num_candidates:
            raise ValueError(f"candidate {c} out of range")
    max_overlap = max((len(s & g.approvals) for g in e.groups), default=0)
    prefix = [Fraction(0)]
    for i in range(1, max_overlap + 1):
        prefix.append(prefix[-1] + owa.weight(i))
    total = Fraction(0)
    for g in e.groups:
        total += g.weight * prefix[len(s & g.approvals)]
    return total


def _av_members(comp: _Compiled, k: int, order: TieOrder) -> tuple[int, ...]:
    scores = _scores(comp)
    ranked = sorted(range(comp.m), key=lambda c: (-scores[c], order.position(c)))
    return tuple(sorted(ranked[:k]))


def compute_av(e: Election, k: int, order: TieOrder | None = None) -> Committee:
    """The k candidates with highest approval score, ties by priority."""
    order = order or e.effective_order()
    _check_k(e.num_candidates, k)
    return Committee(_av_members(_compile(e), k, order))


def _lambda_table(owa: Owa, k: int) -> tuple[list[int], int]:
    """Scaled integer OWA weights lam[1..k+1]; lam[i] = owa(i) * scale."""
    if owa is Owa.CC:
        return [0, 1] + [0] * k, 1
    scale = math.lcm(*range(1, k + 2))
    if owa is Owa.AV:
        return [0] + [scale] * (k + 1), scale
    return [0] + [scale // i for i in range(1, k + 2)], scale


def _greedy_members(
    comp: _Compiled, k: int, order: TieOrder, owa: Owa
) -> tuple[int, ...]:
    """Trace-free greedy loop used by the radius solver's hot path."""
    lam, _ = _lambda_table(owa, k)
    marg = [0] * comp.m
    base = lam[1]
    for w, aps in zip(comp.weights, comp.approvals):
        wl = w * base
        for c in aps:
            marg[c] += wl
    cnt = [0] * len(comp.weights)
    in_w = [False] * comp.m
    chosen = []
    weights = comp.weights
    approvals = comp.approvals
    for _ in range(k):
        best = -1
        best_m = -1
        for c in order.order:
            if not in_w[c] and marg[c] > best_m:
                best = c
                best_m = marg[c]
        in_w[best] = True
        chosen.append(best)
        if len(chosen) == k:
            break
        for gi in comp.approvers[best]:
            j = cnt[gi]
            cnt[gi] = j + 1
            delta = (lam[j + 2] - lam[j + 1]) * weights[gi]
            if delta:
                for c2 in approvals[gi]:
                    if not in_w[c2]:
                        marg[c2] += delta
    return tuple(sorted(chosen))


def compute_greedy_thiele(
    e: Election, k: int, order: TieOrder | None = None, owa: Owa = Owa.CC
) -> tuple[Committee, GreedyTrace]:
    """k rounds of marginal-score maximization with priority tie-breaking.

    GreedyCC is the coverage instance (owa=CC), GreedyPAV the harmonic one
    (owa=PAV).  The trace records each round's exact marginals.
    """
    if owa not in (Owa.CC, Owa.PAV):
        raise ValueError("greedy rule is defined for the CC and PAV weight families")
    order = order or e.effective_order()
    _check_k(e.num_candidates, k)
    comp = _compile(e)
    lam, scale = _lambda_table(owa, k)
    marg = [0] * comp.m
    for w, aps in zip(comp.weights, comp.approvals):
        wl = w * lam[1]
        for c in aps:
            marg[c] += wl
    cnt = [0] * len(comp.weights)
    in_w = [False] * comp.m
    chosen: list[int] = []
    steps: list[GreedyStep] = []
    for _ in range(k):
        best = -1
        best_m = -1
        for c in order.order:
            if not in_w[c] and marg[c] > best_m:
                best = c
                best_m = marg[c]
        steps.append(
            GreedyStep(
                chosen=best,
                marginal=Fraction(best_m, scale),
                scores={c: Fraction(marg[c], scale) for c in order.order if not in_w[c]},
            )
        )
        in_w[best] = True
        chosen.append(best)
        for gi in comp.approvers[best]:
            j = cnt[gi]
            cnt[gi] = j + 1
            delta = (lam[j + 2] - lam[j + 1]) * comp.weights[gi]
            if delta:
                for c2 in comp.approvals[gi]:
                    if not in_w[c2]:
                        marg[c2] += delta
    return Committee(chosen), GreedyTrace(tuple(steps))


def _phragmen_members(
    comp: _Compiled, k: int, order: TieOrder, want_trace: bool = False
):
    """Event-driven purchase simulation in exact rationals.

    Candidate c's next affordable time solves score(c)*t - paid(c) = 1
    where paid(c) is the money its supporters already spent; we repeatedly
    take the earliest affordable candidate (priority breaks time ties,
    re-evaluating after every purchase), and fill any remaining seats by
    priority once only zero-score candidates are left.
    """
    scores = _scores(comp)
    spent = [0] * comp.m  # sum over supporters of weight * last reset time
    reset = [0] * len(comp.weights)
    in_w = [False] * comp.m
    chosen: list[int] = []
    events: list[PhragmenEvent] = []
    weights = comp.weights
    for _ in range(k):
        best = -1
        best_t = None
        for c in order.order:
            if in_w[c] or scores[c] == 0:
                continue
            t = _Q(1 + spent[c], scores[c])
            if best_t is None or t < best_t:
                best = c
                best_t = t
        if best < 0:
            break
        in_w[best] = True
        chosen.append(best)
        if want_trace:
            events.append(
                PhragmenEvent(
                    time=Fraction(int(best_t.numerator), int(best_t.denominator)),
                    candidate=best,
                    payers=tuple((gi, weights[gi]) for gi in comp.approvers[best]),
                )
            )
        for gi in comp.approvers[best]:
            delta = weights[gi] * (best_t - reset[gi])
            reset[gi] = best_t
            if delta:
                for c2 in comp.approvals[gi]:
                    if not in_w[c2]:
                        spent[c2] += delta
    fill = [c for c in order.order if not in_w[c]][: k - len(chosen)]
    members = tuple(sorted(chosen + fill))
    if want_trace:
        return members, PhragmenTrace(tuple(events), tuple(fill))
    return members


def compute_phragmen(
    e: Election, k: int, order: TieOrder | None = None
) -> tuple[Committee, PhragmenTrace]:
    order = order or e.effective_order()
    _check_k(e.num_candidates, k)
    members, trace = _phragmen_members(_compile(e), k, order, want_trace=True)
    return Committee(members), trace


def brute_force_thiele(
    e: Election,
    k: int,
    order: TieOrder | None = None,
    owa: Owa = Owa.CC,
    cap: int = 10**6,
) -> Committee:
    """Exact Thiele optimum by exhaustive enumeration; testing oracle only.

    Ties go to the committee that is lexicographically first by priority.
    Refuses (CapExceeded) when C(m, k) exceeds `cap`.
    """
    order = order or e.effective_order()
    _check_k(e.num_candidates, k)
    count = math.comb(e.num_candidates, k)
    if count > cap:
        raise CapExceeded(count, cap, "committee enumeration")
    comp = _compile(e)
    lam, scale = _lambda_table(owa, k)
    prefix = [0] * (k + 1)
    for i in range(1, k + 1):
        prefix[i] = prefix[i - 1] + lam[i]
    best_key = None
    best_members = None
    for members in combinations(range(comp.m), k):
        mset = frozenset(members)
        score = 0
        for w, aps in zip(comp.weights, comp.approvals):
            overlap = 0
            for c in aps:
                if c in mset:
                    overlap += 1
            score += w * prefix[overlap]
        key = (-score, tuple(sorted(order.position(c) for c in members)))
        if best_key is None or key < best_key:
            best_key = key
            best_members = members
    return Committee(best_members)


_GREEDY_OWA = {Rule.GREEDY_CC: Owa.CC, Rule.GREEDY_PAV: Owa.PAV}


def compute_committee(
    e: Election, rule: Rule, k: int, order: TieOrder | None = None
) -> Committee:
    """Resolute winner under `rule`; the single entry point used by the
    robustness and experiment layers."""
    if rule is Rule.AV:
        return compute_av(e, k, order)
    if rule is Rule.PHRAGMEN:
        return compute_phragmen(e, k, order)[0]
    return compute_greedy_thiele(e, k, order, _GREEDY_OWA[rule])[0]


def _members_for_rule(comp: _Compiled, rule: Rule, k: int, order: TieOrder) -> tuple[int, ...]:
    if rule is Rule.AV:
        return _av_members(comp, k, order)
    if rule is Rule.PHRAGMEN:
        return _phragmen_members(comp, k, order)
    return _greedy_members(comp, k, order, _GREEDY_OWA[rule])

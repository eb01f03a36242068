import random
from fractions import Fraction

import pytest

from approvalrobust import (
    CapExceeded,
    Committee,
    Election,
    Owa,
    Rule,
    TieOrder,
    VoterGroup,
    brute_force_thiele,
    compute_av,
    compute_committee,
    compute_greedy_thiele,
    compute_phragmen,
    expand_to_units,
    lambda_score,
    parse_election,
)

from test_elections import WITNESS_K2_TEXT, random_election

E_BEFORE = parse_election(WITNESS_K2_TEXT)
E_AFTER = parse_election("m 4\n1: 0 2\n1: 0 3\n1: 1 2\n1: 1 3\n1: 2\n")

ALL_RULES = (Rule.AV, Rule.GREEDY_CC, Rule.GREEDY_PAV, Rule.PHRAGMEN)


class TestLambdaScore:
    def test_cc_counts_covered_voters(self):
        assert lambda_score(E_BEFORE, {0, 1}, Owa.CC) == 4

    def test_empty_set_scores_zero(self):
        for owa in Owa:
            assert lambda_score(E_BEFORE, set(), owa) == 0

    def test_pav_harmonic_weights(self):
        e = Election(2, [VoterGroup(1, [0, 1])])
        assert lambda_score(e, {0, 1}, Owa.PAV) == Fraction(3, 2)

    def test_av_weights_count_all_overlaps(self):
        e = Election(3, [VoterGroup(2, [0, 1]), VoterGroup(1, [2])])
        assert lambda_score(e, {0, 1, 2}, Owa.AV) == 5

    def test_cc_equals_weighted_coverage_on_random_elections(self):
        rng = random.Random(5)
        for _ in range(50):
            e = random_election(rng, weighted=True)
            s = set(rng.sample(range(e.num_candidates), rng.randint(0, e.num_candidates)))
            covered = sum(g.weight for g in e.groups if s & g.approvals)
            assert lambda_score(e, s, Owa.CC) == covered


class TestAv:
    def test_all_tied_resolved_by_priority(self):
        assert compute_av(E_BEFORE, 2).members == (0, 1)

    def test_k_equals_m_returns_everyone(self):
        assert compute_av(E_BEFORE, 4).members == (0, 1, 2, 3)

    def test_score_bump_enters_committee(self):
        assert compute_av(E_AFTER, 2).members == (0, 2)

    def test_k_exceeds_m_rejected(self):
        with pytest.raises(ValueError, match="exceeds m"):
            compute_av(E_BEFORE, 5)

    def test_custom_tie_order(self):
        order = TieOrder((3, 2, 1, 0))
        assert compute_av(E_BEFORE, 2, order).members == (2, 3)


class TestGreedyThiele:
    def test_cc_keeps_first_block_before_edit(self):
        committee, trace = compute_greedy_thiele(E_BEFORE, 2, owa=Owa.CC)
        assert committee.members == (0, 1)
        assert [s.marginal for s in trace.steps] == [2, 2]

    def test_cc_flips_to_second_block_after_edit(self):
        committee, trace = compute_greedy_thiele(E_AFTER, 2, owa=Owa.CC)
        assert committee.members == (2, 3)
        assert trace.steps[0].marginal == 3

    def test_pav_second_round_marginals(self):
        committee, trace = compute_greedy_thiele(E_AFTER, 2, owa=Owa.PAV)
        assert committee.members == (2, 3)
        assert trace.steps[1].scores == {
            0: Fraction(3, 2),
            1: Fraction(3, 2),
            3: Fraction(2),
        }

    def test_av_family_not_allowed_in_greedy(self):
        with pytest.raises(ValueError):
            compute_greedy_thiele(E_BEFORE, 2, owa=Owa.AV)

    def test_chosen_marginals_nonincreasing(self):
        rng = random.Random(13)
        for _ in range(60):
            e = random_election(rng, m=rng.randint(3, 8), n=rng.randint(2, 10), weighted=True)
            k = rng.randint(1, e.num_candidates)
            for owa in (Owa.CC, Owa.PAV):
                _, trace = compute_greedy_thiele(e, k, owa=owa)
                marginals = [s.marginal for s in trace.steps]
                assert all(a >= b for a, b in zip(marginals, marginals[1:]))


class TestPhragmen:
    def test_before_edit_both_seats_bought_at_half(self):
        committee, trace = compute_phragmen(E_BEFORE, 2)
        assert committee.members == (0, 1)
        assert [ev.time for ev in trace.events] == [Fraction(1, 2), Fraction(1, 2)]

    def test_after_edit_flip_with_exact_times(self):
        committee, trace = compute_phragmen(E_AFTER, 2)
        assert committee.members == (2, 3)
        assert [(ev.candidate, ev.time) for ev in trace.events] == [
            (2, Fraction(1, 3)),
            (3, Fraction(1, 2)),
        ]

    def test_zero_score_candidates_filled_by_priority(self):
        e = Election(3, [VoterGroup(2, [0])])
        committee, trace = compute_phragmen(e, 2)
        assert committee.members == (0, 1)
        assert trace.filled_by_tiebreak == (1,)
        assert len(trace.events) == 1

    def test_budgets_sum_to_one_at_each_purchase(self):
        rng = random.Random(17)
        for _ in range(60):
            e = random_election(rng, weighted=True)
            if all(not g.approvals for g in e.groups):
                continue
            k = rng.randint(1, e.num_candidates)
            _, trace = compute_phragmen(e, k)
            reset = {}
            last_time = Fraction(0)
            for ev in trace.events:
                assert ev.time >= last_time
                last_time = ev.time
                total = Fraction(0)
                for gi, weight in ev.payers:
                    start = reset.get(gi, Fraction(0))
                    assert ev.time >= start
                    total += weight * (ev.time - start)
                    reset[gi] = ev.time
                assert total == 1


class TestBruteForce:
    def test_optimum_on_witness_election(self):
        assert brute_force_thiele(E_BEFORE, 2, owa=Owa.CC).members == (0, 1)
        assert lambda_score(E_BEFORE, {0, 1}, Owa.CC) == 4

    def test_k_equals_m(self):
        assert brute_force_thiele(E_BEFORE, 4, owa=Owa.PAV).members == (0, 1, 2, 3)

    def test_refuses_above_cap(self):
        e = Election(30, [VoterGroup(1, [0])])
        with pytest.raises(CapExceeded):
            brute_force_thiele(e, 15, owa=Owa.CC)

    def test_optimum_dominates_greedy(self):
        rng = random.Random(23)
        for _ in range(30):
            e = random_election(rng, m=6, n=8)
            k = rng.randint(1, 3)
            for owa in (Owa.CC, Owa.PAV):
                opt = brute_force_thiele(e, k, owa=owa)
                greedy, _ = compute_greedy_thiele(e, k, owa=owa)
                assert lambda_score(e, set(opt.members), owa) >= lambda_score(
                    e, set(greedy.members), owa
                )


class TestRuleInvariants:
    def test_determinism_across_repeated_runs(self):
        rng = random.Random(29)
        for _ in range(10):
            e = random_election(rng, weighted=True)
            k = rng.randint(1, e.num_candidates)
            for rule in ALL_RULES:
                first = compute_committee(e, rule, k)
                assert all(compute_committee(e, rule, k) == first for _ in range(3))

    def test_weight_expansion_changes_no_rule(self):
        rng = random.Random(31)
        for _ in range(40):
            e = random_election(rng, weighted=True)
            k = rng.randint(1, e.num_candidates)
            expanded = expand_to_units(e)
            for rule in ALL_RULES:
                assert compute_committee(e, rule, k) == compute_committee(expanded, rule, k)

    def test_rule_and_op_name_parsing(self):
        assert Rule.parse("AV") is Rule.AV
        assert Rule.parse("phragmen") is Rule.PHRAGMEN
        with pytest.raises(ValueError):
            Rule.parse("stv")

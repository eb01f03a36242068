"""Approval-based committee rules and a robustness laboratory around
them: full-replacement witnesses, an exact robustness-radius solver,
exact-cover hardness reductions with timing diagnostics, and a seeded
perturbation-experiment harness."""

from .elections import (
    ApprovalEdit,
    Committee,
    EditKind,
    Election,
    TieOrder,
    VoterGroup,
    apply_edit,
    approval_score,
    committee_difference,
    expand_to_units,
    inverse_edit,
    load_election,
    parse_election,
    save_election,
    serialize_election,
    voter_multiset,
)
from .errors import CapExceeded, ParseError, PreconditionError
from .experiments import (
    ExperimentConfig,
    ExperimentRecord,
    PerturbationSpec,
    ResamplingParams,
    default_level_grid,
    parse_experiment_config,
    perturb,
    read_records_csv,
    run_experiment,
    sample_resampling,
    write_records_csv,
)
from .reductions import (
    PhragmenTimeline,
    ReductionInstance,
    Rx3cInstance,
    Rx3cValidation,
    build_greedycc_reduction,
    build_greedypav_reduction,
    build_phragmen_reduction,
    build_reduction,
    check_reduction_correctness,
    exact_cover_oracle,
    load_rx3c,
    parse_rx3c,
    phragmen_timeline,
    save_reduction,
    serialize_rx3c,
    validate_rx3c,
)
from .robustness import (
    RadiusAnswer,
    RadiusQuery,
    WitnessPair,
    build_flip_witness,
    check_direction_symmetry,
    count_edit_plans,
    measure_robustness,
    save_witness,
    solve_radius,
)
from .rules import (
    GreedyStep,
    GreedyTrace,
    Owa,
    PhragmenEvent,
    PhragmenTrace,
    Rule,
    brute_force_thiele,
    compute_av,
    compute_committee,
    compute_greedy_thiele,
    compute_phragmen,
    lambda_score,
)

__version__ = "0.1.0"

"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 domain or precondition error,
3 refusal because a brute-force search would exceed its cap.  Every
command is a pure function of its flags and input files; outputs are
byte-identical across repeated runs and worker counts.
"""

from __future__ import annotations

import argparse
import sys

from .elections import EditKind, TieOrder, load_election, serialize_election
from .errors import CapExceeded
from .experiments import (
    PerturbationSpec,
    parse_experiment_config,
    perturb,
    run_experiment,
    write_records_csv,
)
from .reductions import build_reduction, load_rx3c, save_reduction
from .robustness import RadiusQuery, build_flip_witness, save_witness, solve_radius
from .rules import (
    Owa,
    Rule,
    compute_committee,
    compute_greedy_thiele,
    compute_phragmen,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _tie_order_arg(raw: str) -> TieOrder:
    return TieOrder(tuple(int(tok) for tok in raw.split(",")))


def _scaled_arg(raw: str) -> tuple[int, int]:
    big, _, small = raw.partition(":")
    return int(big), int(small)


def _fmt(fraction) -> str:
    return str(fraction)


def _cmd_compute(args) -> int:
    e = load_election(args.election)
    order = args.tie_order if args.tie_order is not None else e.effective_order()
    rule = Rule.parse(args.rule)
    if not args.trace:
        committee = compute_committee(e, rule, args.k, order)
        print(" ".join(str(c) for c in committee))
        return 0
    if rule is Rule.AV:
        raise ValueError("no trace available for av")
    if rule is Rule.PHRAGMEN:
        committee, trace = compute_phragmen(e, args.k, order)
        print(" ".join(str(c) for c in committee))
        for ev in trace.events:
            print(f"purchase {ev.candidate} {_fmt(ev.time)}")
        for c in trace.filled_by_tiebreak:
            print(f"tiebreak {c}")
        return 0
    owa = Owa.CC if rule is Rule.GREEDY_CC else Owa.PAV
    committee, trace = compute_greedy_thiele(e, args.k, order, owa)
    print(" ".join(str(c) for c in committee))
    for step in trace.steps:
        print(f"select {step.chosen} {_fmt(step.marginal)}")
    return 0


def _cmd_radius(args) -> int:
    e = load_election(args.election)
    query = RadiusQuery(
        election=e,
        rule=Rule.parse(args.rule),
        k=args.k,
        op_kind=EditKind.parse(args.op),
        budget=args.budget,
    )
    answer = solve_radius(query, mode="minimize" if args.minimize else "decide", cap=args.cap)
    if not answer.changed:
        print("no")
        return 0
    print("yes")
    if args.minimize:
        print(f"radius {answer.minimal_radius}")
    for edit in answer.witness_edits:
        print(f"{edit.group_index} {edit.candidate}")
    return 0


def _cmd_witness(args) -> int:
    pair = build_flip_witness(Rule.parse(args.rule), args.k)
    save_witness(pair, args.out_dir)
    print("before " + " ".join(str(c) for c in pair.expected_before))
    print("after " + " ".join(str(c) for c in pair.expected_after))
    return 0


def _cmd_reduce(args) -> int:
    inst = load_rx3c(args.rx3c)
    red = build_reduction(inst, Rule.parse(args.rule), EditKind.parse(args.op), args.scaled)
    save_reduction(red, args.out_dir)
    print(f"k {red.k}")
    print(f"budget {red.budget}")
    print(f"cover_found_unbribed {'true' if red.cover_found_unbribed else 'false'}")
    print(f"constants_ok {'true' if red.constants_ok else 'false'}")
    return 0


def _cmd_perturb(args) -> int:
    e = load_election(args.election)
    spec = PerturbationSpec(EditKind.parse(args.op), args.level, args.seed)
    sys.stdout.write(serialize_election(perturb(e, spec)))
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_experiment_config(fh.read(), seed_override=args.seed)
    records = run_experiment(cfg, workers=args.workers)
    write_records_csv(records, args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="approvalrobust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a winning committee")
    p.add_argument("--rule", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--election", required=True)
    p.add_argument("--tie-order", type=_tie_order_arg, default=None,
                   help="comma-separated candidate priority, overrides the file")
    p.add_argument("--trace", action="store_true",
                   help="print greedy marginals or purchase times as exact fractions")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("radius", help="can up to B edits change the committee?")
    p.add_argument("--rule", required=True)
    p.add_argument("--op", required=True, choices=["add", "remove"])
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--election", required=True)
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--cap", type=int, default=10**7)
    p.set_defaults(func=_cmd_radius)

    p = sub.add_parser("witness", help="emit a full-replacement witness pair")
    p.add_argument("--rule", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("reduce", help="compile an RX3C instance into a hardness election")
    p.add_argument("--rule", required=True)
    p.add_argument("--op", required=True, choices=["add", "remove"])
    p.add_argument("--rx3c", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--scaled", type=_scaled_arg, default=None, metavar="T:t",
                   help="override the weight constants (validated at build time)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("perturb", help="randomly flip approval slots")
    p.add_argument("--op", required=True, choices=["add", "remove"])
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--election", required=True)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("experiment", help="run the perturbation experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

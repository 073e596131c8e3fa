"""Command line interface.

Commands: solve, oracle, check, synthesize, generate, report.
Exit status: 0 success, 1 failed verdict (instability, infeasibility,
oracle disagreement), 2 validation or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from rideshare_market.allocation import (
    PaymentSchedule,
    check_feasibility,
    check_stability,
    compute_profits,
    synthesize_stable_payments,
)
from rideshare_market.errors import StabilityPreconditionError, ValidationError
from rideshare_market.generate import generate_instance
from rideshare_market.instance_io import parse_document, serialize_document
from rideshare_market.lp import Optimal
from rideshare_market.market import (
    Assignment,
    MarketInstance,
    UNASSIGNED,
    cost_recovery_gap,
    cost_share,
    surplus,
    valuation,
    welfare_paper,
    welfare_surplus,
)
from rideshare_market.solver import oracle_optimum, solve_optimal_assignment

EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_INVALID = 2


def _fmt(x) -> str:
    return str(x)


def _parse_payment_overrides(spec: str) -> dict:
    """Parse ``T1:V1=3,T2=5`` into {(tid, vid): value} / {(tid, None): value}."""
    out = {}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValidationError(f"--payments: entry {item!r} is not KEY=VALUE")
        key, _, value = item.partition("=")
        try:
            amount = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"--payments: not an exact number: {value!r}") from None
        if ":" in key:
            tid, _, vid = key.partition(":")
            out[(tid, vid)] = amount
        else:
            out[(key, None)] = amount
    return out


def _resolve_payments(inst, assignment, base, overrides) -> PaymentSchedule:
    """Full payment matrix: document payments, then CLI overrides, then the
    break-even default ``max(0, valuation - cost_share)`` for anything the
    user left unspecified."""
    entries = dict(base.entries) if base is not None else {}
    if overrides:
        for (tid, vid), value in overrides.items():
            if vid is None:
                vid = assignment.vehicle_of(tid)
                if vid is UNASSIGNED:
                    raise ValidationError(
                        f"--payments: traveler {tid!r} is unassigned; use TID:VID=value"
                    )
            entries[(tid, vid)] = value
    for pair in inst.compatible_pairs():
        if pair not in entries:
            entries[pair] = max(Fraction(0), surplus(inst, *pair))
    return PaymentSchedule(entries)


def _parse_assignment(inst, spec: str) -> Assignment:
    mapping = {t.id: UNASSIGNED for t in inst.travelers}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        tid, sep, vid = item.partition("=")
        if not sep:
            raise ValidationError(f"--assignment: entry {item!r} is not TID=VID")
        mapping[tid] = vid
    return Assignment(mapping)


def _assignment_table(a: Assignment):
    return {tid: (vid if vid is not UNASSIGNED else None) for tid, vid in sorted(a.mapping.items())}


def _report_check(report):
    return {
        "verdict": report.verdict,
        "violations": [
            {"kind": v.kind, "pair": list(v.pair), "lhs": _fmt(v.lhs), "rhs": _fmt(v.rhs)}
            for v in report.violations
        ],
    }


def _emit(doc: dict, fmt: str, out=None):
    out = out if out is not None else sys.stdout
    if fmt == "machine":
        json.dump(doc, out, indent=2)
        out.write("\n")
        return
    _emit_text(doc, out)


def _emit_text(doc: dict, out, prefix=""):
    for key, value in doc.items():
        if isinstance(value, dict):
            out.write(f"{prefix}{key}:\n")
            _emit_text(value, out, prefix + "  ")
        elif isinstance(value, list):
            out.write(f"{prefix}{key}:\n")
            for item in value:
                if isinstance(item, dict):
                    out.write(f"{prefix}  -\n")
                    _emit_text(item, out, prefix + "    ")
                else:
                    out.write(f"{prefix}  - {item}\n")
        else:
            out.write(f"{prefix}{key}: {value}\n")


def _load(path: str, cost_share_mode: str | None):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    doc = parse_document(text)
    inst = doc.instance
    if cost_share_mode is not None and cost_share_mode != inst.cost_share_mode:
        inst = MarketInstance(
            network=inst.network,
            travelers=inst.travelers,
            vehicles=inst.vehicles,
            cost_share_mode=cost_share_mode,
        )
    return inst, doc.payments


def _solve_report(inst, payments, objective):
    fixed = payments if objective == "paper" else None
    result = solve_optimal_assignment(inst, payments=fixed)
    doc = {
        "objective_mode": objective,
        "assignment": _assignment_table(result.assignment),
        "objective": _fmt(result.objective),
        "welfare_surplus": _fmt(welfare_surplus(inst, result.assignment)),
    }
    if payments is not None:
        doc["welfare_paper"] = _fmt(welfare_paper(inst, result.assignment, payments))
    doc["cost_recovery_gap"] = {
        v.id: _fmt(cost_recovery_gap(inst, result.assignment, v.id)) for v in inst.vehicles
    }
    if result.dual_certificate is not None:
        doc["dual_certificate"] = {
            "y": {k: _fmt(v) for k, v in sorted(result.dual_certificate.y.items())},
            "z": {k: _fmt(v) for k, v in sorted(result.dual_certificate.z.items())},
        }
    return result, doc


def cmd_solve(args) -> int:
    inst, base_payments = _load(args.instance, args.cost_share_mode)
    overrides = _parse_payment_overrides(args.payments) if args.payments else None
    payments = None
    if args.objective == "paper" or base_payments is not None or overrides:
        probe = solve_optimal_assignment(inst, with_certificate=False)
        payments = _resolve_payments(inst, probe.assignment, base_payments, overrides)
    _, doc = _solve_report(inst, payments, args.objective)
    _emit(doc, args.format)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst, base_payments = _load(args.instance, args.cost_share_mode)
    result = solve_optimal_assignment(inst, with_certificate=False)
    objective, argmax = oracle_optimum(inst)
    agree = objective == result.objective
    doc = {
        "oracle_objective": _fmt(objective),
        "solver_objective": _fmt(result.objective),
        "agreement": agree,
        "optimal_assignments": [_assignment_table(a) for a in argmax],
    }
    _emit(doc, args.format)
    return EXIT_OK if agree else EXIT_VERDICT_FALSE


def cmd_check(args) -> int:
    inst, base_payments = _load(args.instance, args.cost_share_mode)
    if args.assignment:
        assignment = _parse_assignment(inst, args.assignment)
    else:
        assignment = solve_optimal_assignment(inst, with_certificate=False).assignment
    overrides = _parse_payment_overrides(args.payments) if args.payments else None
    payments = _resolve_payments(inst, assignment, base_payments, overrides)
    alloc = compute_profits(inst, assignment, payments)
    feas = check_feasibility(inst, assignment, alloc)
    doc = {
        "assignment": _assignment_table(assignment),
        "feasibility": _report_check(feas),
        "eq8_holds": {f"{tid}:{vid}": ok for (tid, vid), ok in sorted(feas.eq8_status.items())},
    }
    verdict = feas.verdict
    if feas.verdict:
        stab = check_stability(inst, assignment, payments, classic_core=args.classic_core)
        doc["stability"] = _report_check(stab)
        doc["stability_mode"] = "classic_core" if args.classic_core else "literal"
        verdict = stab.verdict
    else:
        doc["stability"] = {"verdict": None, "violations": [], "skipped": "allocation infeasible"}
    _emit(doc, args.format)
    return EXIT_OK if verdict else EXIT_VERDICT_FALSE


def cmd_synthesize(args) -> int:
    inst, _ = _load(args.instance, args.cost_share_mode)
    if args.assignment:
        assignment = _parse_assignment(inst, args.assignment)
    else:
        assignment = solve_optimal_assignment(inst, with_certificate=False).assignment
    result = synthesize_stable_payments(inst, assignment)
    doc = {"assignment": _assignment_table(assignment), "feasible": result.feasible}
    if result.feasible:
        doc["payments"] = {
            f"{tid}:{vid}": _fmt(x) for (tid, vid), x in sorted(result.schedule.entries.items())
        }
        doc["traveler_profit"] = {
            f"{tid}:{vid}": _fmt(x)
            for (tid, vid), x in sorted(result.allocation.pi.items())
            if assignment.vehicle_of(tid) == vid
        }
        doc["vehicle_profit"] = {
            f"{tid}:{vid}": _fmt(x)
            for (tid, vid), x in sorted(result.allocation.rho.items())
            if assignment.vehicle_of(tid) == vid
        }
    else:
        doc["certificate"] = [
            {"constraint": str(label), "multiplier": _fmt(mu)}
            for label, mu in zip(result.row_labels, result.certificate)
            if mu != 0
        ]
    _emit(doc, args.format)
    return EXIT_OK if result.feasible else EXIT_VERDICT_FALSE


def cmd_generate(args) -> int:
    inst = generate_instance(args.seed, args.n, args.m, degenerate=args.degenerate)
    text = serialize_document(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_report(args) -> int:
    inst, base_payments = _load(args.instance, args.cost_share_mode)
    result, doc = _solve_report(inst, None, "surplus")
    assignment = result.assignment
    overrides = _parse_payment_overrides(args.payments) if args.payments else None
    payments = _resolve_payments(inst, assignment, base_payments, overrides)
    doc["welfare_paper"] = _fmt(welfare_paper(inst, assignment, payments))
    alloc = compute_profits(inst, assignment, payments)
    feas = check_feasibility(inst, assignment, alloc)
    doc["feasibility"] = _report_check(feas)
    doc["eq8_holds"] = {f"{tid}:{vid}": ok for (tid, vid), ok in sorted(feas.eq8_status.items())}
    if feas.verdict:
        stab = check_stability(inst, assignment, payments, classic_core=args.classic_core)
        doc["stability"] = _report_check(stab)
    else:
        doc["stability"] = {"verdict": None, "violations": [], "skipped": "allocation infeasible"}
    synth = synthesize_stable_payments(inst, assignment)
    doc["synthesis"] = {"feasible": synth.feasible}
    if synth.feasible:
        doc["synthesis"]["payments"] = {
            f"{tid}:{vid}": _fmt(x) for (tid, vid), x in sorted(synth.schedule.entries.items())
        }
    if args.with_oracle:
        objective, argmax = oracle_optimum(inst)
        doc["oracle"] = {
            "objective": _fmt(objective),
            "agreement": objective == result.objective,
            "optima_count": len(argmax),
        }
    _emit(doc, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rideshare-market",
        description="Exact traveler-vehicle assignment market solver and verifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance document path")
        p.add_argument("--cost-share-mode", choices=["per_seat", "explicit"], default=None)
        p.add_argument("--format", choices=["text", "machine"], default="text")

    p = sub.add_parser("solve", help="compute the optimal assignment")
    common(p)
    p.add_argument("--objective", choices=["surplus", "paper"], default="surplus")
    p.add_argument("--payments", help="payment overrides, e.g. T1:V1=3,T2=5")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive optimum and solver cross-check")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="feasibility and stability of given payments")
    common(p)
    p.add_argument("--payments", help="payment overrides, e.g. T1:V1=3,T2=5")
    p.add_argument("--assignment", help="override assignment, e.g. T1=V1,T2=V1")
    p.add_argument("--classic-core", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synthesize", help="synthesize a stable payment schedule")
    common(p)
    p.add_argument("--assignment", help="override assignment, e.g. T1=V1,T2=V1")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("generate", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=4, help="number of travelers")
    p.add_argument("--m", type=int, default=2, help="number of vehicles")
    p.add_argument("--degenerate", action="store_true", help="bias toward tied optima")
    p.add_argument("--output", "-o", help="write to file instead of stdout")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("report", help="full report: solve, checks, synthesis")
    common(p)
    p.add_argument("--payments", help="payment overrides")
    p.add_argument("--classic-core", action="store_true")
    p.add_argument("--with-oracle", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except StabilityPreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERDICT_FALSE
    except ValidationError as exc:
        for message in exc.errors:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

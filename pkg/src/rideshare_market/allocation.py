"""Profit allocations, feasibility/stability checking, payment synthesis.

Payments form a full matrix over compatible pairs: the stability
inequalities compare against counterfactual rides, so off-match pairs must
be priced too.  Profits are derived from payments; all checks are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from rideshare_market.errors import StabilityPreconditionError, ValidationError
from rideshare_market.lp import EQ, GE, LE, LPProblem, Infeasible, Optimal, Row, lp_solve
from rideshare_market.market import (
    Assignment,
    MarketInstance,
    UNASSIGNED,
    cost_share,
    valuation,
    validate_assignment,
)

_ZERO = Fraction(0)


def _money(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class PaymentSchedule:
    """Payment per compatible (traveler, vehicle) pair, matched or not."""

    entries: dict

    def __post_init__(self):
        entries = {k: _money(v) for k, v in self.entries.items()}
        object.__setattr__(self, "entries", entries)
        bad = [k for k, v in entries.items() if v < 0]
        if bad:
            raise ValidationError([f"payment for pair {k} is negative" for k in bad])

    def __getitem__(self, pair) -> Fraction:
        return self.entries[pair]

    def get(self, pair, default=None):
        return self.entries.get(pair, default)


def validate_schedule(inst: MarketInstance, t: PaymentSchedule):
    missing = [p for p in inst.compatible_pairs() if p not in t.entries]
    if missing:
        raise ValidationError([f"schedule: no payment for compatible pair {p}" for p in missing])


@dataclass(frozen=True)
class ProfitAllocation:
    """Traveler profits ``pi`` and vehicle profits ``rho`` per compatible
    pair.  Off-match entries are zero when built by
    :func:`compute_profits`."""

    pi: dict
    rho: dict


@dataclass(frozen=True)
class Violation:
    kind: str
    pair: tuple
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class CheckReport:
    verdict: bool
    violations: tuple
    #: feasibility only: per matched pair, whether the literal
    #: utility-minus-cost-share version of the paired-sum identity holds
    #: (it does exactly when the payment equals the traveler's v_min).
    eq8_status: dict = field(default_factory=dict)


def compute_profits(inst: MarketInstance, a: Assignment, t: PaymentSchedule) -> ProfitAllocation:
    """Profit matrices for assignment ``a`` under schedule ``t``.

    Matched pair: vehicle profit is payment minus cost share; traveler
    profit is valuation minus payment minus the traveler's minimum accepted
    value.  Every off-match entry is zero.
    """
    validate_assignment(inst, a)
    pi = {p: _ZERO for p in inst.compatible_pairs()}
    rho = {p: _ZERO for p in inst.compatible_pairs()}
    for tid, vid in a.assigned_pairs():
        if t.get((tid, vid)) is None:
            raise ValidationError(f"profits: no payment for matched pair ({tid!r}, {vid!r})")
        pay = t[(tid, vid)]
        trav = inst.traveler(tid)
        rho[(tid, vid)] = pay - cost_share(inst, tid, vid)
        pi[(tid, vid)] = valuation(trav, vid) - pay - trav.v_min
    return ProfitAllocation(pi=pi, rho=rho)


def check_feasibility(inst: MarketInstance, a: Assignment, alloc: ProfitAllocation) -> CheckReport:
    """Feasibility of a profit allocation under ``a``.

    Checks nonnegativity on matched pairs, the paired-sum identity
    ``pi + rho = valuation - cost_share - v_min`` (the form the profit
    definitions force), zero vehicle profit off the served set, and zero
    traveler profit for the unassigned.  The literal utility-based variant
    of the identity is reported per pair in ``eq8_status``, never enforced.
    """
    validate_assignment(inst, a)
    violations = []
    eq8 = {}
    for tid, vid in a.assigned_pairs():
        pair = (tid, vid)
        trav = inst.traveler(tid)
        pi = alloc.pi[pair]
        rho = alloc.rho[pair]
        if pi < 0:
            violations.append(Violation("pi_nonneg", pair, pi, _ZERO))
        if rho < 0:
            violations.append(Violation("rho_nonneg", pair, rho, _ZERO))
        share = cost_share(inst, tid, vid)
        forced = valuation(trav, vid) - share - trav.v_min
        if pi + rho != forced:
            violations.append(Violation("pair_sum_identity", pair, pi + rho, forced))
        # recover the payment and evaluate the literal identity
        pay = rho + share
        eq8[pair] = pi + rho == valuation(trav, vid) - pay - share
    served = a.assigned_vehicles()
    for v in inst.vehicles:
        if v.id in served:
            continue
        for t in inst.travelers:
            pair = (t.id, v.id)
            if alloc.rho.get(pair, _ZERO) != 0:
                violations.append(Violation("idle_vehicle_profit", pair, alloc.rho[pair], _ZERO))
    for t in inst.travelers:
        if a.vehicle_of(t.id) is not UNASSIGNED:
            continue
        for v in inst.vehicles:
            pair = (t.id, v.id)
            if alloc.pi.get(pair, _ZERO) != 0:
                violations.append(Violation("unassigned_traveler_profit", pair, alloc.pi[pair], _ZERO))
    return CheckReport(verdict=not violations, violations=tuple(violations), eq8_status=eq8)


def _ride_value(inst, tid, vid, t: PaymentSchedule) -> Fraction:
    """valuation - payment - cost share: the quantity the stability
    inequality compares across rides."""
    return (
        valuation(inst.traveler(tid), vid)
        - t[(tid, vid)]
        - cost_share(inst, tid, vid)
    )


def check_stability(
    inst: MarketInstance, a: Assignment, t: PaymentSchedule, classic_core: bool = False
) -> CheckReport:
    """Stability of schedule ``t`` under ``a``.

    Default mode evaluates the per-traveler inequalities as written:
    a rider's valuation-minus-payment-minus-cost-share must beat every
    compatible alternative ride and the exit option 0, and an unassigned
    traveler must see no alternative above 0.

    ``classic_core`` instead checks the assignment-game core condition:
    no traveler-vehicle pair can split a deviation surplus that beats the
    traveler's utility plus the vehicle's marginal seat profit.  This mode
    does not subtract the cost share from the rider's side twice.

    Requires a feasible allocation; raises
    :class:`StabilityPreconditionError` carrying the feasibility report
    otherwise.
    """
    validate_schedule(inst, t)
    alloc = compute_profits(inst, a, t)
    feas = check_feasibility(inst, a, alloc)
    if not feas.verdict:
        raise StabilityPreconditionError(feas)
    if classic_core:
        return _check_classic_core(inst, a, t)
    violations = []
    for trav in inst.travelers:
        tid = trav.id
        vid = a.vehicle_of(tid)
        if vid is UNASSIGNED:
            for alt in inst.compatible_vehicles(tid):
                alt_value = _ride_value(inst, tid, alt, t)
                if alt_value > 0:
                    violations.append(Violation("unassigned_envy", (tid, alt), _ZERO, alt_value))
            continue
        own = _ride_value(inst, tid, vid, t)
        if own < 0:
            violations.append(Violation("exit_preferred", (tid, UNASSIGNED), own, _ZERO))
        for alt in inst.compatible_vehicles(tid):
            if alt == vid:
                continue
            alt_value = _ride_value(inst, tid, alt, t)
            if own < alt_value:
                violations.append(Violation("envy", (tid, alt), own, alt_value))
    return CheckReport(verdict=not violations, violations=tuple(violations))


def _seat_values(inst, a, t):
    """Marginal seat profit per vehicle: 0 with spare capacity, else the
    smallest profit the vehicle earns from a current rider."""
    out = {}
    for v in inst.vehicles:
        riders = a.travelers_on(v.id)
        if len(riders) < v.capacity:
            out[v.id] = _ZERO
        else:
            out[v.id] = min(t[(tid, v.id)] - cost_share(inst, tid, v.id) for tid in riders)
    return out


def _check_classic_core(inst, a, t):
    violations = []
    seat = _seat_values(inst, a, t)
    util = {}
    for trav in inst.travelers:
        vid = a.vehicle_of(trav.id)
        util[trav.id] = (
            _ZERO if vid is UNASSIGNED else valuation(trav, vid) - t[(trav.id, vid)]
        )
        if util[trav.id] < 0:
            violations.append(Violation("negative_utility", (trav.id, vid), util[trav.id], _ZERO))
    for tid, vid in inst.compatible_pairs():
        if a.vehicle_of(tid) == vid:
            continue
        s = valuation(inst.traveler(tid), vid) - cost_share(inst, tid, vid)
        lhs = util[tid] + seat[vid]
        if lhs < s:
            violations.append(Violation("blocking_pair", (tid, vid), lhs, s))
    return CheckReport(verdict=not violations, violations=tuple(violations))


# -- synthesis ------------------------------------------------------------


@dataclass(frozen=True)
class SynthesisResult:
    feasible: bool
    schedule: PaymentSchedule | None
    allocation: ProfitAllocation | None
    #: Farkas multipliers over ``problem.all_rows()`` when infeasible.
    certificate: tuple | None
    problem: LPProblem | None
    row_labels: tuple


def _stability_system(inst: MarketInstance, a: Assignment):
    """Linear constraint system over the payment variables whose feasible
    points are exactly the stable schedules for ``a``.

    Contains the feasibility box on matched pairs, the per-traveler
    stability inequalities, and the blocking-pair conditions coupling a
    traveler's utility with the marginal seat profit of every alternative
    vehicle.  The coupling is what ties stability to optimality: without
    it, leaving everyone unassigned would be vacuously stable.
    """
    pairs = inst.compatible_pairs()
    idx = {p: k for k, p in enumerate(pairs)}
    nvars = len(pairs)
    val = {p: valuation(inst.traveler(p[0]), p[1]) for p in pairs}
    share = {p: cost_share(inst, *p) for p in pairs}
    cap = {v.id: v.capacity for v in inst.vehicles}
    riders = {v.id: a.travelers_on(v.id) for v in inst.vehicles}

    rows = []
    labels = []

    def add(coeffs_map, rel, rhs, label):
        coeffs = [_ZERO] * nvars
        for p, c in coeffs_map.items():
            coeffs[idx[p]] += c
        rows.append(Row(tuple(coeffs), rel, rhs))
        labels.append(label)

    one = Fraction(1)
    for trav in inst.travelers:
        tid = trav.id
        vid = a.vehicle_of(tid)
        if vid is UNASSIGNED:
            for alt in inst.compatible_vehicles(tid):
                p = (tid, alt)
                # 0 >= valuation - payment - share at every alternative
                add({p: one}, GE, val[p] - share[p], ("exit_dominates", p))
            continue
        pm = (tid, vid)
        add({pm: one}, GE, share[pm], ("rho_nonneg", pm))
        add({pm: one}, LE, val[pm] - trav.v_min, ("pi_nonneg", pm))
        add({pm: one}, LE, val[pm] - share[pm], ("stay_beats_exit", pm))
        for alt in inst.compatible_vehicles(tid):
            if alt == vid:
                continue
            p = (tid, alt)
            # own ride value >= alternative ride value
            add(
                {p: one, pm: -one},
                GE,
                (val[p] - share[p]) - (val[pm] - share[pm]),
                ("no_envy", p),
            )
    # blocking-pair coupling
    for tid, vid in pairs:
        if a.vehicle_of(tid) == vid:
            continue
        s = val[(tid, vid)] - share[(tid, vid)]
        own = a.vehicle_of(tid)
        # traveler's utility as a linear expression in the payments
        if own is UNASSIGNED:
            u_coeffs, u_const = {}, _ZERO
        else:
            u_coeffs, u_const = {(tid, own): -one}, val[(tid, own)]
        if len(riders[vid]) < cap[vid]:
            # an empty seat earns 0: utility alone must cover the surplus
            if u_coeffs or s - u_const > 0:
                add(dict(u_coeffs), GE, s - u_const, ("no_blocking", (tid, vid)))
        else:
            for rid in riders[vid]:
                pr = (rid, vid)
                coeffs = dict(u_coeffs)
                coeffs[pr] = coeffs.get(pr, _ZERO) + one
                add(
                    coeffs,
                    GE,
                    s - u_const + share[pr],
                    ("no_blocking_displace", (tid, vid, rid)),
                )
    return pairs, idx, rows, labels


def synthesize_stable_payments(
    inst: MarketInstance, a: Assignment, favor: str = "travelers"
) -> SynthesisResult:
    """Find a stable payment schedule for ``a``, or prove none exists.

    When feasible, returns the canonical vertex: with ``favor='travelers'``
    matched payments are lexicographically minimized in traveler order
    (maximizing traveler profits); ``favor='vehicles'`` maximizes them.
    Off-match payments are then lexicographically minimized.  The result is
    deterministic and passes both checkers by construction.

    When infeasible, the result carries an exact Farkas certificate over
    the constraint system.
    """
    validate_assignment(inst, a)
    if favor not in ("travelers", "vehicles"):
        raise ValueError(f"unknown favor mode {favor!r}")
    pairs, idx, rows, labels = _stability_system(inst, a)
    nvars = len(pairs)
    zero_obj = tuple([_ZERO] * nvars)
    problem = LPProblem(nvars, zero_obj, tuple(rows))
    outcome = lp_solve(problem)
    if isinstance(outcome, Infeasible):
        return SynthesisResult(
            feasible=False,
            schedule=None,
            allocation=None,
            certificate=outcome.certificate,
            problem=problem,
            row_labels=tuple(labels),
        )

    matched = [p for p in pairs if a.vehicle_of(p[0]) == p[1]]
    off = [p for p in pairs if a.vehicle_of(p[0]) != p[1]]
    pinned = list(rows)
    sign = Fraction(-1) if favor == "travelers" else Fraction(1)
    values = {}
    for stage_pairs, stage_sign in ((matched, sign), (off, Fraction(-1))):
        for p in stage_pairs:
            obj = [_ZERO] * nvars
            obj[idx[p]] = stage_sign
            out = lp_solve(LPProblem(nvars, tuple(obj), tuple(pinned)))
            assert isinstance(out, Optimal), "pinned stability system must stay solvable"
            t_star = out.point[idx[p]]
            values[p] = t_star
            coeffs = [_ZERO] * nvars
            coeffs[idx[p]] = Fraction(1)
            pinned.append(Row(tuple(coeffs), EQ, t_star))
    schedule = PaymentSchedule(dict(values))
    allocation = compute_profits(inst, a, schedule)
    return SynthesisResult(
        feasible=True,
        schedule=schedule,
        allocation=allocation,
        certificate=None,
        problem=problem,
        row_labels=tuple(labels),
    )


def blend_allocations(alloc1: ProfitAllocation, alloc2: ProfitAllocation, lam, t1, t2):
    """Entrywise convex combination ``lam * first + (1 - lam) * second`` of
    two schedules and their profit allocations.

    All stability and feasibility constraints are linear, so a blend of two
    stable points is stable (the stable set is convex).
    """
    lam = _money(lam)
    if not 0 <= lam <= 1:
        raise ValidationError("blend: weight must lie in [0, 1]")
    e1 = getattr(t1, "entries", t1)
    e2 = getattr(t2, "entries", t2)
    if set(e1) != set(e2) or set(alloc1.pi) != set(alloc2.pi) or set(alloc1.rho) != set(alloc2.rho):
        raise ValidationError("blend: dimension mismatch between the two inputs")

    def mix(x, y):
        return lam * x + (1 - lam) * y

    schedule = PaymentSchedule({p: mix(e1[p], e2[p]) for p in e1})
    allocation = ProfitAllocation(
        pi={p: mix(alloc1.pi[p], alloc2.pi[p]) for p in alloc1.pi},
        rho={p: mix(alloc1.rho[p], alloc2.rho[p]) for p in alloc1.rho},
    )
    return schedule, allocation

"""Exact optimal assignment: capacitated max-weight matching plus oracles.

Two independent routes compute the same optimum:

* :func:`solve_optimal_assignment` -- successive shortest augmenting paths
  on the residual graph (the production path);
* :func:`assignment_lp_relaxation` -- the LP relaxation through the exact
  simplex kernel, whose vertex is integral by total unimodularity.

:func:`oracle_optimum` brute-forces every valid assignment at desk scale
and is the ground truth the other two are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from rideshare_market.errors import OracleScaleError, ValidationError
from rideshare_market.lp import GE, LE, LPProblem, Optimal, Row, lp_solve
from rideshare_market.market import (
    Assignment,
    MarketInstance,
    UNASSIGNED,
    surplus_matrix,
    validate_assignment,
    welfare_surplus,
)

_ZERO = Fraction(0)

ORACLE_MAX_TRAVELERS = 10
ORACLE_MAX_MAPS = 10**7


@dataclass(frozen=True)
class DualCertificate:
    """Optimality proof for the matching LP: ``y`` per traveler, ``z`` per
    vehicle, with ``y_i + z_j >= s_ij`` on compatible pairs and
    ``sum(y) + sum(capacity * z)`` equal to the objective."""

    y: dict
    z: dict


@dataclass(frozen=True)
class SolveResult:
    assignment: Assignment
    objective: Fraction
    dual_certificate: DualCertificate | None
    augmentations: int
    relaxations: int


def _pair_weights(inst: MarketInstance, payments=None) -> dict:
    """Objective weight per compatible pair: pair surplus by default, or
    valuation minus payment when a fixed schedule is supplied."""
    weights = surplus_matrix(inst)
    if payments is not None:
        entries = getattr(payments, "entries", payments)
        from rideshare_market.market import valuation

        weights = {}
        for tid, vid in inst.compatible_pairs():
            if (tid, vid) not in entries:
                raise ValidationError(
                    f"objective: no payment for compatible pair ({tid!r}, {vid!r})"
                )
            weights[(tid, vid)] = valuation(inst.traveler(tid), vid) - entries[(tid, vid)]
    return weights


def solve_optimal_assignment(
    inst: MarketInstance, payments=None, with_certificate: bool = True
) -> SolveResult:
    """Maximize total matched weight subject to the one-vehicle rule and
    vehicle capacities.

    Pairs with nonpositive weight are never matched: leaving the traveler
    out contributes 0, which dominates.  The scan order is fixed, so
    identical instances produce identical results.  When ``payments`` is
    given the objective is valuation-minus-payment instead of pair surplus.
    """
    weights = _pair_weights(inst, payments)
    travelers = [t.id for t in inst.travelers]
    vehicles = [v.id for v in inst.vehicles]
    cap = {v.id: v.capacity for v in inst.vehicles}
    pos_pairs = [
        (tid, vid)
        for tid in travelers
        for vid in vehicles
        if weights.get((tid, vid), -1) > 0
    ]

    match = {tid: UNASSIGNED for tid in travelers}
    load = {vid: 0 for vid in vehicles}
    augmentations = 0
    relaxations = 0

    # Bellman-Ford over the residual graph; matching one more traveler is a
    # source->...->sink path, and its (negated) cost is the welfare gain.
    SRC, SNK = ("src",), ("snk",)
    while True:
        dist = {SRC: _ZERO}
        pred = {}
        nodes = [SRC] + [("t", t) for t in travelers] + [("v", v) for v in vehicles] + [SNK]
        edges = []
        for tid in travelers:
            if match[tid] is UNASSIGNED:
                edges.append((SRC, ("t", tid), _ZERO))
        for tid, vid in pos_pairs:
            if match[tid] == vid:
                edges.append((("v", vid), ("t", tid), weights[(tid, vid)]))
            else:
                edges.append((("t", tid), ("v", vid), -weights[(tid, vid)]))
        for vid in vehicles:
            if load[vid] < cap[vid]:
                edges.append((("v", vid), SNK, _ZERO))
        for _ in range(len(nodes)):
            changed = False
            for u, v, w in edges:
                if u in dist and (v not in dist or dist[u] + w < dist[v]):
                    dist[v] = dist[u] + w
                    pred[v] = u
                    changed = True
                    relaxations += 1
            if not changed:
                break
        if SNK not in dist or dist[SNK] >= 0:
            break
        # flip matched edges along the augmenting path
        node = SNK
        path = [node]
        while node != SRC:
            node = pred[node]
            path.append(node)
        path.reverse()
        for a, b in zip(path, path[1:]):
            if a[0] == "t" and b[0] == "v":
                match[a[1]] = b[1]
            elif a[0] == "v" and b[0] == "t":
                match[b[1]] = UNASSIGNED
        load = {vid: 0 for vid in vehicles}
        for tid, vid in match.items():
            if vid is not UNASSIGNED:
                load[vid] += 1
        augmentations += 1

    assignment = Assignment(dict(match))
    objective = sum(
        (weights[(tid, vid)] for tid, vid in assignment.assigned_pairs()), _ZERO
    )
    certificate = None
    if with_certificate:
        certificate = _dual_certificate(inst, weights, objective)
    return SolveResult(
        assignment=assignment,
        objective=objective,
        dual_certificate=certificate,
        augmentations=augmentations,
        relaxations=relaxations,
    )


def _dual_certificate(inst, weights, objective) -> DualCertificate:
    """Solve the matching dual exactly and verify strong duality."""
    travelers = [t.id for t in inst.travelers]
    vehicles = [v.id for v in inst.vehicles]
    n, m = len(travelers), len(vehicles)
    t_idx = {tid: i for i, tid in enumerate(travelers)}
    v_idx = {vid: n + j for j, vid in enumerate(vehicles)}
    obj = [Fraction(-1)] * n + [-Fraction(inst.vehicle(vid).capacity) for vid in vehicles]
    rows = []
    for (tid, vid), s in weights.items():
        coeffs = [_ZERO] * (n + m)
        coeffs[t_idx[tid]] = Fraction(1)
        coeffs[v_idx[vid]] = Fraction(1)
        rows.append(Row(tuple(coeffs), GE, s))
    outcome = lp_solve(LPProblem(n + m, tuple(obj), tuple(rows)))
    assert isinstance(outcome, Optimal), "matching dual must be feasible and bounded"
    assert -outcome.value == objective, "strong duality violated"
    y = {tid: outcome.point[t_idx[tid]] for tid in travelers}
    z = {vid: outcome.point[v_idx[vid]] for vid in vehicles}
    return DualCertificate(y=y, z=z)


def assignment_lp_relaxation(inst: MarketInstance, payments=None):
    """Solve the fractional relaxation with the exact simplex kernel.

    Returns ``(pairs, outcome)`` where ``pairs`` orders the LP variables.
    The transportation structure is totally unimodular, so the simplex
    vertex is 0/1 and matches the combinatorial optimum.
    """
    weights = _pair_weights(inst, payments)
    pairs = inst.compatible_pairs()
    idx = {p: k for k, p in enumerate(pairs)}
    rows = []
    for t in inst.travelers:
        coeffs = [_ZERO] * len(pairs)
        for v in inst.vehicles:
            if (t.id, v.id) in idx:
                coeffs[idx[(t.id, v.id)]] = Fraction(1)
        rows.append(Row(tuple(coeffs), LE, Fraction(1)))
    for v in inst.vehicles:
        coeffs = [_ZERO] * len(pairs)
        for t in inst.travelers:
            if (t.id, v.id) in idx:
                coeffs[idx[(t.id, v.id)]] = Fraction(1)
        rows.append(Row(tuple(coeffs), LE, Fraction(v.capacity)))
    problem = LPProblem(
        len(pairs),
        tuple(weights[p] for p in pairs),
        tuple(rows),
        upper_bounds=tuple(Fraction(1) for _ in pairs),
    )
    return pairs, lp_solve(problem)


def _guard(inst: MarketInstance):
    n, m = len(inst.travelers), len(inst.vehicles)
    if n > ORACLE_MAX_TRAVELERS or (m + 1) ** n > ORACLE_MAX_MAPS:
        raise OracleScaleError(
            f"oracle scale exceeded: n={n}, m={m} allows up to {(m + 1) ** n} maps"
        )


def enumerate_assignments(inst: MarketInstance, payments=None):
    """Yield every assignment satisfying compatibility, the one-vehicle
    rule, and capacities, each exactly once.  Desk scale only."""
    _guard(inst)
    travelers = [t.id for t in inst.travelers]
    options = {tid: inst.compatible_vehicles(tid) for tid in travelers}
    cap = {v.id: v.capacity for v in inst.vehicles}

    def rec(idx, load, current):
        if idx == len(travelers):
            yield Assignment(dict(current))
            return
        tid = travelers[idx]
        current[tid] = UNASSIGNED
        yield from rec(idx + 1, load, current)
        for vid in options[tid]:
            if load[vid] < cap[vid]:
                current[tid] = vid
                load[vid] += 1
                yield from rec(idx + 1, load, current)
                load[vid] -= 1
                current[tid] = UNASSIGNED
        del current[tid]

    yield from rec(0, {v.id: 0 for v in inst.vehicles}, {})


def oracle_optimum(inst: MarketInstance, payments=None):
    """Exhaustive maximum of the objective with the full argmax set.

    Returns ``(objective, assignments)``; ``assignments`` lists every
    optimal assignment in enumeration order.
    """
    weights = _pair_weights(inst, payments)

    def value(a):
        return sum((weights[p] for p in a.assigned_pairs()), _ZERO)

    best = None
    argmax = []
    for a in enumerate_assignments(inst):
        v = value(a)
        if best is None or v > best:
            best = v
            argmax = [a]
        elif v == best:
            argmax.append(a)
    return best, argmax

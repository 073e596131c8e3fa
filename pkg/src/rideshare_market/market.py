"""Travelers, vehicles, market instances, and every scalar market formula.

All money values are :class:`fractions.Fraction`; the package never rounds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from rideshare_market.errors import IncompatiblePairError, ValidationError
from rideshare_market.network import Network, ODPair, Route, covers, route_vertex_sequence, validate_od

Money = Fraction

#: Sentinel marking a traveler that rides no vehicle.
UNASSIGNED = None

PER_SEAT = "per_seat"
EXPLICIT = "explicit"


def _money(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Traveler:
    id: str
    od: ODPair
    v_max: Fraction
    v_min: Fraction
    #: vehicle id -> inconvenience (money).  A vehicle is compatible only if
    #: its route covers ``od`` *and* an entry exists here.
    inconvenience: dict

    def __post_init__(self):
        object.__setattr__(self, "v_max", _money(self.v_max))
        object.__setattr__(self, "v_min", _money(self.v_min))
        object.__setattr__(
            self, "inconvenience", {k: _money(v) for k, v in self.inconvenience.items()}
        )
        errors = []
        if not 0 <= self.v_min <= self.v_max:
            errors.append(f"traveler {self.id!r}: needs 0 <= v_min <= v_max")
        for vid, phi in self.inconvenience.items():
            if not 0 <= phi <= self.v_max:
                errors.append(
                    f"traveler {self.id!r}: inconvenience for vehicle {vid!r} "
                    f"outside [0, v_max]"
                )
        if errors:
            raise ValidationError(errors)


@dataclass(frozen=True)
class Vehicle:
    id: str
    route: Route
    capacity: int
    operating_cost: Fraction
    #: traveler id -> explicit cost share; only consulted in explicit mode.
    cost_shares: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "operating_cost", _money(self.operating_cost))
        if self.cost_shares is not None:
            object.__setattr__(
                self, "cost_shares", {k: _money(v) for k, v in self.cost_shares.items()}
            )
        errors = []
        if self.capacity < 1:
            errors.append(f"vehicle {self.id!r}: capacity must be >= 1")
        if self.operating_cost < 0:
            errors.append(f"vehicle {self.id!r}: operating cost must be nonnegative")
        if self.cost_shares is not None:
            for tid, share in self.cost_shares.items():
                if share < 0:
                    errors.append(
                        f"vehicle {self.id!r}: cost share for traveler {tid!r} negative"
                    )
        if errors:
            raise ValidationError(errors)


@dataclass(frozen=True)
class CompatibilityMatrix:
    """Boolean traveler x vehicle matrix, derived from routes and
    inconvenience entries.  Recomputation is idempotent."""

    entries: dict  # (traveler id, vehicle id) -> bool

    def __getitem__(self, pair) -> bool:
        return self.entries[pair]

    def pairs(self):
        """Compatible pairs in instance (traveler, vehicle) order."""
        return [p for p, ok in self.entries.items() if ok]


@dataclass(frozen=True)
class MarketInstance:
    network: Network
    travelers: tuple
    vehicles: tuple
    cost_share_mode: str = PER_SEAT

    def __post_init__(self):
        object.__setattr__(self, "travelers", tuple(self.travelers))
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        errors = []
        if self.cost_share_mode not in (PER_SEAT, EXPLICIT):
            errors.append(f"instance: unknown cost_share_mode {self.cost_share_mode!r}")
            raise ValidationError(errors)
        seen = set()
        for t in self.travelers:
            if t.id in seen:
                errors.append(f"instance: duplicate traveler id {t.id!r}")
            seen.add(t.id)
            try:
                validate_od(self.network, t.od)
            except ValidationError as exc:
                errors.extend(f"traveler {t.id!r}: {m}" for m in exc.errors)
        seen = set()
        for v in self.vehicles:
            if v.id in seen:
                errors.append(f"instance: duplicate vehicle id {v.id!r}")
            seen.add(v.id)
            try:
                route_vertex_sequence(self.network, v.route)
            except ValidationError as exc:
                errors.append(f"vehicle {v.id!r}: {exc}")
        if errors:
            raise ValidationError(errors)
        if self.cost_share_mode == EXPLICIT:
            for tid, vid in self.compatibility.pairs():
                veh = self.vehicle(vid)
                if veh.cost_shares is None or tid not in veh.cost_shares:
                    errors.append(
                        f"vehicle {vid!r}: explicit mode but no cost share for "
                        f"compatible traveler {tid!r}"
                    )
        if errors:
            raise ValidationError(errors)
        if len(self.travelers) < len(self.vehicles):
            warnings.warn(
                "market has fewer travelers than vehicles (n < m)", stacklevel=2
            )

    @cached_property
    def _traveler_map(self):
        return {t.id: t for t in self.travelers}

    @cached_property
    def _vehicle_map(self):
        return {v.id: v for v in self.vehicles}

    def traveler(self, tid) -> Traveler:
        try:
            return self._traveler_map[tid]
        except KeyError:
            raise ValidationError(f"instance: unknown traveler id {tid!r}") from None

    def vehicle(self, vid) -> Vehicle:
        try:
            return self._vehicle_map[vid]
        except KeyError:
            raise ValidationError(f"instance: unknown vehicle id {vid!r}") from None

    @cached_property
    def compatibility(self) -> CompatibilityMatrix:
        entries = {}
        for t in self.travelers:
            for v in self.vehicles:
                entries[(t.id, v.id)] = (
                    v.id in t.inconvenience and covers(self.network, v.route, t.od)
                )
        return CompatibilityMatrix(entries)

    def compatible_pairs(self):
        return self.compatibility.pairs()

    def compatible_vehicles(self, tid):
        return [v.id for v in self.vehicles if self.compatibility[(tid, v.id)]]

    def require_compatible(self, tid, vid):
        if not self.compatibility[(tid, vid)]:
            raise IncompatiblePairError(
                f"pair ({tid!r}, {vid!r}) is not compatible"
            )


@dataclass(frozen=True)
class Assignment:
    """Map from traveler id to vehicle id or ``UNASSIGNED``.

    Vehicles with no assigned traveler realize the market's bookkeeping
    convention for unused capacity.
    """

    mapping: dict

    def vehicle_of(self, tid):
        return self.mapping.get(tid, UNASSIGNED)

    def assigned_pairs(self):
        return [(tid, vid) for tid, vid in self.mapping.items() if vid is not UNASSIGNED]

    def assigned_vehicles(self):
        """The set of vehicles actually serving someone."""
        return {vid for _, vid in self.assigned_pairs()}

    def travelers_on(self, vid):
        return [tid for tid, v in self.mapping.items() if v == vid]

    def as_key(self):
        return tuple(sorted(self.mapping.items(), key=lambda kv: kv[0]))


def validate_assignment(inst: MarketInstance, a: Assignment):
    """Check compatibility, the one-vehicle rule, and vehicle capacities."""
    errors = []
    loads = {}
    for tid, vid in a.mapping.items():
        if tid not in inst._traveler_map:
            errors.append(f"assignment: unknown traveler id {tid!r}")
            continue
        if vid is UNASSIGNED:
            continue
        if vid not in inst._vehicle_map:
            errors.append(f"assignment: unknown vehicle id {vid!r}")
            continue
        if not inst.compatibility[(tid, vid)]:
            errors.append(f"assignment: pair ({tid!r}, {vid!r}) is not compatible")
        loads[vid] = loads.get(vid, 0) + 1
    for vid, load in loads.items():
        if load > inst.vehicle(vid).capacity:
            errors.append(
                f"assignment: vehicle {vid!r} carries {load} travelers, "
                f"capacity {inst.vehicle(vid).capacity}"
            )
    if errors:
        raise ValidationError(errors)


def valuation(t: Traveler, vid) -> Fraction:
    """Traveler ``t``'s satisfaction value for riding vehicle ``vid``:
    the upper bound minus the pair's inconvenience."""
    if vid not in t.inconvenience:
        raise IncompatiblePairError(
            f"traveler {t.id!r} has no inconvenience entry for vehicle {vid!r}"
        )
    return t.v_max - t.inconvenience[vid]


def cost_share(inst: MarketInstance, tid, vid) -> Fraction:
    """Traveler ``tid``'s share of vehicle ``vid``'s operating cost.

    Per-seat mode charges ``operating_cost / capacity`` regardless of the
    realized occupancy; explicit mode looks the share up.  Either way the
    share is independent of the assignment.
    """
    inst.require_compatible(tid, vid)
    veh = inst.vehicle(vid)
    if inst.cost_share_mode == PER_SEAT:
        return veh.operating_cost / veh.capacity
    if veh.cost_shares is None or tid not in veh.cost_shares:
        raise ValidationError(
            f"vehicle {vid!r}: no explicit cost share for traveler {tid!r}"
        )
    return veh.cost_shares[tid]


def utility(inst: MarketInstance, tid, vid, t_ij) -> Fraction:
    """Quasi-linear rider utility: valuation minus payment.

    ``vid`` may be ``UNASSIGNED``, in which case the utility is 0 by
    convention.
    """
    if vid is UNASSIGNED:
        return Fraction(0)
    inst.require_compatible(tid, vid)
    t_ij = _money(t_ij)
    if t_ij < 0:
        raise ValidationError(f"payment for ({tid!r}, {vid!r}) is negative")
    return valuation(inst.traveler(tid), vid) - t_ij


def surplus(inst: MarketInstance, tid, vid) -> Fraction:
    """Joint pie of a pairing: valuation minus cost share.  Independent of
    how the internal payment splits it."""
    return valuation(inst.traveler(tid), vid) - cost_share(inst, tid, vid)


def surplus_matrix(inst: MarketInstance) -> dict:
    """Pair surplus for every compatible pair.  Incompatible pairs are
    simply absent; there is no numeric sentinel."""
    return {(tid, vid): surplus(inst, tid, vid) for tid, vid in inst.compatible_pairs()}


def welfare_paper(inst: MarketInstance, a: Assignment, t) -> Fraction:
    """Total rider utility plus the bookkeeping term for idle vehicles.

    A vehicle serving nobody contributes its full operating cost (the
    market's convention for unassigned capacity); each riding traveler
    contributes valuation minus payment.  ``t`` maps compatible pairs to
    payments (a :class:`~rideshare_market.allocation.PaymentSchedule` or a
    plain dict).
    """
    entries = getattr(t, "entries", t)
    total = Fraction(0)
    for tid, vid in a.assigned_pairs():
        if (tid, vid) not in entries:
            raise ValidationError(
                f"welfare: no payment for assigned pair ({tid!r}, {vid!r})"
            )
        total += utility(inst, tid, vid, entries[(tid, vid)])
    used = a.assigned_vehicles()
    for v in inst.vehicles:
        if v.id not in used:
            total += v.operating_cost
    return total


def welfare_surplus(inst: MarketInstance, a: Assignment) -> Fraction:
    """Payment-free welfare: the sum of pair surpluses over matched pairs.
    This is the solver's objective."""
    return sum(
        (surplus(inst, tid, vid) for tid, vid in a.assigned_pairs()), Fraction(0)
    )


def cost_recovery_gap(inst: MarketInstance, a: Assignment, vid) -> Fraction:
    """Unrecovered operating cost of ``vid``: cost minus collected shares.

    Zero exactly when the vehicle is full (per-seat mode) or the explicit
    shares of its riders happen to sum to the cost.
    """
    veh = inst.vehicle(vid)
    collected = sum(
        (cost_share(inst, tid, vid) for tid in a.travelers_on(vid)), Fraction(0)
    )
    return veh.operating_cost - collected

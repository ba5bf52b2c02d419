"""Independent solution checker.

Re-checks a solution graph against an instance from first principles; it
shares only the core data types with the solver, none of its bookkeeping.
Every violated requirement is reported, not just the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import Instance, SolutionGraph


class ViolationKind(Enum):
    INDICATOR_CAPACITY = "IndicatorCapacity"
    SENSOR_CAPACITY = "SensorCapacity"
    PARTNER_CAPACITY = "PartnerCapacity"
    MISSING_CONNECTION = "MissingConnection"
    ASYMMETRIC_PARTNER = "AsymmetricPartner"
    UNASSIGNED_ELEMENT = "UnassignedElement"
    UNKNOWN_REFERENCE = "UnknownReference"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subjects: tuple[str, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.detail}"


def verify_solution(inst: Instance, g: SolutionGraph) -> list[Violation]:
    """All ways g fails to solve inst; an empty list certifies the solution.

    Checked: every instance element assigned to a declared unit, per-unit
    indicator and sensor counts within ucap, partner relation symmetric with
    per-unit degree within iucap, and every edge covered (same unit or
    partnered units).  Assignments of elements unknown to the instance and
    references to undeclared units are reported, never repaired.
    """
    out: list[Violation] = []
    known_units = set(g.units)
    elements = set(inst.elements)

    for e, u in g.assignment.items():
        if e not in elements:
            out.append(Violation(
                ViolationKind.UNKNOWN_REFERENCE, (e,),
                f"assigned element {e!r} is not part of the instance",
            ))
        if u not in known_units:
            out.append(Violation(
                ViolationKind.UNKNOWN_REFERENCE, (u,),
                f"element {e!r} assigned to undeclared unit {u!r}",
            ))
    for e in inst.elements:
        if e not in g.assignment:
            out.append(Violation(
                ViolationKind.UNASSIGNED_ELEMENT, (e,),
                f"element {e!r} has no unit",
            ))

    ind_count: dict[str, int] = {u: 0 for u in g.units}
    sen_count: dict[str, int] = {u: 0 for u in g.units}
    for e in inst.elements:
        u = g.assignment.get(e)
        if u is None or u not in known_units:
            continue
        if e in inst.indicator_set:
            ind_count[u] += 1
        else:
            sen_count[u] += 1
    for u in g.units:
        if ind_count[u] > inst.ucap:
            out.append(Violation(
                ViolationKind.INDICATOR_CAPACITY, (u,),
                f"unit {u!r} hosts {ind_count[u]} indicators, ucap is {inst.ucap}",
            ))
        if sen_count[u] > inst.ucap:
            out.append(Violation(
                ViolationKind.SENSOR_CAPACITY, (u,),
                f"unit {u!r} hosts {sen_count[u]} sensors, ucap is {inst.ucap}",
            ))

    for a, b in sorted(g.partners):
        if a not in known_units:
            out.append(Violation(
                ViolationKind.UNKNOWN_REFERENCE, (a,),
                f"partner pair ({a!r}, {b!r}) references undeclared unit {a!r}",
            ))
        if b not in known_units:
            out.append(Violation(
                ViolationKind.UNKNOWN_REFERENCE, (b,),
                f"partner pair ({a!r}, {b!r}) references undeclared unit {b!r}",
            ))
        if (b, a) not in g.partners:
            out.append(Violation(
                ViolationKind.ASYMMETRIC_PARTNER, (a, b),
                f"partner pair ({a!r}, {b!r}) lacks its mirror ({b!r}, {a!r})",
            ))
    for u in g.units:
        degree = len(g.partner_adjacency.get(u, ()))
        if degree > inst.iucap:
            out.append(Violation(
                ViolationKind.PARTNER_CAPACITY, (u,),
                f"unit {u!r} has {degree} partners, iucap is {inst.iucap}",
            ))

    for i, s in inst.edges:
        ui = g.assignment.get(i)
        us = g.assignment.get(s)
        if ui is None or us is None:
            continue  # already reported as UnassignedElement
        if ui == us or (ui, us) in g.partners or (us, ui) in g.partners:
            continue
        out.append(Violation(
            ViolationKind.MISSING_CONNECTION, (i, s),
            f"edge ({i!r}, {s!r}) spans units {ui!r} and {us!r} which are not partners",
        ))

    return out


def count_units(g: SolutionGraph) -> int:
    """Number of units hosting at least one element."""
    return sum(1 for u in g.units if g.unit_elements.get(u))

"""Problem domain: instances, allocations, feasibility checks and utilities.

An instance describes a rationing horizon: agents with priorities and
day-by-day availability, categories with per-day quotas (and optionally an
overall quota), a per-day supply, and a multiplicative discount applied to
the value of later allocations. An allocation maps every agent either to a
(category, day) slot or to ``None`` (unmatched). All numeric quantities that
enter comparisons are exact ``fractions.Fraction`` values; nothing in this
package rounds.

Days are 1-based throughout: matching on day 1 is undiscounted, day ``j``
is worth ``priority * discount**(j - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional

# (category id, 1-based day) for matched agents, None for unmatched.
Slot = Optional[tuple[str, int]]


@dataclass(frozen=True)
class Agent:
    """One participant. ``priority`` must lie strictly between 0 and 1."""

    id: str
    priority: Fraction
    availability: tuple[bool, ...]
    eligible: frozenset[str]
    group: str | None = None


@dataclass(frozen=True)
class Category:
    """A rationing channel with a per-day quota vector.

    ``overall_quota`` caps the total across all days; leaving it ``None``
    means the category is only day-constrained.
    """

    id: str
    daily_quota: tuple[int, ...]
    overall_quota: int | None = None


@dataclass(frozen=True)
class Instance:
    agents: tuple[Agent, ...]
    categories: tuple[Category, ...]
    num_days: int
    daily_supply: tuple[int, ...]
    discount: Fraction

    def agent_map(self) -> dict[str, Agent]:
        return {a.id: a for a in self.agents}

    def category_map(self) -> dict[str, Category]:
        return {c.id: c for c in self.categories}

    def agent_order(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.agents)

    def has_overall_quotas(self) -> bool:
        """True when every category carries an overall quota."""
        return all(c.overall_quota is not None for c in self.categories)

    def priority_spread(self) -> Fraction:
        """max/min priority ratio across agents; 1 for the empty instance."""
        if not self.agents:
            return Fraction(1)
        priorities = [a.priority for a in self.agents]
        return max(priorities) / min(priorities)


@dataclass(frozen=True)
class Allocation:
    """A (partial) assignment of agents to (category, day) slots.

    Every agent of the instance appears as a key; unmatched agents map to
    ``None`` explicitly so files round-trip the full agent universe.
    """

    assignment: Mapping[str, Slot]

    def matched(self) -> Iterator[tuple[str, str, int]]:
        """Yield (agent id, category id, day) for matched agents, in key order."""
        for agent_id, slot in self.assignment.items():
            if slot is not None:
                yield agent_id, slot[0], slot[1]

    def matched_count(self) -> int:
        return sum(1 for slot in self.assignment.values() if slot is not None)

    def day_of(self, agent_id: str) -> int | None:
        slot = self.assignment.get(agent_id)
        return None if slot is None else slot[1]

    def slot_of(self, agent_id: str) -> Slot:
        return self.assignment.get(agent_id)

    @staticmethod
    def empty(instance: Instance) -> "Allocation":
        return Allocation({a.id: None for a in instance.agents})


@dataclass(frozen=True)
class Violation:
    kind: str
    subjects: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def _is_count(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


def validate_instance(instance: Instance) -> ValidationReport:
    """Report every structural problem of an instance; empty report == well-formed.

    Nothing is raised: callers that accept untrusted input inspect the report.
    """
    bad: list[Violation] = []

    def flag(kind: str, subjects: tuple[str, ...], message: str) -> None:
        bad.append(Violation(kind, subjects, message))

    if not isinstance(instance.num_days, int) or instance.num_days < 1:
        flag("structure", (), f"num_days must be a positive integer, got {instance.num_days!r}")
    if len(instance.daily_supply) != instance.num_days:
        flag(
            "structure",
            (),
            f"daily_supply has length {len(instance.daily_supply)}, expected {instance.num_days}",
        )
    for day, supply in enumerate(instance.daily_supply, start=1):
        if not _is_count(supply):
            flag("structure", (str(day),), f"daily supply for day {day} must be a non-negative integer")
    if not (0 < instance.discount < 1):
        flag("discount", (), f"discount must lie strictly between 0 and 1, got {instance.discount}")

    seen_categories: set[str] = set()
    for category in instance.categories:
        if category.id in seen_categories:
            flag("duplicate", (category.id,), f"duplicate category id {category.id!r}")
        seen_categories.add(category.id)
        if len(category.daily_quota) != instance.num_days:
            flag(
                "structure",
                (category.id,),
                f"category {category.id!r} has {len(category.daily_quota)} daily quotas, expected {instance.num_days}",
            )
        if any(not _is_count(q) for q in category.daily_quota):
            flag("structure", (category.id,), f"category {category.id!r} has a negative or non-integer daily quota")
        if category.overall_quota is not None and not _is_count(category.overall_quota):
            flag(
                "overall_quota",
                (category.id,),
                f"category {category.id!r} overall quota must be a non-negative integer",
            )

    seen_agents: set[str] = set()
    for agent in instance.agents:
        if agent.id in seen_agents:
            flag("duplicate", (agent.id,), f"duplicate agent id {agent.id!r}")
        seen_agents.add(agent.id)
        if len(agent.availability) != instance.num_days:
            flag(
                "availability",
                (agent.id,),
                f"agent {agent.id!r} has an availability vector of length {len(agent.availability)}, expected {instance.num_days}",
            )
        if not (0 < agent.priority < 1):
            flag("priority", (agent.id,), f"agent {agent.id!r} priority must lie strictly in (0, 1), got {agent.priority}")
        unknown = agent.eligible - seen_categories
        for cat_id in sorted(unknown):
            flag("eligibility", (agent.id, cat_id), f"agent {agent.id!r} is eligible for unknown category {cat_id!r}")

    return ValidationReport(tuple(bad))


def utility_of(priority: Fraction, day_index: int, discount: Fraction) -> Fraction:
    """Value of matching an agent of the given priority on a 1-based day."""
    if day_index < 1:
        raise ValueError(f"day_index is 1-based and must be >= 1, got {day_index}")
    return priority * discount ** (day_index - 1)


def check_allocation(instance: Instance, alloc: Allocation, model2: bool = False) -> ValidationReport:
    """Verify an allocation against supply, quota, availability and eligibility.

    With ``model2`` set, overall quotas (where present) are enforced as well.
    All violations are reported; nothing is raised.
    """
    bad: list[Violation] = []
    agents = instance.agent_map()
    categories = instance.category_map()

    used_per_day: dict[int, int] = {}
    used_per_cat_day: dict[tuple[str, int], int] = {}
    used_per_cat: dict[str, int] = {}

    for agent_id, cat_id, day in alloc.matched():
        agent = agents.get(agent_id)
        if agent is None:
            bad.append(Violation("unknown_agent", (agent_id,), f"allocation names unknown agent {agent_id!r}"))
            continue
        if cat_id not in categories:
            bad.append(Violation("unknown_category", (agent_id, cat_id), f"agent {agent_id!r} matched under unknown category {cat_id!r}"))
            continue
        if not (1 <= day <= instance.num_days):
            bad.append(Violation("structure", (agent_id,), f"agent {agent_id!r} matched on out-of-range day {day}"))
            continue
        if not agent.availability[day - 1]:
            bad.append(Violation("availability", (agent_id,), f"agent {agent_id!r} matched on day {day} but is unavailable then"))
        if cat_id not in agent.eligible:
            bad.append(Violation("eligibility", (agent_id, cat_id), f"agent {agent_id!r} is not eligible for category {cat_id!r}"))
        used_per_day[day] = used_per_day.get(day, 0) + 1
        used_per_cat_day[(cat_id, day)] = used_per_cat_day.get((cat_id, day), 0) + 1
        used_per_cat[cat_id] = used_per_cat.get(cat_id, 0) + 1

    for day, used in sorted(used_per_day.items()):
        if used > instance.daily_supply[day - 1]:
            bad.append(
                Violation(
                    "supply",
                    (str(day),),
                    f"day {day} serves {used} agents but supply is {instance.daily_supply[day - 1]}",
                )
            )
    for (cat_id, day), used in sorted(used_per_cat_day.items()):
        quota = categories[cat_id].daily_quota[day - 1]
        if used > quota:
            bad.append(
                Violation(
                    "daily_quota",
                    (cat_id, str(day)),
                    f"category {cat_id!r} serves {used} agents on day {day} but its quota is {quota}",
                )
            )
    if model2:
        for cat_id, used in sorted(used_per_cat.items()):
            overall = categories[cat_id].overall_quota
            if overall is not None and used > overall:
                bad.append(
                    Violation(
                        "overall_quota",
                        (cat_id,),
                        f"category {cat_id!r} serves {used} agents in total but its overall quota is {overall}",
                    )
                )

    return ValidationReport(tuple(bad))


def total_utility(instance: Instance, alloc: Allocation) -> Fraction:
    """Sum of discounted priorities over matched agents.

    The allocation is assumed feasible; run :func:`check_allocation` first
    when in doubt.
    """
    agents = instance.agent_map()
    total = Fraction(0)
    for agent_id, _cat, day in alloc.matched():
        total += utility_of(agents[agent_id].priority, day, instance.discount)
    return total

"""Day-by-day greedy allocation.

Each day a bipartite graph is built between the still-unmatched agents
available that day and the categories with capacity left; a maximum-weight
matching capped by the day's supply is committed, and the loop moves on
without ever reading future availability. Because every edge of one agent
carries the same weight, the committed matching is simultaneously of maximum
cardinality, which the analysis machinery re-checks independently.

Weight ties are resolved by an exact lexicographic bonus encoded into the
matching costs: agents earlier in the precedence win, and within an agent
earlier-listed categories win. The bonus makes each day's chosen assignment
unique, which keeps reruns (and deviation experiments) stable.
``tie_break="adversarial"`` inverts the default input-order precedence; the
bundled worst-case fixtures are laid out so that this mode reproduces their
bad runs, where the ratio to the offline optimum meets the bound exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .flow import Arc, FlowNetwork, solve_profitable_flow
from .model import Allocation, Instance, validate_instance
from .offline import TieBreakOrder

TieBreak = TieBreakOrder | str | None

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DayGraph:
    """The bipartite matching problem of a single day."""

    day_index: int
    size_cap: int
    agents: tuple[str, ...]
    base_weights: Mapping[str, Fraction]
    day_factor: Fraction
    categories: tuple[str, ...]
    capacities: Mapping[str, int]
    edges: tuple[tuple[str, str], ...]

    def weight(self, agent_id: str) -> Fraction:
        """Edge weight for this agent; equal across all its edges."""
        return self.base_weights[agent_id] * self.day_factor


@dataclass(frozen=True)
class DailyMatchState:
    """Progress snapshot fed into a day's graph construction."""

    day_index: int
    unmatched_pool: frozenset[str]
    remaining_overall: Mapping[str, int] | None
    allocation_so_far: Allocation


@dataclass(frozen=True)
class DayTrace:
    graph: DayGraph
    matched: frozenset[tuple[str, str]]


def _day_graph(
    instance: Instance,
    day_index: int,
    available_today: frozenset[str],
    pool: frozenset[str],
    remaining_overall: Mapping[str, int] | None,
) -> DayGraph:
    agents = tuple(a.id for a in instance.agents if a.id in pool and a.id in available_today)
    agent_set = set(agents)
    base_weights = {a.id: a.priority for a in instance.agents if a.id in agent_set}

    capacities: dict[str, int] = {}
    categories: list[str] = []
    for category in instance.categories:
        cap = category.daily_quota[day_index - 1]
        if remaining_overall is not None:
            cap = min(cap, remaining_overall.get(category.id, cap))
        if cap > 0:
            categories.append(category.id)
            capacities[category.id] = cap

    eligible = {a.id: a.eligible for a in instance.agents}
    edges = tuple(
        (agent_id, cat_id) for agent_id in agents for cat_id in categories if cat_id in eligible[agent_id]
    )
    return DayGraph(
        day_index=day_index,
        size_cap=instance.daily_supply[day_index - 1],
        agents=agents,
        base_weights=base_weights,
        day_factor=instance.discount ** (day_index - 1),
        categories=tuple(categories),
        capacities=capacities,
        edges=edges,
    )


def build_day_graph(state: DailyMatchState, instance: Instance, model2: bool = False) -> DayGraph:
    """Graph for ``state.day_index``: available pool agents vs. categories at
    their effective capacity (daily quota, additionally clipped by remaining
    overall quota when ``model2``)."""
    if not (1 <= state.day_index <= instance.num_days):
        raise ValueError(f"day_index {state.day_index} outside horizon 1..{instance.num_days}")
    if model2 and state.remaining_overall is None:
        raise ValueError("model2 day graphs need the remaining overall quotas in the state")
    available_today = frozenset(
        a.id for a in instance.agents if a.availability[state.day_index - 1]
    )
    remaining = state.remaining_overall if model2 else None
    return _day_graph(instance, state.day_index, available_today, state.unmatched_pool, remaining)


def max_weight_capped_bmatching(
    graph: DayGraph, precedence: Sequence[str] | None = None
) -> frozenset[tuple[str, str]]:
    """Maximum-weight matching with per-category capacities and at most
    ``size_cap`` edges; each agent is matched at most once.

    With ``precedence`` the optimum is unique: ties fall to earlier-listed
    agents, then to earlier-listed categories.
    """
    if graph.size_cap <= 0 or not graph.edges:
        return frozenset()

    with_edges = {a for a, _c in graph.edges}
    agents = [a for a in graph.agents if a in with_edges]
    agent_pos = {a: i for i, a in enumerate(agents)}
    cat_pos = {c: i for i, c in enumerate(graph.categories)}

    scale = math.lcm(*(graph.base_weights[a].denominator for a in agents)) if agents else 1

    if precedence is not None:
        present = [a for a in precedence if a in agent_pos]
        if len(present) != len(agents):
            missing = set(agents) - set(present)
            raise ValueError(f"precedence does not cover agents {sorted(missing)}")
        n = len(present)
        n_cats = len(graph.categories)
        digit_base = n_cats + 1
        base = digit_base**n
        agent_bonus = {a: digit_base ** (n - 1 - rank) for rank, a in enumerate(present)}
    else:
        base = 1
        n_cats = len(graph.categories)
        agent_bonus = {}

    src, gate = 0, 1
    agent_node = {a: 2 + i for i, a in enumerate(agents)}
    cat_node = {c: 2 + len(agents) + i for i, c in enumerate(graph.categories)}
    sink = 2 + len(agents) + len(graph.categories)

    arcs: list[Arc] = [Arc(src, gate, graph.size_cap, 0)]
    for a in agents:
        arcs.append(Arc(gate, agent_node[a], 1, 0))
    edge_arcs: dict[int, tuple[str, str]] = {}
    for a, c in graph.edges:
        if a not in agent_pos:
            continue
        w = graph.base_weights[a]
        scaled = w.numerator * (scale // w.denominator)
        bonus = agent_bonus.get(a, 0) * (n_cats - cat_pos[c]) if base != 1 else 0
        edge_arcs[len(arcs)] = (a, c)
        arcs.append(Arc(agent_node[a], cat_node[c], 1, -(scaled * base + bonus)))
    for c in graph.categories:
        arcs.append(Arc(cat_node[c], sink, graph.capacities[c], 0))

    network = FlowNetwork(sink + 1, src, sink, tuple(arcs))
    result = solve_profitable_flow(network)
    return frozenset(pair for i, pair in edge_arcs.items() if result.arc_flows[i] == 1)


def _effective_precedence(instance: Instance, tie_break: TieBreak) -> tuple[str, ...]:
    if tie_break is None:
        return instance.agent_order()
    if isinstance(tie_break, str):
        if tie_break == "adversarial":
            return tuple(reversed(instance.agent_order()))
        raise ValueError(f"unknown tie-break mode {tie_break!r} (expected 'adversarial' or a TieBreakOrder)")
    tie_break.validate_for(instance)
    return tie_break.order


def run_online_with_trace(
    instance: Instance, model2: bool = False, tie_break: TieBreak = None
) -> tuple[Allocation, tuple[DayTrace, ...]]:
    """Run the greedy day loop and keep each day's graph and matching."""
    report = validate_instance(instance)
    if not report.ok:
        raise ValueError(f"instance is not well-formed: {report.violations[0].message}")
    if model2 and not instance.has_overall_quotas():
        missing = [c.id for c in instance.categories if c.overall_quota is None]
        raise ValueError(f"model2 run needs an overall quota on every category; missing on {missing}")

    precedence = _effective_precedence(instance, tie_break)
    # Availability is consumed one day at a time; the matching step below
    # only ever sees the current day's slice.
    availability_days = [
        frozenset(a.id for a in instance.agents if a.availability[day - 1])
        for day in range(1, instance.num_days + 1)
    ]

    pool = set(instance.agent_order())
    remaining: dict[str, int] | None = None
    if model2:
        remaining = {c.id: c.overall_quota for c in instance.categories}  # type: ignore[misc]
    assignment: dict[str, tuple[str, int] | None] = {a.id: None for a in instance.agents}
    traces: list[DayTrace] = []

    for day, available_today in enumerate(availability_days, start=1):
        graph = _day_graph(instance, day, available_today, frozenset(pool), remaining)
        matched = max_weight_capped_bmatching(graph, precedence)
        for agent_id, cat_id in sorted(matched):
            assignment[agent_id] = (cat_id, day)
            pool.discard(agent_id)
            if remaining is not None:
                remaining[cat_id] -= 1
        log.debug("day %d: %d candidates, %d matched, %d left in pool", day, len(graph.agents), len(matched), len(pool))
        traces.append(DayTrace(graph=graph, matched=matched))

    return Allocation(assignment), tuple(traces)


def run_online(instance: Instance, model2: bool = False, tie_break: TieBreak = None) -> Allocation:
    """Allocation produced by the day-by-day greedy algorithm."""
    allocation, _ = run_online_with_trace(instance, model2=model2, tie_break=tie_break)
    return allocation

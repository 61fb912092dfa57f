"""Education accumulation, occupation gating, recruitment, and wages.

Occupation entry combines a fixed knowledge floor with a dynamic quantile
threshold: the requirement tracks the population's education distribution
so entry stays competitively scarce as everyone upskills.  Wages follow a
dual regime — lower tiers get base pay scaled by the inflation index,
upper tiers additionally earn a premium on the rising knowledge threshold
plus a bounded per-period shock.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .agents import AgentState, StateDelta, clamp_state
from .config import OccupationSpec, WorldConfig, WageRegime
from .errors import (EmptyPopulation, Incapacitated, InsufficientFunds,
                     InsufficientInventory, InvalidAction)
from .money import round_units


def study(agent: AgentState, kind: str, duration_seconds: float,
          config: WorldConfig, ledger=None) -> StateDelta:
    """Accrue education at the fixed hourly rate; pay and deplete per action type."""
    if duration_seconds <= 0:
        raise InvalidAction(f"study duration must be positive, got {duration_seconds}")
    action = config.params.study.get(kind)
    if action is None:
        raise InvalidAction(f"unknown study action '{kind}'")
    hours = duration_seconds / 3600.0

    fee = 0
    if action.fee_per_hour_units:
        fee = round_units(Fraction(action.fee_per_hour_units) * Fraction(hours))
        if agent.balance_units < fee:
            raise InsufficientFunds(
                f"{agent.agent_id}: cannot afford {kind} for {hours:.2f}h")
    if action.requires_item is not None and agent.holding(action.requires_item) < 1:
        raise InsufficientInventory(
            f"{agent.agent_id}: {kind} requires holding a {action.requires_item}")

    agent.balance_units -= fee
    if ledger is not None and fee:
        ledger.burned_fee_units += fee
    gained = config.params.education_rate_per_hour * hours
    agent.education += gained
    before_e, before_s = agent.energy, agent.satiety
    agent.energy -= action.energy_per_hour * hours
    agent.satiety -= action.satiety_per_hour * hours
    clamp_state(agent, config)
    return StateDelta(balance_units=-fee, education=gained, hours=hours,
                      energy=agent.energy - before_e,
                      satiety=agent.satiety - before_s)


def empirical_quantile(scores: list[float], probability: float) -> float:
    """Smallest value whose empirical CDF reaches `probability` (inf-style).

    probability <= 0 returns the minimum (the quantile function's value at
    zero over a finite sample).
    """
    if not scores:
        raise EmptyPopulation("quantile of an empty population")
    ordered = sorted(scores)
    n = len(ordered)
    count = 0
    for value in ordered:
        count += 1
        if count / n >= probability:
            return value
    return ordered[-1]


def dynamic_threshold(occupation: OccupationSpec,
                      population_scores: list[float]) -> float:
    """Effective knowledge requirement: floor, or the (1 - share)-quantile."""
    if not population_scores:
        raise EmptyPopulation(f"no active agents to rank for {occupation.id}")
    quantile = empirical_quantile(population_scores,
                                  1.0 - occupation.eligibility_share)
    return max(occupation.effective_knowledge_floor, quantile)


def eligibility(agent: AgentState, occupation: OccupationSpec,
                threshold: float) -> bool:
    """Knowledge threshold, residential floor, and prerequisite consumption."""
    if agent.education < threshold:
        return False
    if agent.residential_tier < occupation.min_residential:
        return False
    prereq = occupation.prereq_commodity
    return prereq is None or prereq in agent.consumed_items


@dataclass
class RecruitmentState:
    cycle_index: int = 0
    thresholds: dict[str, float] = field(default_factory=dict)
    applications: dict[str, list[str]] = field(default_factory=dict)
    assignments: dict[str, str] = field(default_factory=dict)


def run_recruitment_cycle(agents: list[AgentState], config: WorldConfig,
                          state: RecruitmentState,
                          rng: random.Random | None = None) -> dict[str, str]:
    """One deterministic matching round.

    Thresholds are recomputed from the current score distribution, each
    agent's applications are truncated to the residential quota, missing
    prerequisites are consumed from inventory at application time, and
    vacancies are filled by descending education (ties by agent id).
    Occupations are processed in descending (tier, base wage, id) order; an
    agent wins at most one assignment per cycle and a vacated position
    reopens at the next cycle.
    """
    scores = [a.education for a in agents]
    state.thresholds = {oid: dynamic_threshold(occ, scores)
                        for oid, occ in config.occupations.items()}
    state.assignments = {}

    by_id = {a.agent_id: a for a in agents}
    applicants: dict[str, list[AgentState]] = {oid: [] for oid in config.occupations}
    for agent in agents:
        wanted = state.applications.get(agent.agent_id, [])
        quota = config.params.quota(agent.residential_tier)
        for occupation_id in wanted[:quota]:
            occ = config.occupations.get(occupation_id)
            if occ is None:
                continue
            prereq = occ.prereq_commodity
            if (prereq is not None and prereq not in agent.consumed_items
                    and agent.holding(prereq) >= 1):
                agent.remove_items(prereq, 1)
                agent.consumed_items.add(prereq)
            if eligibility(agent, occ, state.thresholds[occupation_id]):
                applicants[occupation_id].append(agent)

    holders: dict[str, int] = {oid: 0 for oid in config.occupations}
    for agent in agents:
        if agent.job is not None and agent.job in holders:
            holders[agent.job] += 1

    order = sorted(config.occupations.values(),
                   key=lambda o: (-o.tier, -o.base_wage_units, o.id))
    assigned: set[str] = set()
    for occ in order:
        vacancies = occ.positions - holders[occ.id]
        if vacancies <= 0:
            continue
        ranked = sorted(applicants[occ.id],
                        key=lambda a: (-a.education, a.agent_id))
        for agent in ranked:
            if vacancies <= 0:
                break
            if agent.agent_id in assigned or agent.job == occ.id:
                continue
            agent.job = occ.id
            assigned.add(agent.agent_id)
            state.assignments[agent.agent_id] = occ.id
            vacancies -= 1

    state.cycle_index += 1
    state.applications = {}
    return dict(state.assignments)


@dataclass(frozen=True)
class WageComponents:
    base_units: int
    premium: float
    index: float
    shock: float


@dataclass
class WageSchedule:
    wages_units: dict[str, int] = field(default_factory=dict)
    components: dict[str, WageComponents] = field(default_factory=dict)

    def wage_units(self, occupation_id: str) -> int:
        return self.wages_units[occupation_id]


def knowledge_premium(occupation: OccupationSpec, threshold: float) -> float:
    """Wage premium factor: grows once the threshold exceeds the reference."""
    excess = max(0.0, threshold - occupation.premium_reference)
    return 1.0 + occupation.premium_rate * excess / occupation.premium_reference


def compute_wages(config: WorldConfig, thresholds: dict[str, float],
                  index: float, rng: random.Random) -> WageSchedule:
    """Per-period wages for every occupation.

    Static regime: base wage times the overall price index.  Dynamic
    regime: additionally the knowledge premium and one bounded uniform
    shock drawn per occupation per pay period.  Amounts are computed in
    exact rational arithmetic and rounded once to the currency grid.
    """
    if index <= 0:
        raise InvalidAction(f"price index must be positive, got {index}")
    bound = config.params.wage_shock_bound
    schedule = WageSchedule()
    for oid, occ in config.occupations.items():
        if occ.regime is WageRegime.STATIC:
            premium, shock = 1.0, 0.0
        else:
            premium = knowledge_premium(occ, thresholds.get(oid, occ.effective_knowledge_floor))
            shock = rng.uniform(-bound, bound) if bound > 0 else 0.0
        exact = (Fraction(occ.base_wage_units) * Fraction(premium)
                 * Fraction(index) * (1 + Fraction(shock)))
        schedule.wages_units[oid] = round_units(exact)
        schedule.components[oid] = WageComponents(
            base_units=occ.base_wage_units, premium=premium,
            index=index, shock=shock)
    return schedule


def pay_and_deplete(agent: AgentState, occupation: OccupationSpec, hours: float,
                    wage_units: int, config: WorldConfig,
                    ledger=None) -> StateDelta:
    """Credit pro-rated wages for hours worked and apply per-hour wear.

    If energy or satiety would cross zero the agent stops early: partial
    hours, proportionally partial pay.
    """
    if agent.incapacitated:
        raise Incapacitated(f"{agent.agent_id} cannot work while incapacitated")
    if agent.job != occupation.id:
        raise InvalidAction(f"{agent.agent_id} does not hold job '{occupation.id}'")
    if hours < 0:
        raise InvalidAction("hours must be non-negative")
    if hours == 0:
        return StateDelta()

    energy_cost = (occupation.energy_per_hour if occupation.energy_per_hour >= 0
                   else config.params.job_energy_per_hour)
    satiety_cost = (occupation.satiety_per_hour if occupation.satiety_per_hour >= 0
                    else config.params.job_satiety_per_hour)
    workable = hours
    if energy_cost > 0:
        workable = min(workable, agent.energy / energy_cost)
    if satiety_cost > 0:
        workable = min(workable, agent.satiety / satiety_cost)
    if workable <= 0:
        return StateDelta()

    period_hours = config.params.recruitment_period * config.params.tick_length / 3600.0
    pay = round_units(Fraction(wage_units) * Fraction(workable) / Fraction(period_hours))
    agent.balance_units += pay
    if ledger is not None:
        ledger.minted_wage_units += pay
    before_e, before_s = agent.energy, agent.satiety
    agent.energy -= energy_cost * workable
    agent.satiety -= satiety_cost * workable
    clamp_state(agent, config)
    return StateDelta(balance_units=pay, hours=workable,
                      energy=agent.energy - before_e,
                      satiety=agent.satiety - before_s)

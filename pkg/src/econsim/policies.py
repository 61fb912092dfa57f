"""Scripted decision policies.

Policies replace agent cognition with deterministic heuristics: given a
read-only view of the agent, current quotes, the wage schedule, and the
clock, they emit an ordered action list for the tick.  They may draw from
the agent's seeded stream but never mutate world state.

Shipped policies cover the demand/supply mix a lively market needs:

* subsistence_worker — hold a job, eat, sleep, repeat
* student_investor   — study toward a knowledge target, then apply upward
* producer_trader    — craft a specialty up the supply chain, sell to pools
* random_explorer    — uniformly samples feasible actions for market noise
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import actions as act
from .agents import AgentState
from .config import WorldConfig
from .labor import WageSchedule
from .money import SCALE
from .seeds import stable_hash


@dataclass(slots=True)
class PolicyContext:
    agent: AgentState
    config: WorldConfig
    quotes: dict[str, float]
    wages: WageSchedule
    thresholds: dict[str, float]
    tick: int
    budget_seconds: float
    rng: random.Random
    failures: tuple[str, ...] = ()

    def price_units(self, commodity: str) -> int:
        """Conservative integer cost estimate (quote plus slippage margin)."""
        return int(self.quotes[commodity] * SCALE * 1.10) + 1


class Policy:
    """Base: pure decision functions over a context."""

    name = "idle"

    def __init__(self, params: dict | None = None):
        self.params = params or {}

    def plan(self, ctx: PolicyContext) -> list[act.Action]:
        return [act.Idle()]

    def applications(self, ctx: PolicyContext) -> list[str]:
        return []


def _cheapest_food(ctx: PolicyContext) -> str | None:
    """Pooled food with the lowest price per satiety point."""
    best, best_rate = None, float("inf")
    for commodity, quote in ctx.quotes.items():
        spec = ctx.config.commodities[commodity]
        if not spec.is_food or spec.satiety_value <= 0:
            continue
        rate = quote / spec.satiety_value
        if rate < best_rate:
            best, best_rate = commodity, rate
    return best


def _held_food(ctx: PolicyContext) -> str | None:
    best, best_value = None, 0.0
    for commodity, qty in ctx.agent.inventory.items():
        if qty <= 0:
            continue
        spec = ctx.config.commodities.get(commodity)
        if spec is not None and spec.is_food and spec.satiety_value > best_value:
            best, best_value = commodity, spec.satiety_value
    return best


def _maintenance(ctx: PolicyContext) -> list[act.Action]:
    """Keep the agent alive: eat below 40% satiety, sleep below 30% energy,
    see a doctor below 40% health when affordable."""
    agent, p = ctx.agent, ctx.config.params
    out: list[act.Action] = []
    cap_s = p.cap("satiety", agent.residential_tier)
    cap_e = p.cap("energy", agent.residential_tier)
    cap_h = p.cap("health", agent.residential_tier)

    if agent.satiety < 0.4 * cap_s:
        item = _held_food(ctx)
        if item is not None:
            spec = ctx.config.commodities[item]
            need = max(1, int((0.8 * cap_s - agent.satiety) / spec.satiety_value))
            out.append(act.Eat(item, min(need, agent.holding(item))))
        else:
            item = _cheapest_food(ctx)
            if item is not None:
                spec = ctx.config.commodities[item]
                need = max(1, int((0.8 * cap_s - agent.satiety) / spec.satiety_value))
                affordable = agent.balance_units // ctx.price_units(item)
                qty = min(need, int(affordable))
                if qty >= 1:
                    out.append(act.Buy(item, qty))
                    out.append(act.Eat(item, qty))

    if agent.energy < 0.3 * cap_e:
        out.append(act.Sleep(ctx.budget_seconds))

    if (agent.health < 0.4 * cap_h
            and agent.balance_units >= p.physiology.doctor_fee_units):
        out.append(act.SeeDoctor())

    return out


def _eligible_targets(ctx: PolicyContext, require_prereq: bool = True) -> list[str]:
    """Occupations this agent could plausibly win, best-paid first."""
    agent = ctx.agent
    out = []
    for oid, occ in ctx.config.occupations.items():
        if agent.residential_tier < occ.min_residential:
            continue
        threshold = ctx.thresholds.get(oid, occ.effective_knowledge_floor)
        if agent.education < threshold:
            continue
        if require_prereq and occ.prereq_commodity is not None:
            if (occ.prereq_commodity not in agent.consumed_items
                    and agent.holding(occ.prereq_commodity) < 1):
                continue
        out.append(oid)
    out.sort(key=lambda oid: -ctx.config.occupations[oid].base_wage_units)
    return out


def _near_recruitment(ctx: PolicyContext, window: int = 24) -> bool:
    period = ctx.config.params.recruitment_period
    return period - (ctx.tick % period) <= window


def _buy_missing_prereq(ctx: PolicyContext) -> act.Action | None:
    """Acquire the highest-tier affordable prerequisite not yet consumed.

    Only worth doing shortly before a recruitment boundary.
    """
    if not _near_recruitment(ctx):
        return None
    agent = ctx.agent
    candidates = []
    for occ in ctx.config.occupations.values():
        prereq = occ.prereq_commodity
        if prereq is None or prereq in agent.consumed_items:
            continue
        if agent.residential_tier < occ.min_residential:
            continue
        threshold = ctx.thresholds.get(occ.id, occ.effective_knowledge_floor)
        if agent.education < threshold:
            continue
        if agent.holding(prereq) >= 1 or prereq not in ctx.quotes:
            continue
        candidates.append((occ.tier, prereq))
    if not candidates:
        return None
    candidates.sort(reverse=True)
    prereq = candidates[0][1]
    if ctx.agent.balance_units >= ctx.price_units(prereq):
        return act.Buy(prereq, 1)
    return None


class SubsistenceWorker(Policy):
    """Work the best job available; eat and sleep to keep working."""

    name = "subsistence_worker"

    def plan(self, ctx: PolicyContext) -> list[act.Action]:
        out = _maintenance(ctx)
        buy = _buy_missing_prereq(ctx)
        if buy is not None:
            out.append(buy)
        if ctx.agent.job is not None and not ctx.agent.incapacitated:
            out.append(act.Work(ctx.budget_seconds))
        elif not out:
            out.append(act.Idle())
        return out

    def applications(self, ctx: PolicyContext) -> list[str]:
        return _eligible_targets(ctx)


class StudentInvestor(Policy):
    """Study until a knowledge target, then chase high-tier occupations."""

    name = "student_investor"

    def plan(self, ctx: PolicyContext) -> list[act.Action]:
        agent = ctx.agent
        out = _maintenance(ctx)
        target = float(self.params.get("study_target", 400.0))
        if agent.education < target:
            reading = ctx.config.params.study.get("reading")
            book = reading.requires_item if reading is not None else None
            if (book is not None and agent.holding(book) < 1
                    and book in ctx.quotes
                    and agent.balance_units >= 3 * ctx.price_units(book)):
                out.append(act.Buy(book, 1))
            kind = "reading" if (book is not None and agent.holding(book) >= 1) else "self_study"
            out.append(act.Study(kind, ctx.budget_seconds))
            return out
        buy = _buy_missing_prereq(ctx)
        if buy is not None:
            out.append(buy)
        if agent.job is not None and not agent.incapacitated:
            out.append(act.Work(ctx.budget_seconds))
        elif not out:
            out.append(act.Idle())
        return out

    def applications(self, ctx: PolicyContext) -> list[str]:
        agent = ctx.agent
        targets = _eligible_targets(ctx)
        if agent.job is not None:
            current = ctx.config.occupations[agent.job]
            targets = [oid for oid in targets
                       if ctx.config.occupations[oid].base_wage_units
                       > current.base_wage_units]
        return targets


class ProducerTrader(Policy):
    """Craft a stable specialty up the supply chain and sell into the pool."""

    name = "producer_trader"

    def __init__(self, params: dict | None = None):
        super().__init__(params)
        self._specialties: dict[str, str] = {}

    def _specialty(self, ctx: PolicyContext) -> str:
        cached = self._specialties.get(ctx.agent.agent_id)
        if cached is not None:
            return cached
        craftable = [output for output, recipe in ctx.config.recipes.items()
                     if (spec := ctx.config.commodities[output]).residential_min
                     is not None
                     and spec.residential_min <= ctx.agent.residential_tier
                     and spec.has_pool]
        choice = ("" if not craftable else
                  craftable[stable_hash(ctx.agent.agent_id, "specialty")
                            % len(craftable)])
        self._specialties[ctx.agent.agent_id] = choice
        return choice

    def plan(self, ctx: PolicyContext) -> list[act.Action]:
        agent = ctx.agent
        out = _maintenance(ctx)
        specialty = self._specialty(ctx)
        if not specialty or agent.incapacitated:
            if not out:
                out.append(act.Idle())
            return out
        recipe = ctx.config.recipes[specialty]
        price = ctx.quotes.get(specialty, 0.0)
        batch = max(1, min(12, int(400.0 / max(price, 1.0))))

        held = agent.holding(specialty)
        if held >= batch:
            out.append(act.Sell(specialty, held))
            return out

        budget = agent.balance_units
        for name, need in recipe.inputs.items():
            shortfall = need * batch - agent.holding(name)
            if shortfall <= 0 or name not in ctx.quotes:
                continue
            cost = ctx.price_units(name) * shortfall
            if cost <= budget:
                out.append(act.Buy(name, shortfall))
                budget -= cost
        out.append(act.Craft(specialty, batch))
        return out


class RandomExplorer(Policy):
    """Feasibility-aware uniform noise across every action family."""

    name = "random_explorer"

    def plan(self, ctx: PolicyContext) -> list[act.Action]:
        agent, rng = ctx.agent, ctx.rng
        out = _maintenance(ctx)
        pooled = [c for c in ctx.quotes]
        roll = rng.random()
        if roll < 0.35:
            commodity = pooled[rng.randrange(len(pooled))]
            qty = max(1, min(int(rng.paretovariate(2.5)), 12))
            cost = ctx.price_units(commodity) * qty
            if cost <= agent.balance_units:
                out.append(act.Buy(commodity, qty))
        elif roll < 0.70:
            held = [(c, q) for c, q in agent.inventory.items()
                    if q > 0 and c in ctx.quotes]
            if held:
                commodity, qty = held[rng.randrange(len(held))]
                out.append(act.Sell(commodity, rng.randint(1, qty)))
        elif roll < 0.85 and not agent.incapacitated:
            recipes = [r for r in ctx.config.recipes
                       if (m := ctx.config.commodities[r].residential_min) is not None
                       and m <= agent.residential_tier]
            if recipes:
                out.append(act.Craft(recipes[rng.randrange(len(recipes))],
                                     rng.randint(1, 5)))
        elif roll < 0.95:
            out.append(act.Study("self_study", ctx.budget_seconds / 2))
        else:
            out.append(act.Sleep(ctx.budget_seconds / 2))
        return out

    def applications(self, ctx: PolicyContext) -> list[str]:
        targets = _eligible_targets(ctx)
        if targets and ctx.agent.job is None and ctx.rng.random() < 0.5:
            return targets[:1]
        return []


REGISTRY: dict[str, type[Policy]] = {
    SubsistenceWorker.name: SubsistenceWorker,
    StudentInvestor.name: StudentInvestor,
    ProducerTrader.name: ProducerTrader,
    RandomExplorer.name: RandomExplorer,
    Policy.name: Policy,
}


def make_policy(name: str, params: dict | None = None) -> Policy:
    cls = REGISTRY.get(name)
    if cls is None:
        raise KeyError(f"unknown policy '{name}' (known: {sorted(REGISTRY)})")
    return cls(params)

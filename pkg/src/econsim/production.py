"""Leontief-style conditional synthesis with stochastic rewards.

Output is gated by residential tier and limited by the scarcest of:
material inputs (non-substitutable), energy, satiety, and labor time.
Planning capacity is computed in exact rational arithmetic so whole-unit
floors agree bit-for-bit with a unit-by-unit decrement oracle.

Efficiency couples through labor time: a unit takes time_cost / efficiency
seconds, so depleted or uneducated agents produce more slowly while recipe
conservation stays exact per unit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .agents import AgentState, agent_efficiency, clamp_state
from .config import Recipe, WorldConfig
from .errors import Incapacitated, InvalidAction


@dataclass(frozen=True)
class Constraint:
    """Which bound produced the output-limiting minimum."""

    kind: str                 # residential_gate | material | energy | satiety | labor | requested
    commodity: str | None = None

    def __str__(self) -> str:
        if self.kind == "material":
            return f"material:{self.commodity}"
        return self.kind


GATE = Constraint("residential_gate")
REQUESTED = Constraint("requested")


def exact_cost(value: float) -> Fraction:
    """Recipe costs are decimal-intended (a time cost written as 0.1 divides
    1.0 exactly ten times), so whole-unit capacity uses the shortest decimal
    reading of the float, not its binary expansion."""
    return Fraction(str(value))


@dataclass(frozen=True)
class ProductionRequest:
    agent_id: str
    commodity: str
    desired_units: int
    labor_budget: float       # in-game seconds the agent allocates


@dataclass
class ProductionOutcome:
    produced_units: int
    binding_constraint: Constraint
    consumed: dict[str, int] = field(default_factory=dict)
    energy_spent: float = 0.0
    satiety_spent: float = 0.0
    labor_spent: float = 0.0
    reward_granted: str | None = None
    reward_count: int = 0


def _bounds(agent: AgentState, recipe: Recipe, labor_budget: float,
            config: WorldConfig, time_per_unit: float) -> list[tuple[int, Constraint]]:
    """Whole-unit capacity bounds in documented tie-break order.

    Materials come first in catalog order, then energy, satiety, labor.
    Zero-coefficient terms are excluded rather than dividing by zero.
    """
    bounds: list[tuple[int, Constraint]] = []
    for commodity in config.catalog_order:
        need = recipe.inputs.get(commodity)
        if need:
            bounds.append((agent.holding(commodity) // need,
                           Constraint("material", commodity)))
    if recipe.energy_cost > 0:
        bounds.append((int(Fraction(agent.energy) // exact_cost(recipe.energy_cost)),
                       Constraint("energy")))
    if recipe.satiety_cost > 0:
        bounds.append((int(Fraction(agent.satiety) // exact_cost(recipe.satiety_cost)),
                       Constraint("satiety")))
    if time_per_unit > 0:
        bounds.append((int(Fraction(labor_budget) // exact_cost(time_per_unit)),
                       Constraint("labor")))
    return bounds


def max_output(agent: AgentState, recipe: Recipe, labor_budget: float,
               config: WorldConfig) -> tuple[int, Constraint]:
    """Largest whole-unit batch the agent could synthesize right now.

    Returns 0 with the residential-gate constraint when the agent's tier is
    below the commodity's requirement, regardless of resources.
    """
    spec = config.commodities.get(recipe.output)
    r_min = spec.residential_min if spec is not None else 1
    if r_min is not None and agent.residential_tier < r_min:
        return 0, GATE
    bounds = _bounds(agent, recipe, labor_budget, config, recipe.time_cost)
    if not bounds:
        return 0, Constraint("labor")
    best_units, best_constraint = bounds[0]
    for units, constraint in bounds[1:]:
        if units < best_units:
            best_units, best_constraint = units, constraint
    return best_units, best_constraint


def execute_production(agent: AgentState, request: ProductionRequest,
                       rng: random.Random, config: WorldConfig) -> ProductionOutcome:
    """Synthesize up to the requested units, spending resources exactly.

    Per produced unit one Bernoulli draw decides the special-reward drop.
    Zero output from a binding constraint is an outcome, not an error.
    """
    if agent.incapacitated:
        raise Incapacitated(f"{agent.agent_id} cannot produce while incapacitated")
    if request.desired_units < 1:
        raise InvalidAction("desired_units must be >= 1")
    if request.labor_budget <= 0:
        raise InvalidAction("labor_budget must be positive")
    recipe = config.recipes.get(request.commodity)
    if recipe is None:
        raise InvalidAction(f"no recipe produces '{request.commodity}'")

    eff = agent_efficiency(agent, config)
    spec = config.commodities.get(recipe.output)
    r_min = spec.residential_min if spec is not None else 1
    if r_min is not None and agent.residential_tier < r_min:
        return ProductionOutcome(0, GATE)

    time_per_unit = recipe.time_cost / eff
    bounds = _bounds(agent, recipe, request.labor_budget, config, time_per_unit)
    capacity, constraint = (bounds[0] if bounds else (0, Constraint("labor")))
    for units, c in bounds[1:]:
        if units < capacity:
            capacity, constraint = units, c
    if capacity <= 0:
        return ProductionOutcome(0, constraint)

    if request.desired_units < capacity:
        units, constraint = request.desired_units, REQUESTED
    else:
        units = capacity

    consumed: dict[str, int] = {}
    for name, need in recipe.inputs.items():
        agent.remove_items(name, need * units)
        consumed[name] = need * units
    energy_spent = recipe.energy_cost * units
    satiety_spent = recipe.satiety_cost * units
    agent.energy -= energy_spent
    agent.satiety -= satiety_spent
    clamp_state(agent, config)
    agent.add_items(recipe.output, units)

    rewards = 0
    if recipe.reward_prob > 0.0 and recipe.reward_item is not None:
        for _ in range(units):
            if rng.random() < recipe.reward_prob:
                rewards += 1
        if rewards:
            agent.add_items(recipe.reward_item, rewards)

    return ProductionOutcome(
        produced_units=units,
        binding_constraint=constraint,
        consumed=consumed,
        energy_spent=energy_spent,
        satiety_spent=satiety_spent,
        labor_spent=time_per_unit * units,
        reward_granted=recipe.reward_item if rewards else None,
        reward_count=rewards,
    )

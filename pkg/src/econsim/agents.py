"""Per-agent dynamic state: accounting, physiology, efficiency, safety net.

State updates clamp satiety/energy/health into [0, cap(tier)] on every
mutation.  Balances are fixed-point integers (see money module); inventory
quantities are non-negative integers.  Each operation mutates exactly one
agent and returns the delta actually applied after clamping.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import actions
from .config import EfficiencyParams, WorldConfig
from .errors import (InsufficientFunds, InsufficientInventory, InvalidAction,
                     MissingPrice)
from .money import SCALE


@dataclass(slots=True)
class AgentState:
    agent_id: str
    balance_units: int = 0
    inventory: dict[str, int] = field(default_factory=dict)
    satiety: float = 400.0
    energy: float = 400.0
    health: float = 400.0
    education: float = 0.0
    residential_tier: int = 1
    job: str | None = None
    incapacitated: bool = False
    low_satiety_streak: int = 0
    policy_tag: str = ""
    # internal bookkeeping
    hours_awake: float = 0.0
    consumed_items: set[str] = field(default_factory=set)
    recent_failures: list[str] = field(default_factory=list)
    policy_params: dict = field(default_factory=dict)

    @property
    def balance(self) -> float:
        return self.balance_units / SCALE

    def holding(self, commodity: str) -> int:
        return self.inventory.get(commodity, 0)

    def add_items(self, commodity: str, qty: int) -> None:
        self.inventory[commodity] = self.inventory.get(commodity, 0) + qty

    def remove_items(self, commodity: str, qty: int) -> None:
        held = self.inventory.get(commodity, 0)
        if held < qty:
            raise InsufficientInventory(
                f"{self.agent_id}: holds {held} {commodity}, needs {qty}")
        if held == qty:
            del self.inventory[commodity]
        else:
            self.inventory[commodity] = held - qty


@dataclass(slots=True)
class StateDelta:
    """Net change actually applied to an agent by one operation."""

    balance_units: int = 0
    inventory: dict[str, int] = field(default_factory=dict)
    satiety: float = 0.0
    energy: float = 0.0
    health: float = 0.0
    education: float = 0.0
    hours: float = 0.0
    subsidy_granted: dict[str, int] = field(default_factory=dict)

    def is_identity(self) -> bool:
        return (self.balance_units == 0 and not self.inventory
                and self.satiety == 0.0 and self.energy == 0.0
                and self.health == 0.0 and self.education == 0.0)


def net_worth(agent: AgentState, prices: dict[str, float]) -> float:
    """Balance plus inventory marked to the given marginal prices.

    Computed in exact rational arithmetic and rounded once at the end, so
    the result is the correctly rounded value of the accounting identity.
    """
    total = Fraction(agent.balance_units, SCALE)
    for commodity, qty in agent.inventory.items():
        if qty == 0:
            continue
        price = prices.get(commodity)
        if price is None:
            raise MissingPrice(f"no quote for held commodity '{commodity}'")
        total += Fraction(price) * qty
    return float(total)


def _caps(agent: AgentState, config: WorldConfig) -> tuple[float, float, float]:
    return config.params.caps_for(agent.residential_tier)


def clamp_state(agent: AgentState, config: WorldConfig) -> None:
    cap_s, cap_e, cap_h = config.params.caps_for(agent.residential_tier)
    agent.satiety = min(max(agent.satiety, 0.0), cap_s)
    agent.energy = min(max(agent.energy, 0.0), cap_e)
    agent.health = min(max(agent.health, 0.0), cap_h)


def efficiency_from_values(satiety: float, energy: float, health: float,
                           tier: int, education: float,
                           params: EfficiencyParams,
                           caps: tuple[float, float, float]) -> float:
    """Productivity multiplier in (0, 1], non-decreasing in every factor.

    Multiplicative fullness form: any single depleted factor drags the whole
    product down, floored at min_efficiency.  The residential and knowledge
    factors are bounded non-decreasing maps into (0, 1].
    """
    fullness = ((satiety / caps[0]) ** params.satiety_exponent
                * (energy / caps[1]) ** params.energy_exponent
                * (health / caps[2]) ** params.health_exponent)
    rf = params.residential_factor_min
    residential = rf + (1.0 - rf) * min(tier - 1, 5) / 5.0
    kf = params.knowledge_factor_min
    knowledge = kf + (1.0 - kf) * min(1.0, education / params.knowledge_saturation)
    return max(params.min_efficiency, fullness * residential * knowledge)


def efficiency(agent: AgentState, params: EfficiencyParams,
               caps: tuple[float, float, float]) -> float:
    return efficiency_from_values(agent.satiety, agent.energy, agent.health,
                                  agent.residential_tier, agent.education,
                                  params, caps)


def agent_efficiency(agent: AgentState, config: WorldConfig) -> float:
    return efficiency(agent, config.params.efficiency, _caps(agent, config))


def update_incapacity(agent: AgentState, config: WorldConfig) -> None:
    """Tick-boundary rule: below either floor means no labor or production."""
    inc = config.params.incapacity
    agent.incapacitated = (agent.energy < inc.energy_min
                           or agent.health < inc.health_min)


# --------------------------------------------------------------------------
# recovery actions (never blocked by incapacity)

def eat(agent: AgentState, item: str, qty: int, config: WorldConfig) -> StateDelta:
    if qty <= 0:
        raise InvalidAction(f"eat quantity must be positive, got {qty}")
    spec = config.commodities.get(item)
    if spec is None or not spec.is_food:
        raise InvalidAction(f"'{item}' is not edible")
    agent.remove_items(item, qty)
    agent.consumed_items.add(item)
    cap_s = config.params.cap("satiety", agent.residential_tier)
    before = agent.satiety
    agent.satiety = min(cap_s, before + spec.satiety_value * qty)
    return StateDelta(inventory={item: -qty}, satiety=agent.satiety - before)


def sleep(agent: AgentState, duration_seconds: float, config: WorldConfig) -> StateDelta:
    if duration_seconds <= 0:
        raise InvalidAction(f"sleep duration must be positive, got {duration_seconds}")
    hours = duration_seconds / 3600.0
    cap_e = config.params.cap("energy", agent.residential_tier)
    before = agent.energy
    agent.energy = min(cap_e, before + config.params.physiology.sleep_energy_per_hour * hours)
    agent.hours_awake = 0.0
    return StateDelta(energy=agent.energy - before)


def see_doctor(agent: AgentState, config: WorldConfig, ledger=None) -> StateDelta:
    fee = config.params.physiology.doctor_fee_units
    if agent.balance_units < fee:
        raise InsufficientFunds(
            f"{agent.agent_id}: doctor fee {fee / SCALE:.2f} exceeds balance")
    agent.balance_units -= fee
    if ledger is not None:
        ledger.burned_fee_units += fee
    cap_h = config.params.cap("health", agent.residential_tier)
    before = agent.health
    agent.health = min(cap_h, before + config.params.physiology.doctor_heal)
    return StateDelta(balance_units=-fee, health=agent.health - before)


def apply_recovery_action(agent: AgentState, action, config: WorldConfig,
                          ledger=None) -> StateDelta:
    if isinstance(action, actions.Eat):
        return eat(agent, action.item, action.quantity, config)
    if isinstance(action, actions.Sleep):
        return sleep(agent, action.duration, config)
    if isinstance(action, actions.SeeDoctor):
        return see_doctor(agent, config, ledger)
    raise InvalidAction(f"not a recovery action: {action!r}")


# --------------------------------------------------------------------------
# passive dynamics

def tick_physiology(agent: AgentState, elapsed_seconds: float,
                    rng: random.Random, config: WorldConfig) -> StateDelta:
    """Passive decay, illness draws, sleep-deprivation wear, flag updates.

    Deterministic given the agent's seeded stream: at most one illness draw
    per call, taken only when the illness probability is positive.
    """
    p = config.params.physiology
    hours = elapsed_seconds / 3600.0
    delta = StateDelta()

    before_s = agent.satiety
    agent.satiety = max(0.0, before_s - p.satiety_decay_per_hour * hours)
    delta.satiety = agent.satiety - before_s

    agent.hours_awake += hours
    before_h = agent.health
    if agent.hours_awake > p.awake_hours_threshold:
        agent.health = max(0.0, agent.health - p.sleep_deprivation_health_per_hour * hours)
    if p.illness_prob_per_tick > 0.0 and rng.random() < p.illness_prob_per_tick:
        agent.health = max(0.0, agent.health - p.illness_damage)
    delta.health = agent.health - before_h

    if agent.satiety <= config.params.safety_net.satiety_threshold:
        agent.low_satiety_streak += 1
    else:
        agent.low_satiety_streak = 0

    update_incapacity(agent, config)
    return delta


def apply_safety_net(agent: AgentState, config: WorldConfig) -> StateDelta | None:
    """Grant the subsidy after persistent low satiety; force-feed at zero.

    The grant lands in inventory.  If the agent's satiety is fully depleted
    the granted food is consumed on the spot, so no policy can leave an
    agent starving at zero satiety indefinitely.
    """
    net = config.params.safety_net
    if agent.low_satiety_streak < net.persistence_ticks:
        return None
    agent.low_satiety_streak = 0
    item, amount = net.subsidy_item, net.subsidy_amount
    agent.add_items(item, amount)
    delta = StateDelta(inventory={item: amount},
                       subsidy_granted={item: amount})
    if agent.satiety <= 0.0:
        fed = eat(agent, item, amount, config)
        delta.satiety += fed.satiety
        delta.inventory[item] += fed.inventory[item]
        if delta.inventory[item] == 0:
            del delta.inventory[item]
    return delta

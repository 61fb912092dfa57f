"""Pre-execution action simulation with bounded local repair.

Before an agent's tick sequence executes, it is dry-run against a copied
state — including projections of the agent's own trades against pool
reserves — to catch resource shortfalls, gate violations, and incapacity
conflicts.  A single repair pass applies cheap rule-table fixes (buy a
missing affordable input, sleep on an energy shortfall, eat held food on a
satiety shortfall), then the repaired sequence is re-validated once.  The
soundness contract: a sequence whose verdicts are all ok/repaired executes
without error against the same world state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import actions as act
from .agents import efficiency_from_values
from .config import WorldConfig
from .labor import WageSchedule
from .market import LiquidityPool, _reserve
from .money import round_units

OK = "ok"
VIOLATION = "violation"
REPAIRED = "repaired"


@dataclass(slots=True)
class Verdict:
    action: act.Action
    status: str
    reason: str | None = None
    inserted: tuple[act.Action, ...] = ()


@dataclass(slots=True)
class ValidationReport:
    verdicts: list[Verdict]
    projected_state: dict
    sequence: list[act.Action]

    def all_ok(self) -> bool:
        return all(v.status != VIOLATION for v in self.verdicts)

    def executable(self) -> list[act.Action]:
        """Actions the engine should run: repairs inserted, violations dropped."""
        out: list[act.Action] = []
        for verdict in self.verdicts:
            if verdict.status == VIOLATION:
                continue
            out.extend(verdict.inserted)
            out.append(verdict.action)
        return out

    def violations(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == VIOLATION]


class _PoolView:
    """Projected reserves for the agent's own trades within the tick."""

    __slots__ = ("_pools", "_state")

    def __init__(self, pools: dict[str, LiquidityPool]):
        self._pools = pools
        self._state: dict[str, tuple[int, int]] = {}   # commodity -> (IS, CR)

    def _get(self, commodity: str) -> tuple[int, int] | None:
        state = self._state.get(commodity)
        if state is not None:
            return state
        pool = self._pools.get(commodity)
        if pool is None:
            return None
        snapshot = (pool.inventory_supply, pool.currency_reserve_units)
        self._state[commodity] = snapshot
        return snapshot

    def has_pool(self, commodity: str) -> bool:
        return self._get(commodity) is not None

    def cost_to_buy(self, commodity: str, quantity: int) -> int | None:
        """Projected cost in grid units, or None when not buyable."""
        state = self._get(commodity)
        if state is None or quantity <= 0:
            return None
        inventory, reserve = state
        if quantity >= inventory:
            return None
        k = self._pools[commodity].k_units
        return _reserve(k, inventory - quantity) - reserve

    def apply_buy(self, commodity: str, quantity: int) -> int:
        inventory, reserve = self._state[commodity]
        k = self._pools[commodity].k_units
        new_reserve = _reserve(k, inventory - quantity)
        self._state[commodity] = (inventory - quantity, new_reserve)
        return new_reserve - reserve

    def apply_sell(self, commodity: str, quantity: int) -> int:
        inventory, reserve = self._state[commodity]
        k = self._pools[commodity].k_units
        new_reserve = _reserve(k, inventory + quantity)
        self._state[commodity] = (inventory + quantity, new_reserve)
        return reserve - new_reserve


class _Projection:
    """Mutable copy of the fields the dry run needs.

    Contract used by the repair pass: a handler that returns a violation
    reason must leave the projection untouched.
    """

    __slots__ = ("agent_id", "balance_units", "inventory", "satiety", "energy",
                 "health", "education", "tier", "job", "incapacitated",
                 "budget", "caps")

    def __init__(self, agent, config: WorldConfig, budget: float):
        self.agent_id = agent.agent_id
        self.balance_units = agent.balance_units
        self.inventory = dict(agent.inventory)
        self.satiety = agent.satiety
        self.energy = agent.energy
        self.health = agent.health
        self.education = agent.education
        self.tier = agent.residential_tier
        self.job = agent.job
        self.incapacitated = agent.incapacitated
        self.budget = budget
        self.caps = config.params.caps_for(self.tier)

    def holding(self, commodity: str) -> int:
        return self.inventory.get(commodity, 0)

    def snapshot(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "balance_units": self.balance_units,
            "inventory": dict(self.inventory),
            "satiety": self.satiety,
            "energy": self.energy,
            "health": self.health,
            "budget_left": self.budget,
        }


def _check_eat(state, action, config, pools):
    spec = config.commodities.get(action.item)
    if action.quantity <= 0:
        return "non-positive quantity"
    if spec is None or not spec.is_food:
        return f"'{action.item}' is not edible"
    if state.holding(action.item) < action.quantity:
        return f"missing food {action.item}"
    state.inventory[action.item] -= action.quantity
    state.satiety = min(state.caps[0],
                        state.satiety + spec.satiety_value * action.quantity)
    return None


def _check_sleep(state, action, config, pools):
    if action.duration <= 0:
        return "non-positive duration"
    slept = min(action.duration, state.budget)
    if slept <= 0:
        return "tick budget exhausted"
    rate = config.params.physiology.sleep_energy_per_hour
    state.energy = min(state.caps[1], state.energy + rate * slept / 3600.0)
    state.budget -= slept
    return None


def _check_doctor(state, action, config, pools):
    fee = config.params.physiology.doctor_fee_units
    if state.balance_units < fee:
        return "cannot afford doctor fee"
    state.balance_units -= fee
    state.health = min(state.caps[2],
                       state.health + config.params.physiology.doctor_heal)
    return None


def _check_study(state, action, config, pools):
    p = config.params
    studied = p.study.get(action.kind)
    if studied is None:
        return f"unknown study action '{action.kind}'"
    if action.duration <= 0:
        return "non-positive duration"
    duration = min(action.duration, state.budget)
    if duration <= 0:
        return "tick budget exhausted"
    hours = duration / 3600.0
    fee = 0
    if studied.fee_per_hour_units:
        fee = round_units(Fraction(studied.fee_per_hour_units) * Fraction(hours))
        if state.balance_units < fee:
            return "cannot afford study fee"
    if studied.requires_item is not None and state.holding(studied.requires_item) < 1:
        return f"missing {studied.requires_item} for {action.kind}"
    state.balance_units -= fee
    state.education += p.education_rate_per_hour * hours
    state.energy = max(0.0, state.energy - studied.energy_per_hour * hours)
    state.satiety = max(0.0, state.satiety - studied.satiety_per_hour * hours)
    state.budget -= duration
    return None


def _check_work(state, action, config, pools):
    if state.incapacitated:
        return "incapacitated"
    if state.job is None:
        return "not employed"
    if action.duration <= 0:
        return "non-positive duration"
    duration = min(action.duration, state.budget)
    if duration <= 0:
        return "tick budget exhausted"
    p = config.params
    occ = config.occupations[state.job]
    hours = duration / 3600.0
    energy_cost = (occ.energy_per_hour if occ.energy_per_hour >= 0
                   else p.job_energy_per_hour)
    satiety_cost = (occ.satiety_per_hour if occ.satiety_per_hour >= 0
                    else p.job_satiety_per_hour)
    workable = hours
    if energy_cost > 0:
        workable = min(workable, state.energy / energy_cost)
    if satiety_cost > 0:
        workable = min(workable, state.satiety / satiety_cost)
    state.energy = max(0.0, state.energy - energy_cost * workable)
    state.satiety = max(0.0, state.satiety - satiety_cost * workable)
    state.budget -= workable * 3600.0
    return None


def _check_craft(state, action, config, pools):
    # Feasibility screen with float bounds; the execution path recomputes
    # capacity exactly, and zero output there is an outcome, not an error.
    if state.incapacitated:
        return "incapacitated"
    if action.quantity <= 0:
        return "non-positive quantity"
    recipe = config.recipes.get(action.commodity)
    if recipe is None:
        return f"no recipe for {action.commodity}"
    spec = config.commodities[recipe.output]
    if spec.residential_min is not None and state.tier < spec.residential_min:
        return f"residential tier below {spec.residential_min}"
    if state.budget <= 0:
        return "tick budget exhausted"
    capacity = action.quantity
    for name, need in recipe.inputs.items():
        have = state.holding(name)
        if have < need:
            return f"missing input {name}"
        capacity = min(capacity, have // need)
    if recipe.energy_cost > 0:
        if state.energy < recipe.energy_cost:
            return "insufficient energy"
        capacity = min(capacity, int(state.energy / recipe.energy_cost))
    if recipe.satiety_cost > 0:
        if state.satiety < recipe.satiety_cost:
            return "insufficient satiety"
        capacity = min(capacity, int(state.satiety / recipe.satiety_cost))
    eff = efficiency_from_values(state.satiety, state.energy, state.health,
                                 state.tier, state.education,
                                 config.params.efficiency, state.caps)
    time_per_unit = recipe.time_cost / eff
    if time_per_unit > 0:
        capacity = min(capacity, int(state.budget / time_per_unit))
    if capacity <= 0:
        return "no feasible unit"
    units = capacity
    for name, need in recipe.inputs.items():
        state.inventory[name] -= need * units
    state.energy = max(0.0, state.energy - recipe.energy_cost * units)
    state.satiety = max(0.0, state.satiety - recipe.satiety_cost * units)
    state.budget -= time_per_unit * units
    state.inventory[recipe.output] = state.holding(recipe.output) + units
    return None


def _check_buy(state, action, config, pools):
    if action.quantity <= 0:
        return "non-positive quantity"
    cost = pools.cost_to_buy(action.commodity, action.quantity)
    if cost is None:
        if not pools.has_pool(action.commodity):
            return f"no pool for {action.commodity}"
        return f"pool too shallow for {action.quantity} {action.commodity}"
    if state.balance_units < cost:
        return f"cannot afford {action.quantity} {action.commodity}"
    pools.apply_buy(action.commodity, action.quantity)
    state.balance_units -= cost
    state.inventory[action.commodity] = state.holding(action.commodity) + action.quantity
    return None


def _check_sell(state, action, config, pools):
    if action.quantity <= 0:
        return "non-positive quantity"
    if not pools.has_pool(action.commodity):
        return f"no pool for {action.commodity}"
    if state.holding(action.commodity) < action.quantity:
        return f"missing {action.commodity} to sell"
    proceeds = pools.apply_sell(action.commodity, action.quantity)
    state.inventory[action.commodity] -= action.quantity
    state.balance_units += proceeds
    return None


def _check_idle(state, action, config, pools):
    return None


_HANDLERS = {
    act.Eat: _check_eat,
    act.Sleep: _check_sleep,
    act.SeeDoctor: _check_doctor,
    act.Study: _check_study,
    act.Work: _check_work,
    act.Craft: _check_craft,
    act.Buy: _check_buy,
    act.Sell: _check_sell,
    act.Idle: _check_idle,
}


def _project(state: _Projection, action: act.Action, config: WorldConfig,
             pools: _PoolView) -> str | None:
    handler = _HANDLERS.get(type(action))
    if handler is None:
        return f"unknown action {action!r}"
    return handler(state, action, config, pools)


def _repair(state: _Projection, action: act.Action, reason: str,
            config: WorldConfig, pools: _PoolView) -> list[act.Action] | None:
    """Rule-table fixes; returns actions to insert before the failing one.

    `state` is the projection just before the failing action (handlers do
    not mutate on failure).
    """
    if isinstance(action, act.Eat) and reason.startswith("missing food"):
        missing = action.quantity - state.holding(action.item)
        cost = pools.cost_to_buy(action.item, missing)
        if cost is not None and state.balance_units >= cost:
            return [act.Buy(action.item, missing)]
        return None

    if isinstance(action, act.Craft) and reason.startswith("missing input"):
        recipe = config.recipes[action.commodity]
        inserts: list[act.Action] = []
        budget = state.balance_units
        for name, need in recipe.inputs.items():
            shortfall = need * action.quantity - state.holding(name)
            if shortfall <= 0:
                continue
            cost = pools.cost_to_buy(name, shortfall)
            if cost is None or cost > budget:
                return None
            budget -= cost
            inserts.append(act.Buy(name, shortfall))
        return inserts or None

    if reason == "insufficient energy":
        return [act.Sleep(1800.0)]

    if reason == "insufficient satiety":
        best, best_value = None, 0.0
        for commodity, qty in state.inventory.items():
            if qty <= 0:
                continue
            spec = config.commodities.get(commodity)
            if spec is not None and spec.is_food and spec.satiety_value > best_value:
                best, best_value = commodity, spec.satiety_value
        if best is None:
            return None
        return [act.Eat(best, min(state.inventory[best], 3))]

    return None


def simulate_actions(agent, sequence: list[act.Action], config: WorldConfig,
                     pools: dict[str, LiquidityPool], budget_seconds: float,
                     wages: WageSchedule | None = None) -> ValidationReport:
    """Dry-run a tick sequence; never mutates live state.

    First pass flags violations; a single repair pass may insert fixes,
    after which the full sequence is validated once more.  Remaining
    violations are reported and excluded from the executable sequence.
    """
    def run_pass(seq, allow_repair: bool):
        state = _Projection(agent, config, budget_seconds)
        view = _PoolView(pools)
        verdicts: list[Verdict] = []
        out_seq: list[tuple[act.Action, tuple[act.Action, ...]]] = []
        any_repair = False
        for action, inserted in seq:
            for pre in inserted:
                _project(state, pre, config, view)
            reason = _project(state, action, config, view)
            if reason is None:
                verdicts.append(Verdict(action, REPAIRED if inserted else OK,
                                        inserted=inserted))
                out_seq.append((action, inserted))
                continue
            if allow_repair:
                fix = _repair(state, action, reason, config, view)
                if fix:
                    any_repair = True
                    out_seq.append((action, tuple(fix)))
                    continue
            verdicts.append(Verdict(action, VIOLATION, reason=reason))
            out_seq.append((action, inserted))
        return verdicts, out_seq, any_repair, state

    first = [(a, ()) for a in sequence]
    verdicts, repaired, was_repaired, state = run_pass(first, allow_repair=True)
    if was_repaired:
        verdicts, _, _, state = run_pass(repaired, allow_repair=False)
    return ValidationReport(verdicts=verdicts,
                            projected_state=state.snapshot(),
                            sequence=list(sequence))

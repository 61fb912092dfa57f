import random
from fractions import Fraction

import pytest

from econsim.agents import AgentState, agent_efficiency
from econsim.config import Recipe
from econsim.errors import Incapacitated
from econsim.production import (Constraint, ProductionRequest, execute_production,
                                max_output)

from .testworld import mini_config


def brute_force_output(agent: AgentState, recipe: Recipe, labor: float,
                       r_min: int | None) -> int:
    """Decrement resources one unit at a time until any constraint fails.

    Exact rational bookkeeping, independent of the min/floor formula.
    Costs use their decimal reading (the configuration convention); agent
    state uses the binary-exact float values.
    """
    if r_min is not None and agent.residential_tier < r_min:
        return 0
    energy_cost = Fraction(str(recipe.energy_cost))
    satiety_cost = Fraction(str(recipe.satiety_cost))
    time_cost = Fraction(str(recipe.time_cost))
    stock = dict(agent.inventory)
    energy = Fraction(agent.energy)
    satiety = Fraction(agent.satiety)
    time_left = Fraction(labor)
    units = 0
    while True:
        if any(stock.get(name, 0) < need for name, need in recipe.inputs.items()):
            return units
        if energy_cost > 0 and energy < energy_cost:
            return units
        if satiety_cost > 0 and satiety < satiety_cost:
            return units
        if time_cost > 0 and time_left < time_cost:
            return units
        for name, need in recipe.inputs.items():
            stock[name] -= need
        energy -= energy_cost
        satiety -= satiety_cost
        time_left -= time_cost
        units += 1
        if units > 10**6:
            raise AssertionError("unbounded recipe in oracle")


class TestMaxOutput:
    def test_chip_style_binding_material(self, default_config):
        chip = default_config.recipes["Chip"]
        agent = AgentState("a", residential_tier=5,
                           inventory={"Transistor": 12, "Circuit Board": 3},
                           satiety=200.0, energy=500.0, health=400.0)
        units, constraint = max_output(agent, chip, 100.0, default_config)
        assert units == 3
        assert constraint == Constraint("material", "Circuit Board")

    def test_residential_gate_dominates(self, default_config):
        chip = default_config.recipes["Chip"]
        agent = AgentState("a", residential_tier=4,
                           inventory={"Transistor": 100, "Circuit Board": 100},
                           satiety=500.0, energy=500.0, health=500.0)
        units, constraint = max_output(agent, chip, 1e6, default_config)
        assert units == 0
        assert constraint == Constraint("residential_gate")

    def test_zero_coefficients_excluded(self, default_config):
        # no inputs and zero satiety cost: only energy and labor bind
        apple = default_config.recipes["Apple"]
        agent = AgentState("a", residential_tier=1, satiety=0.0, energy=20.0,
                           health=400.0)
        units, constraint = max_output(agent, apple, 1.0, default_config)
        assert units == 10
        assert constraint in (Constraint("energy"), Constraint("labor"))

    def test_tie_break_order_prefers_materials(self, default_config):
        # engineered tie: materials and energy both allow exactly 2
        book = default_config.recipes["Book"]  # Wood x1, energy 32
        agent = AgentState("a", residential_tier=1, inventory={"Wood": 2},
                           satiety=500.0, energy=64.0, health=400.0)
        units, constraint = max_output(agent, book, 1e6, default_config)
        assert units == 2
        assert constraint == Constraint("material", "Wood")

    def test_matches_brute_force_on_random_instances(self, default_config):
        rng = random.Random(42)
        recipes = list(default_config.recipes.values())
        for _ in range(500):
            recipe = rng.choice(recipes)
            agent = AgentState(
                "a", residential_tier=rng.randint(1, 6),
                inventory={name: rng.randint(0, 30)
                           for name in recipe.inputs} if recipe.inputs else {},
                satiety=rng.uniform(0, 500), energy=rng.uniform(0, 500),
                health=rng.uniform(0, 500))
            labor = rng.uniform(0, 50)
            spec = default_config.commodities[recipe.output]
            expected = brute_force_output(agent, recipe, labor,
                                          spec.residential_min)
            units, _ = max_output(agent, recipe, labor, default_config)
            assert units == expected

    def test_monotone_in_resources(self, default_config):
        rng = random.Random(7)
        chip = default_config.recipes["Chip"]
        for _ in range(200):
            agent = AgentState(
                "a", residential_tier=5,
                inventory={"Transistor": rng.randint(0, 10),
                           "Circuit Board": rng.randint(0, 10)},
                satiety=rng.uniform(0, 500), energy=rng.uniform(0, 500),
                health=400.0)
            labor = rng.uniform(0, 40)
            base, _ = max_output(agent, chip, labor, default_config)
            richer = AgentState(
                "a", residential_tier=5,
                inventory={k: v + 2 for k, v in agent.inventory.items()},
                satiety=min(500.0, agent.satiety + 50),
                energy=min(500.0, agent.energy + 50), health=400.0)
            more, _ = max_output(richer, chip, labor + 10, default_config)
            assert more >= base


class TestExecuteProduction:
    def test_zero_reward_prob_never_rewards(self):
        config = mini_config()
        agent = AgentState("a", residential_tier=1, satiety=400.0,
                           energy=400.0, health=400.0)
        outcome = execute_production(
            agent, ProductionRequest("a", "Grain", 5, 300.0),
            random.Random(0), config)
        assert outcome.produced_units == 5
        assert outcome.reward_granted is None

    def test_forced_reward(self):
        config = mini_config(recipes={
            "Grain": Recipe("Grain", {}, 2.0, 1.0, 0.5, 1.0, "Relic"),
        })
        agent = AgentState("a", residential_tier=1, satiety=400.0,
                           energy=400.0, health=400.0)
        outcome = execute_production(
            agent, ProductionRequest("a", "Grain", 3, 300.0),
            random.Random(0), config)
        assert outcome.reward_granted == "Relic"
        assert outcome.reward_count == 3
        assert agent.holding("Relic") == 3

    def test_seeded_rewards_replay_bit_exact(self, default_config):
        results = []
        for _ in range(2):
            agent = AgentState("a", residential_tier=5,
                               inventory={"Transistor": 50, "Circuit Board": 50},
                               satiety=500.0, energy=500.0, health=500.0)
            rng = random.Random(123456)
            outcome = execute_production(
                agent, ProductionRequest("a", "Chip", 3, 1000.0), rng,
                default_config)
            results.append((outcome.produced_units, outcome.reward_count,
                            dict(agent.inventory)))
        assert results[0] == results[1]

    def test_conservation_of_inputs(self):
        config = mini_config()
        agent = AgentState("a", residential_tier=1, inventory={"Grain": 7},
                           satiety=400.0, energy=400.0, health=400.0)
        outcome = execute_production(
            agent, ProductionRequest("a", "Meal", 2, 300.0),
            random.Random(0), config)
        assert outcome.produced_units == 2
        assert outcome.consumed == {"Grain": 4}
        assert agent.holding("Grain") == 3
        assert agent.holding("Meal") == 2

    def test_incapacitated_blocks_production(self):
        config = mini_config()
        agent = AgentState("a", incapacitated=True, residential_tier=1,
                           satiety=400.0, energy=400.0, health=400.0)
        with pytest.raises(Incapacitated):
            execute_production(agent, ProductionRequest("a", "Grain", 1, 300.0),
                               random.Random(0), config)

    def test_zero_output_is_outcome_not_error(self):
        config = mini_config()
        agent = AgentState("a", residential_tier=1, satiety=400.0,
                           energy=400.0, health=400.0)
        outcome = execute_production(
            agent, ProductionRequest("a", "Meal", 2, 300.0),
            random.Random(0), config)
        assert outcome.produced_units == 0
        assert outcome.binding_constraint == Constraint("material", "Grain")

    def test_efficiency_scales_labor_time(self):
        config = mini_config()
        fresh = AgentState("a", residential_tier=1, satiety=500.0,
                           energy=500.0, health=500.0, education=100.0)
        tired = AgentState("b", residential_tier=1, satiety=100.0,
                           energy=100.0, health=100.0)
        eff_fresh = agent_efficiency(fresh, config)
        eff_tired = agent_efficiency(tired, config)
        assert eff_fresh > eff_tired
        out_fresh = execute_production(
            fresh, ProductionRequest("a", "Grain", 4, 300.0),
            random.Random(0), config)
        out_tired = execute_production(
            tired, ProductionRequest("b", "Grain", 4, 300.0),
            random.Random(0), config)
        assert out_fresh.labor_spent == pytest.approx(4 * 0.5 / eff_fresh)
        assert out_tired.labor_spent == pytest.approx(4 * 0.5 / eff_tired)
        assert out_tired.labor_spent > out_fresh.labor_spent

    def test_empirical_reward_rate(self):
        # binomial 99% band around p=0.05 over 1e5 unit draws
        config = mini_config(recipes={
            "Grain": Recipe("Grain", {}, 0.001, 0.0, 0.0001, 0.05, "Relic"),
        })
        rng = random.Random(2024)
        rewards = 0
        trials = 100
        per_batch = 1000
        for i in range(trials):
            agent = AgentState(f"a{i}", residential_tier=1, satiety=500.0,
                               energy=500.0, health=500.0)
            outcome = execute_production(
                agent, ProductionRequest(agent.agent_id, "Grain", per_batch,
                                         10_000.0), rng, config)
            assert outcome.produced_units == per_batch
            rewards += outcome.reward_count
        rate = rewards / (trials * per_batch)
        assert abs(rate - 0.05) <= 0.005

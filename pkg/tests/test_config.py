import collections

import pytest
import yaml

from econsim.config import (Recipe, Sector, default_scenario_path,
                            load_scenario, parse_scenario, serialize_config,
                            validate_catalog)
from econsim.errors import DanglingReference, ParseError, ValidationError
from econsim.money import from_decimal

from .testworld import mini_config

MINIMAL_WORLD = """
world:
  rng_seed: 1
  recruitment_period: 10
  education_rate_per_hour: 1.0
  application_quota: [1, 2, 3]
  safety_net: {satiety_threshold: 50, persistence_ticks: 3, subsidy_item: Grain, subsidy_amount: 1}
  incapacity: {energy_min: 10, health_min: 10}
  physiology: {satiety_decay_per_hour: 1.0, awake_hours_threshold: 18,
               sleep_deprivation_health_per_hour: 1, illness_prob_per_tick: 0,
               illness_damage: 0, sleep_energy_per_hour: 60, doctor_fee: 10, doctor_heal: 100}
  efficiency: {satiety_exponent: 1, energy_exponent: 1, health_exponent: 1,
               min_efficiency: 0.05, residential_factor_min: 1.0,
               knowledge_saturation: 100, knowledge_factor_min: 0.5}
  study:
    paid_learning: {fee_per_hour: 10, energy_per_hour: 5, satiety_per_hour: 3}
    reading: {energy_per_hour: 4, satiety_per_hour: 3}
    self_study: {energy_per_hour: 5, satiety_per_hour: 3}
  state_caps: {satiety: [500], energy: [500], health: [500]}
"""


def write_scenario(tmp_path, body: str, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text("schema_version: 1\n" + body, encoding="utf-8")
    return path


class TestDefaultScenario:
    def test_catalog_counts_match_shipped_tables(self, default_config):
        sectors = collections.Counter(
            spec.sector for spec in default_config.commodities.values())
        assert sectors[Sector.PRIMARY] == 8
        assert sectors[Sector.SECONDARY_FOOD] == 9
        assert sectors[Sector.SECONDARY_REFINING] == 4
        assert sectors[Sector.TERTIARY_HIGH_TECH] == 3
        assert sectors[Sector.SPECIAL_REWARD] == 1
        assert len(default_config.commodities) == 25

    def test_occupation_catalog_counts(self, default_config):
        tiers = collections.Counter(
            occ.tier for occ in default_config.occupations.values())
        assert len(default_config.occupations) == 17
        assert tiers == {1: 2, 2: 3, 3: 2, 4: 3, 5: 4, 6: 3}

    def test_ceo_row(self, default_config):
        ceo = default_config.occupations["CEO"]
        assert ceo.tier == 6
        assert ceo.min_residential == 6
        assert ceo.knowledge_floor == 604
        assert ceo.eligibility_share == 0.065
        assert ceo.base_wage_units == from_decimal(1411)
        assert ceo.prereq_commodity == "Circuit Board"

    def test_chip_recipe(self, default_config):
        chip = default_config.recipes["Chip"]
        assert chip.inputs == {"Transistor": 1, "Circuit Board": 1}
        assert chip.energy_cost == 100
        assert chip.satiety_cost == 25
        assert chip.time_cost == 5
        assert chip.reward_prob == 0.05
        assert chip.reward_item == "Gold Apple"

    def test_food_partition(self, default_config):
        pooled = default_config.pooled_commodities()
        foods = [c for c in pooled if c.is_food]
        assert len(foods) == 12
        assert len(pooled) - len(foods) == 12

    def test_shipped_scenarios_self_validate(self, default_config, strat_config):
        assert validate_catalog(default_config) == []
        assert validate_catalog(strat_config) == []

    def test_identical_bytes_identical_config(self):
        path = default_scenario_path("market_life")
        assert load_scenario(path) == load_scenario(path)


class TestLoader:
    def test_dangling_recipe_input(self, tmp_path):
        body = MINIMAL_WORLD + """
commodities:
  - {id: Grain, sector: primary, r_min: 1, food: true, satiety_value: 10,
     initial_price: 10, initial_pool_inventory: 100}
recipes:
  - {output: Grain, inputs: {Unobtainium: 1}, energy: 2, satiety: 0, time: 1, reward_prob: 0}
"""
        with pytest.raises(DanglingReference, match="Unobtainium"):
            load_scenario(write_scenario(tmp_path, body))

    def test_unknown_field_is_hard_error(self, tmp_path):
        body = MINIMAL_WORLD + """
commodities:
  - {id: Grain, sector: primary, r_min: 1, food: true, satiety_value: 10,
     initial_price: 10, initial_pool_inventory: 100, colour: green}
"""
        with pytest.raises(ParseError, match="colour"):
            load_scenario(write_scenario(tmp_path, body))

    def test_schema_version_required(self, tmp_path):
        path = tmp_path / "s.yaml"
        path.write_text("schema_version: 99\nworld: {}\n", encoding="utf-8")
        with pytest.raises(ParseError, match="schema_version"):
            load_scenario(path)

    def test_eligibility_share_zero_rejected(self, tmp_path):
        body = MINIMAL_WORLD + """
commodities:
  - {id: Grain, sector: primary, r_min: 1, food: true, satiety_value: 10,
     initial_price: 10, initial_pool_inventory: 100}
job_tiers:
  - {tier: 1, name: Entry, min_residential: 1, min_knowledge: 0, prerequisite: null, wage_type: static}
occupations:
  - {id: Cleaner, tier: 1, min_residential: 1, knowledge_floor: 0,
     eligibility_share: 0.0, base_wage: 100, positions: 3}
"""
        with pytest.raises(ValidationError) as err:
            load_scenario(write_scenario(tmp_path, body))
        assert any(d.code == "ELIGIBILITY_SHARE_RANGE"
                   for d in err.value.diagnostics)

    def test_include_merges_and_rejects_collisions(self, tmp_path):
        (tmp_path / "part.yaml").write_text(
            "commodities:\n"
            "  - {id: Grain, sector: primary, r_min: 1, food: true,\n"
            "     satiety_value: 10, initial_price: 10, initial_pool_inventory: 100}\n",
            encoding="utf-8")
        body = "include: [part.yaml]\n" + MINIMAL_WORLD
        config = load_scenario(write_scenario(tmp_path, body))
        assert "Grain" in config.commodities

        collision = ("include: [part.yaml]\n" + MINIMAL_WORLD
                     + "\ncommodities: []\n")
        with pytest.raises(ParseError, match="multiple files"):
            load_scenario(write_scenario(tmp_path, collision, name="c.yaml"))


class TestValidateCatalog:
    def test_reward_item_missing(self):
        config = mini_config(recipes={
            "Grain": Recipe("Grain", {}, 2.0, 1.0, 0.5, 0.05, None),
        })
        codes = [d.code for d in validate_catalog(config)]
        assert "REWARD_ITEM_MISSING" in codes

    def test_special_reward_recipe_flagged(self):
        config = mini_config(recipes={
            "Relic": Recipe("Relic", {}, 2.0, 1.0, 0.5, 0.0, None),
        })
        codes = [d.code for d in validate_catalog(config)]
        assert "SPECIAL_REWARD_RECIPE" in codes

    def test_empty_recipe_flagged(self):
        config = mini_config(recipes={
            "Grain": Recipe("Grain", {}, 0.0, 0.0, 0.0, 0.0, None),
        })
        codes = [d.code for d in validate_catalog(config)]
        assert "RECIPE_EMPTY" in codes

    def test_mini_config_is_valid(self):
        assert validate_catalog(mini_config()) == []


class TestRoundTrip:
    def test_serialize_load_round_trip(self, tmp_path, default_config):
        doc = serialize_config(default_config)
        path = tmp_path / "round.yaml"
        path.write_text(yaml.safe_dump(doc), encoding="utf-8")
        reloaded = load_scenario(path)
        assert serialize_config(reloaded) == doc

    def test_equality_is_catalog_order_insensitive(self, tmp_path, default_config):
        doc = serialize_config(default_config)
        doc["commodities"] = list(reversed(doc["commodities"]))
        doc["recipes"] = list(reversed(doc["recipes"]))
        path = tmp_path / "shuffled.yaml"
        path.write_text(yaml.safe_dump(doc), encoding="utf-8")
        reloaded = load_scenario(path)
        assert reloaded.commodities == default_config.commodities
        assert reloaded.recipes == default_config.recipes
        assert serialize_config(reloaded) == serialize_config(default_config)

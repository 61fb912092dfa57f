"""Small hand-built world for unit tests.

Five commodities (two foods, two materials, one unpooled reward), three
recipes, and two occupations give full control over every parameter
without YAML round trips.
"""

from econsim.config import (CommoditySpec, EfficiencyParams, IncapacityParams,
                            JobTier, OccupationSpec, PhysiologyParams,
                            PopulationGroup, Recipe, SafetyNetParams, Sector,
                            StudyAction, WageRegime, WorldConfig, WorldParams)
from econsim.money import from_decimal


def mini_world_params(**overrides) -> WorldParams:
    base = dict(
        rng_seed=11,
        time_scale=7.0,
        tick_length=300,
        recruitment_period=10,
        education_rate_per_hour=1.0,
        wage_shock_bound=0.0,
        application_quota=(1, 2, 3, 4, 5, 6),
        safety_net=SafetyNetParams(satiety_threshold=50.0, persistence_ticks=3,
                                   subsidy_item="Meal", subsidy_amount=2),
        incapacity=IncapacityParams(energy_min=10.0, health_min=10.0),
        physiology=PhysiologyParams(
            satiety_decay_per_hour=0.0,
            awake_hours_threshold=1e18,
            sleep_deprivation_health_per_hour=0.0,
            illness_prob_per_tick=0.0,
            illness_damage=0.0,
            sleep_energy_per_hour=60.0,
            doctor_fee_units=from_decimal(50),
            doctor_heal=500.0,
        ),
        efficiency=EfficiencyParams(
            satiety_exponent=1.0, energy_exponent=1.0, health_exponent=1.0,
            min_efficiency=0.05, residential_factor_min=1.0,
            knowledge_saturation=100.0, knowledge_factor_min=0.5,
        ),
        study={
            "paid_learning": StudyAction(from_decimal(20), 6.0, 4.0, None),
            "reading": StudyAction(0, 4.0, 3.0, "Tool"),
            "self_study": StudyAction(0, 5.0, 3.0, None),
        },
        job_energy_per_hour=8.0,
        job_satiety_per_hour=6.0,
        state_caps={"satiety": (500.0,) * 6, "energy": (500.0,) * 6,
                    "health": (500.0,) * 6},
        snapshot_interval=1000,
    )
    base.update(overrides)
    caps = base["state_caps"]
    tiers = max(len(v) for v in caps.values())

    def at(name, i):
        vals = caps[name]
        return vals[min(i, len(vals) - 1)]

    base["caps_by_tier"] = tuple(
        (at("satiety", i), at("energy", i), at("health", i)) for i in range(tiers))
    return WorldParams(**base)


def mini_config(params: WorldParams | None = None,
                recipes: dict[str, Recipe] | None = None,
                occupations: dict[str, OccupationSpec] | None = None,
                population: tuple[PopulationGroup, ...] = (),
                bread_satiety: float = 60.0) -> WorldConfig:
    commodities = {
        "Grain": CommoditySpec("Grain", Sector.PRIMARY, 1, True, 15.0,
                               from_decimal(10), 1000),
        "Meal": CommoditySpec("Meal", Sector.SECONDARY_FOOD, 1, True,
                              bread_satiety, from_decimal(50), 1000),
        "Ore": CommoditySpec("Ore", Sector.PRIMARY, 1, False, 0.0,
                             from_decimal(20), 1000),
        "Tool": CommoditySpec("Tool", Sector.TERTIARY_HIGH_TECH, 4, False, 0.0,
                              from_decimal(100), 1000),
        "Relic": CommoditySpec("Relic", Sector.SPECIAL_REWARD, None, True,
                               150.0, None, None),
    }
    if recipes is None:
        recipes = {
            "Grain": Recipe("Grain", {}, 2.0, 1.0, 0.5, 0.0, None),
            "Meal": Recipe("Meal", {"Grain": 2}, 4.0, 0.0, 1.0, 0.0, None),
            "Tool": Recipe("Tool", {"Ore": 1}, 10.0, 2.0, 2.0, 0.0, None),
        }
    tiers = {
        1: JobTier(1, "Entry", 1, 0.0, None, WageRegime.STATIC),
        2: JobTier(2, "Skilled", 2, 20.0, "Meal", WageRegime.STATIC),
        3: JobTier(3, "Backbone", 3, 70.0, None, WageRegime.STATIC),
        4: JobTier(4, "Expert", 4, 110.0, "Tool", WageRegime.DYNAMIC),
        5: JobTier(5, "Management", 5, 180.0, None, WageRegime.DYNAMIC),
        6: JobTier(6, "Leadership", 6, 320.0, None, WageRegime.DYNAMIC),
    }
    if occupations is None:
        occupations = {
            "Laborer": OccupationSpec(
                id="Laborer", tier=1, min_residential=1, knowledge_floor=0.0,
                eligibility_share=1.0, base_wage_units=from_decimal(200),
                regime=WageRegime.STATIC, prereq_commodity=None, positions=5,
                premium_rate=0.5, premium_reference=1.0,
                energy_per_hour=-1.0, satiety_per_hour=-1.0,
                tier_min_knowledge=0.0),
            "Engineer": OccupationSpec(
                id="Engineer", tier=4, min_residential=4, knowledge_floor=50.0,
                eligibility_share=0.25, base_wage_units=from_decimal(400),
                regime=WageRegime.DYNAMIC, prereq_commodity="Tool", positions=2,
                premium_rate=0.5, premium_reference=50.0,
                energy_per_hour=-1.0, satiety_per_hour=-1.0,
                tier_min_knowledge=110.0),
        }
    return WorldConfig(
        name="mini",
        params=params or mini_world_params(),
        commodities=commodities,
        recipes=recipes,
        job_tiers=tiers,
        occupations=occupations,
        population=population,
        catalog_order=tuple(commodities),
        scenario_hash="test",
        source_path="<mini>",
    )

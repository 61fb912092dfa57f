"""Scenario loading, validation, and the immutable world definition.

A scenario is a single YAML document with a versioned header.  Catalog
tables may live in separate files pulled in through ``include:``; included
files are merged at the top level before any validation happens.  Unknown
keys are hard errors: silent misconfiguration corrupts experiments.

All invariant checking is centralized in :func:`validate_catalog`, which
returns machine-readable diagnostics (code + path + message).
``load_scenario`` is the strict entry point: it parses, builds, validates,
and raises on the first problem class it finds.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .errors import DanglingReference, ParseError, ValidationError
from .money import from_decimal, to_decimal

SCHEMA_VERSION = 1


class Sector(str, Enum):
    PRIMARY = "primary"
    SECONDARY_FOOD = "secondary_food"
    SECONDARY_REFINING = "secondary_refining"
    TERTIARY_HIGH_TECH = "tertiary_high_tech"
    SPECIAL_REWARD = "special_reward"


class WageRegime(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class Diagnostic:
    """One machine-readable validation finding."""

    code: str
    path: str
    message: str


@dataclass(frozen=True)
class CommoditySpec:
    id: str
    sector: Sector
    residential_min: int | None
    is_food: bool
    satiety_value: float
    initial_price_units: int | None
    initial_pool_inventory: int | None

    @property
    def has_pool(self) -> bool:
        return self.initial_pool_inventory is not None


@dataclass(frozen=True)
class Recipe:
    output: str
    inputs: dict[str, int]
    energy_cost: float
    satiety_cost: float
    time_cost: float
    reward_prob: float
    reward_item: str | None


@dataclass(frozen=True)
class JobTier:
    tier: int
    name: str
    min_residential: int
    min_knowledge: float
    prerequisite: str | None
    wage_regime: WageRegime


@dataclass(frozen=True)
class OccupationSpec:
    id: str
    tier: int
    min_residential: int
    knowledge_floor: float
    eligibility_share: float
    base_wage_units: int
    regime: WageRegime
    prereq_commodity: str | None
    positions: int
    premium_rate: float
    premium_reference: float
    energy_per_hour: float
    satiety_per_hour: float
    # Tier-table knowledge minimum; the binding floor is the max of this and
    # knowledge_floor (the catalog keeps the declared value verbatim).
    tier_min_knowledge: float = 0.0

    @property
    def effective_knowledge_floor(self) -> float:
        return max(self.knowledge_floor, self.tier_min_knowledge)


@dataclass(frozen=True)
class SafetyNetParams:
    satiety_threshold: float
    persistence_ticks: int
    subsidy_item: str
    subsidy_amount: int


@dataclass(frozen=True)
class IncapacityParams:
    energy_min: float
    health_min: float


@dataclass(frozen=True)
class PhysiologyParams:
    satiety_decay_per_hour: float
    awake_hours_threshold: float
    sleep_deprivation_health_per_hour: float
    illness_prob_per_tick: float
    illness_damage: float
    sleep_energy_per_hour: float
    doctor_fee_units: int
    doctor_heal: float


@dataclass(frozen=True)
class EfficiencyParams:
    satiety_exponent: float
    energy_exponent: float
    health_exponent: float
    min_efficiency: float
    residential_factor_min: float
    knowledge_saturation: float
    knowledge_factor_min: float


@dataclass(frozen=True)
class StudyAction:
    fee_per_hour_units: int
    energy_per_hour: float
    satiety_per_hour: float
    requires_item: str | None


@dataclass(frozen=True)
class WorldParams:
    rng_seed: int
    time_scale: float
    tick_length: int
    recruitment_period: int
    education_rate_per_hour: float
    wage_shock_bound: float
    application_quota: tuple[int, ...]
    safety_net: SafetyNetParams
    incapacity: IncapacityParams
    physiology: PhysiologyParams
    efficiency: EfficiencyParams
    study: dict[str, StudyAction]
    job_energy_per_hour: float
    job_satiety_per_hour: float
    state_caps: dict[str, tuple[float, ...]]
    snapshot_interval: int
    # (satiety, energy, health) per tier, precomputed for the hot path
    caps_by_tier: tuple[tuple[float, float, float], ...] = field(
        compare=False, default=())

    def cap(self, state: str, tier: int) -> float:
        caps = self.state_caps[state]
        return caps[min(tier, len(caps)) - 1]

    def caps_for(self, tier: int) -> tuple[float, float, float]:
        return self.caps_by_tier[min(tier, len(self.caps_by_tier)) - 1]

    def quota(self, tier: int) -> int:
        return self.application_quota[min(tier, len(self.application_quota)) - 1]


@dataclass(frozen=True)
class PopulationGroup:
    prefix: str
    count: int
    policy: str
    residential_tier: int
    balance_units: int
    education: float
    satiety: float
    energy: float
    health: float
    inventory: dict[str, int]
    policy_params: dict


@dataclass(frozen=True)
class WorldConfig:
    name: str
    params: WorldParams
    commodities: dict[str, CommoditySpec]
    recipes: dict[str, Recipe]
    job_tiers: dict[int, JobTier]
    occupations: dict[str, OccupationSpec]
    population: tuple[PopulationGroup, ...]
    catalog_order: tuple[str, ...] = field(compare=False)
    scenario_hash: str = field(compare=False, default="")
    source_path: str = field(compare=False, default="")

    def pooled_commodities(self) -> list[CommoditySpec]:
        return [self.commodities[c] for c in self.catalog_order if self.commodities[c].has_pool]

    def initial_prices(self) -> dict[str, float]:
        return {
            c.id: c.initial_price_units / 10**12
            for c in self.pooled_commodities()
        }


# --------------------------------------------------------------------------
# parsing

STUDY_KINDS = ("paid_learning", "reading", "self_study")

_TOP_KEYS = {"schema_version", "name", "include", "world", "commodities",
             "recipes", "job_tiers", "occupations", "population"}
_WORLD_KEYS = {"rng_seed", "time_scale", "tick_length", "recruitment_period",
               "education_rate_per_hour", "wage_shock_bound", "application_quota",
               "safety_net", "incapacity", "physiology", "efficiency", "study",
               "job_defaults", "state_caps", "snapshot_interval"}
_COMMODITY_KEYS = {"id", "sector", "r_min", "food", "satiety_value",
                   "initial_price", "initial_pool_inventory"}
_RECIPE_KEYS = {"output", "inputs", "energy", "satiety", "time",
                "reward_prob", "reward_item"}
_TIER_KEYS = {"tier", "name", "min_residential", "min_knowledge",
              "prerequisite", "wage_type"}
_OCCUPATION_KEYS = {"id", "tier", "min_residential", "knowledge_floor",
                    "eligibility_share", "base_wage", "positions",
                    "premium_rate", "premium_reference",
                    "energy_per_hour", "satiety_per_hour"}
_GROUP_KEYS = {"prefix", "count", "policy", "residential_tier", "balance",
               "education", "satiety", "energy", "health", "inventory", "params"}


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ParseError(f"{path}: missing required field '{key}'")
    return mapping[key]


def _check_keys(mapping, allowed: set[str], path: str) -> None:
    if not isinstance(mapping, dict):
        raise ParseError(f"{path}: expected a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ParseError(f"{path}: unknown field(s) {sorted(unknown)}")


def _read_yaml(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: YAML syntax error: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a mapping")
    return doc


def _merge_includes(path: Path, seen: set[Path]) -> tuple[dict, list[Path]]:
    path = path.resolve()
    if path in seen:
        raise ParseError(f"{path}: include cycle detected")
    seen.add(path)
    doc = _read_yaml(path)
    files = [path]
    includes = doc.pop("include", [])
    if not isinstance(includes, list):
        raise ParseError(f"{path}: 'include' must be a list of paths")
    for rel in includes:
        sub, sub_files = _merge_includes(path.parent / str(rel), seen)
        files.extend(sub_files)
        sub.pop("schema_version", None)
        for key, value in sub.items():
            if key in doc:
                raise ParseError(f"{path}: key '{key}' defined in multiple files")
            doc[key] = value
    return doc, files


def _parse_commodity(raw, idx: int) -> CommoditySpec:
    path = f"commodities[{idx}]"
    _check_keys(raw, _COMMODITY_KEYS, path)
    cid = str(_require(raw, "id", path))
    try:
        sector = Sector(str(_require(raw, "sector", path)))
    except ValueError:
        raise ParseError(f"{path}: unknown sector '{raw.get('sector')}'")
    special = sector is Sector.SPECIAL_REWARD
    r_min = raw.get("r_min")
    if r_min is None and not special:
        raise ParseError(f"{path}: 'r_min' is required for non-special commodities")
    price = raw.get("initial_price")
    inventory = raw.get("initial_pool_inventory")
    if not special:
        if price is None or inventory is None:
            raise ParseError(f"{path}: pooled commodity needs initial_price and "
                             f"initial_pool_inventory")
    if (price is None) != (inventory is None):
        raise ParseError(f"{path}: initial_price and initial_pool_inventory "
                         f"must be given together")
    return CommoditySpec(
        id=cid,
        sector=sector,
        residential_min=int(r_min) if r_min is not None else None,
        is_food=bool(_require(raw, "food", path)),
        satiety_value=float(raw.get("satiety_value", 0.0)),
        initial_price_units=from_decimal(price) if price is not None else None,
        initial_pool_inventory=int(inventory) if inventory is not None else None,
    )


def _parse_recipe(raw, idx: int) -> Recipe:
    path = f"recipes[{idx}]"
    _check_keys(raw, _RECIPE_KEYS, path)
    inputs = raw.get("inputs") or {}
    if not isinstance(inputs, dict):
        raise ParseError(f"{path}: 'inputs' must be a mapping")
    parsed_inputs = {}
    for name, qty in inputs.items():
        if not isinstance(qty, int) or qty <= 0:
            raise ParseError(f"{path}.inputs[{name}]: quantities are positive integers")
        parsed_inputs[str(name)] = qty
    return Recipe(
        output=str(_require(raw, "output", path)),
        inputs=parsed_inputs,
        energy_cost=float(_require(raw, "energy", path)),
        satiety_cost=float(_require(raw, "satiety", path)),
        time_cost=float(_require(raw, "time", path)),
        reward_prob=float(raw.get("reward_prob", 0.0)),
        reward_item=str(raw["reward_item"]) if raw.get("reward_item") is not None else None,
    )


def _parse_tier(raw, idx: int) -> JobTier:
    path = f"job_tiers[{idx}]"
    _check_keys(raw, _TIER_KEYS, path)
    try:
        regime = WageRegime(str(_require(raw, "wage_type", path)))
    except ValueError:
        raise ParseError(f"{path}: wage_type must be 'static' or 'dynamic'")
    prereq = raw.get("prerequisite")
    return JobTier(
        tier=int(_require(raw, "tier", path)),
        name=str(_require(raw, "name", path)),
        min_residential=int(_require(raw, "min_residential", path)),
        min_knowledge=float(_require(raw, "min_knowledge", path)),
        prerequisite=str(prereq) if prereq is not None else None,
        wage_regime=regime,
    )


def _parse_occupation(raw, idx: int, tiers: dict[int, JobTier]) -> OccupationSpec:
    path = f"occupations[{idx}]"
    _check_keys(raw, _OCCUPATION_KEYS, path)
    tier_no = int(_require(raw, "tier", path))
    tier = tiers.get(tier_no)
    if tier is None:
        raise ParseError(f"{path}: tier {tier_no} is not defined in job_tiers")
    floor = float(_require(raw, "knowledge_floor", path))
    return OccupationSpec(
        id=str(_require(raw, "id", path)),
        tier=tier_no,
        min_residential=int(_require(raw, "min_residential", path)),
        knowledge_floor=floor,
        eligibility_share=float(_require(raw, "eligibility_share", path)),
        base_wage_units=from_decimal(_require(raw, "base_wage", path)),
        regime=tier.wage_regime,
        prereq_commodity=tier.prerequisite,
        positions=int(_require(raw, "positions", path)),
        premium_rate=float(raw.get("premium_rate", 0.5)),
        premium_reference=float(raw.get("premium_reference", max(floor, 1.0))),
        energy_per_hour=float(raw["energy_per_hour"]) if "energy_per_hour" in raw else -1.0,
        satiety_per_hour=float(raw["satiety_per_hour"]) if "satiety_per_hour" in raw else -1.0,
        tier_min_knowledge=tier.min_knowledge,
    )


def _parse_group(raw, idx: int) -> PopulationGroup:
    path = f"population[{idx}]"
    _check_keys(raw, _GROUP_KEYS, path)
    inventory = raw.get("inventory") or {}
    if not isinstance(inventory, dict):
        raise ParseError(f"{path}: 'inventory' must be a mapping")
    return PopulationGroup(
        prefix=str(_require(raw, "prefix", path)),
        count=int(_require(raw, "count", path)),
        policy=str(_require(raw, "policy", path)),
        residential_tier=int(_require(raw, "residential_tier", path)),
        balance_units=from_decimal(raw.get("balance", 0)),
        education=float(raw.get("education", 0.0)),
        satiety=float(raw.get("satiety", 400.0)),
        energy=float(raw.get("energy", 400.0)),
        health=float(raw.get("health", 400.0)),
        inventory={str(k): int(v) for k, v in inventory.items()},
        policy_params=dict(raw.get("params") or {}),
    )


def _parse_world(raw) -> WorldParams:
    _check_keys(raw, _WORLD_KEYS, "world")
    safety = _require(raw, "safety_net", "world")
    _check_keys(safety, {"satiety_threshold", "persistence_ticks",
                         "subsidy_item", "subsidy_amount"}, "world.safety_net")
    incap = _require(raw, "incapacity", "world")
    _check_keys(incap, {"energy_min", "health_min"}, "world.incapacity")
    phys = _require(raw, "physiology", "world")
    _check_keys(phys, {"satiety_decay_per_hour", "awake_hours_threshold",
                       "sleep_deprivation_health_per_hour", "illness_prob_per_tick",
                       "illness_damage", "sleep_energy_per_hour", "doctor_fee",
                       "doctor_heal"}, "world.physiology")
    eff = _require(raw, "efficiency", "world")
    _check_keys(eff, {"satiety_exponent", "energy_exponent", "health_exponent",
                      "min_efficiency", "residential_factor_min",
                      "knowledge_saturation", "knowledge_factor_min"}, "world.efficiency")
    study_raw = _require(raw, "study", "world")
    _check_keys(study_raw, set(STUDY_KINDS), "world.study")
    study = {}
    for kind in STUDY_KINDS:
        entry = _require(study_raw, kind, "world.study")
        _check_keys(entry, {"fee_per_hour", "energy_per_hour", "satiety_per_hour",
                            "requires_item"}, f"world.study.{kind}")
        study[kind] = StudyAction(
            fee_per_hour_units=from_decimal(entry.get("fee_per_hour", 0)),
            energy_per_hour=float(entry.get("energy_per_hour", 0.0)),
            satiety_per_hour=float(entry.get("satiety_per_hour", 0.0)),
            requires_item=(str(entry["requires_item"])
                           if entry.get("requires_item") is not None else None),
        )
    job_defaults = raw.get("job_defaults") or {}
    _check_keys(job_defaults, {"energy_per_hour", "satiety_per_hour"}, "world.job_defaults")
    caps_raw = _require(raw, "state_caps", "world")
    _check_keys(caps_raw, {"satiety", "energy", "health"}, "world.state_caps")
    caps = {}
    for name in ("satiety", "energy", "health"):
        values = _require(caps_raw, name, "world.state_caps")
        if not isinstance(values, list) or not values:
            raise ParseError(f"world.state_caps.{name}: expected a non-empty list")
        caps[name] = tuple(float(v) for v in values)
    quota = _require(raw, "application_quota", "world")
    if not isinstance(quota, list) or not quota:
        raise ParseError("world.application_quota: expected a non-empty list")
    tiers = max(len(caps["satiety"]), len(caps["energy"]), len(caps["health"]))

    def _cap_at(name: str, tier_index: int) -> float:
        values = caps[name]
        return values[min(tier_index, len(values) - 1)]

    caps_by_tier = tuple(
        (_cap_at("satiety", i), _cap_at("energy", i), _cap_at("health", i))
        for i in range(tiers))
    return WorldParams(
        caps_by_tier=caps_by_tier,
        rng_seed=int(_require(raw, "rng_seed", "world")),
        time_scale=float(raw.get("time_scale", 7.0)),
        tick_length=int(raw.get("tick_length", 300)),
        recruitment_period=int(_require(raw, "recruitment_period", "world")),
        education_rate_per_hour=float(_require(raw, "education_rate_per_hour", "world")),
        wage_shock_bound=float(raw.get("wage_shock_bound", 0.0)),
        application_quota=tuple(int(q) for q in quota),
        safety_net=SafetyNetParams(
            satiety_threshold=float(_require(safety, "satiety_threshold", "world.safety_net")),
            persistence_ticks=int(_require(safety, "persistence_ticks", "world.safety_net")),
            subsidy_item=str(_require(safety, "subsidy_item", "world.safety_net")),
            subsidy_amount=int(_require(safety, "subsidy_amount", "world.safety_net")),
        ),
        incapacity=IncapacityParams(
            energy_min=float(_require(incap, "energy_min", "world.incapacity")),
            health_min=float(_require(incap, "health_min", "world.incapacity")),
        ),
        physiology=PhysiologyParams(
            satiety_decay_per_hour=float(phys.get("satiety_decay_per_hour", 0.0)),
            awake_hours_threshold=float(phys.get("awake_hours_threshold", 1e18)),
            sleep_deprivation_health_per_hour=float(
                phys.get("sleep_deprivation_health_per_hour", 0.0)),
            illness_prob_per_tick=float(phys.get("illness_prob_per_tick", 0.0)),
            illness_damage=float(phys.get("illness_damage", 0.0)),
            sleep_energy_per_hour=float(phys.get("sleep_energy_per_hour", 0.0)),
            doctor_fee_units=from_decimal(phys.get("doctor_fee", 0)),
            doctor_heal=float(phys.get("doctor_heal", 0.0)),
        ),
        efficiency=EfficiencyParams(
            satiety_exponent=float(eff.get("satiety_exponent", 1.0)),
            energy_exponent=float(eff.get("energy_exponent", 1.0)),
            health_exponent=float(eff.get("health_exponent", 1.0)),
            min_efficiency=float(eff.get("min_efficiency", 0.05)),
            residential_factor_min=float(eff.get("residential_factor_min", 1.0)),
            knowledge_saturation=float(eff.get("knowledge_saturation", 600.0)),
            knowledge_factor_min=float(eff.get("knowledge_factor_min", 0.6)),
        ),
        study=study,
        job_energy_per_hour=float(job_defaults.get("energy_per_hour", 8.0)),
        job_satiety_per_hour=float(job_defaults.get("satiety_per_hour", 6.0)),
        state_caps=caps,
        snapshot_interval=int(raw.get("snapshot_interval", 1000)),
    )


def parse_scenario(path: str | Path) -> tuple[WorldConfig, str]:
    """Parse and build a scenario without invariant validation.

    Returns the config plus its content hash (sha256 over the top file and
    every include, in inclusion order).
    """
    top = Path(path)
    doc, files = _merge_includes(top, set())
    _check_keys(doc, _TOP_KEYS, str(top))
    version = _require(doc, "schema_version", str(top))
    if version != SCHEMA_VERSION:
        raise ParseError(f"{top}: unsupported schema_version {version} "
                         f"(this build reads version {SCHEMA_VERSION})")

    digest = hashlib.sha256()
    for f in files:
        digest.update(f.read_bytes())

    commodities = {}
    order = []
    for idx, raw in enumerate(doc.get("commodities") or []):
        spec = _parse_commodity(raw, idx)
        if spec.id in commodities:
            raise ParseError(f"commodities[{idx}]: duplicate commodity '{spec.id}'")
        commodities[spec.id] = spec
        order.append(spec.id)

    recipes = {}
    for idx, raw in enumerate(doc.get("recipes") or []):
        recipe = _parse_recipe(raw, idx)
        if recipe.output in recipes:
            raise ParseError(f"recipes[{idx}]: duplicate recipe for '{recipe.output}'")
        recipes[recipe.output] = recipe

    tiers = {}
    for idx, raw in enumerate(doc.get("job_tiers") or []):
        tier = _parse_tier(raw, idx)
        if tier.tier in tiers:
            raise ParseError(f"job_tiers[{idx}]: duplicate tier {tier.tier}")
        tiers[tier.tier] = tier

    occupations = {}
    for idx, raw in enumerate(doc.get("occupations") or []):
        occ = _parse_occupation(raw, idx, tiers)
        if occ.id in occupations:
            raise ParseError(f"occupations[{idx}]: duplicate occupation '{occ.id}'")
        occupations[occ.id] = occ

    groups = tuple(_parse_group(raw, idx)
                   for idx, raw in enumerate(doc.get("population") or []))
    prefixes = [g.prefix for g in groups]
    if len(set(prefixes)) != len(prefixes):
        raise ParseError("population: group prefixes must be unique")

    config = WorldConfig(
        name=str(doc.get("name", top.stem)),
        params=_parse_world(_require(doc, "world", str(top))),
        commodities=commodities,
        recipes=recipes,
        job_tiers=tiers,
        occupations=occupations,
        population=groups,
        catalog_order=tuple(order),
        scenario_hash=digest.hexdigest(),
        source_path=str(top),
    )
    return config, config.scenario_hash


# --------------------------------------------------------------------------
# validation

def validate_catalog(config: WorldConfig) -> list[Diagnostic]:
    """Check every documented invariant; empty list means the config is valid."""
    out: list[Diagnostic] = []

    def bad(code: str, path: str, message: str) -> None:
        out.append(Diagnostic(code, path, message))

    known = set(config.commodities)

    for cid, spec in config.commodities.items():
        path = f"commodities[{cid}]"
        if spec.has_pool:
            if spec.initial_price_units is None or spec.initial_price_units <= 0:
                bad("INITIAL_PRICE_RANGE", path, "initial price must be > 0")
            if spec.initial_pool_inventory <= 0:
                bad("POOL_INVENTORY_RANGE", path, "initial pool inventory must be > 0")
        if spec.sector is not Sector.SPECIAL_REWARD:
            if spec.residential_min is None or spec.residential_min < 1:
                bad("RESIDENTIAL_TIER_RANGE", path, "r_min must be an integer >= 1")
        if spec.is_food and spec.satiety_value <= 0:
            bad("FOOD_SATIETY_MISSING", path, "food commodities need satiety_value > 0")

    for output, recipe in config.recipes.items():
        path = f"recipes[{output}]"
        if output not in known:
            bad("DANGLING_REFERENCE", path, f"recipe output '{output}' is not in the catalog")
        elif config.commodities[output].sector is Sector.SPECIAL_REWARD:
            bad("SPECIAL_REWARD_RECIPE", path,
                "special-reward commodities must not have recipes")
        for name in recipe.inputs:
            if name not in known:
                bad("DANGLING_REFERENCE", f"{path}.inputs",
                    f"recipe input '{name}' is not in the catalog")
        if min(recipe.energy_cost, recipe.satiety_cost, recipe.time_cost) < 0:
            bad("RECIPE_COST_RANGE", path, "energy/satiety/time costs must be >= 0")
        if not recipe.inputs and (recipe.energy_cost <= 0 and recipe.satiety_cost <= 0
                                  and recipe.time_cost <= 0):
            bad("RECIPE_EMPTY", path,
                "recipe needs material inputs or a positive cost")
        if not 0.0 <= recipe.reward_prob <= 1.0:
            bad("REWARD_PROB_RANGE", path, "reward_prob must lie in [0, 1]")
        if recipe.reward_prob > 0 and recipe.reward_item is None:
            bad("REWARD_ITEM_MISSING", path,
                "reward_prob > 0 requires a reward_item")
        if recipe.reward_item is not None and recipe.reward_item not in known:
            bad("DANGLING_REFERENCE", path,
                f"reward item '{recipe.reward_item}' is not in the catalog")

    for tier_no, tier in config.job_tiers.items():
        path = f"job_tiers[{tier_no}]"
        if tier.prerequisite is not None and tier.prerequisite not in known:
            bad("DANGLING_REFERENCE", path,
                f"prerequisite '{tier.prerequisite}' is not in the catalog")
        if tier.min_residential < 1:
            bad("RESIDENTIAL_TIER_RANGE", path, "min_residential must be >= 1")

    for oid, occ in config.occupations.items():
        path = f"occupations[{oid}]"
        if not 0.0 < occ.eligibility_share <= 1.0:
            bad("ELIGIBILITY_SHARE_RANGE", path,
                "eligibility_share must lie in (0, 1]")
        if occ.base_wage_units <= 0:
            bad("BASE_WAGE_RANGE", path, "base_wage must be > 0")
        if occ.positions < 0:
            bad("POSITIONS_RANGE", path, "positions must be >= 0")
        if occ.regime is WageRegime.DYNAMIC and occ.premium_reference <= 0:
            bad("PREMIUM_REFERENCE_RANGE", path,
                "dynamic occupations need premium_reference > 0")
        if occ.tier not in config.job_tiers:
            bad("DANGLING_REFERENCE", path, f"tier {occ.tier} is not defined")

    p = config.params
    if p.time_scale <= 0:
        bad("TIME_SCALE_RANGE", "world.time_scale", "time_scale must be > 0")
    if p.tick_length <= 0:
        bad("TICK_LENGTH_RANGE", "world.tick_length", "tick_length must be > 0")
    if p.wage_shock_bound < 0:
        bad("SHOCK_BOUND_RANGE", "world.wage_shock_bound",
            "wage shock bound must be >= 0")
    if any(b < a for a, b in zip(p.application_quota, p.application_quota[1:])):
        bad("QUOTA_NOT_MONOTONE", "world.application_quota",
            "application quota must be non-decreasing in residential tier")
    for name, caps in p.state_caps.items():
        if any(b < a for a, b in zip(caps, caps[1:])):
            bad("STATE_CAPS_NOT_MONOTONE", f"world.state_caps.{name}",
                "state caps must be non-decreasing in residential tier")
        if any(c <= 0 for c in caps):
            bad("STATE_CAPS_RANGE", f"world.state_caps.{name}",
                "state caps must be > 0")
    if p.safety_net.subsidy_item not in known:
        bad("DANGLING_REFERENCE", "world.safety_net.subsidy_item",
            f"subsidy item '{p.safety_net.subsidy_item}' is not in the catalog")
    if p.safety_net.persistence_ticks < 1:
        bad("SAFETY_NET_RANGE", "world.safety_net.persistence_ticks",
            "persistence_ticks must be >= 1")
    if p.safety_net.subsidy_amount < 1:
        bad("SAFETY_NET_RANGE", "world.safety_net.subsidy_amount",
            "subsidy_amount must be >= 1")
    if not 0.0 <= p.physiology.illness_prob_per_tick <= 1.0:
        bad("ILLNESS_PROB_RANGE", "world.physiology.illness_prob_per_tick",
            "illness probability must lie in [0, 1]")
    if not 0.0 < p.efficiency.min_efficiency <= 1.0:
        bad("MIN_EFFICIENCY_RANGE", "world.efficiency.min_efficiency",
            "min_efficiency must lie in (0, 1]")
    if p.education_rate_per_hour < 0:
        bad("EDUCATION_RATE_RANGE", "world.education_rate_per_hour",
            "education rate must be >= 0")
    for kind, action in p.study.items():
        if action.requires_item is not None and action.requires_item not in known:
            bad("DANGLING_REFERENCE", f"world.study.{kind}.requires_item",
                f"study item '{action.requires_item}' is not in the catalog")

    for group in config.population:
        path = f"population[{group.prefix}]"
        if group.count < 0:
            bad("POPULATION_COUNT_RANGE", path, "count must be >= 0")
        if group.residential_tier < 1:
            bad("RESIDENTIAL_TIER_RANGE", path, "residential_tier must be >= 1")
        for item in group.inventory:
            if item not in known:
                bad("DANGLING_REFERENCE", f"{path}.inventory",
                    f"inventory item '{item}' is not in the catalog")

    return out


def load_scenario(path: str | Path) -> WorldConfig:
    """Parse, build, and validate a scenario file.

    Raises ParseError for structural problems, DanglingReference when any
    cross-reference is unresolved, and ValidationError for other invariant
    violations. Identical file bytes always produce an identical config.
    """
    config, _ = parse_scenario(path)
    diagnostics = validate_catalog(config)
    if diagnostics:
        dangling = [d for d in diagnostics if d.code == "DANGLING_REFERENCE"]
        if dangling:
            raise DanglingReference("; ".join(f"{d.path}: {d.message}" for d in dangling))
        raise ValidationError(diagnostics)
    return config


# --------------------------------------------------------------------------
# serialization

def serialize_config(config: WorldConfig) -> dict:
    """Render a config back to plain scenario data (single-document form).

    Catalog tables are emitted sorted by id, so equality of serialized forms
    is order-insensitive by construction.
    """
    p = config.params

    def commodity_row(c: CommoditySpec) -> dict:
        row: dict = {"id": c.id, "sector": c.sector.value, "food": c.is_food}
        if c.residential_min is not None:
            row["r_min"] = c.residential_min
        if c.satiety_value:
            row["satiety_value"] = c.satiety_value
        if c.has_pool:
            row["initial_price"] = to_decimal(c.initial_price_units)
            row["initial_pool_inventory"] = c.initial_pool_inventory
        return row

    def recipe_row(r: Recipe) -> dict:
        row: dict = {"output": r.output, "inputs": dict(sorted(r.inputs.items())),
                     "energy": r.energy_cost, "satiety": r.satiety_cost,
                     "time": r.time_cost, "reward_prob": r.reward_prob}
        if r.reward_item is not None:
            row["reward_item"] = r.reward_item
        return row

    def occupation_row(o: OccupationSpec) -> dict:
        row: dict = {"id": o.id, "tier": o.tier, "min_residential": o.min_residential,
                     "knowledge_floor": o.knowledge_floor,
                     "eligibility_share": o.eligibility_share,
                     "base_wage": to_decimal(o.base_wage_units),
                     "positions": o.positions,
                     "premium_rate": o.premium_rate,
                     "premium_reference": o.premium_reference}
        if o.energy_per_hour >= 0:
            row["energy_per_hour"] = o.energy_per_hour
        if o.satiety_per_hour >= 0:
            row["satiety_per_hour"] = o.satiety_per_hour
        return row

    return {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "world": {
            "rng_seed": p.rng_seed,
            "time_scale": p.time_scale,
            "tick_length": p.tick_length,
            "recruitment_period": p.recruitment_period,
            "education_rate_per_hour": p.education_rate_per_hour,
            "wage_shock_bound": p.wage_shock_bound,
            "application_quota": list(p.application_quota),
            "snapshot_interval": p.snapshot_interval,
            "safety_net": {
                "satiety_threshold": p.safety_net.satiety_threshold,
                "persistence_ticks": p.safety_net.persistence_ticks,
                "subsidy_item": p.safety_net.subsidy_item,
                "subsidy_amount": p.safety_net.subsidy_amount,
            },
            "incapacity": {"energy_min": p.incapacity.energy_min,
                           "health_min": p.incapacity.health_min},
            "physiology": {
                "satiety_decay_per_hour": p.physiology.satiety_decay_per_hour,
                "awake_hours_threshold": p.physiology.awake_hours_threshold,
                "sleep_deprivation_health_per_hour":
                    p.physiology.sleep_deprivation_health_per_hour,
                "illness_prob_per_tick": p.physiology.illness_prob_per_tick,
                "illness_damage": p.physiology.illness_damage,
                "sleep_energy_per_hour": p.physiology.sleep_energy_per_hour,
                "doctor_fee": to_decimal(p.physiology.doctor_fee_units),
                "doctor_heal": p.physiology.doctor_heal,
            },
            "efficiency": {
                "satiety_exponent": p.efficiency.satiety_exponent,
                "energy_exponent": p.efficiency.energy_exponent,
                "health_exponent": p.efficiency.health_exponent,
                "min_efficiency": p.efficiency.min_efficiency,
                "residential_factor_min": p.efficiency.residential_factor_min,
                "knowledge_saturation": p.efficiency.knowledge_saturation,
                "knowledge_factor_min": p.efficiency.knowledge_factor_min,
            },
            "study": {
                kind: {
                    "fee_per_hour": to_decimal(s.fee_per_hour_units),
                    "energy_per_hour": s.energy_per_hour,
                    "satiety_per_hour": s.satiety_per_hour,
                    "requires_item": s.requires_item,
                }
                for kind, s in config.params.study.items()
            },
            "job_defaults": {"energy_per_hour": p.job_energy_per_hour,
                             "satiety_per_hour": p.job_satiety_per_hour},
            "state_caps": {k: list(v) for k, v in p.state_caps.items()},
        },
        "commodities": [commodity_row(config.commodities[c])
                        for c in sorted(config.commodities)],
        "recipes": [recipe_row(config.recipes[r]) for r in sorted(config.recipes)],
        "job_tiers": [
            {"tier": t.tier, "name": t.name, "min_residential": t.min_residential,
             "min_knowledge": t.min_knowledge, "prerequisite": t.prerequisite,
             "wage_type": t.wage_regime.value}
            for t in sorted(config.job_tiers.values(), key=lambda t: t.tier)
        ],
        "occupations": [occupation_row(config.occupations[o])
                        for o in sorted(config.occupations)],
        "population": [
            {"prefix": g.prefix, "count": g.count, "policy": g.policy,
             "residential_tier": g.residential_tier,
             "balance": to_decimal(g.balance_units),
             "education": g.education, "satiety": g.satiety,
             "energy": g.energy, "health": g.health,
             "inventory": dict(sorted(g.inventory.items())),
             "params": dict(g.policy_params)}
            for g in config.population
        ],
    }


def default_scenario_path(name: str = "market_life") -> Path:
    """Path of a scenario shipped with the package."""
    here = Path(__file__).parent / "data" / "default"
    candidate = here / f"{name.replace('-', '_')}.yaml"
    if not candidate.exists():
        raise ParseError(f"no bundled scenario named '{name}'")
    return candidate

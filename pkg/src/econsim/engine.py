"""Deterministic discrete-time simulation loop.

Each tick runs a fixed phase order:

1. physiology + safety net for every agent, in agent-id order
2. policy invocation against the tick-start world view
3. pre-execution validation (dry run + bounded repair)
4. execution of validated sequences in agent-id order, trades serialized
   per pool in that same order
5. recruitment/wage phase on cycle boundaries
6. log flush and exact conservation check

Identical (scenario, seed) pairs produce byte-identical logs: every
stochastic draw comes from a stream keyed by the world seed and a stable
name, and nothing reads the wall clock.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import actions as act
from .agents import (AgentState, apply_recovery_action, apply_safety_net,
                     clamp_state, net_worth, tick_physiology)
from .config import WorldConfig
from .errors import AccountingError, ConfigError, EconsimError
from .labor import (RecruitmentState, WageSchedule, compute_wages,
                    pay_and_deplete, run_recruitment_cycle, study)
from .logs import EventWriter, SnapshotWriter, TransactionWriter
from .market import (CurrencyLedger, LiquidityPool, compute_price_index,
                     execute_buy, execute_sell, make_pools)
from .money import to_decimal
from .policies import Policy, PolicyContext, make_policy
from .production import ProductionRequest, execute_production
from .seeds import derive_stream
from .validator import simulate_actions

MAX_RECENT_FAILURES = 8


@dataclass
class SimulationClock:
    tick: int = 0
    tick_length: int = 300
    time_scale: float = 7.0

    @property
    def in_game_seconds(self) -> int:
        return self.tick * self.tick_length


@dataclass
class TickReport:
    tick: int
    trades: int = 0
    production_events: int = 0
    subsidies: int = 0
    failures: int = 0
    recruitment_ran: bool = False


@dataclass
class RunSummary:
    name: str
    seed: int
    ticks: int
    agents: int
    trades_total: int
    trades_by_commodity: dict[str, int]
    minted_trade: str
    burned_trade: str
    minted_wages: str
    burned_fees: str
    final_index: float
    artifacts: list[str] = field(default_factory=list)


class World:
    """Mutable run state owned by the tick loop."""

    def __init__(self, config: WorldConfig, seed: int):
        self.config = config
        self.seed = seed
        self.clock = SimulationClock(0, config.params.tick_length,
                                     config.params.time_scale)
        self.pools = make_pools(config.commodities)
        self.initial_reserves = {c: p.currency_reserve_units
                                 for c, p in self.pools.items()}
        self.initial_prices = config.initial_prices()
        self.ledger = CurrencyLedger(
            initial_reserve_units=sum(self.initial_reserves.values()))
        self.labor_rng = derive_stream(seed, "labor")

        self.agents: list[AgentState] = []
        self.policies: dict[str, Policy] = {}
        self.agent_rngs: dict[str, random.Random] = {}
        for group in config.population:
            policy = make_policy(group.policy, group.policy_params)
            for i in range(group.count):
                agent_id = f"{group.prefix}{i:04d}"
                agent = AgentState(
                    agent_id=agent_id,
                    balance_units=group.balance_units,
                    inventory=dict(group.inventory),
                    satiety=group.satiety,
                    energy=group.energy,
                    health=group.health,
                    education=group.education,
                    residential_tier=group.residential_tier,
                    policy_tag=group.policy,
                    policy_params=dict(group.policy_params),
                )
                clamp_state(agent, config)
                self.agents.append(agent)
                self.policies[agent_id] = policy
                self.agent_rngs[agent_id] = derive_stream(seed, "agent", agent_id)
        self.agents.sort(key=lambda a: a.agent_id)
        self.ledger.initial_balance_units = sum(a.balance_units for a in self.agents)

        self.recruitment = RecruitmentState()
        scores = [a.education for a in self.agents]
        from .labor import dynamic_threshold
        if self.agents:
            self.recruitment.thresholds = {
                oid: dynamic_threshold(occ, scores)
                for oid, occ in config.occupations.items()}
        else:
            self.recruitment.thresholds = {
                oid: occ.effective_knowledge_floor
                for oid, occ in config.occupations.items()}
        self.wage_schedule: WageSchedule = compute_wages(
            config, self.recruitment.thresholds, 1.0, self.labor_rng)

        self.transaction_writer: TransactionWriter | None = None
        self.event_writer: EventWriter | None = None

    # -- views ---------------------------------------------------------------

    def quotes(self) -> dict[str, float]:
        return {c: p.quote() for c, p in self.pools.items()}

    def price_map(self) -> dict[str, float]:
        """Marginal prices for every commodity; unpooled items price at 0."""
        prices = {c: 0.0 for c in self.config.commodities}
        prices.update(self.quotes())
        return prices

    def context_for(self, agent: AgentState, quotes: dict[str, float]) -> PolicyContext:
        return PolicyContext(
            agent=agent,
            config=self.config,
            quotes=quotes,
            wages=self.wage_schedule,
            thresholds=self.recruitment.thresholds,
            tick=self.clock.tick,
            budget_seconds=float(self.clock.tick_length),
            rng=self.agent_rngs[agent.agent_id],
            failures=tuple(agent.recent_failures),
        )

    # -- conservation ---------------------------------------------------------

    def check_conservation(self) -> None:
        balances = sum(a.balance_units for a in self.agents)
        if balances != self.ledger.expected_balance_total():
            raise AccountingError(
                f"tick {self.clock.tick}: agent balances {balances} != ledger "
                f"{self.ledger.expected_balance_total()}")
        pool_delta = sum(self.initial_reserves[c] - p.currency_reserve_units
                         for c, p in self.pools.items())
        if self.ledger.net_trade_units() != pool_delta:
            raise AccountingError(
                f"tick {self.clock.tick}: net minted {self.ledger.net_trade_units()} "
                f"!= pool reserve drop {pool_delta}")


def _record_failure(agent: AgentState, message: str) -> None:
    agent.recent_failures.append(message)
    if len(agent.recent_failures) > MAX_RECENT_FAILURES:
        del agent.recent_failures[0]


def _execute_sequence(world: World, agent: AgentState,
                      sequence: list[act.Action], report: TickReport) -> None:
    """Run one agent's validated actions with tick-budget clipping."""
    config = world.config
    clock = world.clock
    budget = float(clock.tick_length)
    rng = world.agent_rngs[agent.agent_id]

    for action in sequence:
        try:
            if isinstance(action, act.Buy):
                pool = world.pools.get(action.commodity)
                if pool is None:
                    raise EconsimError(f"no pool for {action.commodity}")
                receipt = execute_buy(pool, action.quantity, agent, world.ledger,
                                      clock.in_game_seconds)
                world.transaction_writer.write(clock.tick, receipt)
                report.trades += 1
            elif isinstance(action, act.Sell):
                pool = world.pools.get(action.commodity)
                if pool is None:
                    raise EconsimError(f"no pool for {action.commodity}")
                receipt = execute_sell(pool, action.quantity, agent, world.ledger,
                                       clock.in_game_seconds)
                world.transaction_writer.write(clock.tick, receipt)
                report.trades += 1
            elif isinstance(action, (act.Eat, act.SeeDoctor)):
                apply_recovery_action(agent, action, config, world.ledger)
            elif isinstance(action, act.Sleep):
                duration = min(action.duration, budget)
                if duration <= 0:
                    _record_failure(agent, "sleep: tick budget exhausted")
                    continue
                apply_recovery_action(agent, act.Sleep(duration), config)
                budget -= duration
            elif isinstance(action, act.Study):
                duration = min(action.duration, budget)
                if duration <= 0:
                    _record_failure(agent, "study: tick budget exhausted")
                    continue
                delta = study(agent, action.kind, duration, config, world.ledger)
                budget -= delta.hours * 3600.0
            elif isinstance(action, act.Work):
                duration = min(action.duration, budget)
                if duration <= 0 or agent.job is None:
                    _record_failure(agent, "work: no time or job")
                    continue
                occupation = config.occupations[agent.job]
                wage = world.wage_schedule.wage_units(agent.job)
                delta = pay_and_deplete(agent, occupation, duration / 3600.0,
                                        wage, config, world.ledger)
                budget -= delta.hours * 3600.0
            elif isinstance(action, act.Craft):
                if budget <= 0:
                    _record_failure(agent, "craft: tick budget exhausted")
                    continue
                request = ProductionRequest(agent.agent_id, action.commodity,
                                            action.quantity, budget)
                outcome = execute_production(agent, request, rng, config)
                budget -= outcome.labor_spent
                if outcome.produced_units > 0:
                    report.production_events += 1
                    world.event_writer.write(
                        "production", clock.tick, agent=agent.agent_id,
                        commodity=action.commodity, units=outcome.produced_units,
                        constraint=str(outcome.binding_constraint),
                        reward=outcome.reward_granted,
                        reward_count=outcome.reward_count)
                else:
                    _record_failure(
                        agent,
                        f"craft {action.commodity}: {outcome.binding_constraint}")
            # Idle: nothing
        except EconsimError as exc:
            _record_failure(agent, f"{act.describe(action)}: {exc}")
            report.failures += 1


def run_tick(world: World) -> TickReport:
    """Advance the world one tick through the fixed phase order."""
    config = world.config
    world.clock.tick += 1
    clock = world.clock
    report = TickReport(tick=clock.tick)

    # Phase 1: physiology and safety net.
    for agent in world.agents:
        was_incapacitated = agent.incapacitated
        tick_physiology(agent, float(clock.tick_length),
                        world.agent_rngs[agent.agent_id], config)
        subsidy = apply_safety_net(agent, config)
        if subsidy is not None:
            report.subsidies += 1
            world.event_writer.write(
                "subsidy", clock.tick, agent=agent.agent_id,
                granted=subsidy.subsidy_granted,
                force_fed=subsidy.satiety > 0)
        if agent.incapacitated != was_incapacitated:
            world.event_writer.write("incapacitation", clock.tick,
                                     agent=agent.agent_id,
                                     incapacitated=agent.incapacitated)

    # Phases 2+3: plan and validate against the tick-start view.
    quotes = world.quotes()
    planned: list[tuple[AgentState, list[act.Action]]] = []
    for agent in world.agents:
        ctx = world.context_for(agent, quotes)
        sequence = world.policies[agent.agent_id].plan(ctx)
        validation = simulate_actions(agent, sequence, config, world.pools,
                                      float(clock.tick_length),
                                      world.wage_schedule)
        for verdict in validation.violations():
            _record_failure(agent,
                            f"{act.describe(verdict.action)}: {verdict.reason}")
            report.failures += 1
        planned.append((agent, validation.executable()))

    # Phase 4: execute in agent-id order (per-pool serialization follows).
    for agent, sequence in planned:
        if sequence:
            _execute_sequence(world, agent, sequence, report)

    # Phase 5: recruitment and wages on cycle boundaries.
    if world.agents and clock.tick % config.params.recruitment_period == 0:
        report.recruitment_ran = True
        post_quotes = world.quotes()
        applications: dict[str, list[str]] = {}
        for agent in world.agents:
            ctx = world.context_for(agent, post_quotes)
            wanted = world.policies[agent.agent_id].applications(ctx)
            if wanted:
                applications[agent.agent_id] = list(wanted)
        world.recruitment.applications = applications
        assignments = run_recruitment_cycle(world.agents, config,
                                            world.recruitment)
        index = compute_price_index(world.pools, world.initial_prices,
                                    config.commodities)
        world.wage_schedule = compute_wages(config, world.recruitment.thresholds,
                                            index.pcr_overall, world.labor_rng)
        world.event_writer.write(
            "recruitment", clock.tick,
            cycle=world.recruitment.cycle_index,
            thresholds={k: round(v, 6) for k, v in
                        world.recruitment.thresholds.items()},
            assignments=[
                {"agent": agent_id, "occupation": occupation,
                 "education": round(_agent_by_id(world, agent_id).education, 6),
                 "residential_tier": _agent_by_id(world, agent_id).residential_tier}
                for agent_id, occupation in sorted(assignments.items())],
            index=index.pcr_overall)
        world.event_writer.write(
            "wages", clock.tick, cycle=world.recruitment.cycle_index,
            wages={oid: to_decimal(units)
                   for oid, units in world.wage_schedule.wages_units.items()})

    # Phase 6: conservation check (exact).
    world.check_conservation()
    return report


def _agent_by_id(world: World, agent_id: str) -> AgentState:
    for agent in world.agents:
        if agent.agent_id == agent_id:
            return agent
    raise KeyError(agent_id)


def build_world(config: WorldConfig, seed: int | None = None) -> World:
    for group in config.population:
        try:
            make_policy(group.policy)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    return World(config, config.params.rng_seed if seed is None else seed)


def run_scenario(config: WorldConfig, ticks: int, out_dir: str | Path,
                 seed: int | None = None) -> RunSummary:
    """Execute a full run and persist every artifact under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    world = build_world(config, seed)
    world.transaction_writer = TransactionWriter(out / "transactions.csv")
    world.event_writer = EventWriter(out / "events.jsonl")
    snapshot_writer = SnapshotWriter(out / "snapshots.csv")
    interval = max(1, config.params.snapshot_interval)

    def write_snapshots() -> None:
        prices = world.price_map()
        for agent in world.agents:
            snapshot_writer.write(world.clock.tick, agent,
                                  net_worth(agent, prices))

    trades_by_commodity: dict[str, int] = {}
    total_trades = 0
    try:
        write_snapshots()
        for _ in range(ticks):
            report = run_tick(world)
            total_trades += report.trades
            if world.clock.tick % interval == 0:
                write_snapshots()
        if ticks % interval != 0:
            write_snapshots()
    finally:
        world.transaction_writer.close()
        world.event_writer.close()
        snapshot_writer.close()

    from .logs import read_transactions
    for row in read_transactions(out / "transactions.csv"):
        trades_by_commodity[row.commodity] = trades_by_commodity.get(row.commodity, 0) + 1

    index = compute_price_index(world.pools, world.initial_prices,
                                config.commodities)
    summary = RunSummary(
        name=config.name,
        seed=world.seed,
        ticks=ticks,
        agents=len(world.agents),
        trades_total=total_trades,
        trades_by_commodity=dict(sorted(trades_by_commodity.items())),
        minted_trade=to_decimal(world.ledger.minted_trade_units),
        burned_trade=to_decimal(world.ledger.burned_trade_units),
        minted_wages=to_decimal(world.ledger.minted_wage_units),
        burned_fees=to_decimal(world.ledger.burned_fee_units),
        final_index=index.pcr_overall,
        artifacts=["transactions.csv", "events.jsonl", "snapshots.csv",
                   "summary.json", "manifest.json"],
    )

    prices = world.price_map()
    summary_doc = {
        "scenario": config.name,
        "seed": world.seed,
        "ticks": ticks,
        "agents": summary.agents,
        "trades_total": summary.trades_total,
        "trades_by_commodity": summary.trades_by_commodity,
        "currency": {
            "minted_trade": summary.minted_trade,
            "burned_trade": summary.burned_trade,
            "minted_wages": summary.minted_wages,
            "burned_fees": summary.burned_fees,
        },
        "final_index": summary.final_index,
        "final_quotes": {c: world.pools[c].quote() for c in sorted(world.pools)},
        "agents_final": {
            agent.agent_id: {
                "net_worth": net_worth(agent, prices),
                "balance": to_decimal(agent.balance_units),
                "education": agent.education,
                "job": agent.job,
                "residential_tier": agent.residential_tier,
                "policy": agent.policy_tag,
            }
            for agent in world.agents
        },
    }
    (out / "summary.json").write_text(
        json.dumps(summary_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    write_manifest(out, config, world.seed, ticks, summary.artifacts)
    return summary


def write_manifest(out: Path, config: WorldConfig, seed: int, ticks: int,
                   artifacts: list[str]) -> None:
    """Atomically record what produced this output directory."""
    manifest = {
        "scenario_path": config.source_path,
        "scenario_name": config.name,
        "scenario_hash": config.scenario_hash,
        "seed": seed,
        "ticks": ticks,
        "tool_version": _version(),
        "artifacts": sorted(artifacts),
    }
    tmp = out / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    tmp.replace(out / "manifest.json")


def read_manifest(out_dir: str | Path) -> dict | None:
    path = Path(out_dir) / "manifest.json"
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def _version() -> str:
    from . import __version__
    return __version__

"""Constant-product liquidity pools with an elastic money supply.

Each tradable commodity is paired with the base currency in its own pool.
The currency reserve is *defined* as a rounding function of the integer
inventory reserve, CR(IS) = round(k / IS) on the fixed-point currency grid.
Every trade's currency delta is a difference of that function at two
inventory levels, so:

* splitting a trade into sub-trades telescopes to the identical total,
* a buy of q followed by a sell of q restores reserves and balances
  exactly, and
* |IS*CR - k| stays below half a grid step times IS (relative error around
  1e-15 for default pool sizes, far inside the 1e-9 tolerance).

Currency minted by sells and burned by buys is tracked in a run-global
ledger so the money supply can be audited against pool reserves exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .agents import AgentState
from .config import CommoditySpec
from .errors import (InsufficientFunds, InsufficientInventory,
                     InsufficientLiquidity, NonPositiveQuantity)
from .money import SCALE


def _reserve(k_units: int, inventory: int) -> int:
    # round-half-up of k/IS on the currency grid
    return (2 * k_units + inventory) // (2 * inventory)


@dataclass
class LiquidityPool:
    """One commodity's reserves under the constant-product rule."""

    commodity: str
    inventory_supply: int
    currency_reserve_units: int
    k_units: int = 0

    def __post_init__(self):
        if self.k_units == 0:
            self.k_units = self.inventory_supply * self.currency_reserve_units

    @classmethod
    def from_spec(cls, spec: CommoditySpec) -> "LiquidityPool":
        inventory = spec.initial_pool_inventory
        reserve = spec.initial_price_units * inventory
        return cls(spec.id, inventory, reserve)

    def quote(self) -> float:
        """Marginal price for an infinitesimal trade: reserve ratio."""
        return self.currency_reserve_units / (self.inventory_supply * SCALE)

    def invariant_error(self) -> float:
        """Relative deviation of IS*CR from k."""
        product = self.inventory_supply * self.currency_reserve_units
        return abs(product - self.k_units) / self.k_units

    def cost_to_buy_units(self, quantity: int) -> int:
        """Currency (grid units) a buy of `quantity` would charge right now."""
        if quantity <= 0:
            raise NonPositiveQuantity(f"buy quantity must be positive, got {quantity}")
        if quantity >= self.inventory_supply:
            raise InsufficientLiquidity(
                f"{self.commodity}: cannot buy {quantity} of {self.inventory_supply} pooled units")
        new_reserve = _reserve(self.k_units, self.inventory_supply - quantity)
        return new_reserve - self.currency_reserve_units

    def proceeds_of_sell_units(self, quantity: int) -> int:
        """Currency (grid units) a sell of `quantity` would mint right now."""
        if quantity <= 0:
            raise NonPositiveQuantity(f"sell quantity must be positive, got {quantity}")
        new_reserve = _reserve(self.k_units, self.inventory_supply + quantity)
        return self.currency_reserve_units - new_reserve


@dataclass(frozen=True)
class TradeReceipt:
    commodity: str
    side: str                   # "buy" | "sell"
    quantity: int
    currency_delta_units: int   # grid units moved between agent and pool
    effective_price: float
    marginal_price_pre: float
    marginal_price_post: float
    timestamp: int              # in-game seconds
    agent_id: str


@dataclass
class CurrencyLedger:
    """Run-global mint/burn trail for the elastic money supply."""

    minted_trade_units: int = 0
    burned_trade_units: int = 0
    minted_wage_units: int = 0
    burned_fee_units: int = 0
    initial_reserve_units: int = 0
    initial_balance_units: int = 0

    def expected_balance_total(self) -> int:
        """Exact total of all agent balances implied by the ledger."""
        return (self.initial_balance_units
                + self.minted_trade_units - self.burned_trade_units
                + self.minted_wage_units - self.burned_fee_units)

    def net_trade_units(self) -> int:
        return self.minted_trade_units - self.burned_trade_units


def execute_buy(pool: LiquidityPool, quantity: int, buyer: AgentState,
                ledger: CurrencyLedger | None = None,
                timestamp: int = 0) -> TradeReceipt:
    """Buy `quantity` units from the pool, debiting the buyer's balance.

    The currency paid leaves circulation (tracked as burned in the ledger).
    """
    pre_quote = pool.quote()
    delta = pool.cost_to_buy_units(quantity)
    if buyer.balance_units < delta:
        raise InsufficientFunds(
            f"{buyer.agent_id}: buying {quantity} {pool.commodity} costs "
            f"{delta / SCALE:.6f}, balance {buyer.balance_units / SCALE:.6f}")
    pool.inventory_supply -= quantity
    pool.currency_reserve_units += delta
    buyer.balance_units -= delta
    buyer.inventory[pool.commodity] = buyer.inventory.get(pool.commodity, 0) + quantity
    if ledger is not None:
        ledger.burned_trade_units += delta
    return TradeReceipt(
        commodity=pool.commodity,
        side="buy",
        quantity=quantity,
        currency_delta_units=delta,
        effective_price=delta / (quantity * SCALE),
        marginal_price_pre=pre_quote,
        marginal_price_post=pool.quote(),
        timestamp=timestamp,
        agent_id=buyer.agent_id,
    )


def execute_sell(pool: LiquidityPool, quantity: int, seller: AgentState,
                 ledger: CurrencyLedger | None = None,
                 timestamp: int = 0) -> TradeReceipt:
    """Sell `quantity` units into the pool; the proceeds are freshly minted."""
    held = seller.inventory.get(pool.commodity, 0)
    if quantity <= 0:
        raise NonPositiveQuantity(f"sell quantity must be positive, got {quantity}")
    if held < quantity:
        raise InsufficientInventory(
            f"{seller.agent_id}: holds {held} {pool.commodity}, cannot sell {quantity}")
    pre_quote = pool.quote()
    delta = pool.proceeds_of_sell_units(quantity)
    pool.inventory_supply += quantity
    pool.currency_reserve_units -= delta
    if held == quantity:
        del seller.inventory[pool.commodity]
    else:
        seller.inventory[pool.commodity] = held - quantity
    seller.balance_units += delta
    if ledger is not None:
        ledger.minted_trade_units += delta
    return TradeReceipt(
        commodity=pool.commodity,
        side="sell",
        quantity=quantity,
        currency_delta_units=delta,
        effective_price=delta / (quantity * SCALE),
        marginal_price_pre=pre_quote,
        marginal_price_post=pool.quote(),
        timestamp=timestamp,
        agent_id=seller.agent_id,
    )


@dataclass(frozen=True)
class PriceIndexSnapshot:
    """Inflation index built from per-commodity price change ratios."""

    per_commodity: dict[str, float]
    pcr_food: float
    pcr_nonfood: float
    pcr_overall: float
    n_food: int
    n_nonfood: int


def compute_price_index(pools: dict[str, LiquidityPool],
                        initial_prices: dict[str, float],
                        catalog: dict[str, CommoditySpec]) -> PriceIndexSnapshot:
    """Geometric category means of price ratios, arithmetically weighted overall.

    The food and non-food means are geometric so a single spiking commodity
    cannot dominate; the overall index weights the two categories by their
    share of the tradable catalog.
    """
    ratios: dict[str, float] = {}
    food: list[float] = []
    nonfood: list[float] = []
    for commodity, pool in pools.items():
        ratio = pool.quote() / initial_prices[commodity]
        ratios[commodity] = ratio
        if catalog[commodity].is_food:
            food.append(ratio)
        else:
            nonfood.append(ratio)

    def geo_mean(values: list[float]) -> float:
        if not values:
            return 1.0
        product = 1.0
        for v in values:
            product *= v
        return product ** (1.0 / len(values))

    pcr_food = geo_mean(food)
    pcr_nonfood = geo_mean(nonfood)
    total = len(food) + len(nonfood)
    if total == 0:
        overall = 1.0
    else:
        overall = (len(food) * pcr_food + len(nonfood) * pcr_nonfood) / total
    return PriceIndexSnapshot(
        per_commodity=ratios,
        pcr_food=pcr_food,
        pcr_nonfood=pcr_nonfood,
        pcr_overall=overall,
        n_food=len(food),
        n_nonfood=len(nonfood),
    )


def make_pools(catalog: dict[str, CommoditySpec]) -> dict[str, LiquidityPool]:
    """Build one pool per pooled commodity, in catalog order."""
    return {spec.id: LiquidityPool.from_spec(spec)
            for spec in catalog.values() if spec.has_pool}

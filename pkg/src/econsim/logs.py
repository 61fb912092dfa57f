"""Append-only run artifacts with deterministic, documented serialization.

Transaction log: CSV, one row per trade.  Currency deltas are written as
exact 12-decimal fixed-point text (lossless for the internal grid); prices
are written with 12 fractional digits.  Event log: JSON lines with sorted
keys.  Snapshots: CSV, one row per agent per snapshot tick.  No artifact
ever contains wall-clock data, so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .agents import AgentState
from .market import TradeReceipt
from .money import SCALE, to_decimal

TRANSACTION_COLUMNS = ["tick", "in_game_seconds", "commodity", "side", "quantity",
                       "currency_delta", "effective_price", "marginal_price_pre",
                       "marginal_price_post", "agent_id"]

SNAPSHOT_COLUMNS = ["tick", "agent_id", "policy", "balance", "net_worth",
                    "satiety", "energy", "health", "education",
                    "residential_tier", "job", "incapacitated",
                    "low_satiety_streak", "hours_awake"]


def _fmt_price(value: float) -> str:
    return f"{value:.12f}"


class TransactionWriter:
    def __init__(self, path: Path):
        self._file = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file)
        self._writer.writerow(TRANSACTION_COLUMNS)

    def write(self, tick: int, receipt: TradeReceipt) -> None:
        self._writer.writerow([
            tick,
            receipt.timestamp,
            receipt.commodity,
            receipt.side,
            receipt.quantity,
            to_decimal(receipt.currency_delta_units),
            _fmt_price(receipt.effective_price),
            _fmt_price(receipt.marginal_price_pre),
            _fmt_price(receipt.marginal_price_post),
            receipt.agent_id,
        ])

    def close(self) -> None:
        self._file.close()


@dataclass(frozen=True)
class TradeRow:
    tick: int
    in_game_seconds: int
    commodity: str
    side: str
    quantity: int
    currency_delta: float
    effective_price: float
    marginal_price_pre: float
    marginal_price_post: float
    agent_id: str


def read_transactions(path: str | Path) -> list[TradeRow]:
    rows: list[TradeRow] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != TRANSACTION_COLUMNS:
            raise ValueError(f"{path}: not a transaction log (header {header})")
        for record in reader:
            rows.append(TradeRow(
                tick=int(record[0]),
                in_game_seconds=int(record[1]),
                commodity=record[2],
                side=record[3],
                quantity=int(record[4]),
                currency_delta=float(record[5]),
                effective_price=float(record[6]),
                marginal_price_pre=float(record[7]),
                marginal_price_post=float(record[8]),
                agent_id=record[9],
            ))
    return rows


class EventWriter:
    def __init__(self, path: Path):
        self._file = open(path, "w", encoding="utf-8")

    def write(self, kind: str, tick: int, **payload) -> None:
        record = {"kind": kind, "tick": tick, **payload}
        self._file.write(json.dumps(record, sort_keys=True) + "\n")

    def close(self) -> None:
        self._file.close()


def read_events(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


class SnapshotWriter:
    def __init__(self, path: Path):
        self._file = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file)
        self._writer.writerow(SNAPSHOT_COLUMNS)

    def write(self, tick: int, agent: AgentState, net_worth: float) -> None:
        self._writer.writerow([
            tick,
            agent.agent_id,
            agent.policy_tag,
            to_decimal(agent.balance_units),
            f"{net_worth:.6f}",
            f"{agent.satiety:.6f}",
            f"{agent.energy:.6f}",
            f"{agent.health:.6f}",
            f"{agent.education:.6f}",
            agent.residential_tier,
            agent.job or "",
            int(agent.incapacitated),
            agent.low_satiety_streak,
            f"{agent.hours_awake:.6f}",
        ])

    def close(self) -> None:
        self._file.close()


def read_snapshots(path: str | Path) -> list[dict]:
    out: list[dict] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != SNAPSHOT_COLUMNS:
            raise ValueError(f"{path}: not a snapshot file (header {reader.fieldnames})")
        for row in reader:
            out.append({
                "tick": int(row["tick"]),
                "agent_id": row["agent_id"],
                "policy": row["policy"],
                "balance": float(row["balance"]),
                "net_worth": float(row["net_worth"]),
                "satiety": float(row["satiety"]),
                "energy": float(row["energy"]),
                "health": float(row["health"]),
                "education": float(row["education"]),
                "residential_tier": int(row["residential_tier"]),
                "job": row["job"] or None,
                "incapacitated": bool(int(row["incapacitated"])),
                "low_satiety_streak": int(row["low_satiety_streak"]),
                "hours_awake": float(row["hours_awake"]),
            })
    return out


def final_snapshot(rows: list[dict]) -> list[dict]:
    """Rows belonging to the last snapshot tick in the file."""
    if not rows:
        return []
    last = max(r["tick"] for r in rows)
    return [r for r in rows if r["tick"] == last]
